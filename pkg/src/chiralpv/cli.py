"""Command-line front end: classify, verdict, table, verify-qft, check-clifford.

Exit codes::

    0  success / all checks passed
    1  internal error
    2  bad input: flags, unreadable file, parse error
    3  unsupported combination (e.g. a verdict for an achiral influence)
    4  a verification ran and reported a failure
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__
from .clifford import MOSTLY_MINUS, MOSTLY_PLUS, build_weyl_basis, verify_clifford
from .dsl import BUILTIN_TEXT, DslError, builtin, load_ham_file
from .kinematics import (
    ChiralityClass,
    MalformedExpression,
    compose_signature,
    classify_signature,
    parse_kinematic,
)
from .qft import DEFAULT_TOL, run_check
from .symmetry import classify_influence
from .verdict import SystemKind, UnsupportedInfluence, chirality_test, verdict_table

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_UNSUPPORTED = 3
EXIT_CHECK_FAILED = 4

COMMANDS = ("classify", "verdict", "table", "verify-qft", "check-clifford")

ENVELOPE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["tool_version", "command", "exit_code"],
    "properties": {
        "tool_version": {"type": "string"},
        "exit_code": {"type": "integer", "enum": [0, 1, 2, 3, 4]},
        "command": {
            "type": "object",
            "required": ["command", "output"],
            "properties": {
                "command": {"enum": list(COMMANDS)},
                "output": {"enum": ["text", "json"]},
                "input_path": {"type": ["string", "null"]},
                "builtin": {"type": ["string", "null"]},
                "kinematic": {"type": ["string", "null"]},
                "influence_class": {"type": ["string", "null"]},
                "system": {"enum": ["truly", "falsely", None]},
                "case_name": {"enum": ["nc", "axion", None]},
                "seed": {"type": "integer"},
                "samples": {"type": "integer", "minimum": 1},
                "tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "result": {"type": "object"},
        "error": {
            "type": "object",
            "required": ["kind", "message"],
            "properties": {
                "kind": {"type": "string"},
                "message": {"type": "string"},
                "span": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
            },
        },
    },
    "oneOf": [{"required": ["result"]}, {"required": ["error"]}],
}


class InputError(Exception):
    """Bad user input that argparse cannot catch; maps to exit 2."""


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


class _Parser(argparse.ArgumentParser):
    def exit(self, status=0, message=None):
        if message:
            self._print_message(message, sys.stderr)
        raise _ArgparseExit(status)


class _ArgparseExit(Exception):
    def __init__(self, status):
        self.status = status


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", choices=("text", "json"), default="text")

    influence = _Parser(add_help=False)
    influence.add_argument("input_path", nargs="?", help=".ham file with a Hamiltonian")
    influence.add_argument("--builtin", choices=sorted(BUILTIN_TEXT), help="builtin Hamiltonian")
    influence.add_argument("--kinematic", metavar="EXPR", help='nonrelativistic operator, e.g. "sigma_e . p"')
    influence.add_argument("--static-propagator", action="store_true",
                           help="absorb scalar-field factors into the coupling")

    parser = _Parser(prog="chiralpv", description="Chirality classification of parity-violating interactions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("classify", parents=[common, influence], help="classify a Hamiltonian or kinematic operator")

    v = sub.add_parser("verdict", parents=[common, influence], help="run the system/influence chirality test")
    v.add_argument("--system", choices=("truly", "falsely"), required=True)
    v.add_argument("--class", dest="influence_class", choices=("truly", "falsely", "achiral"),
                   help="give the influence class directly")

    sub.add_parser("table", parents=[common], help="print all four chirality-test rows")

    q = sub.add_parser("verify-qft", parents=[common], help="numerical bispinor sign-chain check")
    q.add_argument("--case", dest="case_name", choices=("nc", "axion"), required=True)
    q.add_argument("--seed", type=_non_negative_int, default=42)
    q.add_argument("--samples", type=_positive_int, default=1000)
    q.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
    q.add_argument("--workers", type=_positive_int, default=1)
    q.add_argument("--per-sample", action="store_true", help="include every sample in JSON output")

    c = sub.add_parser("check-clifford", parents=[common], help="verify the gamma-matrix algebra exactly")
    c.add_argument("--signature", choices=("mostly-minus", "mostly-plus"), default="mostly-minus")
    return parser


def _config(args: argparse.Namespace) -> dict:
    cfg = {"command": args.command, "output": args.output}
    for key in ("input_path", "builtin", "kinematic", "influence_class", "system", "case_name",
                "seed", "samples", "tol"):
        if hasattr(args, key):
            cfg[key] = getattr(args, key)
    if getattr(args, "static_propagator", False):
        cfg["static_propagator"] = True
    if hasattr(args, "signature"):
        cfg["signature"] = args.signature
    return cfg


# ------------------------------------------------------------------ commands


_CLASS_FLAG = {"truly": ChiralityClass.TRULY_CHIRAL, "falsely": ChiralityClass.FALSELY_CHIRAL,
               "achiral": ChiralityClass.ACHIRAL}


def _influence_sources(args) -> list[str]:
    sources = [name for name in ("input_path", "builtin", "kinematic") if getattr(args, name, None)]
    if getattr(args, "influence_class", None):
        sources.append("influence_class")
    return sources


def _classify(args) -> tuple[ChiralityClass, dict, list[str]]:
    """Return (class, payload, text lines) for the chosen influence source."""
    if args.kinematic:
        sig = compose_signature(parse_kinematic(args.kinematic))
        cls = classify_signature(sig)
        rot = "invariant" if sig.rotational_scalar else "not invariant"
        text = f"{cls.value} (P:{'+' if sig.p_sign > 0 else '−'}, T:{'+' if sig.t_sign > 0 else '−'}, R:{rot})"
        payload = {"source": "kinematic", "expression": args.kinematic, "class": cls.value,
                   "p_sign": sig.p_sign, "t_sign": sig.t_sign, "rotational_scalar": sig.rotational_scalar}
        return cls, payload, [text]
    if args.builtin:
        ir, source = builtin(args.builtin), "builtin"
    else:
        try:
            ir = load_ham_file(args.input_path, static_propagator=args.static_propagator)
        except OSError as exc:
            raise InputError(f"cannot read {args.input_path}: {exc.strerror}") from None
        source = "file"
    result = classify_influence(ir)
    lines = [f"{result.chirality.value} ({result.signature_text()})"]
    if result.chirality is ChiralityClass.UNDETERMINED:
        for k, ((sign, term), cls) in enumerate(zip(ir.terms, result.term_classes)):
            lines.append(f"  term {k}: {'+' if sign > 0 else '-'} {term.render()}  ->  {cls.value}")
        lines.extend(f"  note: {n}" for n in result.notes)
    payload = {"source": source, **result.to_dict()}
    return result.chirality, payload, lines


def cmd_classify(args) -> tuple[int, dict, list[str]]:
    sources = _influence_sources(args)
    if len(sources) != 1:
        raise InputError("give exactly one of: a .ham file, --builtin or --kinematic")
    _, payload, lines = _classify(args)
    return EXIT_OK, payload, lines


def cmd_verdict(args) -> tuple[int, dict, list[str]]:
    sources = _influence_sources(args)
    if len(sources) != 1:
        raise InputError("give exactly one of: a .ham file, --builtin, --kinematic or --class")
    if args.influence_class:
        influence, classification = _CLASS_FLAG[args.influence_class], None
    else:
        influence, classification, _ = _classify(args)
    system = SystemKind.TRULY_CHIRAL if args.system == "truly" else SystemKind.FALSELY_CHIRAL
    verdict = chirality_test(system, influence)
    payload = verdict.to_dict()
    payload["pved_summary"] = verdict.summary()
    if classification is not None:
        payload["classification"] = classification
    lines = [verdict.summary(), f"  system: {system.value}", f"  influence: {influence.value}"]
    lines += [f"  [{s.operator}] {s.identity}" for s in verdict.derivation]
    lines.append(f"  note: {verdict.note}")
    return EXIT_OK, payload, lines


def cmd_table(args) -> tuple[int, dict, list[str]]:
    rows = verdict_table()
    header = f"{'system':<8}{'influence':<16}{'relation':<24}{'diagonal':<18}PVED"
    lines = [header, "-" * len(header)]
    for v in rows:
        lines.append(f"{v.system.short:<8}{v.influence.value:<16}{v.relation.value:<24}"
                     f"{v.relation.equation:<18}{'possible' if v.pved_possible else 'impossible'}")
    return EXIT_OK, {"rows": [v.to_dict() for v in rows]}, lines


def cmd_verify_qft(args) -> tuple[int, dict, list[str]]:
    report = run_check(args.case_name, seed=args.seed, n_samples=args.samples, tol=args.tol,
                       workers=args.workers)
    payload = report.to_dict(include_samples=args.per_sample)
    counts, measured = report.counts(), report.measured_signs()
    lines = [f"case {report.case_name} ({report.hamiltonian}): seed {report.seed}, "
             f"{report.samples} samples, tol {report.tolerance:g}",
             f"chain sign: {report.chain_sign:+d}",
             f"{'identity':<24}{'expected':>9}{'measured':>10}{'nonzero':>9}{'degenerate':>12}"]
    for name, c in counts.items():
        expected = report.expected_signs[name.removeprefix("generic_").replace("phi_rotation", "rotation")]
        seen = ",".join(f"{s:+d}" for s in measured.get(name, [])) or "-"
        lines.append(f"{name:<24}{expected:>+9d}{seen:>10}{c['nonzero']:>9}{c['degenerate']:>12}")
    lines.append(f"max |deviation|: {report.max_abs_deviation:.3e}")
    lines.append("PASSED" if report.passed else "FAILED")
    return (EXIT_OK if report.passed else EXIT_CHECK_FAILED), payload, lines


def cmd_check_clifford(args) -> tuple[int, dict, list[str]]:
    signature = MOSTLY_MINUS if args.signature == "mostly-minus" else MOSTLY_PLUS
    report = verify_clifford(build_weyl_basis(signature))
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}" + ("" if c.passed else f"  ({c.detail})")
             for c in report.checks]
    lines.append(f"{sum(c.passed for c in report.checks)}/{len(report.checks)} checks passed "
                 f"({'exact' if report.exact else 'floating point'})")
    return (EXIT_OK if report.passed else EXIT_CHECK_FAILED), report.to_dict(), lines


_HANDLERS = {
    "classify": cmd_classify,
    "verdict": cmd_verdict,
    "table": cmd_table,
    "verify-qft": cmd_verify_qft,
    "check-clifford": cmd_check_clifford,
}


def _emit_json(envelope: dict, stream) -> None:
    stream.write(json.dumps(envelope, sort_keys=True, ensure_ascii=False, indent=2) + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgparseExit as exc:
        return exc.status
    envelope = {"tool_version": __version__, "command": _config(args)}
    error = None
    try:
        code, payload, lines = _HANDLERS[args.command](args)
    except DslError as exc:
        code, error = EXIT_INPUT, {"kind": type(exc).__name__, "message": exc.message, "span": list(exc.span)}
        detail = f"error: {exc}\n{exc.pointer()}"
    except MalformedExpression as exc:
        code, error = EXIT_INPUT, {"kind": "MalformedExpression", "message": str(exc)}
        detail = f"error: {exc}"
    except InputError as exc:
        code, error = EXIT_INPUT, {"kind": "InputError", "message": str(exc)}
        detail = f"error: {exc}"
    except UnsupportedInfluence as exc:
        code, error = EXIT_UNSUPPORTED, {"kind": "UnsupportedInfluence", "message": str(exc)}
        detail = f"error: {exc}"
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to exit 1
        code, error = EXIT_INTERNAL, {"kind": type(exc).__name__, "message": str(exc)}
        detail = f"internal error: {type(exc).__name__}: {exc}"

    envelope["exit_code"] = code
    if error is not None:
        envelope["error"] = error
        print(detail, file=sys.stderr)
        if args.output == "json":
            _emit_json(envelope, sys.stdout)
        return code
    envelope["result"] = payload
    if args.output == "json":
        _emit_json(envelope, sys.stdout)
    else:
        print("\n".join(lines))
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
