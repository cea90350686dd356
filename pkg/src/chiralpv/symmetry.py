"""Parity, time reversal and rotations acting on a Hamiltonian IR.

Each bilinear kind carries a sign per transformation; for Lorentz-indexed
bilinears the sign depends on whether the index is temporal or spatial.  A
contracted pair contributes the product of its members' signs, which has to
come out the same for the temporal and the spatial components.

Time reversal is antiunitary.  ``T H T^-1`` is compared against ``H^dagger``,
so a term's sign is the product of

* the conjugation of its coupling (explicit ``i`` gives -1),
* the operator signs of its bilinears,
* the Hermitian-conjugation signs relating ``H^dagger`` to ``H`` (again -1 per
  explicit ``i`` and -1 per anti-Hermitian ``psibar g5 psi`` density).

The coupling contributions cancel, leaving -1 per pseudoscalar density.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .dsl import FieldBilinear, HamiltonianIR, InteractionTerm, Structure, render
from .kinematics import ChiralityClass

__all__ = [
    "CoordinateMap",
    "TransformTable",
    "PARITY_TABLE",
    "TIME_REVERSAL_TABLE",
    "HERMITICITY",
    "TermSign",
    "TransformResult",
    "SymmetryError",
    "InconsistentContraction",
    "MixedSignTerms",
    "FreeIndexError",
    "InfluenceClassification",
    "parity_transform",
    "time_reversal_transform",
    "rotation_transform",
    "classify_influence",
    "compose",
]


class CoordinateMap(enum.Enum):
    IDENTITY = "(t,x)->(t,x)"
    SPACE_INVERSION = "(t,x)->(t,-x)"
    TIME_INVERSION = "(t,x)->(-t,x)"
    SPACETIME_INVERSION = "(t,x)->(-t,-x)"

    def then(self, other: "CoordinateMap") -> "CoordinateMap":
        flips = {
            CoordinateMap.IDENTITY: (False, False),
            CoordinateMap.SPACE_INVERSION: (False, True),
            CoordinateMap.TIME_INVERSION: (True, False),
            CoordinateMap.SPACETIME_INVERSION: (True, True),
        }
        a, b = flips[self], flips[other]
        key = (a[0] != b[0], a[1] != b[1])
        return {v: k for k, v in flips.items()}[key]


@dataclass(frozen=True)
class TransformTable:
    """Per-kind signs as (temporal, spatial); index-free kinds repeat one sign."""

    name: str
    signs: dict

    def sign(self, kind: Structure, component: str = "time") -> int:
        t, s = self.signs[kind]
        return t if component == "time" else s


PARITY_TABLE = TransformTable("P", {
    Structure.SCALAR: (+1, +1),
    Structure.PSEUDOSCALAR: (-1, -1),
    Structure.VECTOR: (+1, -1),
    Structure.AXIAL_VECTOR: (-1, +1),
})

# operator signs of T psibar Gamma psi T^-1; cross-checked against the explicit
# gamma^1 gamma^3 K action on bispinors in chiralpv.qft
TIME_REVERSAL_TABLE = TransformTable("T", {
    Structure.SCALAR: (+1, +1),
    Structure.PSEUDOSCALAR: (+1, +1),
    Structure.VECTOR: (+1, -1),
    Structure.AXIAL_VECTOR: (+1, -1),
})

# (psibar Gamma psi)^dagger = HERMITICITY[kind] * psibar Gamma psi
HERMITICITY = {
    Structure.SCALAR: +1,
    Structure.PSEUDOSCALAR: -1,
    Structure.VECTOR: +1,
    Structure.AXIAL_VECTOR: +1,
}


class SymmetryError(ValueError):
    pass


class InconsistentContraction(SymmetryError):
    def __init__(self, term_index: int, index: str, time_sign: int, space_sign: int):
        self.term_index, self.index = term_index, index
        super().__init__(f"term {term_index}: contraction over {index!r} gives {time_sign:+d} for the "
                         f"temporal and {space_sign:+d} for the spatial components")


class MixedSignTerms(SymmetryError):
    def __init__(self, operator: str, term_signs: list["TermSign"]):
        self.operator = operator
        self.term_signs = term_signs
        detail = ", ".join(f"term {t.index}: {t.sign:+d}" for t in term_signs)
        super().__init__(f"terms transform with different signs under {operator} ({detail})")


class FreeIndexError(SymmetryError):
    pass


@dataclass(frozen=True)
class TermSign:
    index: int
    sign: int
    steps: tuple[str, ...] = ()


@dataclass(frozen=True)
class TransformResult:
    operator: str
    overall_sign: int
    coordinate_map: CoordinateMap
    coefficient_conjugated: bool
    consistent: bool
    terms: tuple[TermSign, ...] = ()

    def to_dict(self) -> dict:
        return {
            "operator": self.operator,
            "overall_sign": self.overall_sign,
            "coordinate_map": self.coordinate_map.value,
            "coefficient_conjugated": self.coefficient_conjugated,
            "consistent": self.consistent,
            "terms": [{"index": t.index, "sign": t.sign, "steps": list(t.steps)} for t in self.terms],
        }


def compose(first: TransformResult, second: TransformResult) -> TransformResult:
    """Apply ``first`` then ``second``."""
    return TransformResult(
        f"{second.operator}{first.operator}",
        first.overall_sign * second.overall_sign,
        first.coordinate_map.then(second.coordinate_map),
        first.coefficient_conjugated != second.coefficient_conjugated,
        first.consistent and second.consistent,
    )


def _check_free_indices(term: InteractionTerm, k: int):
    if not term.fully_contracted:
        free = sorted({n for n in term.index_names() if term.index_names().count(n) != 2})
        raise FreeIndexError(f"term {k} has uncontracted Lorentz index {', '.join(free)}")


def _bilinear_sign(table: TransformTable, term: InteractionTerm, k: int) -> tuple[int, list[str]]:
    """Product of table signs over one term, pairing contracted indices."""
    sign = 1
    steps = []
    paired = set()
    for name, (i, j) in sorted(term.contractions):
        a, b = term.factors[i], term.factors[j]
        t = table.sign(a.structure.kind, "time") * table.sign(b.structure.kind, "time")
        s = table.sign(a.structure.kind, "space") * table.sign(b.structure.kind, "space")
        if t != s:
            raise InconsistentContraction(k, name, t, s)
        steps.append(f"{table.name}: {_label(a)} x {_label(b)} contracted over {name}: "
                     f"time {t:+d}, space {s:+d}")
        sign *= t
        paired.update((i, j))
    for i, f in enumerate(term.factors):
        if i in paired:
            continue
        s = table.sign(f.structure.kind)
        steps.append(f"{table.name}: {_label(f)} {s:+d}")
        sign *= s
    return sign, steps


def _label(f: FieldBilinear) -> str:
    return f"{f.structure.kind.value}({f.species})"


def _common_sign(operator: str, term_signs: list[TermSign]) -> int:
    signs = {t.sign for t in term_signs}
    if len(signs) > 1:
        raise MixedSignTerms(operator, term_signs)
    return signs.pop()


def parity_transform(ir: HamiltonianIR) -> TransformResult:
    term_signs = []
    for k, (_, term) in enumerate(ir.terms):
        _check_free_indices(term, k)
        sign, steps = _bilinear_sign(PARITY_TABLE, term, k)
        term_signs.append(TermSign(k, sign, tuple(steps)))
    return TransformResult("P", _common_sign("P", term_signs), CoordinateMap.SPACE_INVERSION,
                           False, True, tuple(term_signs))


def time_reversal_transform(ir: HamiltonianIR) -> TransformResult:
    """Sign ``s`` in ``T H T^-1 = s H^dagger``."""
    term_signs = []
    for k, (_, term) in enumerate(ir.terms):
        _check_free_indices(term, k)
        op_sign, steps = _bilinear_sign(TIME_REVERSAL_TABLE, term, k)
        conj = term.coupling.conjugation_sign
        herm = conj
        for f in term.factors:
            herm *= HERMITICITY[f.structure.kind]
        steps.append(f"antiunitary conjugation of coupling {term.coupling.render()}: {conj:+d}")
        steps.append(f"relative to H^dagger: {herm:+d}")
        term_signs.append(TermSign(k, conj * op_sign * herm, tuple(steps)))
    return TransformResult("T", _common_sign("T", term_signs), CoordinateMap.TIME_INVERSION,
                           True, True, tuple(term_signs))


def rotation_transform(ir: HamiltonianIR, angle: float = math.pi, axis="y") -> TransformResult:
    """Fully contracted terms are rotational scalars: sign +1 for any rotation."""
    if isinstance(axis, str):
        if axis not in ("x", "y", "z"):
            raise ValueError(f"axis must be x, y, z or a unit 3-vector, got {axis!r}")
    else:
        n = [float(c) for c in axis]
        if len(n) != 3 or not math.isclose(math.fsum(c * c for c in n), 1.0, rel_tol=1e-12):
            raise ValueError(f"rotation axis must be a unit 3-vector, got {axis!r}")
    if not math.isfinite(angle):
        raise ValueError("rotation angle must be finite")
    term_signs = []
    for k, (_, term) in enumerate(ir.terms):
        _check_free_indices(term, k)
        term_signs.append(TermSign(k, 1, ("R: fully contracted, rotational scalar",)))
    return TransformResult("R", 1, CoordinateMap.IDENTITY, False, True, tuple(term_signs))


@dataclass(frozen=True)
class InfluenceClassification:
    chirality: ChiralityClass
    parity: TransformResult | None
    time_reversal: TransformResult | None
    rotation: TransformResult | None
    term_classes: tuple[ChiralityClass, ...] = ()
    parity_even: HamiltonianIR | None = None
    parity_odd: HamiltonianIR | None = None
    notes: tuple[str, ...] = field(default=())

    def signature_text(self) -> str:
        def fmt(r):
            if r is None:
                return "mixed"
            return "+" if r.overall_sign > 0 else "−"
        rot = "invariant" if self.rotation is not None and self.rotation.overall_sign == 1 else "not invariant"
        return f"P:{fmt(self.parity)}, T:{fmt(self.time_reversal)}, R:{rot}"

    def to_dict(self) -> dict:
        return {
            "class": self.chirality.value,
            "parity": self.parity.to_dict() if self.parity else None,
            "time_reversal": self.time_reversal.to_dict() if self.time_reversal else None,
            "rotation": self.rotation.to_dict() if self.rotation else None,
            "term_classes": [c.value for c in self.term_classes],
            "parity_even": render(self.parity_even) if self.parity_even else None,
            "parity_odd": render(self.parity_odd) if self.parity_odd else None,
            "notes": list(self.notes),
        }


def _class_from_signs(p: int, t: int, rotation_invariant: bool) -> ChiralityClass:
    if p == 1:
        return ChiralityClass.ACHIRAL
    if not rotation_invariant:
        return ChiralityClass.NOT_ROTATIONAL_SCALAR
    return ChiralityClass.TRULY_CHIRAL if t == 1 else ChiralityClass.FALSELY_CHIRAL


def classify_influence(ir: HamiltonianIR) -> InfluenceClassification:
    """Truly chiral: (P -1, T +1, R invariant); falsely chiral: (-1, -1, invariant)."""
    rot = rotation_transform(ir)
    try:
        p = parity_transform(ir)
    except MixedSignTerms as exc:
        return _undetermined(ir, exc, rot)
    try:
        t = time_reversal_transform(ir)
    except MixedSignTerms as exc:
        # parity-odd overall but terms differ under T
        return _undetermined(ir, exc, rot, parity=p)
    cls = _class_from_signs(p.overall_sign, t.overall_sign, rot.overall_sign == 1)
    return InfluenceClassification(cls, p, t, rot, term_classes=(cls,) * len(ir))


def _undetermined(ir, exc: MixedSignTerms, rot, parity=None) -> InfluenceClassification:
    term_classes = []
    even, odd = [], []
    for k, (sign, term) in enumerate(ir.terms):
        single = HamiltonianIR(((1, term),))
        sub = classify_influence(single)
        term_classes.append(sub.chirality)
        (even if sub.parity.overall_sign == 1 else odd).append((sign, term))
    try:
        t = time_reversal_transform(ir)
    except MixedSignTerms:
        t = None
    return InfluenceClassification(
        ChiralityClass.UNDETERMINED, parity, t, rot,
        term_classes=tuple(term_classes),
        parity_even=HamiltonianIR(tuple(even)) if even else None,
        parity_odd=HamiltonianIR(tuple(odd)) if odd else None,
        notes=(str(exc),),
    )
