"""Explicit bispinor-level checks of the P, T and R_pi sign chains.

Fields are treated as c-number spinor wavefunctions.  A matrix element
``<psi|H|psi>`` of a four-fermion contact Hamiltonian is realized as its
bilinear density evaluated on explicit spinor values; plane-wave phases cancel
between ``psibar`` and ``psi`` so single plane waves give point-independent
densities.

Conventions: Weyl basis, metric (+,-,-,-), parity phase eta_a = 1,
``T psi = gamma^1 gamma^3 K psi`` with ``K`` complex conjugation.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

import numpy as np

from .clifford import (
    I as EXACT_I,
    ZERO,
    Bispinor,
    ComplexScalar,
    Matrix4,
    build_weyl_basis,
    pauli,
)
from .dsl import HamiltonianIR, Structure, builtin
from .symmetry import FreeIndexError

__all__ = [
    "FourMomentum",
    "PlaneWaveState",
    "SpacetimePoint",
    "IdentityCheck",
    "SampleResult",
    "CheckReport",
    "CaseOutcome",
    "NotPureLeft",
    "UnboundCoupling",
    "plane_wave_spinor",
    "apply_parity_state",
    "apply_time_reversal_state",
    "build_phi",
    "rotation_bispinor",
    "rotation_case_analysis",
    "axion_propagator",
    "evaluate_density",
    "dirac_adjoint_norm",
    "run_nc_check",
    "run_axion_check",
    "run_check",
    "DEFAULT_TOL",
    "DEGENERATE_THRESHOLD",
]

DEFAULT_TOL = 1e-10
DEGENERATE_THRESHOLD = 1e-14
ON_SHELL_RTOL = 1e-12

BASIS = build_weyl_basis()
_G = [g.to_numpy() for g in BASIS.gamma]
_G5 = BASIS.gamma5.to_numpy()
_ETA = np.array(BASIS.signature.diag, dtype=float)
_T_MATRIX = BASIS.gamma[1] @ BASIS.gamma[3]

SpinorLike = Union[Bispinor, np.ndarray, Sequence[complex]]


class NotPureLeft(ValueError):
    pass


class UnboundCoupling(KeyError):
    pass


@dataclass(frozen=True)
class FourMomentum:
    energy: float
    p: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(c) for c in self.p))
        if len(self.p) != 3:
            raise ValueError("three-momentum needs three components")
        if not self.energy > 0:
            raise ValueError(f"energy must be positive, got {self.energy}")

    @classmethod
    def on_shell(cls, p: Sequence[float], mass: float) -> "FourMomentum":
        p = tuple(float(c) for c in p)
        return cls(math.sqrt(math.fsum(c * c for c in p) + mass * mass), p)

    def is_on_shell(self, mass: float, rtol: float = ON_SHELL_RTOL) -> bool:
        lhs = self.energy ** 2
        rhs = math.fsum(c * c for c in self.p) + mass * mass
        return abs(lhs - rhs) <= rtol * max(lhs, rhs)


@dataclass(frozen=True)
class PlaneWaveState:
    u: Bispinor
    momentum: FourMomentum
    spin_label: int
    mass: float


@dataclass(frozen=True)
class SpacetimePoint:
    t: float
    x: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        if len(self.x) != 3:
            raise ValueError("spatial point needs three coordinates")

    def space_inverted(self) -> "SpacetimePoint":
        return SpacetimePoint(self.t, tuple(-c for c in self.x))

    def time_inverted(self) -> "SpacetimePoint":
        return SpacetimePoint(-self.t, self.x)


# ------------------------------------------------------------------ spinors


def _sqrt_psd_2x2(m: np.ndarray) -> np.ndarray:
    # principal root of a 2x2 Hermitian positive-definite matrix
    s = np.sqrt(np.linalg.det(m).real)
    t = np.sqrt(np.trace(m).real + 2 * s)
    return (m + s * np.eye(2)) / t


_SIGMA = [np.array([[complex(x) for x in row] for row in pauli(k)]) for k in range(4)]


def plane_wave_spinor(p: FourMomentum, s: int, m: float) -> PlaneWaveState:
    """Positive-energy spinor ``u^s(p) = (sqrt(p.sigma) xi^s, sqrt(p.sigmabar) xi^s)``."""
    if not m > 0:
        raise ValueError(f"mass must be positive, got {m}")
    if s not in (1, 2):
        raise ValueError(f"spin label must be 1 or 2, got {s}")
    if not p.is_on_shell(m):
        raise ValueError(f"momentum {p} is off shell for mass {m}")
    p_dot_sigma_vec = sum(c * sig for c, sig in zip(p.p, _SIGMA[1:]))
    p_sigma = p.energy * _SIGMA[0] - p_dot_sigma_vec
    p_sigmabar = p.energy * _SIGMA[0] + p_dot_sigma_vec
    xi = np.array([1, 0], dtype=complex) if s == 1 else np.array([0, 1], dtype=complex)
    u = np.concatenate([_sqrt_psd_2x2(p_sigma) @ xi, _sqrt_psd_2x2(p_sigmabar) @ xi])
    return PlaneWaveState(Bispinor.from_numpy(u), p, s, m)


def _vec(psi: SpinorLike) -> np.ndarray:
    if isinstance(psi, Bispinor):
        return psi.to_numpy()
    return np.asarray(psi, dtype=complex)


def dirac_adjoint_norm(psi: SpinorLike) -> complex:
    """``psibar psi``."""
    v = _vec(psi)
    return complex(v.conj() @ _G[0] @ v)


def apply_parity_state(psi: Bispinor, point: SpacetimePoint) -> tuple[Bispinor, SpacetimePoint]:
    return BASIS.gamma[0] @ psi, point.space_inverted()


def apply_time_reversal_state(psi: Bispinor, point: SpacetimePoint) -> tuple[Bispinor, SpacetimePoint]:
    """Antiunitary: ``gamma^1 gamma^3`` acting on the complex conjugate."""
    return _T_MATRIX @ psi.conjugate(), point.time_inverted()


def build_phi(psi_l: Bispinor) -> Bispinor:
    """Bispinor solving ``gamma^1 gamma^3 phi = psi_L`` for a pure-L ``psi_L``."""
    if not psi_l.is_pure_left():
        raise NotPureLeft("build_phi needs a pure left-handed bispinor (vanishing lower block)")
    a, b = psi_l.upper
    return Bispinor((-b, a, ZERO, ZERO))


# ---------------------------------------------------------------- rotations


_AXES = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}
_QUARTER_TURNS = {0: (1, 0), 1: (0, 1), 2: (-1, 0), 3: (0, -1)}


def _half_angle_trig(angle: float):
    k = angle / math.pi
    if float(k).is_integer():
        c, s = _QUARTER_TURNS[int(k) % 4]
        return ComplexScalar(c), ComplexScalar(s)
    return complex(math.cos(angle / 2)), complex(math.sin(angle / 2))


def rotation_bispinor(axis="y", angle: float = math.pi) -> Matrix4:
    """``diag(R, R)`` with ``R = cos(theta/2) - i sin(theta/2) n.sigma``.

    Integer multiples of pi give exact entries.
    """
    n = _AXES[axis] if isinstance(axis, str) else tuple(axis)
    if len(n) != 3:
        raise ValueError(f"axis must be x, y, z or a 3-vector, got {axis!r}")
    if not math.isclose(sum(c * c for c in n), 1.0, rel_tol=1e-12):
        raise ValueError(f"rotation axis must have unit length, got {axis!r}")
    c, s = _half_angle_trig(angle)
    n_sigma = [[ZERO, ZERO], [ZERO, ZERO]]
    for nk, k in zip(n, (1, 2, 3)):
        if nk == 0:
            continue
        # integer components keep the entries exact
        weight = ComplexScalar.coerce(nk) if isinstance(nk, int) else complex(nk)
        sig = pauli(k)
        for i in range(2):
            for j in range(2):
                n_sigma[i][j] = n_sigma[i][j] + weight * sig[i][j]
    minus_i_s = -(EXACT_I * s) if isinstance(s, ComplexScalar) else -1j * s
    block = [[(c if i == j else ZERO) + minus_i_s * n_sigma[i][j] for j in range(2)] for i in range(2)]
    zero2 = [[ZERO, ZERO], [ZERO, ZERO]]
    return Matrix4.from_blocks(block, zero2, zero2, block)


@dataclass(frozen=True)
class CaseOutcome:
    case: str
    reachable: bool
    axis: str | None
    angle: float | None
    phase: complex | None = None
    exact_axes: tuple[str, ...] = ()
    phase_axes: tuple[str, ...] = ()
    reason: str = ""


def _proportional(image: Bispinor, target: Bispinor, tol):
    """Return ``c`` with ``image = c * target`` and ``|c| = 1``, else None."""
    ref = next((k for k, x in enumerate(target.components) if abs(complex(x)) > (tol or 0)), None)
    if ref is None:
        return None
    ti, tt = image.components[ref], target.components[ref]
    c = ti / tt
    if tol is None and isinstance(c, ComplexScalar):
        if c.abs2() != 1:
            return None
        return c if image.equals(target.scale(c)) else None
    c = complex(c)
    if abs(abs(c) - 1) > tol:
        return None
    return c if image.equals(target.scale(c), tol) else None


def rotation_case_analysis(start: Bispinor, target: Bispinor, tol: float | None = None) -> CaseOutcome:
    """Look for a pi rotation about x, y or z taking ``start`` to ``target``.

    Case ii is the block-diagonality obstruction: a pure-R start can never
    reach a target supported on the L block.  Case iii names the axis found
    (exact matches preferred over matches up to a global phase); case i
    covers everything else.
    """
    exact = tol is None and start.is_exact and target.is_exact
    tol = None if exact else (tol if tol is not None else DEFAULT_TOL)
    if start.equals(target, tol):
        return CaseOutcome("iii", True, None, 0.0, 1, reason="start equals target")
    target_on_left = not target.is_pure_right(tol or 0.0)
    if start.is_pure_right(tol or 0.0) and not start.is_zero() and target_on_left:
        return CaseOutcome("ii", False, None, None,
                           reason="rotations are block diagonal; a pure-R bispinor stays pure-R")
    exact_axes, phase_axes, phases = [], [], {}
    for name in ("x", "y", "z"):
        image = rotation_bispinor(name, math.pi) @ start
        if image.equals(target, tol):
            exact_axes.append(name)
            continue
        c = _proportional(image, target, tol)
        if c is not None:
            phase_axes.append(name)
            phases[name] = c
    if exact_axes:
        return CaseOutcome("iii", True, exact_axes[0], math.pi, 1, tuple(exact_axes), tuple(phase_axes),
                           f"pi rotation about {exact_axes[0]}")
    if phase_axes:
        ax = phase_axes[0]
        return CaseOutcome("iii", True, ax, math.pi, complex(phases[ax]), (), tuple(phase_axes),
                           f"pi rotation about {ax} up to a global phase")
    return CaseOutcome("i", False, None, None, reason="no pi rotation relates start and target")


# --------------------------------------------------------------- propagator


def _exact(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def axion_propagator(m, order: int = 0):
    """Static expansion of ``1/(box - m^2)``.

    Order 0 returns ``-1/m^2``.  Higher orders return the coefficients of
    ``(-1/m^2) * (box/m^2)^k`` for ``k = 0..order``, the box left symbolic.
    Results are exact fractions.
    """
    if isinstance(order, bool) or not isinstance(order, int) or order < 0:
        raise ValueError(f"order must be a non-negative integer, got {order!r}")
    m = _exact(m)
    if m <= 0:
        raise ValueError(f"mass must be positive, got {m}")
    lead = -1 / (m * m)
    if order == 0:
        return lead
    return tuple(lead * (1 / (m * m)) ** k for k in range(order + 1))


# ------------------------------------------------------------------ density


def _gamma_for(kind: Structure):
    if kind is Structure.SCALAR:
        return np.eye(4, dtype=complex)
    if kind is Structure.PSEUDOSCALAR:
        return _G5
    if kind is Structure.VECTOR:
        return _G
    return [g @ _G5 for g in _G]


_GAMMAS = {k: _gamma_for(k) for k in Structure}


def _bilinear(v: np.ndarray, kind: Structure):
    bar = v.conj() @ _G[0]
    g = _GAMMAS[kind]
    if kind.has_index:
        return np.array([bar @ gm @ v for gm in g])
    return bar @ g @ v


def evaluate_density(ir: HamiltonianIR, e_state: SpinorLike, n_state: SpinorLike,
                     couplings: Mapping[str, complex]) -> complex:
    """Pointwise value of the Hamiltonian density on given electron/nucleon spinors."""
    states = {"electron": _vec(e_state), "nucleon": _vec(n_state)}
    total = 0j
    for sign, term in ir.terms:
        if not term.fully_contracted:
            raise FreeIndexError("cannot evaluate a term with an uncontracted Lorentz index")
        names = (term.coupling.name, *term.external_scalars, *term.coupling.absorbed)
        missing = [n for n in names if n not in couplings]
        if missing:
            raise UnboundCoupling(f"unbound coupling(s): {', '.join(missing)}")
        value = complex(couplings[term.coupling.name])
        if term.coupling.imaginary_unit:
            value *= 1j
        for n in names[1:]:
            value *= complex(couplings[n])
        values = [_bilinear(states[f.species], f.structure.kind) for f in term.factors]
        paired = set()
        for _, (i, j) in term.contractions:
            value *= complex(np.sum(_ETA * values[i] * values[j]))
            paired.update((i, j))
        for k, v in enumerate(values):
            if k not in paired:
                value *= complex(v)
        total += sign * value
    return total


# ------------------------------------------------------------------- checks


@dataclass(frozen=True)
class IdentityCheck:
    """One claimed identity ``lhs = expected_sign * rhs``."""

    name: str
    lhs: complex
    rhs: complex
    expected_sign: int
    deviation: float
    degenerate: bool
    measured_sign: int | None

    def passed(self, tol: float) -> bool:
        return self.degenerate or self.deviation <= tol

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": [self.lhs.real, self.lhs.imag],
            "rhs": [self.rhs.real, self.rhs.imag],
            "expected_sign": self.expected_sign,
            "deviation": self.deviation,
            "degenerate": self.degenerate,
            "measured_sign": self.measured_sign,
        }


def _identity(name: str, lhs: complex, rhs: complex, expected: int) -> IdentityCheck:
    degenerate = abs(lhs) < DEGENERATE_THRESHOLD and abs(rhs) < DEGENERATE_THRESHOLD
    measured = None
    if not degenerate and abs(rhs) >= DEGENERATE_THRESHOLD:
        ratio = lhs / rhs
        measured = 1 if ratio.real > 0 else -1
    return IdentityCheck(name, complex(lhs), complex(rhs), expected, float(abs(lhs - expected * rhs)),
                         degenerate, measured)


@dataclass(frozen=True)
class SampleResult:
    index: int
    digest: str
    checks: tuple[IdentityCheck, ...]

    def max_deviation(self) -> float:
        return max((c.deviation for c in self.checks if not c.degenerate), default=0.0)

    def to_dict(self) -> dict:
        return {"index": self.index, "digest": self.digest, "checks": [c.to_dict() for c in self.checks]}


@dataclass(frozen=True)
class CheckReport:
    case_name: str
    hamiltonian: str
    seed: int
    samples: int
    tolerance: float
    expected_signs: dict
    per_sample: tuple[SampleResult, ...] = field(repr=False)

    @property
    def max_abs_deviation(self) -> float:
        return max((s.max_deviation() for s in self.per_sample), default=0.0)

    @property
    def passed(self) -> bool:
        # degenerate identities are excluded from the maximum, so they pass
        return self.max_abs_deviation <= self.tolerance

    @property
    def chain_sign(self) -> int:
        return self.expected_signs["chain"]

    def measured_signs(self) -> dict[str, list[int]]:
        """Distinct signs observed per identity on nonzero samples."""
        out: dict[str, set] = {}
        for s in self.per_sample:
            for c in s.checks:
                if c.measured_sign is not None:
                    out.setdefault(c.name, set()).add(c.measured_sign)
        return {k: sorted(v) for k, v in sorted(out.items())}

    def counts(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for s in self.per_sample:
            for c in s.checks:
                d = out.setdefault(c.name, {"nonzero": 0, "degenerate": 0})
                d["degenerate" if c.degenerate else "nonzero"] += 1
        return out

    def to_dict(self, include_samples: bool = True) -> dict:
        d = {
            "case_name": self.case_name,
            "hamiltonian": self.hamiltonian,
            "seed": self.seed,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "max_abs_deviation": self.max_abs_deviation,
            "passed": self.passed,
            "chain_sign": self.chain_sign,
            "expected_signs": dict(self.expected_signs),
            "measured_signs": self.measured_signs(),
            "counts": self.counts(),
        }
        if include_samples:
            d["per_sample"] = [s.to_dict() for s in self.per_sample]
        return d


_CASES = {
    # truly chiral: parity flips the density, T then R_pi restores it
    "nc": ("H_AV", {"GF": 1.0}, {"parity": -1, "time_reversal": 1, "rotation": 1, "chain": 1}),
    # falsely chiral: both parity and the T-R_pi chain flip it
    "axion": ("H_ax", {"Ka": 1.0}, {"parity": -1, "time_reversal": -1, "rotation": 1, "chain": -1}),
}


def _random_momentum(rng: np.random.Generator, m: float) -> FourMomentum:
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    size = m * rng.random() ** (1 / 3)
    return FourMomentum.on_shell(tuple(direction * size), m)


def _plane_wave_at(state: PlaneWaveState, point: SpacetimePoint) -> np.ndarray:
    phase = state.momentum.energy * point.t - float(np.dot(state.momentum.p, point.x))
    return state.u.to_numpy() * np.exp(-1j * phase)


def _draw(seed: int, index: int) -> dict:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    draw = {}
    for species in ("e", "N"):
        m = float(rng.uniform(0.5, 2.0))
        draw[species] = {
            "mass": m,
            "p": _random_momentum(rng, m),
            "spin": int(rng.integers(1, 3)),
            # second plane wave and amplitudes for a superposition probe
            "p2": _random_momentum(rng, m),
            "spin2": int(rng.integers(1, 3)),
            "amps": rng.normal(size=2) + 1j * rng.normal(size=2),
        }
    draw["point"] = SpacetimePoint(float(rng.uniform(-1, 1)), tuple(rng.uniform(-1, 1, size=3)))
    return draw


def _digest(draw: dict) -> str:
    parts = []
    for species in ("e", "N"):
        d = draw[species]
        parts.append(f"{species}:{d['mass']!r}:{d['p'].p!r}:{d['spin']}:{d['p2'].p!r}:{d['spin2']}:"
                     f"{d['amps'].tolist()!r}")
    parts.append(f"x:{draw['point'].t!r}:{draw['point'].x!r}")
    return hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]


def _sample(ir: HamiltonianIR, couplings, expected: dict, seed: int, index: int) -> SampleResult:
    draw = _draw(seed, index)
    point = draw["point"]
    left, generic = {}, {}
    for species in ("e", "N"):
        d = draw[species]
        u1 = plane_wave_spinor(d["p"], d["spin"], d["mass"])
        u2 = plane_wave_spinor(d["p2"], d["spin2"], d["mass"])
        left[species] = BASIS.p_left @ u1.u
        a, b = d["amps"]
        generic[species] = Bispinor.from_numpy(a * _plane_wave_at(u1, point) + b * _plane_wave_at(u2, point))

    def dens(e, n):
        return evaluate_density(ir, e, n, couplings)

    r_pi = rotation_bispinor("y", math.pi)
    psi_e, psi_n = left["e"], left["N"]
    base = dens(psi_e, psi_n)
    parity_e, _ = apply_parity_state(psi_e, point)
    parity_n, _ = apply_parity_state(psi_n, point)
    phi_e, phi_n = build_phi(psi_e), build_phi(psi_n)
    t_phi_e, _ = apply_time_reversal_state(phi_e, point)
    t_phi_n, _ = apply_time_reversal_state(phi_n, point)
    phi_density = dens(phi_e, phi_n)

    g_e, g_n = generic["e"], generic["N"]
    g_base = dens(g_e, g_n)
    checks = [
        _identity("parity", base, dens(parity_e, parity_n), expected["parity"]),
        _identity("time_reversal", phi_density, dens(t_phi_e, t_phi_n), expected["time_reversal"]),
        _identity("rotation", base, dens(r_pi @ psi_e, r_pi @ psi_n), expected["rotation"]),
        _identity("phi_rotation", base, phi_density, expected["rotation"]),
        _identity("chain", base, dens(t_phi_e, t_phi_n), expected["chain"]),
        _identity("generic_parity", g_base,
                  dens(apply_parity_state(g_e, point)[0], apply_parity_state(g_n, point)[0]),
                  expected["parity"]),
        _identity("generic_time_reversal", g_base,
                  dens(apply_time_reversal_state(g_e, point)[0], apply_time_reversal_state(g_n, point)[0]),
                  expected["time_reversal"]),
        _identity("generic_chain", g_base,
                  dens(apply_time_reversal_state(r_pi @ g_e, point)[0],
                       apply_time_reversal_state(r_pi @ g_n, point)[0]),
                  expected["chain"]),
    ]
    return SampleResult(index, _digest(draw), tuple(checks))


def run_check(case: str, seed: int = 42, n_samples: int = 1000, tol: float = DEFAULT_TOL,
              workers: int = 1) -> CheckReport:
    """Sample on-shell electron/nucleon states and test every identity of the case.

    Each sample draws its own stream from ``(seed, index)``, so the report does
    not depend on ``workers`` or on evaluation order.
    """
    if case not in _CASES:
        raise ValueError(f"unknown case {case!r}; expected one of {', '.join(_CASES)}")
    if isinstance(n_samples, bool) or not isinstance(n_samples, int) or n_samples < 1:
        raise ValueError(f"n_samples must be a positive integer, got {n_samples!r}")
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol!r}")
    name, couplings, expected = _CASES[case]
    ir = builtin(name)

    def one(i):
        return _sample(ir, couplings, expected, seed, i)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = tuple(pool.map(one, range(n_samples)))
    else:
        results = tuple(one(i) for i in range(n_samples))
    return CheckReport(case, name, seed, n_samples, tol, dict(expected), results)


def run_nc_check(seed: int = 42, n_samples: int = 1000, tol: float = DEFAULT_TOL, workers: int = 1) -> CheckReport:
    return run_check("nc", seed, n_samples, tol, workers)


def run_axion_check(seed: int = 42, n_samples: int = 1000, tol: float = DEFAULT_TOL,
                    workers: int = 1) -> CheckReport:
    return run_check("axion", seed, n_samples, tol, workers)
