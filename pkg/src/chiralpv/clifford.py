"""Weyl-basis Dirac matrices with exact Gaussian-rational entries.

Entries of the gamma matrices are in {0, +-1, +-i}, so everything here can be
carried out without rounding.  Float entries (Python ``complex``) are also
accepted by :class:`Matrix4` and :class:`Bispinor`; comparisons involving
them must go through an explicit tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "ComplexScalar",
    "Matrix4",
    "MetricSignature",
    "GammaBasis",
    "Bispinor",
    "CliffordCheck",
    "CliffordReport",
    "MOSTLY_MINUS",
    "MOSTLY_PLUS",
    "build_weyl_basis",
    "anticommutator",
    "chirality_project",
    "verify_clifford",
    "pauli",
]


@dataclass(frozen=True)
class ComplexScalar:
    """Exact complex number ``re + i*im`` with rational parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value) -> "ComplexScalar":
        if isinstance(value, ComplexScalar):
            return value
        if isinstance(value, (int, Rational)):
            return cls(Fraction(value))
        raise TypeError(f"cannot represent {value!r} exactly")

    def conjugate(self) -> "ComplexScalar":
        return ComplexScalar(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __add__(self, other):
        if isinstance(other, (float, complex)):
            return complex(self) + other
        o = ComplexScalar.coerce(other)
        return ComplexScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexScalar(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (float, complex)):
            return complex(self) * other
        o = ComplexScalar.coerce(other)
        return ComplexScalar(self.re * o.re - self.im * o.im,
                             self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (float, complex)):
            return complex(self) / other
        o = ComplexScalar.coerce(other)
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("complex division by zero")
        n = self * o.conjugate()
        return ComplexScalar(n.re / d, n.im / d)

    def __eq__(self, other):
        if isinstance(other, ComplexScalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"{self.re}"
        if self.re == 0:
            return f"{self.im}i"
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


Scalar = Union[ComplexScalar, complex]

ZERO = ComplexScalar(0)
ONE = ComplexScalar(1)
I = ComplexScalar(0, 1)


def _as_entry(value) -> Scalar:
    if isinstance(value, (ComplexScalar, complex)):
        return value
    if isinstance(value, float):
        return complex(value)
    if isinstance(value, np.integer):
        return ComplexScalar(int(value))
    if isinstance(value, np.generic):
        return complex(value)
    return ComplexScalar.coerce(value)


def _is_exact(value) -> bool:
    return isinstance(value, ComplexScalar)


def _close(a, b, tol: float) -> bool:
    return abs(complex(a) - complex(b)) <= tol


@dataclass(frozen=True)
class Matrix4:
    """Immutable 4x4 complex matrix, exact or float."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(_as_entry(x) for x in row) for row in self.rows)
        if len(rows) != 4 or any(len(r) != 4 for r in rows):
            raise ValueError("Matrix4 needs a 4x4 grid")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls) -> "Matrix4":
        return cls(tuple(tuple(ONE if i == j else ZERO for j in range(4)) for i in range(4)))

    @classmethod
    def zero(cls) -> "Matrix4":
        return cls(tuple((ZERO,) * 4 for _ in range(4)))

    @classmethod
    def from_blocks(cls, a, b, c, d) -> "Matrix4":
        """Assemble ``[[a, b], [c, d]]`` from 2x2 nested sequences."""
        top = [list(a[i]) + list(b[i]) for i in range(2)]
        bottom = [list(c[i]) + list(d[i]) for i in range(2)]
        return cls(tuple(tuple(r) for r in top + bottom))

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(x) for row in self.rows for x in row)

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def __matmul__(self, other):
        if isinstance(other, Bispinor):
            return Bispinor(tuple(sum((self.rows[i][k] * other.components[k] for k in range(4)), ZERO)
                                  for i in range(4)))
        if not isinstance(other, Matrix4):
            return NotImplemented
        return Matrix4(tuple(
            tuple(sum((self.rows[i][k] * other.rows[k][j] for k in range(4)), ZERO) for j in range(4))
            for i in range(4)))

    def __add__(self, other: "Matrix4") -> "Matrix4":
        return Matrix4(tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.rows, other.rows)))

    def __sub__(self, other: "Matrix4") -> "Matrix4":
        return self + (-other)

    def __neg__(self) -> "Matrix4":
        return Matrix4(tuple(tuple(-a for a in row) for row in self.rows))

    def scale(self, c) -> "Matrix4":
        c = _as_entry(c)
        return Matrix4(tuple(tuple(c * a for a in row) for row in self.rows))

    def conjugate(self) -> "Matrix4":
        return Matrix4(tuple(tuple(a.conjugate() for a in row) for row in self.rows))

    def transpose(self) -> "Matrix4":
        return Matrix4(tuple(tuple(self.rows[j][i] for j in range(4)) for i in range(4)))

    def dagger(self) -> "Matrix4":
        return self.conjugate().transpose()

    def is_zero(self, tol: float | None = None) -> bool:
        return self.equals(Matrix4.zero(), tol)

    def equals(self, other: "Matrix4", tol: float | None = None) -> bool:
        """Exact equality when both sides are exact; otherwise ``tol`` is required."""
        pairs = [(a, b) for r1, r2 in zip(self.rows, other.rows) for a, b in zip(r1, r2)]
        if tol is None:
            if not (self.is_exact and other.is_exact):
                raise ValueError("float matrices must be compared with an explicit tolerance")
            return all(a == b for a, b in pairs)
        return all(_close(a, b, tol) for a, b in pairs)

    def __eq__(self, other):
        if not isinstance(other, Matrix4):
            return NotImplemented
        if not (self.is_exact and other.is_exact):
            raise ValueError("use Matrix4.equals(other, tol) for float matrices")
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def to_numpy(self) -> np.ndarray:
        return np.array([[complex(x) for x in row] for row in self.rows], dtype=complex)

    def __repr__(self):
        return "Matrix4(" + ", ".join("[" + ", ".join(map(repr, r)) + "]" for r in self.rows) + ")"


@dataclass(frozen=True)
class Bispinor:
    """Four-component Dirac spinor in Weyl ordering: ``(psi_L, psi_R)``."""

    components: tuple

    def __post_init__(self):
        comps = tuple(_as_entry(x) for x in self.components)
        if len(comps) != 4:
            raise ValueError("a bispinor has four components")
        object.__setattr__(self, "components", comps)

    @property
    def upper(self) -> tuple:
        return self.components[:2]

    @property
    def lower(self) -> tuple:
        return self.components[2:]

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(x) for x in self.components)

    def is_pure_left(self, tol: float = 0.0) -> bool:
        return all(abs(complex(x)) <= tol if not _is_exact(x) else x.is_zero() for x in self.lower)

    def is_pure_right(self, tol: float = 0.0) -> bool:
        return all(abs(complex(x)) <= tol if not _is_exact(x) else x.is_zero() for x in self.upper)

    def is_zero(self) -> bool:
        return self.is_pure_left() and self.is_pure_right()

    def conjugate(self) -> "Bispinor":
        return Bispinor(tuple(x.conjugate() for x in self.components))

    def scale(self, c) -> "Bispinor":
        c = _as_entry(c)
        return Bispinor(tuple(c * x for x in self.components))

    def __add__(self, other: "Bispinor") -> "Bispinor":
        return Bispinor(tuple(a + b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "Bispinor":
        return Bispinor(tuple(-x for x in self.components))

    def equals(self, other: "Bispinor", tol: float | None = None) -> bool:
        pairs = list(zip(self.components, other.components))
        if tol is None:
            if not (self.is_exact and other.is_exact):
                raise ValueError("float bispinors must be compared with an explicit tolerance")
            return all(a == b for a, b in pairs)
        return all(_close(a, b, tol) for a, b in pairs)

    def to_numpy(self) -> np.ndarray:
        return np.array([complex(x) for x in self.components], dtype=complex)

    @classmethod
    def from_numpy(cls, arr: Iterable) -> "Bispinor":
        return cls(tuple(complex(x) for x in arr))


@dataclass(frozen=True)
class MetricSignature:
    """Diagonal Minkowski metric; index 0 is time."""

    diag: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.diag) != 4 or any(s not in (1, -1) for s in self.diag):
            raise ValueError(f"metric signature needs four entries of +-1, got {self.diag!r}")

    def eta(self, mu: int, nu: int) -> int:
        return self.diag[mu] if mu == nu else 0

    def __str__(self):
        return "(" + ",".join("+" if s > 0 else "-" for s in self.diag) + ")"


MOSTLY_MINUS = MetricSignature((1, -1, -1, -1))
MOSTLY_PLUS = MetricSignature((-1, 1, 1, 1))


def pauli(k: int) -> tuple:
    """Pauli matrix ``sigma_k`` (k = 0 gives the identity) as exact 2x2 rows."""
    if k == 0:
        return ((ONE, ZERO), (ZERO, ONE))
    if k == 1:
        return ((ZERO, ONE), (ONE, ZERO))
    if k == 2:
        return ((ZERO, -I), (I, ZERO))
    if k == 3:
        return ((ONE, ZERO), (ZERO, -ONE))
    raise ValueError(f"no Pauli matrix with index {k}")


_Z2 = ((ZERO, ZERO), (ZERO, ZERO))


def _neg2(m):
    return tuple(tuple(-x for x in row) for row in m)


@dataclass(frozen=True)
class GammaBasis:
    gamma: tuple[Matrix4, Matrix4, Matrix4, Matrix4]
    gamma5: Matrix4
    p_left: Matrix4
    p_right: Matrix4
    signature: MetricSignature = field(default=MOSTLY_MINUS)

    @classmethod
    def from_gammas(cls, gammas: Sequence[Matrix4], signature: MetricSignature = MOSTLY_MINUS) -> "GammaBasis":
        """Derive gamma5 and the chirality projectors from four gamma matrices."""
        g0, g1, g2, g3 = gammas
        g5 = (g0 @ g1 @ g2 @ g3).scale(I)
        half = ComplexScalar(Fraction(1, 2))
        eye = Matrix4.identity()
        return cls(tuple(gammas), g5, (eye - g5).scale(half), (eye + g5).scale(half), signature)


def build_weyl_basis(signature: MetricSignature = MOSTLY_MINUS) -> GammaBasis:
    """Standard chiral representation; gamma5 = diag(-1, -1, +1, +1).

    ``MOSTLY_PLUS`` rescales every gamma^mu by i, which flips the sign of the
    Clifford relation and leaves gamma5 unchanged.
    """
    eye2 = pauli(0)
    g0 = Matrix4.from_blocks(_Z2, eye2, eye2, _Z2)
    gs = [Matrix4.from_blocks(_Z2, pauli(k), _neg2(pauli(k)), _Z2) for k in (1, 2, 3)]
    gammas = [g0, *gs]
    if signature == MOSTLY_PLUS:
        gammas = [g.scale(I) for g in gammas]
    elif signature != MOSTLY_MINUS:
        raise ValueError(f"unsupported signature {signature}")
    return GammaBasis.from_gammas(gammas, signature)


def anticommutator(a: Matrix4, b: Matrix4) -> Matrix4:
    return a @ b + b @ a


def chirality_project(psi: Bispinor, hand: str, basis: GammaBasis | None = None) -> Bispinor:
    """Apply ``P_L`` (hand ``"L"``) or ``P_R`` (hand ``"R"``) to ``psi``."""
    basis = basis or _DEFAULT_BASIS
    if hand == "L":
        return basis.p_left @ psi
    if hand == "R":
        return basis.p_right @ psi
    raise ValueError(f"hand must be 'L' or 'R', got {hand!r}")


@dataclass(frozen=True)
class CliffordCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class CliffordReport:
    checks: tuple[CliffordCheck, ...]
    exact: bool

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CliffordCheck]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "exact": self.exact,
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }


def verify_clifford(basis: GammaBasis, tol: float | None = None) -> CliffordReport:
    """Check the Clifford relation, the gamma5 identities and the projector algebra.

    Exact bases are compared with zero tolerance; pass ``tol`` for float bases.
    """
    eye = Matrix4.identity()
    zero = Matrix4.zero()
    exact = tol is None
    checks = []

    def add(name, lhs, rhs, detail=""):
        checks.append(CliffordCheck(name, lhs.equals(rhs, tol), detail))

    for mu in range(4):
        for nu in range(mu, 4):
            expected = eye.scale(2 * basis.signature.eta(mu, nu))
            add(f"anticommutator[{mu},{nu}]", anticommutator(basis.gamma[mu], basis.gamma[nu]), expected,
                f"expected {2 * basis.signature.eta(mu, nu)}*I")

    g0, g1, g2, g3 = basis.gamma
    g5 = basis.gamma5
    add("gamma5_definition", g5, (g0 @ g1 @ g2 @ g3).scale(I), "gamma5 = i g0 g1 g2 g3")
    add("gamma5_squared", g5 @ g5, eye, "(gamma5)^2 = I")
    for mu in range(4):
        add(f"gamma5_anticommutes[{mu}]", anticommutator(g5, basis.gamma[mu]), zero)

    pl, pr = basis.p_left, basis.p_right
    add("projector_completeness", pl + pr, eye, "P_L + P_R = I")
    add("projector_idempotent_L", pl @ pl, pl)
    add("projector_idempotent_R", pr @ pr, pr)
    add("projector_orthogonal", pl @ pr, zero, "P_L P_R = 0")
    return CliffordReport(tuple(checks), exact)


_DEFAULT_BASIS = build_weyl_basis()
