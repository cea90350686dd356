"""Four-case system/influence chirality test and the PVED helper formulas."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from numbers import Real

from .kinematics import ChiralityClass

__all__ = [
    "SystemKind",
    "Relation",
    "DerivationStep",
    "Verdict",
    "UnsupportedInfluence",
    "chirality_test",
    "verdict_table",
    "pved",
    "weak_charge",
]


class SystemKind(enum.Enum):
    # P psi_L = psi_R, T psi_L = psi_L, R psi_L = psi_L
    TRULY_CHIRAL = "TrulyChiralSystem"
    # P psi = R_pi T psi
    FALSELY_CHIRAL = "FalselyChiralSystem"

    @property
    def short(self) -> str:
        return "TC" if self is SystemKind.TRULY_CHIRAL else "FC"


class Relation(enum.Enum):
    ANTISYMMETRIC_DIAGONAL = "AntisymmetricDiagonal"
    FORCED_ZERO = "ForcedZero"

    @property
    def equation(self) -> str:
        if self is Relation.ANTISYMMETRIC_DIAGONAL:
            return "H_LL = −H_RR"
        return "H_LL = H_RR = 0"


@dataclass(frozen=True)
class DerivationStep:
    operator: str
    identity: str


@dataclass(frozen=True)
class Verdict:
    system: SystemKind
    influence: ChiralityClass
    relation: Relation
    derivation: tuple[DerivationStep, ...]
    note: str = ("a forced zero refers to the parity-violating contribution H_PV to the diagonal; "
                 "the total energy H_0 + H_PV is unaffected")

    @property
    def pved_possible(self) -> bool:
        return self.relation is Relation.ANTISYMMETRIC_DIAGONAL

    def summary(self) -> str:
        return f"{self.relation.equation}; PVED {'possible' if self.pved_possible else 'impossible'}"

    def to_dict(self) -> dict:
        return {
            "system": self.system.value,
            "influence": self.influence.value,
            "relation": self.relation.value,
            "equation": self.relation.equation,
            "pved_possible": self.pved_possible,
            "derivation": [{"operator": s.operator, "identity": s.identity} for s in self.derivation],
            "note": self.note,
        }


class UnsupportedInfluence(ValueError):
    pass


_PARITY_STEP = DerivationStep(
    "P", "<ψ_L|H|ψ_L> = <Pψ_R|H|Pψ_R> = <ψ_R|P† H P|ψ_R> = −<ψ_R|H|ψ_R>   [P H P⁻¹ = −H]")

_DERIVATIONS = {
    (SystemKind.TRULY_CHIRAL, ChiralityClass.TRULY_CHIRAL): (
        _PARITY_STEP,
        DerivationStep("T", "<ψ_L|H|ψ_L> = <Tψ_L|H|Tψ_L> = (<ψ_L|H†|ψ_L>)† = <ψ_L|H|ψ_L>   [T H T⁻¹ = H†]"),
        DerivationStep("R_π", "<ψ_L|H|ψ_L> = <R_πψ_L|H|R_πψ_L> = <ψ_L|H|ψ_L>   [no new constraint]"),
        DerivationStep("combine", "H_LL = −H_RR"),
    ),
    (SystemKind.TRULY_CHIRAL, ChiralityClass.FALSELY_CHIRAL): (
        _PARITY_STEP,
        DerivationStep("T", "<ψ_L|H|ψ_L> = <Tψ_L|H|Tψ_L> = −<ψ_L|H|ψ_L>   [T H T⁻¹ = −H†]"),
        DerivationStep("R_π", "−<ψ_L|H|ψ_L> = −<R_πψ_L|H|R_πψ_L> = −<ψ_L|H|ψ_L>"),
        DerivationStep("combine", "H_LL = −H_LL = −H_RR  ⇒  H_LL = H_RR = 0"),
    ),
    (SystemKind.FALSELY_CHIRAL, ChiralityClass.TRULY_CHIRAL): (
        _PARITY_STEP,
        DerivationStep("R_πT", "<ψ_L|H|ψ_L> = <R_πTψ_R|H|R_πTψ_R> = (<ψ_R|T†R_π† H R_πT|ψ_R>)† "
                               "= <ψ_R|H|ψ_R>   [T H T⁻¹ = H†, R_π H R_π⁻¹ = H]"),
        DerivationStep("combine", "H_LL = H_RR = −H_RR  ⇒  H_LL = H_RR = 0"),
    ),
    (SystemKind.FALSELY_CHIRAL, ChiralityClass.FALSELY_CHIRAL): (
        _PARITY_STEP,
        DerivationStep("R_πT", "<ψ_L|H|ψ_L> = <R_πTψ_R|H|R_πTψ_R> = −<ψ_R|H|ψ_R>   "
                               "[T H T⁻¹ = −H†, R_π H R_π⁻¹ = H]"),
        DerivationStep("combine", "H_LL = −H_RR"),
    ),
}


def chirality_test(system: SystemKind, influence: ChiralityClass) -> Verdict:
    """Combine the system conditions with the influence conditions.

    A PVED survives exactly when system and influence are of the same kind.
    """
    key = (system, influence)
    if key not in _DERIVATIONS:
        raise UnsupportedInfluence(
            f"no chirality test for an influence classified {influence.value}; "
            "only TrulyChiral and FalselyChiral influences can be tested")
    steps = _DERIVATIONS[key]
    same_kind = (system is SystemKind.TRULY_CHIRAL) == (influence is ChiralityClass.TRULY_CHIRAL)
    relation = Relation.ANTISYMMETRIC_DIAGONAL if same_kind else Relation.FORCED_ZERO
    return Verdict(system, influence, relation, steps)


def verdict_table() -> list[Verdict]:
    """All four system/influence rows in the order TC/TC, TC/FC, FC/TC, FC/FC."""
    return [chirality_test(s, i)
            for s in (SystemKind.TRULY_CHIRAL, SystemKind.FALSELY_CHIRAL)
            for i in (ChiralityClass.TRULY_CHIRAL, ChiralityClass.FALSELY_CHIRAL)]


def pved(h_ll, h_rr):
    """Half the difference of the enantiomers' diagonal matrix elements."""
    return (h_ll - h_rr) / 2


def weak_charge(z: int, n: int, sin2_theta_w):
    """Nuclear weak charge ``(1 - 4 sin^2 theta_W) Z - N``.

    Exact (Fraction/int) inputs give an exact result.
    """
    for name, v in (("z", z), ("n", n)):
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
    if not isinstance(sin2_theta_w, Real) or not 0 <= sin2_theta_w <= 1:
        raise ValueError(f"sin2_theta_w must lie in [0, 1], got {sin2_theta_w!r}")
    return (1 - 4 * sin2_theta_w) * z - n
