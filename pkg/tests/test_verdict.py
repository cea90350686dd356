from fractions import Fraction

import pytest

from chiralpv.kinematics import ChiralityClass
from chiralpv.verdict import (
    Relation,
    SystemKind,
    UnsupportedInfluence,
    chirality_test,
    pved,
    verdict_table,
    weak_charge,
)

TC, FC = SystemKind.TRULY_CHIRAL, SystemKind.FALSELY_CHIRAL


def test_table_rows():
    rows = [(v.system, v.influence, v.relation) for v in verdict_table()]
    assert rows == [
        (TC, ChiralityClass.TRULY_CHIRAL, Relation.ANTISYMMETRIC_DIAGONAL),
        (TC, ChiralityClass.FALSELY_CHIRAL, Relation.FORCED_ZERO),
        (FC, ChiralityClass.TRULY_CHIRAL, Relation.FORCED_ZERO),
        (FC, ChiralityClass.FALSELY_CHIRAL, Relation.ANTISYMMETRIC_DIAGONAL),
    ]


def test_summaries():
    assert chirality_test(TC, ChiralityClass.FALSELY_CHIRAL).summary() == "H_LL = H_RR = 0; PVED impossible"
    assert chirality_test(FC, ChiralityClass.FALSELY_CHIRAL).summary() == "H_LL = −H_RR; PVED possible"


def test_derivations_start_with_parity_and_end_with_combine():
    for v in verdict_table():
        assert v.derivation[0].operator == "P"
        assert v.derivation[-1].operator == "combine"
        assert v.relation.equation.split("  ")[0] in v.derivation[-1].identity


def test_forced_zero_note():
    d = chirality_test(TC, ChiralityClass.FALSELY_CHIRAL).to_dict()
    assert "H_PV" in d["note"] and d["pved_possible"] is False


@pytest.mark.parametrize("cls", [ChiralityClass.ACHIRAL, ChiralityClass.UNDETERMINED,
                                 ChiralityClass.NOT_ROTATIONAL_SCALAR])
def test_unsupported(cls):
    with pytest.raises(UnsupportedInfluence):
        chirality_test(TC, cls)


def test_pved():
    assert pved(Fraction(3), Fraction(-3)) == 3
    assert pved(0, 0) == 0


def test_weak_charge_values():
    assert weak_charge(1, 0, Fraction(1, 4)) == 0
    assert weak_charge(6, 6, Fraction(1, 4)) == -6
    assert weak_charge(0, 1, 0.2312) == -1


@pytest.mark.parametrize("args", [(-1, 0, 0.2), (1, 0, 1.5), (1.0, 0, 0.2), (True, 0, 0.2)])
def test_weak_charge_rejects(args):
    with pytest.raises(ValueError):
        weak_charge(*args)
