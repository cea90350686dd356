from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chiralpv.clifford import (
    MOSTLY_MINUS,
    MOSTLY_PLUS,
    Bispinor,
    ComplexScalar,
    GammaBasis,
    Matrix4,
    anticommutator,
    build_weyl_basis,
    chirality_project,
    verify_clifford,
)

# independent numpy construction of the Weyl basis
_S = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
_Z = np.zeros((2, 2))
NP_GAMMA = [np.block([[_Z, _S[0]], [_S[0], _Z]])] + [np.block([[_Z, _S[k]], [-_S[k], _Z]]) for k in (1, 2, 3)]


def test_weyl_basis_matches_numpy_construction():
    basis = build_weyl_basis()
    for mu in range(4):
        np.testing.assert_array_equal(basis.gamma[mu].to_numpy(), NP_GAMMA[mu])
    np.testing.assert_array_equal(basis.gamma5.to_numpy(), np.diag([-1, -1, 1, 1]))
    g5 = 1j * NP_GAMMA[0] @ NP_GAMMA[1] @ NP_GAMMA[2] @ NP_GAMMA[3]
    np.testing.assert_array_equal(basis.gamma5.to_numpy(), g5)


def test_default_basis_is_exact_and_passes():
    basis = build_weyl_basis()
    assert all(g.is_exact for g in basis.gamma)
    report = verify_clifford(basis)
    assert report.exact and report.passed
    names = [c.name for c in report.checks]
    assert sum(n.startswith("anticommutator") for n in names) == 10
    assert len(names) == 20


def test_anticommutator_values():
    basis = build_weyl_basis()
    for mu in range(4):
        for nu in range(4):
            expected = Matrix4.identity().scale(2 * MOSTLY_MINUS.eta(mu, nu))
            assert anticommutator(basis.gamma[mu], basis.gamma[nu]) == expected


def test_mostly_plus_basis_passes():
    assert verify_clifford(build_weyl_basis(MOSTLY_PLUS)).passed


def test_zeroed_gamma0_fails_only_the_relations_it_touches():
    basis = build_weyl_basis()
    broken = GammaBasis.from_gammas([Matrix4.zero(), *basis.gamma[1:]], MOSTLY_MINUS)
    failing = {c.name for c in verify_clifford(broken).failures()}
    assert "anticommutator[0,0]" in failing
    # the mixed pairs {0, nu} still vanish with a zero gamma^0
    assert not any(n.startswith("anticommutator[0,") and n != "anticommutator[0,0]" for n in failing)
    assert "gamma5_squared" in failing


def test_swapped_gammas_rebuilt_consistently_pass():
    g = build_weyl_basis().gamma
    swapped = GammaBasis.from_gammas([g[0], g[2], g[1], g[3]], MOSTLY_MINUS)
    assert verify_clifford(swapped).passed


def test_float_basis_requires_tolerance():
    g = build_weyl_basis().gamma
    noisy = [Matrix4(tuple(tuple(complex(e) + 1e-13 for e in row) for row in x.rows)) for x in g]
    basis = GammaBasis.from_gammas(noisy, MOSTLY_MINUS)
    with pytest.raises(ValueError):
        verify_clifford(basis)
    assert verify_clifford(basis, tol=1e-9).passed


def test_projectors():
    basis = build_weyl_basis()
    assert basis.p_left + basis.p_right == Matrix4.identity()
    assert basis.p_left @ basis.p_left == basis.p_left
    assert (basis.p_left @ basis.p_right).is_zero()


gaussian = st.builds(ComplexScalar, st.fractions(max_denominator=50), st.fractions(max_denominator=50))


@given(st.lists(gaussian, min_size=4, max_size=4))
def test_chirality_projection_splits_blocks(comps):
    psi = Bispinor(tuple(comps))
    left, right = chirality_project(psi, "L"), chirality_project(psi, "R")
    assert left.is_pure_left() and right.is_pure_right()
    assert left + right == psi


@given(gaussian, gaussian)
def test_complex_scalar_field_laws(a, b):
    assert a * b == b * a
    assert (a + b) - b == a
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    assert a.abs2() == (a * a.conjugate()).re
    if not b.is_zero():
        assert (a / b) * b == a


def test_complex_scalar_coercion():
    assert ComplexScalar.coerce(3) == ComplexScalar(Fraction(3))
    assert complex(ComplexScalar(Fraction(1, 2), Fraction(-1))) == 0.5 - 1j
