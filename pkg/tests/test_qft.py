import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import sqrtm

from chiralpv.clifford import Bispinor, ComplexScalar, Matrix4, build_weyl_basis
from chiralpv.dsl import builtin, parse
from chiralpv.qft import (
    FourMomentum,
    NotPureLeft,
    SpacetimePoint,
    UnboundCoupling,
    apply_parity_state,
    apply_time_reversal_state,
    axion_propagator,
    build_phi,
    dirac_adjoint_norm,
    evaluate_density,
    plane_wave_spinor,
    rotation_bispinor,
    rotation_case_analysis,
    run_axion_check,
    run_check,
    run_nc_check,
)

BASIS = build_weyl_basis()
ORIGIN = SpacetimePoint(0.3, (0.1, -0.2, 0.5))
SIGMA = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0])]

rational = st.fractions(min_value=-20, max_value=20, max_denominator=30)
gaussian = st.builds(ComplexScalar, rational, rational)
nonzero_gaussian = gaussian.filter(lambda z: not z.is_zero())


def bispinor(*xs):
    return Bispinor(tuple(xs))


# ---------------------------------------------------------------- spinors


def test_rest_frame_spinor():
    m = 1.7
    state = plane_wave_spinor(FourMomentum.on_shell((0, 0, 0), m), 1, m)
    np.testing.assert_allclose(state.u.to_numpy(), math.sqrt(m) * np.array([1, 0, 1, 0]))
    assert dirac_adjoint_norm(state.u) == pytest.approx(2 * m)


def test_z_boost_blocks():
    m, pz = 1.0, 0.6
    p = FourMomentum.on_shell((0, 0, pz), m)
    u = plane_wave_spinor(p, 1, m).u.to_numpy()
    np.testing.assert_allclose(u, [math.sqrt(p.energy - pz), 0, math.sqrt(p.energy + pz), 0], atol=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 5), st.lists(st.floats(-1, 1), min_size=3, max_size=3), st.sampled_from([1, 2]))
def test_spinor_matches_scipy_sqrtm_and_normalization(m, direction, s):
    p = FourMomentum.on_shell(tuple(m * c for c in direction), m)
    u = plane_wave_spinor(p, s, m).u.to_numpy()
    ps = p.energy * SIGMA[0] - sum(c * sg for c, sg in zip(p.p, SIGMA[1:]))
    psb = p.energy * SIGMA[0] + sum(c * sg for c, sg in zip(p.p, SIGMA[1:]))
    xi = np.eye(2)[s - 1]
    np.testing.assert_allclose(u, np.concatenate([sqrtm(ps) @ xi, sqrtm(psb) @ xi]), atol=1e-10)
    assert abs(dirac_adjoint_norm(u) - 2 * m) <= 1e-10 * 2 * m


def test_off_shell_rejected():
    with pytest.raises(ValueError):
        plane_wave_spinor(FourMomentum(1.0, (0.5, 0, 0)), 1, 1.0)
    with pytest.raises(ValueError):
        plane_wave_spinor(FourMomentum.on_shell((0, 0, 0), 1.0), 3, 1.0)
    with pytest.raises(ValueError):
        FourMomentum(-1.0, (0, 0, 0))


# ------------------------------------------------------- discrete operators


def test_parity_examples():
    a, b = ComplexScalar(2), ComplexScalar(0, 3)
    psi = bispinor(a, b, 0, 0)
    out, pt = apply_parity_state(psi, ORIGIN)
    assert out == bispinor(0, 0, a, b)
    assert pt == SpacetimePoint(0.3, (-0.1, 0.2, -0.5))
    assert apply_parity_state(bispinor(0, 0, a, b), ORIGIN)[0] == bispinor(a, b, 0, 0)


@given(st.lists(gaussian, min_size=4, max_size=4))
def test_parity_involution(comps):
    psi = Bispinor(tuple(comps))
    once = apply_parity_state(psi, ORIGIN)
    assert apply_parity_state(*once) == (psi, ORIGIN)


def test_time_reversal_twice_on_real_rest_spinor():
    psi = bispinor(1, 0, 1, 0)
    once = apply_time_reversal_state(psi, ORIGIN)
    twice, pt = apply_time_reversal_state(*once)
    assert twice == -psi and pt == ORIGIN
    assert once[1] == SpacetimePoint(-0.3, ORIGIN.x)


@given(gaussian, gaussian)
def test_time_reversal_keeps_pure_left(a, b):
    out, _ = apply_time_reversal_state(bispinor(a, b, 0, 0), ORIGIN)
    assert out.is_pure_left()


def test_build_phi_examples():
    assert build_phi(bispinor(1, 0, 0, 0)) == bispinor(0, 1, 0, 0)
    assert build_phi(bispinor(0, 1, 0, 0)) == bispinor(-1, 0, 0, 0)
    with pytest.raises(NotPureLeft):
        build_phi(bispinor(1, 2, 3, 4))


@given(rational, rational)
def test_build_phi_inverts_time_reversal_for_real_states(a, b):
    psi = bispinor(a, b, 0, 0)
    out, _ = apply_time_reversal_state(build_phi(psi), ORIGIN)
    assert out == psi


def test_build_phi_with_complex_entries_gives_conjugate():
    # antiunitarity: T(phi) is conj(psi), not psi, once entries are complex
    psi = bispinor(ComplexScalar(1, 2), ComplexScalar(0, -1), 0, 0)
    out, _ = apply_time_reversal_state(build_phi(psi), ORIGIN)
    assert out == psi.conjugate() and out != psi


# ---------------------------------------------------------------- rotations


def test_rotation_y_pi_matrix():
    r = rotation_bispinor("y", math.pi)
    assert r.is_exact
    block = [[0, -1], [1, 0]]
    zero = [[0, 0], [0, 0]]
    assert r == Matrix4.from_blocks(block, zero, zero, block)


@pytest.mark.parametrize("axis", ["x", "y", "z", (0, 1, 0)])
def test_rotation_double_cover(axis):
    r = rotation_bispinor(axis, math.pi)
    assert r @ r == -Matrix4.identity()
    assert rotation_bispinor(axis, 0.0) == Matrix4.identity()
    assert rotation_bispinor(axis, 2 * math.pi) == -Matrix4.identity()


def test_rotation_generic_angle_matches_expm():
    from scipy.linalg import expm
    theta = 0.83
    n = np.array([1.0, 2.0, -2.0]) / 3
    got = rotation_bispinor(tuple(n), theta).to_numpy()
    block = expm(-0.5j * theta * sum(c * s for c, s in zip(n, SIGMA[1:])))
    np.testing.assert_allclose(got, np.kron(np.eye(2), block), atol=1e-14)


def test_rotation_commutes_with_gamma0_and_gamma5():
    r = rotation_bispinor((0.6, 0.0, 0.8), 1.1).to_numpy()
    for g in (BASIS.gamma[0].to_numpy(), BASIS.gamma5.to_numpy()):
        np.testing.assert_allclose(r @ g, g @ r, atol=1e-14)


def test_rotation_bad_axis():
    with pytest.raises(ValueError):
        rotation_bispinor((1.0, 1.0, 0.0), 1.0)
    with pytest.raises(ValueError):
        rotation_bispinor((1, 1, 0), math.pi)
    with pytest.raises(KeyError):
        rotation_bispinor("w", 1.0)


@given(gaussian, gaussian)
def test_rotation_y_pi_is_build_phi(a, b):
    psi = bispinor(a, b, 0, 0)
    assert rotation_bispinor("y", math.pi) @ psi == build_phi(psi) == bispinor(-b, a, 0, 0)


@given(gaussian, gaussian, st.sampled_from(["x", "y", "z"]), st.integers(-4, 4))
def test_pure_right_stays_pure_right(c, d, axis, k):
    out = rotation_bispinor(axis, k * math.pi) @ bispinor(0, 0, c, d)
    assert out.is_pure_right()


@settings(max_examples=50)
@given(st.floats(-7, 7), st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(
    lambda v: sum(x * x for x in v) > 0.01))
def test_pure_right_stays_pure_right_any_angle(theta, v):
    n = tuple(np.array(v) / np.linalg.norm(v))
    out = rotation_bispinor(n, theta) @ bispinor(0, 0, 1, 2)
    assert out.is_pure_right(1e-15)


# ------------------------------------------------------------ case analysis


def _generic(a, b):
    # keep away from inputs where x or z also match up to a phase
    return not a.is_zero() and not b.is_zero() and a.abs2() != b.abs2()


@given(nonzero_gaussian, nonzero_gaussian)
def test_case_iii_axis_y(a, b):
    start, target = bispinor(a, b, 0, 0), bispinor(-b, a, 0, 0)
    outcome = rotation_case_analysis(start, target)
    assert outcome.case == "iii" and outcome.axis == "y" and outcome.reachable
    assert outcome.exact_axes == ("y",)
    if _generic(a, b):
        assert outcome.phase_axes == ()


def test_case_ii_block_obstruction():
    outcome = rotation_case_analysis(bispinor(0, 0, 1, 2), bispinor(-2, 1, 0, 0))
    assert outcome.case == "ii" and not outcome.reachable


def test_case_iii_identity():
    psi = bispinor(1, 2, 0, 0)
    outcome = rotation_case_analysis(psi, psi)
    assert outcome.case == "iii" and outcome.angle == 0.0


def test_case_i():
    outcome = rotation_case_analysis(bispinor(1, 2, 0, 0), bispinor(5, 0, 0, 0))
    assert outcome.case == "i" and not outcome.reachable


def test_case_phase_match():
    # R_z(pi) (1,0,0,0) = (-i,0,0,0) equals the target up to a phase
    outcome = rotation_case_analysis(bispinor(1, 0, 0, 0), bispinor(1, 0, 0, 0).scale(ComplexScalar(0, 1)))
    assert outcome.case == "iii" and outcome.axis == "z" and outcome.exact_axes == ()


# --------------------------------------------------------------- propagator


@pytest.mark.parametrize("m,expected", [(1, Fraction(-1)), (2, Fraction(-1, 4)), (0.5, Fraction(-4))])
def test_propagator_order0(m, expected):
    assert axion_propagator(m, 0) == expected
    assert isinstance(axion_propagator(m, 0), Fraction)


def test_propagator_series():
    assert axion_propagator(1, 2) == (-1, -1, -1)
    assert axion_propagator(2, 1) == (Fraction(-1, 4), Fraction(-1, 16))


@pytest.mark.parametrize("m,order", [(0, 0), (-1, 0), (1, -1), (1, 1.5)])
def test_propagator_rejects(m, order):
    with pytest.raises(ValueError):
        axion_propagator(m, order)


# ------------------------------------------------------------------ density


def test_axion_density_vanishes_at_rest():
    u = bispinor(1, 0, 1, 0).scale(ComplexScalar(2))
    assert evaluate_density(builtin("H_ax"), u, u, {"Ka": 1.0}) == 0


def test_density_matches_direct_matrix_oracle():
    rng = np.random.default_rng(5)
    e, n = (rng.normal(size=4) + 1j * rng.normal(size=4) for _ in range(2))
    g = [x.to_numpy() for x in BASIS.gamma]
    g5 = BASIS.gamma5.to_numpy()
    eta = np.diag([1, -1, -1, -1])
    bar = lambda v, m: v.conj() @ g[0] @ m @ v  # noqa: E731
    av = sum(eta[mu, mu] * bar(n, g[mu] @ g5) * bar(e, g[mu]) for mu in range(4))
    assert evaluate_density(builtin("H_AV"), e, n, {"GF": 1.0}) == pytest.approx(av, abs=1e-12)
    ax = 1j * 0.5 * bar(n, np.eye(4)) * bar(e, g5)
    assert evaluate_density(builtin("H_ax"), e, n, {"Ka": 0.5}) == pytest.approx(ax, abs=1e-12)


def test_density_parity_on_pure_left():
    e, n = bispinor(1, ComplexScalar(0, 2), 0, 0), bispinor(3, -1, 0, 0)
    ir = builtin("H_AV")
    pe, pn = apply_parity_state(e, ORIGIN)[0], apply_parity_state(n, ORIGIN)[0]
    base = evaluate_density(ir, e, n, {"GF": 1})
    assert abs(base) > 1
    assert evaluate_density(ir, pe, pn, {"GF": 1}) == pytest.approx(-base)


def test_unbound_coupling():
    with pytest.raises(UnboundCoupling):
        evaluate_density(builtin("H_AV"), bispinor(1, 0, 0, 0), bispinor(1, 0, 0, 0), {})


def test_external_scalar_binding():
    ir = parse("gp*(Nbar 1 N)*phi*(ebar 1 e)")
    u = bispinor(1, 0, 1, 0)
    with pytest.raises(UnboundCoupling):
        evaluate_density(ir, u, u, {"gp": 1})
    assert evaluate_density(ir, u, u, {"gp": 1, "phi": 3}) == pytest.approx(12)
    absorbed = parse("gp*(Nbar 1 N)*phi*(ebar 1 e)", static_propagator=True)
    assert evaluate_density(absorbed, u, u, {"gp": 1, "phi": 3}) == pytest.approx(12)


def test_plane_wave_phase_cancels():
    m = 1.3
    st_ = plane_wave_spinor(FourMomentum.on_shell((0.2, -0.4, 0.1), m), 2, m)
    ir = builtin("H_AV")
    base = evaluate_density(ir, st_.u, st_.u, {"GF": 1})
    phase = np.exp(-0.77j)
    shifted = st_.u.to_numpy() * phase
    assert evaluate_density(ir, shifted, shifted, {"GF": 1}) == pytest.approx(base, abs=1e-12)


# -------------------------------------------------------------- full checks


def test_single_sample_checks_pass():
    for run in (run_nc_check, run_axion_check):
        report = run(seed=7, n_samples=1)
        assert report.passed and report.samples == 1


def test_chain_signs_and_measurements():
    nc, ax = run_nc_check(3, 50), run_axion_check(3, 50)
    assert nc.chain_sign == 1 and ax.chain_sign == -1
    assert nc.measured_signs()["chain"] == [1]
    assert ax.measured_signs()["generic_chain"] == [-1]
    assert ax.counts()["parity"]["degenerate"] == 50
    assert nc.passed and ax.passed


def test_report_determinism_and_order_independence():
    a = run_nc_check(11, 40).to_dict()
    b = run_nc_check(11, 40).to_dict()
    c = run_nc_check(11, 40, workers=4).to_dict()
    assert a == b == c
    assert run_nc_check(12, 40).to_dict() != a


def test_report_invariant_passed_iff_within_tolerance():
    report = run_nc_check(5, 20, tol=1e-30)
    assert report.passed == (report.max_abs_deviation <= 1e-30)
    assert not report.passed  # finite precision cannot meet 1e-30 on nonzero densities


@pytest.mark.parametrize("kwargs", [dict(n_samples=0), dict(seed=-1), dict(tol=0.0), dict(n_samples=True)])
def test_run_check_validation(kwargs):
    with pytest.raises(ValueError):
        run_check("nc", **kwargs)


def test_run_check_unknown_case():
    with pytest.raises(ValueError):
        run_check("weak")
