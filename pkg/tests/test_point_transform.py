"""Tests for the point-transformation pipeline."""

import numpy as np
import pytest

from sp4lr.algebra import AlgebraElement, GeneratorId, adjoint, from_matrix, to_matrix
from sp4lr.errors import ArctanhDomain, EqualFrequencies
from sp4lr.hamiltonian import build_H_modified
from sp4lr.lr_ode import lr_residual
from sp4lr.numerics import central_diff
from sp4lr.point_transform import (
    PointTransformParams,
    dyson_static,
    dyson_time,
    dyson_time_exponent,
    ep_residual,
    ep_state,
    hermitian_hamiltonian_h,
    hermitian_invariant_expansion,
    hermitian_invariant_Ih,
    invariant_IH,
    metric_eigenvalues,
    metric_is_positive,
    pde_constraint_residuals,
    pushforward,
    pushforward_map,
    pushforward_shift,
    reference_H0,
    target_coefficients,
    tdde_residual,
)
from sp4lr.profiles import ScalarProfile

RNG = np.random.default_rng(20240801)
_G = GeneratorId

R_ONE = ScalarProfile.constant(1.0)
R_WOBBLE = ScalarProfile.sinusoid(0.2, 1.0, 0.0, 1.0)


def params(alpha=2.0, beta=1.0, coupling=0.5, r=R_ONE, c2=0.2, c3=0.2):
    return PointTransformParams(alpha=alpha, beta=beta, coupling=coupling,
                                r=r, c2=c2, c3=c3)


def unit(name):
    return AlgebraElement.unit(name).coeffs


# ---------------------------------------------------------------------------
# Ermakov-Pinney state


def test_trivial_constants_give_unit_factors():
    p = params(c2=0.0, c3=0.0)
    ep = ep_state(p, np.linspace(0.0, 3.0, 11))
    np.testing.assert_allclose(ep.sigma, 1.0, atol=1e-15)
    np.testing.assert_allclose(ep.sigma_t, 0.0, atol=1e-15)
    np.testing.assert_allclose(ep.mu, 1.0, atol=1e-15)


def test_sigma_closed_form_value():
    # c2 = 0.5, beta = 1, r = 1: sigma(t) = sqrt(sqrt(1.25) + 0.5 cos 2t)
    p = params(alpha=2.0, beta=1.0, c2=0.5, c3=0.0)
    t = np.array([0.0, 0.7, 1.9])
    ep = ep_state(p, t)
    np.testing.assert_allclose(ep.sigma, np.sqrt(np.sqrt(1.25) + 0.5 * np.cos(2 * t)),
                               atol=1e-12)


def test_ep_canonical_residual_random_times():
    p = params(alpha=2.0, beta=1.0, c2=0.3, c3=0.4)
    t = np.sort(RNG.uniform(0.0, 4.0, size=100))
    assert np.abs(ep_residual(p, ep_state(p, t))).max() < 1e-8


def test_ep_derivatives_match_finite_differences():
    p = params(r=R_WOBBLE, c2=0.3, c3=0.4)
    grid = np.linspace(0.0, 3.0, 3001)
    ep = ep_state(p, grid)
    h = grid[1] - grid[0]
    ds = central_diff(ep.sigma, h)
    np.testing.assert_allclose(ds[2:-2], ep.sigma_t[2:-2], atol=1e-9)
    dm2 = central_diff(ep.mu_t, h)
    np.testing.assert_allclose(dm2[2:-2], ep.mu_tt[2:-2], atol=1e-8)


# ---------------------------------------------------------------------------
# target coefficients


def test_target_trivial():
    p = params(c2=0.0, c3=0.0, coupling=1.0)
    a, b, lam = target_coefficients(p, np.array([0.0, 1.0]))
    np.testing.assert_allclose(a, p.beta, atol=1e-15)
    np.testing.assert_allclose(b, p.alpha, atol=1e-15)
    np.testing.assert_allclose(lam, p.coupling, atol=1e-15)


def test_target_decouples_without_coupling():
    p = params(coupling=0.0)
    _, _, lam = target_coefficients(p, np.array([0.3, 0.9]))
    np.testing.assert_array_equal(lam, 0.0)


def test_target_value_at_zero():
    p = params(alpha=2.0, beta=1.0, coupling=1.0, c2=0.3, c3=0.3)
    a, b, lam = target_coefficients(p, np.array([0.0]))
    scale0 = np.sqrt(np.sqrt(1.09) + 0.3)
    assert a[0] == pytest.approx(1.0 / scale0**2)
    assert b[0] == pytest.approx(2.0 / scale0**2)


# ---------------------------------------------------------------------------
# pushforward


def test_pushforward_trivial_role_swap():
    p = params(c2=0.0, c3=0.0)
    t = np.array([0.4])
    pm = pushforward_map(p, t)
    np.testing.assert_allclose(pm.apply(unit("J0"))[0], unit("J0"), atol=1e-14)
    np.testing.assert_allclose(pm.apply(unit("Q1"))[0], -unit("Q1"), atol=1e-14)
    np.testing.assert_allclose(pm.apply(unit("K2"))[0], unit("K2"), atol=1e-14)
    np.testing.assert_allclose(pm.apply(unit("J3"))[0], -unit("J3"), atol=1e-14)
    # at unit scale factors the map is the x<->y phase-space swap
    swap = np.zeros((4, 4))
    swap[0, 1] = swap[1, 0] = swap[2, 3] = swap[3, 2] = 1.0
    for g in range(10):
        img = pm.apply(np.eye(10)[g])[0]
        want, resid = from_matrix(swap @ to_matrix(np.eye(10)[g]) @ swap)
        assert resid < 1e-13
        np.testing.assert_allclose(img, want, atol=1e-13)


def test_pushforward_linear():
    p = params()
    t = np.array([0.7])
    a = RNG.standard_normal(10) + 1j * RNG.standard_normal(10)
    b = RNG.standard_normal(10) + 1j * RNG.standard_normal(10)
    pm = pushforward_map(p, t)
    np.testing.assert_allclose(pm.apply(a + 2.0 * b), pm.apply(a) + 2.0 * pm.apply(b),
                               atol=1e-12)


def test_pushforward_shift_vanishes_at_trivial_params():
    p = params(c2=0.0, c3=0.0)
    np.testing.assert_allclose(pushforward_shift(p, np.array([0.0, 1.0])), 0.0, atol=1e-15)


# ---------------------------------------------------------------------------
# reference Hamiltonian and invariant


def test_reference_h0():
    p = params(alpha=2.0, beta=1.0, coupling=0.0)
    h0 = reference_H0(p)
    assert h0["J0"] == 3.0 and h0["J3"] == 1.0
    iso = reference_H0(params(alpha=1.5, beta=1.5, coupling=0.0))
    np.testing.assert_allclose(iso.coeffs, 3.0 * unit("J0"), atol=0)
    coupled = reference_H0(params(coupling=1.0))
    assert not coupled.is_hermitian()
    assert np.abs(adjoint(coupled).coeffs - coupled.coeffs).max() > 0


def test_invariant_trivial_params():
    p = params(alpha=2.0, beta=1.0, coupling=1.0, c2=0.0, c3=0.0)
    inv = invariant_IH(p, np.array([0.8]))[0]
    want = (1.0 * (unit("J0") + unit("J3")) + 2.0 * (unit("J0") - unit("J3"))
            + 1.0j * (unit("J1") + unit("K3")))
    np.testing.assert_allclose(inv, want, atol=1e-13)


def test_invariant_satisfies_invariant_equation():
    p = params(alpha=2.0, beta=1.0, coupling=0.5, r=R_WOBBLE, c2=0.2, c3=0.2)
    grid = np.arange(0.0, 2.0 + 1e-12, 1e-3)
    inv = invariant_IH(p, grid)
    a, b, lam = target_coefficients(p, grid)
    assert lr_residual(inv, build_H_modified(a, b, lam), grid) < 1e-8


def test_invariant_hermitian_without_coupling():
    p = params(coupling=0.0, c2=0.0, c3=0.0)
    inv = invariant_IH(p, np.array([0.5, 1.5]))
    assert np.abs(inv.imag).max() < 1e-14


# ---------------------------------------------------------------------------
# static Dyson map


def test_dyson_static_zero_coupling_identity():
    p = params(coupling=0.0)
    stat = dyson_static(p)
    np.testing.assert_array_equal(stat.eta_matrix, np.eye(4))
    np.testing.assert_array_equal(stat.h0.coeffs, reference_H0(p).coeffs)
    assert stat.params.kappa1 == 0.0 and stat.params.kappa2 == 0.0


def test_dyson_static_zero_coupling_formula_limit():
    # alpha > beta: Delta = alpha^2 - beta^2 and h0 collapses onto H0
    p = params(alpha=2.0, beta=1.0, coupling=0.0)
    stat = dyson_static(p)
    assert stat.delta == pytest.approx(3.0)
    assert stat.h0["J0"] == pytest.approx(3.0)
    assert stat.h0["J3"] == pytest.approx(1.0)
    assert abs(stat.h0["K1"]) == 0.0 and abs(stat.h0["Q2"]) == 0.0


def test_dyson_static_constraints():
    p = params(alpha=2.0, beta=1.0, coupling=1.0)
    stat = dyson_static(p)
    k1, k2 = stat.params.kappa1, stat.params.kappa2
    assert k1 * k2 <= 0.0
    s = np.lib.scimath.sqrt(k1 * k2)
    lhs = 2.0 * p.coupling * np.cos(2.0 * s)
    r1 = lhs - (p.alpha + p.beta) * (k1 + k2) * np.sin(2.0 * s) / s
    r2 = lhs - (p.alpha - p.beta) * (k1 - k2) * np.sin(2.0 * s) / s
    assert abs(r1) < 1e-10 and abs(r2) < 1e-10
    # adjoint action of the exponent produces exactly the closed h0
    assert stat.check_residual < 1e-10
    assert stat.h0.is_hermitian(1e-12)


def test_dyson_static_domain_errors():
    with pytest.raises(EqualFrequencies):
        PointTransformParams(alpha=1.0, beta=1.0, coupling=0.5, r=R_ONE)
    with pytest.raises(ArctanhDomain):
        dyson_static(params(alpha=1.2, beta=1.0, coupling=2.0))


# ---------------------------------------------------------------------------
# time-dependent Dyson map


def test_dyson_time_exponent_trivial_swaps_kappas():
    p = params(alpha=2.0, beta=1.0, coupling=1.0, c2=0.0, c3=0.0)
    stat = dyson_static(p)
    exps = dyson_time_exponent(p, np.array([1.1]), stat)[0]
    k1, k2 = stat.params.kappa1, stat.params.kappa2
    want = k2 * (unit("Q3") - unit("J2")) + k1 * (unit("Q3") + unit("J2"))
    np.testing.assert_allclose(exps, want, atol=1e-13)


def test_dyson_time_identity_without_coupling():
    p = params(coupling=0.0, c2=0.3, c3=0.2)
    eta = dyson_time(p, np.array([0.0, 0.9, 1.7]))
    np.testing.assert_allclose(eta, np.broadcast_to(np.eye(4), eta.shape), atol=1e-14)


def test_dyson_time_exponent_is_static_image():
    p = params(alpha=2.0, beta=1.0, coupling=1.0, r=R_WOBBLE, c2=0.2, c3=0.3)
    stat = dyson_static(p)
    t = np.linspace(0.0, 2.0, 9)
    exps = dyson_time_exponent(p, t, stat)
    image = pushforward(p, t, stat.exponent.coeffs)
    np.testing.assert_allclose(exps, image, atol=1e-12)


# ---------------------------------------------------------------------------
# Hermitian invariant and Hamiltonian


def test_hermitian_invariant_trivial_no_coupling():
    p = params(alpha=2.0, beta=1.0, coupling=0.0, c2=0.0, c3=0.0)
    ih = hermitian_invariant_Ih(p, np.array([0.6]))[0]
    want = 1.0 * (unit("J0") + unit("J3")) + 2.0 * (unit("J0") - unit("J3"))
    np.testing.assert_allclose(ih, want, atol=1e-13)


def test_hermitian_invariant_real_and_consistent():
    p = params(alpha=2.0, beta=1.0, coupling=1.0, c2=0.3, c3=0.3)
    stat = dyson_static(p)
    t = np.sort(RNG.uniform(0.0, 4.0, size=50))
    ih = hermitian_invariant_Ih(p, t, stat)
    assert np.abs(ih.imag).max() < 1e-8
    np.testing.assert_allclose(ih, pushforward(p, t, stat.h0.coeffs), atol=1e-8)
    np.testing.assert_allclose(ih, hermitian_invariant_expansion(p, t, stat), atol=1e-8)


def test_hermitian_hamiltonian_trivial_no_coupling():
    p = params(alpha=2.0, beta=1.0, coupling=0.0, c2=0.0, c3=0.0, r=R_WOBBLE)
    t = np.array([0.0, 1.2])
    h = hermitian_hamiltonian_h(p, t)
    r = R_WOBBLE(t)
    want = np.outer(r, 2.0 * (unit("J0") - unit("J3")) + 1.0 * (unit("J0") + unit("J3")))
    np.testing.assert_allclose(h, want, atol=1e-13)


def test_hermitian_hamiltonian_is_hermitian_and_matches_image():
    p = params(alpha=3.0, beta=1.0, coupling=0.8, r=R_WOBBLE, c2=0.2, c3=0.2)
    stat = dyson_static(p)
    t = np.linspace(0.0, 2.0, 41)
    h = hermitian_hamiltonian_h(p, t, stat)
    assert np.abs(h.imag).max() < 1e-12
    pm = pushforward_map(p, t)
    ep = ep_state(p, t)
    h_image = ep.r[:, None] * pm.apply(stat.h0.coeffs) - pm.shift
    np.testing.assert_allclose(h, h_image, atol=1e-12)


def test_tdde_residual_trivial():
    p = params(alpha=2.0, beta=1.0, coupling=0.0, c2=0.0, c3=0.0)
    assert tdde_residual(p, np.linspace(0.0, 1.0, 101)) < 1e-10


def test_tdde_residual_and_convergence():
    p = params(alpha=2.0, beta=1.0, coupling=0.5, c2=0.2, c3=0.2)
    grid = np.arange(0.0, 2.0 + 1e-12, 1e-3)
    assert tdde_residual(p, grid) < 1e-6
    # 4th-order decay under step halving
    errs = []
    for step in (8e-3, 4e-3, 2e-3):
        g = np.arange(0.0, 2.0 + step / 2.0, step)
        errs.append(tdde_residual(p, g))
    assert 10.0 < errs[0] / errs[1] < 24.0
    assert 10.0 < errs[1] / errs[2] < 24.0


# ---------------------------------------------------------------------------
# transformed-equation residuals


def test_pde_residuals_trivial():
    p = params(alpha=2.0, beta=1.0, coupling=1.0, c2=0.0, c3=0.0, r=R_WOBBLE)
    xy = RNG.uniform(-2.0, 2.0, size=(10, 2))
    b0x, b0y, v0 = pde_constraint_residuals(p, np.array([0.5, 1.5]), xy)
    assert b0x == 0.0 and b0y == 0.0
    assert v0 < 1e-12  # potential matches with lam = coupling * r


def test_pde_residuals_generic():
    p = params(alpha=2.0, beta=1.0, coupling=1.0, c2=0.3, c3=0.3)
    ts = RNG.uniform(0.0, 4.0, size=20)
    xy = RNG.uniform(-2.0, 2.0, size=(20, 2))
    b0x, b0y, v0 = pde_constraint_residuals(p, ts, xy)
    assert max(b0x, b0y, v0) < 1e-8


def test_pde_residuals_ignore_phase_constant():
    p1 = params(c2=0.25, c3=0.15)
    p2 = PointTransformParams(alpha=p1.alpha, beta=p1.beta, coupling=p1.coupling,
                              r=p1.r, c2=p1.c2, c3=p1.c3, c1_phase=3.7)
    ts = np.array([0.4, 1.3])
    xy = RNG.uniform(-1.0, 1.0, size=(5, 2))
    np.testing.assert_allclose(pde_constraint_residuals(p1, ts, xy),
                               pde_constraint_residuals(p2, ts, xy), atol=1e-13)


# ---------------------------------------------------------------------------
# metric


def test_metric_positive_definite():
    p = params(alpha=2.0, beta=1.0, coupling=1.0, r=R_WOBBLE, c2=0.4, c3=0.4)
    t = np.linspace(0.0, 4.0, 401)
    assert metric_is_positive(p, t).all()
    evs = metric_eigenvalues(p, t[::80])
    assert (evs > 0).all()


def test_metric_hermitian():
    from sp4lr.point_transform import metric_matrices

    p = params(coupling=0.8)
    rho = metric_matrices(p, np.array([0.3, 2.1]))
    np.testing.assert_allclose(rho, np.conj(np.transpose(rho, (0, 2, 1))), atol=1e-14)


def test_vanishing_time_density_rejected():
    p = params(r=ScalarProfile.sinusoid(1.0, 1.0))  # r(0) = 0
    with pytest.raises(ValueError):
        ep_state(p, np.array([0.0, 1.0]))


def test_complex_delta_condition_is_arctanh_domain():
    # (alpha^2-beta^2)^2 < 4 alpha beta Lambda^2 is algebraically the
    # same as |2 sqrt(alpha beta) Lambda / (alpha^2-beta^2)| >= 1, so a
    # would-be-complex Delta always surfaces as the domain error
    alpha, beta, coupling = 1.3, 1.0, 0.34
    assert (alpha**2 - beta**2) ** 2 < 4 * alpha * beta * coupling**2
    with pytest.raises(ArctanhDomain):
        dyson_static(params(alpha=alpha, beta=beta, coupling=coupling))
