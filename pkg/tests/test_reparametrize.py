import math

import numpy as np
import pytest

from kirchhoff_spectral import (
    IntegratorConfig,
    SpectralState,
    SpectralVector,
    Spectrum,
    basis_vector,
    constant,
    evolve,
    power_spectrum,
    psi_initial_derivatives,
    psi_trace,
    reparametrization_check,
    scurve_from_trajectory,
    solve_parametrization,
    solve_trajectory_system,
    uniqueness_condition,
    zero_vector,
)
from kirchhoff_spectral.errors import ParametrizationError, PreconditionError
from kirchhoff_spectral.reparametrize import TabulatedSpeed
from tests.conftest import random_vector


def test_psi_zero_solution(tight_cfg):
    spec = power_spectrum(3)
    tr = evolve(
        SpectralState(t=0.0, u=zero_vector(spec), v=zero_vector(spec)),
        constant(1.0),
        tight_cfg,
        1.0,
    )
    pt = psi_trace(tr, zero_vector(spec))
    assert np.all(pt.psi == 0.0)
    assert np.all(pt.f == 0.0)


def test_psi_single_mode_closed_form(tight_cfg):
    # m = 1, lam = 1, u0 = e1, u1 = 0: u = cos t, psi = cos^2 t - 1 = -sin^2 t
    spec = Spectrum([1.0])
    u0 = basis_vector(spec, 0)
    tr = evolve(SpectralState(t=0.0, u=u0, v=zero_vector(spec)), constant(1.0),
                tight_cfg, 1.2)
    pt = psi_trace(tr, u0)
    assert pt.psi[0] == 0.0
    assert np.max(np.abs(pt.psi + np.sin(tr.t) ** 2)) < 1e-9
    assert np.max(np.abs(pt.f + np.sin(2.0 * tr.t))) < 1e-9


def test_psi_requires_matching_datum(tight_cfg):
    spec = Spectrum([1.0])
    u0 = basis_vector(spec, 0)
    tr = evolve(SpectralState(t=0.0, u=u0, v=zero_vector(spec)), constant(1.0),
                tight_cfg, 1.0)
    with pytest.raises(PreconditionError):
        psi_trace(tr, basis_vector(spec, 0, 2.0))


def test_initial_derivative_examples():
    spec1 = Spectrum([1.0])
    e1 = basis_vector(spec1, 0)
    assert psi_initial_derivatives(e1, e1, constant(1.0)) == (2.0, 0.0)

    spec = Spectrum([1.0, 2.0])
    u0 = basis_vector(spec, 0)
    u1 = basis_vector(spec, 1)
    assert psi_initial_derivatives(u0, u1, constant(1.0)) == (0.0, 6.0)

    u1m = SpectralVector(spec, [0.0, 0.5])
    assert psi_initial_derivatives(u0, u1m, constant(1.0)) == (0.0, 0.0)


def test_derivatives_equal_twice_uniqueness_quantities_exactly():
    rng = np.random.default_rng(21)
    spec = power_spectrum(12)
    m = constant(1.0)
    for _ in range(50):
        u0 = random_vector(spec, rng)
        u1 = random_vector(spec, rng, decay=0.5)
        rep = uniqueness_condition(u0, u1, m)
        d1, d2 = psi_initial_derivatives(u0, u1, m)
        assert d1 == 2.0 * rep.as1
        assert d2 == 2.0 * rep.as2


def test_finite_difference_convergence(tight_cfg):
    # second-order one-sided stencils against the algebraic derivatives
    rng = np.random.default_rng(3)
    spec = power_spectrum(6)
    m = constant(1.0)
    ref_cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-12)
    for _ in range(3):
        u0 = random_vector(spec, rng)
        u1 = random_vector(spec, rng, decay=0.5)
        d1, d2 = psi_initial_derivatives(u0, u1, m)

        def fd_errors(dt):
            cfg = IntegratorConfig(1e-12, 1e-12, dense_output_dt=dt)
            tr = evolve(SpectralState(t=0.0, u=u0, v=u1), m, cfg, 2.0 * dt)
            pt = psi_trace(tr, u0)
            p0, p1, p2 = pt.psi[0], pt.psi[1], pt.psi[2]
            fd1 = (-3.0 * p0 + 4.0 * p1 - p2) / (2.0 * dt)
            fd2 = (p0 - 2.0 * p1 + p2) / dt**2
            return abs(fd1 - d1), abs(fd2 - d2)

        e1a, e2a = fd_errors(2e-3)
        e1b, e2b = fd_errors(1e-3)
        order1 = math.log2(e1a / e1b)
        order2 = math.log2(e2a / e2b)
        assert order1 >= 1.8
        assert order2 >= 0.9


def test_direct_branch_consistency(tight_cfg):
    spec = Spectrum([1.0])
    u0 = basis_vector(spec, 0)
    u1 = basis_vector(spec, 0)
    m = constant(1.0)
    tr = evolve(SpectralState(t=0.0, u=u0, v=u1), m, tight_cfg, 0.7)
    curve = solve_trajectory_system(u0, u1, m, 0.9, tight_cfg)
    assert curve.branch == "direct"
    assert curve.direction == 1
    check = reparametrization_check(tr, curve, u0)
    assert check.max_deviation < 1e-6


def test_bootstrap_branch_consistency(tight_cfg):
    spec = Spectrum([1.0])
    u0 = basis_vector(spec, 0)
    u1 = zero_vector(spec)
    m = constant(1.0)
    d1, d2 = psi_initial_derivatives(u0, u1, m)
    assert d1 == 0.0 and d2 == -2.0
    tr = evolve(SpectralState(t=0.0, u=u0, v=u1), m, tight_cfg, 1.1)
    curve = solve_trajectory_system(u0, u1, m, 0.8, tight_cfg)
    assert curve.branch == "bootstrap"
    assert curve.direction == -1
    check = reparametrization_check(tr, curve, u0)
    assert check.max_deviation < 1e-5


def test_refusal_when_both_derivatives_vanish(tight_cfg):
    spec = Spectrum([1.0, 2.0])
    u0 = basis_vector(spec, 0)
    u1 = SpectralVector(spec, [0.0, 0.5])
    with pytest.raises(PreconditionError, match="vanish"):
        solve_trajectory_system(u0, u1, constant(1.0), 0.5, tight_cfg)


def test_constant_speed_parametrization(tight_cfg):
    s = np.linspace(0.0, 1.0, 101)
    speed = TabulatedSpeed(s=s, f=np.ones_like(s), direction=1)
    pt = solve_parametrization(speed, 0.9, tight_cfg)
    assert np.max(np.abs(pt.psi - pt.t)) < 1e-9


def test_parametrization_sign_change_rejected(tight_cfg):
    s = np.linspace(0.0, 1.0, 101)
    f = np.cos(2.0 * s)  # goes negative inside
    with pytest.raises(ParametrizationError, match="sign"):
        solve_parametrization(TabulatedSpeed(s=s, f=f, direction=1), 1.0, tight_cfg)


def test_round_trip_direct_branch(tight_cfg):
    spec = Spectrum([1.0])
    u0 = basis_vector(spec, 0)
    u1 = basis_vector(spec, 0)
    m = constant(1.0)
    tr = evolve(SpectralState(t=0.0, u=u0, v=u1), m, tight_cfg, 0.7)
    pt = psi_trace(tr, u0)
    curve = solve_trajectory_system(u0, u1, m, 0.9, tight_cfg)
    recovered = solve_parametrization(curve, 0.7, tight_cfg)
    direct = np.interp(recovered.t, pt.t, pt.psi)
    assert np.max(np.abs(recovered.psi - direct)) < 1e-6


def test_round_trip_degenerate_start(tight_cfg):
    # F(0) = 0 with first-order vanishing: the recovered pace still escapes
    # the trivial branch and matches the direct run
    spec = Spectrum([1.0])
    u0 = basis_vector(spec, 0)
    u1 = zero_vector(spec)
    m = constant(1.0)
    tr = evolve(SpectralState(t=0.0, u=u0, v=u1), m, tight_cfg, 1.1)
    pt = psi_trace(tr, u0)
    curve = solve_trajectory_system(u0, u1, m, 0.8, tight_cfg)
    recovered = solve_parametrization(curve, 1.1, tight_cfg)
    assert np.all(recovered.psi[1:] < 0.0)  # escapes, mirrored sign restored
    direct = np.interp(recovered.t, pt.t, pt.psi)
    assert np.max(np.abs(recovered.psi - direct)) < 1e-5


def test_self_comparison_within_interpolation_error(tight_cfg):
    rng = np.random.default_rng(17)
    spec = power_spectrum(4)
    u0 = random_vector(spec, rng)
    u1 = random_vector(spec, rng, decay=0.5)
    m = constant(1.0)
    d1, _ = psi_initial_derivatives(u0, u1, m)
    if d1 == 0.0:
        u1 = SpectralVector(spec, u1.components + 0.1 * u0.components)
    tr = evolve(SpectralState(t=0.0, u=u0, v=u1), m, tight_cfg, 0.2)
    curve = scurve_from_trajectory(tr)
    sub = tr  # same trajectory: deviation is pure interpolation error
    check = reparametrization_check(sub, curve, u0)
    assert check.max_deviation < 1e-8


def test_zero_solution_monotonicity_gate(tight_cfg):
    spec = Spectrum([1.0])
    tr = evolve(
        SpectralState(t=0.0, u=zero_vector(spec), v=zero_vector(spec)),
        constant(1.0),
        tight_cfg,
        1.0,
    )
    with pytest.raises(ParametrizationError):
        scurve_from_trajectory(tr)


def test_sign_coherence(tight_cfg):
    # on the monotone window the sign of psi' equals the sign of the first
    # nonzero initial derivative
    spec = Spectrum([1.0])
    u0 = basis_vector(spec, 0)
    for u1, expected in ((basis_vector(spec, 0), 1), (zero_vector(spec), -1)):
        curve = solve_trajectory_system(u0, u1, constant(1.0), 0.5, tight_cfg)
        assert curve.direction == expected
        f_vals = curve.f_values()
        assert np.all(f_vals[1:] > 0.0)  # mirrored speed positive past 0
