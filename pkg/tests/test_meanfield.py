import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cjt.errors import ValidationError
from cjt.lattice import HoppingSpec, uniform_chain
from cjt.meanfield import (
    ModelParams,
    Phase,
    boson_amplitudes,
    classical_energy,
    critical_coupling,
    general_saddle_point,
    homogeneous_saddle_point,
    normal_state,
    saddle_residual,
    solve_saddle_point,
    _state_from_angles,
)
from cjt.numerics import nelder_mead_min


def chain(g, omega_z=1.0, N=6, Delta=1.0, t=0.5):
    return ModelParams.chain(Delta=Delta, t=t, omega_z=omega_z, g=g, N=N)


def test_params_validation():
    with pytest.raises(ValidationError):
        ModelParams(omega_z=0.0, g=1.0, lattice=uniform_chain(3, 1.0, 0.5))
    with pytest.raises(ValidationError):
        ModelParams(omega_z=1.0, g=-1.0, lattice=uniform_chain(3, 1.0, 0.5))


def test_critical_coupling_value():
    assert critical_coupling(chain(1.0)) == pytest.approx(1 / math.sqrt(2), abs=1e-15)


def test_critical_coupling_bisection():
    # onset of a nonzero order parameter in the general solver
    lat = HoppingSpec.nearest_neighbor(2, (1.0, 1.0), 0.0)

    def ordered(g):
        state = general_saddle_point(ModelParams(1.0, g, lat), tol=1e-8, max_iter=200000)
        return float(np.max(np.sin(state.theta))) > 1e-3

    lo, hi = 0.5, 1.0
    for _ in range(8):
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ordered(mid) else (mid, hi)
    assert abs(0.5 * (lo + hi) - critical_coupling(ModelParams(1.0, 1.0, lat))) < 2e-3


def test_fig1_regime_is_broken():
    p = chain(1.0)
    assert p.g / critical_coupling(p) == pytest.approx(math.sqrt(2))
    assert homogeneous_saddle_point(p).phase is Phase.BROKEN


def test_below_threshold_normal():
    s = homogeneous_saddle_point(chain(0.5))
    assert s.phase is Phase.NORMAL
    np.testing.assert_allclose(np.cos(s.theta), -1.0)
    assert np.all(s.alpha_r == 0) and np.all(s.alpha_l == 0)


def test_fig1_saddle_values():
    N = 6
    s = homogeneous_saddle_point(chain(1.0, N=N))
    np.testing.assert_allclose(np.cos(s.theta), -0.5, atol=1e-15)
    np.testing.assert_allclose(np.sin(s.theta), math.sqrt(3) / 2, atol=1e-15)
    assert s.alpha_r[0].real == pytest.approx(-(math.sqrt(N) / 2) * (math.sqrt(3) / 2), abs=1e-14)
    assert s.rho_bar == pytest.approx(0.1875, abs=1e-15)


def test_saddle_strong_coupling_limit():
    s = homogeneous_saddle_point(chain(1e4))
    assert abs(np.cos(s.theta[0])) < 1e-8


def test_energy_fig1():
    p = chain(1.0, N=8)
    assert classical_energy(p, homogeneous_saddle_point(p)) / 8 == pytest.approx(-0.625, abs=1e-14)


def test_normal_energy():
    p = chain(0.3, omega_z=1.3, N=5)
    assert classical_energy(p, normal_state(p)) == pytest.approx(-5 * 1.3 / 2, abs=1e-14)


def test_broken_below_normal_just_above_gc():
    p0 = chain(1.0)
    p = chain(1.01 * critical_coupling(p0))
    assert classical_energy(p, homogeneous_saddle_point(p)) < classical_energy(p, normal_state(p))


def test_energy_oracle_minimization():
    # minimize over (theta, real alpha_0) with every other amplitude zero
    p = chain(1.0, N=4)

    def energy(x):
        theta, a0 = x
        ar = np.zeros(4, complex)
        ar[0] = a0
        st = _state_from_angles(p, np.full(4, theta), np.zeros(4))
        st = type(st)(st.theta, st.phi, ar, ar.copy(), st.phase, st.rho_bar)
        return classical_energy(p, st)

    res = nelder_mead_min(energy, [2.5, -1.0], tol=1e-14)
    assert res.fun / 4 == pytest.approx(-0.625, abs=1e-6)


def test_residual_zero_at_solutions():
    p = chain(1.3)
    assert saddle_residual(p, homogeneous_saddle_point(p)) <= 1e-12
    for g in (0.2, 1.0, 3.0):
        q = chain(g)
        assert saddle_residual(q, normal_state(q)) <= 1e-14


def test_residual_positive_off_solution():
    p = chain(1.0)
    s = homogeneous_saddle_point(p)
    perturbed = _state_from_angles(p, s.theta + 0.01, s.phi)
    assert saddle_residual(p, perturbed) > 1e-4


def test_boson_amplitudes_homogeneous():
    p = chain(1.0, N=5)
    s = homogeneous_saddle_point(p)
    ar, al = boson_amplitudes(p, s.theta, s.phi)
    np.testing.assert_allclose(ar, s.alpha_r, atol=1e-14)
    np.testing.assert_allclose(al, s.alpha_l, atol=1e-14)
    np.testing.assert_allclose(ar[1:], 0.0, atol=1e-14)


def test_homogeneous_requires_uniform():
    lat = HoppingSpec.nearest_neighbor(3, (1.0, 1.2, 1.0), -0.1)
    with pytest.raises(ValidationError):
        homogeneous_saddle_point(ModelParams(1.0, 1.0, lat))


def test_general_g_zero():
    p = chain(0.0)
    s = general_saddle_point(p)
    assert s.phase is Phase.NORMAL
    np.testing.assert_array_equal(np.cos(s.theta), -1.0)


def test_general_matches_closed_form():
    p = chain(1.0, N=6)
    ref = homogeneous_saddle_point(p)
    s = general_saddle_point(p)
    np.testing.assert_allclose(s.theta, ref.theta, atol=1e-10)
    np.testing.assert_allclose(s.alpha_r, ref.alpha_r, atol=1e-9)
    assert saddle_residual(p, s) <= 1e-10


def test_general_two_site_nonuniform():
    lat = HoppingSpec.nearest_neighbor(2, (1.0, 1.2), -0.1)
    p = ModelParams(1.0, 1.2, lat)
    s = general_saddle_point(p)
    assert s.phase is Phase.BROKEN
    assert saddle_residual(p, s) <= 1e-10
    assert abs(s.theta[0] - s.theta[1]) > 1e-3

    # oracle: Nelder-Mead over (theta_1, theta_2) with slaved amplitudes and aligned azimuths
    def energy(th):
        return classical_energy(p, _state_from_angles(p, np.asarray(th), np.zeros(2)))

    res = nelder_mead_min(energy, [2.5, 2.5], tol=1e-14)
    np.testing.assert_allclose(s.theta, res.x, atol=1e-5)
    assert classical_energy(p, s) == pytest.approx(res.fun, abs=1e-9)


def test_general_below_threshold_returns_trivial():
    lat = HoppingSpec.nearest_neighbor(2, (1.0, 1.2), -0.1)
    s = general_saddle_point(ModelParams(1.0, 0.3, lat))
    assert s.phase is Phase.NORMAL


def test_solve_dispatch():
    p = chain(1.0)
    assert solve_saddle_point(p).diagnostic is None
    lat = HoppingSpec.nearest_neighbor(3, (1.0, 1.1, 1.2), -0.1)
    q = ModelParams(1.0, 1.5, lat)
    assert saddle_residual(q, solve_saddle_point(q)) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.0, max_value=5.0), st.floats(min_value=0.2, max_value=3.0))
def test_closed_form_stationary_and_optimal(g, wz):
    p = chain(g, omega_z=wz, N=4)
    s = homogeneous_saddle_point(p)
    assert saddle_residual(p, s) <= 1e-10 * max(1.0, g * g)
    assert classical_energy(p, s) <= classical_energy(p, normal_state(p)) + 1e-12
    gc = critical_coupling(p)
    expected = -(wz / 4) * (g**2 / gc**2 + gc**2 / g**2) if g > gc else -wz / 2
    assert classical_energy(p, s) / 4 == pytest.approx(expected, rel=1e-12, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.0, max_value=2 * np.pi))
def test_u1_invariance_of_energy(phi):
    p = chain(1.3, N=5)
    s = homogeneous_saddle_point(p)
    r = np.random.default_rng(3)
    ar = s.alpha_r + 0.1 * (r.normal(size=5) + 1j * r.normal(size=5))
    al = s.alpha_l + 0.1 * (r.normal(size=5) + 1j * r.normal(size=5))
    base = type(s)(s.theta + 0.1 * r.normal(size=5), s.phi + r.normal(size=5), ar, al, s.phase, s.rho_bar)
    rot = type(s)(base.theta, base.phi + phi, np.exp(-1j * phi) * ar, np.exp(1j * phi) * al, s.phase, s.rho_bar)
    assert abs(classical_energy(p, rot) - classical_energy(p, base)) <= 1e-12
