"""Acceptance criteria, one test each; the conftest prints a PASS/FAIL line per criterion."""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from cjt.cli import run
from cjt.commands import cmd_fig1, run_sweep
from cjt.config import RunConfig, SweepConfig, config_from_dict
from cjt.ed_oracle import (
    TruncationSpec,
    build_hamiltonian,
    build_hamiltonian_chiral,
    commutator_norms,
    ground_state,
    spectrum_distance,
    symmetry_rotation,
)
from cjt.fluctuations import (
    amplitude_gaps,
    branch_dispersion,
    check_decoupling_transform,
    goldstone_slope,
    symplectic_oracle,
)
from cjt.lattice import HoppingSpec, build_hopping_matrix, normal_modes, staggered_transform
from cjt.meanfield import (
    MeanFieldState,
    ModelParams,
    Phase,
    classical_charge,
    classical_energy,
    critical_coupling,
    dynamics_energy,
    evolve_classical,
    general_saddle_point,
    homogeneous_saddle_point,
    saddle_residual,
    solve_saddle_point,
    _state_from_angles,
)
from cjt.numerics import nelder_mead_min
from cjt.output import render_table

SQ5 = math.sqrt(5.0)


def fig1(N=100):
    return ModelParams.chain(Delta=1.0, t=0.5, omega_z=1.0, g=1.0, N=N)


def random_broken(rng, N):
    Delta = rng.uniform(0.3, 2.0)
    t = rng.uniform(0.0, 1.0)
    wz = rng.uniform(0.2, 2.0)
    gc = math.sqrt(Delta * wz / 2)
    g = gc * rng.uniform(1.0 + 1e-3, 5.0)
    return ModelParams.chain(Delta=Delta, t=t, omega_z=wz, g=g, N=N)


def test_criterion_1_fig1_reproduction():
    start = time.perf_counter()
    table, gaps = cmd_fig1(RunConfig())
    render_table(table, "csv", 12)
    elapsed = time.perf_counter() - start

    omega = np.array([row[2:] for row in table.rows])
    assert omega.shape == (100, 3)
    assert abs(omega[0, 0]) <= 1e-10
    assert abs(omega[0, 1] - math.sqrt(3 - SQ5)) <= 1e-10
    assert abs(omega[0, 2] - math.sqrt(3 + SQ5)) <= 1e-10
    d_minus, d_plus = amplitude_gaps(fig1())
    assert abs(omega[0, 1] - d_minus) <= 1e-10 and abs(omega[0, 2] - d_plus) <= 1e-10
    assert gaps["Delta_minus"] == d_minus and gaps["Delta_plus"] == d_plus
    assert elapsed < 1.0, f"fig1 took {elapsed:.3f} s"


def test_criterion_2_goldstone_slope():
    def discrepancy(N):
        p = fig1(N)
        w1 = branch_dispersion(p, k_grid=[1]).goldstone[0]
        fd = w1 / (2 * math.pi / N)
        c_s = 2 * math.sin(homogeneous_saddle_point(p).theta[0]) * math.sqrt(0.5 / (1 + 4 * 0.75))
        assert c_s == pytest.approx(goldstone_slope(p), rel=1e-14)
        return abs(fd - c_s) / c_s

    errs = [discrepancy(N) for N in (1000, 2000, 4000)]
    assert errs[0] <= 1e-2
    assert errs[1] < errs[0] and errs[2] < errs[1]


def test_criterion_3_oracle_equivalence():
    def check_all_k(p):
        spec = branch_dispersion(p)
        for i, k in enumerate(spec.k_grid):
            ref = spec.omega[i]
            orc = symplectic_oracle(p, int(k))
            zero = ref == 0.0
            assert np.all(np.abs(orc[zero]) <= 1e-9), (p, k)
            assert np.all(np.abs(orc[~zero] - ref[~zero]) <= 1e-9 * ref[~zero]), (p, k)
            if k != 0:
                dev = check_decoupling_transform(p, int(k))
                assert max(dev.values()) <= 1e-12, (p, k, dev)

    check_all_k(fig1())
    rng = np.random.default_rng(31415)
    for _ in range(50):
        check_all_k(random_broken(rng, int(rng.integers(3, 40))))


def _nm_state(p, theta, a0):
    ar = np.zeros(p.N, complex)
    ar[0] = a0
    base = _state_from_angles(p, np.full(p.N, theta), np.zeros(p.N))
    return MeanFieldState(base.theta, base.phi, ar, ar.copy(), base.phase, base.rho_bar)


def test_criterion_4_meanfield_vs_minimization():
    N = 4
    for ratio in (1.1, 1.5, 2.0, 4.0):
        gc = math.sqrt(0.5)
        p = ModelParams.chain(Delta=1.0, t=0.5, omega_z=1.0, g=ratio * gc, N=N)
        closed = homogeneous_saddle_point(p)
        e_closed = -(1.0 / 4) * (ratio**2 + ratio**-2)
        assert classical_energy(p, closed) / N == pytest.approx(e_closed, abs=1e-12)
        assert math.cos(closed.theta[0]) == pytest.approx(-(ratio**-2), abs=1e-14)

        res = nelder_mead_min(lambda x: classical_energy(p, _nm_state(p, *x)) / N, [2.0, -0.5], tol=1e-15)
        assert res.converged
        assert abs(res.fun - e_closed) <= 1e-6
        assert abs(math.cos(res.x[0]) - math.cos(closed.theta[0])) <= 1e-6
        assert abs(res.x[1] - closed.alpha_r[0].real) <= 1e-6

    for ratio in (0.5, 0.9):
        p = ModelParams.chain(Delta=1.0, t=0.5, omega_z=1.0, g=ratio * math.sqrt(0.5), N=N)
        assert solve_saddle_point(p).phase is Phase.NORMAL
        res = nelder_mead_min(lambda x: classical_energy(p, _nm_state(p, *x)) / N, [2.0, -0.5], tol=1e-15)
        assert abs(res.fun + 0.5) <= 1e-6
        assert abs(math.cos(res.x[0]) + 1.0) <= 1e-6 and abs(res.x[1]) <= 1e-3


def test_criterion_5_general_solver_consistency():
    for N, g, wz in [(4, 1.0, 1.0), (6, 1.5, 0.7), (9, 3.0, 1.2), (16, 0.9, 1.0)]:
        p = ModelParams.chain(Delta=1.0, t=0.4, omega_z=wz, g=g, N=N)
        ref = homogeneous_saddle_point(p)
        s = general_saddle_point(p)
        assert s.phase is ref.phase
        assert np.max(np.abs(np.cos(s.theta) - np.cos(ref.theta))) <= 1e-9
        assert np.max(np.abs(np.sin(s.theta) - np.sin(ref.theta))) <= 1e-9
        assert np.max(np.abs(s.alpha_r - ref.alpha_r)) <= 1e-9
        assert np.max(np.abs(s.alpha_l - ref.alpha_l)) <= 1e-9
        assert abs(classical_energy(p, s) - classical_energy(p, ref)) <= 1e-9
        assert saddle_residual(p, s) <= 1e-10

    rng = np.random.default_rng(5)
    for N in (2, 3, 5):
        lat = HoppingSpec.nearest_neighbor(N, tuple(1.0 + 0.3 * rng.random(N)), -0.1)
        p = ModelParams(1.0, 1.3, lat)
        assert saddle_residual(p, general_saddle_point(p)) <= 1e-10


def test_criterion_6_quantum_symmetry_suite():
    gc = math.sqrt(0.5)
    p = ModelParams.chain(Delta=1.0, t=0.5, omega_z=1.0, g=2 * gc, N=1)
    e_mf = classical_energy(p, homogeneous_saddle_point(p))
    energies = []
    for n_max in (6, 10, 14):
        trunc = TruncationSpec(n_max)
        Hc = build_hamiltonian_chiral(p, trunc)
        Hx = build_hamiltonian(p, trunc)
        _, interior = commutator_norms(Hc, trunc)
        assert interior <= 1e-12
        assert spectrum_distance(Hc, Hx) <= 1e-10
        R = symmetry_rotation(0.7, trunc)
        assert np.max(np.abs(R @ Hc @ R.conj().T - Hc)) <= 1e-12
        e0 = ground_state(Hc)[0]
        assert e0 <= e_mf
        energies.append(e0)
    assert energies[0] >= energies[1] >= energies[2]


def test_criterion_7_symmetry_invariances():
    rng = np.random.default_rng(11)
    p = ModelParams.chain(Delta=1.0, t=0.5, omega_z=1.0, g=1.2, N=6)
    s = homogeneous_saddle_point(p)
    for _ in range(20):
        theta = s.theta + 0.2 * rng.normal(size=6)
        phi = rng.uniform(0, 2 * math.pi, size=6)
        ar = s.alpha_r + 0.2 * (rng.normal(size=6) + 1j * rng.normal(size=6))
        al = s.alpha_l + 0.2 * (rng.normal(size=6) + 1j * rng.normal(size=6))
        base = MeanFieldState(theta, phi, ar, al, s.phase, s.rho_bar)
        e0 = classical_energy(p, base)
        for angle in rng.uniform(-10, 10, size=5):
            rot = MeanFieldState(theta, phi + angle, np.exp(-1j * angle) * ar, np.exp(1j * angle) * al, s.phase, s.rho_bar)
            assert abs(classical_energy(p, rot) - e0) <= 1e-12

    for N in (2, 4, 6, 10, 24):
        amp = rng.uniform(0.05, 0.4)
        spec = HoppingSpec.nearest_neighbor(N, 2.0, amp)
        stag = staggered_transform(spec)
        assert staggered_transform(stag) == spec
        e1 = normal_modes(spec).energies
        e2 = normal_modes(stag).energies
        assert np.max(np.abs(np.sort(e1) - np.sort(e2))) <= 1e-10
        np.testing.assert_allclose(np.linalg.eigvalsh(build_hopping_matrix(stag)), e2, atol=1e-10)


def _generic_initial(N, seed=7):
    r = np.random.default_rng(seed)
    n0 = r.normal(size=(N, 3))
    n0 /= np.linalg.norm(n0, axis=1)[:, None]
    ar = 0.3 * (r.normal(size=N) + 1j * r.normal(size=N))
    al = 0.3 * (r.normal(size=N) + 1j * r.normal(size=N))
    return n0, ar, al


def test_criterion_8_dynamics_conservation():
    p = fig1(N=4)
    n0, ar, al = _generic_initial(4)
    dt = 0.0025  # dt * max(Delta_k, omega_z, g) = 0.0075
    tr = evolve_classical(p, n0, ar, al, dt, 10_000)
    e = np.array([dynamics_energy(p, tr.n[i], tr.alpha_r[i], tr.alpha_l[i]) for i in range(len(tr.times))])
    c = np.array([classical_charge(tr.n[i], tr.alpha_r[i], tr.alpha_l[i]) for i in range(len(tr.times))])
    assert np.max(np.abs(e - e[0])) <= 1e-8
    assert np.max(np.abs(c - c[0])) <= 1e-8

    # dt halving: global trajectory error falls by 2^4
    T = 5.0

    def final(step):
        t = evolve_classical(p, n0, ar, al, step, int(round(T / step)))
        return np.concatenate([t.n[-1].ravel(), t.alpha_r[-1].view(float), t.alpha_l[-1].view(float)]), t

    ref, _ = final(0.05 / 16)
    errs, drifts = [], []
    for step in (0.1, 0.05, 0.025):
        y, t = final(step)
        errs.append(np.max(np.abs(y - ref)))
        drifts.append(abs(dynamics_energy(p, t.n[-1], t.alpha_r[-1], t.alpha_l[-1]) - e[0]))
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    assert all(13.0 <= r <= 19.0 for r in ratios), ratios
    assert all(drifts[i] / drifts[i + 1] >= 14.0 for i in range(2)), drifts


def test_criterion_9_determinism(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"fig1_{i}.csv"
        assert run(["fig1", "--out", str(path)]) == 0
        outs.append(path.read_bytes() + (tmp_path / f"fig1_{i}.scalars.json").read_bytes())
    path = tmp_path / "fig1_sub.csv"
    subprocess.run([sys.executable, "-m", "cjt.cli", "fig1", "--out", str(path)], check=True, capture_output=True)
    outs.append(path.read_bytes() + (tmp_path / "fig1_sub.scalars.json").read_bytes())
    assert outs[0] == outs[1] == outs[2]

    cfg_path = tmp_path / "sweep.json"
    cfg_path.write_text('{"sweep": {"parameter": "g", "start": 0.2, "stop": 2.0, "points": 25, "quantity": "gaps"}}')
    sweeps = []
    for workers in (1, 1, 3):
        out = tmp_path / f"sweep_{len(sweeps)}.csv"
        assert run(["sweep", "--config", str(cfg_path), "--out", str(out), "--workers", str(workers)]) == 0
        sweeps.append(out.read_bytes())
    assert sweeps[0] == sweeps[1] == sweeps[2]
    assert b"domain_error" in sweeps[0] and b",ok," in sweeps[0]
