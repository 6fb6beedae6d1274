"""Command implementations. Each returns plain data; emission lives in :mod:`cjt.cli`.

Energies are divided by g when ``units == "g"`` and g > 0, matching the axes
of the standard dispersion figure.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .config import RunConfig, with_model
from .ed_oracle import (
    TruncationSpec,
    build_hamiltonian,
    build_hamiltonian_chiral,
    commutator_norms,
    ground_state,
    spectrum_distance,
)
from .errors import CJTError, ConvergenceError, DomainError, ValidationError, BudgetError
from .fluctuations import (
    amplitude_gaps,
    branch_dispersion,
    goldstone_slope,
    renormalized_frequency,
)
from .meanfield import (
    ModelParams,
    Phase,
    classical_energy,
    critical_coupling,
    solve_saddle_point,
)
from .output import Table

DISPERSION_COLUMNS = ("k_index", "wavenumber", "omega_G", "omega_Aminus", "omega_Aplus")

FIG1_MODEL = {"Delta": 1.0, "t": 0.5, "omega_z": 1.0, "g": 1.0, "lattice_kind": "nn-periodic"}


def energy_unit(config: RunConfig) -> float:
    g = config.model.g
    return g if (config.units == "g" and g > 0.0) else 1.0


def cmd_meanfield(config: RunConfig) -> dict:
    params = config.model.params()
    state = solve_saddle_point(params)
    u = energy_unit(config)
    if state.phase is Phase.NORMAL:
        cos_t, sin_t = -1.0, 0.0  # exact, instead of sin(pi) ~ 1e-16
    else:
        cos_t, sin_t = float(np.mean(np.cos(state.theta))), float(np.mean(np.sin(state.theta)))
    return {
        "phase": state.phase.value,
        "g_c": critical_coupling(params) / u,
        "cos_theta": cos_t,
        "sin_theta": sin_t,
        "alpha_0": float(np.real(state.alpha_r[0])),
        "rho_bar": state.rho_bar,
        "E_per_N": classical_energy(params, state) / params.N / u,
    }


def _require_broken(params: ModelParams) -> None:
    gc = critical_coupling(params)
    if not params.g > gc:
        raise DomainError(f"dispersion needs g > g_c (g={params.g:g}, g_c={gc:g})")


def cmd_dispersion(config: RunConfig) -> Table:
    params = config.model.params()
    _require_broken(params)
    spec = branch_dispersion(params)
    u = energy_unit(config)
    N = params.N
    rows = [
        (int(k), 2.0 * math.pi * int(k) / N, *(float(w) / u for w in spec.omega[i]))
        for i, k in enumerate(spec.k_grid)
    ]
    return Table(DISPERSION_COLUMNS, rows)


def cmd_gaps(config: RunConfig) -> dict:
    params = config.model.params()
    _require_broken(params)
    u = energy_unit(config)
    d_minus, d_plus = amplitude_gaps(params)
    lat = params.lattice
    c_s = goldstone_slope(params) / u if (lat.is_uniform_chain and lat.nn_amplitude <= 0.0) else None
    return {
        "g_c": critical_coupling(params) / u,
        "Omega": renormalized_frequency(params) / u,
        "c_s": c_s,
        "Delta_minus": d_minus / u,
        "Delta_plus": d_plus / u,
    }


def fig1_config(config: RunConfig) -> RunConfig:
    """Pin the model to Delta/g = 1, t/g = 0.5, omega_z/g = 1, keeping N and output settings."""
    return with_model(config, **FIG1_MODEL, onsite=None, hopping_matrix=None)


def cmd_fig1(config: RunConfig) -> tuple[Table, dict]:
    cfg = fig1_config(config)
    return cmd_dispersion(cfg), cmd_gaps(cfg)


def cmd_ed_check(config: RunConfig) -> dict:
    if config.ed is None:
        raise ValidationError("ed-check needs an 'ed' block in the configuration")
    ed = config.ed
    trunc = TruncationSpec(n_max=ed.n_max, N_sites=ed.N_sites, scheme=ed.scheme)
    trunc.check_budget()
    model = config.model
    if model.N != ed.N_sites:
        model = replace(model, N=ed.N_sites)
    params = model.params()
    H_chiral = build_hamiltonian_chiral(params, trunc)
    H_cart = build_hamiltonian(params, trunc)
    e0, _ = ground_state(H_chiral)
    e_mf = classical_energy(params, solve_saddle_point(params))
    full, interior = commutator_norms(H_chiral, trunc)
    u = energy_unit(config)
    return {
        "E0": e0 / u,
        "E_MF": e_mf / u,
        "ratio": e0 / e_mf if e_mf != 0.0 else None,
        "commutator_norm": interior,
        "commutator_norm_full": full,
        "basis_agreement": spectrum_distance(H_chiral, H_cart) / u,
        "dim": trunc.dim,
    }


# -- sweeps ------------------------------------------------------------------

_STATUS = {
    DomainError: "domain_error",
    ConvergenceError: "convergence_error",
    BudgetError: "budget_error",
    ValidationError: "config_error",
}

_SWEEP_FIELDS = {
    "meanfield": ("phase", "g_c", "cos_theta", "sin_theta", "alpha_0", "rho_bar", "E_per_N"),
    "gaps": ("g_c", "Omega", "c_s", "Delta_minus", "Delta_plus"),
}


def _status_of(exc: CJTError) -> str:
    for cls, name in _STATUS.items():
        if isinstance(exc, cls):
            return name
    return "error"


def _sweep_point(args) -> tuple[str, dict | None]:
    config, quantity = args
    try:
        record = cmd_meanfield(config) if quantity == "meanfield" else cmd_gaps(config)
    except CJTError as exc:
        return _status_of(exc), None
    return "ok", record


def sweep_grid(config: RunConfig) -> np.ndarray:
    sw = config.sweep
    return np.linspace(sw.start, sw.stop, sw.points)


def run_sweep(config: RunConfig, workers: int = 1) -> tuple[Table, int]:
    """Evaluate every grid point independently; rows come back in grid order.

    Returns the table and the number of points that succeeded.
    """
    if config.sweep is None:
        raise ValidationError("sweep needs a 'sweep' block in the configuration")
    sw = config.sweep
    grid = sweep_grid(config)
    jobs = []
    for value in grid:
        try:
            cfg = with_model(config, **{sw.parameter: float(value)})
        except ValidationError:
            cfg = None
        jobs.append((cfg, sw.quantity))

    def evaluate(job):
        if job[0] is None:
            return "config_error", None
        return _sweep_point(job)

    if workers > 1:
        live = [j for j in jobs if j[0] is not None]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = iter(pool.map(_sweep_point, live))
        results = [next(done) if j[0] is not None else ("config_error", None) for j in jobs]
    else:
        results = [evaluate(j) for j in jobs]

    names = _SWEEP_FIELDS[sw.quantity]
    rows = []
    for value, (status, record) in zip(grid, results):
        rows.append((float(value), status, *((record or {}).get(n) for n in names)))
    n_ok = sum(1 for s, _ in results if s == "ok")
    return Table((sw.parameter, "status", *names), rows), n_ok
