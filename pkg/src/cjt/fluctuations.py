"""Gaussian fluctuations around the broken-symmetry saddle point.

Per boson mode k the quadratic theory reduces to three coupled oscillators
with a symmetric 3x3 potential matrix B(k); its eigenvalues are the squared
collective-mode frequencies (one Goldstone branch, two amplitude branches).

The natural mass parameters ``m_pm(k) = (1 pm sqrt(Delta_0/Delta_k))^-1``
diverge at k = 0 for the minus sign, so B is written in terms of their
reciprocals ``mu_pm = 1 pm sqrt(Delta_0/Delta_k)``, which are finite
everywhere and give the same matrix wherever m_pm is finite.

An independent route to the same spectrum, :func:`symplectic_oracle`, works
with the untransformed kinetic/potential pair (T, V) of the oscillators.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnstableBosonSector, UnstableSpectrumError
from .lattice import band_energies, is_translation_invariant
from .meanfield import ModelParams, critical_coupling, homogeneous_saddle_point
from .numerics import matrix_sqrt_spd, symmetric_eigen

CLAMP_TOL = 1e-12
UNSTABLE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FluctuationMatrix:
    k_index: int
    B: np.ndarray
    omega_cap: float
    eps_sq: float
    mu_plus: float
    mu_minus: float

    @property
    def m_plus(self) -> float:
        return 1.0 / self.mu_plus

    @property
    def m_minus(self) -> float:
        return np.inf if self.mu_minus == 0.0 else 1.0 / self.mu_minus


@dataclass(frozen=True, eq=False)
class BranchSpectrum:
    """Frequencies ``omega[i] = (omega_G, omega_A-, omega_A+)`` at ``k_grid[i]``."""

    k_grid: np.ndarray
    omega: np.ndarray

    @property
    def goldstone(self) -> np.ndarray:
        return self.omega[:, 0]


def _require_broken(params: ModelParams) -> float:
    gc = critical_coupling(params)
    if not params.g > gc:
        raise DomainError(
            f"fluctuation spectrum is only defined in the broken phase (g={params.g:g} <= g_c={gc:g})"
        )
    return gc


def _require_uniform(params: ModelParams) -> np.ndarray:
    if not is_translation_invariant(params.lattice):
        raise DomainError(
            "collective modes need a translation-invariant lattice whose k=0 mode is the band "
            "minimum; for positive nearest-neighbour amplitudes apply staggered_transform first"
        )
    return band_energies(params.lattice)


def renormalized_frequency(params: ModelParams) -> float:
    """Omega = omega_z / |cos(theta)| = omega_z g^2 / g_c^2 in the broken phase."""
    gc = _require_broken(params)
    return params.omega_z * params.g**2 / gc**2


def _b_matrix(Dk: float, D0: float, gc2: float, omega: float):
    s = np.sqrt(D0 / Dk)
    mu_p = 1.0 + s
    mu_m = 0.0 if Dk == D0 else 1.0 - s
    eps2 = 0.5 * (Dk * Dk + omega * omega)
    b12 = -gc2 * np.sqrt(2.0 * Dk * mu_p / D0)
    b13 = -gc2 * np.sqrt(2.0 * Dk * mu_m / D0)
    b23 = (eps2 - Dk * Dk) * np.sqrt(mu_p * mu_m)
    B = np.array(
        [
            [Dk * Dk, b12, b13],
            [b12, eps2 * mu_p, b23],
            [b13, b23, eps2 * mu_m],
        ]
    )
    return B, eps2, mu_p, mu_m


def fluctuation_matrix(params: ModelParams, k_index: int) -> FluctuationMatrix:
    """B(k) in the mu-parametrization.

    Entries: ``B11 = Delta_k^2``, ``B22 = eps^2 mu+``, ``B33 = eps^2 mu-``,
    ``B12 = -g_c^2 sqrt(2 Delta_k mu+ / Delta_0)``,
    ``B13 = -g_c^2 sqrt(2 Delta_k mu- / Delta_0)``,
    ``B23 = (eps^2 - Delta_k^2) sqrt(mu+ mu-)`` with ``eps^2 = (Delta_k^2 + Omega^2) / 2``.
    """
    gc = _require_broken(params)
    energies = _require_uniform(params)
    if not 0 <= k_index < len(energies):
        raise IndexError(f"k_index {k_index} out of range 0..{len(energies) - 1}")
    omega = renormalized_frequency(params)
    B, eps2, mu_p, mu_m = _b_matrix(float(energies[k_index]), float(energies[0]), gc * gc, omega)
    return FluctuationMatrix(k_index, B, omega, eps2, mu_p, mu_m)


def b_matrix_mass_form(params: ModelParams, k_index: int) -> np.ndarray:
    """B(k) written with the mass parameters m_pm; only valid where m_- is finite (k != 0)."""
    gc = _require_broken(params)
    energies = _require_uniform(params)
    Dk, D0 = float(energies[k_index]), float(energies[0])
    omega = renormalized_frequency(params)
    gc2 = gc * gc
    m_p = 1.0 / (1.0 + np.sqrt(D0 / Dk))
    m_m = 1.0 / (1.0 - np.sqrt(D0 / Dk))
    eps2 = 0.5 * (Dk * Dk + omega * omega)
    b12 = -gc2 * np.sqrt(2.0 * Dk / (D0 * m_p))
    b13 = -gc2 * np.sqrt(2.0 * Dk / (D0 * m_m))
    b23 = (eps2 - Dk * Dk) / np.sqrt(m_p * m_m)
    return np.array([[Dk * Dk, b12, b13], [b12, eps2 / m_p, b23], [b13, b23, eps2 / m_m]])


def _frequencies(eigenvalues: np.ndarray, where: str) -> np.ndarray:
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    scale = max(1.0, float(np.max(np.abs(lam))))
    if lam[0] < -UNSTABLE_TOL * scale:
        raise UnstableSpectrumError(f"negative squared frequency {lam[0]:.3e} at {where}")
    if lam[0] < -CLAMP_TOL * scale:
        warnings.warn(f"clamping squared frequency {lam[0]:.3e} to zero at {where}", RuntimeWarning)
    # roundoff-sized values on either side of zero are an exact zero mode
    lam = np.where(np.abs(lam) <= CLAMP_TOL * scale, 0.0, lam)
    return np.sqrt(np.clip(lam, 0.0, None))


def _branch_at(Dk, D0, gc2, omega, label):
    B = _b_matrix(Dk, D0, gc2, omega)[0]
    return _frequencies(symmetric_eigen(B).values, f"k={label}")


def branch_dispersion(params: ModelParams, k_grid=None, workers: int = 1) -> BranchSpectrum:
    """Collective-mode frequencies for every k in ``k_grid`` (default 0..N-1).

    The per-k evaluations are independent; with ``workers > 1`` they run on a
    thread pool and are reassembled in grid order.
    """
    gc = _require_broken(params)
    energies = _require_uniform(params)
    omega = renormalized_frequency(params)
    if k_grid is None:
        k_grid = np.arange(len(energies))
    k_grid = np.asarray(k_grid, dtype=int)
    D0 = float(energies[0])
    jobs = [(float(energies[k]), D0, gc * gc, omega, int(k)) for k in k_grid]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda a: _branch_at(*a), jobs))
    else:
        rows = [_branch_at(*a) for a in jobs]
    return BranchSpectrum(k_grid, np.array(rows).reshape(len(k_grid), 3))


def amplitude_gaps(params: ModelParams) -> tuple[float, float]:
    """Closed-form zone-centre gaps (Delta_-, Delta_+) of the two amplitude branches."""
    gc = _require_broken(params)
    _require_uniform(params)
    omega = renormalized_frequency(params)
    D0 = params.basis.Delta0
    root = np.sqrt(omega**4 / 4.0 + 4.0 * gc**4)
    base = omega**2 / 2.0 + D0**2
    return float(np.sqrt(base - root)), float(np.sqrt(base + root))


def goldstone_slope(params: ModelParams) -> float:
    """Long-wavelength sound velocity of the Goldstone branch on a uniform NN chain.

    ``c_s = 2 g^2 sin(theta) sqrt(t Delta / (Delta^4 + 4 g^4 sin^2(theta)))`` with
    ``Delta = Delta_0`` and ``t = -(nearest-neighbour amplitude)``.
    """
    _require_broken(params)
    lat = params.lattice
    if not (lat.is_uniform_chain and lat.nn_amplitude <= 0.0):
        raise DomainError("goldstone_slope needs a uniform periodic nearest-neighbour chain")
    t = -lat.nn_amplitude
    D = params.basis.Delta0
    g = params.g
    st = float(np.sin(homogeneous_saddle_point(params).theta[0]))
    return float(2.0 * g * g * st * np.sqrt(t * D / (D**4 + 4.0 * g**4 * st * st)))


def oscillator_matrices(params: ModelParams, k_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Kinetic T and potential V of the three oscillators (x, y, z) before decoupling."""
    gc = _require_broken(params)
    energies = _require_uniform(params)
    Dk, D0 = float(energies[k_index]), float(energies[0])
    omega = renormalized_frequency(params)
    s = np.sqrt(D0 / Dk)
    v13 = -2.0 * gc * gc * np.sqrt(Dk / D0)
    V = np.array([[Dk * Dk, 0.0, v13], [0.0, Dk * Dk, 0.0], [v13, 0.0, omega * omega]])
    T = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, -s], [0.0, -s, 1.0]])
    return T, V


def symplectic_oracle(params: ModelParams, k_index: int) -> np.ndarray:
    """Mode frequencies from the eigenvalues of T V, independent of B(k).

    When V is positive definite the symmetric similarity ``V^1/2 T V^1/2`` is
    diagonalized; otherwise the non-symmetric product is used directly and a
    warning is issued.
    """
    T, V = oscillator_matrices(params, k_index)
    try:
        S = matrix_sqrt_spd(V)
    except ValueError:
        warnings.warn("V is not positive definite; using the non-symmetric product T V", RuntimeWarning)
        lam = np.real(np.linalg.eigvals(T @ V))
    else:
        lam = symmetric_eigen(S @ T @ S).values
    return _frequencies(lam, f"k={k_index} (oracle)")


def decoupling_transform_matrices(params: ModelParams, k_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Position map Q and momentum map P taking (q1, q2, q3) to the oscillator (x, y, z) variables.

    They satisfy ``Q^T P = I`` (the map is canonical), ``P^T T P = I`` and
    ``Q^T V Q = B(k)``.
    """
    fm = fluctuation_matrix(params, k_index)
    if fm.mu_minus == 0.0:
        raise DomainError("transform is non-invertible at the zone center (k=0)")
    a, b = np.sqrt(fm.mu_plus), np.sqrt(fm.mu_minus)
    r2 = np.sqrt(2.0)
    Q = np.array([[r2, 0.0, 0.0], [0.0, -a, b], [0.0, a, b]]) / r2
    P = np.array([[r2, 0.0, 0.0], [0.0, -1.0 / a, 1.0 / b], [0.0, 1.0 / a, 1.0 / b]]) / r2
    return Q, P


# name used by the public operation list
appendix_transform_matrices = decoupling_transform_matrices


def check_decoupling_transform(params: ModelParams, k_index: int) -> dict[str, float]:
    """Max-abs deviations of the three identities the transform must satisfy."""
    Q, P = decoupling_transform_matrices(params, k_index)
    T, V = oscillator_matrices(params, k_index)
    B = fluctuation_matrix(params, k_index).B
    eye = np.eye(3)
    return {
        "canonical": float(np.max(np.abs(Q.T @ P - eye))),
        "kinetic": float(np.max(np.abs(P.T @ T @ P - eye))),
        "potential": float(np.max(np.abs(Q.T @ V @ Q - B))),
    }


def continuum_dispersion(
    params: ModelParams,
    d: int,
    a: float,
    k_values,
    convention: str = "offset",
) -> BranchSpectrum:
    """Branch frequencies with the long-wavelength boson band.

    ``convention="offset"`` uses ``Delta_k = Delta - t d + t (k a)^2``;
    ``convention="lattice"`` drops the ``-t d`` offset, which is what the
    small-ka expansion of the discrete chain band gives in d = 1.  Here
    ``Delta`` and ``t`` are read off the uniform chain (band
    ``Delta + 2t(1 - cos)``).  The band minimum plays the role of Delta_0, so
    g_c and Omega are recomputed for the continuum band.
    """
    lat = params.lattice
    if not (lat.is_uniform_chain and lat.nn_amplitude <= 0.0):
        raise DomainError("continuum_dispersion needs a uniform nearest-neighbour chain")
    if convention not in ("offset", "lattice"):
        raise ValueError(f"unknown convention {convention!r}")
    t = -lat.nn_amplitude
    Delta = lat.onsite[0] - 2.0 * t
    offset = -t * d if convention == "offset" else 0.0
    k_values = np.asarray(k_values, dtype=float)
    Dk = Delta + offset + t * (k_values * a) ** 2
    D0 = Delta + offset
    if D0 <= 0.0 or np.min(Dk) <= 0.0:
        raise UnstableBosonSector(f"continuum band minimum {min(D0, np.min(Dk)):g} is not positive")
    # same arithmetic as the discrete path so ka = 0 reproduces it bit for bit
    gc = np.sqrt(D0 * params.omega_z / 2.0)
    if not params.g > gc:
        raise DomainError(f"g={params.g:g} is not above the continuum g_c={gc:g}")
    gc2 = gc * gc
    omega = params.omega_z * params.g**2 / gc**2
    rows = [_branch_at(float(dk), D0, gc2, omega, f"{kv:g}") for dk, kv in zip(Dk, k_values)]
    return BranchSpectrum(k_values, np.array(rows).reshape(len(k_values), 3))
