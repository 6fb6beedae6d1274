"""Classical (saddle-point) treatment of the cooperative Jahn-Teller lattice.

Spins are unit Bloch vectors parametrized by polar/azimuthal angles, bosons
are complex mode amplitudes ``alpha_{r,k}``, ``alpha_{l,k}`` in the normal-mode
basis of the hopping problem.  The classical energy is

    E = sum_{gamma,k} Delta_k |alpha_{gamma,k}|^2 + (omega_z / 2) sum_j cos(theta_j)
        + g sum_j sin(theta_j) Re[e^{i phi_j} (A_{r,j} + conj(A_{l,j}))],

with ``A_{gamma,j} = sum_k b_{k,j} alpha_{gamma,k}`` the site-space fields.

:func:`evolve_classical` integrates the *real-time* equations of motion
generated by this energy (the Wick-rotated counterpart of the imaginary-time
saddle-point equations).  Real time is used because it is the setting in
which energy and the U(1) charge are conserved, which is what the dynamics
are tested against.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConvergenceError, ValidationError
from .lattice import (
    HoppingSpec,
    NormalModeBasis,
    coupling_matrix_J,
    is_translation_invariant,
    normal_modes,
    uniform_chain,
)
from .numerics import rk4_step

# Relative distance from g_c inside which phases are classified by sign alone.
NEAR_CRITICAL_RTOL = 1e-6


class Phase(str, enum.Enum):
    NORMAL = "Normal"
    BROKEN = "Broken"


@dataclass(frozen=True)
class ModelParams:
    omega_z: float
    g: float
    lattice: HoppingSpec

    def __post_init__(self):
        if not self.omega_z > 0.0:
            raise ValidationError(f"omega_z must be positive, got {self.omega_z}")
        if not self.g >= 0.0:
            raise ValidationError(f"g must be non-negative, got {self.g}")

    @classmethod
    def chain(cls, Delta: float, t: float, omega_z: float, g: float, N: int) -> "ModelParams":
        """Uniform periodic chain with band Delta + 2t(1 - cos(2 pi k/N))."""
        return cls(omega_z=omega_z, g=g, lattice=uniform_chain(N, Delta, t))

    @cached_property
    def basis(self) -> NormalModeBasis:
        return normal_modes(self.lattice)

    @property
    def N(self) -> int:
        return self.lattice.N


@dataclass(frozen=True, eq=False)
class MeanFieldState:
    theta: np.ndarray
    phi: np.ndarray
    alpha_r: np.ndarray
    alpha_l: np.ndarray
    phase: Phase
    rho_bar: float
    diagnostic: str | None = None

    @property
    def bloch(self) -> np.ndarray:
        """Per-site Bloch vectors, shape (N, 3)."""
        st = np.sin(self.theta)
        return np.stack([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)], axis=1)


@dataclass(frozen=True, eq=False)
class BlochTrajectory:
    times: np.ndarray
    n: np.ndarray  # (steps + 1, N, 3)
    alpha_r: np.ndarray  # (steps + 1, N)
    alpha_l: np.ndarray


def critical_coupling(params: ModelParams) -> float:
    """g_c = sqrt(Delta_0 omega_z / 2)."""
    return float(np.sqrt(params.basis.Delta0 * params.omega_z / 2.0))


def _state_from_angles(params: ModelParams, theta, phi, diagnostic=None) -> MeanFieldState:
    theta = np.asarray(theta, dtype=float)
    phi = np.mod(np.asarray(phi, dtype=float), 2.0 * np.pi)
    alpha_r, alpha_l = boson_amplitudes(params, theta, phi)
    broken = np.max(np.abs(np.sin(theta))) > 1e-8
    rho = float(abs(alpha_r[0]) ** 2 / params.N)
    return MeanFieldState(
        theta=theta,
        phi=phi,
        alpha_r=alpha_r,
        alpha_l=alpha_l,
        phase=Phase.BROKEN if broken else Phase.NORMAL,
        rho_bar=rho,
        diagnostic=diagnostic,
    )


def normal_state(params: ModelParams) -> MeanFieldState:
    """Trivial branch: every spin down, no condensate."""
    n = params.N
    return MeanFieldState(
        theta=np.full(n, np.pi),
        phi=np.zeros(n),
        alpha_r=np.zeros(n, dtype=complex),
        alpha_l=np.zeros(n, dtype=complex),
        phase=Phase.NORMAL,
        rho_bar=0.0,
    )


def boson_amplitudes(params: ModelParams, theta, phi) -> tuple[np.ndarray, np.ndarray]:
    """Stationary mode amplitudes slaved to a spin configuration."""
    b = params.basis
    st = np.sin(theta)
    pref = -params.g / (2.0 * b.energies)
    alpha_r = pref * (b.wavefunctions @ (st * np.exp(-1j * phi)))
    alpha_l = pref * (b.wavefunctions @ (st * np.exp(1j * phi)))
    return alpha_r, alpha_l


def homogeneous_saddle_point(params: ModelParams) -> MeanFieldState:
    """Closed-form uniform saddle point with the azimuth fixed to zero.

    Below g_c every spin points down and there is no condensate.  Above it
    ``cos(theta) = -g_c^2 / g^2`` and only the k = 0 mode condenses, with
    ``alpha_{r,0} = alpha_{l,0} = -(g sqrt(N) / 2 Delta_0) sin(theta)``.

    Raises
    ------
    ValidationError
        If the lattice is not translation invariant; use
        :func:`general_saddle_point` for those.
    """
    if not is_translation_invariant(params.lattice):
        raise ValidationError(
            "lattice is not translation invariant; use general_saddle_point instead"
        )
    gc = critical_coupling(params)
    g = params.g
    if g <= gc:
        return normal_state(params)
    cos_t = -(gc * gc) / (g * g)
    sin_t = np.sqrt((1.0 - cos_t) * (1.0 + cos_t))
    n = params.N
    Delta0 = params.basis.Delta0
    a0 = -(g * np.sqrt(n) / (2.0 * Delta0)) * sin_t
    alpha = np.zeros(n, dtype=complex)
    alpha[0] = a0
    return MeanFieldState(
        theta=np.full(n, np.arccos(cos_t)),
        phi=np.zeros(n),
        alpha_r=alpha,
        alpha_l=alpha.copy(),
        phase=Phase.BROKEN,
        rho_bar=float((g / (2.0 * Delta0)) ** 2 * sin_t * sin_t),
    )


def classical_energy(params: ModelParams, state: MeanFieldState) -> float:
    b = params.basis
    w = b.wavefunctions
    e_boson = float(np.sum(b.energies * (np.abs(state.alpha_r) ** 2 + np.abs(state.alpha_l) ** 2)))
    e_spin = 0.5 * params.omega_z * float(np.sum(np.cos(state.theta)))
    site_field = w.T @ state.alpha_r + w.T @ np.conj(state.alpha_l)
    e_int = params.g * float(np.sum(np.sin(state.theta) * np.real(np.exp(1j * state.phi) * site_field)))
    return e_boson + e_spin + e_int


def saddle_residual(params: ModelParams, state: MeanFieldState) -> float:
    """Max-norm violation of the stationarity conditions.

    Stacks the spin conditions
    ``omega_z sin(theta_j) + cos(theta_j) sum_l J_jl sin(theta_l) cos(phi_j - phi_l)``,
    ``sum_l J_jl sin(theta_l) sin(phi_j - phi_l)``
    and the mismatch between the stored amplitudes and those slaved to the spins.
    """
    J = coupling_matrix_J(params.g, params.basis)
    st, ct = np.sin(state.theta), np.cos(state.theta)
    dphi = state.phi[:, None] - state.phi[None, :]
    r1 = params.omega_z * st + ct * np.sum(J * st[None, :] * np.cos(dphi), axis=1)
    r2 = np.sum(J * st[None, :] * np.sin(dphi), axis=1)
    ar, al = boson_amplitudes(params, state.theta, state.phi)
    r3 = np.abs(state.alpha_r - ar)
    r4 = np.abs(state.alpha_l - al)
    return float(max(np.max(np.abs(r1)), np.max(np.abs(r2)), np.max(r3), np.max(r4)))


def general_saddle_point(
    params: ModelParams,
    init: MeanFieldState | None = None,
    tol: float = 1e-11,
    max_iter: int = 20000,
    damping: float = 0.5,
) -> MeanFieldState:
    """Damped local-field iteration for site-dependent saddle points.

    Each sweep builds the complex local field ``H_j = sum_l J_jl sin(theta_l) e^{i phi_l}``
    and turns every spin towards the stationary orientation
    ``(Re H_j, Im H_j, -omega_z) / norm``; angles move a fraction ``damping``
    of the way.  The azimuth of site 0 is pinned to zero.  The converged
    state is compared with the trivial branch and the lower-energy one is
    returned; if the iteration lands on a higher-energy saddle, the trivial
    state comes back with ``diagnostic`` set.

    Raises
    ------
    ConvergenceError
        If the residual is still above ``tol`` after ``max_iter`` sweeps.
    """
    trivial = normal_state(params)
    if params.g == 0.0:
        return trivial
    if init is None:
        init = _state_from_angles(params, np.full(params.N, np.pi - 0.1), np.zeros(params.N))
    J = coupling_matrix_J(params.g, params.basis)
    theta = np.array(init.theta, dtype=float)
    phi = np.array(init.phi, dtype=float)
    wz = params.omega_z

    def gauge(th, ph):
        if abs(np.sin(th[0])) > 1e-12:
            ph = ph - ph[0]
        return np.mod(ph, 2.0 * np.pi)

    phi = gauge(theta, phi)
    residual = np.inf
    for _ in range(max_iter):
        state = _state_from_angles(params, theta, phi)
        residual = saddle_residual(params, state)
        if residual <= tol:
            break
        h = J @ (np.sin(theta) * np.exp(1j * phi))
        habs = np.abs(h)
        theta_map = np.arctan2(habs, -wz)
        phi_map = np.where(habs > 0.0, np.angle(h), phi)
        theta = (1.0 - damping) * theta + damping * theta_map
        dphi = np.angle(np.exp(1j * (phi_map - phi)))
        phi = gauge(theta, phi + damping * dphi)
    else:
        raise ConvergenceError(
            f"saddle-point iteration did not converge in {max_iter} sweeps "
            f"(residual {residual:.3e})",
            residual,
        )

    if classical_energy(params, state) > classical_energy(params, trivial):
        return MeanFieldState(
            theta=trivial.theta,
            phi=trivial.phi,
            alpha_r=trivial.alpha_r,
            alpha_l=trivial.alpha_l,
            phase=trivial.phase,
            rho_bar=0.0,
            diagnostic="converged saddle lies above the trivial branch; returned trivial state",
        )
    return state


def solve_saddle_point(params: ModelParams, **kwargs) -> MeanFieldState:
    """Closed form when the lattice allows it, otherwise the general solver."""
    if is_translation_invariant(params.lattice):
        return homogeneous_saddle_point(params)
    return general_saddle_point(params, **kwargs)


# -- real-time classical dynamics ------------------------------------------


def _site_fields(w: np.ndarray, alpha_r, alpha_l):
    return w.T @ alpha_r, w.T @ alpha_l


def effective_field(params: ModelParams, alpha_r, alpha_l) -> np.ndarray:
    """Per-site boson field [Re(A_r + A_l), Im(A_l - A_r), 0] seen by the spins."""
    ar, al = _site_fields(params.basis.wavefunctions, alpha_r, alpha_l)
    return np.stack([np.real(ar + al), np.imag(al - ar), np.zeros(params.N)], axis=1)


def dynamics_energy(params: ModelParams, n: np.ndarray, alpha_r, alpha_l) -> float:
    """Classical energy in Bloch-vector form (valid off the unit sphere too)."""
    b = params.basis
    e_boson = float(np.sum(b.energies * (np.abs(alpha_r) ** 2 + np.abs(alpha_l) ** 2)))
    field = effective_field(params, alpha_r, alpha_l)
    return e_boson + 0.5 * params.omega_z * float(np.sum(n[:, 2])) + params.g * float(np.sum(n * field))


def classical_charge(n: np.ndarray, alpha_r, alpha_l) -> float:
    """C_cl = sum_k (|alpha_r|^2 - |alpha_l|^2) + sum_j n_z / 2."""
    return float(np.sum(np.abs(alpha_r) ** 2 - np.abs(alpha_l) ** 2) + 0.5 * np.sum(n[:, 2]))


def _pack(n, alpha_r, alpha_l) -> np.ndarray:
    return np.concatenate([n.ravel(), alpha_r.real, alpha_r.imag, alpha_l.real, alpha_l.imag])


def _unpack(y: np.ndarray, N: int):
    n = y[: 3 * N].reshape(N, 3)
    o = 3 * N
    ar = y[o:o + N] + 1j * y[o + N:o + 2 * N]
    al = y[o + 2 * N:o + 3 * N] + 1j * y[o + 3 * N:o + 4 * N]
    return n, ar, al


def evolve_classical(
    params: ModelParams,
    n0: np.ndarray,
    alpha_r0,
    alpha_l0,
    dt: float,
    steps: int,
) -> BlochTrajectory:
    """RK4 integration of the real-time saddle-point dynamics.

    Equations::

        dn_j/dt = (omega_z z_hat + 2 g a_j) x n_j
        i dalpha_{r,k}/dt = Delta_k alpha_{r,k} + (g/2) sum_j b_{k,j} (n_{x,j} - i n_{y,j})
        i dalpha_{l,k}/dt = Delta_k alpha_{l,k} + (g/2) sum_j b_{k,j} (n_{x,j} + i n_{y,j})

    where ``a_j`` is :func:`effective_field`.  Bloch vectors are not
    renormalized between steps.
    """
    N = params.N
    b = params.basis
    w = b.wavefunctions
    wz, g = params.omega_z, params.g
    zhat = np.array([0.0, 0.0, 1.0])

    def rhs(y):
        n, ar, al = _unpack(y, N)
        field = wz * zhat + 2.0 * g * effective_field(params, ar, al)
        dn = np.cross(field, n)
        nm = w @ (n[:, 0] - 1j * n[:, 1])
        npl = w @ (n[:, 0] + 1j * n[:, 1])
        dar = -1j * (b.energies * ar + 0.5 * g * nm)
        dal = -1j * (b.energies * al + 0.5 * g * npl)
        return _pack(dn, dar, dal)

    y = _pack(np.asarray(n0, float), np.asarray(alpha_r0, complex), np.asarray(alpha_l0, complex))
    ys = np.empty((steps + 1, y.size))
    ys[0] = y
    for i in range(steps):
        y = rk4_step(rhs, y, dt)
        ys[i + 1] = y
    n_t = ys[:, : 3 * N].reshape(steps + 1, N, 3)
    o = 3 * N
    ar_t = ys[:, o:o + N] + 1j * ys[:, o + N:o + 2 * N]
    al_t = ys[:, o + 2 * N:o + 3 * N] + 1j * ys[:, o + 3 * N:o + 4 * N]
    return BlochTrajectory(np.arange(steps + 1) * dt, n_t, ar_t, al_t)
