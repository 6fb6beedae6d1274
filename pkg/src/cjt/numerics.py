"""Small dense numerical kernels used throughout the package.

Everything here is deterministic: identical inputs give bit-identical outputs
on one platform.  The cyclic Jacobi solver handles the small matrices that make
up the bulk of the work (3x3 fluctuation matrices, short lattices); larger
matrices, which only arise in exact diagonalization, are handed to LAPACK.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, ValidationError

# Above this size the O(n^3)-per-sweep Python loop of Jacobi gets slow.
JACOBI_MAX_DIM = 64


@dataclass(frozen=True, eq=False)
class EigenResult:
    """Ascending eigenvalues and the matching orthonormal eigenvectors (columns)."""

    values: np.ndarray
    vectors: np.ndarray


def _check_square(a: np.ndarray) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")


def jacobi_eigen(a, tol: float = 1e-14, max_sweeps: int = 100) -> EigenResult:
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    Sweeps visit the pairs (p, q), p < q, in row-major order and zero each
    off-diagonal element with one plane rotation.  Iteration stops once the
    Frobenius norm of the off-diagonal part drops to ``tol * ||A||_F``.

    Parameters
    ----------
    a : array_like
        Symmetric matrix. It is symmetrized as ``(A + A.T) / 2`` first.
    tol : float
        Relative off-diagonal threshold.
    max_sweeps : int
        Sweep budget; exceeding it raises :class:`ConvergenceError`.
    """
    a = np.array(a, dtype=float)
    _check_square(a)
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return EigenResult(np.diag(a).copy(), v)

    mask = ~np.eye(n, dtype=bool)

    def off_norm() -> float:
        return float(np.linalg.norm(a[mask]))

    for _ in range(max_sweeps):
        if off_norm() <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                g = 100.0 * abs(apq)
                # below rounding of both diagonal entries: drop instead of rotating
                if abs(a[p, p]) + g == abs(a[p, p]) and abs(a[q, q]) + g == abs(a[q, q]):
                    a[p, q] = a[q, p] = 0.0
                    continue
                h = a[q, q] - a[p, p]
                if abs(h) + g == abs(h):
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        if off_norm() > tol * scale:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps", off_norm())

    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    return EigenResult(values[order], v[:, order])


def symmetric_eigen(a) -> EigenResult:
    """Eigen-decomposition of a real symmetric matrix, ascending.

    Matrices up to ``JACOBI_MAX_DIM`` go through :func:`jacobi_eigen`; larger
    ones use LAPACK ``eigh``.
    """
    a = np.asarray(a, dtype=float)
    _check_square(a)
    asym = np.max(np.abs(a - a.T)) if a.size else 0.0
    if asym > 1e-12 * max(1.0, float(np.max(np.abs(a))) if a.size else 1.0):
        raise ValidationError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    a = 0.5 * (a + a.T)
    if a.shape[0] <= JACOBI_MAX_DIM:
        return jacobi_eigen(a)
    values, vectors = np.linalg.eigh(a)
    return EigenResult(values, vectors)


def hermitian_eigen(a) -> EigenResult:
    """Eigen-decomposition of a complex Hermitian matrix, ascending.

    Small matrices use the real embedding ``[[Re, -Im], [Im, Re]]`` of size 2n,
    whose spectrum is the Hermitian one with every eigenvalue doubled. Each
    doubled cluster is collapsed back onto its complex eigenspace by an SVD of
    the recombined vectors ``u + i w``.
    """
    a = np.asarray(a, dtype=complex)
    _check_square(a)
    n = a.shape[0]
    asym = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if asym > 1e-12 * max(1.0, float(np.max(np.abs(a))) if a.size else 1.0):
        raise ValidationError(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    a = 0.5 * (a + a.conj().T)
    if not np.any(a.imag):
        res = symmetric_eigen(a.real)
        return EigenResult(res.values, res.vectors.astype(complex))
    if 2 * n > JACOBI_MAX_DIM:
        values, vectors = np.linalg.eigh(a)
        return EigenResult(values, vectors)

    embed = np.block([[a.real, -a.imag], [a.imag, a.real]])
    res = jacobi_eigen(embed)
    lam, u = res.values, res.vectors
    z = u[:n, :] + 1j * u[n:, :]
    scale = max(1.0, float(np.max(np.abs(lam))))

    values = np.empty(n)
    vectors = np.empty((n, n), dtype=complex)
    start = 0
    out = 0
    while start < 2 * n:
        stop = start + 1
        while stop < 2 * n and lam[stop] - lam[stop - 1] <= 1e-10 * scale:
            stop += 1
        m = (stop - start) // 2
        if (stop - start) % 2:
            raise ConvergenceError("unpaired eigenvalue in Hermitian embedding")
        basis, _, _ = np.linalg.svd(z[:, start:stop], full_matrices=False)
        values[out:out + m] = lam[start:stop:2]
        vectors[:, out:out + m] = basis[:, :m]
        out += m
        start = stop
    return EigenResult(values, vectors)


def matrix_sqrt_spd(a) -> np.ndarray:
    """Symmetric square root of a symmetric positive-definite matrix."""
    res = symmetric_eigen(a)
    if res.values[0] <= 0.0:
        raise ValidationError(
            f"matrix is not positive definite (min eigenvalue {res.values[0]:.3e})"
        )
    v = res.vectors
    s = (v * np.sqrt(res.values)) @ v.T
    return 0.5 * (s + s.T)


@dataclass(frozen=True, eq=False)
class MinimizeResult:
    x: np.ndarray
    fun: float
    converged: bool
    n_eval: int

    def __iter__(self):
        # unpacks as (x, fun)
        return iter((self.x, self.fun))


def nelder_mead_min(
    f: Callable[[np.ndarray], float],
    x0,
    tol: float = 1e-10,
    max_eval: int = 20000,
    step: float = 0.1,
) -> MinimizeResult:
    """Derivative-free simplex minimization.

    Uses reflection 1, expansion 2, contraction 0.5 and shrink 0.5.  Stops when
    the simplex diameter (largest vertex distance from the best vertex) is at
    most ``tol``.  When ``max_eval`` runs out the best vertex so far is
    returned with ``converged=False``.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    dim = x0.size
    n_eval = 0

    def feval(x):
        nonlocal n_eval
        n_eval += 1
        return float(f(x))

    simplex = [x0.copy()]
    for i in range(dim):
        x = x0.copy()
        x[i] += step
        simplex.append(x)
    values = [feval(x) for x in simplex]

    converged = False
    while True:
        order = sorted(range(dim + 1), key=lambda i: values[i])
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        diameter = max(np.linalg.norm(x - simplex[0]) for x in simplex[1:]) if dim else 0.0
        if diameter <= tol:
            converged = True
            break
        if n_eval >= max_eval:
            break

        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = centroid + (centroid - worst)
        fr = feval(xr)
        if values[0] <= fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[0]:
            xe = centroid + 2.0 * (xr - centroid)
            fe = feval(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = centroid + 0.5 * (xr - centroid)
            fc = feval(xc)
            accept = fc <= fr
        else:
            xc = centroid + 0.5 * (worst - centroid)
            fc = feval(xc)
            accept = fc < values[-1]
        if accept:
            simplex[-1], values[-1] = xc, fc
            continue
        best = simplex[0]
        for i in range(1, dim + 1):
            simplex[i] = best + 0.5 * (simplex[i] - best)
            values[i] = feval(simplex[i])

    return MinimizeResult(simplex[0].copy(), values[0], converged, n_eval)


def rk4_step(rhs: Callable[[np.ndarray], np.ndarray], state: np.ndarray, dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of the autonomous system y' = rhs(y)."""
    k1 = rhs(state)
    k2 = rhs(state + 0.5 * dt * k1)
    k3 = rhs(state + 0.5 * dt * k2)
    k4 = rhs(state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
