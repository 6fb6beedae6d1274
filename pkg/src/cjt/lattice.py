"""Boson tight-binding problem: hopping matrices, normal modes, dispersions.

Hopping amplitudes are stored exactly as they appear in the Hamiltonian, i.e.
as the off-diagonal matrix elements ``t_{j,l}``.  The familiar uniform chain
with band ``Delta + 2 t (1 - cos(2 pi k / N))`` therefore corresponds to
on-site energy ``Delta + 2 t`` and nearest-neighbour amplitude ``-t``; see
:func:`uniform_chain`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import UnstableBosonSector, ValidationError
from .numerics import symmetric_eigen

# Energies closer than this (relative) are treated as one degenerate level
# when ordering eigenvectors.
_DEGENERACY_RTOL = 1e-10


@dataclass(frozen=True)
class HoppingSpec:
    """Site energies plus either a periodic nearest-neighbour amplitude or an
    explicit symmetric hopping matrix (zero diagonal)."""

    onsite: tuple[float, ...]
    nn_amplitude: float | None = None
    matrix: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "onsite", tuple(float(x) for x in self.onsite))
        n = len(self.onsite)
        if n < 1:
            raise ValidationError("lattice needs at least one site")
        if (self.nn_amplitude is None) == (self.matrix is None):
            raise ValidationError("give exactly one of nn_amplitude or matrix")
        if self.nn_amplitude is not None:
            object.__setattr__(self, "nn_amplitude", float(self.nn_amplitude))
            return
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (n, n):
            raise ValidationError(f"hopping matrix must be {n}x{n}, got {m.shape}")
        if np.any(np.diag(m) != 0.0):
            raise ValidationError("hopping matrix must have zero diagonal")
        if not np.array_equal(m, m.T):
            raise ValidationError("hopping matrix must be symmetric")
        object.__setattr__(self, "matrix", tuple(tuple(float(x) for x in row) for row in m))

    @property
    def N(self) -> int:
        return len(self.onsite)

    @property
    def is_nn(self) -> bool:
        return self.nn_amplitude is not None

    @property
    def is_uniform_chain(self) -> bool:
        """Periodic NN chain with equal site energies (N >= 3 so the ring has two distinct neighbours)."""
        return self.is_nn and self.N >= 3 and len(set(self.onsite)) == 1

    @classmethod
    def nearest_neighbor(cls, N: int, onsite, t: float) -> "HoppingSpec":
        if np.isscalar(onsite):
            onsite = (float(onsite),) * N
        return cls(onsite=tuple(onsite), nn_amplitude=t)

    @classmethod
    def explicit(cls, onsite, matrix) -> "HoppingSpec":
        return cls(onsite=tuple(onsite), matrix=tuple(tuple(r) for r in np.asarray(matrix, float)))


def uniform_chain(N: int, Delta: float, t: float) -> HoppingSpec:
    """Periodic chain whose band is ``Delta + 2 t (1 - cos(2 pi k / N))``.

    The site energy is Delta plus t per distinct neighbour (two for N >= 3,
    one for N = 2, none for N = 1), so the uniform mode always sits at Delta.
    """
    neighbours = min(N - 1, 2)
    return HoppingSpec.nearest_neighbor(N, Delta + neighbours * t, -t)


@dataclass(frozen=True, eq=False)
class NormalModeBasis:
    """Rows of ``wavefunctions`` are the real orthonormal modes b_k; ``energies`` ascend."""

    wavefunctions: np.ndarray
    energies: np.ndarray

    @property
    def Delta0(self) -> float:
        return float(self.energies[0])


def build_hopping_matrix(spec: HoppingSpec) -> np.ndarray:
    """Dense hopping matrix: site energies on the diagonal, t_{j,l} off it.

    Periodic NN bonds are assigned, not accumulated, so N = 2 has a single bond.
    """
    n = spec.N
    m = np.diag(np.array(spec.onsite))
    if spec.is_nn:
        for j in range(n):
            l = (j + 1) % n
            if l != j:
                m[j, l] = m[l, j] = spec.nn_amplitude
    else:
        m = m + np.array(spec.matrix)
    return m


def analytic_nn_dispersion(Delta: float, t: float, N: int, k: int) -> float:
    """Band energy ``Delta + 2 t (1 - cos(2 pi k / N))`` of the uniform periodic chain."""
    if Delta <= 0.0 or Delta + 4.0 * t <= 0.0:
        raise UnstableBosonSector(
            f"band min(Delta, Delta + 4t) = {min(Delta, Delta + 4 * t):g} is not positive"
        )
    return Delta + 2.0 * t * (1.0 - np.cos(2.0 * np.pi * k / N))


def _fix_sign(vectors: np.ndarray) -> np.ndarray:
    """Make the first non-negligible component of every row positive."""
    out = vectors.copy()
    for row in out:
        idx = np.flatnonzero(np.abs(row) > 1e-12)
        if idx.size and row[idx[0]] < 0:
            row *= -1.0
    return out


def _sort_modes(energies: np.ndarray, vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending energies; inside a degenerate cluster, lexicographic row order."""
    order = np.argsort(energies, kind="stable")
    energies, vectors = energies[order], vectors[order]
    scale = max(1.0, float(np.max(np.abs(energies))))
    out = []
    start = 0
    n = len(energies)
    while start < n:
        stop = start + 1
        while stop < n and energies[stop] - energies[stop - 1] <= _DEGENERACY_RTOL * scale:
            stop += 1
        block = list(range(start, stop))
        # round away last-bit noise so the ordering is stable
        block.sort(key=lambda i: tuple(np.round(vectors[i], 12)))
        out.extend(block)
        start = stop
    out = np.array(out)
    return energies[out], vectors[out]


def _fourier_modes(spec: HoppingSpec) -> tuple[np.ndarray, np.ndarray]:
    n = spec.N
    eps = spec.onsite[0]
    t = spec.nn_amplitude
    j = np.arange(n)
    energies = []
    rows = []
    energies.append(eps + 2.0 * t)
    rows.append(np.full(n, 1.0 / np.sqrt(n)))
    for k in range(1, (n - 1) // 2 + 1):
        e = eps + 2.0 * t * np.cos(2.0 * np.pi * k / n)
        phase = 2.0 * np.pi * k * j / n
        energies += [e, e]
        rows.append(np.sqrt(2.0 / n) * np.cos(phase))
        rows.append(np.sqrt(2.0 / n) * np.sin(phase))
    if n % 2 == 0:
        energies.append(eps - 2.0 * t)
        rows.append((-1.0) ** j / np.sqrt(n))
    return np.array(energies), np.array(rows)


def normal_modes(spec: HoppingSpec) -> NormalModeBasis:
    """Diagonalize the hopping matrix.

    Uniform periodic chains use the closed-form real Fourier modes; anything
    else goes through a dense symmetric eigensolver.  Modes are sorted by
    energy (lexicographically by wavefunction within a degenerate level) and
    each wavefunction has its first nonzero component positive.

    Raises
    ------
    UnstableBosonSector
        If any mode energy is not strictly positive.
    """
    return _normal_modes_cached(spec)


@lru_cache(maxsize=64)
def _normal_modes_cached(spec: HoppingSpec) -> NormalModeBasis:
    if spec.is_uniform_chain:
        energies, rows = _fourier_modes(spec)
    else:
        res = symmetric_eigen(build_hopping_matrix(spec))
        energies, rows = res.values, res.vectors.T
    rows = _fix_sign(rows)
    energies, rows = _sort_modes(energies, rows)
    if energies[0] <= 0.0:
        raise UnstableBosonSector(f"lowest boson mode energy {energies[0]:g} is not positive")
    rows.setflags(write=False)
    energies.setflags(write=False)
    return NormalModeBasis(rows, energies)


def band_energies(spec: HoppingSpec) -> np.ndarray:
    """Mode energies indexed by the label used for dispersion tables.

    For a uniform periodic chain the label is the Fourier index k = 0..N-1
    (wavenumber 2 pi k / N); otherwise it is the ascending normal-mode index.
    """
    if spec.is_uniform_chain:
        k = np.arange(spec.N)
        energies = spec.onsite[0] + 2.0 * spec.nn_amplitude * np.cos(2.0 * np.pi * k / spec.N)
        if np.min(energies) <= 0.0:
            raise UnstableBosonSector(f"lowest boson mode energy {np.min(energies):g} is not positive")
        return energies
    return np.array(normal_modes(spec).energies)


def staggered_transform(spec: HoppingSpec) -> HoppingSpec:
    """Apply t_{j,l} -> (-1)^(j-l) t_{j,l}; site energies are untouched.

    Even periodic chains stay nearest-neighbour with the amplitude negated.  On
    odd rings the wrap-around bond keeps its sign, so the result is returned
    as an explicit matrix.
    """
    if spec.is_nn:
        if spec.N % 2 == 0 or spec.N <= 2:
            return replace(spec, nn_amplitude=-spec.nn_amplitude)
        m = build_hopping_matrix(spec) - np.diag(spec.onsite)
    else:
        m = np.array(spec.matrix)
    j = np.arange(spec.N)
    signs = (-1.0) ** np.abs(j[:, None] - j[None, :])
    return HoppingSpec.explicit(spec.onsite, m * signs)


def coupling_matrix_J(g: float, basis: NormalModeBasis) -> np.ndarray:
    """Effective spin-spin coupling J = 2 g^2 W^T diag(1/Delta_k) W."""
    w = basis.wavefunctions
    j = 2.0 * g * g * (w.T / basis.energies) @ w
    return 0.5 * (j + j.T)


def is_translation_invariant(spec: HoppingSpec) -> bool:
    """True when the uniform vector is the lowest normal mode (closed-form saddle applies)."""
    if spec.is_uniform_chain:
        return spec.nn_amplitude <= 0.0
    m = build_hopping_matrix(spec)
    rows = m.sum(axis=1)
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.ptp(rows) > 1e-12 * scale:
        return False
    return abs(rows[0] - normal_modes(spec).Delta0) <= 1e-12 * scale
