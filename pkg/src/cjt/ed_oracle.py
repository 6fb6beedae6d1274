"""Exact diagonalization of the full quantum Hamiltonian on a few sites.

Basis layout (fixed so that state-vector fixtures are portable): site-major;
within a site the spin index comes first (0 = up, 1 = down), followed by the
occupation pair of the two boson modes, the first mode (x or r) being the
slower index.

Two truncation schemes are available.  ``"total"`` keeps the two-mode
states with ``n1 + n2 <= n_max`` on every site; ``"box"`` keeps
``n1, n2 <= n_max`` independently.  The Cartesian (x, y) and chiral (r, l)
modes are related by a number-conserving two-mode rotation, which maps the
``total`` space onto itself, so both builders then describe the same
truncated operator and their spectra coincide.  The ``box`` space is not
invariant under that rotation and the two spectra only agree as n_max grows.
In both schemes the charge operator is diagonal in the chiral occupation
basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import factorial

import numpy as np

from .errors import BudgetError, ConvergenceError, ValidationError
from .lattice import build_hopping_matrix
from .meanfield import ModelParams
from .numerics import hermitian_eigen

DEFAULT_MAX_DIM = 8000

_SX = np.array([[0.0, 1.0], [1.0, 0.0]])
_SY = np.array([[0.0, -1j], [1j, 0.0]])
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
_SP = np.array([[0.0, 1.0], [0.0, 0.0]])  # |down> -> |up>


@dataclass(frozen=True)
class TruncationSpec:
    n_max: int
    N_sites: int = 1
    scheme: str = "total"
    max_dim: int = DEFAULT_MAX_DIM

    def __post_init__(self):
        if self.n_max < 0:
            raise ValidationError("n_max must be >= 0")
        if self.N_sites not in (1, 2, 3):
            raise ValidationError("N_sites must be 1, 2 or 3")
        if self.scheme not in ("total", "box"):
            raise ValidationError(f"unknown truncation scheme {self.scheme!r}")

    @property
    def pairs(self) -> list[tuple[int, int]]:
        """Retained occupation pairs (n1, n2) of one site, in basis order."""
        n = self.n_max
        if self.scheme == "box":
            return [(a, b) for a in range(n + 1) for b in range(n + 1)]
        return [(a, b) for a in range(n + 1) for b in range(n + 1 - a)]

    @property
    def local_dim(self) -> int:
        return 2 * len(self.pairs)

    @property
    def dim(self) -> int:
        return self.local_dim**self.N_sites

    def check_budget(self) -> None:
        if self.dim > self.max_dim:
            raise BudgetError(
                f"Hilbert space dimension {self.dim} exceeds the budget of {self.max_dim}"
            )


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    energies: np.ndarray
    charge_values: np.ndarray
    cutoff_used: TruncationSpec


def _local_ladders(trunc: TruncationSpec) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation operators of mode 1 and mode 2 on the retained pair space."""
    pairs = trunc.pairs
    index = {p: i for i, p in enumerate(pairs)}
    nb = len(pairs)
    a1 = np.zeros((nb, nb))
    a2 = np.zeros((nb, nb))
    for i, (n1, n2) in enumerate(pairs):
        if n1 > 0:
            a1[index[(n1 - 1, n2)], i] = np.sqrt(n1)
        if n2 > 0:
            a2[index[(n1, n2 - 1)], i] = np.sqrt(n2)
    return a1, a2


def _embed(op: np.ndarray, site: int, trunc: TruncationSpec) -> np.ndarray:
    eye = np.eye(trunc.local_dim)
    factors = [op if s == site else eye for s in range(trunc.N_sites)]
    return reduce(np.kron, factors)


def _site_ops(trunc: TruncationSpec):
    """Spin and boson operators of every site, embedded in the full space."""
    a1, a2 = _local_ladders(trunc)
    nb = a1.shape[0]
    ib, i2 = np.eye(nb), np.eye(2)
    local = {
        "sx": np.kron(_SX, ib),
        "sy": np.kron(_SY, ib),
        "sz": np.kron(_SZ, ib),
        "sp": np.kron(_SP, ib),
        "a1": np.kron(i2, a1),
        "a2": np.kron(i2, a2),
    }
    return [{k: _embed(v, s, trunc) for k, v in local.items()} for s in range(trunc.N_sites)]


def _prepare(params: ModelParams, trunc: TruncationSpec):
    if params.N != trunc.N_sites:
        raise ValidationError(f"lattice has {params.N} sites but truncation has {trunc.N_sites}")
    trunc.check_budget()
    return build_hopping_matrix(params.lattice), _site_ops(trunc)


def _tight_binding(M: np.ndarray, ops, mode: str) -> np.ndarray:
    n = len(ops)
    H = 0.0
    for j in range(n):
        for l in range(n):
            if M[j, l] != 0.0:
                H = H + M[j, l] * (ops[j][mode].conj().T @ ops[l][mode])
    return H


def build_hamiltonian(params: ModelParams, trunc: TruncationSpec) -> np.ndarray:
    """Hamiltonian in the Cartesian (x, y) boson basis.

    ``H = (omega_z/2) sum sigma_z + sum_eps sum_jl M_jl a+_{eps,j} a_{eps,l}
    + (g/sqrt2) sum_j [sigma_x (a_x + a_x+) + sigma_y (a_y + a_y+)]``.
    """
    M, ops = _prepare(params, trunc)
    dim = trunc.dim
    H = np.zeros((dim, dim), dtype=complex)
    for o in ops:
        H += 0.5 * params.omega_z * o["sz"]
    H += _tight_binding(M, ops, "a1") + _tight_binding(M, ops, "a2")
    c = params.g / np.sqrt(2.0)
    for o in ops:
        ax, ay = o["a1"], o["a2"]
        H += c * (o["sx"] @ (ax + ax.T) + o["sy"] @ (ay + ay.T))
    return 0.5 * (H + H.conj().T)


def build_hamiltonian_chiral(params: ModelParams, trunc: TruncationSpec) -> np.ndarray:
    """Hamiltonian in the chiral (r, l) basis; real in the occupation basis.

    ``H_I = g sum_j [sigma+ (a_r + a_l+) + sigma- (a_r+ + a_l)]``.
    """
    M, ops = _prepare(params, trunc)
    dim = trunc.dim
    H = np.zeros((dim, dim))
    for o in ops:
        H += 0.5 * params.omega_z * o["sz"].real
    H += _tight_binding(M, ops, "a1") + _tight_binding(M, ops, "a2")
    for o in ops:
        sp, ar, al = o["sp"], o["a1"], o["a2"]
        term = sp @ (ar + al.T)
        H += params.g * (term + term.T)
    return 0.5 * (H + H.T)


def charge_operator(trunc: TruncationSpec) -> np.ndarray:
    """C = sum_j (n_r - n_l + sigma_z / 2), diagonal in the chiral layout."""
    trunc.check_budget()
    pairs = np.array(trunc.pairs)
    local = np.concatenate([0.5 + pairs[:, 0] - pairs[:, 1], -0.5 + pairs[:, 0] - pairs[:, 1]])
    total = np.zeros(1)
    for _ in range(trunc.N_sites):
        total = (total[:, None] + local[None, :]).ravel()
    return np.diag(total)


def symmetry_rotation(phi: float, trunc: TruncationSpec) -> np.ndarray:
    """R(phi) = exp(i phi C); diagonal because C is."""
    return np.diag(np.exp(1j * phi * np.diag(charge_operator(trunc))))


def interior_mask(trunc: TruncationSpec) -> np.ndarray:
    """Basis states that stay inside the space under one more boson creation on any mode."""
    pairs = trunc.pairs
    if trunc.scheme == "box":
        ok = np.array([max(p) <= trunc.n_max - 1 for p in pairs])
    else:
        ok = np.array([sum(p) <= trunc.n_max - 1 for p in pairs])
    local = np.concatenate([ok, ok])
    mask = np.ones(1, dtype=bool)
    for _ in range(trunc.N_sites):
        mask = (mask[:, None] & local[None, :]).ravel()
    return mask


def chiral_basis_change(trunc: TruncationSpec) -> np.ndarray:
    """Unitary whose columns are the chiral Fock states written in the Cartesian basis.

    Built by acting with ``a_r+ = (a_x+ + i a_y+)/sqrt2`` and
    ``a_l+ = (a_x+ - i a_y+)/sqrt2`` on the vacuum, so
    ``U^dagger H_cartesian U = H_chiral``.  Needs the ``total`` scheme.
    """
    if trunc.scheme != "total":
        raise ValidationError("the chiral basis change is exact only for the 'total' truncation")
    trunc.check_budget()
    ax, ay = _local_ladders(trunc)
    ar_dag = (ax.T + 1j * ay.T) / np.sqrt(2.0)
    al_dag = (ax.T - 1j * ay.T) / np.sqrt(2.0)
    pairs = trunc.pairs
    nb = len(pairs)
    vac = np.zeros(nb, dtype=complex)
    vac[pairs.index((0, 0))] = 1.0
    u = np.zeros((nb, nb), dtype=complex)
    for i, (nr, nl) in enumerate(pairs):
        v = vac
        for _ in range(nl):
            v = al_dag @ v
        for _ in range(nr):
            v = ar_dag @ v
        u[:, i] = v / np.sqrt(factorial(nr) * factorial(nl))
    local = np.kron(np.eye(2), u)
    return reduce(np.kron, [local] * trunc.N_sites)


def ground_state(H: np.ndarray) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of a Hermitian matrix."""
    res = hermitian_eigen(H)
    e0, v = float(res.values[0]), res.vectors[:, 0]
    resid = np.linalg.norm(H @ v - e0 * v)
    if resid > 1e-10 * max(1.0, np.linalg.norm(H, 2)):
        raise ConvergenceError(f"ground-state residual {resid:.3e} too large", resid)
    return e0, v


def infer_truncation(dim: int) -> TruncationSpec:
    """Smallest site count, then ``total`` before ``box``, whose space has dimension ``dim``."""
    for n_sites in (1, 2, 3):
        for scheme in ("total", "box"):
            n = 0
            while True:
                t = TruncationSpec(n, N_sites=n_sites, scheme=scheme, max_dim=max(dim, DEFAULT_MAX_DIM))
                if t.dim >= dim:
                    break
                n += 1
            if t.dim == dim:
                return t
    raise ValidationError(f"no truncation has dimension {dim}; pass trunc explicitly")


def low_spectrum(
    H: np.ndarray, m: int, trunc: TruncationSpec | None = None, degeneracy_tol: float = 1e-9
) -> SpectrumResult:
    """The m lowest levels of a chiral-layout Hamiltonian with their charges.

    Inside each degenerate level the eigenvectors are rotated to diagonalize
    the charge, so every returned state has a definite charge whenever the
    Hamiltonian commutes with it.  Without ``trunc`` the layout is inferred
    from the dimension by :func:`infer_truncation`.
    """
    if trunc is None:
        trunc = infer_truncation(H.shape[0])
    if m > H.shape[0]:
        raise ValidationError(f"asked for {m} levels of a {H.shape[0]}-dimensional space")
    C = charge_operator(trunc)
    res = hermitian_eigen(H)
    lam, vec = res.values, res.vectors
    scale = max(1.0, float(np.max(np.abs(lam))))
    charges = np.empty(len(lam))
    start = 0
    while start < len(lam):
        stop = start + 1
        while stop < len(lam) and lam[stop] - lam[stop - 1] <= degeneracy_tol * scale:
            stop += 1
        block = vec[:, start:stop]
        cb = block.conj().T @ C @ block
        cres = hermitian_eigen(0.5 * (cb + cb.conj().T))
        rotated = block @ cres.vectors
        charges[start:stop] = np.real(np.einsum("ij,ij->j", rotated.conj(), C @ rotated))
        start = stop
        if start >= m:
            break
    return SpectrumResult(lam[:m].copy(), charges[:m].copy(), trunc)


def commutator_norms(H: np.ndarray, trunc: TruncationSpec) -> tuple[float, float]:
    """max |[H, C]| over the full truncated space and over the interior block."""
    C = charge_operator(trunc)
    comm = H @ C - C @ H
    mask = interior_mask(trunc)
    full = float(np.max(np.abs(comm))) if comm.size else 0.0
    inner = comm[np.ix_(mask, mask)]
    return full, float(np.max(np.abs(inner))) if inner.size else 0.0


def spectrum_distance(H1: np.ndarray, H2: np.ndarray) -> float:
    """Max difference between the sorted spectra of two Hermitian matrices."""
    e1 = hermitian_eigen(H1).values
    e2 = hermitian_eigen(H2).values
    return float(np.max(np.abs(e1 - e2)))
