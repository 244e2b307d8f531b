"""Bose-Hubbard Hamiltonians on open chains as real symmetric sparse matrices.

H = -J * sum_j (b_j^dag b_{j+1} + h.c.) + (U/2) * sum_j n_j (n_j - 1)
    + sum_j V_j n_j

with nearest-neighbour hopping only and no wrap-around bond.  Matrices are
stored as one triangle plus diagonal, which keeps them exactly symmetric by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .basis import SectorBasis
from .errors import ValidationError


@dataclass(frozen=True)
class ModelParams:
    """Couplings of one chain: hopping J (energy unit), interaction U, site potential."""

    J: float = 1.0
    U: float = 0.0
    potential: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.J > 0:
            raise ValidationError(f"hopping J must be positive, got {self.J}")
        object.__setattr__(self, "potential", tuple(float(v) for v in self.potential))


def _check_barrier_args(L: int, h: float | None = None) -> None:
    if L < 4 or L % 2 != 0:
        raise ValidationError(f"barrier potentials require even L >= 4, got L = {L}")
    if h is not None and h < 0:
        raise ValidationError(f"barrier height must be >= 0, got {h}")


def potential_vertical(L: int, h: float) -> list[float]:
    """Step-down barrier: height h at site L/2, h/2 at site L/2+1, zero elsewhere."""
    _check_barrier_args(L, h)
    v = [0.0] * L
    v[L // 2 - 1] = float(h)
    v[L // 2] = h / 2
    return v


def potential_angled(L: int, h: float) -> list[float]:
    """Step-up barrier: height h/2 at site L/2, h at site L/2+1 (mirror of vertical)."""
    _check_barrier_args(L, h)
    v = [0.0] * L
    v[L // 2 - 1] = h / 2
    v[L // 2] = float(h)
    return v


def potential_cooling(L: int, h: float) -> list[float]:
    """Preparation wall: 3h on sites L/2..L, zero on the pre-barrier sites."""
    _check_barrier_args(L)
    v = [0.0] * L
    for j in range(L // 2 - 1, L):
        v[j] = 3.0 * h
    return v


class SparseSymMatrix:
    """Real symmetric matrix stored as the upper triangle in COO form.

    Entries satisfy row <= col, carry no explicit zeros and no duplicates;
    the full matrix is implied by symmetry.  Matvec goes through a cached
    full-symmetric CSR, a pure read that is safe for concurrent callers.
    """

    def __init__(self, dim: int, rows: np.ndarray, cols: np.ndarray, vals: np.ndarray):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if not (rows.shape == cols.shape == vals.shape):
            raise ValidationError("rows, cols, vals must have identical shapes")
        if rows.size and not (rows <= cols).all():
            raise ValidationError("symmetric storage requires row <= col")
        self.dim = int(dim)
        self.rows = rows
        self.cols = cols
        self.vals = vals
        self._csr: sp.csr_matrix | None = None
        self._inf_norm: float | None = None

    @property
    def nnz(self) -> int:
        """Stored entries (one per symmetric pair)."""
        return self.vals.size

    def to_csr(self) -> sp.csr_matrix:
        """Full symmetric matrix in CSR form (cached)."""
        if self._csr is None:
            off = self.rows != self.cols
            r = np.concatenate([self.rows, self.cols[off]])
            c = np.concatenate([self.cols, self.rows[off]])
            v = np.concatenate([self.vals, self.vals[off]])
            coo = sp.coo_matrix((v, (r, c)), shape=(self.dim, self.dim))
            self._csr = coo.tocsr()
        return self._csr

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.dim, self.dim))
        a[self.rows, self.cols] = self.vals
        a[self.cols, self.rows] = self.vals
        return a

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.to_csr() @ x

    def inf_norm(self) -> float:
        """Max absolute row sum of the full matrix (cached)."""
        if self._inf_norm is None:
            csr = self.to_csr()
            self._inf_norm = float(np.abs(csr).sum(axis=1).max()) if self.nnz else 0.0
        return self._inf_norm


def build_hamiltonian(basis: SectorBasis, params: ModelParams) -> SparseSymMatrix:
    """Assemble the sector Hamiltonian for the given couplings.

    Diagonal: (U/2) n_j (n_j - 1) + V_j n_j summed over sites.  Off-diagonal:
    moving one boson from site j+1 to site j contributes -J * sqrt(n_{j+1})
    * sqrt(n_j + 1); generating only that direction visits each symmetric
    pair exactly once, the Hermitian partner being implied by storage.
    """
    if len(params.potential) != basis.L:
        raise ValidationError(
            f"potential has {len(params.potential)} entries, basis has L = {basis.L}"
        )
    counts = basis.states
    v = np.asarray(params.potential, dtype=np.float64)
    diag = 0.5 * params.U * np.sum(counts * (counts - 1), axis=1) + counts @ v

    rows = [np.arange(basis.dim, dtype=np.int64)]
    cols = [np.arange(basis.dim, dtype=np.int64)]
    vals = [diag]
    for j in range(basis.L - 1):
        src = np.nonzero(counts[:, j + 1] > 0)[0]
        if src.size == 0:
            continue
        n_right = counts[src, j + 1].astype(np.float64)
        n_left = counts[src, j].astype(np.float64)
        moved = counts[src].copy()
        moved[:, j] += 1
        moved[:, j + 1] -= 1
        tgt = basis.rank_rows(moved)
        r = np.minimum(src, tgt)
        c = np.maximum(src, tgt)
        rows.append(r)
        cols.append(c)
        vals.append(-params.J * np.sqrt(n_right * (n_left + 1.0)))

    r = np.concatenate(rows)
    c = np.concatenate(cols)
    x = np.concatenate(vals)
    keep = x != 0.0
    return SparseSymMatrix(basis.dim, r[keep], c[keep], x[keep])
