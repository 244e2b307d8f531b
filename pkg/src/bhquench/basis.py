"""Fixed-number bosonic Fock bases for one-dimensional chains.

States are labelled by per-site occupations |n_1 ... n_L> with sum(n_j) = N
and enumerated in descending lexicographic order of the occupation tuple:
index 0 is |N 0 ... 0>, the last index is |0 ... 0 N>.  The ordering is a
frozen contract; indexing uses combinatorial ranking rather than a lookup
table, so a basis of dimension D costs O(D*L) ints of memory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import CapacityError, SectorError, ValidationError

#: Default ceiling on sector dimension; guards against accidental huge requests.
MAX_SECTOR_DIM = 2_000_000

_INT64_MAX = 2**63 - 1


def dimension(L: int, N: int) -> int:
    """Number of Fock states of N bosons on L sites: C(L+N-1, N).

    Exact integer arithmetic; raises CapacityError when the count does not
    fit in a signed 64-bit integer.
    """
    if L < 1:
        raise ValidationError(f"site count L must be >= 1, got {L}")
    if N < 0:
        raise ValidationError(f"boson number N must be >= 0, got {N}")
    d = comb(L + N - 1, N)
    if d > _INT64_MAX:
        raise CapacityError(f"sector dimension C({L + N - 1},{N}) exceeds 2**63-1")
    return d


def _enumerate_states(L: int, N: int) -> np.ndarray:
    """All occupation vectors of the (L, N) sector, descending lexicographic.

    Built bottom-up over the site count: the states of an l-site sector with
    n bosons are the blocks (n1, rest) for n1 = n down to 0, where rest runs
    over the (l-1)-site sector with n - n1 bosons.  That block order is
    exactly descending lexicographic order.
    """
    level = [np.array([[n]], dtype=np.int32) for n in range(N + 1)]
    for l in range(2, L + 1):
        ns = [N] if l == L else range(N + 1)
        nxt = []
        for n in ns:
            blocks = []
            for n1 in range(n, -1, -1):
                rest = level[n - n1]
                lead = np.full((rest.shape[0], 1), n1, dtype=np.int32)
                blocks.append(np.hstack([lead, rest]))
            nxt.append(np.vstack(blocks))
        level = nxt
    return level[-1] if L > 1 else level[N]


def _ranking_table(L: int, N: int) -> np.ndarray:
    """Table hock[j, m] counting states skipped at site j per trailing boson count.

    hock[j, m] is the number of sector states that share occupations on sites
    0..j-1 with a given state but place more bosons on site j, when m bosons
    sit strictly to the right of site j; equal to C(L-j-2+m, m-1) by the
    hockey-stick identity, 0 for m = 0.
    """
    table = np.zeros((max(L - 1, 1), N + 1), dtype=np.int64)
    for j in range(L - 1):
        for m in range(1, N + 1):
            table[j, m] = comb(L - j - 2 + m, m - 1)
    return table


@dataclass
class SectorBasis:
    """Ordered basis of the fixed-(L, N) bosonic sector.

    ``states`` has shape (dim, L); row i is the occupation vector of basis
    state i.  Immutable after construction (arrays are set read-only).
    """

    L: int
    N: int
    states: np.ndarray
    _rank_table: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    def occupation(self, i: int) -> tuple[int, ...]:
        """Occupation tuple of basis state i."""
        return tuple(int(n) for n in self.states[i])

    def rank(self, occ: np.ndarray) -> int:
        """Positional index of one in-sector occupation vector (no validation)."""
        suffix = np.cumsum(occ[::-1])[::-1]
        # suffix[j+1] = bosons strictly right of site j
        idx = 0
        for j in range(self.L - 1):
            idx += self._rank_table[j, suffix[j + 1]]
        return int(idx)

    def rank_rows(self, occs: np.ndarray) -> np.ndarray:
        """Vectorized rank of many occupation rows, shape (n, L) -> (n,)."""
        suffix = np.cumsum(occs[:, ::-1], axis=1)[:, ::-1]
        idx = np.zeros(occs.shape[0], dtype=np.int64)
        for j in range(self.L - 1):
            idx += self._rank_table[j, suffix[:, j + 1]]
        return idx


def enumerate_sector(L: int, N: int, max_dim: int = MAX_SECTOR_DIM) -> SectorBasis:
    """Enumerate the (L, N) sector in descending lexicographic order.

    Raises CapacityError when the sector dimension exceeds ``max_dim``.
    """
    d = dimension(L, N)
    if d > max_dim:
        raise CapacityError(
            f"sector (L={L}, N={N}) has dimension {d} > configured maximum {max_dim}"
        )
    states = _enumerate_states(L, N)
    states.setflags(write=False)
    return SectorBasis(L=L, N=N, states=states, _rank_table=_ranking_table(L, N))


def index_of(basis: SectorBasis, occ) -> int:
    """Positional index of an occupation vector in the basis.

    Raises SectorError when the vector has the wrong length, a negative
    entry, or does not sum to the sector's boson number.
    """
    arr = np.asarray(occ, dtype=np.int64)
    if arr.ndim != 1 or arr.size != basis.L:
        raise SectorError(f"occupation length {arr.size} != L = {basis.L}")
    if (arr < 0).any():
        raise SectorError(f"negative occupation in {tuple(arr)}")
    total = int(arr.sum())
    if total != basis.N:
        raise SectorError(
            f"occupation {tuple(arr)} has {total} bosons, sector holds N = {basis.N}"
        )
    return basis.rank(arr)


def reflection_permutation(basis: SectorBasis) -> np.ndarray:
    """Permutation p with p[i] = index of the site-reversed state i.

    Lifts the site reflection n_j -> n_{L+1-j} to the sector basis; an
    involution (p[p] == identity).
    """
    return basis.rank_rows(np.ascontiguousarray(basis.states[:, ::-1]))


def occupation_label(occ) -> str:
    """Render an occupation vector as a compact digit string, e.g. '220000'.

    Falls back to comma-separated form when any site holds more than nine
    bosons, where plain digit concatenation would be ambiguous.
    """
    counts = [int(n) for n in occ]
    if all(n <= 9 for n in counts):
        return "".join(str(n) for n in counts)
    return ",".join(str(n) for n in counts)
