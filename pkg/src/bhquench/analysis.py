"""Derived results: imbalance sweeps, eigenstate overlaps, Fock compositions.

The imbalance sweep runs both barrier orientations from the U-dependent
prepared state on a (U, t) grid; the overlap report projects the prepared
state onto the quench eigenbasis and lists the dominant Fock contributions
of strongly overlapping eigenstates.
"""

from __future__ import annotations

import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from . import protocol as proto
from .basis import SectorBasis
from .errors import ValidationError
from .linalg import Spectrum, StateVector

log = logging.getLogger(__name__)

#: Default heatmap grids: U in [0, 5] step 0.02, t in [0, 50] step 0.25.
DEFAULT_U_STEP = 0.02
DEFAULT_SWEEP_DT = 0.25

#: Eigenstates with at least this overlap get a Fock-composition listing.
REPORT_THRESHOLD = 0.05


def default_u_grid(u_min: float = 0.0, u_max: float = 5.0,
                   step: float = DEFAULT_U_STEP) -> np.ndarray:
    n = int(round((u_max - u_min) / step))
    return np.linspace(u_min, u_max, n + 1)


@dataclass
class SweepGrid:
    """Population imbalance dn(U, t) plus conservation audit over all runs."""

    U_values: np.ndarray
    t_values: np.ndarray
    dn: np.ndarray
    max_norm_drift: float = 0.0
    max_energy_drift: float = 0.0
    max_particle_dev: float = 0.0


def _audit(traj: proto.Trajectory, N: float) -> tuple[float, float, float]:
    norm_drift = float(np.abs(traj.norm - traj.norm[0]).max())
    e0 = traj.energy[0]
    energy_drift = float(np.abs(traj.energy - e0).max() / max(1.0, abs(e0)))
    particle_dev = float(np.abs(traj.site_density.sum(axis=1) - N).max())
    return norm_drift, energy_drift, particle_dev


def sweep_interaction(L: int, N: int, J: float, h: float, U_values,
                      t_values, workers: int = 1) -> SweepGrid:
    """dn(U, t) between the vertical and angled quench for each interaction U.

    Rows are computed independently (optionally in parallel) and assembled
    in U order, so the grid is deterministic either way.
    """
    U_values = np.asarray(U_values, dtype=float)
    t_values = np.asarray(t_values, dtype=float)
    if U_values.size == 0 or t_values.size == 0:
        raise ValidationError("sweep grids must be non-empty")
    if np.any(np.diff(U_values) <= 0) and U_values.size > 1:
        raise ValidationError("U grid must be strictly ascending")

    def row(U: float):
        spec_a = proto.QuenchSpec(L=L, N=N, U=U, J=J, h=h, barrier="vertical",
                                  times=t_values)
        spec_b = proto.QuenchSpec(L=L, N=N, U=U, J=J, h=h, barrier="angled",
                                  times=t_values)
        ta = proto.run_quench(spec_a)
        tb = proto.run_quench(spec_b)
        return proto.population_imbalance(ta, tb), _audit(ta, N), _audit(tb, N)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(row, U_values))
    else:
        results = []
        for i, U in enumerate(U_values):
            if i % 25 == 0:
                print(f"sweep row {i + 1}/{U_values.size} (U = {U:g})",
                      file=sys.stderr)
            results.append(row(U))

    dn = np.vstack([r[0] for r in results])
    audits = [a for r in results for a in (r[1], r[2])]
    return SweepGrid(
        U_values=U_values, t_values=t_values, dn=dn,
        max_norm_drift=max(a[0] for a in audits),
        max_energy_drift=max(a[1] for a in audits),
        max_particle_dev=max(a[2] for a in audits),
    )


@dataclass
class FockContribution:
    occupation: tuple[int, ...]
    basis_index: int
    weight: float


@dataclass
class OverlapEntry:
    index: int
    energy: float
    overlap: float
    degenerate: bool = False
    fock_top: list[FockContribution] = field(default_factory=list)


@dataclass
class OverlapReport:
    """Per-eigenstate overlaps with psi0, ascending energy, 0-based indices."""

    entries: list[OverlapEntry]
    degenerate_groups: list[tuple[tuple[int, ...], float]] = field(default_factory=list)

    def overlaps(self) -> np.ndarray:
        return np.array([e.overlap for e in self.entries])


def fock_composition(eigvec: np.ndarray, basis: SectorBasis,
                     top_k: int) -> list[FockContribution]:
    """The top_k largest Fock weights |c_j|^2, descending, ties by basis index."""
    vec = np.asarray(eigvec)
    if vec.size != basis.dim:
        raise ValidationError(f"vector size {vec.size} != basis dim {basis.dim}")
    if top_k > basis.dim:
        raise ValidationError(f"top_k = {top_k} exceeds dimension {basis.dim}")
    w = np.abs(vec) ** 2
    order = np.argsort(-w, kind="stable")[:top_k]
    return [FockContribution(basis.occupation(int(i)), int(i), float(w[i]))
            for i in order]


def overlap_analysis(psi0: StateVector, spec: Spectrum, top_k: int = 5,
                     report_threshold: float = REPORT_THRESHOLD,
                     degeneracy_tol: float = la.DEGENERACY_TOL) -> OverlapReport:
    """Overlap |<v_i|psi0>|^2 for every eigenstate, with Fock listings.

    Eigenstates above ``report_threshold`` get their top_k Fock contributions;
    near-degenerate levels are flagged and additionally reported as groups
    with the basis-independent subspace-summed overlap.
    """
    if top_k < 1:
        raise ValidationError(f"top_k must be >= 1, got {top_k}")
    if psi0.dim != spec.dim:
        raise ValidationError(
            f"state dim {psi0.dim} != spectrum dim {spec.dim}"
        )
    basis = psi0.basis
    amp = spec.vectors.T @ psi0.amplitudes.real + 1j * (
        spec.vectors.T @ psi0.amplitudes.imag
    )
    ov = np.abs(amp) ** 2

    degenerate = np.zeros(spec.dim, dtype=bool)
    groups: list[tuple[tuple[int, ...], float]] = []
    start = 0
    for i in range(1, spec.dim + 1):
        if i < spec.dim and spec.energies[i] - spec.energies[i - 1] < degeneracy_tol:
            continue
        if i - start > 1:
            idx = tuple(range(start, i))
            degenerate[start:i] = True
            groups.append((idx, float(ov[start:i].sum())))
        start = i

    entries = []
    for i in range(spec.dim):
        top = []
        if ov[i] > report_threshold and basis is not None:
            top = fock_composition(spec.vectors[:, i], basis, min(top_k, spec.dim))
        entries.append(OverlapEntry(index=i, energy=float(spec.energies[i]),
                                    overlap=float(ov[i]),
                                    degenerate=bool(degenerate[i]), fock_top=top))
    return OverlapReport(entries=entries, degenerate_groups=groups)


def find_directional_windows(grid: SweepGrid,
                             threshold: float) -> list[tuple[tuple[float, float], int]]:
    """Maximal contiguous U intervals where max_t |dn| >= threshold.

    Each window carries the sign of dn at its interior maximum: +1 when the
    vertical orientation transports more, -1 when the angled one does.
    """
    if not threshold > 0:
        raise ValidationError(f"threshold must be positive, got {threshold}")
    score = np.abs(grid.dn).max(axis=1)
    mask = score >= threshold
    windows: list[tuple[tuple[float, float], int]] = []
    i = 0
    nU = grid.U_values.size
    while i < nU:
        if not mask[i]:
            i += 1
            continue
        j = i
        while j + 1 < nU and mask[j + 1]:
            j += 1
        block = grid.dn[i:j + 1]
        flat = np.unravel_index(np.argmax(np.abs(block)), block.shape)
        sign = 1 if block[flat] > 0 else -1
        windows.append(((float(grid.U_values[i]), float(grid.U_values[j])), sign))
        i = j + 1
    return windows
