"""The quench experiment end to end.

A run prepares the interacting ground state behind a high cooling wall,
swaps the potential for one of the two asymmetric barrier orientations
(state carried over unchanged), evolves, and records site densities, the
post-barrier population, norm and energy on the requested time grid.
Coherent-state initial conditions are handled exactly by decomposing the
product coherent state over total-number sectors and Poisson-averaging
the per-sector dynamics.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .basis import SectorBasis, enumerate_sector
from .errors import ValidationError
from .hamiltonian import (ModelParams, SparseSymMatrix, build_hamiltonian,
                          potential_angled, potential_cooling, potential_vertical)
from .linalg import StateVector

log = logging.getLogger(__name__)

#: Trajectories switch from dense spectral evolution to Krylov above this dim.
MAX_SPECTRAL_EVOLVE = 1000

#: Krylov subspace used for large sectors (longer substeps amortize matvecs).
LARGE_SECTOR_SUBSPACE = 48

#: Hard ceiling on the coherent-state sector truncation.
COHERENT_N_CEILING = 24

_TIME_CHUNK = 128


def default_times(tmax: float = 50.0, dt: float = 0.05) -> np.ndarray:
    """Uniform grid 0..tmax inclusive with step dt."""
    n = int(round(tmax / dt))
    return np.linspace(0.0, tmax, n + 1)


def resolve_barrier(barrier, L: int, h: float) -> list[float]:
    """Named orientation or explicit site-potential list, validated."""
    if isinstance(barrier, str):
        if barrier == "vertical":
            return potential_vertical(L, h)
        if barrier == "angled":
            return potential_angled(L, h)
        raise ValidationError(f"unknown barrier '{barrier}'")
    v = [float(x) for x in barrier]
    if len(v) != L:
        raise ValidationError(f"custom barrier has {len(v)} entries, L = {L}")
    return v


@dataclass
class QuenchSpec:
    """Parameters of one preparation-and-quench run (energies in J, times in 1/J)."""

    L: int
    N: int
    U: float
    J: float = 1.0
    h: float = 10.0
    barrier: object = "vertical"
    times: np.ndarray = field(default_factory=default_times)

    def __post_init__(self):
        if self.L < 4 or self.L % 2 != 0:
            raise ValidationError(f"L must be even and >= 4, got {self.L}")
        if self.N < 1:
            raise ValidationError(f"N must be >= 1, got {self.N}")
        if not self.J > 0:
            raise ValidationError(f"J must be positive, got {self.J}")
        self.times = np.asarray(self.times, dtype=float)
        if self.times.size == 0 or self.times[0] != 0.0:
            raise ValidationError("time grid must be non-empty and start at 0")
        if np.any(np.diff(self.times) <= 0):
            raise ValidationError("time grid must be strictly ascending")
        resolve_barrier(self.barrier, self.L, self.h)

    def barrier_potential(self) -> list[float]:
        return resolve_barrier(self.barrier, self.L, self.h)


@dataclass
class Trajectory:
    """Observables of one run on its time grid; norm and energy audit the solver."""

    times: np.ndarray
    site_density: np.ndarray
    n_after: np.ndarray
    norm: np.ndarray
    energy: np.ndarray
    discarded_weight: float = 0.0

    @property
    def L(self) -> int:
        return self.site_density.shape[1]

    def recompute_n_after(self) -> np.ndarray:
        return self.site_density[:, self.L // 2 + 1:].sum(axis=1)


@dataclass
class CoherentSpec:
    """Per-site mean occupations of a product coherent state and its truncation."""

    mean_occupations: tuple[float, ...]
    weight_tol: float = 1e-6
    n_max: int | None = None

    def __post_init__(self):
        occ = tuple(float(x) for x in self.mean_occupations)
        if any(x < 0 for x in occ):
            raise ValidationError("mean occupations must be >= 0")
        self.mean_occupations = occ
        if not 0 < self.weight_tol < 1:
            raise ValidationError(f"weight_tol must be in (0, 1), got {self.weight_tol}")
        if self.n_max is not None and self.n_max < 0:
            raise ValidationError(f"n_max must be >= 0, got {self.n_max}")

    @property
    def mean_total(self) -> float:
        return float(sum(self.mean_occupations))


def n_after(densities, L: int) -> float:
    """Post-barrier population: densities summed over 1-based sites L/2+2 .. L."""
    arr = np.asarray(densities, dtype=float)
    if arr.ndim != 1 or arr.size != L:
        raise ValidationError(f"density list has {arr.size} entries, expected L = {L}")
    return float(arr[L // 2 + 1:].sum())


def _prepare(basis: SectorBasis, J: float, U: float, h: float) -> tuple[float, np.ndarray]:
    cool = build_hamiltonian(basis, ModelParams(J, U, potential_cooling(basis.L, h)))
    energy, gs = la.ground_state(cool)
    return energy, gs.amplitudes


def prepare_initial_state(L: int, N: int, J: float, U: float, h: float) -> StateVector:
    """Ground state behind the 3h cooling wall, the initial state of every quench."""
    basis = enumerate_sector(L, N)
    _, amps = _prepare(basis, J, U, h)
    psi = StateVector(amps, basis)
    pre = float(la.site_densities(psi)[: L // 2 - 1].sum())
    log.info("prepared state holds %.6f of %d bosons on the pre-barrier sites", pre, N)
    return psi


def _observable_stream(H: SparseSymMatrix, basis: SectorBasis, psi0: np.ndarray,
                       times: np.ndarray, max_spectral: int = MAX_SPECTRAL_EVOLVE):
    """Yield (density_row, norm, energy) per time without storing all states."""
    csr = H.to_csr()
    counts = basis.states

    def measure(amps: np.ndarray):
        p = np.abs(amps) ** 2
        dens = p @ counts
        nrm = float(np.sqrt(p.sum()))
        en = float(np.real(np.vdot(amps, csr @ amps)))
        return dens, nrm, en

    if H.dim <= max_spectral:
        spec = la.eigh_dense(H)
        for start in range(0, times.size, _TIME_CHUNK):
            chunk = times[start:start + _TIME_CHUNK]
            states = la.spectral_states(spec, psi0, chunk)
            for i in range(chunk.size):
                yield measure(states[i])
    else:
        m = LARGE_SECTOR_SUBSPACE if H.dim > la.DENSE_CEILING else la.SUBSPACE_DIM
        for amps in la.krylov_state_iter(H, psi0, times, subspace_dim=m):
            yield measure(amps)


def _assemble(times: np.ndarray, stream, L: int) -> Trajectory:
    nt = times.size
    dens = np.empty((nt, L))
    nrm = np.empty(nt)
    en = np.empty(nt)
    for i, (d, n, e) in enumerate(stream):
        dens[i] = d
        nrm[i] = n
        en[i] = e
    after = dens[:, L // 2 + 1:].sum(axis=1)
    return Trajectory(times=times.copy(), site_density=dens, n_after=after,
                      norm=nrm, energy=en)


def run_quench(spec: QuenchSpec) -> Trajectory:
    """Prepare under the cooling wall, quench to the chosen barrier, evolve."""
    basis = enumerate_sector(spec.L, spec.N)
    _, psi0 = _prepare(basis, spec.J, spec.U, spec.h)
    Hq = build_hamiltonian(
        basis, ModelParams(spec.J, spec.U, spec.barrier_potential())
    )
    stream = _observable_stream(Hq, basis, psi0.astype(np.complex128), spec.times)
    return _assemble(spec.times, stream, spec.L)


def population_imbalance(traj_a: Trajectory, traj_b: Trajectory) -> np.ndarray:
    """Pointwise n_after difference of two runs on identical time grids."""
    if traj_a.times.shape != traj_b.times.shape or np.any(traj_a.times != traj_b.times):
        raise ValidationError("trajectories use different time grids")
    return traj_a.n_after - traj_b.n_after


def _poisson_weight(lam: float, n: int) -> float:
    if lam == 0.0:
        return 1.0 if n == 0 else 0.0
    return math.exp(n * math.log(lam) - lam - math.lgamma(n + 1))


@dataclass
class SectorWeights:
    """Poisson sector weights 0..n_max plus the discarded tail mass."""

    pairs: list[tuple[int, float]]
    discarded: float


def coherent_sector_weights(spec: CoherentSpec) -> SectorWeights:
    """Poisson(lambda) weights per total-number sector, lambda = sum of means.

    When n_max is not given it grows until the discarded tail is within
    weight_tol, subject to the hard ceiling.
    """
    lam = spec.mean_total

    def tail(nm: int) -> float:
        return max(0.0, 1.0 - sum(_poisson_weight(lam, k) for k in range(nm + 1)))

    if spec.n_max is None:
        nm = 0
        while tail(nm) > spec.weight_tol:
            nm += 1
            if nm > COHERENT_N_CEILING:
                raise ValidationError(
                    f"weight_tol {spec.weight_tol} unreachable within the sector "
                    f"ceiling {COHERENT_N_CEILING} (lambda = {lam})"
                )
    else:
        nm = spec.n_max
        if tail(nm) > spec.weight_tol:
            raise ValidationError(
                f"discarded weight {tail(nm):.3e} beyond n_max = {nm} exceeds "
                f"weight_tol {spec.weight_tol}"
            )
    pairs = [(k, _poisson_weight(lam, k)) for k in range(nm + 1)]
    return SectorWeights(pairs=pairs, discarded=tail(nm))


def coherent_sector_state(spec: CoherentSpec, basis: SectorBasis) -> StateVector:
    """Normalized projection of the product coherent state onto one sector.

    Amplitudes are proportional to prod_j alpha_j^{m_j} / sqrt(m_j!) with
    alpha_j = sqrt(mean occupation); sites with zero mean admit no bosons.
    """
    if len(spec.mean_occupations) != basis.L:
        raise ValidationError(
            f"coherent state has {len(spec.mean_occupations)} sites, basis L = {basis.L}"
        )
    if spec.n_max is not None and basis.N > spec.n_max:
        raise ValidationError(f"sector N = {basis.N} beyond truncation {spec.n_max}")
    fact = np.array([math.factorial(k) for k in range(basis.N + 1)], dtype=float)
    amps = np.ones(basis.dim)
    for j, mean in enumerate(spec.mean_occupations):
        m = basis.states[:, j]
        if mean == 0.0:
            amps = amps * (m == 0)
        else:
            amps = amps * math.sqrt(mean) ** m / np.sqrt(fact[m])
    nrm = float(np.linalg.norm(amps))
    if nrm == 0.0:
        raise ValidationError(
            f"coherent state has no support in the N = {basis.N} sector"
        )
    return StateVector(amps / nrm, basis)


def _coherent_sector_run(L: int, J: float, U: float, potential: list[float],
                         cspec: CoherentSpec, N: int,
                         times: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(densities, squared norms, energies) of one sector's evolution."""
    basis = enumerate_sector(L, N)
    if N == 0:
        nt = times.size
        return np.zeros((nt, L)), np.ones(nt), np.zeros(nt)
    psi = coherent_sector_state(cspec, basis)
    H = build_hamiltonian(basis, ModelParams(J, U, potential))
    nt = times.size
    dens = np.empty((nt, L))
    nrm2 = np.empty(nt)
    en = np.empty(nt)
    for i, (d, n, e) in enumerate(
        _observable_stream(H, basis, psi.amplitudes, times)
    ):
        dens[i] = d
        nrm2[i] = n * n
        en[i] = e
    return dens, nrm2, en


def run_coherent_quench(spec: QuenchSpec, cspec: CoherentSpec,
                        workers: int = 1) -> Trajectory:
    """Quench dynamics from a product coherent state, exact per number sector.

    Site densities, norm and energy are Poisson-weighted averages over the
    retained sectors; the trajectory carries the discarded tail weight.
    Number conservation makes the decomposition exact within that tail.
    """
    if len(cspec.mean_occupations) != spec.L:
        raise ValidationError(
            f"coherent occupations cover {len(cspec.mean_occupations)} sites, L = {spec.L}"
        )
    weights = coherent_sector_weights(cspec)
    potential = spec.barrier_potential()
    nt = spec.times.size
    dens = np.zeros((nt, spec.L))
    nrm2 = np.zeros(nt)
    en = np.zeros(nt)

    def job(N: int):
        return _coherent_sector_run(spec.L, spec.J, spec.U, potential, cspec,
                                    N, spec.times)

    sectors = [N for N, _ in weights.pairs]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, sectors))
    else:
        results = []
        for N in sectors:
            log.info("coherent sector N = %d", N)
            results.append(job(N))
    for (N, w), (d, n2, e) in zip(weights.pairs, results):
        dens += w * d
        nrm2 += w * n2
        en += w * e

    after = dens[:, spec.L // 2 + 1:].sum(axis=1)
    return Trajectory(times=spec.times.copy(), site_density=dens, n_after=after,
                      norm=np.sqrt(nrm2), energy=en,
                      discarded_weight=weights.discarded)
