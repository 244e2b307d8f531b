"""Eigensolvers and unitary propagators for real symmetric sparse matrices.

Dense eigendecomposition backs everything up to ``DENSE_CEILING``; above it a
restarted Lanczos iteration with full reorthogonalization finds the ground
state, and time evolution switches from the spectral form to a Krylov
(Lanczos) propagator with adaptive sub-stepping.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .basis import SectorBasis
from .errors import CapacityError, ConvergenceError, ValidationError
from .hamiltonian import SparseSymMatrix

#: Largest dimension handled by the dense eigensolver path.
DENSE_CEILING = 4000

#: Krylov propagator defaults: subspace size and per-step error tolerance.
SUBSPACE_DIM = 30
KRYLOV_TOL = 1e-10

#: Eigenvalues closer than this are treated as degenerate.
DEGENERACY_TOL = 1e-10

_LANCZOS_SEED = 20250


@dataclass
class Spectrum:
    """Full eigendecomposition: ascending energies, orthonormal column vectors."""

    energies: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.energies.size


@dataclass
class StateVector:
    """Complex amplitudes over a sector basis (basis optional for bare vectors)."""

    amplitudes: np.ndarray
    basis: SectorBasis | None = None

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.basis)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each column positive."""
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigh_dense(H: SparseSymMatrix, dense_ceiling: int = DENSE_CEILING) -> Spectrum:
    """Full dense eigendecomposition, ascending energies, deterministic signs."""
    if H.dim > dense_ceiling:
        raise CapacityError(
            f"dense eigensolver limited to dim <= {dense_ceiling}, got {H.dim}"
        )
    try:
        energies, vectors = np.linalg.eigh(H.to_dense())
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(f"dense eigensolver did not converge: {exc}") from exc
    return Spectrum(energies=energies, vectors=_fix_signs(vectors))


def _lanczos_tridiag(matvec, q0: np.ndarray, m: int, breakdown_tol: float,
                     reorth: bool = False):
    """m-step Lanczos from unit vector q0.

    Returns (V, alpha, beta, beta_last, happy) with Lanczos vectors as rows
    of V.  ``happy`` marks an invariant subspace (exact breakdown); then
    beta_last is 0.  Full reorthogonalization is optional; the short-step
    propagator runs without it, the ground-state solver with it.
    """
    dim = q0.size
    m = min(m, dim)
    V = np.empty((m, dim), dtype=q0.dtype)
    alpha = np.empty(m)
    beta = np.empty(m - 1 if m > 1 else 0)
    V[0] = q0
    w = matvec(q0)
    alpha[0] = float(np.real(np.vdot(q0, w)))
    w = w - alpha[0] * q0
    k = 1
    for j in range(1, m):
        if reorth:
            w -= V[:j].T @ (V[:j].conj() @ w)
        b = float(np.linalg.norm(w))
        if b <= breakdown_tol:
            return V[:k], alpha[:k], beta[: k - 1], 0.0, True
        beta[j - 1] = b
        q = w / b
        V[j] = q
        w = matvec(q) - b * V[j - 1]
        alpha[j] = float(np.real(np.vdot(q, w)))
        w = w - alpha[j] * q
        k += 1
    if reorth:
        w -= V[:k].T @ (V[:k].conj() @ w)
    b_last = float(np.linalg.norm(w))
    return V[:k], alpha[:k], beta[: k - 1], b_last, b_last <= breakdown_tol


def ground_state(H: SparseSymMatrix, dense_ceiling: int = DENSE_CEILING,
                 tol: float = 1e-9, block_size: int = 40,
                 max_restarts: int = 200) -> tuple[float, StateVector]:
    """Lowest eigenpair of H.

    Uses the dense path up to ``dense_ceiling`` and restarted Lanczos with
    full reorthogonalization above it; the returned residual satisfies
    ||H v - E v|| <= tol * max(1, ||H||_inf).  Warns when a second level
    lies within the degeneracy tolerance of the ground energy.
    """
    if H.dim < 1:
        raise ValidationError("empty matrix has no ground state")
    scale = max(1.0, H.inf_norm())
    if H.dim <= dense_ceiling:
        spec = eigh_dense(H, dense_ceiling)
        if H.dim > 1 and spec.energies[1] - spec.energies[0] < DEGENERACY_TOL:
            warnings.warn("degenerate ground space: returning one unit vector in it")
        return float(spec.energies[0]), StateVector(spec.vectors[:, 0].copy())

    matvec = H.to_csr().__matmul__
    rng = np.random.default_rng(_LANCZOS_SEED)
    v = rng.standard_normal(H.dim)
    v /= np.linalg.norm(v)
    theta = np.inf
    gap = np.inf
    for _ in range(max_restarts):
        V, alpha, beta, _, _ = _lanczos_tridiag(
            matvec, v, block_size, breakdown_tol=1e-14 * scale, reorth=True
        )
        ritz, S = eigh_tridiagonal(alpha, beta)
        theta = float(ritz[0])
        if ritz.size > 1:
            gap = float(ritz[1] - ritz[0])
        v = S[:, 0] @ V
        v /= np.linalg.norm(v)
        residual = float(np.linalg.norm(matvec(v) - theta * v))
        if residual <= tol * scale:
            if gap < DEGENERACY_TOL:
                warnings.warn(
                    "degenerate ground space: returning one unit vector in it"
                )
            return theta, StateVector(_fix_signs(v[:, None])[:, 0])
    raise ConvergenceError(
        f"Lanczos ground state did not reach tol {tol} in {max_restarts} restarts"
    )


def _check_state_dim(dim: int, psi: np.ndarray) -> np.ndarray:
    arr = np.asarray(psi, dtype=np.complex128)
    if arr.ndim != 1 or arr.size != dim:
        raise ValidationError(f"state has dimension {arr.size}, operator expects {dim}")
    return arr


def spectral_states(spec: Spectrum, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Array of evolved states, shape (len(times), dim), via the eigenbasis.

    Splits the complex coefficient matrix into real GEMMs so the (real)
    eigenvector matrix is never upcast.  t = 0 returns the input state
    itself rather than its eigenbasis round trip.
    """
    psi0 = _check_state_dim(spec.dim, psi0)
    times = np.asarray(times, dtype=float)
    c = spec.vectors.T @ psi0.real + 1j * (spec.vectors.T @ psi0.imag)
    phases = np.exp(-1j * np.outer(times, spec.energies))
    coef = (phases * c).T
    out = (spec.vectors @ coef.real + 1j * (spec.vectors @ coef.imag)).T
    out[times == 0.0] = psi0
    return out


def evolve_spectral(spec: Spectrum, psi0: StateVector,
                    times) -> list[StateVector]:
    """Evolve psi0 through the eigendecomposition at each requested time."""
    states = spectral_states(spec, psi0.amplitudes, np.asarray(times, dtype=float))
    return [StateVector(states[i], psi0.basis) for i in range(states.shape[0])]


def _tridiag_expm_factors(alpha: np.ndarray, beta: np.ndarray):
    """Eigendecomposition of the Lanczos tridiagonal: (ritz, S, S[0], S[-1])."""
    ritz, S = eigh_tridiagonal(alpha, beta)
    return ritz, S, S[0].copy(), S[-1].copy()


def krylov_state_iter(H: SparseSymMatrix, psi0: np.ndarray, times: np.ndarray,
                      subspace_dim: int = SUBSPACE_DIM, tol: float = KRYLOV_TOL):
    """Yield e^{-iHt} psi0 at each time, in order, via adaptive Lanczos steps.

    The local per-substep error estimate (Saad's residual bound, integrated
    with Simpson's rule) is kept below tol * (substep / total span), so the
    accumulated estimate over the whole trajectory stays below tol.  Substeps
    halve on estimate failure, then stretch back while the estimate still
    passes; happy breakdown makes the step exact.
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        return
    if np.any(np.diff(times) <= 0):
        raise ValidationError("times must be strictly ascending")
    if times[0] < 0:
        raise ValidationError("Krylov propagation starts at t >= 0")
    if subspace_dim < 2:
        raise ValidationError(f"subspace_dim must be >= 2, got {subspace_dim}")
    psi = _check_state_dim(H.dim, psi0).copy()

    idx = 0
    if times[0] == 0.0:
        yield psi.copy()
        idx += 1
    if idx >= times.size:
        return

    matvec = H.to_csr().__matmul__
    scale = max(1.0, H.inf_norm())
    total = float(times[-1])
    rate = tol / total
    t_cur = 0.0
    floor = total * 1e-12

    while idx < times.size:
        beta0 = float(np.linalg.norm(psi))
        if beta0 == 0.0:
            while idx < times.size:
                yield psi.copy()
                idx += 1
            return
        V, alpha, beta, b_last, happy = _lanczos_tridiag(
            matvec, psi / beta0, subspace_dim, breakdown_tol=1e-13 * scale
        )
        ritz, S, s_first, s_last = _tridiag_expm_factors(alpha, beta)

        def est(tau: float) -> float:
            if happy:
                return 0.0
            uk = [abs(s_last @ (np.exp(-1j * s * ritz) * s_first))
                  for s in (0.0, tau / 2, tau)]
            return beta0 * b_last * (tau / 6.0) * (uk[0] + 4 * uk[1] + uk[2])

        remaining = total - t_cur
        h = remaining
        while not happy and est(h) > rate * h:
            h /= 2
            if h < floor:
                raise ConvergenceError(
                    "Krylov substep underflow: error estimate will not meet tolerance"
                )
        # bisection overshoots; stretch the step back while it still passes
        while not happy and h < remaining:
            trial = min(1.4 * h, remaining)
            if est(trial) > rate * trial:
                break
            h = trial
        t_next = t_cur + h

        taus = []
        emit_upto = idx
        while emit_upto < times.size and times[emit_upto] <= t_next + 1e-9 * total:
            taus.append(times[emit_upto] - t_cur)
            emit_upto += 1
        taus.append(h)
        last = len(taus) - 1
        for start in range(0, len(taus), 64):
            sub = np.asarray(taus[start:start + 64])
            phases = np.exp(-1j * np.outer(sub, ritz)) * s_first
            block = (phases @ S.T) @ V
            for i in range(block.shape[0]):
                if start + i < last:
                    yield beta0 * block[i]
                else:
                    psi = beta0 * block[i]
        idx = emit_upto
        t_cur = t_next


def evolve_krylov(H: SparseSymMatrix, psi0: StateVector, times,
                  subspace_dim: int = SUBSPACE_DIM,
                  tol: float = KRYLOV_TOL) -> list[StateVector]:
    """Krylov propagation of psi0 over an ascending time grid."""
    it = krylov_state_iter(H, psi0.amplitudes, np.asarray(times, dtype=float),
                           subspace_dim=subspace_dim, tol=tol)
    return [StateVector(arr, psi0.basis) for arr in it]


def _require_basis(psi: StateVector) -> SectorBasis:
    if psi.basis is None:
        raise ValidationError("state carries no basis context")
    return psi.basis


def expectation_number(psi: StateVector, site: int) -> float:
    """<n_site> for a 1-based site index."""
    basis = _require_basis(psi)
    if not 1 <= site <= basis.L:
        raise ValidationError(f"site {site} outside 1..{basis.L}")
    p = np.abs(psi.amplitudes) ** 2
    return float(p @ basis.states[:, site - 1])


def site_densities(psi: StateVector) -> np.ndarray:
    """All L site densities <n_j> at once."""
    basis = _require_basis(psi)
    p = np.abs(psi.amplitudes) ** 2
    return p @ basis.states
