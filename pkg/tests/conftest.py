"""Shared fixtures: the standard six-site four-boson setup used throughout."""

import numpy as np
import pytest

from bhquench import (ModelParams, build_hamiltonian, enumerate_sector,
                      eigh_dense, ground_state, potential_angled,
                      potential_cooling, potential_vertical)

L, N, J, U, H_BARRIER = 6, 4, 1.0, 1.42, 10.0


@pytest.fixture(scope="session")
def sector64():
    return enumerate_sector(L, N)


@pytest.fixture(scope="session")
def standard_setup(sector64):
    """Basis, both quench Hamiltonians, the prepared state and both spectra."""
    ham_a = build_hamiltonian(sector64, ModelParams(J, U, potential_vertical(L, H_BARRIER)))
    ham_b = build_hamiltonian(sector64, ModelParams(J, U, potential_angled(L, H_BARRIER)))
    ham_cool = build_hamiltonian(sector64, ModelParams(J, U, potential_cooling(L, H_BARRIER)))
    e0, psi0 = ground_state(ham_cool)
    psi0.basis = sector64
    return {
        "basis": sector64,
        "ham_a": ham_a,
        "ham_b": ham_b,
        "ham_cool": ham_cool,
        "e0": e0,
        "psi0": psi0,
        "spec_a": eigh_dense(ham_a),
        "spec_b": eigh_dense(ham_b),
    }


def random_state(dim, seed=0):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)
