"""Seeded random sampling of unitaries and states.

Every sampler takes an explicit (seed, counter...) pair and builds its own
generator, so results depend only on those integers -- never on call order or
thread scheduling.
"""

from __future__ import annotations

import numpy as np

from .registers import DensityOperator, register


def task_rng(seed: int, *counters: int) -> np.random.Generator:
    """Independent generator for a (seed, counter...) task key."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, *[int(c) & 0xFFFFFFFF for c in counters]])


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via Ginibre + QR with phase-fixed R diagonal."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    ph = np.diag(r).copy()
    ph /= np.abs(ph)
    return q * ph


def haar_state_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    if d < 1:
        raise ValueError("dimension must be >= 1")
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_density_matrix(d: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    if not (1 <= rank <= d):
        raise ValueError("rank must be in [1, d]")
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def sample_haar_unitary(d: int, seed: int, counter: int = 0) -> np.ndarray:
    return haar_unitary(d, task_rng(seed, counter))


def sample_pure_state(n: int, seed: int, counter: int = 0) -> DensityOperator:
    v = haar_state_vector(2 ** n, task_rng(seed, counter))
    return DensityOperator(register(n), np.outer(v, v.conj()))


def sample_density(n: int, rank: int, seed: int, counter: int = 0) -> DensityOperator:
    m = random_density_matrix(2 ** n, rank, task_rng(seed, counter))
    return DensityOperator(register(n), m)
