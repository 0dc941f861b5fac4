"""Seeded random states and unitaries for property checks."""

from __future__ import annotations

import numpy as np

from .state import QuantumState, product


def random_pure(n: int, rng: np.random.Generator) -> QuantumState:
    """Normalised complex Gaussian amplitudes (Haar-distributed direction)."""
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return QuantumState.pure(v / np.linalg.norm(v), check=False)


def random_mixed(n: int, rng: np.random.Generator, env: int | None = None) -> QuantumState:
    """Reduce a random pure state on ``n + env`` qubits onto its first ``n``.

    ``env`` defaults to a random size in ``0..n``, which covers pure,
    rank-deficient and full-rank cases.
    """
    if env is None:
        env = int(rng.integers(0, n + 1))
    if env == 0:
        return random_pure(n, rng).to_mixed()
    big = random_pure(n + env, rng)
    return big.reduced(list(range(n)))


def random_product_pure(n: int, rng: np.random.Generator) -> QuantumState:
    return product(*(random_pure(1, rng) for _ in range(n)))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR with the phase fix."""
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph
