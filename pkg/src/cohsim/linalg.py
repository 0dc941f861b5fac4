"""Dense complex kernel shared by the state and circuit layers.

Matrices are plain square ``numpy`` arrays.  Qubit 0 is the most significant
bit of a basis index, so ``|q0 q1 ... q_{n-1}>`` reads left to right.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, InvalidDistribution, NotHermitian

HERMITIAN_TOL = 1e-10
# probabilities this far below zero are treated as round-off
NEG_PROB_TOL = 1e-12
SUM_TOL = 1e-6

__all__ = [
    "tensor",
    "partial_trace",
    "partial_trace_pure",
    "hermitian_eigenvalues",
    "shannon_entropy",
    "binary_entropy",
    "permute_qubits",
    "qubits_of_dim",
]


def _square(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"{what} must be square, got shape {a.shape}")
    return a


def qubits_of_dim(dim: int) -> int:
    """Number of qubits for a Hilbert-space dimension; raises unless a power of two."""
    if dim < 1 or dim & (dim - 1):
        raise DimensionMismatch(f"dimension {dim} is not a power of two")
    return dim.bit_length() - 1


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two square matrices."""
    return np.kron(_square(a), _square(b))


def _check_keep(keep: Sequence[int], n: int) -> list[int]:
    keep = [int(q) for q in keep]
    if not keep:
        raise IndexOutOfRange("keep must name at least one qubit")
    for q in keep:
        if q < 0 or q >= n:
            raise IndexOutOfRange(f"qubit index {q} outside register of {n} qubits")
    if any(b <= a for a, b in zip(keep, keep[1:])):
        raise IndexOutOfRange(f"keep indices must be strictly increasing, got {keep}")
    return keep


def partial_trace(rho: np.ndarray, qubit_count: int, keep: Sequence[int]) -> np.ndarray:
    """Reduce an ``qubit_count``-qubit density matrix onto the qubits in ``keep``."""
    rho = _square(rho, "rho")
    n = qubits_of_dim(rho.shape[0])
    if n != qubit_count:
        raise DimensionMismatch(f"dimension {rho.shape[0]} does not match {qubit_count} qubits")
    keep = _check_keep(keep, n)
    if len(keep) == n:
        return rho.copy()
    t = rho.reshape((2,) * (2 * n))
    # one letter per row axis, one per column axis; traced qubits share a letter
    letters = [chr(ord("a") + i) for i in range(2 * n)]
    row = letters[:n]
    col = [letters[n + q] if q in keep else letters[q] for q in range(n)]
    out = [row[q] for q in keep] + [col[q] for q in keep]
    spec = "".join(row) + "".join(col) + "->" + "".join(out)
    d = 1 << len(keep)
    return np.einsum(spec, t).reshape(d, d)


def partial_trace_pure(vec: np.ndarray, qubit_count: int, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix of a pure state, without forming the full projector."""
    vec = np.asarray(vec, dtype=np.complex128)
    n = qubits_of_dim(vec.shape[0])
    if n != qubit_count:
        raise DimensionMismatch(f"length {vec.shape[0]} does not match {qubit_count} qubits")
    keep = _check_keep(keep, n)
    rest = [q for q in range(n) if q not in keep]
    psi = np.transpose(vec.reshape((2,) * n), keep + rest).reshape(1 << len(keep), -1)
    return psi @ psi.conj().T


def permute_qubits(data: np.ndarray, order: Sequence[int]) -> np.ndarray:
    """Reorder qubits: new qubit ``k`` is old qubit ``order[k]``.

    Accepts a statevector or a density matrix.
    """
    data = np.asarray(data)
    n = qubits_of_dim(data.shape[0])
    order = list(order)
    if sorted(order) != list(range(n)):
        raise IndexOutOfRange(f"{order} is not a permutation of {n} qubits")
    if data.ndim == 1:
        return np.ascontiguousarray(np.transpose(data.reshape((2,) * n), order).reshape(-1))
    axes = order + [n + q for q in order]
    dim = data.shape[0]
    return np.ascontiguousarray(np.transpose(data.reshape((2,) * (2 * n)), axes).reshape(dim, dim))


def hermitian_eigenvalues(a: np.ndarray, *, clamp: bool = False) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, in descending order.

    With ``clamp`` set, eigenvalues in ``[-1e-12, 0)`` are zeroed and the
    spectrum is rescaled back to the trace, so entropies never see spurious
    negative weight.
    """
    a = _square(a)
    asym = np.max(np.abs(a - a.conj().T))
    if asym > HERMITIAN_TOL:
        raise NotHermitian(f"matrix deviates from Hermitian by {asym:.3e}")
    w = np.linalg.eigvalsh(a)[::-1].copy()
    if clamp:
        tiny = (w < 0) & (w >= -NEG_PROB_TOL)
        if tiny.any():
            trace = float(np.real(np.trace(a)))
            w[tiny] = 0.0
            total = w.sum()
            if total > 0:
                w *= trace / total
    return w


def shannon_entropy(p) -> float:
    """Shannon entropy in bits, with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=np.float64).ravel()
    if p.size == 0:
        raise InvalidDistribution("empty probability vector")
    if not np.all(np.isfinite(p)):
        raise InvalidDistribution("probability vector contains non-finite entries")
    if p.min() < -NEG_PROB_TOL:
        raise InvalidDistribution(f"negative probability {p.min():.3e}")
    total = p.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise InvalidDistribution(f"probabilities sum to {total!r}")
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    nz = p[p > 0]
    h = float(-np.sum(nz * np.log2(nz)))
    return max(h, 0.0) + 0.0


def binary_entropy(x: float) -> float:
    return shannon_entropy([x, 1.0 - x])
