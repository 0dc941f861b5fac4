"""Quantum states, dephasing, and the entropic quantities built on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import IndexOutOfRange, InvalidState, MixedDimensions
from .linalg import (
    hermitian_eigenvalues,
    partial_trace,
    partial_trace_pure,
    permute_qubits,
    qubits_of_dim,
    shannon_entropy,
)

NORM_TOL = 1e-9
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
# coherence values this far below zero are reported as zero
COHERENCE_FLOOR = 1e-9

ALL = "all"


class QuantumState:
    """A pure statevector or a density matrix over ``qubit_count`` qubits.

    Build with :meth:`pure` or :meth:`mixed`.  Instances are treated as
    immutable; operations return new states.
    """

    __slots__ = ("qubit_count", "_data", "_pure")

    def __init__(self, data: np.ndarray, pure: bool, *, check: bool = True):
        data = np.ascontiguousarray(data, dtype=np.complex128)
        if pure:
            if data.ndim != 1:
                raise InvalidState("pure state needs a 1-d amplitude vector")
        elif data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise InvalidState(f"density matrix must be square, got {data.shape}")
        try:
            n = qubits_of_dim(data.shape[0])
        except ValueError as exc:
            raise InvalidState(str(exc)) from None
        if n < 1:
            raise InvalidState("a state needs at least one qubit")
        self.qubit_count = n
        self._data = data
        self._pure = pure
        if check:
            self.validate()

    @classmethod
    def pure(cls, amplitudes, *, check: bool = True) -> "QuantumState":
        return cls(amplitudes, True, check=check)

    @classmethod
    def mixed(cls, rho, *, check: bool = True) -> "QuantumState":
        return cls(rho, False, check=check)

    @classmethod
    def basis(cls, bits: str | Sequence[int]) -> "QuantumState":
        """Computational basis state, e.g. ``basis("010")``."""
        bits = [int(b) for b in bits]
        if not bits or any(b not in (0, 1) for b in bits):
            raise InvalidState(f"bad basis label {bits!r}")
        vec = np.zeros(1 << len(bits), dtype=np.complex128)
        vec[int("".join(map(str, bits)), 2)] = 1.0
        return cls(vec, True, check=False)

    @classmethod
    def zeros(cls, n: int) -> "QuantumState":
        return cls.basis([0] * n)

    def validate(self) -> None:
        if self._pure:
            norm = float(np.vdot(self._data, self._data).real)
            if abs(norm - 1.0) > NORM_TOL:
                raise InvalidState(f"amplitudes have squared norm {norm!r}")
            return
        rho = self._data
        asym = float(np.max(np.abs(rho - rho.conj().T)))
        if asym > HERMITIAN_TOL:
            raise InvalidState(f"density matrix deviates from Hermitian by {asym:.3e}")
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > NORM_TOL:
            raise InvalidState(f"density matrix has trace {tr!r}")
        if self.qubit_count <= 6:
            wmin = float(np.linalg.eigvalsh(rho)[0])
            if wmin < -PSD_TOL:
                raise InvalidState(f"density matrix has eigenvalue {wmin:.3e}")

    @property
    def is_pure(self) -> bool:
        return self._pure

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    @property
    def vector(self) -> np.ndarray:
        if not self._pure:
            raise InvalidState("mixed state has no statevector")
        return self._data

    @property
    def matrix(self) -> np.ndarray:
        """The density matrix (computed for pure states)."""
        if self._pure:
            return np.outer(self._data, self._data.conj())
        return self._data

    def diagonal(self) -> np.ndarray:
        if self._pure:
            return np.abs(self._data) ** 2
        return np.real(np.diagonal(self._data)).copy()

    def to_mixed(self) -> "QuantumState":
        if not self._pure:
            return self
        return QuantumState(self.matrix, False, check=False)

    def trace(self) -> float:
        if self._pure:
            return float(np.vdot(self._data, self._data).real)
        return float(np.trace(self._data).real)

    def reduced(self, keep: Sequence[int]) -> "QuantumState":
        if self._pure:
            rho = partial_trace_pure(self._data, self.qubit_count, keep)
        else:
            rho = partial_trace(self._data, self.qubit_count, keep)
        return QuantumState(rho, False, check=False)

    def permuted(self, order: Sequence[int]) -> "QuantumState":
        return QuantumState(permute_qubits(self._data, order), self._pure, check=False)

    def __matmul__(self, other: "QuantumState") -> "QuantumState":
        return product(self, other)

    def __repr__(self) -> str:
        kind = "pure" if self._pure else "mixed"
        return f"QuantumState({kind}, qubits={self.qubit_count})"


def product(*states: QuantumState) -> QuantumState:
    """Tensor product; stays pure when every factor is pure."""
    if not states:
        raise InvalidState("product of no states")
    if all(s.is_pure for s in states):
        vec = states[0].vector
        for s in states[1:]:
            vec = np.kron(vec, s.vector)
        return QuantumState(vec, True, check=False)
    rho = states[0].matrix
    for s in states[1:]:
        rho = np.kron(rho, s.matrix)
    return QuantumState(rho, False, check=False)


def _targets(targets, n: int) -> list[int]:
    if targets is None or (isinstance(targets, str) and targets == ALL):
        return list(range(n))
    targets = sorted({int(q) for q in targets})
    if not targets:
        raise IndexOutOfRange("dephasing needs at least one target qubit")
    for q in targets:
        if q < 0 or q >= n:
            raise IndexOutOfRange(f"qubit index {q} outside register of {n} qubits")
    return targets


def dephase(state: QuantumState, targets: Iterable[int] | str = ALL) -> QuantumState:
    """Completely dephase ``targets`` in the computational basis.

    Off-diagonal elements between basis states that differ on any target
    qubit are removed.  Always returns a mixed state.
    """
    n = state.qubit_count
    qs = _targets(targets, n)
    if len(qs) == n:
        return QuantumState(np.diag(state.diagonal()).astype(np.complex128), False, check=False)
    rho = np.array(state.matrix, dtype=np.complex128, order="C")
    _kernels.scale_offdiag(rho, _kernels.qubit_mask(qs, n), 0.0)
    return QuantumState(rho, False, check=False)


def partial_dephase(state: QuantumState, lam: float, target: int) -> QuantumState:
    """The noisy dephasing map ``(1 - lam) rho + lam * dephase(rho, {target})``."""
    n = state.qubit_count
    (q,) = _targets([target], n)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"dephasing strength {lam!r} outside [0, 1]")
    if lam == 0.0:
        return state
    rho = np.array(state.matrix, dtype=np.complex128, order="C")
    _kernels.scale_offdiag(rho, _kernels.qubit_mask([q], n), 1.0 - lam)
    return QuantumState(rho, False, check=False)


def von_neumann_entropy(state: QuantumState) -> float:
    """S(rho) in bits; exactly zero for pure states."""
    if state.is_pure:
        return 0.0
    return shannon_entropy(hermitian_eigenvalues(state.matrix, clamp=True))


def relative_entropy_of_coherence(state: QuantumState) -> float:
    """C_r(rho) = S(diag(rho)) - S(rho), in bits."""
    c = shannon_entropy(state.diagonal()) - von_neumann_entropy(state)
    if -COHERENCE_FLOOR <= c < 0.0:
        return 0.0
    return c


coherence = relative_entropy_of_coherence


def reduced_coherences(state: QuantumState) -> list[float]:
    """Coherence of each single-qubit marginal, in qubit order."""
    return [relative_entropy_of_coherence(state.reduced([q])) for q in range(state.qubit_count)]


@dataclass(frozen=True)
class Ensemble:
    """Weighted states ``{p_x, rho_x}`` on a common register."""

    members: tuple[tuple[float, QuantumState], ...]

    def __init__(self, members: Iterable[tuple[float, QuantumState]]):
        members = tuple((float(p), s) for p, s in members)
        if not members:
            raise InvalidState("ensemble has no members")
        n = members[0][1].qubit_count
        for p, s in members:
            if s.qubit_count != n:
                raise MixedDimensions(
                    f"ensemble mixes {n}-qubit and {s.qubit_count}-qubit states"
                )
            if not 0.0 < p <= 1.0:
                raise InvalidState(f"ensemble weight {p!r} outside (0, 1]")
        total = sum(p for p, _ in members)
        if abs(total - 1.0) > NORM_TOL:
            raise InvalidState(f"ensemble weights sum to {total!r}")
        object.__setattr__(self, "members", members)

    @property
    def qubit_count(self) -> int:
        return self.members[0][1].qubit_count

    def average(self) -> QuantumState:
        rho = sum(p * s.matrix for p, s in self.members)
        return QuantumState(rho, False, check=False)


def holevo_chi(ensemble: Ensemble) -> float:
    """Holevo quantity S(sum p rho) - sum p S(rho)."""
    if len(ensemble.members) == 1:
        return 0.0
    chi = von_neumann_entropy(ensemble.average()) - sum(
        p * von_neumann_entropy(s) for p, s in ensemble.members
    )
    return max(chi, 0.0) if chi > -COHERENCE_FLOOR else chi
