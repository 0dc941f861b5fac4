"""Coherence of branch superpositions ``sum_k sqrt(p_k) |k>_C |psi_k>_Q``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from ..errors import DimensionMismatch, InvalidDistribution
from ..linalg import permute_qubits, shannon_entropy
from ..state import QuantumState, relative_entropy_of_coherence

PROB_TOL = 1e-9


@dataclass(frozen=True)
class BranchSpec:
    probs: tuple[float, ...]
    payloads: tuple[QuantumState, ...]

    def __init__(self, probs: Sequence[float], payloads: Sequence[QuantumState]):
        probs = tuple(float(p) for p in probs)
        payloads = tuple(payloads)
        if len(probs) != len(payloads) or not probs:
            raise DimensionMismatch(f"{len(probs)} probabilities for {len(payloads)} payloads")
        if min(probs) < 0 or abs(sum(probs) - 1.0) > PROB_TOL:
            raise InvalidDistribution(f"branch probabilities {probs} are not a distribution")
        nq = payloads[0].qubit_count
        for psi in payloads:
            if not psi.is_pure:
                raise DimensionMismatch("branch payloads must be pure states")
            if psi.qubit_count != nq:
                raise DimensionMismatch("branch payloads must share one register")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "payloads", payloads)

    @property
    def m(self) -> int:
        return len(self.probs)

    @property
    def payload_qubits(self) -> int:
        return self.payloads[0].qubit_count


class BranchCoherence(NamedTuple):
    direct: float
    identity_rhs: float


def control_qubits_for(m: int) -> int:
    return max(1, int(np.ceil(np.log2(m)))) if m > 1 else 1


def assemble_branch_state(spec: BranchSpec, control_qubits: int | None = None) -> QuantumState:
    """Build ``sum_k sqrt(p_k) |k>|psi_k>`` with the control register first."""
    c = control_qubits_for(spec.m) if control_qubits is None else int(control_qubits)
    if c < 1 or (1 << c) < spec.m:
        raise DimensionMismatch(f"{c} control qubits cannot index {spec.m} branches")
    dq = 1 << spec.payload_qubits
    vec = np.zeros((1 << c) * dq, dtype=np.complex128)
    for k, (p, psi) in enumerate(zip(spec.probs, spec.payloads)):
        vec[k * dq:(k + 1) * dq] = np.sqrt(p) * psi.vector
    return QuantumState.pure(vec)


def branch_coherence(spec: BranchSpec, control_qubits: int | None = None) -> BranchCoherence:
    """Coherence of the assembled state against H(p) + sum_k p_k C_r(psi_k)."""
    direct = relative_entropy_of_coherence(assemble_branch_state(spec, control_qubits))
    rhs = shannon_entropy(spec.probs) + sum(
        p * relative_entropy_of_coherence(psi) for p, psi in zip(spec.probs, spec.payloads)
    )
    return BranchCoherence(direct, rhs)


def branch_decompose(state: QuantumState, control: Sequence[int]) -> BranchSpec:
    """Split a pure state into branches labelled by the ``control`` qubits' basis values.

    Branches with zero weight are dropped, so ``m`` counts only outcomes that
    can occur.
    """
    if not state.is_pure:
        raise DimensionMismatch("branch decomposition needs a pure state")
    n = state.qubit_count
    control = list(control)
    rest = [q for q in range(n) if q not in control]
    if not control or not rest:
        raise DimensionMismatch("control and payload registers must both be nonempty")
    vec = permute_qubits(state.vector, control + rest).reshape(1 << len(control), -1)
    probs, payloads = [], []
    for row in vec:
        p = float(np.vdot(row, row).real)
        if p > 1e-15:
            probs.append(p)
            payloads.append(QuantumState.pure(row / np.sqrt(p), check=False))
    total = sum(probs)
    return BranchSpec([p / total for p in probs], payloads)


def branching_entropy(state: QuantumState, control: Sequence[int]) -> float:
    """H of the outcome distribution on ``control``: the branching term of the identity."""
    return shannon_entropy(state.reduced(sorted(control)).diagonal())
