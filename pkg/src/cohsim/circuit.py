"""Circuits, stage cuts, and the stage-resolved simulator."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from . import _kernels
from .errors import CohsimError, EmptyProfile, IndexOutOfRange, NonUnitaryGate, SizeMismatch
from .state import (
    QuantumState,
    dephase,
    partial_dephase,
    reduced_coherences,
    relative_entropy_of_coherence,
)

UNITARY_TOL = 1e-10
# stages within this of the maximum count as tied for the peak
PEAK_TIE_TOL = 1e-12

_S2 = 1 / np.sqrt(2)
STANDARD_GATES: dict[str, np.ndarray] = {
    "h": np.array([[_S2, _S2], [_S2, -_S2]], dtype=np.complex128),
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "s": np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    "t": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=np.complex128),
    "cnot": np.eye(4, dtype=np.complex128)[[0, 1, 3, 2]],
    "cz": np.diag([1, 1, 1, -1]).astype(np.complex128),
}
for _m in STANDARD_GATES.values():
    _m.flags.writeable = False


def unitarity_defect(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


@dataclass(frozen=True, eq=False)
class Gate:
    name: str
    unitary: np.ndarray
    targets: tuple[int, ...]

    def __post_init__(self):
        u = np.array(self.unitary, dtype=np.complex128)
        u.flags.writeable = False
        targets = tuple(int(q) for q in self.targets)
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "targets", targets)
        if u.shape not in ((2, 2), (4, 4)):
            raise NonUnitaryGate(f"gate {self.name!r} has unsupported shape {u.shape}")
        if u.shape[0] != 1 << len(targets):
            raise SizeMismatch(f"gate {self.name!r} on {len(targets)} qubits has a {u.shape} matrix")
        if len(set(targets)) != len(targets):
            raise IndexOutOfRange(f"gate {self.name!r} repeats a target qubit: {targets}")
        if any(q < 0 for q in targets):
            raise IndexOutOfRange(f"negative qubit index in {targets}")
        defect = unitarity_defect(u)
        if defect > UNITARY_TOL:
            raise NonUnitaryGate(f"gate {self.name!r} is not unitary (defect {defect:.3e})")

    @classmethod
    def named(cls, name: str, *targets: int) -> "Gate":
        return cls(name, STANDARD_GATES[name], targets)

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        return (
            self.name == other.name
            and self.targets == other.targets
            and np.array_equal(self.unitary, other.unitary)
        )

    __hash__ = None


@dataclass(frozen=True)
class Measure:
    """Non-selective computational-basis measurement (complete dephasing)."""

    targets: tuple[int, ...]

    def __post_init__(self):
        targets = tuple(sorted({int(q) for q in self.targets}))
        if not targets:
            raise IndexOutOfRange("measure needs at least one target")
        if targets[0] < 0:
            raise IndexOutOfRange(f"negative qubit index in {targets}")
        object.__setattr__(self, "targets", targets)

    @property
    def alphabet(self) -> int:
        return 1 << len(self.targets)


@dataclass(frozen=True)
class Dephase:
    """Partial dephasing ``(1 - lam) rho + lam * Delta_target(rho)`` on one qubit."""

    lam: float
    target: int

    def __post_init__(self):
        lam = float(self.lam)
        if not (0.0 <= lam <= 1.0):
            raise ValueError(f"dephasing strength {self.lam!r} outside [0, 1]")
        if int(self.target) < 0:
            raise IndexOutOfRange(f"negative qubit index {self.target}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "target", int(self.target))

    @property
    def targets(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True)
class StageCut:
    label: str = ""

    def __post_init__(self):
        label = str(self.label).strip()
        if any(c in label for c in "#\r\n"):
            raise ValueError(f"stage label {self.label!r} may not contain '#' or line breaks")
        object.__setattr__(self, "label", label)

    @property
    def targets(self) -> tuple[int, ...]:
        return ()


CircuitElement = Union[Gate, Measure, Dephase, StageCut]


@dataclass
class Circuit:
    qubit_count: int
    elements: list = field(default_factory=list)

    def __post_init__(self):
        if self.qubit_count < 1:
            raise SizeMismatch("a circuit needs at least one qubit")
        self.elements = list(self.elements)
        for pos, elem in enumerate(self.elements):
            _check_targets(elem, self.qubit_count, pos)

    def append(self, elem: CircuitElement) -> "Circuit":
        _check_targets(elem, self.qubit_count, len(self.elements))
        self.elements.append(elem)
        return self

    def extend(self, elems) -> "Circuit":
        for e in elems:
            self.append(e)
        return self

    def gate(self, name: str, *targets: int) -> "Circuit":
        return self.append(Gate.named(name, *targets))

    def cut(self, label: str = "") -> "Circuit":
        return self.append(StageCut(label))

    def truncated_before_measure(self) -> "Circuit":
        """Prefix ending at the last stage cut before the first Measure.

        Keeps a simulation on the pure-state path.
        """
        last_cut = 0
        for pos, elem in enumerate(self.elements):
            if isinstance(elem, Measure):
                break
            if isinstance(elem, StageCut):
                last_cut = pos + 1
        else:
            last_cut = len(self.elements)
        return Circuit(self.qubit_count, self.elements[:last_cut])

    def stage_labels(self) -> list[str]:
        return ["init"] + [e.label for e in self.elements if isinstance(e, StageCut)]


def _check_targets(elem, n: int, pos: int) -> None:
    if not isinstance(elem, (Gate, Measure, Dephase, StageCut)):
        raise TypeError(f"element {pos}: not a circuit element: {elem!r}")
    for q in elem.targets:
        if q >= n:
            err = IndexOutOfRange(f"element {pos}: qubit index {q} outside register of {n} qubits")
            err.position = pos
            raise err


def apply_element(state: QuantumState, elem: CircuitElement, qubit_count: int | None = None) -> QuantumState:
    """Apply one circuit element; Gate keeps pure states pure."""
    n = state.qubit_count
    if qubit_count is not None and qubit_count != n:
        raise SizeMismatch(f"state has {n} qubits, circuit has {qubit_count}")
    for q in elem.targets:
        if q >= n:
            raise IndexOutOfRange(f"qubit index {q} outside register of {n} qubits")
    if isinstance(elem, StageCut):
        return state
    if isinstance(elem, Measure):
        return dephase(state, elem.targets)
    if isinstance(elem, Dephase):
        return partial_dephase(state, elem.lam, elem.target)
    if isinstance(elem, Gate):
        u = elem.unitary
        if unitarity_defect(u) > UNITARY_TOL:
            raise NonUnitaryGate(f"gate {elem.name!r} is not unitary")
        if state.is_pure:
            vec = state.vector.copy()
            _apply_gate(vec, u, elem.targets, n)
            return QuantumState(vec, True, check=False)
        rho = np.array(state.matrix, dtype=np.complex128, order="C")
        flat = rho.reshape(-1)
        _apply_gate(flat, u, elem.targets, 2 * n)
        _apply_gate(flat, u.conj(), tuple(n + q for q in elem.targets), 2 * n)
        return QuantumState(rho, False, check=False)
    raise TypeError(f"not a circuit element: {elem!r}")


def _apply_gate(vec, u, targets, n):
    if len(targets) == 1:
        _kernels.apply_1q(vec, u, targets[0], n)
    else:
        _kernels.apply_2q(vec, u, targets[0], targets[1], n)


class StageRecord(NamedTuple):
    index: int
    label: str
    total_coherence: float
    per_qubit: tuple[float, ...]
    is_post_measurement: bool


class StageState(NamedTuple):
    stage_index: int
    state: QuantumState


class Peak(NamedTuple):
    stage_index: int
    bits: float


@dataclass
class CoherenceProfile:
    stages: list[StageRecord]

    @property
    def totals(self) -> list[float]:
        return [s.total_coherence for s in self.stages]

    @property
    def peak(self) -> Peak:
        return peak_coherence(self)

    def __len__(self) -> int:
        return len(self.stages)


def peak_coherence(profile: CoherenceProfile | Sequence[float]) -> Peak:
    """Stage with maximal total coherence; ties go to the earliest stage."""
    totals = profile.totals if isinstance(profile, CoherenceProfile) else list(profile)
    if not totals:
        raise EmptyProfile("cannot take the peak of an empty profile")
    best = max(totals)
    for i, c in enumerate(totals):
        if c >= best - PEAK_TIE_TOL:
            return Peak(i, best)
    raise AssertionError("unreachable")


def measurement_layers(circuit: Circuit) -> list[int]:
    """Outcome alphabet size of every Measure element, in circuit order."""
    return [e.alphabet for e in circuit.elements if isinstance(e, Measure)]


def _record(index, label, state, post) -> StageRecord:
    return StageRecord(
        index,
        label,
        relative_entropy_of_coherence(state),
        tuple(reduced_coherences(state)),
        post,
    )


def simulate_stages(
    circuit: Circuit, initial: QuantumState, *, keep_states: bool = True
) -> tuple[CoherenceProfile, list[StageState]]:
    """Run ``circuit`` on ``initial`` and record coherence at every stage cut.

    Stage 0 is the input; every StageCut adds one record.  Errors raised by an
    element carry its position in ``exc.position``.
    """
    if initial.qubit_count != circuit.qubit_count:
        raise SizeMismatch(
            f"input has {initial.qubit_count} qubits, circuit has {circuit.qubit_count}"
        )
    state = initial
    records = [_record(0, "init", state, False)]
    states = [StageState(0, state)] if keep_states else []
    measured = False
    for pos, elem in enumerate(circuit.elements):
        try:
            state = apply_element(state, elem, circuit.qubit_count)
        except CohsimError as exc:
            exc.position = pos
            exc.args = (f"element {pos}: {exc}",)
            raise
        if isinstance(elem, Measure):
            measured = True
        elif isinstance(elem, StageCut):
            idx = len(records)
            records.append(_record(idx, elem.label, state, measured))
            if keep_states:
                states.append(StageState(idx, state))
            measured = False
    return CoherenceProfile(records), states


def final_state(circuit: Circuit, initial: QuantumState) -> QuantumState:
    """State after every element, including any past the last stage cut."""
    state = initial
    for elem in circuit.elements:
        state = apply_element(state, elem, circuit.qubit_count)
    return state
