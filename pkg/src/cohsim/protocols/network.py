"""Entanglement swapping and repeater chains.

A chain of ``N`` links uses ``2N`` qubits; link ``j`` is the pair
``(2j, 2j + 1)`` and intermediate node ``j`` (1..N-1) holds qubits
``2j - 1`` and ``2j``.  Swaps run in rounds; a sequential schedule has one
swap per round, ``Parallel(s)`` has ``s``.  Each round creates the Bell pairs
it consumes right before it starts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..circuit import Circuit, Measure, simulate_stages
from ..errors import InvalidParams, TooLarge
from ..state import QuantumState, product, relative_entropy_of_coherence
from .branching import branch_decompose, branch_coherence, branching_entropy

log = logging.getLogger(__name__)

MAX_QUBITS = 12
PHI_PLUS = np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2)


@dataclass(frozen=True)
class RepeaterSchedule:
    links: int
    mode: str = "sequential"
    s: int = 1

    def __post_init__(self):
        mode = self.mode.lower()
        object.__setattr__(self, "mode", mode)
        if self.links < 2:
            raise InvalidParams(f"a repeater chain needs at least 2 links, got {self.links}")
        if mode == "sequential":
            object.__setattr__(self, "s", 1)
        elif mode == "parallel":
            if not 1 <= self.s <= self.links - 1:
                raise InvalidParams(f"parallel width s={self.s} outside 1..{self.links - 1}")
        else:
            raise InvalidParams(f"unknown schedule mode {self.mode!r}")

    @classmethod
    def sequential(cls, links: int) -> "RepeaterSchedule":
        return cls(links, "sequential", 1)

    @classmethod
    def parallel(cls, links: int, s: int) -> "RepeaterSchedule":
        return cls(links, "parallel", s)

    def rounds(self) -> list[list[int]]:
        nodes = list(range(1, self.links))
        return [nodes[i:i + self.s] for i in range(0, len(nodes), self.s)]


def build_repeater(schedule: RepeaterSchedule) -> Circuit:
    c = Circuit(2 * schedule.links)
    made: set[int] = set()
    for r, nodes in enumerate(schedule.rounds()):
        tag = "" if r == 0 else f"_{r}"
        # node j joins links j - 1 and j
        fresh = [j for j in range(nodes[0] - 1, nodes[-1] + 1) if j not in made]
        made.update(fresh)
        for j in fresh:
            c.gate("h", 2 * j)
        c.cut("bell_h" + tag)
        for j in fresh:
            c.gate("cnot", 2 * j, 2 * j + 1)
        c.cut("bell_cnot" + tag)
        for j in nodes:
            c.gate("cnot", 2 * j - 1, 2 * j)
        c.cut("rotate_cnot" + tag)
        for j in nodes:
            c.gate("h", 2 * j - 1)
        c.cut("rotate_h" + tag)
        for j in nodes:
            c.append(Measure((2 * j - 1, 2 * j)))
        c.cut("measure" + tag)
        # Pauli frames of every swap in the round land on the round's far end
        end = 2 * nodes[-1] + 1
        for j in nodes:
            c.gate("cnot", 2 * j, end)
            c.gate("cz", 2 * j - 1, end)
        c.cut("correct" + tag)
    return c


def build_swap() -> Circuit:
    """Swap on qubits A, B, C, D: Bell measurement on B, C entangles A with D."""
    return build_repeater(RepeaterSchedule.sequential(2))


PRE_MEASUREMENT_STAGE = 4


def bell_fidelity(rho: np.ndarray) -> float:
    return float(np.real(PHI_PLUS.conj() @ rho @ PHI_PLUS))


class SwapReport(NamedTuple):
    resource_coherence: float
    pre_measurement: float
    branching: float
    payload_average: float
    end_fidelity: float
    end_marginals: tuple[np.ndarray, np.ndarray]


def swap_report() -> SwapReport:
    """Coherence bookkeeping for one swap, decomposed over the Bell outcomes."""
    circuit = build_swap()
    profile, states = simulate_stages(circuit, QuantumState.zeros(4))
    resource = states[2].state
    pre = states[PRE_MEASUREMENT_STAGE].state
    spec = branch_decompose(pre, [1, 2])
    _, rhs = branch_coherence(spec)
    final = states[-1].state
    ad = final.reduced([0, 3])
    return SwapReport(
        resource_coherence=relative_entropy_of_coherence(resource),
        pre_measurement=relative_entropy_of_coherence(pre),
        branching=branching_entropy(pre, [1, 2]),
        payload_average=rhs - branching_entropy(pre, [1, 2]),
        end_fidelity=bell_fidelity(ad.matrix),
        end_marginals=(final.reduced([0]).matrix, final.reduced([3]).matrix),
    )


class RepeaterResult(NamedTuple):
    measured_peak: float
    estimate: float


def resource_window_coherence(schedule: RepeaterSchedule) -> float:
    """Coherence of the Bell pairs live during the widest round."""
    pairs = max(len(nodes) for nodes in schedule.rounds()) + 1
    bell = QuantumState.pure(PHI_PLUS)
    return relative_entropy_of_coherence(product(*([bell] * pairs)))


def repeater_run(schedule: RepeaterSchedule) -> RepeaterResult:
    """Simulated peak coherence against the ``C_r(sigma_R) + 2s`` estimate.

    An estimate the simulation exceeds is logged as a warning rather than
    raised, since the estimate is a heuristic.
    """
    if 2 * schedule.links > MAX_QUBITS:
        raise TooLarge(f"{2 * schedule.links} qubits exceeds the {MAX_QUBITS}-qubit simulation limit")
    profile, _ = simulate_stages(
        build_repeater(schedule), QuantumState.zeros(2 * schedule.links), keep_states=False
    )
    peak = profile.peak.bits
    estimate = resource_window_coherence(schedule) + 2 * schedule.s
    if peak > estimate + 1e-9:
        log.warning("repeater peak %.12f exceeds estimate %.12f for %s", peak, estimate, schedule)
    return RepeaterResult(peak, estimate)
