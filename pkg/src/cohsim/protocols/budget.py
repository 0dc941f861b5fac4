"""Message + resource + branching coherence budget for LOCC protocols."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..circuit import Circuit, Measure, StageCut, simulate_stages
from ..errors import LayerOutOfRange
from ..state import QuantumState

BUDGET_TOL = 1e-9


@dataclass(frozen=True)
class BudgetLedger:
    message_coherence: float
    resource_coherence: float
    layer_alphabets: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "layer_alphabets", tuple(int(m) for m in self.layer_alphabets))
        if self.message_coherence < 0 or self.resource_coherence < 0:
            raise ValueError("coherences in a ledger must be nonnegative")
        if any(m < 2 for m in self.layer_alphabets):
            raise ValueError("measurement alphabets must have at least two outcomes")


def budget_bound(ledger: BudgetLedger, up_to_layer: int | None = None) -> float:
    """C_r(rho_M) + C_r(sigma_R) + sum of log2 m over the first ``up_to_layer`` layers."""
    layers = ledger.layer_alphabets
    if up_to_layer is None:
        up_to_layer = len(layers)
    if not 0 <= up_to_layer <= len(layers):
        raise LayerOutOfRange(f"layer {up_to_layer} outside 0..{len(layers)}")
    return (
        ledger.message_coherence
        + ledger.resource_coherence
        + float(sum(np.log2(m) for m in layers[:up_to_layer]))
    )


def stage_layer_counts(circuit: Circuit) -> list[int]:
    """Measurement layers chargeable at each stage.

    The branching a layer records is built coherently before its Measure, so
    a stage is charged for every layer up to and including the next segment
    (run of elements between cuts) that contains a Measure.
    """
    segments: list[int] = []
    count = 0
    for elem in circuit.elements:
        if isinstance(elem, Measure):
            count += 1
        elif isinstance(elem, StageCut):
            segments.append(count)
            count = 0
    # cumulative[i] = layers completed by stage i
    cumulative = [0]
    for c in segments:
        cumulative.append(cumulative[-1] + c)
    counts = []
    for i in range(len(cumulative)):
        nxt = next((j for j in range(i + 1, len(cumulative)) if segments[j - 1]), None)
        counts.append(cumulative[nxt] if nxt is not None else cumulative[i])
    return counts


class BudgetCheck(NamedTuple):
    stage_index: int
    coherence: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.coherence <= self.bound + BUDGET_TOL


def check_budget(
    circuit: Circuit, initial: QuantumState, ledger: BudgetLedger, profile=None
) -> list[BudgetCheck]:
    """Stage-by-stage comparison of measured coherence with the budget."""
    if profile is None:
        profile, _ = simulate_stages(circuit, initial, keep_states=False)
    counts = stage_layer_counts(circuit)
    return [
        BudgetCheck(rec.index, rec.total_coherence, budget_bound(ledger, counts[rec.index]))
        for rec in profile.stages
    ]
