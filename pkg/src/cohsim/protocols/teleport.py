"""Parallel teleportation gadgets and the checks built on them.

Register layout for gadget ``g``: message ``3g``, Alice's ancilla ``3g + 1``,
Bob's qubit ``3g + 2``.  Every gadget runs the same step between two cuts, so
stage ``i`` means the same thing for any number of gadgets.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..circuit import Circuit, Gate, Measure, simulate_stages
from ..errors import InvalidWernerParameter, SizeMismatch
from ..state import (
    Ensemble,
    QuantumState,
    holevo_chi,
    product,
    relative_entropy_of_coherence,
)
from .budget import BudgetLedger

STAGE_LABELS = ("init", "bell_h", "bell_cnot", "alice_cnot", "alice_h", "measure", "correct")
PRE_MEASUREMENT_STAGE = 4


def msg(g: int) -> int:
    return 3 * g


def anc(g: int) -> int:
    return 3 * g + 1


def bob(g: int) -> int:
    return 3 * g + 2


def _check_werner(werner: float) -> float:
    werner = float(werner)
    if not 0.0 <= werner <= 1.0:
        raise InvalidWernerParameter(f"Werner parameter {werner!r} outside [0, 1]")
    return werner


def werner_state(lam: float) -> QuantumState:
    """``lam |Phi+><Phi+| + (1 - lam) I/4``."""
    lam = _check_werner(lam)
    phi = np.zeros(4, dtype=np.complex128)
    phi[0] = phi[3] = 1 / np.sqrt(2)
    rho = lam * np.outer(phi, phi.conj()) + (1 - lam) * np.eye(4) / 4
    return QuantumState.mixed(rho)


def build_teleportation(n_gadgets: int, message: QuantumState | None = None, werner: float = 1.0) -> Circuit:
    """Circuit for ``n_gadgets`` teleportations run side by side.

    With ``werner < 1`` the Bell-pair gates are left out and the two resource
    stages stay empty: the imperfect pair must come with the input state
    (see :func:`teleportation_input`).
    """
    werner = _check_werner(werner)
    if n_gadgets < 1:
        raise SizeMismatch("need at least one teleportation gadget")
    if message is not None and message.qubit_count != n_gadgets:
        raise SizeMismatch(f"{message.qubit_count}-qubit message for {n_gadgets} gadgets")
    gs = range(n_gadgets)
    c = Circuit(3 * n_gadgets)
    if werner == 1.0:
        for g in gs:
            c.gate("h", anc(g))
        c.cut("bell_h")
        for g in gs:
            c.gate("cnot", anc(g), bob(g))
        c.cut("bell_cnot")
    else:
        c.cut("resource")
        c.cut("resource")
    for g in gs:
        c.gate("cnot", msg(g), anc(g))
    c.cut("alice_cnot")
    for g in gs:
        c.gate("h", msg(g))
    c.cut("alice_h")
    for g in gs:
        c.append(Measure((msg(g), anc(g))))
    c.cut("measure")
    # classically controlled X then Z on Bob, compiled as coherent control
    for g in gs:
        c.gate("cnot", anc(g), bob(g))
        c.gate("cz", msg(g), bob(g))
    c.cut("correct")
    return c


def teleportation_input(message: QuantumState, werner: float = 1.0) -> QuantumState:
    """Message interleaved with the per-gadget resource registers."""
    werner = _check_werner(werner)
    n = message.qubit_count
    if werner == 1.0:
        resource = QuantumState.zeros(2 * n)
    else:
        resource = product(*([werner_state(werner)] * n))
    full = product(message, resource)
    order = []
    for g in range(n):
        order += [g, n + 2 * g, n + 2 * g + 1]
    return full.permuted(order)


def run_teleportation(n_gadgets: int, message: QuantumState, werner: float = 1.0, *, pure_path: bool = False):
    """Simulate the gadgets; ``pure_path`` stops before the measurement layer."""
    circuit = build_teleportation(n_gadgets, message, werner)
    if pure_path:
        circuit = circuit.truncated_before_measure()
    return simulate_stages(circuit, teleportation_input(message, werner))


def verify_stage_decomposition(n_gadgets: int, message: QuantumState, *, pure_path: bool = False) -> list[float]:
    """Per-stage residual |C_i(message) - n C_i(|0>) - C_r(message)|."""
    if not message.is_pure:
        raise ValueError("stage decomposition is stated for pure messages")
    profile, _ = run_teleportation(n_gadgets, message, pure_path=pure_path)
    single, _ = run_teleportation(1, QuantumState.zeros(1), pure_path=pure_path)
    c_msg = relative_entropy_of_coherence(message)
    return [
        abs(a - n_gadgets * b - c_msg)
        for a, b in zip(profile.totals, single.totals)
    ]


def teleportation_ledger(message: QuantumState, werner: float = 1.0) -> BudgetLedger:
    n = message.qubit_count
    if werner == 1.0:
        c_pair = 1.0
    else:
        c_pair = relative_entropy_of_coherence(werner_state(werner))
    return BudgetLedger(relative_entropy_of_coherence(message), n * c_pair, (4,) * n)


class HolevoReport(NamedTuple):
    chi_in: float
    chi_out: float
    max_intermediate: float


def holevo_invariance(ensemble: Ensemble) -> HolevoReport:
    """Teleport every member and compare the Holevo quantity before and after.

    ``max_intermediate`` is the largest global coherence any member reaches at
    any stage, which can exceed ``chi_in`` by a wide margin.
    """
    k = ensemble.qubit_count
    outputs = []
    peak = 0.0
    for p, member in ensemble.members:
        profile, states = run_teleportation(k, member)
        peak = max(peak, profile.peak.bits)
        outputs.append((p, states[-1].state.reduced([bob(g) for g in range(k)])))
    return HolevoReport(holevo_chi(ensemble), holevo_chi(Ensemble(outputs)), peak)
