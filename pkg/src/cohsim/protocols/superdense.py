"""Two-qubit superdense coding."""

from __future__ import annotations

import numpy as np

from ..circuit import Circuit, Measure, final_state
from ..state import Ensemble, QuantumState

MESSAGES = ((0, 0), (0, 1), (1, 0), (1, 1))


def _check_bits(bits) -> tuple[int, int]:
    b1, b2 = (int(b) for b in bits)
    if b1 not in (0, 1) or b2 not in (0, 1):
        raise ValueError(f"superdense message must be two bits, got {bits!r}")
    return b1, b2


def _bell_and_encode(c: Circuit, b1: int, b2: int) -> None:
    c.gate("h", 0).cut("bell_h")
    c.gate("cnot", 0, 1).cut("bell_cnot")
    # Alice applies Z^b1 X^b2 to qubit 0
    if b2:
        c.gate("x", 0)
    if b1:
        c.gate("z", 0)
    c.cut("encode")


def build_superdense(bits) -> Circuit:
    b1, b2 = _check_bits(bits)
    c = Circuit(2)
    _bell_and_encode(c, b1, b2)
    c.gate("cnot", 0, 1).cut("decode_cnot")
    c.gate("h", 0).cut("decode_h")
    c.append(Measure((0, 1))).cut("measure")
    return c


def decoded_distribution(bits) -> np.ndarray:
    """Outcome probabilities over ``00, 01, 10, 11`` after decoding."""
    state = final_state(build_superdense(bits), QuantumState.zeros(2))
    return state.diagonal()


def encoded_state(bits) -> QuantumState:
    b1, b2 = _check_bits(bits)
    c = Circuit(2)
    _bell_and_encode(c, b1, b2)
    return final_state(c, QuantumState.zeros(2))


def superdense_ensemble() -> Ensemble:
    """The four encoded Bell states with equal weights."""
    return Ensemble((0.25, encoded_state(m)) for m in MESSAGES)
