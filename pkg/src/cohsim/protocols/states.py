"""W and GHZ resource states, plus circuits that prepare them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..circuit import Circuit, Gate
from ..errors import InvalidSize
from ..state import QuantumState


@dataclass(frozen=True)
class BlochState:
    """``cos(theta/2)|0> + e^{i gamma} sin(theta/2)|1>``."""

    theta: float
    gamma: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi + 1e-12:
            raise ValueError(f"theta {self.theta!r} outside [0, pi]")
        if not 0.0 <= self.gamma < 2 * np.pi:
            raise ValueError(f"gamma {self.gamma!r} outside [0, 2pi)")

    @classmethod
    def from_phi(cls, phi: float) -> "BlochState":
        """Real state ``cos(phi)|0> + sin(phi)|1>`` with ``phi`` in [0, pi/2]."""
        if not -1e-12 <= phi <= np.pi / 2 + 1e-12:
            raise ValueError(f"phi {phi!r} outside [0, pi/2]")
        return cls(float(np.clip(2.0 * phi, 0.0, np.pi)), 0.0)

    def state(self) -> QuantumState:
        amp = np.array(
            [np.cos(self.theta / 2), np.exp(1j * self.gamma) * np.sin(self.theta / 2)],
            dtype=np.complex128,
        )
        return QuantumState.pure(amp)


def prepare_w(n: int) -> QuantumState:
    if n < 2:
        raise InvalidSize(f"W state needs n >= 2, got {n}")
    vec = np.zeros(1 << n, dtype=np.complex128)
    for k in range(n):
        vec[1 << (n - 1 - k)] = 1.0 / np.sqrt(n)
    return QuantumState.pure(vec)


def prepare_ghz(n: int) -> QuantumState:
    if n < 1:
        raise InvalidSize(f"GHZ state needs n >= 1, got {n}")
    vec = np.zeros(1 << n, dtype=np.complex128)
    vec[0] = vec[-1] = 1.0 / np.sqrt(2)
    return QuantumState.pure(vec)


def ry(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _controlled_ry(circuit: Circuit, angle: float, control: int, target: int) -> None:
    # CRy(a) = CNOT . Ry(-a/2) . CNOT . Ry(a/2) on the target
    circuit.append(Gate("u", ry(angle / 2), (target,)))
    circuit.gate("cnot", control, target)
    circuit.append(Gate("u", ry(-angle / 2), (target,)))
    circuit.gate("cnot", control, target)


def w_circuit(n: int) -> Circuit:
    """Prepare |W_n> from |0...0> with one rotation cascade per qubit."""
    if n < 2:
        raise InvalidSize(f"W state needs n >= 2, got {n}")
    c = Circuit(n)
    c.gate("x", 0).cut("excite")
    for k in range(n - 1):
        # leave amplitude 1/sqrt(n) on qubit k, pass the rest to k + 1
        angle = 2 * np.arccos(np.sqrt(1.0 / (n - k)))
        _controlled_ry(c, angle, k, k + 1)
        c.gate("cnot", k + 1, k)
        c.cut(f"spread{k}")
    return c


def ghz_circuit(n: int) -> Circuit:
    if n < 1:
        raise InvalidSize(f"GHZ state needs n >= 1, got {n}")
    c = Circuit(n)
    c.gate("h", 0).cut("h")
    for k in range(1, n):
        c.gate("cnot", k - 1, k).cut(f"cnot{k}")
    return c
