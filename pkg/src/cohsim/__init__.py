"""Stage-resolved relative entropy of coherence for quantum circuits.

Qubit 0 is the most significant bit of a basis index.  Coherence is in bits.
"""

from .circuit import (
    Circuit,
    CoherenceProfile,
    Dephase,
    Gate,
    Measure,
    Peak,
    StageCut,
    StageRecord,
    final_state,
    measurement_layers,
    peak_coherence,
    simulate_stages,
)
from .dsl import ParseDiagnostic, parse_circuit, parse_with_diagnostics, serialize_circuit
from .errors import CohsimError
from .state import (
    Ensemble,
    QuantumState,
    dephase,
    holevo_chi,
    partial_dephase,
    product,
    reduced_coherences,
    relative_entropy_of_coherence,
    von_neumann_entropy,
)

coherence = relative_entropy_of_coherence

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "CohsimError",
    "CoherenceProfile",
    "Dephase",
    "Ensemble",
    "Gate",
    "Measure",
    "ParseDiagnostic",
    "Peak",
    "QuantumState",
    "StageCut",
    "StageRecord",
    "coherence",
    "dephase",
    "final_state",
    "holevo_chi",
    "measurement_layers",
    "parse_circuit",
    "parse_with_diagnostics",
    "partial_dephase",
    "peak_coherence",
    "product",
    "reduced_coherences",
    "relative_entropy_of_coherence",
    "serialize_circuit",
    "simulate_stages",
    "von_neumann_entropy",
]
