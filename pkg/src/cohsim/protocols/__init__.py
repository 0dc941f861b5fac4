"""Builders and checks for the communication protocols."""

from .branching import (
    BranchCoherence,
    BranchSpec,
    assemble_branch_state,
    branch_coherence,
    branch_decompose,
    branching_entropy,
)
from .budget import BudgetCheck, BudgetLedger, budget_bound, check_budget, stage_layer_counts
from .network import (
    RepeaterResult,
    RepeaterSchedule,
    SwapReport,
    build_repeater,
    build_swap,
    repeater_run,
    resource_window_coherence,
    swap_report,
)
from .states import BlochState, ghz_circuit, prepare_ghz, prepare_w, w_circuit
from .superdense import build_superdense, decoded_distribution, encoded_state, superdense_ensemble
from .teleport import (
    HolevoReport,
    build_teleportation,
    holevo_invariance,
    run_teleportation,
    teleportation_input,
    teleportation_ledger,
    verify_stage_decomposition,
    werner_state,
)

__all__ = [
    "BlochState",
    "BranchCoherence",
    "BranchSpec",
    "BudgetCheck",
    "BudgetLedger",
    "HolevoReport",
    "RepeaterResult",
    "RepeaterSchedule",
    "SwapReport",
    "assemble_branch_state",
    "branch_coherence",
    "branch_decompose",
    "branching_entropy",
    "budget_bound",
    "build_repeater",
    "build_superdense",
    "build_swap",
    "build_teleportation",
    "check_budget",
    "decoded_distribution",
    "encoded_state",
    "ghz_circuit",
    "holevo_invariance",
    "prepare_ghz",
    "prepare_w",
    "repeater_run",
    "resource_window_coherence",
    "run_teleportation",
    "stage_layer_counts",
    "superdense_ensemble",
    "swap_report",
    "teleportation_input",
    "teleportation_ledger",
    "verify_stage_decomposition",
    "w_circuit",
    "werner_state",
]
