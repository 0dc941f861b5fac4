"""Seeded invariant suites behind ``cohsim verify``.

Each suite draws from its own generator seeded with the same value, so
running one suite alone reproduces the numbers it prints under ``all``.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .circuit import Measure, apply_element, measurement_layers
from .dsl import parse_circuit
from .protocols import (
    BlochState,
    BranchSpec,
    BudgetLedger,
    RepeaterSchedule,
    branch_coherence,
    branching_entropy,
    budget_bound,
    build_repeater,
    build_swap,
    build_teleportation,
    check_budget,
    holevo_invariance,
    run_teleportation,
    teleportation_input,
    teleportation_ledger,
    verify_stage_decomposition,
)
from .randstate import random_mixed, random_product_pure, random_pure, random_unitary
from .state import (
    Ensemble,
    QuantumState,
    partial_dephase,
    product,
    relative_entropy_of_coherence,
)

TOL = 1e-9
LAMBDA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))
DEFAULT_SEED = 0


class CheckResult(NamedTuple):
    suite: str
    name: str
    passed: bool
    value: float
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.suite}.{self.name}: {self.detail}"


def _max_check(suite, name, residuals, tol=TOL, what="max_residual") -> CheckResult:
    worst = float(max(residuals)) if len(residuals) else 0.0
    return CheckResult(suite, name, worst <= tol, worst, f"{what}={worst:.3e} cases={len(residuals)} tol={tol:g}")


# ---------------------------------------------------------------------------


def additivity_suite(rng: np.random.Generator, pairs: int = 100) -> list[CheckResult]:
    res = []
    for _ in range(pairs):
        rho = random_mixed(int(rng.integers(1, 4)), rng)
        sigma = random_mixed(int(rng.integers(1, 4)), rng)
        joint = relative_entropy_of_coherence(product(rho, sigma))
        res.append(abs(joint - relative_entropy_of_coherence(rho) - relative_entropy_of_coherence(sigma)))
    return [_max_check("additivity", "tensor_product", res)]


def scaling_suite(rng: np.random.Generator, messages: int = 5) -> list[CheckResult]:
    out = []
    for n in (1, 2, 3):
        res = []
        for _ in range(messages):
            m = random_product_pure(n, rng)
            profile, _ = run_teleportation(n, m)
            res.append(abs(profile.peak.bits - 2 * n - relative_entropy_of_coherence(m)))
        out.append(_max_check("scaling", f"peak_n{n}", res))
    # four gadgets is twelve qubits: stay on the pure path
    res = []
    for _ in range(2):
        m = random_product_pure(4, rng)
        profile, _ = run_teleportation(4, m, pure_path=True)
        res.append(abs(profile.peak.bits - 8 - relative_entropy_of_coherence(m)))
    out.append(_max_check("scaling", "peak_n4_pure_path", res))
    for n in (1, 2):
        res = []
        for _ in range(messages):
            res += verify_stage_decomposition(n, random_pure(n, rng))
        out.append(_max_check("scaling", f"stage_decomposition_n{n}", res))
    return out


def random_branch_spec(rng: np.random.Generator, max_m: int = 8, max_q: int = 2) -> BranchSpec:
    m = int(rng.integers(1, max_m + 1))
    q = int(rng.integers(1, max_q + 1))
    p = rng.dirichlet(np.ones(m))
    return BranchSpec(p, [random_pure(q, rng) for _ in range(m)])


def pre_measurement_branching(circuit, initial) -> list[float]:
    """``H(outcomes) - log2 m`` for every Measure, evaluated just before it acts."""
    out = []
    state = initial
    for elem in circuit.elements:
        if isinstance(elem, Measure):
            out.append(branching_entropy(state, list(elem.targets)) - np.log2(elem.alphabet))
        state = apply_element(state, elem, circuit.qubit_count)
    return out


def branching_suite(rng: np.random.Generator, specs: int = 100) -> list[CheckResult]:
    res, cap = [], []
    for _ in range(specs):
        spec = random_branch_spec(rng)
        direct, rhs = branch_coherence(spec)
        res.append(abs(direct - rhs))
    m = random_product_pure(2, rng)
    cap += pre_measurement_branching(build_teleportation(2), teleportation_input(m))
    cap += pre_measurement_branching(build_swap(), QuantumState.zeros(4))
    for sched in (RepeaterSchedule.sequential(4), RepeaterSchedule.parallel(4, 3)):
        cap += pre_measurement_branching(build_repeater(sched), QuantumState.zeros(8))
    for _ in range(5):
        src, n_msg, _ = random_locc_source(rng)
        c = parse_circuit(src)
        cap += pre_measurement_branching(c, product(random_product_pure(n_msg, rng), QuantumState.zeros(c.qubit_count - n_msg)))
    uniform = []
    for m in range(1, 9):
        q = 3
        payloads = [QuantumState.basis(format(int(rng.integers(0, 8)), "03b")) for _ in range(m)]
        direct, _ = branch_coherence(BranchSpec([1.0 / m] * m, payloads))
        uniform.append(abs(direct - np.log2(m)))
    return [
        _max_check("branching", "identity", res),
        _max_check("branching", "uniform_incoherent", uniform, tol=1e-10),
        CheckResult(
            "branching", "log_m_cap", max(cap) <= TOL, float(max(cap)),
            f"max(H(outcomes)-log2 m)={max(cap):.3e} measure_layers={len(cap)}",
        ),
    ]


# ---------------------------------------------------------------------------
# random LOCC-shaped circuits for the budget check

_INCOHERENT_1Q = ("x", "z", "s", "t")


def _u_line(q: int, u: np.ndarray) -> str:
    parts = []
    for z in u.ravel():
        parts += [format(z.real, ".17g"), format(z.imag, ".17g")]
    return f"u {q} " + " ".join(parts)


def random_locc_source(rng: np.random.Generator) -> tuple[str, int, int]:
    """Random circuit text shaped like an LOCC protocol.

    Layout: message qubits, then Bell-pair qubits, then one optional ancilla.
    Coherence is only created by Bell-pair preparation and by the basis
    change just ahead of each measurement layer; every other gate is a
    permutation or phase gate.  Returns ``(source, message_qubits, pairs)``.
    """
    n_msg = int(rng.integers(1, 3))
    n_pairs = int(rng.integers(1, 3))
    n = n_msg + 2 * n_pairs + int(rng.integers(0, 2))
    lines = [f"# random protocol: {n_msg} message qubit(s), {n_pairs} Bell pair(s)", f"qubits {n}"]
    for k in range(n_pairs):
        a = n_msg + 2 * k
        lines += [f"h {a}", "stage pair_h", f"cnot {a} {a + 1}", "stage pair_cnot"]

    def incoherent():
        if rng.random() < 0.5:
            c, t = (int(x) for x in rng.choice(n, 2, replace=False))
            return f"{rng.choice(['cnot', 'cz'])} {c} {t}"
        return f"{rng.choice(_INCOHERENT_1Q)} {int(rng.integers(0, n))}"

    for layer in range(int(rng.integers(1, 3))):
        k = int(rng.integers(1, 3))
        targets = sorted(int(x) for x in rng.choice(n, k, replace=False))
        for _ in range(int(rng.integers(0, 3))):
            lines += [incoherent(), "stage mix"]
        if k == 2 and rng.random() < 0.5:
            lines += [f"cnot {targets[0]} {targets[1]}", "stage rotate"]
        for q in targets:
            lines.append(f"h {q}" if rng.random() < 0.5 else _u_line(q, random_unitary(2, rng)))
            lines.append("stage rotate")
        lines += ["measure " + " ".join(map(str, targets)), f"stage measure{layer}"]
        rest = [q for q in range(n) if q not in targets]
        for _ in range(int(rng.integers(0, 3))):
            if rest:
                t = int(rng.choice(rest))
                lines.append(f"{rng.choice(['cnot', 'cz'])} {int(rng.choice(targets))} {t}")
                lines.append("stage correct")
        if rng.random() < 0.5:
            lines += [f"dephase {rng.random():.6f} {int(rng.integers(0, n))}", "stage noise"]
    return "\n".join(lines) + "\n", n_msg, n_pairs


def _budget_case(name, circuit, initial, ledger) -> list[CheckResult]:
    checks = check_budget(circuit, initial, ledger)
    peak_bound = budget_bound(ledger)
    slack = [c.coherence - c.bound for c in checks]
    peak_slack = [c.coherence - peak_bound for c in checks]
    peak = max(c.coherence for c in checks)
    return [
        CheckResult(
            "budget", name, all(c.ok for c in checks) and max(peak_slack) <= TOL, max(slack),
            f"peak={peak:.12f} bound={peak_bound:.12f} worst_stage_slack={max(slack):.3e}",
        )
    ]


def budget_suite(rng: np.random.Generator, random_circuits: int = 20) -> list[CheckResult]:
    out = []
    zero = QuantumState.zeros(1)
    out += _budget_case("teleport_n1", build_teleportation(1), teleportation_input(zero), teleportation_ledger(zero))
    m = random_product_pure(2, rng)
    out += _budget_case("teleport_n2", build_teleportation(2), teleportation_input(m), teleportation_ledger(m))
    out += _budget_case("swap", build_swap(), QuantumState.zeros(4), BudgetLedger(0.0, 2.0, (4,)))
    for sched in (RepeaterSchedule.sequential(3), RepeaterSchedule.parallel(3, 2)):
        c = build_repeater(sched)
        out += _budget_case(
            f"repeater_{sched.mode}{sched.links}_s{sched.s}", c, QuantumState.zeros(c.qubit_count),
            BudgetLedger(0.0, float(sched.links), tuple(measurement_layers(c))),
        )
    worst, lines = [], 0
    for i in range(random_circuits):
        src, n_msg, n_pairs = random_locc_source(rng)
        circuit = parse_circuit(src)
        if isinstance(circuit, list):
            raise RuntimeError(f"generated circuit failed to parse: {circuit[0]}")
        msg = random_product_pure(n_msg, rng)
        rest = circuit.qubit_count - n_msg
        initial = product(msg, QuantumState.zeros(rest))
        ledger = BudgetLedger(
            relative_entropy_of_coherence(msg), float(n_pairs), tuple(measurement_layers(circuit))
        )
        worst.append(_budget_case(f"random{i}", circuit, initial, ledger)[0])
        lines += 1
    bad = [r for r in worst if not r.passed]
    out.append(
        CheckResult(
            "budget", "random_dsl", not bad, max(r.value for r in worst),
            f"circuits={lines} failing={len(bad)} worst_stage_slack={max(r.value for r in worst):.3e}",
        )
    )
    return out


def holevo_ensembles(rng: np.random.Generator) -> list[tuple[str, Ensemble]]:
    z, o = QuantumState.basis("0"), QuantumState.basis("1")
    plus = BlochState(np.pi / 2).state()
    mixed = [random_mixed(1, rng, env=1) for _ in range(3)]
    w = rng.dirichlet(np.ones(3))
    w = w / w.sum()
    return [
        ("zero_one", Ensemble([(0.5, z), (0.5, o)])),
        ("zero_plus", Ensemble([(0.5, z), (0.5, plus)])),
        ("random_mixed", Ensemble(zip(w, mixed))),
    ]


def holevo_suite(rng: np.random.Generator) -> list[CheckResult]:
    out = []
    exhibited = False
    for name, ens in holevo_ensembles(rng):
        rep = holevo_invariance(ens)
        diff = abs(rep.chi_in - rep.chi_out)
        exhibited |= rep.max_intermediate >= 2.0 - TOL and rep.max_intermediate > rep.chi_in + TOL
        out.append(
            CheckResult(
                "holevo", name, diff <= TOL, diff,
                f"chi_in={rep.chi_in:.12f} chi_out={rep.chi_out:.12f} "
                f"max_intermediate={rep.max_intermediate:.12f} |diff|={diff:.3e}",
            )
        )
    out.append(CheckResult("holevo", "coherence_exceeds_chi", exhibited, float(exhibited),
                           "intermediate coherence >= 2 > chi_in for some ensemble"))
    return out


def monotone_suite(rng: np.random.Generator, states: int = 50) -> list[CheckResult]:
    res = []
    for _ in range(states):
        n = int(rng.integers(1, 3))
        rho = random_mixed(n, rng) if rng.random() < 0.7 else random_pure(n, rng)
        c0 = relative_entropy_of_coherence(rho)
        for lam in LAMBDA_GRID:
            for q in range(n):
                res.append(relative_entropy_of_coherence(partial_dephase(rho, lam, q)) - c0)
    return [_max_check("monotone", "partial_dephasing", res, what="max_increase")]


SUITES: dict[str, Callable[[np.random.Generator], list[CheckResult]]] = {
    "additivity": additivity_suite,
    "scaling": scaling_suite,
    "branching": branching_suite,
    "budget": budget_suite,
    "holevo": holevo_suite,
    "monotone": monotone_suite,
}


def run_suite(name: str, seed: int) -> list[CheckResult]:
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        raise KeyError(f"unknown suite {name!r}")
    results = []
    for n in names:
        results += SUITES[n](np.random.default_rng(seed))
    return results
