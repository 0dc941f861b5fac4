import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cohsim import QuantumState, coherence, dephase, final_state, product, simulate_stages
from cohsim.errors import (
    InvalidParams,
    InvalidSize,
    InvalidWernerParameter,
    LayerOutOfRange,
    SizeMismatch,
    TooLarge,
)
from cohsim.linalg import binary_entropy
from cohsim.protocols import (
    BlochState,
    BranchSpec,
    BudgetLedger,
    RepeaterSchedule,
    assemble_branch_state,
    branch_coherence,
    branch_decompose,
    branching_entropy,
    budget_bound,
    build_repeater,
    build_superdense,
    build_teleportation,
    check_budget,
    decoded_distribution,
    ghz_circuit,
    holevo_invariance,
    prepare_ghz,
    prepare_w,
    repeater_run,
    run_teleportation,
    stage_layer_counts,
    superdense_ensemble,
    swap_report,
    teleportation_input,
    teleportation_ledger,
    verify_stage_decomposition,
    w_circuit,
)
from cohsim.protocols.superdense import MESSAGES
from cohsim.protocols.teleport import bob
from cohsim.randstate import random_mixed, random_product_pure, random_pure
from cohsim.state import Ensemble, holevo_chi

import oracles

seeds = st.integers(0, 2**32 - 1)
ZERO = QuantumState.zeros(1)


# -- state preparation -------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_w_circuit_prepares_w(n):
    out = final_state(w_circuit(n), QuantumState.zeros(n))
    assert abs(np.vdot(prepare_w(n).vector, out.vector)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 4, 7])
def test_ghz_circuit_prepares_ghz(n):
    out = final_state(ghz_circuit(n), QuantumState.zeros(n))
    assert abs(np.vdot(prepare_ghz(n).vector, out.vector)) == pytest.approx(1.0, abs=1e-12)


def test_state_size_errors():
    for bad in (prepare_w, w_circuit):
        with pytest.raises(InvalidSize):
            bad(1)
    with pytest.raises(InvalidSize):
        prepare_ghz(0)


@given(st.floats(0, np.pi), st.floats(0, 2 * np.pi, exclude_max=True))
def test_bloch_state_coherence(theta, gamma):
    c = coherence(BlochState(theta, gamma).state())
    assert c == pytest.approx(binary_entropy(np.cos(theta / 2) ** 2), abs=1e-9)


def test_bloch_ranges():
    with pytest.raises(ValueError):
        BlochState(-0.1)
    with pytest.raises(ValueError):
        BlochState(1.0, 2 * np.pi)
    with pytest.raises(ValueError):
        BlochState.from_phi(2.0)


# -- teleportation -----------------------------------------------------------


def dense_teleport_stages(message):
    """Hand expansion of one gadget with full matrices; qubits (msg, anc, bob)."""
    v = np.kron(message, oracles.ket("00"))
    steps = [
        oracles.single(oracles.H, 1, 3),
        oracles.cnot(1, 2, 3),
        oracles.cnot(0, 1, 3),
        oracles.single(oracles.H, 0, 3),
    ]
    rho = oracles.dm(v)
    out = [oracles.coherence(rho)]
    for u in steps:
        rho = u @ rho @ u.conj().T
        out.append(oracles.coherence(rho))
    rho = oracles.dephase_qubits(rho, [0, 1], 3)
    out.append(oracles.coherence(rho))
    corr = oracles.cz(0, 2, 3) @ oracles.cnot(1, 2, 3)
    rho = corr @ rho @ corr.conj().T
    out.append(oracles.coherence(rho))
    return out, rho


def test_single_gadget_profile_for_zero():
    profile, _ = run_teleportation(1, ZERO)
    assert profile.totals == pytest.approx([0, 1, 1, 1, 2, 0, 0], abs=1e-9)
    assert profile.peak == (4, pytest.approx(2.0, abs=1e-12))
    assert [s.label for s in profile.stages] == [
        "init", "bell_h", "bell_cnot", "alice_cnot", "alice_h", "measure", "correct",
    ]


@given(seeds)
def test_teleport_profile_matches_dense_expansion(seed):
    m = random_pure(1, np.random.default_rng(seed))
    expected, rho = dense_teleport_stages(m.vector)
    profile, states = run_teleportation(1, m)
    np.testing.assert_allclose(profile.totals, expected, atol=1e-9)
    np.testing.assert_allclose(states[-1].state.matrix, rho, atol=1e-12)


@given(seeds, st.integers(1, 2))
def test_bob_receives_the_message(seed, n):
    m = random_pure(n, np.random.default_rng(seed))
    _, states = run_teleportation(n, m)
    got = states[-1].state.reduced([bob(g) for g in range(n)]).matrix
    np.testing.assert_allclose(got, m.matrix, atol=1e-12)


def test_pre_measurement_state_is_two_bit_uniform():
    _, states = run_teleportation(1, ZERO)
    diag = dephase(states[4].state).diagonal()
    support = {format(i, "03b") for i in np.flatnonzero(diag > 1e-12)}
    assert support == {"000", "011", "100", "111"}
    np.testing.assert_allclose(diag[diag > 1e-12], 0.25, atol=1e-12)


@given(seeds, st.integers(1, 2))
def test_stage_decomposition(seed, n):
    m = random_pure(n, np.random.default_rng(seed))
    assert max(verify_stage_decomposition(n, m)) <= 1e-9


def test_pure_path_stops_before_measurement():
    profile, states = run_teleportation(2, random_product_pure(2, np.random.default_rng(0)), pure_path=True)
    assert len(profile) == 5
    assert all(s.state.is_pure for s in states)


def test_teleport_argument_errors():
    with pytest.raises(SizeMismatch):
        build_teleportation(0)
    with pytest.raises(SizeMismatch):
        build_teleportation(2, ZERO)
    with pytest.raises(InvalidWernerParameter):
        build_teleportation(1, werner=1.2)


def test_reduced_sum_below_total():
    profile, _ = run_teleportation(2, random_pure(2, np.random.default_rng(9)))
    for s in profile.stages:
        assert sum(s.per_qubit) <= s.total_coherence + 1e-9


# -- Werner resources --------------------------------------------------------


def test_werner_peak_nonincreasing():
    for msg in (ZERO, BlochState(np.pi / 2).state(), BlochState(1.1, 0.4).state()):
        peaks = [run_teleportation(1, msg, lam)[0].peak.bits for lam in (1.0, 0.8, 0.6, 0.3, 0.0)]
        assert all(b <= a + 1e-12 for a, b in zip(peaks, peaks[1:]))


def test_werner_one_matches_pure_resource():
    msg = BlochState(0.7, 1.3).state()
    a = run_teleportation(1, msg, 1.0)[0].totals
    rho_in = teleportation_input(msg, 1 - 1e-15)
    assert not rho_in.is_pure
    b = simulate_stages(build_teleportation(1, msg, 1 - 1e-15), rho_in)[0].totals
    # the Werner circuit skips the Bell-pair gates, so compare from the resource stage on
    np.testing.assert_allclose(a[2:], b[2:], atol=1e-9)


@given(st.floats(0.0, 1.0), st.floats(0, np.pi))
def test_werner_peak_linear_in_gadget_count(lam, theta):
    msg = BlochState(theta).state()
    one = run_teleportation(1, msg, lam)[0].peak.bits
    two = run_teleportation(2, product(msg, msg), lam)[0].peak.bits
    assert abs(two - 2 * one) <= 1e-9


@given(st.sampled_from([1.0, 0.8, 0.6]), st.sampled_from(["00", "01", "11"]))
def test_werner_offset_for_incoherent_messages(lam, bits):
    base = run_teleportation(1, ZERO, lam)[0].peak.bits
    peak = run_teleportation(2, QuantumState.basis(bits), lam)[0].peak.bits
    assert abs(peak - 2 * base) <= 1e-9


def test_werner_message_term_is_not_additive_for_coherent_messages():
    # With a noisy resource the message no longer adds its full coherence on
    # top of the resource term: only the linear-in-n structure survives.
    plus = BlochState(np.pi / 2).state()
    gap = run_teleportation(1, plus, 0.8)[0].peak.bits - run_teleportation(1, ZERO, 0.8)[0].peak.bits
    assert abs(gap - coherence(plus)) > 0.1
    gap0 = run_teleportation(1, plus, 0.0)[0].peak.bits - run_teleportation(1, ZERO, 0.0)[0].peak.bits
    assert gap0 == pytest.approx(0.0, abs=1e-9)


# -- superdense coding -------------------------------------------------------


@pytest.mark.parametrize("bits", MESSAGES)
def test_superdense_decodes_exactly(bits):
    dist = decoded_distribution(bits)
    expected = np.zeros(4)
    expected[2 * bits[0] + bits[1]] = 1
    np.testing.assert_allclose(dist, expected, atol=1e-12)


def test_superdense_ensemble_carries_two_bits():
    ens = superdense_ensemble()
    assert holevo_chi(ens) == pytest.approx(2.0, abs=1e-12)
    # each encoded state is a single Bell state: one bit of coherence at most
    profile, _ = simulate_stages(build_superdense((1, 1)), QuantumState.zeros(2))
    assert profile.peak.bits == pytest.approx(1.0, abs=1e-12)


def test_superdense_bad_bits():
    with pytest.raises(ValueError):
        build_superdense((2, 0))


# -- swapping and repeaters ---------------------------------------------------


def test_swap_report():
    rep = swap_report()
    assert rep.resource_coherence == pytest.approx(2.0, abs=1e-9)
    assert rep.pre_measurement == pytest.approx(3.0, abs=1e-9)
    assert rep.branching == pytest.approx(2.0, abs=1e-9)
    assert rep.payload_average == pytest.approx(1.0, abs=1e-9)
    assert rep.end_fidelity == pytest.approx(1.0, abs=1e-12)
    for m in rep.end_marginals:
        np.testing.assert_allclose(m, np.eye(2) / 2, atol=1e-12)


def test_swap_pre_measurement_matches_dense_expansion():
    phi = (oracles.ket("00") + oracles.ket("11")) / np.sqrt(2)
    v = np.kron(phi, phi)
    v = oracles.single(oracles.H, 1, 4) @ (oracles.cnot(1, 2, 4) @ v)
    assert oracles.coherence(v) == pytest.approx(3.0, abs=1e-12)


@pytest.mark.parametrize(
    "sched",
    [RepeaterSchedule.sequential(k) for k in (2, 3, 4, 5)]
    + [RepeaterSchedule.parallel(3, 2), RepeaterSchedule.parallel(4, 2), RepeaterSchedule.parallel(4, 3),
       RepeaterSchedule.parallel(5, 2), RepeaterSchedule.parallel(5, 4)],
    ids=str,
)
def test_repeater_peak_within_estimate_and_ends_entangled(sched):
    res = repeater_run(sched)
    assert res.measured_peak <= res.estimate + 1e-9
    c = build_repeater(sched)
    out = final_state(c, QuantumState.zeros(c.qubit_count))
    ends = out.reduced([0, c.qubit_count - 1]).matrix
    phi = (oracles.ket("00") + oracles.ket("11")) / np.sqrt(2)
    assert np.real(phi.conj() @ ends @ phi) == pytest.approx(1.0, abs=1e-10)


def test_sequential_peak_flat_in_chain_length():
    peaks = [repeater_run(RepeaterSchedule.sequential(k)).measured_peak for k in (2, 3, 4)]
    assert max(peaks) - min(peaks) <= 0.5


def test_schedule_validation():
    with pytest.raises(InvalidParams):
        RepeaterSchedule.sequential(1)
    with pytest.raises(InvalidParams):
        RepeaterSchedule.parallel(3, 3)
    with pytest.raises(InvalidParams):
        RepeaterSchedule(3, "ring")
    with pytest.raises(TooLarge):
        repeater_run(RepeaterSchedule.sequential(7))
    assert RepeaterSchedule.parallel(5, 2).rounds() == [[1, 2], [3, 4]]


# -- branching ---------------------------------------------------------------


@given(seeds, st.integers(1, 8), st.integers(1, 2))
def test_branch_identity(seed, m, q):
    rng = np.random.default_rng(seed)
    spec = BranchSpec(rng.dirichlet(np.ones(m)), [random_pure(q, rng) for _ in range(m)])
    direct, rhs = branch_coherence(spec)
    assert abs(direct - rhs) <= 1e-9


@given(seeds, st.integers(2, 6))
def test_decompose_inverts_assemble(seed, m):
    rng = np.random.default_rng(seed)
    spec = BranchSpec(rng.dirichlet(np.ones(m)), [random_pure(1, rng) for _ in range(m)])
    state = assemble_branch_state(spec)
    k = state.qubit_count - 1
    back = branch_decompose(state, list(range(k)))
    assert branching_entropy(state, list(range(k))) == pytest.approx(
        oracles.entropy_bits(spec.probs), abs=1e-12
    )
    assert branch_coherence(back).direct == pytest.approx(branch_coherence(spec).direct, abs=1e-9)


def test_branch_spec_validation():
    with pytest.raises(ValueError):
        BranchSpec([0.5, 0.6], [ZERO, ZERO])
    with pytest.raises(ValueError):
        BranchSpec([0.5, 0.5], [ZERO])


# -- budget ------------------------------------------------------------------


def test_teleport_budget():
    ledger = teleportation_ledger(ZERO)
    assert budget_bound(ledger) == pytest.approx(3.0)
    assert budget_bound(ledger, 0) == pytest.approx(1.0)
    with pytest.raises(LayerOutOfRange):
        budget_bound(ledger, 2)
    checks = check_budget(build_teleportation(1), teleportation_input(ZERO), ledger)
    assert all(c.ok for c in checks)


def test_stage_layer_counts_charge_pending_layer():
    c = build_teleportation(1)
    assert stage_layer_counts(c) == [1, 1, 1, 1, 1, 1, 1]
    two = build_repeater(RepeaterSchedule.sequential(3))
    counts = stage_layer_counts(two)
    assert counts[0] == 1 and counts[-1] == 2 and counts == sorted(counts)


def test_budget_flags_a_violation():
    c = build_teleportation(1)
    tight = BudgetLedger(0.0, 0.0, (2,))
    assert not all(ch.ok for ch in check_budget(c, teleportation_input(ZERO), tight))


# -- Holevo --------------------------------------------------------------------


def test_holevo_invariance_examples():
    plus = BlochState(np.pi / 2).state()
    rep = holevo_invariance(Ensemble([(0.5, ZERO), (0.5, plus)]))
    assert rep.chi_in == pytest.approx(rep.chi_out, abs=1e-9)
    assert rep.max_intermediate >= 2.0 > rep.chi_in
    rep2 = holevo_invariance(superdense_ensemble())
    assert rep2.chi_in == pytest.approx(2.0, abs=1e-9)
    assert rep2.chi_out == pytest.approx(2.0, abs=1e-9)


@given(seeds, st.integers(2, 4))
def test_holevo_preserved_for_random_ensembles(seed, m):
    rng = np.random.default_rng(seed)
    ens = Ensemble(zip(rng.dirichlet(np.ones(m)), [random_mixed(1, rng) for _ in range(m)]))
    rep = holevo_invariance(ens)
    assert abs(rep.chi_in - rep.chi_out) <= 1e-9
