"""History states, Hamiltonian builders, acceptance formula, serialization."""
import math

import numpy as np
import pytest

import ftverify as fv
from ftverify.clockham import make_xz_hamiltonian

from conftest import (GOLDEN_ENERGY, GOLDEN_K, GOLDEN_PACC,
                      LAMBDA_MIN_COMPONENT, LAMBDA_MIN_REFERENCE,
                      PACC_ZERO_EXPECT, P_TERM_III, P_TERM_XZX, SIN8, COS8)


def _amp(state, comp, clock_bits):
    T = state.num_qubits - 1
    idx = comp << T
    for i, b in enumerate(clock_bits):
        idx |= int(b) << (T - 1 - i)
    return state.amplitudes[idx]


def test_history_state_x0(psi0):
    r3 = 1 / math.sqrt(3)
    assert _amp(psi0, 0, "00") == pytest.approx(r3, abs=1e-12)
    assert _amp(psi0, 1, "10") == pytest.approx(r3, abs=1e-12)
    assert _amp(psi0, 0, "11") == pytest.approx(SIN8 * r3, abs=1e-12)
    assert _amp(psi0, 1, "11") == pytest.approx(-COS8 * r3, abs=1e-12)
    assert np.count_nonzero(np.abs(psi0.amplitudes) > 1e-12) == 4


def test_history_state_x1(psi1):
    r3 = 1 / math.sqrt(3)
    assert _amp(psi1, 1, "00") == pytest.approx(r3, abs=1e-12)
    assert _amp(psi1, 0, "10") == pytest.approx(r3, abs=1e-12)
    assert _amp(psi1, 0, "11") == pytest.approx(COS8 * r3, abs=1e-12)
    assert _amp(psi1, 1, "11") == pytest.approx(SIN8 * r3, abs=1e-12)


def test_history_state_single_step():
    psi = fv.history_state(fv.Circuit(0, (fv.Gate("x"),)))
    np.testing.assert_allclose(
        psi.amplitudes, np.array([1, 0, 0, 1]) / math.sqrt(2), atol=1e-12)


def test_history_state_normalized_random_circuits():
    rng = np.random.default_rng(29)
    for _ in range(200):
        T = int(rng.integers(1, 7))
        gates = tuple(
            fv.Gate("x") if rng.random() < 0.5 else fv.Gate("rot", rng.uniform(0, math.pi))
            for _ in range(T))
        psi = fv.history_state(fv.Circuit(int(rng.integers(0, 2)), gates))
        assert abs(np.linalg.norm(psi.amplitudes) - 1.0) < 1e-10


def test_reference_hamiltonian_coefficients():
    h0 = fv.reference_hamiltonian(0)
    d0 = dict((s, a) for a, s in h0.terms)
    assert "ZII" not in d0
    assert d0["ZZI"] == pytest.approx(-0.25)
    h1 = fv.reference_hamiltonian(1)
    d1 = dict((s, a) for a, s in h1.terms)
    assert d1["ZII"] == pytest.approx(0.5)
    assert d1["ZZI"] == pytest.approx(0.25)


def test_reference_hamiltonian_golden_values(ref_ham, psi0):
    assert ref_ham.coefficient_norm == pytest.approx(GOLDEN_K, abs=1e-12)
    assert ref_ham.coefficient_norm == pytest.approx(4.8066, abs=0.01)
    energy = fv.hamiltonian_expectation(psi0, ref_ham)
    assert energy == pytest.approx(GOLDEN_ENERGY, abs=1e-10)
    assert energy == pytest.approx(0.0488, abs=5e-4)


def test_component_builder_fig1_energy(psi0):
    ham = fv.build_component_hamiltonian(fv.reference_circuit(0), True)
    energy = fv.hamiltonian_expectation(psi0, ham)
    assert energy == pytest.approx(SIN8 ** 2 / 3, abs=1e-10)


def test_component_builder_output_term_only(psi0, psi1):
    # all energy comes from the output penalty: subtracting the independent
    # output-branch probability leaves zero for in + clock + prop
    circ0 = fv.reference_circuit(0)
    ham = fv.build_component_hamiltonian(circ0, True)
    out_prob = abs(circ0.output_state()[0]) ** 2 / 3  # P(output 0) at t = T
    residual = fv.hamiltonian_expectation(psi0, ham) - out_prob
    assert abs(residual) < 1e-10

    circ1 = fv.reference_circuit(1)
    ham1 = fv.build_component_hamiltonian(circ1, False)
    out_prob1 = abs(circ1.output_state()[1]) ** 2 / 3  # P(output 1), claim reject
    assert fv.hamiltonian_expectation(psi1, ham1) == pytest.approx(out_prob1, abs=1e-10)
    assert out_prob1 == pytest.approx(SIN8 ** 2 / 3, abs=1e-12)


@pytest.mark.parametrize("x", [0, 1])
@pytest.mark.parametrize("T", [1, 2, 3, 4])
def test_zero_energy_property(x, T):
    rng = np.random.default_rng(100 * T + x)
    gates = tuple(
        fv.Gate("x") if rng.random() < 0.4 else fv.Gate("rot", rng.uniform(0, math.pi))
        for _ in range(T))
    circ = fv.Circuit(x, gates)
    psi = fv.history_state(circ)
    # claim-true plus claim-false output projectors sum to the clock-T
    # projector, whose history-state weight is 1/(T+1); the remainder is
    # in + clock + prop and must vanish
    e_true = fv.hamiltonian_expectation(psi, fv.build_component_hamiltonian(circ, True))
    e_false = fv.hamiltonian_expectation(psi, fv.build_component_hamiltonian(circ, False))
    assert abs(e_true + e_false - 1.0 / (T + 1)) < 1e-10


def test_near_ground_state_property(ref_ham, psi0):
    lam = fv.eigs_dense(ref_ham.dense())[0]
    assert lam == pytest.approx(LAMBDA_MIN_REFERENCE, abs=1e-10)
    gap = fv.hamiltonian_expectation(psi0, ref_ham) - lam
    assert 0 <= gap <= 0.05

    comp = fv.build_component_hamiltonian(fv.reference_circuit(0), True)
    lam_c = fv.eigs_dense(comp.dense())[0]
    assert lam_c == pytest.approx(LAMBDA_MIN_COMPONENT, abs=1e-10)


def test_builder_is_y_free():
    rng = np.random.default_rng(31)
    for _ in range(20):
        T = int(rng.integers(1, 5))
        gates = tuple(
            fv.Gate("x") if rng.random() < 0.5 else fv.Gate("rot", rng.uniform(0, 2 * math.pi))
            for _ in range(T))
        ham = fv.build_component_hamiltonian(fv.Circuit(0, gates), True)
        assert all("Y" not in s for _, s in ham.terms)


def test_component_vs_printed_bookkeeping(psi0):
    # the two forms disagree in bookkeeping (identity coefficient 3/2 vs 7/4)
    # but agree on the history state's energy; the printed form is canonical
    # for acceptance-probability reproductions
    comp = fv.build_component_hamiltonian(fv.reference_circuit(0), True)
    printed = fv.reference_hamiltonian(0)
    d = dict((s, a) for a, s in comp.terms)
    assert d["III"] == pytest.approx(1.5, abs=1e-12)
    assert dict((s, a) for a, s in printed.terms)["III"] == pytest.approx(1.75)
    assert fv.hamiltonian_expectation(psi0, comp) == pytest.approx(
        fv.hamiltonian_expectation(psi0, printed), abs=1e-10)


def test_pauli_decompose_projector():
    m = np.array([[1, 0], [0, 0]], dtype=complex)
    terms = dict((s, a) for a, s in fv.pauli_decompose(m).terms)
    assert terms == {"I": pytest.approx(0.5), "Z": pytest.approx(0.5)}


def test_pauli_decompose_two_qubit_projector():
    m = np.zeros((4, 4), dtype=complex)
    m[1, 1] = 1.0  # |01><01|
    terms = dict((s, a) for a, s in fv.pauli_decompose(m).terms)
    assert terms == {"II": pytest.approx(0.25), "ZI": pytest.approx(0.25),
                     "IZ": pytest.approx(-0.25), "ZZ": pytest.approx(-0.25)}


def test_pauli_decompose_roundtrip(ref_ham):
    got = dict((s, a) for a, s in fv.pauli_decompose(ref_ham.dense()).terms)
    want = dict((s, a) for a, s in ref_ham.terms)
    assert set(got) == set(want)
    for s in want:
        assert got[s] == pytest.approx(want[s], abs=1e-12)


def test_pauli_decompose_rejects_y():
    m = np.array([[0, -1j], [1j, 0]], dtype=complex)
    with pytest.raises(ValueError, match="Y component"):
        fv.pauli_decompose(m)
    with pytest.raises(ValueError, match="Hermitian"):
        fv.pauli_decompose(np.array([[0, 1], [0, 0]], dtype=complex))


def test_acceptance_probability_golden(ref_ham, psi0):
    expects = [fv.expectation(psi0, fv.PauliString(s)) for _, s in ref_ham.terms]
    assert fv.acceptance_probability(ref_ham, expects) == pytest.approx(
        GOLDEN_PACC, abs=1e-12)
    assert fv.acceptance_probability(ref_ham, expects) == pytest.approx(
        0.4949, abs=5e-4)


def test_acceptance_probability_zero_expectations(ref_ham):
    expects = [1.0 if s == "III" else 0.0 for _, s in ref_ham.terms]
    assert fv.acceptance_probability(ref_ham, expects) == pytest.approx(
        PACC_ZERO_EXPECT, abs=1e-12)


def test_acceptance_probability_certain_reject():
    ham = make_xz_hamiltonian(1, [(1.0, "Z")])
    assert fv.acceptance_probability(ham, [1.0]) == pytest.approx(0.0, abs=1e-12)


def test_acceptance_probability_matches_per_term_sum():
    from conftest import random_xz_hamiltonian
    rng = np.random.default_rng(37)
    for _ in range(30):
        ham = random_xz_hamiltonian(3, rng)
        expects = rng.uniform(-1, 1, size=len(ham.terms))
        direct = fv.acceptance_probability(ham, expects)
        k = ham.coefficient_norm
        mixture = sum((abs(a) / k) * (1 - math.copysign(1, a) * e) / 2
                      for (a, _), e in zip(ham.terms, expects))
        assert direct == pytest.approx(mixture, abs=1e-12)


def test_acceptance_probability_range_check(ref_ham):
    bad = [2.0] + [0.0] * (len(ref_ham.terms) - 1)
    with pytest.raises(ValueError):
        fv.acceptance_probability(ref_ham, bad)


def test_term_distribution(ref_ham):
    probs = fv.term_distribution(ref_ham)
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    by_site = dict(zip((s for _, s in ref_ham.terms), probs))
    assert by_site["XZX"] == pytest.approx(P_TERM_XZX, abs=1e-12)
    assert by_site["XZX"] == pytest.approx(0.0398, abs=1e-4)
    assert by_site["III"] == pytest.approx(P_TERM_III, abs=1e-12)
    single = make_xz_hamiltonian(2, [(0.7, "XZ")])
    np.testing.assert_allclose(fv.term_distribution(single), [1.0])


def test_serialization_roundtrip(ref_ham):
    back = fv.XZHamiltonian.from_json(ref_ham.to_json())
    assert back.num_qubits == ref_ham.num_qubits
    assert back.terms == ref_ham.terms  # exact float round-trip at 17 digits


def test_coefficient_merging_and_pruning():
    ham = make_xz_hamiltonian(2, [(0.5, "XZ"), (0.25, "XZ"), (1e-15, "ZZ"),
                                  (1.0, "II")])
    d = dict((s, a) for a, s in ham.terms)
    assert d == {"XZ": pytest.approx(0.75), "II": pytest.approx(1.0)}


def test_xz_hamiltonian_rejects_y():
    with pytest.raises(ValueError):
        fv.XZHamiltonian(2, ((1.0, "XY"),))


def test_promise_gap_reference_instance():
    gap = fv.promise_gap(fv.reference_circuit(0), True)
    assert gap.width > 0
    assert gap.b == pytest.approx(LAMBDA_MIN_COMPONENT, abs=1e-10)


def test_circuit_output_amplitudes():
    out = fv.reference_circuit(0).output_state()
    assert abs(out[1]) ** 2 == pytest.approx(COS8 ** 2, abs=1e-12)
    assert abs(out[0]) ** 2 == pytest.approx(SIN8 ** 2, abs=1e-12)
