"""Verifier-prover rounds: sampling, decoding, soundness, determinism."""
import json
import math

import numpy as np
import pytest

import ftverify as fv
from ftverify.clockham import make_xz_hamiltonian

from conftest import (GOLDEN_PACC, PSI1_PACC, P_TERM_III,
                      SOUNDNESS_BOUND_REFERENCE, binom_4sigma)


def test_identity_term_always_rejects(psi0):
    ham = make_xz_hamiltonian(3, [(1.5, "III")])
    rng = np.random.default_rng(1)
    for _ in range(10):
        tr = fv.run_round(ham, None, fv.HonestProver(psi0),
                          fv.PauliChannel.identity(), rng)
        assert tr.product_outcome == 1
        assert not tr.accepted
        assert tr.raw_outcomes == ((), (), ())


def test_honest_unencoded_matches_formula(ref_ham, psi0):
    est = fv.estimate_acceptance(ref_ham, None, fv.HonestProver(psi0),
                                 fv.PauliChannel.identity(), 20_000, 101)
    assert abs(est.mean - GOLDEN_PACC) < binom_4sigma(GOLDEN_PACC, 20_000)


def test_honest_rep3_matches_formula(ref_ham, psi0, rep3):
    est = fv.estimate_acceptance(ref_ham, rep3, fv.HonestProver(psi0),
                                 fv.PauliChannel.identity(), 20_000, 103)
    assert abs(est.mean - GOLDEN_PACC) < binom_4sigma(GOLDEN_PACC, 20_000)


def test_wrong_input_prover_scores_lower(ref_ham, psi1):
    # exact target precomputed by dense brute force: 1/2 - E_1 / (2K)
    est = fv.estimate_acceptance(ref_ham, None, fv.FixedStateProver(psi1),
                                 fv.PauliChannel.identity(), 10_000, 107)
    assert abs(est.mean - PSI1_PACC) < binom_4sigma(PSI1_PACC, 10_000)
    assert est.mean < GOLDEN_PACC


def test_soundness_bound_values(ref_ham):
    assert fv.soundness_bound(ref_ham) == pytest.approx(
        SOUNDNESS_BOUND_REFERENCE, abs=1e-12)
    z_ham = make_xz_hamiltonian(1, [(1.0, "Z")])
    assert fv.soundness_bound(z_ham) == pytest.approx(1.0, abs=1e-12)
    id_ham = make_xz_hamiltonian(2, [(0.8, "II")])
    assert fv.soundness_bound(id_ham) == pytest.approx(0.0, abs=1e-12)


def test_prover_saturating_single_qubit_bound():
    z_ham = make_xz_hamiltonian(1, [(1.0, "Z")])
    one = fv.StateVector.basis(1, 1)
    est = fv.estimate_acceptance(z_ham, None, fv.FixedStateProver(one),
                                 fv.PauliChannel.identity(), 200, 5)
    assert est.mean == 1.0


def test_variational_soundness_random_provers(ref_ham):
    bound = fv.soundness_bound(ref_ham)
    rng = np.random.default_rng(109)
    rounds = 2000
    for _ in range(20):
        prover = fv.FixedStateProver(fv.random_state(3, rng))
        est = fv.estimate_acceptance(ref_ham, None, prover,
                                     fv.PauliChannel.identity(), rounds,
                                     int(rng.integers(0, 2**31)))
        assert est.mean <= bound + binom_4sigma(bound, rounds)


def test_honest_beats_adversaries(ref_ham, psi0, psi1):
    rounds = 10_000
    honest = fv.estimate_acceptance(ref_ham, None, fv.HonestProver(psi0),
                                    fv.PauliChannel.identity(), rounds, 211)
    wrong = fv.estimate_acceptance(ref_ham, None, fv.FixedStateProver(psi1),
                                   fv.PauliChannel.identity(), rounds, 223)
    rand = fv.estimate_acceptance(ref_ham, None, fv.RandomStateProver(),
                                  fv.PauliChannel.identity(), rounds, 227)
    assert honest.ci_low > wrong.ci_high
    assert honest.ci_low > rand.ci_high


def test_transcript_consistency_and_rate(ref_ham, psi0, rep3):
    rng = np.random.default_rng(113)
    iii_index = next(i for i, (_, s) in enumerate(ref_ham.terms) if s == "III")
    rounds = 4000
    iii_count = 0
    for _ in range(rounds):
        tr = fv.run_round(ref_ham, rep3, fv.HonestProver(psi0),
                          fv.PauliChannel.bitflip(0.1), rng)
        want_sign = -1 if tr.term_coefficient > 0 else 1
        assert tr.accepted == (tr.product_outcome == want_sign)
        prod = 1
        for o in tr.decoded_outcomes:
            prod *= o
        assert prod == tr.product_outcome
        if tr.term_index == iii_index:
            iii_count += 1
    assert abs(iii_count / rounds - P_TERM_III) < binom_4sigma(P_TERM_III, rounds)


def test_round_decoding_recovers_from_single_flips(ref_ham, psi0, rep3):
    # errors on one qubit per block never change the majority-decoded result:
    # force an X error on the first qubit of every block and measure a Z term
    enc = fv.encode_state(rep3, psi0)
    flipped = fv.apply_pauli_string(enc, "XII" + "XII" + "XII")
    ham = make_xz_hamiltonian(3, [(-1.0, "ZZI")])
    rng = np.random.default_rng(127)
    clean_counts = err_counts = 0
    rounds = 2000
    for _ in range(rounds):
        t_clean = fv.run_round(ham, rep3, fv.FixedStateProver(enc),
                               fv.PauliChannel.identity(), rng)
        t_err = fv.run_round(ham, rep3, fv.FixedStateProver(flipped),
                             fv.PauliChannel.identity(), rng)
        clean_counts += t_clean.accepted
        err_counts += t_err.accepted
    assert abs(clean_counts - err_counts) / rounds < binom_4sigma(0.5, rounds)


def test_estimate_single_round_degenerate(ref_ham, psi0):
    est = fv.estimate_acceptance(ref_ham, None, fv.HonestProver(psi0),
                                 fv.PauliChannel.identity(), 1, 3)
    assert est.mean in (0.0, 1.0)
    assert est.ci_low == est.mean == est.ci_high
    assert est.reps == 1


def test_round_determinism(ref_ham, psi0, rep3):
    a = fv.estimate_acceptance(ref_ham, rep3, fv.HonestProver(psi0),
                               fv.PauliChannel.bitflip(0.2), 500, 31)
    b = fv.estimate_acceptance(ref_ham, rep3, fv.HonestProver(psi0),
                               fv.PauliChannel.bitflip(0.2), 500, 31)
    assert a == b


def test_prover_dimension_mismatch(ref_ham, psi0, rep3):
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError, match="qubits"):
        fv.run_round(ref_ham, rep3, fv.FixedStateProver(psi0),
                     fv.PauliChannel.identity(), rng)


def test_transcript_log_schema(ref_ham, psi0, tmp_path):
    path = tmp_path / "rounds.jsonl"
    with open(path, "w") as fh:
        fv.estimate_acceptance(ref_ham, None, fv.HonestProver(psi0),
                               fv.PauliChannel.identity(), 5, 7, log_stream=fh)
    lines = path.read_text().strip().split("\n")
    assert len(lines) == 5
    for i, line in enumerate(lines):
        rec = json.loads(line)
        assert rec["round"] == i
        assert set(rec) == {"round", "term_index", "outcomes", "decoded",
                            "accepted"}


def test_encoded_unencoded_agree_at_half(ref_ham, psi0, rep3):
    # at bit-flip 0.5 the encoded and unencoded acceptance coincide
    ch = fv.PauliChannel.bitflip(0.5)
    rounds = 20_000
    enc = fv.estimate_acceptance(ref_ham, rep3, fv.HonestProver(psi0), ch,
                                 rounds, 41)
    une = fv.estimate_acceptance(ref_ham, None, fv.HonestProver(psi0), ch,
                                 rounds, 43)
    assert enc.ci_low <= une.ci_high and une.ci_low <= enc.ci_high
