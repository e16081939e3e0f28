"""Single verifier-prover rounds: term sampling, transversal measurement,
classical decoding and the accept/reject decision.

A round samples one Hamiltonian term with probability |a_i| / K, obtains the
prover's (possibly encoded) state, applies one Pauli error drawn from the
noise channel, measures every physical qubit of each non-identity block in
the term's basis, decodes each block classically, and accepts when the
product of decoded outcomes equals -sgn(a_i).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .clockham import XZHamiltonian, term_distribution
from .csscode import decode_outcomes, encode_state
from .densekit import (PauliFactor, ProductObservable, StateVector,
                       apply_pauli_string, eigs_dense, measure_product,
                       random_state)
from .noise import (NoisyEstimate, PauliChannel, _rep_rng,
                    estimate_from_samples, sample_pauli_error)


class HonestProver:
    """Prepares the announced proof state, encoded in the announced code."""

    def __init__(self, logical_state: StateVector):
        self.logical_state = logical_state
        self._encoded_cache = {}

    def prepare(self, code, num_qubits: int, rng) -> StateVector:
        if code is None:
            return self.logical_state
        key = (code.name, code.m)
        if key not in self._encoded_cache:
            self._encoded_cache[key] = encode_state(code, self.logical_state)
        return self._encoded_cache[key]


class FixedStateProver:
    """Sends one fixed state every round (adversarial probe)."""

    def __init__(self, state: StateVector):
        self.state = state

    def prepare(self, code, num_qubits: int, rng) -> StateVector:
        return self.state


class RandomStateProver:
    """Sends a fresh uniformly random state every round."""

    def prepare(self, code, num_qubits: int, rng) -> StateVector:
        return random_state(num_qubits, rng)


@dataclass(frozen=True)
class ProtocolTranscript:
    """Record of one verification round."""

    term_index: int
    term_coefficient: float
    raw_outcomes: tuple      # per block: tuple of +-1 outcomes, () if unmeasured
    decoded_outcomes: tuple  # per block: +-1 (unmeasured blocks report +1)
    product_outcome: int
    accepted: bool

    def to_json(self, round_index: int) -> str:
        return json.dumps({
            "round": round_index,
            "term_index": self.term_index,
            "outcomes": [list(b) for b in self.raw_outcomes],
            "decoded": list(self.decoded_outcomes),
            "accepted": self.accepted,
        })


def run_round(ham: XZHamiltonian, code, prover, ch: PauliChannel,
              rng) -> ProtocolTranscript:
    """One verification round; ``code=None`` runs the bare (unencoded) protocol.

    Sampling order within the round is fixed: term choice, prover state,
    noise error, then qubit-by-qubit measurement in ascending register order.
    """
    probs = term_distribution(ham)
    cum = np.cumsum(probs)
    term_index = min(int(np.searchsorted(cum, rng.random(), side="right")),
                     len(probs) - 1)
    coeff, sites = ham.terms[term_index]

    m = 1 if code is None else code.m
    state = prover.prepare(code, ham.num_qubits * m, rng)
    if state.num_qubits != ham.num_qubits * m:
        raise ValueError(
            f"prover state has {state.num_qubits} qubits, announcement "
            f"requires {ham.num_qubits * m}")

    if not ch.is_identity:
        err = sample_pauli_error(ch, state.num_qubits, rng)
        state = apply_pauli_string(state, err)

    factors = tuple(PauliFactor(j * m + k, sites[j])
                    for j in range(ham.num_qubits) for k in range(m))
    obs = ProductObservable(state.num_qubits, factors)
    outcomes, _ = measure_product(state, obs, rng)

    raw, decoded = [], []
    product = 1
    for j, c in enumerate(sites):
        if c == "I":
            raw.append(())
            decoded.append(1)
            continue
        block = tuple(int(o) for o in outcomes[j * m:(j + 1) * m])
        raw.append(block)
        if code is None:
            logical = block[0]
        else:
            bits = tuple((1 - o) // 2 for o in block)
            logical_bit, _ = decode_outcomes(code, c, bits)
            logical = 1 - 2 * logical_bit
        decoded.append(logical)
        product *= logical
    accepted = product == (-1 if coeff > 0 else 1)
    return ProtocolTranscript(term_index, float(coeff), tuple(raw),
                              tuple(decoded), product, accepted)


def estimate_acceptance(ham: XZHamiltonian, code, prover, ch: PauliChannel,
                        rounds: int, seed: int, log_stream=None) -> NoisyEstimate:
    """Acceptance frequency over i.i.d. rounds; round r uses stream [seed, r]."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    accepts = np.empty(rounds)
    for r in range(rounds):
        transcript = run_round(ham, code, prover, ch, _rep_rng(seed, r))
        accepts[r] = 1.0 if transcript.accepted else 0.0
        if log_stream is not None:
            log_stream.write(transcript.to_json(r) + "\n")
    return estimate_from_samples(accepts, seed)


def soundness_bound(ham: XZHamiltonian) -> float:
    """Maximum acceptance probability over all prover states.

    Equals 1/2 (1 - lambda_min / K); any state's acceptance is a convex
    combination bounded by the variational minimum of the energy.
    """
    lam_min = float(eigs_dense(ham.dense())[0])
    return 0.5 * (1.0 - lam_min / ham.coefficient_norm)
