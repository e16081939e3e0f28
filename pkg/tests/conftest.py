"""Shared fixtures and frozen oracle values.

The GOLDEN_* constants were computed before the build by an independent
brute-force script (dense kron products and eigensolves over the explicit
amplitude lists); tests assert against them rather than re-deriving them
through the code under test.
"""
import math

import numpy as np
import pytest

import ftverify as fv

SIN8 = math.sin(math.pi / 8)
COS8 = math.cos(math.pi / 8)

GOLDEN_K = 4.806562964876376            # sum |a_i| of the reference instance
GOLDEN_ENERGY = SIN8 ** 2 / 3           # history-state energy, approx 0.04882
GOLDEN_PACC = 0.49492199136621895       # noiseless acceptance
LAMBDA_MIN_REFERENCE = 0.012823426693628709
LAMBDA_MIN_COMPONENT = 0.00024153474212044827
PSI1_ENERGY = 0.6178511301977581        # <psi_1| H_ref(x=0) |psi_1>
PSI1_PACC = 0.43572838484456955
PACC_ZERO_EXPECT = 0.31795723755332     # all non-identity expectations zero
SOUNDNESS_BOUND_REFERENCE = 0.4986660502746625
P_TERM_XZX = 0.03980842809732467
P_TERM_III = 0.36408552489336


def binom_4sigma(p: float, n: int) -> float:
    return 4.0 * math.sqrt(max(p * (1 - p), 1e-12) / n)


@pytest.fixture(scope="session")
def ref_ham():
    return fv.reference_hamiltonian(0)


@pytest.fixture(scope="session")
def psi0():
    return fv.history_state(fv.reference_circuit(0))


@pytest.fixture(scope="session")
def psi1():
    return fv.history_state(fv.reference_circuit(1))


@pytest.fixture(scope="session")
def rep3():
    return fv.repetition_code(3)


@pytest.fixture(scope="session")
def rep5():
    return fv.repetition_code(5)


@pytest.fixture(scope="session")
def steane():
    return fv.steane_code()


def random_xz_hamiltonian(num_qubits: int, rng, max_terms: int = 6):
    """Random small XZ Hamiltonian for property tests."""
    labels = "IXZ"
    terms = {}
    n_terms = rng.integers(1, max_terms + 1)
    while len(terms) < n_terms:
        sites = "".join(rng.choice(list(labels)) for _ in range(num_qubits))
        terms[sites] = float(rng.normal())
    if all(abs(a) < 1e-6 for a in terms.values()):
        terms["I" * num_qubits] = 1.0
    from ftverify.clockham import make_xz_hamiltonian
    return make_xz_hamiltonian(num_qubits, [(a, s) for s, a in terms.items()])
