"""Desk-scale simulator of fault-tolerant verification of delegated quantum
computation: clock Hamiltonians and history states for small circuits, CSS
encodings with transversal-measurement decoding, local Pauli noise, and the
verifier's accept/reject protocol with Monte Carlo threshold estimation.
"""

__version__ = "0.1.0"

from .clockham import (Circuit, Gate, PromiseGap, XZHamiltonian,
                       acceptance_probability, build_component_hamiltonian,
                       hamiltonian_expectation, history_state, pauli_decompose,
                       promise_gap, reference_circuit, reference_hamiltonian,
                       term_distribution)
from .csscode import (CssCode, DecodeObservable, EncodedHamiltonian,
                      decode_observable, decode_outcomes, encode_hamiltonian,
                      encode_state, parse_code, repetition_code, steane_code)
from .densekit import (DenseFactor, PauliFactor, PauliString,
                       ProductObservable, ResourceLimitError, StateVector,
                       apply_pauli_string, apply_single_qubit, eigs_dense,
                       expectation, measure_product, pauli_matrix, random_state)
from .ftcalc import (FtParams, GapShift, gap_shift, overhead_identity_check,
                     qubit_overhead, required_levels, suppressed_error)
from .noise import (NoisyEstimate, PauliChannel, dual_factor,
                    exact_noisy_acceptance, exact_noisy_expectation,
                    mc_noisy_acceptance, parse_channel, sample_pauli_error)
from .protocol import (FixedStateProver, HonestProver, ProtocolTranscript,
                       RandomStateProver, estimate_acceptance, run_round,
                       soundness_bound)
from .runner import (ConfigError, CrossoverEstimate, NoCrossoverError,
                     SweepConfig, SweepResult, confidence_interval, crossover,
                     run_sweep)
