"""Local Pauli noise: dual-channel exact evaluation and Monte Carlo sampling.

A Pauli channel acting i.i.d. on every qubit immediately before ideal
measurement is equivalent, in the Heisenberg picture, to rescaling each
Pauli operator by a channel-dependent factor.  This gives an exact,
sampling-free evaluation path for small block expansions.  The Monte Carlo
path instead samples one Pauli error per repetition, applies it to the
state, and evaluates every term expectation exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .csscode import EncodedHamiltonian
from .densekit import (DenseFactor, PauliFactor, PauliString, ProductObservable,
                       ResourceLimitError, StateVector, _factor_action,
                       _pauli_action, apply_block, pauli_matrix)

EXPANSION_GUARD = 1 << 16
Z95 = 1.96  # normal-approximation quantile used for all reported intervals


@dataclass(frozen=True)
class PauliChannel:
    """Single-qubit Pauli channel, applied i.i.d. across qubits."""

    p_i: float
    p_x: float
    p_y: float
    p_z: float

    def __post_init__(self):
        probs = (self.p_i, self.p_x, self.p_y, self.p_z)
        if any(p < -1e-12 or p > 1 + 1e-12 for p in probs):
            raise ValueError("channel probabilities must lie in [0, 1]")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError("channel probabilities must sum to 1")

    @classmethod
    def bitflip(cls, p: float) -> "PauliChannel":
        return cls(1 - p, p, 0.0, 0.0)

    @classmethod
    def depolarizing(cls, p: float) -> "PauliChannel":
        return cls(1 - 3 * p / 4, p / 4, p / 4, p / 4)

    @classmethod
    def identity(cls) -> "PauliChannel":
        return cls(1.0, 0.0, 0.0, 0.0)

    @property
    def is_identity(self) -> bool:
        return self.p_x == self.p_y == self.p_z == 0.0

    @property
    def probabilities(self) -> tuple:
        return (self.p_i, self.p_x, self.p_y, self.p_z)


def parse_channel(spec: str, p: float = None) -> PauliChannel:
    """Channel from a config string: "bitflip:0.3", "depolarizing:0.1", "none"."""
    spec = spec.strip().lower()
    if ":" in spec:
        name, val = spec.split(":", 1)
        p = float(val)
    else:
        name = spec
    if name == "none":
        return PauliChannel.identity()
    if name == "bitflip":
        return PauliChannel.bitflip(p)
    if name == "depolarizing":
        return PauliChannel.depolarizing(p)
    raise ValueError(f"unknown channel spec: {spec!r}")


def dual_factor(ch: PauliChannel, site: str) -> float:
    """Scalar f with E^dagger(P) = f P for a single-site Pauli P."""
    if site == "I":
        return 1.0
    if site == "X":
        return ch.p_i + ch.p_x - ch.p_y - ch.p_z
    if site == "Y":
        return ch.p_i - ch.p_x + ch.p_y - ch.p_z
    if site == "Z":
        return ch.p_i - ch.p_x - ch.p_y + ch.p_z
    raise ValueError(f"invalid Pauli site {site!r}")


def _string_damping(ch: PauliChannel, sites: str) -> float:
    f = 1.0
    for c in sites:
        if c != "I":
            f *= dual_factor(ch, c)
    return f


def _damped_factor_matrix(factor, ch: PauliChannel) -> np.ndarray:
    """Heisenberg-damped dense matrix of one block factor."""
    out = None
    for coef, sites in factor.pauli_expansion():
        m = coef * _string_damping(ch, sites) * pauli_matrix(sites)
        out = m if out is None else out + m
    return out


def exact_noisy_expectation(state: StateVector, obs, ch: PauliChannel) -> float:
    """Exact expectation of ``obs`` on the channel-noised ``state``.

    Heisenberg picture: every Pauli string in the observable's expansion is
    rescaled by the product of per-site dual factors.  Guarded to a total
    expansion of 2^16 strings across blocks.
    """
    if isinstance(obs, PauliString):
        return obs.coefficient * _string_damping(ch, obs.sites) * \
            _bare_expectation(state.amplitudes, state.num_qubits,
                              PauliFactor(0, obs.sites))
    if not isinstance(obs, ProductObservable):
        raise TypeError(f"unsupported observable type: {type(obs).__name__}")
    total = 1
    for f in obs.factors:
        total *= len(f.pauli_expansion())
        if total > EXPANSION_GUARD:
            raise ResourceLimitError(
                f"block Pauli expansion exceeds {EXPANSION_GUARD} strings")
    amps = state.amplitudes
    for f in obs.factors:
        if isinstance(f, PauliFactor) and f.is_identity:
            continue
        amps = apply_block(amps, state.num_qubits, f.start,
                           _damped_factor_matrix(f, ch))
    val = np.vdot(state.amplitudes, amps)
    if abs(val.imag) > 1e-8:
        raise ValueError(f"imaginary residue {val.imag:g} in noisy expectation")
    return float(val.real)


def _bare_expectation(amps: np.ndarray, num_qubits: int, factor) -> float:
    return float(np.real(np.vdot(amps, _factor_action(amps, num_qubits, factor))))


def exact_noisy_acceptance(state: StateVector, enc: EncodedHamiltonian,
                           ch: PauliChannel) -> float:
    """Acceptance probability from exact per-term noisy expectations."""
    coeffs = enc.coefficients
    k_norm = sum(abs(a) for a in coeffs)
    energy = sum(a * exact_noisy_expectation(state, obs, ch)
                 for a, obs in enc.terms)
    return 0.5 - energy / (2.0 * k_norm)


def sample_pauli_error(ch: PauliChannel, n: int, rng) -> str:
    """I.i.d. site-wise draw of an n-qubit Pauli error string."""
    cum = np.cumsum(ch.probabilities)
    draws = np.searchsorted(cum, rng.random(n), side="right")
    return "".join("IXYZ"[min(d, 3)] for d in draws)


@dataclass(frozen=True)
class NoisyEstimate:
    """Sampled mean with a 95% normal-approximation confidence interval."""

    mean: float
    ci_low: float
    ci_high: float
    reps: int
    seed: int


def estimate_from_samples(values: np.ndarray, seed: int) -> NoisyEstimate:
    values = np.asarray(values, dtype=float)
    reps = len(values)
    if np.all(values == values[0]):
        v = float(values[0])  # degenerate sample: exact mean, zero-width CI
        return NoisyEstimate(v, v, v, reps, seed)
    mean = float(np.mean(values))
    half = Z95 * float(np.std(values, ddof=1)) / math.sqrt(reps)
    lo = max(0.0, mean - half)
    hi = min(1.0, mean + half)
    return NoisyEstimate(mean, min(lo, mean), max(hi, mean), reps, seed)


def _rep_rng(seed: int, rep: int):
    # per-repetition stream: master seed and repetition index are combined
    # into one SeedSequence entropy list, independent of execution order
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(rep)]))


def _logical_branches(state: StateVector, code) -> np.ndarray | None:
    """Amplitudes of ``state`` in the product logical basis, or None.

    Returns c with state = sum_z c[z] |z_1~> ... |z_n~> when the state lies
    in the span of the blockwise logical basis (the honest-prover case).
    """
    m = code.m
    n = state.num_qubits // m
    logical = np.stack([code.logical_zero, code.logical_one])
    tens = state.amplitudes.reshape((1 << m,) * n)
    for _ in range(n):
        tens = np.tensordot(tens, logical.conj(), axes=([0], [1]))
    if abs(np.linalg.norm(tens) - 1.0) > 1e-9:
        return None
    return tens.reshape(-1)


def _block_basis_map(enc: EncodedHamiltonian):
    """Per-term tuple of per-block labels in {I, X, Z} plus factor matrices."""
    code = enc.code
    n = enc.num_logical_qubits
    per_term = []
    matrices = {}
    for _, obs in enc.terms:
        labels = []
        for j, f in enumerate(obs.factors):
            if getattr(f, "is_identity", False):
                labels.append("I")
                continue
            if isinstance(f, PauliFactor):
                label = next(c for c in f.sites if c != "I")
            else:
                # decode observables carry a single-basis expansion
                label = next(c for _, s in f.pauli_expansion() for c in s
                             if c != "I")
            labels.append(label)
            matrices.setdefault(label, np.asarray(
                f.matrix() if isinstance(f, PauliFactor) else f.matrix))
        per_term.append(tuple(labels))
    return per_term, matrices


def _mc_fast(branches: np.ndarray, enc: EncodedHamiltonian, ch: PauliChannel,
             reps: int, seed: int) -> np.ndarray:
    """Per-rep acceptance via 2x2 logical block matrices.

    For a blockwise Pauli error E = (x)_b E_b and factorized observable
    (x)_b F_b, the expectation on the encoded state equals
    <psi_L| (x)_b M_b |psi_L> with M_b[u,v] = <u~| E_b F_b E_b |v~>.
    """
    code = enc.code
    m = code.m
    n = enc.num_logical_qubits
    coeffs = np.array(enc.coefficients)
    k_norm = float(np.sum(np.abs(coeffs)))
    labels_per_term, fmats = _block_basis_map(enc)
    logical = np.stack([code.logical_zero, code.logical_one])
    eye2 = np.eye(2, dtype=complex)
    values = np.empty(reps)
    for rep in range(reps):
        rng = _rep_rng(seed, rep)
        err = sample_pauli_error(ch, n * m, rng)
        block_ms = []
        for b in range(n):
            sub = err[b * m:(b + 1) * m]
            if set(sub) <= {"I"}:
                el = logical
            else:
                el = np.stack([_pauli_action(logical[0], m, sub),
                               _pauli_action(logical[1], m, sub)])
            ms = {"I": eye2}
            block_ms.append((el, ms))
        expects = np.empty(len(coeffs))
        for t, labels in enumerate(labels_per_term):
            mats = []
            for b, lab in enumerate(labels):
                el, ms = block_ms[b]
                if lab not in ms:
                    ms[lab] = el.conj() @ (fmats[lab] @ el.T)
                mats.append(ms[lab])
            full = reduce(np.kron, mats)
            val = np.vdot(branches, full @ branches)
            expects[t] = val.real
        values[rep] = 0.5 - float(coeffs @ expects) / (2.0 * k_norm)
    return values


def _mc_generic(state: StateVector, enc: EncodedHamiltonian, ch: PauliChannel,
                reps: int, seed: int) -> np.ndarray:
    coeffs = np.array(enc.coefficients)
    k_norm = float(np.sum(np.abs(coeffs)))
    n = state.num_qubits
    values = np.empty(reps)
    for rep in range(reps):
        rng = _rep_rng(seed, rep)
        err = sample_pauli_error(ch, n, rng)
        amps = state.amplitudes if set(err) <= {"I"} \
            else _pauli_action(state.amplitudes, n, err)
        expects = np.array([
            _noisy_term_expectation(amps, n, obs) for _, obs in enc.terms])
        values[rep] = 0.5 - float(coeffs @ expects) / (2.0 * k_norm)
    return values


def _noisy_term_expectation(amps: np.ndarray, num_qubits: int,
                            obs: ProductObservable) -> float:
    acted = amps
    for f in obs.factors:
        if getattr(f, "is_identity", False):
            continue
        acted = _factor_action(acted, num_qubits, f)
    return float(np.real(np.vdot(amps, acted)))


def mc_noisy_acceptance(state: StateVector, enc: EncodedHamiltonian,
                        ch: PauliChannel, reps: int, seed: int) -> NoisyEstimate:
    """Monte Carlo acceptance: one sampled Pauli error per repetition.

    Each repetition applies the sampled error to the state, evaluates every
    encoded term expectation exactly, and folds the results through the
    acceptance formula.  Deterministic for fixed (seed, reps): repetition r
    always uses the stream seeded by [seed, r].

    When the state lies in the blockwise logical span of the announced code
    the per-rep evaluation contracts 2x2 logical block matrices instead of
    touching the full register (identical values, tested against the generic
    path).
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    values = None
    if enc.code is not None and state.num_qubits == enc.num_qubits:
        branches = _logical_branches(state, enc.code)
        if branches is not None:
            values = _mc_fast(branches, enc, ch, reps, seed)
    if values is None:
        values = _mc_generic(state, enc, ch, reps, seed)
    return estimate_from_samples(values, seed)
