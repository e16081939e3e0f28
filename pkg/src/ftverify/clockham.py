"""Circuits over {X, D(phi)}, their history states and clock Hamiltonians.

The gate D(phi) = cos(phi) Z + sin(phi) X is a real involutory unitary, so
every Hamiltonian built here expands into Pauli strings over {I, X, Z} only.

Register layout: qubit 0 is the single computation qubit, qubits 1..T are the
clock qubits; clock value t is encoded in unary as 1^t 0^(T-t).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import reduce
from itertools import product

import numpy as np

from .densekit import (PauliString, StateVector, pauli_matrix)

COEFF_PRUNE = 1e-12


@dataclass(frozen=True)
class Gate:
    """Single-qubit gate: kind "x" is Pauli X, kind "rot" is D(phi)."""

    kind: str
    phi: float = 0.0

    def __post_init__(self):
        if self.kind not in ("x", "rot"):
            raise ValueError(f"unsupported gate kind: {self.kind!r}")

    def matrix(self) -> np.ndarray:
        if self.kind == "x":
            return np.array([[0, 1], [1, 0]], dtype=complex)
        c, s = math.cos(self.phi), math.sin(self.phi)
        return np.array([[c, s], [s, -c]], dtype=complex)

    def site_expansion(self) -> dict:
        """Gate as real coefficients over single-site Paulis."""
        if self.kind == "x":
            return {"X": 1.0}
        return {"Z": math.cos(self.phi), "X": math.sin(self.phi)}


@dataclass(frozen=True)
class Circuit:
    """One-qubit computation: classical input bit followed by T gates."""

    input_bit: int
    gates: tuple

    def __post_init__(self):
        if self.input_bit not in (0, 1):
            raise ValueError("input bit must be 0 or 1")
        if len(self.gates) < 1:
            raise ValueError("circuit needs at least one gate")
        object.__setattr__(self, "gates", tuple(self.gates))

    @property
    def num_steps(self) -> int:
        return len(self.gates)

    def output_state(self) -> np.ndarray:
        """Amplitudes of the computation qubit after all gates."""
        v = np.zeros(2, dtype=complex)
        v[self.input_bit] = 1.0
        for g in self.gates:
            v = g.matrix() @ v
        return v


def reference_circuit(input_bit: int) -> Circuit:
    """The built-in two-step demonstration circuit: X then D(pi/8)."""
    return Circuit(input_bit, (Gate("x"), Gate("rot", math.pi / 8)))


@dataclass(frozen=True)
class XZHamiltonian:
    """Real combination of Pauli strings over {I, X, Z}."""

    num_qubits: int
    terms: tuple  # ((coefficient, sites), ...)

    def __post_init__(self):
        seen = set()
        for a, s in self.terms:
            if len(s) != self.num_qubits:
                raise ValueError(f"term {s!r} has wrong length")
            if set(s) - set("IXZ"):
                raise ValueError(f"term {s!r} contains a site outside {{I,X,Z}}")
            if s in seen:
                raise ValueError(f"duplicate term {s!r}")
            seen.add(s)
        if not self.terms or self.coefficient_norm <= 0:
            raise ValueError("Hamiltonian must have at least one nonzero term")

    @property
    def coefficient_norm(self) -> float:
        """K = sum of |a_i| over all terms."""
        return float(sum(abs(a) for a, _ in self.terms))

    @property
    def pauli_strings(self) -> tuple:
        return tuple(PauliString(s, a) for a, s in self.terms)

    def dense(self) -> np.ndarray:
        if self.num_qubits > 12:
            raise ValueError("dense form limited to 12 qubits")
        dim = 1 << self.num_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for a, s in self.terms:
            out += a * pauli_matrix(s)
        return out

    def to_json(self) -> str:
        payload = [{"coefficient": format(a, ".17g"), "paulis": s}
                   for a, s in self.terms]
        return json.dumps({"num_qubits": self.num_qubits, "terms": payload})

    @classmethod
    def from_json(cls, text: str) -> "XZHamiltonian":
        data = json.loads(text)
        terms = tuple((float(t["coefficient"]), t["paulis"]) for t in data["terms"])
        return cls(data["num_qubits"], terms)


def make_xz_hamiltonian(num_qubits: int, raw_terms) -> XZHamiltonian:
    """Merge duplicate strings, prune |a| < 1e-12, keep first-seen order."""
    acc, order = {}, []
    for a, s in raw_terms:
        if s not in acc:
            acc[s] = 0.0
            order.append(s)
        acc[s] += a
    terms = tuple((acc[s], s) for s in order if abs(acc[s]) > COEFF_PRUNE)
    return XZHamiltonian(num_qubits, terms)


def hamiltonian_expectation(state: StateVector, ham: XZHamiltonian) -> float:
    """<state| H |state> = sum_i a_i <S_i>."""
    from .densekit import expectation
    return sum(a * expectation(state, PauliString(s)) for a, s in ham.terms)


def history_state(circuit: Circuit) -> StateVector:
    """Uniform superposition of computation snapshots with a unary clock."""
    T = circuit.num_steps
    n = 1 + T
    amps = np.zeros(1 << n, dtype=complex)
    v = np.zeros(2, dtype=complex)
    v[circuit.input_bit] = 1.0
    for t in range(T + 1):
        if t > 0:
            v = circuit.gates[t - 1].matrix() @ v
        clock = 0
        for i in range(t):
            clock |= 1 << (T - 1 - i)
        amps[0 << T | clock] += v[0]
        amps[1 << T | clock] += v[1]
    return StateVector(n, amps / np.sqrt(T + 1))


# --- projector-product expansion helpers ---------------------------------

_PROJ0 = {"I": 0.5, "Z": 0.5}     # |0><0|
_PROJ1 = {"I": 0.5, "Z": -0.5}    # |1><1|


def _add_product(acc: dict, n: int, coeff: float, site_ops: dict):
    """Accumulate coeff * tensor-product of per-site expansions into acc."""
    positions = sorted(site_ops)
    expansions = [site_ops[p] for p in positions]
    for combo in product(*[list(e.items()) for e in expansions]):
        c = coeff
        sites = ["I"] * n
        for pos, (label, w) in zip(positions, combo):
            c *= w
            sites[pos] = label
        acc["".join(sites)] = acc.get("".join(sites), 0.0) + c


def build_component_hamiltonian(circuit: Circuit, claimed_accept: bool) -> XZHamiltonian:
    """Clock Hamiltonian H_in + H_clock + H_prop + H_out as an XZ expansion.

    The input term penalizes a wrong input bit at clock 0, the clock term
    penalizes the illegal 01 pattern, the propagation terms tie consecutive
    snapshots together (interior transitions are clock-controlled, boundary
    transitions act on the edge clock qubit alone), and the output term
    penalizes output 0 when claimed_accept is true, output 1 otherwise.
    The history state has zero energy on everything except the output term.
    """
    T = circuit.num_steps
    n = 1 + T
    acc = {}

    # clock qubit t (1-based) sits at register position t
    wrong_input = _PROJ1 if circuit.input_bit == 0 else _PROJ0
    _add_product(acc, n, 1.0, {0: wrong_input, 1: _PROJ0})

    for t in range(1, T):
        _add_product(acc, n, 1.0, {t: _PROJ0, t + 1: _PROJ1})

    for t in range(1, T + 1):
        gate = circuit.gates[t - 1].site_expansion()
        if t == 1:
            _add_product(acc, n, 0.5, {1: _PROJ0})
            if T == 1:
                _add_product(acc, n, 0.5, {1: _PROJ1})
            else:
                _add_product(acc, n, 0.5, {1: _PROJ1, 2: _PROJ0})
            _add_product(acc, n, -0.5, {0: gate, 1: {"X": 1.0}})
        elif t == T:
            _add_product(acc, n, 0.5, {T: _PROJ1})
            _add_product(acc, n, 0.5, {T - 1: _PROJ1, T: _PROJ0})
            _add_product(acc, n, -0.5, {0: gate, T: {"X": 1.0}})
        else:
            _add_product(acc, n, 0.5, {t - 1: _PROJ1, t: _PROJ0})
            _add_product(acc, n, 0.5, {t: _PROJ1, t + 1: _PROJ0})
            _add_product(acc, n, -0.5,
                         {0: gate, t - 1: _PROJ1, t: {"X": 1.0}, t + 1: _PROJ0})

    bad_output = _PROJ0 if claimed_accept else _PROJ1
    _add_product(acc, n, 1.0, {0: bad_output, T: _PROJ1})

    return make_xz_hamiltonian(n, ((a, s) for s, a in acc.items()))


def reference_hamiltonian(x: int) -> XZHamiltonian:
    """Canonical 3-qubit test Hamiltonian for the demonstration circuit.

    Hardcoded coefficient list (input bit enters via (-1)^x); this is the
    instance used for all acceptance-probability and threshold runs.
    """
    if x not in (0, 1):
        raise ValueError("x must be 0 or 1")
    s8, c8 = math.sin(math.pi / 8), math.cos(math.pi / 8)
    sign = (-1) ** x
    raw = [
        (7 / 4, "III"),
        ((1 - sign) / 4, "ZII"),
        (-sign / 4, "ZZI"),
        (-1 / 4, "IZZ"),
        (-1 / 2, "XXI"),
        (-1 / 2, "XXZ"),
        (-s8 / 2, "XIX"),
        (s8 / 2, "XZX"),
        (-c8 / 2, "ZIX"),
        (c8 / 2, "ZZX"),
        (-1 / 4, "ZIZ"),
    ]
    return make_xz_hamiltonian(3, raw)


def pauli_decompose(matrix: np.ndarray, expect_y_free: bool = True) -> XZHamiltonian:
    """Brute-force Pauli coefficients a_P = Tr(P M) / 2^n of a Hermitian matrix.

    Oracle for validating the symbolic builders; limited to 4 qubits.
    """
    m = np.asarray(matrix, dtype=complex)
    dim = m.shape[0]
    n = int(dim).bit_length() - 1
    if n > 4:
        raise ValueError("pauli_decompose limited to 4 qubits")
    if np.max(np.abs(m - m.conj().T)) > 1e-10:
        raise ValueError("matrix is not Hermitian")
    terms = []
    for combo in product("IXYZ", repeat=n):
        sites = "".join(combo)
        coef = np.trace(pauli_matrix(sites) @ m) / dim
        if abs(coef) < COEFF_PRUNE:
            continue
        if "Y" in sites and expect_y_free:
            raise ValueError(f"unexpected Y component on term {sites!r}")
        terms.append((float(coef.real), sites))
    return XZHamiltonian(n, tuple(terms))


def term_distribution(ham: XZHamiltonian) -> np.ndarray:
    """Sampling distribution p_i = |a_i| / K over the Hamiltonian terms."""
    weights = np.array([abs(a) for a, _ in ham.terms])
    total = weights.sum()
    if total <= 0:
        raise ValueError("empty Hamiltonian")
    return weights / total


def acceptance_probability(ham: XZHamiltonian, expectations) -> float:
    """Verifier acceptance probability 1/2 - sum_i a_i <S_i> / (2K).

    Equals the per-term mixture sum_i p_i (1 - sgn(a_i) <S_i>) / 2 with
    p_i = |a_i| / K.
    """
    vals = np.asarray(expectations, dtype=float)
    if vals.shape != (len(ham.terms),):
        raise ValueError("need one expectation value per term")
    if np.any(np.abs(vals) > 1 + 1e-9):
        raise ValueError("expectation value outside [-1, 1]")
    energy = float(sum(a * e for (a, _), e in zip(ham.terms, vals)))
    return 0.5 - energy / (2.0 * ham.coefficient_norm)


@dataclass(frozen=True)
class PromiseGap:
    """Energy thresholds separating rejectable from acceptable instances."""

    a: float  # rejection threshold: wrong-claim ground energy
    b: float  # acceptance threshold: correct-claim proof energy

    @property
    def width(self) -> float:
        return self.a - self.b


def promise_gap(circuit: Circuit, claimed_accept: bool) -> PromiseGap:
    """Desk-scale promise gap from dense eigensolves of both claim variants."""
    from .densekit import eigs_dense
    h_claim = build_component_hamiltonian(circuit, claimed_accept)
    h_other = build_component_hamiltonian(circuit, not claimed_accept)
    b = float(eigs_dense(h_claim.dense())[0])
    a = float(eigs_dense(h_other.dense())[0])
    return PromiseGap(a=a, b=b)
