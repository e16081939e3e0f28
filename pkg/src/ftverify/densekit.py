"""Dense complex state-vector kernel.

Conventions (fixed across the whole package):
  * qubit 0 is the most significant bit of a basis-state index, so an
    n-qubit basis state |b0 b1 ... b_{n-1}> has index sum(b_j << (n-1-j)),
  * states are unit-norm vectors of 2^n complex amplitudes and are treated
    as immutable after construction,
  * observables used for measurement have eigenvalues in {-1, +1}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

NORM_TOL = 1e-10
IMAG_WARN = 1e-10
IMAG_FAIL = 1e-8
EIGS_MAX_DIM = 1 << 12

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured desk-scale resource guard."""


def pauli_matrix(sites: str) -> np.ndarray:
    """Dense matrix of a tensor product of single-qubit Paulis."""
    return reduce(np.kron, (PAULI_1Q[c] for c in sites))


@dataclass(frozen=True)
class StateVector:
    """Pure state of ``num_qubits`` qubits as 2^n dense amplitudes."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("need at least one qubit")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"expected {1 << self.num_qubits} amplitudes, got {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |norm - 1| = {abs(norm - 1):g}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << num_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        n = int(amps.shape[0]).bit_length() - 1
        return cls(n, amps / norm)


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-site Paulis with a real prefactor."""

    sites: str
    coefficient: float = 1.0

    def __post_init__(self):
        bad = set(self.sites) - set("IXYZ")
        if bad:
            raise ValueError(f"invalid Pauli labels: {sorted(bad)}")

    @property
    def num_qubits(self) -> int:
        return len(self.sites)

    @property
    def x_weight(self) -> int:
        return self.sites.count("X")

    @property
    def z_weight(self) -> int:
        return self.sites.count("Z")


@dataclass(frozen=True)
class PauliFactor:
    """Product of single-qubit Paulis on qubits [start, start + len(sites))."""

    start: int
    sites: str

    @property
    def num_qubits(self) -> int:
        return len(self.sites)

    @property
    def is_identity(self) -> bool:
        return set(self.sites) <= {"I"}

    def matrix(self) -> np.ndarray:
        return pauli_matrix(self.sites)

    def pauli_expansion(self):
        return ((1.0, self.sites),)


@dataclass(frozen=True)
class DenseFactor:
    """Dense Hermitian block observable with eigenvalues in {-1, +1}.

    ``expansion`` optionally caches the block's Pauli decomposition as
    (coefficient, sites) pairs; factors built by the code layer provide it.
    """

    start: int
    matrix: np.ndarray
    expansion: tuple = field(default=None, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] & (m.shape[0] - 1):
            raise ValueError("block matrix must be square with power-of-two size")
        if np.max(np.abs(m - m.conj().T)) > 1e-8:
            raise ValueError("block observable must be Hermitian")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def num_qubits(self) -> int:
        return int(self.matrix.shape[0]).bit_length() - 1

    @property
    def is_identity(self) -> bool:
        return bool(np.allclose(self.matrix, np.eye(self.matrix.shape[0]), atol=1e-12))

    def pauli_expansion(self):
        if self.expansion is not None:
            return self.expansion
        return _expand_block(self.matrix)


@dataclass(frozen=True)
class ProductObservable:
    """Observable that factorizes over disjoint contiguous qubit ranges."""

    num_qubits: int
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors",
                           tuple(sorted(self.factors, key=lambda f: f.start)))
        pos = 0
        for f in self.factors:
            if f.start != pos:
                raise ValueError("factors must tile the register without gaps")
            pos = f.start + f.num_qubits
        if pos != self.num_qubits:
            raise ValueError("factors do not cover the full register")


def _expand_block(matrix: np.ndarray):
    """Pauli decomposition of a small dense block (guarded to 4 qubits)."""
    k = int(matrix.shape[0]).bit_length() - 1
    if k > 4:
        raise ResourceLimitError("generic block expansion limited to 4 qubits")
    out = []
    for idx in range(4 ** k):
        sites = "".join("IXYZ"[(idx >> (2 * (k - 1 - j))) & 3] for j in range(k))
        coef = np.trace(pauli_matrix(sites) @ matrix) / (1 << k)
        if abs(coef.imag) > 1e-10:
            raise ValueError("non-Hermitian block: complex Pauli coefficient")
        if abs(coef.real) > 1e-12:
            out.append((float(coef.real), sites))
    return tuple(out)


def _qubit_axis_view(amps: np.ndarray, num_qubits: int, qubit: int):
    pre = 1 << qubit
    post = 1 << (num_qubits - qubit - 1)
    return amps.reshape(pre, 2, post)


def apply_single_qubit(state: StateVector, qubit: int, op: np.ndarray) -> StateVector:
    """Apply a 2x2 operator to one qubit; norm is preserved iff op is unitary."""
    if not 0 <= qubit < state.num_qubits:
        raise IndexError(f"qubit {qubit} out of range for {state.num_qubits} qubits")
    t = _qubit_axis_view(state.amplitudes, state.num_qubits, qubit)
    out = np.einsum("ab,ibj->iaj", np.asarray(op, dtype=complex), t)
    return StateVector(state.num_qubits, out.reshape(-1))


def apply_block(amps: np.ndarray, num_qubits: int, start: int,
                matrix: np.ndarray) -> np.ndarray:
    """Apply a dense operator to the contiguous qubit block starting at ``start``."""
    dim = matrix.shape[0]
    k = int(dim).bit_length() - 1
    pre = 1 << start
    post = 1 << (num_qubits - start - k)
    m = np.ascontiguousarray(matrix, dtype=complex)
    if pre == 1:
        return (m @ amps.reshape(dim, post)).reshape(-1)
    if post == 1:
        return (amps.reshape(pre, dim) @ m.T).reshape(-1)
    t = np.moveaxis(amps.reshape(pre, dim, post), 1, 0).reshape(dim, pre * post)
    out = (m @ t).reshape(dim, pre, post)
    return np.moveaxis(out, 0, 1).reshape(-1)


def _mask_of(sites: str, labels: str) -> int:
    n = len(sites)
    mask = 0
    for j, c in enumerate(sites):
        if c in labels:
            mask |= 1 << (n - 1 - j)
    return mask


def _parity_vector(indices: np.ndarray, mask: int) -> np.ndarray:
    par = np.zeros(indices.shape, dtype=np.int64)
    pos = 0
    while mask:
        if mask & 1:
            par ^= (indices >> pos) & 1
        mask >>= 1
        pos += 1
    return par


def apply_pauli_string(state: StateVector, sites: str) -> StateVector:
    """Apply an n-qubit Pauli string (permutation + phases, no matrices)."""
    if len(sites) != state.num_qubits:
        raise ValueError("Pauli string length does not match register")
    amps = _pauli_action(state.amplitudes, state.num_qubits, sites)
    return StateVector(state.num_qubits, amps)


def _pauli_action(amps: np.ndarray, num_qubits: int, sites: str) -> np.ndarray:
    x_mask = _mask_of(sites, "XY")
    zy_mask = _mask_of(sites, "ZY")
    n_y = sites.count("Y")
    idx = np.arange(1 << num_qubits)
    src = idx ^ x_mask
    phase = (1j) ** n_y * np.where(_parity_vector(src, zy_mask) == 1, -1.0, 1.0)
    return phase * amps[src]


def expectation(state: StateVector, obs) -> float:
    """<state|obs|state> for a PauliString or ProductObservable.

    The value of a Hermitian observable is real; an imaginary residue above
    1e-8 indicates a non-Hermitian observable and raises.
    """
    if isinstance(obs, PauliString):
        if obs.num_qubits != state.num_qubits:
            raise ValueError("observable dimension does not match state")
        acted = _pauli_action(state.amplitudes, state.num_qubits, obs.sites)
        val = obs.coefficient * np.vdot(state.amplitudes, acted)
    elif isinstance(obs, ProductObservable):
        if obs.num_qubits != state.num_qubits:
            raise ValueError("observable dimension does not match state")
        amps = state.amplitudes
        for f in obs.factors:
            if isinstance(f, PauliFactor):
                if f.is_identity:
                    continue
                full = "I" * f.start + f.sites + "I" * (
                    state.num_qubits - f.start - f.num_qubits)
                amps = _pauli_action(amps, state.num_qubits, full)
            else:
                amps = apply_block(amps, state.num_qubits, f.start, f.matrix)
        val = np.vdot(state.amplitudes, amps)
    else:
        raise TypeError(f"unsupported observable type: {type(obs).__name__}")
    if abs(val.imag) > IMAG_FAIL:
        raise ValueError(f"imaginary residue {val.imag:g} in expectation value")
    return float(val.real)


def _factor_action(amps: np.ndarray, num_qubits: int, factor) -> np.ndarray:
    if isinstance(factor, PauliFactor):
        full = "I" * factor.start + factor.sites + "I" * (
            num_qubits - factor.start - factor.num_qubits)
        return _pauli_action(amps, num_qubits, full)
    return apply_block(amps, num_qubits, factor.start, factor.matrix)


def measure_product(state: StateVector, obs: ProductObservable, rng):
    """Measure each factor of ``obs`` sequentially via the Born rule.

    Returns (outcomes, collapsed) where outcomes holds one value in {-1, +1}
    per factor.  Identity factors yield +1 without touching the state.  The
    factors act on disjoint qubits, so they commute and the sequential joint
    distribution is the Born distribution of the full factor set.
    """
    if obs.num_qubits != state.num_qubits:
        raise ValueError("observable dimension does not match state")
    amps = state.amplitudes.copy()
    outcomes = []
    for f in obs.factors:
        if getattr(f, "is_identity", False):
            outcomes.append(1)
            continue
        acted = _factor_action(amps, state.num_qubits, f)
        e = float(np.real(np.vdot(amps, acted)))
        p_plus = min(max((1.0 + e) / 2.0, 0.0), 1.0)
        if rng.random() < p_plus:
            outcomes.append(1)
            amps = (amps + acted) / (2.0 * np.sqrt(p_plus))
        else:
            outcomes.append(-1)
            amps = (amps - acted) / (2.0 * np.sqrt(1.0 - p_plus))
    return tuple(outcomes), StateVector(state.num_qubits, amps)


def eigs_dense(ham) -> np.ndarray:
    """Full ascending real spectrum of a Hermitian matrix (brute-force oracle)."""
    matrix = ham.dense() if hasattr(ham, "dense") else np.asarray(ham, dtype=complex)
    if matrix.shape[0] > EIGS_MAX_DIM:
        raise ResourceLimitError(
            f"dense eigensolve limited to dimension {EIGS_MAX_DIM}")
    if np.max(np.abs(matrix - matrix.conj().T)) > 1e-10:
        raise ValueError("matrix is not Hermitian")
    return np.linalg.eigvalsh(matrix)


def random_state(num_qubits: int, rng) -> StateVector:
    """Haar-like random pure state from normalized complex Gaussian amplitudes."""
    dim = 1 << num_qubits
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector.normalized(amps)
