"""CSS code layer: encodings, decode observables and classical decoders.

Two codes are provided:
  * the m-qubit repetition code (odd m): corrects bit flips via majority
    vote, no correction in the X basis (parity only),
  * the 7-qubit Steane code: single-error correction in both bases via
    Hamming [7,4,3] syndrome decoding.

Blocks are laid out contiguously: logical qubit j occupies physical qubits
[j*m, (j+1)*m).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .clockham import XZHamiltonian
from .densekit import (DenseFactor, PauliFactor, ProductObservable,
                       ResourceLimitError, StateVector)

ENCODE_MAX_QUBITS = 24

# Hamming [7,4,3] parity checks; column j (1-based) is the binary of j with
# row 0 as the most significant syndrome bit.
HAMMING_CHECKS = np.array([
    [0, 0, 0, 1, 1, 1, 1],
    [0, 1, 1, 0, 0, 1, 1],
    [1, 0, 1, 0, 1, 0, 1],
], dtype=np.int64)


@dataclass(frozen=True)
class CssCode:
    """Code data: physical-per-logical count and logical basis states."""

    name: str
    m: int
    logical_zero: np.ndarray
    logical_one: np.ndarray

    def __post_init__(self):
        for attr in ("logical_zero", "logical_one"):
            v = np.asarray(getattr(self, attr), dtype=complex).copy()
            v.flags.writeable = False
            object.__setattr__(self, attr, v)

    @property
    def spec_string(self) -> str:
        return self.name if self.name == "steane" else f"{self.name}:{self.m}"


def repetition_code(m: int) -> CssCode:
    if m < 3 or m % 2 == 0:
        raise ValueError("repetition code needs odd m >= 3")
    zero = np.zeros(1 << m, dtype=complex)
    one = np.zeros(1 << m, dtype=complex)
    zero[0] = 1.0
    one[-1] = 1.0
    return CssCode("repetition", m, zero, one)


def _steane_logical_zero() -> np.ndarray:
    """Project |0000000> onto the +1 eigenspace of the X stabilizers."""
    v = np.zeros(1 << 7)
    v[0] = 1.0
    for row in HAMMING_CHECKS:
        mask = 0
        for c in range(7):
            if row[c]:
                mask |= 1 << (6 - c)
        flipped = np.zeros_like(v)
        idx = np.arange(1 << 7)
        flipped[idx ^ mask] = v
        v = (v + flipped) / 2.0
    return (v / np.linalg.norm(v)).astype(complex)


def steane_code() -> CssCode:
    zero = _steane_logical_zero()
    one = np.zeros_like(zero)
    idx = np.arange(1 << 7)
    one[idx ^ ((1 << 7) - 1)] = zero
    return CssCode("steane", 7, zero, one)


def parse_code(spec: str):
    """Code from a config string: "repetition:m", "steane" or "none"."""
    spec = spec.strip().lower()
    if spec == "none":
        return None
    if spec == "steane":
        return steane_code()
    if spec.startswith("repetition:"):
        return repetition_code(int(spec.split(":", 1)[1]))
    raise ValueError(f"unknown code spec: {spec!r}")


# --- classical outcome decoding -------------------------------------------

def _hamming_decode(bits):
    bits = list(bits)
    syn = (HAMMING_CHECKS @ np.asarray(bits)) % 2
    pos = int(syn[0] * 4 + syn[1] * 2 + syn[2])
    if pos:
        bits[pos - 1] ^= 1
    return sum(bits) % 2, tuple(bits)


def decode_outcomes(code: CssCode, basis: str, bits):
    """Classical decoding of one block's transversal measurement record.

    Returns (logical_bit, corrected_bits).  Repetition: majority vote in Z,
    bare parity in X (the code cannot correct phase errors).  Steane: Hamming
    syndrome correction then parity, identically in both bases.
    """
    if basis not in ("Z", "X"):
        raise ValueError("basis must be 'Z' or 'X'")
    bits = tuple(int(b) for b in bits)
    if len(bits) != code.m:
        raise ValueError(f"expected {code.m} bits, got {len(bits)}")
    if code.name == "repetition":
        if basis == "Z":
            maj = 1 if sum(bits) > code.m // 2 else 0
            return maj, (maj,) * code.m
        return sum(bits) % 2, bits
    if code.name == "steane":
        return _hamming_decode(bits)
    raise ValueError(f"no decoder for code {code.name!r}")


# --- decode observables -----------------------------------------------------

@dataclass(frozen=True)
class DecodeObservable:
    """M0 - M1 observable whose eigenspaces follow the classical decoder.

    ``diagonal`` holds the computational-basis eigenvalues of the Z-basis
    variant; the X-basis variant is the same operator conjugated by
    Hadamards on every block qubit.
    """

    code_name: str
    m: int
    basis: str
    diagonal: np.ndarray
    matrix: np.ndarray
    expansion: tuple

    def m0(self) -> np.ndarray:
        return (np.eye(1 << self.m) + self.matrix) / 2.0

    def m1(self) -> np.ndarray:
        return (np.eye(1 << self.m) - self.matrix) / 2.0

    def as_factor(self, start: int) -> DenseFactor:
        return DenseFactor(start, self.matrix, expansion=self.expansion)


def _walsh_matrix(m: int) -> np.ndarray:
    h = np.array([[1, 1], [1, -1]], dtype=float)
    return reduce(np.kron, [h] * m)


_OBSERVABLE_CACHE = {}


def decode_observable(code: CssCode, basis: str) -> DecodeObservable:
    """Build the +-1 observable equivalent to transversal measurement + decode."""
    key = (code.name, code.m, basis)
    if key in _OBSERVABLE_CACHE:
        return _OBSERVABLE_CACHE[key]
    m = code.m
    diag = np.empty(1 << m)
    for j in range(1 << m):
        bits = [(j >> (m - 1 - k)) & 1 for k in range(m)]
        logical, _ = decode_outcomes(code, basis, bits)
        diag[j] = 1.0 if logical == 0 else -1.0
    # Pauli coefficients of the diagonal via a Walsh transform; the X-basis
    # operator swaps Z for X in every string.
    walsh = _walsh_matrix(m)
    coefs = walsh @ diag / (1 << m)
    expansion = []
    for mask in range(1 << m):
        if abs(coefs[mask]) <= 1e-12:
            continue
        label = "Z" if basis == "Z" else "X"
        sites = "".join(label if (mask >> (m - 1 - k)) & 1 else "I"
                        for k in range(m))
        expansion.append((float(coefs[mask]), sites))
    if basis == "Z":
        matrix = np.diag(diag).astype(complex)
    else:
        h = _walsh_matrix(m) / np.sqrt(2) ** m
        matrix = (h @ np.diag(diag) @ h).astype(complex)
    obs = DecodeObservable(code.name, m, basis, diag, matrix, tuple(expansion))
    _OBSERVABLE_CACHE[key] = obs
    return obs


# --- encoding ---------------------------------------------------------------

def encode_state(code: CssCode, state: StateVector) -> StateVector:
    """Replace each computational-basis qubit by its logical counterpart."""
    n, m = state.num_qubits, code.m
    if n * m > ENCODE_MAX_QUBITS:
        raise ResourceLimitError(
            f"encoded register of {n * m} qubits exceeds {ENCODE_MAX_QUBITS}")
    logical = np.stack([code.logical_zero, code.logical_one])  # (2, 2^m)
    tens = state.amplitudes.reshape((2,) * n)
    for _ in range(n):
        # contract the leading logical axis, appending its physical block
        tens = np.tensordot(tens, logical, axes=([0], [0]))
    return StateVector(n * m, tens.reshape(-1))


@dataclass(frozen=True)
class EncodedHamiltonian:
    """Encoded terms (coefficient, ProductObservable) plus code metadata."""

    code: object  # CssCode or None for the bare register
    mode: str
    num_logical_qubits: int
    terms: tuple

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    @property
    def num_qubits(self) -> int:
        m = 1 if self.code is None else self.code.m
        return self.num_logical_qubits * m

    @property
    def coefficients(self) -> tuple:
        return tuple(a for a, _ in self.terms)


def encode_hamiltonian(code, ham: XZHamiltonian, mode: str = "decoded") -> EncodedHamiltonian:
    """Blockwise substitution of each XZ term.

    mode "logical" replaces X -> X^m, Z -> Z^m, I -> I^m.  mode "decoded"
    substitutes the classical-decoder observable for bases the code corrects
    (Z for repetition; both for Steane) and keeps the bare transversal string
    otherwise.  ``code=None`` wraps the bare single-qubit terms.
    """
    if mode not in ("logical", "decoded"):
        raise ValueError("mode must be 'logical' or 'decoded'")
    n = ham.num_qubits
    terms = []
    if code is None:
        for a, sites in ham.terms:
            factors = tuple(PauliFactor(j, sites[j]) for j in range(n))
            terms.append((a, ProductObservable(n, factors)))
        return EncodedHamiltonian(None, mode, n, tuple(terms))

    m = code.m
    decoded_bases = {"Z"} if code.name == "repetition" else {"Z", "X"}
    for a, sites in ham.terms:
        factors = []
        for j, c in enumerate(sites):
            start = j * m
            if c == "I":
                factors.append(PauliFactor(start, "I" * m))
            elif mode == "decoded" and c in decoded_bases:
                factors.append(decode_observable(code, c).as_factor(start))
            else:
                factors.append(PauliFactor(start, c * m))
        terms.append((a, ProductObservable(n * m, tuple(factors))))
    return EncodedHamiltonian(code, mode, n, tuple(terms))
