"""Analytic fault-tolerance arithmetic: error suppression under code
concatenation, required depth, qubit overhead and the acceptance-gap shift.

All powers are evaluated in log space: eps^(2^k) underflows double precision
after a handful of levels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

MAX_LEVELS = 200
LOG_UNDERFLOW = -745.0  # exp() underflows to 0 below this


@dataclass(frozen=True)
class FtParams:
    """Concatenation parameters for one code family."""

    alpha: float       # code constant: one-level logical error <= alpha * eps^2
    eps_m: float       # per-measurement error rate
    eta: float         # target total error
    block_size: int    # physical qubits per block
    levels: int        # concatenation depth

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if not 0 < self.eps_m < 1:
            raise ValueError("eps_m must lie in (0, 1)")
        if not 0 < self.eta < 1:
            raise ValueError("eta must lie in (0, 1)")
        if self.block_size < 3:
            raise ValueError("block size must be >= 3")
        if self.levels < 0:
            raise ValueError("levels must be >= 0")
        if self.alpha * self.eps_m >= 1:
            raise ValueError(
                "above threshold: alpha * eps_m must be < 1 for suppression")


def _log_suppressed(alpha: float, eps_m: float, k: int) -> float:
    pow2 = 1 << k
    return (pow2 - 1) * math.log(alpha) + pow2 * math.log(eps_m)


def suppressed_error(alpha: float, eps_m: float, k: int) -> float:
    """Logical error alpha^(2^k - 1) * eps_m^(2^k) after k concatenations."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return eps_m
    log_val = _log_suppressed(alpha, eps_m, k)
    if log_val < LOG_UNDERFLOW:
        return 0.0
    return math.exp(log_val)


def required_levels(alpha: float, eps_m: float, eta: float,
                    measurements: int = 2) -> int:
    """Smallest k with suppressed error <= eta / measurements.

    The default budget split assumes two logical-qubit measurements per
    round (each term touches at most one X and one Z block).
    """
    if alpha * eps_m >= 1:
        raise ValueError("above threshold: alpha * eps_m >= 1, no finite depth")
    target = math.log(eta / measurements)
    for k in range(MAX_LEVELS + 1):
        log_val = math.log(eps_m) if k == 0 else _log_suppressed(alpha, eps_m, k)
        if log_val <= target:
            return k
    raise ValueError("no depth below the level guard reaches the target")


def qubit_overhead(block_size: int, k: int, n: int) -> int:
    """Physical qubits n * b^k after k levels of blocks of size b."""
    if block_size < 3 or k < 0 or n < 1:
        raise ValueError("need block_size >= 3, k >= 0, n >= 1")
    return n * block_size ** k


def overhead_identity_check(alpha: float, eps_m: float, eta: float,
                            block_size: int, measurements: int = 2):
    """Compare b^k against the closed-form depth estimate.

    Returns (lhs, rhs, rel_error) with lhs = b^k for k = required_levels and
    rhs = R^(log2 b) where R = log(2/(alpha eta)) / log(1/(alpha eps_m)).
    Natural logarithms in R, base-2 in the exponent, so that b^k equals
    (2^k)^(log2 b) identically; the comparison is asymptotic, not exact.
    """
    k = required_levels(alpha, eps_m, eta, measurements)
    lhs = float(block_size ** k)
    ratio = math.log(2.0 / (alpha * eta)) / math.log(1.0 / (alpha * eps_m))
    if ratio <= 0:
        raise ValueError("closed-form ratio is not positive")
    rhs = ratio ** math.log2(block_size)
    return lhs, rhs, abs(lhs - rhs) / rhs


@dataclass(frozen=True)
class GapShift:
    """Acceptance/rejection probabilities shifted by a total noise error eta."""

    p_acc: float
    p_rej: float
    eta: float

    @property
    def shifted_acc(self) -> float:
        return self.p_acc - self.eta

    @property
    def shifted_rej(self) -> float:
        return self.p_rej + self.eta

    @property
    def gap_maintained(self) -> bool:
        return self.shifted_acc > self.shifted_rej


def gap_shift(p_acc: float, p_rej: float, eta: float) -> GapShift:
    """Worst-case shift of the acceptance/rejection gap under noise eta."""
    for name, v in (("p_acc", p_acc), ("p_rej", p_rej)):
        if not 0 <= v <= 1:
            raise ValueError(f"{name} must lie in [0, 1]")
    return GapShift(p_acc, p_rej, eta)
