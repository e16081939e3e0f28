"""Experiment orchestration: noise-sweep campaigns, crossover estimation and
deterministic CSV emission.

A sweep evaluates the verifier's acceptance probability over a grid of noise
strengths for two variants: the bare history state ("unencoded", always
evaluated exactly) and the code-encoded state ("encoded", evaluated in the
configured mode).  Identical configuration and seed produce byte-identical
CSV output.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .clockham import (Circuit, Gate, XZHamiltonian, build_component_hamiltonian,
                       history_state, reference_circuit, reference_hamiltonian)
from .csscode import encode_hamiltonian, encode_state, parse_code
from .densekit import StateVector
from .noise import (Z95, exact_noisy_acceptance, mc_noisy_acceptance,
                    parse_channel)
from .protocol import HonestProver, estimate_acceptance

DEFAULT_COARSE_GRID = tuple(float(p) for p in np.linspace(0.0, 1.0, 12))
DEFAULT_REFINED_GRID = tuple(float(p) for p in np.linspace(0.05, 0.15, 12))
DEFAULT_COARSE_REPS = 1000
DEFAULT_REFINED_REPS = 4000
CSV_HEADER = "p,variant,estimate,ci_low,ci_high,reps,seed"
SPEC_VERSION = 1


class ConfigError(ValueError):
    """Invalid sweep configuration."""


class NoCrossoverError(RuntimeError):
    """The encoded-unencoded difference does not change sign on the grid."""


def _parse_gates(raw) -> tuple:
    gates = []
    for i, g in enumerate(raw):
        if g == "x":
            gates.append(Gate("x"))
        elif isinstance(g, dict) and set(g) == {"rot"}:
            gates.append(Gate("rot", float(g["rot"])))
        else:
            raise ConfigError(f"instance.gates[{i}]: expected \"x\" or "
                              f"{{\"rot\": phi}}, got {g!r}")
    return tuple(gates)


@dataclass(frozen=True)
class SweepConfig:
    """One sweep campaign: instance, code, channel family, grid and mode."""

    circuit: Circuit
    claimed_accept: bool = True
    hamiltonian: str = "reference"   # "reference" (hardcoded) or "component"
    code: str = "repetition:3"
    channel: str = "bitflip"
    grid: tuple = DEFAULT_COARSE_GRID
    reps: int = DEFAULT_COARSE_REPS
    mode: str = "exact"              # "exact" | "mc" | "protocol"
    seed: int = 0

    def __post_init__(self):
        if self.hamiltonian not in ("reference", "component"):
            raise ConfigError(f"hamiltonian: unknown kind {self.hamiltonian!r}")
        if self.hamiltonian == "reference" and self.circuit != reference_circuit(
                self.circuit.input_bit):
            raise ConfigError(
                "hamiltonian: \"reference\" requires the built-in two-gate circuit")
        if self.channel not in ("bitflip", "depolarizing"):
            raise ConfigError(f"channel: unknown family {self.channel!r}")
        if self.mode not in ("exact", "mc", "protocol"):
            raise ConfigError(f"mode: unknown mode {self.mode!r}")
        grid = tuple(float(p) for p in self.grid)
        if not grid:
            raise ConfigError("grid: must not be empty")
        if any(not 0.0 <= p <= 1.0 for p in grid):
            raise ConfigError("grid: values must lie in [0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("grid: values must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        if self.mode != "exact" and self.reps < 1:
            raise ConfigError("reps: must be >= 1 for sampling modes")
        try:
            parse_code(self.code)
        except ValueError as exc:
            raise ConfigError(f"code: {exc}") from exc

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        if data.get("spec_version") != SPEC_VERSION:
            raise ConfigError(
                f"spec_version: expected {SPEC_VERSION}, got "
                f"{data.get('spec_version')!r}")
        inst = data.get("instance", {})
        input_bit = inst.get("input_bit", 0)
        if input_bit not in (0, 1):
            raise ConfigError("instance.input_bit: must be 0 or 1")
        if "gates" in inst:
            circuit = Circuit(input_bit, _parse_gates(inst["gates"]))
        else:
            circuit = reference_circuit(input_bit)
        known = {"spec_version", "instance", "code", "channel", "grid",
                 "reps", "mode", "seed"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        kwargs = {}
        for field_name in ("code", "channel", "grid", "reps", "mode", "seed"):
            if field_name in data:
                kwargs[field_name] = data[field_name]
        if "grid" in kwargs:
            kwargs["grid"] = tuple(kwargs["grid"])
        return cls(circuit=circuit,
                   claimed_accept=bool(inst.get("claimed_accept", True)),
                   hamiltonian=inst.get("hamiltonian", "reference"),
                   **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "SweepConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def instance_hamiltonian(self) -> XZHamiltonian:
        if self.hamiltonian == "reference":
            return reference_hamiltonian(self.circuit.input_bit)
        return build_component_hamiltonian(self.circuit, self.claimed_accept)


@dataclass(frozen=True)
class SweepRow:
    p: float
    variant: str
    estimate: float
    ci_low: float
    ci_high: float
    reps: int
    seed: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple

    def variant_curve(self, variant: str):
        pts = [(r.p, r.estimate) for r in self.rows if r.variant == variant]
        return tuple(sorted(pts))

    def csv_text(self) -> str:
        lines = [CSV_HEADER]
        for r in self.rows:
            lines.append(",".join([
                format(r.p, ".10g"), r.variant, format(r.estimate, ".10g"),
                format(r.ci_low, ".10g"), format(r.ci_high, ".10g"),
                str(r.reps), str(r.seed)]))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.csv_text())


def _point_seed(master: int, point_index: int) -> int:
    # documented derivation: one SeedSequence word per grid point
    return int(np.random.SeedSequence([int(master), int(point_index)])
               .generate_state(1)[0])


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Run one campaign; encoded and unencoded rows share the grid."""
    ham = cfg.instance_hamiltonian()
    psi = history_state(cfg.circuit)
    code = parse_code(cfg.code)
    bare = encode_hamiltonian(None, ham, "decoded")
    rows = []
    enc_state = enc_h = prover = None
    if code is not None:
        enc_state = encode_state(code, psi)
        enc_h = encode_hamiltonian(code, ham, "decoded")
        if cfg.mode == "protocol":
            prover = HonestProver(psi)
    for pi, p in enumerate(cfg.grid):
        ch = parse_channel(cfg.channel, p)
        if code is not None:
            seed_pt = _point_seed(cfg.seed, pi)
            if cfg.mode == "exact":
                val = exact_noisy_acceptance(enc_state, enc_h, ch)
                rows.append(SweepRow(p, "encoded", val, val, val, 0, 0))
            elif cfg.mode == "mc":
                est = mc_noisy_acceptance(enc_state, enc_h, ch, cfg.reps, seed_pt)
                rows.append(SweepRow(p, "encoded", est.mean, est.ci_low,
                                     est.ci_high, est.reps, seed_pt))
            else:
                est = estimate_acceptance(ham, code, prover, ch, cfg.reps, seed_pt)
                rows.append(SweepRow(p, "encoded", est.mean, est.ci_low,
                                     est.ci_high, est.reps, seed_pt))
        val = exact_noisy_acceptance(psi, bare, ch)
        rows.append(SweepRow(p, "unencoded", val, val, val, 0, 0))
    return SweepResult(tuple(rows))


@dataclass(frozen=True)
class CrossoverEstimate:
    """Interpolated zero of the encoded-unencoded difference curve."""

    p_star: float
    bracket_low: float
    bracket_high: float
    warning: str = None


def crossover(result: SweepResult, zero_tol: float = 1e-12) -> CrossoverEstimate:
    """Linear interpolation of the difference curve's sign change.

    Differences below ``zero_tol`` in magnitude count as exact zeros; a zero
    run strictly inside the grid flanked by opposite signs is a crossing at
    its midpoint.  With several sign changes the first is returned and the
    estimate carries a warning.
    """
    enc = dict(result.variant_curve("encoded"))
    unenc = dict(result.variant_curve("unencoded"))
    if not enc or set(enc) != set(unenc):
        raise NoCrossoverError("encoded and unencoded rows must share the grid")
    grid = sorted(enc)
    diffs = [enc[p] - unenc[p] for p in grid]
    signs = [0 if abs(d) <= zero_tol else (1 if d > 0 else -1) for d in diffs]

    crossings = []
    i = 0
    while i < len(grid) - 1:
        s1 = signs[i]
        if s1 == 0:
            i += 1
            continue
        j = i + 1
        while j < len(grid) and signs[j] == 0:
            j += 1
        if j == len(grid):
            break
        s2 = signs[j]
        if s1 * s2 < 0:
            if j == i + 1:
                d1, d2 = diffs[i], diffs[j]
                p_star = grid[i] + (grid[j] - grid[i]) * d1 / (d1 - d2)
            else:
                zero_ps = grid[i + 1:j]
                p_star = zero_ps[(len(zero_ps) - 1) // 2]
            crossings.append((p_star, grid[i], grid[j]))
        i = j
    if not crossings:
        raise NoCrossoverError("no crossover in range")
    warning = None
    if len(crossings) > 1:
        others = ", ".join(format(c[0], ".4g") for c in crossings[1:])
        warning = (f"{len(crossings)} sign changes on the grid; returning the "
                   f"first (others near: {others})")
    p_star, lo, hi = crossings[0]
    return CrossoverEstimate(p_star, lo, hi, warning)


def confidence_interval(mean: float, std: float, n: int, level: float = 0.95,
                        clamp: bool = True):
    """Normal-approximation interval mean +- z * std / sqrt(n).

    Uses z = 1.96 at the default 95% level; n = 1 degenerates to the
    observation itself.  Probabilities are clamped to [0, 1].
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        half = 0.0
    else:
        if abs(level - 0.95) < 1e-12:
            z = Z95
        else:
            from statistics import NormalDist
            z = NormalDist().inv_cdf((1 + level) / 2)
        half = z * std / math.sqrt(n)
    lo, hi = mean - half, mean + half
    if clamp:
        lo, hi = max(0.0, lo), min(1.0, hi)
    return (min(lo, mean), max(hi, mean))
