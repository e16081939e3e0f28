"""Command-line interface.

Subcommands: ham (print Hamiltonians), state (history states), protocol
(round simulation), sweep (noise campaigns), ftcalc (overhead reports) and
selftest (golden-value suite).  Exit codes: 0 success, 1 usage or config
error, 2 numerical guard violation.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .clockham import (build_component_hamiltonian, history_state,
                       hamiltonian_expectation, reference_circuit,
                       reference_hamiltonian, term_distribution, Circuit, Gate)
from .csscode import decode_observable, parse_code, repetition_code
from .densekit import ResourceLimitError, StateVector, pauli_matrix
from .ftcalc import (gap_shift, overhead_identity_check, qubit_overhead,
                     required_levels, suppressed_error)
from .noise import parse_channel
from .protocol import (FixedStateProver, HonestProver, RandomStateProver,
                       estimate_acceptance, soundness_bound)
from .runner import (ConfigError, NoCrossoverError, SweepConfig, crossover,
                     run_sweep)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_gates_arg(text: str):
    gates = []
    for part in text.split(","):
        part = part.strip()
        if part == "x":
            gates.append(Gate("x"))
        elif part.startswith("rot:"):
            gates.append(Gate("rot", float(part.split(":", 1)[1])))
        else:
            raise ConfigError(f"bad gate spec {part!r}; use x or rot:<phi>")
    return tuple(gates)


def _circuit_from_args(args) -> Circuit:
    if getattr(args, "gates", None):
        return Circuit(args.input_bit, _parse_gates_arg(args.gates))
    return reference_circuit(args.input_bit)


def _cmd_ham(args) -> int:
    if args.builder == "reference":
        ham = reference_hamiltonian(args.input_bit)
    else:
        circuit = _circuit_from_args(args)
        ham = build_component_hamiltonian(circuit, args.claimed == "accept")
    text = ham.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_state(args) -> int:
    circuit = _circuit_from_args(args)
    psi = history_state(circuit)
    n = psi.num_qubits
    for idx, amp in enumerate(psi.amplitudes):
        if abs(amp) < 1e-12 and not args.all:
            continue
        bits = format(idx, f"0{n}b")
        print(f"|{bits[0]}>|{bits[1:]}>  {amp.real:+.12f} {amp.imag:+.12f}j")
    return 0


def _cmd_protocol(args) -> int:
    circuit = _circuit_from_args(args)
    ham = reference_hamiltonian(args.input_bit) if args.hamiltonian == "reference" \
        else build_component_hamiltonian(circuit, args.claimed == "accept")
    code = parse_code(args.code)
    psi = history_state(circuit)
    if args.prover == "honest":
        prover = HonestProver(psi)
    elif args.prover == "random":
        prover = RandomStateProver()
    else:
        wrong = history_state(Circuit(1 - args.input_bit, circuit.gates))
        from .csscode import encode_state
        prover = FixedStateProver(wrong if code is None
                                  else encode_state(code, wrong))
    ch = parse_channel(args.channel)
    stream = open(args.transcript, "w") if args.transcript else None
    try:
        est = estimate_acceptance(ham, code, prover, ch, args.rounds,
                                  args.seed, log_stream=stream)
    finally:
        if stream:
            stream.close()
    print(f"acceptance {est.mean:.6f}  ci [{est.ci_low:.6f}, {est.ci_high:.6f}]"
          f"  rounds {est.reps}  seed {est.seed}")
    print(f"soundness bound {soundness_bound(ham):.6f}")
    return 0


def _cmd_sweep(args) -> int:
    if args.config:
        with open(args.config) as fh:
            cfg = SweepConfig.from_json(fh.read())
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.reps is not None:
            overrides["reps"] = args.reps
        if overrides:
            from dataclasses import replace
            cfg = replace(cfg, **overrides)
    else:
        grid = tuple(float(x) for x in args.grid.split(",")) if args.grid else None
        kwargs = dict(circuit=reference_circuit(args.input_bit))
        if args.code is not None:
            kwargs["code"] = args.code
        if args.channel is not None:
            kwargs["channel"] = args.channel
        if grid is not None:
            kwargs["grid"] = grid
        if args.reps is not None:
            kwargs["reps"] = args.reps
        if args.mode is not None:
            kwargs["mode"] = args.mode
        if args.seed is not None:
            kwargs["seed"] = args.seed
        cfg = SweepConfig(**kwargs)
    result = run_sweep(cfg)
    if args.out:
        result.write_csv(args.out)
    else:
        sys.stdout.write(result.csv_text())
    if args.crossover:
        try:
            est = crossover(result)
            msg = (f"crossover p* = {est.p_star:.6f} "
                   f"(bracket [{est.bracket_low:.6f}, {est.bracket_high:.6f}])")
            if est.warning:
                msg += f"  WARNING: {est.warning}"
            print(msg)
        except NoCrossoverError as exc:
            print(f"crossover: {exc}")
    return 0


def _cmd_ftcalc(args) -> int:
    k = required_levels(args.alpha, args.eps_m, args.eta, args.measurements)
    total = qubit_overhead(args.block_size, k, args.logical_qubits)
    err = suppressed_error(args.alpha, args.eps_m, k)
    lhs, rhs, rel = overhead_identity_check(args.alpha, args.eps_m, args.eta,
                                            args.block_size, args.measurements)
    report = {
        "levels": k,
        "suppressed_error": err,
        "physical_qubits": total,
        "blocks_formula": {"b_to_k": lhs, "closed_form": rhs,
                           "relative_error": rel},
    }
    if args.p_acc is not None and args.p_rej is not None:
        shift = gap_shift(args.p_acc, args.p_rej, args.eta)
        report["gap"] = {
            "shifted_acc": shift.shifted_acc,
            "shifted_rej": shift.shifted_rej,
            "maintained": shift.gap_maintained,
        }
    print(json.dumps(report, indent=2))
    return 0


def _selftest_checks():
    s8, c8 = math.sin(math.pi / 8), math.cos(math.pi / 8)
    ham = reference_hamiltonian(0)
    psi = history_state(reference_circuit(0))
    energy = hamiltonian_expectation(psi, ham)
    k_norm = ham.coefficient_norm
    p_acc = 0.5 - energy / (2 * k_norm)
    out = np.abs(reference_circuit(0).output_state()) ** 2

    yield "history-state energy", abs(energy - s8 ** 2 / 3) < 1e-10
    yield "coefficient norm K", abs(k_norm - 4.8066) < 0.01
    yield "noiseless acceptance", abs(p_acc - 0.4949) < 5e-4
    yield "circuit accept amplitude", abs(out[1] - c8 ** 2) < 1e-10

    zm = decode_observable(repetition_code(3), "Z")
    expect = 0.5 * (pauli_matrix("ZII") + pauli_matrix("IZI") + pauli_matrix("IIZ")
                    - pauli_matrix("ZZZ"))
    yield "majority observable expansion", bool(np.allclose(zm.matrix, expect))

    yield "suppression arithmetic", suppressed_error(1.0, 0.1, 2) == 0.1 ** 4 or \
        abs(suppressed_error(1.0, 0.1, 2) - 1e-4) < 1e-18
    yield "register size 3 x 7", qubit_overhead(7, 1, 3) == 21


def _cmd_selftest(args) -> int:
    failed = 0
    for name, ok in _selftest_checks():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failed += 0 if ok else 1
    return 0 if failed == 0 else 2


def build_parser() -> _Parser:
    parser = _Parser(prog="ftverify",
                     description="fault-tolerant verification simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ham", help="build and print a Hamiltonian")
    p.add_argument("--input-bit", type=int, choices=(0, 1), default=0)
    p.add_argument("--claimed", choices=("accept", "reject"), default="accept")
    p.add_argument("--builder", choices=("reference", "component"),
                   default="reference")
    p.add_argument("--gates", help="comma list, e.g. x,rot:0.3927")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_ham)

    p = sub.add_parser("state", help="print a history state")
    p.add_argument("--input-bit", type=int, choices=(0, 1), default=0)
    p.add_argument("--gates")
    p.add_argument("--all", action="store_true", help="include zero amplitudes")
    p.set_defaults(func=_cmd_state)

    p = sub.add_parser("protocol", help="simulate verification rounds")
    p.add_argument("--input-bit", type=int, choices=(0, 1), default=0)
    p.add_argument("--gates")
    p.add_argument("--claimed", choices=("accept", "reject"), default="accept")
    p.add_argument("--hamiltonian", choices=("reference", "component"),
                   default="reference")
    p.add_argument("--code", default="none")
    p.add_argument("--channel", default="none")
    p.add_argument("--prover", choices=("honest", "random", "wrong-input"),
                   default="honest")
    p.add_argument("--rounds", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--transcript", help="JSONL transcript path")
    p.set_defaults(func=_cmd_protocol)

    p = sub.add_parser("sweep", help="run a noise sweep campaign")
    p.add_argument("--config", help="JSON config path")
    p.add_argument("--input-bit", type=int, choices=(0, 1), default=0)
    p.add_argument("--code")
    p.add_argument("--channel", choices=("bitflip", "depolarizing"))
    p.add_argument("--grid", help="comma list of p values")
    p.add_argument("--reps", type=int)
    p.add_argument("--mode", choices=("exact", "mc", "protocol"))
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--crossover", action="store_true")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("ftcalc", help="concatenation overhead report")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--eps-m", type=float, required=True, dest="eps_m")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--block-size", type=int, required=True, dest="block_size")
    p.add_argument("--measurements", type=int, default=2)
    p.add_argument("--logical-qubits", type=int, default=3,
                   dest="logical_qubits")
    p.add_argument("--p-acc", type=float, dest="p_acc")
    p.add_argument("--p-rej", type=float, dest="p_rej")
    p.set_defaults(func=_cmd_ftcalc)

    p = sub.add_parser("selftest", help="golden-value checks")
    p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
