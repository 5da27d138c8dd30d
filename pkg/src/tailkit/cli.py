"""Command-line interface.

Subcommands: ``minimize`` (replace a cascade tail with a smallest one),
``feasible`` / ``synthesize`` (tail synthesis against a target model),
``generate`` (instance generators), and ``bench`` (CSV benchmark reports).
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .bench import bench_bimodal, bench_compare
from .generators import exp_family, np_reduction, random_mealy, split_om
from .machines import MachineError, MealyMachine, ObservationMachine
from .minimize import (
    MinimizationTimeout,
    minimize_tail_naive_result,
    minimize_tail_result,
)
from .sat import SolverError
from .synthesis import InfeasibleError, feasible, minimal_solution, some_solution
from .textio import parse_machine, serialize_machine

__all__ = ["main"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


def _read_machine(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_machine(fh.read())


def _read_mealy(path: str, role: str) -> MealyMachine:
    m = _read_machine(path)
    if not isinstance(m, MealyMachine):
        raise MachineError(f"{role} must be a complete mealy machine: {path}")
    return m


def _read_om(path: str) -> ObservationMachine:
    m = _read_machine(path)
    if not isinstance(m, ObservationMachine):
        raise MachineError(f"expected an observation machine: {path}")
    return m


def _write_machine(path: str, machine) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_machine(machine))


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _parse_int_list(text: str) -> list[int]:
    """Comma-separated integers; each item may be an inclusive a..b range."""
    values = []
    for item in text.split(","):
        item = item.strip()
        if ".." in item:
            lo, hi = item.split("..", 1)
            values.extend(range(int(lo), int(hi) + 1))
        else:
            values.append(int(item))
    if not values:
        raise MachineError(f"empty integer list: {text!r}")
    return values


def _cmd_minimize(args: argparse.Namespace) -> int:
    h = _read_mealy(args.head, "--head")
    t = _read_mealy(args.tail, "--tail")
    runner = minimize_tail_result if args.method == "proposed" else minimize_tail_naive_result
    try:
        res = runner(h, t, budget=args.timeout, solver=args.solver,
                     emit_cnf_dir=args.emit_cnf)
    except MinimizationTimeout as exc:
        print(f"error: timed out at target size {exc.bound} "
              f"after {exc.sat_calls} solver calls", file=sys.stderr)
        return EXIT_ERROR
    _write_machine(args.output, res.machine)
    note = " (encoding skipped)" if res.skipped_encoding else ""
    print(f"{len(res.machine.states)} states, "
          f"{res.sat_calls} solver calls{note}")
    return EXIT_OK


def _cmd_feasible(args: argparse.Namespace) -> int:
    h = _read_mealy(args.head, "--head")
    m = _read_mealy(args.model, "--model")
    verdict = feasible(h, m)
    if verdict:
        print("feasible")
        return EXIT_OK
    w1, w2 = verdict.witness
    print("infeasible")
    print(f"word 1: {' '.join(w1)}")
    print(f"word 2: {' '.join(w2)}")
    return EXIT_INFEASIBLE


def _cmd_synthesize(args: argparse.Namespace) -> int:
    h = _read_mealy(args.head, "--head")
    m = _read_mealy(args.model, "--model")
    try:
        if args.minimal:
            t = minimal_solution(h, m)
        else:
            t = some_solution(h, m, cap=args.cap)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    _write_machine(args.output, t)
    print(f"{len(t.states)} states")
    return EXIT_OK


def _cmd_generate_random(args: argparse.Namespace) -> int:
    m = random_mealy(args.states, args.in_size, args.out_size, args.seed)
    _write_machine(args.output, m)
    return EXIT_OK


def _cmd_generate_exp_family(args: argparse.Namespace) -> int:
    _write_machine(args.output, exp_family(args.n))
    return EXIT_OK


def _cmd_generate_np_reduction(args: argparse.Namespace) -> int:
    h, t = np_reduction(_read_om(args.om))
    _write_machine(args.o_head, h)
    _write_machine(args.o_tail, t)
    return EXIT_OK


def _cmd_generate_split(args: argparse.Namespace) -> int:
    h, m = split_om(_read_om(args.om))
    _write_machine(args.o_head, h)
    _write_machine(args.o_model, m)
    return EXIT_OK


def _cmd_bench_compare(args: argparse.Namespace) -> int:
    report = bench_compare(
        _parse_int_list(args.sizes),
        _parse_int_list(args.seeds),
        args.alpha,
        args.timeout,
        solver=args.solver,
    )
    _write_text(args.output, report)
    return EXIT_OK


def _cmd_bench_bimodal(args: argparse.Namespace) -> int:
    report = bench_bimodal(
        args.count,
        (args.min, args.max),
        args.seed,
        timeout=args.timeout,
        solver=args.solver,
    )
    _write_text(args.output, report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailkit",
        description="Minimize and synthesize the tail of a cascade of Mealy machines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("minimize", help="replace the tail with a smallest one")
    p.add_argument("--head", required=True, metavar="H.msm")
    p.add_argument("--tail", required=True, metavar="T.msm")
    p.add_argument("-o", dest="output", required=True, metavar="OUT.msm")
    p.add_argument("--method", choices=("proposed", "naive"), default="proposed")
    p.add_argument("--timeout", type=float, default=None, metavar="S")
    p.add_argument("--solver", default=None, metavar="PATH")
    p.add_argument("--emit-cnf", dest="emit_cnf", default=None, metavar="DIR")
    p.set_defaults(func=_cmd_minimize)

    p = sub.add_parser("feasible", help="decide whether any tail realizes the model")
    p.add_argument("--head", required=True, metavar="H.msm")
    p.add_argument("--model", required=True, metavar="M.msm")
    p.set_defaults(func=_cmd_feasible)

    p = sub.add_parser("synthesize", help="produce a tail realizing the model")
    p.add_argument("--head", required=True, metavar="H.msm")
    p.add_argument("--model", required=True, metavar="M.msm")
    p.add_argument("-o", dest="output", required=True, metavar="T.msm")
    p.add_argument("--minimal", action="store_true")
    p.add_argument("--cap", type=int, default=2**20, metavar="N")
    p.set_defaults(func=_cmd_synthesize)

    p = sub.add_parser("generate", help="instance generators")
    gen = p.add_subparsers(dest="generator", required=True)

    g = gen.add_parser("random", help="uniform random complete machine")
    g.add_argument("--states", type=int, required=True, metavar="N")
    g.add_argument("--in", dest="in_size", type=int, required=True, metavar="K")
    g.add_argument("--out", dest="out_size", type=int, required=True, metavar="L")
    g.add_argument("--seed", type=int, required=True, metavar="S")
    g.add_argument("-o", dest="output", required=True, metavar="F.msm")
    g.set_defaults(func=_cmd_generate_random)

    g = gen.add_parser("exp-family", help="observation machine whose smallest "
                                          "implementation has at least 2^n states")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("-o", dest="output", required=True, metavar="F.msm")
    g.set_defaults(func=_cmd_generate_exp_family)

    g = gen.add_parser("np-reduction", help="cascade whose replacements mirror "
                                            "the implementations of a degree-1 machine")
    g.add_argument("--om", required=True, metavar="F.msm")
    g.add_argument("-o-head", dest="o_head", required=True, metavar="H.msm")
    g.add_argument("-o-tail", dest="o_tail", required=True, metavar="T.msm")
    g.set_defaults(func=_cmd_generate_np_reduction)

    g = gen.add_parser("split", help="synthesis instance whose solutions mirror "
                                     "the implementations of a machine")
    g.add_argument("--om", required=True, metavar="F.msm")
    g.add_argument("-o-head", dest="o_head", required=True, metavar="H.msm")
    g.add_argument("-o-model", dest="o_model", required=True, metavar="M.msm")
    g.set_defaults(func=_cmd_generate_split)

    p = sub.add_parser("bench", help="benchmark harness")
    b = p.add_subparsers(dest="bench_command", required=True)

    c = b.add_parser("compare", help="both methods on a size/seed grid")
    c.add_argument("--sizes", required=True, help="e.g. 4,8,12 or 4..12")
    c.add_argument("--seeds", required=True, help="e.g. 0..9 or 0,3,5")
    c.add_argument("--alpha", type=int, default=4, help="input/output alphabet size")
    c.add_argument("--timeout", type=float, default=600.0, metavar="S")
    c.add_argument("--solver", default=None, metavar="PATH")
    c.add_argument("-o", dest="output", required=True, metavar="OUT.csv")
    c.set_defaults(func=_cmd_bench_compare)

    c = b.add_parser("bimodal", help="covering method on random-size instances")
    c.add_argument("--count", type=int, required=True)
    c.add_argument("--min", type=int, required=True)
    c.add_argument("--max", type=int, required=True)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--timeout", type=float, default=600.0, metavar="S")
    c.add_argument("--solver", default=None, metavar="PATH")
    c.add_argument("-o", dest="output", required=True, metavar="OUT.csv")
    c.set_defaults(func=_cmd_bench_bimodal)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MachineError, SolverError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
