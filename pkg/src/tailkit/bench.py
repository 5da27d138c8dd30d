"""Benchmark harness comparing the covering and direct tail minimizers.

Instances are random cascades.  Each run is timed around the minimization
call only; a run that exceeds its time budget is recorded as a ``timeout``
row rather than an error.  Reports are CSV documents with a fixed schema so
they can be consumed by external plotting tools.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from .generators import random_mealy
from .machines import MachineError
from .minimize import (
    MinimizationTimeout,
    minimize_tail_naive_result,
    minimize_tail_result,
)

__all__ = [
    "CSV_HEADER",
    "BenchRecord",
    "parse_report",
    "bench_compare",
    "bench_bimodal",
]

CSV_HEADER = "method,n_states,seed,wall_ms,result_states,sat_calls,skipped_encoding,status"

_METHODS = ("naive", "proposed")


@dataclass(frozen=True)
class BenchRecord:
    """One benchmark run: a (method, instance) pair and its outcome."""

    method: str
    n_states: int
    seed: int
    wall_ms: int
    result_states: Optional[int]
    sat_calls: int
    skipped_encoding: bool
    status: str

    def __post_init__(self) -> None:
        if self.method not in _METHODS:
            raise MachineError(f"unknown method {self.method!r}")
        if self.status not in ("ok", "timeout"):
            raise MachineError(f"unknown status {self.status!r}")
        # skipping the encoding means the solver was never invoked
        if self.skipped_encoding and self.sat_calls != 0:
            raise MachineError("skipped_encoding requires sat_calls = 0")
        if self.status == "ok" and self.result_states is None:
            raise MachineError("completed runs must report result_states")

    def csv_row(self) -> str:
        result = "" if self.result_states is None else str(self.result_states)
        skipped = "true" if self.skipped_encoding else "false"
        return (
            f"{self.method},{self.n_states},{self.seed},{self.wall_ms},"
            f"{result},{self.sat_calls},{skipped},{self.status}"
        )


def parse_report(text: str) -> list[BenchRecord]:
    """Parse a CSV report back into records (inverse of the emitters)."""
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise MachineError("missing or malformed CSV header")
    records = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 8:
            raise MachineError(f"malformed CSV row: {ln!r}")
        records.append(
            BenchRecord(
                method=parts[0],
                n_states=int(parts[1]),
                seed=int(parts[2]),
                wall_ms=int(parts[3]),
                result_states=int(parts[4]) if parts[4] else None,
                sat_calls=int(parts[5]),
                skipped_encoding={"true": True, "false": False}[parts[6]],
                status=parts[7],
            )
        )
    return records


def _instance(size: int, in_out_size: int, seed: int):
    """The random cascade for one benchmark instance.

    The head and tail get independent seeds derived from the instance seed
    so the pair is reproducible from the CSV row alone.
    """
    h = random_mealy(size, in_out_size, in_out_size, 2 * seed)
    t = random_mealy(size, in_out_size, in_out_size, 2 * seed + 1)
    return h, t


def _run_one(
    method: str,
    size: int,
    seed: int,
    in_out_size: int,
    timeout: float,
    solver: Optional[str],
) -> BenchRecord:
    h, t = _instance(size, in_out_size, seed)
    runner = minimize_tail_result if method == "proposed" else minimize_tail_naive_result
    start = time.perf_counter()
    try:
        res = runner(h, t, budget=timeout, solver=solver)
    except MinimizationTimeout as exc:
        return BenchRecord(
            method, size, seed, int(round(timeout * 1000)),
            None, exc.sat_calls, False, "timeout",
        )
    wall_ms = int(round((time.perf_counter() - start) * 1000))
    return BenchRecord(
        method, size, seed, wall_ms,
        len(res.machine.states), res.sat_calls, res.skipped_encoding, "ok",
    )


def _emit_csv(records: list[BenchRecord]) -> str:
    records = sorted(records, key=lambda r: (r.n_states, r.seed, r.method))
    return "\n".join([CSV_HEADER] + [r.csv_row() for r in records]) + "\n"


def bench_compare(
    sizes: Sequence[int],
    seeds: Sequence[int],
    in_out_size: int = 4,
    timeout: float = 600.0,
    *,
    solver: Optional[str] = None,
) -> str:
    """Run both methods on every (size, seed) instance; return a CSV report.

    Rows are emitted in (n_states, seed, method) order.  When both methods
    complete on an instance their result sizes are cross-checked; a mismatch
    means one of the two encodings is wrong and raises immediately.
    """
    if not sizes or not seeds:
        raise MachineError("sizes and seeds must be nonempty")
    records = []
    for size in sizes:
        for seed in seeds:
            per_method = {}
            for method in _METHODS:
                rec = _run_one(method, size, seed, in_out_size, timeout, solver)
                per_method[method] = rec
                records.append(rec)
            done = [r for r in per_method.values() if r.status == "ok"]
            if len(done) == 2 and done[0].result_states != done[1].result_states:
                raise RuntimeError(
                    f"method disagreement on size={size} seed={seed}: "
                    f"{done[0].result_states} vs {done[1].result_states}"
                )
    return _emit_csv(records)


def bench_bimodal(
    count: int,
    size_range: tuple[int, int],
    seed0: int,
    *,
    in_out_size: int = 4,
    timeout: float = 600.0,
    solver: Optional[str] = None,
) -> str:
    """Covering method only, on instances of independently random size.

    Sizes are drawn uniformly from the inclusive ``size_range``; each
    instance also draws its own seed so the cascade is recoverable from the
    CSV row.  The interesting column is ``skipped_encoding``: instances
    whose clique bound already meets the tail size never touch the solver.
    """
    if count < 1:
        raise MachineError("count must be at least 1")
    lo, hi = size_range
    if lo < 1 or hi < lo:
        raise MachineError(f"bad size range ({lo}, {hi})")
    rng = random.Random(seed0)
    draws = [(rng.randint(lo, hi), rng.randrange(2**30)) for _ in range(count)]
    records = [
        _run_one("proposed", size, seed, in_out_size, timeout, solver)
        for size, seed in draws
    ]
    return _emit_csv(records)
