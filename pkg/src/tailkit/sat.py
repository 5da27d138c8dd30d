"""SAT backend: CNF container, built-in CDCL solver, external solver driver.

The built-in solver is a complete clause-learning solver (two watched
literals, activity-driven decisions, phase saving, Luby restarts, learned
clause reduction) so the package works with no external dependencies.  An
external solver binary speaking the DIMACS / SAT-competition conventions can
be supplied for performance, either explicitly or through the
``TAILKIT_SOLVER`` environment variable.  Every model, from either backend,
is re-verified against the clause list before being returned.
"""

from __future__ import annotations

import os
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import Optional, Sequence

ENV_SOLVER = "TAILKIT_SOLVER"

SAT = "SAT"
UNSAT = "UNSAT"
TIMEOUT = "TIMEOUT"


class SolverError(RuntimeError):
    """A solver backend misbehaved (distinct from a timeout)."""


@dataclass
class Cnf:
    """A CNF formula: variables are 1..var_count, literals signed ints."""

    var_count: int
    clauses: list[tuple[int, ...]] = field(default_factory=list)
    annotations: Optional[dict[int, str]] = None

    def add(self, *lits: int) -> None:
        self.clauses.append(lits)


@dataclass(frozen=True)
class SatOutcome:
    """Result of a solve call; ``model[v-1]`` is the value of variable v."""

    status: str
    model: Optional[tuple[bool, ...]] = None

    def __post_init__(self) -> None:
        if self.status not in (SAT, UNSAT, TIMEOUT):
            raise SolverError(f"bad outcome status {self.status!r}")
        if (self.model is not None) != (self.status == SAT):
            raise SolverError("model must be present exactly for SAT outcomes")


def _check_lit(lit: int, var_count: int) -> None:
    if lit == 0 or abs(lit) > var_count:
        raise SolverError(f"literal {lit} out of range for {var_count} variables")


def to_dimacs(f: Cnf) -> str:
    """Standard DIMACS text: header line then one zero-terminated clause per line."""
    lines = [f"p cnf {f.var_count} {len(f.clauses)}"]
    for clause in f.clauses:
        for lit in clause:
            _check_lit(lit, f.var_count)
        lines.append(" ".join(str(lit) for lit in clause) + " 0")
    return "\n".join(lines) + "\n"


def parse_solver_output(text: str, var_count: Optional[int] = None) -> SatOutcome:
    """Parse SAT-competition style solver output (``s`` and ``v`` lines)."""
    status = None
    values: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("s "):
            word = line[2:].strip()
            if word == "SATISFIABLE":
                status = SAT
            elif word == "UNSATISFIABLE":
                status = UNSAT
            elif word in ("UNKNOWN", "INDETERMINATE"):
                status = TIMEOUT
            else:
                raise SolverError(f"unrecognized status line {line!r}")
        elif line.startswith("v ") or line == "v":
            for tok in line[1:].split():
                try:
                    values.append(int(tok))
                except ValueError:
                    raise SolverError(f"bad literal {tok!r} in model line") from None
    if status is None:
        raise SolverError("solver output has no status line")
    if status != SAT:
        return SatOutcome(status)
    if values and values[-1] == 0:
        values.pop()
    elif not values:
        raise SolverError("SATISFIABLE output has no model lines")
    top = var_count if var_count is not None else max(abs(v) for v in values)
    model = [False] * top
    for lit in values:
        if lit == 0 or abs(lit) > top:
            raise SolverError(f"model literal {lit} out of range")
        model[abs(lit) - 1] = lit > 0
    return SatOutcome(SAT, tuple(model))


def _verify_model(f: Cnf, model: Sequence[bool]) -> None:
    if len(model) < f.var_count:
        raise SolverError("model does not cover all variables")
    for clause in f.clauses:
        for lit in clause:
            if (lit > 0) == model[abs(lit) - 1]:
                break
        else:
            raise SolverError(f"model does not satisfy clause {clause}")


def solve(f: Cnf, budget: Optional[float] = None, solver: Optional[str] = None) -> SatOutcome:
    """Decide ``f``; wall-clock ``budget`` in seconds, None for no limit.

    ``solver`` is a path to an external binary; when None the
    ``TAILKIT_SOLVER`` environment variable is consulted, and when that is
    unset the built-in solver runs.  SAT outcomes always carry a model that
    has been re-verified against the clauses.
    """
    if solver is None:
        solver = os.environ.get(ENV_SOLVER) or None
    if solver is not None:
        outcome = _solve_external(f, budget, solver)
    else:
        outcome = _solve_builtin(f, budget)
    if outcome.status == SAT:
        _verify_model(f, outcome.model)
    return outcome


def _solve_external(f: Cnf, budget: Optional[float], path: str) -> SatOutcome:
    with tempfile.NamedTemporaryFile("w", suffix=".cnf", delete=False) as tmp:
        tmp.write(to_dimacs(f))
        name = tmp.name
    try:
        try:
            proc = subprocess.run(
                [path, name],
                capture_output=True,
                text=True,
                timeout=budget,
            )
        except subprocess.TimeoutExpired:
            return SatOutcome(TIMEOUT)
        except OSError as exc:
            raise SolverError(f"cannot run solver {path!r}: {exc}") from exc
        return parse_solver_output(proc.stdout, f.var_count)
    finally:
        os.unlink(name)


# Luby restart sequence scaled by this many conflicts.
_RESTART_UNIT = 128


def _luby(i: int) -> int:
    """i-th element (1-based) of the 1,1,2,1,1,2,4,... restart sequence."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    if (1 << k) - 1 == i:
        return 1 << (k - 1)
    return _luby(i - (1 << (k - 1)) + 1)


class _Cdcl:
    """Conflict-driven clause learning over internally coded literals.

    Variable v (1-based) becomes literals 2v (positive) and 2v+1 (negative);
    ``values[lit]`` is 0 unassigned, 1 true, 2 false.
    """

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.clauses: list[list[int]] = []
        self.learnt_from = 0  # clauses[learnt_from:] are learned
        self.watches: list[list[int]] = [[] for _ in range(2 * nvars + 2)]
        self.values = bytearray(2 * nvars + 2)
        self.level = [0] * (nvars + 1)
        self.reason = [-1] * (nvars + 1)
        self.activity = [0.0] * (nvars + 1)
        self.saved_phase = bytearray(nvars + 1)  # 1 = assign true next time
        self.var_inc = 1.0
        self.heap: list[tuple[float, int]] = []
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        # grows after each reduction so clause learning stays complete
        self.reduce_limit = 8000

    # --- assignment -----------------------------------------------------

    def _enqueue(self, lit: int, reason: int) -> None:
        var = lit >> 1
        self.values[lit] = 1
        self.values[lit ^ 1] = 2
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.saved_phase[var] = 1 - (lit & 1)
        self.trail.append(lit)

    def _cancel_until(self, target: int) -> None:
        if len(self.trail_lim) <= target:
            return
        bound = self.trail_lim[target]
        for lit in reversed(self.trail[bound:]):
            var = lit >> 1
            self.values[lit] = 0
            self.values[lit ^ 1] = 0
            self.reason[var] = -1
            heappush(self.heap, (-self.activity[var], var))
        del self.trail[bound:]
        del self.trail_lim[target:]
        self.qhead = len(self.trail)

    # --- clause ingestion -----------------------------------------------

    def add_clause(self, lits: Sequence[int]) -> bool:
        """Add an input clause (internal coding); False means root conflict."""
        seen = set()
        reduced = []
        for lit in lits:
            if lit ^ 1 in seen:
                return True  # tautology
            if lit in seen:
                continue
            if self.values[lit] == 1 and self.level[lit >> 1] == 0:
                return True  # already satisfied at root
            if self.values[lit] == 2 and self.level[lit >> 1] == 0:
                continue  # falsified at root
            seen.add(lit)
            reduced.append(lit)
        if not reduced:
            return False
        if len(reduced) == 1:
            lit = reduced[0]
            if self.values[lit] == 2:
                return False
            if self.values[lit] == 0:
                self._enqueue(lit, -1)
            return True
        ci = len(self.clauses)
        self.clauses.append(reduced)
        self.watches[reduced[0]].append(ci)
        self.watches[reduced[1]].append(ci)
        return True

    # --- propagation ----------------------------------------------------

    def propagate(self) -> int:
        """Unit propagation; returns a conflicting clause index or -1."""
        values = self.values
        clauses = self.clauses
        watches = self.watches
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            fl = p ^ 1
            ws = watches[fl]
            i = j = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                cl = clauses[ci]
                if cl[0] == fl:
                    cl[0] = cl[1]
                    cl[1] = fl
                first = cl[0]
                if values[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                moved = False
                for k in range(2, len(cl)):
                    lk = cl[k]
                    if values[lk] != 2:
                        cl[1] = lk
                        cl[k] = fl
                        watches[lk].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                ws[j] = ci
                j += 1
                if values[first] == 2:
                    while i < n:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    return ci
                self._enqueue(first, ci)
            del ws[j:]
        return -1

    # --- conflict analysis ----------------------------------------------

    def _bump(self, var: int) -> None:
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            for v in range(1, self.nvars + 1):
                self.activity[v] *= 1e-100
            self.var_inc *= 1e-100
        heappush(self.heap, (-self.activity[var], var))

    def analyze(self, confl: int) -> tuple[list[int], int]:
        """1-UIP learned clause (asserting literal first) and backtrack level."""
        learnt = [0]
        seen = bytearray(self.nvars + 1)
        counter = 0
        p = -1
        index = len(self.trail)
        cur_level = len(self.trail_lim)
        while True:
            cl = self.clauses[confl]
            for lit in cl if p == -1 else cl[1:]:
                var = lit >> 1
                if not seen[var] and self.level[var] > 0:
                    seen[var] = 1
                    self._bump(var)
                    if self.level[var] == cur_level:
                        counter += 1
                    else:
                        learnt.append(lit)
            while True:
                index -= 1
                p = self.trail[index]
                if seen[p >> 1]:
                    break
            counter -= 1
            if counter == 0:
                break
            confl = self.reason[p >> 1]
        learnt[0] = p ^ 1
        if len(learnt) == 1:
            return learnt, 0
        back = max(self.level[lit >> 1] for lit in learnt[1:])
        top = max(range(1, len(learnt)), key=lambda i: self.level[learnt[i] >> 1])
        learnt[1], learnt[top] = learnt[top], learnt[1]
        return learnt, back

    def _record(self, learnt: list[int]) -> None:
        if len(learnt) == 1:
            self._enqueue(learnt[0], -1)
            return
        ci = len(self.clauses)
        self.clauses.append(learnt)
        self.watches[learnt[0]].append(ci)
        self.watches[learnt[1]].append(ci)
        self._enqueue(learnt[0], ci)

    # --- learned clause reduction (at restarts, level 0) ------------------

    def reduce_db(self) -> None:
        learned = self.clauses[self.learnt_from:]
        if len(learned) < self.reduce_limit:
            return
        self.reduce_limit = int(self.reduce_limit * 1.3)
        learned.sort(key=len)
        keep = learned[: len(learned) // 2]
        self.clauses = self.clauses[: self.learnt_from] + keep
        self.watches = [[] for _ in range(2 * self.nvars + 2)]
        for ci, cl in enumerate(self.clauses):
            best = sorted(range(len(cl)), key=lambda k: self.values[cl[k]] == 2)[:2]
            if best[0] != 0:
                cl[0], cl[best[0]] = cl[best[0]], cl[0]
                if best[1] == 0:
                    best[1] = best[0]
            if best[1] != 1:
                cl[1], cl[best[1]] = cl[best[1]], cl[1]
            self.watches[cl[0]].append(ci)
            self.watches[cl[1]].append(ci)
        self.qhead = 0  # re-scan the root trail against rebuilt watches

    # --- main loop --------------------------------------------------------

    def search(self, deadline: Optional[float]) -> SatOutcome:
        if self.propagate() != -1:
            return SatOutcome(UNSAT)
        restarts = 0
        conflicts_here = 0
        ticks = 0
        budget_conflicts = _RESTART_UNIT * _luby(restarts + 1)
        for var in range(1, self.nvars + 1):
            heappush(self.heap, (0.0, var))
        while True:
            confl = self.propagate()
            if confl != -1:
                if not self.trail_lim:
                    return SatOutcome(UNSAT)
                conflicts_here += 1
                ticks += 1
                if ticks % 512 == 0 and deadline is not None and time.monotonic() > deadline:
                    return SatOutcome(TIMEOUT)
                learnt, back = self.analyze(confl)
                self._cancel_until(back)
                self._record(learnt)
                self.var_inc /= 0.95
                continue
            if conflicts_here >= budget_conflicts:
                restarts += 1
                conflicts_here = 0
                budget_conflicts = _RESTART_UNIT * _luby(restarts + 1)
                self._cancel_until(0)
                self.reduce_db()
                if self.propagate() != -1:
                    return SatOutcome(UNSAT)
                continue
            # pick a decision variable
            var = 0
            while self.heap:
                negact, v = heappop(self.heap)
                if self.values[2 * v] == 0 and -negact == self.activity[v]:
                    var = v
                    break
            if var == 0:
                for v in range(1, self.nvars + 1):
                    if self.values[2 * v] == 0:
                        var = v
                        break
                if var == 0:
                    model = tuple(self.values[2 * v] == 1 for v in range(1, self.nvars + 1))
                    return SatOutcome(SAT, model)
            ticks += 1
            if ticks % 1024 == 0 and deadline is not None and time.monotonic() > deadline:
                return SatOutcome(TIMEOUT)
            self.trail_lim.append(len(self.trail))
            lit = 2 * var + (0 if self.saved_phase[var] else 1)
            self._enqueue(lit, -1)


def _solve_builtin(f: Cnf, budget: Optional[float]) -> SatOutcome:
    deadline = None if budget is None else time.monotonic() + budget
    solver = _Cdcl(f.var_count)
    for clause in f.clauses:
        coded = []
        for lit in clause:
            _check_lit(lit, f.var_count)
            var = abs(lit)
            coded.append(2 * var + (0 if lit > 0 else 1))
        if not solver.add_clause(coded):
            return SatOutcome(UNSAT)
    solver.learnt_from = len(solver.clauses)
    return solver.search(deadline)
