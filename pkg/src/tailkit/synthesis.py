"""Tail synthesis: given head H and target model M, find T with T after H = M.

Feasibility asks whether the target factors through the head at all: whenever
two input words look the same through H, M must give them the same outputs.
For feasible pairs, the solution observation machine characterizes exactly
the tails that work (a complete machine is a solution iff it implements it),
so synthesis reduces to picking any implementation, and minimal synthesis to
minimizing that observation machine.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Union

from .machines import (
    MachineError,
    MealyMachine,
    ObservationMachine,
    pair_name,
)
from .minimize import minimize_om
from .observation import require_consistent


class SolutionSizeError(RuntimeError):
    """Determinizing the solution observation machine exceeded the cap."""


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Truthy when feasible; otherwise carries a witness pair of input words
    with equal head outputs but different model outputs."""

    feasible: bool
    witness: Union[tuple[tuple[str, ...], tuple[str, ...]], None] = None

    def __bool__(self) -> bool:
        return self.feasible


class InfeasibleError(MachineError):
    """The target model cannot be realized through the given head."""

    def __init__(self, verdict: FeasibilityVerdict):
        w1, w2 = verdict.witness
        super().__init__(
            "no tail can realize the model through this head: inputs "
            f"{' '.join(w1) or '(empty)'} and {' '.join(w2) or '(empty)'} "
            "agree through the head but the model separates them"
        )
        self.verdict = verdict


def _check_synthesis_alphabets(h: MealyMachine, m: MealyMachine) -> None:
    if h.input_alphabet != m.input_alphabet:
        raise MachineError("head and model must share the input alphabet")


def feasible(h: MealyMachine, m: MealyMachine) -> FeasibilityVerdict:
    """Whether some tail T satisfies T after H = M.

    Breadth-first search over tuples (head state on word 1, model state on
    word 1, head state on word 2, model state on word 2) reachable by pairs
    of input words with equal head outputs; infeasible iff such a pair can be
    extended by one input each, keeping head outputs equal, while the model
    outputs differ.  The witness pair has minimal combined length.
    """
    _check_synthesis_alphabets(h, m)
    start = (h.initial, m.initial, h.initial, m.initial)
    parents: dict[tuple[int, int, int, int], object] = {start: None}
    queue = deque([start])
    nx = len(h.input_alphabet)
    while queue:
        node = queue.popleft()
        h1, m1, h2, m2 = node
        for x1 in range(nx):
            y1 = h.out[h1][x1]
            z1 = m.out[m1][x1]
            for x2 in range(nx):
                if h.out[h2][x2] != y1:
                    continue
                if m.out[m2][x2] != z1:
                    word1 = [h.input_alphabet.symbols[x1]]
                    word2 = [h.input_alphabet.symbols[x2]]
                    walk = node
                    while parents[walk] is not None:
                        walk, (px1, px2) = parents[walk]
                        word1.append(h.input_alphabet.symbols[px1])
                        word2.append(h.input_alphabet.symbols[px2])
                    word1.reverse()
                    word2.reverse()
                    return FeasibilityVerdict(False, (tuple(word1), tuple(word2)))
                succ = (h.next[h1][x1], m.next[m1][x1], h.next[h2][x2], m.next[m2][x2])
                if succ not in parents:
                    parents[succ] = (node, (x1, x2))
                    queue.append(succ)
    return FeasibilityVerdict(True)


def solution_om(h: MealyMachine, m: MealyMachine) -> ObservationMachine:
    """Observation machine whose implementations are exactly the solutions.

    States are the reachable (head state, model state) pairs under common
    input words; reading a head output y from such a pair follows every input
    that produces y, emitting the model's output (unique by feasibility).
    Rejects infeasible inputs.
    """
    verdict = feasible(h, m)
    if not verdict:
        raise InfeasibleError(verdict)
    start = (h.initial, m.initial)
    order: dict[tuple[int, int], int] = {start: 0}
    pairs = [start]
    queue = deque([start])
    nx = len(h.input_alphabet)
    ny = len(h.output_alphabet)
    while queue:
        sh, sm = queue.popleft()
        for x in range(nx):
            succ = (h.next[sh][x], m.next[sm][x])
            if succ not in order:
                order[succ] = len(pairs)
                pairs.append(succ)
                queue.append(succ)
    delta = []
    out = []
    for sh, sm in pairs:
        drow: list[Union[frozenset[int], None]] = []
        orow: list[Union[int, None]] = []
        for y in range(ny):
            fan = [x for x in range(nx) if h.out[sh][x] == y]
            if not fan:
                drow.append(None)
                orow.append(None)
                continue
            outputs = {m.out[sm][x] for x in fan}
            if len(outputs) != 1:
                raise InfeasibleError(feasible(h, m))  # unreachable when feasible
            drow.append(
                frozenset(order[(h.next[sh][x], m.next[sm][x])] for x in fan)
            )
            orow.append(outputs.pop())
        delta.append(tuple(drow))
        out.append(tuple(orow))
    names = tuple(pair_name(h.states[sh], m.states[sm]) for sh, sm in pairs)
    return ObservationMachine(
        h.output_alphabet, m.output_alphabet, names, 0, tuple(delta), tuple(out)
    )


def some_solution(h: MealyMachine, m: MealyMachine, cap: int = 2**20) -> MealyMachine:
    """Any solution tail: determinize the solution machine and complete it.

    Subset construction over the solution observation machine's branch sets,
    then undefined entries become self-loops emitting the first output
    symbol.  Raises SolutionSizeError when more than ``cap`` subset states
    appear.
    """
    n = solution_om(h, m)
    require_consistent(n)
    ny = len(n.input_alphabet)
    start = frozenset({n.initial})
    order: dict[frozenset[int], int] = {start: 0}
    subsets = [start]
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for y in range(ny):
            moved = frozenset(
                t for s in current if n.delta[s][y] is not None for t in n.delta[s][y]
            )
            if not moved or moved in order:
                continue
            if len(subsets) >= cap:
                raise SolutionSizeError(
                    f"determinized solution exceeds {cap} states"
                )
            order[moved] = len(subsets)
            subsets.append(moved)
            queue.append(moved)
    nxt = []
    out = []
    for i, current in enumerate(subsets):
        nrow = []
        orow = []
        for y in range(ny):
            moved = frozenset(
                t for s in current if n.delta[s][y] is not None for t in n.delta[s][y]
            )
            if moved:
                outputs = {n.out[s][y] for s in current if n.delta[s][y] is not None}
                # consistency makes the output unique across the subset
                nrow.append(order[moved])
                orow.append(outputs.pop())
            else:
                nrow.append(i)
                orow.append(0)
        nxt.append(tuple(nrow))
        out.append(tuple(orow))
    names = tuple(f"S{i}" for i in range(len(subsets)))
    return MealyMachine(
        n.input_alphabet, n.output_alphabet, names, 0, tuple(nxt), tuple(out)
    )


def minimal_solution(
    h: MealyMachine,
    m: MealyMachine,
    *,
    budget: Optional[float] = None,
    solver: Optional[str] = None,
    emit_cnf_dir: Optional[str] = None,
) -> MealyMachine:
    """A solution tail with the fewest states among all solutions."""
    return minimize_om(
        solution_om(h, m),
        budget=budget,
        solver=solver,
        emit_cnf_dir=emit_cnf_dir,
    )
