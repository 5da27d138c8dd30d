"""Operations on observation machines.

An observation machine (om) is a partially specified transducer whose
transitions may branch universally: a word is in its domain when at least one
run exists, and the machine is consistent when all runs on the same word
produce the same outputs.  A complete Mealy machine implements an om when it
reproduces the om's outputs on every word of the om's domain.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache

from .machines import (
    MachineError,
    MealyMachine,
    Nfa,
    ObservationMachine,
    Verdict,
    pair_name,
)


class InconsistentMachineError(MachineError):
    """The operation requires a consistent observation machine."""

    def __init__(self, witness: tuple[str, ...]):
        super().__init__(
            "inconsistent observation machine: runs disagree on "
            + " ".join(witness)
        )
        self.witness = witness


def om_size(m: ObservationMachine) -> int:
    """Size metric: number of states plus total branch-set cardinality."""
    return len(m.states) + sum(len(m.delta[s][y]) for s, y in m.domain_pairs())


def _shortest_word(parents, node, last_sym: str, alphabet) -> tuple[str, ...]:
    word = [last_sym]
    while parents[node] is not None:
        node, y = parents[node]
        word.append(alphabet.symbols[y])
    return tuple(reversed(word))


@lru_cache(maxsize=4096)
def is_consistent(m: ObservationMachine) -> Verdict:
    """Whether all runs on any given defined word agree on outputs.

    Breadth-first search over the self-product: a pair of states reachable by
    runs on a common word is inconsistent evidence iff some input defined at
    both produces different outputs.  A negative verdict carries a shortest
    such word.
    """
    start = (m.initial, m.initial)
    parents: dict[tuple[int, int], object] = {start: None}
    queue = deque([start])
    ny = len(m.input_alphabet)
    while queue:
        pair = queue.popleft()
        s1, s2 = pair
        for y in range(ny):
            b1, b2 = m.delta[s1][y], m.delta[s2][y]
            if b1 is None or b2 is None:
                continue
            if m.out[s1][y] != m.out[s2][y]:
                word = _shortest_word(parents, pair, m.input_alphabet.symbols[y], m.input_alphabet)
                return Verdict(False, word)
            for t1 in b1:
                for t2 in b2:
                    succ = (t1, t2)
                    if succ not in parents:
                        parents[succ] = (pair, y)
                        queue.append(succ)
    return Verdict(True)


def require_consistent(m: ObservationMachine) -> None:
    verdict = is_consistent(m)
    if not verdict:
        raise InconsistentMachineError(verdict.witness)


def implements(n: MealyMachine, m: ObservationMachine) -> Verdict:
    """Whether complete machine ``n`` reproduces ``m`` on ``m``'s domain.

    Product breadth-first search over (state of n, state of m) pairs reachable
    by a common defined word; a negative verdict carries a shortest defined
    word on which the outputs differ.  Symbols are matched by name, so ``n``
    may use alphabets that extend those of ``m`` (as synthesized machines do).
    """
    missing = [sym for sym in m.input_alphabet if sym not in n.input_alphabet]
    if missing:
        raise MachineError(f"machine cannot read input symbol {missing[0]!r}")
    xmap = tuple(n.input_alphabet.index(sym) for sym in m.input_alphabet)
    require_consistent(m)
    start = (n.initial, m.initial)
    parents: dict[tuple[int, int], object] = {start: None}
    queue = deque([start])
    ny = len(m.input_alphabet)
    while queue:
        pair = queue.popleft()
        sn, sm = pair
        for y in range(ny):
            branch = m.delta[sm][y]
            if branch is None:
                continue
            xn = xmap[y]
            out_n = n.output_alphabet.symbols[n.out[sn][xn]]
            out_m = m.output_alphabet.symbols[m.out[sm][y]]
            if out_n != out_m:
                word = _shortest_word(parents, pair, m.input_alphabet.symbols[y], m.input_alphabet)
                return Verdict(False, word)
            tn = n.next[sn][xn]
            for tm in branch:
                succ = (tn, tm)
                if succ not in parents:
                    parents[succ] = (pair, y)
                    queue.append(succ)
    return Verdict(True)


def image_automaton(h: MealyMachine) -> Nfa:
    """Acceptor of the output language of ``h``.

    Keeps the state set of ``h`` and replaces each transition by its output
    label: the successors of state ``s`` on symbol ``y`` are the targets of
    transitions of ``h`` from ``s`` that output ``y``.
    """
    ny = len(h.output_alphabet)
    delta = tuple(
        tuple(
            frozenset(
                h.next[s][x]
                for x in range(len(h.input_alphabet))
                if h.out[s][x] == y
            )
            for y in range(ny)
        )
        for s in range(len(h.states))
    )
    return Nfa(h.output_alphabet, h.states, h.initial, delta)


def restriction(t: MealyMachine, a: Nfa) -> ObservationMachine:
    """Observation machine for ``t``'s behavior on the language of ``a``.

    States are the reachable (state of t, state of a) pairs; an input is
    defined where ``a`` can move, the output is ``t``'s, and the branch set
    pairs ``t``'s deterministic successor with every successor of ``a``.
    Consistent by construction since outputs depend only on the ``t``
    component.
    """
    if t.input_alphabet != a.alphabet:
        raise MachineError("restriction requires the tail input alphabet to equal the acceptor alphabet")
    start = (t.initial, a.initial)
    order: dict[tuple[int, int], int] = {start: 0}
    pairs = [start]
    queue = deque([start])
    ny = len(a.alphabet)
    while queue:
        st, sa = queue.popleft()
        for y in range(ny):
            moves = a.delta[sa][y]
            if not moves:
                continue
            tt = t.next[st][y]
            for ta in sorted(moves):
                succ = (tt, ta)
                if succ not in order:
                    order[succ] = len(pairs)
                    pairs.append(succ)
                    queue.append(succ)
    delta = []
    out = []
    for st, sa in pairs:
        drow = []
        orow = []
        for y in range(ny):
            moves = a.delta[sa][y]
            if moves:
                tt = t.next[st][y]
                drow.append(frozenset(order[(tt, ta)] for ta in moves))
                orow.append(t.out[st][y])
            else:
                drow.append(None)
                orow.append(None)
        delta.append(tuple(drow))
        out.append(tuple(orow))
    names = tuple(pair_name(t.states[st], a.states[sa]) for st, sa in pairs)
    return ObservationMachine(
        t.input_alphabet, t.output_alphabet, names, 0, tuple(delta), tuple(out)
    )
