"""Core machine types: Mealy machines, observation machines, and NFAs.

All machines share the same representation conventions: states are an ordered
tuple of unique names, the initial state is an index into that tuple, and
transition tables are indexed by (state index, symbol index).  Mealy machines
are complete and deterministic; observation machines are partially specified
and may branch to a set of successor states; NFAs are plain nondeterministic
acceptors in which every state is accepting, so their language is closed under
prefixes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Union


class MachineError(ValueError):
    """A machine violates a structural constraint or a precondition."""


# Braces delimit branch sets in the textual format and '#' starts a comment,
# so neither may appear inside a name.
_RESERVED = set("{}#")


def _check_name(name: str, what: str) -> None:
    if not name:
        raise MachineError(f"empty {what} name")
    if any(c.isspace() for c in name) or _RESERVED & set(name):
        raise MachineError(
            f"bad {what} name {name!r}: whitespace, braces and '#' are reserved"
        )


def pair_name(left: str, right: str) -> str:
    """Name for a product state built from two component state names."""
    return f"({left},{right})"


@dataclass(frozen=True)
class Alphabet:
    """An ordered, duplicate-free tuple of symbol names."""

    symbols: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.symbols:
            raise MachineError("alphabet must contain at least one symbol")
        seen = set()
        for sym in self.symbols:
            _check_name(sym, "symbol")
            if sym in seen:
                raise MachineError(f"duplicate symbol {sym!r} in alphabet")
            seen.add(sym)

    def index(self, sym: str) -> int:
        try:
            return self.symbols.index(sym)
        except ValueError:
            raise MachineError(f"unknown symbol {sym!r}") from None

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __contains__(self, sym: object) -> bool:
        return sym in self.symbols


def _check_states(states: tuple[str, ...], initial: int) -> None:
    if not states:
        raise MachineError("machine must have at least one state")
    seen = set()
    for name in states:
        _check_name(name, "state")
        if name in seen:
            raise MachineError(f"duplicate state name {name!r}")
        seen.add(name)
    if not 0 <= initial < len(states):
        raise MachineError(f"initial state index {initial} out of range")


def _check_table_shape(table, n_states: int, n_syms: int, what: str) -> None:
    if len(table) != n_states:
        raise MachineError(f"{what} table must have one row per state")
    for row in table:
        if len(row) != n_syms:
            raise MachineError(f"{what} table must have one entry per symbol")


@dataclass(frozen=True)
class MealyMachine:
    """A complete deterministic transducer.

    ``next[s][x]`` is the successor state index and ``out[s][x]`` the output
    symbol index produced when reading input symbol ``x`` in state ``s``.
    """

    input_alphabet: Alphabet
    output_alphabet: Alphabet
    states: tuple[str, ...]
    initial: int
    next: tuple[tuple[int, ...], ...]
    out: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        _check_states(self.states, self.initial)
        n, nx, nz = len(self.states), len(self.input_alphabet), len(self.output_alphabet)
        _check_table_shape(self.next, n, nx, "next")
        _check_table_shape(self.out, n, nx, "out")
        for row in self.next:
            for tgt in row:
                if not 0 <= tgt < n:
                    raise MachineError(f"next-state index {tgt} out of range")
        for row in self.out:
            for z in row:
                if not 0 <= z < nz:
                    raise MachineError(f"output index {z} out of range")

    def step(self, state: int, sym: int) -> tuple[int, int]:
        """Successor state index and output index for one input symbol."""
        return self.next[state][sym], self.out[state][sym]


@dataclass(frozen=True)
class Nfa:
    """A nondeterministic acceptor in which every state is accepting.

    ``delta[s][x]`` is the (possibly empty) set of successor state indices.
    The accepted language is the set of words along which at least one path
    exists, hence prefix-closed and never empty (it contains the empty word).
    """

    alphabet: Alphabet
    states: tuple[str, ...]
    initial: int
    delta: tuple[tuple[frozenset[int], ...], ...]

    def __post_init__(self) -> None:
        _check_states(self.states, self.initial)
        n = len(self.states)
        _check_table_shape(self.delta, n, len(self.alphabet), "delta")
        for row in self.delta:
            for branch in row:
                for tgt in branch:
                    if not 0 <= tgt < n:
                        raise MachineError(f"successor index {tgt} out of range")

    def accepts(self, word: Iterable[str]) -> bool:
        current = {self.initial}
        for sym in word:
            x = self.alphabet.index(sym)
            current = {t for s in current for t in self.delta[s][x]}
            if not current:
                return False
        return True


@dataclass(frozen=True)
class ObservationMachine:
    """A partially specified transducer with set-valued successors.

    ``delta[s][y]`` is either ``None`` (input ``y`` undefined in state ``s``)
    or a non-empty frozenset of successor state indices; ``out[s][y]`` is the
    output index, present exactly where ``delta`` is.  A word is in the domain
    if at least one run over it exists.
    """

    input_alphabet: Alphabet
    output_alphabet: Alphabet
    states: tuple[str, ...]
    initial: int
    delta: tuple[tuple[Union[frozenset[int], None], ...], ...]
    out: tuple[tuple[Union[int, None], ...], ...]

    def __post_init__(self) -> None:
        _check_states(self.states, self.initial)
        n, ny, nz = len(self.states), len(self.input_alphabet), len(self.output_alphabet)
        _check_table_shape(self.delta, n, ny, "delta")
        _check_table_shape(self.out, n, ny, "out")
        for s in range(n):
            for y in range(ny):
                branch, z = self.delta[s][y], self.out[s][y]
                if (branch is None) != (z is None):
                    raise MachineError("delta and out must be defined on the same pairs")
                if branch is not None:
                    if not branch:
                        raise MachineError("defined branch sets must be non-empty")
                    for tgt in branch:
                        if not 0 <= tgt < n:
                            raise MachineError(f"successor index {tgt} out of range")
                    if not 0 <= z < nz:
                        raise MachineError(f"output index {z} out of range")

    def defined(self, state: int, sym: int) -> bool:
        return self.delta[state][sym] is not None

    def domain_pairs(self) -> Iterator[tuple[int, int]]:
        """All (state index, input index) pairs where the machine is defined."""
        for s in range(len(self.states)):
            for y in range(len(self.input_alphabet)):
                if self.delta[s][y] is not None:
                    yield s, y


Machine = Union[MealyMachine, ObservationMachine, Nfa]


def degree(m: ObservationMachine) -> int:
    """Largest branch-set size over the domain; 1 for an empty domain."""
    return max((len(m.delta[s][y]) for s, y in m.domain_pairs()), default=1)


@dataclass(frozen=True)
class Run:
    """One run of a Mealy machine: n+1 states, n inputs, n outputs."""

    states: tuple[int, ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.states) != len(self.inputs) + 1 or len(self.inputs) != len(self.outputs):
            raise MachineError("run must have one more state than inputs/outputs")


def trace(m: MealyMachine, word: Iterable[str]) -> Run:
    """The run of ``m`` on ``word`` from the initial state."""
    states = [m.initial]
    inputs: list[str] = []
    outputs: list[str] = []
    for sym in word:
        x = m.input_alphabet.index(sym)
        s, z = m.step(states[-1], x)
        states.append(s)
        inputs.append(sym)
        outputs.append(m.output_alphabet.symbols[z])
    return Run(tuple(states), tuple(inputs), tuple(outputs))


def run_machine(m: MealyMachine, word: Iterable[str]) -> tuple[str, ...]:
    """Output word produced by ``m`` on ``word``."""
    return trace(m, word).outputs


@dataclass(frozen=True)
class Verdict:
    """A boolean result carrying an optional witness word.

    Truthy exactly when ``ok`` is true; the witness explains a negative
    verdict (its meaning depends on the producing operation).
    """

    ok: bool
    witness: Union[tuple[str, ...], None] = None

    def __bool__(self) -> bool:
        return self.ok


def equivalent(m1: MealyMachine, m2: MealyMachine) -> Verdict:
    """Language equivalence of two complete machines over shared alphabets.

    A negative verdict carries a shortest input word on which the output
    words differ.
    """
    if m1.input_alphabet != m2.input_alphabet or m1.output_alphabet != m2.output_alphabet:
        raise MachineError("equivalence requires identical alphabets")
    start = (m1.initial, m2.initial)
    parents: dict[tuple[int, int], tuple[tuple[int, int], int]] = {start: None}  # type: ignore[dict-item]
    queue = deque([start])
    syms = range(len(m1.input_alphabet))
    while queue:
        pair = queue.popleft()
        s1, s2 = pair
        for x in syms:
            if m1.out[s1][x] != m2.out[s2][x]:
                word = [m1.input_alphabet.symbols[x]]
                node = pair
                while parents[node] is not None:
                    node, px = parents[node]
                    word.append(m1.input_alphabet.symbols[px])
                return Verdict(False, tuple(reversed(word)))
            succ = (m1.next[s1][x], m2.next[s2][x])
            if succ not in parents:
                parents[succ] = (pair, x)
                queue.append(succ)
    return Verdict(True)


def compose_cascade(h: MealyMachine, t: MealyMachine) -> MealyMachine:
    """Feed every output of head ``h`` into tail ``t``.

    The result reads the head's inputs and emits the tail's outputs; its
    states are the reachable (head state, tail state) pairs, named by
    ``pair_name`` and numbered in breadth-first order from the initial pair.
    """
    if t.input_alphabet != h.output_alphabet:
        raise MachineError("tail input alphabet must equal head output alphabet")
    start = (h.initial, t.initial)
    order: dict[tuple[int, int], int] = {start: 0}
    pairs = [start]
    queue = deque([start])
    syms = range(len(h.input_alphabet))
    while queue:
        sh, st = queue.popleft()
        for x in syms:
            nh, y = h.step(sh, x)
            nt, _ = t.step(st, y)
            succ = (nh, nt)
            if succ not in order:
                order[succ] = len(pairs)
                pairs.append(succ)
                queue.append(succ)
    nxt = []
    out = []
    for sh, st in pairs:
        nrow = []
        orow = []
        for x in syms:
            nh, y = h.step(sh, x)
            nt, z = t.step(st, y)
            nrow.append(order[(nh, nt)])
            orow.append(z)
        nxt.append(tuple(nrow))
        out.append(tuple(orow))
    names = tuple(pair_name(h.states[sh], t.states[st]) for sh, st in pairs)
    return MealyMachine(h.input_alphabet, t.output_alphabet, names, 0, tuple(nxt), tuple(out))


def _bfs_numbering(n_states: int, initial: int, successors) -> list[int]:
    """Old state indices in breadth-first order, unreachable ones appended."""
    seen = {initial}
    order = [initial]
    queue = deque([initial])
    while queue:
        s = queue.popleft()
        for t in successors(s):
            if t not in seen:
                seen.add(t)
                order.append(t)
                queue.append(t)
    order.extend(s for s in range(n_states) if s not in seen)
    return order


def canonical_form(m: Machine) -> Machine:
    """Behaviorally identical machine in canonical state order.

    States are renumbered breadth-first from the initial state (inputs in
    alphabet order, branch sets in ascending index order), unreachable states
    keep their relative order at the end, and all states are renamed to
    ``s0, s1, ...``.  Structurally identical machines therefore canonicalize
    to equal values regardless of declaration order or naming.
    """
    n = len(m.states)
    if isinstance(m, MealyMachine):
        order = _bfs_numbering(n, m.initial, lambda s: m.next[s])
        ren = {old: new for new, old in enumerate(order)}
        return MealyMachine(
            m.input_alphabet,
            m.output_alphabet,
            tuple(f"s{i}" for i in range(n)),
            ren[m.initial],
            tuple(tuple(ren[t] for t in m.next[s]) for s in order),
            tuple(m.out[s] for s in order),
        )
    if isinstance(m, ObservationMachine):
        def succs(s: int):
            for branch in m.delta[s]:
                if branch is not None:
                    yield from sorted(branch)

        order = _bfs_numbering(n, m.initial, succs)
        ren = {old: new for new, old in enumerate(order)}
        return ObservationMachine(
            m.input_alphabet,
            m.output_alphabet,
            tuple(f"s{i}" for i in range(n)),
            ren[m.initial],
            tuple(
                tuple(
                    None if b is None else frozenset(ren[t] for t in b)
                    for b in m.delta[s]
                )
                for s in order
            ),
            tuple(m.out[s] for s in order),
        )
    if isinstance(m, Nfa):
        def nsuccs(s: int):
            for branch in m.delta[s]:
                yield from sorted(branch)

        order = _bfs_numbering(n, m.initial, nsuccs)
        ren = {old: new for new, old in enumerate(order)}
        return Nfa(
            m.alphabet,
            tuple(f"s{i}" for i in range(n)),
            ren[m.initial],
            tuple(
                tuple(frozenset(ren[t] for t in b) for b in m.delta[s])
                for s in order
            ),
        )
    raise MachineError(f"not a machine: {m!r}")
