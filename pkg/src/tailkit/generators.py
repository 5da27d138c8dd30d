"""Instance generators: random machines and constructive reductions.

Besides seeded random Mealy machines, this module builds the three
constructions used to study hardness and expressiveness of tail optimization:
a reduction from minimizing an incompletely specified machine to tail
minimization, a splitting of any consistent observation machine into a
feasible synthesis instance, and a family of quadratic-size observation
machines whose minimal implementations are exponentially larger.
"""

from __future__ import annotations

import random
from typing import Union

from .machines import (
    Alphabet,
    MachineError,
    MealyMachine,
    ObservationMachine,
    degree,
)
from .observation import require_consistent

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def default_alphabet(size: int) -> Alphabet:
    """Fixed naming convention: a, b, c, ... so equal sizes compare equal."""
    if size <= len(_LETTERS):
        return Alphabet(tuple(_LETTERS[:size]))
    return Alphabet(tuple(f"a{i}" for i in range(size)))


def fresh_symbol(taken, base: str) -> str:
    """``base`` if unused, else base0, base1, ..."""
    if base not in taken:
        return base
    i = 0
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def random_mealy(n_states: int, in_size: int, out_size: int, seed: int) -> MealyMachine:
    """Uniformly random complete machine, reproducible from the seed.

    For each state in order and each input in order, the successor is drawn
    first and the output second.  States are s0, s1, ... with s0 initial;
    alphabets follow ``default_alphabet``.  No reachability pruning.
    """
    if n_states < 1 or in_size < 1 or out_size < 1:
        raise MachineError("machine dimensions must be positive")
    rng = random.Random(seed)
    nxt = []
    out = []
    for _ in range(n_states):
        nrow = []
        orow = []
        for _ in range(in_size):
            nrow.append(rng.randrange(n_states))
            orow.append(rng.randrange(out_size))
        nxt.append(tuple(nrow))
        out.append(tuple(orow))
    return MealyMachine(
        default_alphabet(in_size),
        default_alphabet(out_size),
        tuple(f"s{i}" for i in range(n_states)),
        0,
        tuple(nxt),
        tuple(out),
    )


def np_reduction(n: ObservationMachine) -> tuple[MealyMachine, MealyMachine]:
    """Cascade (head, tail) whose minimal replacement tails are exactly the
    minimal implementations of the incompletely specified machine ``n``.

    ``n`` must be consistent and branch-free (degree 1).  The head reads
    ``n``'s inputs, echoes them while the word stays in ``n``'s domain, and
    falls into a sink emitting a fresh blank symbol afterwards, so its output
    language is the domain padded with blanks.  The tail is ``n`` completed
    with first-output self-loops plus a blank self-loop emitting blank.
    """
    require_consistent(n)
    if degree(n) != 1:
        raise MachineError("the reduction needs a branch-free observation machine")
    y_syms = n.input_alphabet.symbols
    z_syms = n.output_alphabet.symbols
    blank = fresh_symbol(set(y_syms) | set(z_syms), "bot")
    y_hat = Alphabet(y_syms + (blank,))
    z_hat = Alphabet(z_syms + (blank,))
    blank_in = len(y_syms)
    blank_out_h = len(y_syms)
    blank_out_t = len(z_syms)

    sink = len(n.states)
    h_states = n.states + (fresh_symbol(set(n.states), "sink"),)
    h_next = []
    h_out = []
    for s in range(len(n.states)):
        nrow = []
        orow = []
        for y in range(len(y_syms)):
            branch = n.delta[s][y]
            if branch is None:
                nrow.append(sink)
                orow.append(blank_out_h)
            else:
                nrow.append(next(iter(branch)))
                orow.append(y)
        h_next.append(tuple(nrow))
        h_out.append(tuple(orow))
    h_next.append(tuple(sink for _ in y_syms))
    h_out.append(tuple(blank_out_h for _ in y_syms))
    head = MealyMachine(
        n.input_alphabet, y_hat, h_states, n.initial,
        tuple(h_next), tuple(h_out),
    )

    t_next = []
    t_out = []
    for s in range(len(n.states)):
        nrow = []
        orow = []
        for y in range(len(y_syms)):
            branch = n.delta[s][y]
            if branch is None:
                nrow.append(s)
                orow.append(0)
            else:
                nrow.append(next(iter(branch)))
                orow.append(n.out[s][y])
        nrow.append(s)
        orow.append(blank_out_t)
        t_next.append(tuple(nrow))
        t_out.append(tuple(orow))
    tail = MealyMachine(
        y_hat, z_hat, n.states, n.initial,
        tuple(t_next), tuple(t_out),
    )
    return head, tail


def split_om(n: ObservationMachine) -> tuple[MealyMachine, MealyMachine]:
    """Feasible synthesis instance (head, model) whose solutions implement ``n``.

    With k the branching degree, the input alphabet becomes (symbol, index)
    pairs; branch targets of each (state, symbol) get distinct indices in
    ascending target order.  Reading (y, i) from a state with an i-th branch
    moves head and model to that target, the head outputting y and the model
    outputting ``n``'s output; all other inputs fall into a sink under a fresh
    blank symbol.  Head and model have one state more than ``n``.
    """
    require_consistent(n)
    k = degree(n)
    y_syms = n.input_alphabet.symbols
    z_syms = n.output_alphabet.symbols
    x_alphabet = Alphabet(
        tuple(f"{y}@{i}" for y in y_syms for i in range(k))
    )
    blank = fresh_symbol(set(y_syms) | set(z_syms), "bot")
    y_hat = Alphabet(y_syms + (blank,))
    z_hat = Alphabet(z_syms + (blank,))
    blank_y = len(y_syms)
    blank_z = len(z_syms)

    sink = len(n.states)
    states = n.states + (fresh_symbol(set(n.states), "sink"),)
    h_next = []
    h_out = []
    m_next = []
    m_out = []
    for s in range(len(n.states)):
        hn = []
        ho = []
        mn = []
        mo = []
        for y in range(len(y_syms)):
            branch = n.delta[s][y]
            targets = sorted(branch) if branch is not None else []
            for i in range(k):
                if i < len(targets):
                    hn.append(targets[i])
                    ho.append(y)
                    mn.append(targets[i])
                    mo.append(n.out[s][y])
                else:
                    hn.append(sink)
                    ho.append(blank_y)
                    mn.append(sink)
                    mo.append(blank_z)
        h_next.append(tuple(hn))
        h_out.append(tuple(ho))
        m_next.append(tuple(mn))
        m_out.append(tuple(mo))
    h_next.append(tuple(sink for _ in x_alphabet.symbols))
    h_out.append(tuple(blank_y for _ in x_alphabet.symbols))
    m_next.append(tuple(sink for _ in x_alphabet.symbols))
    m_out.append(tuple(blank_z for _ in x_alphabet.symbols))
    head = MealyMachine(
        x_alphabet, y_hat, states, n.initial, tuple(h_next), tuple(h_out)
    )
    model = MealyMachine(
        x_alphabet, z_hat, states, n.initial, tuple(m_next), tuple(m_out)
    )
    return head, model


def exp_family(n: int) -> ObservationMachine:
    """Observation machine with (n+1)^2 states needing 2^n implementation states.

    Over inputs {a, b}: the first n inputs and any following a's answer
    ``top``; if the first b after the prefix arrives after exactly i a's
    (i < n), it answers the i-th prefix symbol; everything beyond is
    undefined.  Each prefix position nondeterministically either records its
    symbol (entering a counting chain that waits out the prefix, then a
    reveal chain that counts the a's down) or defers to the next position;
    the last position must record.  Degree 2, consistent by construction.
    """
    if n < 1:
        raise MachineError("the family is defined for n >= 1")
    y = Alphabet(("a", "b"))
    z = Alphabet(("a", "b", "top"))
    top = 2

    names = []
    index: dict[str, int] = {}

    def add(name: str) -> int:
        index[name] = len(names)
        names.append(name)
        return index[name]

    for j in range(n):
        add(f"p{j}")
    for j in range(n - 1):
        for c in "ab":
            for t in range(j + 1, n):
                add(f"c{j}{c}{t}")
    for c in "ab":
        for m in range(n):
            add(f"r{c}{m}")
    add("end")

    delta: list[list[Union[frozenset[int], None]]] = [
        [None, None] for _ in names
    ]
    out: list[list[Union[int, None]]] = [[None, None] for _ in names]

    def record_target(j: int, c: str) -> int:
        # entering the chain right after position j; the chain covers
        # positions j+1..n-1 and then reveals with j a's still to count
        if j < n - 1:
            return index[f"c{j}{c}{j + 1}"]
        return index[f"r{c}{j}"]

    for j in range(n):
        p = index[f"p{j}"]
        for ci, c in enumerate("ab"):
            branch = {record_target(j, c)}
            if j < n - 1:
                branch.add(index[f"p{j + 1}"])
            delta[p][ci] = frozenset(branch)
            out[p][ci] = top
    for j in range(n - 1):
        for c in "ab":
            for t in range(j + 1, n):
                s = index[f"c{j}{c}{t}"]
                target = index[f"c{j}{c}{t + 1}"] if t < n - 1 else index[f"r{c}{j}"]
                for ci in range(2):
                    delta[s][ci] = frozenset({target})
                    out[s][ci] = top
    for c in "ab":
        for m in range(n):
            s = index[f"r{c}{m}"]
            if m >= 1:
                delta[s][0] = frozenset({index[f"r{c}{m - 1}"]})
                out[s][0] = top
        s = index[f"r{c}0"]
        delta[s][1] = frozenset({index["end"]})
        out[s][1] = y.index(c)

    return ObservationMachine(
        y, z, tuple(names), 0,
        tuple(tuple(row) for row in delta),
        tuple(tuple(row) for row in out),
    )
