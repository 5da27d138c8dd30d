import itertools
import random

import pytest

from tailkit.generators import (
    default_alphabet,
    exp_family,
    fresh_symbol,
    np_reduction,
    random_mealy,
    split_om,
)
from tailkit.machines import (
    Alphabet,
    MachineError,
    ObservationMachine,
    degree,
    run_machine,
)
from tailkit.minimize import minimize_om, minimize_tail
from tailkit.observation import image_automaton, implements, is_consistent, restriction
from tailkit.synthesis import feasible, minimal_solution

from oracles import (
    min_implementation_size,
    min_replacement_size,
    om_run_outputs,
)


def random_partial_deterministic(rng, n, alpha=2, density=0.7):
    """Random degree-1 observation machine (consistent by determinism)."""
    delta, out = [], []
    for _ in range(n):
        drow, orow = [], []
        for _ in range(alpha):
            if rng.random() < density:
                drow.append(frozenset({rng.randrange(n)}))
                orow.append(rng.randrange(alpha))
            else:
                drow.append(None)
                orow.append(None)
        delta.append(tuple(drow))
        out.append(tuple(orow))
    syms = default_alphabet(alpha)
    return ObservationMachine(
        syms, syms, tuple(f"q{i}" for i in range(n)), 0, tuple(delta), tuple(out)
    )


def test_default_alphabet_and_fresh_symbol():
    assert default_alphabet(3).symbols == ("a", "b", "c")
    assert len(default_alphabet(30)) == 30
    assert fresh_symbol({"bot"}, "bot") != "bot"
    assert fresh_symbol({"a"}, "bot") == "bot"


def test_random_mealy_reproducible():
    a = random_mealy(5, 3, 2, 42)
    b = random_mealy(5, 3, 2, 42)
    assert a == b
    c = random_mealy(5, 3, 2, 43)
    assert a != c


def test_random_mealy_shape():
    m = random_mealy(7, 3, 4, 1)
    assert len(m.states) == 7
    assert len(m.input_alphabet) == 3
    assert len(m.output_alphabet) == 4
    assert m.initial == 0
    # equal-size alphabets share symbol names, so cascades compose directly
    n = random_mealy(3, 4, 4, 2)
    assert n.input_alphabet == n.output_alphabet


def test_random_mealy_keeps_all_states():
    # generated machines may have unreachable states; they are not trimmed
    for seed in range(50):
        assert len(random_mealy(6, 2, 2, seed).states) == 6


def test_np_reduction_requires_degree_one():
    branching = restriction(
        random_mealy(3, 2, 2, 1), image_automaton(random_mealy(3, 2, 2, 2))
    )
    if degree(branching) > 1:
        with pytest.raises(MachineError):
            np_reduction(branching)


def test_np_reduction_shapes_and_head_echo():
    rng = random.Random(60)
    for _ in range(10):
        n = random_partial_deterministic(rng, rng.randint(1, 4))
        h, t = np_reduction(n)
        assert len(h.states) == len(n.states) + 1
        assert t.states == n.states
        blank = h.output_alphabet.symbols[-1]
        assert t.input_alphabet == h.output_alphabet
        assert blank not in n.input_alphabet
        assert h.input_alphabet == n.input_alphabet
        assert tuple(h.output_alphabet)[:-1] == tuple(n.input_alphabet)
        assert tuple(t.output_alphabet)[:-1] == tuple(n.output_alphabet)
        # the head echoes inputs while the word stays in n's domain,
        # then pads with the blank symbol forever
        for word_len in range(4):
            for word in itertools.product(range(len(n.input_alphabet)), repeat=word_len):
                syms = tuple(n.input_alphabet.symbols[x] for x in word)
                echoed = run_machine(h, syms)
                for k in range(word_len):
                    prefix_defined = bool(om_run_outputs(n, word[: k + 1]))
                    if prefix_defined:
                        assert echoed[k] == syms[k]
                    else:
                        assert echoed[k] == blank
                        assert set(echoed[k:]) == {blank}
                        break


def test_np_reduction_biconditional_small():
    rng = random.Random(61)
    done = 0
    while done < 3:
        n = random_partial_deterministic(rng, rng.randint(1, 3))
        h, t = np_reduction(n)
        impl = min_implementation_size(
            n, 2, n.input_alphabet.symbols, n.output_alphabet.symbols,
            probe_len=2 * len(n.states),
        )
        if impl is None:
            continue
        repl = min_replacement_size(h, t, len(t.states))
        assert repl == impl
        assert len(minimize_tail(h, t).states) == impl
        done += 1


def test_split_om_shapes_and_labels():
    rng = random.Random(62)
    for _ in range(10):
        n = restriction(
            random_mealy(rng.randint(1, 3), 2, 2, rng.randrange(10**6)),
            image_automaton(random_mealy(rng.randint(1, 3), 2, 2, rng.randrange(10**6))),
        )
        k = degree(n)
        h, m = split_om(n)
        assert len(h.states) == len(n.states) + 1
        assert len(m.states) == len(n.states) + 1
        assert h.states == m.states
        want_inputs = tuple(
            f"{y}@{i}" for y in n.input_alphabet.symbols for i in range(k)
        )
        assert set(h.input_alphabet.symbols) == set(want_inputs)
        assert h.input_alphabet == m.input_alphabet
        # labels follow ascending target order: label i of (s, y) maps to the
        # i-th smallest member of the branch, the head echoing y
        for s in range(len(n.states)):
            for y, ysym in enumerate(n.input_alphabet.symbols):
                branch = n.delta[s][y]
                if branch is None:
                    continue
                targets = sorted(branch)
                for i, target in enumerate(targets):
                    x = h.input_alphabet.index(f"{ysym}@{i}")
                    assert h.next[s][x] == target
                    assert h.output_alphabet.symbols[h.out[s][x]] == ysym
                    assert m.next[s][x] == target
                    assert m.out[s][x] == n.out[s][y]


def test_split_om_always_feasible_and_solvable():
    rng = random.Random(63)
    for _ in range(8):
        n = restriction(
            random_mealy(rng.randint(1, 3), 2, 2, rng.randrange(10**6)),
            image_automaton(random_mealy(rng.randint(1, 3), 2, 2, rng.randrange(10**6))),
        )
        h, m = split_om(n)
        assert feasible(h, m)
        t = minimal_solution(h, m)
        assert implements(t, n)


def test_split_om_rejects_inconsistent():
    AB = Alphabet(("a", "b"))
    ZO = Alphabet(("0", "1"))
    diverging = ObservationMachine(
        AB, ZO, ("r", "s1", "s2"), 0,
        ((frozenset({1, 2}), None), (frozenset({1}), None), (frozenset({2}), None)),
        ((0, None), (0, None), (1, None)),
    )
    with pytest.raises(MachineError):
        split_om(diverging)


def test_exp_family_structure():
    with pytest.raises(MachineError):
        exp_family(0)
    for n in (1, 2, 3):
        fam = exp_family(n)
        assert len(fam.states) == (n + 1) ** 2
        assert is_consistent(fam)
        assert fam.input_alphabet.symbols == ("a", "b")
        assert degree(fam) == (2 if n >= 2 else 1)


def test_exp_family_top_prefix_behavior():
    fam = exp_family(2)
    # any length-2 prefix answers "top" on both symbols
    for word in itertools.product((0, 1), repeat=2):
        runs = om_run_outputs(fam, word)
        assert len(runs) >= 1
        for outs in runs:
            assert all(fam.output_alphabet.symbols[o] == "top" for o in outs)


def test_exp_family_distinguishing_words():
    n = 2
    fam = exp_family(n)
    a, b = 0, 1
    for w1 in itertools.product((a, b), repeat=n):
        for w2 in itertools.product((a, b), repeat=n):
            for i in range(n):
                if w1[i] == w2[i]:
                    continue
                probe = (a,) * i + (b,)
                r1 = om_run_outputs(fam, w1 + probe)
                r2 = om_run_outputs(fam, w2 + probe)
                assert len(r1) == 1 and len(r2) == 1
                o1, o2 = r1.pop(), r2.pop()
                assert fam.output_alphabet.symbols[o1[-1]] == fam.input_alphabet.symbols[w1[i]]
                assert fam.output_alphabet.symbols[o2[-1]] == fam.input_alphabet.symbols[w2[i]]
                assert o1[-1] != o2[-1]


def test_exp_family_undefined_after_reveal_and_late_b():
    n = 2
    fam = exp_family(n)
    a, b = 0, 1
    w = (a, b)
    assert not om_run_outputs(fam, w + (a, a, b))  # first b too late
    revealed = w + (b,)  # reveal at offset 0
    assert om_run_outputs(fam, revealed)
    for extra in ((a,), (b,)):
        assert not om_run_outputs(fam, revealed + extra)


def test_exp_family_minimal_implementation_lower_bound_small():
    assert len(minimize_om(exp_family(1)).states) >= 2
