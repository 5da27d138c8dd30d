import random

import pytest

from tailkit.machines import (
    Alphabet,
    MachineError,
    MealyMachine,
    Nfa,
    ObservationMachine,
    canonical_form,
    compose_cascade,
    degree,
    equivalent,
    run_machine,
    trace,
)
from tailkit.generators import random_mealy

from oracles import (
    _compose,
    all_words,
    machines_equal,
    mealy_outputs,
    words_differ,
)


AB = Alphabet(("a", "b"))
ZO = Alphabet(("0", "1"))


def two_state():
    return MealyMachine(
        AB, ZO, ("s0", "s1"), 0,
        ((1, 0), (1, 1)),
        ((0, 1), (1, 0)),
    )


def test_alphabet_validation():
    with pytest.raises(MachineError):
        Alphabet(())
    with pytest.raises(MachineError):
        Alphabet(("a", "a"))
    with pytest.raises(MachineError):
        Alphabet(("a", "sym{bad}"))
    assert AB.index("b") == 1
    assert "a" in AB and "c" not in AB
    assert list(AB) == ["a", "b"]


def test_mealy_validation():
    with pytest.raises(MachineError):
        MealyMachine(AB, ZO, ("s0",), 1, ((0, 0),), ((0, 0),))  # bad initial
    with pytest.raises(MachineError):
        MealyMachine(AB, ZO, ("s0",), 0, ((0,),), ((0, 0),))  # missing column
    with pytest.raises(MachineError):
        MealyMachine(AB, ZO, ("s0",), 0, ((0, 7),), ((0, 0),))  # bad target
    with pytest.raises(MachineError):
        MealyMachine(AB, ZO, ("s0", "s0"), 0, ((0, 0),) * 2, ((0, 0),) * 2)


def test_step_and_trace():
    m = two_state()
    assert m.step(0, 0) == (1, 0)
    r = trace(m, ("a", "b", "a"))
    assert r.states == (0, 1, 1, 1)
    assert r.inputs == ("a", "b", "a")
    assert r.outputs == ("0", "0", "1")
    assert run_machine(m, ("a", "b", "a")) == ("0", "0", "1")
    with pytest.raises(MachineError):
        trace(m, ("a", "zzz"))


def test_run_matches_direct_interpretation():
    rng = random.Random(3)
    for _ in range(20):
        m = random_mealy(rng.randint(1, 5), 2, 3, rng.randrange(10**6))
        word = [rng.randrange(2) for _ in range(6)]
        syms = tuple(m.input_alphabet.symbols[x] for x in word)
        got = run_machine(m, syms)
        want = tuple(m.output_alphabet.symbols[o] for o in mealy_outputs(m, word))
        assert got == want


def test_equivalent_trivial_and_witness():
    m = two_state()
    assert equivalent(m, m)
    other = MealyMachine(
        AB, ZO, ("t0", "t1"), 0,
        ((1, 0), (1, 1)),
        ((0, 1), (0, 0)),  # differs once reached s1
    )
    verdict = equivalent(m, other)
    assert not verdict
    # witness is a shortest separating word
    w = verdict.witness
    assert run_machine(m, w) != run_machine(other, w)
    oracle_w = words_differ(m, other, 4)
    assert len(w) == len(oracle_w)


def test_equivalent_requires_same_alphabets():
    m = two_state()
    other = MealyMachine(Alphabet(("x", "y")), ZO, ("s0",), 0, ((0, 0),), ((0, 0),))
    with pytest.raises(MachineError):
        equivalent(m, other)


def test_equivalent_against_word_oracle():
    rng = random.Random(4)
    for _ in range(30):
        m1 = random_mealy(rng.randint(1, 4), 2, 2, rng.randrange(10**6))
        m2 = random_mealy(rng.randint(1, 4), 2, 2, rng.randrange(10**6))
        assert bool(equivalent(m1, m2)) == machines_equal(m1, m2)
        assert machines_equal(m1, m2) == (words_differ(m1, m2, 8) is None)


def test_compose_cascade_outputs():
    rng = random.Random(5)
    for _ in range(20):
        h = random_mealy(rng.randint(1, 4), 2, 3, rng.randrange(10**6))
        t = random_mealy(rng.randint(1, 4), 3, 2, rng.randrange(10**6))
        c = compose_cascade(h, t)
        assert c.input_alphabet == h.input_alphabet
        assert c.output_alphabet == t.output_alphabet
        assert machines_equal(c, _compose(h, t))
        for word in all_words(h.input_alphabet.symbols, 4):
            syms = tuple(h.input_alphabet.symbols[x] for x in word)
            via_h = run_machine(h, syms)
            assert run_machine(c, syms) == run_machine(t, via_h)


def test_compose_cascade_alphabet_mismatch():
    h = two_state()
    t = MealyMachine(Alphabet(("p", "q")), AB, ("u",), 0, ((0, 0),), ((0, 1),))
    with pytest.raises(MachineError):
        compose_cascade(h, t)


def test_compose_keeps_reachable_product_only():
    # head always outputs "0", so tail states reachable via "1" are dropped
    h = MealyMachine(AB, ZO, ("h",), 0, ((0, 0),), ((0, 0),))
    t = MealyMachine(ZO, ZO, ("t0", "t1"), 0, ((0, 1), (1, 1)), ((0, 0), (1, 1)))
    c = compose_cascade(h, t)
    assert len(c.states) == 1


def test_degree():
    om = ObservationMachine(
        AB, ZO, ("q0", "q1"), 0,
        ((frozenset({0, 1}), None), (frozenset({0}), None)),
        ((0, None), (1, None)),
    )
    assert degree(om) == 2
    empty = ObservationMachine(AB, ZO, ("q0",), 0, ((None, None),), ((None, None),))
    assert degree(empty) == 1


def test_om_validation():
    with pytest.raises(MachineError):
        ObservationMachine(
            AB, ZO, ("q0",), 0,
            ((frozenset(), None),),  # empty branch
            ((0, None),),
        )
    with pytest.raises(MachineError):
        ObservationMachine(
            AB, ZO, ("q0",), 0,
            ((frozenset({0}), None),),
            ((None, None),),  # delta defined but out missing
        )


def test_canonical_form_is_stable_and_equivalent():
    rng = random.Random(6)
    for _ in range(15):
        m = random_mealy(rng.randint(1, 5), 2, 2, rng.randrange(10**6))
        c = canonical_form(m)
        assert canonical_form(c) == c
        assert equivalent(m, c)
        assert c.states == tuple(f"s{i}" for i in range(len(c.states)))


def test_canonical_form_identifies_renamings():
    m = two_state()
    renamed = MealyMachine(
        m.input_alphabet, m.output_alphabet, ("x", "y"), 0, m.next, m.out
    )
    assert canonical_form(m) == canonical_form(renamed)


def test_nfa_accepts():
    n = Nfa(
        AB, ("n0", "n1"), 0,
        ((frozenset({1}), frozenset()), (frozenset({0, 1}), frozenset({1}))),
    )
    assert n.accepts(())
    assert n.accepts(("a", "a"))
    assert not n.accepts(("b",))
