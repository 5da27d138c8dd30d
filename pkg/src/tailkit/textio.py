"""Line-oriented textual format for machines.

A document is UTF-8 text with ``\\n`` line endings.  ``#`` starts a comment
that runs to the end of the line; tokens are whitespace-separated.  The header
lines appear in fixed order, followed by any number of transition lines::

    type mealy            # or: om, nfa
    inputs a b
    outputs 0 1           # absent for nfa
    states s0 s1
    initial s0
    trans s0 a s1 0       # mealy: source input target output
    trans s0 a { s0 s1 } 0    # om: branch set between braces
    trans s0 a { s1 }         # nfa: possibly empty successor set

Mealy machines must be complete; om and nfa transitions may be omitted where
undefined.  Serialization is canonical: transitions are emitted in (state
index, symbol index) order with branch sets in ascending state order, so
parsing a serialized machine reproduces it exactly.
"""

from __future__ import annotations

import re
from typing import Union

from .machines import (
    Alphabet,
    Machine,
    MachineError,
    MealyMachine,
    Nfa,
    ObservationMachine,
)

_TOKEN = re.compile(r"\S+")


class ParseError(MachineError):
    """Syntax or well-formedness error, located by line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class _Line:
    def __init__(self, number: int, tokens: list[tuple[str, int]]):
        self.number = number
        self.tokens = tokens

    def keyword(self) -> str:
        return self.tokens[0][0]


def _tokenize(text: str) -> list[_Line]:
    lines = []
    for number, raw in enumerate(text.split("\n"), start=1):
        body = raw.split("#", 1)[0]
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(body)]
        if tokens:
            lines.append(_Line(number, tokens))
    return lines


def _fail(line: _Line, index: int, message: str) -> None:
    if index < len(line.tokens):
        col = line.tokens[index][1]
    elif line.tokens:
        tok, start = line.tokens[-1]
        col = start + len(tok)
    else:
        col = 1
    raise ParseError(message, line.number, col)


def _header(lines: list[_Line], at: int, keyword: str, last_line: int) -> _Line:
    if at >= len(lines):
        raise ParseError(f"expected '{keyword}' line", last_line + 1)
    line = lines[at]
    if line.keyword() != keyword:
        _fail(line, 0, f"expected '{keyword}', got {line.keyword()!r}")
    if len(line.tokens) < 2:
        _fail(line, 1, f"'{keyword}' needs at least one value")
    return line


def _symbols(line: _Line) -> tuple[str, ...]:
    names = []
    seen = set()
    for tok, col in line.tokens[1:]:
        if set(tok) & set("{}"):
            raise ParseError(f"name {tok!r} may not contain braces", line.number, col)
        if tok in seen:
            raise ParseError(f"duplicate name {tok!r}", line.number, col)
        seen.add(tok)
        names.append(tok)
    return tuple(names)


def _lookup(table: dict[str, int], line: _Line, index: int, what: str) -> int:
    tok, col = line.tokens[index]
    try:
        return table[tok]
    except KeyError:
        raise ParseError(f"unknown {what} {tok!r}", line.number, col) from None


def parse_machine(text: str) -> Machine:
    """Parse a machine document; the ``type`` line selects the result type."""
    lines = _tokenize(text)
    if not lines:
        raise ParseError("empty document", 1)
    head = lines[0]
    if head.keyword() != "type":
        _fail(head, 0, f"expected 'type', got {head.keyword()!r}")
    if len(head.tokens) != 2:
        _fail(head, 1, "'type' takes exactly one value")
    kind = head.tokens[1][0]
    if kind not in ("mealy", "om", "nfa"):
        _fail(head, 1, f"unknown machine type {kind!r}")

    at = 1
    line = _header(lines, at, "inputs", head.number)
    inputs = Alphabet(_symbols(line))
    at += 1
    if kind != "nfa":
        line = _header(lines, at, "outputs", line.number)
        outputs = Alphabet(_symbols(line))
        at += 1
    line = _header(lines, at, "states", line.number)
    states = _symbols(line)
    at += 1
    line = _header(lines, at, "initial", line.number)
    if len(line.tokens) != 2:
        _fail(line, 2, "'initial' takes exactly one state")
    at += 1

    state_index = {name: i for i, name in enumerate(states)}
    in_index = {name: i for i, name in enumerate(inputs.symbols)}
    initial = _lookup(state_index, line, 1, "state")

    trans_lines = lines[at:]
    for line in trans_lines:
        if line.keyword() != "trans":
            _fail(line, 0, f"expected 'trans', got {line.keyword()!r}")

    if kind == "mealy":
        out_index = {name: i for i, name in enumerate(outputs.symbols)}
        seen: dict[tuple[int, int], None] = {}
        nxt = [[-1] * len(inputs) for _ in states]
        out = [[-1] * len(inputs) for _ in states]
        for line in trans_lines:
            if len(line.tokens) != 5:
                _fail(line, len(line.tokens),
                      "mealy transition is: trans <state> <input> <state> <output>")
            s = _lookup(state_index, line, 1, "state")
            x = _lookup(in_index, line, 2, "input symbol")
            tgt = _lookup(state_index, line, 3, "state")
            z = _lookup(out_index, line, 4, "output symbol")
            if (s, x) in seen:
                _fail(line, 1, f"duplicate transition for ({states[s]},{inputs.symbols[x]})")
            seen[(s, x)] = None
            nxt[s][x] = tgt
            out[s][x] = z
        for s in range(len(states)):
            for x in range(len(inputs)):
                if nxt[s][x] < 0:
                    raise ParseError(
                        f"incomplete mealy machine: missing ({states[s]},{inputs.symbols[x]})",
                        trans_lines[-1].number if trans_lines else line.number,
                    )
        return MealyMachine(inputs, outputs, states, initial,
                            tuple(tuple(r) for r in nxt), tuple(tuple(r) for r in out))

    if kind == "om":
        out_index = {name: i for i, name in enumerate(outputs.symbols)}
        delta: list[list[Union[frozenset[int], None]]] = [
            [None] * len(inputs) for _ in states
        ]
        outs: list[list[Union[int, None]]] = [[None] * len(inputs) for _ in states]
        for line in trans_lines:
            toks = line.tokens
            if len(toks) < 6 or toks[3][0] != "{" or toks[-2][0] != "}":
                _fail(line, min(3, len(toks)),
                      "om transition is: trans <state> <input> { <state>+ } <output>")
            s = _lookup(state_index, line, 1, "state")
            y = _lookup(in_index, line, 2, "input symbol")
            branch = frozenset(
                _lookup(state_index, line, i, "state") for i in range(4, len(toks) - 2)
            )
            if not branch:
                _fail(line, 4, "empty branch set in an om transition")
            z = _lookup(out_index, line, len(toks) - 1, "output symbol")
            if delta[s][y] is not None:
                _fail(line, 1, f"duplicate transition for ({states[s]},{inputs.symbols[y]})")
            delta[s][y] = branch
            outs[s][y] = z
        return ObservationMachine(inputs, outputs, states, initial,
                                  tuple(tuple(r) for r in delta),
                                  tuple(tuple(r) for r in outs))

    delta_n: list[list[frozenset[int]]] = [
        [frozenset()] * len(inputs) for _ in states
    ]
    for line in trans_lines:
        toks = line.tokens
        if len(toks) < 5 or toks[3][0] != "{" or toks[-1][0] != "}":
            _fail(line, min(3, len(toks)),
                  "nfa transition is: trans <state> <symbol> { <state>* }")
        s = _lookup(state_index, line, 1, "state")
        x = _lookup(in_index, line, 2, "symbol")
        branch = frozenset(
            _lookup(state_index, line, i, "state") for i in range(4, len(toks) - 1)
        )
        delta_n[s][x] = delta_n[s][x] | branch
    return Nfa(inputs, states, initial, tuple(tuple(r) for r in delta_n))


def serialize_machine(m: Machine) -> str:
    """Canonical text for a machine; round-trips through parse_machine."""
    lines = []
    if isinstance(m, MealyMachine):
        lines.append("type mealy")
        lines.append("inputs " + " ".join(m.input_alphabet.symbols))
        lines.append("outputs " + " ".join(m.output_alphabet.symbols))
        lines.append("states " + " ".join(m.states))
        lines.append("initial " + m.states[m.initial])
        for s, name in enumerate(m.states):
            for x, sym in enumerate(m.input_alphabet.symbols):
                tgt, z = m.next[s][x], m.out[s][x]
                lines.append(
                    f"trans {name} {sym} {m.states[tgt]} {m.output_alphabet.symbols[z]}"
                )
    elif isinstance(m, ObservationMachine):
        lines.append("type om")
        lines.append("inputs " + " ".join(m.input_alphabet.symbols))
        lines.append("outputs " + " ".join(m.output_alphabet.symbols))
        lines.append("states " + " ".join(m.states))
        lines.append("initial " + m.states[m.initial])
        for s, name in enumerate(m.states):
            for y, sym in enumerate(m.input_alphabet.symbols):
                branch = m.delta[s][y]
                if branch is None:
                    continue
                targets = " ".join(m.states[t] for t in sorted(branch))
                z = m.output_alphabet.symbols[m.out[s][y]]
                lines.append(f"trans {name} {sym} {{ {targets} }} {z}")
    elif isinstance(m, Nfa):
        lines.append("type nfa")
        lines.append("inputs " + " ".join(m.alphabet.symbols))
        lines.append("states " + " ".join(m.states))
        lines.append("initial " + m.states[m.initial])
        for s, name in enumerate(m.states):
            for x, sym in enumerate(m.alphabet.symbols):
                branch = m.delta[s][x]
                if not branch:
                    continue
                targets = " ".join(m.states[t] for t in sorted(branch))
                lines.append(f"trans {name} {sym} {{ {targets} }}")
    else:
        raise MachineError(f"not a machine: {m!r}")
    return "\n".join(lines) + "\n"
