"""Exact minimization of observation machines and of cascade tails.

The pipeline: build the observation machine of the tail restricted to the
head's output language, compute the pairwise incompatibility relation, seed a
greedy clique as a lower bound and partial solution, then search upward over
target sizes n, asking a SAT solver for a closed cover of n compatibles.  A
cover converts back into a complete machine with one state per class.

A baseline that encodes "does an n-state replacement tail exist?" directly
over the cascade product is included for cross-validation and benchmarks.
"""

from __future__ import annotations

import os
import time
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Optional, Union

import numpy as np
from scipy import sparse

from .machines import MachineError, MealyMachine, ObservationMachine, Verdict, compose_cascade, equivalent
from .observation import image_automaton, require_consistent, restriction
from .sat import SAT, TIMEOUT, Cnf, SatOutcome, solve, to_dimacs


class MinimizationTimeout(RuntimeError):
    """The time budget ran out; ``bound`` is the size being attempted."""

    def __init__(self, bound: int, sat_calls: int = 0):
        super().__init__(f"minimization timed out while attempting size {bound}")
        self.bound = bound
        self.sat_calls = sat_calls


class CoverError(MachineError):
    """A claimed cover violates closure, output agreement, or coverage."""


@dataclass(eq=False)
class CompatibilityRelation:
    """Symmetric incompatibility relation over the states of one machine."""

    state_count: int
    matrix: np.ndarray  # boolean, matrix[i, j] iff i and j are incompatible

    def is_incompatible(self, i: int, j: int) -> bool:
        return bool(self.matrix[i, j])

    def pairs(self) -> Iterator[tuple[int, int]]:
        """Unordered incompatible pairs (i, j) with i < j, ascending."""
        for i, j in np.argwhere(np.triu(self.matrix, 1)).tolist():
            yield i, j

    def pair_count(self) -> int:
        return int(np.triu(self.matrix, 1).sum())


@dataclass(frozen=True)
class PartialSolution:
    """A clique of pairwise incompatible states: lower bound and SAT seed."""

    clique: tuple[int, ...]


def incompatibility(m: ObservationMachine) -> CompatibilityRelation:
    """Pairwise incompatibility: some word defined at both states separates them.

    Seeds with pairs that disagree on the output of a directly shared input,
    then propagates backwards over transition pairs to a fixed point.  The
    rounds are vectorized as boolean sparse-matrix products per input symbol.
    """
    require_consistent(m)
    n = len(m.states)
    ny = len(m.input_alphabet)
    inc = np.zeros((n, n), dtype=bool)
    adjacency = []
    for y in range(ny):
        defined = [s for s in range(n) if m.delta[s][y] is not None]
        if not defined:
            adjacency.append(None)
            continue
        outs = np.array([m.out[s][y] for s in defined])
        ix = np.array(defined)
        inc[np.ix_(ix, ix)] |= outs[:, None] != outs[None, :]
        rows = []
        cols = []
        for s in defined:
            for t in m.delta[s][y]:
                rows.append(s)
                cols.append(t)
        adjacency.append(
            sparse.csr_matrix(
                (np.ones(len(rows), dtype=np.int32), (rows, cols)), shape=(n, n)
            )
        )
    while True:
        changed = False
        dense = inc.astype(np.int32)
        for a in adjacency:
            if a is None:
                continue
            # a @ inc @ a.T, computed with sparse-dense products only; the
            # result is symmetric because inc is
            hit = (a @ (a @ dense).T) > 0
            new = hit & ~inc
            if new.any():
                inc |= hit
                changed = True
        if not changed:
            break
    return CompatibilityRelation(n, inc)


def greedy_clique(rel: CompatibilityRelation) -> PartialSolution:
    """Deterministic greedy clique in the incompatibility graph.

    Repeatedly picks, among states incompatible with everything chosen so
    far, one of highest incompatibility degree within the remaining
    candidates, breaking ties by lowest state index.
    """
    n = rel.state_count
    matrix = rel.matrix
    cand = np.ones(n, dtype=bool)
    clique: list[int] = []
    indices = np.arange(n)
    while cand.any():
        cands = indices[cand]
        degrees = matrix[np.ix_(cands, cands)].sum(axis=1)
        pick = int(cands[int(np.argmax(degrees))])
        clique.append(pick)
        cand &= matrix[pick]
    return PartialSolution(tuple(clique))


@dataclass(frozen=True)
class CompatibleCover:
    """Classes of compatible states with a successor-class map.

    ``succ[i][y]`` names the class containing every y-successor of class i;
    the choice is arbitrary where class i has no state defined at y.
    """

    classes: tuple[frozenset[int], ...]
    succ: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        k = len(self.classes)
        if k == 0:
            raise CoverError("a cover needs at least one class")
        if len(self.succ) != k:
            raise CoverError("succ must have one row per class")
        width = len(self.succ[0]) if self.succ else 0
        for row in self.succ:
            if len(row) != width:
                raise CoverError("succ rows must have equal length")
            for j in row:
                if not 0 <= j < k:
                    raise CoverError(f"successor class {j} out of range")
        for cls in self.classes:
            if not cls:
                raise CoverError("cover classes must be non-empty")


@dataclass(frozen=True)
class CoverDecoder:
    """Maps SAT models of a cover encoding back to covers.

    Variable layout (1-based): membership L(s,i) = 1 + s*n + i for state s
    and class i; successor choice N(i,j,y) = m*n + 1 + (i*n + j)*ny + y.
    """

    m_states: int
    n_classes: int
    n_inputs: int

    def lit_member(self, s: int, i: int) -> int:
        return 1 + s * self.n_classes + i

    def lit_succ(self, i: int, j: int, y: int) -> int:
        base = self.m_states * self.n_classes
        return base + 1 + (i * self.n_classes + j) * self.n_inputs + y

    def decode(self, model: tuple[bool, ...]) -> CompatibleCover:
        """Cover from a model: empty classes dropped, least true successor kept."""
        n = self.n_classes
        raw = [
            frozenset(
                s for s in range(self.m_states) if model[self.lit_member(s, i) - 1]
            )
            for i in range(n)
        ]
        retained = [i for i in range(n) if raw[i]]
        remap = {old: new for new, old in enumerate(retained)}
        succ = []
        for i in retained:
            row = []
            for y in range(self.n_inputs):
                chosen = 0
                for j in range(n):
                    if model[self.lit_succ(i, j, y) - 1] and j in remap:
                        chosen = remap[j]
                        break
                row.append(chosen)
            succ.append(tuple(row))
        return CompatibleCover(tuple(raw[i] for i in retained), tuple(succ))


def encode_cover(
    m: ObservationMachine,
    n: int,
    rel: CompatibilityRelation,
    partial: PartialSolution,
    *,
    deadline: Optional[float] = None,
) -> tuple[Cnf, CoverDecoder]:
    """CNF asking for a closed cover of ``m`` by n compatible classes.

    The greedy clique states are pinned to distinct classes as symmetry
    breaking, and any state incompatible with a class's pinned seed can never
    join that class, so those memberships are fixed false up front.  Clauses,
    in emission order: the dead memberships; incompatible states never share
    a class (for seeded classes only pairs surviving the seed filter need a
    clause, which keeps the count quadratic only in the unpinned classes);
    the initial state is covered; every (class, input) has a successor class;
    choosing successor class j for (i, y) forces every y-successor of every
    member of i into j (per successor: a three-literal clause, or two
    literals when the successor cannot be in j at all); the clique pins; and
    a lexicographic ordering of the unpinned membership columns.
    """
    if n < len(partial.clique):
        raise MachineError(
            f"target size {n} is below the clique lower bound {len(partial.clique)}"
        )
    ms = len(m.states)
    ny = len(m.input_alphabet)
    dec = CoverDecoder(ms, n, ny)
    f = Cnf(ms * n + n * n * ny)
    clauses = f.clauses
    emitted = 0

    def tick(count: int) -> None:
        nonlocal emitted
        emitted += count
        if deadline is not None and emitted >= 200_000:
            emitted = 0
            if time.monotonic() > deadline:
                raise MinimizationTimeout(n)

    q = len(partial.clique)
    allowed = np.ones((ms, n), dtype=bool)
    for i, seed in enumerate(partial.clique):
        allowed[:, i] = ~rel.matrix[seed]
        allowed[seed, i] = True
    for s, i in np.argwhere(~allowed).tolist():
        clauses.append((-(1 + s * n + i),))
    tick(len(clauses))
    # s1 == s2 covers states incompatible with themselves (possible only in
    # unreachable parts); the duplicate literal collapses to a unit clause
    for i in range(q):
        members = np.flatnonzero(allowed[:, i])
        sub = rel.matrix[np.ix_(members, members)]
        for r1, r2 in np.argwhere(np.triu(sub, 0)).tolist():
            clauses.append((-(1 + int(members[r1]) * n + i),
                            -(1 + int(members[r2]) * n + i)))
        tick(len(members))
    if n > q:
        for s1, s2 in np.argwhere(np.triu(rel.matrix, 0)).tolist():
            base1 = 1 + s1 * n
            base2 = 1 + s2 * n
            clauses.extend((-(base1 + i), -(base2 + i)) for i in range(q, n))
            tick(n - q)
    clauses.append(tuple(dec.lit_member(m.initial, i)
                         for i in range(n) if allowed[m.initial, i]))
    for i in range(n):
        for y in range(ny):
            clauses.append(tuple(dec.lit_succ(i, j, y) for j in range(n)))
    tick(n * ny)
    allowed_rows = allowed.tolist()
    for s, y in m.domain_pairs():
        branch = sorted(m.delta[s][y])
        row_s = allowed_rows[s]
        for i in range(n):
            if not row_s[i]:
                continue
            neg_member = -dec.lit_member(s, i)
            for j in range(n):
                neg_choice = -dec.lit_succ(i, j, y)
                blocked = False
                for s2 in branch:
                    if allowed_rows[s2][j]:
                        clauses.append((neg_choice, neg_member,
                                        dec.lit_member(s2, j)))
                    else:
                        blocked = True
                if blocked:
                    clauses.append((neg_choice, neg_member))
            tick((len(branch) + 1) * n)
    for k, state in enumerate(partial.clique):
        clauses.append((dec.lit_member(state, k),))
    # classes beyond the pinned clique are interchangeable; ordering their
    # membership columns lexicographically prunes permuted duplicates, which
    # otherwise dominate the refutations near the true minimum
    for q in range(len(partial.clique) + 1, n):
        p = q - 1
        eq = f.var_count + 1  # eq+s <-> columns agree on states < s
        f.var_count += ms
        clauses.append((eq,))
        for s in range(ms):
            clauses.append((-(eq + s), dec.lit_member(s, p), -dec.lit_member(s, q)))
            if s + 1 < ms:
                clauses.append((-(eq + s), dec.lit_member(s, p),
                                dec.lit_member(s, q), eq + s + 1))
                clauses.append((-(eq + s), -dec.lit_member(s, p),
                                -dec.lit_member(s, q), eq + s + 1))
        tick(3 * ms)
    return f, dec


def cover_to_machine(f: CompatibleCover, m: ObservationMachine) -> MealyMachine:
    """Complete machine with one state per cover class.

    Validates coverage of the initial state, output agreement inside classes,
    and closure; inputs with no defined member take the first output symbol.
    """
    require_consistent(m)
    ny = len(m.input_alphabet)
    if f.succ and len(f.succ[0]) != ny:
        raise CoverError("succ rows must match the input alphabet")
    initial = next(
        (i for i, cls in enumerate(f.classes) if m.initial in cls), None
    )
    if initial is None:
        raise CoverError("no cover class contains the initial state")
    nxt = []
    out = []
    for i, cls in enumerate(f.classes):
        nrow = []
        orow = []
        for y in range(ny):
            defined = [s for s in sorted(cls) if m.delta[s][y] is not None]
            outputs = {m.out[s][y] for s in defined}
            if len(outputs) > 1:
                raise CoverError(
                    f"class {i} is not compatible: output conflict on "
                    f"{m.input_alphabet.symbols[y]}"
                )
            successors = {t for s in defined for t in m.delta[s][y]}
            target = f.succ[i][y]
            if not successors <= f.classes[target]:
                raise CoverError(f"closure violation in class {i} on input {y}")
            nrow.append(target)
            orow.append(outputs.pop() if outputs else 0)
        nxt.append(tuple(nrow))
        out.append(tuple(orow))
    names = tuple(f"C{i}" for i in range(len(f.classes)))
    return MealyMachine(
        m.input_alphabet, m.output_alphabet, names, initial,
        tuple(nxt), tuple(out),
    )


def machine_to_cover(n: MealyMachine, m: ObservationMachine) -> CompatibleCover:
    """Closed cover of ``m`` induced by an implementation ``n``.

    The class of an implementation state collects every state of ``m``
    reachable together with it on a common defined word.  Duplicate classes
    collapse and empty ones drop, so the cover has at most |states of n|
    classes.
    """
    from .observation import implements

    verdict = implements(n, m)
    if not verdict:
        raise MachineError(
            "machine does not implement the observation machine "
            f"(differs on {' '.join(verdict.witness)})"
        )
    ny = len(m.input_alphabet)
    reach: list[set[int]] = [set() for _ in n.states]
    reach[n.initial].add(m.initial)
    queue = deque([(n.initial, m.initial)])
    seen = {(n.initial, m.initial)}
    while queue:
        sn, sm = queue.popleft()
        for y in range(ny):
            branch = m.delta[sm][y]
            if branch is None:
                continue
            tn = n.next[sn][y]
            for tm in branch:
                if (tn, tm) not in seen:
                    seen.add((tn, tm))
                    reach[tn].add(tm)
                    queue.append((tn, tm))
    class_index: dict[frozenset[int], int] = {}
    rep: list[Optional[int]] = []  # representative n-state per class
    for sn in range(len(n.states)):
        cls = frozenset(reach[sn])
        if cls and cls not in class_index:
            class_index[cls] = len(rep)
            rep.append(sn)
    classes = tuple(sorted(class_index, key=class_index.get))
    succ = []
    for sn in rep:
        row = []
        for y in range(ny):
            target = frozenset(reach[n.next[sn][y]])
            row.append(class_index.get(target, 0))
        succ.append(tuple(row))
    return CompatibleCover(classes, tuple(succ))


@dataclass(frozen=True)
class MinimizationResult:
    """A minimization outcome plus the counters the benchmarks report."""

    machine: MealyMachine
    sat_calls: int
    skipped_encoding: bool
    n_solved: int


def _emit(directory: Optional[str], name: str, f: Cnf) -> None:
    if directory is None:
        return
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, name), "w", encoding="utf-8") as handle:
        handle.write(to_dimacs(f))


def minimize_om_result(
    m: ObservationMachine,
    upper: Optional[int] = None,
    witness: Optional[MealyMachine] = None,
    *,
    budget: Optional[float] = None,
    solver: Optional[str] = None,
    emit_cnf_dir: Optional[str] = None,
) -> MinimizationResult:
    """Minimum-state implementation of ``m`` with solver statistics.

    When ``upper`` (a known implementation size) equals the greedy clique
    lower bound, the caller-supplied ``witness`` machine is already minimal
    and is returned unchanged without touching the solver.  Otherwise target
    sizes are tried upward from the clique size until satisfiable.
    """
    if (upper is None) != (witness is None):
        raise MachineError("upper and witness must be supplied together")
    require_consistent(m)
    deadline = None if budget is None else time.monotonic() + budget
    rel = incompatibility(m)
    partial = greedy_clique(rel)
    if upper is not None and len(partial.clique) == upper:
        return MinimizationResult(witness, 0, True, upper)
    n = len(partial.clique)
    sat_calls = 0
    while True:
        if deadline is not None and time.monotonic() > deadline:
            raise MinimizationTimeout(n, sat_calls)
        f, dec = encode_cover(m, n, rel, partial, deadline=deadline)
        _emit(emit_cnf_dir, f"cover_n{n}.cnf", f)
        remaining = None if deadline is None else deadline - time.monotonic()
        sat_calls += 1
        outcome = solve(f, remaining, solver)
        if outcome.status == TIMEOUT:
            raise MinimizationTimeout(n, sat_calls)
        if outcome.status == SAT:
            cover = dec.decode(outcome.model)
            return MinimizationResult(cover_to_machine(cover, m), sat_calls, False, n)
        n += 1


def minimize_om(
    m: ObservationMachine,
    upper: Optional[int] = None,
    witness: Optional[MealyMachine] = None,
    **kwargs,
) -> MealyMachine:
    """Minimum-state complete machine implementing ``m``."""
    return minimize_om_result(m, upper, witness, **kwargs).machine


def minimize_tail_result(
    h: MealyMachine,
    t: MealyMachine,
    *,
    budget: Optional[float] = None,
    solver: Optional[str] = None,
    emit_cnf_dir: Optional[str] = None,
) -> MinimizationResult:
    """Minimum-state tail preserving the cascade behavior, with statistics.

    Builds the observation machine of ``t`` on the output language of ``h``
    and minimizes it; ``t`` itself is the size upper bound, so the encoding
    is skipped entirely when the clique lower bound meets it.
    """
    m = restriction(t, image_automaton(h))
    return minimize_om_result(
        m,
        len(t.states),
        t,
        budget=budget,
        solver=solver,
        emit_cnf_dir=emit_cnf_dir,
    )


def minimize_tail(h: MealyMachine, t: MealyMachine, **kwargs) -> MealyMachine:
    """Minimum-state replacement tail for the cascade of ``h`` into ``t``."""
    return minimize_tail_result(h, t, **kwargs).machine


@dataclass(frozen=True)
class NaiveDecoder:
    """Maps models of the direct replacement encoding back to machines.

    Variable layout (1-based): transition D(q,y,q') = 1 + (q*ny + y)*n + q',
    output O(q,y,z) after all D, pairing R(p,q) after all O, where p indexes
    the reachable cascade product states.
    """

    n_states: int
    n_inputs: int
    n_outputs: int
    n_pairs: int
    input_symbols: tuple[str, ...]
    output_symbols: tuple[str, ...]

    def lit_trans(self, q: int, y: int, q2: int) -> int:
        return 1 + (q * self.n_inputs + y) * self.n_states + q2

    def lit_out(self, q: int, y: int, z: int) -> int:
        base = self.n_states * self.n_inputs * self.n_states
        return base + 1 + (q * self.n_inputs + y) * self.n_outputs + z

    def lit_pair(self, p: int, q: int) -> int:
        base = self.n_states * self.n_inputs * (self.n_states + self.n_outputs)
        return base + 1 + p * self.n_states + q

    def decode(self, model: tuple[bool, ...]) -> MealyMachine:
        from .machines import Alphabet

        n, ny, nz = self.n_states, self.n_inputs, self.n_outputs
        nxt = []
        out = []
        for q in range(n):
            nrow = []
            orow = []
            for y in range(ny):
                nrow.append(
                    next(q2 for q2 in range(n) if model[self.lit_trans(q, y, q2) - 1])
                )
                orow.append(
                    next(z for z in range(nz) if model[self.lit_out(q, y, z) - 1])
                )
            nxt.append(tuple(nrow))
            out.append(tuple(orow))
        return MealyMachine(
            Alphabet(self.input_symbols),
            Alphabet(self.output_symbols),
            tuple(f"q{i}" for i in range(n)),
            0,
            tuple(nxt),
            tuple(out),
        )


def encode_replacement_naive(
    h: MealyMachine, t: MealyMachine, n: int
) -> tuple[Cnf, NaiveDecoder]:
    """CNF asking for an n-state tail with the same cascade behavior.

    Guesses the candidate's transition and output tables directly and pairs
    every reachable cascade product state with a candidate state: paired
    states must agree on the output of every head-produced symbol and their
    successors must be paired in turn.
    """
    if t.input_alphabet != h.output_alphabet:
        raise MachineError("tail input alphabet must equal head output alphabet")
    if n < 1:
        raise MachineError("candidate size must be at least 1")
    start = (h.initial, t.initial)
    order = {start: 0}
    pairs = [start]
    queue = deque([start])
    nx = len(h.input_alphabet)
    while queue:
        sh, st = queue.popleft()
        for x in range(nx):
            nh, y = h.step(sh, x)
            nt, _ = t.step(st, y)
            if (nh, nt) not in order:
                order[(nh, nt)] = len(pairs)
                pairs.append((nh, nt))
                queue.append((nh, nt))
    ny = len(t.input_alphabet)
    nz = len(t.output_alphabet)
    dec = NaiveDecoder(
        n, ny, nz, len(pairs), t.input_alphabet.symbols, t.output_alphabet.symbols
    )
    f = Cnf(n * ny * (n + nz) + len(pairs) * n)
    for q in range(n):
        for y in range(ny):
            f.clauses.append(tuple(dec.lit_trans(q, y, q2) for q2 in range(n)))
    for q in range(n):
        for y in range(ny):
            f.clauses.append(tuple(dec.lit_out(q, y, z) for z in range(nz)))
            for z1 in range(nz):
                for z2 in range(z1 + 1, nz):
                    f.clauses.append(
                        (-dec.lit_out(q, y, z1), -dec.lit_out(q, y, z2))
                    )
    f.clauses.append((dec.lit_pair(0, 0),))
    for p, (sh, st) in enumerate(pairs):
        for x in range(nx):
            nh, y = h.step(sh, x)
            nt, z = t.step(st, y)
            p2 = order[(nh, nt)]
            for q in range(n):
                neg_pair = -dec.lit_pair(p, q)
                f.clauses.append((neg_pair, dec.lit_out(q, y, z)))
                for q2 in range(n):
                    f.clauses.append(
                        (neg_pair, -dec.lit_trans(q, y, q2), dec.lit_pair(p2, q2))
                    )
    return f, dec


def minimize_tail_naive_result(
    h: MealyMachine,
    t: MealyMachine,
    *,
    budget: Optional[float] = None,
    solver: Optional[str] = None,
    emit_cnf_dir: Optional[str] = None,
) -> MinimizationResult:
    """Minimum-state replacement tail by the direct encoding, sizes 1 upward."""
    deadline = None if budget is None else time.monotonic() + budget
    sat_calls = 0
    for n in range(1, len(t.states) + 1):
        if deadline is not None and time.monotonic() > deadline:
            raise MinimizationTimeout(n, sat_calls)
        f, dec = encode_replacement_naive(h, t, n)
        _emit(emit_cnf_dir, f"naive_n{n}.cnf", f)
        remaining = None if deadline is None else deadline - time.monotonic()
        sat_calls += 1
        outcome = solve(f, remaining, solver)
        if outcome.status == TIMEOUT:
            raise MinimizationTimeout(n, sat_calls)
        if outcome.status == SAT:
            return MinimizationResult(dec.decode(outcome.model), sat_calls, False, n)
    raise MachineError("unreachable: the tail itself is always a model")


def minimize_tail_naive(h: MealyMachine, t: MealyMachine, **kwargs) -> MealyMachine:
    """Minimum-state replacement tail by the direct encoding."""
    return minimize_tail_naive_result(h, t, **kwargs).machine


def verify_replacement(h: MealyMachine, t: MealyMachine, candidate: MealyMachine) -> Verdict:
    """Whether swapping the tail preserves the cascade's behavior.

    A negative verdict carries a shortest head input word on which the two
    cascades differ.
    """
    return equivalent(compose_cascade(h, t), compose_cascade(h, candidate))
