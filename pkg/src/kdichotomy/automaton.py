"""Finite automata over digit alphabets.

An automaton reads words over ``d``-tuples of base-``k`` digits.  Symbols are
packed into a single int (first track most significant), so a one-track
automaton reads plain digits.  Words are tuples of packed symbols.

Automata are immutable; every operation returns a fresh object.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Sequence

Word = tuple


class AutomatonError(ValueError):
    pass


class StateLimitExceeded(RuntimeError):
    pass


def pack(digits: Sequence[int], radix: int) -> int:
    sym = 0
    for d in digits:
        sym = sym * radix + d
    return sym


def unpack(sym: int, radix: int, tracks: int) -> tuple[int, ...]:
    out = []
    for _ in range(tracks):
        sym, d = divmod(sym, radix)
        out.append(d)
    return tuple(reversed(out))


@dataclass(frozen=True, eq=False)
class Automaton:
    radix: int
    tracks: int
    n_states: int
    initial: frozenset
    finals: frozenset
    delta: tuple  # per state: dict symbol -> frozenset of targets
    deterministic: bool = field(init=False)

    def __post_init__(self):
        if self.radix < 2:
            raise AutomatonError(f"radix must be >= 2, got {self.radix}")
        if self.tracks < 1:
            raise AutomatonError(f"tracks must be >= 1, got {self.tracks}")
        if len(self.delta) != self.n_states:
            raise AutomatonError("transition table size does not match state count")
        nsym = self.radix ** self.tracks
        for q in (*self.initial, *self.finals):
            if not 0 <= q < self.n_states:
                raise AutomatonError(f"state {q} out of range")
        det = len(self.initial) == 1
        for row in self.delta:
            for sym, targets in row.items():
                if not 0 <= sym < nsym:
                    raise AutomatonError(f"symbol {sym} out of range for radix {self.radix}")
                for t in targets:
                    if not 0 <= t < self.n_states:
                        raise AutomatonError(f"state {t} out of range")
                if len(targets) > 1:
                    det = False
        object.__setattr__(self, "deterministic", det)

    @classmethod
    def build(cls, radix: int, n_states: int, initial: Iterable[int], finals: Iterable[int],
              transitions: Iterable[tuple[int, int, int]], tracks: int = 1) -> "Automaton":
        """Build from ``(src, symbol, dst)`` triples; symbols may be ints or digit tuples."""
        rows: list[dict[int, set]] = [dict() for _ in range(n_states)]
        for src, sym, dst in transitions:
            if isinstance(sym, tuple):
                if len(sym) != tracks or any(not 0 <= d < radix for d in sym):
                    raise AutomatonError(f"bad symbol {sym}")
                sym = pack(sym, radix)
            if not 0 <= src < n_states:
                raise AutomatonError(f"state {src} out of range")
            rows[src].setdefault(sym, set()).add(dst)
        delta = tuple({s: frozenset(t) for s, t in row.items()} for row in rows)
        return cls(radix, tracks, n_states, frozenset(initial), frozenset(finals), delta)

    @property
    def alphabet_size(self) -> int:
        return self.radix ** self.tracks

    def symbols(self) -> range:
        return range(self.alphabet_size)

    def succ(self, q: int, sym: int) -> frozenset:
        return self.delta[q].get(sym, frozenset())

    def target(self, q: int, sym: int) -> int | None:
        """Deterministic successor, or None when undefined."""
        t = self.delta[q].get(sym)
        if not t:
            return None
        (s,) = t
        return s

    def step(self, states: Iterable[int], sym: int) -> frozenset:
        out = set()
        for q in states:
            out.update(self.delta[q].get(sym, ()))
        return frozenset(out)

    def run(self, word: Iterable[int], start: Iterable[int] | None = None) -> frozenset:
        cur = self.initial if start is None else frozenset(start)
        for sym in word:
            if not cur:
                break
            cur = self.step(cur, sym)
        return cur

    def accepts(self, word: Iterable[int], start: Iterable[int] | None = None) -> bool:
        return bool(self.run(word, start) & self.finals)

    def transitions(self) -> Iterator[tuple[int, int, int]]:
        for q, row in enumerate(self.delta):
            for sym in sorted(row):
                for t in sorted(row[sym]):
                    yield q, sym, t

    def successors(self, q: int) -> set:
        out = set()
        for targets in self.delta[q].values():
            out |= targets
        return out

    def with_ends(self, initial: Iterable[int] | None = None,
                  finals: Iterable[int] | None = None) -> "Automaton":
        return Automaton(self.radix, self.tracks, self.n_states,
                         self.initial if initial is None else frozenset(initial),
                         self.finals if finals is None else frozenset(finals),
                         self.delta)

    def is_complete(self) -> bool:
        n = self.alphabet_size
        return all(len(row) == n and all(row.values()) for row in self.delta)

    def __repr__(self):
        return (f"Automaton(radix={self.radix}, tracks={self.tracks}, states={self.n_states}, "
                f"initial={sorted(self.initial)}, finals={sorted(self.finals)})")


@dataclass(frozen=True)
class SccDecomposition:
    components: list       # list of frozensets, topologically ordered (sources first)
    condensation: dict     # component index -> set of successor component indices
    leaf_flags: list
    component_of: list     # state -> component index

    def component(self, q: int) -> frozenset:
        return self.components[self.component_of[q]]


def _check_compatible(a1: Automaton, a2: Automaton):
    if a1.radix != a2.radix or a1.tracks != a2.tracks:
        raise AutomatonError(
            f"incompatible automata: radix {a1.radix}/{a2.radix}, tracks {a1.tracks}/{a2.tracks}")


def _from_rows(template: Automaton, n: int, initial, finals, rows) -> Automaton:
    delta = tuple({s: frozenset(t) for s, t in row.items() if t} for row in rows)
    return Automaton(template.radix, template.tracks, n, frozenset(initial), frozenset(finals), delta)


def empty_automaton(radix: int, tracks: int = 1) -> Automaton:
    return Automaton(radix, tracks, 1, frozenset({0}), frozenset(), ({},))


def universal_automaton(radix: int, tracks: int = 1) -> Automaton:
    row = {s: frozenset({0}) for s in range(radix ** tracks)}
    return Automaton(radix, tracks, 1, frozenset({0}), frozenset({0}), (row,))


def word_automaton(word: Sequence[int], radix: int, tracks: int = 1) -> Automaton:
    n = len(word) + 1
    return Automaton.build(radix, n, [0], [n - 1],
                           [(i, s, i + 1) for i, s in enumerate(word)], tracks)


def determinize(a: Automaton, max_states: int = 1_000_000) -> Automaton:
    """Reachable subset construction; the result is complete (the empty subset is the sink)."""
    start = a.initial
    index = {start: 0}
    order = [start]
    rows = []
    queue = deque([start])
    syms = a.symbols()
    while queue:
        cur = queue.popleft()
        row = {}
        for sym in syms:
            nxt = a.step(cur, sym)
            if nxt not in index:
                if len(index) >= max_states:
                    raise StateLimitExceeded(f"determinization exceeded {max_states} states")
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            row[sym] = {index[nxt]}
        rows.append(row)
    finals = [i for i, s in enumerate(order) if s & a.finals]
    return _from_rows(a, len(order), [0], finals, rows)


def reachable(a: Automaton, start: Iterable[int] | None = None) -> set:
    seen = set(a.initial if start is None else start)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for t in a.successors(q):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def coreachable(a: Automaton, targets: Iterable[int] | None = None) -> set:
    pred: list[set] = [set() for _ in range(a.n_states)]
    for q, _, t in a.transitions():
        pred[t].add(q)
    seen = set(a.finals if targets is None else targets)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for p in pred[q]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def restrict(a: Automaton, keep: Iterable[int]) -> tuple[Automaton, dict]:
    """Sub-automaton on ``keep`` (sorted, renumbered); returns it with the old->new map."""
    keep = sorted(set(keep))
    remap = {q: i for i, q in enumerate(keep)}
    rows = []
    for q in keep:
        row = {}
        for sym, targets in a.delta[q].items():
            t = {remap[x] for x in targets if x in remap}
            if t:
                row[sym] = t
        rows.append(row)
    return (_from_rows(a, len(keep), [remap[q] for q in a.initial if q in remap],
                       [remap[q] for q in a.finals if q in remap], rows), remap)


def trim(a: Automaton) -> Automaton:
    """Keep states that are reachable and co-reachable.  Initial states are always kept
    so that an empty language still has a start state."""
    useful = reachable(a) & coreachable(a)
    out, _ = restrict(a, useful | set(a.initial))
    return out


def complete(a: Automaton) -> Automaton:
    """Deterministic complete version (explicit sink added only when needed)."""
    if not a.deterministic:
        return determinize(a)
    if a.is_complete():
        return a
    sink = a.n_states
    rows = []
    for row in a.delta:
        rows.append({s: set(row.get(s) or {sink}) for s in a.symbols()})
    rows.append({s: {sink} for s in a.symbols()})
    return _from_rows(a, a.n_states + 1, a.initial, a.finals, rows)


def _bfs_renumber(a: Automaton) -> Automaton:
    (q0,) = a.initial
    order = [q0]
    seen = {q0}
    i = 0
    while i < len(order):
        q = order[i]
        i += 1
        row = a.delta[q]
        for sym in sorted(row):
            for t in sorted(row[sym]):
                if t not in seen:
                    seen.add(t)
                    order.append(t)
    remap = {q: j for j, q in enumerate(order)}
    rows = [{} for _ in order]
    for q in order:
        for sym, targets in a.delta[q].items():
            rows[remap[q]][sym] = {remap[t] for t in targets}
    return _from_rows(a, len(order), [0], [remap[q] for q in a.finals if q in remap], rows)


def minimize(a: Automaton) -> Automaton:
    """Minimal trim DFA (partial transition function), states numbered in BFS order."""
    d = complete(a)
    d, _ = restrict(d, reachable(d))
    n = d.n_states
    syms = list(d.symbols())
    table = [[d.target(q, s) for s in syms] for q in range(n)]
    block = [1 if q in d.finals else 0 for q in range(n)]
    nblocks = len(set(block))
    while True:
        sigs = {}
        new_block = []
        for q in range(n):
            key = (block[q], tuple(block[t] for t in table[q]))
            new_block.append(sigs.setdefault(key, len(sigs)))
        block = new_block
        if len(sigs) == nblocks:
            break
        nblocks = len(sigs)
    rows = [dict() for _ in range(nblocks)]
    for q in range(n):
        b = block[q]
        if not rows[b]:
            rows[b] = {s: {block[t]} for s, t in zip(syms, table[q])}
    (q0,) = d.initial
    finals = {block[q] for q in d.finals}
    quotient = _from_rows(d, nblocks, [block[q0]], finals, rows)
    return _bfs_renumber(trim(quotient))


def complement(a: Automaton) -> Automaton:
    d = complete(a)
    return d.with_ends(finals=set(range(d.n_states)) - d.finals)


_OPS = {
    "union": lambda x, y: x or y,
    "intersect": lambda x, y: x and y,
    "difference": lambda x, y: x and not y,
    "iff": lambda x, y: x == y,
}


def boolean_combine(a1: Automaton, a2: Automaton, op: str) -> Automaton:
    """Reachable product of the complete DFAs of ``a1`` and ``a2``."""
    _check_compatible(a1, a2)
    try:
        fn = _OPS[op]
    except KeyError:
        raise AutomatonError(f"unknown boolean op {op!r}") from None
    d1, d2 = complete(a1), complete(a2)
    (i1,), (i2,) = d1.initial, d2.initial
    index = {(i1, i2): 0}
    order = [(i1, i2)]
    rows = []
    k = 0
    while k < len(order):
        q1, q2 = order[k]
        k += 1
        row = {}
        for sym in d1.symbols():
            pair = (d1.target(q1, sym), d2.target(q2, sym))
            if pair not in index:
                index[pair] = len(order)
                order.append(pair)
            row[sym] = {index[pair]}
        rows.append(row)
    finals = [i for i, (q1, q2) in enumerate(order) if fn(q1 in d1.finals, q2 in d2.finals)]
    return _from_rows(d1, len(order), [0], finals, rows)


def union_nfa(automata: Sequence[Automaton]) -> Automaton:
    """Disjoint union without determinizing."""
    if not automata:
        raise AutomatonError("union of no automata")
    base = automata[0]
    rows, initial, finals = [], [], []
    off = 0
    for a in automata:
        _check_compatible(base, a)
        for row in a.delta:
            rows.append({s: {t + off for t in ts} for s, ts in row.items()})
        initial += [q + off for q in a.initial]
        finals += [q + off for q in a.finals]
        off += a.n_states
    return _from_rows(base, off, initial, finals, rows)


def left_quotient(a: Automaton, u: Sequence[int]) -> Automaton:
    """DFA for ``{v : uv in L(a)}`` built by adding one fresh initial state."""
    if not a.deterministic:
        a = determinize(a)
    fresh = a.n_states
    rows = [dict(row) for row in a.delta]
    after_u = a.run(u)
    new_row = {}
    for sym in a.symbols():
        t = a.step(after_u, sym)
        if t:
            new_row[sym] = set(t)
    rows.append(new_row)
    finals = set(a.finals)
    if after_u & a.finals:
        finals.add(fresh)
    return _from_rows(a, a.n_states + 1, [fresh], finals, rows)


def reverse(a: Automaton) -> Automaton:
    rows = [dict() for _ in range(a.n_states)]
    for q, sym, t in a.transitions():
        rows[t].setdefault(sym, set()).add(q)
    return _from_rows(a, a.n_states, a.finals, a.initial, rows)


def concat(a1: Automaton, a2: Automaton) -> Automaton:
    """NFA for L(a1)·L(a2): final states of a1 also take a2's initial moves."""
    _check_compatible(a1, a2)
    off = a1.n_states
    rows = [{s: set(ts) for s, ts in row.items()} for row in a1.delta]
    rows += [{s: {t + off for t in ts} for s, ts in row.items()} for row in a2.delta]
    for q in a1.finals:
        for q2 in a2.initial:
            for s, ts in a2.delta[q2].items():
                rows[q].setdefault(s, set()).update(t + off for t in ts)
    finals = {q + off for q in a2.finals}
    if a2.initial & a2.finals:
        finals |= a1.finals
    return _from_rows(a1, off + a2.n_states, a1.initial, finals, rows)


def scc_decompose(a: Automaton) -> SccDecomposition:
    """Tarjan's algorithm (iterative) over the transition digraph."""
    n = a.n_states
    succs = [sorted(a.successors(q)) for q in range(n)]
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comps = []
    counter = 0
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succs[v]):
                work[-1] = (v, i + 1)
                w = succs[v][i]
                if index[w] is None:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = set()
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp.add(w)
                        if w == v:
                            break
                    comps.append(frozenset(comp))
    comps.reverse()  # Tarjan emits sinks first
    comp_of = [0] * n
    for ci, comp in enumerate(comps):
        for q in comp:
            comp_of[q] = ci
    cond = {ci: set() for ci in range(len(comps))}
    for q in range(n):
        for t in succs[q]:
            if comp_of[t] != comp_of[q]:
                cond[comp_of[q]].add(comp_of[t])
    leaves = [not cond[ci] for ci in range(len(comps))]
    return SccDecomposition(comps, cond, leaves, comp_of)


def has_cycle_within(a: Automaton, comp: frozenset) -> bool:
    if len(comp) > 1:
        return True
    (q,) = comp
    return q in a.successors(q)


def path_language(a: Automaton, p: int, q: int) -> Automaton:
    """Trim automaton for the words labelling a run from ``p`` to ``q``."""
    if not (0 <= p < a.n_states and 0 <= q < a.n_states):
        raise AutomatonError(f"invalid state pair ({p}, {q})")
    return trim(a.with_ends([p], [q]))


def induced_subautomaton(a: Automaton, states: Iterable[int]) -> Automaton:
    """Induced subautomaton on ``states``; state ``i`` of the result is ``sorted(states)[i]``."""
    keep = set(states)
    if any(not 0 <= q < a.n_states for q in keep):
        raise AutomatonError("subset contains invalid states")
    entered = {t for q, _, t in a.transitions() if q not in keep and t in keep}
    sub, remap = restrict(a, keep)
    init = {remap[q] for q in (a.initial & keep) | entered}
    return sub.with_ends(initial=init)


def is_idempotent_word(a: Automaton, w: Sequence[int]) -> bool:
    ww = tuple(w) + tuple(w)
    return all(a.run(ww, {q}) == a.run(w, {q}) for q in range(a.n_states))


def equivalent(a1: Automaton, a2: Automaton) -> bool:
    _check_compatible(a1, a2)
    return is_empty(_symmetric_difference(a1, a2))


def _symmetric_difference(a1: Automaton, a2: Automaton) -> Automaton:
    d = boolean_combine(a1, a2, "iff")
    return d.with_ends(finals=set(range(d.n_states)) - d.finals)


def is_empty(a: Automaton) -> bool:
    return not (reachable(a) & a.finals)


def shortest_word(a: Automaton) -> Word | None:
    """Shortest accepted word, lexicographically least among the shortest."""
    d = minimize(a)
    if not d.finals:
        return None
    (q0,) = d.initial
    prev = {q0: None}
    layer = [q0]
    while layer:
        hits = [q for q in layer if q in d.finals]
        if hits:
            break
        nxt = []
        # expand in lexicographic order of the words reaching each state
        for q in layer:
            for sym in sorted(d.delta[q]):
                t = d.target(q, sym)
                if t is not None and t not in prev:
                    prev[t] = (q, sym)
                    nxt.append(t)
        layer = nxt
    q = hits[0]
    out = []
    while prev[q] is not None:
        q, sym = prev[q]
        out.append(sym)
    return tuple(reversed(out))


def is_finite_language(a: Automaton) -> bool:
    t = trim(a)
    if not (reachable(t) & t.finals):
        return True
    scc = scc_decompose(t)
    return not any(has_cycle_within(t, c) for c in scc.components)


def count_words_upto(a: Automaton, n: int) -> int:
    """Exact number of accepted words of length at most ``n``."""
    d = complete(a)
    counts = [0] * d.n_states
    (q0,) = d.initial
    counts[q0] = 1
    total = 0
    for length in range(n + 1):
        total += sum(counts[q] for q in d.finals)
        if length == n:
            break
        nxt = [0] * d.n_states
        for q, c in enumerate(counts):
            if c:
                for sym in d.symbols():
                    nxt[d.target(q, sym)] += c
        counts = nxt
    return total


def count_words_by_length(a: Automaton, n: int) -> list[int]:
    d = complete(a)
    counts = [0] * d.n_states
    (q0,) = d.initial
    counts[q0] = 1
    out = []
    for length in range(n + 1):
        out.append(sum(counts[q] for q in d.finals))
        nxt = [0] * d.n_states
        for q, c in enumerate(counts):
            if c:
                for sym in d.symbols():
                    nxt[d.target(q, sym)] += c
        counts = nxt
    return out


def is_sparse(a: Automaton) -> bool:
    """Polynomial growth test: every SCC of the trim minimal DFA is a simple cycle."""
    d = minimize(a)
    useful = coreachable(d)
    scc = scc_decompose(d)
    for q in useful:
        comp = scc.component_of[q]
        inside = sum(1 for sym, ts in d.delta[q].items()
                     for t in ts if scc.component_of[t] == comp)
        if inside > 1:
            return False
    return True


def words_upto(radix: int, n: int, tracks: int = 1) -> Iterator[Word]:
    """All words of length <= n, shortest first then lexicographic."""
    syms = range(radix ** tracks)
    for length in range(n + 1):
        yield from product(syms, repeat=length)


def block_transform(a: Automaton, i: int) -> Automaton:
    """Same states, radix ``k**i``: a new digit acts as the block of ``i`` old digits."""
    if i < 1:
        raise AutomatonError("block length must be >= 1")
    if a.tracks != 1:
        raise AutomatonError("block transform is defined for one-track automata")
    k = a.radix
    big = k ** i
    rows = []
    for q in range(a.n_states):
        row = {}
        for D in range(big):
            block = unpack(D, k, i)
            t = a.run(block, {q})
            if t:
                row[D] = set(t)
        rows.append(row)
    delta = tuple({s: frozenset(t) for s, t in row.items()} for row in rows)
    return Automaton(big, 1, a.n_states, a.initial, a.finals, delta)
