"""Compile formulas into synchronized multi-track automata.

A relation of arity d is a d-track automaton reading MSD-first, equal-length,
zero-padded tuples.  Every relation built here is padding-closed: prepending
the all-zero symbol never changes acceptance.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import count
from math import gcd
from typing import Mapping

from .. import automaton as am
from ..automaton import Automaton, pack, unpack
from ..basek import BaseKSet, canonical_expansion, eval_msd
from .formula import (Add, And, Const, Eq, Exists, FalseF, Forall, Formula, Iff,
                      Implies, In, Lt, Mul, Not, Or, PowK, Sub, TrueF, Var, check_scope,
                      free_vars, set_names)


class CompileError(ValueError):
    pass


@dataclass(frozen=True)
class Relation:
    vars: tuple                       # track order
    automaton: Automaton | None       # None for 0-ary relations
    truth: bool | None = None

    @property
    def arity(self) -> int:
        return len(self.vars)

    def contains(self, values: Mapping[str, int] | tuple) -> bool:
        if self.automaton is None:
            return bool(self.truth)
        if not isinstance(values, Mapping):
            values = dict(zip(self.vars, values))
        return self.automaton.accepts(encode([values[v] for v in self.vars], self.automaton.radix))


def encode(values, k: int) -> tuple:
    """Zero-padded MSD-first encoding of a tuple of naturals."""
    digs = []
    for v in values:
        if v < 0:
            raise ValueError("negative value")
        ds = []
        while v:
            v, d = divmod(v, k)
            ds.append(d)
        digs.append(ds[::-1])
    width = max((len(d) for d in digs), default=0)
    digs = [[0] * (width - len(d)) + d for d in digs]
    return tuple(pack(col, k) for col in zip(*digs)) if digs else ()


def decode(word, k: int, d: int) -> tuple:
    cols = [unpack(s, k, d) for s in word]
    return tuple(eval_msd([c[i] for c in cols], k) for i in range(d))


def _bool(b: bool) -> Relation:
    return Relation((), None, bool(b))


def _mk(vars_, a: Automaton) -> Relation:
    return Relation(tuple(vars_), am.minimize(a))


# -- base relations ----------------------------------------------------------

def linear_automaton(k: int, coefs: list[int], const: int, op: str = "eq") -> Automaton:
    """Tuples with ``sum(c_i x_i) == const`` (op 'eq') or ``< const`` (op 'lt')."""
    d = len(coefs)
    pos = sum(c for c in coefs if c > 0)
    neg = -sum(c for c in coefs if c < 0)
    lo, hi = -pos - abs(const), neg + abs(const)
    syms = [(s, sum(c * x for c, x in zip(coefs, unpack(s, k, d)))) for s in range(k ** d)]
    TRUE = "T"
    index = {0: 0}
    order = [0]
    trans = []
    i = 0
    while i < len(order):
        S = order[i]
        i += 1
        for s, inc in syms:
            if S == TRUE:
                nxt = TRUE
            else:
                nxt = k * S + inc
                if nxt > hi:
                    continue
                if nxt < lo:
                    if op == "eq":
                        continue
                    nxt = TRUE
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            trans.append((index[S], s, index[nxt]))
    if op == "eq":
        finals = [index[S] for S in order if S != TRUE and S == const]
    elif op == "lt":
        finals = [index[S] for S in order if S == TRUE or S < const]
    else:
        raise CompileError(f"unknown comparison {op!r}")
    return Automaton.build(k, len(order), [0], finals, trans, tracks=d)


def relation_addition(k: int) -> Relation:
    """{(x, y, z) : x + y = z} over tracks (x, y, z)."""
    return Relation(("x", "y", "z"), am.minimize(linear_automaton(k, [1, 1, -1], 0)))


def powk_automaton(k: int) -> Automaton:
    return Automaton.build(k, 2, [0], [1], [(0, 0, 0), (0, 1, 1), (1, 0, 1)])


def cylindrify(rel: Relation, target: tuple) -> Automaton:
    a = rel.automaton
    k = a.radix
    pos = [target.index(v) for v in rel.vars]
    d = len(target)
    proj = []
    for s in range(k ** d):
        digits = unpack(s, k, d)
        proj.append(pack([digits[p] for p in pos], k))
    rows = []
    for q in range(a.n_states):
        row = a.delta[q]
        new = {}
        for s, ps in enumerate(proj):
            t = row.get(ps)
            if t:
                new[s] = t
        rows.append(new)
    return Automaton(k, d, a.n_states, a.initial, a.finals, tuple(rows))


def project(rel: Relation, var: str, max_states: int = 1_000_000) -> Relation:
    if var not in rel.vars:
        return rel
    a = rel.automaton
    k = a.radix
    idx = rel.vars.index(var)
    keep = [i for i in range(rel.arity) if i != idx]
    new_vars = tuple(rel.vars[i] for i in keep)
    if not new_vars:
        return _bool(not am.is_empty(a))
    d = len(rel.vars)
    rows = []
    for q in range(a.n_states):
        new = {}
        for s, ts in a.delta[q].items():
            digits = unpack(s, k, d)
            ns = pack([digits[i] for i in keep], k)
            new.setdefault(ns, set()).update(ts)
        rows.append({s: frozenset(t) for s, t in new.items()})
    nfa = Automaton(k, len(keep), a.n_states, a.initial, a.finals, tuple(rows))
    # a witness may need more digits than the remaining tracks: absorb leading zeros
    start = set(a.initial)
    stack = list(start)
    while stack:
        q = stack.pop()
        for t in nfa.succ(q, 0):
            if t not in start:
                start.add(t)
                stack.append(t)
    nfa = nfa.with_ends(initial=start)
    return Relation(new_vars, am.minimize(am.determinize(nfa, max_states)))


# -- compiler ----------------------------------------------------------------

class Compiler:
    def __init__(self, sets: Mapping[str, BaseKSet] | None = None, k: int | None = None,
                 max_states: int = 1_000_000):
        self.sets = dict(sets or {})
        radices = {s.radix for s in self.sets.values()}
        if len(radices) > 1:
            raise CompileError(f"named sets use different radices: {sorted(radices)}")
        if k is None:
            if not radices:
                raise CompileError("radix required when no named sets are given")
            k = radices.pop()
        elif radices and radices != {k}:
            raise CompileError(f"radix {k} does not match named sets ({radices.pop()})")
        self.k = k
        self.max_states = max_states
        self._fresh = count()
        self._member_cache = {}

    def fresh(self) -> str:
        return f"%{next(self._fresh)}"

    # terms -> linear forms with side constraints
    def linearize(self, t, constraints: list) -> tuple[dict, int]:
        if isinstance(t, Var):
            return {t.name: 1}, 0
        if isinstance(t, Const):
            return {}, t.value
        if isinstance(t, Add):
            c1, k1 = self.linearize(t.left, constraints)
            c2, k2 = self.linearize(t.right, constraints)
            out = dict(c1)
            for v, c in c2.items():
                out[v] = out.get(v, 0) + c
            return out, k1 + k2
        if isinstance(t, Mul):
            c1, k1 = self.linearize(t.term, constraints)
            return {v: t.coef * c for v, c in c1.items()}, t.coef * k1
        if isinstance(t, Sub):
            c1, k1 = self.linearize(t.left, constraints)
            c2, k2 = self.linearize(t.right, constraints)
            s = self.fresh()
            # s + right - left = 0, with s a natural number
            lin = {s: 1}
            for v, c in c2.items():
                lin[v] = lin.get(v, 0) + c
            for v, c in c1.items():
                lin[v] = lin.get(v, 0) - c
            constraints.append((s, lin, k1 - k2))
            return {s: 1}, 0
        raise CompileError(f"not a term: {t!r}")

    def _linear_relation(self, lin: dict, const: int, op: str) -> Relation:
        lin = {v: c for v, c in lin.items() if c}
        if not lin:
            return _bool(0 == const if op == "eq" else 0 < const)
        vars_ = tuple(sorted(lin))
        return _mk(vars_, linear_automaton(self.k, [lin[v] for v in vars_], const, op))

    def _with_constraints(self, rel: Relation, constraints: list) -> Relation:
        for _, lin, const in constraints:
            rel = self.conj(rel, self._linear_relation(lin, const, "eq"))
        for s, _, _ in constraints:
            rel = project(rel, s, self.max_states)
        return rel

    def _unary(self, t, make) -> Relation:
        constraints = []
        if isinstance(t, Var):
            return make(t.name)
        u = self.fresh()
        lin, const = self.linearize(t, constraints)
        lin = {v: -c for v, c in lin.items()}
        lin[u] = lin.get(u, 0) + 1
        constraints.append((u, lin, const))
        return self._with_constraints(make(u), constraints)

    def _member(self, name: str):
        if name not in self.sets:
            raise CompileError(f"unknown set {name!r}")
        if name not in self._member_cache:
            self._member_cache[name] = self.sets[name].value_dfa
        return lambda v: Relation((v,), self._member_cache[name])

    def conj(self, r1: Relation, r2: Relation) -> Relation:
        return self._combine(r1, r2, "intersect")

    def _combine(self, r1: Relation, r2: Relation, op: str) -> Relation:
        if r1.automaton is None or r2.automaton is None:
            if r1.automaton is None and r2.automaton is None:
                return _bool({"intersect": r1.truth and r2.truth, "union": r1.truth or r2.truth,
                              "iff": r1.truth == r2.truth}[op])
            b, r = (r1, r2) if r1.automaton is None else (r2, r1)
            if op == "intersect":
                return r if b.truth else _bool(False)
            if op == "union":
                return _bool(True) if b.truth else r
            if op == "iff":
                return r if b.truth else self.negate(r)
        target = tuple(sorted(set(r1.vars) | set(r2.vars)))
        a1 = cylindrify(r1, target) if r1.vars != target else r1.automaton
        a2 = cylindrify(r2, target) if r2.vars != target else r2.automaton
        return _mk(target, am.boolean_combine(a1, a2, op))

    def negate(self, r: Relation) -> Relation:
        if r.automaton is None:
            return _bool(not r.truth)
        return _mk(r.vars, am.complement(r.automaton))

    def compile(self, f: Formula) -> Relation:
        if isinstance(f, TrueF):
            return _bool(True)
        if isinstance(f, FalseF):
            return _bool(False)
        if isinstance(f, (Eq, Lt)):
            constraints = []
            c1, k1 = self.linearize(f.left, constraints)
            c2, k2 = self.linearize(f.right, constraints)
            lin = dict(c1)
            for v, c in c2.items():
                lin[v] = lin.get(v, 0) - c
            rel = self._linear_relation(lin, k2 - k1, "eq" if isinstance(f, Eq) else "lt")
            return self._with_constraints(rel, constraints)
        if isinstance(f, In):
            return self._unary(f.term, self._member(f.set_name))
        if isinstance(f, PowK):
            return self._unary(f.term, lambda v: Relation((v,), powk_automaton(self.k)))
        if isinstance(f, Not):
            return self.negate(self.compile(f.body))
        if isinstance(f, (And, Or)):
            op = "intersect" if isinstance(f, And) else "union"
            rels = [self.compile(p) for p in f.parts]
            out = rels[0]
            for r in rels[1:]:
                out = self._combine(out, r, op)
            return out
        if isinstance(f, Implies):
            return self._combine(self.negate(self.compile(f.left)), self.compile(f.right), "union")
        if isinstance(f, Iff):
            return self._combine(self.compile(f.left), self.compile(f.right), "iff")
        if isinstance(f, Exists):
            return project(self.compile(f.body), f.var, self.max_states)
        if isinstance(f, Forall):
            return self.negate(project(self.negate(self.compile(f.body)), f.var, self.max_states))
        raise CompileError(f"not a formula: {f!r}")


def compile_formula(f: Formula, sets: Mapping[str, BaseKSet] | None = None, k: int | None = None,
                    max_states: int = 1_000_000) -> Relation:
    """Relation over the free variables of ``f`` (tracks in sorted name order)."""
    check_scope(f)
    missing = set_names(f) - set(sets or {})
    if missing:
        raise CompileError(f"unbound set names: {sorted(missing)}")
    c = Compiler(sets, k, max_states)
    rel = c.compile(f)
    fv = tuple(sorted(free_vars(f)))
    if rel.automaton is None:
        if not fv:
            return rel
        # a constant relation over the free variables
        base = am.universal_automaton(c.k, len(fv)) if rel.truth else am.empty_automaton(c.k, len(fv))
        return Relation(fv, base)
    if rel.vars != fv:
        rel = Relation(fv, am.minimize(cylindrify(rel, fv)))
    return rel


def decide_sentence(f: Formula, sets: Mapping[str, BaseKSet] | None = None, k: int | None = None,
                    max_states: int = 1_000_000) -> tuple[bool, dict | None]:
    """Truth value of a closed formula; when it starts with an existential block,
    also the witness with the shortest, then lexicographically least, encoding."""
    if free_vars(f):
        raise CompileError(f"sentence has free variables: {sorted(free_vars(f))}")
    block = []
    body = f
    while isinstance(body, Exists):
        block.append(body.var)
        body = body.body
    if not block:
        rel = compile_formula(f, sets, k, max_states)
        return bool(rel.truth), None
    rel = compile_formula(body, sets, k, max_states)
    if rel.automaton is None:
        return bool(rel.truth), ({v: 0 for v in block} if rel.truth else None)
    w = am.shortest_word(rel.automaton)
    if w is None:
        return False, None
    vals = dict(zip(rel.vars, decode(w, rel.automaton.radix, rel.arity)))
    return True, {v: vals.get(v, 0) for v in block}


def periodicity_sentence() -> Formula:
    n, p, N = Var("n"), Var("p"), Var("N")
    return Exists("p", Exists("N", And((
        Lt(Const(0), p),
        Forall("n", Implies(Not(Lt(n, N)), Iff(In(n, "X"), In(Add(n, p), "X"))))))))


def is_eventually_periodic_formula(X: BaseKSet, max_states: int = 1_000_000) -> tuple[bool, tuple | None]:
    """Periodicity through the full sentence; exact but the projection of n can blow up."""
    ok, wit = decide_sentence(periodicity_sentence(), {"X": X}, max_states=max_states)
    if not ok:
        return False, None
    return True, (wit["p"], wit["N"])


def bad_relation(X: BaseKSet) -> Relation:
    """Pairs (n, p) with exactly one of n, n + p in X."""
    n, p = Var("n"), Var("p")
    return compile_formula(Not(Iff(In(n, "X"), In(Add(n, p), "X"))), {"X": X})


def _unbounded_periods(bad: Relation) -> Automaton:
    """NFA over the p track accepting the p whose bad set is infinite.

    For fixed p the n values come from padded words whose p track reads 0^j [p];
    infinitely many n exist iff a run can loop inside the zero prefix of the
    p track after n has begun.
    """
    a = bad.automaton
    k = a.radix
    ni, pi = bad.vars.index("n"), bad.vars.index("p")
    zero_p = [s for s in range(k * k) if unpack(s, k, 2)[pi] == 0]
    (q0,) = a.initial
    # states (q, started) reachable with the p track at 0
    start = (q0, False)
    seen = {start}
    stack = [start]
    edges = {}
    while stack:
        q, st = stack.pop()
        out = []
        for s in zero_p:
            t = a.target(q, s)
            if t is None:
                continue
            node = (t, st or unpack(s, k, 2)[ni] != 0)
            out.append(node)
            if node not in seen:
                seen.add(node)
                stack.append(node)
        edges[(q, st)] = out
    # started states on a zero-p cycle
    sub = [v for v in seen if v[1]]
    index = {v: i for i, v in enumerate(sub)}
    g = Automaton.build(2, max(1, len(sub)), [0], [],
                        [(index[v], 0, index[w]) for v in sub for w in edges[v] if w in index])
    scc = am.scc_decompose(g)
    pump = set()
    if sub:
        for comp in scc.components:
            if am.has_cycle_within(g, comp):
                pump |= {sub[i][0] for i in comp}
    begin = set(pump)
    stack = list(pump)
    while stack:
        q = stack.pop()
        for s in zero_p:
            t = a.target(q, s)
            if t is not None and t not in begin:
                begin.add(t)
                stack.append(t)
    if not begin:
        return am.empty_automaton(k)
    rows = []
    for q in range(a.n_states):
        row = {}
        for s, ts in a.delta[q].items():
            row.setdefault(unpack(s, k, 2)[pi], set()).update(ts)
        rows.append({s: frozenset(t) for s, t in row.items()})
    return Automaton(k, 1, a.n_states, frozenset(begin), a.finals, tuple(rows))


def _bad_for_period(bad: Relation, p: int) -> Automaton:
    """Minimal DFA over the n track for {n : (n, p) in the relation}."""
    a = bad.automaton
    k = a.radix
    ni, pi = bad.vars.index("n"), bad.vars.index("p")
    pw = canonical_expansion(p, k)
    m = len(pw)
    (q0,) = a.initial
    # NFA state (b, phase): phase 0 is the zero padding of the p track
    index = {}

    def sid(node):
        if node not in index:
            index[node] = len(index)
        return index[node]

    trans = []
    stack = [(q0, 0)]
    sid((q0, 0))
    while stack:
        b, ph = stack.pop()
        for d in range(k):
            moves = []
            if ph == 0:
                moves.append((_pair(k, ni, pi, d, 0), 0))
            if ph < m:
                moves.append((_pair(k, ni, pi, d, pw[ph]), ph + 1))
            for sym, nph in moves:
                t = a.target(b, sym)
                if t is None:
                    continue
                node = (t, nph)
                fresh = node not in index
                trans.append((sid((b, ph)), d, sid(node)))
                if fresh:
                    stack.append(node)
    finals = [i for (b, ph), i in index.items() if ph == m and b in a.finals]
    nfa = Automaton.build(k, len(index), [0], finals, trans)
    return am.minimize(am.determinize(nfa))


def _max_value(d: Automaton) -> int | None:
    """Largest value of a padding-closed language with finitely many values."""
    if not d.finals:
        return None
    k = d.radix
    (q0,) = d.initial
    zeros = {q0}
    stack = [q0]
    while stack:
        q = stack.pop()
        t = d.target(q, 0)
        if t is not None and t not in zeros:
            zeros.add(t)
            stack.append(t)
    # (length, value) of the longest, then largest, accepted suffix from each
    # state reachable after a nonzero digit; that part must be acyclic
    memo = {}
    onpath = set()
    for root in range(d.n_states):
        if root in memo:
            continue
        work = [(root, iter(range(k)))]
        onpath.add(root)
        while work:
            q, it = work[-1]
            pushed = False
            for digit in it:
                t = d.target(q, digit)
                if t is None or t in memo:
                    continue
                if t in onpath:
                    if t not in zeros or q not in zeros:
                        raise ValueError("infinitely many values")
                    continue
                onpath.add(t)
                work.append((t, iter(range(k))))
                pushed = True
                break
            if pushed:
                continue
            work.pop()
            onpath.discard(q)
            out = (0, 0) if q in d.finals else None
            for digit in range(k):
                t = d.target(q, digit)
                sub = memo.get(t) if t is not None else None
                if sub is None:
                    continue
                cand = (sub[0] + 1, digit * k ** sub[0] + sub[1])
                if out is None or cand > out:
                    out = cand
            memo[q] = out

    def best(q):
        return memo[q]

    top = 0 if zeros & d.finals else None
    for q in zeros:
        for digit in range(1, k):
            t = d.target(q, digit)
            if t is None:
                continue
            sub = best(t)
            if sub is not None:
                v = digit * k ** sub[0] + sub[1]
                top = v if top is None else max(top, v)
    return top



def _max_bad(bad: Relation, p: int) -> int | None:
    """Largest n with (n, p) in the relation, given that there are finitely many."""
    return _max_value(_bad_for_period(bad, p))


def _pair(k, ni, pi, dn, dp):
    digits = [0, 0]
    digits[ni], digits[pi] = dn, dp
    return pack(digits, k)


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def is_eventually_periodic(X: BaseKSet) -> tuple[bool, tuple | None]:
    """Decide whether X is eventually periodic; on success return the least
    period p and the least threshold N for it.

    With n states in the value automaton, the part of the least period prime
    to k is at most n, so if X is eventually periodic then lcm(1..n) k^e is a
    period for all large e.  The candidates lcm(1..n) k^e form the single
    word family [lcm] 0^e, along which the period automaton is simulated until
    its state set repeats.  The least period is then found by dividing out primes.
    """
    k = X.radix
    bad = bad_relation(X)
    if bad.automaton is None or "n" not in bad.vars or "p" not in bad.vars:
        # no dependence on one of the variables: X is empty, everything, or
        # differs from its shifts for every p
        rel = bad.automaton
        if rel is None:
            return (False, None) if bad.truth else (True, (1, 0))
        return (True, (1, 0)) if am.is_empty(rel) else (False, None)
    inf = _unbounded_periods(bad)
    n = X.value_dfa.n_states
    L = 1
    for q in range(2, n + 1):
        L = L * q // gcd(L, q)
    S = inf.run(canonical_expansion(L, k))
    seen = set()
    e = 0
    while S & inf.finals:
        if S in seen:
            return False, None
        seen.add(S)
        S = inf.step(S, 0)
        e += 1
    P = L * k ** e

    def is_period(d):
        return not inf.accepts(canonical_expansion(d, k))

    for q in _prime_factors(P):
        while P % q == 0 and is_period(P // q):
            P //= q
    top = _max_bad(bad, P)
    return True, (P, 0 if top is None else top + 1)


def relation_values(rel: Relation, bound: int) -> list[tuple]:
    """All tuples in the relation with every coordinate <= bound (small arities only)."""
    from itertools import product
    return [t for t in product(range(bound + 1), repeat=rel.arity) if rel.contains(t)]
