"""Trichotomy classifier for k-automatic sets and its structural helpers."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from . import automaton as am
from .automaton import Automaton
from .basek import BaseKSet, canonical_expansion, eval_msd, member
from .ffunc import CASE_I, CASE_II, CASE_III, state_case
from .logic.compile import is_eventually_periodic

DEFAULT_BOUND = 24


class Verdict(str, Enum):
    PRESBURGER = "PRESBURGER"
    KN_INTERDEFINABLE = "KN_INTERDEFINABLE"
    DEFINES_VK = "DEFINES_VK"


class DichotomyError(ValueError):
    pass


@dataclass(frozen=True)
class CongruenceWitness:
    m: int
    ell: int
    S: frozenset          # pairs (value mod m, length mod ell)
    zero_start: bool      # whether words may begin with digit 0

    def to_json(self):
        return {"m": self.m, "ell": self.ell, "S": sorted(map(list, self.S)),
                "zero_start": self.zero_start}


@dataclass
class SccRecord:
    states: tuple
    leaf: bool
    complete: bool
    sparse: bool
    congruence: CongruenceWitness | None = None
    exhausted: bool = False           # congruence search ran out of bound

    def to_json(self):
        return {"states": list(self.states), "leaf": self.leaf, "complete": self.complete,
                "sparse": self.sparse,
                "congruence": self.congruence.to_json() if self.congruence else None,
                "exhausted": self.exhausted}


@dataclass
class ClassificationReport:
    verdict: Verdict
    periodicity_witness: tuple | None = None
    scc_evidence: list = field(default_factory=list)
    failing_state: int | None = None
    bound_limited: bool = False
    bound: int = DEFAULT_BOUND

    def __post_init__(self):
        assert (self.verdict == Verdict.PRESBURGER) == (self.periodicity_witness is not None)
        assert (self.verdict == Verdict.DEFINES_VK) == (self.failing_state is not None)

    @property
    def exit_code(self) -> int:
        if self.bound_limited:
            return 3
        return {Verdict.PRESBURGER: 0, Verdict.KN_INTERDEFINABLE: 1, Verdict.DEFINES_VK: 2}[self.verdict]

    def to_json(self):
        return {"verdict": self.verdict.value,
                "periodicity_witness": list(self.periodicity_witness) if self.periodicity_witness else None,
                "scc_evidence": [r.to_json() for r in self.scc_evidence],
                "failing_state": self.failing_state,
                "bound_limited": self.bound_limited, "bound": self.bound}



def classify_state_case(X, p: int) -> str:
    a = X.automaton if isinstance(X, BaseKSet) else X
    if not 0 <= p < a.n_states:
        raise DichotomyError(f"invalid state {p}")
    return state_case(a, p)


def is_complete_scc(a, comp) -> tuple[bool, tuple | None]:
    """Whether every state of ``comp`` has an in-component move on every digit."""
    a = a.automaton if isinstance(a, BaseKSet) else a
    comp = frozenset(comp)
    for q in sorted(comp):
        for d in range(a.alphabet_size):
            if not a.succ(q, d) & comp:
                return False, (q, d)
    return True, None


def build_sigma_lmc(ell: int, m: int, c: int, k: int) -> Automaton:
    """No-leading-zero words of length divisible by ell with value = -c (mod m)."""
    if ell <= 0 or m <= 0:
        return am.empty_automaton(k)
    # state 0 is the start; (v, t) lives at 1 + v*ell + t
    def sid(v, t):
        return 1 + v * ell + t
    trans = []
    for d in range(1, k):
        trans.append((0, d, sid(d % m, 1 % ell)))
    for v in range(m):
        for t in range(ell):
            for d in range(k):
                trans.append((sid(v, t), d, sid((v * k + d) % m, (t + 1) % ell)))
    target = (-c) % m
    finals = [sid(target, 0)]
    if c % m == 0:
        finals.append(0)
    return am.minimize(Automaton.build(k, 1 + m * ell, [0], finals, trans))


def _cycle_dfa(cycle: Automaton) -> Automaton:
    return am.complete(am.minimize(cycle))


def congruence_automaton(w: CongruenceWitness, k: int) -> Automaton:
    m, ell = w.m, w.ell
    def sid(v, t):
        return 1 + v * ell + t
    trans = []
    for d in range(k):
        if d or w.zero_start:
            trans.append((0, d, sid(d % m, 1 % ell)))
    for v in range(m):
        for t in range(ell):
            for d in range(k):
                trans.append((sid(v, t), d, sid((v * k + d) % m, (t + 1) % ell)))
    finals = [sid(v, t) for v, t in w.S]
    if (0, 0) in w.S:
        finals.append(0)
    return Automaton.build(k, 1 + m * ell, [0], finals, trans)


def congruence_test(cycle: Automaton, m: int, ell: int, _dfa: Automaton | None = None) -> CongruenceWitness | None:
    """Witness that the language is cut out by (value mod m, length mod ell), or None."""
    if m < 1 or ell < 1:
        raise ValueError("m and ell must be positive")
    d = _dfa or _cycle_dfa(cycle)
    k = d.radix
    (q0,) = d.initial
    zero_start = _zero_live(d)
    # product over (L-state, value mod m, length mod ell, started?)
    nxt = [[d.target(q, s) for s in range(k)] for q in range(d.n_states)]
    start = (q0, 0, 0, False)
    seen = {start}
    queue = deque([start])
    while queue:
        q, v, t, st = queue.popleft()
        for s in range(k):
            if not st and s == 0 and not zero_start:
                continue
            nstate = (nxt[q][s], (v * k + s) % m, (t + 1) % ell, True)
            if nstate not in seen:
                seen.add(nstate)
                queue.append(nstate)
    S = {(v, t) for q, v, t, _ in seen if q in d.finals}
    for q, v, t, _ in seen:
        if (q in d.finals) != ((v, t) in S):
            return None
    return CongruenceWitness(m, ell, frozenset(S), zero_start)


def _zero_live(d: Automaton) -> bool:
    """Does some accepted word begin with digit 0?"""
    (q0,) = d.initial
    t = d.target(q0, 0)
    if t is None:
        return False
    return bool(am.reachable(d, [t]) & d.finals)


def find_congruence(cycle: Automaton, bound: int = DEFAULT_BOUND) -> CongruenceWitness | None:
    d = _cycle_dfa(cycle)
    pairs = sorted(((m, ell) for m in range(1, bound + 1) for ell in range(1, bound + 1)),
                   key=lambda p: (p[0] * p[1], p[0]))
    for m, ell in pairs:
        w = congruence_test(cycle, m, ell, _dfa=d)
        if w is not None:
            return w
    return None


def _scc_cycle(d: Automaton, q: int) -> Automaton:
    return d.with_ends([q], [q])


def is_kn_definable(X: BaseKSet, bound: int = DEFAULT_BOUND, all_states: bool = False):
    """Decide definability in (N, +, k^N); returns ``(ok, evidence)``.

    Evidence holds the per-component records, the failing state if any and a
    flag telling whether a negative answer rests on the congruence bound.
    """
    d = X.value_dfa
    scc = am.scc_decompose(d)
    records = []
    failing = None
    limited = False
    for ci, comp in enumerate(scc.components):
        leaf = scc.leaf_flags[ci]
        complete, _ = is_complete_scc(d, comp)
        if not am.has_cycle_within(d, comp):
            records.append(SccRecord(tuple(sorted(comp)), leaf, complete, True))
            continue
        probe = sorted(comp) if all_states else [min(comp)]
        sparse = all(am.is_sparse(_scc_cycle(d, q)) for q in probe)
        rec = SccRecord(tuple(sorted(comp)), leaf, complete, sparse)
        records.append(rec)
        if sparse:
            continue
        if not leaf:
            if failing is None:
                failing = probe[0]
            continue
        w = find_congruence(_scc_cycle(d, probe[0]), bound)
        if w is None:
            rec.exhausted = True
            if failing is None:
                failing = probe[0]
                limited = True
            continue
        rec.congruence = w
        if all_states:
            for q in probe[1:]:
                if find_congruence(_scc_cycle(d, q), bound) is None:
                    raise AssertionError(f"state {q} disagrees with its component")
    # a failure in a non-leaf component is exact even if a leaf also exhausted
    if failing is not None and any(not r.sparse and not r.leaf for r in records):
        limited = False
    return failing is None, {"records": records, "failing_state": failing, "bound_limited": limited}


def classify(X: BaseKSet, bound: int = DEFAULT_BOUND) -> ClassificationReport:
    periodic, wit = is_eventually_periodic(X)
    ok, ev = is_kn_definable(X, bound)
    if periodic:
        return ClassificationReport(Verdict.PRESBURGER, wit, ev["records"], bound=bound)
    if ok:
        return ClassificationReport(Verdict.KN_INTERDEFINABLE, None, ev["records"], bound=bound)
    return ClassificationReport(Verdict.DEFINES_VK, None, ev["records"], ev["failing_state"],
                                ev["bound_limited"], bound)


# -- decomposition along condensation paths -----------------------------------

@dataclass
class Link:
    entry: int
    exit: int
    language: Automaton          # runs entry -> exit inside one component
    digit: int | None            # connecting digit to the next link; None on the tail
    sparse: bool


@dataclass
class SemenovDecomposition:
    branches: list               # list of lists of Link
    equivalent: bool

    def branch_automaton(self, branch: Sequence[Link]) -> Automaton:
        out = None
        for link in branch:
            part = link.language
            if link.digit is not None:
                part = am.concat(part, am.word_automaton((link.digit,), part.radix))
            out = part if out is None else am.concat(out, part)
        return out

    def union_automaton(self, k: int) -> Automaton:
        if not self.branches:
            return am.empty_automaton(k)
        return am.union_nfa([self.branch_automaton(b) for b in self.branches])

    def to_json(self):
        return {"equivalent": self.equivalent,
                "branches": [[{"entry": l.entry, "exit": l.exit, "digit": l.digit, "sparse": l.sparse}
                              for l in b] for b in self.branches]}


def semenov_decompose(X: BaseKSet, bound: int = DEFAULT_BOUND, max_branches: int = 10_000) -> SemenovDecomposition:
    ok, ev = is_kn_definable(X, bound)
    if not ok:
        raise DichotomyError("the set is not definable from powers of k")
    d = X.value_dfa
    k = d.radix
    scc = am.scc_decompose(d)
    (q0,) = d.initial
    lang_cache = {}

    def inside(p, q):
        key = (p, q)
        if key not in lang_cache:
            comp = scc.components[scc.component_of[p]]
            sub, remap = am.restrict(d, comp)
            lang_cache[key] = am.trim(sub.with_ends([remap[p]], [remap[q]]))
        return lang_cache[key]

    branches = []

    def walk(p, chain):
        if len(branches) > max_branches:
            raise DichotomyError("too many branches")
        comp = scc.components[scc.component_of[p]]
        for q in sorted(comp):
            lang = inside(p, q)
            if am.is_empty(lang):
                continue
            sparse = am.is_sparse(lang)
            if q in d.finals:
                branches.append(chain + [Link(p, q, lang, None, sparse)])
            for s in range(k):
                t = d.target(q, s)
                if t is not None and scc.component_of[t] != scc.component_of[q]:
                    walk(t, chain + [Link(p, q, lang, s, sparse)])

    walk(q0, [])
    dec = SemenovDecomposition(branches, False)
    for b in branches:
        for link in b[:-1]:
            if not link.sparse:
                raise AssertionError("non-final link is not sparse")
    dec.equivalent = am.equivalent(am.minimize(dec.union_automaton(k)), d)
    return dec


# -- cycle membership through separating words --------------------------------

def separating_words(d: Automaton) -> list[tuple]:
    """Words whose acceptance vector tells apart every pair of states of a complete DFA."""
    n = d.n_states
    words = [()]
    for p in range(n):
        for q in range(p + 1, n):
            w = _separator(d, p, q)
            if w is None:
                raise DichotomyError(f"states {p} and {q} are equivalent")
            if not _separated(d, p, q, words):
                words.append(w)
    return words


def _separated(d, p, q, words):
    return any((d.run(w, {p}) & d.finals != frozenset()) != (d.run(w, {q}) & d.finals != frozenset())
               for w in words)


def _separator(d, p, q):
    k = d.alphabet_size
    prev = {(p, q): None}
    queue = deque([(p, q)])
    while queue:
        x, y = queue.popleft()
        if (x in d.finals) != (y in d.finals):
            out = []
            node = (x, y)
            while prev[node] is not None:
                node, s = prev[node]
                out.append(s)
            return tuple(reversed(out))
        for s in range(k):
            nxt = (d.target(x, s), d.target(y, s))
            if nxt not in prev:
                prev[nxt] = ((x, y), s)
                queue.append(nxt)
    return None


class CycleMembershipFormula:
    """Membership in the cycle-language set of a state, phrased through X alone.

    For a state q of the complete minimal value automaton with access word u,
    n lies in the cycle set of q iff for some i below the state count the
    numbers [u 0^i w n-expansion ...] land in X exactly as q's acceptance
    vector on the separating words predicts.
    """

    def __init__(self, X: BaseKSet, check_hypothesis: bool = True):
        if check_hypothesis and is_eventually_periodic(X)[0]:
            raise DichotomyError("the set is eventually periodic")
        self.X = X
        self.d = am.complete(X.value_dfa)
        self.k = X.radix
        self.words = separating_words(self.d)
        self.access = self._access_words()
        self.p = self.d.n_states

    def _access_words(self):
        d = self.d
        (q0,) = d.initial
        acc = {q0: ()}
        queue = deque([q0])
        while queue:
            q = queue.popleft()
            for s in range(d.alphabet_size):
                t = d.target(q, s)
                if t not in acc:
                    acc[t] = acc[q] + (s,)
                    queue.append(t)
        return acc

    def vector(self, q):
        return tuple(bool(self.d.run(w, {q}) & self.d.finals) for w in self.words)

    def check(self, q: int, n: int) -> bool:
        if q not in self.access:
            raise DichotomyError(f"state {q} is unreachable")
        k = self.k
        u = eval_msd(self.access[q], k)
        target = self.vector(q)
        length = len(canonical_expansion(n, k))
        for i in range(self.p):
            ell = k ** (length + i)        # ell > n and ell <= k^(i+1) n
            ok = True
            for w, want in zip(self.words, target):
                kw = k ** len(w)
                if member(self.X, u * ell * kw + n * kw + eval_msd(w, k)) != want:
                    ok = False
                    break
            if ok:
                return True
        return False

    def direct(self, q: int, n: int) -> bool:
        return member(BaseKSet(am.path_language(self.d, q, q)), n)


def cycle_membership_formula_check(X: BaseKSet, q: int, n: int) -> bool:
    return CycleMembershipFormula(X).check(q, n)


__all__ = ["Verdict", "ClassificationReport", "CongruenceWitness", "SccRecord", "SemenovDecomposition",
           "Link", "classify", "classify_state_case", "is_complete_scc", "build_sigma_lmc",
           "congruence_test", "find_congruence", "is_kn_definable", "semenov_decompose",
           "CycleMembershipFormula", "cycle_membership_formula_check", "separating_words",
           "DichotomyError", "CASE_I", "CASE_II", "CASE_III"]
