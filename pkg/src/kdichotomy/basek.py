"""Automata as subsets of the naturals through MSD-first base-k expansions."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from . import automaton as am
from .automaton import Automaton, AutomatonError


class NormalizationError(ValueError):
    pass


def eval_msd(word: Sequence[int], k: int) -> int:
    n = 0
    for d in word:
        if not 0 <= d < k:
            raise ValueError(f"digit {d} out of range for radix {k}")
        n = n * k + d
    return n


def canonical_expansion(n: int, k: int) -> tuple[int, ...]:
    """Digits of ``n`` without leading zeros; ``0`` maps to the empty word."""
    if n < 0:
        raise ValueError("negative numbers have no expansion")
    out = []
    while n:
        n, d = divmod(n, k)
        out.append(d)
    return tuple(reversed(out))


def pad_expansion(n: int, k: int, length: int) -> tuple[int, ...]:
    w = canonical_expansion(n, k)
    if len(w) > length:
        raise ValueError(f"{n} needs more than {length} digits in base {k}")
    return (0,) * (length - len(w)) + w


def word_str(w: Sequence[int]) -> str:
    if all(d < 10 for d in w):
        return "".join(map(str, w))
    return ".".join(map(str, w))


def parse_word(s: str) -> tuple[int, ...]:
    if "." in s:
        return tuple(int(x) for x in s.split("."))
    return tuple(int(c) for c in s)


def zero_closure_of(a: Automaton, start: Iterable[int]) -> frozenset:
    cur = set(start)
    stack = list(cur)
    while stack:
        q = stack.pop()
        for t in a.succ(q, 0):
            if t not in cur:
                cur.add(t)
                stack.append(t)
    return frozenset(cur)


@dataclass(frozen=True, eq=False)
class BaseKSet:
    automaton: Automaton
    zero_closure: frozenset = field(init=False)

    def __post_init__(self):
        if self.automaton.tracks != 1:
            raise AutomatonError("a base-k set needs a one-track automaton")
        object.__setattr__(self, "zero_closure",
                           zero_closure_of(self.automaton, self.automaton.initial))

    @property
    def radix(self) -> int:
        return self.automaton.radix

    def __contains__(self, n: int) -> bool:
        return member(self, n)

    @cached_property
    def value_dfa(self) -> Automaton:
        """Minimal DFA accepting every word (leading zeros allowed) whose value lies in the set."""
        return am.minimize(padded_nfa(self))

    def __repr__(self):
        return f"BaseKSet(k={self.radix}, {self.automaton!r})"


def padded_nfa(X: BaseKSet) -> Automaton:
    """NFA for ``{w : [w]_k in X}``; a fresh start state absorbs leading zeros.

    Existing states keep their indices; the fresh state is the last one.
    """
    a = X.automaton
    s = a.n_states
    rows = [{sym: set(t) for sym, t in row.items()} for row in a.delta]
    start_row = {0: {s}}
    for d in range(1, a.radix):
        t = a.step(X.zero_closure, d)
        if t:
            start_row[d] = set(t)
    rows.append(start_row)
    finals = set(a.finals)
    if X.zero_closure & a.finals:
        finals.add(s)
    delta = tuple({sym: frozenset(t) for sym, t in row.items()} for row in rows)
    return Automaton(a.radix, 1, s + 1, frozenset({s}), frozenset(finals), delta)


def member(X: BaseKSet, n: int) -> bool:
    if n < 0:
        return False
    return X.automaton.accepts(canonical_expansion(n, X.radix), X.zero_closure)


def enumerate_set(X: BaseKSet, N: int) -> list[int]:
    """Members of X in [0, N], ascending."""
    d = X.value_dfa
    (q0,) = d.initial
    k = X.radix
    out = []
    for n in range(N + 1):
        q = q0
        for digit in canonical_expansion(n, k):
            q = d.target(q, digit)
            if q is None:
                break
        if q is not None and q in d.finals:
            out.append(n)
    return out


def base_power_transform(X: BaseKSet, i: int) -> BaseKSet:
    """Same subset of the naturals, written in radix ``k**i``."""
    if i < 1:
        raise ValueError("exponent must be >= 1")
    if i == 1:
        return X
    return BaseKSet(am.block_transform(padded_nfa(X), i))


def find_normalization(X: BaseKSet, p: int, cap: int = 12) -> tuple[int, int, BaseKSet]:
    """Least block length ``i`` after which 0 and the top digit are idempotent and
    some single digit loops at ``p``.

    Returns ``(i, a, X')`` where ``X'`` is the cycle-language set at ``p`` of the
    radix-``k**i`` block automaton (state indices unchanged).
    """
    a = X.automaton
    if not 0 <= p < a.n_states:
        raise NormalizationError(f"invalid state {p}")
    if p not in am.reachable(a, a.successors(p)):
        raise NormalizationError(f"cycle language at state {p} is trivial")
    for i in range(1, cap + 1):
        b = am.block_transform(a, i)
        top = b.radix - 1
        if not (am.is_idempotent_word(b, (0,)) and am.is_idempotent_word(b, (top,))):
            continue
        loops = [d for d in range(b.radix) if b.succ(p, d) == frozenset({p})]
        if not loops:
            continue
        nonzero = [d for d in loops if d != 0]
        digit = nonzero[0] if nonzero else 0
        return i, digit, BaseKSet(b.with_ends([p], [p]))
    raise NormalizationError(f"no normalization with block length <= {cap}")


@dataclass(frozen=True)
class KernelFamily:
    radix: int
    dfa: Automaton                 # minimal padded value DFA
    finals_sets: tuple             # one frozenset of accepting states per family member
    _index: dict

    @property
    def size(self) -> int:
        return len(self.finals_sets)

    @property
    def maps(self) -> list[BaseKSet]:
        return [BaseKSet(self.dfa.with_ends(finals=t)) for t in self.finals_sets]

    def index(self, c: int, j: int) -> int:
        """Member ``m`` with ``k**c * n + j in X  <=>  n in maps[m]``."""
        if not 0 <= j < self.radix ** c:
            raise ValueError("need 0 <= j < k**c")
        t = self.finals_sets[0]
        for d in reversed(pad_expansion(j, self.radix, c)):
            t = _preimage(self.dfa, t, d)
        return self._index[t]

    def member(self, m: int, n: int) -> bool:
        d = self.dfa
        q = d.run(canonical_expansion(n, self.radix))
        return bool(q & self.finals_sets[m])


def _preimage(d: Automaton, t: frozenset, digit: int) -> frozenset:
    return frozenset(q for q in range(d.n_states) if d.target(q, digit) in t)


def k_kernel(X: BaseKSet) -> KernelFamily:
    d = am.complete(X.value_dfa)
    start = frozenset(d.finals)
    index = {start: 0}
    order = [start]
    i = 0
    while i < len(order):
        t = order[i]
        i += 1
        for digit in range(d.radix):
            u = _preimage(d, t, digit)
            if u not in index:
                index[u] = len(order)
                order.append(u)
    return KernelFamily(X.radix, d, tuple(order), index)


def power_set(k: int) -> BaseKSet:
    """The set {1, k, k^2, ...} as the language 1 0*."""
    return BaseKSet(Automaton.build(k, 2, [0], [1], [(0, 1, 1), (1, 0, 1)]))


def residue_set(k: int, m: int, r: int = 0) -> BaseKSet:
    """Numbers congruent to ``r`` modulo ``m``."""
    trans = [(q, d, (q * k + d) % m) for q in range(m) for d in range(k)]
    return BaseKSet(Automaton.build(k, m, [0], [r % m], trans))


def finite_set(k: int, values: Iterable[int]) -> BaseKSet:
    words = [canonical_expansion(v, k) for v in set(values)]
    if not words:
        return BaseKSet(am.empty_automaton(k))
    return BaseKSet(am.minimize(am.union_nfa([am.word_automaton(w, k) for w in words])))
