"""The approximation map F on a cycle-language set and its companions.

Setting: a deterministic automaton, a state ``p`` with cycle language ``L``
(words leading from ``p`` back to ``p``), ``X = [L]_k`` and a digit ``a``
looping at ``p``.  ``F_R(n)`` is the largest ``k^i`` with ``k^(i-1) <= n``
such that for every ``r <= R`` and every word ``v`` with ``|v| = j <= r + i``

    j > r:   k^r n - [a^(j-r) 0^r] + [v]  in X   <=>   v in L
    j <= r:  k^r n + [a^(r-j) v]          in X   <=>   v in L

Negative left-hand values count as outside X.  ``F = F_M`` with
``M = (|Q| + 1)^2``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Sequence

from . import automaton as am
from .automaton import Automaton
from .basek import (BaseKSet, canonical_expansion, eval_msd,
                    find_normalization, member, pad_expansion, word_str)

log = logging.getLogger(__name__)

CASE_I, CASE_II, CASE_III = "I", "II", "III"


class ContextError(ValueError):
    pass


def state_case(a: Automaton, p: int, scc: am.SccDecomposition | None = None) -> str:
    targets = a.succ(p, 0)
    if targets == frozenset({p}):
        return CASE_I
    if not targets:
        return CASE_II
    scc = scc or am.scc_decompose(a)
    if all(scc.component_of[t] != scc.component_of[p] for t in targets):
        return CASE_II
    return CASE_III


@dataclass(frozen=True, eq=False)
class CycleContext:
    X: BaseKSet          # automaton with initial = final = {p}
    p: int
    a: int
    case: str
    M: int

    @classmethod
    def build(cls, a: Automaton, p: int, digit: int | None = None, strict: bool = True) -> "CycleContext":
        """Context for the cycle language at ``p`` of an already normalized automaton."""
        if not a.deterministic or len(a.initial) > 1:
            a = a.with_ends([p], [p])
        if any(len(t) > 1 for row in a.delta for t in row.values()):
            raise ContextError("cycle contexts need a deterministic automaton")
        if not 0 <= p < a.n_states:
            raise ContextError(f"invalid state {p}")
        k = a.radix
        loops = [d for d in range(k) if a.succ(p, d) == frozenset({p})]
        if digit is None:
            if not loops:
                raise ContextError(f"no digit loops at state {p}")
            nonzero = [d for d in loops if d]
            digit = nonzero[0] if nonzero else 0
        elif digit not in loops:
            raise ContextError(f"digit {digit} does not loop at state {p}")
        if strict:
            for d in (0, k - 1):
                if not am.is_idempotent_word(a, (d,)):
                    raise ContextError(f"digit {d} is not idempotent")
        X = BaseKSet(a.with_ends([p], [p]))
        return cls(X, p, digit, state_case(a, p), (a.n_states + 1) ** 2)

    @classmethod
    def normalize(cls, a: Automaton, p: int, cap: int = 12) -> tuple["CycleContext", int]:
        """Replace k by the least power making the automaton normalized at ``p``."""
        i, digit, Xp = find_normalization(BaseKSet(a.with_ends([p], [p])), p, cap)
        return cls.build(Xp.automaton, p, digit), i

    @property
    def automaton(self) -> Automaton:
        return self.X.automaton

    @property
    def k(self) -> int:
        return self.X.radix

    @property
    def n_states(self) -> int:
        return self.automaton.n_states

    def in_L(self, v: Sequence[int]) -> bool:
        return self.automaton.accepts(v)

    def in_X(self, n: int) -> bool:
        return n >= 0 and member(self.X, n)

    def partner(self) -> "CycleContext":
        """For case III: the case-I context at ``p' = delta(p, 0)``."""
        if self.case != CASE_III:
            raise ContextError("partner context only exists in case III")
        (q,) = self.automaton.succ(self.p, 0)
        return CycleContext.build(self.automaton, q)

    @cached_property
    def engine(self) -> "_Engine":
        return _Engine(self)

    def __repr__(self):
        return (f"CycleContext(k={self.k}, states={self.n_states}, p={self.p}, a={self.a}, "
                f"case={self.case}, M={self.M})")


@dataclass
class Rejection:
    i: int
    r: int
    v: tuple
    side: str            # "long" (|v| > r) or "short"
    value: int           # left-hand number (may be negative)
    in_X: bool
    in_L: bool

    def to_json(self):
        return {"i": self.i, "r": self.r, "v": word_str(self.v), "side": self.side,
                "value": self.value, "in_X": self.in_X, "in_L": self.in_L}


@dataclass
class FTrace:
    n: int
    R: int
    accepted_exponent: int
    rejected: list = field(default_factory=list)
    values: dict = field(default_factory=dict)     # R' -> F_R'(n) for R' in [0, M]
    negative_only: bool = False

    def to_json(self):
        return {"accepted_exponent": self.accepted_exponent,
                "rejected": [r.to_json() for r in self.rejected],
                "values": {str(k): v for k, v in sorted(self.values.items())},
                "negative_only": self.negative_only}


class _Engine:
    """Product tables shared by all evaluations on one context."""

    def __init__(self, ctx: CycleContext):
        self.ctx = ctx
        k = self.k = ctx.k
        dx = am.complete(ctx.X.value_dfa)
        self.NEG = dx.n_states
        self.dx_next = [[dx.target(q, d) for d in range(k)] for q in range(dx.n_states)]
        self.dx_next.append([self.NEG] * k)
        self.dx_acc = [q in dx.finals for q in range(dx.n_states)] + [False]
        (self.dx_start,) = dx.initial
        ld = am.complete(am.minimize(ctx.automaton.with_ends([ctx.p], [ctx.p])))
        self.l_next = [[ld.target(q, d) for d in range(k)] for q in range(ld.n_states)]
        self.l_acc = [q in ld.finals for q in range(ld.n_states)]
        (self.l_start,) = ld.initial
        self.nx, self.nl = len(self.dx_next), len(self.l_next)
        self.bad = []
        self._bad_upto = []
        self._grow(0)

    def pair(self, x, y):
        return x * self.nl + y

    def _grow(self, upto):
        nl, k = self.nl, self.k
        while len(self.bad) <= upto:
            if not self.bad:
                m = 0
                for x in range(self.nx):
                    for y in range(nl):
                        if self.dx_acc[x] != self.l_acc[y]:
                            m |= 1 << (x * nl + y)
            else:
                prev = self.bad[-1]
                m = 0
                for x in range(self.nx):
                    for y in range(nl):
                        for d in range(k):
                            if prev >> (self.dx_next[x][d] * nl + self.l_next[y][d]) & 1:
                                m |= 1 << (x * nl + y)
                                break
            self.bad.append(m)
            self._bad_upto.append(m | (self._bad_upto[-1] if self._bad_upto else 0))

    def bad_at(self, j):
        self._grow(j)
        return self.bad[j]

    def bad_upto(self, R):
        self._grow(R)
        return self._bad_upto[R]

    def dx_run(self, x, word):
        for d in word:
            x = self.dx_next[x][d]
        return x

    def l_run(self, y, word):
        for d in word:
            y = self.l_next[y][d]
        return y

    def dx_of(self, value):
        if value < 0:
            return self.NEG
        return self.dx_run(self.dx_start, canonical_expansion(value, self.k))

    # -- short words (|v| <= r): independent of the candidate exponent
    def short_fail_r(self, n, Rmax):
        """Least r <= Rmax at which the j <= r side fails, or None."""
        a = self.ctx.a
        xs = [self.dx_of(n)]          # xs[t] = state after canon(n) a^t
        for r in range(Rmax + 1):
            while len(xs) <= r:
                xs.append(self.dx_next[xs[-1]][a])
            for j in range(r + 1):
                if self.bad_at(j) >> self.pair(xs[r - j], self.l_start) & 1:
                    return r
        return None

    # -- long words (|v| > r): reachable (X-state, L-state) pairs over all v0 of length s
    def long_pairs(self, n, s, nonneg_only=False):
        k, a = self.k, self.ctx.a
        c = n - a * (k ** s - 1) // (k - 1)
        h, low = divmod(c, k ** s)
        ldig = pad_expansion(low, k, s)
        cur = set()
        for carry in (0, 1):
            top = h + carry
            if top < 0:
                if nonneg_only:
                    continue
                x = self.NEG
            else:
                x = self.dx_of(top)
            cur.add((x, self.l_start, carry))
        dxn, lxn = self.dx_next, self.l_next
        for t in range(s):
            lt = ldig[t]
            nxt = set()
            for x, y, req in cur:
                for vd in range(k):
                    ny = lxn[y][vd]
                    for cin in (0, 1):
                        sm = lt + vd + cin
                        if sm // k != req:
                            continue
                        nxt.add((dxn[x][sm % k], ny, cin))
            cur = nxt
        m = 0
        for x, y, req in cur:
            if req == 0:
                m |= 1 << (x * self.nl + y)
        return m

    def max_exponent(self, n):
        return len(canonical_expansion(n, self.k))


def _check_member(ctx: CycleContext, n: int):
    if n < 0 or not ctx.in_X(n):
        raise ValueError(f"{n} is not in X")
    if ctx.case == CASE_III:
        raise ContextError("F is not computed in case III; use the partner context")


def f_values(ctx: CycleContext, n: int, Rmax: int) -> list[int]:
    """[F_0(n), ..., F_Rmax(n)]."""
    _check_member(ctx, n)
    if n == 0:
        return [1] * (Rmax + 1)
    e = ctx.engine
    k = ctx.k
    imax = e.max_exponent(n)
    r4 = e.short_fail_r(n, Rmax)
    # min_r[s] = least r <= Rmax where the j = r + s instance fails
    min_r = []
    for s in range(1, imax + 1):
        P = e.long_pairs(n, s)
        hit = None
        for r in range(Rmax + 1):
            if P & e.bad_at(r):
                hit = r
                break
        min_r.append(hit)
    out = []
    for R in range(Rmax + 1):
        if r4 is not None and r4 <= R:
            out.append(1)
            continue
        i = imax
        for s, hit in enumerate(min_r, 1):
            if hit is not None and hit <= R:
                i = s - 1
                break
        out.append(k ** i)
    return out


def f_exponent(ctx: CycleContext, n: int, R: int) -> int:
    """Exponent of F_R(n), stopping at the first failing block length."""
    _check_member(ctx, n)
    if n == 0:
        return 0
    e = ctx.engine
    if e.short_fail_r(n, R) is not None:
        return 0
    bad = e.bad_upto(R)
    imax = e.max_exponent(n)
    for s in range(1, imax + 1):
        if e.long_pairs(n, s) & bad:
            return s - 1
    return imax


def f_stable(ctx: CycleContext, n: int) -> int:
    return ctx.k ** f_exponent(ctx, n, ctx.M)


def _lhs_value(ctx, n, r, v):
    k, a = ctx.k, ctx.a
    j = len(v)
    if j > r:
        return k ** r * n - a * (k ** (j - r) - 1) // (k - 1) * k ** r + eval_msd(v, k)
    return k ** r * n + eval_msd((a,) * (r - j) + tuple(v), k)


def _greedy_suffix(e: _Engine, x, y, length):
    """Lexicographically least word of the given length separating (x, y)."""
    out = []
    for rem in range(length, 0, -1):
        for d in range(e.k):
            nx, ny = e.dx_next[x][d], e.l_next[y][d]
            if e.bad_at(rem - 1) >> e.pair(nx, ny) & 1:
                out.append(d)
                x, y = nx, ny
                break
    return tuple(out)


def condition_check(ctx: CycleContext, n: int, i: int, r: int, oracle: bool = False):
    """Check both equations for one shift ``r``; returns ``(ok, witness)``.

    The witness is a :class:`Rejection` for the shortest, then lexicographically
    least, failing word ``v``.
    """
    if oracle:
        return _condition_check_brute(ctx, n, i, r)
    e = ctx.engine
    k, a = ctx.k, ctx.a
    for j in range(r + i + 1):
        if j <= r:
            x = e.dx_run(e.dx_of(n), (a,) * (r - j))
            if e.bad_at(j) >> e.pair(x, e.l_start) & 1:
                v = _greedy_suffix(e, x, e.l_start, j)
                return False, _rejection(ctx, n, i, r, v)
        else:
            s = j - r
            if not e.long_pairs(n, s) & e.bad_at(r):
                continue
            c = n - a * (k ** s - 1) // (k - 1)
            for v0 in product(range(k), repeat=s):
                x = e.dx_of(c + eval_msd(v0, k))
                y = e.l_run(e.l_start, v0)
                if e.bad_at(r) >> e.pair(x, y) & 1:
                    v = v0 + _greedy_suffix(e, x, y, r)
                    return False, _rejection(ctx, n, i, r, v)
            raise AssertionError("pair table and enumeration disagree")
    return True, None


def _rejection(ctx, n, i, r, v):
    value = _lhs_value(ctx, n, r, v)
    return Rejection(i, r, tuple(v), "long" if len(v) > r else "short", value,
                     ctx.in_X(value), ctx.in_L(v))


def _condition_check_brute(ctx, n, i, r):
    k = ctx.k
    for j in range(r + i + 1):
        for v in product(range(k), repeat=j):
            value = _lhs_value(ctx, n, r, v)
            if ctx.in_X(value) != ctx.in_L(v):
                return False, _rejection(ctx, n, i, r, v)
    return True, None


def f_r(ctx: CycleContext, n: int, R: int, values_upto: int | None = None) -> tuple[int, FTrace]:
    """``F_R(n)`` with its evidence record."""
    _check_member(ctx, n)
    upto = ctx.M if values_upto is None else values_upto
    if n == 0:
        return 1, FTrace(0, R, 0, [], {q: 1 for q in range(upto + 1)})
    vals = f_values(ctx, n, max(R, upto))
    value = vals[R]
    i = value.bit_length() - 1 if ctx.k == 2 else _log(value, ctx.k)
    trace = FTrace(n, R, i, [], {q: vals[q] for q in range(upto + 1)})
    imax = ctx.engine.max_exponent(n)
    if i < imax:
        cand = i + 1
        for r in range(R + 1):
            ok, wit = condition_check(ctx, n, cand, r)
            if not ok:
                trace.rejected.append(wit)
                break
        trace.negative_only = _negative_only(ctx, n, cand, R)
        if trace.negative_only:
            log.info("n=%d: candidate exponent %d rejected only through negative values", n, cand)
    return value, trace


def _negative_only(ctx, n, cand, R) -> bool:
    e = ctx.engine
    bad = e.bad_upto(R)
    fails_nonneg = (e.short_fail_r(n, R) is not None or
                    any(e.long_pairs(n, s, nonneg_only=True) & bad for s in range(1, cand + 1)))
    return not fails_nonneg


def _log(value, k):
    i = 0
    while value > 1:
        value //= k
        i += 1
    return i


# -- lemma-level quantities --------------------------------------------------

def v_ka(n: int, k: int, a: int) -> int:
    """k^i where i is the length of the maximal run of a's ending the expansion of n."""
    if n < 1:
        raise ValueError("v_ka is defined for n >= 1")
    i = 0
    while n % k == a:
        n //= k
        i += 1
        if n == 0:
            break
    return k ** i


def v_k(n: int, k: int) -> int:
    return v_ka(n, k, 0)


def beta(ctx: CycleContext) -> int:
    """Least r2 with delta(., a^r1) = delta(., a^r2) for some r1 < r2."""
    a = ctx.automaton
    vec = tuple(frozenset({q}) for q in range(a.n_states))
    seen = {vec: 0}
    r = 0
    while True:
        r += 1
        vec = tuple(a.step(s, ctx.a) for s in vec)
        if vec in seen:
            return r
        seen[vec] = r


def alpha(ctx: CycleContext) -> int:
    return ctx.n_states + 2


def multk_check(ctx: CycleContext, w: Sequence[int], i: int) -> bool:
    """F([w a^i]) >= k^i F([w]) for w in L with [w] >= 1."""
    if not ctx.in_L(w):
        raise ValueError("w must lie in the cycle language")
    n = eval_msd(w, ctx.k)
    if n < 1:
        raise ValueError("the inequality is stated for [w] >= 1")
    m = eval_msd(tuple(w) + (ctx.a,) * i, ctx.k)
    return f_stable(ctx, m) >= ctx.k ** i * f_stable(ctx, n)


def _tilde_shift(n: int, k: int, a: int) -> int:
    t = len(canonical_expansion(n, k)) - 1
    return n + (k ** t - 1) // (k - 1) * a


def tilde_member(ctx: CycleContext, n: int) -> bool:
    if n < 1:
        raise ValueError("defined for n >= 1")
    return ctx.in_X(_tilde_shift(n, ctx.k, ctx.a))


def tilde_f(ctx: CycleContext, n: int) -> int:
    if not tilde_member(ctx, n):
        raise ValueError(f"{n} is not in the shifted set")
    return f_stable(ctx, _tilde_shift(n, ctx.k, ctx.a))


def ka_equivalent(n1: int, n2: int, k: int, a: int) -> bool:
    def reaches(lo, hi):
        m = lo
        while m <= hi:
            if m == hi:
                return True
            nxt = k * m + a
            if nxt == m:
                return False
            m = nxt
        return False
    if n1 == n2:
        return True
    return reaches(min(n1, n2), max(n1, n2))


def n_prime_witness(ctx: CycleContext, n: int) -> int | None:
    """Some n' in X with F(n') >= F(n), the same v_ka, and n' < k^alpha F(n')."""
    k = ctx.k
    Fn = f_stable(ctx, n)
    target = v_ka(n, k, ctx.a)
    bound = k ** alpha(ctx) * Fn
    for m in range(1, bound):
        if ctx.in_X(m) and v_ka(m, k, ctx.a) == target:
            Fm = f_stable(ctx, m)
            if Fm >= Fn and m < k ** alpha(ctx) * Fm:
                return m
    return None


# -- the G construction ------------------------------------------------------

@dataclass
class GResult:
    N: int
    P: int | None
    stratum: int | None            # exponent p_j of the selected stratum
    strata: dict                   # exponent -> (count, non-sparse?)
    table: list                    # (n, G(n), V_k(n))
    equal: bool                    # G == V_k on [1, N]
    upper_ok: bool                 # G <= V_k on [1, N]
    message: str = ""

    def to_json(self):
        return {"N": self.N, "P": self.P, "stratum": self.stratum,
                "strata": {str(e): {"count": c, "nonsparse": ns} for e, (c, ns) in sorted(self.strata.items())},
                "equal": self.equal, "upper_ok": self.upper_ok, "message": self.message}


def growth_nonsparse(values: Sequence[int], k: int, top: int) -> bool:
    """Probe: do block counts |T ∩ [k^(L-1), k^L)| grow geometrically up to ``top``?"""
    L = len(canonical_expansion(top, k))
    counts = [0] * (L + 1)
    for v in values:
        if 1 <= v <= top:
            counts[len(canonical_expansion(v, k))] += 1
    full = [counts[i] for i in range(1, L + 1) if k ** i - 1 <= top]
    if len(full) < 4 or full[-1] < 16:
        return False
    # geometric growth over the last half of the complete blocks
    tail = full[len(full) // 2:]
    if min(tail) == 0:
        return False
    ratio = (tail[-1] / tail[0]) ** (1 / max(1, len(tail) - 1))
    return ratio >= 1.45


def _powers_upto(k, N):
    out, p = [], 1
    while p <= N:
        out.append(p)
        p *= k
    return out


def _sumset_levels(members: Sequence[int], N: int, P: int) -> list[int]:
    """Bitsets S_1..S_P of numbers in [0, N] that are sums of exactly r members."""
    mask = (1 << (N + 1)) - 1
    base = 0
    for y in members:
        if y <= N:
            base |= 1 << y
    levels = [base]
    cur = base
    for _ in range(P - 1):
        nxt = 0
        for y in members:
            if y <= N:
                nxt |= cur << y
        cur = nxt & mask
        levels.append(cur)
    return levels


def construct_g(ctx: CycleContext, P: int | None = None, N: int = 2000, probe_factor: int | None = None,
                max_P: int = 8, check_hypotheses: bool = True) -> GResult:
    """Desk-scale realization of V_k from X through the shifted set and the map H."""
    k, a = ctx.k, ctx.a
    if ctx.case == CASE_III:
        raise ContextError("construct_g needs case I or II")
    if check_hypotheses:
        from .logic.compile import is_eventually_periodic
        if am.is_sparse(ctx.X.value_dfa):
            raise ContextError("X is sparse")
        if is_eventually_periodic(ctx.X)[0]:
            raise ContextError("X is eventually periodic")
    if probe_factor is None:
        probe_factor = k * k if k > 2 else 8
    top = N * probe_factor
    # shifted set and ratio exponents log_k(F~(n) / V_k(n))
    ratio = {}
    for n in range(1, top + 1):
        m = _tilde_shift(n, k, a)
        if ctx.in_X(m):
            ratio[n] = f_exponent(ctx, m, ctx.M) - _log(v_k(n, k), k)
    strata = {}
    for e in sorted(set(ratio.values())):
        members = [n for n, x in ratio.items() if x == e]
        strata[e] = (len(members), growth_nonsparse(members, k, top))
    nonsparse = [e for e, (_, ns) in strata.items() if ns]
    if not nonsparse:
        return GResult(N, None, None, strata, [], False, True, "no stratum looks non-sparse")
    pj = max(nonsparse)
    higher = {n for n, x in ratio.items() if x > pj}
    # X_0: drop n whenever some k^m n (within the probe range) lies in a higher stratum
    X0 = []
    for n in range(1, N + 1):
        if n not in ratio:
            continue
        m = n
        dropped = False
        while m <= top:
            if m in higher:
                dropped = True
                break
            m *= k
        if not dropped:
            X0.append(n)
    powers = set(_powers_upto(k, N))
    H = {}                                    # exponent of H
    for n in X0:
        H[n] = ratio[n] + _log(v_k(n, k), k) - pj
    for p in powers:
        H[p] = _log(p, k)
    Y = sorted(H)
    Y0 = [n for n in Y if H[n] == _log(v_k(n, k), k)]
    full = ((1 << N) - 1) << 1                # bits 1..N
    found = P
    if found is None:
        acc = 0
        for r, lvl in enumerate(_sumset_levels(Y0, N, max_P), 1):
            acc |= lvl
            if acc & full == full:
                found = r
                break
    useP = found if found is not None else max_P
    max_e = max(H.values())
    G = [0] * (N + 1)                          # exponent of G
    for e in range(0, max_e + 1):
        members = [y for y in Y if H[y] >= e]
        acc = 0
        for lvl in _sumset_levels(members, N, useP):
            acc |= lvl
        for n in range(1, N + 1):
            if acc >> n & 1:
                G[n] = e
    table = [(n, k ** G[n], v_k(n, k)) for n in range(1, N + 1)]
    table.insert(0, (0, 1, None))
    upper_ok = all(g <= v for n, g, v in table[1:])
    equal = found is not None and all(g == v for n, g, v in table[1:])
    msg = "" if found is not None else f"no P <= {max_P} makes Y_0 an additive basis on [1, {N}]"
    return GResult(N, found, pj, strata, table, equal, upper_ok, msg)
