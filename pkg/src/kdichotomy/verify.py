"""The acceptance checklist: one function per criterion, each returning a Result.

Shared by the acceptance tests and the ``verify-paper`` command.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable

from . import automaton as am
from . import corpus
from . import dichotomy as dc
from . import ffunc as ff
from .basek import BaseKSet, base_power_transform, canonical_expansion, enumerate_set, member, word_str
from .logic.compile import is_eventually_periodic


@dataclass
class Result:
    number: int
    name: str
    passed: bool
    detail: str = ""
    elapsed: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name} ({self.elapsed:.2f}s) {self.detail}"

    def to_json(self):
        return {"criterion": self.number, "name": self.name, "passed": self.passed,
                "detail": self.detail, "elapsed": round(self.elapsed, 3)}


def _timed(number, name, limit=None):
    def deco(fn):
        def run(*args, **kw) -> Result:
            t0 = time.perf_counter()
            ok, detail, data = fn(*args, **kw)
            el = time.perf_counter() - t0
            if limit is not None and el >= limit:
                ok = False
                detail += f"; runtime {el:.2f}s exceeds {limit}s"
            return Result(number, name, ok, detail, el, data)
        run.number = number
        run.criterion_name = name
        run.__wrapped__ = fn
        return run
    return deco


def fig1_context() -> ff.CycleContext:
    return ff.CycleContext.build(corpus.fig1(), 2)


@_timed(1, "fig1 F(22)=3 with witness r=0 v=00", limit=1.0)
def criterion_1():
    ctx = fig1_context()
    F = ff.f_stable(ctx, 22)
    _, trace = ff.f_r(ctx, 22, ctx.M)
    hits = [w for w in trace.rejected if w.i == 2 and w.r == 0 and word_str(w.v) == "00"
            and w.value == 18 and not w.in_X]
    ok = F == 3 and bool(hits) and canonical_expansion(18, 3) == (2, 0, 0)
    return ok, f"F(22)={F}, rejected={[w.to_json() for w in trace.rejected]}", {}


def _stab_instances(seed=2024, count=50):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        ctx = corpus.random_context(rng, max_states=4)
        members = enumerate_set(ctx.X, 200)
        out.append((ctx, members))
    return out


_STAB_CACHE = {}


def _stab_table(seed, count):
    key = (seed, count)
    if key not in _STAB_CACHE:
        rows = []
        for ctx, members in _stab_instances(seed, count):
            for n in members:
                rows.append((ctx, n, ff.f_values(ctx, n, ctx.M + 3)))
        _STAB_CACHE[key] = rows
    return _STAB_CACHE[key]


@_timed(2, "stabilization F_R = F_M for R in [M, M+3]", limit=120.0)
def criterion_2(seed=2024, count=50):
    rows = _stab_table(seed, count)
    bad = [(ctx, n) for ctx, n, vals in rows if len(set(vals[ctx.M:ctx.M + 4])) != 1]
    ks = sorted({ctx.k for ctx, _, _ in rows})
    ok = not bad and len({id(c) for c, _, _ in rows}) >= 1
    return ok, f"{count} contexts over k={ks}, {len(rows)} (ctx, n) pairs, {len(bad)} violations", {}


@_timed(3, "monotonicity F_(R+1) <= F_R")
def criterion_3(seed=2024, count=50):
    rows = _stab_table(seed, count)
    bad = sum(1 for _, _, vals in rows for a, b in zip(vals, vals[1:]) if b > a)
    return bad == 0, f"{len(rows)} pairs, {bad} violations", {}


def _below_contexts(seed=77, count=10):
    rng = random.Random(seed)
    return [fig1_context()] + [corpus.random_context(rng, max_states=4) for _ in range(count)]


@_timed(4, "lower bound F(n) >= V_ka(n)/k^beta on [1, 10^4]")
def criterion_4(seed=77, count=10, N=10_000):
    bad = 0
    total = 0
    for ctx in _below_contexts(seed, count):
        b = ff.beta(ctx)
        for n in enumerate_set(ctx.X, N):
            if n < 1:
                continue
            total += 1
            if ff.f_stable(ctx, n) * ctx.k ** b < ff.v_ka(n, ctx.k, ctx.a):
                bad += 1
    return bad == 0, f"{count + 1} contexts, {total} members, {bad} violations", {}


def _sample_cycle_words(ctx, rng, count, max_len=8):
    pool = []
    cyc = ctx.automaton
    for w in am.words_upto(ctx.k, max_len):
        if cyc.accepts(w) and any(w):
            pool.append(w)
        if len(pool) > 5000:
            break
    if not pool:
        return []
    return [rng.choice(pool) for _ in range(count)]


@_timed(5, "F([w a^i]) >= k^i F([w])")
def criterion_5(seed=78, per_context=200):
    rng = random.Random(seed)
    bad = 0
    total = 0
    for ctx in _below_contexts():
        for w in _sample_cycle_words(ctx, rng, per_context):
            i = rng.randint(0, 3)
            total += 1
            if not ff.multk_check(ctx, w, i):
                bad += 1
    return bad == 0 and total > 0, f"{total} pairs, {bad} violations", {}


@_timed(6, "n <= k^i implies F(n) <= k^(i+1)")
def criterion_6(seed=2024, count=50):
    rows = _stab_table(seed, count)
    bad = 0
    for ctx, n, vals in rows:
        F = vals[ctx.M]
        ceil_pow = 1
        while ceil_pow < n:
            ceil_pow *= ctx.k
        if F > ceil_pow * ctx.k:
            bad += 1
    return bad == 0, f"{len(rows)} pairs, {bad} violations", {}


@_timed(7, "state counts of left quotient and iff product")
def criterion_7(seed=79, calls=500):
    rng = random.Random(seed)
    bad_q = bad_p = 0
    for _ in range(calls):
        k = rng.choice((2, 3))
        n = rng.randint(1, 6)
        a = corpus.random_dfa(rng, k, n)
        u = tuple(rng.randrange(k) for _ in range(rng.randint(0, 5)))
        if am.left_quotient(a, u).n_states > n + 1:
            bad_q += 1
    for _ in range(calls):
        k = rng.choice((2, 3))
        n1, n2 = rng.randint(1, 6), rng.randint(1, 6)
        a1, a2 = corpus.random_dfa(rng, k, n1), corpus.random_dfa(rng, k, n2)
        if am.boolean_combine(a1, a2, "iff").n_states > n1 * n2:
            bad_p += 1
    return bad_q == bad_p == 0, f"quotient violations {bad_q}/{calls}, product violations {bad_p}/{calls}", {}


CORPUS_EXPECT = {
    "mult3": dc.Verdict.PRESBURGER,
    "pow2": dc.Verdict.KN_INTERDEFINABLE,
    "sigma_2_3_0": dc.Verdict.KN_INTERDEFINABLE,
    "evil": dc.Verdict.DEFINES_VK,
}


@_timed(8, "classifier corpus verdicts", limit=60.0)
def criterion_8():
    problems = []
    for name, want in CORPUS_EXPECT.items():
        X = corpus.named_set(name)
        rep = dc.classify(X)
        if rep.verdict != want:
            problems.append(f"{name}: {rep.verdict.value}")
        if name == "mult3" and (rep.periodicity_witness is None or rep.periodicity_witness[0] != 3):
            problems.append(f"mult3 witness {rep.periodicity_witness}")
        if name == "sigma_2_3_0":
            ws = [(r.congruence.m, r.congruence.ell) for r in rep.scc_evidence if r.congruence]
            if (3, 2) not in ws:
                problems.append(f"sigma witness {ws}")
        if name == "evil" and not any(r.exhausted for r in rep.scc_evidence):
            problems.append("evil lacks congruence exhaustion evidence")
        for label, Y in (("minimize", BaseKSet(am.minimize(X.automaton))),
                         ("base^2", base_power_transform(X, 2))):
            v = dc.classify(Y).verdict
            if v != want:
                problems.append(f"{name} under {label}: {v.value}")
    return not problems, "; ".join(problems) or "all verdicts as expected", {}


def brute_periodic(bits, max_p=1000, max_N=1000):
    """Smallest (p, N) with bits[n] == bits[n+p] on the whole observed window."""
    L = len(bits)
    for p in range(1, max_p + 1):
        # latest disagreement decides the least N for this p
        last = -1
        for n in range(L - p - 1, -1, -1):
            if bits[n] != bits[n + p]:
                last = n
                break
        N = last + 1
        if N <= max_N:
            return p, N
    return None


@_timed(9, "periodicity decision vs brute force")
def criterion_9(seed=80, want=20, bits=5000):
    rng = random.Random(seed)
    pos, neg = [], []
    disagreements = 0
    while len(pos) + len(neg) < want:
        a = corpus.random_dfa(rng, 2, 3, partial=0.15)
        X = BaseKSet(a)
        chars = [member(X, n) for n in range(bits)]
        if not any(chars):
            continue
        brute = brute_periodic(chars)
        bucket = pos if brute else neg
        if len(bucket) >= want // 2:
            continue
        decided, _ = is_eventually_periodic(X)
        bucket.append(a)
        if decided != (brute is not None):
            disagreements += 1
    return disagreements == 0, f"{len(pos)} periodic, {len(neg)} non-periodic, {disagreements} disagreements", {}


def growth_probe_sparse(a, max_len=24, window=(3, 6), period=6, degree=3) -> bool:
    """Counts per length are annihilated by (E^period - 1)^degree iff growth is polynomial."""
    c = am.count_words_by_length(a, max_len)
    from math import comb
    for n0 in range(window[0], window[1] + 1):
        s = 0
        for j in range(degree + 1):
            idx = n0 + period * j
            if idx > max_len:
                return True
            s += (-1) ** (degree - j) * comb(degree, j) * c[idx]
        if s != 0:
            return False
    return True


@_timed(10, "sparseness vs growth probe")
def criterion_10(seed=81, count=100):
    rng = random.Random(seed)
    bad = 0
    kinds = [0, 0]
    for _ in range(count):
        a = corpus.random_dfa(rng, 2, 3, partial=0.35)
        s = am.is_sparse(a)
        kinds[s] += 1
        if s != growth_probe_sparse(a):
            bad += 1
    return bad == 0, f"{kinds[1]} sparse, {kinds[0]} non-sparse, {bad} disagreements", {}


@_timed(11, "accepting component of w.Sigma is complete")
def criterion_11(seed=82, count=20):
    rng = random.Random(seed)
    bad = []
    for _ in range(count):
        a, params = corpus.random_sigma_prefixed(rng, k=rng.choice((2, 3)))
        scc = am.scc_decompose(a)
        for ci, comp in enumerate(scc.components):
            if scc.leaf_flags[ci] and comp & a.finals and am.has_cycle_within(a, comp):
                ok, missing = dc.is_complete_scc(a, comp)
                if not ok:
                    bad.append((params, missing))
    return not bad, f"{count} languages, {len(bad)} violations", {}


@_timed(12, "cycle membership via separating words")
def criterion_12(seed=83, pairs=500, N=2000):
    rng = random.Random(seed)
    checkers = [dc.CycleMembershipFormula(corpus.named_set(n)) for n in corpus.NON_PERIODIC]
    bad = 0
    for _ in range(pairs):
        cf = rng.choice(checkers)
        q = rng.randrange(cf.d.n_states)
        n = rng.randint(0, N)
        if cf.check(q, n) != cf.direct(q, n):
            bad += 1
    return bad == 0, f"{pairs} pairs, {bad} disagreements", {}


@_timed(13, "G construction realizes V_k on [1, 2000]")
def criterion_13(N=2000):
    members = {
        "evil": ff.CycleContext.normalize(corpus.evil(), 0)[0],
        "fig1_cycle": fig1_context(),
    }
    reports = {}
    any_equal = False
    upper_all = True
    for name, ctx in members.items():
        g = ff.construct_g(ctx, N=N)
        reports[name] = g
        any_equal |= g.equal
        upper_all &= g.upper_ok
    detail = ", ".join(f"{n}: k={members[n].k} P={g.P} equal={g.equal} upper={g.upper_ok}"
                       + (f" ({g.message})" if g.message else "") for n, g in reports.items())
    return any_equal and upper_all, detail, {"reports": reports}


CRITERIA: list[Callable[[], Result]] = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
    criterion_8, criterion_9, criterion_10, criterion_11, criterion_12, criterion_13,
]


def run_all(only=None) -> list[Result]:
    out = []
    for fn in CRITERIA:
        if only and fn.number not in only:
            continue
        out.append(fn())
    return out
