import random
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kdichotomy.automaton import Automaton
from kdichotomy.basek import canonical_expansion, eval_msd
from kdichotomy.corpus import evil, fig1, fig1_cycle, random_context
from kdichotomy.ffunc import (CASE_I, CASE_II, CASE_III, ContextError, CycleContext, alpha, beta,
                              condition_check, construct_g, f_exponent, f_r, f_stable, f_values,
                              growth_nonsparse, ka_equivalent, multk_check, n_prime_witness,
                              state_case, tilde_f, tilde_member, v_k, v_ka)
from kdichotomy.ffunc import _condition_check_brute


def log_k(v, k):
    i = 0
    while v > 1:
        v //= k
        i += 1
    return i


def brute_f(ctx, n, R):
    """F_R(n) straight from the definition, enumerating every word v."""
    if n == 0:
        return 1
    imax = len(canonical_expansion(n, ctx.k))
    ok = [i for i in range(imax + 1)
          if all(_condition_check_brute(ctx, n, i, r)[0] for r in range(R + 1))]
    return ctx.k ** max(ok, default=0)


def members(ctx, top):
    return [m for m in range(1, top + 1) if ctx.in_X(m)]


@pytest.fixture(scope="module")
def fig1_ctx():
    return CycleContext.build(fig1(), 2)


@pytest.fixture(scope="module")
def contexts():
    rng = random.Random(41)
    return [random_context(rng) for _ in range(25)]


def case_three():
    return Automaton.build(2, 2, [0], [0], [(0, 0, 1), (1, 0, 1), (0, 1, 0), (1, 1, 0)])


class TestContext:
    def test_fig1(self, fig1_ctx):
        assert (fig1_ctx.k, fig1_ctx.a, fig1_ctx.case, fig1_ctx.M) == (3, 1, CASE_I, 16)

    def test_cases(self):
        assert state_case(fig1(), 2) == CASE_I
        no_zero = Automaton.build(2, 1, [0], [0], [(0, 1, 0)])
        assert state_case(no_zero, 0) == CASE_II
        assert state_case(case_three(), 0) == CASE_III

    def test_case_three_partner(self):
        ctx = CycleContext.build(case_three(), 0)
        partner = ctx.partner()
        assert partner.p == 1 and partner.case == CASE_I
        with pytest.raises(ContextError):
            f_stable(ctx, 1)
        with pytest.raises(ContextError):
            partner.partner()

    def test_rejects_non_loop_digit(self):
        with pytest.raises(ContextError):
            CycleContext.build(fig1(), 2, digit=2)

    def test_rejects_non_idempotent(self):
        parity = Automaton.build(2, 2, [0], [0], [(0, 1, 1), (1, 1, 0), (0, 0, 0), (1, 0, 1)])
        with pytest.raises(ContextError):
            CycleContext.build(parity, 0)

    def test_normalize(self):
        ctx, i = CycleContext.normalize(evil(), 0)
        assert (i, ctx.k, ctx.a) == (2, 4, 3)

    def test_negative_values_are_outside(self, fig1_ctx):
        assert not fig1_ctx.in_X(-22)

    def test_not_member(self, fig1_ctx):
        with pytest.raises(ValueError):
            f_stable(fig1_ctx, 2)


class TestFigureOne:
    def test_value(self, fig1_ctx):
        assert f_stable(fig1_ctx, 22) == 3

    def test_single_digit_passes_every_shift(self, fig1_ctx):
        for r in range(fig1_ctx.M + 1):
            assert condition_check(fig1_ctx, 22, 1, r)[0]

    def test_witness(self, fig1_ctx):
        ok, wit = condition_check(fig1_ctx, 22, 2, 0)
        assert not ok
        assert (wit.v, wit.r, wit.side, wit.value, wit.in_X, wit.in_L) == ((0, 0), 0, "long", 18, False, True)
        assert canonical_expansion(wit.value, 3) == (2, 0, 0)

    def test_trace(self, fig1_ctx):
        value, trace = f_r(fig1_ctx, 22, fig1_ctx.M)
        assert value == 3 and trace.accepted_exponent == 1
        assert [w.to_json() for w in trace.rejected][0] == \
            {"i": 2, "r": 0, "v": "00", "side": "long", "value": 18, "in_X": False, "in_L": True}
        assert set(trace.values) == set(range(fig1_ctx.M + 1))

    def test_zero(self):
        ctx = CycleContext.build(fig1(), 2)
        assert ctx.in_X(0)
        assert f_stable(ctx, 0) == 1

    def test_beta_alpha(self, fig1_ctx):
        assert beta(fig1_ctx) == 2
        assert alpha(fig1_ctx) == 5

    def test_multk_example(self, fig1_ctx):
        assert f_stable(fig1_ctx, eval_msd((2, 1), 3)) == 1
        assert multk_check(fig1_ctx, (2, 1), 1)
        assert multk_check(fig1_ctx, (2, 1), 0)

    def test_multk_preconditions(self, fig1_ctx):
        with pytest.raises(ValueError):
            multk_check(fig1_ctx, (2,), 1)
        with pytest.raises(ValueError):
            multk_check(fig1_ctx, (0,), 1)


class TestSingleState:
    def ctx(self, digit=None):
        return CycleContext.build(Automaton.build(2, 1, [0], [0], [(0, 0, 0), (0, 1, 0)]), 0, digit)

    def test_beta_alpha(self):
        ctx = self.ctx()
        assert beta(ctx) <= 2
        assert alpha(ctx) == 3

    def test_everything_accepted(self):
        # X = N and a = 0: no value goes negative, so every candidate passes
        ctx = self.ctx(digit=0)
        for m in range(1, 100):
            assert f_stable(ctx, m) == 2 ** len(canonical_expansion(m, 2))

    def test_negative_values_limit_f(self):
        # with a = 1, n = 2 and v = 00 give 2 - 3 + 0 < 0, which counts as outside X
        ctx = self.ctx(digit=1)
        value, trace = f_r(ctx, 2, ctx.M)
        assert value == 2
        assert trace.negative_only
        assert trace.rejected[0].value == -1


class TestOracles:
    def test_condition_check_vs_enumeration(self, contexts):
        rng = random.Random(42)
        for t in range(200):
            ctx = contexts[t % len(contexts)]
            ms = members(ctx, 300)
            if not ms:
                continue
            m = rng.choice(ms)
            imax = len(canonical_expansion(m, ctx.k))
            i = rng.randint(0, imax)
            r = rng.randint(0, max(0, 6 - i))
            fast = condition_check(ctx, m, i, r)
            slow = condition_check(ctx, m, i, r, oracle=True)
            assert fast[0] == slow[0]
            if not fast[0]:
                # both report the shortest, lexicographically least counterexample
                assert fast[1] == slow[1]

    def test_f_r_vs_definition(self, contexts):
        for ctx in contexts[:12]:
            for m in members(ctx, 60)[:8]:
                for R in range(3):
                    assert f_r(ctx, m, R)[0] == brute_f(ctx, m, R), (ctx, m, R)

    def test_f_values_matches_exponent(self, contexts):
        for ctx in contexts:
            for m in members(ctx, 150):
                vals = f_values(ctx, m, 6)
                assert vals == [ctx.k ** f_exponent(ctx, m, R) for R in range(7)]

    def test_zero_candidate_passes_short_side(self, contexts):
        # with i = 0 only the j <= r words are tested
        for ctx in contexts:
            for m in members(ctx, 80):
                e4 = ctx.engine.short_fail_r(m, 4)
                for r in range(5):
                    ok, _ = condition_check(ctx, m, 0, r)
                    assert ok == (e4 is None or e4 > r)


class TestInvariants:
    def test_monotone_and_stable(self, contexts):
        for ctx in contexts:
            for m in members(ctx, 200):
                vals = f_values(ctx, m, ctx.M + 3)
                assert all(v >= 1 for v in vals)
                assert all(vals[R + 1] <= vals[R] for R in range(len(vals) - 1))
                assert len(set(vals[ctx.M:])) == 1

    def test_trace_exponent_bound(self, contexts):
        for ctx in contexts:
            for m in members(ctx, 100):
                value, trace = f_r(ctx, m, ctx.M)
                assert ctx.k ** (trace.accepted_exponent - 1) <= m
                assert value == ctx.k ** trace.accepted_exponent
                assert isinstance(trace.negative_only, bool)

    def test_power_bound(self, contexts):
        for ctx in contexts:
            k = ctx.k
            for m in members(ctx, 200):
                i = log_k(m, k) + (0 if k ** log_k(m, k) == m else 1)
                assert f_stable(ctx, m) <= k ** (i + 1)

    def test_lower_bound_from_a_run(self, contexts):
        for ctx in contexts:
            if ctx.a == 0:
                continue
            for length in range(1, 6):
                w = (ctx.a,) * length
                if ctx.in_L(w):
                    m = eval_msd(w, ctx.k)
                    assert f_stable(ctx, m) >= ctx.k ** (length - 1)

    def test_below_bound(self, contexts):
        for ctx in contexts:
            b = beta(ctx)
            for m in members(ctx, 1000):
                assert f_stable(ctx, m) * ctx.k ** b >= v_ka(m, ctx.k, ctx.a)

    def test_multk_random(self, contexts):
        rng = random.Random(43)
        checked = 0
        for ctx in contexts:
            words = [w for length in range(1, 6) for w in product(range(ctx.k), repeat=length)
                     if w[0] != 0 and ctx.in_L(w)]
            for _ in range(10):
                if words:
                    assert multk_check(ctx, rng.choice(words), rng.randint(0, 3))
                    checked += 1
        assert checked >= 200

    def test_n_prime_witness(self, contexts):
        for ctx in contexts[:6]:
            for m in members(ctx, 150):
                if f_stable(ctx, m) > v_ka(m, ctx.k, ctx.a):
                    w = n_prime_witness(ctx, m)
                    assert w is not None
                    assert f_stable(ctx, w) >= f_stable(ctx, m)
                    assert v_ka(w, ctx.k, ctx.a) == v_ka(m, ctx.k, ctx.a)


class TestVka:
    def test_examples(self):
        assert v_ka(22, 3, 1) == 9
        assert v_ka(24, 2, 0) == 8 == v_k(24, 2)
        assert v_ka(23, 3, 1) == 1

    def test_zero(self):
        with pytest.raises(ValueError):
            v_ka(0, 2, 1)

    @given(st.integers(1, 10 ** 9), st.integers(2, 10))
    def test_v_k_divides(self, m, k):
        v = v_k(m, k)
        assert m % v == 0 and (m // v) % k != 0

    @given(st.integers(1, 10 ** 6), st.integers(2, 5), st.data())
    def test_suffix_length(self, m, k, data):
        a = data.draw(st.integers(0, k - 1))
        w = canonical_expansion(m, k)
        i = 0
        while i < len(w) and w[len(w) - 1 - i] == a:
            i += 1
        assert v_ka(m, k, a) == k ** i


class TestKaEquivalence:
    def test_examples(self):
        assert ka_equivalent(22, 22, 3, 1)
        assert ka_equivalent(22, 67, 3, 1)
        assert ka_equivalent(67, 22, 3, 1)
        assert not ka_equivalent(22, 23, 3, 1)

    def test_equivalence_relation(self):
        rng = random.Random(44)
        k, a = 3, 1
        for _ in range(1000):
            base = rng.randint(1, 500)
            chain = [base]
            for _ in range(3):
                chain.append(k * chain[-1] + a)
            n1, n2, n3 = rng.choice(chain), rng.choice(chain), rng.choice(chain)
            assert ka_equivalent(n1, n2, k, a) and ka_equivalent(n2, n3, k, a)
            assert ka_equivalent(n1, n3, k, a)
            other = rng.randint(1, 500)
            assert ka_equivalent(n1, other, k, a) == ka_equivalent(other, n1, k, a)

    def test_matches_definition(self):
        k, a = 2, 1
        for n1 in range(1, 80):
            for n2 in range(1, 80):
                direct = any(n1 == k ** i * n2 + (k ** i - 1) * a // (k - 1) or
                             n2 == k ** i * n1 + (k ** i - 1) * a // (k - 1) for i in range(8))
                assert ka_equivalent(n1, n2, k, a) == direct


class TestTilde:
    def test_closure_under_k(self, fig1_ctx):
        for m in range(1, 5001):
            if tilde_member(fig1_ctx, m):
                assert tilde_member(fig1_ctx, 3 * m)

    def test_growth(self, fig1_ctx):
        for m in range(1, 5001):
            if tilde_member(fig1_ctx, m):
                assert tilde_f(fig1_ctx, 3 * m) >= 3 * tilde_f(fig1_ctx, m)

    def test_zero_digit_case(self):
        ctx, _ = CycleContext.normalize(Automaton.build(2, 2, [0], [0],
                                                        [(0, 0, 0), (0, 1, 1), (1, 1, 1), (1, 0, 0)]), 0)
        assert ctx.a == 0
        for m in range(1, 300):
            assert tilde_member(ctx, m) == ctx.in_X(m)
            if ctx.in_X(m):
                assert tilde_f(ctx, m) == f_stable(ctx, m)

    def test_errors(self, fig1_ctx):
        with pytest.raises(ValueError):
            tilde_member(fig1_ctx, 0)
        non = next(m for m in range(1, 100) if not tilde_member(fig1_ctx, m))
        with pytest.raises(ValueError):
            tilde_f(fig1_ctx, non)


class TestShiftLemma:
    """Same-length words at distance P agreeing on L forces P-periodicity on a window."""

    def test_constructed_instances(self):
        rng = random.Random(45)
        found = 0
        for _ in range(60):
            ctx = random_context(rng, max_states=3)
            if ctx.case != CASE_I:
                continue
            k = ctx.k
            for P in range(1, 9):
                for Mp in range(2, 7):
                    if not _same_length_agree(ctx, P, Mp):
                        continue
                    found += 1
                    for m in range(k * P, k ** Mp - P):
                        assert ctx.in_X(m) == ctx.in_X(m + P)
        assert found >= 10


def _same_length_agree(ctx, P, Mp):
    k = ctx.k
    for length in range(1, Mp + 1):
        for v0 in range(k ** length - P):
            v = _pad(v0, k, length)
            w = _pad(v0 + P, k, length)
            if ctx.in_L(v) != ctx.in_L(w):
                return False
    return True


def _pad(m, k, length):
    w = canonical_expansion(m, k)
    return (0,) * (length - len(w)) + w


class TestRatioSet:
    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["fig1", "evil"])
    def test_stable_between_ranges(self, name):
        if name == "fig1":
            ctx = CycleContext.build(fig1(), 2)
        else:
            ctx, _ = CycleContext.normalize(evil(), 0)
        k, a = ctx.k, ctx.a

        def ratios(top):
            return {f_exponent(ctx, m, ctx.M) - log_k(v_ka(m, k, a), k)
                    for m in range(1, top + 1) if ctx.in_X(m)}

        small, large = ratios(10 ** 4), ratios(10 ** 5)
        assert small == large
        assert len(large) <= ctx.n_states * beta(ctx)


class TestConstructG:
    def test_evil(self):
        ctx, _ = CycleContext.normalize(evil(), 0)
        res = construct_g(ctx, N=2000)
        assert res.P is not None and res.P <= 8
        assert res.equal and res.upper_ok
        assert res.table[0] == (0, 1, None)

    def test_fig1_cycle(self):
        ctx = CycleContext.build(fig1_cycle(), 2)
        res = construct_g(ctx, N=2000)
        assert res.equal and res.upper_ok

    def test_upper_bound_with_small_P(self):
        ctx, _ = CycleContext.normalize(evil(), 0)
        res = construct_g(ctx, P=1, N=500)
        assert res.upper_ok
        assert all(g <= v for _, g, v in res.table[1:])

    def test_hypotheses_checked(self):
        # multiples of three are periodic, so the construction refuses them
        a = Automaton.build(2, 3, [0], [0], [(r, d, (2 * r + d) % 3) for r in range(3) for d in range(2)])
        ctx, _ = CycleContext.normalize(a, 0)
        with pytest.raises(ContextError):
            construct_g(ctx, N=100)


class TestGrowthProbe:
    def test_dense_and_sparse(self):
        assert growth_nonsparse(range(1, 5000), 2, 4999)
        assert not growth_nonsparse([2 ** i for i in range(13)], 2, 4999)
        assert not growth_nonsparse([], 3, 1000)
