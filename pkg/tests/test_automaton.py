import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kdichotomy import automaton as am
from kdichotomy.automaton import Automaton, AutomatonError
from kdichotomy.corpus import fig1, mult3, pow2, random_dfa

from conftest import dfas, language, nfas, random_nfa

ORACLE_LEN = 8


def one_zero_star_with_junk():
    # 1·0* plus an unreachable state
    return Automaton.build(2, 3, [0], [1], [(0, 1, 1), (1, 0, 1), (2, 0, 1), (2, 1, 2)])


class TestBasics:
    def test_symbols_out_of_range(self):
        with pytest.raises(AutomatonError):
            Automaton.build(3, 2, [0], [1], [(0, 3, 1)])

    def test_multitrack_symbols_pack(self):
        a = Automaton.build(2, 1, [0], [0], [(0, (1, 0), 0)], tracks=2)
        assert a.accepts([am.pack((1, 0), 2)])
        assert am.unpack(am.pack((1, 0), 2), 2, 2) == (1, 0)

    def test_incompatible_radix(self):
        with pytest.raises(AutomatonError):
            am.boolean_combine(pow2(), am.universal_automaton(3), "union")


class TestDeterminize:
    def test_two_initial_states_accepting_epsilon(self):
        a = Automaton.build(2, 2, [0, 1], [0, 1], [])
        d = am.determinize(a)
        assert d.deterministic and d.accepts(())

    def test_reverse_of_fig1(self):
        a = fig1()
        d = am.determinize(am.reverse(a))
        for w in am.words_upto(3, ORACLE_LEN):
            assert d.accepts(w) == a.accepts(tuple(reversed(w)))

    def test_already_deterministic(self):
        assert am.equivalent(fig1(), am.determinize(fig1()))

    @settings(max_examples=100, deadline=None)
    @given(nfas())
    def test_language_and_completeness(self, a):
        d = am.determinize(a)
        assert d.deterministic and d.is_complete()
        assert language(d, 6) == language(a, 6)


class TestMinimize:
    def test_one_zero_star_has_two_states(self):
        assert am.minimize(one_zero_star_with_junk()).n_states == 2

    def test_myhill_nerode_count(self):
        # brute-force residual classes over short words agree with the minimal state count
        a = one_zero_star_with_junk()
        words = list(am.words_upto(2, 6))
        sigs = {tuple(a.accepts(u + v) for v in am.words_upto(2, 4)) for u in words}
        live = {s for s in sigs if any(s)}
        assert am.minimize(a).n_states == len(live)

    def test_empty_language(self):
        a = Automaton.build(2, 2, [0], [], [(0, 0, 1), (1, 1, 0)])
        m = am.minimize(a)
        assert not m.finals
        assert am.is_empty(m)

    @settings(max_examples=100, deadline=None)
    @given(nfas())
    def test_idempotent_and_equivalent(self, a):
        m = am.minimize(a)
        assert m.deterministic
        assert am.minimize(m).n_states == m.n_states
        assert language(m, 6) == language(a, 6)
        assert am.equivalent(m, a)

    @settings(max_examples=100, deadline=None)
    @given(dfas())
    def test_never_larger_than_input_dfa(self, a):
        m = am.minimize(a)
        assert m.n_states <= a.n_states
        # trim: every state except possibly an empty-language start is useful
        if m.finals:
            assert am.coreachable(m) == set(range(m.n_states))


class TestBooleanCombine:
    def test_iff_self_is_universal(self):
        u = am.boolean_combine(fig1(), fig1(), "iff")
        assert am.equivalent(u, am.universal_automaton(3))

    def test_iff_state_bound(self):
        rng = random.Random(3)
        for _ in range(50):
            a1 = random_dfa(rng, 2, 3)
            a2 = random_dfa(rng, 2, 4)
            assert am.boolean_combine(a1, a2, "iff").n_states <= 12

    def test_evens_and_odds_disjoint(self):
        evens = Automaton.build(2, 2, [0], [0], [(q, d, d) for q in range(2) for d in range(2)])
        odds = evens.with_ends(finals=[1])
        assert am.is_empty(am.boolean_combine(evens, odds, "intersect"))

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_ops_vs_oracle(self, data):
        a1 = data.draw(nfas(radices=(2,)))
        a2 = data.draw(nfas(radices=(2,)))
        l1, l2 = language(a1, 6), language(a2, 6)
        words = set(am.words_upto(2, 6))
        expect = {"union": l1 | l2, "intersect": l1 & l2, "difference": l1 - l2,
                  "iff": {w for w in words if (w in l1) == (w in l2)}}
        for op, want in expect.items():
            assert language(am.boolean_combine(a1, a2, op), 6) == want

    def test_unknown_op(self):
        with pytest.raises(AutomatonError):
            am.boolean_combine(pow2(), pow2(), "xor")


class TestLeftQuotient:
    def test_empty_prefix(self):
        assert am.equivalent(am.left_quotient(fig1(), ()), fig1())

    def test_state_bound(self):
        rng = random.Random(4)
        a = random_dfa(rng, 2, 5)
        assert am.left_quotient(a, (1, 0)).n_states <= 6

    def test_multiples_of_three_after_one(self):
        q = am.left_quotient(mult3(), (1,))
        for w in am.words_upto(2, 10):
            value = int("1" + "".join(map(str, w)), 2)
            assert q.accepts(w) == (value % 3 == 0)

    def test_fresh_start_final_iff_prefix_accepted(self):
        q = am.left_quotient(mult3(), (1, 1))
        assert q.accepts(())
        assert not am.left_quotient(mult3(), (1,)).accepts(())


class TestReverseConcat:
    def test_reverse_one_zero_star(self):
        r = am.reverse(pow2())
        zero_star_one = Automaton.build(2, 2, [0], [1], [(0, 0, 0), (0, 1, 1)])
        assert am.equivalent(r, zero_star_one)

    @settings(max_examples=100, deadline=None)
    @given(nfas())
    def test_double_reverse(self, a):
        assert am.equivalent(am.reverse(am.reverse(a)), a)

    def test_random_reverse(self):
        rng = random.Random(5)
        for _ in range(20):
            a = random_nfa(rng, 2, 4)
            r = am.reverse(a)
            for w in am.words_upto(2, ORACLE_LEN):
                assert r.accepts(w) == a.accepts(tuple(reversed(w)))

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_concat_vs_oracle(self, data):
        a1 = data.draw(nfas(max_states=3, radices=(2,)))
        a2 = data.draw(nfas(max_states=3, radices=(2,)))
        l1, l2 = language(a1, 5), language(a2, 5)
        want = {u + v for u in l1 for v in l2 if len(u + v) <= 5}
        assert language(am.concat(a1, a2), 5) == want


class TestStructure:
    def test_fig1_components(self):
        scc = am.scc_decompose(fig1())
        comps = {frozenset(c) for c in scc.components}
        assert comps == {frozenset({0}), frozenset({1, 2})}
        assert scc.leaf_flags[scc.component_of[1]]
        assert not scc.leaf_flags[scc.component_of[0]]

    def test_single_loop(self):
        a = Automaton.build(2, 1, [0], [0], [(0, 0, 0)])
        scc = am.scc_decompose(a)
        assert len(scc.components) == 1 and scc.leaf_flags == [True]

    def test_dag(self):
        a = Automaton.build(2, 3, [0], [2], [(0, 0, 1), (1, 1, 2), (0, 1, 2)])
        scc = am.scc_decompose(a)
        assert all(len(c) == 1 for c in scc.components)

    @settings(max_examples=100, deadline=None)
    @given(nfas(max_states=5))
    def test_partition_and_acyclic(self, a):
        scc = am.scc_decompose(a)
        seen = sorted(q for c in scc.components for q in c)
        assert seen == list(range(a.n_states))
        # topological order: condensation edges go forward
        for c, succ in scc.condensation.items():
            assert all(d > c for d in succ)
            assert scc.leaf_flags[c] == (not succ)

    def test_fig1_cycle_language(self):
        L = am.path_language(fig1(), 2, 2)
        for w in [(), (0,), (1,), (2, 1), (2, 0, 1)]:
            assert L.accepts(w)
        assert not L.accepts((2,))

    def test_trivial_cycle_language(self):
        a = Automaton.build(2, 2, [0], [1], [(0, 1, 1)])
        assert language(am.path_language(a, 0, 0), 6) == {()}

    def test_cycle_language_closed_under_concatenation(self):
        rng = random.Random(6)
        L = am.path_language(fig1(), 2, 2)
        words = sorted(language(L, 5))
        for _ in range(200):
            u, v = rng.choice(words), rng.choice(words)
            assert L.accepts(u + v)

    def test_invalid_path_states(self):
        with pytest.raises(AutomatonError):
            am.path_language(fig1(), 0, 7)

    def test_induced_full(self):
        a = fig1()
        sub = am.induced_subautomaton(a, range(3))
        assert sub.initial >= a.initial and sub.delta == a.delta

    def test_induced_fig1_leaf(self):
        sub = am.induced_subautomaton(fig1(), {1, 2})
        # q2 (index 1 in the subautomaton) is entered from q0
        assert 1 in sub.initial

    def test_induced_isolated(self):
        a = Automaton.build(2, 3, [0], [0], [(0, 0, 0), (1, 0, 2)])
        assert am.induced_subautomaton(a, {1, 2}).initial == frozenset()

    def test_idempotent_words(self):
        assert am.is_idempotent_word(fig1(), ())
        assert am.is_idempotent_word(fig1(), (0,))
        parity = Automaton.build(2, 2, [0], [0], [(0, 1, 1), (1, 1, 0), (0, 0, 0), (1, 0, 1)])
        assert not am.is_idempotent_word(parity, (1,))


class TestLanguageQueries:
    def test_equivalent_examples(self):
        a = fig1()
        assert am.equivalent(a, a)
        w0 = next(w for w in am.words_upto(3, 4) if not a.accepts(w))
        bigger = am.union_nfa([a, am.word_automaton(w0, 3)])
        assert not am.equivalent(a, bigger)

    def test_equivalent_vs_enumeration(self):
        rng = random.Random(7)
        for _ in range(50):
            a1, a2 = random_nfa(rng, 2, 3), random_nfa(rng, 2, 3)
            assert am.equivalent(a1, a2) == (language(a1, 10) == language(a2, 10))

    def test_finite_examples(self):
        assert am.is_finite_language(am.empty_automaton(2))
        zero_star = Automaton.build(2, 1, [0], [0], [(0, 0, 0)])
        assert not am.is_finite_language(zero_star)

    def test_finite_vs_pumping(self):
        rng = random.Random(8)
        for _ in range(100):
            a = am.minimize(random_nfa(rng, 2, 3))
            n = a.n_states
            long_word = any(a.accepts(w) for w in am.words_upto(2, 2 * n) if len(w) >= n)
            assert am.is_finite_language(a) == (not long_word)

    def test_count_examples(self):
        assert am.count_words_upto(am.universal_automaton(2), 3) == 15
        assert am.count_words_upto(pow2(), 5) == 5

    def test_count_vs_enumeration(self):
        rng = random.Random(9)
        for _ in range(30):
            a = random_dfa(rng, 2, 4, partial=0.2)
            assert am.count_words_upto(a, 12) == len(language(a, 12))

    def test_shortest_word(self):
        assert am.shortest_word(pow2()) == (1,)
        assert am.shortest_word(am.empty_automaton(2)) is None
        assert am.shortest_word(mult3()) == ()


class TestSparse:
    def test_examples(self):
        assert am.is_sparse(pow2())
        assert not am.is_sparse(am.universal_automaton(2))
        assert am.is_sparse(am.empty_automaton(2))

    def test_useless_dense_part_is_ignored(self):
        # dense component that can never reach a final state
        a = Automaton.build(2, 3, [0], [1], [(0, 1, 1), (0, 0, 2), (2, 0, 2), (2, 1, 2)])
        assert am.is_sparse(a)

    @settings(max_examples=100, deadline=None)
    @given(dfas(max_states=3, radices=(2,)))
    def test_growth_dichotomy(self, a):
        counts = [am.count_words_upto(a, n) for n in (12, 24)]
        if am.is_sparse(a):
            assert counts[1] <= 25 ** a.n_states
            # polynomial: doubling n multiplies the count by at most 2^degree
            assert counts[1] <= max(1, counts[0]) * 2 ** a.n_states
        else:
            assert counts[1] >= 1.05 ** 24


class TestBlockTransform:
    @settings(max_examples=50, deadline=None)
    @given(dfas(max_states=3), st.integers(2, 3))
    def test_block_words(self, a, i):
        b = am.block_transform(a, i)
        k = a.radix
        for w in am.words_upto(k ** i, 2):
            flat = tuple(d for sym in w for d in _digits(sym, k, i))
            assert b.accepts(w) == a.accepts(flat)

    def test_rejects_zero(self):
        with pytest.raises(AutomatonError):
            am.block_transform(pow2(), 0)


def _digits(sym, k, i):
    out = []
    for _ in range(i):
        sym, d = divmod(sym, k)
        out.append(d)
    return reversed(out)
