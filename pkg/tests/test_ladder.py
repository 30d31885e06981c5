import random

import pytest

from kdichotomy.corpus import fig1, random_context
from kdichotomy.ffunc import CycleContext, f_r
from kdichotomy.logic import Var, compile_formula, eval_formula_bounded
from kdichotomy.logic.compile import relation_values
from kdichotomy.logic.ladder import Ladder

n, z, x, y = Var("n"), Var("z"), Var("x"), Var("y")


@pytest.fixture(scope="module")
def fig1_ctx():
    return CycleContext.build(fig1(), 2)


def ladder_for(ctx, literal=False):
    return Ladder(ctx.k, ctx.a, ctx.case, literal=literal)


def bounded(f, env, ctx, bound):
    return eval_formula_bounded(f, env, bound=bound, sets={"X": ctx.X})


@pytest.mark.parametrize("R", [0, 1, 2])
def test_acceptance_predicate_fig1(fig1_ctx, R):
    f = ladder_for(fig1_ctx).A_upto(R, n, z)
    got = [w for w in (1, 3, 9) if bounded(f, {"n": 22, "z": w}, fig1_ctx, 3 ** 8)]
    assert got == [1, 3]


def test_f_graph_fig1(fig1_ctx):
    f = ladder_for(fig1_ctx).F_graph(1, n, z)
    for m, want in [(22, 3), (4, 9), (13, 27), (31, 9)]:
        hits = [w for w in (1, 3, 9, 27, 81) if bounded(f, {"n": m, "z": w}, fig1_ctx, 3 ** 8)]
        assert hits == [want]


def test_ell_macros(fig1_ctx):
    lad = ladder_for(fig1_ctx)
    g = lad.ell_graph(x, y)
    for v in range(30):
        ys = [w for w in (1, 3, 9, 27, 81) if bounded(g, {"x": v, "y": w}, fig1_ctx, 100)]
        want = 1
        while want <= v:
            want *= 3
        assert ys == [want]


def test_literal_and_shortcut_agree(fig1_ctx):
    fast = ladder_for(fig1_ctx).F_graph(1, n, z)
    slow = ladder_for(fig1_ctx, literal=True).F_graph(1, n, z)
    for m in (4, 22):
        for w in (1, 3, 9):
            env = {"n": m, "z": w}
            assert bounded(fast, env, fig1_ctx, 3 ** 6) == bounded(slow, env, fig1_ctx, 3 ** 6)


def test_compiled_f_graph(fig1_ctx):
    rel = compile_formula(ladder_for(fig1_ctx).F_graph(1, n, z), {"X": fig1_ctx.X})
    graph = dict(relation_values(rel, 40))
    for m, w in graph.items():
        assert f_r(fig1_ctx, m, 1)[0] == w
    members = [m for m in range(1, 41) if fig1_ctx.in_X(m)]
    assert sorted(graph) == [m for m in members if f_r(fig1_ctx, m, 1)[0] <= 40]


def test_case_three_rejected():
    with pytest.raises(ValueError):
        Ladder(2, 1, "III")


def test_random_contexts_vs_direct():
    rng = random.Random(31)
    for _ in range(8):
        ctx = random_context(rng, max_states=3)
        lad = ladder_for(ctx)
        k = ctx.k
        for R in (0, 1):
            f = lad.F_graph(R, n, z)
            members = [m for m in range(1, 25) if ctx.in_X(m)][:5]
            for m in members:
                want = f_r(ctx, m, R)[0]
                top = k * m
                cands = [k ** e for e in range(10) if k ** e <= top]
                bound = k ** (R + 2) * top * k
                hits = [w for w in cands if bounded(f, {"n": m, "z": w}, ctx, bound)]
                assert hits == [want], (ctx, m, R)
