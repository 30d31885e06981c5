"""Named example sets and seeded random generators used by tests and the CLI."""
from __future__ import annotations

import random
from importlib import resources

from . import automaton as am
from .automaton import Automaton
from .basek import BaseKSet
from .dichotomy import build_sigma_lmc
from .ffunc import CASE_I, CASE_II, CycleContext
from .textformat import parse_automaton


def fig1() -> Automaton:
    """Three states over base 3; the cycle of interest sits at state 2 with digit 1."""
    t = [(0, 0, 0), (0, 2, 0), (0, 1, 2),
         (1, 0, 1), (1, 2, 1), (1, 1, 2),
         (2, 0, 2), (2, 1, 2), (2, 2, 1)]
    return Automaton.build(3, 3, [0], [2], t)


def fig1_cycle() -> Automaton:
    return fig1().with_ends([2], [2])


def mult3() -> Automaton:
    t = [(r, d, (2 * r + d) % 3) for r in range(3) for d in range(2)]
    return Automaton.build(2, 3, [0], [0], t)


def pow2() -> Automaton:
    return Automaton.build(2, 2, [0], [1], [(0, 1, 1), (1, 0, 1)])


def evil() -> Automaton:
    """Numbers with an even count of 1-digits in binary."""
    return Automaton.build(2, 2, [0], [0], [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)])


def sigma_2_3_0() -> Automaton:
    return build_sigma_lmc(2, 3, 0, 2)


BUILDERS = {
    "fig1": fig1,
    "fig1_cycle": fig1_cycle,
    "mult3": mult3,
    "pow2": pow2,
    "evil": evil,
    "sigma_2_3_0": sigma_2_3_0,
}


def load(name: str) -> Automaton:
    """Read a bundled fixture file."""
    text = resources.files("kdichotomy").joinpath("data", f"{name}.aut").read_text()
    return parse_automaton(text, f"{name}.aut")


def named_set(name: str) -> BaseKSet:
    return BaseKSet(BUILDERS[name]())


NON_PERIODIC = ("fig1", "fig1_cycle", "evil", "pow2", "sigma_2_3_0")


# -- random generators --------------------------------------------------------

def random_dfa(rng: random.Random, k: int, n: int, partial: float = 0.0,
               final_prob: float = 0.5) -> Automaton:
    trans = []
    for q in range(n):
        for d in range(k):
            if rng.random() >= partial:
                trans.append((q, d, rng.randrange(n)))
    finals = [q for q in range(n) if rng.random() < final_prob]
    return Automaton.build(k, n, [0], finals, trans)


def random_idempotent_map(rng: random.Random, n: int) -> list[int]:
    image = rng.sample(range(n), rng.randint(1, n))
    out = [None] * n
    for q in image:
        out[q] = q
    for q in range(n):
        if out[q] is None:
            out[q] = rng.choice(image)
    return out


def random_normalized(rng: random.Random, k: int, n: int) -> tuple[Automaton, int]:
    """Random complete DFA where 0 and k-1 act idempotently and some digit loops at p."""
    while True:
        maps = {0: random_idempotent_map(rng, n), k - 1: random_idempotent_map(rng, n)}
        for d in range(1, k - 1):
            maps[d] = [rng.randrange(n) for _ in range(n)]
        p = rng.randrange(n)
        if not any(maps[d][p] == p for d in range(k)):
            continue
        trans = [(q, d, maps[d][q]) for q in range(n) for d in range(k)]
        return Automaton.build(k, n, [0], [p], trans), p


def random_context(rng: random.Random, k: int | None = None, max_states: int = 4,
                   nontrivial: bool = True) -> CycleContext:
    """Random normalized cycle context in case I or II."""
    while True:
        kk = k or rng.choice((2, 3))
        a, p = random_normalized(rng, kk, rng.randint(1, max_states))
        ctx = CycleContext.build(a, p)
        if ctx.case not in (CASE_I, CASE_II):
            continue
        if nontrivial and am.is_finite_language(ctx.automaton.with_ends([p], [p])):
            continue
        return ctx


def random_sigma_prefixed(rng: random.Random, k: int = 2) -> tuple[Automaton, tuple]:
    """w . Sigma_{l,m,c} with 1 <= l, m <= 4 and a short random prefix w."""
    ell, m = rng.randint(1, 4), rng.randint(1, 4)
    c = rng.randrange(m)
    w = tuple(rng.randrange(k) for _ in range(rng.randint(0, 3)))
    sigma = build_sigma_lmc(ell, m, c, k)
    return am.minimize(am.concat(am.word_automaton(w, k), sigma)), (w, ell, m, c)
