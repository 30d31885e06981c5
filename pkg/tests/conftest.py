import random
import sys

import pytest
from hypothesis import strategies as st

from kdichotomy import automaton as am
from kdichotomy.automaton import Automaton


def language(a: Automaton, n: int) -> set:
    """All accepted words of length <= n (brute-force oracle)."""
    return {w for w in am.words_upto(a.radix, n, a.tracks) if a.accepts(w)}


def random_nfa(rng: random.Random, k: int, n: int, density: float = 0.35,
               n_initial: int = 1) -> Automaton:
    trans = [(q, d, t) for q in range(n) for d in range(k) for t in range(n)
             if rng.random() < density / n * 2]
    initial = rng.sample(range(n), min(n_initial, n))
    finals = [q for q in range(n) if rng.random() < 0.4]
    return Automaton.build(k, n, initial, finals, trans)


@st.composite
def nfas(draw, max_states: int = 4, radices=(2, 3)):
    k = draw(st.sampled_from(radices))
    n = draw(st.integers(1, max_states))
    cells = [(q, d) for q in range(n) for d in range(k)]
    trans = []
    for q, d in cells:
        for t in draw(st.sets(st.integers(0, n - 1), max_size=2)):
            trans.append((q, d, t))
    initial = draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n))
    finals = draw(st.sets(st.integers(0, n - 1), max_size=n))
    return Automaton.build(k, n, initial, finals, trans)


@st.composite
def dfas(draw, max_states: int = 4, radices=(2, 3), partial: bool = True):
    k = draw(st.sampled_from(radices))
    n = draw(st.integers(1, max_states))
    trans = []
    for q in range(n):
        for d in range(k):
            t = draw(st.integers(-1 if partial else 0, n - 1))
            if t >= 0:
                trans.append((q, d, t))
    finals = draw(st.sets(st.integers(0, n - 1), max_size=n))
    return Automaton.build(k, n, [0], finals, trans)


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
