"""Direct semantic evaluation with quantifiers truncated to [0, B].

This is a cross-check oracle.  It agrees with the compiled decision whenever
every relevant witness is at most B.  Guards such as ``PowK(x)`` or
``x < t`` in front of a quantified body shrink the search domain.
"""
from __future__ import annotations

from typing import Mapping

from ..basek import BaseKSet, member
from .formula import (Add, And, Const, Eq, Exists, FalseF, Forall, Iff, Implies, In, Lt,
                      Mul, Not, Or, PowK, Sub, TrueF, Var, term_vars)


def eval_term(t, env) -> int | None:
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Add):
        a, b = eval_term(t.left, env), eval_term(t.right, env)
        return None if a is None or b is None else a + b
    if isinstance(t, Sub):
        a, b = eval_term(t.left, env), eval_term(t.right, env)
        if a is None or b is None or a < b:
            return None
        return a - b
    if isinstance(t, Mul):
        a = eval_term(t.term, env)
        return None if a is None else t.coef * a
    raise TypeError(f"not a term: {t!r}")


def _try_eval(t, env) -> int | None:
    try:
        return eval_term(t, env)
    except KeyError:  # mentions a variable bound further in
        return None


def _is_power(n: int, k: int) -> bool:
    if n < 1:
        return False
    while n % k == 0:
        n //= k
    return n == 1


class BoundedEvaluator:
    def __init__(self, bound: int, sets: Mapping[str, BaseKSet] | None = None, k: int = 2):
        self.B = bound
        self.sets = dict(sets or {})
        self.k = k
        self._powers = []
        p = 1
        while p <= bound:
            self._powers.append(p)
            p *= k

    def member(self, name, n):
        return member(self.sets[name], n)

    def domain(self, var, guards, env):
        """Candidate values for ``var`` given conjunctive guard atoms."""
        hi = self.B
        only_powers = False
        exact = None
        for g in guards:
            if isinstance(g, PowK) and g.term == Var(var):
                only_powers = True
            elif isinstance(g, Lt) and g.left == Var(var) and var not in term_vars(g.right):
                v = _try_eval(g.right, env)
                if v is not None:
                    hi = min(hi, v - 1)
            elif isinstance(g, Not) and isinstance(g.body, Lt) and g.body.right == Var(var) \
                    and var not in term_vars(g.body.left):
                v = _try_eval(g.body.left, env)
                if v is not None:
                    hi = min(hi, v)
            elif isinstance(g, Eq) and var not in term_vars(g.right):
                # x = t  or  c*x = t
                coef = 1 if g.left == Var(var) else (
                    g.left.coef if isinstance(g.left, Mul) and g.left.term == Var(var) else None)
                v = _try_eval(g.right, env) if coef else None
                if v is not None:
                    exact = v // coef if v % coef == 0 else -1
        if exact is not None:
            return [exact] if 0 <= exact <= hi else []
        if only_powers:
            return [p for p in self._powers if p <= hi]
        return range(0, hi + 1)

    def eval(self, f, env) -> bool:
        if isinstance(f, TrueF):
            return True
        if isinstance(f, FalseF):
            return False
        if isinstance(f, Eq):
            a, b = eval_term(f.left, env), eval_term(f.right, env)
            return a is not None and b is not None and a == b
        if isinstance(f, Lt):
            a, b = eval_term(f.left, env), eval_term(f.right, env)
            return a is not None and b is not None and a < b
        if isinstance(f, In):
            a = eval_term(f.term, env)
            return a is not None and self.member(f.set_name, a)
        if isinstance(f, PowK):
            a = eval_term(f.term, env)
            return a is not None and _is_power(a, self.k)
        if isinstance(f, Not):
            return not self.eval(f.body, env)
        if isinstance(f, And):
            return all(self.eval(p, env) for p in f.parts)
        if isinstance(f, Or):
            return any(self.eval(p, env) for p in f.parts)
        if isinstance(f, Implies):
            return (not self.eval(f.left, env)) or self.eval(f.right, env)
        if isinstance(f, Iff):
            return self.eval(f.left, env) == self.eval(f.right, env)
        if isinstance(f, Exists):
            guards = _conjuncts(f.body)
            for v in self.domain(f.var, guards, env):
                if self.eval(f.body, {**env, f.var: v}):
                    return True
            return False
        if isinstance(f, Forall):
            guards = _conjuncts(f.body.left) if isinstance(f.body, Implies) else []
            for v in self.domain(f.var, guards, env):
                if not self.eval(f.body, {**env, f.var: v}):
                    return False
            return True
        raise TypeError(f"not a formula: {f!r}")


def _conjuncts(f) -> list:
    if isinstance(f, And):
        out = []
        for p in f.parts:
            out += _conjuncts(p)
        return out
    return [f]


def eval_formula_bounded(f, env: Mapping[str, int] | None = None, bound: int = 500,
                         sets: Mapping[str, BaseKSet] | None = None, k: int | None = None) -> bool:
    if k is None:
        radices = {s.radix for s in (sets or {}).values()}
        k = radices.pop() if radices else 2
    return BoundedEvaluator(bound, sets, k).eval(f, dict(env or {}))
