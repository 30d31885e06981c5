"""First-order formulas over (N, +, <, constants, named sets, powers of k).

Terms are linear: variables, constants, sums, constant multiples and a
partial difference (``Sub(a, b)`` is undefined when ``a < b``).  An atom that
mentions an undefined term is false.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union


class ScopeError(ValueError):
    pass


# -- terms -------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("constants are natural numbers")


@dataclass(frozen=True)
class Add:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Sub:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Mul:
    coef: int
    term: "Term"

    def __post_init__(self):
        if self.coef < 0:
            raise ValueError("multiplier must be a natural number")


Term = Union[Var, Const, Add, Sub, Mul]


def term(x) -> Term:
    if isinstance(x, (Var, Const, Add, Sub, Mul)):
        return x
    if isinstance(x, int):
        return Const(x)
    if isinstance(x, str):
        return Var(x)
    raise TypeError(f"not a term: {x!r}")


def plus(*ts) -> Term:
    ts = [term(t) for t in ts]
    out = ts[0]
    for t in ts[1:]:
        out = Add(out, t)
    return out


# -- formulas ----------------------------------------------------------------

@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Lt:
    left: Term
    right: Term


@dataclass(frozen=True)
class In:
    term: Term
    set_name: str


@dataclass(frozen=True)
class PowK:
    term: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[TrueF, FalseF, Eq, Lt, In, PowK, Not, And, Or, Implies, Iff, Exists, Forall]
ATOMS = (TrueF, FalseF, Eq, Lt, In, PowK)


def conj(*fs) -> Formula:
    fs = [f for f in fs if not isinstance(f, TrueF)]
    if not fs:
        return TrueF()
    if len(fs) == 1:
        return fs[0]
    return And(tuple(fs))


def disj(*fs) -> Formula:
    fs = [f for f in fs if not isinstance(f, FalseF)]
    if not fs:
        return FalseF()
    if len(fs) == 1:
        return fs[0]
    return Or(tuple(fs))


# derived comparisons
def eq(a, b): return Eq(term(a), term(b))
def lt(a, b): return Lt(term(a), term(b))
def gt(a, b): return Lt(term(b), term(a))
def le(a, b): return Not(Lt(term(b), term(a)))
def ge(a, b): return Not(Lt(term(a), term(b)))
def ne(a, b): return Not(Eq(term(a), term(b)))
def member(t, name): return In(term(t), name)
def powk(t): return PowK(term(t))


def mod_eq(t, r: int, m: int, fresh: str = "_q") -> Formula:
    """``t == r (mod m)`` as an existential over the quotient."""
    if m < 1 or not 0 <= r < m:
        raise ValueError("need m >= 1 and 0 <= r < m")
    return Exists(fresh, Eq(term(t), plus(Mul(m, Var(fresh)), r)))


def exists(names, body) -> Formula:
    for n in reversed(list(names)):
        body = Exists(n, body)
    return body


def forall(names, body) -> Formula:
    for n in reversed(list(names)):
        body = Forall(n, body)
    return body


# -- traversal ---------------------------------------------------------------

def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    if isinstance(t, (Add, Sub)):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, Mul):
        return term_vars(t.term)
    raise TypeError(f"not a term: {t!r}")


def children(f: Formula) -> tuple:
    if isinstance(f, (Not,)):
        return (f.body,)
    if isinstance(f, (And, Or)):
        return tuple(f.parts)
    if isinstance(f, (Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, (Exists, Forall)):
        return (f.body,)
    return ()


def free_vars(f: Formula) -> set:
    if isinstance(f, (TrueF, FalseF)):
        return set()
    if isinstance(f, (Eq, Lt)):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, (In, PowK)):
        return term_vars(f.term)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    out = set()
    for c in children(f):
        out |= free_vars(c)
    return out


def set_names(f: Formula) -> set:
    if isinstance(f, In):
        return {f.set_name}
    out = set()
    for c in children(f):
        out |= set_names(c)
    return out


def check_scope(f: Formula) -> None:
    """Reject shadowing and names used both free and bound."""
    free = free_vars(f)

    def walk(g, bound):
        if isinstance(g, (Exists, Forall)):
            if g.var in bound:
                raise ScopeError(f"variable {g.var!r} rebound inside its own scope")
            if g.var in free:
                raise ScopeError(f"variable {g.var!r} occurs both free and bound")
            walk(g.body, bound | {g.var})
            return
        for c in children(g):
            walk(c, bound)

    walk(f, frozenset())


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in children(f))
