"""Formula macros that define the approximation map F_R step by step.

Every macro returns a Formula over (N, +, <, X, PowK).  Bound variables get
fresh names from a shared :class:`Namer` so macros can be nested freely.

With ``literal=True`` the comparisons against ``ell(x)`` are spelled out
through the graph of ``ell``; otherwise the equivalent ``x < y`` (valid
whenever ``y`` is a power of k) is used, which keeps bounded evaluation fast.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import count

from .formula import (And, Const, Eq, Exists, Forall, Formula, Iff, Implies, In, Mul,
                      Or, PowK, Sub, Var, conj, ge, gt, le, lt, plus, term)


@dataclass
class Namer:
    prefix: str = "b"
    _c: count = field(default_factory=count)

    def __call__(self, hint: str = "") -> str:
        return f"{self.prefix}{hint}{next(self._c)}"


@dataclass
class Ladder:
    k: int
    a: int
    case: str            # "I" or "II"
    set_name: str = "X"
    literal: bool = False
    names: Namer = field(default_factory=Namer)

    def __post_init__(self):
        if self.case not in ("I", "II"):
            raise ValueError("the ladder is defined for cases I and II")

    # ell(x): least power of k strictly above x
    def ell_graph(self, x, y) -> Formula:
        x, y = term(x), term(y)
        p = self.names("p")
        P = Var(p)
        return And((PowK(y), Forall(p, Implies(PowK(P), Iff(gt(P, x), ge(P, y))))))

    def ell_le(self, x, y) -> Formula:
        """ell(x) <= y for a power y."""
        if not self.literal:
            return lt(x, y)
        u = self.names("u")
        return Exists(u, And((self.ell_graph(x, Var(u)), le(Var(u), y))))

    def ell_ge(self, x, z) -> Formula:
        """ell(x) >= z for a power z (and x >= 1)."""
        if not self.literal:
            return le(z, Mul(self.k, term(x)))
        u = self.names("u")
        return Exists(u, And((self.ell_graph(x, Var(u)), ge(Var(u), z))))

    def L(self, x, y) -> Formula:
        """There is a word v in L with value x and k^|v| = y."""
        x, y = term(x), term(y)
        if self.case == "I":
            return And((PowK(y), self.ell_le(x, y), In(x, self.set_name)))
        if self.literal:
            return And((self.ell_graph(x, y), In(x, self.set_name)))
        return And((self._ell_eq(x, y), In(x, self.set_name)))

    def _ell_eq(self, x, y) -> Formula:
        # y = ell(x) for a power y: x < y and k*x >= y, or x = 0 and y = 1
        return And((PowK(y), lt(x, y),
                    Or((ge(Mul(self.k, x), y), And((Eq(x, Const(0)), Eq(y, Const(1))))))))

    def a_graph(self, x, y, z) -> Formula:
        """z = [a^(i-j) 0^j]_k for x = k^i >= y = k^j."""
        x, y, z = term(x), term(y), term(z)
        return And((PowK(x), PowK(y), Eq(Mul(self.k - 1, z), Mul(self.a, Sub(x, y)))))

    def E_long(self, r: int, x, y, n) -> Formula:
        K = Const(self.k ** r)
        x, y, n = term(x), term(y), term(n)
        z = self.names("z")
        Z = Var(z)
        lhs = Exists(z, And((self.a_graph(y, K, Z),
                             In(Sub(plus(Mul(K.value, n), x), Z), self.set_name))))
        return And((self.ell_le(x, y), Iff(lhs, self.L(x, y))))

    def E_short(self, r: int, x, y, n) -> Formula:
        K = Const(self.k ** r)
        x, y, n = term(x), term(y), term(n)
        z = self.names("z")
        Z = Var(z)
        lhs = Exists(z, And((self.a_graph(K, y, Z), In(plus(Mul(K.value, n), Z, x), self.set_name))))
        return And((self.ell_le(x, y), Iff(lhs, self.L(x, y))))

    def E(self, r: int, x, y, n) -> Formula:
        K = Const(self.k ** r)
        y = term(y)
        return Or((And((gt(y, K), self.E_long(r, x, y, n))),
                   And((le(y, K), self.E_short(r, x, y, n)))))

    def A(self, r: int, n, z) -> Formula:
        n, z = term(n), term(z)
        x, y = self.names("x"), self.names("y")
        X, Y = Var(x), Var(y)
        inner = Forall(x, Implies(self.ell_le(X, Y), self.E(r, X, Y, n)))
        body = Forall(y, Implies(And((PowK(Y), le(Y, Mul(self.k ** r, z)))), inner))
        return And((PowK(z), self.ell_ge(n, z), body))

    def A_upto(self, R: int, n, z) -> Formula:
        return conj(*[self.A(r, n, z) for r in range(R + 1)])

    def F_graph(self, R: int, n, z) -> Formula:
        n, z = term(n), term(z)
        z2 = self.names("w")
        W = Var(z2)
        kn = Mul(self.k, n)
        best = Forall(z2, Implies(And((PowK(W), le(W, kn), self.A_upto(R, n, W))), le(W, z)))
        return And((PowK(z), le(z, kn), self.A_upto(R, n, z), best))
