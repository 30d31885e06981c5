"""S-expression surface syntax for formulas.

    (forall n (implies (>= n N) (iff (in n X) (in (+ n p) X))))

Formulas: true false (not F) (and F ...) (or F ...) (implies F G) (iff F G)
(exists v F) (forall v F) (= s t) (!= s t) (< s t) (<= s t) (> s t) (>= s t)
(in t X) (powk t) (mod t r m).
Terms: integers, variables, (+ t ...), (- s t), (* c t).
"""
from __future__ import annotations

import re
from itertools import count

from . import formula as fm

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


class SexprError(ValueError):
    pass


def tokenize(text: str) -> list[tuple[int, str]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SexprError(f"unexpected character at offset {pos}")
        tok = m.group(1) or m.group(2) or m.group(3)
        out.append((m.start(m.lastindex), tok))
        pos = m.end()
    return out


def read(text: str):
    toks = tokenize(text)
    if not toks:
        raise SexprError("empty input")
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(toks):
            raise SexprError("unexpected end of input")
        off, tok = toks[pos]
        pos += 1
        if tok == "(":
            items = []
            while True:
                if pos >= len(toks):
                    raise SexprError(f"unclosed '(' at offset {off}")
                if toks[pos][1] == ")":
                    pos += 1
                    return items
                items.append(parse())
        if tok == ")":
            raise SexprError(f"unexpected ')' at offset {off}")
        return tok

    tree = parse()
    if pos != len(toks):
        raise SexprError(f"trailing input at offset {toks[pos][0]}")
    return tree


_MOD_NAMES = count()

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")


def _ident(tok) -> str:
    if not isinstance(tok, str) or not _IDENT.match(tok):
        raise SexprError(f"expected identifier, got {tok!r}")
    return tok


def to_term(node) -> fm.Term:
    if isinstance(node, str):
        if node.isdigit():
            return fm.Const(int(node))
        return fm.Var(_ident(node))
    if not node:
        raise SexprError("empty term")
    head, args = node[0], node[1:]
    if head == "+":
        if len(args) < 2:
            raise SexprError("'+' needs at least two arguments")
        return fm.plus(*[to_term(a) for a in args])
    if head == "-":
        if len(args) != 2:
            raise SexprError("'-' takes two arguments")
        return fm.Sub(to_term(args[0]), to_term(args[1]))
    if head == "*":
        if len(args) != 2 or not isinstance(args[0], str) or not args[0].isdigit():
            raise SexprError("'*' takes a constant and a term")
        return fm.Mul(int(args[0]), to_term(args[1]))
    raise SexprError(f"unknown term operator {head!r}")


_CMP = {"=": fm.eq, "!=": fm.ne, "<": fm.lt, "<=": fm.le, ">": fm.gt, ">=": fm.ge}


def to_formula(node) -> fm.Formula:
    if node == "true":
        return fm.TrueF()
    if node == "false":
        return fm.FalseF()
    if isinstance(node, str) or not node:
        raise SexprError(f"expected a formula, got {node!r}")
    head, args = node[0], node[1:]

    def arity(n):
        if len(args) != n:
            raise SexprError(f"'{head}' takes {n} arguments, got {len(args)}")

    if head in _CMP:
        arity(2)
        return _CMP[head](to_term(args[0]), to_term(args[1]))
    if head == "in":
        arity(2)
        return fm.In(to_term(args[0]), _ident(args[1]))
    if head == "powk":
        arity(1)
        return fm.PowK(to_term(args[0]))
    if head == "mod":
        arity(3)
        r, m = args[1], args[2]
        if not (isinstance(r, str) and r.isdigit() and isinstance(m, str) and m.isdigit()):
            raise SexprError("'mod' takes a term and two constants")
        return fm.mod_eq(to_term(args[0]), int(r), int(m), fresh=f"_q{next(_MOD_NAMES)}")
    if head == "not":
        arity(1)
        return fm.Not(to_formula(args[0]))
    if head in ("and", "or"):
        parts = tuple(to_formula(a) for a in args)
        if not parts:
            return fm.TrueF() if head == "and" else fm.FalseF()
        return (fm.And if head == "and" else fm.Or)(parts) if len(parts) > 1 else parts[0]
    if head == "implies":
        arity(2)
        return fm.Implies(to_formula(args[0]), to_formula(args[1]))
    if head == "iff":
        arity(2)
        return fm.Iff(to_formula(args[0]), to_formula(args[1]))
    if head in ("exists", "forall"):
        arity(2)
        cls = fm.Exists if head == "exists" else fm.Forall
        return cls(_ident(args[0]), to_formula(args[1]))
    raise SexprError(f"unknown formula operator {head!r}")


def parse_formula(text: str) -> fm.Formula:
    return to_formula(read(text))


def term_to_sexpr(t) -> str:
    if isinstance(t, fm.Var):
        return t.name
    if isinstance(t, fm.Const):
        return str(t.value)
    if isinstance(t, fm.Add):
        return f"(+ {term_to_sexpr(t.left)} {term_to_sexpr(t.right)})"
    if isinstance(t, fm.Sub):
        return f"(- {term_to_sexpr(t.left)} {term_to_sexpr(t.right)})"
    if isinstance(t, fm.Mul):
        return f"(* {t.coef} {term_to_sexpr(t.term)})"
    raise TypeError(t)


def to_sexpr(f) -> str:
    if isinstance(f, fm.TrueF):
        return "true"
    if isinstance(f, fm.FalseF):
        return "false"
    if isinstance(f, fm.Eq):
        return f"(= {term_to_sexpr(f.left)} {term_to_sexpr(f.right)})"
    if isinstance(f, fm.Lt):
        return f"(< {term_to_sexpr(f.left)} {term_to_sexpr(f.right)})"
    if isinstance(f, fm.In):
        return f"(in {term_to_sexpr(f.term)} {f.set_name})"
    if isinstance(f, fm.PowK):
        return f"(powk {term_to_sexpr(f.term)})"
    if isinstance(f, fm.Not):
        return f"(not {to_sexpr(f.body)})"
    if isinstance(f, (fm.And, fm.Or)):
        head = "and" if isinstance(f, fm.And) else "or"
        return f"({head} " + " ".join(to_sexpr(p) for p in f.parts) + ")"
    if isinstance(f, fm.Implies):
        return f"(implies {to_sexpr(f.left)} {to_sexpr(f.right)})"
    if isinstance(f, fm.Iff):
        return f"(iff {to_sexpr(f.left)} {to_sexpr(f.right)})"
    if isinstance(f, (fm.Exists, fm.Forall)):
        head = "exists" if isinstance(f, fm.Exists) else "forall"
        return f"({head} {f.var} {to_sexpr(f.body)})"
    raise TypeError(f)
