"""Command-line front end.

    kdichotomy classify data/evil.aut --json
    kdichotomy f fig1_cycle.aut --n 22
    kdichotomy decide --set X=mult3.aut '(exists p (and (> p 0) ...))'
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field

from . import automaton as am
from . import dichotomy as dc
from . import ffunc as ff
from . import verify
from .basek import BaseKSet, base_power_transform, enumerate_set, member, word_str
from .logic import compile as lc
from .logic.bounded import eval_formula_bounded
from .logic.sexpr import SexprError, parse_formula
from .textformat import FormatError, read_automaton

SCHEMA = 1

COMMANDS = ("classify", "member", "enum", "f", "vka", "periodic", "sparse", "sccs",
            "decide", "decompose", "verify-paper")


class CliError(Exception):
    pass


@dataclass
class CommandConfig:
    command: str
    inputs: list = field(default_factory=list)
    radix: int | None = None
    bound: int = dc.DEFAULT_BOUND
    upto: int = 100
    formula_bound: int | None = None
    json: bool = False
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise CliError(f"unknown command {self.command!r}")
        for name in ("bound", "upto"):
            if getattr(self, name) < 1:
                raise CliError(f"--{name} must be positive")
        if self.formula_bound is not None and self.formula_bound < 1:
            raise CliError("--formula-bound must be positive")


def parse_automaton_file(path) -> am.Automaton:
    try:
        return read_automaton(path)
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None


def _load_set(cfg: CommandConfig, path) -> BaseKSet:
    X = BaseKSet(parse_automaton_file(path))
    if cfg.radix and cfg.radix != X.radix:
        i, p = 1, X.radix
        while p < cfg.radix:
            p *= X.radix
            i += 1
        if p != cfg.radix:
            raise CliError(f"radix {cfg.radix} is not a power of {X.radix}")
        X = base_power_transform(X, i)
    return X


class Output:
    def __init__(self, as_json: bool, stream=None):
        self.as_json = as_json
        self.stream = stream or sys.stdout

    def emit(self, command: str, payload: dict, text: str):
        if self.as_json:
            print(json.dumps({"schema": SCHEMA, "command": command, **payload}, sort_keys=False),
                  file=self.stream)
        else:
            print(text, file=self.stream)


def _cmd_classify(cfg, out):
    X = _load_set(cfg, cfg.inputs[0])
    rep = dc.classify(X, bound=cfg.bound)
    lines = [f"verdict: {rep.verdict.value}"]
    if rep.periodicity_witness:
        lines.append(f"period {rep.periodicity_witness[0]} from {rep.periodicity_witness[1]}")
    if rep.failing_state is not None:
        lines.append(f"failing state: {rep.failing_state}" + (" (bound-limited)" if rep.bound_limited else ""))
    for r in rep.scc_evidence:
        cong = f" congruence m={r.congruence.m} l={r.congruence.ell}" if r.congruence else ""
        lines.append(f"  scc {list(r.states)} leaf={r.leaf} complete={r.complete} sparse={r.sparse}{cong}"
                     + (" exhausted" if r.exhausted else ""))
    out.emit("classify", rep.to_json(), "\n".join(lines))
    return rep.exit_code


def _cmd_member(cfg, out):
    X = _load_set(cfg, cfg.inputs[0])
    res = {n: member(X, n) for n in cfg.extra["numbers"]}
    out.emit("member", {"members": {str(n): v for n, v in res.items()}},
             "\n".join(f"{n}: {'yes' if v else 'no'}" for n, v in res.items()))
    return 0


def _cmd_enum(cfg, out):
    X = _load_set(cfg, cfg.inputs[0])
    vals = enumerate_set(X, cfg.upto)
    out.emit("enum", {"upto": cfg.upto, "values": vals}, " ".join(map(str, vals)))
    return 0


def _context(cfg, a: am.Automaton) -> ff.CycleContext:
    p = cfg.extra.get("state")
    if p is None:
        if len(a.initial) == 1 and a.initial <= a.finals:
            (p,) = a.initial
        else:
            raise CliError("pick the cycle state with --p")
    if cfg.extra.get("normalize"):
        ctx, i = ff.CycleContext.normalize(a, p)
        return ctx
    return ff.CycleContext.build(a, p, cfg.extra.get("digit"))


def _cmd_f(cfg, out):
    a = parse_automaton_file(cfg.inputs[0])
    ctx = _context(cfg, a)
    rows = []
    for n in cfg.extra["n"]:
        R = cfg.extra.get("R")
        R = ctx.M if R is None else R
        value, trace = ff.f_r(ctx, n, R)
        vka = ff.v_ka(n, ctx.k, ctx.a) if n >= 1 else None
        rows.append({"n": n, "F": value, "Vka": vka,
                     "trace": {"rejected": [{"i": w.i, "r": w.r, "v": word_str(w.v), "side": w.side,
                                             "value": w.value} for w in trace.rejected],
                               "values": trace.to_json()["values"],
                               "negative_only": trace.negative_only}})
    if cfg.json:
        for row in rows:
            print(json.dumps({"schema": SCHEMA, "command": "f", **row}))
    else:
        print(f"context: k={ctx.k} p={ctx.p} a={ctx.a} case={ctx.case} M={ctx.M}")
        for row in rows:
            rej = ", ".join(f"i={w['i']} r={w['r']} v={w['v'] or 'eps'} ({w['side']}, value {w['value']})"
                            for w in row["trace"]["rejected"])
            print(f"n={row['n']} F={row['F']} Vka={row['Vka']}" + (f"  rejected: {rej}" if rej else ""))
    return 0


def _cmd_vka(cfg, out):
    k, a = cfg.extra["k"], cfg.extra["a"]
    res = {n: ff.v_ka(n, k, a) for n in cfg.extra["numbers"]}
    out.emit("vka", {"k": k, "a": a, "values": {str(n): v for n, v in res.items()}},
             "\n".join(f"{n}: {v}" for n, v in res.items()))
    return 0


def _cmd_periodic(cfg, out):
    X = _load_set(cfg, cfg.inputs[0])
    ok, wit = lc.is_eventually_periodic(X)
    text = f"eventually periodic: period {wit[0]} from {wit[1]}" if ok else "not eventually periodic"
    out.emit("periodic", {"periodic": ok, "witness": list(wit) if wit else None}, text)
    return 0 if ok else 1


def _cmd_sparse(cfg, out):
    a = parse_automaton_file(cfg.inputs[0])
    s = am.is_sparse(a)
    out.emit("sparse", {"sparse": s}, "sparse" if s else "not sparse")
    return 0 if s else 1


def _cmd_sccs(cfg, out):
    a = parse_automaton_file(cfg.inputs[0])
    scc = am.scc_decompose(a)
    comps = []
    for ci, comp in enumerate(scc.components):
        complete, missing = dc.is_complete_scc(a, comp)
        comps.append({"states": sorted(comp), "leaf": scc.leaf_flags[ci],
                      "cyclic": am.has_cycle_within(a, comp),
                      "complete": complete, "missing": list(missing) if missing else None,
                      "successors": sorted(scc.condensation[ci])})
    text = "\n".join(f"{i}: {c['states']} leaf={c['leaf']} cyclic={c['cyclic']} complete={c['complete']} "
                     f"-> {c['successors']}" for i, c in enumerate(comps))
    out.emit("sccs", {"components": comps}, text)
    return 0


def _cmd_decide(cfg, out):
    sets = {}
    for spec in cfg.extra["sets"]:
        name, sep, path = spec.partition("=")
        if not sep or not name:
            raise CliError(f"--set expects NAME=PATH, got {spec!r}")
        sets[name] = _load_set(cfg, path)
    try:
        phi = parse_formula(cfg.extra["formula"])
    except SexprError as e:
        raise CliError(f"formula: {e}") from None
    radices = {X.radix for X in sets.values()}
    if len(radices) > 1:
        raise CliError("all sets must share one radix")
    k = radices.pop() if radices else (cfg.radix or 2)
    truth, wit = lc.decide_sentence(phi, sets, k)
    payload = {"value": truth, "witness": wit}
    text = f"{'true' if truth else 'false'}" + (f"  witness {wit}" if wit else "")
    if cfg.formula_bound:
        b = eval_formula_bounded(phi, {}, cfg.formula_bound, sets, k)
        payload["bounded"] = {"bound": cfg.formula_bound, "value": b}
        text += f"\nbounded evaluation up to {cfg.formula_bound}: {'true' if b else 'false'}"
    out.emit("decide", payload, text)
    return 0 if truth else 1


def _cmd_decompose(cfg, out):
    X = _load_set(cfg, cfg.inputs[0])
    try:
        dec = dc.semenov_decompose(X, bound=cfg.bound)
    except dc.DichotomyError as e:
        raise CliError(str(e)) from None
    lines = [f"{len(dec.branches)} branches, union equivalent: {dec.equivalent}"]
    for b in dec.branches:
        lines.append("  " + " . ".join(
            f"L({l.entry}->{l.exit}{'' if l.sparse else ', dense'})" + (f" {l.digit}" if l.digit is not None else "")
            for l in b))
    out.emit("decompose", dec.to_json(), "\n".join(lines))
    return 0 if dec.equivalent else 1


def _cmd_verify(cfg, out):
    only = set(cfg.extra.get("only") or [])
    results = []
    for fn in verify.CRITERIA:
        if only and fn.number not in only:
            continue
        kw = {}
        if cfg.seed is not None and "seed" in fn.__wrapped__.__code__.co_varnames:
            kw["seed"] = cfg.seed + fn.number
        r = fn(**kw)
        results.append(r)
        if not cfg.json:
            print(r.line(), flush=True)
    ok = all(r.passed for r in results)
    if cfg.json:
        print(json.dumps({"schema": SCHEMA, "command": "verify-paper", "passed": ok,
                          "criteria": [r.to_json() for r in results]}))
    else:
        print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return 0 if ok else 1


HANDLERS = {
    "classify": _cmd_classify, "member": _cmd_member, "enum": _cmd_enum, "f": _cmd_f,
    "vka": _cmd_vka, "periodic": _cmd_periodic, "sparse": _cmd_sparse, "sccs": _cmd_sccs,
    "decide": _cmd_decide, "decompose": _cmd_decompose, "verify-paper": _cmd_verify,
}


def run(cfg: CommandConfig) -> int:
    return HANDLERS[cfg.command](cfg, Output(cfg.json))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--seed", type=int, help="seed for randomized checks")
    common.add_argument("--radix", type=int, help="reinterpret inputs in this power of their radix")
    common.add_argument("--bound", type=int, default=dc.DEFAULT_BOUND, help="congruence search bound")
    common.add_argument("--upto", type=int, default=100, help="enumeration limit")
    common.add_argument("--formula-bound", type=int, help="also evaluate formulas with quantifiers cut at this bound")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="kdichotomy", description="Definability checks for k-automatic sets")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("classify", "enum", "periodic", "sparse", "sccs", "decompose"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("path")
    sp = sub.add_parser("member", parents=[common])
    sp.add_argument("path")
    sp.add_argument("numbers", type=int, nargs="+")
    sp = sub.add_parser("f", parents=[common], help="approximation map F on a cycle language")
    sp.add_argument("path")
    sp.add_argument("--n", type=int, nargs="+", required=True)
    sp.add_argument("--p", type=int, dest="state", help="cycle state (default: the initial state)")
    sp.add_argument("--a", type=int, dest="digit", help="looping digit (default: least nonzero)")
    sp.add_argument("--R", type=int, help="shift bound (default: the stabilization bound)")
    sp.add_argument("--normalize", action="store_true", help="pass to the least normalizing power of k")
    sp = sub.add_parser("vka", parents=[common])
    sp.add_argument("numbers", type=int, nargs="+")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--a", type=int, default=0)
    sp = sub.add_parser("decide", parents=[common])
    sp.add_argument("formula")
    sp.add_argument("--set", dest="sets", action="append", default=[], metavar="NAME=PATH")
    sp = sub.add_parser("verify-paper", parents=[common], help="run the acceptance checklist")
    sp.add_argument("--only", type=int, nargs="+")
    return p


def config_from_args(ns) -> CommandConfig:
    extra = {k: v for k, v in vars(ns).items()
             if k not in ("command", "path", "radix", "bound", "upto", "formula_bound", "json", "seed", "verbose")}
    inputs = [ns.path] if getattr(ns, "path", None) else []
    return CommandConfig(ns.command, inputs, ns.radix, ns.bound, ns.upto, ns.formula_bound,
                         ns.json, ns.seed, extra)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(config_from_args(ns))
    except (CliError, FormatError, am.AutomatonError, ValueError) as e:
        print(f"kdichotomy: error: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
