"""Line-based automaton file format.

    radix 3 tracks 1
    states 3
    initial 0
    final 2
    t 0 1 2
    t 2 2,0 1      # multi-track symbols: digits joined by commas

Blank lines and ``#`` comments are ignored.
"""
from __future__ import annotations

from pathlib import Path

from .automaton import Automaton, AutomatonError, pack, unpack


class FormatError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None, source: str = "<string>"):
        self.line, self.col, self.source = line, col, source
        where = source
        if line is not None:
            where += f":{line}"
            if col is not None:
                where += f":{col}"
        super().__init__(f"{where}: {msg}")


def _tokens(raw: str):
    """Yield (column, token) pairs, 1-based columns."""
    i = 0
    n = len(raw)
    while i < n:
        while i < n and raw[i].isspace():
            i += 1
        if i >= n:
            break
        j = i
        while j < n and not raw[j].isspace():
            j += 1
        yield i + 1, raw[i:j]
        i = j


def _int(tok, line, col, source, what="integer"):
    try:
        v = int(tok)
    except ValueError:
        raise FormatError(f"expected {what}, got {tok!r}", line, col, source) from None
    if v < 0:
        raise FormatError(f"expected non-negative {what}, got {v}", line, col, source)
    return v


def parse_automaton(text: str, source: str = "<string>") -> Automaton:
    header = {}
    trans = []
    expected = ["radix", "states", "initial", "final"]
    for lineno, raw in enumerate(text.splitlines(), 1):
        raw = raw.split("#", 1)[0]
        toks = list(_tokens(raw))
        if not toks:
            continue
        col, kw = toks[0]
        if expected:
            if kw != expected[0]:
                raise FormatError(f"expected '{expected[0]}' line, got {kw!r}", lineno, col, source)
            expected.pop(0)
            if kw == "radix":
                if len(toks) != 4 or toks[2][1] != "tracks":
                    raise FormatError("header must read 'radix <k> tracks <d>'", lineno, col, source)
                header["radix"] = _int(toks[1][1], lineno, toks[1][0], source, "radix")
                header["tracks"] = _int(toks[3][1], lineno, toks[3][0], source, "track count")
                if header["radix"] < 2:
                    raise FormatError("radix must be at least 2", lineno, toks[1][0], source)
                if header["tracks"] < 1:
                    raise FormatError("track count must be at least 1", lineno, toks[3][0], source)
            elif kw == "states":
                if len(toks) != 2:
                    raise FormatError("expected 'states <n>'", lineno, col, source)
                header["states"] = _int(toks[1][1], lineno, toks[1][0], source, "state count")
            else:
                vals = []
                for c, t in toks[1:]:
                    v = _int(t, lineno, c, source, "state")
                    if v >= header["states"]:
                        raise FormatError(f"state {v} out of range (states {header['states']})", lineno, c, source)
                    vals.append(v)
                header[kw] = vals
            continue
        if kw != "t":
            raise FormatError(f"expected transition line 't <src> <sym> <dst>', got {kw!r}", lineno, col, source)
        if len(toks) != 4:
            raise FormatError("transition needs exactly 3 fields", lineno, col, source)
        n, k, d = header["states"], header["radix"], header["tracks"]
        src = _int(toks[1][1], lineno, toks[1][0], source, "state")
        dst = _int(toks[3][1], lineno, toks[3][0], source, "state")
        for v, (c, _) in ((src, toks[1]), (dst, toks[3])):
            if v >= n:
                raise FormatError(f"state {v} out of range (states {n})", lineno, c, source)
        scol, stok = toks[2]
        parts = stok.split(",")
        if len(parts) != d:
            raise FormatError(f"symbol {stok!r} has {len(parts)} digits, expected {d}", lineno, scol, source)
        digits = []
        for p in parts:
            dv = _int(p, lineno, scol, source, "digit")
            if dv >= k:
                raise FormatError(f"digit {dv} out of range for radix {k}", lineno, scol, source)
            digits.append(dv)
        trans.append((src, pack(digits, k), dst))
    if expected:
        raise FormatError(f"missing '{expected[0]}' line", None, None, source)
    try:
        return Automaton.build(header["radix"], header["states"], header["initial"], header["final"],
                               trans, header["tracks"])
    except AutomatonError as e:
        raise FormatError(str(e), None, None, source) from None


def format_automaton(a: Automaton) -> str:
    lines = [f"radix {a.radix} tracks {a.tracks}",
             f"states {a.n_states}",
             "initial " + " ".join(map(str, sorted(a.initial))),
             "final " + " ".join(map(str, sorted(a.finals)))]
    for q, sym, t in a.transitions():
        digits = ",".join(map(str, unpack(sym, a.radix, a.tracks)))
        lines.append(f"t {q} {digits} {t}")
    return "\n".join(lines) + "\n"


def read_automaton(path) -> Automaton:
    p = Path(path)
    return parse_automaton(p.read_text(encoding="utf-8"), source=str(p))


def write_automaton(a: Automaton, path) -> None:
    Path(path).write_text(format_automaton(a), encoding="utf-8")
