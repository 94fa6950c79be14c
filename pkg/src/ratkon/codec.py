"""Text and JSON forms for ring elements, matrices, diagram sums, integrands and clasper specs.

Expression grammar (whitespace is ignored)::

    expr   := term (("+" | "-") term)*
    term   := ["-"] power ("*" power)*
    power  := atom ["^" ["-"] INT]
    atom   := INT ["/" INT] | "t" INT | "(" expr ")"

A negative power of anything other than a signed monomial is taken in the
localization, so ``(2 - t1)^-1`` parses to a LocElement.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any

from . import beads
from .diagrams import INTERNAL, Diagram, DiagramSum, RawDiagram, canonical_terms
from .errors import ParseError
from .freegroup import GroupRingElement, format_word
from .gaussian import ClasperSpec, Integrand
from .localization import (
    Core,
    LocElement,
    as_loc,
    from_group_ring,
    loc_add,
    loc_invert,
    loc_mul,
    loc_neg,
    loc_widen,
)

_TOKEN = re.compile(r"\s*(?:(\d+)|(t\d+)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("int", m.group(1), start))
        elif m.group(2):
            out.append(("gen", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected token {ch!r}", text, start)
            out.append((ch, ch, start))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, g: int):
        self.text = text
        self.g = g
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, kind: str | None = None):
        if self.i >= len(self.toks):
            raise ParseError("unexpected end of input", self.text, len(self.text))
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"unexpected token {tok[1]!r}, expected {kind!r}", self.text, tok[2])
        self.i += 1
        return tok

    def parse(self):
        if not self.toks:
            raise ParseError("empty expression", self.text, 0)
        v = self.expr()
        if self.i < len(self.toks):
            tok = self.toks[self.i]
            raise ParseError(f"unexpected token {tok[1]!r}", self.text, tok[2])
        return v

    def expr(self):
        v = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            v = _add(v, t) if op == "+" else _add(v, _neg(t))
        return v

    def term(self):
        neg = False
        if self.peek() == "-":
            self.take()
            neg = True
        v = self.power()
        while self.peek() == "*":
            self.take()
            v = _mul(v, self.power())
        return _neg(v) if neg else v

    def power(self):
        v = self.atom()
        if self.peek() == "^":
            self.take()
            sign = 1
            if self.peek() == "-":
                self.take()
                sign = -1
            tok = self.take("int")
            v = _pow(v, sign * int(tok[1]), self.text, tok[2])
        return v

    def atom(self):
        kind, val, pos = self.take()
        if kind == "int":
            c = Fraction(int(val))
            if self.peek() == "/":
                self.take()
                den = self.take("int")
                if int(den[1]) == 0:
                    raise ParseError("zero denominator", self.text, den[2])
                c /= int(den[1])
            return GroupRingElement.constant(self.g, c)
        if kind == "gen":
            k = int(val[1:])
            if not 1 <= k <= self.g:
                raise ParseError(f"generator {val!r} outside F_{self.g}", self.text, pos)
            return GroupRingElement.generator(self.g, k)
        if kind == "(":
            v = self.expr()
            self.take(")")
            return v
        raise ParseError(f"unexpected token {val!r}", self.text, pos)


def _is_loc(x) -> bool:
    return isinstance(x, LocElement)


def _add(a, b):
    if _is_loc(a) or _is_loc(b):
        return loc_add(as_loc(a, a.g), as_loc(b, b.g))
    return a + b


def _neg(a):
    return loc_neg(a) if _is_loc(a) else -a


def _mul(a, b):
    if _is_loc(a) or _is_loc(b):
        return loc_mul(as_loc(a, a.g), as_loc(b, b.g))
    return a * b


def _pow(a, n: int, text: str, pos: int):
    if n < 0:
        if not _is_loc(a) and len(a.terms) == 1:
            ((w, c),) = a.terms.items()
            a = GroupRingElement(a.g, {tuple(-x for x in reversed(w)): 1 / c})
        else:
            s = a if _is_loc(a) else from_group_ring(a)
            if not s.augment():
                raise ParseError("cannot invert an element with zero augmentation", text, pos)
            a = loc_invert(s)
        n = -n
    out = GroupRingElement.constant(a.g, 1)
    for _ in range(n):
        out = _mul(out, a)
    return out


def _max_generator(text: str) -> int:
    return max([int(m) for m in re.findall(r"t(\d+)", text)] + [1])


def parse_element(text: str, g: int | None = None):
    """Parse an expression into a GroupRingElement, or a LocElement if it needs inverses."""
    if g is None:
        g = _max_generator(text)
    return _Parser(text, g).parse()


def parse_ring(text: str, g: int | None = None) -> GroupRingElement:
    v = parse_element(text, g)
    if _is_loc(v):
        ring = v.as_group_ring()
        if ring is None:
            raise ParseError("expression is not a group-ring element", text, 0)
        return ring
    return v


def format_ring(a: GroupRingElement) -> str:
    return str(a)


# ---------------------------------------------------------------- elements and matrices


def element_to_json(e) -> Any:
    if isinstance(e, LocElement):
        ring = e.as_group_ring()
        if ring is not None:
            return str(ring)
        p = e.presentation
        return {
            "g": e.g,
            "selector": [str(x) for x in p.selector],
            "core": [[str(x) for x in row] for row in p.core.rows],
            "column": [str(x) for x in p.column],
        }
    if isinstance(e, tuple):
        return "*".join(format_word(e).split(" "))
    if isinstance(e, (int, Fraction)):
        return str(e)
    return str(e)


def element_from_json(obj, g: int | None = None):
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        obj = str(obj)
    if isinstance(obj, str):
        return parse_element(obj, g)
    if isinstance(obj, dict):
        try:
            texts = obj["selector"] + obj["column"] + [x for row in obj["core"] for x in row]
        except KeyError as err:
            raise ParseError(f"presentation is missing {err.args[0]!r}") from None
        gg = obj.get("g") or g or max(_max_generator(t) for t in texts)
        sel = [parse_ring(x, gg) for x in obj["selector"]]
        col = [parse_ring(x, gg) for x in obj["column"]]
        core = Core([[parse_ring(x, gg) for x in row] for row in obj["core"]], gg)
        s = LocElement(sel, core, col)
        return loc_widen(s, g) if g and g > gg else s
    raise ParseError(f"cannot read an element from {type(obj).__name__}")


def matrix_to_json(m) -> list:
    return [[element_to_json(e) for e in row] for row in m]


def matrix_from_json(rows, g: int | None = None) -> list:
    if isinstance(rows, str):
        rows = _matrix_text(rows)
    if g is None:
        g = _max_generator(json.dumps(rows))
    out = [[element_from_json(e, g) for e in row] for row in rows]
    if any(len(r) != len(out) for r in out):
        raise ParseError("matrix must be square")
    return out


def _matrix_text(text: str) -> list:
    """'[t1]' or '[[2 - t1, 0], [0, 1]]' into nested lists of strings."""
    t = text.strip()
    if not t.startswith("["):
        raise ParseError("matrix must start with '['", text, 0)
    if not t.endswith("]") or t.count("[") != t.count("]"):
        raise ParseError("unbalanced '[' in matrix", text, len(text))
    inner = t[1:-1].strip()
    if not inner.startswith("["):
        return [[inner]]
    rows = re.findall(r"\[([^\[\]]*)\]", inner)
    return [[x.strip() for x in r.split(",")] for r in rows]


# ---------------------------------------------------------------- diagrams


def _bead_json(b):
    return element_to_json(b)


def raw_to_json(r: RawDiagram) -> dict:
    def half(e, end):
        return f"{e}:{'tail' if end == 0 else 'head'}"

    return {
        "legs": [{"id": v, "color": c} for v, c in sorted(r.nodes.items()) if c != INTERNAL],
        "vertices": [{"id": v, "cyclic": [half(e, end) for e, end in r.cyc[v]]} for v in sorted(r.cyc)],
        "edges": [{"id": e, "from": t, "to": h, "bead": _bead_json(b)} for e, (t, h, b) in sorted(r.edges.items())],
        "circles": [_bead_json(b) for b in r.circles],
    }


def raw_from_json(obj: dict, g: int | None = None) -> RawDiagram:
    r = RawDiagram()
    ids: dict = {}
    for leg in obj.get("legs", []):
        ids[leg["id"]] = r.add_leg(leg["color"])
    for v in obj.get("vertices", []):
        ids[v["id"]] = r.add_vertex()
    eids: dict = {}
    for k, e in enumerate(obj.get("edges", [])):
        try:
            t, h = ids[e["from"]], ids[e["to"]]
        except KeyError as err:
            raise ParseError(f"edge refers to unknown node {err.args[0]!r}") from None
        bead = _read_bead(e.get("bead", "1"), g)
        eid = r.new_id()
        r.edges[eid] = [t, h, bead]
        eids[e.get("id", k)] = eid
    for v in obj.get("vertices", []):
        node = ids[v["id"]]
        cyc = []
        for item in v.get("cyclic", []):
            e, _, end = str(item).partition(":")
            key = int(e) if e.lstrip("-").isdigit() else e
            if key not in eids or end not in ("tail", "head"):
                raise ParseError(f"bad half-edge {item!r} at vertex {v['id']!r}")
            cyc.append((eids[key], 0 if end == "tail" else 1))
        if len(cyc) != 3:
            raise ParseError(f"vertex {v['id']!r} must list three half-edges")
        r.cyc[node] = cyc
    r.circles = [_read_bead(b, g) for b in obj.get("circles", [])]
    return r


def _read_bead(obj, g):
    e = element_from_json(obj, g)
    if isinstance(e, GroupRingElement) and len(e.terms) == 1:
        ((w, c),) = e.terms.items()
        if c == 1:
            return w
    if isinstance(e, LocElement):
        return beads.intern(e)
    return e


def sum_to_json(s: DiagramSum) -> dict:
    return {
        "cap": s.cap,
        "terms": [{"coef": str(c), "diagram": raw_to_json(d.to_raw())} for d, c in s.terms.items()],
    }


def sum_from_json(obj: dict, g: int | None = None) -> DiagramSum:
    out: dict = {}
    for t in obj.get("terms", []):
        coef = Fraction(str(t.get("coef", "1")))
        for c, d in canonical_terms(raw_from_json(t["diagram"], g)):
            out[d] = out.get(d, 0) + coef * c
    return DiagramSum._raw({d: c for d, c in out.items() if c}, obj.get("cap"))


# ---------------------------------------------------------------- integrands and claspers


def integrand_to_json(I: Integrand) -> dict:
    return {
        "X'": list(I.variables),
        "covariance": matrix_to_json(I.covariance),
        "substantial": sum_to_json(I.substantial),
        "cap": I.cap,
    }


def integrand_from_json(obj: dict) -> Integrand:
    X = obj.get("X'", obj.get("variables"))
    if X is None:
        raise ParseError("integrand needs the list of variables under \"X'\"")
    M = matrix_from_json(obj.get("covariance", []), obj.get("g"))
    if len(M) != len(X):
        raise ParseError(f"covariance is {len(M)}x{len(M)} but there are {len(X)} variables")
    s = sum_from_json(obj.get("substantial", {"terms": [{"coef": "1", "diagram": {}}]}), obj.get("g"))
    return Integrand(list(X), M, s, obj.get("cap"))


def clasper_to_json(c: ClasperSpec) -> dict:
    return {"n": c.count // 2, "linking": [[element_to_json(e) for e in row] for row in c.linking]}


def clasper_from_json(obj: dict) -> ClasperSpec:
    try:
        n = int(obj["n"])
        rows = obj["linking"]
    except KeyError as err:
        raise ParseError(f"clasper spec is missing {err.args[0]!r}") from None
    g = obj.get("g") or _max_generator(json.dumps(rows))
    return ClasperSpec(2 * n, [[element_from_json(e, g) for e in row] for row in rows])


def load(path: str) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dump(obj: Any, path: str | None = None) -> str:
    text = json.dumps(obj, indent=2, ensure_ascii=False)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text
