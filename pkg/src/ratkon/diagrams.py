"""Beaded unitrivalent diagrams and their rational linear combinations.

Diagrams are built as mutable ``RawDiagram`` objects and stored in sums only
in canonical form.  Canonical form quotients by multilinearity of beads,
edge reversal (bead involuted), the antisymmetry of vertex orientations and
graph isomorphism.  IHX and vertex invariance are not imposed.

Conventions.  An edge is oriented tail -> head and its bead is read in that
direction.  A half-edge is ``(edge id, end)`` with end 0 at the tail and 1 at
the head.  A trivalent vertex stores its three half-edges in cyclic order.  A
hair leg grown on an edge u -> v sits on a new vertex whose cyclic order is
(incoming, outgoing, leg).
"""
from __future__ import annotations

import os
from fractions import Fraction
from itertools import count
from math import factorial
from typing import Iterable, Mapping

from . import beads
from .errors import ConstantTermPresent
from .freegroup import GroupRingElement, reduce_word, word_inverse
from .localization import Core, LocElement
from .series import CyclicSeries, NCSeries, is_letter

INTERNAL = "*"

# Bead rule for welding two edges.  "path" multiplies beads in path order,
# alpha * beta-bar, and is what every identity check pins.  "swapped" puts the
# involution on the other factor, alpha-bar * beta; it exists only for
# experiments and is read once at import from RATKON_GLUE.
GLUE_CONVENTION = os.environ.get("RATKON_GLUE", "path")
if GLUE_CONVENTION not in ("path", "swapped"):
    raise ValueError(f"RATKON_GLUE must be 'path' or 'swapped', got {GLUE_CONVENTION!r}")


def is_hair_color(c: str) -> bool:
    return is_letter(c)


def dual(color: str) -> str:
    """The derivative color paired with ``color``."""
    return color[1:] if color.startswith("∂") else "∂" + color


def is_dual(color: str) -> bool:
    return color.startswith("∂")


# ---------------------------------------------------------------- raw diagrams


class RawDiagram:
    """Mutable diagram used while building or gluing."""

    def __init__(self):
        self.nodes: dict[int, str] = {}
        self.edges: dict[int, list] = {}
        self.cyc: dict[int, list] = {}
        self.circles: list = []
        self._ids = count()

    def copy(self) -> "RawDiagram":
        d = RawDiagram()
        d.nodes = dict(self.nodes)
        d.edges = {k: list(v) for k, v in self.edges.items()}
        d.cyc = {k: list(v) for k, v in self.cyc.items()}
        d.circles = list(self.circles)
        d._ids = count(max(list(self.nodes) + list(self.edges) + [-1]) + 1)
        return d

    def new_id(self) -> int:
        return next(self._ids)

    def add_leg(self, color: str) -> int:
        v = self.new_id()
        self.nodes[v] = color
        return v

    def add_vertex(self) -> int:
        v = self.new_id()
        self.nodes[v] = INTERNAL
        self.cyc[v] = []
        return v

    def add_edge(self, tail: int, head: int, bead=()) -> int:
        e = self.new_id()
        self.edges[e] = [tail, head, bead]
        for node, end in ((tail, 0), (head, 1)):
            if self.nodes[node] == INTERNAL:
                self.cyc[node].append((e, end))
        return e

    def legs(self, color: str | None = None) -> list[int]:
        return [v for v, c in self.nodes.items() if c != INTERNAL and (color is None or c == color)]

    def leg_halfedge(self, leg: int) -> tuple[int, int]:
        for e, (t, h, _) in self.edges.items():
            if t == leg:
                return (e, 0)
            if h == leg:
                return (e, 1)
        raise KeyError(f"leg {leg} has no edge")

    def union(self, other: "RawDiagram") -> dict:
        """Add a copy of other; returns the id map."""
        m = {}
        for v, c in other.nodes.items():
            m[v] = self.new_id()
            self.nodes[m[v]] = c
        for e in other.edges:
            m[e] = self.new_id()
        for e, (t, h, b) in other.edges.items():
            self.edges[m[e]] = [m[t], m[h], b]
        for v, hs in other.cyc.items():
            self.cyc[m[v]] = [(m[e], end) for e, end in hs]
        self.circles.extend(other.circles)
        return m

    def outward(self, leg: int):
        """(inner node, inner half-edge, bead read from the inner node toward the leg)."""
        e, end = self.leg_halfedge(leg)
        t, h, b = self.edges[e]
        if end == 1:
            return t, (e, 0), b
        return h, (e, 1), beads.bar(b)

    def _replace_halfedge(self, node: int, old, new) -> None:
        if self.nodes[node] == INTERNAL:
            hs = self.cyc[node]
            hs[hs.index(old)] = new

    def weld(self, a: int, b: int, mid=()) -> None:
        """Join legs a and b into one edge; ``mid`` is a bead read from a to b."""
        ea, _ = self.leg_halfedge(a)
        eb, _ = self.leg_halfedge(b)
        if ea == eb:
            t, h, bead = self.edges.pop(ea)
            along = bead if t == a else beads.bar(bead)
            self.circles.append(beads.mul(along, beads.bar(mid)))
            del self.nodes[a], self.nodes[b]
            return
        u, hu, alpha = self.outward(a)
        v, hv, beta = self.outward(b)
        if GLUE_CONVENTION == "path":
            bead = beads.mul(beads.mul(alpha, mid), beads.bar(beta))
        else:
            bead = beads.mul(beads.mul(beads.bar(alpha), mid), beta)
        del self.edges[ea], self.edges[eb]
        del self.nodes[a], self.nodes[b]
        e = self.new_id()
        self.edges[e] = [u, v, bead]
        self._replace_halfedge(u, hu, (e, 0))
        self._replace_halfedge(v, hv, (e, 1))

    def subdivide(self, e: int, word_letters: list[str], factors: list) -> None:
        """Grow legs on edge e: factors[0] l0 factors[1] l1 ... along the orientation."""
        t, h, _ = self.edges.pop(e)
        chain = [self.add_vertex() for _ in word_letters]
        stops = [t] + chain + [h]
        arcs = []
        for j in range(len(stops) - 1):
            a = self.new_id()
            self.edges[a] = [stops[j], stops[j + 1], factors[j]]
            arcs.append(a)
        for j, col in enumerate(word_letters):
            leg = self.add_leg(col)
            le = self.new_id()
            self.edges[le] = [chain[j], leg, ()]
            self.cyc[chain[j]] = [(arcs[j], 1), (arcs[j + 1], 0), (le, 0)]
        self._replace_halfedge(t, (e, 0), (arcs[0], 0))
        self._replace_halfedge(h, (e, 1), (arcs[-1], 1))

    def degree(self) -> int:
        return sum(1 for c in self.nodes.values() if c == INTERNAL)


def strut(a: str, b: str, bead=()) -> RawDiagram:
    d = RawDiagram()
    x = d.add_leg(a)
    y = d.add_leg(b)
    d.add_edge(x, y, bead)
    return d


def tripod(colors: Iterable[str], bead_list=None) -> RawDiagram:
    """One trivalent vertex with legs in the given cyclic order; edges point to the legs."""
    colors = list(colors)
    d = RawDiagram()
    v = d.add_vertex()
    for j, c in enumerate(colors):
        leg = d.add_leg(c)
        d.add_edge(v, leg, bead_list[j] if bead_list else ())
    return d


def wheel(leg_colors: Iterable[str], arc_beads=None) -> RawDiagram:
    """Oriented cycle with one leg per vertex, legs in cyclic order along the cycle."""
    cols = list(leg_colors)
    k = len(cols)
    d = RawDiagram()
    if k == 0:
        d.circles.append(arc_beads[0] if arc_beads else ())
        return d
    vs = [d.add_vertex() for _ in range(k)]
    arcs = []
    for j in range(k):
        e = d.new_id()
        d.edges[e] = [vs[j], vs[(j + 1) % k], arc_beads[j] if arc_beads else ()]
        arcs.append(e)
    for j in range(k):
        leg = d.add_leg(cols[j])
        le = d.new_id()
        d.edges[le] = [vs[j], leg, ()]
        d.cyc[vs[j]] = [(arcs[(j - 1) % k], 1), (arcs[j], 0), (le, 0)]
    return d


def circle(bead=()) -> RawDiagram:
    d = RawDiagram()
    d.circles.append(bead)
    return d


# ---------------------------------------------------------------- canonical form


def _circle_key(b):
    if isinstance(b, tuple):
        w = list(b)
        while len(w) >= 2 and w[0] == -w[-1]:
            w = w[1:-1]
        w = tuple(w)
        cands = []
        for x in (w, word_inverse(w)):
            cands.extend(x[i:] + x[:i] for i in range(max(len(x), 1)))
        best = min(cands, key=lambda u: (len(u), u))
        return beads.sort_key(best)
    return min(beads.sort_key(b), beads.sort_key(beads.bar(b)))


def key_to_bead(k):
    if k[0] == 0:
        return k[2]
    return beads.by_digest(k[2])


def _components(raw: RawDiagram) -> list[tuple[list[int], list[int]]]:
    adj: dict[int, list[int]] = {v: [] for v in raw.nodes}
    for e, (t, h, _) in raw.edges.items():
        adj[t].append(e)
        adj[h].append(e)
    seen: set = set()
    comps = []
    for start in raw.nodes:
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        nodes, edges = [], set()
        while stack:
            v = stack.pop()
            nodes.append(v)
            for e in adj[v]:
                edges.add(e)
                t, h, _ = raw.edges[e]
                for w in (t, h):
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        comps.append((nodes, sorted(edges)))
    return comps


def _canon_component(raw: RawDiagram, nodes: list[int], edges: list[int]):
    """Canonical certificate and orientation sign (0 if an odd automorphism exists)."""
    idx = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    cols = [raw.nodes[v] for v in nodes]
    # half-edge incidence: per node, list of (own label, other label, other node idx)
    inc: list[list] = [[] for _ in range(n)]
    ekeys = {}
    for e in edges:
        t, h, b = raw.edges[e]
        kt = beads.sort_key(b)
        kh = beads.sort_key(beads.bar(b))
        ekeys[e] = (kt, kh)
        inc[idx[t]].append((kt, kh, idx[h]))
        inc[idx[h]].append((kh, kt, idx[t]))

    def refine(color: list[int]) -> list[int]:
        while True:
            sigs = [(color[v], tuple(sorted((a, b, color[w]) for a, b, w in inc[v]))) for v in range(n)]
            order = sorted(set(sigs))
            rank = {s: i for i, s in enumerate(order)}
            new = [rank[s] for s in sigs]
            if len(order) == len(set(color)):
                return new
            color = new

    base_order = sorted(set(cols))
    start = refine([base_order.index(c) for c in cols])

    best = None
    leaves: list = []

    def certificate(color: list[int]):
        pos = color  # discrete: color is the position
        node_cols = [None] * n
        for v in range(n):
            node_cols[pos[v]] = cols[v]
        elist = []
        for e in edges:
            t, h, _ = raw.edges[e]
            kt, kh = ekeys[e]
            a = (pos[idx[t]], pos[idx[h]], kt)
            bb = (pos[idx[h]], pos[idx[t]], kh)
            elist.append(min(a, bb))
        return (tuple(node_cols), tuple(sorted(elist)))

    def search(color: list[int]):
        nonlocal best
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(color):
            cells.setdefault(c, []).append(v)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = c
                break
        if target is None:
            cert = certificate(color)
            if best is None or cert < best:
                best = cert
                leaves.clear()
                leaves.append(list(color))
            elif cert == best:
                leaves.append(list(color))
            return
        for v in cells[target]:
            c2 = [2 * x + (1 if x > target or (x == target and w != v) else 0) for w, x in enumerate(color)]
            search(refine(c2))

    search(start)
    node_cols, elist = best
    signs = set()
    for pos in leaves:
        s = _leaf_sign(raw, nodes, edges, idx, ekeys, pos, elist)
        signs.add(s)
        if len(signs) > 1 or s == 0:
            return best, 0
    return best, signs.pop()


def _perm_sign(seq: list) -> int:
    s = 1
    a = list(seq)
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            if a[i] > a[j]:
                s = -s
    return s


def _leaf_sign(raw, nodes, edges, idx, ekeys, pos, elist) -> int:
    # assign original edges to canonical slots
    slots: dict = {}
    for i, t in enumerate(elist):
        slots.setdefault(t, []).append(i)
    used: dict = {}
    half = {}
    for e in edges:
        t, h, _ = raw.edges[e]
        kt, kh = ekeys[e]
        a = (pos[idx[t]], pos[idx[h]], kt)
        b = (pos[idx[h]], pos[idx[t]], kh)
        if a == b:
            return 0
        rep = min(a, b)
        k = used.get(rep, 0)
        used[rep] = k + 1
        ci = slots[rep][k]
        if rep == a:
            half[(e, 0)] = (ci, 0)
            half[(e, 1)] = (ci, 1)
        else:
            half[(e, 0)] = (ci, 1)
            half[(e, 1)] = (ci, 0)
    sign = 1
    for v in nodes:
        if raw.nodes[v] == INTERNAL:
            sign *= _perm_sign([half[hh] for hh in raw.cyc[v]])
    return sign


class Diagram:
    """Canonical diagram: sorted component certificates plus circle beads."""

    __slots__ = ("comps", "circles", "_hash")

    def __init__(self, comps: tuple, circles: tuple):
        self.comps = comps
        self.circles = circles
        self._hash = hash((comps, circles))

    def __eq__(self, other):
        return isinstance(other, Diagram) and self._hash == other._hash and self.comps == other.comps and self.circles == other.circles

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return (self.comps, self.circles) < (other.comps, other.circles)

    def is_empty(self) -> bool:
        return not self.comps and not self.circles

    def degree(self) -> int:
        return sum(1 for cols, _ in self.comps for c in cols if c == INTERNAL)

    def leg_colors(self) -> list[str]:
        return [c for cols, _ in self.comps for c in cols if c != INTERNAL]

    def hair_count(self) -> int:
        return sum(1 for c in self.leg_colors() if is_hair_color(c))

    def union(self, other: "Diagram") -> "Diagram":
        return Diagram(tuple(sorted(self.comps + other.comps)), tuple(sorted(self.circles + other.circles)))

    def to_raw(self) -> RawDiagram:
        d = RawDiagram()
        for cols, elist in self.comps:
            ids = [d.add_leg(c) if c != INTERNAL else d.add_vertex() for c in cols]
            halves: dict[int, list] = {}
            for p, q, k in elist:
                e = d.new_id()
                d.edges[e] = [ids[p], ids[q], key_to_bead(k)]
                halves.setdefault(p, []).append((e, 0))
                halves.setdefault(q, []).append((e, 1))
            for p, c in enumerate(cols):
                if c == INTERNAL:
                    d.cyc[ids[p]] = sorted(halves.get(p, []))
        d.circles = [key_to_bead(k) for k in self.circles]
        return d

    def __repr__(self):
        return f"Diagram({describe(self)})"


EMPTY = Diagram((), ())


def canonical_terms(raw: RawDiagram) -> list[tuple[Fraction, Diagram]]:
    """Multilinear split of every bead, then canonical form of each piece."""
    edge_ids = list(raw.edges)
    choices = [beads.split(raw.edges[e][2]) for e in edge_ids]
    circ = [beads.split(b) for b in raw.circles]
    out = []
    for coef, picks, cpicks in _product(choices, circ):
        r = raw.copy()
        for e, b in zip(edge_ids, picks):
            r.edges[e][2] = b
        r.circles = list(cpicks)
        c, d = _canon_atomic(r)
        if c:
            out.append((coef * c, d))
    return out


def _product(choices, circ):
    acc = [(Fraction(1), (), ())]
    for opts in choices:
        acc = [(c * c2, p + (b,), q) for c, p, q in acc for c2, b in opts]
    for opts in circ:
        acc = [(c * c2, p, q + (b,)) for c, p, q in acc for c2, b in opts]
    return acc


def _canon_atomic(raw: RawDiagram) -> tuple[int, Diagram]:
    sign = 1
    certs = []
    for nodes, edges in _components(raw):
        cert, s = _canon_component(raw, nodes, edges)
        if s == 0:
            return 0, EMPTY
        sign *= s
        certs.append(cert)
    circles = tuple(sorted(_circle_key(b) for b in raw.circles))
    return sign, Diagram(tuple(sorted(certs)), circles)


def describe(d: Diagram) -> str:
    parts = []
    for cols, elist in d.comps:
        es = ",".join(f"{p}-{q}[{beads.describe(key_to_bead(k))}]" for p, q, k in elist)
        parts.append("{" + " ".join(cols) + " | " + es + "}")
    for k in d.circles:
        parts.append(f"O[{beads.describe(key_to_bead(k))}]")
    return " ".join(parts) if parts else "1"


# ---------------------------------------------------------------- sums


class DiagramSum:
    """Rational combination of canonical diagrams truncated at degree ``cap``."""

    __slots__ = ("terms", "cap")

    def __init__(self, terms: Mapping[Diagram, object] | None = None, cap: int | None = None):
        self.cap = cap
        self.terms = {d: Fraction(c) for d, c in (terms or {}).items() if c and (cap is None or d.degree() <= cap)}

    @classmethod
    def _raw(cls, terms: dict, cap) -> "DiagramSum":
        s = cls.__new__(cls)
        s.cap = cap
        s.terms = {d: c for d, c in terms.items() if c}
        return s

    @classmethod
    def one(cls, cap=None) -> "DiagramSum":
        return cls._raw({EMPTY: Fraction(1)}, cap)

    @classmethod
    def zero(cls, cap=None) -> "DiagramSum":
        return cls._raw({}, cap)

    @classmethod
    def from_raw(cls, raw: RawDiagram | Iterable, coef=1, cap=None) -> "DiagramSum":
        raws = [raw] if isinstance(raw, RawDiagram) else list(raw)
        out: dict = {}
        for r in raws:
            for c, d in canonical_terms(r):
                if cap is None or d.degree() <= cap:
                    out[d] = out.get(d, 0) + c * Fraction(coef)
        return cls._raw(out, cap)

    def __eq__(self, other):
        if not isinstance(other, DiagramSum):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"DiagramSum({len(self.terms)} terms, cap={self.cap})"

    def is_zero(self) -> bool:
        return not self.terms

    def _cap(self, other) -> int | None:
        caps = [c for c in (self.cap, other.cap) if c is not None]
        return min(caps) if caps else None

    def __add__(self, other: "DiagramSum") -> "DiagramSum":
        cap = self._cap(other)
        out = {d: c for d, c in self.terms.items() if cap is None or d.degree() <= cap}
        for d, c in other.terms.items():
            if cap is None or d.degree() <= cap:
                out[d] = out.get(d, 0) + c
        return DiagramSum._raw(out, cap)

    def __neg__(self):
        return DiagramSum._raw({d: -c for d, c in self.terms.items()}, self.cap)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k) -> "DiagramSum":
        k = Fraction(k)
        return DiagramSum._raw({d: c * k for d, c in self.terms.items()}, self.cap)

    def union(self, other: "DiagramSum", hair_cap: int | None = None) -> "DiagramSum":
        cap = self._cap(other)
        out: dict = {}
        for d1, c1 in self.terms.items():
            g1 = d1.degree()
            h1 = d1.hair_count() if hair_cap is not None else 0
            for d2, c2 in other.terms.items():
                if cap is not None and g1 + d2.degree() > cap:
                    continue
                if hair_cap is not None and h1 + d2.hair_count() > hair_cap:
                    continue
                d = d1.union(d2)
                out[d] = out.get(d, 0) + c1 * c2
        return DiagramSum._raw(out, cap)

    __mul__ = union

    def constant_term(self) -> Fraction:
        return self.terms.get(EMPTY, Fraction(0))

    def truncate(self, cap: int) -> "DiagramSum":
        return DiagramSum._raw({d: c for d, c in self.terms.items() if d.degree() <= cap}, cap)

    def hair_truncate(self, n: int) -> "DiagramSum":
        return DiagramSum._raw({d: c for d, c in self.terms.items() if d.hair_count() <= n}, self.cap)

    def hair_part(self, n: int) -> "DiagramSum":
        return DiagramSum._raw({d: c for d, c in self.terms.items() if d.hair_count() == n}, self.cap)

    def with_cap(self, cap) -> "DiagramSum":
        return DiagramSum(self.terms, cap)

    def map_raw(self, fn, cap="keep") -> "DiagramSum":
        """Apply fn: RawDiagram -> iterable of (coef, RawDiagram) termwise, renormalizing."""
        cap = self.cap if cap == "keep" else cap
        out: dict = {}
        for d, c in self.terms.items():
            for c2, r in fn(d.to_raw()):
                if not c2:
                    continue
                for c3, d3 in canonical_terms(r):
                    if cap is None or d3.degree() <= cap:
                        out[d3] = out.get(d3, 0) + c * c2 * c3
        return DiagramSum._raw(out, cap)

    def describe(self) -> str:
        if not self.terms:
            return "0"
        return "\n".join(f"{c} * {describe(d)}" for d, c in sorted(self.terms.items(), key=lambda kv: kv[0]))


def normalize(s) -> DiagramSum:
    """Canonical form of a sum given as DiagramSum, RawDiagram or list of (coef, RawDiagram)."""
    if isinstance(s, DiagramSum):
        return s.map_raw(lambda r: [(1, r)])
    if isinstance(s, RawDiagram):
        return DiagramSum.from_raw(s)
    out = DiagramSum.zero()
    for c, r in s:
        out = out + DiagramSum.from_raw(r, c)
    return out


def exp_union(a: DiagramSum, order: int | None = None, hair_cap: int | None = None) -> DiagramSum:
    """sum a^n / n! truncated at the cap (or at ``order`` factors for degree-0 content)."""
    if a.constant_term():
        raise ConstantTermPresent("exp_union needs an argument without constant term")
    if order is None:
        if hair_cap is not None and all(d.hair_count() > 0 for d in a.terms):
            order = hair_cap
        elif a.cap is not None and all(d.degree() > 0 for d in a.terms):
            order = a.cap
        elif not a.terms:
            order = 0
        else:
            raise ValueError("exp_union of degree-0 content needs an explicit order")
    out = DiagramSum.one(a.cap)
    power = DiagramSum.one(a.cap)
    for n in range(1, order + 1):
        power = power.union(a, hair_cap)
        if power.is_zero():
            break
        out = out + power.scale(Fraction(1, factorial(n)))
    return out


def algebra_ops(op: str, a: DiagramSum, b: DiagramSum | None = None, k=None) -> DiagramSum:
    if op == "union":
        return a.union(b)
    if op == "add":
        return a + b
    if op == "scale":
        return a.scale(k)
    if op == "exp_union":
        return exp_union(a)
    raise ValueError(f"unknown operation {op!r}")


def degree_truncate(s: DiagramSum, cap: int) -> DiagramSum:
    return s.truncate(cap)


def wheels_from_cyclic(c: CyclicSeries, cap=None) -> DiagramSum:
    out: dict = {}
    for w, coef in c.terms.items():
        for c2, d in canonical_terms(wheel(list(w))):
            out[d] = out.get(d, 0) + coef * c2
    return DiagramSum._raw(out, cap)


# ---------------------------------------------------------------- bead substitutions


def _alpha_word(w: tuple, i: int, j: int) -> tuple:
    out: list = []
    for x in w:
        if abs(x) == i:
            out.extend([-j, x, j])
        else:
            out.append(x)
    return reduce_word(out)


def _alpha_ring(a, i, j, inverse=False):
    jj = -j if inverse else j
    return GroupRingElement(a.g, {_alpha_word(w, i, jj): c for w, c in a.terms.items()})


def alpha_bead(b, i: int, j: int, inverse: bool = False):
    """t_i -> t_j^-1 t_i t_j (or its inverse t_i -> t_j t_i t_j^-1)."""
    if isinstance(b, tuple):
        return _alpha_word(b, i, -j if inverse else j)
    p = b.presentation
    core = Core([[_alpha_ring(e, i, j, inverse) for e in row] for row in p.core.rows], p.core.g)
    return beads.intern(
        LocElement(tuple(_alpha_ring(e, i, j, inverse) for e in p.selector), core, tuple(_alpha_ring(e, i, j, inverse) for e in p.column))
    )


def string_alpha(s: DiagramSum, i: int, j: int, inverse: bool = False) -> DiagramSum:
    if i == j:
        raise ValueError("string action needs distinct indices")

    def fn(r: RawDiagram):
        for e in r.edges.values():
            e[2] = alpha_bead(e[2], i, j, inverse)
        r.circles = [alpha_bead(b, i, j, inverse) for b in r.circles]
        return [(1, r)]

    return s.map_raw(fn)


def push_group(s: DiagramSum, f: tuple, color: str) -> DiagramSum:
    """Multiply the outward bead of every ``color`` leg by the free word f."""

    def fn(r: RawDiagram):
        for leg in r.legs(color):
            e, end = r.leg_halfedge(leg)
            t, h, b = r.edges[e]
            if end == 1:
                r.edges[e][2] = beads.mul(b, f)
            else:
                r.edges[e][2] = beads.mul(beads.bar(f), b)
        return [(1, r)]

    return s.map_raw(fn)


def substitute_beads(s: DiagramSum, sub: tuple) -> DiagramSum:
    kind = sub[0]
    if kind == "string_alpha":
        return string_alpha(s, *sub[1:])
    if kind == "push_group":
        return push_group(s, *sub[1:])
    raise ValueError(f"unknown substitution {kind!r}")


def recolor(s: DiagramSum, mapping: Mapping[str, str]) -> DiagramSum:
    def fn(r: RawDiagram):
        for v, c in list(r.nodes.items()):
            if c in mapping:
                r.nodes[v] = mapping[c]
        return [(1, r)]

    return s.map_raw(fn)


# ---------------------------------------------------------------- hair


def _grow(r: RawDiagram, e: int, word: tuple) -> None:
    t, h, _ = r.edges[e]
    r.subdivide(e, list(word), [()] * (len(word) + 1))


def hair_raw(r: RawDiagram, budget: int) -> list[tuple[Fraction, RawDiagram]]:
    """Replace every bead by its Magnus series, growing one leg per letter."""
    edge_ids = list(r.edges)
    series = [beads.magnus(r.edges[e][2], budget) for e in edge_ids]
    circ = [beads.magnus(b, budget) for b in r.circles]
    out = []
    acc = [(Fraction(1), (), 0)]
    for s in series + circ:
        nxt = []
        for c, picks, used in acc:
            for w, v in s.terms.items():
                if used + len(w) <= budget:
                    nxt.append((c * v, picks + (w,), used + len(w)))
        acc = nxt
    ne = len(edge_ids)
    for c, picks, _ in acc:
        d = r.copy()
        for e in edge_ids:
            d.edges[e][2] = ()
        for e, w in zip(edge_ids, picks[:ne]):
            if w:
                _grow(d, e, w)
        d.circles = []
        for w in picks[ne:]:
            wd = wheel(list(w))
            d.union(wd)
        out.append((c, d))
    return out


def hair(s: DiagramSum, cap: int) -> DiagramSum:
    """Hair expansion keeping diagrams with at most ``cap`` hair-colored legs in total."""

    out: dict = {}
    for d, c in s.terms.items():
        budget = cap - d.hair_count()
        if budget < 0:
            continue
        for c2, r in hair_raw(d.to_raw(), budget):
            for c3, d3 in canonical_terms(r):
                out[d3] = out.get(d3, 0) + c * c2 * c3
    return DiagramSum._raw(out, None)
