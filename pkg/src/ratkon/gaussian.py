"""Pairing calculus, rational Gaussian integration and related maps on diagrams.

Leg colors: a variable ``x`` pairs with its derivative color ``∂x``.  Gluing
always goes through ``RawDiagram.weld``, which multiplies beads in path
order, so every operation here shares one orientation convention.

The covariance strut attached to a matrix entry M[i][j] runs from the
x_i-colored leg to the x_j-colored leg and carries the bead M[i][j], so beads
read along a path multiply like matrix entries.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from math import factorial
from typing import Iterable, Sequence

from . import beads
from .diagrams import (
    INTERNAL,
    Diagram,
    DiagramSum,
    RawDiagram,
    canonical_terms,
    dual,
    exp_union,
    hair,
    key_to_bead,
    recolor,
    strut,
    wheel,
    wheels_from_cyclic,
)
from .errors import NonHermitianStrutPart, NonIntegrable, NotSubstantial, OddLegCount, WrongLegCount
from .freegroup import GroupRingElement
from .helement import HElement, chi_prime, eta, eta_bead, hmat_mul, hmatrix, phi_bead, phi_conj
from .localization import as_loc, eps_matrix, herm_invert, loc_add, loc_scale, loc_widen, rational_inverse

log = logging.getLogger(__name__)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("RATKON_THREADS", "1")))
    except ValueError:
        return 1


def _map_terms(fn, items: list) -> list:
    """Apply fn to every item, possibly on worker threads; order of results is preserved."""
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _accumulate(out: dict, raws: Iterable[tuple[Fraction, RawDiagram]], cap=None) -> None:
    for c, r in raws:
        for c2, d in canonical_terms(r):
            if cap is None or d.degree() <= cap:
                out[d] = out.get(d, 0) + c * c2


def _min_cap(*caps):
    cs = [c for c in caps if c is not None]
    return min(cs) if cs else None


def _legs_by_color(r: RawDiagram, colors: Iterable[str]) -> dict[str, list[int]]:
    return {c: sorted(r.legs(c)) for c in colors}


def _injections(dlegs: dict, legs: dict, full: bool):
    """All ways to send every ∂-leg to a distinct leg of the same base color."""
    per_color = []
    for c, dl in dlegs.items():
        bl = legs.get(c, [])
        if len(dl) > len(bl) or (full and len(dl) != len(bl)):
            return
        per_color.append([list(zip(dl, p)) for p in permutations(bl, len(dl))])
    for combo in product(*per_color):
        yield [pair for chunk in combo for pair in chunk]


def _welded(r: RawDiagram, pairs) -> RawDiagram:
    d = r.copy()
    for a, b in pairs:
        d.weld(a, b)
    return d


def _glue_terms(a: Diagram, b: Diagram | None, colors, full: bool) -> list:
    r = a.to_raw()
    if b is None:
        dl = _legs_by_color(r, [dual(c) for c in colors])
        bl = _legs_by_color(r, colors)
    else:
        dl = _legs_by_color(r, [dual(c) for c in colors])
        rb = b.to_raw()
        m = r.union(rb)
        bl = {c: sorted(m[v] for v in rb.legs(c)) for c in colors}
    dl = {c: dl[dual(c)] for c in colors}
    return [(Fraction(1), _welded(r, pairs)) for pairs in _injections(dl, bl, full)]


def _glue(A: DiagramSum, B: DiagramSum, colors, full: bool) -> DiagramSum:
    colors = list(colors)
    cap = _min_cap(A.cap, B.cap)
    jobs = [(da, ca, db, cb) for da, ca in A.terms.items() for db, cb in B.terms.items()]

    def work(job):
        da, ca, db, cb = job
        out: dict = {}
        _accumulate(out, [(ca * cb, r) for _, r in _glue_terms(da, db, colors, full)], cap)
        return out

    return _reduce(_map_terms(work, jobs), cap)


def _reduce(parts: list[dict], cap) -> DiagramSum:
    out: dict = {}
    for p in parts:
        for d, c in p.items():
            out[d] = out.get(d, 0) + c
    return DiagramSum._raw(out, cap)


def pair_all(A: DiagramSum, B: DiagramSum, X: Iterable[str]) -> DiagramSum:
    """Sum over all bijections between the ∂x legs of A and the x legs of B, per color."""
    return _glue(A, B, X, full=True)


def flat_glue(A: DiagramSum, B: DiagramSum, X: Iterable[str]) -> DiagramSum:
    """Pair every ∂x leg of A with some x leg of B."""
    return _glue(A, B, X, full=False)


def _strut_components(d: Diagram, X: Sequence[str]) -> tuple[list, Diagram]:
    xs = set(X)
    struts, rest = [], []
    for comp in d.comps:
        cols, _ = comp
        if len(cols) == 2 and cols[0] in xs and cols[1] in xs:
            struts.append(comp)
        else:
            rest.append(comp)
    return struts, Diagram(tuple(rest), d.circles)


def is_substantial(s: DiagramSum, X: Sequence[str]) -> bool:
    return all(not _strut_components(d, X)[0] for d in s.terms)


def divergence(s: DiagramSum, X: Sequence[str]) -> DiagramSum:
    """Pair all ∂x legs of each term with some x legs of the same term."""
    X = list(X)
    if not is_substantial(s, X + [dual(x) for x in X]):
        raise NotSubstantial("divergence needs a sum without struts on the integrated colors")
    out: dict = {}
    for d, c in s.terms.items():
        _accumulate(out, [(c * k, r) for k, r in _glue_terms(d, None, X, full=False)], s.cap)
    return DiagramSum._raw(out, s.cap)


def contract_h(s: DiagramSum, colors: Iterable[str] = ("h",)) -> DiagramSum:
    """Pair all ∂h legs with all h legs inside each term."""
    colors = list(colors)
    out: dict = {}
    for d, c in s.terms.items():
        _accumulate(out, [(c * k, r) for k, r in _glue_terms(d, None, colors, full=True)], s.cap)
    return DiagramSum._raw(out, s.cap)


# ---------------------------------------------------------------- integrands


def _entry_beads(e) -> list[tuple[Fraction, object]]:
    if isinstance(e, (int, Fraction)):
        return [(Fraction(e), ())] if e else []
    return beads.split(e)


def covariance_struts(M, X: Sequence[str], derivative: bool = False, coef=Fraction(1, 2)) -> DiagramSum:
    """coef * sum_ij strut(x_i -> x_j, M[i][j]); with derivative=True the legs are ∂x.

    Struts run from the row variable to the column variable, so that beads
    read along a path multiply like matrix entries.
    """
    cols = [dual(x) if derivative else x for x in X]
    out: dict = {}
    for i, row in enumerate(M):
        for j, e in enumerate(row):
            for c, b in _entry_beads(e):
                _accumulate(out, [(Fraction(coef) * c, strut(cols[i], cols[j], b))])
    return DiagramSum._raw(out, None)


@dataclass
class Integrand:
    variables: list
    covariance: list
    substantial: DiagramSum
    cap: int | None = None
    strut_order: int = 0
    meta: dict = field(default_factory=dict)

    def reconstruct(self, order: int | None = None) -> DiagramSum:
        order = self.strut_order if order is None else order
        s = covariance_struts(self.covariance, self.variables)
        return exp_union(s, order=order).union(self.substantial)


def _strut_bead(comp) -> tuple[str, str, object]:
    cols, ((p, q, k),) = comp
    return cols[p], cols[q], key_to_bead(k)


def _generators(s: DiagramSum) -> int:
    g = 1
    for d in s.terms:
        for _, elist in d.comps:
            for _, _, k in elist:
                g = max(g, beads.bead_g(key_to_bead(k)))
    return g


def _entry_from_combo(combo: dict, g: int):
    if all(isinstance(b, tuple) for b in combo):
        return GroupRingElement(g, {b: c for b, c in combo.items()})
    acc = None
    for b, c in combo.items():
        t = loc_scale(loc_widen(as_loc(beads.to_ring_or_loc(b, g), g), g), c)
        acc = t if acc is None else loc_add(acc, t)
    return beads.intern(acc)


def decompose(s: DiagramSum, X: Sequence[str], max_struts: int | None = None) -> Integrand:
    """Split s as exp(covariance struts) times an X-substantial remainder.

    With ``max_struts`` the input is only trusted (and checked) on terms with at
    most that many X-struts, as happens when it was produced by a truncated
    computation.
    """
    X = list(X)
    pos = {x: i for i, x in enumerate(X)}
    rest_coef: dict = {}
    single: dict = {}
    order = 0
    for d, c in s.terms.items():
        struts, rest = _strut_components(d, X)
        order = max(order, len(struts))
        if not struts:
            rest_coef[rest] = rest_coef.get(rest, 0) + c
        elif len(struts) == 1:
            single.setdefault(rest, {})[struts[0]] = c
    if max_struts is not None:
        order = min(order, max_struts)
    base = None
    for rho in sorted(rest_coef):
        if rest_coef[rho]:
            base = rho
            break
    if base is None:
        raise NonIntegrable("no strut-free part to normalize against")
    r0 = rest_coef[base]
    table = {comp: c / r0 for comp, c in single.get(base, {}).items()}
    g = _generators(s)
    combos = [[{} for _ in X] for _ in X]
    for comp, c in table.items():
        a, b, bead = _strut_bead(comp)
        u, v = pos[a], pos[b]
        if u == v:
            for bb in (bead, beads.bar(bead)):
                combos[u][u][bb] = combos[u][u].get(bb, 0) + c
        else:
            combos[u][v][bead] = combos[u][v].get(bead, 0) + c
            bb = beads.bar(bead)
            combos[v][u][bb] = combos[v][u].get(bb, 0) + c
    M = [[_entry_from_combo({b: c for b, c in combos[i][j].items() if c}, g) for j in range(len(X))] for i in range(len(X))]
    if X and rational_inverse(eps_matrix(M)) is None:
        raise NonIntegrable("augmentation of the covariance is singular")
    R = DiagramSum._raw(dict(rest_coef), s.cap)
    strut_sum = DiagramSum._raw({Diagram((comp,), ()): c for comp, c in table.items()}, None)
    recon = exp_union(strut_sum, order=order).union(R) if order else R
    if _restrict(recon, X, order, s) != _restrict(s, X, order, s):
        raise NonHermitianStrutPart("strut part is not the exponential of a Hermitian strut matrix")
    return Integrand(X, M, R, s.cap, order)


def _restrict(t: DiagramSum, X, order, ref: DiagramSum) -> dict:
    maxdeg = max((d.degree() for d in ref.terms), default=0)
    maxhair = max((d.hair_count() for d in ref.terms), default=0)
    return {
        d: c
        for d, c in t.terms.items()
        if len(_strut_components(d, X)[0]) <= order and d.degree() <= maxdeg and d.hair_count() <= maxhair
    }


def perfect_matchings(items: list):
    if not items:
        yield []
        return
    a = items[0]
    for k in range(1, len(items)):
        rest = items[1:k] + items[k + 1 :]
        for m in perfect_matchings(rest):
            yield [(a, items[k])] + m


def integrate(I: Integrand) -> DiagramSum:
    """Pair the remainder against exp(-1/2 sum strut(∂x_i -> ∂x_j, M^-1[i][j])) one slice at a time."""
    X = I.variables
    if not X:
        return I.substantial
    W = [[beads.intern(e) for e in row] for row in herm_invert(I.covariance)]
    pos = {x: i for i, x in enumerate(X)}
    cap = I.substantial.cap

    def work(item):
        d, c = item
        r = d.to_raw()
        legs = sorted(v for x in X for v in r.legs(x))
        out: dict = {}
        if len(legs) % 2:
            return out
        sign = Fraction(-1) ** (len(legs) // 2)
        raws = []
        for m in perfect_matchings(legs):
            w = r.copy()
            for a, b in m:
                i, j = pos[r.nodes[a]], pos[r.nodes[b]]
                ids = w.union(strut(dual(X[i]), dual(X[j]), W[i][j]))
                tail, head = ids[0], ids[1]
                w.weld(tail, a)
                w.weld(head, b)
            raws.append((c * sign, w))
        _accumulate(out, raws, cap)
        return out

    return _reduce(_map_terms(work, list(I.substantial.terms.items())), cap)


def integrate_sum(s: DiagramSum, X: Sequence[str]) -> DiagramSum:
    return integrate(decompose(s, X))


# ---------------------------------------------------------------- beads to h-legs


def _place(r: RawDiagram, e: int, key: tuple, color: str = "h") -> None:
    """Replace edge e by the chain key[0] h key[1] h ... along its orientation."""
    r.subdivide(e, [color] * (len(key) - 1), list(key))


def _place_circle(r: RawDiagram, key: tuple, color: str = "h") -> None:
    k = len(key) - 1
    if k == 0:
        r.circles.append(key[0])
        return
    arcs = list(key[1:k]) + [beads.mul(key[k], key[0])]
    r.union(wheel([color] * k, arcs))


def _expand_all(r: RawDiagram, fn, budget: int, color: str) -> list:
    """Replace every bead b by fn(b), an h-element; keep at most ``budget`` new legs."""
    edge_ids = list(r.edges)
    parts = [fn(r.edges[e][2]) for e in edge_ids] + [fn(b) for b in r.circles]
    acc = [(Fraction(1), (), 0)]
    for p in parts:
        nxt = []
        for c, picks, used in acc:
            for key, v in p.terms.items():
                k = len(key) - 1
                if used + k <= budget:
                    nxt.append((c * v, picks + (key,), used + k))
        acc = nxt
    out = []
    ne = len(edge_ids)
    for c, picks, _ in acc:
        d = r.copy()
        d.circles = []
        for e, key in zip(edge_ids, picks[:ne]):
            _place(d, e, key, color)
        for key in picks[ne:]:
            _place_circle(d, key, color)
        out.append((c, d))
    return out


def phi_diagrams(s: DiagramSum, site: int, cap: int, color: str = "h") -> DiagramSum:
    """Apply t_site -> exp(-h) t_site exp(h) to every bead, keeping at most cap new h legs."""
    out: dict = {}
    for d, c in s.terms.items():
        _accumulate(out, [(c * k, r) for k, r in _expand_all(d.to_raw(), lambda b: phi_bead(b, site, cap), cap, color)])
    return DiagramSum._raw(out, s.cap)


def eta_diagrams(s: DiagramSum, site: int, color: str = "h") -> DiagramSum:
    """Leibniz extension of eta over the edges (and circles) of each diagram."""
    out: dict = {}
    for d, c in s.terms.items():
        r = d.to_raw()
        raws = []
        for e in list(r.edges):
            for key, v in eta_bead(r.edges[e][2], site).terms.items():
                w = r.copy()
                _place(w, e, key, color)
                raws.append((c * v, w))
        for j, b in enumerate(r.circles):
            for key, v in eta_bead(b, site).terms.items():
                w = r.copy()
                del w.circles[j]
                _place_circle(w, key, color)
                raws.append((c * v, w))
        _accumulate(out, raws)
    return DiagramSum._raw(out, s.cap)


def helement_circle(x: HElement, color: str = "h") -> DiagramSum:
    """Close every term of an h-element into a circle (a wheel with h legs)."""
    out: dict = {}
    for key, v in x.terms.items():
        r = RawDiagram()
        _place_circle(r, key, color)
        _accumulate(out, [(v, r)])
    return DiagramSum._raw(out, None)


def wrapping_move(M, D: DiagramSum, site: int) -> DiagramSum:
    """con_h(eta_site(D) - 1/2 D ⊔ circle(tr(M^-1 eta_site(M))))."""
    for d in D.terms:
        if d.leg_colors().count(dual("h")) != 1:
            raise WrongLegCount("each term must carry exactly one ∂h leg")
    body = eta_diagrams(D, site)
    if M:
        inv = hmatrix(herm_invert(M), 1)
        prod = hmat_mul(inv, eta(M, site))
        tr = HElement.zero(1)
        for i in range(len(M)):
            tr = tr + prod[i][i]
        body = body - D.union(helement_circle(tr)).scale(Fraction(1, 2))
    return contract_h(body)


# ---------------------------------------------------------------- hair with wheels


def hair_nu(M, s: DiagramSum, nu: DiagramSum | None, D: int, g: int | None = None) -> DiagramSum:
    """exp(-1/2 wheels(chi'(M))) ⊔ hair(s) ⊔ nu(h_1) ... nu(h_g), truncated at D hair legs."""
    if nu is None:
        log.warning("hair_nu: nu not supplied, using the placeholder nu = 1")
        nu = DiagramSum.one()
    if g is None:
        g = max([_generators(s)] + [beads.bead_g(b) for row in M for e in row for _, b in _entry_beads(e)])
    out = hair(s, D)
    if M:
        w = wheels_from_cyclic(chi_prime(M, D)).scale(Fraction(-1, 2))
        if w.terms:
            out = exp_union(w, hair_cap=D).union(out, hair_cap=D)
    for i in range(1, g + 1):
        copy = recolor(nu, {"h": f"h{i}"})
        out = out.union(copy, hair_cap=D)
    return out.hair_truncate(D)


# ---------------------------------------------------------------- claspers


@dataclass
class ClasperSpec:
    """2n Y-vertices with three ordered legs each and a (6n)x(6n) linking matrix."""

    count: int
    linking: list

    def legs(self) -> int:
        return 3 * self.count


def _link_entry(e):
    if isinstance(e, (int, Fraction)):
        return [(Fraction(e), ())] if e else []
    return beads.split(e)


def complete_contraction(c: ClasperSpec) -> DiagramSum:
    """Sum over perfect matchings of the Y legs; each glued pair carries its linking entry."""
    n = c.legs()
    if n % 2:
        raise OddLegCount(f"{n} legs cannot be matched in pairs")
    if len(c.linking) != n or any(len(row) != n for row in c.linking):
        raise WrongLegCount(f"linking matrix must be {n}x{n}")
    base = RawDiagram()
    leg_ids = []
    for v in range(c.count):
        centre = base.add_vertex()
        for k in range(3):
            leg = base.add_leg(f"y{3 * v + k}")
            base.add_edge(centre, leg)
            leg_ids.append(leg)
    out: dict = {}
    for m in perfect_matchings(list(range(n))):
        variants = [(Fraction(1), base.copy())]
        for a, b in m:
            nxt = []
            for coef, r in variants:
                for k, bead in _link_entry(c.linking[a][b]):
                    w = r.copy()
                    w.weld(leg_ids[a], leg_ids[b], bead)
                    nxt.append((coef * k, w))
            variants = nxt
        _accumulate(out, variants)
    return DiagramSum._raw(out, None)
