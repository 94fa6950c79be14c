"""Seeded random instances for the verification harness and the tests."""
from __future__ import annotations

import random
from fractions import Fraction

from . import beads
from .diagrams import DiagramSum, RawDiagram, dual, strut, tripod, wheel
from .freegroup import GroupRingElement, reduce_word
from .localization import (
    Core,
    LocElement,
    eps_matrix,
    from_group_ring,
    loc_add,
    loc_invert,
    loc_star,
    rational_det,
)


def word(rng: random.Random, g: int, max_len: int = 3) -> tuple:
    n = rng.randint(0, max_len)
    return reduce_word(rng.choice([1, -1]) * rng.randint(1, g) for _ in range(n))


def coefficient(rng: random.Random, lo: int = -3, hi: int = 3) -> Fraction:
    while True:
        c = Fraction(rng.randint(lo, hi), rng.choice([1, 1, 2, 3]))
        if c:
            return c


def ring_element(rng: random.Random, g: int, terms: int = 3, max_len: int = 2) -> GroupRingElement:
    return GroupRingElement(g, {word(rng, g, max_len): coefficient(rng) for _ in range(rng.randint(1, terms))})


def ring_with_augmentation(rng: random.Random, g: int, terms: int = 3) -> GroupRingElement:
    while True:
        a = ring_element(rng, g, terms)
        if a.augment():
            return a


def presentation(rng: random.Random, g: int, max_core: int = 3) -> LocElement:
    """selector * core^-1 * column with an augmentation-invertible core."""
    n = rng.randint(1, max_core)
    while True:
        rows = [[ring_element(rng, g, 2) if rng.random() < 0.7 else GroupRingElement(g) for _ in range(n)] for _ in range(n)]
        if rational_det([[e.augment() for e in r] for r in rows]):
            break
    sel = tuple(ring_element(rng, g, 2) for _ in range(n))
    col = tuple(ring_element(rng, g, 2) for _ in range(n))
    return LocElement(sel, Core(rows, g), col)


def loc_unit(rng: random.Random, g: int) -> LocElement:
    """Inverse of a polynomial with nonzero augmentation; its core has size 2."""
    return loc_invert(from_group_ring(ring_with_augmentation(rng, g, 2)))


def hermitian_matrix(rng: random.Random, g: int, n: int, loc_prob: float = 0.3) -> list:
    """Random Hermitian n x n matrix over the localized ring with invertible augmentation."""
    while True:
        m = [[None] * n for _ in range(n)]
        for i in range(n):
            base = ring_element(rng, g, 2)
            d = base + base.involute() + GroupRingElement.constant(g, rng.randint(1, 4))
            if rng.random() < loc_prob:
                u = loc_unit(rng, g)
                d = loc_add(from_group_ring(d), loc_add(u, loc_star(u)))
            m[i][i] = d
            for j in range(i + 1, n):
                if rng.random() < loc_prob:
                    e = loc_unit(rng, g)
                    m[i][j], m[j][i] = e, loc_star(e)
                else:
                    e = ring_element(rng, g, 2) if rng.random() < 0.8 else GroupRingElement(g)
                    m[i][j], m[j][i] = e, e.involute()
        if rational_det(eps_matrix(m)):
            return m


def hermitian_poly_matrix(rng: random.Random, g: int, n: int) -> list:
    return hermitian_matrix(rng, g, n, loc_prob=0.0)


def _bead(rng, g, loc_prob):
    if rng.random() < loc_prob:
        return beads.intern(loc_unit(rng, g))
    return word(rng, g, 2)


def diagram(rng: random.Random, colors: list, g: int, max_degree: int = 3, loc_prob: float = 0.0, forbid=()) -> RawDiagram:
    """A random strut, tripod, wheel or union of these with the given leg colors."""
    forbid = set(forbid)
    while True:
        kind = rng.choice(["strut", "tripod", "tripod", "wheel", "pair"])
        if kind == "strut":
            a, b = rng.choice(colors), rng.choice(colors)
            if {a, b} <= forbid or (a in forbid and b in forbid):
                continue
            return strut(a, b, _bead(rng, g, loc_prob))
        if kind == "tripod":
            return tripod([rng.choice(colors) for _ in range(3)], [_bead(rng, g, loc_prob) for _ in range(3)])
        if kind == "wheel" and max_degree >= 2:
            k = rng.randint(1, min(3, max_degree))
            return wheel([rng.choice(colors) for _ in range(k)], [_bead(rng, g, loc_prob) for _ in range(k)])
        if kind == "pair" and max_degree >= 2:
            d = tripod([rng.choice(colors) for _ in range(3)], [_bead(rng, g, loc_prob) for _ in range(3)])
            other = diagram(rng, colors, g, max_degree - 1, loc_prob, forbid)
            d.union(other)
            return d


def diagram_sum(rng: random.Random, colors: list, g: int, terms: int = 2, max_degree: int = 3, loc_prob: float = 0.0, forbid=()) -> DiagramSum:
    out = DiagramSum.zero()
    while out.is_zero():
        for _ in range(rng.randint(1, terms)):
            out = out + DiagramSum.from_raw(diagram(rng, colors, g, max_degree, loc_prob, forbid), coefficient(rng))
    return out


def substantial_sum(rng: random.Random, X: list, others: list, g: int, terms: int = 2, max_degree: int = 3, loc_prob: float = 0.0) -> DiagramSum:
    """Random sum with no strut joining two legs colored from X."""
    return diagram_sum(rng, X + others, g, terms, max_degree, loc_prob, forbid=X)


def operator_sum(rng: random.Random, X: list, aux: str, g: int, terms: int = 2) -> DiagramSum:
    """Random sum carrying ∂-legs; struts always join a ∂-leg to the auxiliary color."""
    cols = X + [dual(x) for x in X] + [aux]
    out = DiagramSum.zero()
    while out.is_zero():
        for _ in range(rng.randint(1, terms)):
            if rng.random() < 0.3:
                r = strut(dual(rng.choice(X)), aux, word(rng, g, 2))
            else:
                r = tripod([rng.choice(cols) for _ in range(3)], [word(rng, g, 2) for _ in range(3)])
            out = out + DiagramSum.from_raw(r, coefficient(rng))
    return out
