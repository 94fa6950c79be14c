import random
from fractions import Fraction
from itertools import count

import pytest
from hypothesis import given

from ratkon import beads, randgen
from ratkon.diagrams import (
    DiagramSum,
    RawDiagram,
    algebra_ops,
    alpha_bead,
    degree_truncate,
    exp_union,
    hair,
    normalize,
    push_group,
    string_alpha,
    strut,
    substitute_beads,
    tripod,
    wheel,
    wheels_from_cyclic,
)
from ratkon.errors import ConstantTermPresent
from ratkon.freegroup import GroupRingElement
from ratkon.helement import chi_prime
from ratkon.localization import from_group_ring, loc_invert, loc_mul
from ratkon.series import CyclicSeries

from conftest import seeds

S = DiagramSum.from_raw


def relabel(r: RawDiagram, rng: random.Random, flip: bool) -> RawDiagram:
    """An isomorphic copy: fresh ids, rotated cyclic orders, optionally reversed edges."""
    ids = list(r.nodes) + list(r.edges)
    fresh = rng.sample(range(10 * len(ids) + 10), len(ids))
    m = dict(zip(ids, fresh))
    reversed_edges = {e for e in r.edges if flip and rng.random() < 0.5}
    d = RawDiagram()
    d.nodes = {m[v]: c for v, c in r.nodes.items()}
    for e, (t, h, b) in r.edges.items():
        d.edges[m[e]] = [m[h], m[t], beads.bar(b)] if e in reversed_edges else [m[t], m[h], b]
    for v, hs in r.cyc.items():
        hs = [(m[e], 1 - end if e in reversed_edges else end) for e, end in hs]
        k = rng.randrange(len(hs)) if hs else 0
        d.cyc[m[v]] = hs[k:] + hs[:k]
    d.circles = list(r.circles)
    d._ids = count(max(fresh) + 1)
    return d


# ---- normalize

def test_bead_linearity():
    b = GroupRingElement(2, {(1,): 2, (2,): 1})
    assert S(strut("x", "y", b)) == S(strut("x", "y", (1,)), 2) + S(strut("x", "y", (2,)))


def test_antisymmetry():
    assert S(tripod(["x", "y", "z"])) == -S(tripod(["y", "x", "z"]))
    assert S(tripod(["x", "y", "z"])) == S(tripod(["y", "z", "x"]))
    assert S(tripod(["x", "x", "y"])).is_zero()


def test_edge_reversal():
    assert S(strut("x", "y", (1,))) == S(strut("y", "x", (-1,)))


def test_normalize_accepts_lists():
    pair = [(1, strut("x", "y", (1,))), (-1, strut("y", "x", (-1,)))]
    assert normalize(pair).is_zero()


@given(seeds)
def test_isomorphism_invariance(seed):
    rng = random.Random(seed)
    r = randgen.diagram(rng, ["x", "y", "h1"], 2, max_degree=3, loc_prob=0.2)
    assert S(relabel(r, rng, flip=True)) == S(r)


@given(seeds)
def test_reflection_of_one_vertex_flips_sign(seed):
    rng = random.Random(seed)
    r = randgen.diagram(rng, ["x", "y", "z"], 2, max_degree=3)
    if not r.cyc:
        return
    d = r.copy()
    v = rng.choice(sorted(d.cyc))
    d.cyc[v] = d.cyc[v][::-1]
    assert S(d) == -S(r)


# ---- algebra

def test_union_with_unit():
    s = S(wheel(["h1", "h2"]))
    assert DiagramSum.one().union(s) == s
    assert algebra_ops("union", s, DiagramSum.one()) == s


def test_exp_of_zero():
    assert exp_union(DiagramSum.zero(6)) == DiagramSum.one(6)


def test_exp_rejects_constant():
    with pytest.raises(ConstantTermPresent):
        exp_union(DiagramSum.one(3))


def test_exp_of_wheel_and_its_negative():
    w = S(wheel(["x", "y"]), cap=6)
    assert exp_union(w).union(exp_union(-w)) == DiagramSum.one(6)


def test_degree_truncate():
    w = S(wheel(["x", "y"]), cap=6)
    e = exp_union(w)
    assert degree_truncate(e, 0) == DiagramSum.one(0)
    assert degree_truncate(e, 3) == DiagramSum.one(3) + w.with_cap(3)
    assert degree_truncate(e, 6) == e


# ---- wheels

def test_wheels_from_cyclic():
    one_leg = wheels_from_cyclic(CyclicSeries({("h1",): 1}, 3))
    assert one_leg == S(wheel(["h1"]))
    both = wheels_from_cyclic(CyclicSeries({("h1", "h2"): 1, ("h2", "h1"): 1}, 3))
    assert len(both.terms) == 1
    assert both == S(wheel(["h1", "h2"]), 2)


def test_scalar_log_wheels():
    t1 = GroupRingElement.generator(1, 1)
    assert wheels_from_cyclic(chi_prime([[t1]], 2)) == S(wheel(["h1"]))


# ---- bead substitutions

def test_alpha_on_generators():
    assert alpha_bead((1,), 1, 2) == (-2, 1, 2)
    assert alpha_bead((2,), 1, 2) == (2,)


def test_push_by_identity():
    rng = random.Random(1)
    s = randgen.diagram_sum(rng, ["x", "y"], 2)
    assert push_group(s, (), "x") == s
    assert substitute_beads(s, ("push_group", (), "y")) == s


@given(seeds)
def test_alpha_then_inverse(seed):
    rng = random.Random(seed)
    s = randgen.diagram_sum(rng, ["x", "y"], 2, loc_prob=0.2)
    back = string_alpha(string_alpha(s, 1, 2), 1, 2, inverse=True)
    assert hair(back, 2) == hair(s, 2)


@given(seeds)
def test_push_then_pull(seed):
    rng = random.Random(seed)
    s = randgen.diagram_sum(rng, ["x", "y"], 2)
    assert push_group(push_group(s, (1, -2), "x"), (2, -1), "x") == s


# ---- hair

def test_hair_of_strut():
    got = hair(S(strut("x", "y", (1,))), 2)
    want = S(strut("x", "y"))
    for k, c in ((1, 1), (2, Fraction(1, 2))):
        r = strut("x", "y")
        r.subdivide(next(iter(r.edges)), ["h1"] * k, [()] * (k + 1))
        want = want + S(r, c)
    assert got == want


def test_hair_of_trivial_bead():
    s = S(strut("x", "y"))
    assert hair(s, 3) == s


def test_hair_sees_through_cancellation():
    assert hair(S(strut("x", "y", beads.mul((1,), (-1,)))), 3) == hair(S(strut("x", "y")), 3)
    # (2 - t1)^-1 (2 - t1) is a different presentation of 1
    s = from_group_ring(2 - GroupRingElement.generator(1, 1))
    b = beads.intern(loc_mul(loc_invert(s), s))
    assert hair(S(strut("x", "y", b)), 3) == hair(S(strut("x", "y")), 3)
