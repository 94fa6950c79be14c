import random
from fractions import Fraction

import pytest
from hypothesis import given

from ratkon import randgen
from ratkon.codec import parse_element
from ratkon.errors import SingularAugmentation, ZeroAugmentation
from ratkon.freegroup import GroupRingElement
from ratkon.localization import (
    as_loc,
    from_group_ring,
    herm_invert,
    loc_add,
    loc_constant,
    loc_equal,
    loc_invert,
    loc_mul,
    loc_neg,
    loc_star,
    loc_star_eps,
    magnus_expand,
    matrix_magnus,
    rational_inverse,
    sigma_check,
)
from ratkon.series import NCSeries
from ratkon.verify import wrap_example_matrix

from conftest import presentations, ring_elements

G = GroupRingElement


def t(i, g=3):
    return G.generator(g, abs(i), 1 if i > 0 else -1)


def series(terms, cap):
    return NCSeries({tuple(w.split()) if w else (): c for w, c in terms.items()}, cap)


# ---- from_group_ring

def test_zero_element():
    z = from_group_ring(G(2, {}))
    assert z.augment() == 0
    assert magnus_expand(z, 4).is_zero()


def test_generator_expands_to_exponential():
    s = from_group_ring(t(1, 1))
    assert magnus_expand(s, 3) == series({"": 1, "h1": 1, "h1 h1": Fraction(1, 2), "h1 h1 h1": Fraction(1, 6)}, 3)


def test_augmentation_of_ring_element():
    assert from_group_ring(3 - t(1, 1)).augment() == 2


# ---- arithmetic

@given(presentations())
def test_negation_cancels(s):
    assert loc_equal(loc_add(s, loc_neg(s)), loc_constant(s.g, 0), 5)


def test_product_of_generators():
    lhs = loc_mul(from_group_ring(t(1, 2)), from_group_ring(t(2, 2)))
    assert loc_equal(lhs, from_group_ring(t(1, 2) * t(2, 2)), 6)


@given(presentations(), presentations())
def test_augmentation_is_multiplicative(s, u):
    assert loc_mul(s, u).augment() == s.augment() * u.augment()
    assert loc_add(s, u).augment() == s.augment() + u.augment()


@given(presentations(), presentations())
def test_magnus_is_a_ring_map(s, u):
    N = 4
    assert magnus_expand(loc_mul(s, u), N) == magnus_expand(s, N) * magnus_expand(u, N)
    assert magnus_expand(loc_add(s, u), N) == magnus_expand(s, N) + magnus_expand(u, N)


# ---- inversion

def test_invert_one():
    assert loc_equal(loc_invert(loc_constant(1, 1)), loc_constant(1, 1), 6)


def test_invert_two_minus_t():
    inv = loc_invert(from_group_ring(2 - t(1, 1)))
    # (2 - e^h)^-1 = sum_n (e^h - 1)^n, read off through degree 2
    assert magnus_expand(inv, 2) == series({"": 1, "h1": 1, "h1 h1": Fraction(3, 2)}, 2)


def test_invert_zero_augmentation():
    with pytest.raises(ZeroAugmentation):
        loc_invert(from_group_ring(1 - t(1, 1)))


def test_nested_rational_example():
    inner = parse_element("3 - t1^2*t2^-1*(t3 + 1)*t1^-1", 3)
    assert as_loc(inner, 3).augment() == 1
    inv = loc_invert(as_loc(inner, 3))
    assert inv.augment() == 1
    e = loc_add(loc_mul(inv, from_group_ring(t(2))), loc_constant(3, -5))
    assert e.augment() == -4


@given(presentations())
def test_inverse_times_element_is_one(s):
    if s.augment() == 0:
        return
    one = loc_constant(s.g, 1)
    assert loc_equal(loc_mul(s, loc_invert(s)), one, 5)
    assert loc_equal(loc_mul(loc_invert(s), s), one, 5)


def test_equality_examples():
    g1 = from_group_ring(t(1, 1))
    one = loc_constant(1, 1)
    assert loc_equal(loc_mul(g1, from_group_ring(t(-1, 1))), one, 8)
    s = from_group_ring(2 - t(1, 1))
    assert loc_equal(loc_mul(loc_invert(s), s), one, 6)
    assert not loc_equal(s, one, 1)


# ---- star

def test_star_of_word():
    s = from_group_ring(t(1) * t(2))
    star, eps = loc_star_eps(s)
    assert loc_equal(star, from_group_ring(t(-2) * t(-1)), 6)
    assert eps == 1


@given(presentations())
def test_star_is_an_involution(s):
    assert loc_equal(loc_star(loc_star(s)), s, 5)
    assert loc_star(s).augment() == s.augment()


@given(presentations(), presentations())
def test_star_reverses_products(s, u):
    assert loc_equal(loc_star(loc_mul(s, u)), loc_mul(loc_star(u), loc_star(s)), 4)


# ---- matrices

def test_sigma_check():
    one, zero = G.constant(3, 1), G.constant(3, 0)
    ident = sigma_check([[one, zero], [zero, one]])
    assert ident.ok and ident.unimodular
    wrap = sigma_check(wrap_example_matrix())
    assert wrap.ok and wrap.det == 1
    assert not sigma_check([[1 - t(1, 1)]])


def test_invert_identity():
    one, zero = G.constant(2, 1), G.constant(2, 0)
    inv = herm_invert([[one, zero], [zero, one]])
    for i in range(2):
        for j in range(2):
            assert loc_equal(inv[i][j], loc_constant(2, int(i == j)), 6)


def test_invert_singular():
    with pytest.raises(SingularAugmentation):
        herm_invert([[1 - t(1, 1)]])


def _series_matmul(a, b):
    n, m, k = len(a), len(b[0]), len(b)
    return [[sum((a[i][r] * b[r][j] for r in range(k)), NCSeries.zero(a[0][0].cap)) for j in range(m)] for i in range(n)]


def test_wrap_matrix_inverse_matches_neumann_series():
    N = 3
    M = wrap_example_matrix()
    S = matrix_magnus(M, N)
    E = [[s.constant_term() for s in row] for row in S]
    Einv = [[NCSeries.constant(c, N) for c in row] for row in rational_inverse(E)]
    nil = [[S[i][j] - NCSeries.constant(E[i][j], N) for j in range(2)] for i in range(2)]
    step = _series_matmul(Einv, nil)
    step = [[-x for x in row] for row in step]
    # M^-1 = sum_k (-E^-1 N)^k E^-1; N has no constant term so k <= 3 suffices
    acc = Einv
    power = Einv
    for _ in range(N):
        power = _series_matmul(step, power)
        acc = [[acc[i][j] + power[i][j] for j in range(2)] for i in range(2)]
    got = matrix_magnus(herm_invert(M), N)
    assert got == acc


def test_linking_block_inverse():
    rng = random.Random(7)
    g = 2
    L = randgen.hermitian_poly_matrix(rng, g, 3)
    one, zero = G.constant(g, 1), G.constant(g, 0)
    I = [[one if i == j else zero for j in range(3)] for i in range(3)]
    Z = [[zero] * 3 for _ in range(3)]
    big = [Z[i] + I[i] for i in range(3)] + [I[i] + L[i] for i in range(3)]
    inv = herm_invert(big)
    want = [L[i] + [-x for x in I[i]] for i in range(3)] + [[-x for x in I[i]] + Z[i] for i in range(3)]
    for i in range(6):
        for j in range(6):
            assert loc_equal(loc_neg(inv[i][j]), as_loc(want[i][j], g), 4)


@given(ring_elements(g=2))
def test_ring_elements_embed(a):
    s = from_group_ring(a)
    assert s.augment() == a.augment()
    assert loc_equal(as_loc(a, 2), s, 4)
