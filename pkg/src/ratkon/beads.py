"""Bead values decorating diagram edges and the factors of h-extended elements.

A bead is either a reduced free word (tuple of signed ints) or an interned
``LocElement``.  Interning makes structurally identical presentations the
same object, so beads can be hashed and compared cheaply.
"""
from __future__ import annotations

import hashlib
import threading
from fractions import Fraction

from .freegroup import GroupRingElement, format_word, word_inverse, word_mul
from .localization import (
    LocElement,
    from_group_ring,
    lmul_ring,
    loc_mul,
    loc_star,
    loc_widen,
    magnus_expand,
    magnus_word,
    rmul_ring,
)
from .series import NCSeries

ONE: tuple = ()

_INTERN: dict = {}
_BY_ID: list = []
_DIGEST: list = []
_BY_DIGEST: dict = {}
_LOCK = threading.Lock()


def intern(s: LocElement) -> LocElement:
    if s._bid is not None:
        return s
    k = (s.g, s.key())
    hit = _INTERN.get(k)
    if hit is not None:
        return hit
    with _LOCK:
        hit = _INTERN.get(k)
        if hit is None:
            s._bid = len(_BY_ID)
            d = hashlib.blake2b(repr(k).encode(), digest_size=16).digest()
            _INTERN[k] = s
            _BY_ID.append(s)
            _DIGEST.append(d)
            _BY_DIGEST[d] = s
            hit = s
    return hit


def by_id(bid: int) -> LocElement:
    return _BY_ID[bid]


def by_digest(d: bytes) -> LocElement:
    return _BY_DIGEST[d]


def is_word(b) -> bool:
    return isinstance(b, tuple)


def sort_key(b):
    # a digest of the presentation rather than the interning order, so that
    # canonical forms do not depend on which thread met a bead first
    if isinstance(b, tuple):
        return (0, len(b), b)
    return (1, 0, _DIGEST[intern(b)._bid])


def bar(b):
    if isinstance(b, tuple):
        return word_inverse(b)
    b = intern(b)
    if b._bar is None:
        c = intern(loc_star(b))
        b._bar = c
        c._bar = b
    return b._bar


def split(x) -> list[tuple[Fraction, object]]:
    """Multilinear splitting into (coefficient, bead) pairs."""
    if isinstance(x, tuple):
        return [(Fraction(1), x)]
    if isinstance(x, GroupRingElement):
        return [(c, w) for w, c in x.terms.items()]
    ring = x.as_group_ring()
    if ring is not None:
        return [(c, w) for w, c in ring.terms.items()]
    return [(Fraction(1), intern(x))]


def _ring(w: tuple, g: int) -> GroupRingElement:
    return GroupRingElement._raw(g, {w: Fraction(1)})


_MUL: dict = {}


def _mkey(b):
    return b if isinstance(b, tuple) else intern(b)._bid


def mul(a, b):
    """Product of two beads (a then b)."""
    if isinstance(a, tuple) and isinstance(b, tuple):
        return word_mul(a, b)
    if isinstance(a, tuple) and not a:
        return b
    if isinstance(b, tuple) and not b:
        return a
    key = (_mkey(a), _mkey(b))
    hit = _MUL.get(key)
    if hit is not None:
        return hit
    g = max(bead_g(a), bead_g(b))
    if isinstance(a, tuple):
        out = intern(lmul_ring(_ring(a, g), loc_widen(b, g)))
    elif isinstance(b, tuple):
        out = intern(rmul_ring(loc_widen(a, g), _ring(b, g)))
    else:
        out = intern(loc_mul(loc_widen(a, g), loc_widen(b, g)))
    _MUL[key] = out
    return out


def mul_split(a, b) -> list[tuple[Fraction, object]]:
    return split(mul(a, b))


def magnus(b, cap: int) -> NCSeries:
    if isinstance(b, tuple):
        return NCSeries._raw(magnus_word(b, cap), cap)
    return magnus_expand(b, cap)


def eps(b) -> Fraction:
    if isinstance(b, tuple):
        return Fraction(1)
    return b.augment()


def to_loc(b, g: int) -> LocElement:
    if isinstance(b, tuple):
        return from_group_ring(_ring(b, g))
    return b


def to_ring_or_loc(b, g: int):
    if isinstance(b, tuple):
        return _ring(b, g)
    return b


def bead_g(b) -> int:
    if isinstance(b, tuple):
        return max((abs(x) for x in b), default=0)
    return b.g


def describe(b) -> str:
    """Readable form; a localized bead prints as selector * core^-1 * column."""
    if isinstance(b, tuple):
        return format_word(b)
    ring = b.as_group_ring()
    if ring is not None:
        return str(ring)
    p = b.presentation
    row = ", ".join(str(e) for e in p.selector)
    core = "; ".join(", ".join(str(e) for e in r) for r in p.core.rows)
    col = ", ".join(str(e) for e in p.column)
    return f"({row}) [{core}]^-1 ({col})"
