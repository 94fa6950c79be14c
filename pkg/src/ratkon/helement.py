"""The h-extended ring: sums of products f0 h f1 h ... h fk with localized factors.

A term is a tuple of k+1 beads (k is its h-degree); ``h^2`` shows up as an
empty word between two h's.  Factors stay atomic and are only expanded by
``magnus``.  Also here: the conjugation substitution at a site, the
derivations eta and eta_hat, and the trace-log series chi_h and chi_prime.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from . import beads
from .errors import CapExceeded, NonUnipotentConstantTerm
from .freegroup import GroupRingElement
from .localization import (
    LocElement,
    eps_matrix,
    matrix_inverse,
    matrix_magnus,
    rational_inverse,
)
from .errors import SingularAugmentation
from .series import CyclicSeries, NCSeries

H = "h"


def _merge(a: tuple, b: tuple) -> list:
    """Concatenate two factor tuples, multiplying the touching beads."""
    if not a:
        return [(Fraction(1), b)]
    if not b:
        return [(Fraction(1), a)]
    return [(c, a[:-1] + (m,) + b[1:]) for c, m in beads.mul_split(a[-1], b[0])]


class HElement:
    __slots__ = ("cap", "terms")

    def __init__(self, terms: Mapping[tuple, object] | None = None, cap: int = 0):
        self.cap = cap
        out: dict = {}
        for key, c in (terms or {}).items():
            c = Fraction(c)
            if not c or len(key) - 1 > cap:
                continue
            for c2, k2 in _split_key(tuple(key)):
                out[k2] = out.get(k2, 0) + c * c2
        self.terms = {k: v for k, v in out.items() if v}

    @classmethod
    def _raw(cls, terms: dict, cap: int) -> "HElement":
        x = cls.__new__(cls)
        x.cap = cap
        x.terms = {k: v for k, v in terms.items() if v}
        return x

    @classmethod
    def zero(cls, cap: int) -> "HElement":
        return cls._raw({}, cap)

    @classmethod
    def one(cls, cap: int) -> "HElement":
        return cls._raw({((),): Fraction(1)}, cap)

    @classmethod
    def h(cls, cap: int) -> "HElement":
        return cls._raw({((), ()): Fraction(1)} if cap >= 1 else {}, cap)

    @classmethod
    def of(cls, x, cap: int) -> "HElement":
        """Lift a bead, group-ring element, localized element or rational."""
        if isinstance(x, HElement):
            return x.truncate(cap) if x.cap >= cap else HElement._raw(dict(x.terms), cap)
        if isinstance(x, (int, Fraction)):
            return cls._raw({((),): Fraction(x)}, cap)
        return cls._raw({(b,): c for c, b in beads.split(x)}, cap)

    def __eq__(self, other):
        if not isinstance(other, HElement):
            return NotImplemented
        return self.cap == other.cap and self.terms == other.terms

    __hash__ = None

    def degree(self) -> int:
        return max((len(k) - 1 for k in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        return f"HElement({format_helement(self)!r}, cap={self.cap})"

    def __add__(self, other: "HElement") -> "HElement":
        cap = min(self.cap, other.cap)
        out = {k: v for k, v in self.terms.items() if len(k) - 1 <= cap}
        for k, v in other.terms.items():
            if len(k) - 1 <= cap:
                out[k] = out.get(k, 0) + v
        return HElement._raw(out, cap)

    def __neg__(self) -> "HElement":
        return HElement._raw({k: -v for k, v in self.terms.items()}, self.cap)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "HElement":
        c = Fraction(c)
        return HElement._raw({k: v * c for k, v in self.terms.items()}, self.cap)

    def __mul__(self, other: "HElement") -> "HElement":
        cap = min(self.cap, other.cap)
        out: dict = {}
        for k1, c1 in self.terms.items():
            d1 = len(k1) - 1
            for k2, c2 in other.terms.items():
                if d1 + len(k2) - 1 > cap:
                    continue
                for c3, k in _merge(k1, k2):
                    out[k] = out.get(k, 0) + c1 * c2 * c3
        return HElement._raw(out, cap)

    def truncate(self, cap: int) -> "HElement":
        return HElement._raw({k: v for k, v in self.terms.items() if len(k) - 1 <= cap}, min(cap, self.cap))

    def with_cap(self, cap: int) -> "HElement":
        return HElement._raw({k: v for k, v in self.terms.items() if len(k) - 1 <= cap}, cap)

    def bar(self) -> "HElement":
        """Involution: reverse, involute factors, h -> -h."""
        return HElement._raw(
            {tuple(beads.bar(b) for b in reversed(k)): v * (-1) ** (len(k) - 1) for k, v in self.terms.items()},
            self.cap,
        )

    def magnus(self, cap: int) -> NCSeries:
        """Full expansion with t_i -> exp(h_i), keeping h as a letter."""
        hs = NCSeries._raw({(H,): Fraction(1)}, cap)
        out: dict = {}
        # terms sharing a key prefix share the partial products; a prefix is
        # only needed up to the degree left over for the remaining h letters
        prefix: dict = {}
        for k, v in self.terms.items():
            n = len(k)
            if n - 1 > cap:
                continue
            for j in range(1, n + 1):
                pk = (_bead_ids(k[:j]), n - j)
                if pk in prefix:
                    continue
                left = prefix[(_bead_ids(k[: j - 1]), n - j + 1)] * hs if j > 1 else NCSeries.one(cap)
                prefix[pk] = _drop_above(left * beads.magnus(k[j - 1], cap), cap - (n - j))
            for w, c in prefix[(_bead_ids(k), 0)].terms.items():
                t = out.get(w, 0) + v * c
                if t:
                    out[w] = t
                else:
                    out.pop(w, None)
        return NCSeries._raw(out, cap)


def _split_key(key: tuple) -> list:
    out = [(Fraction(1), ())]
    for f in key:
        parts = beads.split(f) if not isinstance(f, tuple) else [(Fraction(1), f)]
        out = [(c * c2, k + (b,)) for c, k in out for c2, b in parts]
    return out


def format_helement(x: HElement) -> str:
    if not x.terms:
        return "0"
    parts = []
    for k, v in x.terms.items():
        body = " h ".join(f"[{beads.describe(b)}]" for b in k)
        parts.append(f"{v}*{body}")
    return " + ".join(parts)


def deg_h(x: HElement, n: int) -> HElement:
    return HElement._raw({k: v for k, v in x.terms.items() if len(k) - 1 == n}, x.cap)


# ---------------------------------------------------------------- matrices of h-elements


def hmatrix(m, cap: int) -> list[list[HElement]]:
    return [[HElement.of(e, cap) for e in row] for row in m]


def hmat_mul(a, b) -> list[list[HElement]]:
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for l in range(k):
                t = a[i][l] * b[l][j]
                acc = t if acc is None else acc + t
            row.append(acc)
        out.append(row)
    return out


def hmat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def hmat_identity(n: int, cap: int):
    return [[HElement.one(cap) if i == j else HElement.zero(cap) for j in range(n)] for i in range(n)]


def hmat_magnus(a, cap: int) -> list[list[NCSeries]]:
    return [[x.magnus(cap) for x in row] for row in a]


def direct_sum(a, b, zero):
    n, m = len(a), len(b)
    return [list(r) + [zero] * m for r in a] + [[zero] * n + list(r) for r in b]


# ---------------------------------------------------------------- conjugation substitution

_PHI_CACHE: dict = {}


def _phi_letter(x: int, site: int, cap: int) -> HElement:
    if abs(x) != site:
        return HElement._raw({((x,),): Fraction(1)}, cap)
    out: dict = {}
    for a in range(cap + 1):
        for b in range(cap + 1 - a):
            key = _hpower_key(a, (x,), b)
            out[key] = out.get(key, 0) + Fraction((-1) ** a, factorial(a) * factorial(b))
    return HElement._raw(out, cap)


def _bead_ids(k: tuple) -> tuple:
    return tuple(b if isinstance(b, tuple) else beads.intern(b)._bid for b in k)


def _drop_above(s: NCSeries, deg: int) -> NCSeries:
    return NCSeries._raw({w: c for w, c in s.terms.items() if len(w) <= deg}, s.cap)


def _hpower_key(a: int, w: tuple, b: int) -> tuple:
    return ((),) * a + (w,) + ((),) * b


def _phi_bead(bd, site: int, cap: int) -> HElement:
    key = (("w", bd) if isinstance(bd, tuple) else ("L", beads.intern(bd)._bid), site, cap)
    hit = _PHI_CACHE.get(key)
    if hit is not None:
        return hit
    if isinstance(bd, tuple):
        if all(abs(x) != site for x in bd):
            res = HElement._raw({(bd,): Fraction(1)}, cap)
        else:
            res = HElement.one(cap)
            for x in bd:
                res = res * _phi_letter(x, site, cap)
    else:
        # phi is the identity mod h; keep the bead itself rather than an equal
        # but differently presented sum in degree 0
        bd = beads.intern(bd)
        terms = {k: c for k, c in _phi_loc(bd, site, cap).terms.items() if len(k) > 1}
        terms[(bd,)] = Fraction(1)
        res = HElement._raw(terms, cap)
    _PHI_CACHE[key] = res
    return res


def phi_bead(bd, site: int, cap: int) -> HElement:
    return _phi_bead(bd, site, cap)


def _phi_ring(a, site: int, cap: int) -> HElement:
    out = HElement.zero(cap)
    for c, b in beads.split(a):
        out = out + _phi_bead(b, site, cap).scale(c)
    return out


def _inverse_entries(s: LocElement) -> list[list[LocElement]]:
    core = s.core
    n = core.n
    g = s.g
    z = GroupRingElement(g)
    one = GroupRingElement.constant(g, 1)
    units = [tuple(one if k == i else z for k in range(n)) for i in range(n)]
    return [[LocElement(units[i], core, units[j]) for j in range(n)] for i in range(n)]


def _phi_loc(s: LocElement, site: int, cap: int) -> HElement:
    """phi(u C^-1 b) = phi(u) (sum_m (-C^-1 N)^m C^-1) phi(b), N = phi(C) - C."""
    n = s.size()
    cinv = [[HElement.of(e, cap) for e in row] for row in _inverse_entries(s)]
    nmat = [[_phi_ring(e, site, cap) - HElement.of(e, cap) for e in row] for row in s.core.rows]
    vec = [_phi_ring(b, site, cap) for b in s.column]
    # y = C^-1 phi(b), then repeatedly y <- -C^-1 N y
    def apply(mat, v):
        out = []
        for i in range(n):
            acc = HElement.zero(cap)
            for j in range(n):
                if mat[i][j].terms and v[j].terms:
                    acc = acc + mat[i][j] * v[j]
            out.append(acc)
        return out

    y = apply(cinv, vec)
    total = list(y)
    for _ in range(cap):
        y = [-e for e in apply(cinv, apply(nmat, y))]
        if all(e.is_zero() for e in y):
            break
        total = [a + b for a, b in zip(total, y)]
    out = HElement.zero(cap)
    for u, yk in zip(s.selector, total):
        if not u.is_zero():
            out = out + _phi_ring(u, site, cap) * yk
    return out


def phi_conj(x, site: int, cap: int):
    """Substitute t_site -> exp(-h) t_site exp(h), truncated at h-degree cap.

    Accepts group-ring elements, localized elements, h-elements and matrices of these.
    """
    if isinstance(x, list):
        return [phi_conj(e, site, cap) for e in x]
    if isinstance(x, HElement):
        out = HElement.zero(cap)
        hs = HElement.h(cap)
        for k, v in x.terms.items():
            if len(k) - 1 > cap:
                continue
            term = HElement.of(v, cap)
            for j, b in enumerate(k):
                if j:
                    term = term * hs
                term = term * _phi_bead(b, site, cap)
            out = out + term
        return out
    if isinstance(x, (int, Fraction)):
        return HElement.of(x, cap)
    return _phi_ring(x, site, cap)


# ---------------------------------------------------------------- derivations


def _eta_word(w: tuple, site: int) -> dict:
    out: dict = {}
    for p, x in enumerate(w):
        if abs(x) != site:
            continue
        pre, suf = w[:p], w[p + 1 :]
        k1 = (pre + (x,), suf)
        k2 = (pre, (x,) + suf)
        out[k1] = out.get(k1, 0) + 1
        out[k2] = out.get(k2, 0) - 1
    return out


def _eta_bead(b, site: int) -> HElement:
    if isinstance(b, tuple):
        return HElement._raw(_eta_word(b, site), 1)
    return _eta_loc(b, site)


def eta_bead(b, site: int) -> HElement:
    return _eta_bead(b, site)


def _eta_ring(a, site: int) -> HElement:
    out = HElement.zero(1)
    for c, b in beads.split(a):
        out = out + _eta_bead(b, site).scale(c)
    return out


def _eta_loc(s: LocElement, site: int) -> HElement:
    """eta(u C^-1 b) = eta(u) C^-1 b + u C^-1 eta(b) - u C^-1 eta(C) C^-1 b."""
    g = s.g
    n = s.size()
    z = GroupRingElement(g)
    one = GroupRingElement.constant(g, 1)
    units = [tuple(one if k == i else z for k in range(n)) for i in range(n)]
    core = s.core
    out = HElement.zero(1)
    for k, u in enumerate(s.selector):
        if u.is_zero():
            continue
        right = HElement.of(LocElement(units[k], core, s.column), 1)
        out = out + _eta_ring(u, site) * right
    for k, b in enumerate(s.column):
        if b.is_zero():
            continue
        left = HElement.of(LocElement(s.selector, core, units[k]), 1)
        out = out + left * _eta_ring(b, site)
    for p in range(n):
        for q in range(n):
            e = core.rows[p][q]
            if e.is_constant():
                continue
            d = _eta_ring(e, site)
            if d.is_zero():
                continue
            left = HElement.of(LocElement(s.selector, core, units[p]), 1)
            right = HElement.of(LocElement(units[q], core, s.column), 1)
            out = out - left * d * right
    return out


def eta(x, site: int):
    """h-degree one part of the conjugation substitution, computed as a derivation."""
    if isinstance(x, list):
        return [eta(e, site) for e in x]
    if isinstance(x, (int, Fraction)):
        return HElement.zero(1)
    return _eta_ring(x, site)


def eta_hat(x: HElement, site: int, cap: int | None = None) -> HElement:
    """Extension of eta killing h, applied factor by factor (Leibniz)."""
    if cap is None:
        cap = x.cap
    if x.degree() + 1 > cap and x.terms:
        raise CapExceeded(f"h-degree {x.degree() + 1} exceeds cap {cap}")
    out: dict = {}
    for k, v in x.terms.items():
        for j, b in enumerate(k):
            d = _eta_bead(b, site)
            for dk, dv in d.terms.items():
                # the seams on both sides are h's, so no beads merge
                key = k[:j] + dk + k[j + 1 :]
                out[key] = out.get(key, 0) + v * dv
    return HElement._raw(out, cap)


# ---------------------------------------------------------------- trace-log series


def _trace_log(x: list[list[NCSeries]], cap: int) -> CyclicSeries:
    n = len(x)
    total = NCSeries.zero(cap)
    power = x
    for k in range(1, cap + 1):
        tr = NCSeries.zero(cap)
        for i in range(n):
            tr = tr + power[i][i]
        if tr.is_zero() and all(e.is_zero() for row in power for e in row):
            break
        total = total + tr.scale(Fraction((-1) ** (k + 1), k))
        power = [[sum((power[i][l] * x[l][j] for l in range(n)), NCSeries.zero(cap)) for j in range(n)] for i in range(n)]
    return CyclicSeries.from_series(total)


def chi_h(a, cap: int) -> CyclicSeries:
    """tr log(A) modulo rotation, for a matrix whose h-free part is I.

    Entries may be h-elements or their Magnus series.
    """
    n = len(a)
    if n and isinstance(a[0][0], HElement):
        zero_part = hmat_magnus([[deg_h(e, 0) for e in row] for row in a], cap)
        ex = hmat_magnus(a, cap)
    else:
        ex = a
        zero_part = [[_h_free(e) for e in row] for row in a]
    for i in range(n):
        for j in range(n):
            want = NCSeries.constant(int(i == j), cap)
            if zero_part[i][j] != want:
                raise NonUnipotentConstantTerm("h-degree zero part of the matrix is not the identity")
    x = [[ex[i][j] - NCSeries.constant(int(i == j), cap) for j in range(n)] for i in range(n)]
    return _trace_log(x, cap)


def _h_free(e: NCSeries) -> NCSeries:
    return NCSeries._raw({w: c for w, c in e.terms.items() if H not in w}, e.cap)


def series_matmul(a, b, cap: int) -> list[list[NCSeries]]:
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    return [[sum((a[i][l] * b[l][j] for l in range(k)), NCSeries.zero(cap)) for j in range(m)] for i in range(n)]


def chi_prime(m, cap: int) -> CyclicSeries:
    """tr log(M (eps M)^-1) modulo rotation, in the letters h1..hg."""
    n = len(m)
    if n == 0:
        return CyclicSeries({}, cap)
    e = eps_matrix(m)
    einv = rational_inverse(e)
    if einv is None:
        raise SingularAugmentation("augmentation of the matrix is singular over Q")
    ex = matrix_magnus(m, cap)
    prod = [
        [sum((ex[i][l].scale(einv[l][j]) for l in range(n) if einv[l][j]), NCSeries.zero(cap)) for j in range(n)]
        for i in range(n)
    ]
    x = [[prod[i][j] - NCSeries.constant(int(i == j), cap) for j in range(n)] for i in range(n)]
    return _trace_log(x, cap)


def inverse_times_phi_series(m, site: int, cap: int) -> list[list[NCSeries]]:
    """Magnus series of M^-1 phi(M), multiplied as series."""
    inv = matrix_magnus(matrix_inverse(m), cap)
    ph = [[phi_conj(e, site, cap).magnus(cap) for e in row] for row in m]
    return series_matmul(inv, ph, cap)


def inverse_times_phi(m, site: int, cap: int) -> list[list[HElement]]:
    """M^-1 phi(M) as a matrix of h-elements."""
    inv = hmatrix(matrix_inverse(m), cap)
    ph = [[phi_conj(e, site, cap) for e in row] for row in m]
    return hmat_mul(inv, ph)
