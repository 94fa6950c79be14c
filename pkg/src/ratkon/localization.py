"""Noncommutative rational functions as matrix presentations.

A value is ``selector . core^-1 . column`` where core is a square matrix over
the group ring whose augmentation is invertible over Q.  Arithmetic builds
bigger presentations; nothing is ever minimized.  Equality is decided by
comparing Magnus expansions up to a chosen degree.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import MismatchedGenerators, SingularAugmentation, ZeroAugmentation
from .freegroup import FreeWord, GroupRingElement
from .series import NCSeries, letter

# ---------------------------------------------------------------- rational linear algebra


def rational_inverse(m: Sequence[Sequence[Fraction]]) -> list[list[Fraction]] | None:
    """Gauss-Jordan inverse over Q, or None when singular."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        if p != 1:
            a[col] = [x / p for x in a[col]]
        rowc = a[col]
        nz = [j for j in range(2 * n) if rowc[j]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                row = a[r]
                for j in nz:
                    row[j] -= f * rowc[j]
    return [row[n:] for row in a]


def rational_det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col] / p
                for j in range(col, n):
                    a[r][j] -= f * a[col][j]
    return det


# ---------------------------------------------------------------- Magnus expansion of the group ring

_WORD_CACHE: dict = {}


def _poly_mul_into(out: dict, p: dict, q: dict, cap: int, k=Fraction(1)) -> None:
    for w1, c1 in p.items():
        room = cap - len(w1)
        if room < 0:
            continue
        for w2, c2 in q.items():
            if len(w2) <= room:
                w = w1 + w2
                out[w] = out.get(w, 0) + k * c1 * c2


def magnus_word(w: FreeWord, cap: int) -> dict:
    """Magnus image of a reduced word as a word->coefficient dict (truncated)."""
    key = (w, cap)
    hit = _WORD_CACHE.get(key)
    if hit is not None:
        return hit
    if not w:
        res = {(): Fraction(1)}
    elif len(w) == 1:
        x = w[0]
        s = NCSeries.exp_letter(letter(abs(x)), cap, 1 if x > 0 else -1)
        res = s.terms
    else:
        half = len(w) // 2
        out: dict = {}
        _poly_mul_into(out, magnus_word(w[:half], cap), magnus_word(w[half:], cap), cap)
        res = {k: v for k, v in out.items() if v}
    if len(_WORD_CACHE) > 200000:
        _WORD_CACHE.clear()
    _WORD_CACHE[key] = res
    return res


def magnus_ring(a: GroupRingElement, cap: int) -> NCSeries:
    out: dict = {}
    for w, c in a.terms.items():
        for u, d in magnus_word(w, cap).items():
            out[u] = out.get(u, 0) + c * d
    return NCSeries._raw({u: v for u, v in out.items() if v}, cap)


# ---------------------------------------------------------------- cores and presentations


class Core:
    """Square matrix over the group ring with cached augmentation data."""

    __slots__ = ("g", "rows", "n", "_eps", "_eps_inv", "_graded", "_key")

    def __init__(self, rows: Sequence[Sequence[GroupRingElement]], g: int | None = None):
        rows = tuple(tuple(r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("core must be square")
        if g is None:
            g = max((e.g for r in rows for e in r), default=0)
        for r in rows:
            for e in r:
                if e.g != g:
                    raise MismatchedGenerators(f"core entry over F_{e.g}, expected F_{g}")
        self.g = g
        self.rows = rows
        self.n = n
        self._eps = None
        self._eps_inv = None
        self._graded: dict = {}
        self._key = None

    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(tuple(e.key() for e in r) for r in self.rows)
        return self._key

    def eps(self) -> list[list[Fraction]]:
        if self._eps is None:
            self._eps = [[e.augment() for e in r] for r in self.rows]
        return self._eps

    def eps_inverse(self) -> list[list[Fraction]]:
        if self._eps_inv is None:
            inv = rational_inverse(self.eps())
            if inv is None:
                raise SingularAugmentation("augmentation of the core is singular over Q")
            self._eps_inv = inv
        return self._eps_inv

    def is_constant(self) -> bool:
        return all(e.is_constant() for r in self.rows for e in r)

    def graded(self, cap: int) -> list[dict]:
        """For j = 1..cap, sparse map (r, c) -> degree-j part of the Magnus image."""
        if cap not in self._graded:
            parts = [dict() for _ in range(cap + 1)]
            for r, row in enumerate(self.rows):
                for c, e in enumerate(row):
                    if e.is_constant():
                        continue
                    for w, v in magnus_ring(e, cap).terms.items():
                        if w:
                            parts[len(w)].setdefault((r, c), {})[w] = v
            self._graded[cap] = parts
        return self._graded[cap]

    def solve(self, rhs: Sequence[NCSeries], cap: int) -> list[NCSeries]:
        """Solve magnus(core) . x = rhs degree by degree."""
        n = self.n
        einv = self.eps_inverse()
        parts = self.graded(cap)
        rhs_g = [[{} for _ in range(cap + 1)] for _ in range(n)]
        for i, s in enumerate(rhs):
            for w, c in s.terms.items():
                if len(w) <= cap:
                    rhs_g[i][len(w)][w] = c
        x = [[None] * (cap + 1) for _ in range(n)]
        for k in range(cap + 1):
            resid = [dict(rhs_g[i][k]) for i in range(n)]
            for j in range(1, k + 1):
                for (r, c), p in parts[j].items():
                    q = x[c][k - j]
                    if q:
                        _poly_mul_into(resid[r], p, q, cap, Fraction(-1))
            for i in range(n):
                acc: dict = {}
                for l, coef in enumerate(einv[i]):
                    if coef:
                        for w, v in resid[l].items():
                            if v:
                                acc[w] = acc.get(w, 0) + coef * v
                x[i][k] = {w: v for w, v in acc.items() if v}
        out = []
        for i in range(n):
            terms: dict = {}
            for k in range(cap + 1):
                terms.update(x[i][k])
            out.append(NCSeries._raw(terms, cap))
        return out

    def conjugate_transpose(self) -> "Core":
        n = self.n
        return Core([[self.rows[c][r].involute() for c in range(n)] for r in range(n)], self.g)


@dataclass(frozen=True, eq=False)
class MatrixPresentation:
    selector: tuple
    core: Core
    column: tuple

    def size(self) -> int:
        return self.core.n


def _zero(g):
    return GroupRingElement(g)


def _one(g):
    return GroupRingElement.constant(g, 1)


class LocElement:
    """Element of the localized ring, carried by a matrix presentation."""

    __slots__ = ("presentation", "g", "_key", "_ring", "_eps", "_magnus", "_bid", "_bar")

    def __init__(self, selector, core, column):
        if not isinstance(core, Core):
            core = Core(core)
        selector = tuple(selector)
        column = tuple(column)
        if len(selector) != core.n or len(column) != core.n:
            raise ValueError("selector and column must match the core size")
        g = core.g
        for e in selector + column:
            if e.g != g:
                raise MismatchedGenerators(f"presentation entry over F_{e.g}, expected F_{g}")
        self.presentation = MatrixPresentation(selector, core, column)
        self.g = g
        self._key = None
        self._ring = False
        self._eps = None
        self._magnus: dict = {}
        self._bid = None
        self._bar = None

    @property
    def selector(self):
        return self.presentation.selector

    @property
    def core(self) -> Core:
        return self.presentation.core

    @property
    def column(self):
        return self.presentation.column

    def size(self) -> int:
        return self.core.n

    def key(self) -> tuple:
        if self._key is None:
            self._key = (
                tuple(e.key() for e in self.selector),
                self.core.key(),
                tuple(e.key() for e in self.column),
            )
        return self._key

    def __repr__(self):
        p = self.presentation
        return f"LocElement(size={p.core.n}, selector={[str(e) for e in p.selector]}, column={[str(e) for e in p.column]})"

    # evaluation shortcuts

    def as_group_ring(self) -> GroupRingElement | None:
        """The value as a group-ring element when the core is constant, else None."""
        if self._ring is False:
            if self.core.is_constant():
                einv = self.core.eps_inverse()
                acc = _zero(self.g)
                for k, u in enumerate(self.selector):
                    if u.is_zero():
                        continue
                    for l, b in enumerate(self.column):
                        if einv[k][l] and not b.is_zero():
                            acc = acc + (u * b).scale(einv[k][l])
                self._ring = acc
            else:
                self._ring = None
        return self._ring

    def augment(self) -> Fraction:
        if self._eps is None:
            einv = self.core.eps_inverse()
            u = [e.augment() for e in self.selector]
            b = [e.augment() for e in self.column]
            self._eps = sum(
                (u[k] * einv[k][l] * b[l] for k in range(len(u)) if u[k] for l in range(len(b)) if b[l]),
                Fraction(0),
            )
        return self._eps

    def magnus(self, cap: int) -> NCSeries:
        hit = self._magnus.get(cap)
        if hit is None:
            ring = self.as_group_ring()
            if ring is not None:
                hit = magnus_ring(ring, cap)
            else:
                x = self.core.solve([magnus_ring(b, cap) for b in self.column], cap)
                hit = NCSeries.zero(cap)
                for u, xi in zip(self.selector, x):
                    if not u.is_zero():
                        hit = hit + magnus_ring(u, cap) * xi
            self._magnus[cap] = hit
        return hit

    # arithmetic sugar
    def __add__(self, other):
        return loc_add(self, _coerce(other, self.g))

    def __radd__(self, other):
        return loc_add(_coerce(other, self.g), self)

    def __sub__(self, other):
        return loc_add(self, loc_neg(_coerce(other, self.g)))

    def __rsub__(self, other):
        return loc_add(_coerce(other, self.g), loc_neg(self))

    def __mul__(self, other):
        return loc_mul(self, _coerce(other, self.g))

    def __rmul__(self, other):
        return loc_mul(_coerce(other, self.g), self)

    def __neg__(self):
        return loc_neg(self)


def _coerce(x, g) -> LocElement:
    if isinstance(x, LocElement):
        return x
    if isinstance(x, GroupRingElement):
        return from_group_ring(x)
    return from_group_ring(GroupRingElement.constant(g, x))


def from_group_ring(a: GroupRingElement) -> LocElement:
    g = a.g
    return LocElement((_one(g),), Core([[_one(g)]], g), (a,))


def loc_constant(g: int, c) -> LocElement:
    return from_group_ring(GroupRingElement.constant(g, c))


def _check_g(s: LocElement, t: LocElement) -> int:
    if s.g != t.g:
        raise MismatchedGenerators(f"generator counts differ: {s.g} vs {t.g}")
    return s.g


def loc_add(s: LocElement, t: LocElement) -> LocElement:
    g = _check_g(s, t)
    n, m = s.size(), t.size()
    z = _zero(g)
    rows = [list(r) + [z] * m for r in s.core.rows] + [[z] * n + list(r) for r in t.core.rows]
    return LocElement(s.selector + t.selector, Core(rows, g), s.column + t.column)


def loc_neg(s: LocElement) -> LocElement:
    return LocElement(s.selector, s.core, tuple(-b for b in s.column))


def loc_mul(s: LocElement, t: LocElement) -> LocElement:
    g = _check_g(s, t)
    n, m = s.size(), t.size()
    z = _zero(g)
    coupling = [[-(b * u) for u in t.selector] for b in s.column]
    rows = [list(s.core.rows[i]) + coupling[i] for i in range(n)] + [[z] * n + list(r) for r in t.core.rows]
    return LocElement(s.selector + (z,) * m, Core(rows, g), (z,) * n + t.column)


def loc_arith(op: str, s: LocElement, t: LocElement | None = None) -> LocElement:
    if op == "add":
        return loc_add(s, t)
    if op == "mul":
        return loc_mul(s, t)
    if op == "neg":
        return loc_neg(s)
    raise ValueError(f"unknown operation {op!r}")


def loc_invert(s: LocElement) -> LocElement:
    """Inverse as the corner entry of the inverse of [[0, selector], [-column, core]]."""
    if s.augment() == 0:
        raise ZeroAugmentation("element has zero augmentation and is not invertible")
    g = s.g
    n = s.size()
    z = _zero(g)
    rows = [[z] + list(s.selector)] + [[-s.column[i]] + list(s.core.rows[i]) for i in range(n)]
    e1 = (_one(g),) + (z,) * n
    return LocElement(e1, Core(rows, g), e1)


def loc_star(s: LocElement) -> LocElement:
    return LocElement(
        tuple(b.involute() for b in s.column),
        s.core.conjugate_transpose(),
        tuple(u.involute() for u in s.selector),
    )


def loc_star_eps(s: LocElement) -> tuple[LocElement, Fraction]:
    return loc_star(s), s.augment()


def lmul_ring(a: GroupRingElement, s: LocElement) -> LocElement:
    """a * s, absorbed into the selector so the core is shared."""
    return LocElement(tuple(a * u for u in s.selector), s.core, s.column)


def rmul_ring(s: LocElement, a: GroupRingElement) -> LocElement:
    """s * a, absorbed into the column so the core is shared."""
    return LocElement(s.selector, s.core, tuple(b * a for b in s.column))


def loc_scale(s: LocElement, k) -> LocElement:
    return LocElement(s.selector, s.core, tuple(b.scale(k) for b in s.column))


def magnus_expand(s, cap: int) -> NCSeries:
    """Magnus image t_i -> exp(h_i) of a group-ring or localized element."""
    if isinstance(s, GroupRingElement):
        return magnus_ring(s, cap)
    return s.magnus(cap)


def loc_equal(s: LocElement, t: LocElement, cap: int) -> bool:
    return magnus_expand(s, cap) == magnus_expand(t, cap)


# ---------------------------------------------------------------- matrices


@dataclass(frozen=True)
class SigmaCheck:
    ok: bool
    unimodular: bool
    det: Fraction

    def __bool__(self):
        return self.ok


def eps_matrix(m) -> list[list[Fraction]]:
    return [[_entry_eps(e) for e in row] for row in m]


def _entry_eps(e) -> Fraction:
    if isinstance(e, (int, Fraction)):
        return Fraction(e)
    return e.augment()


def sigma_check(m) -> SigmaCheck:
    """ok iff the augmentation is invertible over Q; unimodular iff det is +-1."""
    if any(len(r) != len(m) for r in m):
        raise ValueError("square matrix required")
    det = rational_det(eps_matrix(m)) if m else Fraction(1)
    return SigmaCheck(det != 0, det in (1, -1), det)


def as_loc(e, g: int) -> LocElement:
    return _coerce(e, g)


def loc_widen(s: LocElement, g: int) -> LocElement:
    """The same element viewed over a free group with more generators."""
    if s.g == g:
        return s
    if s.g > g:
        raise MismatchedGenerators(f"cannot narrow F_{s.g} to F_{g}")
    lift = lambda e: GroupRingElement._raw(g, dict(e.terms))
    p = s.presentation
    core = Core([[lift(e) for e in row] for row in p.core.rows], g)
    return LocElement([lift(e) for e in p.selector], core, [lift(e) for e in p.column])


def matrix_g(m) -> int:
    gs = {e.g for row in m for e in row if isinstance(e, (LocElement, GroupRingElement))}
    if len(gs) > 1:
        raise MismatchedGenerators(f"matrix mixes generator counts {sorted(gs)}")
    return gs.pop() if gs else 0


def _ring_entry(e):
    if isinstance(e, GroupRingElement):
        return e
    if isinstance(e, LocElement):
        p = e.presentation
        one = _one(e.g)
        if p.core.n == 1 and p.core.rows[0][0] == one and p.selector[0] == one:
            return p.column[0]
    return None


def matrix_inverse(m, g: int | None = None) -> list[list[LocElement]]:
    """Entrywise presentations of the inverse of a square matrix over the localization."""
    n = len(m)
    if n == 0:
        return []
    if g is None:
        g = matrix_g(m)
    if not sigma_check(m).ok:
        raise SingularAugmentation("augmentation of the matrix is singular over Q")
    z = _zero(g)
    one = _one(g)
    ring = [[_ring_entry(e) if not isinstance(e, (int, Fraction)) else GroupRingElement.constant(g, e) for e in row] for row in m]
    if all(x is not None for row in ring for x in row):
        core = Core(ring, g)
        units = [tuple(one if k == i else z for k in range(n)) for i in range(n)]
        return [[LocElement(units[i], core, units[j]) for j in range(n)] for i in range(n)]
    # m = U A^-1 B with A block diagonal; solve [[A, -B], [U, 0]] (y, x) = (0, e_j)
    blocks = []
    for r in range(n):
        for c in range(n):
            e = as_loc(m[r][c], g)
            if all(u.is_zero() for u in e.selector) or all(b.is_zero() for b in e.column):
                continue
            blocks.append((r, c, e))
    big = sum(e.size() for _, _, e in blocks)
    size = big + n
    rows = [[z] * size for _ in range(size)]
    off = 0
    for r, c, e in blocks:
        k = e.size()
        for i in range(k):
            for j in range(k):
                rows[off + i][off + j] = e.core.rows[i][j]
            rows[off + i][big + c] = -e.column[i]
            rows[big + r][off + i] = e.selector[i]
        off += k
    core = Core(rows, g)
    units = [tuple(one if k == big + i else z for k in range(size)) for i in range(n)]
    return [[LocElement(units[i], core, units[j]) for j in range(n)] for i in range(n)]


def herm_invert(m) -> list[list[LocElement]]:
    """Inverse of a Hermitian matrix whose augmentation is invertible over Q."""
    return matrix_inverse(m)


def matrix_star(m):
    n = len(m)
    out = []
    for c in range(len(m[0]) if n else 0):
        row = []
        for r in range(n):
            e = m[r][c]
            if isinstance(e, LocElement):
                row.append(loc_star(e))
            elif isinstance(e, GroupRingElement):
                row.append(e.involute())
            else:
                row.append(e)
        out.append(row)
    return out


def matrix_magnus(m, cap: int) -> list[list[NCSeries]]:
    out = []
    for row in m:
        r = []
        for e in row:
            if isinstance(e, (int, Fraction)):
                r.append(NCSeries.constant(e, cap))
            else:
                r.append(magnus_expand(e, cap))
        out.append(r)
    return out
