"""Truncated noncommutative power series and their cyclic quotients.

Letters are strings: ``h1 .. hg`` for the Magnus variables, plus ``h`` and
``h'``.  A word is a tuple of letters; the empty tuple is the constant term.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping

Word = tuple

EXTRA_LETTERS = ("h", "h'")


def letter(i: int) -> str:
    return f"h{i}"


def is_letter(s: str) -> bool:
    if s in EXTRA_LETTERS:
        return True
    return s.startswith("h") and s[1:].isdigit() and int(s[1:]) >= 1


def _clean(terms: Mapping[Word, Fraction], cap: int) -> dict:
    return {w: c for w, c in terms.items() if c and len(w) <= cap}


class NCSeries:
    """Power series in noncommuting letters, truncated at total degree ``cap``."""

    __slots__ = ("cap", "terms", "_hash")

    def __init__(self, terms: Mapping[Word, object] | None = None, cap: int = 0):
        if cap < 0:
            raise ValueError("cap must be nonnegative")
        self.cap = cap
        self.terms = _clean({tuple(w): Fraction(c) for w, c in (terms or {}).items()}, cap)
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, cap: int) -> "NCSeries":
        s = cls.__new__(cls)
        s.cap = cap
        s.terms = terms
        s._hash = None
        return s

    @classmethod
    def one(cls, cap: int) -> "NCSeries":
        return cls._raw({(): Fraction(1)}, cap)

    @classmethod
    def zero(cls, cap: int) -> "NCSeries":
        return cls._raw({}, cap)

    @classmethod
    def constant(cls, c, cap: int) -> "NCSeries":
        c = Fraction(c)
        return cls._raw({(): c} if c else {}, cap)

    @classmethod
    def exp_letter(cls, name: str, cap: int, sign: int = 1) -> "NCSeries":
        """exp(sign * name) truncated at cap."""
        return cls._raw({(name,) * n: Fraction(sign**n, factorial(n)) for n in range(cap + 1)}, cap)

    def __eq__(self, other):
        if not isinstance(other, NCSeries):
            return NotImplemented
        return self.cap == other.cap and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.cap, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"NCSeries({format_series(self)!r}, cap={self.cap})"

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def _check(self, other: "NCSeries") -> int:
        return min(self.cap, other.cap)

    def __add__(self, other: "NCSeries") -> "NCSeries":
        cap = self._check(other)
        out = {w: c for w, c in self.terms.items() if len(w) <= cap}
        for w, c in other.terms.items():
            if len(w) <= cap:
                v = out.get(w, 0) + c
                if v:
                    out[w] = v
                else:
                    out.pop(w, None)
        return NCSeries._raw(out, cap)

    def __neg__(self) -> "NCSeries":
        return NCSeries._raw({w: -c for w, c in self.terms.items()}, self.cap)

    def __sub__(self, other: "NCSeries") -> "NCSeries":
        return self + (-other)

    def scale(self, k) -> "NCSeries":
        k = Fraction(k)
        if not k:
            return NCSeries.zero(self.cap)
        return NCSeries._raw({w: c * k for w, c in self.terms.items()}, self.cap)

    def __mul__(self, other: "NCSeries") -> "NCSeries":
        if not isinstance(other, NCSeries):
            return self.scale(other)
        cap = self._check(other)
        out: dict = {}
        right = sorted(other.terms.items(), key=lambda kv: len(kv[0]))
        for w1, c1 in self.terms.items():
            room = cap - len(w1)
            if room < 0:
                continue
            for w2, c2 in right:
                if len(w2) > room:
                    break
                w = w1 + w2
                v = out.get(w, 0) + c1 * c2
                if v:
                    out[w] = v
                else:
                    del out[w]
        return NCSeries._raw(out, cap)

    __rmul__ = scale

    def truncate(self, cap: int) -> "NCSeries":
        cap = min(cap, self.cap)
        return NCSeries._raw({w: c for w, c in self.terms.items() if len(w) <= cap}, cap)

    def homogeneous(self, k: int) -> "NCSeries":
        return NCSeries._raw({w: c for w, c in self.terms.items() if len(w) == k}, self.cap)

    def count_letter(self, name: str, k: int) -> "NCSeries":
        """Part whose words contain ``name`` exactly k times."""
        return NCSeries._raw({w: c for w, c in self.terms.items() if w.count(name) == k}, self.cap)

    def reverse_involute(self) -> "NCSeries":
        """Image under the anti-involution fixing nothing: reverse words, negate every letter."""
        return NCSeries._raw({tuple(reversed(w)): c * (-1) ** len(w) for w, c in self.terms.items()}, self.cap)

    def substitute(self, images: Mapping[str, "NCSeries"]) -> "NCSeries":
        """Ring map sending each letter in ``images`` to the given series (letters absent stay)."""
        cap = self.cap
        out = NCSeries.zero(cap)
        cache: dict = {}

        def image(ch):
            if ch not in cache:
                cache[ch] = images[ch].truncate(cap) if ch in images else NCSeries._raw({(ch,): Fraction(1)}, cap)
            return cache[ch]

        for w, c in self.terms.items():
            term = NCSeries.constant(c, cap)
            for ch in w:
                term = term * image(ch)
                if term.is_zero():
                    break
            out = out + term
        return out

    def letters(self) -> set:
        return {ch for w in self.terms for ch in w}


def series_power(s: NCSeries, n: int) -> NCSeries:
    out = NCSeries.one(s.cap)
    for _ in range(n):
        out = out * s
    return out


def series_log1p(x: NCSeries) -> NCSeries:
    """log(1 + x) for x without constant term."""
    if x.constant_term():
        raise ValueError("log1p needs a series without constant term")
    out = NCSeries.zero(x.cap)
    p = NCSeries.one(x.cap)
    for n in range(1, x.cap + 1):
        p = p * x
        if p.is_zero():
            break
        out = out + p.scale(Fraction((-1) ** (n + 1), n))
    return out


def series_exp(x: NCSeries) -> NCSeries:
    if x.constant_term():
        raise ValueError("exp needs a series without constant term")
    out = NCSeries.one(x.cap)
    p = NCSeries.one(x.cap)
    for n in range(1, x.cap + 1):
        p = p * x
        if p.is_zero():
            break
        out = out + p.scale(Fraction(1, factorial(n)))
    return out


def least_rotation(w: Word) -> Word:
    if not w:
        return w
    return min(w[i:] + w[:i] for i in range(len(w)))


class CyclicSeries:
    """Series modulo cyclic rotation of words; keys are least rotations."""

    __slots__ = ("cap", "terms")

    def __init__(self, terms: Mapping[Word, object] | None = None, cap: int = 0):
        self.cap = cap
        out: dict = {}
        for w, c in (terms or {}).items():
            w = tuple(w)
            if len(w) > cap:
                continue
            r = least_rotation(w)
            out[r] = out.get(r, 0) + Fraction(c)
        self.terms = {w: c for w, c in out.items() if c}

    @classmethod
    def from_series(cls, s: NCSeries) -> "CyclicSeries":
        return cls(s.terms, s.cap)

    def __eq__(self, other):
        if not isinstance(other, CyclicSeries):
            return NotImplemented
        return self.cap == other.cap and self.terms == other.terms

    def __hash__(self):
        return hash((self.cap, frozenset(self.terms.items())))

    def __add__(self, other: "CyclicSeries") -> "CyclicSeries":
        cap = min(self.cap, other.cap)
        merged = dict(self.terms)
        for w, c in other.terms.items():
            merged[w] = merged.get(w, 0) + c
        return CyclicSeries(merged, cap)

    def __neg__(self):
        return CyclicSeries({w: -c for w, c in self.terms.items()}, self.cap)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k) -> "CyclicSeries":
        return CyclicSeries({w: c * Fraction(k) for w, c in self.terms.items()}, self.cap)

    def truncate(self, cap: int) -> "CyclicSeries":
        return CyclicSeries(self.terms, min(cap, self.cap))

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        body = format_series(NCSeries._raw(self.terms, self.cap))
        return f"CyclicSeries({body!r}, cap={self.cap})"


def format_word(w: Iterable[str]) -> str:
    w = tuple(w)
    return "*".join(w) if w else "1"


def format_series(s: NCSeries) -> str:
    if not s.terms:
        return "0"
    parts = []
    for w in sorted(s.terms, key=lambda w: (len(w), w)):
        c = s.terms[w]
        if not w:
            parts.append(str(c))
        elif c == 1:
            parts.append(format_word(w))
        elif c == -1:
            parts.append("-" + format_word(w))
        else:
            parts.append(f"{c}*{format_word(w)}")
    return " + ".join(parts).replace("+ -", "- ")
