"""Free groups on generators t1..tg and their rational group rings.

A reduced word is stored as a tuple of nonzero ints: ``i`` stands for t_i
and ``-i`` for its inverse.  ``letters_of`` gives the (index, sign) view.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .errors import GeneratorIndexError, MismatchedGenerators

FreeWord = tuple
IDENTITY: FreeWord = ()


def _letter(item) -> int:
    if isinstance(item, int):
        return item
    i, e = item
    if e not in (1, -1):
        raise GeneratorIndexError(f"exponent sign must be +1 or -1, got {e}")
    return i * e


def reduce_word(letters: Iterable, g: int | None = None) -> FreeWord:
    """Freely reduce a letter sequence of ints or (index, sign) pairs."""
    out: list[int] = []
    for item in letters:
        x = _letter(item)
        if x == 0 or (g is not None and abs(x) > g):
            raise GeneratorIndexError(f"generator index {abs(x)} out of range 1..{g}")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def letters_of(w: FreeWord) -> list[tuple[int, int]]:
    return [(abs(x), 1 if x > 0 else -1) for x in w]


def word_mul(a: FreeWord, b: FreeWord) -> FreeWord:
    k = 0
    n = min(len(a), len(b))
    while k < n and a[-1 - k] == -b[k]:
        k += 1
    return a[: len(a) - k] + b[k:]


def word_inverse(w: FreeWord) -> FreeWord:
    return tuple(-x for x in reversed(w))


def word_rank(w: FreeWord) -> int:
    return max((abs(x) for x in w), default=0)


def format_word(w: FreeWord) -> str:
    if not w:
        return "1"
    return " ".join(f"t{x}" if x > 0 else f"t{-x}^-1" for x in w)


def _word_key(w: FreeWord):
    return (len(w), w)


class GroupRingElement:
    """Finite rational combination of reduced words in F_g."""

    __slots__ = ("g", "terms", "_hash")

    def __init__(self, g: int, terms: Mapping[FreeWord, object] | None = None):
        self.g = g
        clean: dict = {}
        for w, c in (terms or {}).items():
            w = reduce_word(w, g)
            clean[w] = clean.get(w, 0) + Fraction(c)
        self.terms = {w: c for w, c in sorted(clean.items(), key=lambda kv: _word_key(kv[0])) if c}
        self._hash = None

    @classmethod
    def _raw(cls, g: int, terms: dict) -> "GroupRingElement":
        e = cls.__new__(cls)
        e.g = g
        e.terms = {w: terms[w] for w in sorted(terms, key=_word_key) if terms[w]}
        e._hash = None
        return e

    @classmethod
    def constant(cls, g: int, c=1) -> "GroupRingElement":
        return cls._raw(g, {(): Fraction(c)})

    @classmethod
    def generator(cls, g: int, i: int, sign: int = 1) -> "GroupRingElement":
        return cls(g, {((i, sign),): 1})

    @classmethod
    def word(cls, g: int, w: FreeWord, c=1) -> "GroupRingElement":
        return cls(g, {w: c})

    def _same(self, other: "GroupRingElement") -> None:
        if self.g != other.g:
            raise MismatchedGenerators(f"generator counts differ: {self.g} vs {other.g}")

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(): Fraction(other)} if other else {})
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.g == other.g and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.g, tuple(self.terms.items())))
        return self._hash

    def key(self) -> tuple:
        return tuple(self.terms.items())

    def __repr__(self):
        return f"GroupRingElement({self.g}, {str(self)!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.terms.items():
            body = "*".join(format_word(w).split(" "))
            if not w:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not w for w in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        if isinstance(other, (int, Fraction)):
            other = GroupRingElement.constant(self.g, other)
        self._same(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return GroupRingElement._raw(self.g, out)

    __radd__ = __add__

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement._raw(self.g, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other) -> "GroupRingElement":
        if isinstance(other, (int, Fraction)):
            other = GroupRingElement.constant(self.g, other)
        return self + (-other)

    def __rsub__(self, other) -> "GroupRingElement":
        return (-self) + other

    def scale(self, k) -> "GroupRingElement":
        k = Fraction(k)
        return GroupRingElement._raw(self.g, {w: c * k for w, c in self.terms.items()})

    def __mul__(self, other) -> "GroupRingElement":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._same(other)
        out: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = word_mul(w1, w2)
                out[w] = out.get(w, 0) + c1 * c2
        return GroupRingElement._raw(self.g, out)

    def __rmul__(self, other) -> "GroupRingElement":
        return self.scale(other)

    def involute(self) -> "GroupRingElement":
        return GroupRingElement._raw(self.g, {word_inverse(w): c for w, c in self.terms.items()})

    def augment(self) -> Fraction:
        return sum(self.terms.values(), Fraction(0))

    def lift(self, g: int) -> "GroupRingElement":
        """Same element viewed in a free group with g >= self.g generators."""
        if g < self.g:
            raise MismatchedGenerators("cannot shrink the generator set")
        return GroupRingElement._raw(g, dict(self.terms))


def ring_mul(a: GroupRingElement, b: GroupRingElement) -> GroupRingElement:
    return a * b


def involute(a: GroupRingElement) -> GroupRingElement:
    return a.involute()


def augment(a: GroupRingElement) -> Fraction:
    return a.augment()
