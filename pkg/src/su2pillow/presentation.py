"""Finitely presented groups with peripheral data, word arithmetic and Fox calculus.

Generators are indexed ``0 .. generator_count - 1`` and written ``x0, x1, ...``
in the text syntax; ``x3^-1`` is the inverse of generator 3.
"""

from __future__ import annotations

import math
import re
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

Letter = tuple[int, int]

_TOKEN = re.compile(r"^x(\d+)(?:\^(-?\d+))?$")


class PresentationError(ValueError):
    pass


def _reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for g, s in letters:
        if out and out[-1][0] == g and out[-1][1] == -s:
            out.pop()
        else:
            out.append((g, s))
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """Freely reduced word in the free group on indexed generators."""

    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        for g, s in self.letters:
            if g < 0 or s not in (1, -1):
                raise PresentationError(f"bad letter {(g, s)}")
        object.__setattr__(self, "letters", _reduce(self.letters))

    @classmethod
    def generator(cls, g: int, power: int = 1) -> "Word":
        s = 1 if power >= 0 else -1
        return cls(((g, s),) * abs(power))

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        return Word(self.letters + other.letters)

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(base.letters * abs(k))

    def inverse(self) -> "Word":
        return Word(tuple((g, -s) for g, s in reversed(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=-1)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(f"x{g}" if s == 1 else f"x{g}^-1" for g, s in self.letters)


def commutator(u: Word, v: Word) -> Word:
    return u * v * u.inverse() * v.inverse()


def parse_word(text: str, generator_count: int | None = None) -> Word:
    """Parse whitespace separated tokens ``x3`` / ``x3^-1`` (``x3^k`` also accepted).

    ``""`` and ``"1"`` both give the empty word.
    """
    letters: list[Letter] = []
    for tok in text.split():
        if tok == "1":
            continue
        m = _TOKEN.match(tok)
        if m is None:
            raise PresentationError(f"malformed token {tok!r}")
        g = int(m.group(1))
        power = int(m.group(2)) if m.group(2) is not None else 1
        if generator_count is not None and g >= generator_count:
            raise PresentationError(f"generator index {g} out of range (count {generator_count})")
        letters.extend(Word.generator(g, power).letters)
    return Word(tuple(letters))


def exponent_sums(w: Word, generator_count: int | None = None) -> np.ndarray:
    n = generator_count if generator_count is not None else w.max_generator() + 1
    out = np.zeros(n, dtype=np.int64)
    for g, s in w:
        out[g] += s
    return out


@dataclass(frozen=True)
class GroupRingElement:
    """Element of the integral group ring of a free group.

    ``terms`` is a sorted tuple of ``(word, coefficient)`` with nonzero coefficients.
    """

    terms: tuple[tuple[Word, int], ...] = ()

    @classmethod
    def from_terms(cls, pairs: Iterable[tuple[int, Word]]) -> "GroupRingElement":
        acc: dict[Word, int] = defaultdict(int)
        for c, w in pairs:
            acc[w] += c
        items = sorted(((w, c) for w, c in acc.items() if c != 0), key=lambda t: t[0].letters)
        return cls(tuple(items))

    @classmethod
    def one(cls) -> "GroupRingElement":
        return cls.from_terms([(1, Word())])

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        return GroupRingElement.from_terms(
            [(c, w) for w, c in self.terms] + [(c, w) for w, c in other.terms]
        )

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement.from_terms([(-c, w) for w, c in self.terms])

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        return self + (-other)

    def __mul__(self, other: "GroupRingElement | Word") -> "GroupRingElement":
        if isinstance(other, Word):
            other = GroupRingElement.from_terms([(1, other)])
        return GroupRingElement.from_terms(
            [(c1 * c2, w1 * w2) for w1, c1 in self.terms for w2, c2 in other.terms]
        )

    def __rmul__(self, other: Word) -> "GroupRingElement":
        return GroupRingElement.from_terms([(1, other)]) * self

    def augmentation(self) -> int:
        return sum(c for _, c in self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*[{w}]" for w, c in self.terms)


def fox_derivative(w: Word, g: int) -> GroupRingElement:
    """Fox free derivative of ``w`` with respect to generator ``g``."""
    pairs: list[tuple[int, Word]] = []
    prefix: list[Letter] = []
    for h, s in w:
        if h == g:
            if s == 1:
                pairs.append((1, Word(tuple(prefix))))
            else:
                pairs.append((-1, Word(tuple(prefix) + ((h, s),))))
        prefix.append((h, s))
    return GroupRingElement.from_terms(pairs)


@dataclass(frozen=True)
class SignedRelator:
    word: Word
    target_sign: int = 1

    def __post_init__(self):
        if self.target_sign not in (1, -1):
            raise PresentationError("target_sign must be +1 or -1")

    def __str__(self) -> str:
        return f"{self.word} {'-1' if self.target_sign == -1 else '+1'}"


@dataclass(frozen=True)
class Presentation:
    generator_count: int
    relators: tuple[SignedRelator, ...] = ()
    peripheral: tuple[Word, Word] | None = None
    label: str = ""

    def __post_init__(self):
        if self.generator_count < 1:
            raise PresentationError("generator_count must be positive")
        words = [r.word for r in self.relators]
        if self.peripheral is not None:
            words += list(self.peripheral)
        for w in words:
            if w.max_generator() >= self.generator_count:
                raise PresentationError(f"word {w} uses a generator >= {self.generator_count}")
        object.__setattr__(self, "relators", tuple(self.relators))

    @property
    def meridian(self) -> Word | None:
        return None if self.peripheral is None else self.peripheral[0]

    @property
    def longitude(self) -> Word | None:
        return None if self.peripheral is None else self.peripheral[1]

    @property
    def is_twisted(self) -> bool:
        return any(r.target_sign == -1 for r in self.relators)

    def relator_matrix(self) -> np.ndarray:
        """Exponent-sum vectors of the relators, one row each."""
        if not self.relators:
            return np.zeros((0, self.generator_count), dtype=np.int64)
        return np.stack([exponent_sums(r.word, self.generator_count) for r in self.relators])

    def longitude_nullhomologous(self) -> bool:
        """Rational test that the longitude vanishes in the abelianization."""
        if self.peripheral is None:
            raise PresentationError("presentation has no peripheral words")
        rel = self.relator_matrix().astype(float)
        lam = exponent_sums(self.peripheral[1], self.generator_count).astype(float)
        if not lam.any():
            return True
        r0 = np.linalg.matrix_rank(rel) if len(rel) else 0
        r1 = np.linalg.matrix_rank(np.vstack([rel, lam])) if len(rel) else 1
        return r0 == r1

    def with_relator(self, word: Word, target_sign: int = 1, label: str | None = None) -> "Presentation":
        return Presentation(
            self.generator_count,
            self.relators + (SignedRelator(word, target_sign),),
            self.peripheral,
            self.label if label is None else label,
        )

    def to_text(self) -> str:
        lines = [f"generators: {self.generator_count}"]
        lines += [f"relator: {r}" for r in self.relators]
        if self.peripheral is not None:
            lines.append(f"meridian: {self.peripheral[0]}")
            lines.append(f"longitude: {self.peripheral[1]}")
        if self.label:
            lines.append(f"label: {self.label}")
        return "\n".join(lines) + "\n"


def parse_presentation(text: str) -> Presentation:
    """Read the line-oriented presentation format (see README)."""
    count = None
    raw_relators: list[tuple[str, int]] = []
    meridian = longitude = None
    label = ""
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise PresentationError(f"line {lineno}: expected 'key: value'")
        key, value = key.strip().lower(), value.strip()
        if key == "generators":
            count = int(value)
        elif key == "relator":
            toks = value.split()
            sign = 1
            if toks and toks[-1] in ("+1", "-1", "+", "-"):
                sign = -1 if toks[-1].startswith("-") else 1
                toks = toks[:-1]
            raw_relators.append((" ".join(toks), sign))
        elif key == "meridian":
            meridian = value
        elif key == "longitude":
            longitude = value
        elif key == "label":
            label = value
        else:
            raise PresentationError(f"line {lineno}: unknown key {key!r}")
    if count is None:
        raise PresentationError("missing 'generators:' line")
    relators = tuple(SignedRelator(parse_word(w, count), s) for w, s in raw_relators)
    peripheral = None
    if (meridian is None) != (longitude is None):
        raise PresentationError("meridian and longitude must be given together")
    if meridian is not None:
        peripheral = (parse_word(meridian, count), parse_word(longitude, count))
    return Presentation(count, relators, peripheral, label)


def load_presentation(path: str | Path) -> Presentation:
    return parse_presentation(Path(path).read_text())


# -- catalog -------------------------------------------------------------------


def _bezout(q: int, p: int) -> tuple[int, int]:
    """Return (a, b) with a*q + b*p == 1, preferring small |a|."""
    for a in sorted(range(-abs(p) - 1, abs(p) + 2), key=lambda v: (abs(v), -v)):
        if (1 - a * q) % p == 0:
            b = (1 - a * q) // p
            return a, b
    raise PresentationError("no Bezout pair")  # unreachable for coprime input


def torus_knot(p: int, q: int) -> Presentation:
    """<x, y | x^p y^-q> with meridian x^a y^b (a q + b p = 1) and longitude x^p mu^(-pq)."""
    if p < 2 or q < 2 or math.gcd(p, q) != 1:
        raise PresentationError(f"torus_knot needs coprime p, q >= 2, got ({p}, {q})")
    x, y = Word.generator(0), Word.generator(1)
    a, b = _bezout(q, p)
    mu = x ** a * y ** b
    lam = x ** p * mu ** (-p * q)
    rel = x ** p * y ** (-q)
    return Presentation(2, (SignedRelator(rel),), (mu, lam), f"T({p},{q})")


def cyclic(n: int) -> Presentation:
    if n < 1:
        raise PresentationError("cyclic(n) needs n >= 1")
    return Presentation(1, (SignedRelator(Word.generator(0, n)),), None, f"Z/{n}")


def three_torus_twisted() -> Presentation:
    a, b, c = (Word.generator(i) for i in range(3))
    rels = (
        SignedRelator(commutator(a, b), -1),
        SignedRelator(commutator(a, c), 1),
        SignedRelator(commutator(b, c), 1),
    )
    return Presentation(3, rels, None, "(T^3, S^1)")


def unknot() -> Presentation:
    return Presentation(1, (), (Word.generator(0), Word()), "unknot")


def trivial_group() -> Presentation:
    return Presentation(1, (SignedRelator(Word.generator(0)),), None, "trivial")


def builtin_presentation(name: str, *params: int) -> Presentation:
    if name == "torus_knot":
        if len(params) != 2:
            raise PresentationError("torus_knot needs p and q")
        return torus_knot(*params)
    if name == "trefoil":
        return torus_knot(2, 3)
    if name == "cyclic":
        if len(params) != 1:
            raise PresentationError("cyclic needs n")
        return cyclic(params[0])
    if name == "three_torus_twisted":
        return three_torus_twisted()
    if name == "unknot":
        return unknot()
    if name == "trivial":
        return trivial_group()
    raise PresentationError(f"unknown catalog key {name!r}")


def catalog_from_key(key: str) -> Presentation:
    """``"torus_knot:2:3"`` -> builtin_presentation("torus_knot", 2, 3)."""
    name, *rest = key.split(":")
    try:
        params = [int(v) for v in rest]
    except ValueError as exc:
        raise PresentationError(f"bad catalog parameters in {key!r}") from exc
    return builtin_presentation(name, *params)
