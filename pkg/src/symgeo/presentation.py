"""Finitely presented groups: words, parsing, abelianization, and the
positive-exponent rewriting used by the fibered-surface construction."""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .linalg import AbelianInvariants, IntMatrix, sparse_cokernel_invariants

__all__ = [
    "Word", "Presentation", "PresentationError", "PositiveRewrite", "IndexedLetter",
    "IndexedRelationSet", "AbelianInvariants", "parse_presentation", "parse_word",
    "free_reduce", "syllable_length", "abelianize", "eliminate_generators", "commutator", "deficiency", "positive_rewrite",
    "double_index",
]


class PresentationError(ValueError):
    """Raised for malformed presentation text; ``pos`` is the 0-based offset."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)


def _reduce(syllables: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    stack: list[list[int]] = []
    for gen, exp in syllables:
        if exp == 0:
            continue
        if stack and stack[-1][0] == gen:
            stack[-1][1] += exp
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([gen, exp])
    return tuple((g, e) for g, e in stack)


@dataclass(frozen=True)
class Word:
    """A word in generator indices, stored as (generator, exponent) syllables."""

    syllables: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for gen, exp in self.syllables:
            if exp == 0:
                raise ValueError("syllable exponents must be nonzero")
            if gen < 0:
                raise ValueError("generator indices must be non-negative")

    @classmethod
    def of(cls, *pairs: tuple[int, int]) -> "Word":
        return cls(_reduce(pairs))

    def is_reduced(self) -> bool:
        return all(a[0] != b[0] for a, b in zip(self.syllables, self.syllables[1:]))

    def __mul__(self, other: "Word") -> "Word":
        return Word(_reduce(self.syllables + other.syllables))

    def __invert__(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.syllables)))

    def __len__(self) -> int:
        return len(self.syllables)

    def __bool__(self) -> bool:
        return bool(self.syllables)

    @property
    def letter_count(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def generators(self) -> set[int]:
        return {g for g, _ in self.syllables}

    def exponent_sums(self, g: int) -> list[int]:
        sums = [0] * g
        for gen, exp in self.syllables:
            sums[gen] += exp
        return sums

    def render(self, names: Sequence[str]) -> str:
        if not self.syllables:
            return "1"
        return " ".join(names[g] if e == 1 else f"{names[g]}^{e}" for g, e in self.syllables)


def free_reduce(w: Word) -> Word:
    return Word(_reduce(w.syllables))


def syllable_length(w: Word) -> int:
    """Number of maximal powers in ``w``: x5^3 y1 y2^2 has length 3."""
    return len(w.syllables)


def commutator(a: Word, b: Word) -> Word:
    return a * b * ~a * ~b


@dataclass(frozen=True)
class Presentation:
    names: tuple[str, ...]
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise PresentationError("duplicate generator name")
        top = max((gen for w in self.relators for gen, _ in w.syllables), default=-1)
        if top >= len(self.names):
            raise PresentationError(f"relator uses generator {top} >= {len(self.names)}")

    @property
    def g(self) -> int:
        return len(self.names)

    @property
    def r(self) -> int:
        return len(self.relators)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def with_relators(self, extra: Iterable[Word]) -> "Presentation":
        return Presentation(self.names, self.relators + tuple(free_reduce(w) for w in extra))

    def relation_matrix(self) -> IntMatrix:
        """Exponent-sum matrix: one row per relator, one column per generator."""
        return IntMatrix.from_rows([w.exponent_sums(self.g) for w in self.relators], cols=self.g)

    def __str__(self) -> str:
        gens = ", ".join(self.names)
        rels = ", ".join(w.render(self.names) for w in self.relators)
        return " ".join(["<", gens, "|", rels, ">"]).replace("  ", " ")


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<int>-?\d+)|(?P<sym>[<>|,\[\]^]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PresentationError(f"unexpected character {text[pos:].lstrip()[:1]!r}",
                                    pos + len(text[pos:]) - len(text[pos:].lstrip()))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


@lru_cache(maxsize=64)
def _name_index(names: tuple[str, ...]) -> dict[str, int]:
    return {n: k for k, n in enumerate(names)}


class _Parser:
    def __init__(self, text: str, names: Sequence[str] | None = None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.lookup = _name_index(tuple(names)) if names is not None else None

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str, value: str | None = None):
        tok = self.peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            got = tok[1] or "end of input"
            raise PresentationError(f"expected {want!r}, found {got!r}", tok[2])
        self.i += 1
        return tok

    def at(self, kind: str, value: str | None = None) -> bool:
        tok = self.peek()
        return tok[0] == kind and (value is None or tok[1] == value)

    def generator(self) -> int:
        _, name, pos = self.take("name")
        if name not in self.lookup:
            raise PresentationError(f"unknown generator {name!r}", pos)
        return self.lookup[name]

    def exponent(self) -> int:
        if not self.at("sym", "^"):
            return 1
        self.take("sym", "^")
        _, digits, pos = self.take("int")
        e = int(digits)
        if e == 0:
            raise PresentationError("exponent must be nonzero", pos)
        return e

    def word(self, stop: set[str]) -> Word:
        w = Word()
        while True:
            tok = self.peek()
            if tok[0] == "name":
                gen = self.generator()
                w = w * Word.of((gen, self.exponent()))
            elif tok[0] == "int" and tok[1] == "1":
                # explicit identity
                self.i += 1
            elif tok[0] == "sym" and tok[1] == "[":
                self.take("sym", "[")
                a = Word.of((self.generator(), 1))
                self.take("sym", ",")
                b = Word.of((self.generator(), 1))
                self.take("sym", "]")
                c = commutator(a, b)
                e = self.exponent()
                for _ in range(abs(e)):
                    w = w * (c if e > 0 else ~c)
            elif tok[0] == "end" or (tok[0] == "sym" and tok[1] in stop):
                return w
            else:
                raise PresentationError(f"unexpected token {tok[1]!r}", tok[2])

    def presentation(self) -> Presentation:
        self.take("sym", "<")
        names: list[str] = []
        if self.at("name"):
            while True:
                _, name, pos = self.take("name")
                if name in names:
                    raise PresentationError(f"duplicate generator name {name!r}", pos)
                names.append(name)
                if not self.at("sym", ","):
                    break
                self.take("sym", ",")
        self.lookup = {n: k for k, n in enumerate(names)}
        self.take("sym", "|")
        relators = []
        if not self.at("sym", ">"):
            while True:
                start = self.peek()[2]
                w = self.word({",", ">"})
                if not w and self.tokens[self.i][2] == start and not self.at("sym", ">"):
                    raise PresentationError("empty relator", start)
                relators.append(w)
                if self.at("sym", ","):
                    self.take("sym", ",")
                    continue
                break
        self.take("sym", ">")
        self.take("end")
        return Presentation(tuple(names), tuple(relators))


def parse_presentation(text: str) -> Presentation:
    """Parse ``< x, y | [x,y], x^2 y^-3 >``.

    Relators are free-reduced (not cyclically reduced). ``[a,b]`` expands to
    a b a^-1 b^-1.
    """
    return _Parser(text).presentation()


def parse_word(text: str, names: Sequence[str]) -> Word:
    """Parse a single word over ``names``; ``1`` denotes the identity."""
    p = _Parser(text, names)
    w = p.word(set())
    p.take("end")
    return w


# -- invariants --------------------------------------------------------------

def abelianize(P: Presentation) -> AbelianInvariants:
    """Cokernel of the exponent-sum matrix (rows = relators, columns = generators)."""
    rows = []
    for w in P.relators:
        row: dict[int, int] = {}
        for gen, exp in w.syllables:
            row[gen] = row.get(gen, 0) + exp
        rows.append(row)
    return sparse_cokernel_invariants(rows, P.g)


def eliminate_generators(P: Presentation, killed: Iterable[int]) -> Presentation:
    """Set the given generators to 1 and drop them (a Tietze move)."""
    killed = set(killed)
    keep = [k for k in range(P.g) if k not in killed]
    remap = {old: new for new, old in enumerate(keep)}
    relators = []
    for w in P.relators:
        w2 = Word(_reduce((remap[g], e) for g, e in w.syllables if g in remap))
        if w2:
            relators.append(w2)
    return Presentation(tuple(P.names[k] for k in keep), tuple(relators))


def deficiency(P: Presentation) -> int:
    return P.g - P.r


# -- positive rewriting and double indexing ----------------------------------

@dataclass(frozen=True)
class PositiveRewrite:
    """Presentation on x1, y1, ..., xg, yg with relators x_i y_i and w'_i.

    ``x_i`` sits at generator index 2(i-1), ``y_i`` at 2(i-1)+1; every
    exponent in ``rewritten_relations`` is positive.
    """

    source: Presentation
    base: Presentation
    pairing_relations: tuple[Word, ...]
    rewritten_relations: tuple[Word, ...]

    def presentation(self) -> Presentation:
        return Presentation(self.base.names, self.pairing_relations + self.rewritten_relations)

    def back_substitute(self, w: Word) -> Word:
        """Replace y_i by x_i^-1 and return to the source generator numbering."""
        return free_reduce(Word(tuple(
            (gen // 2, exp if gen % 2 == 0 else -exp) for gen, exp in w.syllables)))


def positive_rewrite(P: Presentation) -> PositiveRewrite:
    names = tuple(n for i in range(1, P.g + 1) for n in (f"x{i}", f"y{i}"))
    base = Presentation(names)
    pairing = tuple(Word(((2 * i, 1), (2 * i + 1, 1))) for i in range(P.g))
    rewritten = []
    for w in P.relators:
        # x_j^-a -> y_j^a keeps syllable boundaries, since x_j and y_j are distinct
        rewritten.append(Word(tuple(
            (2 * gen, exp) if exp > 0 else (2 * gen + 1, -exp) for gen, exp in w.syllables)))
    return PositiveRewrite(P, base, pairing, tuple(rewritten))


@dataclass(frozen=True)
class IndexedLetter:
    generator: int  # index into the rewrite base: 2(i-1) for x_i, 2(i-1)+1 for y_i
    second: int
    exponent: int

    @property
    def pair(self) -> int:
        return self.generator // 2 + 1

    @property
    def kind(self) -> str:
        return "x" if self.generator % 2 == 0 else "y"

    def __str__(self) -> str:
        s = f"{self.kind}_{{{self.pair},{self.second}}}"
        return s if self.exponent == 1 else f"{s}^{self.exponent}"


@dataclass(frozen=True)
class IndexedRelationSet:
    words: tuple[tuple[IndexedLetter, ...], ...]
    n: int

    def erase(self) -> tuple[Word, ...]:
        """Forget the second indices."""
        return tuple(Word(tuple((l.generator, l.exponent) for l in w)) for w in self.words)

    def __str__(self) -> str:
        return "(" + ", ".join("".join(str(l) for l in w) or "1" for w in self.words) + ")"


def double_index(PR: PositiveRewrite) -> IndexedRelationSet:
    j = 0
    words = []
    for w in PR.rewritten_relations:
        letters = []
        for gen, exp in w.syllables:
            if exp <= 0:
                raise ValueError("double indexing needs positive exponents")
            j += 1
            letters.append(IndexedLetter(gen, j, exp))
        words.append(tuple(letters))
    return IndexedRelationSet(tuple(words), j + 1)
