"""Finite presentations, their text format, and homomorphisms between them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .words import (
    EMPTY,
    AlphabetError,
    ParseError,
    Word,
    cyclic_reduce,
    free_reduce,
    is_valid_name,
    letter_code,
    reduce_code,
)

__all__ = [
    "GroupHom",
    "HomCheck",
    "Presentation",
    "WordOracle",
    "apply_hom",
    "check_hom",
    "parse_presentation",
]

# word -> True (trivial) / False (nontrivial) / None (could not decide)
WordOracle = Callable[[Word], Optional[bool]]


@dataclass(frozen=True)
class Presentation:
    """``<generators | relators>``; relators are stored freely and cyclically reduced."""

    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        if len(set(gens)) != len(gens):
            raise ParseError(f"duplicate generator names in {gens}")
        for g in gens:
            if not is_valid_name(g):
                raise ParseError(f"invalid generator name {g!r}")
        known = set(gens)
        rels = []
        for r in self.relators:
            extra = r.names() - known
            if extra:
                raise AlphabetError(f"relator {r} uses unknown generators {sorted(extra)}")
            rels.append(cyclic_reduce(free_reduce(r))[0])
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", tuple(rels))

    @classmethod
    def free(cls, generators: Iterable[str]) -> "Presentation":
        return cls(tuple(generators), ())

    @classmethod
    def from_strings(cls, generators: str | Sequence[str], *relators: str) -> "Presentation":
        gens = generators.split() if isinstance(generators, str) else tuple(generators)
        return cls(tuple(gens), tuple(Word.parse(r) for r in relators))

    def word(self, text: str) -> Word:
        """Parse ``text`` and check it is over this presentation's alphabet."""
        w = Word.parse(text)
        self.check_alphabet(w)
        return w

    def check_alphabet(self, w: Word) -> None:
        extra = w.names() - set(self.generators)
        if extra:
            raise AlphabetError(f"word {w} uses generators {sorted(extra)} not in {self.generators}")

    def to_text(self) -> str:
        lines = ["gens: " + " ".join(self.generators) if self.generators else "gens:"]
        lines += [f"rel: {r}" for r in self.relators]
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        return f"<{', '.join(self.generators)} | {', '.join(map(str, self.relators))}>"


def parse_presentation(text: str) -> Presentation:
    """Read the ``gens:`` / ``rel:`` line format. ``#`` starts a comment."""
    gens: list[str] | None = None
    rels: list[Word] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise ParseError(f"line {lineno}: expected 'gens:' or 'rel:'")
        key = key.strip()
        if key == "gens":
            if gens is not None:
                raise ParseError(f"line {lineno}: second 'gens:' line")
            gens = rest.split()
        elif key == "rel":
            if gens is None:
                raise ParseError(f"line {lineno}: 'rel:' before 'gens:'")
            rels.append(Word.parse(rest))
        else:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
    if gens is None:
        raise ParseError("missing 'gens:' line")
    return Presentation(tuple(gens), tuple(rels))


@dataclass(frozen=True)
class GroupHom:
    """A map on generators; ``images[i]`` is the image of ``source.generators[i]``."""

    source: Presentation
    target: Presentation
    images: tuple[Word, ...]
    _table: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        images = tuple(self.images)
        if len(images) != len(self.source.generators):
            raise ValueError("need exactly one image per source generator")
        table = {}
        for g, img in zip(self.source.generators, images):
            self.target.check_alphabet(img)
            img = free_reduce(img)
            table[letter_code(g, 1)] = img.code
            table[letter_code(g, -1)] = img.inverse().code
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "_table", table)

    @classmethod
    def from_mapping(cls, source: Presentation, target: Presentation, mapping: Mapping[str, Word]) -> "GroupHom":
        return cls(source, target, tuple(mapping.get(g, EMPTY) for g in source.generators))

    @classmethod
    def deletion(cls, source: Presentation, target: Presentation) -> "GroupHom":
        """Identity on shared generator names, everything else to the identity."""
        keep = set(target.generators)
        return cls(source, target, tuple(Word.gen(g) if g in keep else EMPTY for g in source.generators))

    def __call__(self, w: Word) -> Word:
        return apply_hom(self, w)


def apply_hom(h: GroupHom, w: Word) -> Word:
    table = h._table
    try:
        s = "".join([table[c] for c in w.code])
    except KeyError:
        h.source.check_alphabet(w)
        raise
    return Word.from_code(reduce_code(s), True)


@dataclass(frozen=True)
class HomCheck:
    """Outcome of :func:`check_hom`.

    ``ok`` is ``True``/``False``, or ``None`` when the oracle could not decide
    some relator (``failing`` then names that relator).
    """

    ok: Optional[bool]
    failing: Optional[Word] = None
    index: Optional[int] = None


def check_hom(h: GroupHom, target_wp: WordOracle) -> HomCheck:
    undecided: Optional[HomCheck] = None
    for i, r in enumerate(h.source.relators):
        verdict = target_wp(apply_hom(h, r))
        if verdict is False:
            return HomCheck(False, r, i)
        if verdict is None and undecided is None:
            undecided = HomCheck(None, r, i)
    return undecided or HomCheck(True)
