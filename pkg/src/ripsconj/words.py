"""Words in free groups.

A :class:`Word` is an immutable sequence of signed generator letters. Letters
are addressed by generator *name*, so the same word can be read over any
presentation that lists its generators (this is what makes lifting from a
quotient to a Rips group a purely syntactic operation).

Internally each letter is one character of a ``str``: the generator with
registry index ``i`` is ``chr(2*i)`` and its inverse ``chr(2*i + 1)``. Free
reduction, concatenation, hashing and substring search therefore run at C
speed, which the exhaustive word-problem checks rely on.

>>> w = Word.parse("a b b^-1 a")
>>> str(w), str(free_reduce(w))
('a b b^-1 a', 'a^2')
>>> core, conj = cyclic_reduce(Word.parse("a^2 b a^-2"))
>>> str(core), str(conj)
('b', 'a^2')
"""

from __future__ import annotations

import re
import threading
from typing import Iterable, Iterator, NamedTuple, Sequence

__all__ = [
    "AlphabetError",
    "Letter",
    "ParseError",
    "Word",
    "cyclic_reduce",
    "enumerate_words",
    "free_reduce",
    "is_valid_name",
]

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_TERM_RE = re.compile(r"([A-Za-z][A-Za-z0-9_]*)(?:\^(-?\d+))?\Z")


class ParseError(ValueError):
    """Raised on malformed presentation or word text."""


class AlphabetError(ValueError):
    """A word uses a generator outside the expected alphabet."""


def is_valid_name(name: str) -> bool:
    return bool(_NAME_RE.match(name))


# Generator name registry. Append-only, so codes handed out are stable for the
# lifetime of the process; codes never leave the process (text I/O uses names).
_lock = threading.Lock()
_index: dict[str, int] = {}
_names: list[str] = []
_inverse_table: dict[int, int] = {}


def _register(name: str) -> int:
    idx = _index.get(name)
    if idx is not None:
        return idx
    if not is_valid_name(name):
        raise ParseError(f"invalid generator name {name!r}")
    with _lock:
        idx = _index.get(name)
        if idx is None:
            idx = len(_names)
            _names.append(name)
            _index[name] = idx
            _inverse_table[2 * idx] = 2 * idx + 1
            _inverse_table[2 * idx + 1] = 2 * idx
    return idx


def letter_code(name: str, sign: int = 1) -> str:
    """The internal one-character code of a signed letter."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    return chr(2 * _register(name) + (sign < 0))


def code_name(ch: str) -> str:
    return _names[ord(ch) >> 1]


def code_sign(ch: str) -> int:
    return -1 if ord(ch) & 1 else 1


def invert_code(s: str) -> str:
    return s[::-1].translate(_inverse_table)


def reduce_code(s: str) -> str:
    out: list[str] = []
    push, pop = out.append, out.pop
    for ch in s:
        if out and ord(out[-1]) ^ 1 == ord(ch):
            pop()
        else:
            push(ch)
    return "".join(out)


def is_reduced_code(s: str) -> bool:
    return all(ord(s[i]) ^ 1 != ord(s[i + 1]) for i in range(len(s) - 1))


class Letter(NamedTuple):
    name: str
    sign: int

    def inverse(self) -> "Letter":
        return Letter(self.name, -self.sign)

    def __str__(self) -> str:
        return self.name if self.sign > 0 else f"{self.name}^-1"


class Word:
    """An immutable word over signed generator letters.

    ``Word`` equality is equality of letter sequences, not of group elements.
    ``u * v`` is the freely reduced product and ``w ** k`` the freely reduced
    power; use :meth:`concat` for raw concatenation.
    """

    __slots__ = ("_s", "_reduced")

    def __init__(self, letters: Iterable[tuple[str, int]] = ()):
        self._s = "".join(letter_code(name, sign) for name, sign in letters)
        self._reduced: bool | None = None

    @classmethod
    def from_code(cls, s: str, reduced: bool | None = None) -> "Word":
        w = cls.__new__(cls)
        w._s = s
        w._reduced = reduced
        return w

    @classmethod
    def gen(cls, name: str, power: int = 1) -> "Word":
        ch = letter_code(name, 1 if power >= 0 else -1)
        return cls.from_code(ch * abs(power), True)

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse whitespace-separated terms ``name`` or ``name^k``.

        ``1`` (or an empty string) denotes the identity. The result is not
        reduced: ``a a^-1`` parses to a word of length two.
        """
        parts: list[str] = []
        for term in text.split():
            if term == "1":
                continue
            m = _TERM_RE.match(term)
            if not m:
                raise ParseError(f"bad term {term!r} in word {text!r}")
            name, exp = m.group(1), m.group(2)
            k = 1 if exp is None else int(exp)
            if k == 0:
                raise ParseError(f"zero exponent in term {term!r}")
            parts.append(letter_code(name, 1 if k > 0 else -1) * abs(k))
        return cls.from_code("".join(parts))

    @property
    def code(self) -> str:
        return self._s

    @property
    def letters(self) -> tuple[Letter, ...]:
        return tuple(Letter(_names[ord(c) >> 1], -1 if ord(c) & 1 else 1) for c in self._s)

    def names(self) -> set[str]:
        return {_names[ord(c) >> 1] for c in set(self._s)}

    def runs(self) -> list[tuple[str, int]]:
        """Maximal runs of a single letter as ``(name, exponent)`` pairs."""
        out: list[tuple[str, int]] = []
        i, s = 0, self._s
        while i < len(s):
            j = i
            while j < len(s) and s[j] == s[i]:
                j += 1
            out.append((code_name(s[i]), (j - i) * code_sign(s[i])))
            i = j
        return out

    def is_reduced(self) -> bool:
        if self._reduced is None:
            self._reduced = is_reduced_code(self._s)
        return self._reduced

    def is_empty(self) -> bool:
        return not self._s

    def inverse(self) -> "Word":
        return Word.from_code(invert_code(self._s), self._reduced)

    def concat(self, other: "Word") -> "Word":
        return Word.from_code(self._s + other._s)

    def rotate(self, k: int) -> "Word":
        if not self._s:
            return self
        k %= len(self._s)
        return Word.from_code(self._s[k:] + self._s[:k])

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        return Word.from_code(reduce_code(self._s + other._s), True)

    def __pow__(self, k: int) -> "Word":
        base = self._s if k >= 0 else invert_code(self._s)
        return Word.from_code(reduce_code(base * abs(k)), True)

    def __invert__(self) -> "Word":
        return self.inverse()

    def __len__(self) -> int:
        return len(self._s)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word.from_code(self._s[item])
        c = self._s[item]
        return Letter(_names[ord(c) >> 1], -1 if ord(c) & 1 else 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self._s == other._s

    def __hash__(self) -> int:
        return hash(self._s)

    def __bool__(self) -> bool:
        return bool(self._s)

    def __str__(self) -> str:
        if not self._s:
            return "1"
        return " ".join(name if k == 1 else f"{name}^{k}" for name, k in self.runs())

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


EMPTY = Word.from_code("", True)


def free_reduce(w: Word) -> Word:
    if w._reduced:
        return w
    s = reduce_code(w._s)
    if s == w._s:
        w._reduced = True
        return w
    return Word.from_code(s, True)


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split a freely reduced ``w`` as ``conj * core * conj^-1``.

    ``core`` is cyclically reduced.
    """
    s = free_reduce(w)._s
    n = len(s)
    k = 0
    while 2 * k + 1 < n and ord(s[k]) ^ 1 == ord(s[n - 1 - k]):
        k += 1
    return Word.from_code(s[k : n - k], True), Word.from_code(s[:k], True)


def enumerate_words(alphabet: Sequence[str], max_len: int) -> Iterator[Word]:
    """Every freely reduced word of length at most ``max_len``, once.

    Order is by length, then lexicographic with letters ordered as listed and
    each generator before its inverse.
    """
    if max_len < 0:
        return
    letters = []
    for name in alphabet:
        letters.append(letter_code(name, 1))
        letters.append(letter_code(name, -1))
    yield EMPTY
    for n in range(1, max_len + 1):
        for s in _reduced_of_length(letters, n):
            yield Word.from_code(s, True)


def _reduced_of_length(letters: list[str], n: int) -> Iterator[str]:
    # odometer over letter indices; letters come in (x, x^-1) pairs so the
    # inverse of index i is i ^ 1
    k = len(letters)
    if k == 0:
        return
    idx = [0] * n
    pos = 0
    while pos >= 0:
        if pos == n:
            yield "".join([letters[i] for i in idx])
            pos -= 1
            idx[pos] += 1
            continue
        i = idx[pos]
        if pos and i == idx[pos - 1] ^ 1:
            i += 1
        if i >= k:
            idx[pos] = 0
            pos -= 1
            if pos >= 0:
                idx[pos] += 1
            continue
        idx[pos] = i
        pos += 1
        if pos < n:
            idx[pos] = 0
