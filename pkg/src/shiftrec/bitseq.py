"""Finite bit words and deterministic infinite bit sources.

Words are packed into a single integer; bit 0 is the leftmost bit.  All
sources are pure functions of their defining data, so any experiment can be
replayed bit-for-bit from its seed or input file.
"""

from __future__ import annotations

import os
from typing import Iterable, Iterator, NamedTuple

from .errors import InsufficientDataError


class Word(NamedTuple):
    """Packed bit string: ``value`` holds the bits, leftmost bit first."""

    value: int
    length: int

    @classmethod
    def from_string(cls, text: str) -> "Word":
        text = text.strip()
        if set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(int(text, 2) if text else 0, len(text))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "Word":
        value = 0
        length = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"bit out of range: {b!r}")
            value = (value << 1) | b
            length += 1
        return cls(value, length)

    def bit(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(f"bit {i} out of range for length {self.length}")
        return (self.value >> (self.length - 1 - i)) & 1

    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.length - 1 - i)) & 1 for i in range(self.length))

    def take(self, n: int) -> "Word":
        """First ``n`` bits."""
        if not 0 <= n <= self.length:
            raise ValueError(f"cannot take {n} bits from a word of length {self.length}")
        return Word(self.value >> (self.length - n), n)

    def drop(self, n: int) -> "Word":
        """Remove the first ``n`` bits."""
        return shift(self, n)

    def concat(self, other: "Word") -> "Word":
        return Word((self.value << other.length) | other.value, self.length + other.length)

    def is_prefix_of(self, other: "Word") -> bool:
        return (
            other.length >= self.length
            and (other.value >> (other.length - self.length)) == self.value
        )

    def is_proper_prefix_of(self, other: "Word") -> bool:
        return other.length > self.length and self.is_prefix_of(other)

    def to_string(self) -> str:
        if self.length == 0:
            return ""
        return format(self.value, f"0{self.length}b")

    def __str__(self) -> str:
        return self.to_string()


EMPTY_WORD = Word(0, 0)


def shift(word: Word, n: int) -> Word:
    """Drop the first ``n`` bits of ``word`` (the tail map, iterated)."""
    if not 0 <= n <= word.length:
        raise ValueError(f"cannot drop {n} bits from a word of length {word.length}")
    rest = word.length - n
    return Word(word.value & ((1 << rest) - 1), rest)


def all_words(length: int) -> Iterator[Word]:
    """All words of the given length, in increasing packed-value order."""
    for value in range(1 << length):
        yield Word(value, length)


# --- deterministic bit sources ------------------------------------------------

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """splitmix64 finalizer (Steele/Lea/Flood constants), pure 64-bit integer ops."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class SequenceSource:
    """Deterministic bit sequence with positional access.

    Subclasses implement :meth:`bit`; the same index always yields the same
    bit.  ``prefix(m)`` agrees with pointwise access by construction.
    """

    def bit(self, index: int) -> int:
        raise NotImplementedError

    def window(self, start: int, length: int) -> Word:
        """Bits ``start .. start+length`` as a word."""
        value = 0
        for i in range(start, start + length):
            value = (value << 1) | self.bit(i)
        return Word(value, length)

    def prefix(self, length: int) -> Word:
        """The first ``length`` bits."""
        return self.window(0, length)


class PseudorandomSource(SequenceSource):
    """Counter-mode splitmix64 bit stream.

    Block ``j`` is ``mix64(seed + (j+1) * GAMMA)`` with
    ``GAMMA = 0x9E3779B97F4A7C15``; bit ``i`` is bit ``i mod 64`` (from the
    least significant end) of block ``i // 64``.  The generator is spelled
    out here so that a seed reproduces the same sequence on any platform.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64

    def _block(self, j: int) -> int:
        return _mix64((self.seed + (j + 1) * _GAMMA) & _MASK64)

    def bit(self, index: int) -> int:
        if index < 0:
            raise IndexError("negative bit index")
        return (self._block(index >> 6) >> (index & 63)) & 1

    def window(self, start: int, length: int) -> Word:
        value = 0
        for j in range(start >> 6, (start + length + 63) >> 6):
            block = self._block(j)
            lo = max(start, j << 6)
            hi = min(start + length, (j + 1) << 6)
            for i in range(lo, hi):
                value = (value << 1) | ((block >> (i & 63)) & 1)
        return Word(value, length)

    def __repr__(self) -> str:
        return f"PseudorandomSource(seed={self.seed})"


class EventuallyPeriodicSource(SequenceSource):
    """A finite head followed by a repeating nonempty cycle."""

    def __init__(self, head: Word, cycle: Word):
        if cycle.length == 0:
            raise ValueError("cycle must be nonempty")
        self.head = head
        self.cycle = cycle

    @classmethod
    def from_strings(cls, head: str, cycle: str) -> "EventuallyPeriodicSource":
        return cls(Word.from_string(head), Word.from_string(cycle))

    def bit(self, index: int) -> int:
        if index < 0:
            raise IndexError("negative bit index")
        if index < self.head.length:
            return self.head.bit(index)
        return self.cycle.bit((index - self.head.length) % self.cycle.length)


class ExplicitPrefixSource(SequenceSource):
    """A fixed prefix, then a constant default bit."""

    def __init__(self, word: Word, default_bit: int = 0):
        if default_bit not in (0, 1):
            raise ValueError("default bit must be 0 or 1")
        self.word = word
        self.default_bit = default_bit

    def bit(self, index: int) -> int:
        if index < 0:
            raise IndexError("negative bit index")
        if index < self.word.length:
            return self.word.bit(index)
        return self.default_bit


_ASCII_BIT_BYTES = frozenset(b"01 \t\r\n\x0b\x0c")


class FileSource(SequenceSource):
    """Bits read from a file, ASCII ``0``/``1`` or raw binary.

    The format is picked from the first 64 bytes: if they all are ``0``,
    ``1`` or whitespace the file is parsed as ASCII (whitespace ignored),
    otherwise as raw bytes, most significant bit first.  Reading past the
    end raises :class:`InsufficientDataError`.
    """

    def __init__(self, path: str | os.PathLike):
        with open(path, "rb") as fh:
            data = fh.read()
        self.path = os.fspath(path)
        self._word = self._decode(data)

    @classmethod
    def from_bytes(cls, data: bytes) -> "FileSource":
        src = cls.__new__(cls)
        src.path = "<bytes>"
        src._word = cls._decode(data)
        return src

    @staticmethod
    def _decode(data: bytes) -> Word:
        head = data[:64]
        if all(b in _ASCII_BIT_BYTES for b in head):
            chars = bytes(b for b in data if b in b"01")
            rest = bytes(b for b in data if b not in _ASCII_BIT_BYTES)
            if rest:
                raise ValueError(f"unexpected bytes in ASCII bit file: {rest[:8]!r}")
            return Word.from_string(chars.decode("ascii"))
        return Word(int.from_bytes(data, "big"), 8 * len(data))

    @property
    def length(self) -> int:
        return self._word.length

    def bit(self, index: int) -> int:
        if index < 0:
            raise IndexError("negative bit index")
        if index >= self._word.length:
            raise InsufficientDataError(
                f"source {self.path} holds {self._word.length} bits, index {index} requested"
            )
        return self._word.bit(index)


def constant_source(bit: int) -> EventuallyPeriodicSource:
    return EventuallyPeriodicSource(EMPTY_WORD, Word(bit, 1))
