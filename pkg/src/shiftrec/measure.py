"""Exact uniform measures of open sets given by word sets.

An open set is presented by the words whose cylinders it unions.  After
prefix reduction the cylinders are pairwise disjoint, so every measure here
is an exact dyadic sum of powers of two.  Effectively closed sets are kept
as staged co-enumerations of their complements, the convention being that a
word delivered at stage ``t`` has length exactly ``t``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping

from .bitseq import Word, all_words
from .dyadic import D_ZERO, Dyadic
from .errors import BudgetExceededError, NoCertificateError

_WordIter = Iterable[Word]


def is_prefix_free(words: _WordIter) -> bool:
    """Pairwise scan: no member is a proper prefix of another."""
    ws = frozenset(words)
    lengths = sorted({w.length for w in ws})
    shorter: list[int] = []
    for length in lengths:
        for w in ws:
            if w.length != length:
                continue
            if any(w.take(l) in ws for l in shorter):
                return False
        shorter.append(length)
    return True


class PrefixFreeWordSet:
    """A word set in which no member is a proper prefix of another."""

    __slots__ = ("words",)

    def __init__(self, words: _WordIter, *, _validated: bool = False):
        ws = frozenset(words)
        if not _validated and not is_prefix_free(ws):
            raise ValueError("word set is not prefix-free")
        object.__setattr__(self, "words", ws)

    def __setattr__(self, name, value):
        raise AttributeError("PrefixFreeWordSet is immutable")

    def __iter__(self) -> Iterator[Word]:
        return iter(self.words)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, w: Word) -> bool:
        return w in self.words

    def __eq__(self, other):
        if isinstance(other, PrefixFreeWordSet):
            return self.words == other.words
        return NotImplemented

    def __hash__(self):
        return hash(self.words)

    def __repr__(self):
        return f"PrefixFreeWordSet({sorted_words(self.words)!r})"


def prefix_reduce(words: _WordIter) -> PrefixFreeWordSet:
    """Keep exactly the prefix-minimal members; the open set is unchanged."""
    pool = frozenset(words)
    kept: set[Word] = set()
    kept_lengths: list[int] = []
    for length in sorted({w.length for w in pool}):
        new = [
            w
            for w in pool
            if w.length == length and not any(w.take(l) in kept for l in kept_lengths)
        ]
        if new:
            kept.update(new)
            kept_lengths.append(length)
    return PrefixFreeWordSet(kept, _validated=True)


def measure_open(words: _WordIter | PrefixFreeWordSet) -> Dyadic:
    """Uniform measure of the open set generated by ``words``, exactly."""
    if isinstance(words, PrefixFreeWordSet):
        reduced = words.words
    else:
        reduced = prefix_reduce(words).words
    if not reduced:
        return D_ZERO
    top = max(w.length for w in reduced)
    return Dyadic(sum(1 << (top - w.length) for w in reduced), top)


def sorted_words(words: _WordIter) -> tuple[Word, ...]:
    """Canonical (length, value) order, used everywhere output must be stable."""
    ws = list(words)
    if len({w.length for w in ws}) <= 1:
        ws.sort()  # equal lengths: native tuple order is already value order
    else:
        ws.sort(key=lambda w: (w.length, w.value))
    return tuple(ws)


class ClopenSet:
    """A finite union of cylinders presented at one fixed granularity."""

    __slots__ = ("granularity", "words")

    def __init__(self, granularity: int, words: _WordIter):
        if granularity < 1:
            raise ValueError("granularity must be a positive integer")
        ws = frozenset(words)
        for w in ws:
            if w.length != granularity:
                raise ValueError(f"word {w} does not have length {granularity}")
        object.__setattr__(self, "granularity", granularity)
        object.__setattr__(self, "words", ws)

    def __setattr__(self, name, value):
        raise AttributeError("ClopenSet is immutable")

    @classmethod
    def from_strings(cls, texts: Iterable[str], granularity: int | None = None) -> "ClopenSet":
        ws = [Word.from_string(t) for t in texts]
        if granularity is None:
            if not ws:
                raise ValueError("granularity required for an empty clopen set")
            granularity = ws[0].length
        return cls(granularity, ws)

    @classmethod
    def full(cls, granularity: int) -> "ClopenSet":
        return cls(granularity, all_words(granularity))

    def measure(self) -> Dyadic:
        return Dyadic(len(self.words), self.granularity)

    def complement(self) -> "ClopenSet":
        if self.granularity > 26:
            raise BudgetExceededError(
                f"complement would enumerate 2^{self.granularity} words"
            )
        return ClopenSet(
            self.granularity,
            (w for w in all_words(self.granularity) if w not in self.words),
        )

    def contains_word(self, w: Word) -> bool:
        """Membership of any word of length >= granularity, decided on its head."""
        if w.length < self.granularity:
            raise ValueError(
                f"word of length {w.length} is too short for granularity {self.granularity}"
            )
        return w.take(self.granularity) in self.words

    def __eq__(self, other):
        if isinstance(other, ClopenSet):
            return (self.granularity, self.words) == (other.granularity, other.words)
        return NotImplemented

    def __hash__(self):
        return hash((self.granularity, self.words))

    def __repr__(self):
        return f"ClopenSet({self.granularity}, {[str(w) for w in sorted_words(self.words)]})"

    def to_text(self) -> str:
        lines = [f"granularity {self.granularity}"]
        lines.extend(str(w) for w in sorted_words(self.words))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ClopenSet":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("granularity"):
            raise ValueError("clopen set text must start with 'granularity <n>'")
        granularity = int(lines[0].split()[1])
        return cls(granularity, (Word.from_string(ln) for ln in lines[1:]))


def complement_clopen(clopen: ClopenSet) -> ClopenSet:
    return clopen.complement()


class StagedCoEnumeration:
    """Stage-indexed growing word set (the enumerated complement of a closed set).

    A word delivered at stage ``t`` has length exactly ``t``.  With finite
    support the tail measure past any stage is computed exactly; an
    infinite-support enumeration instead supplies ``tail_modulus``, an upper
    bound on the measure of the part not yet delivered.
    """

    def __init__(
        self,
        stages: Mapping[int, _WordIter],
        tail_modulus: Callable[[int], Dyadic] | None = None,
        support_bound: int | None = None,
    ):
        clean: dict[int, frozenset[Word]] = {}
        for t, words in stages.items():
            ws = frozenset(words)
            if not ws:
                continue
            if t < 1:
                raise ValueError(f"stage {t} is not a positive integer")
            for w in ws:
                if w.length != t:
                    raise ValueError(f"word {w} delivered at stage {t} must have length {t}")
            clean[t] = ws
        self._stages = dict(sorted(clean.items()))
        self._custom_modulus = tail_modulus
        if tail_modulus is None:
            support_bound = max(self._stages, default=0)
        self.support_bound = support_bound
        self._cumulative: dict[int, frozenset[Word]] = {}

    @classmethod
    def from_words(cls, words: _WordIter) -> "StagedCoEnumeration":
        """Deliver each word at the stage equal to its length."""
        stages: dict[int, set[Word]] = {}
        for w in words:
            stages.setdefault(w.length, set()).add(w)
        return cls(stages)

    @classmethod
    def empty(cls) -> "StagedCoEnumeration":
        return cls({})

    @property
    def stages(self) -> tuple[int, ...]:
        return tuple(self._stages)

    @property
    def max_stage(self) -> int:
        return max(self._stages, default=0)

    def newly(self, t: int) -> frozenset[Word]:
        return self._stages.get(t, frozenset())

    def cumulative(self, t: int) -> frozenset[Word]:
        """All words delivered by stage ``t``."""
        key = max((s for s in self._stages if s <= t), default=0)
        if key not in self._cumulative:
            acc: set[Word] = set()
            for s, ws in self._stages.items():
                if s <= key:
                    acc |= ws
            self._cumulative[key] = frozenset(acc)
        return self._cumulative[key]

    def words(self) -> frozenset[Word]:
        return self.cumulative(self.max_stage)

    def late_words(self, t: int) -> frozenset[Word]:
        """The enumerated words delivered after stage ``t``."""
        return self.words() - self.cumulative(t)

    def tail_modulus(self, t: int) -> Dyadic:
        if self._custom_modulus is not None:
            return self._custom_modulus(t)
        return measure_open(self.late_words(t))

    def measure(self) -> Dyadic:
        """Measure of the open set generated by the enumerated words."""
        return measure_open(self.words())

    def is_prefix_free(self) -> bool:
        return is_prefix_free(self.words())

    def remove_words(self, drop: _WordIter) -> "StagedCoEnumeration":
        dropset = frozenset(drop)
        return StagedCoEnumeration(
            {t: ws - dropset for t, ws in self._stages.items()},
            tail_modulus=self._custom_modulus,
            support_bound=self.support_bound,
        )

    def __eq__(self, other):
        if isinstance(other, StagedCoEnumeration):
            return self._stages == other._stages
        return NotImplemented

    def __hash__(self):
        return hash(tuple((t, ws) for t, ws in self._stages.items()))

    def __repr__(self):
        parts = ", ".join(
            f"{t}: {[str(w) for w in sorted_words(ws)]}" for t, ws in self._stages.items()
        )
        return f"StagedCoEnumeration({{{parts}}})"

    def to_text(self) -> str:
        lines = []
        for t, ws in self._stages.items():
            lines.append(f"stage {t}: " + " ".join(str(w) for w in sorted_words(ws)))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> "StagedCoEnumeration":
        stages: dict[int, set[Word]] = {}
        for ln in text.splitlines():
            ln = ln.strip()
            if not ln:
                continue
            if not ln.startswith("stage"):
                raise ValueError(f"bad co-enumeration line: {ln!r}")
            head, _, rest = ln.partition(":")
            t = int(head.split()[1])
            stages.setdefault(t, set()).update(
                Word.from_string(tok) for tok in rest.split()
            )
        return cls(stages)


def split_tail(
    coenum: StagedCoEnumeration,
    threshold: Dyadic | Fraction,
    max_stage: int = 1 << 16,
) -> tuple[frozenset[Word], int]:
    """Head/tail split at the least stage whose certified tail is below threshold.

    Returns ``(D, N)``: the words delivered by that stage and the maximum
    length among them.  The remaining enumerated words then generate an open
    set of measure below ``threshold``.
    """
    thr = threshold.as_fraction() if isinstance(threshold, Dyadic) else Fraction(threshold)
    if thr <= 0:
        raise ValueError("threshold must be positive")
    cap = coenum.support_bound if coenum.support_bound is not None else max_stage
    for t in range(cap + 1):
        if coenum.tail_modulus(t).as_fraction() < thr:
            head = coenum.cumulative(t)
            return head, max((w.length for w in head), default=0)
    raise NoCertificateError(
        f"tail modulus never certified a tail below {thr} within {cap} stages"
    )
