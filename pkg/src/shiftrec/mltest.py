"""Level-set enumerations certifying failures of k-recurrence, with exact
measure accounting.

Level 0 holds the empty word.  A word ``eta`` of length ``t`` enters level
``r`` at stage ``t`` when it properly extends a level ``r-1`` word ``sigma``
entered at stage ``s = len(sigma)`` with ``t > (k+1) s``, some shifted block
``eta[s*i:]`` extends a complement word enumerated by stage ``t - s*i``, and
no prefix of ``eta`` has entered level ``r`` before.  Entries therefore have
length equal to their entry stage and every level is prefix-free.

The shifted-block condition is cylinder membership (the tail *extends* an
enumerated word); requiring the tail to *be* an enumerated word would leave
level 2 empty even for a single-word complement and break the capture
property, since stage-length normalization pins each enumerated word to one
exact length.

When ``q = k * (measure of the enumerated complement)`` is below one, level
``r`` has measure at most ``q**r``.  Otherwise the complement is split into
a finite head ``D`` and a light tail; the escape sets ``G_m`` count how many
chain stages consumed a head word, and the refined levels re-run the chain
on the tail alone, restoring a geometric measure decay.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bitseq import EMPTY_WORD, Word
from .certificates import TestCertificate, new_certificate
from .dyadic import D_ONE, Dyadic, half_power
from .errors import BudgetExceededError, InapplicableBoundError
from .measure import (
    StagedCoEnumeration,
    is_prefix_free,
    measure_open,
    prefix_reduce,
    split_tail,
)


class MLConstruction:
    """Stagewise enumeration of the level sets for one complement and k."""

    def __init__(
        self,
        coenum: StagedCoEnumeration,
        k: int,
        stage_max: int,
        candidate_budget: int = 1 << 22,
    ):
        if k < 1 or stage_max < 0:
            raise ValueError("need k >= 1 and stage_max >= 0")
        self.coenum = coenum
        self.k = k
        self.stage_max = stage_max
        self.candidate_budget = candidate_budget
        self._levels: list[dict[Word, int]] = [{EMPTY_WORD: 0}]

    @property
    def q(self) -> Dyadic:
        """k times the measure of the complement enumerated within the budget."""
        return self.k * measure_open(self.coenum.cumulative(self.stage_max))

    def level(self, r: int) -> dict[Word, int]:
        """Level r as a map word -> entry stage, truncated at the stage budget."""
        if r < 0:
            raise ValueError("level index must be nonnegative")
        while len(self._levels) <= r:
            self._levels.append(self._build_level(self._levels[-1]))
        return self._levels[r]

    def _build_level(self, parents: dict[Word, int]) -> dict[Word, int]:
        entries: dict[Word, int] = {}
        entered_lengths: list[int] = []
        generated = 0
        k = self.k
        for t in range(1, self.stage_max + 1):
            found: set[Word] = set()
            for sigma, s in parents.items():
                first_stage = (k + 1) * s + 1
                if t < first_stage:
                    continue
                for i in range(1, k + 1):
                    si = i * s
                    if si >= t:
                        continue
                    if t == first_stage:
                        # Earliest admissible stage: any already-enumerated
                        # word can witness, padded with free tail bits.
                        taus = self.coenum.cumulative(t - si)
                    else:
                        # Later stages only add words whose witnessing block
                        # ends exactly at t; shorter blocks were already
                        # minimal at an earlier admissible stage.
                        taus = self.coenum.newly(t - si)
                    for tau in taus:
                        mid_bits = si - s
                        tail_bits = t - si - tau.length
                        generated += 1 << (mid_bits + tail_bits)
                        if generated > self.candidate_budget:
                            raise BudgetExceededError(
                                f"level enumeration exceeded {self.candidate_budget} candidates"
                            )
                        for mid in range(1 << mid_bits):
                            head = ((sigma.value << mid_bits) | mid) << tau.length | tau.value
                            for tail in range(1 << tail_bits):
                                w = Word((head << tail_bits) | tail, t)
                                if w in found:
                                    continue
                                if any(w.take(l) in entries for l in entered_lengths):
                                    continue
                                found.add(w)
            if found:
                for w in found:
                    entries[w] = t
                entered_lengths.append(t)
        return entries

    def levels_until_empty(self, hard_cap: int = 64) -> int:
        """Number of consecutive nonempty levels reachable within the budget."""
        r = 0
        while r < hard_cap and self.level(r):
            r += 1
        return r

    def union_map(self, max_level: int | None = None) -> dict[Word, int]:
        """All level members (any level) with their entry stages."""
        top = self.levels_until_empty() if max_level is None else max_level + 1
        acc: dict[Word, int] = {}
        for r in range(top):
            acc.update(self.level(r))
        return acc

    def level_certificate(self, r: int) -> TestCertificate:
        q = self.q
        bound = q**r if q < D_ONE else D_ONE
        words = tuple(self.level(r))
        return new_certificate(
            kind="ml-Cr",
            parameters={"k": self.k, "r": r, "q": str(q)},
            words=words,
            exact_measure=measure_open(words),
            required_bound=bound,
            stage_budget=self.stage_max,
        )


def ml_enumerate_C(
    coenum: StagedCoEnumeration, k: int, r: int, stage_max: int
) -> TestCertificate:
    """Level-r certificate; convenience wrapper over :class:`MLConstruction`."""
    return MLConstruction(coenum, k, stage_max).level_certificate(r)


def check_prefix_free(cert: TestCertificate) -> bool:
    """Pairwise prefix-incomparability scan over a certificate's word set."""
    if cert.space != "bits":
        from .multidim import arrays_prefix_free

        return arrays_prefix_free(cert.words)
    return is_prefix_free(cert.words)


def ml_measure_bound(cert: TestCertificate, q: Dyadic, r: int) -> bool:
    """Direct bound check: measure of level r at most q**r; needs q < 1."""
    if q >= D_ONE:
        raise InapplicableBoundError(
            f"q = {q} is not below one; split the complement and use the escape sets"
        )
    return cert.exact_measure <= q**r


def _block_hits_head(word: Word, s: int, k: int, head_by_len: dict[int, frozenset[Word]]) -> bool:
    for i in range(1, k + 1):
        start = s * i
        for dlen, ds in head_by_len.items():
            if start + dlen <= word.length and word.drop(start).take(dlen) in ds:
                return True
    return False


def ml_enumerate_G(
    construction: MLConstruction, head: frozenset[Word], head_max_len: int, m: int
) -> TestCertificate:
    """Escape set G_m: members of the union chain with at least m head hits.

    A hit is a chain stage ``s > head_max_len`` (the word's length-s prefix
    is itself a chain member) at which some block ``word[s*i : s*i+|d|]``
    equals a head word ``d``.  The words are prefix-minimal; the measure
    decays like ``(1 - v**k)**m`` where ``v`` is the measure outside the
    head's open set.

    The decay bound relies on the standing hypotheses of the construction:
    the complement enumeration is prefix-free (so a block cannot witness a
    head hit and a tail-only chain step at once) and does not exhaust the
    whole space.  Inputs violating either are rejected here rather than
    allowed to surface as spurious bound violations.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    enumerated = construction.coenum.cumulative(construction.stage_max)
    if not is_prefix_free(enumerated):
        raise ValueError("escape sets require a prefix-free complement enumeration")
    if measure_open(enumerated) >= D_ONE:
        raise ValueError("escape sets require a target of positive measure")
    cmap = construction.union_map()
    cset = frozenset(cmap)
    clengths = sorted({w.length for w in cset})
    head_by_len = {
        l: frozenset(d for d in head if d.length == l) for l in {d.length for d in head}
    }
    k = construction.k

    def hits(word: Word) -> int:
        count = 0
        for s in clengths:
            if s <= head_max_len or s >= word.length:
                continue
            if word.take(s) not in cset:
                continue
            if _block_hits_head(word, s, k, head_by_len):
                count += 1
        return count

    members = [w for w in cset if hits(w) >= m]
    words = prefix_reduce(members)
    v = D_ONE - measure_open(head)
    bound = (D_ONE - v**k) ** m
    return new_certificate(
        kind="ml-Gm",
        parameters={"k": k, "m": m, "head_max_len": head_max_len},
        words=words,
        exact_measure=measure_open(words),
        required_bound=bound,
        stage_budget=construction.stage_max,
    )


def ml_escape_level(prefix: Word, g_certs: list[TestCertificate]) -> int | None:
    """Least m whose escape set contains no prefix of the given word."""
    for cert in sorted(g_certs, key=lambda c: c.parameters["m"]):
        if not any(w.is_prefix_of(prefix) for w in cert.words):
            return cert.parameters["m"]
    return None


def ml_refined_levels(
    construction: MLConstruction,
    base_r: int,
    tail_coenum: StagedCoEnumeration,
    u_max: int,
) -> list[TestCertificate]:
    """Refined levels from ``base_r``: chain steps must be witnessed by the tail.

    The refined level at ``u = base_r`` is the plain level; deeper levels keep
    only words whose witnessing blocks extend tail words (never head words).
    Each step multiplies the measure bound by ``q = k * (tail measure)``, so
    the certificate for level u carries the bound ``q**(u - base_r)``.
    """
    if u_max < base_r:
        raise ValueError("u_max must be at least base_r")
    k = construction.k
    q = k * measure_open(tail_coenum.cumulative(construction.stage_max))
    if q >= D_ONE:
        raise InapplicableBoundError(f"tail is not light enough: q = {q}")
    tail_by_len: dict[int, frozenset[Word]] = {}
    for w in tail_coenum.cumulative(construction.stage_max):
        tail_by_len.setdefault(w.length, set()).add(w)  # type: ignore[arg-type]
    tail_by_len = {l: frozenset(ws) for l, ws in tail_by_len.items()}

    certs: list[TestCertificate] = []
    current = dict(construction.level(base_r))
    for u in range(base_r, u_max + 1):
        if u > base_r:
            parents_all = construction.level(u - 1)
            parent_lengths = sorted({w.length for w in parents_all})
            nxt: dict[Word, int] = {}
            for eta, t in construction.level(u).items():
                parent = None
                for s in parent_lengths:
                    if s < t and eta.take(s) in parents_all:
                        parent = eta.take(s)
                        break
                if parent is None or parent not in current:
                    continue
                s = parent.length
                strengthened = False
                for i in range(1, k + 1):
                    si = s * i
                    for tlen, ts in tail_by_len.items():
                        if si + tlen <= t and tlen <= t - si and eta.drop(si).take(tlen) in ts:
                            strengthened = True
                            break
                    if strengthened:
                        break
                if strengthened:
                    nxt[eta] = t
            current = nxt
        words = tuple(current)
        certs.append(
            new_certificate(
                kind="ml-refined",
                parameters={"k": k, "u": u, "base_r": base_r, "q": str(q)},
                words=words,
                exact_measure=measure_open(words),
                required_bound=q ** (u - base_r),
                stage_budget=construction.stage_max,
            )
        )
    return certs


@dataclass(frozen=True)
class RefinementLevel:
    j: int
    u: int
    cert: TestCertificate
    bound: Dyadic


def refinement_depth(q: Dyadic, j: int) -> int:
    """Least u with ``q**u <= 2**-j``; needs q < 1."""
    if q >= D_ONE:
        raise ValueError("refinement requires q < 1")
    u = 0
    while q**u > half_power(j):
        u += 1
    return u


def ml_test_refinement(
    refined_certs: list[TestCertificate], q: Dyadic
) -> list[RefinementLevel]:
    """Re-index refined levels so that level j has measure at most 2**-j.

    Level j uses the least u with ``q**u <= 2**-j``; levels beyond the
    deepest available refined certificate are omitted.
    """
    if q >= D_ONE:
        raise ValueError("refinement requires q < 1")
    by_u = {c.parameters["u"]: c for c in refined_certs}
    max_u = max(by_u)
    levels: list[RefinementLevel] = []
    j = 0
    while True:
        u = refinement_depth(q, j)
        if u > max_u:
            break
        if u not in by_u:
            raise ValueError(f"refinement needs the level-{u} certificate")
        cert = by_u[u]
        if cert.exact_measure > half_power(j):
            raise InapplicableBoundError(
                f"refined level {u} has measure {cert.exact_measure} > 2^-{j}; "
                "re-run the refinement from base level 0"
            )
        levels.append(RefinementLevel(j, u, cert, half_power(j)))
        j += 1
    return levels


@dataclass
class MLRunResult:
    path: str  # "direct" or "split"
    q: Dyadic
    level_certs: list[TestCertificate]
    head: frozenset[Word] | None = None
    head_max_len: int | None = None
    tail_q: Dyadic | None = None
    g_certs: list[TestCertificate] | None = None
    refined_certs: list[TestCertificate] | None = None
    refinement: list[RefinementLevel] | None = None

    def all_certificates(self) -> list[TestCertificate]:
        certs = list(self.level_certs)
        if self.g_certs:
            certs.extend(self.g_certs)
        if self.refined_certs:
            certs.extend(self.refined_certs)
        return certs


def ml_run(
    coenum: StagedCoEnumeration,
    k: int,
    stage_max: int,
    r_max: int,
    m_max: int | None = None,
    u_max: int | None = None,
    base_r: int = 0,
) -> MLRunResult:
    """Level certificates plus, when the direct bound fails, the split path.

    The direct bound applies when ``q = k * (complement measure) < 1``.
    Otherwise the complement splits into a head D (chosen so the remaining
    tail has measure below 1/k), the escape sets G_m are produced, and the
    refined levels re-run the chain on the tail.
    """
    con = MLConstruction(coenum, k, stage_max)
    level_certs = [con.level_certificate(r) for r in range(r_max + 1)]
    q = con.q
    if q < D_ONE:
        return MLRunResult("direct", q, level_certs)
    head, head_max_len = split_tail(coenum, Fraction(1, k))
    tail = coenum.remove_words(head)
    g_certs = [
        ml_enumerate_G(con, head, head_max_len, m)
        for m in range((m_max if m_max is not None else r_max) + 1)
    ]
    refined = ml_refined_levels(
        con, base_r, tail, u_max if u_max is not None else r_max
    )
    tail_q = k * measure_open(tail.cumulative(stage_max))
    refinement = ml_test_refinement(refined, tail_q) if base_r == 0 else None
    return MLRunResult(
        "split",
        q,
        level_certs,
        head=head,
        head_max_len=head_max_len,
        tail_q=tail_q,
        g_certs=g_certs,
        refined_certs=refined,
        refinement=refinement,
    )
