from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shiftrec.bitseq import EMPTY_WORD, Word, all_words
from shiftrec.dyadic import D_ONE, D_ZERO, Dyadic
from shiftrec.errors import NoCertificateError
from shiftrec.measure import (
    ClopenSet,
    PrefixFreeWordSet,
    StagedCoEnumeration,
    complement_clopen,
    is_prefix_free,
    measure_open,
    prefix_reduce,
    split_tail,
)


def W(text):
    return Word.from_string(text)


def words(*texts):
    return {W(t) for t in texts}


def oracle_measure(word_set, depth=10):
    """Count extensions at a common refinement depth."""
    depth = max([depth] + [w.length for w in word_set])
    hits = sum(
        1
        for v in all_words(depth)
        if any(w.is_prefix_of(v) for w in word_set)
    )
    return Fraction(hits, 1 << depth)


def test_measure_open_examples():
    assert measure_open({EMPTY_WORD}) == D_ONE
    assert measure_open(words("01")) == Dyadic(1, 2)
    assert measure_open(set()) == D_ZERO


def test_measure_open_against_extension_oracle():
    s = words("0", "10", "110")
    assert measure_open(s) == Dyadic(7, 3)
    assert measure_open(s).as_fraction() == oracle_measure(s, 3)


def test_measure_open_overlapping():
    s = words("0", "01", "0110")
    assert measure_open(s).as_fraction() == oracle_measure(s)


@given(
    st.sets(
        st.integers(0, 5).flatmap(
            lambda n: st.integers(0, (1 << n) - 1).map(lambda v: Word(v, n))
        ),
        max_size=12,
    )
)
def test_reduce_preserves_measure(s):
    reduced = prefix_reduce(s)
    assert measure_open(reduced) == measure_open(s)
    assert is_prefix_free(reduced.words)
    assert measure_open(s).as_fraction() == oracle_measure(s, 6)


def test_prefix_reduce_examples():
    assert prefix_reduce(words("0", "01")).words == words("0")
    assert prefix_reduce({EMPTY_WORD, W("1")}).words == {EMPTY_WORD}
    # already reduced: pairwise scan oracle agrees
    s = words("00", "01", "1")
    assert prefix_reduce(s).words == s
    assert is_prefix_free(s)


def test_prefix_free_set_validates():
    with pytest.raises(ValueError):
        PrefixFreeWordSet(words("0", "01"))
    assert len(PrefixFreeWordSet(words("00", "01", "1"))) == 3


def test_clopen_complement_examples():
    p = ClopenSet(1, words("1"))
    assert complement_clopen(p) == ClopenSet(1, words("0"))
    assert complement_clopen(ClopenSet(2, set())) == ClopenSet.full(2)
    q = ClopenSet(2, words("00", "01", "10"))
    qc = complement_clopen(q)
    assert qc.words == words("11")
    assert q.measure() == Dyadic(3, 2)
    assert qc.measure() == Dyadic(1, 2)


@given(st.integers(1, 6), st.integers(0, 63))
def test_complement_measures_sum_to_one(granularity, mask):
    members = [w for w in all_words(granularity) if (mask >> (w.value % 6)) & 1]
    p = ClopenSet(granularity, members)
    assert p.measure() + p.complement().measure() == D_ONE


def test_clopen_membership_and_errors():
    p = ClopenSet(2, words("11"))
    assert p.contains_word(W("1101"))
    assert not p.contains_word(W("10"))
    with pytest.raises(ValueError):
        p.contains_word(W("1"))
    with pytest.raises(ValueError):
        ClopenSet(2, words("1"))
    with pytest.raises(ValueError):
        ClopenSet(0, set())


def test_clopen_text_roundtrip():
    p = ClopenSet(2, words("01", "11"))
    assert ClopenSet.from_text(p.to_text()) == p


def two_stage_coenum():
    return StagedCoEnumeration({2: words("11"), 4: words("0000")})


def test_staged_validation():
    with pytest.raises(ValueError):
        StagedCoEnumeration({2: words("111")})
    with pytest.raises(ValueError):
        StagedCoEnumeration({0: {EMPTY_WORD}})


def test_staged_accessors():
    b = two_stage_coenum()
    assert b.newly(2) == words("11")
    assert b.cumulative(3) == words("11")
    assert b.cumulative(4) == words("11", "0000")
    assert b.late_words(2) == words("0000")
    assert b.measure() == Dyadic(5, 4)
    assert b.support_bound == 4
    assert b.is_prefix_free()


def test_staged_tail_modulus_exact():
    b = two_stage_coenum()
    assert b.tail_modulus(0) == Dyadic(5, 4)
    assert b.tail_modulus(2) == Dyadic(1, 4)
    assert b.tail_modulus(4) == D_ZERO
    assert b.tail_modulus(9) == D_ZERO


def test_modulus_soundness():
    b = two_stage_coenum()
    for t in range(6):
        for later in range(t, 6):
            lhs = measure_open(b.cumulative(t)) + b.tail_modulus(t)
            assert lhs >= measure_open(b.cumulative(later))


def test_staged_text_roundtrip():
    b = two_stage_coenum()
    assert StagedCoEnumeration.from_text(b.to_text()) == b
    assert StagedCoEnumeration.from_text("") == StagedCoEnumeration.empty()


def test_split_tail_examples():
    # zero tail exactly at the last delivery stage
    heavy = words("000", "001", "010", "011", "100")  # measure 5/8
    b = StagedCoEnumeration({3: heavy})
    d, n = split_tail(b, Fraction(1, 2))
    assert d == heavy and n == 3

    assert split_tail(StagedCoEnumeration.empty(), Fraction(1, 2)) == (frozenset(), 0)

    d, n = split_tail(two_stage_coenum(), Dyadic(1, 3))
    assert d == words("11")
    assert n == 2


def test_split_tail_least_stage():
    b = two_stage_coenum()
    d, n = split_tail(b, Fraction(1, 2))
    # the tail after stage 1 is 5/16 < 1/2 already, with nothing delivered yet
    assert d == frozenset() and n == 0


def test_split_tail_thresholds():
    with pytest.raises(ValueError):
        split_tail(two_stage_coenum(), Fraction(0))


def test_split_tail_custom_modulus_no_certificate():
    b = StagedCoEnumeration(
        {1: words("1")},
        tail_modulus=lambda t: Dyadic(1, 1),
        support_bound=None,
    )
    with pytest.raises(NoCertificateError):
        split_tail(b, Fraction(1, 4), max_stage=32)


def test_remove_words():
    b = two_stage_coenum()
    tail = b.remove_words(words("11"))
    assert tail.words() == words("0000")
    assert tail.measure() == Dyadic(1, 4)
