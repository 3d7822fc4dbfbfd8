import pytest

from shiftrec.bitseq import (
    EventuallyPeriodicSource,
    ExplicitPrefixSource,
    PseudorandomSource,
    Word,
    constant_source,
)
from shiftrec.measure import ClopenSet, StagedCoEnumeration
from shiftrec.recurrence import (
    Pi01Target,
    RecurrenceQuery,
    batch_statistics,
    find_witness,
    is_witness,
    recurrence_profile,
)


def W(text):
    return Word.from_string(text)


P_ONES = ClopenSet(1, {W("1")})
P_ZERO = ClopenSet(1, {W("0")})
P_FULL = ClopenSet.full(1)


def naive_least_witness(source, target, k, n_max):
    """Exhaustive scan oracle, written against raw bits."""
    if isinstance(target, ClopenSet):
        length = target.granularity
    else:
        length = target.stage_budget
    for n in range(1, n_max + 1):
        if all(
            target.contains_word(source.window(i * n, length)) for i in range(1, k + 1)
        ):
            return n
    return None


def test_is_witness_examples():
    ones = constant_source(1)
    assert is_witness(ones, P_ONES, 3, 1)
    tail = ExplicitPrefixSource(W("0111"), 1)
    assert not is_witness(tail, P_ZERO, 1, 1)


def test_is_witness_bit_lookup():
    # direct bit-lookup oracle: positions 4 and 8 of 010010001...
    z = ExplicitPrefixSource(W("010010001"), 0)
    expected = z.bit(4) == 1 and z.bit(8) == 1
    assert is_witness(z, P_ONES, 2, 4) == expected
    assert expected  # both positions carry a 1


def test_is_witness_validation():
    with pytest.raises(ValueError):
        is_witness(constant_source(1), P_ONES, 1, 0)
    with pytest.raises(ValueError):
        is_witness(constant_source(1), P_ONES, 0, 1)


def test_find_witness_full_space():
    report = find_witness(RecurrenceQuery(PseudorandomSource(3), P_FULL, 2, 10))
    assert report.witness == 1


def test_find_witness_absent():
    report = find_witness(RecurrenceQuery(constant_source(0), P_ONES, 1, 500))
    assert report.witness is None
    assert report.checked_range == 500


def test_find_witness_matches_exhaustive_oracle():
    target = ClopenSet(2, {W("11")})
    for seed in range(25):
        src = PseudorandomSource(seed)
        got = find_witness(RecurrenceQuery(src, target, 2, 64)).witness
        assert got == naive_least_witness(src, target, 2, 64)


def test_witness_evidence_rechecks():
    target = ClopenSet(2, {W("11")})
    src = PseudorandomSource(11)
    report = find_witness(RecurrenceQuery(src, target, 2, 64))
    assert report.witness is not None
    for check in report.checks:
        assert check.in_target
        assert src.window(check.offset, 2) == check.block
        assert target.contains_word(check.block)


def test_minimality():
    target = ClopenSet(1, {W("1")})
    for seed in range(20):
        src = PseudorandomSource(seed)
        n = find_witness(RecurrenceQuery(src, target, 2, 64)).witness
        if n is not None:
            for smaller in range(1, n):
                assert not is_witness(src, target, 2, smaller)


def test_monotone_in_target():
    small = ClopenSet(2, {W("11")})
    large = ClopenSet(2, {W("11"), W("01")})
    for seed in range(20):
        src = PseudorandomSource(seed)
        n = find_witness(RecurrenceQuery(src, small, 2, 32)).witness
        if n is not None:
            assert is_witness(src, large, 2, n)


def test_profile_examples():
    ones = constant_source(1)
    assert recurrence_profile(ones, P_ONES, 4, 10) == tuple((k, 1) for k in range(1, 5))

    alternating = EventuallyPeriodicSource.from_strings("", "10")
    profile = recurrence_profile(alternating, P_ONES, 2, 10)
    assert profile == ((1, 2), (2, 2))

    zeros = constant_source(0)
    assert recurrence_profile(zeros, P_ONES, 3, 100) == ((1, None), (2, None), (3, None))


def test_pi01_target_membership_and_antimonotonicity():
    coenum = StagedCoEnumeration({1: {W("1")}, 3: {W("001")}})
    src = EventuallyPeriodicSource.from_strings("", "001")
    # verdicts can only flip to negative as the stage budget grows
    for n in range(1, 20):
        for k in (1, 2):
            roomy = is_witness(src, Pi01Target(coenum, 1), k, n)
            tight = is_witness(src, Pi01Target(coenum, 3), k, n)
            assert roomy or not tight


def test_pi01_find_witness():
    # complement enumerates every word starting 1, so the target is "starts 0..."
    coenum = StagedCoEnumeration({1: {W("1")}})
    target = Pi01Target(coenum, 4)
    src = ExplicitPrefixSource(W("110"), 0)
    assert find_witness(RecurrenceQuery(src, target, 1, 10)).witness == 2


def test_batch_statistics_full_space():
    summary = batch_statistics(range(10), P_FULL, 2, 10)
    assert summary.fraction_with_witness == 1
    assert set(summary.histogram()) == {1}


def test_batch_statistics_deterministic():
    a = batch_statistics([7, 7, 7], P_ONES, 2, 50)
    b = batch_statistics([7, 7, 7], P_ONES, 2, 50)
    assert a == b
    assert len({w for _, w in a.rows}) == 1


def test_batch_statistics_hit_rate_near_p_to_k():
    # Monte-Carlo vs the exact per-step rate p**k = 1/4: the first-step hit
    # count over 1000 seeds is Binomial(1000, 1/4); 4 sigma ~ 0.055.
    summary = batch_statistics(range(1000), P_ONES, 2, 50)
    first = summary.histogram().get(1, 0) / 1000
    assert abs(first - 0.25) < 0.055
    assert summary.fraction_with_witness == 1


def test_batch_statistics_rejects_empty():
    with pytest.raises(ValueError):
        batch_statistics([], P_ONES, 1, 10)


def test_csv_rows_fixed_columns():
    summary = batch_statistics([1, 2], P_ONES, 2, 50)
    rows = summary.to_csv_rows()
    assert rows[0] == "seed,k,n_max,witness"
    assert rows[1].startswith("1,2,50,")
