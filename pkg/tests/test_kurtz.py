import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftrec.bitseq import ExplicitPrefixSource, PseudorandomSource, Word, constant_source
from shiftrec.dyadic import D_ONE, D_ZERO, Dyadic
from shiftrec.errors import BudgetExceededError
from shiftrec.kurtz import KurtzSchedule, kurtz_capture, kurtz_stage_set
from shiftrec.measure import ClopenSet, measure_open


def W(text):
    return Word.from_string(text)


P_ONES = ClopenSet(1, {W("1")})


def oracle_survivors(members: set[str], n0: int, k: int, t: int) -> tuple[int, int]:
    """String-based stage simulation over every word of the bounding length."""
    length = k * n0 * (k + 1) ** t + n0
    count = 0
    for value in range(1 << length):
        w = format(value, f"0{length}b")
        alive = True
        for u in range(t + 1):
            nu = n0 * (k + 1) ** u
            if all(w[i * nu : i * nu + n0] in members for i in range(1, k + 1)):
                alive = False
                break
        if alive:
            count += 1
    return count, length


def test_schedule_geometry():
    sched = KurtzSchedule(2, 3)
    assert [sched.time(t) for t in range(3)] == [2, 8, 32]
    for t in range(4):
        assert sched.time(t + 1) == (sched.k + 1) * sched.time(t)
        assert sched.blocks_disjoint_through(t)


def test_stage_set_full_target():
    cert = kurtz_stage_set(ClopenSet.full(1), 2, 1)
    assert cert.exact_measure == D_ZERO
    assert len(cert.words) == 0


def test_stage_zero_measure():
    cert = kurtz_stage_set(P_ONES, 2, 0)
    assert cert.exact_measure == Dyadic(3, 2)  # 1 - (1/2)^2


def test_stage_one_exhaustive_count():
    cert = kurtz_stage_set(P_ONES, 2, 1)
    assert cert.exact_measure == Dyadic(9, 4)
    assert len(cert.words) == 72 and cert.words[0].length == 7
    count, length = oracle_survivors({"1"}, 1, 2, 1)
    assert (count, length) == (72, 7)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 2),
    st.integers(1, 2),
    st.integers(0, 1),
    st.integers(0, 15),
)
def test_measure_identity_matches_oracle(n0, k, t, mask):
    members = {w for w in range(1 << n0) if (mask >> w) & 1}
    target = ClopenSet(n0, {Word(w, n0) for w in members})
    cert = kurtz_stage_set(target, k, t)
    expected = (D_ONE - target.measure() ** k) ** (t + 1)
    assert cert.exact_measure == expected
    strings = {format(w, f"0{n0}b") for w in members}
    count, length = oracle_survivors(strings, n0, k, t)
    assert cert.exact_measure == Dyadic(count, length)
    assert measure_open(cert.words) == cert.exact_measure


def test_budget_guard():
    with pytest.raises(BudgetExceededError):
        kurtz_stage_set(P_ONES, 2, 9)


def test_capture_examples():
    zeros = constant_source(0)
    for t_max in range(5):
        assert kurtz_capture(zeros, P_ONES, 1, t_max) == (True, None)
    ones = constant_source(1)
    assert kurtz_capture(ones, P_ONES, 1, 4) == (False, 0)


def test_capture_matches_bit_lookup():
    # escape stage = first scheduled time with all examined bits inside the target
    target = P_ONES
    for seed in range(30):
        src = PseudorandomSource(seed)
        captured, stage = kurtz_capture(src, target, 2, 6)
        schedule = KurtzSchedule(1, 2)
        oracle_stage = None
        for t in range(7):
            nt = schedule.time(t)
            if src.bit(nt) == 1 and src.bit(2 * nt) == 1:
                oracle_stage = t
                break
        assert (captured, stage) == (oracle_stage is None, oracle_stage)


def test_witness_at_scheduled_time_forces_escape():
    # capture soundness: a scheduled witness is exactly an escape
    schedule = KurtzSchedule(1, 1)
    for value in range(1 << 12):
        src = ExplicitPrefixSource(Word(value, 12), 0)
        captured, stage = kurtz_capture(src, P_ONES, 1, 5)
        scheduled_hits = [
            t for t in range(6) if src.bit(schedule.time(t)) == 1
        ]
        if scheduled_hits:
            assert not captured and stage == scheduled_hits[0]
        else:
            assert captured


def test_survivor_membership_consistency():
    # a sequence is captured through stage t iff its prefix is a stage-t survivor
    cert = kurtz_stage_set(P_ONES, 2, 1)
    survivors = set(cert.words)
    for value in range(1 << 7):
        src = ExplicitPrefixSource(Word(value, 7), 0)
        captured, _ = kurtz_capture(src, P_ONES, 2, 1)
        assert captured == (Word(value, 7) in survivors)
