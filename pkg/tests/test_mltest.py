"""The level-set construction against a string-based stage simulator.

The oracle re-runs the definitions literally: at every stage it scans every
bit string of that length, checks the parent/shift-block conditions by
string slicing, and applies prefix minimality.  The production code builds
candidates constructively, so agreement is a real cross-check.
"""

from fractions import Fraction

import pytest

from shiftrec.bitseq import EMPTY_WORD, Word, constant_source
from shiftrec.dyadic import D_ONE, Dyadic, half_power
from shiftrec.errors import InapplicableBoundError
from shiftrec.measure import StagedCoEnumeration, measure_open, split_tail
from shiftrec.mltest import (
    refinement_depth,
    MLConstruction,
    check_prefix_free,
    ml_enumerate_C,
    ml_enumerate_G,
    ml_escape_level,
    ml_measure_bound,
    ml_refined_levels,
    ml_run,
    ml_test_refinement,
)


def W(text):
    return Word.from_string(text)


def stages_as_strings(coenum: StagedCoEnumeration) -> dict[int, set[str]]:
    return {t: {str(w) for w in coenum.newly(t)} for t in coenum.stages}


def oracle_levels(stages: dict[int, set[str]], k: int, r_max: int, stage_max: int):
    """Levels as dicts string -> entry stage, by literal stage simulation."""

    def cumulative(t):
        return {w for s, ws in stages.items() if s <= t for w in ws}

    levels = [{"": 0}]
    for _ in range(r_max):
        parents = levels[-1]
        entries: dict[str, int] = {}
        for t in range(1, stage_max + 1):
            new = set()
            for value in range(1 << t):
                eta = format(value, f"0{t}b")
                if any(eta[:l] in entries for l in range(t)):
                    continue
                satisfied = False
                for sigma, s in parents.items():
                    if t <= (k + 1) * s or not eta.startswith(sigma):
                        continue
                    for i in range(1, k + 1):
                        tail = eta[s * i :]
                        if any(tail.startswith(b) for b in cumulative(t - s * i)):
                            satisfied = True
                            break
                    if satisfied:
                        break
                if satisfied:
                    new.add(eta)
            for eta in new:
                entries[eta] = t
        levels.append(entries)
    return levels


def oracle_escape_sets(levels, head: set[str], n_bound: int, k: int, m: int):
    union: dict[str, int] = {}
    for lev in levels:
        union.update(lev)
    qualifying = []
    for eta in union:
        hits = 0
        for s in range(n_bound + 1, len(eta)):
            if eta[:s] not in union:
                continue
            if any(
                s * i + len(d) <= len(eta) and eta[s * i : s * i + len(d)] == d
                for i in range(1, k + 1)
                for d in head
            ):
                hits += 1
        if hits >= m:
            qualifying.append(eta)
    return {
        w
        for w in qualifying
        if not any(o != w and w.startswith(o) for o in qualifying)
    }


def compare_levels(coenum, k, r_max, stage_max):
    con = MLConstruction(coenum, k, stage_max)
    oracle = oracle_levels(stages_as_strings(coenum), k, r_max, stage_max)
    for r in range(r_max + 1):
        got = {str(w): s for w, s in con.level(r).items()}
        assert got == oracle[r], f"level {r} mismatch for k={k}"
    return con


B_SINGLE = StagedCoEnumeration({2: {W("11")}})
B_ZERO = StagedCoEnumeration({1: {W("0")}})
B_HEAVY = StagedCoEnumeration({1: {W("0")}, 2: {W("11")}})
B_TWO = StagedCoEnumeration({2: {W("11")}, 4: {W("0000")}})


def test_levels_match_oracle_single_word():
    compare_levels(B_SINGLE, 2, 3, 10)


def test_levels_match_oracle_zero_complement():
    compare_levels(B_ZERO, 1, 3, 8)
    compare_levels(B_ZERO, 2, 3, 9)


def test_levels_match_oracle_heavy():
    compare_levels(B_HEAVY, 2, 3, 8)


def test_levels_match_oracle_two_stage():
    compare_levels(B_TWO, 1, 3, 9)


def test_empty_complement_gives_empty_levels():
    con = MLConstruction(StagedCoEnumeration.empty(), 2, 10)
    assert con.level(0) == {EMPTY_WORD: 0}
    for r in (1, 2, 3):
        assert con.level(r) == {}


def test_level_zero_certificate():
    cert = ml_enumerate_C(B_SINGLE, 2, 0, 12)
    assert cert.words == (EMPTY_WORD,)
    assert cert.exact_measure == D_ONE


def test_single_word_level_values():
    con = MLConstruction(B_SINGLE, 2, 12)
    assert con.level(1) == {W("11"): 2}
    assert len(con.level(2)) == 14
    assert {s for s in con.level(2).values()} == {7}
    assert con.level(3) == {}  # needs a stage above 21
    assert con.q == Dyadic(1, 1)


def test_stage_discipline_and_prefix_freeness():
    for coenum, k in ((B_SINGLE, 2), (B_HEAVY, 2), (B_TWO, 1)):
        con = MLConstruction(coenum, k, 10)
        for r in range(4):
            level = con.level(r)
            assert all(w.length == s for w, s in level.items())
            cert = con.level_certificate(r)
            assert check_prefix_free(cert)
            for w, s in level.items():
                if r > 0:
                    parents = [
                        (p, ps) for p, ps in con.level(r - 1).items() if p.is_prefix_of(w)
                    ]
                    assert len(parents) == 1
                    assert s > (k + 1) * parents[0][1]


def test_measure_bounds_direct_path():
    con = MLConstruction(B_SINGLE, 2, 12)
    q = con.q
    for r in range(4):
        cert = con.level_certificate(r)
        assert ml_measure_bound(cert, q, r)
    assert con.level_certificate(1).exact_measure == Dyadic(1, 2)  # 1/4
    assert con.level_certificate(2).exact_measure == Dyadic(7, 6)  # 7/64


def test_measure_bound_inapplicable_when_q_big():
    con = MLConstruction(B_HEAVY, 2, 8)
    cert = con.level_certificate(1)
    with pytest.raises(InapplicableBoundError):
        ml_measure_bound(cert, con.q, 1)


def test_nesting_every_member_extends_previous_level():
    con = MLConstruction(B_ZERO, 1, 15)
    for r in range(1, 4):
        for w in con.level(r):
            assert any(p.is_prefix_of(w) for p in con.level(r - 1))


def test_non_recurrent_capture():
    # 0^infinity never recurs into "starts with 1"; every reachable level
    # holds one of its prefixes.
    zeros = constant_source(0)
    for k, stage_max in ((1, 15), (2, 15)):
        con = MLConstruction(B_ZERO, k, stage_max)
        r = 0
        while con.level(r):
            prefix = zeros.prefix(stage_max)
            assert any(w.is_prefix_of(prefix) for w in con.level(r)), (k, r)
            r += 1
        assert r >= 3


def test_escape_sets_match_oracle():
    con = MLConstruction(B_HEAVY, 2, 12)
    head, n_bound = split_tail(B_HEAVY, Fraction(1, 2))
    assert head == {W("0")} and n_bound == 1
    levels = oracle_levels(stages_as_strings(B_HEAVY), 2, con.levels_until_empty(), 12)
    for m in range(3):
        cert = ml_enumerate_G(con, head, n_bound, m)
        expect = oracle_escape_sets(levels, {"0"}, n_bound, 2, m)
        assert {str(w) for w in cert.words} == expect


def test_escape_sets_reject_bad_hypotheses():
    # a non-prefix-free enumeration, and one that exhausts the whole space,
    # both void the decay estimate and are refused up front
    overlapping = StagedCoEnumeration({1: {W("1")}, 3: {W("101")}})
    con = MLConstruction(overlapping, 1, 8)
    with pytest.raises(ValueError):
        ml_enumerate_G(con, frozenset({W("1")}), 1, 1)
    full = StagedCoEnumeration({1: {W("0"), W("1")}})
    con = MLConstruction(full, 1, 8)
    with pytest.raises(ValueError):
        ml_enumerate_G(con, frozenset({W("0")}), 1, 1)


def test_escape_set_base_cases():
    con = MLConstruction(B_HEAVY, 2, 12)
    cert0 = ml_enumerate_G(con, frozenset({W("0")}), 1, 0)
    assert cert0.words == (EMPTY_WORD,)
    empty_head = ml_enumerate_G(con, frozenset(), 0, 1)
    assert empty_head.words == ()


def test_escape_decay():
    con = MLConstruction(B_HEAVY, 2, 12)
    head, n_bound = split_tail(B_HEAVY, Fraction(1, 2))
    v = D_ONE - measure_open(head)
    factor = D_ONE - v**2
    prev = None
    for m in range(4):
        cert = ml_enumerate_G(con, head, n_bound, m)
        assert cert.exact_measure <= factor**m
        if prev is not None:
            assert cert.exact_measure <= factor * prev
        prev = cert.exact_measure


def test_escape_level_of_a_sequence():
    con = MLConstruction(B_HEAVY, 2, 12)
    head, n_bound = split_tail(B_HEAVY, Fraction(1, 2))
    certs = [ml_enumerate_G(con, head, n_bound, m) for m in range(4)]
    # G_0 = {empty word} contains a prefix of everything, so the level is >= 1
    for bits in ("000000000000", "110111111111", "101010101010"):
        level = ml_escape_level(W(bits), certs)
        assert level is None or level >= 1


def test_refined_levels_examples():
    con = MLConstruction(B_HEAVY, 2, 12)
    tail = B_HEAVY.remove_words({W("0")})
    certs = ml_refined_levels(con, 0, tail, 3)
    by_u = {c.parameters["u"]: c for c in certs}
    assert by_u[0].words == (EMPTY_WORD,)
    assert by_u[1].words == (W("11"),)
    assert by_u[1].exact_measure == Dyadic(1, 2)  # 1/4
    assert len(by_u[2].words) == 14
    assert by_u[2].exact_measure == Dyadic(7, 6)  # 7/64
    q = 2 * measure_open(tail.words())
    for u, cert in by_u.items():
        assert cert.exact_measure <= q**u


def test_refined_base_equals_plain_level():
    con = MLConstruction(B_SINGLE, 2, 12)
    certs = ml_refined_levels(con, 1, B_SINGLE, 2)
    assert set(certs[0].words) == set(con.level(1))
    # removing nothing refines nothing
    full = ml_refined_levels(con, 0, B_SINGLE, 2)
    for cert, r in zip(full, range(3)):
        assert set(cert.words) == set(con.level(r))


def test_refined_nesting():
    con = MLConstruction(B_HEAVY, 2, 12)
    tail = B_HEAVY.remove_words({W("0")})
    certs = ml_refined_levels(con, 0, tail, 3)
    for prev, nxt in zip(certs, certs[1:]):
        for w in nxt.words:
            assert any(p.is_prefix_of(w) for p in prev.words)


def test_refinement_index_arithmetic():
    con = MLConstruction(B_HEAVY, 2, 12)
    tail = B_HEAVY.remove_words({W("0")})
    certs = ml_refined_levels(con, 0, tail, 3)
    levels = ml_test_refinement(certs, Dyadic(1, 1))
    assert [(lv.j, lv.u) for lv in levels] == [(0, 0), (1, 1), (2, 2), (3, 3)]
    for lv in levels:
        assert lv.cert.exact_measure <= half_power(lv.j)


def test_refinement_depth_arithmetic():
    # q = 1/2: depth j; q = 1/4: ceil(j/2), checked against 4**-u <= 2**-j
    for j in range(10):
        assert refinement_depth(Dyadic(1, 1), j) == j
        u = refinement_depth(Dyadic(1, 2), j)
        assert u == (j + 1) // 2
        assert Fraction(1, 4) ** u <= Fraction(1, 2) ** j
        if u:
            assert Fraction(1, 4) ** (u - 1) > Fraction(1, 2) ** j


def test_refinement_requires_small_q():
    con = MLConstruction(B_SINGLE, 2, 8)
    certs = ml_refined_levels(con, 0, B_SINGLE, 1)
    with pytest.raises(ValueError):
        ml_test_refinement(certs, D_ONE)


def test_ml_run_direct():
    result = ml_run(B_SINGLE, 2, 12, 3)
    assert result.path == "direct"
    assert result.q == Dyadic(1, 1)
    assert len(result.level_certs) == 4
    assert result.g_certs is None


def test_ml_run_split():
    result = ml_run(B_HEAVY, 2, 12, 3)
    assert result.path == "split"
    assert result.head == {W("0")}
    assert result.tail_q == Dyadic(1, 1)
    assert all(c.passes for c in result.all_certificates())
    assert result.refinement is not None


def test_truncation_monotone_in_stage_budget():
    deep = MLConstruction(B_SINGLE, 2, 12)
    shallow = MLConstruction(B_SINGLE, 2, 6)
    for r in range(3):
        assert set(shallow.level(r)) <= set(deep.level(r))
