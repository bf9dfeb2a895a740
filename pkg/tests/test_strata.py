from __future__ import annotations

import json
from math import gcd

import pytest
from hypothesis import given, strategies as st

import zipstrat.strata as strata
from zipstrat.canonical import canonical_type
from zipstrat.closedform import is_dense
from zipstrat.oddorth import xj_element, y_gamma
from zipstrat.strata import (
    NORMAL_CM,
    NOT_NORMAL,
    NOT_SMOOTH,
    SMOOTH,
    UNKNOWN,
    YES,
    NO,
    NotLowerNeighbor,
    NotOpenInClosure,
    Verdict,
    WOpen,
    admits_cover,
    canonical_I,
    classify,
    closure_open,
    elementary,
    elementary_pairs,
    is_w_bounded,
    length_one_analysis,
    length_one_verdicts,
    make_w_open,
    separating_verdict,
    smooth_locus_open_stratum_test,
)
from zipstrat.weyl import bruhat_leq, identity, simple_reflection
from zipstrat.zipdatum import (
    bn_datum,
    cocharacter_from_spec,
    gln_datum,
    unitary_inert_datum,
    unitary_restricted_datum,
    weil_split_datum,
)

GL7 = gln_datum(7, 3)


def gl7_pair():
    return elementary(GL7, GL7.element("[4,1,2,5,3,6,7]"), GL7.element("[1,2,4,5,6,3,7]"))


def test_counterexample_verdict():
    u = gl7_pair()
    assert canonical_I(u) == frozenset()
    assert not admits_cover(u, frozenset())
    assert admits_cover(u, GL7.I)
    assert is_w_bounded(u)
    assert separating_verdict(u).status == NO
    v = classify(u)
    assert (v.conclusion, v.has_cover, v.w_bounded, v.separating) == (NOT_SMOOTH, False, True, NO)
    assert any(line.startswith("canonical-cover") for line in v.trace)


def test_verdict_json_round_trip():
    v = classify(gl7_pair())
    again = Verdict.from_json(GL7, v.dumps())
    assert again == v
    assert json.loads(again.dumps()) == json.loads(v.dumps())
    assert json.loads(v.dumps())["trace_version"] == strata.TRACE_VERSION


SMALL = [gln_datum(4, 2), gln_datum(5, 2), gln_datum(6, 2), unitary_inert_datum(4, 1), unitary_inert_datum(5, 2),
         weil_split_datum(3, (1, 2)), unitary_restricted_datum(3, (1, 2)), bn_datum(3),
         cocharacter_from_spec("type=C\nrank=3\nsignature=3"), cocharacter_from_spec("type=D\nrank=4\nsignature=1")]


@given(st.sampled_from(SMALL), st.data())
def test_elementary_verdicts_round_trip_and_are_decided(cd, data):
    w, w1 = data.draw(st.sampled_from(elementary_pairs(cd)))
    v = classify(elementary(cd, w, w1))
    assert v.conclusion in (SMOOTH, NOT_SMOOTH)
    assert Verdict.from_json(cd, v.to_json()) == v
    # a Bruhat-lower neighbour always gives a cover at any I0 inside I_w
    if bruhat_leq(w1, w):
        u = elementary(cd, w, w1)
        assert admits_cover(u, canonical_I(u))
        assert admits_cover(u, frozenset())


@pytest.mark.parametrize("cd", SMALL, ids=lambda cd: cd.label + str(sorted(cd.I)))
def test_closure_verdicts_are_consistent(cd):
    for w in cd.coset():
        u = closure_open(cd, w)
        v = classify(u)
        if v.conclusion == NORMAL_CM:
            assert v.w_bounded and v.has_cover and v.separating == YES
        if v.has_cover and v.w_bounded and v.separating == YES:
            assert v.conclusion in (SMOOTH, NORMAL_CM)
        single = WOpen(cd, w, frozenset([w]))
        assert admits_cover(single, cd.I) and is_w_bounded(single)
        assert classify(single).conclusion == SMOOTH


def test_small_length_one_pair_is_smooth():
    cd = gln_datum(5, 2)
    v = classify(elementary(cd, simple_reflection(cd.datum, 1), identity(cd.datum)))
    assert v.conclusion == SMOOTH and v.has_cover and v.w_bounded


def test_w_open_validation():
    cd = bn_datum(3)
    x = [xj_element(3, j) for j in range(6)]
    u = make_w_open(cd, x[0], x)
    assert len(u.gamma) == 6
    make_w_open(cd, x[1], y_gamma(3, 1))
    with pytest.raises(NotOpenInClosure) as exc:
        make_w_open(cd, x[0], [x[0], x[2]])
    assert exc.value.witness == x[1]
    with pytest.raises(NotOpenInClosure):
        make_w_open(cd, x[0], [x[1]])
    with pytest.raises(NotOpenInClosure):
        make_w_open(cd, x[2], [x[2], x[1]])
    with pytest.raises(NotLowerNeighbor):
        elementary(cd, x[0], x[2])


def test_odd_orthogonal_opens():
    for n in range(2, 6):
        cd = bn_datum(n)
        for j in range(n):
            u = WOpen(cd, xj_element(n, j), frozenset(y_gamma(n, j)))
            v = classify(u)
            assert v.separating == YES and v.w_bounded and v.has_cover
            assert v.conclusion == (SMOOTH if j == n - 1 else NORMAL_CM)


def test_generic_separating_route_never_contradicts_odd_orthogonal_table(monkeypatch):
    monkeypatch.setattr(strata, "_bn_window", lambda u: None)
    for n in range(2, 6):
        cd = bn_datum(n)
        for j in range(n):
            s = separating_verdict(WOpen(cd, xj_element(n, j), frozenset(y_gamma(n, j))))
            assert s.status in (YES, UNKNOWN)


def test_unknown_separating_verdict_lists_flag_strata():
    cd = gln_datum(5, 2)
    gamma = ["[3,1,4,2,5]", "[1,3,4,2,5]", "[3,1,2,4,5]", "[1,3,2,4,5]"]
    u = make_w_open(cd, cd.element(gamma[0]), gamma)
    s = separating_verdict(u)
    assert s.status == UNKNOWN
    assert {str(v) for v in s.unresolved} == {"[1,2,4,3,5]", "[2,1,3,4,5]", "[2,1,4,3,5]"}
    assert classify(u).conclusion in (UNKNOWN, NOT_NORMAL, NORMAL_CM)


def test_not_normal_branch():
    cd = gln_datum(5, 2)
    v = classify(closure_open(cd, cd.element("[3,1,4,2,5]")))
    assert v.conclusion == NOT_NORMAL


@pytest.mark.parametrize("n", range(2, 8))
def test_length_one_gcd_law(n):
    for r in range(1, n):
        cd = gln_datum(n, r)
        (rep,) = length_one_analysis(cd)
        v = length_one_verdicts(cd)[r - 1]
        assert rep.smooth == (v.conclusion == SMOOTH) == (gcd(r, n - r) == 1)
        assert smooth_locus_open_stratum_test(cd, simple_reflection(cd.datum, r - 1)) == (not rep.smooth)


def _builtin_data():
    out = []
    for n in range(2, 7):
        for r in range(1, n):
            out.append(gln_datum(n, r))
            out.append(unitary_inert_datum(n, r))
    for n in (2, 3):
        for r1 in range(0, n + 1):
            for r2 in range(0, n + 1):
                if 0 < r1 < n or 0 < r2 < n:
                    out.append(weil_split_datum(n, (r1, r2)))
                    out.append(unitary_restricted_datum(n, (r1, r2)))
    for t in ("type=B\nrank={}\nsignature=1", "type=C\nrank={}\nsignature={}", "type=D\nrank={}\nsignature=1"):
        for n in (3, 4, 5):
            if t.startswith("type=D") and n < 4:
                continue
            out.append(cocharacter_from_spec(t.format(n, n)))
    return out


@pytest.mark.parametrize("cd", _builtin_data(), ids=lambda cd: cd.label + str(sorted(cd.I)))
def test_length_one_routes_agree(cd):
    reports = length_one_analysis(cd)
    verdicts = length_one_verdicts(cd)
    I_id = canonical_type(cd, identity(cd.datum)).I_w
    for rep in reports:
        assert rep.smooth == (verdicts[rep.alpha].conclusion == SMOOTH)
        assert rep.I_alpha <= rep.I_id == I_id
        if not I_id:
            assert rep.smooth
        if I_id and is_dense(cd.datum.cartan, I_id):
            assert not rep.smooth


def test_unitary_inert_length_one():
    for n in range(2, 8):
        for r in range(1, n):
            (rep,) = length_one_analysis(unitary_inert_datum(n, r))
            assert rep.smooth == (r == 1 and n == 2)


def test_small_odd_orthogonal_strata_have_open_smooth_locus():
    for n in range(2, 5):
        cd = bn_datum(n)
        for j in range(n):
            assert smooth_locus_open_stratum_test(cd, xj_element(n, 2 * n - 1 - j))
