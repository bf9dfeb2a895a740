from __future__ import annotations

from math import gcd

import pytest
from hypothesis import given, strategies as st

from zipstrat.canonical import canonical_type
from zipstrat.closedform import (
    BadSignature,
    NotMinusculePattern,
    gln_split_length_one,
    length_one_orbit,
    minuscule_bcde_onedim,
    minuscule_datum,
    orbit_types,
    restricted_split_alpha_type,
    restricted_split_d2,
    restricted_split_id_type,
    restricted_split_length_one,
    split_delta,
    unitary_inert_length_one,
    unitary_restricted_condition5,
    unitary_restricted_d2,
    unitary_restricted_length_one,
    witness_labels,
)
from zipstrat.strata import SMOOTH, length_one_analysis, length_one_verdicts, smooth_locus_open_stratum_test
from zipstrat.weyl import identity, simple_reflection
from zipstrat.zipdatum import gln_datum, unitary_inert_datum, unitary_restricted_datum, weil_split_datum


def alpha_index(n, rs, j):
    return (j - 1) * (n - 1) + rs[j - 1] - 1


def engine(cd, n, rs, j):
    return length_one_verdicts(cd)[alpha_index(n, rs, j)].conclusion == SMOOTH


def test_general_linear_examples():
    assert gln_split_length_one(7, 3, 4).smooth
    six = gln_split_length_one(6, 2, 4)
    assert not six.smooth and six.I_id == frozenset({0, 2, 4})
    assert gln_split_length_one(2, 1, 1).smooth
    with pytest.raises(BadSignature):
        gln_split_length_one(5, 2, 2)


@pytest.mark.parametrize("n", range(2, 8))
def test_general_linear_closed_form_matches_engine(n):
    for r in range(1, n):
        cf = gln_split_length_one(n, r, n - r)
        cd = gln_datum(n, r)
        (rep,) = length_one_analysis(cd)
        assert cf.smooth == rep.smooth == (gcd(r, n - r) == 1)
        assert cf.I_id == rep.I_id and cf.I_alpha == rep.I_alpha


def test_split_restriction_examples():
    # delta = 1: everything smooth
    for rs in [(1, 2), (2, 3), (1, 1, 1)]:
        n = 4
        if split_delta(n, rs) == 1:
            assert all(restricted_split_length_one(n, rs, j) for j in range(1, len(rs) + 1))
    n = 6
    assert restricted_split_length_one(n, (2, n - 1), 2)
    # delta = 2 with both signatures odd: both strata smooth
    assert split_delta(4, (1, 1)) == 2
    assert restricted_split_d2((1, 1), 4)
    assert restricted_split_d2((3, 3), 4)
    with pytest.raises(BadSignature):
        restricted_split_length_one(4, (0, 2), 1)


SPLIT_CASES = [(n, (r1, r2)) for n in range(2, 6) for r1 in range(0, n + 1) for r2 in range(0, n + 1)
               if 0 < r1 < n or 0 < r2 < n]


@pytest.mark.parametrize("n,rs", SPLIT_CASES)
def test_split_restriction_closed_forms_match_engine(n, rs):
    cd = weil_split_datum(n, rs)
    e = identity(cd.datum)
    assert canonical_type(cd, e).I_w == restricted_split_id_type(n, rs) == orbit_types(n, rs, False)
    smooth_all = True
    for j in (1, 2):
        if not 0 < rs[j - 1] < n:
            continue
        s = simple_reflection(cd.datum, alpha_index(n, rs, j))
        assert canonical_type(cd, s).I_w == restricted_split_alpha_type(n, rs, j) == orbit_types(n, rs, False, j)
        got = engine(cd, n, rs, j)
        assert got == restricted_split_length_one(n, rs, j) == length_one_orbit(n, rs, j, False)
        smooth_all &= got
    if 0 < rs[0] < n and 0 < rs[1] < n:
        assert smooth_all == restricted_split_d2(rs, n)


@pytest.mark.parametrize("rs", [(1, 1, 1), (1, 2, 1), (2, 1, 2), (1, 2, 3), (3, 3, 1), (2, 2, 2)])
def test_three_factor_split_restriction(rs):
    n = 4
    cd = weil_split_datum(n, rs)
    for j in range(1, 4):
        assert engine(cd, n, rs, j) == restricted_split_length_one(n, rs, j) == length_one_orbit(n, rs, j, False)


def test_unitary_inert_examples():
    assert unitary_inert_length_one(2, 1).smooth
    five = unitary_inert_length_one(5, 2)
    assert not five.smooth and five.I_w == frozenset()
    assert not unitary_inert_length_one(3, 1).smooth


@pytest.mark.parametrize("n", range(2, 8))
def test_unitary_inert_matches_engine(n):
    for r in range(1, n):
        cd = unitary_inert_datum(n, r)
        cf = unitary_inert_length_one(n, r)
        s = simple_reflection(cd.datum, r - 1)
        assert canonical_type(cd, s).I_w == cf.I_w
        assert canonical_type(cd, identity(cd.datum)).I_w == cf.I_id
        assert (length_one_verdicts(cd)[r - 1].conclusion == SMOOTH) == cf.smooth


UNITARY_CASES = [(n, (r1, r2)) for n in range(2, 7) for r1 in range(1, n) for r2 in range(1, n)]


@pytest.mark.parametrize("n,rs", UNITARY_CASES)
def test_unitary_restriction_matches_engine(n, rs):
    cd = unitary_restricted_datum(n, rs)
    assert canonical_type(cd, identity(cd.datum)).I_w == orbit_types(n, rs, True)
    for j in (1, 2):
        got = engine(cd, n, rs, j)
        assert got == unitary_restricted_length_one(2, n, rs, j) == unitary_restricted_condition5(n, rs, j)


def test_short_two_factor_lists_miss_cases():
    # the general membership test also admits (1,1) for X_1 and (n-1,1) for X_2
    n = 5
    assert unitary_restricted_length_one(2, n, (1, 1), 1) and not unitary_restricted_d2(n, (1, 1), 1)
    assert unitary_restricted_length_one(2, n, (n - 1, 1), 2) and not unitary_restricted_d2(n, (n - 1, 1), 2)
    for rs in ((2, 1), (n - 2, n - 1)):
        assert unitary_restricted_d2(n, rs, 1) and unitary_restricted_length_one(2, n, rs, 1)
    for rs in ((n - 2, 1), (2, n - 1)):
        assert unitary_restricted_d2(n, rs, 2) and unitary_restricted_length_one(2, n, rs, 2)


@pytest.mark.parametrize("n", [5, 6])
def test_some_length_one_stratum_is_singular_for_two_unitary_factors(n):
    for r1 in range(1, n):
        for r2 in range(1, n):
            assert not all(unitary_restricted_length_one(2, n, (r1, r2), j) for j in (1, 2))


@given(st.integers(2, 6), st.lists(st.integers(1, 5), min_size=3, max_size=3), st.integers(1, 3))
def test_orbit_model_matches_engine_for_three_unitary_factors(n, rs, j):
    rs = tuple(min(r, n - 1) for r in rs)
    cd = unitary_restricted_datum(n, rs)
    assert engine(cd, n, rs, j) == length_one_orbit(n, rs, j, True)


def test_condition5_breaks_down_for_three_factors():
    n, rs = 4, (1, 2, 1)
    cd = unitary_restricted_datum(n, rs)
    diffs = [j for j in (1, 2, 3) if engine(cd, n, rs, j) != unitary_restricted_condition5(n, rs, j)]
    assert diffs


MINUSCULE = [("B", 3, [1]), ("B", 4, [1]), ("C", 3, [3]), ("C", 4, [4]), ("D", 4, [1]), ("D", 5, [5]),
             ("D", 4, [4]), ("B", 2, [1, 0]), ("C", 2, [2, 2]), ("D", 4, [1, 3]), ("E6", 6, [1]), ("E6", 6, [6])]


@pytest.mark.parametrize("kind,n,sig", MINUSCULE)
def test_minuscule_witnesses(kind, n, sig):
    wit = minuscule_bcde_onedim(kind, n, sig)
    assert wit.verdict == "open-stratum-only"
    cd = wit.cd
    assert wit.gamma <= canonical_type(cd, identity(cd.datum)).I_w
    for a in range(cd.datum.rank):
        if a not in cd.I:
            assert smooth_locus_open_stratum_test(cd, simple_reflection(cd.datum, a))


def test_minuscule_witness_labels():
    assert witness_labels("B", 4) == {2, 3, 4}
    assert witness_labels("C", 4) == {1, 2, 3}
    assert witness_labels("D", 5) == {2, 3}
    assert witness_labels("E7", 7) == set(range(1, 7))


def test_minuscule_errors():
    with pytest.raises(NotMinusculePattern):
        minuscule_datum("B", 3, [2])
    with pytest.raises(NotMinusculePattern):
        minuscule_datum("D", 3, [1])
    with pytest.raises(NotMinusculePattern):
        minuscule_datum("B", 3, [0])
    with pytest.raises(NotMinusculePattern):
        minuscule_datum("A", 3, [1])
