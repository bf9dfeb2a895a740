from __future__ import annotations

from itertools import combinations

import pytest

from zipstrat.canonical import (
    Known,
    NotInI,
    Unknown,
    canonical_type,
    flag_datum,
    is_bruhat_stratum,
    longest_element_canonical_type,
    phi_w,
    project_stratum,
)
from zipstrat.closedform import minuscule_datum
from zipstrat.oddorth import bn_canonical_types, w_ir, xj_element
from zipstrat.strata import length_one_analysis
from zipstrat.weyl import identity, inverse, is_min_left, multiply, simple_reflection
from zipstrat.zipdatum import (
    bn_datum,
    cocharacter_from_spec,
    gln_datum,
    lower_neighbors,
    unitary_inert_datum,
    unitary_restricted_datum,
    weil_split_datum,
)
from zipstrat.rootdata import root_permutation


def phi_oracle(cd, w, a):
    """(w z^{-1}) sigma(alpha) recomputed from the root permutations."""
    d = cd.datum
    s = root_permutation(d, cd.sigma)
    v = multiply(w, inverse(cd.frame.z))
    k = v.perm[s[d.simple_index(a)]]
    for b in cd.I:
        if d.simple_index(b) == k:
            return b
    return None


def stable_core_oracle(cd, w):
    """Largest K inside I with phi(K) = K, by search over all subsets."""
    I = sorted(cd.I)
    for size in range(len(I), -1, -1):
        for K in combinations(I, size):
            if {phi_oracle(cd, w, a) for a in K} == set(K):
                return frozenset(K)
    return frozenset()


SMALL = [gln_datum(4, 1), gln_datum(5, 2), gln_datum(6, 2), unitary_inert_datum(4, 1), unitary_inert_datum(5, 2),
         weil_split_datum(3, (1, 2)), unitary_restricted_datum(3, (1, 1)), bn_datum(3),
         cocharacter_from_spec("type=C\nrank=3\nsignature=3"), cocharacter_from_spec("type=D\nrank=4\nsignature=1"),
         cocharacter_from_spec("type=D\nrank=4\nsignature=1\nform=unitary")]


@pytest.mark.parametrize("cd", SMALL, ids=lambda cd: cd.label + str(sorted(cd.I)))
def test_canonical_type_is_maximal_stable_subset(cd):
    for w in cd.coset():
        assert canonical_type(cd, w).I_w == stable_core_oracle(cd, w)


@pytest.mark.parametrize("cd", SMALL, ids=lambda cd: cd.label + str(sorted(cd.I)))
def test_bruhat_stratum_criteria_agree(cd):
    for w in cd.coset():
        assert is_bruhat_stratum(cd, w) == (canonical_type(cd, w).I_w == cd.I)


@pytest.mark.parametrize("cd", SMALL, ids=lambda cd: cd.label + str(sorted(cd.I)))
def test_longest_element_closed_form(cd):
    assert longest_element_canonical_type(cd) == canonical_type(cd, cd.longest()).I_w


def test_unitary_longest_element_type_is_smaller():
    cd = unitary_inert_datum(3, 2)
    assert longest_element_canonical_type(cd) < cd.I


def test_phi_translation_on_general_linear_group():
    n, r = 7, 3
    s = n - r
    cd = gln_datum(n, r)
    e = identity(cd.datum)
    for l in range(1, n):
        if l == r:
            with pytest.raises(NotInI):
                phi_w(cd, e, l - 1)
            continue
        target = (l + s) % n
        got = phi_w(cd, e, l - 1)
        assert got == (None if target in (0, r) else target - 1)
    assert phi_w(cd, e, None) is None


def test_phi_kills_two_roots_at_x_j():
    for n in (4, 5):
        cd = bn_datum(n)
        for j in range(2, n):
            x = xj_element(n, j)
            assert phi_w(cd, x, j - 1) is None and phi_w(cd, x, j) is None


@pytest.mark.parametrize("n", range(2, 8))
def test_identity_type_of_general_linear_group(n):
    from math import gcd

    for r in range(1, n):
        delta = gcd(r, n - r)
        cd = gln_datum(n, r)
        assert canonical_type(cd, identity(cd.datum)).I_w == frozenset(i - 1 for i in range(1, n) if i % delta)


def test_odd_orthogonal_types():
    for n in range(2, 6):
        cd = bn_datum(n)
        table = bn_canonical_types(n)
        for j in range(2 * n):
            assert canonical_type(cd, xj_element(n, j)).I_w == table[j]
        assert table[0] == cd.I and table[n - 1] == table[n] == frozenset()
        assert not any(is_bruhat_stratum(cd, xj_element(n, j)) for j in range(1, n))


def test_unitary_identity_keeps_full_type():
    for n in range(3, 7):
        for r in range(1, n):
            cd = unitary_inert_datum(n, r)
            assert canonical_type(cd, identity(cd.datum)).I_w == cd.I


def test_identity_is_bruhat_stratum_only_for_balanced_signature():
    # J = z^{-1} I is the mirror image of I, so ^{id}J = I forces r = s
    for n in range(2, 9):
        for r in range(1, n):
            cd = gln_datum(n, r)
            assert is_bruhat_stratum(cd, identity(cd.datum)) == (2 * r == n)


@pytest.mark.parametrize("cd", SMALL, ids=lambda cd: cd.label + str(sorted(cd.I)))
def test_length_one_types_shrink(cd):
    for rep in length_one_analysis(cd):
        assert rep.I_alpha <= rep.I_id


def test_flag_datum_edge_cases():
    cd = gln_datum(5, 2)
    assert flag_datum(cd, cd.I).J0 == cd.frame.J
    assert flag_datum(cd, ()).J0 == frozenset()
    for n in (3, 4):
        b = bn_datum(n)
        for j in range(n):
            I0 = bn_canonical_types(n)[j]
            assert len(flag_datum(b, I0).J0) == len(I0)


def test_projection():
    cd = gln_datum(4, 2)
    w = cd.longest()
    assert project_stratum(cd, (), w) == Known(w, project_stratum(cd, (), w).reason)
    n = 3
    b = bn_datum(n)
    for r in range(2 * n - 1):
        top = r if r <= n - 1 else 2 * n - 1 - r
        for i in range(1, top + 1):
            v = w_ir(n, r, i)
            img = project_stratum(b, (), v)
            assert isinstance(img, Known) and img.element == xj_element(n, 2 * n - i)
    a3 = gln_datum(4, 2)
    v = simple_reflection(a3.datum, 0)
    assert not is_min_left(v, a3.I) and v.length == 1
    assert isinstance(project_stratum(a3, (), v), Unknown)


def test_same_neighbours_when_flag_neighbours_lie_in_the_base():
    for cd in SMALL[:7]:
        for w in cd.coset():
            flag = lower_neighbors(cd, (), w)
            if all(is_min_left(nb.element, cd.I) for nb in flag):
                base = lower_neighbors(cd, cd.I, w)
                assert {nb.element.perm for nb in base} == {nb.element.perm for nb in flag}


def test_minuscule_identity_types_are_inside_i():
    cd = minuscule_datum("D", 5, [1])
    assert canonical_type(cd, identity(cd.datum)).I_w <= cd.I
