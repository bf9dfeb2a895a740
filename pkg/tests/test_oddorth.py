from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from zipstrat.oddorth import (
    RangeViolation,
    SignedPermutation,
    admissible_pairs,
    beta_wall,
    bn,
    bn_canonical_types,
    bn_lower_neighbors,
    bn_smooth_locus,
    bruhat_leq_rank,
    chevalley_divisor,
    cycle_class,
    hasse_character,
    hasse_eta_formula,
    hasse_matrix,
    hasse_walls,
    index_of_x,
    length_mn,
    neighbors_from_pairs,
    projection_table,
    w_ir,
    xj,
    xj_element,
    xtilde,
    y_gamma,
)
from zipstrat.rootdata import IndexOutOfRange
from zipstrat.weyl import bruhat_leq, bruhat_lower_neighbors, enumerate_group, identity


def test_extreme_elements():
    assert xj_element(3, 5) == identity(bn(3))
    x0 = xj(3, 0)
    assert x0.images == (7, 2, 3, 4, 5, 6, 1)
    for n in range(2, 6):
        assert [xj_element(n, j).length for j in range(2 * n)] == list(range(2 * n - 1, -1, -1))
        assert all(index_of_x(xj_element(n, j)) == j for j in range(2 * n))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_length_from_inversions(n):
    for w in enumerate_group(bn(n)) if n <= 3 else [xj_element(n, j) for j in range(2 * n)]:
        assert length_mn(SignedPermutation.from_weyl(w)) == w.length


def test_pair_classes_at_middle_element():
    for n in range(2, 7):
        ps = admissible_pairs(xj(n, n - 1))
        assert len([p for p in ps if p.cls == 2]) == n - 1
        assert [(p.i, p.j) for p in ps if p.cls == 3] == [(n, n + 2)]


@pytest.mark.parametrize("n", [3, 4])
def test_admissible_pairs_match_lower_neighbours(n):
    for w in enumerate_group(bn(n)):
        generic = {v.perm for v in bruhat_lower_neighbors(w).values()}
        assert {v.perm for v in neighbors_from_pairs(w).values()} == generic


def test_rank_tables_on_b2():
    W = enumerate_group(bn(2))
    sp = {w.perm: SignedPermutation.from_weyl(w) for w in W}
    for u in W:
        for w in W:
            assert bruhat_leq(u, w) == bruhat_leq_rank(sp[u.perm], sp[w.perm])


def test_canonical_types_and_neighbours():
    t = bn_canonical_types(3)
    assert t[0] == t[5] == frozenset({1, 2}) and t[2] == t[3] == frozenset()
    nb = bn_lower_neighbors(4, 2, 3)
    assert len(nb) == 3 and nb[0] == xj_element(4, 4)
    assert all(v.length == xj_element(4, 3).length - 1 for v in nb)
    table = projection_table(bn(3))
    for (r, i) in [(1, 1), (2, 2), (3, 1)]:
        assert table[w_ir(3, r, i).perm][0] == xj_element(3, 6 - i)


def test_smooth_loci_and_y():
    assert bn_smooth_locus(3, 1) == frozenset({1, 2, 3, 4})
    assert bn_smooth_locus(3, 4) == frozenset({4})
    assert [index_of_x(w) for w in y_gamma(4, 1)] == list(range(1, 7))


def test_range_errors():
    with pytest.raises(RangeViolation):
        bn_lower_neighbors(3, 2, 1)
    with pytest.raises(RangeViolation):
        w_ir(3, 1, 2)
    with pytest.raises(RangeViolation):
        y_gamma(3, 3)
    with pytest.raises(IndexOutOfRange):
        xj_element(3, 6)
    with pytest.raises(IndexOutOfRange):
        hasse_character(3, 3, 2)


def test_hasse_examples():
    assert hasse_character(3, 0, 5).m == 4
    h = hasse_character(3, 1, 2)
    assert h.m == 3 and h.eta == (1, -2, 0)
    assert beta_wall(4, 1) == (0, 1, -1, 0) and beta_wall(4, 3) == (0, 0, 0, 1)


def _sympy_oracle(n, j, p):
    """Least m with an integral solution, via sympy's exact solver."""
    A = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in hasse_matrix(n, j, p)])
    unit = A.LUsolve(sympy.Matrix([-1] + [0] * (n - 1)))
    m = sympy.ilcm(*[x.q for x in unit])
    return int(m), tuple(int(x * m) for x in unit)


@given(st.integers(2, 6), st.integers(0, 5), st.sampled_from([2, 3, 5, 7]))
def test_hasse_character_against_sympy_oracle(n, j, p):
    j = min(j, n - 1)
    h = hasse_character(n, j, p)
    assert (h.m, h.eta) == _sympy_oracle(n, j, p)
    assert h.m == p ** (j + 1) - 1
    assert tuple(h.eta) == hasse_eta_formula(n, j, p, h.m)
    assert all(x == 0 for x in h.residual)


@pytest.mark.parametrize("n", range(2, 7))
def test_walls_below_the_middle(n):
    for j in range(n - 1):
        for p in (2, 3, 5):
            rep = hasse_walls(n, j, p)
            assert rep.beta_multiplicity == 1
            assert all(v == 0 for v in rep.i_walls.values())


@pytest.mark.parametrize("n", range(2, 7))
def test_middle_wall_has_multiplicity_two(n):
    # beta = e_n is short; its coroot 2e_n doubles the pairing
    for p in (2, 3, 5):
        rep = hasse_walls(n, n - 1, p)
        assert rep.beta_multiplicity == 2
        x = xtilde(n, n - 1)
        k = x.datum.ambient_index(rep.beta)
        assert bruhat_lower_neighbors(x)[k] == xj_element(n, n)


def test_chevalley_zero_weight():
    x = xtilde(3, 1)
    assert all(v == 0 for _, v in chevalley_divisor((0, 0, 0), x))
    assert len(chevalley_divisor((1, 0, 0), x)) == len(bruhat_lower_neighbors(x))


def test_cycle_classes():
    assert cycle_class(0, 5) == 1
    assert cycle_class(1, 7) == 6
    assert cycle_class(3, 2) == 21
    with pytest.raises(IndexOutOfRange):
        cycle_class(-1, 2)


def test_hasse_eta_formula_shape():
    assert hasse_eta_formula(4, 2, 2, 7) == (Fraction(1), Fraction(-4), Fraction(-2), Fraction(0))
