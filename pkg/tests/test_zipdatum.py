from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from zipstrat.oddorth import bn_canonical_types, bn_lower_neighbors, xj_element
from zipstrat.rootdata import ParseError, builtin_frobenius
from zipstrat.weyl import (
    WeylElement,
    apply_frobenius,
    bruhat_leq,
    bruhat_leq_subword,
    bruhat_lower_neighbors,
    coset_min_reps,
    format_element,
    from_word,
    identity,
    inverse,
    is_min_left,
    longest_element,
    multiply,
)
from zipstrat.zipdatum import (
    BudgetExceeded,
    NotMinimalRep,
    NotSubsetOfI,
    bn_datum,
    cocharacter_from_spec,
    gln_datum,
    lower_neighbors,
    psi,
    strata_poset,
    stratum_codim,
    twisted_leq,
    twisted_lower_set,
    unitary_inert_datum,
    unitary_restricted_datum,
    weil_split_datum,
)

GL7 = gln_datum(7, 3)
W = "[4,1,2,5,3,6,7]"
W1 = "[1,2,4,5,6,3,7]"


def parabolic(d, I0):
    """W_{I0} by breadth-first search over the simple reflections in I0."""
    e = identity(d)
    seen = {e.perm: e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for i in I0:
                y = multiply(x, from_word(d, [i]))
                if y.perm not in seen:
                    seen[y.perm] = y
                    nxt.append(y)
        frontier = nxt
    return list(seen.values())


def twisted_leq_oracle(cd, I0, w1, w):
    """Direct reading of the definition, with the subword test for Bruhat."""
    for x in parabolic(cd.datum, I0):
        if bruhat_leq_subword(multiply(multiply(x, w1), inverse(psi(cd, x))), w):
            return True
    return False


def test_frame_of_odd_orthogonal_datum():
    for n in (2, 3, 4):
        z = bn_datum(n).frame.z
        assert format_element(z) == "[" + ",".join([str(2 * n + 1)] + [str(i) for i in range(2, n + 1)]) + "]"
        assert inverse(z) == z


def test_frame_trivial_case():
    cd = cocharacter_from_spec("type=B\nrank=3\nsignature=0")
    assert cd.frame.z.is_identity() and cd.frame.J == frozenset(range(3))


@pytest.mark.parametrize("n,r", [(4, 1), (5, 2), (7, 3)])
def test_frame_j_is_z_inverse_of_i(n, r):
    cd = gln_datum(n, r)
    d = cd.datum
    zinv = inverse(cd.frame.z)
    images = {zinv.perm[d.simple_index(a)] for a in cd.I}
    assert images == {d.simple_index(b) for b in cd.frame.J}


def test_counterexample_pair_orders():
    w, w1 = GL7.element(W), GL7.element(W1)
    assert twisted_leq(GL7, GL7.I, w1, w)
    assert not twisted_leq(GL7, (), w1, w)
    assert twisted_leq(GL7, GL7.I, w, w)
    assert stratum_codim(GL7, w) == 8


def test_codimension_examples():
    assert stratum_codim(GL7, GL7.longest()) == 0
    for n in (3, 4):
        for j in range(2 * n):
            assert stratum_codim(bn_datum(n), xj_element(n, j)) == j


def test_lower_neighbors_examples():
    assert lower_neighbors(GL7, GL7.I, identity(GL7.datum)) == []
    for n in (3, 4):
        cd = bn_datum(n)
        for j, I in bn_canonical_types(n).items():
            if j > n - 1:
                continue
            for r in range(j, 2 * n - 1 - j):
                got = {nb.element.perm for nb in lower_neighbors(cd, I, xj_element(n, r))}
                assert got == {v.perm for v in bn_lower_neighbors(n, j, r)}
                assert len(got) == j + 1


def test_odd_orthogonal_poset_is_a_chain():
    P = strata_poset(bn_datum(3))
    assert len(P) == 6
    for j in range(5):
        assert P.leq(xj_element(3, j + 1), xj_element(3, j))
        assert [nb.element for nb in P.covers[xj_element(3, j).perm]] == [xj_element(3, j + 1)]


def test_empty_flag_gives_bruhat_order():
    cd = gln_datum(4, 2)
    P = strata_poset(cd, ())
    assert len(P) == 24
    for a in P.elements:
        for b in P.elements:
            assert P.leq(a, b) == bruhat_leq(a, b)
    assert len(strata_poset(cd)) == 6


DATA = [gln_datum(4, 1), gln_datum(4, 2), unitary_inert_datum(4, 1), unitary_inert_datum(3, 1),
        weil_split_datum(3, (1, 2)), unitary_restricted_datum(3, (2, 1))]


@given(st.integers(0, len(DATA) - 1), st.data())
def test_twisted_order_matches_definition(k, data):
    cd = DATA[k]
    I0 = data.draw(st.sets(st.sampled_from(sorted(cd.I))))
    reps = sorted(coset_min_reps(cd.datum, I0), key=lambda v: v.perm)
    w = data.draw(st.sampled_from(reps))
    w1 = data.draw(st.sampled_from(reps))
    assert twisted_leq(cd, I0, w1, w) == twisted_leq_oracle(cd, I0, w1, w)
    assert (w1.perm in twisted_lower_set(cd, I0, w)) == twisted_leq_oracle(cd, I0, w1, w)


@given(st.integers(0, len(DATA) - 1), st.data())
def test_bruhat_neighbors_in_the_coset_are_twisted_neighbors(k, data):
    cd = DATA[k]
    I0 = data.draw(st.sets(st.sampled_from(sorted(cd.I))))
    reps = sorted(coset_min_reps(cd.datum, I0), key=lambda v: v.perm)
    w = data.draw(st.sampled_from(reps))
    twisted = {nb.element.perm for nb in lower_neighbors(cd, I0, w)}
    for v in bruhat_lower_neighbors(w).values():
        if is_min_left(v, I0):
            assert v.perm in twisted


@pytest.mark.parametrize("cd", DATA, ids=lambda cd: cd.label)
def test_poset_axioms(cd):
    for I0 in (cd.I, frozenset()):
        strata_poset(cd, I0)  # raises on any axiom violation


def test_relabelling_by_diagram_flip_commutes_with_poset():
    n, r = 5, 2
    a, b = gln_datum(n, r), gln_datum(n, n - r)
    tau = builtin_frobenius(a.datum, "flip")
    Pa, Pb = strata_poset(a), strata_poset(b)

    def move(v):
        return WeylElement(b.datum, apply_frobenius(tau, v).perm)

    assert {move(v).perm for v in Pa.elements} == {v.perm for v in Pb.elements}
    for u in Pa.elements:
        for v in Pa.elements:
            assert Pa.leq(u, v) == Pb.leq(move(u), move(v))


def test_dot_output_is_transitively_reduced():
    P = strata_poset(gln_datum(4, 2))
    edges = {(nb.element.perm, w.perm) for w in P.elements for nb in P.covers[w.perm]}
    for lo, hi in edges:
        assert WeylElement(P.elements[0].datum, lo).length + 1 == WeylElement(P.elements[0].datum, hi).length
    dot = P.to_dot()
    assert dot.count("->") == len(edges)
    data = json.loads(json.dumps(P.to_json()))
    assert len(data["nodes"]) == 6 and len(data["covers"]) == len(edges)


def test_errors():
    with pytest.raises(NotMinimalRep):
        twisted_leq(GL7, GL7.I, GL7.element("[2,1,3,4,5,6,7]"), GL7.element(W))
    with pytest.raises(NotSubsetOfI):
        twisted_leq(GL7, {2}, identity(GL7.datum), identity(GL7.datum))


def test_budget_override(monkeypatch):
    monkeypatch.setenv("ZIPSTRAT_BUDGET", "10")
    cd = gln_datum(5, 2)
    with pytest.raises(BudgetExceeded) as exc:
        strata_poset(cd)
    assert exc.value.required == 12


def test_spec_parsing():
    cd = cocharacter_from_spec("type=A\nrank=6\nsignature=3\n")
    assert cd.I == GL7.I and len(cd.coset()) == 35
    cd = cocharacter_from_spec("type=A\nrank=2\nd=2\nsignature=1,2")
    assert cd.sigma.perm == (2, 3, 0, 1)
    cd = cocharacter_from_spec("type=A\nrank=3\nform=unitary\nsignature=1")
    assert cd.sigma.perm == (2, 1, 0)
    cd = cocharacter_from_spec("type=E6\nform=unitary\nsignature=1")
    assert cd.I == frozenset(range(1, 6))
    with pytest.raises(ParseError) as exc:
        cocharacter_from_spec("type=A\nrank=3\nsignature=9\n")
    assert exc.value.line == 3
    with pytest.raises(ParseError) as exc:
        cocharacter_from_spec("type=B\nrank=3\nform=unitary\n")
    assert exc.value.line == 3


def test_longest_element_is_open_stratum():
    cd = gln_datum(5, 2)
    top = cd.longest()
    assert top == multiply(longest_element(cd.datum, cd.I), longest_element(cd.datum))
    assert twisted_lower_set(cd, cd.I, top) == frozenset(v.perm for v in cd.coset())
