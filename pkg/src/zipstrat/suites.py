"""Invariant suites run by ``zipstrat verify``.

Each suite yields :class:`Check` records.  A failing check is a reported
violation, never an exception, so a suite always runs to the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterator

from .rootdata import RootDataError, build_root_datum
from .weyl import (
    bruhat_leq,
    bruhat_leq_subword,
    bruhat_lower_neighbors,
    enumerate_group,
    window,
)


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    ok: bool
    detail: str = ""


def _safe(suite: str, name: str, fn: Callable[[], tuple[bool, str] | bool]) -> Check:
    try:
        res = fn()
    except RootDataError as exc:
        return Check(suite, name, False, f"{type(exc).__name__}: {exc}")
    if isinstance(res, tuple):
        return Check(suite, name, bool(res[0]), res[1])
    return Check(suite, name, bool(res))


# ---------------------------------------------------------------------------


def _small_data():
    from .zipdatum import gln_datum, unitary_inert_datum, unitary_restricted_datum, weil_split_datum

    out = []
    for n in range(2, 6):
        for r in range(1, n):
            out.append((f"GL{n} ({r},{n - r})", gln_datum(n, r)))
    for n in range(2, 5):
        for r in range(1, n):
            out.append((f"U{n} ({r},{n - r})", unitary_inert_datum(n, r)))
    for rs in [(1, 1), (1, 2), (2, 1)]:
        out.append((f"Res GL3 {rs}", weil_split_datum(3, rs)))
        out.append((f"Res U3 {rs}", unitary_restricted_datum(3, rs)))
    return out


def suite_orders() -> Iterator[Check]:
    """Partial order axioms and the chain property for small data, all I0 = I and I0 = empty."""
    from .zipdatum import strata_poset

    for name, cd in _small_data():
        yield _safe("orders", f"{name} I0=I", lambda cd=cd: len(strata_poset(cd)) > 0)
        yield _safe("orders", f"{name} I0=empty", lambda cd=cd: len(strata_poset(cd, ())) > 0)


def _perm_rank_leq(u: list[int], w: list[int]) -> bool:
    """Tableau criterion for permutations: u <= w iff rank counts of u dominate those of w."""
    m = len(u)
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            ru = sum(1 for k in range(i) if u[k] <= j)
            rw = sum(1 for k in range(i) if w[k] <= j)
            if ru < rw:
                return False
    return True


def suite_bruhat() -> Iterator[Check]:
    """Lifting algorithm against the subword oracle and the rank criteria."""
    from .oddorth import SignedPermutation, bruhat_leq_rank

    for kind, rank in (("B", 3), ("A", 3)):
        d = build_root_datum(kind, rank)
        W = enumerate_group(d)
        bad = 0
        for u in W:
            for w in W:
                a = bruhat_leq(u, w)
                b = bruhat_leq_subword(u, w)
                if kind == "B":
                    c = bruhat_leq_rank(SignedPermutation.from_weyl(u), SignedPermutation.from_weyl(w))
                else:
                    c = _perm_rank_leq(window(u)[0], window(w)[0])
                bad += not (a == b == c)
        yield Check("bruhat", f"W({kind}{rank}) {len(W)}^2 pairs", bad == 0, f"{bad} disagreements")
    d = build_root_datum("B", 4)
    bad = 0
    W = enumerate_group(d)
    from .oddorth import neighbors_from_pairs

    for w in W:
        generic = {v.perm for v in bruhat_lower_neighbors(w).values()}
        pairs = [v.perm for v in neighbors_from_pairs(w).values()]
        bad += len(pairs) != len(set(pairs)) or set(pairs) != generic
    yield Check("bruhat", f"W(B4) admissible pairs vs lower neighbours ({len(W)} elements)", bad == 0, f"{bad} mismatches")


def suite_oddorth(max_n: int = 6) -> Iterator[Check]:
    from .canonical import canonical_type
    from .oddorth import bn_canonical_types, bn_lower_neighbors, bn_smooth_locus, xj_element
    from .strata import NORMAL_CM, SMOOTH, YES, WOpen, classify, smooth_locus_open_stratum_test
    from .zipdatum import bn_datum, lower_neighbors

    for n in range(2, max_n + 1):
        cd = bn_datum(n)
        types = bn_canonical_types(n)

        def lengths(n=n):
            got = [xj_element(n, j).length for j in range(2 * n)]
            return got == [2 * n - 1 - j for j in range(2 * n)], f"lengths {got}"

        def ctypes(n=n, cd=cd, types=types):
            got = {j: canonical_type(cd, xj_element(n, j)).I_w for j in range(2 * n)}
            return got == types, ""

        def neighbours(n=n, cd=cd, types=types):
            for j in range(n):
                for r in range(j, 2 * n - 1 - j):
                    x = xj_element(n, r)
                    eng = {nb.element.perm for nb in lower_neighbors(cd, types[j], x)}
                    formula = {v.perm for v in bn_lower_neighbors(n, j, r)}
                    if eng != formula or len(eng) != j + 1:
                        return False, f"j={j} r={r}: engine {len(eng)} vs formula {len(formula)}"
            return True, ""

        def yj(n=n, cd=cd):
            from .oddorth import y_gamma

            for j in range(n):
                v = classify(WOpen(cd, xj_element(n, j), frozenset(y_gamma(n, j))))
                want = SMOOTH if j == n - 1 else NORMAL_CM
                if v.conclusion != want or v.separating != YES or not v.w_bounded:
                    return False, f"Y_{j}: {v.conclusion}/{v.separating}"
            return True, ""

        def loci(n=n, cd=cd):
            for j in range(2 * n):
                x = xj_element(n, j)
                if bn_smooth_locus(n, j) == frozenset([j]) and not smooth_locus_open_stratum_test(cd, x):
                    return False, f"j={j}: open stratum test disagrees"
            return True, ""

        yield _safe("oddorth", f"B{n} lengths of x_j", lengths)
        yield _safe("oddorth", f"B{n} canonical types", ctypes)
        yield _safe("oddorth", f"B{n} lower neighbours", neighbours)
        yield _safe("oddorth", f"B{n} Y_j verdicts", yj)
        yield _safe("oddorth", f"B{n} smooth loci of small strata", loci)


def suite_hasse(max_n: int = 6, primes=(2, 3, 5)) -> Iterator[Check]:
    from .oddorth import cycle_class, hasse_eta_formula, hasse_walls

    for n in range(2, max_n + 1):
        for j in range(n):
            for p in primes:
                def run(n=n, j=j, p=p):
                    rep = hasse_walls(n, j, p)
                    h = rep.character
                    eta_ok = tuple(h.eta) == hasse_eta_formula(n, j, p, h.m)
                    ok = (
                        h.m == rep.expected_m
                        and rep.residual_zero
                        and eta_ok
                        and rep.beta_multiplicity == 1
                        and all(v == 0 for v in rep.i_walls.values())
                    )
                    return ok, f"m={h.m} beta multiplicity={rep.beta_multiplicity}"

                yield _safe("hasse", f"n={n} j={j} p={p}", run)
    for j in range(7):
        for p in (2, 3, 5, 7):
            want = 1
            for i in range(1, j + 1):
                want *= p**i - 1
            yield Check("hasse", f"cycle class j={j} p={p}", cycle_class(j, p) == want)


def suite_closedform(max_n: int = 7) -> Iterator[Check]:
    from .canonical import canonical_type
    from .closedform import (
        gln_split_length_one,
        length_one_orbit,
        restricted_split_length_one,
        unitary_inert_length_one,
        unitary_restricted_condition5,
    )
    from .strata import SMOOTH, length_one_verdicts
    from .weyl import identity
    from .zipdatum import gln_datum, unitary_inert_datum, unitary_restricted_datum, weil_split_datum

    for n in range(2, max_n + 1):
        for r in range(1, n):
            def gl(n=n, r=r):
                cd = gln_datum(n, r)
                eng = length_one_verdicts(cd)[r - 1].conclusion == SMOOTH
                cf = gln_split_length_one(n, r, n - r)
                I_id = canonical_type(cd, identity(cd.datum)).I_w
                return eng == cf.smooth == (gcd(r, n - r) == 1) and I_id == cf.I_id, f"engine {eng}"

            yield _safe("closedform", f"GL{n} ({r},{n - r})", gl)

            def ui(n=n, r=r):
                cd = unitary_inert_datum(n, r)
                eng = length_one_verdicts(cd)[r - 1]
                cf = unitary_inert_length_one(n, r)
                from .canonical import canonical_type as ct
                from .weyl import simple_reflection

                I_w = ct(cd, simple_reflection(cd.datum, r - 1)).I_w
                return (eng.conclusion == SMOOTH) == cf.smooth and I_w == cf.I_w, ""

            yield _safe("closedform", f"U{n} ({r},{n - r})", ui)
    for n in range(2, 6):
        for r1 in range(1, n):
            for r2 in range(1, n):
                rs = (r1, r2)
                for j in (1, 2):
                    def split(n=n, rs=rs, j=j):
                        cd = weil_split_datum(n, rs)
                        a = (j - 1) * (n - 1) + rs[j - 1] - 1
                        eng = length_one_verdicts(cd)[a].conclusion == SMOOTH
                        return eng == restricted_split_length_one(n, rs, j) == length_one_orbit(n, rs, j, False), ""

                    def unit(n=n, rs=rs, j=j):
                        cd = unitary_restricted_datum(n, rs)
                        a = (j - 1) * (n - 1) + rs[j - 1] - 1
                        eng = length_one_verdicts(cd)[a].conclusion == SMOOTH
                        return eng == unitary_restricted_condition5(n, rs, j) == length_one_orbit(n, rs, j, True), ""

                    yield _safe("closedform", f"Res GL{n} {rs} j={j}", split)
                    yield _safe("closedform", f"Res U{n} {rs} j={j}", unit)


def suite_dieudonne(max_n: int = 12) -> Iterator[Check]:
    from .dieudonne import extension_holds, trajectories, verify_extension

    for n in range(2, max_n + 1):
        for r in range(1, n):
            s = n - r
            if gcd(r, s) == 1:
                def run(r=r, s=s):
                    tr = trajectories(r, s)
                    return len(tr.word) == r + s - 1 and tr.identical and verify_extension(r, s), ""

                yield _safe("dieudonne", f"({r},{s})", run)
            else:
                yield Check("dieudonne", f"({r},{s}) not coprime", not extension_holds(r, s))


SUITES: dict[str, Callable[[], Iterator[Check]]] = {
    "orders": suite_orders,
    "bruhat": suite_bruhat,
    "oddorth": suite_oddorth,
    "hasse": suite_hasse,
    "closedform": suite_closedform,
    "dieudonne": suite_dieudonne,
}


def run_suite(name: str) -> list[Check]:
    if name == "all":
        return [c for key in SUITES for c in SUITES[key]()]
    if name not in SUITES:
        raise RootDataError(f"unknown suite {name!r}; choose from {', '.join(['all', *SUITES])}")
    return list(SUITES[name]())
