"""Canonical parabolic types, Bruhat strata and flag zip data.

``phi_w`` sends a simple root alpha to (w z^{-1}) sigma(alpha).  Restricted to
``I`` (anything leaving ``I`` goes to 0) its eventual image is the type
``I_w`` of the canonical parabolic of ``w``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .rootdata import RootDataError
from .weyl import (
    WeylElement,
    as_simple_subset,
    format_element,
    inverse,
    is_min_left,
    longest_element,
    multiply,
    simple_root_set,
)
from .zipdatum import CocharacterDatum, NotMinimalRep, NotSubsetOfI, _check_rep, _check_subset


class NotInI(RootDataError):
    pass


def _wzinv(cd: CocharacterDatum, w: WeylElement) -> WeylElement:
    return multiply(w, inverse(cd.frame.z))


def phi_w(cd: CocharacterDatum, w: WeylElement, alpha: int | None) -> int | None:
    """phi_{w,I}(alpha) for alpha in I; ``None`` plays the role of 0."""
    if alpha is None:
        return None
    if alpha not in cd.I:
        raise NotInI(f"alpha_{alpha + 1} is not in I")
    d = cd.datum
    k = _wzinv(cd, w).perm[d.simple_index(cd.sigma(alpha))]
    back = as_simple_subset(d, [k])
    if back is None:
        return None
    (beta,) = back
    return beta if beta in cd.I else None


def phi_table(cd: CocharacterDatum, w: WeylElement) -> dict[int, int | None]:
    return {a: phi_w(cd, w, a) for a in sorted(cd.I)}


@dataclass(frozen=True)
class CanonicalType:
    w: WeylElement
    I_w: frozenset[int]
    nilpotent_witness: dict  # alpha -> least m with phi^m(alpha) = 0

    def to_json(self) -> dict:
        return {
            "w": format_element(self.w),
            "I_w": sorted(a + 1 for a in self.I_w),
            "nilpotent": {str(a + 1): m for a, m in sorted(self.nilpotent_witness.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def canonical_type(cd: CocharacterDatum, w: WeylElement) -> CanonicalType:
    """I_w: the elements of I that never reach 0 under phi_{w,I}."""
    _check_rep(w, cd.I)
    key = ("cantype", w.perm)
    if key in cd.cache:
        return cd.cache[key]
    table = phi_table(cd, w)
    bound = len(cd.I) + 1
    witness = {}
    for a in cd.I:
        cur, m = a, 0
        while cur is not None and m <= bound:
            cur = table[cur]
            m += 1
        if cur is None:
            witness[a] = m
    I_w = frozenset(cd.I) - set(witness)
    # I_w is the stable image of iterating phi on I; double check by iteration
    S = frozenset(cd.I)
    for _ in range(bound):
        S = frozenset(table[a] for a in S if table[a] is not None)
    if S != I_w:
        raise RootDataError("canonical type iteration did not stabilise")
    res = CanonicalType(w, I_w, witness)
    cd.cache[key] = res
    return res


def is_bruhat_stratum(cd: CocharacterDatum, w: WeylElement) -> bool:
    """True iff w(J) = I as sets of roots."""
    _check_rep(w, cd.I)
    d = cd.datum
    image = frozenset(w.perm[k] for k in simple_root_set(d, cd.frame.J))
    return image == simple_root_set(d, cd.I)


def longest_element_canonical_type(cd: CocharacterDatum) -> frozenset[int]:
    """Closed form for the canonical type of w_{0,I} w_0: w_{0,I}(I_inf), I_inf the sigma-core of I."""
    core = frozenset(cd.I)
    while True:
        nxt = core & cd.sigma.image(core)
        if nxt == core:
            break
        core = nxt
    d = cd.datum
    w0I = longest_element(d, cd.I)
    img = [w0I.perm[k] for k in simple_root_set(d, core)]
    # w_{0,I} sends I to -I; read the result as a set of simple roots up to sign
    out = as_simple_subset(d, (d.neg(k) for k in img))
    if out is None:
        raise RootDataError("w_{0,I} does not permute -I")
    return out


@dataclass(frozen=True)
class FlagZipDatum:
    I0: frozenset[int]
    J0: frozenset[int]


def flag_datum(cd: CocharacterDatum, I0) -> FlagZipDatum:
    """J_0 = w_0 sigma(w_{0,I} I_0)."""
    I0 = _check_subset(cd, I0)
    d = cd.datum
    w0I = longest_element(d, cd.I)
    w0 = longest_element(d)
    roots = [w0I.perm[k] for k in simple_root_set(d, I0)]
    from .rootdata import root_permutation

    s = root_permutation(d, cd.sigma)
    roots = [w0.perm[s[k]] for k in roots]
    J0 = as_simple_subset(d, roots)
    if J0 is None:
        raise RootDataError("w_0 sigma(w_{0,I} I_0) is not a set of simple roots")
    return FlagZipDatum(I0, J0)


@dataclass(frozen=True)
class Known:
    element: WeylElement
    reason: str


@dataclass(frozen=True)
class Unknown:
    length_bound: int
    reason: str = "no combinatorial formula for the image of this flag stratum"


def _is_bn_builtin(cd: CocharacterDatum) -> int | None:
    d = cd.datum
    if len(d.factors) != 1 or d.factors[0].kind != "B":
        return None
    n = d.rank
    if cd.I != frozenset(range(1, n)) or not cd.sigma.is_trivial():
        return None
    return n


def project_stratum(cd: CocharacterDatum, I0, w: WeylElement) -> Known | Unknown:
    """Image of the flag stratum of w in the base, where it is determined.

    Returns ``Known(w)`` for w in ^I W, the tabulated value for the odd
    orthogonal elements w_i^{(r)}, and ``Unknown`` with the bound
    l(image) <= l(w) otherwise.
    """
    I0 = _check_subset(cd, I0)
    _check_rep(w, I0)
    if is_min_left(w, cd.I):
        return Known(w, "w lies in ^I W, so the flag stratum maps onto the stratum of w")
    n = _is_bn_builtin(cd)
    if n is not None:
        from .oddorth import projection_table

        table = projection_table(cd.datum)
        if w.perm in table:
            img, (r, i) = table[w.perm]
            return Known(img, f"w = w_{i}^({r}) projects onto the stratum of x_{2 * n - i}")
    return Unknown(w.length)
