"""Open unions of strata in a stratum closure and their smoothness verdicts.

A *w-open* is a set ``gamma`` of strata inside the closure of the ``w``
stratum that is open there: it contains ``w`` and is upward closed inside
the lower set of ``w``.  The decision procedure combines three
combinatorial predicates:

* a cover for a parabolic type ``I0``: ``gamma`` stays open in the closure
  of ``w`` for the finer order ``<=_{I0}``;
* w-boundedness: every canonical type in ``gamma`` lies inside ``I_w``;
* a separating cover: the preimage of ``gamma`` in the canonical flag space
  contains nothing but ``gamma`` itself.

Separating covers and boundedness together give a normal, Cohen-Macaulay
open.  For two-stratum opens the criterion is sharp and decides smoothness.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from .canonical import Known, canonical_type, project_stratum
from .rootdata import RootDataError
from .weyl import (
    WeylElement,
    format_element,
    identity,
    is_min_left,
    parse_element,
    simple_reflection,
    simple_root_set,
)
from .zipdatum import CocharacterDatum, NotMinimalRep, lower_neighbors, twisted_leq, twisted_lower_set

TRACE_VERSION = 1

SMOOTH = "Smooth"
NORMAL_CM = "NormalCM"
NOT_NORMAL = "NotNormal"
NOT_SMOOTH = "NotSmooth"
UNKNOWN = "Unknown"
CONCLUSIONS = (SMOOTH, NORMAL_CM, NOT_NORMAL, NOT_SMOOTH, UNKNOWN)

YES, NO = "Yes", "No"


class NotOpenInClosure(RootDataError):
    def __init__(self, message: str, witness: WeylElement | None = None):
        super().__init__(message)
        self.witness = witness


class NotLowerNeighbor(RootDataError):
    pass


@dataclass(frozen=True)
class WOpen:
    cd: CocharacterDatum = field(repr=False, compare=False)
    w: WeylElement
    gamma: frozenset[WeylElement]

    @property
    def perms(self) -> frozenset[tuple[int, ...]]:
        return frozenset(v.perm for v in self.gamma)

    def sorted_gamma(self) -> list[WeylElement]:
        return sorted(self.gamma, key=lambda v: (-v.length, v.perm))

    @property
    def is_elementary(self) -> bool:
        """Two strata, the smaller one of codimension one."""
        return len(self.gamma) == 2 and all(v == self.w or v.length == self.w.length - 1 for v in self.gamma)

    @property
    def is_depth_one(self) -> bool:
        return all(v == self.w or v.length == self.w.length - 1 for v in self.gamma)

    def others(self) -> list[WeylElement]:
        return [v for v in self.sorted_gamma() if v != self.w]


def _as_elements(cd: CocharacterDatum, items: Iterable) -> list[WeylElement]:
    out = []
    for v in items:
        if isinstance(v, str):
            v = parse_element(cd.datum, v)
        elif not isinstance(v, WeylElement):
            v = WeylElement(cd.datum, tuple(v))
        out.append(v)
    return out


def make_w_open(cd: CocharacterDatum, w: WeylElement, gamma: Iterable) -> WOpen:
    """Validate that ``gamma`` is open in the closure of the ``w`` stratum."""
    gamma_el = _as_elements(cd, gamma)
    for v in [w, *gamma_el]:
        if not is_min_left(v, cd.I):
            raise NotMinimalRep(f"{format_element(v)} is not a minimal representative for I")
    perms = {v.perm for v in gamma_el}
    if w.perm not in perms:
        raise NotOpenInClosure(f"gamma must contain w = {format_element(w)}", w)
    lower = twisted_lower_set(cd, cd.I, w)
    for v in gamma_el:
        if v.perm not in lower:
            raise NotOpenInClosure(f"{format_element(v)} is not below w in the closure order", v)
    floor = min(v.length for v in gamma_el)
    for perm in lower:
        if perm in perms:
            continue
        mid = WeylElement(cd.datum, perm)
        if mid.length <= floor:
            continue
        below = twisted_lower_set(cd, cd.I, mid)
        if any(v.perm in below for v in gamma_el if v.length < mid.length):
            raise NotOpenInClosure(
                f"{format_element(mid)} lies between a member of gamma and w but is missing from gamma", mid
            )
    return WOpen(cd, w, frozenset(gamma_el))


def closure_open(cd: CocharacterDatum, w: WeylElement) -> WOpen:
    """The whole closure of the ``w`` stratum."""
    lower = twisted_lower_set(cd, cd.I, w)
    return WOpen(cd, w, frozenset(WeylElement(cd.datum, p) for p in lower))


def elementary(cd: CocharacterDatum, w: WeylElement, w1: WeylElement) -> WOpen:
    """The two-stratum open U(w, w1) for a lower neighbour w1 of w."""
    for v in (w, w1):
        if not is_min_left(v, cd.I):
            raise NotMinimalRep(f"{format_element(v)} is not a minimal representative for I")
    if w1.length != w.length - 1 or not twisted_leq(cd, cd.I, w1, w):
        raise NotLowerNeighbor(f"{format_element(w1)} is not a lower neighbour of {format_element(w)}")
    # nothing lies strictly between strata of adjacent lengths, so {w, w1} is open
    return WOpen(cd, w, frozenset([w, w1]))


def elementary_pairs(cd: CocharacterDatum) -> list[tuple[WeylElement, WeylElement]]:
    """All (w, w1) with w1 a lower neighbour of w in ^I W."""
    out = []
    for w in sorted(cd.coset(), key=lambda v: (v.length, v.perm)):
        for nb in lower_neighbors(cd, cd.I, w):
            out.append((w, nb.element))
    return out


# ---------------------------------------------------------------------------
# The three predicates


def cover_violation(u: WOpen, I0) -> WeylElement | None:
    """First element breaking the cover conditions for type I0, or None."""
    cd = u.cd
    I0 = frozenset(I0)
    lower = twisted_lower_set(cd, I0, u.w)
    for v in u.sorted_gamma():
        if v.perm not in lower:
            return v
    perms = u.perms
    floor = min(v.length for v in u.gamma)
    for perm in sorted(lower):
        if perm in perms:
            continue
        mid = WeylElement(cd.datum, perm)
        if mid.length <= floor:
            continue
        if any(v.length < mid.length and twisted_leq(cd, I0, v, mid) for v in u.gamma):
            return mid
    return None


def admits_cover(u: WOpen, I0) -> bool:
    """Whether ``gamma`` is open in the closure of w for the order <=_{I0}."""
    return cover_violation(u, I0) is None


def canonical_I(u: WOpen) -> frozenset[int]:
    return canonical_type(u.cd, u.w).I_w


def admits_canonical_cover(u: WOpen) -> bool:
    return admits_cover(u, canonical_I(u))


def bounded_violation(u: WOpen) -> WeylElement | None:
    top = canonical_I(u)
    for v in u.sorted_gamma():
        if not canonical_type(u.cd, v).I_w <= top:
            return v
    return None


def is_w_bounded(u: WOpen) -> bool:
    """Every canonical type in gamma is contained in I_w."""
    return bounded_violation(u) is None


@dataclass(frozen=True)
class Separating:
    status: str
    reason: str
    unresolved: tuple[WeylElement, ...] = ()

    def __str__(self) -> str:
        return self.status


def _bn_window(u: WOpen) -> int | None:
    """j if u is the odd orthogonal open Y_j = X_j u ... u X_{2n-1-j}."""
    from .canonical import _is_bn_builtin

    n = _is_bn_builtin(u.cd)
    if n is None:
        return None
    from .oddorth import index_of_x

    idx = sorted(index_of_x(v) if index_of_x(v) is not None else -1 for v in u.gamma)
    if -1 in idx:
        return None
    j = idx[0]
    if j > n - 1 or idx != list(range(j, 2 * n - j)) or index_of_x(u.w) != j:
        return None
    return j


def separating_verdict(u: WOpen) -> Separating:
    cd = u.cd
    Iw = canonical_I(u)
    bad = cover_violation(u, Iw)
    if bad is not None:
        return Separating(NO, f"no canonical cover: {format_element(bad)} breaks openness for the order at I_w")
    if len(u.gamma) == 1:
        return Separating(YES, "single stratum: the flag stratum of w maps isomorphically onto it")
    if u.is_elementary:
        return Separating(YES, "two-stratum open with a canonical cover is separating")
    j = _bn_window(u)
    if j is not None:
        return Separating(YES, f"odd orthogonal open Y_{j}: separating canonical cover")
    lower = [WeylElement(cd.datum, p) for p in sorted(twisted_lower_set(cd, Iw, u.w))]
    if all(is_min_left(v, cd.I) for v in lower):
        return Separating(YES, "every flag stratum below w already lies in ^I W, so projection is the identity")
    perms = u.perms
    floor = min(v.length for v in u.gamma)
    unresolved = []
    for v in lower:
        if v.perm in perms:
            continue
        if v.length < floor:
            continue  # its image is at most as long as v, hence outside gamma
        img = project_stratum(cd, Iw, v)
        if isinstance(img, Known):
            if img.element.perm in perms:
                return Separating(
                    NO,
                    f"{format_element(v)} projects into gamma onto {format_element(img.element)} but is not in gamma",
                )
            continue
        unresolved.append(v)
    if unresolved:
        return Separating(UNKNOWN, "images of some flag strata are not determined", tuple(unresolved))
    return Separating(YES, "every flag stratum over gamma lies in gamma")


# ---------------------------------------------------------------------------
# Classification


@dataclass(frozen=True)
class Verdict:
    w: WeylElement
    gamma: tuple[WeylElement, ...]
    has_cover: bool
    w_bounded: bool
    separating: str
    conclusion: str
    trace: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "w": format_element(self.w),
            "gamma": [format_element(v) for v in self.gamma],
            "has_cover": self.has_cover,
            "w_bounded": self.w_bounded,
            "separating": self.separating,
            "conclusion": self.conclusion,
            "trace": list(self.trace),
            "trace_version": TRACE_VERSION,
        }

    def dumps(self, indent: int | None = None) -> str:
        return json.dumps(self.to_json(), indent=indent, sort_keys=True)

    @classmethod
    def from_json(cls, cd: CocharacterDatum, data: dict | str) -> "Verdict":
        if isinstance(data, str):
            data = json.loads(data)
        if data.get("trace_version", TRACE_VERSION) != TRACE_VERSION:
            raise RootDataError(f"unsupported trace version {data.get('trace_version')}")
        if data["conclusion"] not in CONCLUSIONS:
            raise RootDataError(f"unknown conclusion {data['conclusion']!r}")
        return cls(
            parse_element(cd.datum, data["w"]),
            tuple(parse_element(cd.datum, s) for s in data["gamma"]),
            bool(data["has_cover"]),
            bool(data["w_bounded"]),
            data["separating"],
            data["conclusion"],
            tuple(data["trace"]),
        )


def _fmt_type(I) -> str:
    return "{" + ",".join(str(a + 1) for a in sorted(I)) + "}"


def _classify_elementary(u: WOpen, trace: list[str]) -> tuple[bool, bool, str, str]:
    cd = u.cd
    (w1,) = u.others()
    Iw = canonical_I(u)
    I1 = canonical_type(cd, w1).I_w
    trace.append(f"canonical-type: I_w = {_fmt_type(Iw)}, I_w' = {_fmt_type(I1)}")
    cover = twisted_leq(cd, Iw, w1, u.w)
    trace.append(f"canonical-cover: w' {'is' if cover else 'is not'} below w for the order at I_w")
    bounded = I1 <= Iw
    trace.append(f"w-bounded: I_w' {'is' if bounded else 'is not'} contained in I_w")
    sep = YES if cover else NO
    trace.append(f"separating: {sep} (two-stratum open: separating iff it has a canonical cover)")
    smooth = cover and bounded
    trace.append(
        "two-stratum criterion: smooth iff normal iff canonical cover and w-bounded -> "
        + (SMOOTH if smooth else NOT_SMOOTH)
    )
    return cover, bounded, sep, SMOOTH if smooth else NOT_SMOOTH


def classify(u: WOpen) -> Verdict:
    """Decide what the combinatorics says about the open ``u``."""
    cd = u.cd
    trace: list[str] = [f"w = {format_element(u.w)}, |gamma| = {len(u.gamma)}"]
    gamma = tuple(u.sorted_gamma())
    if len(u.gamma) == 1:
        trace.append("single stratum: a stratum is smooth")
        return Verdict(u.w, gamma, True, True, YES, SMOOTH, tuple(trace))
    if u.is_elementary:
        cover, bounded, sep, concl = _classify_elementary(u, trace)
        return Verdict(u.w, gamma, cover, bounded, sep, concl, tuple(trace))
    if u.is_depth_one:
        # the two-stratum opens U(w, w') cover u and smoothness is local
        trace.append("depth one: u is covered by its two-stratum opens")
        parts = [classify(WOpen(cd, u.w, frozenset([u.w, v]))) for v in u.others()]
        for v, part in zip(u.others(), parts):
            trace.append(f"  U(w, {format_element(v)}) -> {part.conclusion}")
        cover = admits_canonical_cover(u)
        bounded = is_w_bounded(u)
        sep = separating_verdict(u).status
        concl = SMOOTH if all(p.conclusion == SMOOTH for p in parts) else NOT_SMOOTH
        trace.append(f"depth one -> {concl}")
        return Verdict(u.w, gamma, cover, bounded, sep, concl, tuple(trace))

    Iw = canonical_I(u)
    trace.append(f"canonical-type: I_w = {_fmt_type(Iw)}")
    bad = cover_violation(u, Iw)
    cover = bad is None
    trace.append(
        "canonical-cover: holds"
        if cover
        else f"canonical-cover: fails at {format_element(bad)}"
    )
    bv = bounded_violation(u)
    bounded = bv is None
    trace.append(
        "w-bounded: holds" if bounded else f"w-bounded: fails, I_v not in I_w for v = {format_element(bv)}"
    )
    sep = separating_verdict(u)
    trace.append(f"separating: {sep.status} ({sep.reason})")
    if sep.unresolved:
        trace.append("  unresolved: " + ", ".join(format_element(v) for v in sep.unresolved))
    if cover and bounded and sep.status == YES:
        trace.append("separating canonical cover and w-bounded -> normal and Cohen-Macaulay")
        j = _bn_window(u)
        if j is not None:
            trace.append(f"odd orthogonal table: Y_{j} is the smooth locus of its closure (cited, not recomputed)")
        return Verdict(u.w, gamma, cover, bounded, sep.status, NORMAL_CM, tuple(trace))
    if cover and not bounded:
        trace.append("normal with a canonical cover forces w-bounded; bounded fails -> not normal")
        return Verdict(u.w, gamma, cover, bounded, sep.status, NOT_NORMAL, tuple(trace))
    # codimension one: each U(w, w') is open in u, so a singular one makes u non-normal
    for v in u.others():
        if v.length == u.w.length - 1:
            part = classify(WOpen(cd, u.w, frozenset([u.w, v])))
            if part.conclusion == NOT_SMOOTH:
                trace.append(
                    f"codimension one: U(w, {format_element(v)}) is open in u and not normal -> not normal"
                )
                return Verdict(u.w, gamma, cover, bounded, sep.status, NOT_NORMAL, tuple(trace))
    trace.append("no criterion applies -> Unknown")
    return Verdict(u.w, gamma, cover, bounded, sep.status, UNKNOWN, tuple(trace))


# ---------------------------------------------------------------------------
# Length one strata


@dataclass(frozen=True)
class LengthOneReport:
    alpha: int
    I_id: frozenset[int]
    I_alpha: frozenset[int]
    smooth: bool

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha + 1,
            "I_id": sorted(a + 1 for a in self.I_id),
            "I_alpha": sorted(a + 1 for a in self.I_alpha),
            "smooth": self.smooth,
        }


def length_one_analysis(cd: CocharacterDatum) -> list[LengthOneReport]:
    """For each simple alpha outside I: smooth iff s_alpha fixes I_id as a set of roots."""
    d = cd.datum
    e = identity(d)
    I_id = canonical_type(cd, e).I_w
    roots = simple_root_set(d, I_id)
    out = []
    for a in range(d.rank):
        if a in cd.I:
            continue
        s = simple_reflection(d, a)
        I_a = canonical_type(cd, s).I_w
        if not I_a <= I_id:
            raise RootDataError(f"I_alpha not inside I_id for alpha_{a + 1}")
        smooth = frozenset(s.perm[k] for k in roots) == roots
        if smooth and I_a != I_id:
            raise RootDataError(f"s_alpha fixes I_id but I_alpha differs for alpha_{a + 1}")
        out.append(LengthOneReport(a, I_id, I_a, smooth))
    return out


def length_one_verdicts(cd: CocharacterDatum) -> dict[int, Verdict]:
    """classify(U(s_alpha, id)) for every alpha outside I."""
    d = cd.datum
    e = identity(d)
    return {
        a: classify(elementary(cd, simple_reflection(d, a), e)) for a in range(d.rank) if a not in cd.I
    }


def smooth_locus_open_stratum_test(cd: CocharacterDatum, w: WeylElement) -> bool:
    """True iff every two-stratum open U(w, w') is singular, so the smooth locus is X_w."""
    for nb in lower_neighbors(cd, cd.I, w):
        if classify(elementary(cd, w, nb.element)).conclusion != NOT_SMOOTH:
            return False
    return True
