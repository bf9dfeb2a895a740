"""Cocharacter data, frames and the twisted order on minimal coset representatives.

For a parabolic type ``I0`` contained in ``I`` the relation

    w' <=_{I0} w   iff   x w' psi(x)^{-1} <= w  for some x in W_{I0},

with ``psi(x) = z^{-1} sigma(x) z``, is computed by brute force over
``W_{I0}``.  Products and Bruhat tests are vectorised with numpy so that
parabolic subgroups of a few tens of thousands of elements stay cheap.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .rootdata import (
    DatumSpec,
    FrobeniusAction,
    IncompatibleKind,
    ParseError,
    RankOutOfRange,
    RootDataError,
    RootDatum,
    build_root_datum,
    builtin_frobenius,
    parse_datum_spec,
    root_permutation,
)
from .weyl import (
    CosetTable,
    WeylElement,
    _simple,
    _sref,
    apply_frobenius,
    as_simple_subset,
    coset_min_reps,
    enumerate_parabolic,
    format_element,
    identity,
    inverse,
    is_min_left,
    longest_element,
    multiply,
    parabolic_order,
    simple_root_set,
)

DEFAULT_BUDGET = 200_000


class BudgetExceeded(RootDataError):
    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class NotMinimalRep(RootDataError):
    pass


class FrameAxiomViolation(RootDataError):
    pass


class NotSubsetOfI(RootDataError):
    pass


def budget() -> int:
    """Enumeration cap for |W_{I0}|, overridable with ZIPSTRAT_BUDGET."""
    raw = os.environ.get("ZIPSTRAT_BUDGET")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise RootDataError(f"ZIPSTRAT_BUDGET must be an integer, got {raw!r}") from None
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class Frame:
    z: WeylElement
    J: frozenset[int]


@dataclass(eq=False)
class CocharacterDatum:
    """A root datum with the type ``I`` of the Hodge parabolic and Frobenius ``sigma``."""

    datum: RootDatum
    I: frozenset[int]
    sigma: FrobeniusAction
    p: int | None = None
    label: str = ""
    cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.I = frozenset(self.I)
        for i in self.I:
            self.datum.check_simple(i)
        if len(self.sigma.perm) != self.datum.rank:
            raise IncompatibleKind("Frobenius permutation has the wrong size")

    @property
    def rank(self) -> int:
        return self.datum.rank

    @property
    def frame(self) -> Frame:
        if "frame" not in self.cache:
            self.cache["frame"] = frame(self)
        return self.cache["frame"]

    def coset(self, I0: Iterable[int] | None = None) -> CosetTable:
        return coset_min_reps(self.datum, self.I if I0 is None else I0)

    def longest(self) -> WeylElement:
        """The longest element w_{0,I} w_0 of ^I W."""
        return multiply(longest_element(self.datum, self.I), longest_element(self.datum))

    def element(self, text: str) -> WeylElement:
        from .weyl import parse_element

        return parse_element(self.datum, text)

    def describe(self) -> dict:
        fr = self.frame
        return {
            "datum": self.datum.label,
            "Delta": list(range(1, self.rank + 1)),
            "I": sorted(i + 1 for i in self.I),
            "sigma": [j + 1 for j in self.sigma.perm],
            "sigma_kind": self.sigma.description,
            "z": format_element(fr.z),
            "J": sorted(j + 1 for j in fr.J),
            "num_strata": len(self.coset()),
        }


# ---------------------------------------------------------------------------
# Frames


def frame(cd: CocharacterDatum) -> Frame:
    """z = sigma(w_{0,I}) w_0 and J = z^{-1} sigma(I)."""
    d = cd.datum
    z = multiply(apply_frobenius(cd.sigma, longest_element(d, cd.I)), longest_element(d))
    zinv = inverse(z)
    sI = simple_root_set(d, cd.sigma.image(cd.I))
    J = as_simple_subset(d, (zinv.perm[k] for k in sI))
    if J is None:
        raise FrameAxiomViolation("z^{-1} sigma(I) is not a set of simple roots")
    return Frame(z, J)


def psi(cd: CocharacterDatum, x: WeylElement) -> WeylElement:
    z = cd.frame.z
    return multiply(multiply(inverse(z), apply_frobenius(cd.sigma, x)), z)


def _sigma_perms(cd: CocharacterDatum) -> tuple[np.ndarray, np.ndarray]:
    key = "sigma_np"
    if key not in cd.cache:
        s = np.array(root_permutation(cd.datum, cd.sigma), dtype=np.int32)
        sinv = np.argsort(s).astype(np.int32)
        cd.cache[key] = (s, sinv)
    return cd.cache[key]


def _check_subset(cd: CocharacterDatum, I0: Iterable[int]) -> frozenset[int]:
    I0 = frozenset(I0)
    if not I0 <= cd.I:
        raise NotSubsetOfI(f"{sorted(i + 1 for i in I0)} is not contained in I = {sorted(i + 1 for i in cd.I)}")
    return I0


def _check_rep(w: WeylElement, I0: Iterable[int]) -> None:
    if not is_min_left(w, I0):
        raise NotMinimalRep(f"{format_element(w)} is not minimal in its coset W_I w")


@dataclass
class _ParabolicData:
    X: np.ndarray  # rows: x
    Xinv: np.ndarray  # rows: x^{-1}
    P: np.ndarray  # rows: psi(x)
    Pinv: np.ndarray  # rows: psi(x)^{-1}


def _parabolic_data(cd: CocharacterDatum, I0: frozenset[int]) -> _ParabolicData:
    key = ("pdata", I0)
    if key not in cd.cache:
        lim = budget()
        size = parabolic_order(cd.datum, I0)
        if size > lim:
            raise BudgetExceeded(f"|W_I0| = {size} exceeds the enumeration budget {lim}", required=size)
        X = enumerate_parabolic(cd.datum, I0, limit=lim)
        Xinv = np.argsort(X, axis=1).astype(np.int32)
        s, sinv = _sigma_perms(cd)
        z = np.array(cd.frame.z.perm, dtype=np.int32)
        zinv = np.argsort(z).astype(np.int32)
        # psi(x)[k] = zinv[s[x[sinv[z[k]]]]]
        P = zinv[s[X[:, sinv[z]]]]
        Pinv = np.argsort(P, axis=1).astype(np.int32)
        cd.cache[key] = _ParabolicData(X, Xinv, P, Pinv)
    return cd.cache[key]


def bruhat_leq_batch(datum: RootDatum, U: np.ndarray, w: WeylElement) -> np.ndarray:
    """Vectorised lifting test: row-wise u <= w for a stack of permutations."""
    sref = np.array(_sref(datum), dtype=np.int32)
    simple = _simple(datum)
    n = datum.npos
    V = U.copy()
    for i in reversed(w.reduced_word()):
        m = V[:, simple[i]] >= n
        if m.any():
            V[m] = V[m][:, sref[i]]
    return (V[:, :n] < n).all(axis=1)


def _lengths(datum: RootDatum, A: np.ndarray) -> np.ndarray:
    n = datum.npos
    return (A[:, :n] >= n).sum(axis=1)


def twisted_leq(cd: CocharacterDatum, I0: Iterable[int], w1: WeylElement, w: WeylElement) -> bool:
    """Decide w1 <=_{I0} w for w1, w in ^{I0}W."""
    I0 = _check_subset(cd, I0)
    _check_rep(w1, I0)
    _check_rep(w, I0)
    if w1.length > w.length:
        return False
    from .weyl import bruhat_leq

    if bruhat_leq(w1, w):
        return True
    key = ("tleq", I0, w1.perm, w.perm)
    if key in cd.cache:
        return cd.cache[key]
    lower = cd.cache.get(("lower", I0, w.perm))
    if lower is not None:
        res = w1.perm in lower
    else:
        pd = _parabolic_data(cd, I0)
        a = np.array(w1.perm, dtype=np.int32)
        # x w1 psi(x)^{-1}: row k -> x[a[pinv[k]]]
        prods = np.take_along_axis(pd.X, a[pd.Pinv], axis=1)
        ok = _lengths(cd.datum, prods) <= w.length
        res = bool(ok.any() and bruhat_leq_batch(cd.datum, prods[ok], w).any())
    cd.cache[key] = res
    return res


_INTERVAL_CACHE_ENTRIES = 20_000_000  # int32 entries kept per root datum


def _interval_array(w: WeylElement) -> np.ndarray:
    """All y <= w as an array, by the subword property."""
    d = w.datum
    cache = d.cache.setdefault("intervals", {})
    hit = cache.get(w.perm)
    if hit is not None:
        return hit
    word = w.reduced_word()
    if not word:
        return np.arange(len(d.roots), dtype=np.int32)[None, :]
    # [e, w] is [e, w s] together with its right translate by s
    s = np.array(_sref(d)[word[-1]], dtype=np.int32)
    prev = _interval_array(WeylElement(d, tuple(w.perm[k] for k in s.tolist())))
    cur = np.concatenate([prev, prev[:, s]])
    # an element is determined by the images of the simple roots
    simple = np.array(_simple(d), dtype=np.int32)
    _, keep = np.unique(cur[:, simple], axis=0, return_index=True)
    cur = cur[np.sort(keep)]
    used = d.cache.get("intervals_size", 0) + cur.size
    if used <= _INTERVAL_CACHE_ENTRIES:
        cache[w.perm] = cur
        d.cache["intervals_size"] = used
    return cur


def twisted_lower_set(cd: CocharacterDatum, I0: Iterable[int], w: WeylElement) -> frozenset[tuple[int, ...]]:
    """All w1 in ^{I0}W with w1 <=_{I0} w, as root permutations."""
    I0 = _check_subset(cd, I0)
    _check_rep(w, I0)
    key = ("lower", I0, w.perm)
    if key in cd.cache:
        return cd.cache[key]
    d = cd.datum
    n = d.npos
    if w.length <= 1:
        # only the identity lies below a simple reflection
        out = frozenset({w.perm, tuple(range(len(d.roots)))})
        cd.cache[key] = out
        return out
    Y = _interval_array(w)
    if not I0:
        out = frozenset(map(tuple, Y.tolist()))
        cd.cache[key] = out
        return out
    pd = _parabolic_data(cd, I0)
    simple = np.array([d.simple_index(j) for j in sorted(I0)], dtype=np.int32)
    Yinv = np.argsort(Y, axis=1).astype(np.int32)
    found = []
    N = len(pd.X)
    if len(Y) <= N:
        for y, yinv in zip(Y, Yinv):
            # v = x^{-1} y psi(x); v^{-1}(alpha) = psi(x)^{-1}[yinv[x[alpha]]]
            cols = np.take_along_axis(pd.Pinv, yinv[pd.X[:, simple]], axis=1)
            keep = (cols < n).all(axis=1)
            if keep.any():
                found.append(np.take_along_axis(pd.Xinv[keep], y[pd.P[keep]], axis=1))
    else:
        for x, xinv, p, pinv in zip(pd.X, pd.Xinv, pd.P, pd.Pinv):
            cols = pinv[Yinv[:, x[simple]]]
            keep = (cols < n).all(axis=1)
            if keep.any():
                found.append(xinv[Y[keep][:, p]])
    arr = np.unique(np.concatenate(found), axis=0)
    out = frozenset(map(tuple, arr.tolist()))
    cd.cache[key] = out
    return out


@dataclass(frozen=True)
class LowerNeighbor:
    element: WeylElement
    bruhat: bool

    @property
    def exceptional(self) -> bool:
        return not self.bruhat


def lower_neighbors(cd: CocharacterDatum, I0: Iterable[int], w: WeylElement) -> list[LowerNeighbor]:
    """Gamma_{I0}(w), each neighbor flagged as Bruhat-lower or exceptional."""
    from .weyl import bruhat_leq

    I0 = _check_subset(cd, I0)
    target = w.length - 1
    out = []
    for perm in twisted_lower_set(cd, I0, w):
        v = WeylElement(cd.datum, perm)
        if v.length == target:
            out.append(LowerNeighbor(v, bruhat_leq(v, w)))
    out.sort(key=lambda nb: nb.element.perm)
    return out


def stratum_codim(cd: CocharacterDatum, w: WeylElement) -> int:
    """Codimension of the closure of the w-stratum: l(w_{0,I} w_0) - l(w)."""
    _check_rep(w, cd.I)
    return cd.longest().length - w.length


# ---------------------------------------------------------------------------
# The poset of strata


@dataclass
class StrataPoset:
    I0: frozenset[int]
    elements: tuple[WeylElement, ...]
    lower: dict[tuple[int, ...], frozenset[tuple[int, ...]]]
    covers: dict[tuple[int, ...], tuple[LowerNeighbor, ...]]

    def __len__(self) -> int:
        return len(self.elements)

    def leq(self, a: WeylElement, b: WeylElement) -> bool:
        return a.perm in self.lower[b.perm]

    def lengths(self) -> dict[str, int]:
        return {format_element(w): w.length for w in self.elements}

    def to_json(self) -> dict:
        nodes = [{"id": k, "element": format_element(w), "length": w.length} for k, w in enumerate(self.elements)]
        idx = {w.perm: k for k, w in enumerate(self.elements)}
        covers = []
        for w in self.elements:
            for nb in self.covers[w.perm]:
                covers.append({"lower": idx[nb.element.perm], "upper": idx[w.perm], "bruhat": nb.bruhat})
        return {"I0": sorted(i + 1 for i in self.I0), "nodes": nodes, "covers": covers}

    def to_dot(self) -> str:
        idx = {w.perm: k for k, w in enumerate(self.elements)}
        lines = ["digraph strata {", "  rankdir=BT;"]
        for k, w in enumerate(self.elements):
            lines.append(f'  n{k} [label="{format_element(w)}\\nl={w.length}"];')
        for w in self.elements:
            for nb in self.covers[w.perm]:
                style = "" if nb.bruhat else " [style=dashed]"
                lines.append(f"  n{idx[nb.element.perm]} -> n{idx[w.perm]}{style};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def strata_poset(cd: CocharacterDatum, I0: Iterable[int] | None = None, validate: bool = True) -> StrataPoset:
    """The order <=_{I0} on ^{I0}W with its covering relations."""
    I0 = _check_subset(cd, cd.I if I0 is None else I0)
    lim = budget()
    size = parabolic_order(cd.datum, I0)
    if size > lim:
        raise BudgetExceeded(f"|W_I0| = {size} exceeds the enumeration budget {lim}", required=size)
    elements = tuple(coset_min_reps(cd.datum, I0))
    lower = {w.perm: twisted_lower_set(cd, I0, w) for w in elements}
    covers = {w.perm: tuple(lower_neighbors(cd, I0, w)) for w in elements}
    poset = StrataPoset(I0, elements, lower, covers)
    if validate:
        validate_poset(cd, poset)
    return poset


def validate_poset(cd: CocharacterDatum, poset: StrataPoset) -> None:
    """Check antisymmetry, transitivity, the chain property and Bruhat containment.

    Lower sets are encoded as bitmasks over ^{I0}W.  Transitivity and the
    chain property together say that each lower set is {w} joined with the
    lower sets of its covers, which is what gets checked.
    """
    elts = poset.elements
    idx = {w.perm: k for k, w in enumerate(elts)}
    by_len: dict[int, int] = {}
    for k, w in enumerate(elts):
        by_len[w.length] = by_len.get(w.length, 0) | (1 << k)
    below_len: dict[int, int] = {}
    acc = 0
    for ell in range(max(by_len) + 2):
        below_len[ell] = acc
        acc |= by_len.get(ell, 0)
    mask = {}
    for k, w in enumerate(elts):
        m = 0
        for v in poset.lower[w.perm]:
            if v not in idx:
                raise RootDataError(f"lower set of {format_element(w)} leaves ^I0 W")
            m |= 1 << idx[v]
        if not m >> k & 1:
            raise RootDataError(f"{format_element(w)} is not below itself")
        if m & ~below_len[w.length] != 1 << k:
            raise RootDataError("strictly lower element without smaller length")
        mask[w.perm] = m
    for k, w in enumerate(elts):
        reach = 1 << k
        for nb in poset.covers[w.perm]:
            if nb.element.length != w.length - 1 or nb.element.perm not in idx:
                raise RootDataError(f"bad cover below {format_element(w)}")
            reach |= mask[nb.element.perm]
        if reach != mask[w.perm]:
            extra = mask[w.perm] & ~reach
            what = "chain property" if extra else "transitivity"
            raise RootDataError(f"{what} fails below {format_element(w)}")
    bruhat = _bruhat_masks(cd.datum, elts, idx)
    for w in elts:
        if bruhat[w.perm] & ~mask[w.perm]:
            raise RootDataError("Bruhat order is not contained in the twisted order")


def _bruhat_masks(datum, elts, idx) -> dict:
    """Bruhat lower sets of the given elements, as bitmasks over ``elts``.

    For groups of moderate size the Bruhat ideals of all of W are built once
    by closing the reflection covers w > w s_alpha, then restricted.  Larger
    groups fall back to the lifting test pairwise.
    """
    from .weyl import bruhat_leq

    if parabolic_order(datum, range(datum.rank)) > 20000:
        out = {}
        for w in elts:
            m = 0
            for k, v in enumerate(elts):
                if v.length <= w.length and bruhat_leq(v, w):
                    m |= 1 << k
            out[w.perm] = m
        return out
    index, ideals = _group_ideals(datum)
    pos = [index[v.perm] for v in elts]
    out = {}
    for w in elts:
        full = ideals[index[w.perm]]
        m = 0
        for k, i in enumerate(pos):
            if full >> i & 1:
                m |= 1 << k
        out[w.perm] = m
    return out


def _group_ideals(datum):
    """Index of W and the Bruhat ideal of every element as a bitmask over that index."""
    from .weyl import bruhat_lower_neighbors, enumerate_group

    if "bruhat_ideals" not in datum.cache:
        W = sorted(enumerate_group(datum), key=lambda v: v.length)
        index = {w.perm: k for k, w in enumerate(W)}
        ideals = [0] * len(W)
        for k, w in enumerate(W):
            m = 1 << k
            for v in bruhat_lower_neighbors(w).values():
                m |= ideals[index[v.perm]]
            ideals[k] = m
        datum.cache["bruhat_ideals"] = (index, ideals)
    return datum.cache["bruhat_ideals"]


# ---------------------------------------------------------------------------
# Building cocharacter data


def _datum_from_factors(kind: str, rank: int, d: int) -> RootDatum:
    return build_root_datum([(kind, rank)] * d)


def gln_datum(n: int, r: int) -> CocharacterDatum:
    """GL_n with Hodge type (r, n-r), trivial Frobenius: I = Delta minus alpha_r."""
    if n < 2 or not 0 < r < n:
        raise RankOutOfRange(f"need 0 < r < n, got n={n}, r={r}")
    d = build_root_datum("A", n - 1)
    return CocharacterDatum(d, frozenset(range(n - 1)) - {r - 1}, builtin_frobenius(d), label=f"GL{n}({r},{n - r})")


def weil_split_datum(n: int, rs: Sequence[int]) -> CocharacterDatum:
    """Weil restriction of GL_n along a degree d extension; factor i carries r_i."""
    d = len(rs)
    dat = _datum_from_factors("A", n - 1, d)
    sigma = builtin_frobenius(dat, "shift" if d > 1 else "trivial")
    return CocharacterDatum(dat, _signature_I(dat, rs, n), sigma, label=f"ResGL{n}{tuple(rs)}")


def unitary_inert_datum(n: int, r: int) -> CocharacterDatum:
    """Unitary group of an inert hermitian space of dimension n, signature (r, n-r)."""
    dat = build_root_datum("A", n - 1)
    return CocharacterDatum(dat, _signature_I(dat, [r], n), builtin_frobenius(dat, "flip"), label=f"U{n}({r},{n - r})")


def unitary_restricted_datum(n: int, rs: Sequence[int]) -> CocharacterDatum:
    d = len(rs)
    dat = _datum_from_factors("A", n - 1, d)
    kind = "unitary-shift" if d > 1 else "flip"
    return CocharacterDatum(dat, _signature_I(dat, rs, n), builtin_frobenius(dat, kind), label=f"ResU{n}{tuple(rs)}")


def bn_datum(n: int) -> CocharacterDatum:
    """Split odd orthogonal group SO(2n+1) with the minuscule cocharacter.

    Shares its root datum with the ``oddorth`` tables so that elements compare.
    """
    from .oddorth import bn

    dat = bn(n)
    return CocharacterDatum(dat, frozenset(range(1, n)), builtin_frobenius(dat), label=f"B{n}")


def _signature_I(dat: RootDatum, sig: Sequence[int], n_a: int | None = None) -> frozenset[int]:
    """Type I from per-factor signature data.

    For type A factors of GL_n the entry r_i removes alpha_{r_i}; 0 and n mean
    the factor is compact.  For other types the entry is the 1-based index of
    the non-compact simple root, 0 for compact.
    """
    if len(sig) != len(dat.factors):
        raise IncompatibleKind(f"signature needs {len(dat.factors)} entries, got {len(sig)}")
    out = set(range(dat.rank))
    for f, r in zip(dat.factors, sig):
        top = f.rank + 1 if f.kind == "A" else f.rank
        if not 0 <= r <= top:
            raise IncompatibleKind(f"signature entry {r} out of range for {f.kind}{f.rank}")
        if r == 0 or (f.kind == "A" and r == f.rank + 1):
            continue
        out.discard(f.offset + r - 1)
    return frozenset(out)


def cocharacter_from_spec(text: str, p: int | None = None) -> CocharacterDatum:
    """Build a cocharacter datum from ``key=value`` specification text."""
    raw = parse_datum_spec(text)

    def get(key: str, default=None):
        return raw[key][0] if key in raw else default

    def fail(key: str, msg: str):
        _, line, src = raw[key]
        raise ParseError(msg, line, src)

    kind = get("type").upper()
    if kind in ("E6", "E7"):
        rank = int(kind[1])
        if "rank" in raw:
            try:
                given = int(get("rank"))
            except ValueError:
                fail("rank", "rank must be an integer")
            if given != rank:
                fail("rank", f"{kind} has rank {rank}")
    else:
        if "rank" not in raw:
            raise ParseError(f"type {kind} needs a rank")
        try:
            rank = int(get("rank"))
        except ValueError:
            fail("rank", "rank must be an integer")
    try:
        d = int(get("d", "1"))
    except ValueError:
        fail("d", "d must be an integer")
    if d < 1:
        fail("d", "d must be at least 1")
    form = get("form", "split").lower()
    if form == "nonsplit":
        form = "unitary"
    if form not in ("split", "unitary"):
        fail("form", f"unknown form {form!r}")
    default_frob = ("shift" if form == "split" else "unitary-shift") if d > 1 else ("trivial" if form == "split" else "flip")
    frob = get("frobenius", default_frob)
    try:
        dat = build_root_datum(DatumSpec(kind, rank, d, form, frob))
    except RootDataError as exc:
        key = "rank" if "rank" in raw else "type"
        fail(key, str(exc))
    try:
        sigma = builtin_frobenius(dat, frob)
    except RootDataError as exc:
        fail("frobenius" if "frobenius" in raw else "form", str(exc))
    if "signature" in raw:
        try:
            sig = [int(t) for t in get("signature").replace(" ", "").split(",") if t != ""]
        except ValueError:
            fail("signature", "signature must be a comma separated list of integers")
        try:
            I = _signature_I(dat, sig)
        except RootDataError as exc:
            fail("signature", str(exc))
    else:
        I = frozenset(range(dat.rank))
    label = f"{kind}{rank if kind in 'ABCD' else ''}" + (f"^{d}" if d > 1 else "") + f"[{form}]"
    return CocharacterDatum(dat, I, sigma, p=p, label=label)


def poset_json(poset: StrataPoset) -> str:
    return json.dumps(poset.to_json(), indent=2, sort_keys=True)
