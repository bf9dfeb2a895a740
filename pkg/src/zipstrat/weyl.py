"""Weyl group elements stored as permutations of the root set.

An element ``w`` is the tuple ``perm`` with ``perm[k]`` the index of the root
``w(beta_k)``.  Multiplication is composition of tuples, the identity is
``range(len(roots))`` and the length is the number of positive roots sent to
negative ones.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .rootdata import (
    FrobeniusAction,
    IndexOutOfRange,
    RootDataError,
    RootDatum,
    root_permutation,
)

Perm = tuple[int, ...]

BRUHAT_CACHE_SIZE = 200_000


class DatumMismatch(RootDataError):
    pass


class ElementParseError(RootDataError):
    pass


def _simple(datum: RootDatum) -> list[int]:
    """Root indices of the simple roots (cached on the datum)."""
    c = datum.cache
    if "simple" not in c:
        c["simple"] = [datum.simple_index(i) for i in range(datum.rank)]
    return c["simple"]


def _sref(datum: RootDatum) -> list[Perm]:
    """Root permutations of the simple reflections (cached on the datum)."""
    c = datum.cache
    if "sref" not in c:
        out = []
        for i in range(datum.rank):
            row = []
            for v in datum.roots:
                cc = sum(v[j] * datum.cartan[i][j] for j in range(datum.rank))
                img = tuple(x - (cc if j == i else 0) for j, x in enumerate(v))
                row.append(datum.index(img))
            out.append(tuple(row))
        c["sref"] = out
    return c["sref"]


def _compose(a: Sequence[int], b: Sequence[int]) -> Perm:
    return tuple([a[k] for k in b])


class WeylElement:
    """An element of the Weyl group of ``datum``."""

    __slots__ = ("datum", "perm", "_length", "_word")

    def __init__(self, datum: RootDatum, perm: Sequence[int]):
        self.datum = datum
        self.perm: Perm = tuple(perm)
        self._length: int | None = None
        self._word: tuple[int, ...] | None = None

    # group structure -------------------------------------------------------

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return multiply(self, other)

    def inverse(self) -> "WeylElement":
        return inverse(self)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, WeylElement) and self.datum is other.datum and self.perm == other.perm

    def __hash__(self) -> int:
        return hash(self.perm)

    def __lt__(self, other: "WeylElement") -> bool:
        # total order used only for deterministic sorting
        return (self.length, self.perm) < (other.length, other.perm)

    def __repr__(self) -> str:
        return f"WeylElement({format_element(self)})"

    def __str__(self) -> str:
        return format_element(self)

    # queries ----------------------------------------------------------------

    @property
    def length(self) -> int:
        if self._length is None:
            n = self.datum.npos
            self._length = sum(map(n.__le__, self.perm[:n]))
        return self._length

    def is_identity(self) -> bool:
        return all(i == k for i, k in enumerate(self.perm))

    def root_image(self, k: int) -> int:
        return self.perm[k]

    def act(self, v: Sequence[int]) -> tuple[int, ...]:
        """Image of a vector in the simple-root basis."""
        d = self.datum
        if len(v) != d.rank:
            raise IndexOutOfRange(f"expected {d.rank} coordinates")
        out = [0] * d.rank
        for i, c in enumerate(v):
            if c:
                img = d.roots[self.perm[d.simple_index(i)]]
                for t, x in enumerate(img):
                    out[t] += c * x
        return tuple(out)

    def has_right_descent(self, i: int) -> bool:
        """True when l(w s_i) < l(w), i.e. w(alpha_i) is negative."""
        return self.perm[self.datum.simple_index(i)] >= self.datum.npos

    def has_left_descent(self, i: int) -> bool:
        """True when l(s_i w) < l(w), i.e. w^{-1}(alpha_i) is negative."""
        d = self.datum
        target = d.simple_index(i)
        return self.perm.index(target) >= d.npos

    def right_descents(self) -> frozenset[int]:
        return frozenset(i for i in range(self.datum.rank) if self.has_right_descent(i))

    def left_descents(self) -> frozenset[int]:
        return inverse(self).right_descents()

    def reduced_word(self) -> tuple[int, ...]:
        """A reduced word (0-based simple indices) read left to right."""
        if self._word is None:
            d = self.datum
            sref = _sref(d)
            simple = _simple(d)
            n = d.npos
            p = self.perm
            word = []
            while True:
                for i in range(d.rank):
                    if p[simple[i]] >= n:
                        word.append(i)
                        p = _compose(p, sref[i])
                        break
                else:
                    break
            self._word = tuple(reversed(word))
        return self._word


# ---------------------------------------------------------------------------
# Basic constructors


def identity(datum: RootDatum) -> WeylElement:
    return WeylElement(datum, range(len(datum.roots)))


def simple_reflection(datum: RootDatum, i: int) -> WeylElement:
    datum.check_simple(i)
    return WeylElement(datum, _sref(datum)[i])


def from_word(datum: RootDatum, word: Iterable[int]) -> WeylElement:
    """Product s_{i_1} s_{i_2} ... of simple reflections (0-based indices)."""
    sref = _sref(datum)
    p: Perm = tuple(range(len(datum.roots)))
    for i in word:
        datum.check_simple(i)
        p = _compose(p, sref[i])
    return WeylElement(datum, p)


def reflection(datum: RootDatum, k: int) -> WeylElement:
    """The reflection s_beta for the root with index ``k``."""
    c = datum.cache.setdefault("refl", {})
    k = k if datum.is_positive(k) else datum.neg(k)
    if k not in c:
        cv = datum.coroots[k]
        beta = datum.roots[k]
        r = datum.rank
        a = datum.cartan
        perm = []
        for v in datum.roots:
            pr = sum(v[j] * cv[i] * a[i][j] for i in range(r) for j in range(r) if cv[i] and v[j])
            perm.append(datum.index(tuple(x - pr * y for x, y in zip(v, beta))))
        c[k] = tuple(perm)
    return WeylElement(datum, c[k])


def _check_same(a: WeylElement, b: WeylElement) -> None:
    if a.datum is not b.datum:
        raise DatumMismatch("elements belong to different root data")


def multiply(w1: WeylElement, w2: WeylElement) -> WeylElement:
    _check_same(w1, w2)
    return WeylElement(w1.datum, _compose(w1.perm, w2.perm))


def inverse(w: WeylElement) -> WeylElement:
    inv = [0] * len(w.perm)
    for k, v in enumerate(w.perm):
        inv[v] = k
    return WeylElement(w.datum, inv)


def length(w: WeylElement) -> int:
    return w.length


def longest_element(datum: RootDatum, K: Iterable[int] | None = None) -> WeylElement:
    """The longest element w_{0,K} of the parabolic subgroup W_K."""
    K = sorted(range(datum.rank) if K is None else set(K))
    key = ("w0", tuple(K))
    if key not in datum.cache:
        sref = _sref(datum)
        simple = _simple(datum)
        n = datum.npos
        p: Perm = tuple(range(len(datum.roots)))
        changed = True
        while changed:
            changed = False
            for i in K:
                if p[simple[i]] < n:
                    p = _compose(p, sref[i])
                    changed = True
        datum.cache[key] = p
    return WeylElement(datum, datum.cache[key])


def apply_frobenius(sigma: FrobeniusAction, w: WeylElement) -> WeylElement:
    """sigma(w) = S w S^{-1} with S the root permutation induced by sigma."""
    d = w.datum
    if len(sigma.perm) != d.rank:
        raise DatumMismatch("Frobenius action belongs to a different datum")
    key = ("sigma", sigma.perm)
    if key not in d.cache:
        s = root_permutation(d, sigma)
        sinv = [0] * len(s)
        for k, v in enumerate(s):
            sinv[v] = k
        d.cache[key] = (s, tuple(sinv))
    s, sinv = d.cache[key]
    return WeylElement(d, _compose(s, _compose(w.perm, sinv)))


def apply_to_roots(w: WeylElement, roots: Iterable[int]) -> frozenset[int]:
    return frozenset(w.perm[k] for k in roots)


def simple_root_set(datum: RootDatum, subset: Iterable[int]) -> frozenset[int]:
    """Root indices of a set of simple roots."""
    return frozenset(datum.simple_index(i) for i in subset)


def as_simple_subset(datum: RootDatum, root_indices: Iterable[int]) -> frozenset[int] | None:
    """Inverse of :func:`simple_root_set`; None when some root is not simple."""
    back = {datum.simple_index(i): i for i in range(datum.rank)}
    out = set()
    for k in root_indices:
        if k not in back:
            return None
        out.add(back[k])
    return frozenset(out)


# ---------------------------------------------------------------------------
# Bruhat order


def bruhat_leq(u: WeylElement, w: WeylElement) -> bool:
    """Decide u <= w in the Bruhat order.

    Uses the lifting property: if ws < w then u <= w iff min(u, us) <= ws.
    Peeling the letters of a reduced word of w from the right reduces the
    question to comparison with the identity.
    """
    _check_same(u, w)
    d = u.datum
    cache = d.cache.setdefault("bruhat", {})
    key = (u.perm, w.perm)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if u.length > w.length:
        res = False
    else:
        sref = _sref(d)
        simple = _simple(d)
        n = d.npos
        v = u.perm
        lv = u.length
        word = w.reduced_word()
        res = True
        for t in range(len(word) - 1, -1, -1):
            if lv > t + 1:
                res = False
                break
            i = word[t]
            if v[simple[i]] >= n:
                v = _compose(v, sref[i])
                lv -= 1
        if res:
            res = lv == 0
    if len(cache) >= BRUHAT_CACHE_SIZE:
        cache.clear()
    cache[key] = res
    return res


def bruhat_leq_subword(u: WeylElement, w: WeylElement) -> bool:
    """Oracle: u <= w iff u is a product of a subword of a reduced word of w."""
    _check_same(u, w)
    d = u.datum
    sref = _sref(d)
    reach = {tuple(range(len(d.roots)))}
    for i in w.reduced_word():
        reach |= {_compose(p, sref[i]) for p in reach}
    return u.perm in reach


def bruhat_interval_below(w: WeylElement) -> list[Perm]:
    """All elements u <= w, via the subword property."""
    d = w.datum
    sref = _sref(d)
    reach = {tuple(range(len(d.roots)))}
    for i in w.reduced_word():
        reach |= {_compose(p, sref[i]) for p in reach}
    return sorted(reach)


def bruhat_lower_neighbors(w: WeylElement) -> dict[int, WeylElement]:
    """Map alpha -> w s_alpha over E_w: positive roots with l(w s_alpha) = l(w) - 1."""
    d = w.datum
    out = {}
    target = w.length - 1
    for k in range(d.npos):
        v = multiply(w, reflection(d, k))
        if v.length == target:
            out[k] = v
    return out


# ---------------------------------------------------------------------------
# Parabolic subgroups and cosets


@dataclass(frozen=True)
class CosetTable:
    """Minimal length representatives ^I W (side='left') or W^J (side='right')."""

    I: frozenset[int]
    reps: tuple[WeylElement, ...]
    side: str = "left"

    def __len__(self) -> int:
        return len(self.reps)

    def __iter__(self):
        return iter(self.reps)

    def __contains__(self, w: object) -> bool:
        return w in self._set

    @property
    def _set(self) -> frozenset[WeylElement]:
        s = self.__dict__.get("_cached_set")
        if s is None:
            s = frozenset(self.reps)
            object.__setattr__(self, "_cached_set", s)
        return s


def is_min_left(w: WeylElement, I: Iterable[int]) -> bool:
    """w in ^I W: w^{-1}(alpha) > 0 for every alpha in I."""
    d = w.datum
    n = d.npos
    pos = {}
    for k, v in enumerate(w.perm):
        pos[v] = k
    return all(pos[d.simple_index(i)] < n for i in I)


def is_min_right(w: WeylElement, J: Iterable[int]) -> bool:
    """w in W^J: w(alpha) > 0 for every alpha in J."""
    d = w.datum
    return all(w.perm[d.simple_index(j)] < d.npos for j in J)


def coset_min_reps(datum: RootDatum, I: Iterable[int], side: str = "left", limit: int | None = None) -> CosetTable:
    """Enumerate ^I W by breadth-first growth from the identity.

    A right multiplication by s_i is kept when it increases the length and the
    product is still minimal in its coset W_I w.  ``side='right'`` returns
    W^I, obtained by inverting the elements of ^I W.
    """
    I = frozenset(I)
    key = ("coset", I)
    if key not in datum.cache:
        sref = _sref(datum)
        simple = _simple(datum)
        n = datum.npos
        e = tuple(range(len(datum.roots)))
        layer = [e]
        seen = {e}
        out = [e]
        while layer:
            nxt = []
            for p in layer:
                for i in range(datum.rank):
                    if p[simple[i]] >= n:
                        continue
                    q = _compose(p, sref[i])
                    if q in seen:
                        continue
                    inv = [0] * len(q)
                    for k, v in enumerate(q):
                        inv[v] = k
                    if all(inv[simple[j]] < n for j in I):
                        seen.add(q)
                        nxt.append(q)
                        if limit is not None and len(seen) > limit:
                            from .zipdatum import BudgetExceeded

                            raise BudgetExceeded(f"coset enumeration exceeded {limit} elements", required=None)
            nxt.sort()
            out.extend(nxt)
            layer = nxt
        datum.cache[key] = tuple(out)
    reps = tuple(WeylElement(datum, p) for p in datum.cache[key])
    if side == "right":
        reps = tuple(sorted((inverse(r) for r in reps), key=lambda w: (w.length, w.perm)))
    return CosetTable(I, reps, side)


def parabolic_order(datum: RootDatum, K: Iterable[int]) -> int:
    """|W_K| computed from the factor types of the Dynkin subdiagram."""
    K = set(K)
    # |W_K| = product over components; count via positive roots and degrees is
    # awkward, so enumerate components and use the classical formulas.
    comps = _components(datum, K)
    total = 1
    for comp in comps:
        total *= _weyl_order_of_component(datum, comp)
    return total


def _components(datum: RootDatum, K: set[int]) -> list[list[int]]:
    left = set(K)
    comps = []
    while left:
        start = left.pop()
        comp = [start]
        stack = [start]
        while stack:
            i = stack.pop()
            for j in list(left):
                if datum.cartan[i][j] != 0:
                    left.remove(j)
                    comp.append(j)
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def _weyl_order_of_component(datum: RootDatum, comp: list[int]) -> int:
    from math import factorial

    r = len(comp)
    # number of positive roots of the sub-system
    sub = [[datum.cartan[i][j] for j in comp] for i in comp]
    npos = 0
    for v in datum.roots[: datum.npos]:
        if all(v[i] == 0 for i in range(datum.rank) if i not in comp):
            npos += 1
    double = any(x == -2 for row in sub for x in row)
    if not double:
        if npos == r * (r + 1) // 2:
            return factorial(r + 1)
        if npos == r * (r - 1):
            return 2 ** (r - 1) * factorial(r)
        if r == 6:
            return 51840
        if r == 7:
            return 2903040
        if r == 8:
            return 696729600
    if r == 2 and npos == 6:
        return 12
    if r == 4 and npos == 24:
        return 1152
    return 2**r * factorial(r)


def enumerate_parabolic(datum: RootDatum, K: Iterable[int], limit: int | None = None) -> np.ndarray:
    """All elements of W_K as rows of an integer array (root permutations)."""
    K = sorted(set(K))
    key = ("parabolic", tuple(K))
    if key in datum.cache:
        return datum.cache[key]
    size = parabolic_order(datum, K)
    if limit is not None and size > limit:
        from .zipdatum import BudgetExceeded

        raise BudgetExceeded(f"|W_K| = {size} exceeds the enumeration budget {limit}", required=size)
    sref = np.array(_sref(datum), dtype=np.int32)
    simple = _simple(datum)
    n = datum.npos
    layer = np.arange(len(datum.roots), dtype=np.int32)[None, :]
    layers = [layer]
    while True:
        cand = []
        for i in K:
            grow = layer[layer[:, simple[i]] < n]
            if len(grow):
                cand.append(grow[:, sref[i]])
        if not cand:
            break
        layer = np.unique(np.concatenate(cand), axis=0)
        layers.append(layer)
    out = np.concatenate(layers)
    if len(out) != size:
        raise RootDataError(f"parabolic enumeration found {len(out)} elements, expected {size}")
    datum.cache[key] = out
    return out


def enumerate_group(datum: RootDatum, limit: int | None = None) -> list[WeylElement]:
    arr = enumerate_parabolic(datum, range(datum.rank), limit)
    return [WeylElement(datum, tuple(int(x) for x in row)) for row in arr]


# ---------------------------------------------------------------------------
# Serialization: window notation for classical factors, words otherwise


def _ambient_image_of_basis(w: WeylElement) -> list[tuple[int, int]]:
    """For classical data: w(e_i) = sign * e_k, returned as (k, sign), 0-based."""
    d = w.datum
    out: list[tuple[int, int]] = []
    for f in d.factors:
        off = f.ambient_offset
        dim = f.ambient_dim
        for i in range(dim):
            vec = None
            if f.kind == "A":
                j = 0 if i != 0 else 1
                v = [0] * d.ambient_dim
                v[off + i], v[off + j] = 1, -1
                img = d.ambient_roots[w.perm[d.ambient_index(v)]]
                k = next(t for t, x in enumerate(img) if x == 1)
                out.append((k, 1))
                continue
            if f.kind in ("B", "C"):
                v = [0] * d.ambient_dim
                v[off + i] = 1 if f.kind == "B" else 2
                vec = d.ambient_roots[w.perm[d.ambient_index(v)]]
            else:
                j = 0 if i != 0 else 1
                v1 = [0] * d.ambient_dim
                v2 = [0] * d.ambient_dim
                v1[off + i], v1[off + j] = 1, -1
                v2[off + i], v2[off + j] = 1, 1
                a = d.ambient_roots[w.perm[d.ambient_index(v1)]]
                b = d.ambient_roots[w.perm[d.ambient_index(v2)]]
                vec = tuple((x + y) // 2 for x, y in zip(a, b))
            k = next(t for t, x in enumerate(vec) if x != 0)
            out.append((k, 1 if vec[k] > 0 else -1))
    return out


def window(w: WeylElement) -> list[list[int]]:
    """Window notation per factor.

    Type A_m: the permutation of 1..m+1 with w(e_i) = e_{w(i)}.  Type B_n:
    the values w(1..n) inside S_{2n+1} (w(e_i) = -e_k is written 2n+2-k).
    Types C_n and D_n: the values w(1..n) inside S_{2n} (-e_k is 2n+1-k).
    """
    d = w.datum
    if not d.is_classical:
        raise ElementParseError("window notation needs classical factors")
    img = _ambient_image_of_basis(w)
    out = []
    pos = 0
    for f in d.factors:
        row = []
        for i in range(f.ambient_dim):
            k, sgn = img[pos + i]
            k -= f.ambient_offset
            if f.kind == "A" or sgn > 0:
                row.append(k + 1)
            else:
                top = 2 * f.rank + 2 if f.kind == "B" else 2 * f.rank + 1
                row.append(top - (k + 1))
        pos += f.ambient_dim
        out.append(row)
    return out


def from_window(datum: RootDatum, rows: Sequence[Sequence[int]]) -> WeylElement:
    """Inverse of :func:`window`."""
    if not datum.is_classical:
        raise ElementParseError("window notation needs classical factors")
    if len(rows) != len(datum.factors):
        raise ElementParseError(f"expected {len(datum.factors)} window(s), got {len(rows)}")
    images: list[tuple[int, int]] = []
    for f, row in zip(datum.factors, rows):
        n = f.rank
        if len(row) != f.ambient_dim:
            raise ElementParseError(f"factor {f.kind}{n} needs {f.ambient_dim} window entries, got {len(row)}")
        if f.kind == "A":
            if sorted(row) != list(range(1, f.ambient_dim + 1)):
                raise ElementParseError(f"{list(row)} is not a permutation of 1..{f.ambient_dim}")
            images.extend((f.ambient_offset + v - 1, 1) for v in row)
            continue
        top = 2 * n + 2 if f.kind == "B" else 2 * n + 1
        seen = set()
        for v in row:
            if not 1 <= v <= top or (f.kind == "B" and v == n + 1):
                raise ElementParseError(f"window value {v} out of range for {f.kind}{n}")
            k, sgn = (v, 1) if v <= n else (top - v, -1)
            if k in seen:
                raise ElementParseError(f"window {list(row)} repeats an axis")
            seen.add(k)
            images.append((f.ambient_offset + k - 1, sgn))
        if f.kind == "D" and sum(1 for v in row if v > n) % 2:
            raise ElementParseError("window is not an element of W(D_n): odd number of sign changes")
    perm = []
    for v in datum.ambient_roots:
        out = [0] * datum.ambient_dim
        for i, c in enumerate(v):
            if c:
                k, sgn = images[i]
                out[k] += sgn * c
        tv = tuple(out)
        if tv not in datum._ambient_index:
            raise ElementParseError("window does not define an element of the Weyl group")
        perm.append(datum._ambient_index[tv])
    if sorted(perm) != list(range(len(perm))):
        raise ElementParseError("window does not define an element of the Weyl group")
    return WeylElement(datum, perm)


def format_element(w: WeylElement) -> str:
    d = w.datum
    if d.is_classical:
        return "|".join("[" + ",".join(str(x) for x in row) + "]" for row in window(w))
    word = w.reduced_word()
    return "*".join(f"s{i + 1}" for i in word) if word else "e"


_WORD_RE = re.compile(r"^s(\d+)$")


def parse_element(datum: RootDatum, text: str) -> WeylElement:
    """Parse window notation ``[..]|[..]`` or a word ``s3*s1*s4`` (1-based)."""
    t = text.strip().replace(" ", "")
    if t in ("e", "1", "id", ""):
        return identity(datum)
    if t.startswith("["):
        rows = []
        for part in t.split("|"):
            if not (part.startswith("[") and part.endswith("]")):
                raise ElementParseError(f"bad window {part!r}")
            body = part[1:-1]
            try:
                rows.append([int(x) for x in body.split(",") if x != ""])
            except ValueError as exc:
                raise ElementParseError(f"bad window {part!r}") from exc
        return from_window(datum, rows)
    word = []
    for tok in t.split("*"):
        m = _WORD_RE.match(tok)
        if not m:
            raise ElementParseError(f"bad word letter {tok!r}")
        i = int(m.group(1)) - 1
        if not 0 <= i < datum.rank:
            raise ElementParseError(f"simple index {i + 1} out of range")
        word.append(i)
    return from_word(datum, word)
