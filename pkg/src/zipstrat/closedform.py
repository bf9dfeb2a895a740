"""Closed-form length-one criteria for type A data and minuscule witnesses for B, C, D, E.

All simple roots of a type A factor are labelled by ``1..n-1`` inside
``Z/nZ``; the label 0 stands for the missing root.  Sets returned to callers
use the engine's global 0-based simple root indices so they can be compared
with :func:`zipstrat.canonical.canonical_type` directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .rootdata import RootDataError, build_root_datum, builtin_frobenius
from .weyl import longest_element, simple_root_set
from .zipdatum import CocharacterDatum


class BadSignature(RootDataError):
    pass


class NotMinusculePattern(RootDataError):
    pass


@dataclass(frozen=True)
class SignatureDatum:
    kind: str  # split | unitary-inert | unitary-restricted | split-restricted
    n: int
    r: tuple[int, ...]


def _global(n: int, factor: int, labels) -> frozenset[int]:
    """Labels 1..n-1 of factor ``factor`` (1-based) to global simple indices."""
    return frozenset((factor - 1) * (n - 1) + (l - 1) for l in labels)


def _check_rs(n: int, rs: Sequence[int]) -> tuple[int, ...]:
    rs = tuple(int(r) for r in rs)
    if n < 2:
        raise BadSignature(f"need n >= 2, got {n}")
    if not rs or any(not 0 <= r <= n for r in rs):
        raise BadSignature(f"need 0 <= r_i <= n, got {rs}")
    return rs


def _check_j(n: int, rs: tuple[int, ...], j: int) -> None:
    if not 1 <= j <= len(rs):
        raise BadSignature(f"factor index j={j} out of range 1..{len(rs)}")
    if not 0 < rs[j - 1] < n:
        raise BadSignature(f"factor {j} is compact (r_j = {rs[j - 1]}): no length one stratum there")


# ---------------------------------------------------------------------------
# GL_n


@dataclass(frozen=True)
class GLnLengthOne:
    smooth: bool
    I_id: frozenset[int]
    I_alpha: frozenset[int]
    delta: int


def gln_split_length_one(n: int, r: int, s: int) -> GLnLengthOne:
    """GL_n of signature (r, s): smooth iff gcd(r, s) = 1."""
    if r < 1 or s < 1 or r + s != n:
        raise BadSignature(f"need r, s >= 1 and r + s = n, got n={n}, r={r}, s={s}")
    delta = gcd(r, s)
    I_id = frozenset(i - 1 for i in range(1, n) if i % delta)
    I_alpha = frozenset(i - 1 for i in range(1, n) if i % delta not in {(-1) % delta, 0, 1 % delta})
    return GLnLengthOne(delta == 1, I_id, I_alpha, delta)


# ---------------------------------------------------------------------------
# Weil restriction of GL_n


def _s_of(n: int, rs: tuple[int, ...], i: int) -> int:
    """s_i = n - r_i with i read modulo d (1-based)."""
    return n - rs[(i - 1) % len(rs)]


def _coset_sums(n: int, rs: tuple[int, ...], start: int, delta: int) -> set[int]:
    """{ s_start + s_{start-1} + ... (N terms) mod delta : 1 <= N <= d }."""
    out, acc = set(), 0
    for N in range(1, len(rs) + 1):
        acc += _s_of(n, rs, start + 1 - N)
        out.add(acc % delta)
    return out


def split_delta(n: int, rs: Sequence[int]) -> int:
    rs = _check_rs(n, rs)
    return gcd(sum(n - r for r in rs), n)


def restricted_split_id_type(n: int, rs: Sequence[int]) -> frozenset[int]:
    """Type of P_id: in factor i remove every class of sum_{l=1}^N s_{i-l} modulo delta."""
    rs = _check_rs(n, rs)
    delta = split_delta(n, rs)
    out: set[int] = set()
    for i in range(1, len(rs) + 1):
        removed = _coset_sums(n, rs, i - 1, delta)
        out |= _global(n, i, [l for l in range(1, n) if l % delta not in removed])
    return frozenset(out)


def restricted_split_alpha_type(n: int, rs: Sequence[int], j: int) -> frozenset[int]:
    """Type of P_j for the simple reflection in factor j.

    Factor i additionally loses the classes of +-1 + sum_{l=1}^{d+i-j-1} s_{i-l}.
    """
    rs = _check_rs(n, rs)
    _check_j(n, rs, j)
    d = len(rs)
    delta = split_delta(n, rs)
    out: set[int] = set()
    for i in range(1, d + 1):
        removed = _coset_sums(n, rs, i - 1, delta)
        m = (d + i - j - 1) % d or d  # number of terms, read in 1..d
        shift = sum(_s_of(n, rs, i - l) for l in range(1, m + 1))
        removed |= {(shift + 1) % delta, (shift - 1) % delta}
        out |= _global(n, i, [l for l in range(1, n) if l % delta not in removed])
    return frozenset(out)


def restricted_split_length_one(n: int, rs: Sequence[int], j: int) -> bool:
    """Smoothness of the closure of X_{alpha_j}.

    Both +1 and -1 must occur among the classes of s_j, s_j + s_{j-1}, ...
    (d partial sums) modulo delta = gcd(s_1 + ... + s_d, n).
    """
    rs = _check_rs(n, rs)
    _check_j(n, rs, j)
    delta = split_delta(n, rs)
    sums = _coset_sums(n, rs, j, delta)
    return 1 % delta in sums and (-1) % delta in sums


def restricted_split_d2(rs: Sequence[int], n: int) -> bool:
    """d = 2: every length one closure is smooth iff delta = 1, or delta = 2 with r_1, r_2 odd."""
    rs = _check_rs(n, rs)
    if len(rs) != 2:
        raise BadSignature("this criterion is for two factors")
    delta = split_delta(n, rs)
    return delta == 1 or (delta == 2 and rs[0] % 2 == 1 and rs[1] % 2 == 1)


# ---------------------------------------------------------------------------
# Orbit form, valid for split and unitary Weil restrictions alike
#
# phi_id acts on labels (i, l) in factor i by an affine bijection of Z/nZ:
#   (i, l) -> (i+1, l - r_i)        for i < d, and on the last factor
#   (d, l) -> (1, l - r_d)          (split)   or   (1, r_d - l)   (unitary).
# The labels 0 and r_i are outside I.  A label belongs to I_id iff its cycle
# avoids them; the reflection in alpha_j kills the labels r_j +- 1 of factor j
# as well, so X_j is smooth iff those cycles already met a forbidden label.


def _orbit_step(n: int, rs: tuple[int, ...], unitary: bool, i: int, l: int) -> tuple[int, int]:
    d = len(rs)
    if i < d:
        return i + 1, (l - rs[i - 1]) % n
    return 1, ((rs[d - 1] - l) if unitary else (l - rs[d - 1])) % n


def _forbidden(n: int, rs: tuple[int, ...]) -> set[tuple[int, int]]:
    return {(i, 0) for i in range(1, len(rs) + 1)} | {(i, rs[i - 1] % n) for i in range(1, len(rs) + 1)}


def _cycle(n, rs, unitary, start):
    cur, out = start, [start]
    while True:
        cur = _orbit_step(n, rs, unitary, *cur)
        if cur == start:
            return out
        out.append(cur)


def orbit_types(n: int, rs: Sequence[int], unitary: bool, j: int | None = None) -> frozenset[int]:
    """I_id (j=None) or I_{s_alpha_j} by following phi_id cycles."""
    rs = _check_rs(n, rs)
    bad = _forbidden(n, rs)
    if j is not None:
        _check_j(n, rs, j)
        bad |= {(j, (rs[j - 1] + 1) % n), (j, (rs[j - 1] - 1) % n)}
    out: set[int] = set()
    for i in range(1, len(rs) + 1):
        for l in range(1, n):
            if not bad.intersection(_cycle(n, rs, unitary, (i, l))):
                out |= _global(n, i, [l])
    return frozenset(out)


def length_one_orbit(n: int, rs: Sequence[int], j: int, unitary: bool) -> bool:
    rs = _check_rs(n, rs)
    _check_j(n, rs, j)
    bad = _forbidden(n, rs)
    for e in (1, -1):
        start = (j, (rs[j - 1] + e) % n)
        if start in bad:
            continue
        if not bad.intersection(_cycle(n, rs, unitary, start)):
            return False
    return True


# ---------------------------------------------------------------------------
# Unitary groups


@dataclass(frozen=True)
class UnitaryInert:
    smooth: bool
    I_id: frozenset[int]
    I_w: frozenset[int]


def unitary_inert_length_one(n: int, r: int) -> UnitaryInert:
    """Inert unitary group, signature (r, n-r): I_w = I minus {1, r-1, r+1, n-1}."""
    s = n - r
    if r < 1 or s < 1:
        raise BadSignature(f"need r, s >= 1, got r={r}, s={s}")
    I = {l for l in range(1, n) if l != r}
    I_w = I - {1, r - 1, r + 1, n - 1}
    return UnitaryInert(r == 1 and s == 1, _global(n, 1, I), _global(n, 1, I_w))


def unitary_restricted_condition5(n: int, rs: Sequence[int], j: int) -> bool:
    """Membership test: r_j + ... + r_{d-1} +- 1 and r_0 + ... + r_{j-1} +- 1 in the partial-sum set.

    Indices are read modulo d, so r_0 = r_d.  This literal form agrees with
    the orbit criterion for d <= 2 only; see :func:`unitary_restricted_length_one`.
    """
    rs = _check_rs(n, rs)
    _check_j(n, rs, j)
    d = len(rs)

    def R(l: int) -> int:
        return rs[(l - 1) % d]

    A = sum(R(l) for l in range(j, d))
    B = sum(R(l) for l in range(0, j))
    S = {sum(R(l) for l in range(N, d + 1)) % n for N in range(1, d + 1)}
    S |= {sum(R(l) for l in range(1, N + 1)) % n for N in range(1, d + 1)}
    S.add(0)
    return all((x + e) % n in S for x in (A, B) for e in (1, -1))


def unitary_restricted_length_one(d: int, n: int, rs: Sequence[int], j: int) -> bool:
    """Smoothness of the closure of X_j for the Weil restriction of a unitary group."""
    rs = _check_rs(n, rs)
    if len(rs) != d:
        raise BadSignature(f"expected {d} signature entries, got {len(rs)}")
    return length_one_orbit(n, rs, j, unitary=True)


def unitary_restricted_d2(n: int, rs: Sequence[int], j: int) -> bool:
    """The short d = 2 lists: X_1 at (2,1), (n-2,n-1); X_2 at (n-2,1), (2,n-1).

    These lists are strictly smaller than what the general criterion gives
    (which also admits e.g. (1,1) for X_1); kept only for comparison.
    """
    rs = _check_rs(n, rs)
    if len(rs) != 2:
        raise BadSignature("this criterion is for two factors")
    _check_j(n, rs, j)
    if j == 1:
        return rs in ((2, 1), (n - 2, n - 1))
    return rs in ((n - 2, 1), (2, n - 1))


# ---------------------------------------------------------------------------
# Minuscule data of types B, C, D, E6, E7

_MINUSCULE = {
    "B": lambda n: {1},
    "C": lambda n: {n},
    "D": lambda n: {1, n - 1, n},
    "E6": lambda n: {1, 6},
    "E7": lambda n: {7},
}


def _min_rank(kind: str) -> int:
    return {"B": 2, "C": 2, "D": 4, "E6": 6, "E7": 7}[kind]


def witness_labels(kind: str, n: int) -> frozenset[int]:
    """Per-factor dense witness, 1-based node labels."""
    if kind == "B":
        return frozenset(range(2, n + 1))
    if kind == "C":
        # dropping alpha_{n-1} as well would leave alpha_n isolated
        return frozenset(range(1, n))
    if kind == "D":
        return frozenset(range(2, n - 1))
    if kind == "E6":
        return frozenset({2, 3, 4, 5})
    if kind == "E7":
        return frozenset(range(1, 7))
    raise NotMinusculePattern(f"no minuscule witness for type {kind}")


@dataclass(frozen=True)
class MinusculeWitness:
    cd: CocharacterDatum
    gamma: frozenset[int]
    dense: bool
    sigma_stable: bool
    w0_stable: bool
    w0I_stable: bool
    inside_I: bool

    @property
    def verdict(self) -> str:
        ok = self.dense and self.sigma_stable and self.w0_stable and self.w0I_stable and self.inside_I
        return "open-stratum-only" if ok else "witness-failed"

    def to_json(self) -> dict:
        return {
            "datum": self.cd.datum.label,
            "I": sorted(a + 1 for a in self.cd.I),
            "gamma": sorted(a + 1 for a in self.gamma),
            "dense": self.dense,
            "sigma_stable": self.sigma_stable,
            "w0_stable": self.w0_stable,
            "w0I_stable": self.w0I_stable,
            "inside_I": self.inside_I,
            "verdict": self.verdict,
        }


def is_dense(cartan, K) -> bool:
    """No simple root is orthogonal to all of K."""
    K = list(K)
    return all(any(cartan[a][b] != 0 for b in K) for a in range(len(cartan)))


def _stable_up_to_sign(datum, w, K: frozenset[int]) -> bool:
    roots = simple_root_set(datum, K)
    img = {w.perm[k] for k in roots}
    neg = {datum.neg(k) for k in roots}
    return img == set(roots) or img == neg


def minuscule_datum(kind: str, n: int, signature: Sequence[int], frobenius: str | None = None) -> CocharacterDatum:
    """Weil restriction data: ``signature[i]`` is the non-compact node of factor i (0 = compact)."""
    kind = kind.upper()
    if kind not in _MINUSCULE:
        raise NotMinusculePattern(f"type {kind} has no minuscule pattern handled here")
    if kind in ("E6", "E7"):
        n = int(kind[1])
    if n < _min_rank(kind):
        raise NotMinusculePattern(f"type {kind}{n} is below the supported rank {_min_rank(kind)}")
    sig = [int(a) for a in signature]
    if not sig or all(a == 0 for a in sig):
        raise NotMinusculePattern("at least one factor must be non-compact")
    for a in sig:
        if a and a not in _MINUSCULE[kind](n):
            raise NotMinusculePattern(f"node {a} is not minuscule in type {kind}{n}")
    d = len(sig)
    datum = build_root_datum([(kind, n)] * d)
    I = frozenset(range(datum.rank)) - {f * n + a - 1 for f, a in enumerate(sig) if a}
    if frobenius is None:
        frobenius = "shift" if d > 1 else "trivial"
    return CocharacterDatum(datum, I, builtin_frobenius(datum, frobenius), label=f"{kind}{n}^{d}{tuple(sig)}")


def minuscule_bcde_onedim(kind: str, n: int, signature: Sequence[int], frobenius: str | None = None) -> MinusculeWitness:
    """Dense witness inside I_id forcing every length one closure to be singular."""
    cd = minuscule_datum(kind, n, signature, frobenius)
    d = len(signature)
    kind = kind.upper()
    rank0 = cd.datum.rank // d
    labels = witness_labels(kind, rank0)
    gamma = frozenset(f * rank0 + l - 1 for f in range(d) for l in labels)
    datum = cd.datum
    return MinusculeWitness(
        cd,
        gamma,
        is_dense(datum.cartan, gamma),
        cd.sigma.image(gamma) == gamma,
        _stable_up_to_sign(datum, longest_element(datum), gamma),
        gamma <= cd.I and _stable_up_to_sign(datum, longest_element(datum, cd.I), gamma),
        gamma <= cd.I,
    )

