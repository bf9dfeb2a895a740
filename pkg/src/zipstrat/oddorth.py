"""Computations for the odd orthogonal group SO(2n+1) with its minuscule cocharacter.

Weyl group elements are also handled as permutations of 1..2n+1 with
w(i) + w(2n+2-i) = 2n+2.  Position i <= n stands for e_i, position n+1 is
fixed and position 2n+2-i stands for -e_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import prod

from .rootdata import IndexOutOfRange, RootDataError, RootDatum, build_root_datum, coroot_ambient
from .weyl import (
    WeylElement,
    bruhat_lower_neighbors,
    from_window,
    from_word,
    inverse,
    longest_element,
    multiply,
    reflection,
    window,
)


class RangeViolation(RootDataError):
    pass


class SingularSystem(RootDataError):
    pass


# ---------------------------------------------------------------------------
# Signed permutations


@dataclass(frozen=True)
class SignedPermutation:
    n: int
    images: tuple[int, ...]  # w(1), ..., w(2n+1)

    def __post_init__(self) -> None:
        m = 2 * self.n + 1
        if len(self.images) != m or sorted(self.images) != list(range(1, m + 1)):
            raise RootDataError(f"{self.images} is not a permutation of 1..{m}")
        for i in range(1, m + 1):
            if self(i) + self(m + 1 - i) != m + 1:
                raise RootDataError(f"{self.images} does not commute with i -> 2n+2-i")

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    @classmethod
    def from_window(cls, n: int, head) -> "SignedPermutation":
        head = list(head)
        full = head + [n + 1] + [2 * n + 2 - v for v in reversed(head)]
        return cls(n, tuple(full))

    @classmethod
    def from_weyl(cls, w: WeylElement) -> "SignedPermutation":
        (head,) = window(w)
        return cls.from_window(w.datum.rank, head)

    def to_weyl(self, datum: RootDatum) -> WeylElement:
        return from_window(datum, [list(self.images[: self.n])])

    def inverse(self) -> "SignedPermutation":
        inv = [0] * len(self.images)
        for i, v in enumerate(self.images, start=1):
            inv[v - 1] = i
        return SignedPermutation(self.n, tuple(inv))

    def act(self, lam) -> tuple:
        """Action on a weight in Z^n: e_i -> +-e_k."""
        n = self.n
        out = [0] * n
        for i, c in enumerate(lam, start=1):
            v = self(i)
            if v <= n:
                out[v - 1] += c
            else:
                out[2 * n + 2 - v - 1] -= c
        return tuple(out)

    def __str__(self) -> str:
        return "[" + ",".join(str(v) for v in self.images[: self.n]) + "]"


def inversions_m(w: SignedPermutation) -> int:
    n = w.n
    return sum(1 for i in range(1, n + 1) for j in range(i + 1, n + 1) if w(i) > w(j))


def inversions_n(w: SignedPermutation) -> int:
    n = w.n
    return sum(1 for i in range(1, n + 1) for j in range(i, n + 1) if w(i) + w(j) > 2 * n + 1)


def length_mn(w: SignedPermutation) -> int:
    """Length as M(w) + N(w)."""
    return inversions_m(w) + inversions_n(w)


def rank_table(w: SignedPermutation) -> list[list[int]]:
    """r_w(i, j) = #{k <= i : w(k) <= j} for 1 <= i, j <= 2n."""
    m = 2 * w.n
    out = []
    for i in range(1, m + 1):
        row = []
        for j in range(1, m + 1):
            row.append(sum(1 for k in range(1, i + 1) if w(k) <= j))
        out.append(row)
    return out


def bruhat_leq_rank(w1: SignedPermutation, w2: SignedPermutation) -> bool:
    """w1 <= w2 iff r_{w1} >= r_{w2} entrywise."""
    a, b = rank_table(w1), rank_table(w2)
    return all(x >= y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


# ---------------------------------------------------------------------------
# The elements x_j of ^I W


@lru_cache(maxsize=None)
def bn(n: int) -> RootDatum:
    if n < 2:
        raise IndexOutOfRange("the odd orthogonal suite needs n >= 2")
    return build_root_datum("B", n)


def xj_word(n: int, j: int) -> tuple[int, ...]:
    """Reduced word (0-based letters) of x_j."""
    if not 0 <= j <= 2 * n - 1:
        raise IndexOutOfRange(f"x_j needs 0 <= j <= {2 * n - 1}, got {j}")
    if j == 2 * n - 1:
        return ()
    if j >= n - 1:
        i = 2 * n - 1 - j
        return tuple(range(i))
    return tuple(range(n)) + tuple(range(n - 2, j - 1, -1))


def xj_element(n: int, j: int) -> WeylElement:
    return from_word(bn(n), xj_word(n, j))


def xj(n: int, j: int) -> SignedPermutation:
    return SignedPermutation.from_weyl(xj_element(n, j))


def index_of_x(w: WeylElement) -> int | None:
    """j with w = x_j, or None."""
    n = w.datum.rank
    for j in range(2 * n):
        if xj_element(n, j) == w:
            return j
    return None


# ---------------------------------------------------------------------------
# Admissible pairs


@dataclass(frozen=True)
class AdmissiblePair:
    i: int
    j: int
    cls: int
    root: tuple[int, ...]  # ambient coordinates


def _is_admissible(w: SignedPermutation, i: int, j: int) -> bool:
    if not (i < j and w(i) > w(j)):
        return False
    n = w.n
    return not any(w(j) < w(k) < w(i) for k in range(i + 1, j) if k != n + 1)


def admissible_pairs(w: SignedPermutation) -> list[AdmissiblePair]:
    """The pairs (i, j) whose transpositions give the Bruhat-lower neighbors of w.

    Positions run over 1..2n+1.  Class 1: i < j <= n, root e_i - e_j.
    Class 2: i <= n < j, j != 2n+2-i, w(i), w(j) <= n, root e_i + e_{2n+2-j}.
    Class 3: i <= n, j = 2n+2-i, root e_i.
    """
    n = w.n
    out = []
    for i in range(1, n + 1):
        for j in range(i + 1, 2 * n + 2):
            if not _is_admissible(w, i, j):
                continue
            root = [0] * n
            if j <= n:
                root[i - 1], root[j - 1] = 1, -1
                cls = 1
            elif j == 2 * n + 2 - i:
                root[i - 1] = 1
                cls = 3
            elif w(i) <= n and w(j) <= n:
                root[i - 1] += 1
                root[2 * n + 2 - j - 1] += 1
                cls = 2
            else:
                continue
            out.append(AdmissiblePair(i, j, cls, tuple(root)))
    return out


def pair_neighbor(w: WeylElement, pair: AdmissiblePair) -> WeylElement:
    """gamma(gamma'(i, j)) = w s_{gamma'(i, j)}."""
    d = w.datum
    return multiply(w, reflection(d, d.ambient_index(pair.root)))


def neighbors_from_pairs(w: WeylElement) -> dict[tuple[int, ...], WeylElement]:
    sp = SignedPermutation.from_weyl(w)
    return {p.root: pair_neighbor(w, p) for p in admissible_pairs(sp)}


# ---------------------------------------------------------------------------
# Canonical types, neighbors and smooth loci


def bn_canonical_types(n: int) -> dict[int, frozenset[int]]:
    """j -> I_j (0-based simple indices): Delta minus alpha_1..alpha_{j+1}, mirrored at 2n-1-j."""
    if n < 2:
        raise IndexOutOfRange("need n >= 2")
    out = {}
    for j in range(n):
        t = frozenset(range(j + 1, n))
        out[j] = t
        out[2 * n - 1 - j] = t
    return out


def w_ir(n: int, r: int, i: int) -> WeylElement:
    """The lower neighbor w_i^{(r)} of x_r attached to the pair (i, 2n+1-r) or (i, 2n-r)."""
    if r <= n - 1:
        if not 1 <= i <= r:
            raise RangeViolation(f"w_i^(r) needs 1 <= i <= r for r < n, got i={i}, r={r}")
        col = 2 * n + 1 - r
    else:
        if not 1 <= i <= 2 * n - 1 - r:
            raise RangeViolation(f"w_i^(r) needs 1 <= i <= 2n-1-r for r >= n, got i={i}, r={r}")
        col = 2 * n - r
    x = xj_element(n, r)
    sp = SignedPermutation.from_weyl(x)
    for p in admissible_pairs(sp):
        if (p.i, p.j) == (i, col):
            return pair_neighbor(x, p)
    raise RootDataError(f"({i}, {col}) is not an admissible pair of x_{r}")


def bn_lower_neighbors(n: int, j: int, r: int) -> list[WeylElement]:
    """{x_{r+1}} together with w_i^{(r)} for 1 <= i <= j."""
    if not (0 <= j <= n - 1 and j <= r < 2 * n - 1 - j):
        raise RangeViolation(f"need 0 <= j <= n-1 and j <= r < 2n-1-j, got j={j}, r={r}")
    return [xj_element(n, r + 1)] + [w_ir(n, r, i) for i in range(1, j + 1)]


def projection_table(datum: RootDatum) -> dict:
    """perm of w_i^{(r)} -> (x_{2n-i}, (r, i)) for all admissible (r, i)."""
    n = datum.rank
    key = "bn_projection"
    if key not in datum.cache:
        table = {}
        for r in range(0, 2 * n - 1):
            top = r if r <= n - 1 else 2 * n - 1 - r
            for i in range(1, top + 1):
                w = w_ir(n, r, i)
                img = xj_element(n, 2 * n - i)
                # translate into the caller's datum object
                table[w.perm] = (WeylElement(datum, img.perm), (r, i))
        datum.cache[key] = table
    return datum.cache[key]


def bn_smooth_locus(n: int, j: int) -> frozenset[int]:
    """Indices i whose strata form the smooth locus of the closure of the x_j stratum."""
    if not 0 <= j <= 2 * n - 1:
        raise IndexOutOfRange(f"need 0 <= j <= {2 * n - 1}")
    if j <= n - 1:
        return frozenset(range(j, 2 * n - j))
    return frozenset([j])


def y_gamma(n: int, j: int) -> list[WeylElement]:
    """The strata x_j, ..., x_{2n-1-j}."""
    if not 0 <= j <= n - 1:
        raise RangeViolation("Y_j needs 0 <= j <= n-1")
    return [xj_element(n, i) for i in range(j, 2 * n - j)]


# ---------------------------------------------------------------------------
# Hasse invariants and Chevalley multiplicities


def xtilde(n: int, j: int) -> WeylElement:
    """x_j w_{0, I_j}."""
    return multiply(xj_element(n, j), longest_element(bn(n), bn_canonical_types(n)[j]))


def _solve(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over the rationals."""
    m = len(A)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for c in range(m):
        piv = next((r for r in range(c, m) if M[r][c] != 0), None)
        if piv is None:
            raise SingularSystem("linear system is singular")
        M[c], M[piv] = M[piv], M[c]
        for r in range(m):
            if r != c and M[r][c] != 0:
                f = M[r][c] / M[c][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [M[i][m] / M[i][i] for i in range(m)]


def hasse_matrix(n: int, j: int, p: int) -> list[list[Fraction]]:
    """Matrix of eta -> eta - p z xtilde_j^{-1} eta on Z^n."""
    d = bn(n)
    z = multiply(longest_element(d, range(1, n)), longest_element(d))
    op = SignedPermutation.from_weyl(multiply(z, inverse(xtilde(n, j))))
    cols = []
    for k in range(n):
        e = [0] * n
        e[k] = 1
        img = op.act(e)
        cols.append([Fraction(e[t] - p * img[t]) for t in range(n)])
    return [[cols[c][r] for c in range(n)] for r in range(n)]


@dataclass(frozen=True)
class HasseCharacter:
    n: int
    j: int
    p: int
    m: int
    eta: tuple[int, ...]
    residual: tuple[Fraction, ...]


def hasse_character(n: int, j: int, p: int) -> HasseCharacter:
    """Least m >= 1 and integral eta with eta - p z xtilde_j^{-1} eta = m eta_omega."""
    if not 0 <= j <= n - 1:
        raise IndexOutOfRange(f"need 0 <= j <= {n - 1}")
    if p < 2:
        raise RootDataError("p must be at least 2")
    A = hasse_matrix(n, j, p)
    omega = [Fraction(-1)] + [Fraction(0)] * (n - 1)
    unit = _solve(A, omega)
    m = 1
    for x in unit:
        m = m * x.denominator // _gcd(m, x.denominator)
    eta = [x * m for x in unit]
    residual = tuple(sum(A[r][c] * eta[c] for c in range(n)) - m * omega[r] for r in range(n))
    return HasseCharacter(n, j, p, m, tuple(int(x) for x in eta), residual)


def _gcd(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


def hasse_eta_formula(n: int, j: int, p: int, m: int) -> tuple[Fraction, ...]:
    """-(m/(p^{j+1}-1)) (-1, p^j, ..., p, 0, ..., 0)."""
    c = Fraction(m, p ** (j + 1) - 1)
    v = [-1] + [p ** (j - t) for t in range(j)] + [0] * (n - 1 - j)
    return tuple(-c * x for x in v)


def beta_wall(n: int, j: int) -> tuple[int, ...]:
    """The root beta with xtilde_j s_beta giving the next stratum, in ambient coordinates."""
    v = [0] * n
    if j <= n - 2:
        v[j], v[j + 1] = 1, -1
    else:
        v[n - 1] = 1
    return tuple(v)


def chevalley_divisor(lam, w: WeylElement) -> list[tuple[WeylElement, Fraction]]:
    """(w s_alpha, -<lam, w alpha^vee>) over alpha in E_w."""
    d = w.datum
    out = []
    for k, v in sorted(bruhat_lower_neighbors(w).items()):
        cv = coroot_ambient(d, w.perm[k])
        out.append((v, -sum(Fraction(a) * b for a, b in zip(lam, cv))))
    return out


def wall_multiplicity(lam, w: WeylElement, alpha_ambient) -> Fraction:
    """-<lam, w alpha^vee> for a single positive root alpha."""
    d = w.datum
    k = d.ambient_index(alpha_ambient)
    cv = coroot_ambient(d, w.perm[k])
    return -sum(Fraction(a) * b for a, b in zip(lam, cv))


def cycle_class(j: int, p: int, n: int | None = None) -> int:
    """Coefficient of [omega] in the class of the closure of x_j.

    Each closure is cut out in the previous one by a Hasse invariant, so the
    coefficient is the product of the solved weights m_0, ..., m_{j-1}.  Any
    n > j - 1 gives the same weights; the smallest admissible one is used.
    """
    if j < 0:
        raise IndexOutOfRange("j must be nonnegative")
    n = max(j, 2) if n is None else n
    if j > n:
        raise IndexOutOfRange(f"need j <= n, got j={j}, n={n}")
    return prod(hasse_character(n, i, p).m for i in range(j))


@dataclass(frozen=True)
class WallReport:
    character: HasseCharacter
    expected_m: int
    beta: tuple[int, ...]
    beta_multiplicity: Fraction
    i_walls: dict[int, Fraction]  # simple index in I_j -> multiplicity

    @property
    def residual_zero(self) -> bool:
        return all(x == 0 for x in self.character.residual)

    def to_json(self) -> dict:
        h = self.character
        return {
            "n": h.n,
            "j": h.j,
            "p": h.p,
            "m": h.m,
            "expected_m": self.expected_m,
            "eta": list(h.eta),
            "residual_zero": self.residual_zero,
            "beta": list(self.beta),
            "beta_multiplicity": str(self.beta_multiplicity),
            "I_j_wall_multiplicities": {str(a + 1): str(v) for a, v in sorted(self.i_walls.items())},
        }


def hasse_walls(n: int, j: int, p: int) -> WallReport:
    """Hasse character of x_j with its Chevalley multiplicities on the beta wall and the I_j walls."""
    h = hasse_character(n, j, p)
    d = bn(n)
    xt = xtilde(n, j)
    beta = beta_wall(n, j)
    walls = {
        a: wall_multiplicity(h.eta, xt, d.ambient_roots[d.simple_index(a)]) for a in sorted(bn_canonical_types(n)[j])
    }
    return WallReport(h, p ** (j + 1) - 1, beta, wall_multiplicity(h.eta, xt, beta), walls)
