"""Finite root systems of types A, B, C, D, E6 and E7.

Roots are integer vectors in the basis of simple roots.  Reducible systems
(for instance those coming from a Weil restriction) index their simple roots
globally, one contiguous block per factor.  Classical factors additionally
carry the usual Bourbaki coordinates ``e_1, ..., e_m`` so that weights can be
written down the way one writes characters of a torus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple[int, ...]


class RootDataError(ValueError):
    """Base class for problems with a root datum or its specification."""


class UnsupportedType(RootDataError):
    pass


class RankOutOfRange(RootDataError):
    pass


class IndexOutOfRange(RootDataError):
    pass


class DimensionMismatch(RootDataError):
    pass


class IncompatibleKind(RootDataError):
    pass


class ParseError(RootDataError):
    """Raised for malformed datum specification text."""

    def __init__(self, message: str, line: int | None = None, text: str | None = None):
        if line is not None:
            message = f"line {line}: {message}" + (f" ({text!r})" if text is not None else "")
        super().__init__(message)
        self.line = line


SUPPORTED_TYPES = ("A", "B", "C", "D", "E6", "E7")


# ---------------------------------------------------------------------------
# Cartan matrices, Bourbaki numbering.  a[i][j] = <alpha_j, alpha_i^vee>.


def cartan_matrix(kind: str, rank: int) -> list[list[int]]:
    """Cartan matrix of an irreducible system, 0-based Bourbaki numbering."""
    kind = kind.upper()
    if kind in ("E6", "E7"):
        if rank not in (0, int(kind[1])):
            raise RankOutOfRange(f"{kind} has rank {kind[1]}, got {rank}")
        rank = int(kind[1])
    elif kind not in ("A", "B", "C", "D"):
        raise UnsupportedType(f"unsupported Dynkin type {kind!r}")
    minimum = {"A": 1, "B": 2, "C": 2, "D": 3}.get(kind, rank)
    if rank < minimum:
        raise RankOutOfRange(f"type {kind} needs rank >= {minimum}, got {rank}")
    a = [[0] * rank for _ in range(rank)]
    for i in range(rank):
        a[i][i] = 2

    def link(i: int, j: int, aij: int = -1, aji: int = -1) -> None:
        a[i][j] = aij
        a[j][i] = aji

    if kind in ("A", "B", "C", "D"):
        n = rank
        for i in range(n - 2):
            link(i, i + 1)
        if kind == "A":
            link(n - 2, n - 1)
        elif kind == "B":
            # alpha_n short: <alpha_{n-1}, alpha_n^vee> = -2
            link(n - 2, n - 1, aij=-1, aji=-2)
        elif kind == "C":
            # alpha_n long: <alpha_n, alpha_{n-1}^vee> = -2
            link(n - 2, n - 1, aij=-2, aji=-1)
        else:
            link(n - 3, n - 1)
    else:
        # E_r: 1-3-4-5-6(-7), 2-4
        link(0, 2)
        link(2, 3)
        link(1, 3)
        for i in range(3, rank - 1):
            link(i, i + 1)
    return a


def _ambient_basis(kind: str, rank: int) -> tuple[list[Vector], list[Vector], int] | None:
    """Bourbaki coordinates of simple roots and simple coroots."""
    if kind not in ("A", "B", "C", "D"):
        return None
    dim = rank + 1 if kind == "A" else rank

    def e(*pairs: tuple[int, int]) -> Vector:
        v = [0] * dim
        for idx, c in pairs:
            v[idx] += c
        return tuple(v)

    roots = [e((i, 1), (i + 1, -1)) for i in range(rank - (0 if kind == "A" else 1))]
    coroots = list(roots)
    if kind == "B":
        roots.append(e((rank - 1, 1)))
        coroots.append(e((rank - 1, 2)))
    elif kind == "C":
        roots.append(e((rank - 1, 2)))
        coroots.append(e((rank - 1, 1)))
    elif kind == "D":
        roots.append(e((rank - 2, 1), (rank - 1, 1)))
        coroots.append(e((rank - 2, 1), (rank - 1, 1)))
    return roots, coroots, dim


@dataclass(frozen=True)
class Factor:
    kind: str
    rank: int
    offset: int
    ambient_dim: int | None
    ambient_offset: int | None


@dataclass(frozen=True)
class FrobeniusAction:
    """A diagram automorphism of the Dynkin diagram, acting on global indices."""

    perm: tuple[int, ...]
    description: str = "custom"

    def __call__(self, i: int) -> int:
        return self.perm[i]

    def inverse(self) -> "FrobeniusAction":
        inv = [0] * len(self.perm)
        for i, j in enumerate(self.perm):
            inv[j] = i
        return FrobeniusAction(tuple(inv), self.description + "^-1")

    def order(self) -> int:
        k, cur = 1, self.perm
        while any(cur[i] != i for i in range(len(cur))):
            cur = tuple(self.perm[c] for c in cur)
            k += 1
        return k

    def is_trivial(self) -> bool:
        return all(i == j for i, j in enumerate(self.perm))

    def image(self, subset: Iterable[int]) -> frozenset[int]:
        return frozenset(self.perm[i] for i in subset)


@dataclass
class RootDatum:
    """A finite, possibly reducible, root system."""

    factors: tuple[Factor, ...]
    cartan: tuple[tuple[int, ...], ...]
    roots: tuple[Vector, ...]
    coroots: tuple[Vector, ...]
    ambient_roots: tuple[Vector, ...] | None = None
    ambient_coroots_simple: tuple[Vector, ...] | None = None
    cache: dict = field(default_factory=dict, repr=False, compare=False)
    _index: dict[Vector, int] = field(default_factory=dict, repr=False)
    _ambient_index: dict[Vector, int] = field(default_factory=dict, repr=False)
    _ambient_simple: list[Vector] | None = field(default=None, repr=False)
    _simple: list[int] = field(default_factory=list, repr=False)

    # positive roots occupy indices [0, npos), negatives [npos, 2*npos)
    # with index(-beta) = index(beta) +- npos.

    @property
    def rank(self) -> int:
        return len(self.cartan)

    @property
    def simple_roots(self) -> range:
        return range(self.rank)

    @property
    def npos(self) -> int:
        return len(self.roots) // 2

    @property
    def label(self) -> str:
        parts = [f"{f.kind}{f.rank}" if f.kind in "ABCD" else f.kind for f in self.factors]
        return "x".join(parts)

    @property
    def is_classical(self) -> bool:
        return all(f.kind in ("A", "B", "C", "D") for f in self.factors)

    @property
    def ambient_dim(self) -> int | None:
        if not self.is_classical:
            return None
        return sum(f.ambient_dim for f in self.factors)  # type: ignore[misc]

    def index(self, v: Sequence[int]) -> int:
        try:
            return self._index[tuple(v)]
        except KeyError:
            raise IndexOutOfRange(f"{tuple(v)} is not a root of {self.label}") from None

    def is_root(self, v: Sequence[int]) -> bool:
        return tuple(v) in self._index

    def ambient_index(self, v: Sequence[int]) -> int:
        try:
            return self._ambient_index[tuple(v)]
        except KeyError:
            raise IndexOutOfRange(f"{tuple(v)} is not a root in ambient coordinates") from None

    def neg(self, k: int) -> int:
        n = self.npos
        return k + n if k < n else k - n

    def is_positive(self, k: int) -> bool:
        return k < self.npos

    def simple_index(self, i: int) -> int:
        """Root index of the simple root alpha_i (0-based global i)."""
        self.check_simple(i)
        return self._simple[i]

    def check_simple(self, i: int) -> None:
        if not 0 <= i < self.rank:
            raise IndexOutOfRange(f"simple index {i} outside 0..{self.rank - 1}")

    def factor_of(self, i: int) -> int:
        for k, f in enumerate(self.factors):
            if f.offset <= i < f.offset + f.rank:
                return k
        raise IndexOutOfRange(f"simple index {i} outside 0..{self.rank - 1}")

    def height(self, k: int) -> int:
        return sum(self.roots[k])

    def to_ambient(self, v: Sequence[int]) -> Vector:
        """Convert a vector in the simple-root basis to Bourbaki coordinates."""
        if self._ambient_simple is None:
            raise UnsupportedType("ambient coordinates exist only for classical factors")
        if len(v) != self.rank:
            raise DimensionMismatch(f"expected {self.rank} coordinates, got {len(v)}")
        out = [0] * self.ambient_dim  # type: ignore[operator]
        for i, c in enumerate(v):
            if c:
                for t, x in enumerate(self._ambient_simple[i]):
                    out[t] += c * x
        return tuple(out)

    def from_ambient(self, v: Sequence[int]) -> tuple[Fraction, ...]:
        """Inverse of :meth:`to_ambient` on the span of the roots."""
        if self.ambient_roots is None:
            raise UnsupportedType("ambient coordinates exist only for classical factors")
        if len(v) != self.ambient_dim:
            raise DimensionMismatch(f"expected {self.ambient_dim} coordinates, got {len(v)}")
        # pair against fundamental coweights of each factor: solve factor by factor
        out: list[Fraction] = []
        for f in self.factors:
            seg = v[f.ambient_offset : f.ambient_offset + f.ambient_dim]  # type: ignore[operator]
            out.extend(_solve_ambient(f.kind, f.rank, seg))
        return tuple(out)

    def reflect(self, i: int, v: Sequence[int]) -> Vector:
        return reflect(self, i, v)


def _solve_ambient(kind: str, rank: int, seg: Sequence[int]) -> list[Fraction]:
    """Coefficients of an ambient vector in the simple-root basis of one factor."""
    seg = [Fraction(x) for x in seg]
    if kind == "A":
        if sum(seg) != 0:
            raise DimensionMismatch("vector is not in the span of the A-roots")
        c, acc = [], Fraction(0)
        for i in range(rank):
            acc += seg[i]
            c.append(acc)
        return c
    # B, C, D: alpha_i = e_i - e_{i+1} (i < n), last root differs
    n = rank
    c = [Fraction(0)] * n
    acc = Fraction(0)
    if kind == "B":
        for i in range(n):
            acc += seg[i]
            c[i] = acc
        return c
    if kind == "C":
        for i in range(n - 1):
            acc += seg[i]
            c[i] = acc
        c[n - 1] = (acc + seg[n - 1]) / 2
        return c
    # D: alpha_{n-1} = e_{n-1} - e_n, alpha_n = e_{n-1} + e_n
    for i in range(n - 2):
        acc += seg[i]
        c[i] = acc
    # c_{n-2}(e_{n-1}-e_{n-2}... ) solve last two
    # coefficient of e_{n-1}: -c_{n-3} + c_{n-2} + c_{n-1} = seg[n-2]  (0-based c)
    # coefficient of e_n: -c_{n-2} + c_{n-1} = seg[n-1]
    prev = c[n - 3] if n >= 3 else Fraction(0)
    s = seg[n - 2] + prev
    c[n - 1] = (s + seg[n - 1]) / 2
    c[n - 2] = (s - seg[n - 1]) / 2
    return c


def _generate(cartan: Sequence[Sequence[int]]) -> tuple[list[Vector], list[Vector]]:
    """Orbit of the simple roots (paired with their coroots) under simple reflections."""
    r = len(cartan)
    simple = [tuple(1 if j == i else 0 for j in range(r)) for i in range(r)]
    seen: dict[Vector, Vector] = {}
    frontier = [(s, s) for s in simple]
    for s in simple:
        seen[s] = s
    while frontier:
        nxt = []
        for root, coroot in frontier:
            for i in range(r):
                # <root, alpha_i^vee> and <alpha_i, coroot>
                c = sum(root[j] * cartan[i][j] for j in range(r))
                d = sum(coroot[j] * cartan[j][i] for j in range(r))
                if c == 0:
                    continue
                nr = tuple(root[j] - (c if j == i else 0) for j in range(r))
                ncr = tuple(coroot[j] - (d if j == i else 0) for j in range(r))
                if nr not in seen:
                    seen[nr] = ncr
                    nxt.append((nr, ncr))
        frontier = nxt
    pos = sorted((v for v in seen if all(x >= 0 for x in v)), key=lambda v: (sum(v), tuple(-x for x in v)))
    neg = [tuple(-x for x in v) for v in pos]
    roots = pos + neg
    coroots = [seen[v] if v in seen else tuple(-x for x in seen[tuple(-y for y in v)]) for v in roots]
    return roots, coroots


@dataclass(frozen=True)
class DatumSpec:
    """Parsed form of a datum specification."""

    type: str
    rank: int
    d: int = 1
    form: str = "split"
    frobenius: str = "trivial"
    signature: tuple[int, ...] | None = None


def build_root_datum(spec: DatumSpec | str | Sequence[tuple[str, int]], rank: int | None = None) -> RootDatum:
    """Build a root datum.

    Accepts a :class:`DatumSpec`, a type letter together with ``rank`` (for
    example ``build_root_datum("B", 3)``), or an explicit list of factors.
    """
    if isinstance(spec, DatumSpec):
        factors = [(spec.type, spec.rank)] * spec.d
    elif isinstance(spec, str):
        kind = spec.upper()
        if kind in ("E6", "E7"):
            r = rank if rank is not None else int(kind[1])
        elif rank is None:
            raise RankOutOfRange(f"rank required for type {kind}")
        else:
            r = rank
        factors = [(kind, r)]
    else:
        factors = [(k.upper(), r) for k, r in spec]
    if not factors:
        raise RankOutOfRange("empty list of factors")

    blocks = []
    facs = []
    offset = 0
    amb_offset = 0
    classical = True
    for kind, r in factors:
        if kind not in SUPPORTED_TYPES:
            raise UnsupportedType(f"unsupported Dynkin type {kind!r}")
        if kind in ("E6", "E7"):
            if r is not None and r != int(kind[1]):
                raise RankOutOfRange(f"{kind} has rank {kind[1]}, got {r}")
            r = int(kind[1])
        if r < 1:
            raise RankOutOfRange(f"rank must be >= 1, got {r}")
        if kind == "D" and r < 2:
            raise RankOutOfRange("type D needs rank >= 2")
        blocks.append(_factor_cartan(kind, r))
        amb = _ambient_basis(kind, r) if kind in "ABCD" else None
        if amb is None:
            classical = False
        facs.append(Factor(kind, r, offset, amb[2] if amb else None, amb_offset if amb else None))
        offset += r
        if amb:
            amb_offset += amb[2]
    n = offset
    cartan = [[0] * n for _ in range(n)]
    for f, blk in zip(facs, blocks):
        for i in range(f.rank):
            for j in range(f.rank):
                cartan[f.offset + i][f.offset + j] = blk[i][j]
    roots, coroots = _generate(cartan)
    datum = RootDatum(factors=tuple(facs), cartan=tuple(tuple(r) for r in cartan), roots=tuple(roots), coroots=tuple(coroots))
    datum._index = {v: k for k, v in enumerate(roots)}
    datum._simple = [datum._index[tuple(1 if j == i else 0 for j in range(n))] for i in range(n)]
    if classical:
        simple_amb: list[Vector] = []
        simple_co: list[Vector] = []
        total = amb_offset
        for f in facs:
            rts, cos, dim = _ambient_basis(f.kind, f.rank)  # type: ignore[misc]
            for v, cv in zip(rts, cos):
                pad = [0] * total
                padc = [0] * total
                for t in range(dim):
                    pad[f.ambient_offset + t] = v[t]  # type: ignore[operator]
                    padc[f.ambient_offset + t] = cv[t]  # type: ignore[operator]
                simple_amb.append(tuple(pad))
                simple_co.append(tuple(padc))
        datum._ambient_simple = simple_amb
        datum.ambient_coroots_simple = tuple(simple_co)
        datum.ambient_roots = tuple(datum.to_ambient(v) for v in roots)
        datum._ambient_index = {v: k for k, v in enumerate(datum.ambient_roots)}
    validate_root_datum(datum)
    return datum


def _factor_cartan(kind: str, r: int) -> list[list[int]]:
    if kind == "A" and r == 1:
        return [[2]]
    if kind == "D" and r == 2:
        return [[2, 0], [0, 2]]
    if kind == "D" and r == 3:
        # Bourbaki D_3: alpha_1 joined to alpha_2 and alpha_3
        return [[2, -1, -1], [-1, 2, 0], [-1, 0, 2]]
    return cartan_matrix(kind, r)


_POSITIVE_COUNT = {
    "A": lambda n: n * (n + 1) // 2,
    "B": lambda n: n * n,
    "C": lambda n: n * n,
    "D": lambda n: n * (n - 1),
    "E6": lambda n: 36,
    "E7": lambda n: 63,
}


def validate_root_datum(datum: RootDatum) -> None:
    """Check the structural invariants of a root datum; raise on failure."""
    a = datum.cartan
    for i in range(datum.rank):
        if a[i][i] != 2:
            raise RootDataError("Cartan diagonal must be 2")
        for j in range(datum.rank):
            if i != j and a[i][j] > 0:
                raise RootDataError("off-diagonal Cartan entries must be <= 0")
            if (a[i][j] == 0) != (a[j][i] == 0):
                raise RootDataError("Cartan matrix is not symmetrizable")
    expected = sum(_POSITIVE_COUNT[f.kind](f.rank) for f in datum.factors)
    if datum.npos != expected:
        raise RootDataError(f"expected {expected} positive roots, found {datum.npos}")
    for k, v in enumerate(datum.roots):
        if not (all(x >= 0 for x in v) or all(x <= 0 for x in v)):
            raise RootDataError(f"root {v} has mixed signs")
        if datum.roots[datum.neg(k)] != tuple(-x for x in v):
            raise RootDataError("roots are not stored in +/- pairs")


def reflect(datum: RootDatum, i: int, v: Sequence[int]) -> Vector:
    """Apply the simple reflection s_i to a vector in the simple-root basis."""
    datum.check_simple(i)
    if len(v) != datum.rank:
        raise DimensionMismatch(f"expected {datum.rank} coordinates, got {len(v)}")
    c = sum(v[j] * datum.cartan[i][j] for j in range(datum.rank))
    return tuple(x - (c if j == i else 0) for j, x in enumerate(v))


def pairing(datum: RootDatum, lam: Sequence, cv: Sequence[int], ambient: bool = False):
    """Exact pairing <lam, cv>.

    ``cv`` is a coroot-lattice vector in the basis of simple coroots.  ``lam``
    is in the simple-root basis, or in Bourbaki coordinates when ``ambient``
    is true (classical factors only).
    """
    if len(cv) != datum.rank:
        raise DimensionMismatch(f"coroot vector needs {datum.rank} coordinates, got {len(cv)}")
    if ambient:
        if datum.ambient_coroots_simple is None:
            raise UnsupportedType("ambient coordinates exist only for classical factors")
        if len(lam) != datum.ambient_dim:
            raise DimensionMismatch(f"weight needs {datum.ambient_dim} coordinates, got {len(lam)}")
        total = 0
        for i, c in enumerate(cv):
            if c:
                total += c * sum(x * y for x, y in zip(lam, datum.ambient_coroots_simple[i]))
        return total
    if len(lam) != datum.rank:
        raise DimensionMismatch(f"weight needs {datum.rank} coordinates, got {len(lam)}")
    return sum(lam[j] * cv[i] * datum.cartan[i][j] for i in range(datum.rank) for j in range(datum.rank))


def coroot_ambient(datum: RootDatum, k: int) -> Vector:
    """Bourbaki coordinates of the coroot of the root with index ``k``."""
    if datum.ambient_coroots_simple is None:
        raise UnsupportedType("ambient coordinates exist only for classical factors")
    out = [0] * datum.ambient_dim  # type: ignore[operator]
    for i, c in enumerate(datum.coroots[k]):
        if c:
            for t, x in enumerate(datum.ambient_coroots_simple[i]):
                out[t] += c * x
    return tuple(out)


# ---------------------------------------------------------------------------
# Frobenius actions


E6_TAU = (6, 2, 5, 4, 3, 1)


def _check_automorphism(datum: RootDatum, perm: Sequence[int]) -> None:
    n = datum.rank
    if sorted(perm) != list(range(n)):
        raise IncompatibleKind(f"{list(perm)} is not a permutation of the simple roots")
    a = datum.cartan
    for i in range(n):
        for j in range(n):
            if a[perm[i]][perm[j]] != a[i][j]:
                raise IncompatibleKind("permutation does not preserve the Cartan matrix")


def _flip(kind: str, rank: int) -> list[int] | None:
    """Nontrivial diagram involution of one factor (local 0-based indices)."""
    if kind == "A":
        return [rank - 1 - i for i in range(rank)]
    if kind == "D":
        p = list(range(rank))
        p[rank - 2], p[rank - 1] = p[rank - 1], p[rank - 2]
        return p
    if kind == "E6":
        return [t - 1 for t in E6_TAU]
    return None


def builtin_frobenius(datum: RootDatum, kind: str = "trivial") -> FrobeniusAction:
    """The Frobenius permutations used by the built-in cases.

    ``kind`` is one of ``trivial``, ``shift`` (split Weil restriction: factor
    i goes to factor i+1), ``unitary-shift`` (as ``shift``, with the duality
    flip applied when wrapping from the last factor to the first), ``flip``
    (the diagram involution on every factor: unitary inert, non-split D or
    non-split E6), ``shift-flip`` (shift composed with a flip on every
    factor), or ``custom:<1-based permutation>``.
    """
    n = datum.rank
    facs = datum.factors
    kind = kind.strip()
    if kind == "trivial":
        return FrobeniusAction(tuple(range(n)), "trivial")
    if kind.startswith("custom:"):
        try:
            perm = [int(t) - 1 for t in kind[len("custom:") :].replace(" ", "").split(",") if t]
        except ValueError as exc:
            raise IncompatibleKind(f"bad custom permutation {kind!r}") from exc
        if len(perm) != n:
            raise IncompatibleKind(f"custom permutation needs {n} entries")
        _check_automorphism(datum, perm)
        return FrobeniusAction(tuple(perm), "custom")
    d = len(facs)
    if kind in ("shift", "unitary-shift", "flip", "shift-flip"):
        if kind != "flip" and len({(f.kind, f.rank) for f in facs}) != 1:
            raise IncompatibleKind("shifts need identical factors")
        flips = []
        for f in facs:
            fl = _flip(f.kind, f.rank)
            if kind in ("unitary-shift", "flip", "shift-flip") and fl is None:
                raise IncompatibleKind(f"type {f.kind} has no diagram involution")
            if kind in ("unitary-shift", "flip", "shift-flip") and f.kind in ("B", "C", "E7"):
                raise IncompatibleKind(f"type {f.kind} has no diagram involution")
            flips.append(fl)
        perm = [0] * n
        for k, f in enumerate(facs):
            for i in range(f.rank):
                if kind == "flip":
                    target_factor, local = k, flips[k][i]
                elif kind == "shift":
                    target_factor, local = (k + 1) % d, i
                elif kind == "shift-flip":
                    target_factor, local = (k + 1) % d, flips[k][i]
                else:
                    target_factor = (k + 1) % d
                    local = flips[k][i] if k == d - 1 else i
                perm[f.offset + i] = facs[target_factor].offset + local
        if kind == "flip" and d == 1 and facs[0].kind == "A":
            desc = "unitary-inert"
        else:
            desc = {"shift": "factor-shift", "unitary-shift": "factor-shift-with-flip"}.get(kind, kind)
        _check_automorphism(datum, perm)
        return FrobeniusAction(tuple(perm), desc)
    raise IncompatibleKind(f"unknown Frobenius kind {kind!r}")


def root_permutation(datum: RootDatum, sigma: FrobeniusAction) -> tuple[int, ...]:
    """Permutation of root indices induced by a diagram automorphism."""
    out = []
    for v in datum.roots:
        img = [0] * datum.rank
        for i, c in enumerate(v):
            img[sigma.perm[i]] = c
        out.append(datum.index(img))
    return tuple(out)


# ---------------------------------------------------------------------------
# Datum specification text

_KEYS = ("type", "rank", "d", "form", "frobenius", "signature")


def parse_datum_spec(text: str) -> dict:
    """Parse ``key=value`` lines into a dictionary of raw values.

    Blank lines and ``#`` comments are ignored; unknown keys, duplicate keys
    and malformed lines raise :class:`ParseError` citing the line.
    """
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected key=value", lineno, raw)
        key, value = (t.strip() for t in line.split("=", 1))
        key = key.lower()
        if key not in _KEYS:
            raise ParseError(f"unknown key {key!r}", lineno, raw)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", lineno, raw)
        if not value:
            raise ParseError(f"empty value for {key!r}", lineno, raw)
        out[key] = (value, lineno, raw)
    if "type" not in out:
        raise ParseError("missing required key 'type'")
    return out
