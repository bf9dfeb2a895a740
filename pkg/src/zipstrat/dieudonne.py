"""Index dynamics of F and V^{-1} on the interval subspaces D_0 = 0, D_1, ..., D_n.

For GL_n of signature (r, s) the closure of the one-dimensional stratum is
the union of the core point and the almost-core stratum.  On standard
Dieudonne modules both letters send interval subspaces to interval
subspaces, so the canonical filtration is read off from the orbit of the
index 0.  The two strata only disagree at index r.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import gcd

from .rootdata import IndexOutOfRange, RootDataError

F, VINV = "F", "Vinv"
LETTERS = (VINV, F)  # breadth-first search tries Vinv first
CORE, ALMOST_CORE = "core", "almost-core"


class NotCoprime(RootDataError):
    pass


@dataclass(frozen=True)
class IntervalDynamics:
    r: int
    s: int
    stratum: str = CORE

    def __post_init__(self) -> None:
        if self.r < 1 or self.s < 1:
            raise RootDataError(f"need r, s >= 1, got ({self.r}, {self.s})")
        if self.stratum not in (CORE, ALMOST_CORE):
            raise RootDataError(f"unknown stratum {self.stratum!r}")

    @property
    def n(self) -> int:
        return self.r + self.s

    def table(self) -> dict[str, list[int]]:
        return {a: [step(self, a, i) for i in range(self.n + 1)] for a in (F, VINV)}


def step(dyn: IntervalDynamics, letter: str, i: int) -> int:
    """Index of the image of D_i under one letter."""
    r, s, n = dyn.r, dyn.s, dyn.n
    if not 0 <= i <= n:
        raise IndexOutOfRange(f"index {i} outside 0..{n}")
    almost = dyn.stratum == ALMOST_CORE
    if letter == F:
        if almost and i in (r, r + 1):
            return 1
        return 0 if i <= r else i - r
    if letter == VINV:
        if almost and i == r:
            return n - 1
        return i + s if i < r else n
    raise RootDataError(f"unknown letter {letter!r}")


def run_word(dyn: IntervalDynamics, word, start: int = 0) -> list[int]:
    """Indices visited by applying the letters of ``word`` left to right."""
    out = [start]
    for a in word:
        out.append(step(dyn, a, out[-1]))
    return out


def shortest_words(dyn: IntervalDynamics) -> dict[int, tuple[str, ...]]:
    """A shortest word reaching each index from 0; ties go to Vinv."""
    words = {0: ()}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for a in LETTERS:
            j = step(dyn, a, i)
            if j not in words:
                words[j] = words[i] + (a,)
                queue.append(j)
    return words


def minimal_word(r: int, s: int) -> tuple[str, ...]:
    """Shortest word taking D_0 to D_r under the core dynamics.

    For coprime (r, s) its length is r + s - 1.  Raises NotCoprime otherwise,
    after checking whether D_r is reachable at all.
    """
    dyn = IntervalDynamics(r, s, CORE)
    words = shortest_words(dyn)
    if gcd(r, s) != 1:
        raise NotCoprime(f"gcd({r}, {s}) = {gcd(r, s)}; D_r {'is' if r in words else 'is not'} reachable")
    word = words[r]
    if len(word) != r + s - 1:
        raise RootDataError(f"minimal word has length {len(word)}, expected {r + s - 1}")
    return word


@dataclass(frozen=True)
class Trajectories:
    word: tuple[str, ...]
    core: tuple[int, ...]
    almost_core: tuple[int, ...]

    @property
    def identical(self) -> bool:
        return self.core == self.almost_core

    def to_json(self) -> dict:
        return {
            "word": list(self.word),
            "core": list(self.core),
            "almost_core": list(self.almost_core),
            "identical": self.identical,
        }


def trajectories(r: int, s: int) -> Trajectories:
    word = minimal_word(r, s)
    core = run_word(IntervalDynamics(r, s, CORE), word)
    almost = run_word(IntervalDynamics(r, s, ALMOST_CORE), word)
    return Trajectories(word, tuple(core), tuple(almost))


def common_flag(r: int, s: int) -> dict[int, tuple[str, ...]]:
    """Indices i with a single word giving D_i on both strata at once.

    Breadth-first search over pairs (core index, almost-core index) starting
    at (0, 0); an index counts when it is reached as a diagonal pair.
    """
    c = IntervalDynamics(r, s, CORE)
    a = IntervalDynamics(r, s, ALMOST_CORE)
    seen = {(0, 0): ()}
    queue = deque([(0, 0)])
    out = {0: ()}
    while queue:
        i, j = queue.popleft()
        for letter in LETTERS:
            nxt = (step(c, letter, i), step(a, letter, j))
            if nxt not in seen:
                seen[nxt] = seen[(i, j)] + (letter,)
                queue.append(nxt)
                if nxt[0] == nxt[1] and nxt[0] not in out:
                    out[nxt[0]] = seen[nxt]
    return out


def extension_holds(r: int, s: int) -> bool:
    """Every proper D_i, 1 <= i < n, is given on both strata by one common word.

    D_0 and D_n = D belong to every flag and need no word.
    """
    return set(range(1, r + s)) <= set(common_flag(r, s))


def verify_extension(r: int, s: int) -> bool:
    """Whether the canonical filtration extends over the closure of the almost-core stratum."""
    if gcd(r, s) != 1:
        raise NotCoprime(f"gcd({r}, {s}) = {gcd(r, s)}")
    tr = trajectories(r, s)
    if not tr.identical:
        return False
    # every index other than r is visited before r, by a proper prefix
    if sorted(tr.core[:-1]) != sorted(set(tr.core[:-1])):
        return False
    return extension_holds(r, s)
