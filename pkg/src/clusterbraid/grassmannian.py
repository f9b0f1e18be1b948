"""Exterior algebra of a k-dimensional space, Plücker coordinates and Scott's seed."""
from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .cluster import Seed
from .exact import MultiPoly, PolyRing
from .quiver import ExtQuiver


def _inversions(first: Sequence[int], second: Sequence[int]) -> int:
    """Number of pairs (x in first, y in second) with x > y."""
    return sum(1 for x in first for y in second if x > y)


def _sign(count: int) -> int:
    return -1 if count & 1 else 1


class ExteriorElement:
    """Homogeneous element of the exterior algebra with polynomial coefficients.

    Basis elements are keyed by sorted 0-based index tuples; grade 0 uses the
    empty tuple.  Zero coefficients are never stored.
    """

    __slots__ = ("k", "grade", "ring", "coeffs")

    def __init__(self, k: int, grade: int, ring: PolyRing, coeffs: dict[tuple[int, ...], MultiPoly]):
        if not 0 <= grade <= k:
            raise ValueError("grade out of range")
        self.k = k
        self.grade = grade
        self.ring = ring
        self.coeffs = {s: c for s, c in coeffs.items() if not c.is_zero()}

    @classmethod
    def vector(cls, entries: Sequence[MultiPoly]) -> "ExteriorElement":
        ring = entries[0].ring
        return cls(len(entries), 1, ring, {(i,): e for i, e in enumerate(entries)})

    @classmethod
    def scalar(cls, k: int, value: MultiPoly) -> "ExteriorElement":
        return cls(k, 0, value.ring, {(): value})

    @classmethod
    def omega(cls, k: int, ring: PolyRing) -> "ExteriorElement":
        return cls(k, k, ring, {tuple(range(k)): ring.one})

    @classmethod
    def basis(cls, k: int, subset: Iterable[int], ring: PolyRing) -> "ExteriorElement":
        s = tuple(sorted(subset))
        return cls(k, len(s), ring, {s: ring.one})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "ExteriorElement") -> "ExteriorElement":
        self._check(other)
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            out[s] = out[s] + c if s in out else c
        return ExteriorElement(self.k, self.grade, self.ring, out)

    def __neg__(self) -> "ExteriorElement":
        return ExteriorElement(self.k, self.grade, self.ring, {s: -c for s, c in self.coeffs.items()})

    def __sub__(self, other: "ExteriorElement") -> "ExteriorElement":
        return self + (-other)

    def scale(self, factor) -> "ExteriorElement":
        return ExteriorElement(self.k, self.grade, self.ring, {s: c * factor for s, c in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, ExteriorElement):
            return NotImplemented
        return (self.k, self.grade) == (other.k, other.grade) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.k, self.grade, tuple(sorted((s, c.key()) for s, c in self.coeffs.items()))))

    def _check(self, other: "ExteriorElement"):
        if self.k != other.k or self.grade != other.grade:
            raise ValueError("mismatched exterior elements")

    def coefficient(self, subset: Iterable[int]) -> MultiPoly:
        return self.coeffs.get(tuple(sorted(subset)), self.ring.zero)

    def as_vector(self) -> tuple[MultiPoly, ...]:
        if self.grade != 1:
            raise ValueError(f"expected a vector, got grade {self.grade}")
        return tuple(self.coefficient((i,)) for i in range(self.k))

    def as_scalar(self) -> MultiPoly:
        if self.grade == 0:
            return self.coefficient(())
        if self.grade == self.k:
            return self.coefficient(range(self.k))
        raise ValueError(f"expected grade 0 or {self.k}, got {self.grade}")

    def map_coefficients(self, fn) -> "ExteriorElement":
        out = {s: fn(c) for s, c in self.coeffs.items()}
        ring = next(iter(out.values())).ring if out else self.ring
        return ExteriorElement(self.k, self.grade, ring, out)

    def __repr__(self) -> str:
        return f"ExteriorElement(k={self.k}, grade={self.grade}, terms={len(self.coeffs)})"


def wedge(u: ExteriorElement, v: ExteriorElement) -> ExteriorElement:
    if u.k != v.k:
        raise ValueError("ambient dimensions differ")
    grade = u.grade + v.grade
    if grade > u.k:
        raise ValueError("grade overflow in wedge")
    out: dict[tuple[int, ...], MultiPoly] = {}
    for s, a in u.coeffs.items():
        ss = set(s)
        for t, b in v.coeffs.items():
            if ss.intersection(t):
                continue
            key = tuple(sorted(s + t))
            term = a * b
            if _inversions(s, t) & 1:
                term = -term
            out[key] = out[key] + term if key in out else term
    return ExteriorElement(u.k, grade, u.ring, out)


def wedge_all(elements: Sequence[ExteriorElement]) -> ExteriorElement:
    out = elements[0]
    for e in elements[1:]:
        out = wedge(out, e)
    return out


def meet(u: ExteriorElement, v: ExteriorElement) -> ExteriorElement:
    """Grassmann-Cayley meet of grades a and b, landing in grade a + b - k.

    On basis elements e_S and e_T the sum collapses to the single split of S
    whose first block is the complement of T.
    """
    if u.k != v.k:
        raise ValueError("ambient dimensions differ")
    k = u.k
    grade = u.grade + v.grade - k
    if grade < 0:
        raise ValueError("grade underflow in meet")
    full = frozenset(range(k))
    out: dict[tuple[int, ...], MultiPoly] = {}
    for t, b in v.coeffs.items():
        comp = tuple(sorted(full.difference(t)))
        comp_set = set(comp)
        sign_t = _inversions(comp, t)
        for s, a in u.coeffs.items():
            if not comp_set.issubset(s):
                continue
            rest = tuple(x for x in s if x not in comp_set)
            term = a * b
            if (sign_t + _inversions(comp, rest)) & 1:
                term = -term
            out[rest] = out[rest] + term if rest in out else term
    return ExteriorElement(k, grade, u.ring, out)


def hodge_star(u: ExteriorElement) -> ExteriorElement:
    k = u.k
    out = {}
    for s, c in u.coeffs.items():
        comp = tuple(x for x in range(k) if x not in s)
        out[comp] = -c if _inversions(s, comp) & 1 else c
    return ExteriorElement(k, k - u.grade, u.ring, out)


def omega_star(u: ExteriorElement) -> MultiPoly:
    if u.grade != u.k:
        raise ValueError("omega pairing needs a top-degree element")
    return u.as_scalar()


# configurations --------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def matrix_ring(k: int, n: int, symbol: str = "x") -> PolyRing:
    """Ring of the entries of a generic k x n matrix, row-major."""
    return PolyRing([f"{symbol}_{{{i},{j}}}" for i in range(1, k + 1) for j in range(1, n + 1)])


@dataclass(frozen=True)
class GenericConfig:
    """n column vectors in a k-dimensional space; columns are 1-indexed in the API."""

    k: int
    n: int
    columns: tuple[tuple[MultiPoly, ...], ...]

    def __post_init__(self):
        if self.k < 1 or self.n < self.k:
            raise ValueError("need 1 <= k <= n")
        if len(self.columns) != self.n or any(len(c) != self.k for c in self.columns):
            raise ValueError("columns have the wrong shape")

    @classmethod
    def generic(cls, k: int, n: int) -> "GenericConfig":
        ring = matrix_ring(k, n)
        g = ring.gens()
        cols = tuple(tuple(g[i * n + j] for i in range(k)) for j in range(n))
        return cls(k, n, cols)

    @property
    def ring(self) -> PolyRing:
        return self.columns[0][0].ring

    def vector(self, j: int) -> ExteriorElement:
        """Column j (1-based) as a grade-1 element."""
        return ExteriorElement.vector(self.columns[j - 1])

    def entries(self) -> list[MultiPoly]:
        """Entries in the row-major order of :func:`matrix_ring`."""
        return [self.columns[j][i] for i in range(self.k) for j in range(self.n)]

    def pullback(self, f: MultiPoly) -> MultiPoly:
        """Evaluate a polynomial in generic matrix entries on this configuration."""
        return f.compose(self.entries(), ring=self.ring)

    def to_json(self) -> list[list[str]]:
        return [[str(self.columns[j][i]) for j in range(self.n)] for i in range(self.k)]

    def specialize(self, values: Sequence) -> "GenericConfig":
        """Substitute rationals for the indeterminates of the ambient ring."""
        ring = PolyRing(())
        cols = tuple(tuple(ring.constant(c.evaluate(values)) for c in col) for col in self.columns)
        return GenericConfig(self.k, self.n, cols)

    def random_specialization(self, rng: random.Random, bound: int = 50) -> "GenericConfig":
        values = [rng.randint(-bound, bound) for _ in self.ring.names]
        return self.specialize(values)


def plucker(c: GenericConfig, index: Sequence[int]) -> MultiPoly:
    """Maximal minor on the (1-based) columns ``index``, in the given order."""
    if len(index) != c.k:
        raise ValueError("Plücker index must have k entries")
    return omega_star(wedge_all([c.vector(j) for j in index]))


def plucker_poly(k: int, n: int, index: Sequence[int]) -> MultiPoly:
    return _plucker_cached(k, n, tuple(index))


@functools.lru_cache(maxsize=None)
def _plucker_cached(k, n, index):
    return plucker(GenericConfig.generic(k, n), index)


def cyclic_interval(start: int, length: int, n: int) -> tuple[int, ...]:
    """Sorted 1-based cyclic interval [start, start + length - 1] mod n."""
    return tuple(sorted((start - 1 + t) % n + 1 for t in range(length)))


def frozen_indices(k: int, n: int) -> list[tuple[int, ...]]:
    """The n cyclic intervals, starting at 1, 2, ..., n."""
    return [cyclic_interval(s, k, n) for s in range(1, n + 1)]


def frozen_pluckers(k: int, n: int) -> list[MultiPoly]:
    return [plucker_poly(k, n, I) for I in frozen_indices(k, n)]


def is_plucker_index(index: Sequence[int], k: int, n: int) -> bool:
    return len(index) == k and list(index) == sorted(set(index)) and 1 <= index[0] and index[-1] <= n


def scott_grid_label(k: int, n: int, i: int, j: int) -> tuple[int, ...]:
    """Plücker index of the i x j rectangle: [1, k-i] together with [k-i+j+1, k+j]."""
    return tuple(range(1, k - i + 1)) + tuple(range(k - i + j + 1, k + j + 1))


def scott_initial_seed(k: int, n: int) -> tuple[Seed, list[tuple[int, ...]]]:
    """Rectangles seed on a (k-1) x (n-k-1) grid of mutable Plückers plus n frozens.

    Returns the seed together with the Plücker index of each entry.
    """
    if not 2 <= k < n:
        raise ValueError("need 2 <= k < n")
    rows, cols = k - 1, n - k - 1
    grid = [(i, j) for i in range(1, rows + 1) for j in range(1, cols + 1)]
    labels = {v: scott_grid_label(k, n, *v) for v in grid}
    frozen = frozen_indices(k, n)
    slot = {v: t for t, v in enumerate(grid)}
    for v in [(0, 0)] + [(k, j) for j in range(1, n - k + 1)] + [(i, n - k) for i in range(1, k)]:
        index = tuple(range(1, k + 1)) if v == (0, 0) else scott_grid_label(k, n, *v)
        slot[v] = len(grid) + frozen.index(index)
        labels[v] = index
    arrows = set()

    def add(a, c):
        if a in slot and c in slot and not (slot[a] >= len(grid) and slot[c] >= len(grid)):
            arrows.add((slot[a], slot[c]))

    for i in range(1, k + 1):
        for j in range(1, n - k + 1):
            add((i, j), (i + 1, j))
            add((i, j), (i, j + 1))
            add((i + 1, j + 1), (i, j))
    add((0, 0), (1, 1))
    quiver = ExtQuiver.from_arrows(len(grid), n, sorted(arrows))
    indices = [labels[v] for v in grid] + frozen
    cluster = tuple(plucker_poly(k, n, I) for I in indices)
    return Seed(quiver, cluster), indices


def weakly_separated(I: Sequence[int], J: Sequence[int]) -> bool:
    """No cyclically ordered a < b < c < d with a, c in I - J and b, d in J - I."""
    a_only, b_only = set(I) - set(J), set(J) - set(I)
    marks = [0 if x in a_only else 1 for x in sorted(a_only | b_only)]
    if not marks:
        return True
    changes = sum(1 for t in range(len(marks)) if marks[t] != marks[t - 1])
    return changes < 4


def all_k_subsets(k: int, n: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(1, n + 1), k))
