"""Affine flags, Fock-Goncharov coordinates and triangulation seeds."""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Sequence

from .cluster import Seed, mutate_seed, var_key
from .exact import MultiPoly, PolyRing
from .grassmannian import ExteriorElement, hodge_star, meet, omega_star, wedge, wedge_all
from .quiver import ExtQuiver


def twist_sign(k: int) -> int:
    """The scalar s_G = (-1)^(k-1) applied to a vector that wraps around the n-gon."""
    return -1 if k % 2 == 0 else 1


def divides(a: ExteriorElement, b: ExteriorElement) -> bool:
    """For a nonzero simple ``a``: is span(a) contained in span(b)?

    Contractions of ``a`` against basis covectors span the subspace of ``a``,
    so it suffices that each of them wedges to zero with ``b``.
    """
    if a.grade == 0:
        return True
    for t in itertools.combinations(range(a.k), a.grade - 1):
        tset = set(t)
        vec = {}
        for s, c in a.coeffs.items():
            if tset.issubset(s):
                (rest,) = [x for x in s if x not in tset]
                vec[(rest,)] = c
        if vec and not wedge(ExteriorElement(a.k, 1, a.ring, vec), b).is_zero():
            return False
    return True


@dataclass(frozen=True)
class AffineFlag:
    """Tensors F_(1), ..., F_(k-1); the top tensor F_(k) is the volume form."""

    tensors: tuple[ExteriorElement, ...]

    @property
    def k(self) -> int:
        return len(self.tensors) + 1

    def tensor(self, a: int) -> ExteriorElement:
        k = self.k
        ring = self.tensors[0].ring
        if a == 0:
            return ExteriorElement.scalar(k, ring.one)
        if a == k:
            return ExteriorElement.omega(k, ring)
        return self.tensors[a - 1]

    def check(self) -> bool:
        if any(t.grade != a for a, t in enumerate(self.tensors, start=1)):
            return False
        if any(t.is_zero() for t in self.tensors):
            return False
        return all(divides(self.tensor(a), self.tensor(a + 1)) for a in range(1, self.k - 1))

    def scaled(self, sign: int) -> "AffineFlag":
        """Image under the scalar matrix sign * Id."""
        if sign == 1:
            return self
        return AffineFlag(tuple(t.scale(sign**a) for a, t in enumerate(self.tensors, start=1)))


@dataclass(frozen=True)
class FlagConfig:
    """A cyclically ordered tuple of r affine flags (1-based in the API)."""

    k: int
    flags: tuple[AffineFlag, ...]

    @property
    def r(self) -> int:
        return len(self.flags)

    @property
    def ring(self) -> PolyRing:
        return self.flags[0].tensors[0].ring

    def flag(self, m: int) -> AffineFlag:
        """Flag m for any integer m; wrapping around applies s_G once per turn."""
        q, m0 = divmod(m - 1, self.r)
        f = self.flags[m0]
        return f.scaled(twist_sign(self.k)) if q % 2 else f

    def tensor(self, m: int, a: int) -> ExteriorElement:
        return self.flag(m).tensor(a)


@functools.lru_cache(maxsize=None)
def flag_ring(k: int, r: int) -> PolyRing:
    return PolyRing(
        [f"m_{{{j},{b},{i}}}" for j in range(1, r + 1) for b in range(1, k) for i in range(1, k + 1)]
    )


@functools.lru_cache(maxsize=None)
def generic_flag_config(k: int, r: int) -> FlagConfig:
    """Flag j is spanned step by step by fresh vectors m_{j,1}, ..., m_{j,k-1}."""
    ring = flag_ring(k, r)
    flags = []
    for j in range(1, r + 1):
        vecs = [
            ExteriorElement.vector([ring.gen(f"m_{{{j},{b},{i}}}") for i in range(1, k + 1)])
            for b in range(1, k)
        ]
        tensors, acc = [], None
        for v in vecs:
            acc = v if acc is None else wedge(acc, v)
            tensors.append(acc)
        flags.append(AffineFlag(tuple(tensors)))
    return FlagConfig(k, tuple(flags))


# coordinates ----------------------------------------------------------------

@dataclass(frozen=True)
class FGFunction:
    """An invariant of flags built from their tensors.

    ``kind == "wedge"`` is the pairing omega^*(F_x(a) F_y(b) ...), weights summing
    to k.  ``kind == "meet"`` is the meet F_x(a) ∩ F_y(b) ∩ ... of total grade 0.
    """

    vertices: tuple[int, ...]
    weights: tuple[int, ...]
    kind: str = "wedge"

    def evaluate(self, c: FlagConfig) -> MultiPoly:
        parts = [c.tensor(m, a) for m, a in zip(self.vertices, self.weights) if a]
        if self.kind == "wedge":
            return omega_star(wedge_all(parts))
        out = parts[0]
        for p in parts[1:]:
            out = meet(out, p)
        return out.as_scalar()

    def label(self) -> str:
        w = ",".join(map(str, self.weights))
        v = ",".join(map(str, self.vertices))
        if self.kind == "meet":
            return f"Δ^{{{v}}}[{w}]"
        return f"Δ_{{{w}}}({v})"


def _check_weights(k: int, weights: Sequence[int], min_positive: int = 2):
    if any(w < 0 for w in weights) or sum(weights) != k:
        raise ValueError(f"weights {tuple(weights)} must be non-negative and sum to {k}")
    if sum(1 for w in weights if w > 0) < min_positive:
        raise ValueError(f"weights {tuple(weights)} need at least {min_positive} positive entries")


def fg_function(k: int, vertices: Sequence[int], weights: Sequence[int]) -> FGFunction:
    if len(vertices) != len(weights):
        raise ValueError("one weight per flag")
    _check_weights(k, weights)
    return FGFunction(tuple(vertices), tuple(weights))


def fg_coordinate(c: FlagConfig, vertices: Sequence[int], weights: Sequence[int]) -> MultiPoly:
    return fg_function(c.k, vertices, weights).evaluate(c)


def quadruple_invariant(c: FlagConfig, vertices: Sequence[int], weights: Sequence[int]) -> MultiPoly:
    if len(vertices) != 4 or len(weights) != 4:
        raise ValueError("quadruple invariants take four flags and four weights")
    if any(w < 0 for w in weights) or sum(weights) != c.k:
        raise ValueError("weights must be non-negative and sum to k")
    return FGFunction(tuple(vertices), tuple(weights)).evaluate(c)


def flag_exchange_check(k: int, abar: Sequence[int], vertices: Sequence[int] = (1, 2, 3, 4)) -> bool:
    """Three-term relation among quadruple invariants shifted from ``abar``."""
    if len(abar) != 4 or any(a < 0 for a in abar) or sum(abar) != k - 2:
        raise ValueError("abar must be four non-negative integers summing to k - 2")
    c = generic_flag_config(k, max(vertices))

    def q(shift):
        return quadruple_invariant(c, vertices, [a + s for a, s in zip(abar, shift)])

    lhs = q((1, 0, 1, 0)) * q((0, 1, 0, 1))
    rhs = q((1, 1, 0, 0)) * q((0, 0, 1, 1)) + q((1, 0, 0, 1)) * q((0, 1, 1, 0))
    return lhs == rhs


# symmetries ----------------------------------------------------------------

def duality(c: FlagConfig) -> FlagConfig:
    """Flag (F_(1), ..., F_(k-1)) goes to (*F_(k-1), ..., *F_(1))."""
    k = c.k
    return FlagConfig(
        k,
        tuple(AffineFlag(tuple(hodge_star(f.tensor(k - a)) for a in range(1, k))) for f in c.flags),
    )


def cyclic_P(c: FlagConfig, power: int = 1) -> FlagConfig:
    """(F_1, ..., F_r) goes to (F_2, ..., F_r, s_G F_1); negative powers shift back."""
    return FlagConfig(c.k, tuple(c.flag(m + power) for m in range(1, c.r + 1)))


def rotation_Theta(c: FlagConfig) -> FlagConfig:
    return FlagConfig(c.k, tuple(reversed(c.flags)))


# triangulations -------------------------------------------------------------

@dataclass(frozen=True)
class Triangulation:
    r: int
    diagonals: tuple[tuple[int, int], ...]

    def __post_init__(self):
        diags = tuple(sorted(tuple(sorted(d)) for d in self.diagonals))
        object.__setattr__(self, "diagonals", diags)
        if self.r < 3:
            raise ValueError("need at least a triangle")
        if len(diags) != self.r - 3 or len(set(diags)) != len(diags):
            raise ValueError(f"a triangulation of an {self.r}-gon has {self.r - 3} diagonals")
        for a, b in diags:
            if not (1 <= a < b <= self.r) or b - a in (1, self.r - 1):
                raise ValueError(f"({a},{b}) is not a diagonal")
        for (a, b), (c, d) in itertools.combinations(diags, 2):
            if a < c < b < d or c < a < d < b:
                raise ValueError("diagonals cross")

    @classmethod
    def fan(cls, r: int, apex: int = 1) -> "Triangulation":
        others = [((apex - 1 + t) % r) + 1 for t in range(2, r - 1)]
        return cls(r, tuple((apex, o) for o in others))

    def edges(self) -> set[tuple[int, int]]:
        sides = {tuple(sorted((i, i % self.r + 1))) for i in range(1, self.r + 1)}
        return sides | set(self.diagonals)

    def triangles(self) -> list[tuple[int, int, int]]:
        e = self.edges()
        return [
            t
            for t in itertools.combinations(range(1, self.r + 1), 3)
            if {(t[0], t[1]), (t[1], t[2]), (t[0], t[2])} <= e
        ]

    def flip(self, diagonal: tuple[int, int]) -> "Triangulation":
        diagonal = tuple(sorted(diagonal))
        if diagonal not in self.diagonals:
            raise ValueError("not a diagonal of this triangulation")
        quad = sorted({v for t in self.triangles() if set(diagonal) <= set(t) for v in t})
        (other,) = [tuple(sorted(p)) for p in [(quad[0], quad[2]), (quad[1], quad[3])] if tuple(sorted(p)) != diagonal]
        return Triangulation(self.r, tuple(d for d in self.diagonals if d != diagonal) + (other,))


_STEPS = ((0, -1, 1), (-1, 1, 0), (1, 0, -1))


def _canonical_coordinate(k: int, tri: tuple[int, int, int], weights: tuple[int, int, int]) -> FGFunction:
    """Edge coordinates are shared between triangles, so key them by the edge alone."""
    pairs = [(v, w) for v, w in zip(tri, weights) if w]
    verts = tuple(v for v, _ in pairs)
    return FGFunction(verts, tuple(w for _, w in pairs))


def triangulation_seed(T: Triangulation, k: int) -> tuple[Seed, list[FGFunction]]:
    """Glue the triangular arrays of Fock-Goncharov coordinates over the triangles of T.

    Returns the seed (mutable coordinates first) and the coordinate labels.
    """
    boundary = {tuple(sorted((i, i % T.r + 1))) for i in range(1, T.r + 1)}
    points: dict[FGFunction, bool] = {}
    weights3 = [
        w for w in itertools.product(range(k + 1), repeat=3) if sum(w) == k and sum(1 for x in w if x) >= 2
    ]
    arrows: dict[tuple[FGFunction, FGFunction], int] = {}
    for tri in T.triangles():
        local = {w: _canonical_coordinate(k, tri, w) for w in weights3}
        for w, f in local.items():
            frozen = len(f.vertices) == 2 and tuple(sorted(f.vertices)) in boundary
            points[f] = frozen
        for w, f in local.items():
            for step in _STEPS:
                w2 = tuple(a + s for a, s in zip(w, step))
                if w2 in local:
                    g = local[w2]
                    arrows[(f, g)] = arrows.get((f, g), 0) + 1
                    arrows[(g, f)] = arrows.get((g, f), 0) - 1
    mutable = sorted((f for f, fr in points.items() if not fr), key=_coord_order)
    frozen = sorted((f for f, fr in points.items() if fr), key=_coord_order)
    labels = mutable + frozen
    index = {f: i for i, f in enumerate(labels)}
    n_mut = len(mutable)
    b = [[0] * len(labels) for _ in labels]
    for (f, g), w in arrows.items():
        i, j = index[f], index[g]
        if i >= n_mut and j >= n_mut:
            continue
        b[i][j] += w
    quiver = ExtQuiver(n_mut, len(frozen), tuple(map(tuple, b)))
    c = generic_flag_config(k, T.r)
    return Seed(quiver, tuple(f.evaluate(c) for f in labels)), labels


def _coord_order(f: FGFunction):
    return (len(f.vertices), f.vertices, tuple(-w for w in f.weights))


def frozen_fg_functions(k: int, r: int) -> list[FGFunction]:
    """Boundary-edge coordinates Δ_{a,k-a}(j, j+1), with the closing edge written (1, r)."""
    out = []
    for j in range(1, r + 1):
        x, y = sorted((j, j % r + 1))
        out.extend(FGFunction((x, y), (a, k - a)) for a in range(1, k))
    return out


def frozen_fg_polys(k: int, r: int) -> list[MultiPoly]:
    c = generic_flag_config(k, r)
    return [f.evaluate(c) for f in frozen_fg_functions(k, r)]


def flip_sequence(T: Triangulation, diagonal: tuple[int, int], k: int, max_steps: int | None = None) -> dict:
    """Mutation sequence taking the seed of T to the seed of its flip at ``diagonal``.

    Breadth-first over mutations at coordinates of the flipped quadrilateral,
    allowing only exchanges whose new variable is a quadruple invariant of the
    four corner flags.  Reports the 1-based mutation sequence and each exchange.
    """
    T2 = T.flip(diagonal)
    seed, labels = triangulation_seed(T, k)
    target, target_labels = triangulation_seed(T2, k)
    quad = tuple(sorted({v for t in T.triangles() if set(diagonal) <= set(t) for v in t}))
    c = generic_flag_config(k, T.r)
    quadruples = {}
    for w in itertools.product(range(k + 1), repeat=4):
        if sum(w) == k and sum(1 for a in w if a) >= 2:
            f = FGFunction(quad, w)
            quadruples.setdefault(var_key(f.evaluate(c)), f)
    local = [i for i in range(seed.n_mutable) if set(labels[i].vertices) <= set(quad)]
    goal = frozenset(var_key(x) for x in target.cluster)
    max_steps = max_steps or (k - 1) * k * (k + 1) // 6
    start = frozenset(var_key(x) for x in seed.cluster)
    frontier = [(seed, [], [])]
    seen = {start}
    for _ in range(max_steps):
        nxt = []
        for s, path, exchanges in frontier:
            for i in local:
                s2 = mutate_seed(s, i)
                new = quadruples.get(var_key(s2.cluster[i]))
                if new is None:
                    continue
                key = frozenset(var_key(x) for x in s2.cluster)
                if key in seen:
                    continue
                seen.add(key)
                step = path + [i + 1]
                ex = exchanges + [{"vertex": i + 1, "old": labels[i].label(), "new": new.label()}]
                if key == goal:
                    return {
                        "status": "pass" if _quivers_match(s2, target) else "fail",
                        "flip": list(diagonal),
                        "new_diagonal": [d for d in T2.diagonals if d not in T.diagonals][0],
                        "sequence": step,
                        "exchanges": ex,
                    }
                nxt.append((s2, step, ex))
        frontier = nxt
    return {"status": "fail", "flip": list(diagonal), "reason": f"no sequence of length <= {max_steps}"}


def _quivers_match(s: Seed, target: Seed) -> bool:
    """Equal exchange matrices once entries are matched by value."""
    pos = {var_key(x): i for i, x in enumerate(target.cluster)}
    perm = [pos[var_key(x)] for x in s.cluster]
    n_mut = s.n_mutable
    return all(
        s.quiver.b[a][b] == target.quiver.b[perm[a]][perm[b]]
        for a in range(s.quiver.size)
        for b in range(s.quiver.size)
        if a < n_mut or b < n_mut
    )
