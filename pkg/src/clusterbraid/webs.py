"""SL3 tensor diagrams in a marked disk.

A diagram is a combinatorial map: every vertex lists its half-edges in
clockwise order and ``mate`` pairs half-edges into edges.  Vertices
``0..n-1`` are the boundary points ``1..n`` (clockwise on the circle); their
half-edges are listed clockwise starting next to the arc towards the
following boundary point.  Interior vertices are black or white and
trivalent; transverse intersections are explicit 4-valent ``crossing``
vertices whose opposite half-edges continue one strand.  ``loops`` counts
closed curves carrying no vertex at all.

The invariant of a diagram contracts a volume form at every coloured
interior vertex (in clockwise order) with the boundary vectors, so it only
depends on the underlying graph and the cyclic orders; the embedding is what
the skein rules and the non-elliptic test look at.
"""
from __future__ import annotations

import functools
import itertools
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import flint

BOUNDARY, BLACK, WHITE, CROSSING = "boundary", "black", "white", "crossing"
_COLORED = (BLACK, WHITE)


class InvalidDiagram(ValueError):
    pass


class LayoutError(ValueError):
    """No straight-line drawing realizing the rotation system was found."""


class ReductionDiverged(RuntimeError):
    """The skein reduction exceeded its step bound, which signals a malformed diagram."""


@dataclass(frozen=True)
class TensorDiagram:
    n: int
    colors: tuple[str, ...]
    rotation: tuple[tuple[int, ...], ...]
    mate: tuple[int, ...]
    loops: int = 0

    # structure --------------------------------------------------------------

    @functools.cached_property
    def _where(self) -> dict[int, tuple[int, int]]:
        return {h: (v, i) for v, rot in enumerate(self.rotation) for i, h in enumerate(rot)}

    def owner(self, h: int) -> int:
        return self._where[h][0]

    def slot(self, h: int) -> int:
        return self._where[h][1]

    def turn(self, h: int, step: int = 1) -> int:
        """The half-edge ``step`` places clockwise after h at the same vertex."""
        v, i = self._where[h]
        rot = self.rotation[v]
        return rot[(i + step) % len(rot)]

    def is_boundary(self, v: int) -> bool:
        return v < self.n

    def interior(self) -> list[int]:
        return [v for v in range(self.n, len(self.colors)) if self.colors[v] in _COLORED]

    def crossings(self) -> list[int]:
        return [v for v, c in enumerate(self.colors) if c == CROSSING]

    @property
    def is_planar(self) -> bool:
        return not self.crossings()

    def far(self, h: int) -> int | None:
        """The half-edge at the coloured (or boundary) end of the strand leaving through h.

        Returns None for a strand that closes up through crossings only.
        """
        start = h
        while True:
            m = self.mate[h]
            v, i = self._where[m]
            if self.colors[v] != CROSSING:
                return m
            h = self.rotation[v][(i + 2) % 4]
            if h == start:
                return None

    def strand_crossings(self, h: int) -> list[int]:
        """Crossing vertices passed by the strand leaving through h."""
        out = []
        while True:
            v, i = self._where[self.mate[h]]
            if self.colors[v] != CROSSING:
                return out
            out.append(v)
            h = self.rotation[v][(i + 2) % 4]

    def validate(self) -> "TensorDiagram":
        n = self.n
        if len(self.colors) != len(self.rotation):
            raise InvalidDiagram("colors and rotations disagree in length")
        seen = [h for rot in self.rotation for h in rot]
        if sorted(seen) != list(range(len(self.mate))) or len(set(seen)) != len(seen):
            raise InvalidDiagram("every half-edge must appear in exactly one rotation")
        for h, m in enumerate(self.mate):
            if self.mate[m] != h or m == h:
                raise InvalidDiagram("mate is not a fixed-point-free involution")
        for v, c in enumerate(self.colors):
            if (v < n) != (c == BOUNDARY):
                raise InvalidDiagram("vertices 0..n-1 and only those are boundary vertices")
            arity = len(self.rotation[v])
            if c in _COLORED and arity != 3:
                raise InvalidDiagram(f"interior vertex {v} is not trivalent")
            if c == CROSSING and arity != 4:
                raise InvalidDiagram(f"crossing {v} is not 4-valent")
            if c not in (BOUNDARY, BLACK, WHITE, CROSSING):
                raise InvalidDiagram(f"unknown color {c!r}")
        for h in range(len(self.mate)):
            v = self.owner(h)
            if self.colors[v] == CROSSING:
                continue
            m = self.far(h)
            if m is None:
                continue
            if _shade(self.colors[v]) == _shade(self.colors[self.owner(m)]):
                raise InvalidDiagram("strand joins two vertices of the same color")
        chi = len(self.colors) - len(self.mate) // 2 + len(self.faces(include_outer=True))
        arcs = n if n else 0
        chi -= arcs  # boundary arcs add n edges; their vertices are already counted
        if chi != 2 * self.components():
            raise InvalidDiagram("rotation system does not describe a disk embedding")
        return self

    def components(self) -> int:
        """Connected components of the map, with the boundary circle joining all boundary vertices."""
        parent = list(range(len(self.colors)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for h, m in enumerate(self.mate):
            parent[find(self.owner(h))] = find(self.owner(m))
        for v in range(1, self.n):
            parent[find(v)] = find(0)
        return len({find(v) for v in range(len(self.colors))})

    # faces -----------------------------------------------------------------

    def faces(self, include_outer: bool = False) -> list[list[int]]:
        """Faces as lists of vertices, traced with virtual arcs along the boundary circle.

        Each face is the orbit of "cross the edge, then turn to the next
        half-edge clockwise".  The outer face (outside the circle) is dropped
        unless requested.
        """
        n = self.n
        base = len(self.mate)
        # virtual arcs: at boundary vertex v, "next" arc first, "prev" arc last
        rot = [list(r) for r in self.rotation]
        mate = list(self.mate) + [0] * (2 * n)
        if n:
            for v in range(n):
                nxt, prv = base + 2 * v, base + 2 * v + 1
                rot[v] = [nxt] + rot[v] + [prv]
            for v in range(n):
                a, b = base + 2 * v, base + 2 * ((v + 1) % n) + 1
                mate[a], mate[b] = b, a
            if n == 1:
                mate[base], mate[base + 1] = base + 1, base
        where = {h: (v, i) for v, r in enumerate(rot) for i, h in enumerate(r)}
        seen, out = set(), []
        outer = None
        for h0 in range(len(mate)):
            if h0 in seen:
                continue
            verts, h = [], h0
            darts = []
            while h not in seen:
                seen.add(h)
                darts.append(h)
                verts.append(where[h][0])
                m = mate[h]
                v, i = where[m]
                h = rot[v][(i + 1) % len(rot[v])]
            if n and all(d >= base for d in darts) and len(darts) == n and all(d % 2 == 1 for d in (x - base for x in darts)):
                outer = verts
                continue
            out.append(verts)
        if include_outer and outer is not None:
            out.append(outer)
        return out

    def face_darts(self) -> list[list[int]]:
        """Faces that avoid the boundary circle, as lists of half-edges (no virtual arcs)."""
        seen, out = set(), []
        for h0 in range(len(self.mate)):
            if h0 in seen:
                continue
            darts, h, ok = [], h0, True
            while h not in seen:
                seen.add(h)
                darts.append(h)
                if self.is_boundary(self.owner(h)):
                    ok = False
                h = self.turn(self.mate[h])
                if self.is_boundary(self.owner(h)):
                    ok = False
            if ok:
                out.append(darts)
        return out

    # identity --------------------------------------------------------------

    @functools.cached_property
    def key(self) -> tuple:
        """Canonical form up to isotopy fixing the boundary.

        Vertices reachable from the boundary are numbered by a traversal that
        starts at boundary point 1 and reads rotations clockwise; closed
        components are keyed by their smallest traversal code.
        """
        label, start = {}, {}
        order = []
        for v in range(self.n):
            label[v] = v
            start[v] = 0
            order.append(v)
        queue = list(range(self.n))
        self._discover(queue, label, start, order)
        main = self._encode(order, label, start)
        closed = []
        rest = [v for v in range(len(self.colors)) if v not in label]
        while rest:
            comp_codes = []
            comp_verts = None
            for v in rest:
                for s in range(len(self.rotation[v])):
                    lab, st, od = {v: 0}, {v: s}, [v]
                    self._discover([v], lab, st, od)
                    comp_codes.append(self._encode(od, lab, st))
                    comp_verts = comp_verts or set(od)
                break
            root = rest[0]
            lab, st, od = {root: 0}, {root: 0}, [root]
            self._discover([root], lab, st, od)
            comp = set(od)
            codes = []
            for v in comp:
                for s in range(len(self.rotation[v])):
                    lab, st, od = {v: 0}, {v: s}, [v]
                    self._discover([v], lab, st, od)
                    codes.append(self._encode(od, lab, st))
            closed.append(min(codes))
            rest = [v for v in rest if v not in comp]
        return (self.n, main, tuple(sorted(closed)), self.loops)

    def _discover(self, queue, label, start, order):
        while queue:
            v = queue.pop(0)
            rot = self.rotation[v]
            for j in range(len(rot)):
                h = rot[(start[v] + j) % len(rot)]
                u, i = self._where[self.mate[h]]
                if u not in label:
                    label[u] = len(order)
                    start[u] = i
                    order.append(u)
                    queue.append(u)

    def _encode(self, order, label, start):
        code = []
        for v in order:
            rot = self.rotation[v]
            row = [self.colors[v]]
            for j in range(len(rot)):
                h = rot[(start[v] + j) % len(rot)]
                u, i = self._where[self.mate[h]]
                row.append((label[u], (i - start[u]) % len(self.rotation[u])))
            code.append(tuple(row))
        return tuple(code)

    def __eq__(self, other):
        return isinstance(other, TensorDiagram) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    # serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        """Vertex ids are 1-based; boundary point i has id i.  Edge ids index ``edges``."""
        edge_of, edges = {}, []
        for h, m in enumerate(self.mate):
            if h < m:
                edge_of[h] = edge_of[m] = len(edges)
                edges.append([self.owner(h) + 1, self.owner(m) + 1])
        vertices = [
            {"id": v + 1, "color": BLACK if c == BOUNDARY else c, "boundary": c == BOUNDARY}
            for v, c in enumerate(self.colors)
        ]
        rotations = {str(v + 1): [edge_of[h] for h in rot] for v, rot in enumerate(self.rotation)}
        out = {"n": self.n, "vertices": vertices, "rotations": rotations, "edges": edges}
        if self.loops:
            out["loops"] = self.loops
        return out

    @classmethod
    def from_json(cls, data: dict | str) -> "TensorDiagram":
        if isinstance(data, str):
            data = json.loads(data)
        n = int(data["n"])
        verts = sorted(data["vertices"], key=lambda x: int(x["id"]))
        ids = [int(x["id"]) for x in verts]
        if ids != list(range(1, len(verts) + 1)):
            raise InvalidDiagram("vertex ids must be 1..V")
        colors = []
        for x in verts:
            if x.get("boundary"):
                colors.append(BOUNDARY)
            else:
                colors.append(x["color"])
        edges = [tuple(e) for e in data["edges"]]
        rotations = data["rotations"]
        rotation, used = [], {}
        for v in range(1, len(verts) + 1):
            rot = []
            for e in rotations.get(str(v), []):
                a, b = edges[e]
                k = used.get(e, 0)
                if v not in (a, b):
                    raise InvalidDiagram(f"edge {e} is not incident to vertex {v}")
                # the first occurrence of a self-loop takes the first half
                rot.append(2 * e + (k if a == b else (0 if v == a else 1)))
                used[e] = k + 1
            rotation.append(tuple(rot))
        mate = []
        for e in range(len(edges)):
            mate += [2 * e + 1, 2 * e]
        return cls(n, tuple(colors), tuple(rotation), tuple(mate), int(data.get("loops", 0))).validate()

    def describe(self) -> str:
        parts = []
        for v in self.interior():
            nbrs = []
            for h in self.rotation[v]:
                m = self.far(h)
                u = self.owner(m) if m is not None else None
                nbrs.append(str(u + 1) if u is not None and u < self.n else f"v{u}")
            parts.append(f"{self.colors[v][0]}{v}({','.join(nbrs)})")
        extra = f" crossings={len(self.crossings())}" if self.crossings() else ""
        return " ".join(parts) + extra + (f" loops={self.loops}" if self.loops else "")


def _shade(color: str) -> str:
    return BLACK if color in (BLACK, BOUNDARY) else WHITE


# construction from graphs ----------------------------------------------------------


def _circle_point(n: int, i: int) -> tuple[Fraction, Fraction]:
    """Rational point on the unit circle for boundary point i (0-based), clockwise from the top."""
    theta = math.pi / 2 - 2 * math.pi * i / n + 0.05
    t = Fraction(math.tan(theta / 2)).limit_denominator(10**6)
    d = 1 + t * t
    return ((1 - t * t) / d, 2 * t / d)


def tutte_layout(n: int, colors: Sequence[str], edges: Sequence[tuple[int, int]]):
    """Barycentric positions (0-based vertices) with the boundary on the circle."""
    V = len(colors)
    pos = {v: _circle_point(n, v) for v in range(n)}
    inner = [v for v in range(n, V)]
    if not inner:
        return pos
    idx = {v: j for j, v in enumerate(inner)}
    m = len(inner)
    A = [[0] * m for _ in range(m)]
    bx, by = [Fraction(0)] * m, [Fraction(0)] * m
    for a, b in edges:
        for u, w in ((a, b), (b, a)):
            if u in idx:
                A[idx[u]][idx[u]] += 1
                if w in idx:
                    A[idx[u]][idx[w]] -= 1
                else:
                    bx[idx[u]] += pos[w][0]
                    by[idx[u]] += pos[w][1]
    M = flint.fmpq_mat(m, m, [c for row in A for c in row])
    try:
        sol = M.solve(flint.fmpq_mat(m, 2, [flint.fmpq(c.numerator, c.denominator) for xy in zip(bx, by) for c in xy]))
    except ZeroDivisionError as exc:
        raise LayoutError("a component does not reach the boundary") from exc
    for v, j in idx.items():
        x, y = sol[j, 0], sol[j, 1]
        pos[v] = (Fraction(int(x.p), int(x.q)), Fraction(int(y.p), int(y.q)))
    return pos


def from_edges(n: int, interior_colors: Sequence[str], edges: Iterable[tuple[int, int]]) -> TensorDiagram:
    """Planar diagram from a graph: ids 1..n are boundary points, n+1.. the interior vertices.

    The embedding is the barycentric (Tutte) drawing, which must be crossing free.
    """
    colors = [BOUNDARY] * n + list(interior_colors)
    e0 = [(a - 1, b - 1) for a, b in edges]
    pos = tutte_layout(n, colors, e0)
    d = planarize(n, colors, pos, [(a, b, ()) for a, b in e0])
    if not d.is_planar:
        raise LayoutError("the barycentric drawing has crossings")
    return d


def tripod(n: int, i: int, j: int, k: int) -> TensorDiagram:
    """The web of the Plücker coordinate with indices i, j, k (any order; sorted clockwise)."""
    a, b, c = sorted((i, j, k))
    if len({a, b, c}) != 3 or not 1 <= a and c <= n:
        raise ValueError("tripod needs three distinct boundary points")
    return from_edges(n, [WHITE], [(a, n + 1), (b, n + 1), (c, n + 1)])


def y_tree(n: int, pairs: Sequence[tuple[int, int]]) -> TensorDiagram:
    """A black centre joined to three white vertices, each attached to a pair of boundary points."""
    colors = [BLACK, WHITE, WHITE, WHITE]
    c = n + 1
    edges = []
    for j, (a, b) in enumerate(pairs):
        w = n + 2 + j
        edges += [(c, w), (a, w), (b, w)]
    return from_edges(n, colors, edges)


def single_cycle_web() -> TensorDiagram:
    """The hexagonal web on nine points: a 6-cycle whose white vertices carry the boundary legs."""
    n = 9
    # black hexagon vertices 10,12,14; white hexagon vertices 11,13,15; white forks 16,17,18
    colors = [BLACK, WHITE, BLACK, WHITE, BLACK, WHITE, WHITE, WHITE, WHITE]
    A, B, C, D, E, F, G, H, I = range(10, 19)
    edges = [
        (A, B), (B, C), (C, D), (D, E), (E, F), (F, A),
        (A, G), (C, H), (E, I),
        (2, G), (3, G), (1, B), (9, H), (8, H), (7, D), (6, I), (5, I), (4, F),
    ]
    return from_edges(n, colors, edges)


def layout(d: TensorDiagram):
    """Straight-line positions realizing a crossing-free diagram, or LayoutError."""
    if not d.is_planar or d.loops:
        raise LayoutError("only crossing-free diagrams without free loops have a straight-line layout")
    edges = [(d.owner(h), d.owner(m)) for h, m in enumerate(d.mate) if h < m]
    if any(a == b for a, b in edges):
        raise LayoutError("self-loops cannot be drawn straight")
    if len(set(frozenset(e) for e in edges)) != len(edges):
        raise LayoutError("parallel edges cannot be drawn straight")
    pos = tutte_layout(d.n, d.colors, edges)
    redrawn = planarize(d.n, d.colors, pos, [(a, b, ()) for a, b in edges])
    if redrawn.key != d.key:
        raise LayoutError("the barycentric drawing does not realize this embedding")
    return pos


# geometry: straight-line drawings to maps -------------------------------------------


def _sub(p, q):
    return (p[0] - q[0], p[1] - q[1])


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


def _ccw_cmp(a, b):
    """Counter-clockwise angular order of nonzero directions starting from the +x axis."""
    ha = 0 if (a[1] > 0 or (a[1] == 0 and a[0] > 0)) else 1
    hb = 0 if (b[1] > 0 or (b[1] == 0 and b[0] > 0)) else 1
    if ha != hb:
        return ha - hb
    c = _cross(a, b)
    return -1 if c > 0 else (1 if c < 0 else 0)


def _clockwise_from(ref, dirs):
    """Indices of ``dirs`` sorted by clockwise angle measured from ``ref``."""
    rel = [(_dot(ref, d), _cross(ref, d)) for d in dirs]
    order = sorted(range(len(dirs)), key=functools.cmp_to_key(lambda i, j: _ccw_cmp(rel[i], rel[j])))
    # counter-clockwise from ref ascending == clockwise from ref descending
    return order[::-1]


class DegenerateDrawing(ValueError):
    pass


def planarize(n: int, colors: Sequence[str], pos, polylines) -> TensorDiagram:
    """Turn a straight-line drawing into a map, inserting a crossing at every transverse intersection.

    ``polylines`` are ``(a, b, bends)`` with 0-based endpoints and a tuple of
    intermediate points.
    """
    paths = [[pos[a], *bends, pos[b]] for a, b, bends in polylines]
    hits = [[] for _ in paths]  # (segment index, t, crossing id)
    cross_pts = []
    for p1, p2 in itertools.combinations(range(len(paths)), 2):
        P, Q = paths[p1], paths[p2]
        shared = {polylines[p1][0], polylines[p1][1]} & {polylines[p2][0], polylines[p2][1]}
        for s in range(len(P) - 1):
            for r in range(len(Q) - 1):
                a, a2, b, b2 = P[s], P[s + 1], Q[r], Q[r + 1]
                da, db = _sub(a2, a), _sub(b2, b)
                den = _cross(da, db)
                if den == 0:
                    if _cross(_sub(b, a), da) == 0:
                        lo = max(min(_dot(_sub(x, a), da) for x in (b, b2)), 0)
                        hi = min(max(_dot(_sub(x, a), da) for x in (b, b2)), _dot(da, da))
                        if lo < hi:
                            raise DegenerateDrawing("overlapping collinear segments")
                        if lo == hi and not _shared_point(a, a2, b, b2, shared, pos):
                            raise DegenerateDrawing("collinear segments touch")
                    continue
                t = _cross(_sub(b, a), db) / den
                u = _cross(_sub(b, a), da) / den
                if 0 < t < 1 and 0 < u < 1:
                    cid = len(cross_pts)
                    cross_pts.append((a[0] + t * da[0], a[1] + t * da[1]))
                    hits[p1].append((s, t, cid))
                    hits[p2].append((r, u, cid))
                elif 0 <= t <= 1 and 0 <= u <= 1:
                    point = (a[0] + t * da[0], a[1] + t * da[1])
                    if not any(point == pos[v] for v in shared):
                        raise DegenerateDrawing("an edge passes through a vertex or bend")
    V = len(colors)
    all_colors = list(colors) + [CROSSING] * len(cross_pts)
    darts = [[] for _ in all_colors]  # (direction, half-edge)
    mate = []
    for pi, (a, b, _) in enumerate(polylines):
        P = paths[pi]
        stops = [(0, Fraction(0), a, None)]
        for s, t, cid in sorted(hits[pi]):
            stops.append((s, t, V + cid, cid))
        stops.append((len(P) - 2, Fraction(1), b, None))
        for (s0, t0, v0, _), (s1, t1, v1, _) in zip(stops, stops[1:]):
            h = len(mate)
            mate += [h + 1, h]
            fwd = _sub(P[s0 + 1], P[s0]) if not (t0 == 1) else _sub(P[s0 + 2], P[s0 + 1])
            back = _sub(P[s1], P[s1 + 1]) if not (t1 == 0) else _sub(P[s1 - 1], P[s1])
            darts[v0].append((fwd, h))
            darts[v1].append((back, h + 1))
    rotation = []
    for v, ds in enumerate(darts):
        dirs = [d for d, _ in ds]
        if v < n:
            ref = _sub(pos[(v + 1) % n], pos[v]) if n > 1 else (Fraction(1), Fraction(0))
            order = _clockwise_from(ref, dirs)
        else:
            order = _clockwise_from((Fraction(1), Fraction(0)), dirs)
            if len(dirs) > 1:
                # rotate so the list is canonical only up to cyclic shift; keep as is
                pass
        rotation.append(tuple(ds[i][1] for i in order))
    for v in range(V, len(all_colors)):
        rot = rotation[v]
        where = {h: k for k, h in enumerate(rot)}
        # opposite half-edges must belong to the same polyline
        if (rot[0] // 2 == rot[2] // 2) or (rot[1] // 2 == rot[3] // 2):
            raise DegenerateDrawing("a crossing does not alternate strands")
        del where
    d = TensorDiagram(n, tuple(all_colors), tuple(rotation), tuple(mate))
    for v in range(V, len(all_colors)):
        rot = d.rotation[v]
        for j in range(2):
            if _segment_of(d, rot[j], polylines, hits) != _segment_of(d, rot[j + 2], polylines, hits):
                raise DegenerateDrawing("a crossing does not alternate strands")
    return d


def _segment_of(d, h, polylines, hits):
    # sub-edges are numbered consecutively per polyline; recover the polyline index
    count = 0
    e = h // 2
    for pi in range(len(polylines)):
        k = len(hits[pi]) + 1
        if e < count + k:
            return pi
        count += k
    raise AssertionError


def _shared_point(a, a2, b, b2, shared, pos):
    pts = {a, a2} & {b, b2}
    return any(p == pos[v] for p in pts for v in shared)


def _rotate(p, t: Fraction):
    """Rotate by the angle whose half-tangent is t (positive t is counter-clockwise)."""
    d = 1 + t * t
    c, s = (1 - t * t) / d, 2 * t / d
    return (c * p[0] - s * p[1], s * p[0] + c * p[1])


def superimpose(*webs: TensorDiagram) -> TensorDiagram:
    """Product diagram: each later web is drawn in a smaller concentric disk.

    Web j (from 0) is scaled by 2^-j and turned slightly.  Its legs to a
    boundary point leave that point almost tangentially on the
    counter-clockwise side, so at every boundary point they come after the
    legs of earlier webs in clockwise order.  Transverse intersections
    become crossings.
    """
    if not webs:
        raise ValueError("nothing to superimpose")
    n = webs[0].n
    if any(w.n != n for w in webs):
        raise ValueError("webs live on different numbers of boundary points")
    colors = [BOUNDARY] * n
    pos = {v: _circle_point(n, v) for v in range(n)}
    polylines = []
    loops = 0
    rim = Fraction(255, 256)
    for j, w in enumerate(webs):
        loops += w.loops
        p = layout(w)
        scale = Fraction(1, 2**j)
        tilt = Fraction(-j, 97)

        def place(q):
            return _rotate((q[0] * scale, q[1] * scale), tilt) if j else q

        remap = {}
        for v in range(n, len(w.colors)):
            remap[v] = len(colors)
            pos[len(colors)] = place(p[v])
            colors.append(w.colors[v])
        for v in range(n):
            for r, h in enumerate(w.rotation[v]):
                u = w.owner(w.mate[h])
                bends = ()
                if j:
                    # later legs of this web sit further counter-clockwise, preserving its rotation
                    outer = _rotate((pos[v][0] * rim, pos[v][1] * rim), Fraction(j, 64) + Fraction(r, 4096))
                    inner = _rotate(place(pos[v]), Fraction(r + 1, 4096))
                    bends = (inner, outer)
                polylines.append((remap[u], v, bends))
        for h, m in enumerate(w.mate):
            a, b = w.owner(h), w.owner(m)
            if h < m and a >= n and b >= n:
                polylines.append((remap[a], remap[b], ()))
    d = planarize(n, colors, pos, polylines)
    return TensorDiagram(d.n, d.colors, d.rotation, d.mate, loops)


# rewiring engine ---------------------------------------------------------------------


def _rewire(d: TensorDiagram, removed: set[int], new_vertices: Sequence[tuple[str, int]], joins) -> TensorDiagram:
    """Replace the vertices in ``removed`` by ``new_vertices`` (color, arity).

    ``joins`` pairs ends: ``("old", h)`` stands for whatever h's edge reaches
    outside the removed region (h a half-edge at a removed vertex), ``("new",
    j, s)`` for slot s of new vertex j.  Half-edges at removed vertices that
    are not joined must pair among themselves; they disappear.  Chains of
    joined edges between removed vertices are followed, and chains that
    close up become free loops.
    """
    partner = {}
    for x, y in joins:
        if x in partner or y in partner:
            raise ValueError("an end is joined twice")
        partner[x], partner[y] = y, x
    for v in removed:
        for h in d.rotation[v]:
            if ("old", h) not in partner and d.owner(d.mate[h]) not in removed:
                raise ValueError("a dropped half-edge leaves the removed region")
            if ("old", h) not in partner and ("old", d.mate[h]) in partner:
                raise ValueError("a joined leg continues into a dropped half-edge")

    used = set()

    def resolve(end):
        """Follow from an end through joins to the final kept half-edge or new slot."""
        cur = end
        while True:
            used.add(cur)
            p = partner[cur]
            used.add(p)
            if p[0] == "new":
                return p
            m = d.mate[p[1]]
            if d.owner(m) not in removed:
                return ("kept", m)
            cur = ("old", m)

    keep = [v for v in range(len(d.colors)) if v not in removed]
    new_id = {}
    rotation, colors = [], []
    for v in keep:
        rot = []
        for h in d.rotation[v]:
            new_id[("kept", h)] = len(new_id)
            rot.append(new_id[("kept", h)])
        rotation.append(rot)
        colors.append(d.colors[v])
    for j, (c, arity) in enumerate(new_vertices):
        rot = []
        for s in range(arity):
            new_id[("new", j, s)] = len(new_id)
            rot.append(new_id[("new", j, s)])
        rotation.append(rot)
        colors.append(c)
    mate = [None] * len(new_id)
    for v in keep:
        for h in d.rotation[v]:
            m = d.mate[h]
            if d.owner(m) in removed:
                target = resolve(("old", m))
            else:
                target = ("kept", m)
            mate[new_id[("kept", h)]] = new_id[target]
    for j, (c, arity) in enumerate(new_vertices):
        for s in range(arity):
            end = ("new", j, s)
            if end in used and mate[new_id[end]] is not None:
                continue
            p = partner[end]
            used.update((end, p))
            if p[0] == "new":
                target = p
            else:
                m = d.mate[p[1]]
                target = ("kept", m) if d.owner(m) not in removed else resolve(("old", m))
            mate[new_id[end]] = new_id[target]
            mate[new_id[target]] = new_id[end]
    loops = d.loops
    for end in list(partner):
        if end in used:
            continue
        # a closed chain through removed vertices only
        cur = end
        while cur not in used:
            used.add(cur)
            p = partner[cur]
            used.add(p)
            cur = ("old", d.mate[p[1]])
        loops += 1
    if any(m is None for m in mate):
        raise AssertionError("rewiring left an unmatched half-edge")
    n = d.n
    return TensorDiagram(n, tuple(colors), tuple(map(tuple, rotation)), tuple(mate), loops)


# skein rules -----------------------------------------------------------------------


def _degenerate(d: TensorDiagram) -> bool:
    """A vertex whose strands reach one boundary point twice, or reach itself."""
    for v in d.interior():
        ends = []
        for h in d.rotation[v]:
            m = d.far(h)
            if m is None:
                continue
            u = d.owner(m)
            if u == v:
                return True
            ends.append(u)
        if d.colors[v] == WHITE and len([u for u in ends if u < d.n]) != len({u for u in ends if u < d.n}):
            return True
    return False


def _bigons(d: TensorDiagram):
    out = []
    for f in d.face_darts():
        if len(f) != 2:
            continue
        v, w = d.owner(f[0]), d.owner(f[1])
        if v != w and d.colors[v] in _COLORED and d.colors[w] in _COLORED:
            out.append(f)
    return out


def _squares(d: TensorDiagram):
    out = []
    for f in d.face_darts():
        if len(f) != 4:
            continue
        vs = [d.owner(h) for h in f]
        if len(set(vs)) == 4 and all(d.colors[v] in _COLORED for v in vs):
            out.append(f)
    return out


def _bigon_step(d, f):
    h0, h1 = f  # h1 = turn(mate(h0))
    v, w = d.owner(h0), d.owner(h1)
    face_edges = {h0, d.mate[h0], h1, d.mate[h1]}
    (lv,) = [h for h in d.rotation[v] if h not in face_edges]
    (lw,) = [h for h in d.rotation[w] if h not in face_edges]
    return [(Fraction(-2), _rewire(d, {v, w}, [], [(("old", lv), ("old", lw))]))]


def _square_step(d, f):
    vs = [d.owner(h) for h in f]
    face_edges = set()
    for h in f:
        face_edges.update((h, d.mate[h]))
    legs = []
    for v in vs:
        (leg,) = [h for h in d.rotation[v] if h not in face_edges]
        legs.append(("old", leg))
    s = set(vs)
    first = _rewire(d, s, [], [(legs[0], legs[1]), (legs[2], legs[3])])
    second = _rewire(d, s, [], [(legs[1], legs[2]), (legs[3], legs[0])])
    return [(Fraction(1), first), (Fraction(1), second)]


def _end_shade(d, h):
    m = d.far(h)
    return None if m is None else _shade(d.colors[d.owner(m)])


def _crossing_step(d, x):
    rot = d.rotation[x]
    shades = [_end_shade(d, h) for h in rot]
    pattern = (WHITE, BLACK, BLACK, WHITE)
    for o in range(4):
        if all(s is None or s == pattern[j] for j, s in enumerate(shades[o:] + shades[:o])):
            break
    else:
        raise InvalidDiagram("crossing strands do not join black to white")
    A, B, C, D = (("old", rot[(o + j) % 4]) for j in range(4))
    parallel = _rewire(d, {x}, [], [(A, B), (D, C)])
    # E black with clockwise slots (A, F, D); F white with clockwise slots (B, C, E)
    h_shape = _rewire(
        d,
        {x},
        [(BLACK, 3), (WHITE, 3)],
        [(A, ("new", 0, 0)), (("new", 0, 1), ("new", 1, 2)), (D, ("new", 0, 2)),
         (B, ("new", 1, 0)), (C, ("new", 1, 1))],
    )
    return [(Fraction(1), parallel), (Fraction(1), h_shape)]


def skein_step(d: TensorDiagram, rng: random.Random | None = None):
    """One reduction step: (rule name, [(coefficient, diagram), ...]) or None when d is a non-elliptic web.

    Rules are tried in the order degeneracy, loop, bigon, square, crossing;
    ``rng`` picks among several places where the same rule applies.
    """
    pick = (lambda xs: rng.choice(xs)) if rng else (lambda xs: xs[0])
    if _degenerate(d):
        return "degeneracy", []
    if d.loops:
        return "loop", [(Fraction(3) ** d.loops, TensorDiagram(d.n, d.colors, d.rotation, d.mate, 0))]
    bigons = _bigons(d)
    if bigons:
        return "bigon", _bigon_step(d, pick(bigons))
    squares = _squares(d)
    if squares:
        return "square", _square_step(d, pick(squares))
    xs = d.crossings()
    if xs:
        return "crossing", _crossing_step(d, pick(xs))
    return None


class WebExpr:
    """Formal rational combination of crossing-free diagrams, keyed canonically."""

    def __init__(self, terms: Iterable[tuple[Fraction, TensorDiagram]] = ()):
        self._terms: dict[tuple, list] = {}
        for c, d in terms:
            self.add(c, d)

    def add(self, coeff, d: TensorDiagram):
        coeff = Fraction(coeff)
        if coeff == 0:
            return
        entry = self._terms.get(d.key)
        if entry is None:
            self._terms[d.key] = [coeff, d]
        else:
            entry[0] += coeff
            if entry[0] == 0:
                del self._terms[d.key]

    def terms(self) -> list[tuple[Fraction, TensorDiagram]]:
        return [(c, d) for c, d in sorted(self._terms.values(), key=lambda cd: _sort_key(cd[1]))]

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        return isinstance(other, WebExpr) and {k: v[0] for k, v in self._terms.items()} == {
            k: v[0] for k, v in other._terms.items()
        }

    def evaluate(self, config):
        total = None
        for c, d in self.terms():
            val = evaluate(d, config) * c
            total = val if total is None else total + val
        return total if total is not None else 0

    def to_json(self) -> dict:
        return {"terms": [{"coefficient": str(c), "web": d.to_json(), "summary": d.describe()} for c, d in self.terms()]}


def _sort_key(d: TensorDiagram):
    return repr(d.key)


def reduce(d: TensorDiagram, rng: random.Random | None = None, max_steps: int = 200000, on_step=None) -> WebExpr:
    """Expand a diagram in non-elliptic webs by the skein rules.

    ``on_step(rule, coeff, diagram, outputs)`` is called after each rewrite.
    """
    out = WebExpr()
    stack = [(Fraction(1), d)]
    steps = 0
    while stack:
        c, t = stack.pop()
        step = skein_step(t, rng)
        if step is None:
            out.add(c, t)
            continue
        steps += 1
        if steps > max_steps:
            raise ReductionDiverged("skein reduction exceeded its step bound")
        rule, outputs = step
        if on_step:
            on_step(rule, c, t, outputs)
        for c2, t2 in outputs:
            stack.append((c * c2, t2))
    return out


# predicates ----------------------------------------------------------------------


def is_non_elliptic(d: TensorDiagram) -> bool:
    if not d.is_planar:
        raise ValueError("non-ellipticity is defined for crossing-free webs")
    if d.loops:
        return False
    for v in range(d.n):
        nbrs = [d.owner(d.mate[h]) for h in d.rotation[v]]
        if len(nbrs) != len(set(nbrs)):
            return False
    for f in d.face_darts():
        if all(d.colors[d.owner(h)] in _COLORED for h in f) and len(f) < 6:
            return False
    return True


def _interior_graph(d: TensorDiagram):
    """Edges between coloured interior vertices, with crossings dissolved."""
    edges = []
    for v in d.interior():
        for h in d.rotation[v]:
            m = d.far(h)
            if m is None:
                continue
            u = d.owner(m)
            if u >= d.n and (v, h) < (u, m):
                edges.append((v, u))
    return edges


def _union_find(items):
    parent = {x: x for x in items}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    return parent, find


def has_interior_cycle(d: TensorDiagram) -> bool:
    parent, find = _union_find(d.interior())
    for a, b in _interior_graph(d):
        ra, rb = find(a), find(b)
        if ra == rb:
            return True
        parent[ra] = rb
    return False


def interior_components(d: TensorDiagram) -> int:
    parent, find = _union_find(d.interior())
    for a, b in _interior_graph(d):
        parent[find(a)] = find(b)
    return len({find(v) for v in d.interior()})


# arborization --------------------------------------------------------------------


def _tree(d, root_half, banned):
    """Shape and interior vertices of the rooted tree entered through the half-edge ``root_half``."""
    v = d.owner(root_half)
    if v < d.n:
        return ("leaf", v), set()
    if v in banned or d.colors[v] not in _COLORED:
        return None
    shapes, verts = [], {v}
    for h in d.rotation[v]:
        if h == root_half:
            continue
        m = d.far(h)
        if m is None:
            return None
        sub = _tree(d, m, banned | {v})
        if sub is None or sub[1] & verts:
            return None
        shapes.append(sub[0])
        verts |= sub[1]
    return (d.colors[v], tuple(sorted(shapes, key=repr))), verts


def _arborization_sites(d: TensorDiagram):
    for a in d.interior():
        rot = d.rotation[a]
        for j in range(3):
            a_out, to_b, to_c = rot[j], rot[(j + 1) % 3], rot[(j + 2) % 3]
            hb, hc = d.far(to_b), d.far(to_c)
            if hb is None or hc is None:
                continue
            b, c = d.owner(hb), d.owner(hc)
            if b < d.n or c < d.n or len({a, b, c}) < 3:
                continue
            # at B: (A, b_out, D) clockwise; at C: (c_out, A, E) clockwise
            b_out, to_d = d.turn(hb, 1), d.turn(hb, 2)
            to_e, c_out = d.turn(hc, 1), d.turn(hc, 2)
            ends = {}
            for name, h in (("a_out", a_out), ("b_out", b_out), ("c_out", c_out), ("d", to_d), ("e", to_e)):
                m = d.far(h)
                if m is None or d.owner(m) in (a, b, c):
                    break
                ends[name] = m
            else:
                t1 = _tree(d, ends["e"], {a, b, c})
                t2 = _tree(d, ends["d"], {a, b, c})
                if t1 is None or t2 is None or t1[0] != t2[0] or (t1[1] & t2[1]):
                    continue
                yield a, b, c, a_out, to_b, to_c, hb, hc, b_out, to_d, to_e, c_out


def arborization_step(d: TensorDiagram, site) -> TensorDiagram:
    a, b, c, a_out, to_b, to_c, hb, hc, b_out, to_d, to_e, c_out = site
    removed = {a, b, c}
    dropped_strands = [to_b, to_c]
    joins = []
    for h in dropped_strands:
        for x in d.strand_crossings(h):
            removed.add(x)
    # a crossing on a dropped strand keeps the other strand through it
    for x in removed - {a, b, c}:
        rot = d.rotation[x]
        on_dropped = [False] * 4
        for h in dropped_strands:
            cur = h
            while True:
                v, i = d.owner(d.mate[cur]), d.slot(d.mate[cur])
                if d.colors[v] != CROSSING:
                    break
                if v == x:
                    on_dropped[i] = on_dropped[(i + 2) % 4] = True
                cur = d.rotation[v][(i + 2) % 4]
        for i in range(2):
            if not on_dropped[i]:
                joins.append((("old", rot[i]), ("old", rot[i + 2])))
    # new vertex 0: BB with clockwise slots (towards X, b_out, D); new vertex 1: crossing X
    # with clockwise slots (a_out, BB, E, c_out)
    joins += [
        (("old", to_e), ("new", 1, 2)),
        (("new", 1, 0), ("old", a_out)),
        (("new", 1, 1), ("new", 0, 0)),
        (("new", 1, 3), ("old", c_out)),
        (("new", 0, 1), ("old", b_out)),
        (("new", 0, 2), ("old", to_d)),
    ]
    return _rewire(d, removed, [(d.colors[b], 3), (CROSSING, 4)], joins)


def arborize(d: TensorDiagram) -> TensorDiagram:
    """Apply arborization steps until none is possible."""
    while True:
        site = next(_arborization_sites(d), None)
        if site is None:
            return d
        d = arborization_step(d, site)


def is_arborizable(d: TensorDiagram) -> bool:
    return not has_interior_cycle(arborize(d))


def is_indecomposable(d: TensorDiagram) -> bool:
    """The arborized form has one connected interior once boundary points are removed."""
    return interior_components(arborize(d)) == 1


def compatible(w1: TensorDiagram, w2: TensorDiagram) -> bool:
    """The product reduces to a single non-elliptic web with coefficient 1."""
    terms = reduce(superimpose(w1, w2)).terms()
    return len(terms) == 1 and terms[0][0] == 1 and is_non_elliptic(terms[0][1])


# evaluation ----------------------------------------------------------------------


_EPS = {p: (1 if sum(1 for i in range(3) for j in range(i) if p[j] > p[i]) % 2 == 0 else -1)
        for p in itertools.permutations(range(3))}


def _columns(config):
    cols = getattr(config, "columns", config)
    return [tuple(c) for c in cols]


def evaluate(d: TensorDiagram, config):
    """Contract the diagram against the columns of a 3 x n configuration.

    ``config`` is a GenericConfig (polynomial entries) or a sequence of n
    columns of numbers.
    """
    cols = _columns(config)
    if len(cols) != d.n or any(len(c) != 3 for c in cols):
        raise ValueError("configuration must have n columns of length 3")
    # each strand is named by the pair of half-edges at its two ends
    strand = {}
    for h in range(len(d.mate)):
        if d.colors[d.owner(h)] == CROSSING or h in strand:
            continue
        strand[h] = strand[d.far(h)] = len(strand)
    through = set()
    for h in strand:
        cur = d.mate[h]
        while d.colors[d.owner(cur)] == CROSSING:
            opp = d.turn(cur, 2)
            through.update((cur, opp))
            cur = d.mate[opp]
    closed_darts = sum(len(d.rotation[x]) for x in d.crossings()) - len(through)
    closed = _count_closed(d, through) if closed_darts else 0

    remaining = {}
    for s in strand.values():
        remaining[s] = remaining.get(s, 0) + 1
    # a boundary factor splits into one factor per half-edge, so each boundary end is its own node
    pending = [(v, (h,)) for v in range(d.n) for h in d.rotation[v]]
    pending += [(v, d.rotation[v]) for v in d.interior()]
    table = {(): 1}
    open_strands: list[int] = []
    while pending:
        node = _next_node(pending, strand, open_strands)
        pending.remove(node)
        v, hs = node
        ss = [strand[h] for h in hs]
        fresh = [s for s in dict.fromkeys(ss) if s not in open_strands]
        new_open = open_strands + fresh
        pos = {s: i for i, s in enumerate(new_open)}
        for s in ss:
            remaining[s] -= 1
        keep_idx = [i for i, s in enumerate(new_open) if remaining[s] > 0]
        open_strands = [new_open[i] for i in keep_idx]
        colored = v >= d.n
        new_table = {}
        for assign, val in table.items():
            for labels in itertools.product(range(3), repeat=len(fresh)):
                full = assign + labels
                lab = tuple(full[pos[s]] for s in ss)
                if colored:
                    f = _EPS.get(lab)
                    if f is None:
                        continue
                else:
                    f = cols[v][lab[0]]
                key = tuple(full[i] for i in keep_idx)
                term = val * f
                new_table[key] = new_table[key] + term if key in new_table else term
        table = new_table
    value = table.get((), 0)
    return value * (3 ** (d.loops + closed))


def _count_closed(d, through):
    seen, count = set(through), 0
    for x in d.crossings():
        for h in d.rotation[x]:
            if h in seen:
                continue
            count += 1
            cur = h
            while cur not in seen:
                opp = d.turn(cur, 2)
                seen.update((cur, opp))
                cur = d.mate[opp]
    return count


def _next_node(pending, strand, open_strands):
    """Greedy contraction order: close as many strands and open as few as possible."""
    open_set = set(open_strands)

    def cost(node):
        ss = [strand[h] for h in node[1]]
        closing = sum(1 for s in ss if s in open_set)
        return (sum(1 for s in set(ss) if s not in open_set) - closing, -closing)

    return min(pending, key=cost)


# examples and corpora ---------------------------------------------------------------


def product_124_135() -> TensorDiagram:
    return superimpose(tripod(5, 1, 2, 4), tripod(5, 1, 3, 5))


def random_web_factor(n: int, rng: random.Random) -> TensorDiagram:
    if n >= 6 and rng.random() < 0.3:
        pts = sorted(rng.sample(range(1, n + 1), 6))
        return y_tree(n, [(pts[0], pts[1]), (pts[2], pts[3]), (pts[4], pts[5])])
    return tripod(n, *rng.sample(range(1, n + 1), 3))


def random_diagram(rng: random.Random, n_choices=(5, 6, 7), factors=(2, 3)) -> TensorDiagram:
    """Superposition of random tripods and three-pair trees."""
    n = rng.choice(n_choices)
    m = rng.choice(factors)
    return superimpose(*(random_web_factor(n, rng) for _ in range(m)))


def random_integer_config(n: int, rng: random.Random, bound: int = 7):
    return [tuple(rng.randint(-bound, bound) for _ in range(3)) for _ in range(n)]
