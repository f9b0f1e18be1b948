"""Ice quivers stored as skew-symmetric integer matrices."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence


class NotMutable(ValueError):
    """Raised when mutating at a frozen or nonexistent vertex."""


@dataclass(frozen=True)
class ExtQuiver:
    """Quiver with ``n_mutable`` mutable vertices followed by ``n_frozen`` frozen ones.

    ``b[i][j]`` counts arrows i -> j minus arrows j -> i.  Vertices are
    0-based internally; JSON and the CLI use 1-based labels.
    """

    n_mutable: int
    n_frozen: int
    b: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = self.n_mutable + self.n_frozen
        b = tuple(tuple(int(w) for w in row) for row in self.b)
        if len(b) != n or any(len(row) != n for row in b):
            raise ValueError("exchange matrix has the wrong shape")
        for i in range(n):
            if b[i][i]:
                raise ValueError("loops are not allowed")
            for j in range(i + 1, n):
                if b[i][j] != -b[j][i]:
                    raise ValueError("exchange matrix is not skew-symmetric")
                if i >= self.n_mutable and j >= self.n_mutable and b[i][j]:
                    raise ValueError("arrows between frozen vertices are not allowed")
        object.__setattr__(self, "b", b)

    @property
    def size(self) -> int:
        return self.n_mutable + self.n_frozen

    @classmethod
    def from_arrows(cls, n_mutable: int, n_frozen: int, arrows: Iterable[Sequence[int]]) -> "ExtQuiver":
        """Build from 0-based ``(i, j[, weight])`` triples meaning i -> j."""
        n = n_mutable + n_frozen
        b = [[0] * n for _ in range(n)]
        for arrow in arrows:
            i, j = arrow[0], arrow[1]
            w = arrow[2] if len(arrow) > 2 else 1
            b[i][j] += w
            b[j][i] -= w
        return cls(n_mutable, n_frozen, tuple(map(tuple, b)))

    def arrows(self) -> list[tuple[int, int, int]]:
        """0-based ``(i, j, w)`` with w > 0 arrows from i to j."""
        n = self.size
        return [(i, j, self.b[i][j]) for i in range(n) for j in range(n) if self.b[i][j] > 0]

    def to_json(self) -> dict:
        return {
            "n_mutable": self.n_mutable,
            "n_frozen": self.n_frozen,
            "arrows": [[i + 1, j + 1, w] for i, j, w in self.arrows()],
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "ExtQuiver":
        if isinstance(data, str):
            data = json.loads(data)
        arrows = []
        for i, j, w in data["arrows"]:
            if w > 0:
                arrows.append((i - 1, j - 1, w))
            elif w < 0:
                arrows.append((j - 1, i - 1, -w))
        return cls.from_arrows(int(data["n_mutable"]), int(data["n_frozen"]), arrows)

    def relabel(self, perm: Sequence[int]) -> "ExtQuiver":
        """Vertex ``v`` of the result is vertex ``perm[v]`` of self.

        ``perm`` must keep mutable vertices among the first ``n_mutable`` slots.
        """
        if sorted(perm) != list(range(self.size)):
            raise ValueError("not a permutation")
        if any(perm[v] >= self.n_mutable for v in range(self.n_mutable)):
            raise ValueError("relabeling must preserve the mutable block")
        b = self.b
        return ExtQuiver(
            self.n_mutable, self.n_frozen, tuple(tuple(b[pi][pj] for pj in perm) for pi in perm)
        )


def mutate(q: ExtQuiver, k: int) -> ExtQuiver:
    """Mutation at the 0-based mutable vertex k."""
    if not 0 <= k < q.n_mutable:
        raise NotMutable("NotMutable")
    n, m = q.size, q.n_mutable
    b = q.b
    bk = b[k]
    new = [list(row) for row in b]
    for i in range(n):
        bik = b[i][k]
        if i == k:
            new[i] = [-w for w in bk]
            continue
        new[i][k] = -bik
        if bik == 0:
            continue
        row = new[i]
        for j in range(n):
            if j == k or (i >= m and j >= m):
                continue
            bkj = bk[j]
            if bik > 0 and bkj > 0:
                row[j] += bik * bkj
            elif bik < 0 and bkj < 0:
                row[j] -= bik * bkj
    return ExtQuiver(q.n_mutable, q.n_frozen, tuple(map(tuple, new)))


def restrict_mutable(q: ExtQuiver) -> ExtQuiver:
    m = q.n_mutable
    return ExtQuiver(m, 0, tuple(row[:m] for row in q.b[:m]))


def opposite(q: ExtQuiver) -> ExtQuiver:
    return ExtQuiver(q.n_mutable, q.n_frozen, tuple(tuple(-w for w in row) for row in q.b))


# canonical labeling --------------------------------------------------------

def _rank(signatures: list) -> list[int]:
    order = {sig: r for r, sig in enumerate(sorted(set(signatures)))}
    return [order[sig] for sig in signatures]


def _refine(colors: list[int], nbrs: list[list[tuple[int, int]]]) -> list[int]:
    cells = len(set(colors))
    while True:
        sigs = [
            (colors[v], tuple(sorted((colors[u], w) for u, w in nbrs[v])))
            for v in range(len(colors))
        ]
        colors = _rank(sigs)
        count = len(set(colors))
        if count == cells:
            return colors
        cells = count


def _search(colors, nbrs, b, best):
    n = len(colors)
    if len(set(colors)) == n:
        perm = sorted(range(n), key=colors.__getitem__)
        cert = bytes(b[pi][pj] + 128 for pi in perm for pj in perm)
        if best[0] is None or cert < best[0]:
            best[0] = cert
        return
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    target = min((c for c, vs in cells.items() if len(vs) > 1), key=lambda c: (len(cells[c]), c))
    for v in cells[target]:
        split = _rank([(c, 0 if u == v else 1) for u, c in enumerate(colors)])
        _search(_refine(split, nbrs), nbrs, b, best)


def canonical_form(q: ExtQuiver, mutable_only: bool = False) -> bytes:
    """Byte string equal for two quivers exactly when they are isomorphic.

    With ``mutable_only`` the frozen part is discarded first; otherwise
    isomorphisms must map mutable vertices to mutable vertices.
    """
    if mutable_only:
        q = restrict_mutable(q)
    n = q.size
    header = bytes([q.n_mutable, q.n_frozen])
    if n == 0:
        return header
    b = q.b
    if any(abs(w) > 127 for row in b for w in row):
        raise ValueError("arrow multiplicity too large for the canonical encoding")
    nbrs = [[(u, b[v][u]) for u in range(n) if b[v][u]] for v in range(n)]
    colors = _refine([0 if v < q.n_mutable else 1 for v in range(n)], nbrs)
    best = [None]
    _search(colors, nbrs, b, best)
    return header + best[0]


def from_canonical_form(data: bytes) -> ExtQuiver:
    m, f = data[0], data[1]
    n = m + f
    vals = [x - 128 for x in data[2:]]
    b = tuple(tuple(vals[i * n:(i + 1) * n]) for i in range(n))
    return ExtQuiver(m, f, b)
