"""Mutation-class atlases, finite-type enumeration and dot-action orbits."""
from __future__ import annotations

import heapq
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .cluster import (
    ExchangeNotPolynomial,
    RationalPair,
    Seed,
    cluster_variables,
    mutate_seed,
    var_key,
)
from .exact import MultiPoly, PolyRing, normalize
from .grassmannian import all_k_subsets, frozen_indices, plucker_poly
from .maps import GroupWord, _frozen_table, dot_action, inverse_token, slice_core
from .modular import (
    DEFAULT_PRIME,
    PrecisionExhausted,
    SeriesRing,
    ValuedPoint,
    evaluate_poly,
    plucker_value,
    poly_column_degrees,
    random_line_through,
    random_point,
)
from .quiver import ExtQuiver, canonical_form, mutate, opposite, restrict_mutable


class BudgetExceeded(RuntimeError):
    pass


# quiver classes -----------------------------------------------------------------


@dataclass
class ClassAtlas:
    """Isomorphism classes of quivers reachable by mutation, with their graph.

    Class ids follow the order of canonical forms.  ``edges`` is the simple
    class graph: one undirected edge per pair of distinct classes joined by
    some mutation.  Self-loops and parallel mutations are counted separately
    and do not enter the cycle rank.
    """

    root: ExtQuiver
    canonical: list[bytes]
    representatives: list[ExtQuiver]
    witness: list[tuple[int, ...]]
    edges: list[tuple[int, int]]
    loop_classes: int
    mutation_count: int
    identify_opposite: bool
    complete: bool
    elapsed: float = 0.0
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {c: i for i, c in enumerate(self.canonical)}

    @property
    def class_count(self) -> int:
        return len(self.canonical)

    @property
    def cycle_rank(self) -> int:
        return len(self.edges) - self.class_count + 1

    def class_of(self, q: ExtQuiver) -> int:
        return self._index[_class_key(q, self.identify_opposite)]

    def summary(self) -> dict:
        return {
            "classes": self.class_count,
            "cycles": self.cycle_rank,
            "class_graph_edges": len(self.edges),
            "classes_with_self_loops": self.loop_classes,
            "identify_opposite": self.identify_opposite,
            "complete": self.complete,
        }

    def to_json(self) -> dict:
        out = self.summary()
        out["root"] = self.root.to_json()
        out["witness_paths"] = [[v + 1 for v in path] for path in self.witness]
        out["edges"] = [list(e) for e in self.edges]
        return out


def _class_key(q: ExtQuiver, identify_opposite: bool) -> bytes:
    c = canonical_form(q)
    if identify_opposite:
        c = min(c, canonical_form(opposite(q)))
    return c


def _expand(args):
    q, identify_opposite = args
    out = []
    for v in range(q.n_mutable):
        q2 = mutate(q, v)
        out.append((v, q2, _class_key(q2, identify_opposite)))
    return out


def enumerate_quiver_classes(
    q0: ExtQuiver,
    mutable_only: bool = True,
    identify_opposite: bool = False,
    budget: int | None = None,
    threads: int = 1,
) -> ClassAtlas:
    """Breadth-first search over mutations, deduplicating by canonical form."""
    start = time.perf_counter()
    if mutable_only:
        q0 = restrict_mutable(q0)
    root_key = _class_key(q0, identify_opposite)
    reps = {root_key: q0}
    paths = {root_key: ()}
    order = [root_key]
    pairs: set[frozenset] = set()
    loops: set[bytes] = set()
    mutations = 0
    complete = True
    frontier = [root_key]
    pool = ProcessPoolExecutor(threads) if threads > 1 else None
    try:
        while frontier:
            jobs = [(reps[c], identify_opposite) for c in frontier]
            results = pool.map(_expand, jobs, chunksize=16) if pool else map(_expand, jobs)
            nxt = []
            for c, found in zip(frontier, results):
                for v, q2, c2 in found:
                    mutations += 1
                    if c2 == c:
                        loops.add(c)
                    else:
                        pairs.add(frozenset((c, c2)))
                    if c2 not in reps:
                        if budget is not None and len(reps) >= budget:
                            complete = False
                            continue
                        reps[c2] = q2
                        paths[c2] = paths[c] + (v,)
                        order.append(c2)
                        nxt.append(c2)
            frontier = nxt
    finally:
        if pool:
            pool.shutdown()
    canonical = sorted(reps)
    ids = {c: i for i, c in enumerate(canonical)}
    edges = sorted(
        tuple(sorted(ids[c] for c in pair)) for pair in pairs if all(c in ids for c in pair)
    )
    return ClassAtlas(
        root=q0,
        canonical=canonical,
        representatives=[reps[c] for c in canonical],
        witness=[paths[c] for c in canonical],
        edges=edges,
        loop_classes=len(loops),
        mutation_count=mutations,
        identify_opposite=identify_opposite,
        complete=complete,
        elapsed=time.perf_counter() - start,
    )


def fundamental_domain(seed: Seed, atlas: ClassAtlas) -> list[Seed]:
    """One seed per quiver class, obtained by replaying the witness paths."""
    cache: dict[tuple[int, ...], Seed] = {(): seed}

    def reach(path):
        if path not in cache:
            cache[path] = mutate_seed(reach(path[:-1]), path[-1])
        return cache[path]

    out = [reach(path) for path in atlas.witness]
    forms = {canonical_form(restrict_mutable(s.quiver)) for s in out}
    if not atlas.identify_opposite and len(forms) != len(out):
        raise AssertionError("fundamental domain seeds are not pairwise non-isomorphic")
    return out


# finite type -------------------------------------------------------------------------


@dataclass
class ClusterEnumeration:
    clusters: int
    variables: int
    exchange_edges: int
    complete: bool
    seeds: list[Seed] = field(repr=False, default_factory=list)

    def summary(self) -> dict:
        return {
            "clusters": self.clusters,
            "cluster_variables": self.variables,
            "exchange_graph_edges": self.exchange_edges,
            "complete": self.complete,
        }


def _cluster_key(seed: Seed) -> tuple:
    return tuple(sorted(cluster_variables(seed)))


def enumerate_clusters(seed: Seed, budget: int = 20000) -> ClusterEnumeration:
    """Breadth-first search over seeds, deduplicating by the set of cluster variables."""
    start_key = _cluster_key(seed)
    seen = {start_key: seed}
    variables = set(start_key)
    edges: set[frozenset] = set()
    frontier = [seed]
    complete = True
    while frontier:
        nxt = []
        for s in frontier:
            key = _cluster_key(s)
            for v in range(s.n_mutable):
                s2 = mutate_seed(s, v)
                key2 = _cluster_key(s2)
                edges.add(frozenset((key, key2)))
                if key2 not in seen:
                    if len(seen) >= budget:
                        complete = False
                        continue
                    seen[key2] = s2
                    variables.update(key2)
                    nxt.append(s2)
        frontier = nxt
    return ClusterEnumeration(len(seen), len(variables), len(edges), complete, list(seen.values()))


# seeds made of Plücker coordinates --------------------------------------------------


def plucker_labels(k: int, n: int) -> dict[bytes, tuple[int, ...]]:
    return {var_key(plucker_poly(k, n, s)): s for s in all_k_subsets(k, n)}


def plucker_seed_containing(
    seed: Seed, k: int, n: int, targets: Sequence[Sequence[int]], budget: int = 20000
) -> tuple[Seed, list[tuple[int, ...]]]:
    """Best-first search through seeds of Plücker coordinates for one containing ``targets``.

    Only mutations that produce another Plücker coordinate are followed.
    Returns the seed and the Plücker index of each entry.
    """
    labels = plucker_labels(k, n)
    want = {tuple(sorted(t)) for t in targets}

    def indices(s):
        return [labels.get(var_key(x)) for x in s.cluster]

    def score(idx):
        return len(want.difference(i for i in idx if i))

    start = indices(seed)
    if None in start:
        raise ValueError("start seed must consist of Plücker coordinates")
    heap = [(score(start), 0, seed)]
    seen = {frozenset(start)}
    tick = 0
    while heap:
        missing, _, s = heapq.heappop(heap)
        idx = indices(s)
        if missing == 0:
            return s, idx
        for v in range(s.n_mutable):
            s2 = mutate_seed(s, v)
            new = labels.get(var_key(s2.cluster[v]))
            if new is None:
                continue
            idx2 = idx[:v] + [new] + idx[v + 1:]
            key = frozenset(idx2)
            if key in seen:
                continue
            if len(seen) >= budget:
                raise BudgetExceeded("no Plücker seed with the requested coordinates within budget")
            seen.add(key)
            tick += 1
            heapq.heappush(heap, (score(idx2), tick, s2))
    raise ValueError("requested coordinates are not reachable through Plücker seeds")


# freezing ----------------------------------------------------------------------------


def _entry_matches(x, target) -> bool:
    if isinstance(x, RationalPair) or isinstance(target, RationalPair):
        return x == target
    return var_key(x) == var_key(target)


def _positions(seed: Seed, entries) -> list[int]:
    out = []
    for t in entries:
        hits = [i for i, x in enumerate(seed.cluster) if _entry_matches(x, t)]
        if not hits:
            raise ValueError("entry to freeze is not in the seed")
        out.append(hits[0])
    return out


def as_abstract(seed: Seed, labels: Sequence[str]) -> Seed:
    """The same quiver with the cluster replaced by free generators named ``labels``."""
    ring = PolyRing(list(labels))
    one = ring.one
    return Seed(seed.quiver, tuple(RationalPair(g, one) for g in ring.gens()))


def freeze_and_specialize(
    seed: Seed, freeze: Sequence = (), set_to_one: Sequence = (), labels: Sequence[str] | None = None
) -> Seed:
    """Freeze the listed cluster entries, then set the listed frozen entries to 1.

    Setting frozen variables to 1 is only meaningful for seeds whose entries
    are rational functions of an initial cluster, so a polynomial seed is
    first replaced by the abstract seed on ``labels``.  Frozen vertices set to
    1 are removed together with their arrows.
    """
    if not freeze and not set_to_one:
        return seed
    m = seed.n_mutable
    freeze_at = sorted(set(p for p in _positions(seed, freeze) if p < m))
    one_at = set(_positions(seed, set_to_one))
    if any(p < m and p not in freeze_at for p in one_at):
        raise ValueError("only frozen entries can be set to 1")
    if one_at and not all(isinstance(x, RationalPair) for x in seed.cluster):
        if labels is None:
            labels = [f"x{i + 1}" for i in range(seed.quiver.size)]
        seed = as_abstract(seed, labels)
    keep_mutable = [i for i in range(m) if i not in freeze_at]
    new_frozen = [i for i in freeze_at + list(range(m, seed.quiver.size)) if i not in one_at]
    order = keep_mutable + new_frozen
    b = seed.quiver.b
    n_mut = len(keep_mutable)
    matrix = [
        [0 if (a >= n_mut and c >= n_mut) else b[order[a]][order[c]] for c in range(len(order))]
        for a in range(len(order))
    ]
    quiver = ExtQuiver(n_mut, len(new_frozen), tuple(map(tuple, matrix)))
    cluster = [seed.cluster[i] for i in order]
    if one_at:
        ring = cluster[0].num.ring
        ones = set()
        for p in one_at:
            x = seed.cluster[p]
            if not (x.den.is_constant() and len(x.num) == 1 and x.num.total_degree() == 1):
                raise ValueError("only initial frozen variables can be set to 1")
            ones.add(x.num.key())
        images = [ring.one if g.key() in ones else g for g in ring.gens()]
        cluster = [_substitute(x, images, ring) for x in cluster]
    return Seed(quiver, tuple(cluster))


def _substitute(x: RationalPair, images, ring) -> RationalPair:
    num = x.num.compose(images, ring)
    den = x.den.compose(images, ring)
    if num.is_zero() or den.is_zero():
        raise ZeroDivisionError("substitution made a cluster entry vanish")
    return RationalPair.of(num, den)


# dot-action orbits -------------------------------------------------------------------


@dataclass
class OrbitRecord:
    """Labels of the iterates x, w.x, w.w.x, ... and the detected period."""

    word: str
    start: str
    labels: list[str]
    period: int | None
    exceeded_budget: bool
    period_verified: bool
    mode: str
    notes: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def distinct(self) -> int:
        return len(set(self.labels))

    def to_json(self) -> dict:
        return {
            "word": self.word,
            "start": self.start,
            "sequence": self.labels,
            "period": self.period,
            "exceeded_budget": self.exceeded_budget,
            "period_verified": self.period_verified,
            "distinct_variables": self.distinct,
            "mode": self.mode,
            "notes": self.notes,
        }


def _pull_exponents(word: GroupWord, exps: list[int]) -> list[int]:
    """Exponents of w^*(M) for a frozen monomial M, ignoring scalars."""
    for token in word.tokens:
        table = _frozen_table(token, word.k, word.n)
        out = [0] * len(exps)
        for e, image in zip(exps, table):
            if e:
                for g, a in enumerate(image.exponents):
                    out[g] += e * a
        exps = out
    return exps


class Fingerprinter:
    """Values of functions at a few random points modulo a prime, up to a common scalar."""

    def __init__(self, k: int, n: int, points: int = 4, rng: random.Random | None = None, prime: int = DEFAULT_PRIME):
        rng = rng or random.Random(0)
        self.k, self.n = k, n
        self.ring = SeriesRing(prime, 1)
        self.points = [random_point(self.ring, k, n, rng) for _ in range(points)]
        self.frozen_values = [
            [plucker_value(c, f).constant_term() for f in frozen_indices(k, n)] for c in self.points
        ]

    def normalize(self, values: Sequence[int]) -> tuple[int, ...]:
        p = self.ring.prime
        if any(v == 0 for v in values):
            raise ZeroDivisionError("fingerprint point hit a zero; choose another seed")
        inv = pow(values[0], -1, p)
        return tuple(v * inv % p for v in values[1:])

    def of_poly(self, f: MultiPoly) -> tuple[int, ...]:
        return self.normalize([evaluate_poly(f, c).constant_term() for c in self.points])

    def of_plucker(self, index) -> tuple[int, ...]:
        return self.normalize([plucker_value(c, index).constant_term() for c in self.points])


def _x_value(point, x_poly, x_index):
    cfg = point.config if isinstance(point, ValuedPoint) else point
    return plucker_value(cfg, x_index) if x_index is not None else evaluate_poly(x_poly, cfg)


def _line_valuations(args):
    """Worker: valuations of x along one line through a frozen divisor, for t = 1..budget."""
    tokens, k, n, x_text, x_index, divisor, seed, budget, precision = args
    from .grassmannian import matrix_ring

    word = GroupWord(k, n, tokens)
    w = word.as_map()
    x_poly = matrix_ring(k, n).parse(x_text) if x_text is not None else None
    degrees = poly_column_degrees(x_poly, k, n) if x_poly is not None else tuple(
        1 if j + 1 in x_index else 0 for j in range(n)
    )
    while True:
        ring = SeriesRing(DEFAULT_PRIME, precision)
        point = ValuedPoint.of(random_line_through(ring, k, n, divisor, random.Random(seed)))
        out = []
        try:
            for _ in range(budget):
                point = point.apply(w)
                out.append(point.valuation_of(_x_value(point, x_poly, x_index), degrees))
            return out
        except PrecisionExhausted:
            precision *= 2


def specialized_orbit_run(
    word: GroupWord,
    x: MultiPoly,
    budget: int,
    rng: random.Random,
    threads: int = 1,
    x_index: tuple[int, ...] | None = None,
    fingerprinter: Fingerprinter | None = None,
):
    """Fingerprints of the dot-action iterates of x, modulo a large prime.

    The frozen factor stripped at step t is found as the order of vanishing of
    the pulled-back function along a random line through each frozen divisor,
    computed with truncated power series.  Returns the list of fingerprints
    (including the start) and the exponent vectors of the stripped monomials.
    """
    k, n = word.k, word.n
    fp = fingerprinter or Fingerprinter(k, n, rng=rng)
    frozen = frozen_indices(k, n)
    precision = 8 * budget + 64  # doubled on demand by the workers
    jobs = [
        (word.tokens, k, n, None if x_index else str(x), x_index, f, rng.randrange(2**32), budget, precision)
        for f in frozen
    ]
    if threads > 1:
        with ProcessPoolExecutor(min(threads, len(jobs))) as pool:
            orders = list(pool.map(_line_valuations, jobs))
    else:
        orders = [_line_valuations(j) for j in jobs]

    w = word.as_map()
    points = list(fp.points)
    p = fp.ring.prime
    exps = [0] * len(frozen)
    prints = [fp.of_plucker(x_index) if x_index else fp.of_poly(x)]
    stripped = []
    for t in range(budget):
        points = [w.apply(c) for c in points]
        pulled = _pull_exponents(word, exps)
        extra = [orders[g][t] - pulled[g] for g in range(len(frozen))]
        if min(extra) < 0:
            raise ArithmeticError("negative frozen exponent; the map is not a quasi-automorphism here")
        exps = [a + b for a, b in zip(pulled, extra)]
        stripped.append(extra)
        values = []
        for c, fvals in zip(points, fp.frozen_values):
            v = _x_value(c, x, x_index).constant_term()
            for fv, e in zip(fvals, exps):
                v = v * pow(fv, -e, p) % p
            values.append(v)
        prints.append(fp.normalize(values))
    return prints, stripped


def _label_sequence(prints, names: dict) -> list[str]:
    fresh: dict = {}
    out = []
    for f in prints:
        if f in names:
            out.append(names[f])
        else:
            out.append(fresh.setdefault(f, f"new{len(fresh) + 1}"))
    return out


def _period_of(seq: Sequence) -> tuple[int | None, bool]:
    """First return to the start, verified by one extra replay of the period."""
    for t in range(1, len(seq)):
        if seq[t] == seq[0]:
            replay = seq[t: 2 * t + 1]
            ok = len(replay) == t + 1 and list(replay) == list(seq[: t + 1])
            return t, ok
    return None, False


def orbit(
    word: GroupWord,
    x: MultiPoly,
    budget: int = 32,
    mode: str = "specialized",
    names: dict | None = None,
    seed: int = 0,
    threads: int = 1,
    x_index: tuple[int, ...] | None = None,
    start_label: str | None = None,
) -> OrbitRecord:
    """Iterate the dot action of ``word`` on x.

    ``names`` maps polynomials' keys (symbolic mode) or fingerprints
    (specialized mode) to labels; Plücker coordinates are always named.  The
    run continues past a detected period for one extra period so the period
    is replayed, staying within ``budget`` steps otherwise.
    """
    start = time.perf_counter()
    k, n = word.k, word.n
    notes = []
    if mode == "specialized":
        rng = random.Random(seed)
        fp = Fingerprinter(k, n, rng=rng)
        table = {fp.of_plucker(s): "".join(map(str, s)) for s in all_k_subsets(k, n)}
        for label, poly in (names or {}).items():
            table[fp.of_poly(poly)] = label
        prints, stripped = specialized_orbit_run(word, x, budget, rng, threads, x_index, fp)
        labels = _label_sequence(prints, table)
        notes.append(
            f"values modulo p = {DEFAULT_PRIME} at {len(fp.points)} random points; distinct fingerprints "
            "prove distinct functions, equal fingerprints are equal with high probability"
        )
    elif mode == "symbolic":
        known = {key: "".join(map(str, s)) for key, s in plucker_labels(k, n).items()}
        for label, poly in (names or {}).items():
            known[var_key(poly)] = label
        fresh: dict = {}
        labels = [known.get(var_key(x)) or fresh.setdefault(var_key(x), "new1")]
        core = x
        for _ in range(budget):
            core = dot_action(word, core).core
            key = var_key(core)
            labels.append(known.get(key) or fresh.setdefault(key, f"new{len(fresh) + 1}"))
    else:
        raise ValueError(f"unknown orbit mode {mode!r}")
    if start_label:
        labels = [start_label if lab == labels[0] else lab for lab in labels]
    period, verified = _period_of(labels)
    if period is not None:
        labels_out = labels[: 2 * period + 1]
    else:
        labels_out = labels
    return OrbitRecord(
        word=str(word),
        start=labels[0],
        labels=labels_out,
        period=period,
        exceeded_budget=period is None,
        period_verified=verified,
        mode=mode,
        notes=notes,
        elapsed=time.perf_counter() - start,
    )


# exact certificates for single dot-action steps ----------------------------------------


def certify_dot_image(word: GroupWord, x: MultiPoly, y: MultiPoly, max_terms: int = 2000,
                      max_bridge: int = 1, bridge_terms: int = 100_000) -> dict:
    """Exact check that ``word . x`` equals y up to a scalar.

    Walks forward from x and backward from y (inverse letters, last letter
    first), extending a walk only from cores with at most ``max_terms`` terms, and
    compares the two cores at a split point both walks reached.  When the
    walks stall short of each other, the missing letters are bridged on the
    gauge slice [I | Y], which is exact because every core is a relative
    SL-invariant and every letter is GL-equivariant.  Letters are not stripped
    between steps there, so at most ``max_bridge`` of them are bridged, starting
    from cores with at most ``bridge_terms`` terms; wider gaps are reported
    undecided.
    """
    k, n = word.k, word.n
    tokens = list(word.tokens)
    forward = [normalize(x)[1]]
    for t in tokens:
        if len(forward[-1]) > max_terms:
            break
        forward.append(dot_action(GroupWord(k, n, (t,)), forward[-1]).core)
    backward = [normalize(y)[1]]
    for t in reversed(tokens):
        if len(forward) - 1 + len(backward) - 1 >= len(tokens) or len(backward[-1]) > max_terms:
            break
        backward.append(dot_action(GroupWord(k, n, (inverse_token(t),)), backward[-1]).core)
    split = len(tokens) - (len(backward) - 1)
    if split > len(forward) - 1:
        # restricting a core to the slice is cheap, so the bridge takes larger cores than the walks
        i = max(j for j, c in enumerate(forward) if len(c) <= bridge_terms)
        b = max(j for j, c in enumerate(backward) if len(c) <= bridge_terms)
        end = len(tokens) - b
        if end - i > max_bridge:
            return {"status": "undecided", "forward_steps": len(forward) - 1, "backward_steps": len(backward) - 1}
        same = slice_core(tokens[i:end], forward[i], k, n) == slice_core((), backward[b], k, n)
        return {"status": "pass" if same else "fail", "split": i, "bridged_on_slice": end - i,
                "terms_at_split": len(forward[i])}
    same = forward[split] == backward[-1]
    return {"status": "pass" if same else "fail", "split": split, "terms_at_split": len(forward[split])}


# generator cycles -------------------------------------------------------------------


def verify_generator_cycles(
    atlas: ClassAtlas,
    seed: Seed,
    gens: Sequence[GroupWord],
    sample_budget: int = 20,
    max_word_length: int = 4,
    rng: random.Random | None = None,
) -> dict:
    """Lift class-graph cycles to seed-level mutation loops and match them with words.

    For a sampled non-tree edge (a, b) of the class graph the loop is
    witness(a), one mutation a -> b, then witness(b) undone.  The resulting
    seed has the root's quiver up to a relabeling; the loop is realized when
    some word of length at most ``max_word_length`` in ``gens`` sends every
    root cluster variable to the corresponding variable of the end seed.
    """
    rng = rng or random.Random(0)
    tree = set()
    for path in atlas.witness:
        if path:
            tree.add(frozenset((atlas.class_of(_follow(atlas.root, path[:-1])), atlas.class_of(_follow(atlas.root, path)))))
    chords = [e for e in atlas.edges if frozenset(e) not in tree]
    sample = chords if len(chords) <= sample_budget else rng.sample(chords, sample_budget)
    failures = []
    checked = 0
    for a, b in sample:
        loop = _lift_chord(atlas, seed, a, b)
        if loop is None:
            failures.append({"edge": [a, b], "reason": "no mutation realizes the edge from the representative"})
            continue
        end_seed = loop
        if not _realized(end_seed, seed, gens, max_word_length):
            failures.append({"edge": [a, b], "reason": "no word in the generators matches"})
        checked += 1
    return {
        "status": "pass" if not failures else "fail",
        "chords": len(chords),
        "checked": checked,
        "failures": failures,
    }


def _follow(q: ExtQuiver, path) -> ExtQuiver:
    for v in path:
        q = mutate(q, v)
    return q


def _lift_chord(atlas: ClassAtlas, seed: Seed, a: int, b: int):
    s = seed
    for v in atlas.witness[a]:
        s = mutate_seed(s, v)
    target = atlas.canonical[b]
    for v in range(s.n_mutable):
        s2 = mutate_seed(s, v)
        if _class_key(restrict_mutable(s2.quiver), atlas.identify_opposite) == target:
            return _undo_witness(atlas, s2, b)
    return None


def _undo_witness(atlas: ClassAtlas, s: Seed, b: int) -> Seed:
    """Walk back from class b to the root class along b's witness path, up to relabeling."""
    rep = atlas.representatives[b]
    perm = _isomorphism(restrict_mutable(s.quiver), rep)
    for v in reversed(atlas.witness[b]):
        s = mutate_seed(s, perm[v])
    return s


def _isomorphism(q: ExtQuiver, target: ExtQuiver) -> list[int]:
    """perm with q.relabel-compatible mapping: target vertex i corresponds to q vertex perm[i]."""
    import itertools

    n = q.n_mutable
    if n > 9:
        return _isomorphism_search(q, target)
    for perm in itertools.permutations(range(n)):
        if all(q.b[perm[i]][perm[j]] == target.b[i][j] for i in range(n) for j in range(n)):
            return list(perm)
    raise ValueError("quivers are not isomorphic")


def _isomorphism_search(q: ExtQuiver, target: ExtQuiver) -> list[int]:
    n = q.n_mutable
    assign: list[int] = []
    used = set()

    def extend():
        i = len(assign)
        if i == n:
            return True
        for c in range(n):
            if c in used:
                continue
            if all(q.b[assign[j]][c] == target.b[j][i] for j in range(i)):
                assign.append(c)
                used.add(c)
                if extend():
                    return True
                assign.pop()
                used.discard(c)
        return False

    if not extend():
        raise ValueError("quivers are not isomorphic")
    return assign


def _realized(end_seed: Seed, root: Seed, gens: Sequence[GroupWord], max_len: int) -> bool:
    """Is there a word whose dot action maps root vertex i to an end vertex sigma(i),
    with sigma a quiver isomorphism?"""
    m = root.n_mutable
    where = {var_key(x): i for i, x in enumerate(end_seed.mutable)}

    def matches(images):
        sigma = [where.get(var_key(x)) for x in images]
        if None in sigma:
            return False
        return all(
            end_seed.quiver.b[sigma[i]][sigma[j]] == root.quiver.b[i][j] for i in range(m) for j in range(m)
        )

    if matches(root.mutable):
        return True
    words = [()]
    for _ in range(max_len):
        words = [w + (g,) for w in words for g in range(len(gens))]
        for w in words:
            images = list(root.mutable)
            for g in w:
                images = [dot_action(gens[g], x).core for x in images]
            if matches(images):
                return True
    return False
