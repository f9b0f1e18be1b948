import itertools
import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import quivers

from clusterbraid.explorer import enumerate_quiver_classes
from clusterbraid.quiver import (
    ExtQuiver,
    NotMutable,
    canonical_form,
    from_canonical_form,
    mutate,
    opposite,
    restrict_mutable,
)


def matrix_mutation(b, k, n_mutable):
    """Exchange-matrix mutation written out entrywise; frozen-frozen entries stay zero."""
    n = len(b)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i >= n_mutable and j >= n_mutable:
                continue
            if k in (i, j):
                out[i][j] = -b[i][j]
            else:
                out[i][j] = b[i][j] + (abs(b[i][k]) * b[k][j] + b[i][k] * abs(b[k][j])) // 2
    return out


def brute_isomorphic(q1, q2):
    if (q1.n_mutable, q1.n_frozen) != (q2.n_mutable, q2.n_frozen):
        return False
    m, n = q1.n_mutable, q1.size
    for pm in itertools.permutations(range(m)):
        for pf in itertools.permutations(range(m, n)):
            p = pm + pf
            if all(q1.b[i][j] == q2.b[p[i]][p[j]] for i in range(n) for j in range(n)):
                return True
    return False


def random_relabeling(q, rng):
    pm = list(range(q.n_mutable))
    pf = list(range(q.n_mutable, q.size))
    rng.shuffle(pm)
    rng.shuffle(pf)
    return q.relabel(pm + pf)


@given(quivers(), st.data())
def test_mutation_matches_entrywise_formula(q, data):
    k = data.draw(st.integers(0, q.n_mutable - 1))
    assert [list(r) for r in mutate(q, k).b] == matrix_mutation(q.b, k, q.n_mutable)


@given(quivers(), st.data())
def test_mutation_is_involutive(q, data):
    k = data.draw(st.integers(0, q.n_mutable - 1))
    assert mutate(mutate(q, k), k) == q


@given(quivers(), st.data())
def test_restriction_commutes_with_mutation(q, data):
    k = data.draw(st.integers(0, q.n_mutable - 1))
    assert restrict_mutable(mutate(q, k)) == mutate(restrict_mutable(q), k)


def test_frozen_vertices_cannot_be_mutated():
    q = ExtQuiver.from_arrows(1, 1, [(0, 1)])
    with pytest.raises((NotMutable, ValueError, IndexError)):
        mutate(q, 1)


def test_malformed_matrices_are_rejected():
    with pytest.raises(ValueError):
        ExtQuiver(2, 0, ((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        ExtQuiver.from_arrows(1, 2, [(1, 2)])


@given(quivers(), st.randoms(use_true_random=False))
def test_canonical_form_ignores_labels(q, rng):
    assert canonical_form(random_relabeling(q, rng)) == canonical_form(q)


@given(quivers(max_mutable=4, max_frozen=1), quivers(max_mutable=4, max_frozen=1))
def test_canonical_form_agrees_with_brute_force(q1, q2):
    assert (canonical_form(q1) == canonical_form(q2)) == brute_isomorphic(q1, q2)


@given(quivers())
def test_canonical_form_decodes_to_an_isomorphic_quiver(q):
    assert brute_isomorphic(from_canonical_form(canonical_form(q)), q) or q.size > 6


@given(quivers())
def test_json_round_trip(q):
    assert ExtQuiver.from_json(json.dumps(q.to_json())) == q


def brute_classes(q0, identify_opposite=False):
    """Breadth-first search keeping one representative per brute-force isomorphism class."""
    reps, frontier = [q0], [q0]
    def known(q):
        return any(brute_isomorphic(q, r) or (identify_opposite and brute_isomorphic(opposite(q), r))
                   for r in reps)
    while frontier:
        nxt = []
        for q in frontier:
            for k in range(q.n_mutable):
                q2 = mutate(q, k)
                if not known(q2):
                    reps.append(q2)
                    nxt.append(q2)
        frontier = nxt
    return len(reps)


def linear_quiver(n):
    return ExtQuiver.from_arrows(n, 0, [(i, i + 1) for i in range(n - 1)])


def d_quiver(n):
    return ExtQuiver.from_arrows(n, 0, [(0, 2), (1, 2)] + [(i, i + 1) for i in range(2, n - 1)])


@pytest.mark.parametrize("q", [linear_quiver(3), linear_quiver(4), linear_quiver(5), d_quiver(4), d_quiver(5)],
                         ids=["A3", "A4", "A5", "D4", "D5"])
@pytest.mark.parametrize("identify", [False, True])
def test_class_enumeration_matches_brute_force(q, identify):
    atlas = enumerate_quiver_classes(q, identify_opposite=identify)
    assert atlas.complete
    assert atlas.class_count == brute_classes(q, identify)


def test_enumeration_budget_marks_incomplete():
    atlas = enumerate_quiver_classes(linear_quiver(5), budget=3)
    assert not atlas.complete
    assert atlas.class_count == 3


def test_class_graph_is_connected_and_witnessed():
    atlas = enumerate_quiver_classes(d_quiver(5))
    for path, rep in zip(atlas.witness, atlas.representatives):
        q = atlas.root
        for v in path:
            q = mutate(q, v)
        assert canonical_form(q) == canonical_form(rep)
    assert atlas.cycle_rank >= 0


def test_parallel_workers_give_identical_atlas():
    q = d_quiver(5)
    assert enumerate_quiver_classes(q).to_json() == enumerate_quiver_classes(q, threads=2).to_json()
