import itertools
import json
import random
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import quivers

from clusterbraid.cluster import (
    Seed,
    abstract_seed,
    cluster_variables,
    exchange_monomials,
    mutate_seed,
    mutation_path,
    seed_equal,
    var_key,
)
from clusterbraid.exact import product
from clusterbraid.explorer import enumerate_clusters, plucker_labels
from clusterbraid.grassmannian import matrix_ring, scott_initial_seed, weakly_separated
from clusterbraid.suites import REGRESSION_GR36, co_clustered_pairs


def catalan(m):
    return comb(2 * m, m) // (m + 1)


paths = st.lists(st.integers(0, 20), max_size=5)


@given(st.sampled_from([(2, 5), (3, 6), (3, 7), (4, 8)]), paths, st.data())
def test_seed_mutation_is_involutive_and_keeps_frozens(kn, raw, data):
    seed, _ = scott_initial_seed(*kn)
    path = [p % seed.n_mutable for p in raw]
    s = mutation_path(seed, path)
    v = data.draw(st.integers(0, seed.n_mutable - 1))
    back = mutate_seed(mutate_seed(s, v), v)
    assert seed_equal(back, s)
    assert s.frozen == seed.frozen


@given(st.sampled_from([(3, 6), (3, 7)]), paths, st.data())
def test_exchange_relation_holds(kn, raw, data):
    seed, _ = scott_initial_seed(*kn)
    s = mutation_path(seed, [p % seed.n_mutable for p in raw])
    v = data.draw(st.integers(0, s.n_mutable - 1))
    ins, outs = exchange_monomials(s, v)
    ring = s.cluster[0].ring
    assert s.cluster[v] * mutate_seed(s, v).cluster[v] == product(ins, ring) + product(outs, ring)


@given(quivers(max_mutable=4, max_frozen=1, max_weight=1), st.lists(st.integers(0, 3), max_size=4))
def test_laurent_phenomenon_on_abstract_seeds(q, raw):
    s = mutation_path(abstract_seed(q), [p % q.n_mutable for p in raw])
    assert all(x.is_laurent() for x in s.cluster)


@pytest.mark.parametrize("k,n", [(3, 7), (4, 8), (3, 9)])
def test_every_single_mutation_of_rectangles_seed_is_polynomial(k, n):
    seed, _ = scott_initial_seed(k, n)
    for v in range(seed.n_mutable):
        mutate_seed(seed, v)


@pytest.mark.parametrize("n", [5, 6, 7])
def test_gr2n_clusters_are_triangulations(n):
    seed, _ = scott_initial_seed(2, n)
    enum = enumerate_clusters(seed)
    assert enum.complete
    assert enum.clusters == catalan(n - 2)
    assert enum.variables == n * (n - 3) // 2
    assert enum.exchange_edges == catalan(n - 2) * (n - 3) // 2
    labels = plucker_labels(2, n)
    for s in enum.seeds:
        assert all(var_key(x) in labels for x in s.cluster)


def test_gr36_regression_counts():
    seed, _ = scott_initial_seed(3, 6)
    enum = enumerate_clusters(seed)
    got = enum.summary()
    assert {k: got[k] for k in REGRESSION_GR36} == REGRESSION_GR36
    labels = plucker_labels(3, 6)
    non_plucker = {key for s in enum.seeds for key in cluster_variables(s) if key not in labels}
    assert len(non_plucker) == 2
    for s in enum.seeds:
        for x in s.mutable:
            if var_key(x) not in labels:
                assert x.total_degree() == 6  # two columns of three entries each


@pytest.mark.parametrize("k,n", [(2, 6), (3, 6)])
def test_weak_separation_is_co_clustering(k, n):
    together, pairs = co_clustered_pairs(k, n)
    for pair in pairs:
        assert (pair in together) == weakly_separated(*pair)


def test_seed_json_round_trip():
    seed, _ = scott_initial_seed(3, 6)
    s = mutation_path(seed, [0, 2, 1])
    again = Seed.from_json(json.dumps(s.to_json()), matrix_ring(3, 6))
    assert seed_equal(again, s)


def test_seed_equality_up_to_relabeling():
    seed, _ = scott_initial_seed(3, 6)
    rng = random.Random(4)
    perm = list(range(seed.n_mutable))
    rng.shuffle(perm)
    perm += list(range(seed.n_mutable, seed.quiver.size))
    # vertex v of the relabeled quiver is vertex perm[v] of the original
    relabeled = Seed(seed.quiver.relabel(perm), tuple(seed.cluster[i] for i in perm))
    assert seed_equal(relabeled, seed, up_to_relabeling=True)
    assert not seed_equal(relabeled, seed) or perm == sorted(perm)
    assert not seed_equal(mutate_seed(seed, 0), seed, up_to_relabeling=True)
