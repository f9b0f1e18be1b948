import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import clusterbraid.webs as W
from clusterbraid.cluster import var_key
from clusterbraid.grassmannian import GenericConfig, all_k_subsets, plucker_poly, weakly_separated
from clusterbraid.maps import parse_expr, scalar_invariant

G5, G6 = GenericConfig.generic(3, 5), GenericConfig.generic(3, 6)


def det3(cols):
    (a, b, c), (d, e, f), (g, h, i) = cols
    return a * (e * i - f * h) - d * (b * i - c * h) + g * (b * f - c * e)


@pytest.mark.parametrize("index", all_k_subsets(3, 6))
def test_tripod_evaluates_to_its_plucker(index):
    assert W.evaluate(W.tripod(6, *index), G6) == plucker_poly(3, 6, index)


@given(st.sampled_from(all_k_subsets(3, 6)), st.sampled_from(all_k_subsets(3, 6)), st.randoms(use_true_random=False))
@settings(max_examples=15)
def test_superposition_evaluates_to_the_product(I, J, rng):
    d = W.superimpose(W.tripod(6, *I), W.tripod(6, *J))
    cols = W.random_integer_config(6, rng)
    assert W.evaluate(d, cols) == det3([cols[i - 1] for i in I]) * det3([cols[j - 1] for j in J])


def test_numeric_and_symbolic_evaluation_agree():
    rng = random.Random(2)
    d = W.random_diagram(rng, n_choices=(6,))
    cols = W.random_integer_config(6, rng)
    symbolic = W.evaluate(d, G6)
    values = [cols[j][i] for i in range(3) for j in range(6)]
    assert symbolic.evaluate(values) == W.evaluate(d, cols)


def test_product_expansion():
    expr = W.reduce(W.product_124_135())
    assert len(expr) == 2
    assert all(c == 1 for c, _ in expr.terms())
    assert all(W.is_non_elliptic(d) for _, d in expr.terms())
    p = lambda *s: plucker_poly(3, 5, s)  # noqa: E731
    assert expr.evaluate(G5) == p(1, 2, 4) * p(1, 3, 5)
    tripods = W.superimpose(W.tripod(5, 1, 2, 3), W.tripod(5, 1, 4, 5))
    assert tripods.is_planar
    assert any(d.key == tripods.key for _, d in expr.terms())


@given(st.integers(0, 10**6))
@settings(max_examples=12)
def test_reduction_is_confluent_and_preserves_values(seed):
    rng = random.Random(seed)
    d = W.random_diagram(rng)
    points = [W.random_integer_config(d.n, rng) for _ in range(2)]
    bad = []

    def check(rule, coeff, diagram, outputs):
        for c in points:
            if W.evaluate(diagram, c) != sum((k * W.evaluate(o, c) for k, o in outputs), 0):
                bad.append(rule)

    first = W.reduce(d, random.Random(seed + 1), on_step=check)
    second = W.reduce(d, random.Random(seed + 2))
    assert not bad
    assert first == second
    assert all(W.is_non_elliptic(t) and t.is_planar for _, t in first.terms())
    assert all(first.evaluate(c) == W.evaluate(d, c) for c in points)


def test_three_pair_tree_matches_the_triple_meet():
    tree = W.evaluate(W.y_tree(6, [(1, 2), (3, 4), (5, 6)]), G6)
    meet = scalar_invariant(parse_expr("(v1v2)∩(v3v4)∩(v5v6)"), 3, 6)
    assert var_key(tree) == var_key(meet)


def test_arborization_of_the_decomposable_term():
    expr = W.reduce(W.product_124_135())
    (tree,) = [d for _, d in expr.terms() if W.has_interior_cycle(d) or len(d.interior()) > 2]
    arb = W.arborize(tree)
    assert W.evaluate(arb, G5) == W.evaluate(tree, G5)
    assert W.interior_components(arb) == 2
    assert not W.is_indecomposable(tree)
    assert W.arborize(arb).key == arb.key


@given(st.integers(0, 10**6))
@settings(max_examples=10)
def test_arborization_preserves_values(seed):
    rng = random.Random(seed)
    d = W.random_diagram(rng, factors=(2,))
    c = W.random_integer_config(d.n, rng)
    for _, t in W.reduce(d).terms():
        assert W.evaluate(W.arborize(t), c) == W.evaluate(t, c)


def test_single_cycle_web():
    d = W.single_cycle_web()
    assert d.n == 9
    assert W.is_non_elliptic(d)
    assert W.is_indecomposable(d)
    assert not W.is_arborizable(d)
    assert W.has_interior_cycle(d)


def test_tripod_compatibility_is_weak_separation_on_gr36():
    trips = {s: W.tripod(6, *s) for s in all_k_subsets(3, 6)}
    for a, b in itertools.combinations(sorted(trips), 2):
        assert W.compatible(trips[a], trips[b]) == weakly_separated(a, b), (a, b)


def test_json_round_trip_and_key():
    for d in (W.product_124_135(), W.single_cycle_web(), W.y_tree(6, [(1, 2), (3, 4), (5, 6)])):
        again = W.TensorDiagram.from_json(json.dumps(d.to_json()))
        assert again == d
        assert again.key == d.key


def test_malformed_diagrams_are_rejected():
    data = W.tripod(5, 1, 2, 4).to_json()
    bad_ids = dict(data, vertices=[dict(v, id=v["id"] + 1) for v in data["vertices"]])
    with pytest.raises(W.InvalidDiagram):
        W.TensorDiagram.from_json(bad_ids)
    bad_rotation = json.loads(json.dumps(data))
    bad_rotation["rotations"]["1"] = [bad_rotation["rotations"]["2"][0]]
    with pytest.raises(W.InvalidDiagram):
        W.TensorDiagram.from_json(bad_rotation)


def test_layout_realizes_planar_webs():
    pos = W.layout(W.y_tree(6, [(1, 2), (3, 4), (5, 6)]))
    assert len(pos) == 10
    with pytest.raises(W.LayoutError):
        W.layout(W.product_124_135())
