import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clusterbraid.exact import PolyRing
from clusterbraid.grassmannian import (
    ExteriorElement,
    GenericConfig,
    all_k_subsets,
    frozen_indices,
    meet,
    plucker,
    plucker_poly,
    scott_initial_seed,
    wedge,
    wedge_all,
    weakly_separated,
)

SCALARS = PolyRing(())


def leibniz_det(rows):
    n = len(rows)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = -1 if inv % 2 else 1
        for i, p in enumerate(perm):
            term *= rows[i][p]
        total += term
    return total


def vec(entries):
    return ExteriorElement.vector([SCALARS.constant(x) for x in entries])


def top(elem):
    return elem.as_scalar().evaluate([])


def vectors(k, count):
    return st.lists(st.lists(st.integers(-4, 4), min_size=k, max_size=k), min_size=count, max_size=count)


@given(st.integers(2, 4).flatmap(lambda k: vectors(k, k)))
def test_wedge_of_k_vectors_is_the_determinant(vs):
    assert top(wedge_all([vec(v) for v in vs])) == leibniz_det([list(col) for col in zip(*vs)])


def shuffle_meet(A, B, k):
    """Meet of simple tensors by the shuffle expansion over splits of A."""
    a, b = len(A), len(B)
    total = None
    for first in itertools.combinations(range(a), k - b):
        rest = [i for i in range(a) if i not in first]
        order = list(first) + rest
        inv = sum(1 for i in range(a) for j in range(i + 1, a) if order[i] > order[j])
        bracket = leibniz_det([list(c) for c in zip(*([A[i] for i in first] + list(B)))])
        if bracket == 0:
            continue
        part = wedge_all([vec(A[i]) for i in rest]) if rest else ExteriorElement.scalar(k, SCALARS.one)
        term = part.scale(-bracket if inv % 2 else bracket)
        total = term if total is None else total + term
    return total


@st.composite
def meet_case(draw):
    k = draw(st.integers(2, 4))
    a = draw(st.integers(1, k))
    b = draw(st.integers(max(1, k - a), k))
    return k, draw(vectors(k, a)), draw(vectors(k, b))


@given(meet_case())
def test_meet_agrees_with_shuffle_expansion(case):
    k, A, B = case
    got = meet(wedge_all([vec(v) for v in A]), wedge_all([vec(v) for v in B]))
    want = shuffle_meet(A, B, k)
    if want is None:
        assert got.is_zero()
    else:
        assert (got - want).is_zero()


@given(meet_case())
def test_meet_sign_law(case):
    k, A, B = case
    a, b = len(A), len(B)
    u, v = wedge_all([vec(x) for x in A]), wedge_all([vec(x) for x in B])
    sign = (-1) ** ((k - a) * (k - b))
    assert (meet(u, v) - meet(v, u).scale(sign)).is_zero()


@given(st.integers(3, 4).flatmap(lambda k: st.tuples(st.just(k), vectors(k, k - 1), vectors(k, k - 1), vectors(k, k - 1))))
def test_meet_is_associative_on_hyperplanes(case):
    k, A, B, C = case
    u, v, w = (wedge_all([vec(x) for x in X]) for X in (A, B, C))
    assert (meet(meet(u, v), w) - meet(u, meet(v, w))).is_zero()


@given(st.sampled_from(all_k_subsets(3, 6)), st.integers(0, 2), st.integers(0, 2))
def test_plucker_is_alternating(index, i, j):
    c = GenericConfig.generic(3, 6)
    swapped = list(index)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    sign = 1 if i == j else -1
    assert plucker(c, swapped) == plucker(c, index).scale(sign)
    assert plucker(c, [index[0], index[0], index[1]]).is_zero()


def test_three_term_plucker_relation():
    D = lambda *I: plucker_poly(2, 5, I)  # noqa: E731
    assert D(1, 3) * D(2, 4) == D(1, 2) * D(3, 4) + D(1, 4) * D(2, 3)


def chord_separated(I, J):
    """I - J and J - I lie on opposite sides of some chord: one is a cyclic block."""
    only_i, only_j = set(I) - set(J), set(J) - set(I)
    points = sorted(only_i | only_j)
    if not points:
        return True
    marks = [p in only_i for p in points]
    for r in range(len(marks)):
        rotated = marks[r:] + marks[:r]
        if rotated == sorted(rotated, reverse=True):
            return True
    return False


@pytest.mark.parametrize("k,n", [(2, 6), (3, 6), (3, 7), (4, 8)])
def test_weak_separation_matches_chord_criterion(k, n):
    for I, J in itertools.combinations(all_k_subsets(k, n), 2):
        assert weakly_separated(I, J) == chord_separated(I, J), (I, J)


@pytest.mark.parametrize("k,n", [(2, 5), (3, 6), (3, 7), (4, 8), (3, 9)])
def test_rectangles_seed_shape(k, n):
    seed, indices = scott_initial_seed(k, n)
    assert seed.quiver.n_mutable == (k - 1) * (n - k - 1)
    assert indices[seed.quiver.n_mutable:] == frozen_indices(k, n)
    for x, I in zip(seed.cluster, indices):
        assert x == plucker_poly(k, n, I)
    pairs = itertools.combinations(indices, 2)
    assert all(weakly_separated(I, J) for I, J in pairs)


def test_generic_configuration_specializes():
    c = GenericConfig.generic(3, 5).random_specialization(random.Random(1))
    assert plucker(c, (1, 2, 3)).is_constant()
