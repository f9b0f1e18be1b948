import itertools
from math import comb

import pytest

from clusterbraid.cluster import ExchangeNotPolynomial, mutate_seed
from clusterbraid.exact import MultiPoly
from clusterbraid.fock_goncharov import (
    Triangulation,
    fg_function,
    flag_exchange_check,
    flip_sequence,
    frozen_fg_functions,
    generic_flag_config,
    triangulation_seed,
)


@pytest.mark.parametrize("k,r", [(2, 4), (3, 4), (3, 5), (4, 5), (3, 6)])
def test_seed_size(k, r):
    seed, labels = triangulation_seed(Triangulation.fan(r), k)
    interior = (r - 2) * comb(k - 1, 2)
    on_diagonals = (r - 3) * (k - 1)
    assert seed.n_mutable == interior + on_diagonals
    assert seed.quiver.n_frozen == r * (k - 1)
    assert set(labels[seed.n_mutable:]) == set(frozen_fg_functions(k, r))


def test_flags_are_consistent():
    c = generic_flag_config(3, 4)
    assert all(c.flag(m).check() for m in range(1, 5))


@pytest.mark.parametrize("k,r", [(3, 5), (3, 6)])
def test_every_single_mutation_is_polynomial(k, r):
    seed, _ = triangulation_seed(Triangulation.fan(r), k)
    for v in range(seed.n_mutable):
        assert isinstance(mutate_seed(seed, v).cluster[v], MultiPoly)


@pytest.mark.parametrize("k,steps", [(2, 1), (3, 4)])
def test_flip_is_realized_by_mutations(k, steps):
    result = flip_sequence(Triangulation.fan(5), (1, 3), k)
    assert result["status"] == "pass"
    assert len(result["sequence"]) == steps


def test_flip_on_a_zigzag_triangulation():
    T = Triangulation(6, ((1, 3), (3, 6), (3, 5)))
    result = flip_sequence(T, (3, 6), 3)
    assert result["status"] == "pass"
    assert tuple(result["new_diagonal"]) == (1, 5)


@pytest.mark.parametrize("k,abar", [(k, a) for k in (2, 3, 4)
                                    for a in itertools.product(range(k - 1), repeat=4) if sum(a) == k - 2])
def test_quadruple_exchange_relation(k, abar):
    assert flag_exchange_check(k, abar)


def test_invalid_triangulations_are_rejected():
    with pytest.raises(ValueError):
        Triangulation(5, ((1, 3), (2, 4)))
    with pytest.raises(ValueError):
        Triangulation(5, ((1, 2), (1, 3)))
    with pytest.raises(ValueError):
        Triangulation(5, ((1, 3),))


def test_coordinate_weights_are_checked():
    with pytest.raises(ValueError):
        fg_function(3, (1, 2, 3), (1, 1, 2))
    with pytest.raises(ValueError):
        fg_function(3, (1, 2), (3, 0))


def test_flip_changes_exactly_one_diagonal():
    T = Triangulation.fan(6)
    for d in T.diagonals:
        T2 = T.flip(d)
        assert len(set(T.diagonals) ^ set(T2.diagonals)) == 2
