import pytest
from hypothesis import given
from hypothesis import strategies as st

from clusterbraid.cluster import var_key
from clusterbraid.exact import normalize
from clusterbraid.explorer import plucker_labels
from clusterbraid.grassmannian import all_k_subsets, frozen_indices, plucker_poly
from clusterbraid.identities import image_columns
from clusterbraid.maps import GroupWord, compose, dot_action, parse_expr, rho, scalar_invariant, sigma

LABELS = {kn: plucker_labels(*kn) for kn in ((3, 6), (4, 8))}


def mutable_indices(k, n):
    """Plücker indices that are not frozen; frozen ones have a constant core."""
    frozen = set(frozen_indices(k, n))
    return [I for I in all_k_subsets(k, n) if I not in frozen]


def image_index(word, index, k, n):
    r = dot_action(GroupWord.parse(word, k, n), plucker_poly(k, n, index))
    return LABELS[(k, n)].get(r.key)


@pytest.mark.parametrize("k,n", [(3, 6), (4, 8)])
def test_cyclic_shift_moves_every_plucker_index_by_one(k, n):
    for index in mutable_indices(k, n):
        assert image_index("r", index, k, n) == tuple(sorted(i % n + 1 for i in index))
        assert image_index("ri", index, k, n) == tuple(sorted((i - 2) % n + 1 for i in index))


@pytest.mark.parametrize("k,n", [(3, 6), (4, 8)])
def test_reflection_reverses_plucker_indices(k, n):
    for index in mutable_indices(k, n):
        assert image_index("th", index, k, n) == tuple(sorted(n + 1 - i for i in index))


@given(st.sampled_from([(3, 6), (3, 9), (4, 8)]), st.data())
def test_shift_to_the_n_fixes_plucker_cores(kn, data):
    k, n = kn
    index = data.draw(st.sampled_from(mutable_indices(k, n)))
    x = plucker_poly(k, n, index)
    r = dot_action(GroupWord.parse(" ".join(["r"] * n), k, n), x)
    assert r.core == normalize(x)[1]


@given(st.sampled_from([(3, 6, 1), (3, 6, 2), (4, 8, 1), (4, 8, 2), (4, 8, 3)]))
def test_generators_are_k_periodic(case):
    k, n, i = case
    shift = compose(*[rho(k, n)] * k)
    s = sigma(k, n, i)
    assert image_columns(compose(s, shift), n) == image_columns(compose(shift, s), n)


letters = st.sampled_from(["s1", "s2", "s1i", "s2i", "r", "ri", "th"])


@given(st.lists(letters, min_size=1, max_size=3), st.sampled_from(mutable_indices(3, 6)))
def test_word_then_inverse_returns_each_core(tokens, index):
    w = GroupWord.parse(" ".join(tokens), 3, 6)
    x = plucker_poly(3, 6, index)
    r = dot_action(w + w.inverse(), x)
    assert r.core == normalize(x)[1]


def test_dot_action_strips_frozen_factors():
    r = dot_action(GroupWord.parse("s1", 3, 6), plucker_poly(3, 6, (1, 2, 4)))
    assert LABELS[(3, 6)][r.key] == (1, 2, 5)
    assert sum(abs(e) for e in r.monomial.exponents) == 1


@pytest.mark.parametrize("index", frozen_indices(3, 6))
def test_frozen_plucker_has_trivial_core(index):
    r = dot_action(GroupWord.parse("s1 s2 r", 3, 6), plucker_poly(3, 6, index))
    assert r.core.is_constant()


@pytest.mark.parametrize("text", ["(v1v2)∩(v3v4)∩(v5v6)", "(v7v8v1)∩(v4v6v7)∩(v2v3)", "*(v1v2)∩(v3v4v5)"])
def test_expression_text_round_trip(text):
    e = parse_expr(text)
    assert str(parse_expr(str(e))) == str(e)


def test_triple_meet_is_a_quadratic_invariant():
    x = scalar_invariant(parse_expr("(v1v2)∩(v3v4)∩(v5v6)"), 3, 6)
    assert x.total_degree() == 6
    assert var_key(x) not in LABELS[(3, 6)]


@pytest.mark.parametrize("text", ["s0", "q", "s1x"])
def test_unknown_tokens_are_rejected(text):
    with pytest.raises(ValueError):
        GroupWord.parse(text, 3, 6)
    with pytest.raises(ValueError):
        parse_expr("(v1v2")
