from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import RING, polys

from clusterbraid.exact import (
    FrozenLaurentMonomial,
    ZeroPolynomial,
    exact_divide,
    normalize,
    proportional,
    strip_frozen,
)

a, b, c = RING.gens()


def as_dict(p):
    return {e: Fraction(x) for e, x in p.terms()}


def naive_product(p, q):
    out = {}
    for e1, x in as_dict(p).items():
        for e2, y in as_dict(q).items():
            e = tuple(u + v for u, v in zip(e1, e2))
            out[e] = out.get(e, 0) + x * y
    return {e: x for e, x in out.items() if x}


@given(polys(), polys())
def test_product_matches_schoolbook_convolution(p, q):
    assert as_dict(p * q) == naive_product(p, q)


@given(polys(nonzero=True))
def test_normalize_is_idempotent_and_exact(p):
    unit, q = normalize(p)
    assert q.scale(unit) == p
    assert normalize(q) == (1, q)
    assert q.leading_coefficient() > 0


def test_normalize_rejects_zero():
    with pytest.raises(ZeroPolynomial):
        normalize(RING.zero)


@given(polys(), polys(nonzero=True))
def test_exact_divide_round_trip(p, q):
    assert exact_divide(p * q, q) == p


def test_exact_divide_detects_non_divisors():
    assert exact_divide(a * b + 1, a + 1) is None
    assert exact_divide(a, a * b) is None
    with pytest.raises(ZeroDivisionError):
        exact_divide(a, RING.zero)


@given(polys())
def test_text_round_trip(p):
    assert RING.parse(str(p)) == p


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 4))
def test_proportional_recovers_frozen_monomial(e1, e2, scale):
    frozen = [a, b + 1]
    core = c * c - a * c + 2
    def with_monomial(x, y):
        out = core.scale(scale)
        num, den = FrozenLaurentMonomial((x, y)).split(frozen)
        return out * num, den
    num1, den1 = with_monomial(max(e1, 0), max(e2, 0))
    num2, den2 = with_monomial(max(-e1, 0), max(-e2, 0))
    m = proportional(num1 * den1, num2 * den2, frozen)
    assert m == FrozenLaurentMonomial((max(e1, 0) - max(-e1, 0), max(e2, 0) - max(-e2, 0)))


def test_proportional_rejects_different_cores():
    assert proportional(a * (c + 1), b * (c + 2), [a, b]) is None


def test_strip_frozen_counts_multiplicity():
    exps, core = strip_frozen(a**3 * (b + 1) ** 2 * (c - 1), [a, b + 1])
    assert exps == [3, 2]
    assert core == c - 1
