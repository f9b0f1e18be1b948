"""Hypothesis strategies shared by the property tests."""
from hypothesis import strategies as st

from clusterbraid.exact import PolyRing
from clusterbraid.quiver import ExtQuiver

RING = PolyRing(("a", "b", "c"))


@st.composite
def polys(draw, max_terms=4, max_exp=3, nonzero=False):
    terms = draw(st.dictionaries(
        st.tuples(*[st.integers(0, max_exp)] * len(RING.names)),
        st.fractions(min_value=-9, max_value=9, max_denominator=5).filter(bool),
        min_size=1 if nonzero else 0, max_size=max_terms,
    ))
    return RING.from_terms(terms)


@st.composite
def quivers(draw, max_mutable=5, max_frozen=2, max_weight=2):
    m = draw(st.integers(1, max_mutable))
    f = draw(st.integers(0, max_frozen))
    n = m + f
    b = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if i >= m and j >= m:
                continue
            w = draw(st.integers(-max_weight, max_weight))
            b[i][j], b[j][i] = w, -w
    return ExtQuiver(m, f, tuple(map(tuple, b)))
