import math

import pytest

from clusterbraid.cluster import abstract_seed, var_key
from clusterbraid.explorer import (
    certify_dot_image,
    enumerate_quiver_classes,
    freeze_and_specialize,
    fundamental_domain,
    orbit,
    plucker_labels,
    plucker_seed_containing,
)
from clusterbraid.grassmannian import plucker_poly, scott_initial_seed
from clusterbraid.maps import GroupWord, dot_action, parse_expr, scalar_invariant, slice_core
from clusterbraid.quiver import ExtQuiver, canonical_form, restrict_mutable
from clusterbraid.suites import EXPECTED_CLASSES, GR48_X


@pytest.mark.parametrize("k,n", [(4, 8)])
def test_scott_quiver_class_count(k, n):
    seed, _ = scott_initial_seed(k, n)
    atlas = enumerate_quiver_classes(seed.quiver)
    assert (atlas.class_count, atlas.cycle_rank) == EXPECTED_CLASSES[(k, n)]


@pytest.mark.parametrize("k,n", [(3, 6), (3, 7), (4, 8)])
def test_opposite_identification_at_most_halves_the_count(k, n):
    seed, _ = scott_initial_seed(k, n)
    plain = enumerate_quiver_classes(seed.quiver).class_count
    merged = enumerate_quiver_classes(seed.quiver, identify_opposite=True).class_count
    assert math.ceil(plain / 2) <= merged <= plain


def test_fundamental_domain_has_one_seed_per_class():
    seed, _ = scott_initial_seed(3, 7)
    atlas = enumerate_quiver_classes(seed.quiver)
    domain = fundamental_domain(seed, atlas)
    assert len(domain) == atlas.class_count
    forms = {canonical_form(restrict_mutable(s.quiver)) for s in domain}
    assert len(forms) == atlas.class_count


@pytest.mark.parametrize("mode", ["symbolic", "specialized"])
@pytest.mark.parametrize("word,period", [("r", 6), ("th", 2), ("s1", 4), ("r r r", 2)])
def test_orbit_periods_on_gr36(mode, word, period):
    rec = orbit(GroupWord.parse(word, 3, 6), plucker_poly(3, 6, (1, 2, 4)), budget=14, mode=mode, x_index=(1, 2, 4))
    assert rec.period == period
    assert rec.period_verified


def test_orbit_modes_agree():
    w = GroupWord.parse("s1 s2", 3, 6)
    x = plucker_poly(3, 6, (1, 3, 5))
    a = orbit(w, x, budget=10, mode="symbolic", x_index=(1, 3, 5))
    b = orbit(w, x, budget=10, mode="specialized", x_index=(1, 3, 5))
    assert a.labels == b.labels
    assert a.period == b.period


def test_orbit_budget_is_reported():
    x = plucker_poly(4, 8, (2, 3, 4, 7))
    names = {"X": scalar_invariant(parse_expr(GR48_X), 4, 8)}
    rec = orbit(GroupWord.parse("s1 s2 s2 s1", 4, 8), x, budget=4, names=names, x_index=(2, 3, 4, 7))
    assert rec.labels[:3] == ["2347", "2378", "X"]
    assert rec.exceeded_budget and rec.period is None
    assert len(rec.labels) == 5


def test_dot_image_certificates():
    w = GroupWord.parse("s1 s2 s2 s1", 4, 8)
    p = lambda s: plucker_poly(4, 8, tuple(map(int, s)))  # noqa: E731
    assert certify_dot_image(w, p("4678"), p("2348"))["status"] == "pass"
    assert certify_dot_image(w, p("4678"), p("2347"))["status"] == "fail"


@pytest.mark.parametrize("token", ["s1", "s2", "s1i", "r", "ri"])
def test_slice_core_matches_full_dot_action(token):
    # restricting after the full pullback and pulling back on the slice agree
    for idx in [(1, 2, 4), (1, 3, 5), (2, 4, 6), (1, 4, 5)]:
        f = plucker_poly(3, 6, idx)
        full = dot_action(GroupWord(3, 6, (token,)), f).core
        assert slice_core([token], f, 3, 6) == slice_core((), full, 3, 6)


def test_certificate_bridges_a_gap_on_the_slice():
    w = GroupWord.parse("s1 s2 s2 s1", 4, 8)
    p = lambda s: plucker_poly(4, 8, tuple(map(int, s)))  # noqa: E731
    # max_terms below the 24 terms of a Plücker stalls both walks at once
    good = certify_dot_image(w, p("4678"), p("2348"), max_terms=10, max_bridge=4)
    assert good["status"] == "pass" and good["bridged_on_slice"] == 4
    bad = certify_dot_image(w, p("4678"), p("2347"), max_terms=10, max_bridge=4)
    assert bad["status"] == "fail" and bad["bridged_on_slice"] == 4
    assert certify_dot_image(w, p("4678"), p("2348"), max_terms=10)["status"] == "undecided"


def test_plucker_seed_search():
    seed, _ = scott_initial_seed(3, 6)
    found, indices = plucker_seed_containing(seed, 3, 6, [(1, 3, 5)])
    assert (1, 3, 5) in indices
    labels = plucker_labels(3, 6)
    assert [labels[var_key(x)] for x in found.cluster] == indices


def test_freeze_and_specialize_on_an_abstract_seed():
    q = ExtQuiver.from_arrows(2, 1, [(0, 1), (1, 2)])
    s = abstract_seed(q)
    out = freeze_and_specialize(s, freeze=[s.cluster[0]], set_to_one=[s.cluster[2]])
    assert out.quiver.n_mutable == 1
    assert out.quiver.n_frozen == 1
    with pytest.raises(ValueError):
        freeze_and_specialize(s, set_to_one=[s.cluster[0]])
