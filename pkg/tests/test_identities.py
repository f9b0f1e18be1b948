import pytest

from clusterbraid.identities import (
    braid_relation,
    quasi_isomorphism_suite,
    twist_suite,
    verify_columnwise_equal,
    verify_proportional_maps,
    verify_quasi_commutation,
    verify_words,
)
from clusterbraid.maps import GroupWord, compose, rho, sigma


@pytest.mark.parametrize("relation", ["adjacent", "inverse", "rho", "rho-inverse"])
def test_braid_relations_on_gr36(relation):
    report = braid_relation(3, 6, relation)
    assert report.passed, report.to_json()


def test_adjacent_relation_reports_frozen_factors():
    report = braid_relation(3, 6, "adjacent")
    assert report.mode == "symbolic"
    assert any(d.get("monomial", "1") != "1" for d in report.details)


def test_distinct_generators_are_not_proportional():
    w = lambda t: GroupWord.parse(t, 3, 6)  # noqa: E731
    assert verify_words(w("s1"), w("s2")).status == "fail"
    assert verify_words(w("s1 s2"), w("s2 s1")).status == "fail"


@pytest.mark.parametrize("k,n,i", [(4, 8, 3), (5, 10, 3), (5, 10, 4)])
def test_distant_generators_quasi_commute(k, n, i):
    assert verify_quasi_commutation(k, n, i).passed


def test_distant_generators_are_proportional_on_a_cluster():
    k, n = 4, 8
    report = verify_proportional_maps(compose(sigma(k, n, 1), sigma(k, n, 3)),
                                      compose(sigma(k, n, 3), sigma(k, n, 1)), n)
    assert report.passed, report.to_json()


def test_specialized_mode_agrees_with_symbolic_mode():
    k, n = 3, 6
    lhs = compose(sigma(k, n, 2), sigma(k, n, 1))
    symbolic = verify_proportional_maps(lhs, rho(k, n), n)
    specialized = verify_proportional_maps(lhs, rho(k, n), n, mode="specialized", seed=3)
    assert symbolic.passed and specialized.passed
    wrong = verify_proportional_maps(sigma(k, n, 1), rho(k, n), n, mode="specialized", seed=3)
    assert not wrong.passed


def test_columnwise_equality_separates_proportional_maps():
    k, n = 3, 6
    assert not verify_columnwise_equal(compose(sigma(k, n, 2), sigma(k, n, 1)), rho(k, n), n).passed


def test_quasi_isomorphism_suite():
    reports = quasi_isomorphism_suite()
    assert reports
    assert all(r.passed for r in reports), [r.to_json() for r in reports if not r.passed]


def test_twist_suite():
    reports = twist_suite(3, 6)
    assert all(r.passed for r in reports), [r.to_json() for r in reports if not r.passed]
