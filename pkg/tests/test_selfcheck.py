"""Randomized consistency suites and the naive rank oracle."""

import random

from tanfam.jets import MapGerm, SOURCE_VARS, TruncatedPoly
from tanfam.selfcheck import (
    DEFAULT_ORACLE_ORDER,
    DEFAULT_ORACLE_SAMPLES,
    DEFAULT_ROUNDS,
    SuiteResult,
    check_chain_rule,
    check_composition,
    check_leibniz,
    check_rank_oracle,
    check_ring_laws,
    naive_tangent_rank,
    random_jet,
    random_sparse_germ,
    run_all,
)
from tanfam.tangent import (
    KIND_FIBERED,
    KIND_FULL,
    build_extended_tangent_space,
)

ROUNDS = 200  # enough to exercise every path; the CLI runs the full default


def test_defaults():
    assert DEFAULT_ROUNDS == 1000
    assert DEFAULT_ORACLE_SAMPLES == 20
    assert DEFAULT_ORACLE_ORDER == 3


def test_random_jet_deterministic_and_vanishing():
    a = random_jet(random.Random(5), SOURCE_VARS, 8)
    b = random_jet(random.Random(5), SOURCE_VARS, 8)
    assert a == b
    for seed in range(30):
        jet = random_jet(random.Random(seed), SOURCE_VARS, 8, vanishing=True)
        assert jet.constant_term() == 0
    capped = random_jet(random.Random(1), SOURCE_VARS, 4, max_degree=2)
    assert capped.degree() <= 2


def test_random_sparse_germ_shape():
    for seed in range(20):
        germ = random_sparse_germ(random.Random(seed), cap=4)
        assert germ.arity == 3
        total_terms = sum(len(component.terms()) for component in germ)
        assert 2 <= total_terms <= 3
        for component in germ:
            assert component.constant_term() == 0


def test_algebra_suites_pass():
    for check in (check_ring_laws, check_leibniz, check_chain_rule, check_composition):
        result = check(seed=0, rounds=ROUNDS)
        assert result.ok, result.failures
        assert result.rounds == ROUNDS
        assert result.elapsed >= 0.0


def test_rank_oracle_suite_passes():
    result = check_rank_oracle(seed=0, samples=10)
    assert result.ok, result.failures
    assert result.name == "rank-oracle"


def test_naive_rank_matches_builder_on_fixed_germ():
    cap = 4
    xi = TruncatedPoly.variable(SOURCE_VARS, "xi", cap)
    t = TruncatedPoly.variable(SOURCE_VARS, "t", cap)
    germ = MapGerm((xi + t, t * t, t * t * xi))
    for kind in (KIND_FIBERED, KIND_FULL):
        basis = build_extended_tangent_space(germ, order=3, kind=kind)
        assert naive_tangent_rank(germ, 3, kind) == basis.rank


def test_suite_result_json_shape():
    result = check_ring_laws(seed=3, rounds=50)
    payload = result.to_json()
    assert payload["name"] == result.name
    assert payload["rounds"] == 50
    assert payload["seed"] == 3
    assert payload["ok"] is True
    assert payload["failures"] == []
    assert isinstance(payload["elapsed"], float)


def test_failures_are_recorded_and_bounded():
    # force failures by running a body that always raises through _run_suite's
    # public face: the cheapest handle is a SuiteResult built by hand
    result = SuiteResult(name="demo", rounds=3, seed=0, failures=("r0", "r1"), elapsed=0.0)
    assert not result.ok
    assert result.to_json()["ok"] is False
    assert result.to_json()["failures"] == ["r0", "r1"]


def test_run_all_aggregates_five_suites():
    results = run_all(seed=0, rounds=50, samples=5)
    assert [r.name for r in results] == [
        "ring-laws",
        "leibniz",
        "chain-rule",
        "composition",
        "rank-oracle",
    ]
    assert all(r.ok for r in results)
