"""Restart walk: kernel pinned to a pure-python mirror and a Markov oracle."""

import numpy as np
import pytest

from mdsat.errors import ConfigError
from mdsat.sat import Formula, evaluate_formula, make_clause
from mdsat.schoening import WalkConfig, schoening_run, schoening_stats

from oracles import markov_expected_checks, python_walk


@pytest.mark.parametrize("seed", [0, 1, 2**64 - 1, 0xDEADBEEF])
def test_kernel_matches_python_mirror(usa8, seed):
    f = usa8.formula
    want_a, want_checks, want_flips, want_restarts = python_walk(f, seed)
    r = schoening_run(f, WalkConfig(seed=seed))
    assert r.clause_checks == want_checks
    assert r.flips == want_flips
    assert r.restarts == want_restarts
    assert r.solution is not None
    assert np.array_equal(r.solution, want_a)


@pytest.mark.parametrize("c_max", [1, 3, 24])
def test_kernel_matches_mirror_with_restart_cap(usa10, c_max):
    f = usa10.formula
    for seed in (7, 8, 9):
        want_a, want_checks, want_flips, want_restarts = python_walk(
            f, seed, c_max=c_max
        )
        r = schoening_run(f, WalkConfig(c_max=c_max, seed=seed))
        assert (r.clause_checks, r.flips, r.restarts) == (
            want_checks, want_flips, want_restarts
        )
        assert np.array_equal(r.solution, want_a)


def test_kernel_matches_mirror_under_check_budget(usa8):
    f = usa8.formula
    for seed in (11, 12):
        for budget in (1, 40, 500):
            want_a, want_checks, want_flips, want_restarts = python_walk(
                f, seed, c_max=5, max_checks=budget
            )
            r = schoening_run(
                f, WalkConfig(c_max=5, seed=seed, max_total_checks=budget)
            )
            assert (r.clause_checks, r.flips, r.restarts) == (
                want_checks, want_flips, want_restarts
            )
            if want_a is None:
                assert r.timed_out
            else:
                assert np.array_equal(r.solution, want_a)


def test_budget_overshoot_below_one_pass(unsat8):
    f = unsat8.formula
    budget = 50
    r = schoening_run(f, WalkConfig(seed=5, max_total_checks=budget))
    assert r.timed_out
    assert budget <= r.clause_checks <= budget + f.m - 1


def test_unlimited_walk_never_restarts(usa8):
    f = usa8.formula
    for seed in range(6):
        r = schoening_run(f, WalkConfig(seed=seed))
        assert r.restarts == 0
        assert evaluate_formula(f, r.solution)
        assert r.clause_checks >= f.m  # final pass verifies every clause


def test_solution_exactness_on_multi_solution_instance(multi10):
    r = schoening_run(multi10.formula, WalkConfig(seed=42))
    assert evaluate_formula(multi10.formula, r.solution)


def test_markov_oracle_single_clause_exact():
    f = Formula(3, (make_clause((1, 2, 3)),))
    # 7/8 of starts verify in one check; 000 pays one failed check then
    # any flip satisfies, one more verifying check
    assert markov_expected_checks(f) == pytest.approx(9 / 8, abs=1e-12)


def test_empirical_mean_matches_markov_oracle(usa8):
    runs = 2000
    stats = schoening_stats(usa8.formula, runs=runs, seed=314)
    assert stats.timeouts == 0
    exact = markov_expected_checks(usa8.formula)
    z = abs(stats.mean - exact) / stats.std_error
    assert z < 4.0


def test_stats_aggregation_matches_single_runs(usa8):
    from mdsat.rng import derive_seed

    f = usa8.formula
    runs = 25
    stats = schoening_stats(f, runs=runs, seed=77, c_max=20)
    counts = []
    timeouts = 0
    for i in range(runs):
        r = schoening_run(f, WalkConfig(c_max=20, seed=derive_seed(77, i)))
        if r.timed_out:
            timeouts += 1
        else:
            counts.append(r.clause_checks)
    arr = np.asarray(counts, dtype=float)
    assert stats.timeouts == timeouts
    assert stats.mean == pytest.approx(arr.mean(), rel=1e-15)
    assert stats.variance == pytest.approx(arr.var(), rel=1e-15)  # ddof=0
    q = stats.quantiles
    assert q["min"] <= q["q25"] <= q["median"] <= q["q75"] <= q["max"]
    assert q["min"] <= stats.mean <= q["max"]


def test_stats_single_run_degenerate(usa8):
    stats = schoening_stats(usa8.formula, runs=1, seed=3)
    assert stats.variance == 0.0
    assert np.isnan(stats.std_error)


def test_stats_all_timeouts(unsat8):
    stats = schoening_stats(unsat8.formula, runs=3, seed=0, max_total_checks=40)
    assert stats.timeouts == 3
    assert np.isnan(stats.mean)
    assert stats.quantiles == {}


def test_explicit_seed_list(usa8):
    seeds = [101, 202, 303]
    a = schoening_stats(usa8.formula, runs=3, seeds=seeds)
    b = schoening_stats(usa8.formula, runs=3, seeds=list(seeds))
    assert a == b
    with pytest.raises(ConfigError):
        schoening_stats(usa8.formula, runs=4, seeds=seeds)


@pytest.mark.parametrize(
    "kwargs",
    [{"c_max": 0}, {"c_max": -3}, {"max_total_checks": 0}],
)
def test_bad_walk_config(kwargs):
    with pytest.raises(ConfigError):
        WalkConfig(**kwargs)


def test_zero_runs_rejected(usa8):
    with pytest.raises(ConfigError):
        schoening_stats(usa8.formula, runs=0)
