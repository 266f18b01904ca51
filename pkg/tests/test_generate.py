"""Instance generation: rules, rejection targeting, persistence."""

import json

import pytest

from mdsat.errors import ConfigError, GenerationFailureError
from mdsat.generate import (
    DEFAULT_CLAUSE_RATIO,
    GenConfig,
    check_generation_rules,
    generate,
    generate_suite,
    instance_metadata,
    load_instance,
    round_half_away,
    save_instance,
)
from mdsat.sat import assignment_index, evaluate_formula, to_dimacs

from oracles import brute_solutions


@pytest.mark.parametrize(
    "x,want",
    [(0.5, 1), (1.5, 2), (2.5, 3), (42.67, 43), (34.136, 34), (-0.5, -1), (-1.5, -2)],
)
def test_round_half_away(x, want):
    assert round_half_away(x) == want


def test_clause_count_follows_ratio():
    assert GenConfig(n=10).m == 43  # 4.267*10 = 42.67
    assert GenConfig(n=8).m == 34  # 34.136
    assert GenConfig(n=20).m == 85  # 85.34
    assert GenConfig(n=12, clause_ratio=3.0).m == 36


def test_generate_is_deterministic():
    cfg = GenConfig(n=8, target_n_s=1, seed=123)
    a = generate(cfg)
    b = generate(cfg)
    assert to_dimacs(a.formula) == to_dimacs(b.formula)
    assert a.n_s == b.n_s == 1
    assert a.rejection_count == b.rejection_count


def test_generated_instances_pass_rule_checker():
    results, stats = generate_suite(8, 5, None, seed=77)
    assert stats.accepted == 5
    for r in results:
        assert check_generation_rules(r.formula, DEFAULT_CLAUSE_RATIO) == []


def test_both_orientations_present():
    r = generate(GenConfig(n=9, seed=5))
    seen = {(v, bool(s)) for c in r.formula.clauses for (v, s) in
            ((l.var_index, l.negated) for l in c.literals)}
    for v in range(9):
        assert (v, True) in seen and (v, False) in seen


@pytest.mark.parametrize("target", [0, 1, 2])
def test_target_solution_count_is_honored(target):
    r = generate(GenConfig(n=8, target_n_s=target, seed=40 + target))
    assert r.n_s == target
    assert len(r.solutions) == target
    for a in r.solutions:
        assert evaluate_formula(r.formula, a)
    idx = [assignment_index(a) for a in r.solutions]
    assert idx == sorted(idx)


def test_solution_count_matches_brute_force():
    r = generate(GenConfig(n=8, target_n_s=2, seed=61))
    assert sorted(map(tuple, brute_solutions(r.formula))) == sorted(
        tuple(bool(x) for x in a) for a in r.solutions
    )


def test_rejection_budget_raises():
    # target far in the tail, tiny budget: must fail fast and report stats
    with pytest.raises(GenerationFailureError) as ei:
        generate(GenConfig(n=8, target_n_s=200, seed=1, max_rejections=5))
    err = ei.value
    assert sum(err.rejections.values()) == 6
    assert err.attempts == 7


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n": 2},
        {"n": 8, "clause_ratio": 0.0},
        {"n": 8, "clause_ratio": -1.0},
        {"n": 8, "target_n_s": -1},
        {"n": 8, "max_rejections": 0},
    ],
)
def test_bad_config_rejected(kwargs):
    with pytest.raises(ConfigError):
        GenConfig(**kwargs)


def test_infeasible_clause_count_rejected():
    # too few literal slots for rule 2
    with pytest.raises(ConfigError):
        generate(GenConfig(n=12, clause_ratio=0.1))
    # more clauses than distinct legal ones at n=3 (8 total)
    with pytest.raises(ConfigError):
        generate(GenConfig(n=3, clause_ratio=20.0))


def test_suite_instances_are_independent():
    results, _ = generate_suite(8, 6, 1, seed=99)
    texts = [to_dimacs(r.formula) for r in results]
    assert len(set(texts)) == 6
    again, _ = generate_suite(8, 6, 1, seed=99)
    assert [to_dimacs(r.formula) for r in again] == texts


def test_metadata_contents():
    cfg = GenConfig(n=8, target_n_s=2, seed=61)
    r = generate(cfg)
    meta = instance_metadata(cfg, r)
    assert meta["n"] == 8
    assert meta["m"] == r.formula.m
    assert meta["n_s"] == 2
    assert meta["seed"] == 61
    assert isinstance(meta["rng"], str)
    assert len(meta["solutions"]) == 2
    for s, a in zip(meta["solutions"], r.solutions):
        assert len(s) == 8
        assert s == "".join("1" if b else "0" for b in a)


def test_save_and_load_roundtrip(tmp_path):
    cfg = GenConfig(n=8, target_n_s=1, seed=13)
    r = generate(cfg)
    meta = instance_metadata(cfg, r)
    cnf, js = save_instance(tmp_path / "inst", r, meta)
    assert cnf.exists() and js.exists()
    f2, meta2 = load_instance(cnf)
    assert to_dimacs(f2) == to_dimacs(r.formula)
    assert meta2 == json.loads(json.dumps(meta))


def test_load_without_sidecar(tmp_path):
    cfg = GenConfig(n=8, seed=3)
    r = generate(cfg)
    p = tmp_path / "bare.cnf"
    p.write_text(to_dimacs(r.formula))
    f2, meta2 = load_instance(p)
    assert meta2 is None
    assert f2.m == r.formula.m
