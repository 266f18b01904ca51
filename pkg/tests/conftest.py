"""Shared fixtures: frozen-seed instance suites sized for the test budget.

Suites are generated once per session; every seed here is load-bearing
(changing one changes downstream statistical outcomes), so treat them as
frozen constants.
"""

from __future__ import annotations

import math

import pytest

from mdsat.generate import GenConfig, generate, generate_suite


@pytest.fixture(scope="session")
def usa8():
    """One uniquely satisfiable instance at n=8."""
    return generate(GenConfig(n=8, target_n_s=1, seed=11))


@pytest.fixture(scope="session")
def usa10():
    return generate(GenConfig(n=10, target_n_s=1, seed=33))


@pytest.fixture(scope="session")
def usa12():
    return generate(GenConfig(n=12, target_n_s=1, seed=7))


@pytest.fixture(scope="session")
def multi10():
    """n=10 instance with two satisfying assignments."""
    return generate(GenConfig(n=10, target_n_s=2, seed=21))


@pytest.fixture(scope="session")
def unsat8():
    return generate(GenConfig(n=8, target_n_s=0, seed=4))


@pytest.fixture(scope="session")
def usa_suite_small():
    """21 uniquely satisfiable instances across n in {8, 10, 12}."""
    out = []
    for n, count, seed in ((8, 8, 101), (10, 7, 202), (12, 6, 303)):
        results, _ = generate_suite(n, count, target_n_s=1, seed=seed)
        out.extend(results)
    return out


@pytest.fixture(scope="session")
def mixed_suite():
    """10 instances, n in {8, 10}, n_S in {1, 2, 3}."""
    out = []
    specs = [(8, 1, 51), (8, 2, 52), (8, 3, 53), (10, 1, 54), (10, 2, 55)]
    for n, n_s, seed in specs:
        results, _ = generate_suite(n, 2, target_n_s=n_s, seed=seed)
        out.extend(results)
    return out


@pytest.fixture(scope="session")
def spectral_suite():
    """52 instances with n_S in {0,1,2,3} across n in {8, 10, 12} for the
    ground-space and gap studies: bulk at n=8, fewer at the sizes where a
    dense eigendecomposition is pricier."""
    plan = [
        (8, 7, (0, 1, 2, 3), 900),
        (10, 4, (0, 1, 2, 3), 910),
        (12, 2, (0, 1, 2, 3), 920),
    ]
    out = []
    for n, per_ns, ns_values, seed0 in plan:
        for k, n_s in enumerate(ns_values):
            results, _ = generate_suite(n, per_ns, target_n_s=n_s,
                                        seed=seed0 + k)
            out.extend(results)
    return out
