"""Random 3-SAT instance generation with rejection on solution count.

Generation rules enforced on accepted output:
  1. all clauses pairwise distinct as sets of literals;
  2. every variable occurs at least once positively and at least once
     negated across the formula;
  3. the three variables within a clause are distinct;
  4. m = round(R * n) clauses (half-away-from-zero rounding).

The clause sampler draws 3 distinct variable indices uniformly, then 3
independent negation bits, redrawing on duplicate clauses. Rule 2 is
enforced by rejecting the completed formula, not by repair.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, GenerationFailureError
from .rng import RNG_ID, SplitMix64, derive_seed
from .sat import Clause, Formula, Literal, count_solutions, from_dimacs, to_dimacs

DEFAULT_CLAUSE_RATIO = 4.267


def round_half_away(x: float) -> int:
    if x >= 0:
        return int(math.floor(x + 0.5))
    return -int(math.floor(-x + 0.5))


@dataclass(frozen=True)
class GenConfig:
    n: int
    clause_ratio: float = DEFAULT_CLAUSE_RATIO
    target_n_s: int | None = None  # None means "any"
    seed: int = 0
    max_rejections: int = 200_000

    def __post_init__(self):
        if self.n < 3:
            raise ConfigError(f"need n >= 3, got {self.n}")
        if self.clause_ratio <= 0:
            raise ConfigError("clause_ratio must be positive")
        if self.max_rejections < 1:
            raise ConfigError("max_rejections must be >= 1")
        if self.target_n_s is not None and self.target_n_s < 0:
            raise ConfigError("target_n_s must be >= 0 or None")

    @property
    def m(self) -> int:
        return round_half_away(self.clause_ratio * self.n)


@dataclass(frozen=True)
class GenResult:
    formula: Formula
    n_s: int
    rejection_count: int
    solutions: tuple  # satisfying assignments, ascending by basis index


def _check_feasible(cfg: GenConfig) -> None:
    m, n = cfg.m, cfg.n
    if m < 1:
        raise ConfigError(f"m={m} clauses; need at least 1")
    # rule 2 needs 2n literal slots (each variable in both orientations)
    if 3 * m < 2 * n:
        raise ConfigError(
            f"m={m} gives {3 * m} literal slots; rule 2 needs >= {2 * n}"
        )
    distinct = 8 * math.comb(n, 3)
    if m > distinct:
        raise ConfigError(
            f"m={m} exceeds the {distinct} distinct legal clauses at n={n}"
        )


def _draw_clause(rng: SplitMix64, n: int) -> Clause:
    v1 = rng.next_below(n)
    v2 = rng.next_below(n)
    while v2 == v1:
        v2 = rng.next_below(n)
    v3 = rng.next_below(n)
    while v3 == v1 or v3 == v2:
        v3 = rng.next_below(n)
    lits = [Literal(v, rng.next_bool()) for v in (v1, v2, v3)]
    lits.sort(key=lambda l: l.var_index)
    return Clause(tuple(lits))


def _both_orientations(f: Formula) -> bool:
    pos = np.zeros(f.n, dtype=bool)
    neg = np.zeros(f.n, dtype=bool)
    v = f.vars_array.ravel()
    s = f.negs_array.ravel().astype(bool)
    pos[v[~s]] = True
    neg[v[s]] = True
    return bool(pos.all() and neg.all())


def generate(cfg: GenConfig) -> GenResult:
    """Draw formulas until one passes all rules and the n_S target.

    Deterministic function of cfg.seed. rejection_count is the number of
    completed formulas discarded (rule 2 or n_S mismatch) before acceptance.
    """
    _check_feasible(cfg)
    rng = SplitMix64(cfg.seed)
    m = cfg.m
    rejections = {"rule2": 0, "n_s": 0}
    for _ in range(cfg.max_rejections + 1):
        keys = set()
        clauses = []
        while len(clauses) < m:
            c = _draw_clause(rng, cfg.n)
            k = c.key()
            if k in keys:
                continue
            keys.add(k)
            clauses.append(c)
        f = Formula(cfg.n, tuple(clauses))
        if not _both_orientations(f):
            rejections["rule2"] += 1
            continue
        n_s, solutions = count_solutions(f)
        if cfg.target_n_s is not None and n_s != cfg.target_n_s:
            rejections["n_s"] += 1
            continue
        return GenResult(f, n_s, sum(rejections.values()), tuple(solutions))
    raise GenerationFailureError(
        f"no accepted formula within {cfg.max_rejections} rejections "
        f"(target n_S={cfg.target_n_s})",
        attempts=sum(rejections.values()) + 1,
        rejections=rejections,
    )


def check_generation_rules(f: Formula, clause_ratio: float | None = None) -> list[str]:
    """Standalone validator; returns human-readable violations (empty = ok).

    Rules 1 and 3 are also enforced by the Formula/Clause constructors;
    re-checked here so externally loaded instances can be audited.
    """
    problems = []
    keys = [c.key() for c in f.clauses]
    if len(set(keys)) != len(keys):
        problems.append("rule 1: duplicate clauses")
    for i, c in enumerate(f.clauses):
        if len({l.var_index for l in c.literals}) != 3:
            problems.append(f"rule 3: repeated variable in clause {i}")
    if not _both_orientations(f):
        problems.append("rule 2: some variable lacks an orientation")
    if clause_ratio is not None:
        want = round_half_away(clause_ratio * f.n)
        if f.m != want:
            problems.append(f"rule 4: m={f.m}, want round({clause_ratio}*{f.n})={want}")
    return problems


@dataclass(frozen=True)
class SuiteStats:
    accepted: int
    rejected: int

    @property
    def acceptance_rate(self) -> float:
        total = self.accepted + self.rejected
        return self.accepted / total if total else 0.0


def generate_suite(
    n: int,
    count: int,
    target_n_s: int | None,
    seed: int,
    clause_ratio: float = DEFAULT_CLAUSE_RATIO,
) -> tuple[list[GenResult], SuiteStats]:
    """count independent instances from per-index derived seeds."""
    results = []
    rejected = 0
    for i in range(count):
        cfg = GenConfig(
            n=n,
            clause_ratio=clause_ratio,
            target_n_s=target_n_s,
            seed=derive_seed(seed, i),
        )
        r = generate(cfg)
        rejected += r.rejection_count
        results.append(r)
    return results, SuiteStats(accepted=count, rejected=rejected)


def instance_metadata(cfg: GenConfig, result: GenResult) -> dict:
    meta = {
        "n": cfg.n,
        "m": result.formula.m,
        "clause_ratio": cfg.clause_ratio,
        "seed": cfg.seed,
        "n_s": result.n_s,
        "rejection_count": result.rejection_count,
        "rng": RNG_ID,
    }
    if result.n_s <= 8:
        meta["solutions"] = [
            "".join("1" if b else "0" for b in a) for a in result.solutions
        ]
    return meta


def save_instance(base: Path, result: GenResult, meta: dict) -> tuple[Path, Path]:
    """Write <base>.cnf and <base>.json; returns both paths."""
    cnf = base.with_suffix(".cnf")
    js = base.with_suffix(".json")
    cnf.write_text(to_dimacs(result.formula))
    js.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return cnf, js


def load_instance(cnf_path: Path) -> tuple[Formula, dict | None]:
    """Read a DIMACS file and its JSON sidecar when present."""
    f = from_dimacs(Path(cnf_path).read_text())
    js = Path(cnf_path).with_suffix(".json")
    meta = json.loads(js.read_text()) if js.exists() else None
    return f, meta
