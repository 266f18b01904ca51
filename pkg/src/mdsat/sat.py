"""3-SAT data model: literals, clauses, formulas, evaluation, exhaustive
solution counting, and DIMACS CNF serialization.

Conventions used across the package:
  * variables are 0-indexed internally, 1-indexed only in DIMACS text;
  * an assignment is a length-n boolean vector (index i <-> variable b_i,
    TRUE <-> 1);
  * variable i corresponds to bit i (least significant) of a basis index,
    so assignment <-> integer conversions and state-vector indexing agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CapacityError, ParseError, StructuralError


@dataclass(frozen=True)
class Literal:
    var_index: int
    negated: bool

    def __post_init__(self):
        if self.var_index < 0:
            raise StructuralError(f"negative variable index {self.var_index}")


@dataclass(frozen=True)
class Clause:
    """Three literals OR'ed together; the three variables are distinct."""

    literals: tuple[Literal, Literal, Literal]

    def __post_init__(self):
        if len(self.literals) != 3:
            raise StructuralError(f"clause arity {len(self.literals)}, want 3")
        vs = [l.var_index for l in self.literals]
        if len(set(vs)) != 3:
            raise StructuralError(f"repeated variable in clause {vs}")

    def key(self) -> frozenset:
        """Identity of the clause as a set of signed literals."""
        return frozenset((l.var_index, l.negated) for l in self.literals)

    def violating_bits(self) -> tuple[int, int, int]:
        """The unique variable values (per literal) that falsify the clause.

        A positive literal is falsified by value 0, a negated one by 1.
        """
        return tuple(1 if l.negated else 0 for l in self.literals)


@dataclass(frozen=True)
class Formula:
    """n variables and an ordered clause list.

    Clause order is semantic: it defines the sequential check cycle.
    Clauses must be pairwise distinct as sets of literals.
    """

    n: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        if self.n < 1:
            raise StructuralError(f"need at least one variable, got n={self.n}")
        seen = set()
        for c in self.clauses:
            for l in c.literals:
                if l.var_index >= self.n:
                    raise StructuralError(
                        f"variable {l.var_index} out of range for n={self.n}"
                    )
            k = c.key()
            if k in seen:
                raise StructuralError(f"duplicate clause {sorted(k)}")
            seen.add(k)

    @property
    def m(self) -> int:
        return len(self.clauses)

    @cached_property
    def vars_array(self) -> np.ndarray:
        """(m, 3) int32 variable indices, clause literal order preserved."""
        a = np.array(
            [[l.var_index for l in c.literals] for c in self.clauses],
            dtype=np.int32,
        ).reshape(self.m, 3)
        a.flags.writeable = False
        return a

    @cached_property
    def negs_array(self) -> np.ndarray:
        """(m, 3) uint8 negation flags matching vars_array."""
        a = np.array(
            [[1 if l.negated else 0 for l in c.literals] for c in self.clauses],
            dtype=np.uint8,
        ).reshape(self.m, 3)
        a.flags.writeable = False
        return a


def make_clause(signed_vars: list[int] | tuple[int, ...]) -> Clause:
    """Clause from DIMACS-style signed 1-indexed integers, e.g. (1, -2, 3)."""
    lits = []
    for s in signed_vars:
        if s == 0:
            raise StructuralError("literal 0 is not valid")
        lits.append(Literal(abs(s) - 1, s < 0))
    return Clause(tuple(lits))


def assignment_from_index(index: int, n: int) -> np.ndarray:
    bits = np.array([(index >> i) & 1 for i in range(n)], dtype=bool)
    bits.flags.writeable = False
    return bits


def assignment_index(a: np.ndarray) -> int:
    return int(sum(1 << i for i, b in enumerate(a) if b))


def evaluate_clause(clause: Clause, a: np.ndarray) -> bool:
    """OR of the three literal values under assignment a."""
    for l in clause.literals:
        if l.var_index >= len(a):
            raise StructuralError(
                f"variable {l.var_index} out of range for assignment of length {len(a)}"
            )
        if bool(a[l.var_index]) != l.negated:
            return True
    return False


def evaluate_formula(f: Formula, a: np.ndarray) -> bool:
    """AND over all clauses; empty clause list is vacuously TRUE."""
    if len(a) != f.n:
        raise StructuralError(f"assignment length {len(a)} != n={f.n}")
    return all(evaluate_clause(c, a) for c in f.clauses)


def spread_indices(n: int, positions: tuple[int, int, int]) -> np.ndarray:
    """All 2^(n-3) basis indices whose bits at `positions` are zero.

    Built by inserting zero bits into a dense counter, ascending. Shared by
    the satisfiability table, the clause-check kernel, and the Hamiltonian.
    """
    g = np.arange(1 << (n - 3), dtype=np.int64)
    for z in sorted(positions):
        low = g & ((1 << z) - 1)
        g = ((g >> z) << (z + 1)) | low
    return g


def satisfying_table(f: Formula) -> np.ndarray:
    """Boolean table over all 2^n assignments: True where f is satisfied.

    Each clause zeroes exactly its violating subcube (1/8 of the table).
    """
    table = np.ones(1 << f.n, dtype=bool)
    for c in f.clauses:
        pos = tuple(l.var_index for l in c.literals)
        bits = c.violating_bits()
        off = sum(b << p for b, p in zip(bits, pos))
        table[spread_indices(f.n, pos) + off] = False
    return table


def count_solutions(
    f: Formula, max_n: int = 30
) -> tuple[int, list[np.ndarray]]:
    """Exhaustively count and list satisfying assignments.

    Returns (n_S, solutions) with solutions ascending by basis index
    (variable i <-> bit i). Capacity-limited; raise the cap explicitly via
    max_n if you accept the 2^n memory cost.
    """
    if f.n > max_n:
        raise CapacityError(
            f"count_solutions at n={f.n} needs a 2^{f.n} table "
            f"(~{(1 << f.n) / 2**20:.0f} MiB); cap is n<={max_n}"
        )
    table = satisfying_table(f)
    idx = np.flatnonzero(table)
    return len(idx), [assignment_from_index(int(i), f.n) for i in idx]


def to_dimacs(f: Formula) -> str:
    lines = [f"p cnf {f.n} {f.m}"]
    for c in f.clauses:
        parts = [
            str(-(l.var_index + 1) if l.negated else l.var_index + 1)
            for l in c.literals
        ]
        lines.append(" ".join(parts) + " 0")
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> Formula:
    """Parse standard CNF text with exactly-3 literal clauses.

    Accepts 'c' comment lines and blank lines; each clause must sit on one
    line, 0-terminated (the format to_dimacs emits). Errors carry the
    1-based line number.
    """
    n = None
    m_declared = None
    clauses: list[Clause] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if n is not None:
                raise ParseError("duplicate header", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise ParseError(f"malformed header {line!r}", lineno)
            try:
                n, m_declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"malformed header {line!r}", lineno) from None
            if n < 1 or m_declared < 0:
                raise ParseError(f"bad sizes in header {line!r}", lineno)
            continue
        if n is None:
            raise ParseError("clause before header", lineno)
        try:
            nums = [int(t) for t in line.split()]
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno) from None
        if not nums or nums[-1] != 0:
            raise ParseError("clause not 0-terminated", lineno)
        body = nums[:-1]
        if len(body) != 3:
            raise ParseError(f"clause arity {len(body)}, want 3", lineno)
        if 0 in body:
            raise ParseError("literal 0 inside clause", lineno)
        if any(abs(s) > n for s in body):
            raise ParseError(f"variable out of range in {line!r}", lineno)
        if len({abs(s) for s in body}) != 3:
            raise ParseError("repeated variable in clause", lineno)
        clauses.append(make_clause(body))
    if n is None:
        raise ParseError("missing header", max(1, text.count("\n") + 1))
    if len(clauses) != m_declared:
        raise ParseError(
            f"header declares {m_declared} clauses, file has {len(clauses)}",
            text.count("\n") + 1,
        )
    try:
        return Formula(n, tuple(clauses))
    except StructuralError as e:
        raise ParseError(str(e), text.count("\n") + 1) from e
