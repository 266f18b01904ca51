"""Dense n-qubit state-vector engine with angle-parameterized single-qubit
states and three-qubit rank-1 clause-check projectors with post-selection.

Basis convention: qubit i corresponds to bit i (least significant) of the
basis index, matching the assignment convention in the SAT layer.

Single-qubit states, with alpha = pi/4 + theta/2:

    TRUE  state |theta>        = R_Y(+theta)|+> = ( cos a, sin a)
    FALSE state |theta_bar>    = R_Y(-theta)|+> = ( sin a, cos a)
    |theta_perp>     = R_Y(pi+theta)|+>         = (-sin a, cos a)
    |theta_bar_perp> = R_Y(pi-theta)|+>         = (-cos a, sin a)

A clause-check projector P is the rank-1 projector onto the product of
perp states selected by the literal signs (positive literal -> perp of
TRUE, negated -> perp of FALSE); the check passes a state with
probability 1 - ||P s||^2 and leaves (I - P)s / ||(I - P)s||.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import (
    CapacityError,
    CertainFailureError,
    ConditioningError,
    ContractError,
    StructuralError,
)
from .rng import RNG_ID
from .sat import Clause, spread_indices

DEFAULT_CAPACITY = 26


@dataclass(frozen=True)
class Tolerances:
    """Comparison tolerances shared across the engine and its tests."""

    norm: float = 1e-10
    orthogonality: float = 1e-12
    certain_failure: float = 1e-14
    imaginary: float = 1e-12


TOLS = Tolerances()

STATE_KINDS = ("theta", "theta_bar", "theta_perp", "theta_bar_perp")


def check_theta(theta: float) -> float:
    if not 0.0 <= theta <= math.pi / 2 + 1e-12:
        raise StructuralError(f"theta={theta} outside [0, pi/2]")
    return float(theta)


def single_qubit_state(kind: str, theta: float) -> np.ndarray:
    """One of the four single-qubit states as a real 2-vector."""
    check_theta(theta)
    a = math.pi / 4 + theta / 2
    c, s = math.cos(a), math.sin(a)
    if kind == "theta":
        v = (c, s)
    elif kind == "theta_bar":
        v = (s, c)
    elif kind == "theta_perp":
        v = (-s, c)
    elif kind == "theta_bar_perp":
        v = (-c, s)
    else:
        raise StructuralError(f"unknown state kind {kind!r}")
    return np.array(v, dtype=np.float64)


@dataclass
class StateVector:
    """2^n complex amplitudes; single-writer, may be updated in place."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        if self.amps.shape != (1 << self.n,):
            raise StructuralError(
                f"amplitude count {self.amps.shape} vs n={self.n}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    def renormalize(self) -> None:
        self.amps /= np.linalg.norm(self.amps)


def _memory_estimate(n: int) -> str:
    return f"{(1 << n) * 16 / 2**30:.2f} GiB"


def init_plus(n: int, capacity: int = DEFAULT_CAPACITY) -> StateVector:
    """|+>^n: all 2^n amplitudes equal 2^(-n/2)."""
    if n < 1:
        raise CapacityError(f"need n >= 1, got {n}")
    if n > capacity:
        raise CapacityError(
            f"n={n} exceeds capacity {capacity} "
            f"(state would need {_memory_estimate(n)})"
        )
    amps = np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128)
    return StateVector(n, amps)


def product_state(vectors: list[np.ndarray]) -> StateVector:
    """Product state from per-qubit 2-vectors, qubit 0 first."""
    amps = np.asarray(vectors[0], dtype=np.complex128)
    for u in vectors[1:]:
        amps = np.kron(np.asarray(u, dtype=np.complex128), amps)
    return StateVector(len(vectors), amps)


def solution_state(a: np.ndarray, theta: float, n: int | None = None) -> StateVector:
    """Product state encoding assignment a: TRUE -> |theta>, FALSE -> |theta_bar>."""
    if n is not None and len(a) != n:
        raise StructuralError(f"assignment length {len(a)} != n={n}")
    vs = [
        single_qubit_state("theta" if bool(b) else "theta_bar", theta) for b in a
    ]
    return product_state(vs)


class GatherPlan:
    """Precomputed gather indices for one 3-qubit group pattern.

    idx[g, p] is the basis index whose bits at the clause positions spell
    the 3-bit pattern p (first literal = most significant) within group g.
    Materialized for n <= 20; recomputed per application above that to
    keep memory proportional to one state vector.
    """

    __slots__ = ("n", "positions", "offsets", "idx")

    def __init__(self, n: int, positions: tuple[int, int, int]):
        if len(set(positions)) != 3:
            raise StructuralError(f"positions {positions} not distinct")
        if max(positions) >= n:
            raise StructuralError(f"position out of range for n={n}")
        self.n = n
        self.positions = positions
        v0, v1, v2 = positions
        self.offsets = np.array(
            [
                (((p >> 2) & 1) << v0) | (((p >> 1) & 1) << v1) | ((p & 1) << v2)
                for p in range(8)
            ],
            dtype=np.int64,
        )
        if n <= 20:
            base = spread_indices(n, positions)
            self.idx = (base[:, None] + self.offsets[None, :]).astype(np.int32)
        else:
            self.idx = None

    def indices(self) -> np.ndarray:
        if self.idx is not None:
            return self.idx
        base = spread_indices(self.n, self.positions)
        return base[:, None] + self.offsets[None, :]


@dataclass
class ClauseProjector:
    """Rank-1 projector data for one clause at one angle."""

    clause: Clause
    theta: float
    vectors: np.ndarray  # (3, 2) per-literal perp states
    v8: np.ndarray  # kron of the three vectors, length 8
    plan: GatherPlan


def clause_projector(
    clause: Clause, theta: float, n: int, plan: GatherPlan | None = None
) -> ClauseProjector:
    vs = np.empty((3, 2), dtype=np.float64)
    for t, lit in enumerate(clause.literals):
        kind = "theta_bar_perp" if lit.negated else "theta_perp"
        vs[t] = single_qubit_state(kind, theta)
    v8 = np.kron(vs[0], np.kron(vs[1], vs[2]))
    if plan is None:
        plan = GatherPlan(n, tuple(l.var_index for l in clause.literals))
    return ClauseProjector(clause, float(theta), vs, v8, plan)


def apply_clause_check(
    s: StateVector,
    proj: ClauseProjector,
    in_place: bool = False,
    check_norm: bool = True,
    tol: float = TOLS.certain_failure,
) -> tuple[StateVector, float]:
    """Post-selected clause check.

    Returns (projected renormalized state, pass probability). Raises
    CertainFailureError when the pass probability falls below tol; the
    input state is never mutated on that path.
    """
    if check_norm and abs(s.norm() - 1.0) > 1e-6:
        raise ContractError(f"input state norm {s.norm()} != 1")
    idx = proj.plan.indices()
    sub = s.amps[idx]  # (G, 8) copy
    overlap = sub @ proj.v8
    fail = float(np.real(np.vdot(overlap, overlap)))
    pass_prob = 1.0 - fail
    if pass_prob < tol:
        raise CertainFailureError(-1, -1)
    pass_prob = min(pass_prob, 1.0)
    sub -= np.outer(overlap, proj.v8)
    amps = s.amps if in_place else s.amps.copy()
    amps[idx] = sub
    amps *= 1.0 / math.sqrt(pass_prob)
    out = s if in_place else StateVector(s.n, amps)
    return out, pass_prob


def qubit_bias(s: StateVector, i: int) -> float:
    """Probability that qubit i measures |1>."""
    if not 0 <= i < s.n:
        raise StructuralError(f"qubit {i} out of range for n={s.n}")
    block = s.amps.reshape(-1, 2, 1 << i)[:, 1, :]
    return float(np.real(np.vdot(block, block)))


def all_biases(s: StateVector) -> np.ndarray:
    return np.array([qubit_bias(s, i) for i in range(s.n)])


def overlap_with_solution(s: StateVector, a: np.ndarray, theta: float) -> complex:
    """<theta_a|s> via per-qubit contraction, O(2^n)."""
    vec = s.amps
    for q in range(s.n - 1, -1, -1):
        u = single_qubit_state("theta" if bool(a[q]) else "theta_bar", theta)
        vec = vec.reshape(2, -1)
        vec = u[0] * vec[0] + u[1] * vec[1]
    return complex(vec[0] if vec.shape else vec)


def fidelity(s: StateVector, a: np.ndarray, theta: float) -> float:
    """|<theta_a|s>|^2 against a single assignment's solution state."""
    return abs(overlap_with_solution(s, a, theta)) ** 2


def solution_gram(solutions, theta: float) -> np.ndarray:
    """Gram matrix of solution states: (cos theta)^Hamming(a, b)."""
    k = len(solutions)
    bits = np.asarray([np.asarray(a, dtype=bool) for a in solutions])
    ham = (bits[:, None, :] ^ bits[None, :, :]).sum(axis=2)
    return np.cos(theta) ** ham.astype(np.float64)


def subspace_fidelity(
    s: StateVector, solutions, theta: float, gram_tol: float = 1e-12
) -> float:
    """s^dag Pi s for Pi projecting onto span of the solution states.

    Built from the analytic Gram matrix; raises ConditioningError with the
    smallest Gram eigenvalue when the basis is numerically singular.
    """
    if len(solutions) == 0:
        raise ContractError("subspace_fidelity needs at least one solution")
    g = solution_gram(solutions, theta)
    v = np.array(
        [overlap_with_solution(s, a, theta) for a in solutions]
    )
    if len(solutions) == 1:
        return float(abs(v[0]) ** 2)  # Gram is the 1x1 identity
    smallest = float(np.linalg.eigvalsh(g)[0])
    if smallest < gram_tol:
        raise ConditioningError(smallest)
    c, low = cho_factor(g)
    x = cho_solve((c, low), v)
    return float(np.real(np.vdot(v, x)))


def measure_all(s: StateVector, rng: np.random.Generator) -> np.ndarray:
    """Sample one z-basis outcome for all qubits; returns a bool assignment."""
    probs = np.real(s.amps * s.amps.conj())
    total = probs.sum()
    u = rng.random() * total
    index = int(np.searchsorted(np.cumsum(probs), u))
    index = min(index, len(probs) - 1)
    bits = np.array([(index >> i) & 1 for i in range(s.n)], dtype=bool)
    return bits


_PAULIS = ("X", "Y", "Z")


def apply_pauli(s: StateVector, qubit: int, which: str) -> None:
    """In-place Pauli on one qubit (noise injection)."""
    view = s.amps.reshape(-1, 2, 1 << qubit)
    if which == "X":
        view[:, [0, 1], :] = view[:, [1, 0], :]
    elif which == "Y":
        lo = view[:, 0, :].copy()
        view[:, 0, :] = -1j * view[:, 1, :]
        view[:, 1, :] = 1j * lo
    elif which == "Z":
        view[:, 1, :] *= -1.0
    else:
        raise StructuralError(f"unknown Pauli {which!r}")


_SNAPSHOT_MAGIC = b"MDQS"


def save_state(path: Path, s: StateVector) -> None:
    """Binary snapshot: magic, version, n, bytes-per-amp, RNG id, payload."""
    rng_id = RNG_ID.encode()
    header = _SNAPSHOT_MAGIC + struct.pack(
        "<III", 1, s.n, 16
    ) + struct.pack("<I", len(rng_id)) + rng_id
    Path(path).write_bytes(header + s.amps.astype("<c16").tobytes())


def load_state(path: Path) -> StateVector:
    raw = Path(path).read_bytes()
    if raw[:4] != _SNAPSHOT_MAGIC:
        raise StructuralError("not a state snapshot")
    version, n, prec = struct.unpack("<III", raw[4:16])
    if version != 1 or prec != 16:
        raise StructuralError(f"unsupported snapshot version {version}/{prec}")
    (idlen,) = struct.unpack("<I", raw[16:20])
    payload = raw[20 + idlen :]
    amps = np.frombuffer(payload, dtype="<c16").astype(np.complex128)
    return StateVector(n, amps)
