"""Exact desk-scale toolkit for measurement-driven 3-SAT solving.

Random instance generation, a jitted random-walk baseline, a dense
state-vector engine with angle-parameterized clause checks, deterministic
post-selected trajectories with renewal-formula runtimes, spectral
analysis of the average check projector, and a batch experiment harness.
"""

from .errors import (
    CapacityError,
    CertainFailureError,
    ConditioningError,
    ConfigError,
    ContractError,
    GenerationFailureError,
    InfiniteExpectationError,
    MdsatError,
    NonConvergenceError,
    ParseError,
    StructuralError,
)
from .rng import RNG_ID, SplitMix64, derive_seed
from .sat import (
    Clause,
    Formula,
    Literal,
    assignment_from_index,
    assignment_index,
    count_solutions,
    evaluate_clause,
    evaluate_formula,
    from_dimacs,
    make_clause,
    satisfying_table,
    to_dimacs,
)
from .generate import (
    DEFAULT_CLAUSE_RATIO,
    GenConfig,
    GenResult,
    check_generation_rules,
    generate,
    generate_suite,
    load_instance,
    save_instance,
)
from .schoening import WalkConfig, WalkResult, WalkStats, schoening_run, schoening_stats
from .qstate import (
    StateVector,
    all_biases,
    apply_clause_check,
    apply_pauli,
    clause_projector,
    fidelity,
    init_plus,
    measure_all,
    product_state,
    qubit_bias,
    single_qubit_state,
    solution_state,
    subspace_fidelity,
)
from .solver import (
    CubicSchedule,
    FixedSchedule,
    IidOrder,
    LinearSchedule,
    NoiseConfig,
    SequentialOrder,
    ShuffledOrder,
    Trajectory,
    adiabatic_sweep_experiment,
    c_smooth_of,
    expected_checks,
    majority_vote_infer,
    noise_abort_experiment,
    renewal_expected_checks,
    required_repetitions,
    repetition_details,
    run_deterministic,
    run_monte_carlo,
    theta_at,
)
from .spectral import (
    build_hamiltonian,
    convergence_bound,
    convergence_check,
    eigencount_below,
    gap_lower_bound,
    ground_space_dim,
    spectral_gap,
)
from .harness import PROFILES, quantum_report, run_plan, trace_rows

__version__ = "0.1.0"
