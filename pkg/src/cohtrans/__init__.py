"""Deterministic pure-state coherence transformations under incoherent operations.

Single-step Kraus families are built from a permutation set (identity plus
d-1 transpositions) whose probability system has a nonnegative solution.
Larger transformations can be cascaded through intermediate states using
small-block solutions, and every solution doubles as a LOCC protocol for
the corresponding bipartite pure state.
"""

from .config import DEFAULT_TOL, Tolerances
from .core import (
    CoherenceVector,
    MajorizationReport,
    canonicalize,
    check_density,
    majorizes,
    pure_density,
)
from .errors import (
    BlockMismatch,
    CohTransError,
    DegenerateGamma,
    DimensionMismatch,
    DimensionTooLarge,
    Infeasible,
    MajorizationError,
    NegativeRadicand,
    NoCandidateError,
    NoFeasibleSP,
    NoIntermediateFound,
    NormError,
    OrderError,
    ParseError,
    SingularSystem,
    VerificationError,
    ZeroAmplitudeError,
)
from .kraus import (
    IncoherentChannel,
    KrausOperator,
    LoccPlan,
    LoccReport,
    apply_channel,
    build_kraus,
    build_locc_plan,
    channel_error,
    simulate_locc,
    verify_completeness,
    verify_incoherent,
)
from .permutations import (
    GE,
    LE,
    CasePattern,
    PermutationSet,
    PermutationTable,
    Relation,
    Transposition,
    all_patterns,
    build_table,
    crossing,
    enumerate_sps,
    mandatory_permutations,
    sign_pattern,
)
from .sequential import (
    IntermediateState,
    PlanStep,
    TransformPlan,
    balance_coefficient,
    embed_subspace_channel,
    execute_plan,
    max_steps,
    plan_sequence,
    propose_intermediate,
)
from .solver import (
    Solution,
    alpha,
    beta,
    brute_force_oracle,
    closed_form_probability,
    coefficient_matrix,
    feasible_sps,
    find_feasible_sp,
    gamma,
    solve_probabilities,
)

__version__ = "0.1.0"
