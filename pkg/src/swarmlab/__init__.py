"""Deterministic laboratory for reputation-weighted pairwise-ranking consensus."""

from .bt import (
    ComparisonTally,
    FitConfig,
    FitDiagnostics,
    NonIdentifiableError,
    QualityScores,
    bt_probability,
    fit,
    log_likelihood,
    log_likelihood_gradient,
    rank_from_scores,
)
from .mesh import (
    CoverageState,
    MeshTree,
    Region,
    SemanticPoint,
    SubMeshId,
    build_partition,
    check_split_trigger,
    dump_tree,
    route_query,
    semantic_distance,
    update_coverage_radius,
)
from .reputation import (
    ReputationParams,
    ReputationState,
    apply_round_transition,
    apply_round_update,
    check_slash,
    reputation_commitment,
    run_reputation_scenario,
    update_generation_ema,
    update_ranking_ema,
)
from .scheduler import (
    Assignment,
    ComparisonSeed,
    EmptyAssignmentError,
    derive_seed,
    pair_miss_probability,
    sample_assignment,
    verify_assignment,
)
from .sim import (
    NodeProfile,
    RoundOutcome,
    Simulation,
    SimulationResult,
    SwarmConfig,
    SweepRow,
    generate_responses,
    judge_pair,
    run_simulation,
    sweep_byzantine,
    sweep_swarm_size,
)
from .sybil import (
    CollusionTracker,
    EconomicParams,
    SybilLedger,
    SybilParams,
    capability_check,
    collusion_adjusted_weight,
    expected_support_rate,
    round_weight,
    simulate_sybil_economics,
)

__version__ = "0.1.0"
