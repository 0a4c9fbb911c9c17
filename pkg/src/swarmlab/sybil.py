"""Collusion detection, weight penalties, qualification, and attack economics.

Mutual-support rates ``c[i, j]`` (how often judge ``i`` put node ``j``'s
response in the top half of its implied ranking, per co-participated
round) drive an exponential weight penalty once they exceed a threshold
calibrated against the uniform baseline ``N / (2 (N - 1))``.  The
economics simulation prices a coordinated multi-identity attack against
those defenses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np


def expected_support_rate(n_participants: int) -> float:
    """Uniform-ranking baseline for the mutual-support rate."""
    if n_participants < 2:
        raise ValueError("need at least 2 participants")
    return n_participants / (2.0 * (n_participants - 1))


@dataclass(frozen=True)
class SybilParams:
    lam: float                 # penalty coefficient
    tau_collusion: float       # support-rate threshold
    expected_c: float          # uniform baseline
    gamma: float = 1.5         # round-weight sensitivity

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if not self.tau_collusion > self.expected_c:
            raise ValueError("tau_collusion must exceed the expected support rate")

    @classmethod
    def for_swarm(
        cls,
        n_participants: int,
        lam: float = 15.0,
        gamma: float = 1.5,
        tau_factor: float = 1.2,
    ) -> "SybilParams":
        baseline = expected_support_rate(n_participants)
        return cls(lam=lam, tau_collusion=tau_factor * baseline,
                   expected_c=baseline, gamma=gamma)


@dataclass
class CollusionTracker:
    """Running mutual-support statistics over consensus rounds."""

    support_counts: np.ndarray  # support_counts[i, j]: judge i top-halfed node j
    co_rounds: np.ndarray       # rounds where both i and j participated

    @classmethod
    def empty(cls, n_nodes: int) -> "CollusionTracker":
        return cls(
            support_counts=np.zeros((n_nodes, n_nodes)),
            co_rounds=np.zeros((n_nodes, n_nodes)),
        )

    def update(
        self,
        top_half_sets: Mapping[int, Iterable[int]],
        participants: Sequence[int],
    ) -> None:
        """Fold one round of per-judge top-half sets into the statistics.

        ``top_half_sets`` maps each judging node to the nodes whose
        responses its implied ranking placed in the top half;
        ``participants`` is every node present in the round.
        """
        idx = np.asarray(sorted(participants), dtype=int)
        block = np.ix_(idx, idx)
        self.co_rounds[block] += 1.0
        self.co_rounds[idx, idx] -= 1.0
        for judge, supported in top_half_sets.items():
            for j in supported:
                if j != judge:
                    self.support_counts[judge, j] += 1.0

    def c(self) -> np.ndarray:
        """Support-rate matrix; NaN where a pair never co-participated."""
        with np.errstate(invalid="ignore", divide="ignore"):
            rates = np.where(self.co_rounds > 0,
                             self.support_counts / np.maximum(self.co_rounds, 1.0),
                             np.nan)
        return rates

    def c_value(self, i: int, j: int) -> float | None:
        """Support rate of judge ``i`` toward node ``j``; None without data."""
        if self.co_rounds[i, j] == 0:
            return None
        return float(self.support_counts[i, j] / self.co_rounds[i, j])


def collusion_adjusted_weight(base_weight: float, c_ij: float, params: SybilParams) -> float:
    """Exponentially shrink a weight once the support rate crosses the threshold."""
    if base_weight < 0:
        raise ValueError("base_weight must be nonnegative")
    return base_weight * math.exp(-params.lam * max(0.0, c_ij - params.tau_collusion))


def round_weight(n_actual: int, n_bar: float, params: SybilParams) -> float:
    """Discount factor for rounds with abnormal participation counts."""
    if n_actual < 1:
        raise ValueError("n_actual must be >= 1")
    if n_bar <= 0:
        raise ValueError("n_bar must be positive")
    return math.exp(-params.gamma * abs(math.log(n_actual / n_bar)))


def capability_check(
    results: Sequence[tuple[bool, float]],
    tau: float,
) -> tuple[bool, float]:
    """Cost-weighted qualification: sum the costs of correctly answered tests.

    Passing requires the achieved score to reach ``tau`` (inclusive).
    """
    score = 0.0
    for correct, cost in results:
        if cost < 0:
            raise ValueError("test costs must be nonnegative")
        if correct:
            score += cost
    return score >= tau, score


@dataclass(frozen=True)
class EconomicParams:
    """Scalar cost model for identity creation and operation."""

    c_test: float = 1.0          # cost per qualification test call
    n_tests: int = 25            # tests per identity
    c_inference: float = 0.005   # cost per round of operation
    r_initial: float = 0.5       # reputation staked at entry
    alpha_slash: float = 1.0     # fraction of stake lost per detected round
    reward_per_round: float = 3.0

    def __post_init__(self):
        for name in ("c_test", "c_inference", "r_initial", "alpha_slash", "reward_per_round"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.n_tests < 0:
            raise ValueError("n_tests must be nonnegative")


@dataclass(frozen=True)
class SybilLedger:
    k: int
    lam: float
    rounds: int
    revenue: float
    cost_entry: float
    cost_operation: float
    cost_slashing: float
    f_detected: float

    @property
    def net(self) -> float:
        return self.revenue - self.cost_entry - self.cost_operation - self.cost_slashing

    @property
    def profitable(self) -> bool:
        return self.net > 0


ECONOMICS_CSV_HEADER = (
    "k,lambda,rounds,revenue,cost_entry,cost_operation,cost_slashing,net,profitable"
)


def ledger_csv_row(ledger: SybilLedger) -> str:
    return (
        f"{ledger.k},{ledger.lam!r},{ledger.rounds},{ledger.revenue!r},"
        f"{ledger.cost_entry!r},{ledger.cost_operation!r},{ledger.cost_slashing!r},"
        f"{ledger.net!r},{int(ledger.profitable)}"
    )


def simulate_sybil_economics(
    k: int,
    horizon: int,
    econ: EconomicParams,
    sybil: SybilParams | None = None,
    swarm=None,
):
    """Run the full consensus simulation with a k-clique attacker and price it.

    The clique members top-rank one another unconditionally; revenue
    accrues per round as the clique's penalized reputation share of the
    (round-weighted) reward pool.  Costs follow the entry / operation /
    slashing decomposition, with the detection fraction measured from the
    tracker rather than assumed.  Returns ``(ledger, simulation_result)``.
    """
    from . import sim as _sim  # deferred: sim depends on this module

    if k < 1:
        raise ValueError("k must be >= 1")
    config = swarm if swarm is not None else _sim.SwarmConfig()
    config = _sim.replace_config(
        config,
        rounds=horizon,
        colluder_clique_sizes=(k,),
        collusion_tracking=True,
        collusion_weighting=True,
        sybil_lam=sybil.lam if sybil else config.sybil_lam,
        sybil_tau_factor=(
            sybil.tau_collusion / sybil.expected_c if sybil else config.sybil_tau_factor
        ),
        sybil_gamma=sybil.gamma if sybil else config.sybil_gamma,
    )
    result = _sim.Simulation(config).run()

    clique = [p.index for p in result.profiles if p.strategy == "colluder"]
    revenue = 0.0
    detected_rounds = 0
    for t, outcome in enumerate(result.outcomes):
        if outcome.skipped:
            continue
        share = float(result.reward_shares[t, clique].sum())
        revenue += outcome.round_weight * share * econ.reward_per_round
        if result.collusion_detected[t]:
            detected_rounds += 1

    rounds = len(result.outcomes)
    f_detected = detected_rounds / rounds if rounds else 0.0
    ledger = SybilLedger(
        k=k,
        lam=config.sybil_lam,
        rounds=rounds,
        revenue=revenue,
        cost_entry=k * econ.c_test * econ.n_tests,
        cost_operation=k * econ.c_inference * rounds,
        cost_slashing=k * econ.r_initial * econ.alpha_slash * detected_rounds,
        f_detected=f_detected,
    )
    return ledger, result
