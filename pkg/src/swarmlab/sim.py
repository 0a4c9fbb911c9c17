"""Round-based consensus simulation over synthetic nodes.

Each round: responses with latent true qualities are generated, every
participant judges seeded pseudo-random pairs of the others' responses,
the judgments are aggregated into a (reputation- and collusion-weighted)
comparison fit, a winner is selected, and reputations advance.  Judges
are noisy comparators; adversarial strategies invert or randomize their
preferences, colluders unconditionally favour clique mates.

Everything is a pure function of the master seed: response noise and
judging coins come from per-round seed sequences, comparison assignments
from the hash-derived scheduler streams.  Re-running any experiment with
the same config yields identical results regardless of worker count.

The majority-vote baseline is reputation-free by construction: each
judge names the response with the most pairwise wins in its own
assignment (ties to the lowest index) and the plurality wins, so those
runs skip fitting and reputation updates entirely.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bt import (
    ComparisonTally,
    FitConfig,
    QualityScores,
    fit,
    fit_log_strengths_batch,
    rank_from_scores,
)
from .reputation import ReputationParams, ReputationState, apply_round_update
from .scheduler import EmptyAssignmentError, derive_seed, sample_assignment
from .sybil import CollusionTracker, SybilParams, capability_check, round_weight

_TAG_PROFILES = 1
_TAG_QUALITY = 2
_TAG_COINS = 3

STRATEGIES = ("honest", "byzantine_random", "byzantine_adversarial", "colluder")
SELECTORS = ("weighted", "unweighted", "majority")

NEVER = 1 << 62  # sentinel round index for permanently disqualified nodes


@dataclass(frozen=True)
class SwarmConfig:
    """Scenario description; every run is fully determined by it."""

    n_nodes: int = 20
    rounds: int = 200
    master_seed: int = 42
    byzantine_fraction: float = 0.0
    byzantine_strategy: str = "adversarial"   # adversarial | random | mixed
    colluder_clique_sizes: tuple[int, ...] = ()
    colluder_quality_offset: float = 0.0
    comparisons_per_judge: int | None = None  # None -> 3 * n_responses
    base_quality_spread: float = 0.0
    quality_sigma: float = 1.0
    quality_distribution: str = "exponential" # exponential | normal
    judge_noise: float = 1.25
    noise_model: str = "logistic"             # logistic | gaussian
    selector: str = "weighted"
    burn_in: int = 0
    collusion_tracking: bool = False
    collusion_weighting: bool = False
    auto_requalify: bool = True
    requalify_results: tuple[tuple[bool, float], ...] = ((True, 1.0),)
    requalify_tau: float = 0.5
    sybil_lam: float = 15.0
    sybil_gamma: float = 1.5
    sybil_tau_factor: float = 1.2
    fit: FitConfig = FitConfig(max_iters=400, tol=1e-5)
    reputation: ReputationParams = ReputationParams()

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValueError("n_nodes must be >= 1")
        if self.rounds < 0:
            raise ValueError("rounds must be nonnegative")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a u64")
        if not 0.0 <= self.byzantine_fraction <= 1.0:
            raise ValueError("byzantine_fraction must lie in [0, 1]")
        if self.byzantine_strategy not in ("adversarial", "random", "mixed"):
            raise ValueError(f"unknown byzantine_strategy {self.byzantine_strategy!r}")
        if self.noise_model not in ("logistic", "gaussian"):
            raise ValueError(f"unknown noise_model {self.noise_model!r}")
        if self.quality_distribution not in ("exponential", "normal"):
            raise ValueError(f"unknown quality_distribution {self.quality_distribution!r}")
        if self.selector not in SELECTORS:
            raise ValueError(f"unknown selector {self.selector!r}")
        if any(s < 1 for s in self.colluder_clique_sizes):
            raise ValueError("clique sizes must be >= 1")
        n_byz = int(self.byzantine_fraction * self.n_nodes + 0.5)
        if n_byz + sum(self.colluder_clique_sizes) > self.n_nodes:
            raise ValueError("byzantine nodes plus colluders exceed the swarm size")
        if self.quality_sigma < 0 or self.judge_noise < 0:
            raise ValueError("noise scales must be nonnegative")
        if self.burn_in < 0:
            raise ValueError("burn_in must be nonnegative")
        if self.comparisons_per_judge is not None and self.comparisons_per_judge < 1:
            raise ValueError("comparisons_per_judge must be >= 1")


replace_config = dataclasses.replace


@dataclass
class NodeProfile:
    node_id: str
    index: int
    gen_quality: float
    judge_noise: float
    strategy: str = "honest"
    clique: int | None = None
    embeddings: tuple | None = None
    reputation: ReputationState = field(default_factory=lambda: ReputationState(0.5, 0.5, 0.5))
    active_from: int = 0
    pending_requalify: bool = False

    @property
    def node_id_bytes(self) -> bytes:
        return self.node_id.encode("utf-8")


@dataclass(eq=False)
class RoundOutcome:
    round_index: int
    participants: tuple[int, ...]            # node index per response index
    response_qualities: np.ndarray
    fitted_scores: QualityScores | None
    winner: int | None                       # response index
    winner_node: int | None
    correct: bool | None
    round_weight: float
    per_judge_agreement: dict[int, float]
    skipped: str | None = None


@dataclass(eq=False)
class SimulationResult:
    config: SwarmConfig
    profiles: list[NodeProfile]
    outcomes: list[RoundOutcome]
    accuracy: float
    measured_rounds: int
    reputation_history: np.ndarray           # (rounds, n_nodes) combined after each round
    slashed_history: np.ndarray              # (rounds, n_nodes) bool
    collusion_detected: list[bool]
    reward_shares: np.ndarray | None         # (rounds, n_nodes) when tracking
    tracker: CollusionTracker | None


def build_profiles(config: SwarmConfig) -> list[NodeProfile]:
    """Assign base qualities and strategies deterministically from the seed."""
    n = config.n_nodes
    if n > 1:
        bases = np.linspace(-config.base_quality_spread / 2.0,
                            config.base_quality_spread / 2.0, n)
    else:
        bases = np.zeros(1)
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence([config.master_seed, _TAG_PROFILES])))
    perm = [int(i) for i in rng.permutation(n)]
    n_byz = int(config.byzantine_fraction * n + 0.5)
    strategies = {i: "honest" for i in range(n)}
    cliques: dict[int, int | None] = {i: None for i in range(n)}
    for pos, i in enumerate(perm[:n_byz]):
        if config.byzantine_strategy == "mixed":
            strategies[i] = "byzantine_adversarial" if pos % 2 == 0 else "byzantine_random"
        else:
            strategies[i] = f"byzantine_{config.byzantine_strategy}"
    cursor = n_byz
    for clique_id, size in enumerate(config.colluder_clique_sizes):
        for i in perm[cursor:cursor + size]:
            strategies[i] = "colluder"
            cliques[i] = clique_id
        cursor += size
    profiles = []
    for i in range(n):
        quality = float(bases[i])
        if strategies[i] == "colluder":
            quality += config.colluder_quality_offset
        profiles.append(NodeProfile(
            node_id=f"node-{i}",
            index=i,
            gen_quality=quality,
            judge_noise=config.judge_noise,
            strategy=strategies[i],
            clique=cliques[i],
            reputation=ReputationState.initial(config.reputation),
        ))
    return profiles


def generate_responses(
    profiles: Sequence[NodeProfile],
    round_seed: int | Sequence[int],
    quality_sigma: float = 1.0,
    quality_distribution: str = "exponential",
) -> np.ndarray:
    """True response quality per profile: base quality plus seeded noise.

    The exponential draw (mean ``quality_sigma``) keeps the gap between
    the best and second-best response independent of the swarm size,
    which isolates the judging-information effect in scaling
    experiments; ``normal`` is the symmetric alternative.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(round_seed)))
    if quality_sigma > 0:
        if quality_distribution == "exponential":
            noise = rng.exponential(1.0, size=len(profiles))
        elif quality_distribution == "normal":
            noise = rng.normal(0.0, 1.0, size=len(profiles))
        else:
            raise ValueError(f"unknown quality_distribution {quality_distribution!r}")
    else:
        noise = 0.0
    bases = np.array([p.gen_quality for p in profiles])
    return bases + quality_sigma * noise


def honest_preference_probs(
    dq: np.ndarray,
    noise: float,
    noise_model: str = "logistic",
) -> np.ndarray:
    """P(prefer the first response) for an honest comparator, given quality gaps."""
    dq = np.asarray(dq, dtype=float)
    if noise == 0.0:
        return np.where(dq > 0, 1.0, np.where(dq < 0, 0.0, 0.5))
    if noise_model == "logistic":
        return 1.0 / (1.0 + np.exp(-dq / noise))
    # gaussian: each side perceived with N(0, noise^2) error
    scaled = dq / (2.0 * noise)
    return np.array([0.5 * (1.0 + math.erf(x)) for x in np.atleast_1d(scaled)])


def preference_probability(
    judge: NodeProfile,
    quality_i: float,
    quality_j: float,
    i_in_clique: bool = False,
    j_in_clique: bool = False,
    noise_model: str = "logistic",
) -> float:
    """P(judge prefers response i over response j) under its strategy."""
    honest = float(honest_preference_probs(
        np.array([quality_i - quality_j]), judge.judge_noise, noise_model)[0])
    if judge.strategy == "honest":
        return honest
    if judge.strategy == "byzantine_random":
        return 0.5
    if judge.strategy == "byzantine_adversarial":
        return 1.0 - honest
    if judge.strategy == "colluder":
        if i_in_clique and not j_in_clique:
            return 1.0
        if j_in_clique and not i_in_clique:
            return 0.0
        return honest
    raise ValueError(f"unknown strategy {judge.strategy!r}")


def judge_pair(
    judge: NodeProfile,
    quality_i: float,
    quality_j: float,
    coin: float,
    i_in_clique: bool = False,
    j_in_clique: bool = False,
    noise_model: str = "logistic",
) -> bool:
    """True when the judge prefers response i; ``coin`` is uniform in [0, 1)."""
    return coin < preference_probability(
        judge, quality_i, quality_j, i_in_clique, j_in_clique, noise_model)


def _round_state_hash(master_seed: int, round_index: int) -> bytes:
    return hashlib.sha256(
        b"swarmlab:round:"
        + master_seed.to_bytes(8, "big")
        + round_index.to_bytes(8, "big")
    ).digest()


class Simulation:
    """Stateful multi-round run of one scenario."""

    def __init__(self, config: SwarmConfig):
        self.config = config
        self.profiles = build_profiles(config)
        self.sybil_params = SybilParams.for_swarm(
            max(config.n_nodes, 2),
            lam=config.sybil_lam,
            gamma=config.sybil_gamma,
            tau_factor=config.sybil_tau_factor,
        )
        self.tracker = (
            CollusionTracker.empty(config.n_nodes) if config.collusion_tracking else None
        )
        self._participation_counts: list[int] = []
        self._clique_members: dict[int, list[int]] = {}
        for p in self.profiles:
            if p.clique is not None:
                self._clique_members.setdefault(p.clique, []).append(p.index)

    # -- round pipeline -------------------------------------------------

    def _requalify(self, round_index: int) -> None:
        for p in self.profiles:
            if p.pending_requalify and p.active_from == round_index:
                passed, _ = capability_check(
                    self.config.requalify_results, self.config.requalify_tau)
                if passed:
                    p.reputation = ReputationState.initial(
                        self.config.reputation, round_index)
                    p.pending_requalify = False
                else:
                    p.active_from = NEVER

    def _penalty_matrix(self) -> np.ndarray | None:
        if self.tracker is None or not self.config.collusion_weighting:
            return None
        c = self.tracker.c()
        lam, tau = self.sybil_params.lam, self.sybil_params.tau_collusion
        with np.errstate(invalid="ignore"):
            pen = np.exp(-lam * np.maximum(0.0, c - tau))
        return np.where(np.isnan(c), 1.0, pen)

    def run_round(self, round_index: int) -> RoundOutcome:
        config = self.config
        self._requalify(round_index)
        participants = [p.index for p in self.profiles if p.active_from <= round_index]

        if len(participants) < 2:
            return self._skip_round(round_index, participants, "fewer than 2 responses")

        n_resp = len(participants)
        resp_of_node = {node: i for i, node in enumerate(participants)}
        node_of_resp = np.array(participants)
        roster = [self.profiles[i] for i in participants]

        qualities = generate_responses(
            roster, [config.master_seed, _TAG_QUALITY, round_index],
            config.quality_sigma, config.quality_distribution)
        true_best = int(np.argmax(qualities))

        state_hash = _round_state_hash(config.master_seed, round_index)
        coin_rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence([config.master_seed, _TAG_COINS, round_index])))
        count = config.comparisons_per_judge
        if count is None:
            count = 3 * n_resp

        in_clique = np.array([p.clique is not None for p in roster])
        pen = self._penalty_matrix()

        judge_nodes: list[int] = []
        judge_winners: list[np.ndarray] = []
        judge_losers: list[np.ndarray] = []
        top_picks: list[int] = []
        for judge in roster:
            own = resp_of_node[judge.index]
            try:
                assignment = sample_assignment(
                    derive_seed(state_hash, judge.node_id_bytes),
                    n_resp, {own}, comparisons_per_judge=count)
            except EmptyAssignmentError:
                continue
            pairs = np.array(assignment.pairs, dtype=int)
            u, v = pairs[:, 0], pairs[:, 1]
            assert not np.any((u == own) | (v == own)), "self-comparison leaked"
            probs = self._pair_probs(judge, qualities, u, v, in_clique)
            coins = coin_rng.random(len(u))
            prefers_u = coins < probs
            winners = np.where(prefers_u, u, v)
            losers = np.where(prefers_u, v, u)
            judge_nodes.append(judge.index)
            judge_winners.append(winners)
            judge_losers.append(losers)
            top_picks.append(int(np.argmax(np.bincount(winners, minlength=n_resp))))

        if not judge_nodes:
            return self._skip_round(round_index, participants, "no comparisons possible")

        w_raw = np.zeros((n_resp, n_resp))
        w_weighted = np.zeros((n_resp, n_resp))
        for jn, winners, losers in zip(judge_nodes, judge_winners, judge_losers):
            np.add.at(w_raw, (winners, losers), 1.0)
            base = self.profiles[jn].reputation.combined
            if pen is not None:
                weights = base * pen[jn, node_of_resp[winners]]
                np.add.at(w_weighted, (winners, losers), weights)
            elif base:
                np.add.at(w_weighted, (winners, losers), base)

        fitted: QualityScores | None = None
        agreements: dict[int, np.ndarray] = {}
        if config.selector == "majority":
            winner = int(np.argmax(np.bincount(np.array(top_picks), minlength=n_resp)))
        else:
            tally = ComparisonTally(
                n=w_raw + w_raw.T, w=w_raw,
                weighted_n=w_weighted + w_weighted.T, weighted_w=w_weighted)
            try:
                fitted, _ = fit(tally, config.fit, use_weights=(config.selector == "weighted"))
            except ValueError as exc:
                return self._skip_round(round_index, participants, f"fit failed: {exc}")
            winner = int(rank_from_scores(fitted)[0])
            theta = fitted.log_scores
            for jn, winners, losers in zip(judge_nodes, judge_winners, judge_losers):
                agreements[jn] = theta[winners] > theta[losers]

        winner_node = int(node_of_resp[winner])
        n_bar = (
            float(np.mean(self._participation_counts))
            if self._participation_counts else float(n_resp)
        )
        weight = round_weight(n_resp, n_bar, self.sybil_params)
        self._participation_counts.append(n_resp)

        if config.selector != "majority":
            self._update_reputations(round_index, participants, agreements, winner_node)
        if self.tracker is not None:
            self._update_tracker(participants, judge_nodes, judge_winners, judge_losers,
                                 resp_of_node, node_of_resp, n_resp)

        per_judge = {jn: float(np.mean(a)) for jn, a in agreements.items()}
        return RoundOutcome(
            round_index=round_index,
            participants=tuple(participants),
            response_qualities=qualities,
            fitted_scores=fitted,
            winner=winner,
            winner_node=winner_node,
            correct=(winner == true_best),
            round_weight=weight,
            per_judge_agreement=per_judge,
        )

    def _pair_probs(self, judge, qualities, u, v, in_clique) -> np.ndarray:
        dq = qualities[u] - qualities[v]
        honest = honest_preference_probs(dq, judge.judge_noise, self.config.noise_model)
        if judge.strategy == "honest":
            return honest
        if judge.strategy == "byzantine_random":
            return np.full(len(u), 0.5)
        if judge.strategy == "byzantine_adversarial":
            return 1.0 - honest
        # colluder: unconditional support for clique mates, honest elsewhere
        probs = honest.copy()
        u_cl, v_cl = in_clique[u], in_clique[v]
        probs[u_cl & ~v_cl] = 1.0
        probs[v_cl & ~u_cl] = 0.0
        return probs

    def _update_reputations(self, round_index, participants, agreements, winner_node):
        active = set(participants)
        for p in self.profiles:
            if p.active_from > round_index:
                p.reputation, _ = apply_round_update(
                    p.reputation, [], False, self.config.reputation,
                    round_index=round_index, active=False)
                continue
            judge_agree = agreements.get(p.index)
            agree_list = list(judge_agree) if judge_agree is not None else []
            p.reputation, slashed = apply_round_update(
                p.reputation, agree_list, p.index == winner_node,
                self.config.reputation, round_index=round_index,
                active=p.index in active)
            if slashed:
                p.active_from = round_index + 2
                p.pending_requalify = self.config.auto_requalify
                if not self.config.auto_requalify:
                    p.active_from = NEVER

    def _update_tracker(self, participants, judge_nodes, judge_winners, judge_losers,
                        resp_of_node, node_of_resp, n_resp):
        top_half = math.ceil(n_resp / 2)
        w_b = np.zeros((len(judge_nodes), n_resp, n_resp))
        for b, (winners, losers) in enumerate(zip(judge_winners, judge_losers)):
            np.add.at(w_b[b], (winners, losers), 1.0)
        theta_b = fit_log_strengths_batch(w_b, l2_lambda=0.01, max_iters=150, tol=1e-4)
        top_sets: dict[int, list[int]] = {}
        for b, jn in enumerate(judge_nodes):
            order = np.argsort(-theta_b[b], kind="stable")
            own = resp_of_node[jn]
            ranked = [int(r) for r in order if r != own]
            top_sets[jn] = [int(node_of_resp[r]) for r in ranked[:top_half]]
        self.tracker.update(top_sets, participants)

    def _skip_round(self, round_index, participants, reason) -> RoundOutcome:
        return RoundOutcome(
            round_index=round_index,
            participants=tuple(participants),
            response_qualities=np.zeros(0),
            fitted_scores=None,
            winner=None,
            winner_node=None,
            correct=None,
            round_weight=1.0,
            per_judge_agreement={},
            skipped=reason,
        )

    def _collusion_flag(self) -> bool:
        if self.tracker is None or not self._clique_members:
            return False
        c = self.tracker.c()
        tau = self.sybil_params.tau_collusion
        for members in self._clique_members.values():
            for i in members:
                for j in members:
                    if i != j and self.co_ok(i, j) and c[i, j] > tau:
                        return True
        return False

    def co_ok(self, i: int, j: int) -> bool:
        return self.tracker is not None and self.tracker.co_rounds[i, j] > 0

    def _reward_shares(self, participants) -> np.ndarray:
        shares = np.zeros(self.config.n_nodes)
        reps = np.array([self.profiles[i].reputation.combined for i in participants])
        total = reps.sum()
        if total <= 0:
            return shares
        pen = self._reward_penalties(participants)
        shares[np.array(participants)] = reps * pen / total
        return shares

    def _reward_penalties(self, participants) -> np.ndarray:
        if self.tracker is None:
            return np.ones(len(participants))
        c = self.tracker.c()
        lam, tau = self.sybil_params.lam, self.sybil_params.tau_collusion
        idx = np.array(participants)
        sub = c[np.ix_(idx, idx)]
        with np.errstate(invalid="ignore"):
            pen = np.exp(-lam * np.maximum(0.0, sub - tau))
        pen = np.where(np.isnan(sub), 1.0, pen)
        np.fill_diagonal(pen, 1.0)
        return pen.prod(axis=1)

    def run(self) -> SimulationResult:
        config = self.config
        outcomes = []
        rep_history = np.zeros((config.rounds, config.n_nodes))
        slash_history = np.zeros((config.rounds, config.n_nodes), dtype=bool)
        detected = []
        shares = np.zeros((config.rounds, config.n_nodes)) if self.tracker is not None else None
        hits = 0
        measured = 0
        for t in range(config.rounds):
            outcome = self.run_round(t)
            outcomes.append(outcome)
            rep_history[t] = [p.reputation.combined for p in self.profiles]
            slash_history[t] = [p.active_from > t + 1 for p in self.profiles]
            detected.append(self._collusion_flag())
            if shares is not None and not outcome.skipped:
                shares[t] = self._reward_shares(list(outcome.participants))
            if t >= config.burn_in and not outcome.skipped:
                measured += 1
                hits += bool(outcome.correct)
        accuracy = hits / measured if measured else float("nan")
        return SimulationResult(
            config=config,
            profiles=self.profiles,
            outcomes=outcomes,
            accuracy=accuracy,
            measured_rounds=measured,
            reputation_history=rep_history,
            slashed_history=slash_history,
            collusion_detected=detected,
            reward_shares=shares,
            tracker=self.tracker,
        )


def run_simulation(config: SwarmConfig) -> SimulationResult:
    return Simulation(config).run()


# -- sweeps ---------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    param_value: float | int
    selector: str
    rounds: int
    accuracy: float
    stderr: float


SWEEP_CSV_HEADER = "param_value,selector,rounds,accuracy,stderr"


def sweep_row_csv(row: SweepRow) -> str:
    return (
        f"{row.param_value!r},{row.selector},{row.rounds},"
        f"{row.accuracy!r},{row.stderr!r}"
    )


def derive_run_seed(master_seed: int, label: str, *parts) -> int:
    """Stable per-cell seed for parallel sweep runs."""
    payload = f"{master_seed}|{label}|" + "|".join(repr(p) for p in parts)
    return int.from_bytes(hashlib.sha256(payload.encode()).digest()[:8], "big")


def _accuracy_task(config: SwarmConfig) -> float:
    return Simulation(config).run().accuracy


def _run_tasks(tasks: list[SwarmConfig], workers: int) -> list[float]:
    if workers <= 1 or len(tasks) <= 1:
        return [_accuracy_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_accuracy_task, tasks, chunksize=1))


def _aggregate(accs: list[float], rounds: int) -> tuple[float, float]:
    arr = np.array(accs)
    mean = float(arr.mean())
    if len(arr) > 1:
        stderr = float(arr.std(ddof=1) / math.sqrt(len(arr)))
    else:
        stderr = float(math.sqrt(max(mean * (1 - mean), 0.0) / max(rounds, 1)))
    return mean, stderr


def _sweep(
    template: SwarmConfig,
    label: str,
    values: Sequence,
    make_config,
    selectors: Sequence[str],
    seeds: int,
    workers: int,
) -> list[SweepRow]:
    tasks = []
    for value in values:
        for selector in selectors:
            for s in range(seeds):
                run_seed = derive_run_seed(template.master_seed, label, value, selector, s)
                tasks.append(make_config(value, selector, run_seed))
    accs = _run_tasks(tasks, workers)
    rows = []
    pos = 0
    for value in values:
        for selector in selectors:
            cell = accs[pos:pos + seeds]
            pos += seeds
            measured = tasks[pos - 1].rounds - tasks[pos - 1].burn_in
            mean, stderr = _aggregate(cell, measured)
            rows.append(SweepRow(
                param_value=value, selector=selector,
                rounds=measured, accuracy=mean, stderr=stderr))
    return rows


def sweep_swarm_size(
    template: SwarmConfig,
    sizes: Sequence[int],
    rounds_per_size: int | None = None,
    selectors: Sequence[str] = ("weighted", "majority"),
    seeds: int = 1,
    workers: int = 1,
) -> list[SweepRow]:
    """Accuracy-vs-swarm-size curves for the given selectors."""

    def make(size: int, selector: str, run_seed: int) -> SwarmConfig:
        rounds = template.rounds if rounds_per_size is None else (
            rounds_per_size + template.burn_in)
        return dataclasses.replace(
            template, n_nodes=size, selector=selector,
            rounds=rounds, master_seed=run_seed)

    return _sweep(template, "size", list(sizes), make, selectors, seeds, workers)


def sweep_byzantine(
    template: SwarmConfig,
    fractions: Sequence[float],
    selectors: Sequence[str] = ("weighted", "unweighted", "majority"),
    seeds: int = 1,
    workers: int = 1,
) -> list[SweepRow]:
    """Accuracy-vs-byzantine-fraction curves for the given selectors."""
    for f in fractions:
        if not 0.0 <= f <= 0.5:
            raise ValueError("byzantine fractions must lie in [0, 0.5]")

    def make(fraction: float, selector: str, run_seed: int) -> SwarmConfig:
        return dataclasses.replace(
            template, byzantine_fraction=fraction,
            selector=selector, master_seed=run_seed)

    return _sweep(template, "byzantine", list(fractions), make, selectors, seeds, workers)
