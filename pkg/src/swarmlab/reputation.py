"""Dual-channel node reputation: EMA channels, piecewise transitions, slashing.

Two exponentially averaged channels track how well a node judges
(agreement of its comparisons with the final consensus ordering) and how
often its own responses win.  The combined score is additionally evolved
by a piecewise step-up/step-down/decay rule and zeroed outright when it
falls below the slash threshold.

The per-round composition is: both channel EMAs run first, then the
piecewise rule advances the previous round's combined score using the
round's performance signal.  The performance signal is the node's raw
agreement fraction for the round; wins influence reputation through the
generation channel only.  (Folding the win indicator into the piecewise
signal would make any occasional winner's trajectory non-monotone, which
contradicts the intended long-run dynamics.)
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

INACTIVE = None  # performance marker for a node that sat the round out


@dataclass(frozen=True)
class ReputationParams:
    alpha: float = 0.5            # weight of the ranking channel in the combined mix
    beta: float = 0.9             # EMA retention
    delta_up: float = 0.02
    delta_down: float = 0.03
    decay_delta: float = 0.005    # per-round decay while inactive
    r_min: float = 0.0
    r_max: float = 1.0
    slash_threshold: float = 0.1  # strictly below -> slashed to zero
    perf_threshold: float = 0.5
    r_initial: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if self.delta_up <= 0 or self.delta_down <= 0:
            raise ValueError("step sizes must be positive")
        if not 0.0 <= self.decay_delta < 1.0:
            raise ValueError("decay_delta must lie in [0, 1)")
        if not self.r_min < self.slash_threshold < self.r_max:
            raise ValueError("need r_min < slash_threshold < r_max")
        if not self.r_min <= self.r_initial <= self.r_max:
            raise ValueError("r_initial must lie within [r_min, r_max]")


@dataclass(frozen=True)
class ReputationState:
    ranking: float
    generation: float
    combined: float
    last_active_round: int = -1

    @classmethod
    def initial(cls, params: ReputationParams, round_index: int = -1) -> "ReputationState":
        r = params.r_initial
        return cls(ranking=r, generation=r, combined=r, last_active_round=round_index)


def _clamp(x: float, params: ReputationParams) -> float:
    return min(params.r_max, max(params.r_min, x))


def _mix(ranking: float, generation: float, params: ReputationParams) -> float:
    return params.alpha * ranking + (1.0 - params.alpha) * generation


def update_ranking_ema(
    state: ReputationState,
    agreements: Sequence[bool],
    params: ReputationParams,
) -> ReputationState:
    """Fold a round's consensus-agreement indicators into the ranking channel.

    An empty comparison set leaves the channel frozen (the fraction is
    undefined for a judge that compared nothing).
    """
    if len(agreements) == 0:
        return state
    fraction = sum(bool(a) for a in agreements) / len(agreements)
    ranking = _clamp(params.beta * state.ranking + (1.0 - params.beta) * fraction, params)
    return dataclasses.replace(
        state,
        ranking=ranking,
        combined=_clamp(_mix(ranking, state.generation, params), params),
    )


def update_generation_ema(
    state: ReputationState,
    won_round: bool,
    params: ReputationParams,
) -> ReputationState:
    generation = _clamp(
        params.beta * state.generation + (1.0 - params.beta) * (1.0 if won_round else 0.0),
        params,
    )
    return dataclasses.replace(
        state,
        generation=generation,
        combined=_clamp(_mix(state.ranking, generation, params), params),
    )


def apply_round_transition(
    state: ReputationState,
    performance: float | None,
    params: ReputationParams,
) -> ReputationState:
    """Advance the combined score one round.

    Above-threshold performance steps it up (capped), anything else steps
    it down (floored); ``INACTIVE`` (None) applies multiplicative decay
    instead.  The boundary ``performance == perf_threshold`` takes the
    down branch ("exceeds" is strict).
    """
    if performance is INACTIVE:
        combined = state.combined * (1.0 - params.decay_delta)
    elif performance > params.perf_threshold:
        combined = min(params.r_max, state.combined + params.delta_up)
    else:
        combined = max(params.r_min, state.combined - params.delta_down)
    return dataclasses.replace(state, combined=combined)


def check_slash(
    state: ReputationState,
    params: ReputationParams,
) -> tuple[ReputationState, bool]:
    """Zero the whole state when combined drops strictly below the threshold."""
    if state.combined < params.slash_threshold:
        return dataclasses.replace(state, ranking=0.0, generation=0.0, combined=0.0), True
    return state, False


def apply_round_update(
    state: ReputationState,
    agreements: Sequence[bool],
    won_round: bool,
    params: ReputationParams,
    round_index: int = 0,
    active: bool = True,
) -> tuple[ReputationState, bool]:
    """One full round of reputation bookkeeping for a node.

    Runs both channel EMAs, then advances the previous combined score via
    the piecewise transition (performance = the round's agreement
    fraction), then applies the slash check.  Returns the new state and
    whether the node was slashed this round.
    """
    if not active:
        state = apply_round_transition(state, INACTIVE, params)
        return check_slash(state, params)
    carried = state.combined
    state = update_ranking_ema(state, agreements, params)
    state = update_generation_ema(state, won_round, params)
    performance = (
        sum(bool(a) for a in agreements) / len(agreements) if len(agreements) else None
    )
    state = dataclasses.replace(state, combined=carried, last_active_round=round_index)
    if performance is not None:
        state = apply_round_transition(state, performance, params)
    return check_slash(state, params)


def run_reputation_scenario(
    schedule: Iterable[tuple[bool, Sequence[bool], bool]],
    params: ReputationParams = ReputationParams(),
) -> list[ReputationState]:
    """Replay a scripted per-round schedule of (active, agreements, won).

    Returns the state after every round, starting from the initial
    reputation.  Used by the trajectory-shape experiments and tests.
    """
    state = ReputationState.initial(params)
    trajectory = []
    for round_index, (active, agreements, won) in enumerate(schedule):
        state, _ = apply_round_update(
            state, agreements, won, params, round_index=round_index, active=active
        )
        trajectory.append(state)
    return trajectory


def reputation_commitment(history: Sequence, pubkey: bytes | str) -> bytes:
    """Commitment digest binding a node's round history to its public key.

    The history is serialized canonically (compact JSON, sorted keys) and
    hashed together with the key, so any single-bit change to either
    input changes the digest.
    """
    if isinstance(pubkey, str):
        pubkey = pubkey.encode("utf-8")
    canonical = json.dumps(
        list(history), sort_keys=True, separators=(",", ":"), ensure_ascii=True
    ).encode("utf-8")
    return hashlib.sha256(canonical + pubkey).digest()


TRAJECTORY_CSV_HEADER = "round,node_id,ranking,generation,combined,slashed"


def trajectory_csv_rows(
    node_id: str,
    trajectory: Sequence[ReputationState],
    slashed_rounds: Sequence[bool] | None = None,
) -> list[str]:
    """Render one node's trajectory as CSV rows (see TRAJECTORY_CSV_HEADER)."""
    rows = []
    for t, state in enumerate(trajectory):
        slashed = slashed_rounds[t] if slashed_rounds is not None else False
        rows.append(
            f"{t},{node_id},{state.ranking!r},{state.generation!r},"
            f"{state.combined!r},{int(slashed)}"
        )
    return rows
