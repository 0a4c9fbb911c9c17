"""Bradley-Terry strength estimation from (optionally weighted) pairwise comparisons.

Comparison outcomes are aggregated into win/count matrices and latent
log-strengths are recovered by regularized gradient ascent on the
comparison log-likelihood.  All arithmetic runs in the log domain so that
extreme strength ratios never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class NonIdentifiableError(ValueError):
    """Raised when the comparison graph is disconnected and unregularized.

    Without regularization the relative strengths of two components that
    share no comparisons are undetermined.
    """

    def __init__(self, components: Sequence[Sequence[int]]):
        self.components = [sorted(c) for c in components]
        super().__init__(
            "comparison graph is disconnected with l2_lambda=0; "
            f"components: {self.components}"
        )


@dataclass(frozen=True)
class FitConfig:
    """Optimizer settings for :func:`fit`.

    ``learning_rate`` is the initial ascent step; it is halved whenever a
    step would decrease the objective and grown mildly after accepted
    steps.  ``l2_lambda`` penalizes ``sum(theta**2)`` which keeps
    disconnected graphs and perfect winners identifiable.
    """

    learning_rate: float = 1.0
    l2_lambda: float = 0.01
    max_iters: int = 10_000
    tol: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be nonnegative")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class FitDiagnostics:
    iterations: int
    grad_norm: float
    converged: bool
    log_likelihood: float


@dataclass(frozen=True)
class QualityScores:
    """Latent strengths, gauge-fixed so the log-strengths sum to zero."""

    scores: np.ndarray      # pi, all positive
    log_scores: np.ndarray  # theta = log(pi), sum(theta) == 0

    @classmethod
    def from_log(cls, theta: np.ndarray) -> "QualityScores":
        theta = np.asarray(theta, dtype=float)
        theta = theta - theta.mean()
        return cls(scores=np.exp(theta), log_scores=theta)

    def __len__(self) -> int:
        return self.log_scores.shape[0]


@dataclass
class ComparisonTally:
    """Pairwise win counts.

    ``w[i, j]`` counts how often response ``i`` beat response ``j`` and
    ``n = w + w.T`` is the symmetric comparison count.  The weighted
    variants scale each comparison by its judge's weight and coincide
    with the raw counts when every weight is one.
    """

    n: np.ndarray
    w: np.ndarray
    weighted_n: np.ndarray
    weighted_w: np.ndarray

    @classmethod
    def empty(cls, n_items: int) -> "ComparisonTally":
        if n_items < 1:
            raise ValueError("n_items must be >= 1")
        z = lambda: np.zeros((n_items, n_items), dtype=float)
        return cls(n=z(), w=z(), weighted_n=z(), weighted_w=z())

    @classmethod
    def from_comparisons(
        cls,
        n_items: int,
        comparisons: Iterable[tuple[int, int] | tuple[int, int, float]],
    ) -> "ComparisonTally":
        """Build a tally from ``(winner, loser[, weight])`` records."""
        tally = cls.empty(n_items)
        for rec in comparisons:
            winner, loser = rec[0], rec[1]
            weight = rec[2] if len(rec) > 2 else 1.0
            tally.add(winner, loser, weight)
        return tally

    def add(self, winner: int, loser: int, weight: float = 1.0) -> None:
        if winner == loser:
            raise ValueError(f"self-comparison ({winner}, {loser}) is not allowed")
        self.w[winner, loser] += 1.0
        self.n[winner, loser] += 1.0
        self.n[loser, winner] += 1.0
        self.weighted_w[winner, loser] += weight
        self.weighted_n[winner, loser] += weight
        self.weighted_n[loser, winner] += weight

    @property
    def n_items(self) -> int:
        return self.n.shape[0]

    @property
    def total_comparisons(self) -> float:
        return float(self.n.sum() / 2.0)

    def validate(self) -> None:
        for name, mat in (("n", self.n), ("w", self.w),
                          ("weighted_n", self.weighted_n), ("weighted_w", self.weighted_w)):
            if mat.shape != (self.n_items, self.n_items):
                raise ValueError(f"tally matrix {name} has shape {mat.shape}")
            if np.any(np.diag(mat) != 0):
                raise ValueError(f"tally matrix {name} has nonzero diagonal")
        if not np.allclose(self.w + self.w.T, self.n):
            raise ValueError("w + w.T != n")
        if not np.allclose(self.weighted_w + self.weighted_w.T, self.weighted_n):
            raise ValueError("weighted_w + weighted_w.T != weighted_n")

    def matrices(self, use_weights: bool) -> tuple[np.ndarray, np.ndarray]:
        if use_weights:
            return self.weighted_w, self.weighted_n
        return self.w, self.n


def bt_probability(pi_i: float, pi_j: float) -> float:
    """Probability that an item of strength ``pi_i`` beats one of ``pi_j``."""
    if pi_i <= 0 or pi_j <= 0:
        raise ValueError("strengths must be positive")
    return pi_i / (pi_i + pi_j)


def _log_sigmoid(x: np.ndarray) -> np.ndarray:
    # log(1 / (1 + exp(-x))), stable for large |x|
    return -np.logaddexp(0.0, -x)


def log_likelihood(
    tally: ComparisonTally,
    scores: QualityScores,
    use_weights: bool = False,
    l2_lambda: float = 0.0,
) -> float:
    """Comparison log-likelihood of ``scores`` minus ``l2_lambda * sum(theta**2)``."""
    theta = scores.log_scores
    if theta.shape[0] != tally.n_items:
        raise ValueError(
            f"dimension mismatch: {theta.shape[0]} scores vs {tally.n_items} items"
        )
    w, n = tally.matrices(use_weights)
    iu, ju = np.triu_indices(tally.n_items, k=1)
    d = theta[iu] - theta[ju]
    w_ij = w[iu, ju]
    w_ji = w[ju, iu]
    active = (w_ij > 0) | (w_ji > 0)
    ll = float(
        np.sum(w_ij[active] * _log_sigmoid(d[active]))
        + np.sum(w_ji[active] * _log_sigmoid(-d[active]))
    )
    if l2_lambda:
        ll -= l2_lambda * float(np.dot(theta, theta))
    return ll


def log_likelihood_gradient(
    tally: ComparisonTally,
    scores: QualityScores,
    use_weights: bool = False,
    l2_lambda: float = 0.0,
) -> np.ndarray:
    """Gradient of :func:`log_likelihood` with respect to the log-strengths."""
    theta = scores.log_scores
    if theta.shape[0] != tally.n_items:
        raise ValueError(
            f"dimension mismatch: {theta.shape[0]} scores vs {tally.n_items} items"
        )
    w, n = tally.matrices(use_weights)
    return _gradient(theta, w, n, l2_lambda)


def _gradient(theta: np.ndarray, w: np.ndarray, n: np.ndarray, l2_lambda: float) -> np.ndarray:
    d = theta[:, None] - theta[None, :]
    p = 1.0 / (1.0 + np.exp(-d))
    g = w.sum(axis=1) - (n * p).sum(axis=1)
    if l2_lambda:
        g = g - 2.0 * l2_lambda * theta
    return g


def _objective(theta: np.ndarray, w: np.ndarray, n: np.ndarray, l2_lambda: float) -> float:
    d = theta[:, None] - theta[None, :]
    ll = float(np.sum(w * _log_sigmoid(d)))
    if l2_lambda:
        ll -= l2_lambda * float(np.dot(theta, theta))
    return ll


def connected_components(n: np.ndarray) -> list[list[int]]:
    """Components of the comparison graph (edge wherever ``n[i, j] > 0``)."""
    n_items = n.shape[0]
    seen = np.zeros(n_items, dtype=bool)
    components = []
    for start in range(n_items):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in np.nonzero(n[u] > 0)[0]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        components.append(sorted(comp))
    return components


def fit(
    tally: ComparisonTally,
    config: FitConfig = FitConfig(),
    use_weights: bool = False,
) -> tuple[QualityScores, FitDiagnostics]:
    """Maximize the (regularized) comparison log-likelihood by gradient ascent.

    The step size is halved whenever a proposed step decreases the
    objective and grown by 1.5x after each accepted step.  Convergence is
    declared when the gradient infinity norm drops below ``config.tol``.
    Log-strengths are centered (sum zero) throughout; centering never
    decreases the regularized objective.
    """
    w, n = tally.matrices(use_weights)
    if n.sum() == 0:
        raise ValueError("no comparisons in tally")
    if config.l2_lambda == 0.0:
        components = connected_components(n)
        if len(components) > 1:
            raise NonIdentifiableError(components)

    theta = np.zeros(tally.n_items, dtype=float)
    obj = _objective(theta, w, n, config.l2_lambda)
    step = config.learning_rate
    grad_norm = np.inf
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iters + 1):
        g = _gradient(theta, w, n, config.l2_lambda)
        grad_norm = float(np.max(np.abs(g)))
        if grad_norm < config.tol:
            converged = True
            iterations -= 1
            break
        while True:
            cand = theta + step * g
            cand -= cand.mean()
            cand_obj = _objective(cand, w, n, config.l2_lambda)
            if cand_obj >= obj or step < 1e-18:
                break
            step *= 0.5
        if cand_obj < obj:
            # step underflow: no ascent direction representable
            break
        theta, obj = cand, cand_obj
        step *= 1.5

    scores = QualityScores.from_log(theta)
    if not np.all(np.isfinite(scores.log_scores)):
        raise FloatingPointError("non-finite log-strengths produced")
    diag = FitDiagnostics(
        iterations=iterations,
        grad_norm=grad_norm,
        converged=converged,
        log_likelihood=obj,
    )
    return scores, diag


def fit_log_strengths_batch(
    w: np.ndarray,
    l2_lambda: float = 0.01,
    max_iters: int = 150,
    tol: float = 1e-4,
) -> np.ndarray:
    """Fit a batch of independent tallies at once.

    ``w`` has shape ``(B, N, N)`` with ``w[b, i, j]`` the number of times
    item ``i`` beat item ``j`` in tally ``b``.  Returns centered
    log-strengths of shape ``(B, N)``.  Gradient ascent with a fixed step
    below the curvature bound (each pair contributes at most 1/4 to the
    Hessian diagonal), so every step ascends without a line search.  Used
    where many small fits are needed per round (per-judge implied
    rankings); the fixed budget is plenty for ranking purposes.
    """
    w = np.asarray(w, dtype=float)
    n = w + np.swapaxes(w, 1, 2)
    wins = w.sum(axis=2)
    # gradient is Lipschitz with constant <= max row sum of n / 2 (Gershgorin)
    curvature = n.sum(axis=2).max(axis=1) / 2.0 + 2.0 * l2_lambda
    step = (1.0 / np.maximum(curvature, 1e-12))[:, None]
    theta = np.zeros(w.shape[:2], dtype=float)
    for _ in range(max_iters):
        d = theta[:, :, None] - theta[:, None, :]
        p = 1.0 / (1.0 + np.exp(-d))
        g = wins - (n * p).sum(axis=2) - 2.0 * l2_lambda * theta
        if np.max(np.abs(g)) < tol:
            break
        theta = theta + step * g
    return theta - theta.mean(axis=1, keepdims=True)


def rank_from_scores(scores: QualityScores) -> np.ndarray:
    """Indices sorted by descending strength; ties broken by ascending index."""
    return np.argsort(-scores.scores, kind="stable")
