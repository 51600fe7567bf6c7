"""Label-level local differential privacy induced by negatively smoothed
gradient-ascent unlearning.

With learning weight gamma1, unlearning weight gamma2 and smooth rate
alpha < 0, the per-example unlearning risk is

    A * (-log p_y) - (alpha * gamma2 / K) * sum_{y' != y} (-log p_{y'})

with A = gamma1 - gamma2 * (1 + (1-K)/K * alpha) required positive.  Its
minimizer over the simplex puts mass A / (A - (K-1) alpha gamma2 / K) on the
target label and (-alpha gamma2 / K) / (A - (K-1) alpha gamma2 / K) on each
other label; the privacy budget is

    epsilon = | log( (K/alpha) (1 - gamma1/gamma2) + 1 - K ) |.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class LdpParams:
    K: int
    alpha: float
    gamma1: float
    gamma2: float

    def __post_init__(self):
        if self.K < 2:
            raise DomainError("need K >= 2")
        if self.alpha >= 0:
            raise DomainError("smooth rate must be negative")
        if self.gamma1 <= 0 or self.gamma2 <= 0:
            raise DomainError("gamma weights must be positive")
        if self.A <= 0:
            raise DomainError(
                f"precondition gamma1 - gamma2*(1 + (1-K)/K * alpha) = {self.A:.6g} must be positive")

    @property
    def A(self) -> float:
        return self.gamma1 - self.gamma2 * (1.0 + (1.0 - self.K) / self.K * self.alpha)


@dataclass(frozen=True)
class LdpReport:
    epsilon: float
    p_target: float
    p_other: float
    empirical_max_log_ratio: float


def label_ldp_epsilon(params: LdpParams) -> float:
    """Privacy budget |log((K/alpha)(1 - gamma1/gamma2) + 1 - K)|."""
    arg = (params.K / params.alpha) * (1.0 - params.gamma1 / params.gamma2) + 1.0 - params.K
    if arg <= 0:
        raise DomainError(f"log argument {arg:.6g} is nonpositive")
    return abs(math.log(arg))


def optimal_prediction_distribution(params: LdpParams) -> tuple[float, float]:
    """(p_target, p_other) minimizing the weighted unlearning risk."""
    K, a, g2 = params.K, params.alpha, params.gamma2
    A = params.A
    denom = A - (K - 1) * a * g2 / K
    p_target = A / denom
    p_other = (-a * g2 / K) / denom
    return float(p_target), float(p_other)


def simplex_oracle(params: LdpParams, iters: int = 10_000, step: float = 1e-2) -> np.ndarray:
    """Projected gradient descent on the weighted risk over the simplex.

    Independent numerical check of the closed-form distribution; the
    objective is strictly convex on the interior for valid params.
    """
    K, a, g2 = params.K, params.alpha, params.gamma2
    A = params.A
    w = np.full(K, -a * g2 / K)
    w[0] = A  # target label at index 0

    p = np.full(K, 1.0 / K)
    for _ in range(iters):
        g = -w / p
        p = _project_simplex(p - step * g)
        p = np.maximum(p, 1e-12)
        p /= p.sum()
    return p


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.max(np.nonzero(u * np.arange(1, v.size + 1) > (css - 1.0))[0])
    tau = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - tau, 0.0)


def verify_ratio_bound(params: LdpParams) -> LdpReport:
    """Brute-force check of the privacy definition.

    Enumerates all (y, y', y_pred) label triples under the optimal
    prediction distribution and compares the max log probability ratio with
    the closed-form epsilon.
    """
    eps = label_ldp_epsilon(params)
    p_target, p_other = optimal_prediction_distribution(params)
    K = params.K

    def prob(true_label: int, pred: int) -> float:
        return p_target if pred == true_label else p_other

    max_log_ratio = -math.inf
    for y in range(K):
        for y2 in range(K):
            for pred in range(K):
                ratio = math.log(prob(y, pred) / prob(y2, pred))
                max_log_ratio = max(max_log_ratio, ratio)
    if max_log_ratio > eps + 1e-9:
        raise DomainError(
            f"empirical log ratio {max_log_ratio:.12g} exceeds epsilon {eps:.12g}")
    return LdpReport(epsilon=eps, p_target=p_target, p_other=p_other,
                     empirical_max_log_ratio=max_log_ratio)
