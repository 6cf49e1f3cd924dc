"""Portfolio aggregation of member designs.

Expected return is the weight-weighted mean of member returns; portfolio
variance is the double inner product of the covariance matrix with the
weight vector. Wells draw their rock properties independently, so the
default correlation between members is zero (identity correlation
matrix); the general covariance path stays available for user-supplied
correlations, and the prose-variant linear risk pooling is selectable as
``risk_mode="linear"``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .metrics import DesignStats

RISK_MODES = ("quadratic", "linear")

_WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class PortfolioWeights:
    """Nonnegative member weights summing to one."""

    design_ids: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.design_ids) != len(self.weights):
            raise DomainError("design_ids and weights lengths differ")
        if any(w < 0.0 for w in self.weights):
            raise DomainError("weights must be >= 0")
        if abs(sum(self.weights) - 1.0) > _WEIGHT_SUM_TOL:
            raise DomainError(f"weights sum to {sum(self.weights)!r}, not 1")


@dataclass(frozen=True)
class PortfolioStats:
    """Aggregated return/risk of one weighting, with a member snapshot."""

    expected_return: float
    risk: float
    weights: PortfolioWeights
    member_returns: tuple[float, ...]
    member_risks: tuple[float, ...]
    risk_mode: str = "quadratic"


def expected_return(weights: PortfolioWeights, returns) -> float:
    """Inner product of the weight and member-return vectors."""
    if len(returns) != len(weights.weights):
        raise DomainError("returns length does not match weights")
    return float(sum(w * r for w, r in zip(weights.weights, returns)))


def covariance_matrix(risks, correlations) -> np.ndarray:
    """cov_ij = sigma_i sigma_j c_ij for a valid correlation matrix."""
    sigma = np.asarray(risks, dtype=float)
    c = np.asarray(correlations, dtype=float)
    n = sigma.shape[0]
    if c.shape != (n, n):
        raise DomainError(f"correlation matrix must be {n}x{n}, got {c.shape}")
    if not np.allclose(c, c.T, rtol=0.0, atol=1e-12):
        raise DomainError("correlation matrix must be symmetric")
    if not np.allclose(np.diag(c), 1.0, rtol=0.0, atol=1e-12):
        raise DomainError("correlation matrix diagonal must be ones")
    if np.any(np.abs(c) > 1.0 + 1e-12):
        raise DomainError("correlation entries must lie in [-1, 1]")
    return sigma[:, None] * sigma[None, :] * c


def portfolio_variance(weights: PortfolioWeights, cov) -> float:
    """Double inner product rho' cov rho; risk is its positive square root."""
    rho = np.asarray(weights.weights, dtype=float)
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (rho.shape[0], rho.shape[0]):
        raise DomainError("covariance shape does not match weights")
    var = float(rho @ cov @ rho)
    if var < -1e-15:
        raise DomainError(f"negative portfolio variance {var!r}: invalid covariance")
    return max(var, 0.0)


def portfolio_risk(weights: PortfolioWeights, member_risks,
                   risk_mode: str = "quadratic") -> float:
    """Portfolio risk under zero cross-correlation.

    "quadratic" takes the square root of the diagonal-covariance variance;
    "linear" pools the member standard deviations directly (the
    weighted-sum reading of the aggregation).
    """
    if risk_mode not in RISK_MODES:
        raise DomainError(f"unknown risk_mode {risk_mode!r}")
    sigma = np.asarray(member_risks, dtype=float)
    rho = np.asarray(weights.weights, dtype=float)
    if sigma.shape != rho.shape:
        raise DomainError("member_risks length does not match weights")
    if risk_mode == "linear":
        return float(rho @ sigma)
    return float(np.sqrt(np.sum(rho * rho * sigma * sigma)))


def simplex_sample(n_members: int, samples: int, seed,
                   design_ids: tuple[str, ...] | None = None) -> list[PortfolioWeights]:
    """Uniform weight vectors on the (N-1)-simplex.

    Normalized independent unit-rate exponential spacings; deterministic
    given the seed.
    """
    if n_members < 1 or samples < 1:
        raise DomainError("n_members and samples must be >= 1")
    if design_ids is None:
        design_ids = tuple(f"member-{i}" for i in range(n_members))
    if len(design_ids) != n_members:
        raise DomainError("design_ids length does not match n_members")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    draws = rng.standard_exponential((samples, n_members))
    draws /= draws.sum(axis=1, keepdims=True)
    return [PortfolioWeights(design_ids, tuple(float(w) for w in row))
            for row in draws]


def portfolio_stats(weights: PortfolioWeights, members: list[DesignStats],
                    risk_mode: str = "quadratic") -> PortfolioStats:
    """Evaluate one weighting over its member designs."""
    if len(members) != len(weights.weights):
        raise DomainError("member count does not match weights")
    returns = tuple(m.mean_efficiency for m in members)
    risks = tuple(m.risk_sigma for m in members)
    return PortfolioStats(
        expected_return=expected_return(weights, returns),
        risk=portfolio_risk(weights, risks, risk_mode),
        weights=weights,
        member_returns=returns,
        member_risks=risks,
        risk_mode=risk_mode,
    )


def feasibility_set(members: list[DesignStats], samples: int, seed,
                    risk_mode: str = "quadratic") -> list[PortfolioStats]:
    """Monte Carlo cloud of portfolio (risk, return) points.

    Output order matches the sample order; reproducible bit-for-bit given
    (members, samples, seed).
    """
    if not members:
        raise DomainError("feasibility_set needs at least one member")
    ids = tuple(m.design_id for m in members)
    return [portfolio_stats(w, members, risk_mode)
            for w in simplex_sample(len(members), samples, seed, ids)]
