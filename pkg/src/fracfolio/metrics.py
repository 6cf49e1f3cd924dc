"""Return and risk measures for stage outcomes.

Return is the energy efficiency of a treatment: created fracture surface
energy over total injected hydraulic energy. Within-stage variability is
the sample standard deviation of the relative per-cluster efficiencies,
and a design's risk adds the relative standard deviations of efficiency
and variability across stochastic rock realizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import fmean

from .errors import DomainError


def crack_energy_factor(toughness: float, youngs_modulus: float,
                        poisson_ratio: float) -> float:
    """pi (1 - nu^2) K_IC^2 / E: surface energy per unit of R^2, J/m^2."""
    return math.pi * (1.0 - poisson_ratio ** 2) * toughness ** 2 / youngs_modulus


def stage_efficiency(radii, rock, total_energy: float) -> float:
    """Stage energy efficiency: breakage energy over injected energy.

    With per-cluster toughness the numerator sums
    pi (1 - nu^2) K_IC_i^2 / E * R_i^2 per cluster; when all clusters
    share properties this collapses to the single-factor form.
    """
    if total_energy <= 0.0:
        raise DomainError("total_energy must be > 0")
    if len(radii) != rock.n_clusters:
        raise DomainError("radii length must match the realization's clusters")
    num = 0.0
    for r, k in zip(radii, rock.toughness):
        num += crack_energy_factor(k, rock.youngs_modulus, rock.poisson_ratio) * r * r
    return num / total_energy


def cluster_efficiencies(radii, rock, energies) -> list[float]:
    """Per-cluster energy efficiencies.

    A cluster that grew (R > 0) with zero delivered energy is physically
    inconsistent and raises; energy must have been spent to grow.
    """
    if not (len(radii) == len(energies) == rock.n_clusters):
        raise DomainError("radii/energies lengths must match the realization")
    out = []
    for r, k, w in zip(radii, rock.toughness, energies):
        if w == 0.0:
            if r > 0.0:
                raise DomainError(f"cluster with radius {r} m received zero energy")
            out.append(0.0)
            continue
        out.append(crack_energy_factor(k, rock.youngs_modulus, rock.poisson_ratio)
                   * r * r / w)
    return out


def _relative_sd(series) -> float:
    """Sample standard deviation of relative deviations from the mean.

    Constant series give exactly 0; a nonpositive mean with a nonconstant
    series is a domain error (the relative deviation is undefined).
    """
    n = len(series)
    if n < 2:
        raise DomainError("need at least two values")
    first = series[0]
    if all(x == first for x in series):
        return 0.0
    mean = fmean(series)
    if mean <= 0.0:
        raise DomainError("series mean must be > 0 for relative deviations")
    acc = 0.0
    for x in series:
        d = (x - mean) / mean
        acc += d * d
    return math.sqrt(acc / (n - 1))


def energy_variability(cluster_eff) -> float:
    """Within-stage energy variability: relative sample SD of cluster efficiencies."""
    if len(cluster_eff) < 2:
        raise DomainError("variability needs at least two clusters")
    if fmean(cluster_eff) <= 0.0:
        raise DomainError("mean cluster efficiency must be > 0")
    return _relative_sd(cluster_eff)


def design_risk(eff_series, var_series) -> float:
    """Total risk of a design over stochastic realizations.

    Sum of the relative sample standard deviations of the per-realization
    variabilities and efficiencies. Zero exactly when both series are
    constant.
    """
    if len(eff_series) != len(var_series):
        raise DomainError("efficiency and variability series lengths differ")
    return _relative_sd(var_series) + _relative_sd(eff_series)


@dataclass(frozen=True)
class DesignStats:
    """A design's return (mean efficiency) and risk over realizations."""

    design_id: str
    mean_efficiency: float
    risk_sigma: float
    realization_count: int
    efficiencies: tuple[float, ...]
    variabilities: tuple[float, ...]

    @classmethod
    def from_series(cls, design_id: str, efficiencies, variabilities) -> "DesignStats":
        effs = tuple(float(e) for e in efficiencies)
        vars_ = tuple(float(v) for v in variabilities)
        return cls(
            design_id=design_id,
            mean_efficiency=fmean(effs),
            risk_sigma=design_risk(effs, vars_),
            realization_count=len(effs),
            efficiencies=effs,
            variabilities=vars_,
        )


@dataclass(frozen=True)
class BaseCaseReference:
    """Efficiency and risk of the single-design base case used for scaling."""

    base_efficiency: float
    base_risk: float
    design_id: str = "base"

    def __post_init__(self):
        if self.base_efficiency <= 0.0 or self.base_risk <= 0.0:
            raise DomainError("base-case reference values must be > 0")


def _return_risk(stats) -> tuple[float, float]:
    if hasattr(stats, "mean_efficiency"):
        return stats.mean_efficiency, stats.risk_sigma
    return stats.expected_return, stats.risk


def normalize_vs_base(stats, ref: BaseCaseReference) -> tuple[float, float]:
    """(efficiency ratio, risk ratio) of a design or portfolio vs the base case."""
    r, s = _return_risk(stats)
    return r / ref.base_efficiency, s / ref.base_risk
