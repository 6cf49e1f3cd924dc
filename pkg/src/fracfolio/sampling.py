"""Design-space and rock-property sampling with a deterministic seed discipline.

Candidate designs come from one-dimensional Latin hypercube stratification
over each family's free axes; stochastic rock realizations are drawn from
bounded uniform distributions around the base properties, with streams
keyed by (master seed, design id, realization index) so any single work
item is reproducible in isolation.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .fracture import RockRealization, StageDesign

# Stream tags for seed derivation (see also fracfolio.pipeline).
ROCK_STREAM = 2


@dataclass(frozen=True)
class BaseRockProperties:
    """Reference rock/stress properties (single-well base values).

    leakoff_ref is the reference leak-off coefficient at 1 Pa*s fluid
    viscosity; the effective coefficient scales like sqrt(1/viscosity).
    """

    leakoff_ref: float = 3.24e-6      # m/s^0.5
    youngs_modulus: float = 25e9      # Pa
    poisson_ratio: float = 0.2
    closure_stress: float = 34.47e6   # Pa
    toughness: float = 1e6            # Pa*m^0.5


@dataclass(frozen=True)
class UncertaintyModel:
    """Relative variation range of the uncertain formation parameters.

    Closure stress, Young's modulus and toughness vary uniformly within
    +/- level/2 of their base values; the leak-off coefficient gets a
    log-uniform multiplier 10**u with u uniform in +/- level/2 decades.
    level = 0 is allowed as the degenerate (deterministic) limit.
    """

    level: float
    master_seed: int

    def __post_init__(self):
        if self.level < 0.0:
            raise DomainError("uncertainty level must be >= 0")


@dataclass(frozen=True)
class DesignSpace:
    """Bounds and scales of one design family's sampling box.

    Degenerate axes (lo == hi) are held constant. Perforation bounds are
    expressed as the entry pressure loss at the nominal per-cluster rate;
    the sampled loss maps onto the quadratic-law factor f = loss / rate^2.
    """

    family: str
    candidate_count: int
    n_fractures: int = 5
    injection_rate_bounds: tuple[float, float] = (0.1, 0.25)     # m^3/s, linear
    viscosity_bounds: tuple[float, float] = (10.0 ** -3.5, 10.0)  # Pa*s, log
    stage_length_bounds: tuple[float, float] = (20.0, 120.0)     # m, linear
    spacing_ratio_bounds: tuple[float, float] = (0.25, 0.5)      # -, linear
    perf_loss_bounds: tuple[float, float] = (1e1, 1e8)           # Pa
    perf_loss_scale: str = "log"
    perf_nominal_cluster_rate: float = 0.04                      # m^3/s
    spacing_mode: str = "nonuniform"
    lateral_length: float = 1000.0                               # m
    well_volume: float = 14400.0                                 # m^3

    def __post_init__(self):
        for name in ("injection_rate_bounds", "viscosity_bounds",
                     "stage_length_bounds", "spacing_ratio_bounds",
                     "perf_loss_bounds"):
            lo, hi = getattr(self, name)
            if not (0.0 < lo <= hi):
                raise ConfigError(f"{name} must satisfy 0 < lo <= hi, got {lo}, {hi}")
        if self.candidate_count < 1:
            raise ConfigError("candidate_count must be >= 1")
        if self.perf_loss_scale not in ("linear", "log"):
            raise ConfigError(f"unknown scale {self.perf_loss_scale!r}")


def uniform_family(count: int, **overrides) -> DesignSpace:
    return DesignSpace(family="uniform", candidate_count=count,
                       spacing_mode="uniform",
                       spacing_ratio_bounds=(0.5, 0.5), **overrides)


def nonuniform_family(count: int, **overrides) -> DesignSpace:
    return DesignSpace(family="nonuniform", candidate_count=count, **overrides)


def exl_family(count: int, perf_loss_bounds: tuple[float, float] = (5.5e6, 1e8),
               injection_rate: float = 0.25, viscosity: float = 0.003,
               stage_length: float = 20.0, **overrides) -> DesignSpace:
    """Extreme-limited-entry screen: only the perforation loss varies."""
    return DesignSpace(
        family="exl", candidate_count=count,
        injection_rate_bounds=(injection_rate, injection_rate),
        viscosity_bounds=(viscosity, viscosity),
        stage_length_bounds=(stage_length, stage_length),
        spacing_ratio_bounds=(0.5, 0.5),
        spacing_mode="uniform",
        perf_loss_bounds=perf_loss_bounds,
        perf_loss_scale="linear",
        perf_nominal_cluster_rate=injection_rate / overrides.get("n_fractures", 5),
        **overrides)


def treating_time_for(stage_length: float, injection_rate: float,
                      lateral_length: float, well_volume: float) -> float:
    """Treating time giving every design the same per-stage volume share.

    The well's fixed total volume is split evenly across the
    floor(lateral / stage length) stages that fit on the lateral.
    """
    stages = math.floor(lateral_length / stage_length)
    if stages < 1:
        raise DomainError("stage length exceeds the lateral length")
    return well_volume / stages / injection_rate


def _lhs_column(rng: np.random.Generator, count: int, lo: float, hi: float,
                scale: str) -> np.ndarray:
    """One stratified axis: one uniform point in each of ``count`` strata."""
    if lo == hi:
        return np.full(count, lo)
    perm = rng.permutation(count)
    offsets = rng.random(count)
    u = (perm + offsets) / count
    if scale == "log":
        lo_l, hi_l = math.log10(lo), math.log10(hi)
        return 10.0 ** (lo_l + u * (hi_l - lo_l))
    return lo + u * (hi - lo)


def lhs_sample(space: DesignSpace, count: int, seed) -> list[StageDesign]:
    """Latin-hypercube sample of one family's design space.

    Axes are stratified independently in a fixed order (perforation loss,
    injection rate, viscosity, stage length, spacing ratio), each in its
    own scale; treating time is then derived from the fixed-volume rule.
    Deterministic given the seed.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    loss = _lhs_column(rng, count, *space.perf_loss_bounds, space.perf_loss_scale)
    rate = _lhs_column(rng, count, *space.injection_rate_bounds, "linear")
    visc = _lhs_column(rng, count, *space.viscosity_bounds, "log")
    length = _lhs_column(rng, count, *space.stage_length_bounds, "linear")
    ratio = _lhs_column(rng, count, *space.spacing_ratio_bounds, "linear")

    designs = []
    rate_nom = space.perf_nominal_cluster_rate
    for i in range(count):
        designs.append(StageDesign(
            design_id=f"{space.family}-{i:05d}",
            n_fractures=space.n_fractures,
            stage_length=float(length[i]),
            spacing_ratio=float(ratio[i]),
            spacing_mode=space.spacing_mode,
            injection_rate=float(rate[i]),
            treating_time=treating_time_for(
                float(length[i]), float(rate[i]),
                space.lateral_length, space.well_volume),
            viscosity=float(visc[i]),
            perf_factor=float(loss[i]) / (rate_nom * rate_nom),
        ))
    return designs


def leakoff_for_viscosity(leakoff_ref: float, viscosity: float) -> float:
    """Effective leak-off coefficient CL0 * sqrt(1 Pa*s / mu)."""
    if viscosity <= 0.0:
        raise DomainError("viscosity must be > 0")
    return leakoff_ref * math.sqrt(1.0 / viscosity)


def _design_key(design_id: str) -> int:
    """Stable 64-bit key for seed derivation from an opaque design id."""
    return int.from_bytes(hashlib.sha256(design_id.encode()).digest()[:8], "big")


def realization_seed_sequence(model: UncertaintyModel, design_id: str,
                              realization_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        (model.master_seed, ROCK_STREAM, _design_key(design_id), realization_index))


def draw_realization(base: BaseRockProperties, model: UncertaintyModel,
                     design_id: str, realization_index: int,
                     viscosity: float, n_clusters: int = 5) -> RockRealization:
    """One stochastic draw of rock properties for a given design.

    Young's modulus is drawn per well, closure stress and toughness per
    cluster (all uniform within +/- level/2 relative); the leak-off
    coefficient gets a log-uniform decade multiplier and is then scaled
    for the design's fluid viscosity. Poisson's ratio is held fixed.
    Draw order is frozen: modulus, leak-off exponent, stresses, toughnesses.
    """
    ss = realization_seed_sequence(model, design_id, realization_index)
    rng = np.random.default_rng(ss)
    half = model.level / 2.0

    youngs = rng.uniform(base.youngs_modulus * (1.0 - half),
                         base.youngs_modulus * (1.0 + half))
    exponent = rng.uniform(-half, half)
    sigma = rng.uniform(base.closure_stress * (1.0 - half),
                        base.closure_stress * (1.0 + half), size=n_clusters)
    kic = rng.uniform(base.toughness * (1.0 - half),
                      base.toughness * (1.0 + half), size=n_clusters)

    leakoff = leakoff_for_viscosity(base.leakoff_ref * 10.0 ** exponent, viscosity)
    return RockRealization(
        realization_id=f"{design_id}/r{realization_index:04d}",
        seed=int(ss.generate_state(1, np.uint64)[0]),
        youngs_modulus=float(youngs),
        poisson_ratio=base.poisson_ratio,
        leakoff=float(leakoff),
        closure_stress=tuple(float(s) for s in sigma),
        toughness=tuple(float(k) for k in kic),
    )
