"""Run configuration: JSON schema, validation, and factories.

Field names carry explicit units so config files are unambiguous and
diffable. A config round-trips losslessly through JSON; its canonical
hash keys run manifests and resume checks.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import sampling
from .errors import ConfigError
from .fracture import SolverControls, StageDesign
from .sampling import BaseRockProperties, DesignSpace, UncertaintyModel

FAMILIES = ("uniform", "nonuniform", "exl")


def _build(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object, got {type(data).__name__}")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    return cls(**data)


def _pair(value, where: str) -> tuple[float, float]:
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise ConfigError(f"{where}: expected [lo, hi]")
    lo, hi = float(value[0]), float(value[1])
    if not lo <= hi:
        raise ConfigError(f"{where}: lo must be <= hi")
    return lo, hi


@dataclass(frozen=True)
class RockBaseConfig:
    leakoff_ref_m_per_sqrt_s: float = 3.24e-6
    youngs_modulus_Pa: float = 25e9
    poisson_ratio: float = 0.2
    closure_stress_Pa: float = 34.47e6
    toughness_Pa_sqrt_m: float = 1e6


@dataclass(frozen=True)
class DesignSpaceConfig:
    candidate_count_uniform: int = 7200
    candidate_count_nonuniform: int = 7200
    candidate_count_exl: int = 7200
    injection_rate_m3_per_s: tuple[float, float] = (0.1, 0.25)
    viscosity_Pa_s: tuple[float, float] = (10.0 ** -3.5, 10.0)
    stage_length_m: tuple[float, float] = (20.0, 120.0)
    spacing_ratio: tuple[float, float] = (0.25, 0.5)
    perforation_loss_Pa: tuple[float, float] = (1e1, 1e8)
    perforation_nominal_rate_m3_per_s: float = 0.04
    n_fractures: int = 5
    lateral_length_m: float = 1000.0
    well_volume_m3: float = 14400.0

    def __post_init__(self):
        for name in ("injection_rate_m3_per_s", "viscosity_Pa_s", "stage_length_m",
                     "spacing_ratio", "perforation_loss_Pa"):
            object.__setattr__(self, name, _pair(getattr(self, name), name))


@dataclass(frozen=True)
class ExlScreenConfig:
    viscosity_Pa_s: float = 0.003
    injection_rate_m3_per_s: float = 0.25
    stage_length_m: float = 20.0
    spacing_ratio: float = 0.5
    perforation_loss_Pa: tuple[float, float] = (5.5e6, 1e8)

    def __post_init__(self):
        object.__setattr__(self, "perforation_loss_Pa",
                           _pair(self.perforation_loss_Pa, "exl perforation_loss_Pa"))


@dataclass(frozen=True)
class BaseCaseConfig:
    injection_rate_m3_per_s: float = 0.2
    stage_length_m: float = 50.0
    viscosity_Pa_s: float = 0.003
    spacing_ratio: float = 0.5
    perforation_factor_Pa_s2_per_m6: float = 1.06e10


@dataclass(frozen=True)
class SolverConfig:
    dt_initial_s: float = 0.1
    dt_growth: float = 1.08
    dt_cap_divisor: float = 500.0
    leakoff_time_floor_s: float = 1.0
    viscous_alpha: float = 50.0
    seed_radius_m: float = 0.1
    pressure_rel_tol: float = 1e-8
    max_iterations: int = 200
    max_volume_balance_error: float = 0.005


@dataclass(frozen=True)
class RunConfig:
    master_seed: int = 20260810
    workers: int = 1
    risk_aggregation: str = "quadratic"
    uncertainty_level: float = 0.05
    realizations_per_design: int = 120
    frontier_select_count: int = 6
    low_efficiency_threshold: float = 2.5e-4
    low_efficiency_count: int = 6
    mixture_samples_per_family: int = 12500
    high_efficiency_family: str = "nonuniform"
    rock_base: RockBaseConfig = field(default_factory=RockBaseConfig)
    design_space: DesignSpaceConfig = field(default_factory=DesignSpaceConfig)
    exl_screen: ExlScreenConfig = field(default_factory=ExlScreenConfig)
    base_case: BaseCaseConfig = field(default_factory=BaseCaseConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.master_seed < 0 or self.master_seed >= 2 ** 64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.risk_aggregation not in ("quadratic", "linear"):
            raise ConfigError(f"unknown risk_aggregation {self.risk_aggregation!r}")
        if self.uncertainty_level < 0.0:
            raise ConfigError("uncertainty_level must be >= 0")
        if self.realizations_per_design < 2:
            raise ConfigError("realizations_per_design must be >= 2")
        for name in ("frontier_select_count", "low_efficiency_count",
                     "mixture_samples_per_family"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.low_efficiency_threshold <= 0.0:
            raise ConfigError("low_efficiency_threshold must be > 0")
        if self.high_efficiency_family not in ("uniform", "nonuniform"):
            raise ConfigError(
                f"high_efficiency_family must be uniform or nonuniform, "
                f"got {self.high_efficiency_family!r}")
        ds = self.design_space
        for count in (ds.candidate_count_uniform, ds.candidate_count_nonuniform,
                      ds.candidate_count_exl):
            if count < 1:
                raise ConfigError("candidate counts must be >= 1")

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config root must be an object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        kwargs = dict(data)
        for name, sub in (("rock_base", RockBaseConfig),
                          ("design_space", DesignSpaceConfig),
                          ("exl_screen", ExlScreenConfig),
                          ("base_case", BaseCaseConfig),
                          ("solver", SolverConfig)):
            if name in kwargs:
                kwargs[name] = _build(sub, kwargs[name], name)
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def save(self, path):
        Path(path).write_text(self.dumps(), encoding="utf-8")

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True,
                               separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    # -- factories ----------------------------------------------------------

    def base_rock(self) -> BaseRockProperties:
        rb = self.rock_base
        return BaseRockProperties(
            leakoff_ref=rb.leakoff_ref_m_per_sqrt_s,
            youngs_modulus=rb.youngs_modulus_Pa,
            poisson_ratio=rb.poisson_ratio,
            closure_stress=rb.closure_stress_Pa,
            toughness=rb.toughness_Pa_sqrt_m,
        )

    def uncertainty_model(self) -> UncertaintyModel:
        return UncertaintyModel(level=self.uncertainty_level,
                                master_seed=self.master_seed)

    def family_space(self, family: str) -> DesignSpace:
        ds = self.design_space
        common = dict(
            n_fractures=ds.n_fractures,
            lateral_length=ds.lateral_length_m,
            well_volume=ds.well_volume_m3,
        )
        if family == "uniform":
            return sampling.uniform_family(
                ds.candidate_count_uniform,
                injection_rate_bounds=ds.injection_rate_m3_per_s,
                viscosity_bounds=ds.viscosity_Pa_s,
                stage_length_bounds=ds.stage_length_m,
                perf_loss_bounds=ds.perforation_loss_Pa,
                perf_nominal_cluster_rate=ds.perforation_nominal_rate_m3_per_s,
                **common)
        if family == "nonuniform":
            return sampling.nonuniform_family(
                ds.candidate_count_nonuniform,
                injection_rate_bounds=ds.injection_rate_m3_per_s,
                viscosity_bounds=ds.viscosity_Pa_s,
                stage_length_bounds=ds.stage_length_m,
                spacing_ratio_bounds=ds.spacing_ratio,
                perf_loss_bounds=ds.perforation_loss_Pa,
                perf_nominal_cluster_rate=ds.perforation_nominal_rate_m3_per_s,
                **common)
        if family == "exl":
            ex = self.exl_screen
            return sampling.exl_family(
                ds.candidate_count_exl,
                perf_loss_bounds=ex.perforation_loss_Pa,
                injection_rate=ex.injection_rate_m3_per_s,
                viscosity=ex.viscosity_Pa_s,
                stage_length=ex.stage_length_m,
                **common)
        raise ConfigError(f"unknown family {family!r}")

    def solver_controls(self, record_history: bool = False) -> SolverControls:
        s = self.solver
        return SolverControls(
            dt_initial=s.dt_initial_s,
            dt_growth=s.dt_growth,
            dt_cap_divisor=s.dt_cap_divisor,
            leakoff_time_floor=s.leakoff_time_floor_s,
            viscous_alpha=s.viscous_alpha,
            seed_radius=s.seed_radius_m,
            pressure_rel_tol=s.pressure_rel_tol,
            max_iterations=s.max_iterations,
            max_volume_balance_error=s.max_volume_balance_error,
            record_history=record_history,
        )

    def base_design(self) -> StageDesign:
        bc = self.base_case
        ds = self.design_space
        return StageDesign(
            design_id="base",
            n_fractures=ds.n_fractures,
            stage_length=bc.stage_length_m,
            spacing_ratio=bc.spacing_ratio,
            spacing_mode="uniform" if bc.spacing_ratio == 0.5 else "nonuniform",
            injection_rate=bc.injection_rate_m3_per_s,
            treating_time=sampling.treating_time_for(
                bc.stage_length_m, bc.injection_rate_m3_per_s,
                ds.lateral_length_m, ds.well_volume_m3),
            viscosity=bc.viscosity_Pa_s,
            perf_factor=bc.perforation_factor_Pa_s2_per_m6,
        )


def desk_config(workers: int = 1, master_seed: int = 20260810) -> RunConfig:
    """Desk-scale run: 500 candidates/family, 40 realizations, 2000 mixtures."""
    return RunConfig(
        master_seed=master_seed,
        workers=workers,
        realizations_per_design=40,
        mixture_samples_per_family=2000,
        design_space=DesignSpaceConfig(
            candidate_count_uniform=500,
            candidate_count_nonuniform=500,
            candidate_count_exl=500,
        ),
    )
