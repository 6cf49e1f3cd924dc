"""Reduced-order simulator for simultaneous radial hydraulic fractures.

A stage holds N penny-shaped fractures fed from a shared wellbore. Each
fracture grows in the toughness-dominated regime (tip stress intensity
pinned at K_IC while growing), takes flow according to a pressure balance

    p_w = sigma_closure + sigma_interaction + p_net
          + alpha * mu * Q / R^3   (lumped in-fracture viscous drop)
          + f * Q^2                (perforation entry loss)

with a no-backflow clamp Q >= 0, loses fluid through Carter leak-off on
both faces, and loads its neighbours through a cube-decay stress-shadow
kernel. The wellbore pressure is the value at which the clamped flows
sum to the injection rate.

All solvers are deterministic: identical inputs produce bit-identical
outputs, and mirror-symmetric stages stay exactly symmetric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels, metrics
from .errors import DomainError, SimulationFailure, SolverError

SQRT_PI = math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# Domain types


@dataclass(frozen=True)
class StageDesign:
    """One candidate stimulation design for a single stage.

    Units: stage_length m, injection_rate m^3/s, treating_time s,
    viscosity Pa*s, perf_factor Pa*s^2/m^6.
    """

    design_id: str
    n_fractures: int
    stage_length: float
    spacing_ratio: float
    spacing_mode: str
    injection_rate: float
    treating_time: float
    viscosity: float
    perf_factor: float

    def __post_init__(self):
        if self.n_fractures < 1:
            raise DomainError(f"n_fractures must be >= 1, got {self.n_fractures}")
        for name in ("stage_length", "injection_rate", "treating_time"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be > 0")
        if self.viscosity < 0.0 or self.perf_factor < 0.0:
            raise DomainError("viscosity and perf_factor must be >= 0")
        if self.spacing_mode not in ("uniform", "nonuniform"):
            raise DomainError(f"unknown spacing_mode {self.spacing_mode!r}")
        if self.spacing_mode == "uniform" and self.spacing_ratio != 0.5:
            raise DomainError("uniform spacing requires spacing_ratio = 0.5")
        if not 0.0 < self.spacing_ratio <= 0.5:
            raise DomainError("spacing_ratio must lie in (0, 0.5]")

    @property
    def injected_volume(self) -> float:
        """Total slurry volume pumped into the stage, m^3."""
        return self.injection_rate * self.treating_time

    def spacings(self) -> list[float]:
        return stage_spacings(self.n_fractures, self.spacing_ratio, self.stage_length)

    def positions(self) -> list[float]:
        return cluster_positions(self.spacings())


@dataclass(frozen=True)
class RockRealization:
    """One stochastic draw of rock and stress properties.

    Young's modulus, Poisson ratio and the (viscosity-scaled) leak-off
    coefficient are per-well; closure stress and toughness are per
    cluster. Units: Pa, -, m/s^0.5, Pa, Pa*m^0.5.
    """

    realization_id: str
    seed: int
    youngs_modulus: float
    poisson_ratio: float
    leakoff: float
    closure_stress: tuple[float, ...]
    toughness: tuple[float, ...]

    def __post_init__(self):
        if not 0.0 < self.poisson_ratio < 0.5:
            raise DomainError("poisson_ratio must lie in (0, 0.5)")
        if self.youngs_modulus <= 0.0 or self.leakoff < 0.0:
            raise DomainError("youngs_modulus must be > 0 and leakoff >= 0")
        if len(self.closure_stress) != len(self.toughness):
            raise DomainError("closure_stress and toughness lengths differ")
        if any(s <= 0.0 for s in self.closure_stress):
            raise DomainError("closure stresses must be > 0")
        if any(k <= 0.0 for k in self.toughness):
            raise DomainError("toughnesses must be > 0")

    @property
    def n_clusters(self) -> int:
        return len(self.closure_stress)

    @property
    def plane_strain(self) -> float:
        return plane_strain_modulus(self.youngs_modulus, self.poisson_ratio)


@dataclass
class FractureState:
    """Instantaneous state of one fracture during a treatment."""

    radius: float
    volume: float
    leaked_volume: float
    energy_in: float
    inflow: float
    net_pressure: float
    growing: bool


@dataclass(frozen=True)
class StepHistory:
    """Per-step record of a simulation (only kept on request)."""

    times: np.ndarray          # (steps,)  end-of-step time, s
    wellbore_pressure: np.ndarray  # (steps,)  Pa
    inflows: np.ndarray        # (steps, n)  m^3/s
    radii: np.ndarray          # (steps, n)  m


@dataclass(frozen=True)
class StageOutcome:
    """Final result of simulating one (design, realization) pair."""

    design_id: str
    realization_id: str
    final_radii: tuple[float, ...]
    per_cluster_energy: tuple[float, ...]
    total_energy: float
    per_cluster_efficiency: tuple[float, ...]
    stage_efficiency: float
    volume_balance_error: float
    energy_balance_error: float
    history: StepHistory | None = None


@dataclass(frozen=True)
class SolverControls:
    """Numerical policy for :func:`simulate_stage`."""

    dt_initial: float = 0.1          # s; first time step
    dt_growth: float = 1.08          # geometric step-growth ratio
    dt_cap_divisor: float = 500.0    # cap dt at treating_time / divisor
    leakoff_time_floor: float = 1.0  # s; regularizes the t = 0 leak singularity
    viscous_alpha: float = 50.0      # lumped in-fracture resistance constant
    seed_radius: float = 0.1         # m; initial fracture radius
    pressure_rel_tol: float = 1e-8   # wellbore-pressure flow-balance tolerance
    max_iterations: int = 200        # bisection cap (hard error beyond)
    max_volume_balance_error: float = 0.005
    record_history: bool = False

    def __post_init__(self):
        if self.dt_initial <= 0 or self.dt_growth < 1.0 or self.dt_cap_divisor <= 0:
            raise DomainError("invalid time-step policy")
        if self.seed_radius <= 0:
            raise DomainError("seed_radius must be > 0")


# ---------------------------------------------------------------------------
# Stage geometry


def stage_spacings(n_fractures: int, spacing_ratio: float, stage_length: float) -> list[float]:
    """Cluster-to-cluster spacings for a symmetric stage; sums to the stage length.

    For five clusters the outer spacings are h1 = spacing_ratio * Z / 2
    (so ratio 0.5 is uniform and 0.25 makes the outer gaps three times
    tighter than the inner ones); other cluster counts support uniform
    spacing only.
    """
    if n_fractures < 1:
        raise DomainError("n_fractures must be >= 1")
    if n_fractures == 1:
        return []
    if n_fractures == 5:
        h1 = spacing_ratio * stage_length / 2.0
        h2 = (stage_length - 2.0 * h1) / 2.0
        if h2 <= 0.0:
            raise DomainError("spacing_ratio leaves no room for inner clusters")
        return [h1, h2, h2, h1]
    if spacing_ratio != 0.5:
        raise DomainError("non-uniform spacing is only defined for 5 clusters")
    h = stage_length / (n_fractures - 1)
    return [h] * (n_fractures - 1)


def cluster_positions(spacings: list[float]) -> list[float]:
    """Cluster coordinates along the well, centered on the stage midpoint.

    Palindromic spacing lists produce exactly antisymmetric coordinates
    (x_i == -x_{n-1-i} bitwise) so that mirror-symmetric stages remain
    symmetric to the last ulp through the whole simulation.
    """
    n = len(spacings) + 1
    if n == 1:
        return [0.0]
    if spacings != spacings[::-1]:
        pos = [0.0]
        for h in spacings:
            pos.append(pos[-1] + h)
        return pos
    pos = [0.0] * n
    if n % 2 == 1:
        mid = n // 2
        pos[mid] = 0.0
        for k in range(mid + 1, n):
            pos[k] = pos[k - 1] + spacings[k - 1]
    else:
        mid = n // 2
        pos[mid] = spacings[mid - 1] / 2.0
        for k in range(mid + 1, n):
            pos[k] = pos[k - 1] + spacings[k - 1]
    for i in range(n // 2):
        pos[i] = -pos[n - 1 - i]
    return pos


# ---------------------------------------------------------------------------
# Elementary physical relations


def plane_strain_modulus(youngs_modulus: float, poisson_ratio: float) -> float:
    """E' = E / (1 - nu^2), Pa."""
    if not 0.0 <= poisson_ratio < 0.5:
        raise DomainError(f"poisson_ratio {poisson_ratio} outside [0, 0.5)")
    if youngs_modulus <= 0.0:
        raise DomainError("youngs_modulus must be > 0")
    return youngs_modulus / (1.0 - poisson_ratio * poisson_ratio)


def penny_pressure_at_propagation(radius: float, toughness: float) -> float:
    """Net pressure holding a penny crack exactly at its propagation criterion.

    From K_I = 2 p_net sqrt(R / pi) = K_IC: p_net = K_IC sqrt(pi) / (2 sqrt(R)).
    Strictly decreasing in R.
    """
    if radius <= 0.0:
        raise DomainError("radius must be > 0")
    return toughness * SQRT_PI / (2.0 * math.sqrt(radius))


def penny_volume(radius: float, net_pressure: float, plane_strain: float) -> float:
    """Volume of a uniformly pressurized penny crack: 16 p R^3 / (3 E')."""
    if radius <= 0.0 or plane_strain <= 0.0 or net_pressure < 0.0:
        raise DomainError("penny_volume needs radius, E' > 0 and p_net >= 0")
    return 16.0 * net_pressure * radius ** 3 / (3.0 * plane_strain)


def radius_from_volume_k(volume: float, toughness: float, plane_strain: float) -> float:
    """Radius of a penny crack holding ``volume`` at the propagation criterion.

    Closure of the two relations above: R = (3 E' V / (8 sqrt(pi) K_IC))^(2/5).
    Strictly increasing in V with R(0) = 0.
    """
    if volume < 0.0:
        raise DomainError("volume must be >= 0")
    if toughness <= 0.0 or plane_strain <= 0.0:
        raise DomainError("toughness and E' must be > 0")
    return (3.0 * plane_strain * volume / (8.0 * SQRT_PI * toughness)) ** 0.4


def perforation_drop(perf_factor: float, flow: float) -> float:
    """Perforation entry loss f * Q^2, Pa."""
    if flow < 0.0:
        raise DomainError("no backflow: flow must be >= 0")
    if perf_factor < 0.0:
        raise DomainError("perf_factor must be >= 0")
    return perf_factor * flow * flow


def viscous_drop(viscosity: float, flow: float, radius: float, alpha: float) -> float:
    """Lumped in-fracture viscous resistance alpha * mu * Q / R^3, Pa."""
    if radius <= 0.0:
        raise DomainError("radius must be > 0")
    if flow < 0.0:
        raise DomainError("no backflow: flow must be >= 0")
    return alpha * viscosity * flow / radius ** 3


def leak_rate(leakoff: float, radius: float, t: float, t_floor: float = 1.0) -> float:
    """Carter leak-off rate over both fracture faces, m^3/s.

    2 C_L pi R^2 / sqrt(max(t, t_floor)); the floor regularizes t = 0.
    """
    return 2.0 * leakoff * math.pi * radius * radius / math.sqrt(max(t, t_floor))


def interaction_stress(target_index: int, states: list[FractureState],
                       positions: list[float]) -> float:
    """Stress-shadow load on one fracture from all of its neighbours.

    sigma_int_i = sum_{j != i} p_net_j / (1 + (s_ij / R_j)^3); saturates at
    p_net_j as the spacing s_ij -> 0 and decays like (R_j / s_ij)^3 far
    away. Fractures with zero radius contribute nothing.
    """
    n = len(states)
    if not 0 <= target_index < n:
        raise IndexError(f"target_index {target_index} out of range for {n} fractures")
    if len(positions) != n:
        raise DomainError("positions length must match states")
    contribs = []
    xi = positions[target_index]
    for j, st in enumerate(states):
        if j == target_index or st.radius <= 0.0:
            continue
        ratio = abs(xi - positions[j]) / st.radius
        contribs.append(st.net_pressure / (1.0 + ratio ** 3))
    return sum(sorted(contribs))


# ---------------------------------------------------------------------------
# Flow partition and wellbore pressure


def _partition_coefficients(design: StageDesign, rock: RockRealization,
                            states: list[FractureState],
                            controls: SolverControls) -> tuple[np.ndarray, np.ndarray]:
    n = design.n_fractures
    if len(states) != n or rock.n_clusters != n:
        raise DomainError("states/rock cluster counts must match the design")
    positions = design.positions()
    p_net = np.array([s.net_pressure for s in states])
    radii = np.array([s.radius for s in states])
    if np.any(radii <= 0.0):
        raise DomainError("all fracture radii must be > 0")
    dist = np.abs(np.subtract.outer(np.asarray(positions), np.asarray(positions)))
    s_int = np.empty(n)
    _kernels.interaction_stresses(p_net, radii, dist, s_int)
    c = np.asarray(rock.closure_stress, dtype=float) + s_int + p_net
    a = controls.viscous_alpha * design.viscosity / radii ** 3
    return c, a


def solve_flow_partition(p_w: float, design: StageDesign, rock: RockRealization,
                         states: list[FractureState],
                         controls: SolverControls = SolverControls()) -> list[float]:
    """Per-fracture inflows at a prescribed wellbore pressure.

    Each flow satisfies p_w = c_i + viscous + perforation drop exactly
    (closed-form inversion of the quadratic), with the check-valve clamp
    Q_i = 0 whenever the zero-flow threshold c_i exceeds p_w.
    """
    if p_w < 0.0:
        raise DomainError("wellbore pressure must be >= 0")
    c, a = _partition_coefficients(design, rock, states, controls)
    q = np.empty(design.n_fractures)
    _kernels.flows_at_pressure(p_w, c, a, design.perf_factor, q)
    if not np.all(np.isfinite(q)):
        raise DomainError("fracture with no flow resistance above its threshold; "
                          "flow is unbounded at this pressure")
    return q.tolist()


def solve_wellbore_pressure(design: StageDesign, rock: RockRealization,
                            states: list[FractureState],
                            controls: SolverControls = SolverControls()) -> float:
    """Wellbore pressure at which the clamped inflows sum to the injection rate.

    Total inflow is continuous and nondecreasing in p_w, so bisection over
    the analytic bracket always converges; zero-resistance fractures pin
    the pressure at their threshold exactly.
    """
    if design.injection_rate <= 0.0:
        raise DomainError("injection_rate must be > 0")
    c, a = _partition_coefficients(design, rock, states, controls)
    q = np.empty(design.n_fractures)
    p_w, status = _kernels.solve_partition(
        design.injection_rate, c, a, design.perf_factor,
        controls.pressure_rel_tol, controls.max_iterations, q)
    if status != 0:
        raise SolverError(f"wellbore pressure solve failed (status {status})",
                          design.design_id, rock.realization_id)
    return float(p_w)


# ---------------------------------------------------------------------------
# Stage simulation


def _max_steps(treating_time: float, controls: SolverControls) -> int:
    dt_cap = treating_time / controls.dt_cap_divisor
    ramp = 0
    if dt_cap > controls.dt_initial and controls.dt_growth > 1.0:
        ramp = int(math.ceil(math.log(dt_cap / controls.dt_initial)
                             / math.log(controls.dt_growth)))
    return ramp + int(math.ceil(controls.dt_cap_divisor)) + 16


def simulate_stage(design: StageDesign, rock: RockRealization,
                   controls: SolverControls = SolverControls()) -> StageOutcome:
    """Run one full stage treatment and return its outcome.

    Time-steps from 0 to the treating time with geometric step growth.
    Every step solves the wellbore pressure and flow partition, advances
    fracture volumes (inflow minus Carter leak-off), grows each radius to
    the toughness-criterion value whenever the stored volume supports it
    (radii never recede), and meters per-cluster energy at the wellbore
    side of the perforations (W_i += p_w Q_i dt).

    A cluster that never received any flow keeps the seed radius, zero
    energy, and reports per-cluster efficiency 0. Volume-balance
    violations beyond the configured limit raise SimulationFailure.
    """
    n = design.n_fractures
    if rock.n_clusters != n:
        raise DomainError(f"realization has {rock.n_clusters} clusters, design needs {n}")

    positions = np.asarray(design.positions())
    dist = np.abs(np.subtract.outer(positions, positions))
    sigma = np.asarray(rock.closure_stress, dtype=float)
    kic = np.asarray(rock.toughness, dtype=float)
    e_prime = rock.plane_strain
    t_end = design.treating_time
    dt_cap = t_end / controls.dt_cap_divisor

    cap = _max_steps(t_end, controls)
    radius = np.empty(n)
    volume = np.empty(n)
    leaked = np.empty(n)
    energy = np.empty(n)
    hist_t = np.empty(cap)
    if controls.record_history:
        hist_pw = np.empty(cap)
        hist_q = np.empty((cap, n))
        hist_r = np.empty((cap, n))
    else:
        hist_pw = np.empty(1)
        hist_q = np.empty((1, 1))
        hist_r = np.empty((1, 1))

    wellhead_energy, injected, steps, status = _kernels.simulate_core(
        dist, sigma, kic, e_prime, rock.leakoff, design.injection_rate,
        t_end, design.viscosity, design.perf_factor, controls.viscous_alpha,
        controls.seed_radius, controls.dt_initial, controls.dt_growth,
        dt_cap, controls.leakoff_time_floor, controls.pressure_rel_tol,
        controls.max_iterations, radius, volume, leaked, energy,
        controls.record_history, hist_t, hist_pw, hist_q, hist_r)
    if status == 1:
        raise SolverError("wellbore pressure bisection hit the iteration cap",
                          design.design_id, rock.realization_id)
    if status == 2:
        raise SolverError("flow partition failed to balance the injection rate",
                          design.design_id, rock.realization_id)
    if status == 3:
        raise SolverError("step capacity exceeded (time-step policy bug)",
                          design.design_id, rock.realization_id)

    pumped = design.injected_volume
    vol_err = abs(pumped - float(np.sum(volume) + np.sum(leaked))) / pumped
    total_energy = float(np.sum(energy))
    energy_err = abs(total_energy - wellhead_energy) / wellhead_energy

    if vol_err > controls.max_volume_balance_error:
        raise SimulationFailure(
            f"volume balance error {vol_err:.3e} exceeds "
            f"{controls.max_volume_balance_error:.3e}",
            design.design_id, rock.realization_id)

    effs = []
    for i in range(n):
        if energy[i] > 0.0:
            factor = metrics.crack_energy_factor(
                kic[i], rock.youngs_modulus, rock.poisson_ratio)
            effs.append(factor * radius[i] ** 2 / energy[i])
        elif radius[i] <= controls.seed_radius:
            effs.append(0.0)  # never received flow, never grew
        else:
            raise SimulationFailure(
                f"cluster {i} grew to {radius[i]:.3f} m with zero input energy",
                design.design_id, rock.realization_id)
    stage_eff = metrics.stage_efficiency(radius.tolist(), rock, total_energy)

    history = None
    if controls.record_history:
        history = StepHistory(
            times=hist_t[:steps].copy(),
            wellbore_pressure=hist_pw[:steps].copy(),
            inflows=hist_q[:steps].copy(),
            radii=hist_r[:steps].copy(),
        )

    return StageOutcome(
        design_id=design.design_id,
        realization_id=rock.realization_id,
        final_radii=tuple(float(r) for r in radius),
        per_cluster_energy=tuple(float(w) for w in energy),
        total_energy=total_energy,
        per_cluster_efficiency=tuple(effs),
        stage_efficiency=stage_eff,
        volume_balance_error=vol_err,
        energy_balance_error=energy_err,
        history=history,
    )
