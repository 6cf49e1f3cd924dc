"""Compiled numerical kernels for the stage simulator.

Everything here operates on plain float64 scalars/arrays so numba can
compile it; the public API lives in :mod:`fracfolio.fracture` and wraps
these functions. Status codes returned by the solvers:

    0  converged
    1  wellbore-pressure bisection hit the iteration cap
    2  flow-balance correction could not meet its residual target
    3  step-history capacity exceeded (internal sizing bug)
"""

import math

import numpy as np
from numba import njit

SQRT_PI = math.sqrt(math.pi)

# Convergence target for the corrected flow partition, relative to the
# injection rate. Tighter than the wellbore-pressure tolerance because the
# energy/volume audits integrate this residual over every step.
_FLOW_RESIDUAL_RTOL = 1e-9


@njit(cache=True, error_model="numpy")
def flows_at_pressure(p_w, c, a, f, out):
    """Per-fracture inflow at wellbore pressure ``p_w``; returns the total.

    Each fracture obeys p_w = c_i + a_i*Q + f*Q**2 for Q >= 0 and is
    clamped to Q = 0 when its zero-flow threshold c_i exceeds p_w. The
    quadratic is inverted in the cancellation-safe form
    2*(p_w - c) / (a + sqrt(a**2 + 4*f*(p_w - c))), valid for f = 0 too.
    Zero-resistance fractures (a = 0 and f = 0) yield inf above threshold;
    callers must special-case them.
    """
    total = 0.0
    for i in range(c.shape[0]):
        d = p_w - c[i]
        if d <= 0.0:
            out[i] = 0.0
        else:
            out[i] = 2.0 * d / (a[i] + math.sqrt(a[i] * a[i] + 4.0 * f * d))
        total += out[i]
    return total


@njit(cache=True, error_model="numpy")
def solve_partition(q_total, c, a, f, rel_tol, max_iter, q_out):
    """Wellbore pressure and per-fracture flows delivering ``q_total``.

    Bisects sum_i Q_i(p) = q_total over the analytic bracket
    [min_i c_i, min_i(c_i + a_i*q_total + f*q_total**2)], then applies a
    derivative-weighted flow correction so the returned flows sum to
    q_total essentially exactly even where the total-inflow curve is too
    steep for pressure-space iteration (sub-ulp sensitivity at very low
    resistance). Fractures with no resistance at all act as pure
    threshold elements: the pressure pins at the lowest such threshold
    and those fractures absorb the residual flow (split equally on ties).

    Returns (p_w, status).
    """
    n = c.shape[0]

    # Partition into resistive and zero-resistance fractures.
    zero_resistance = f == 0.0
    p_pin = math.inf
    if zero_resistance:
        any_zero = False
        for i in range(n):
            if a[i] == 0.0:
                any_zero = True
                if c[i] < p_pin:
                    p_pin = c[i]
        if not any_zero:
            zero_resistance = False

    if zero_resistance:
        # Flow taken by resistive fractures with the pressure pinned.
        total_r = 0.0
        for i in range(n):
            if a[i] == 0.0:
                q_out[i] = 0.0
            else:
                d = p_pin - c[i]
                if d <= 0.0:
                    q_out[i] = 0.0
                else:
                    q_out[i] = 2.0 * d / (a[i] + math.sqrt(a[i] * a[i] + 4.0 * f * d))
                total_r += q_out[i]
        if total_r < q_total:
            residual = q_total - total_r
            ties = 0
            for i in range(n):
                if a[i] == 0.0 and c[i] == p_pin:
                    ties += 1
            for i in range(n):
                if a[i] == 0.0 and c[i] == p_pin:
                    q_out[i] = residual / ties
            return p_pin, 0
        # Resistive fractures alone exceed the target below the pinned
        # pressure; solve among them with the pin as the upper bracket.

    p_lo = math.inf
    p_hi = math.inf
    for i in range(n):
        if a[i] == 0.0 and zero_resistance:
            continue
        if c[i] < p_lo:
            p_lo = c[i]
        cand = c[i] + a[i] * q_total + f * q_total * q_total
        if cand < p_hi:
            p_hi = cand
    if zero_resistance and p_pin < p_hi:
        p_hi = p_pin

    # Mask zero-resistance fractures out of the bisection by treating them
    # as clamped (their thresholds sit at or above p_hi by construction).
    p_w = 0.5 * (p_lo + p_hi)
    converged = False
    for _ in range(max_iter):
        width = p_hi - p_lo
        scale = abs(p_hi)
        if abs(p_lo) > scale:
            scale = abs(p_lo)
        if width <= 4.0 * 2.220446049250313e-16 * scale:
            converged = True
            break
        p_w = 0.5 * (p_lo + p_hi)
        g = flows_at_pressure(p_w, c, a, f, q_out) - q_total
        if abs(g) <= rel_tol * q_total:
            converged = True
            break
        if g < 0.0:
            p_lo = p_w
        else:
            p_hi = p_w
    if not converged:
        return p_w, 1

    flows_at_pressure(p_w, c, a, f, q_out)

    # Newton correction in flow space: distribute the residual according
    # to each active fracture's conductance dQ/dp = 1/sqrt(a^2 + 4 f d).
    for _ in range(4):
        total = 0.0
        for i in range(n):
            total += q_out[i]
        residual = q_total - total
        if abs(residual) <= _FLOW_RESIDUAL_RTOL * q_total:
            return p_w, 0
        gsum = 0.0
        for i in range(n):
            d = p_w - c[i]
            if d > 0.0:
                gsum += 1.0 / math.sqrt(a[i] * a[i] + 4.0 * f * d)
        if gsum == 0.0:
            break
        for i in range(n):
            d = p_w - c[i]
            if d > 0.0:
                gi = 1.0 / math.sqrt(a[i] * a[i] + 4.0 * f * d)
                q_new = q_out[i] + residual * gi / gsum
                q_out[i] = q_new if q_new > 0.0 else 0.0

    total = 0.0
    for i in range(n):
        total += q_out[i]
    if abs(total - q_total) > 1e-6 * q_total:
        return p_w, 2
    return p_w, 0


@njit(cache=True, error_model="numpy")
def interaction_stresses(net_pressures, radii, dist, out):
    """Stress-shadow load on each fracture from all of its neighbours.

    Kernel: p_net_j / (1 + (s_ij / R_j)^3), saturating at p_net_j for
    s -> 0 and decaying like (R/s)^3 far away. Contributions are summed
    in sorted order so mirror-symmetric stages stay bitwise symmetric.
    """
    n = radii.shape[0]
    contrib = np.empty(n - 1 if n > 1 else 1, dtype=np.float64)
    for i in range(n):
        m = 0
        for j in range(n):
            if j == i:
                continue
            rj = radii[j]
            if rj <= 0.0:
                continue
            ratio = dist[i, j] / rj
            contrib[m] = net_pressures[j] / (1.0 + ratio * ratio * ratio)
            m += 1
        if m > 1:
            contrib[:m].sort()
        s = 0.0
        for k in range(m):
            s += contrib[k]
        out[i] = s


@njit(cache=True, error_model="numpy")
def simulate_core(dist, sigma, kic, e_prime, leakoff, q_total, t_end, mu, f,
                  alpha, seed_radius, dt0, dt_growth, dt_cap, t_floor,
                  p_rtol, max_iter,
                  radius, volume, leaked, energy,
                  record, hist_t, hist_pw, hist_q, hist_r):
    """Time-step a full stage treatment; fills the state arrays in place.

    Returns (wellhead_energy, injected_volume, n_steps, status) where
    wellhead_energy is the independently accumulated integral of
    p_w * q_total dt and injected_volume the accumulated q_total * dt.
    """
    n = sigma.shape[0]
    p_net = np.empty(n, dtype=np.float64)
    s_int = np.empty(n, dtype=np.float64)
    c = np.empty(n, dtype=np.float64)
    a = np.empty(n, dtype=np.float64)
    q = np.empty(n, dtype=np.float64)

    k_stiff = 3.0 * e_prime / 16.0
    max_steps = hist_t.shape[0]

    for i in range(n):
        radius[i] = seed_radius
        volume[i] = 0.0
        leaked[i] = 0.0
        energy[i] = 0.0

    wellhead_energy = 0.0
    injected = 0.0
    t = 0.0
    dt = dt0
    steps = 0
    while t < t_end * (1.0 - 1e-12):
        if steps >= max_steps:
            return wellhead_energy, injected, steps, 3
        dt_k = dt
        if dt_cap < dt_k:
            dt_k = dt_cap
        if t_end - t < dt_k:
            dt_k = t_end - t

        for i in range(n):
            r3 = radius[i] * radius[i] * radius[i]
            p_stiff = k_stiff * volume[i] / r3
            p_prop = kic[i] * SQRT_PI / (2.0 * math.sqrt(radius[i]))
            p_net[i] = p_stiff if p_stiff < p_prop else p_prop
        interaction_stresses(p_net, radius, dist, s_int)
        for i in range(n):
            c[i] = sigma[i] + s_int[i] + p_net[i]
            a[i] = alpha * mu / (radius[i] * radius[i] * radius[i])

        p_w, status = solve_partition(q_total, c, a, f, p_rtol, max_iter, q)
        if status != 0:
            return wellhead_energy, injected, steps, status

        wellhead_energy += p_w * q_total * dt_k
        injected += q_total * dt_k
        t_exposure = t if t > t_floor else t_floor
        leak_scale = 2.0 * leakoff * math.pi / math.sqrt(t_exposure)
        for i in range(n):
            energy[i] += p_w * q[i] * dt_k
            inflow = q[i] * dt_k
            avail = volume[i] + inflow
            lk = leak_scale * radius[i] * radius[i] * dt_k
            if lk > avail:
                lk = avail
            volume[i] = avail - lk
            leaked[i] += lk
            r_cand = (3.0 * e_prime * volume[i] / (8.0 * SQRT_PI * kic[i])) ** 0.4
            if r_cand > radius[i]:
                radius[i] = r_cand

        if record:
            hist_t[steps] = t + dt_k
            hist_pw[steps] = p_w
            for i in range(n):
                hist_q[steps, i] = q[i]
                hist_r[steps, i] = radius[i]

        t += dt_k
        dt *= dt_growth
        steps += 1

    return wellhead_energy, injected, steps, 0
