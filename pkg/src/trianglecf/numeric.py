"""Float-lane dynamics for the large Monte Carlo experiments.

Exact arithmetic drives every identity check in this library; this module
exists for the statistics (Borel window scans, equidistribution, Birkhoff
averages, induced-map derivatives) where millions of steps are needed and
measure-zero misclassification at cylinder boundaries is harmless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import NumberField
from .dynamics import eps0
from .planar import acceleration_fiber_top, build_gamma, mu_gamma, mu_rect


@dataclass
class FloatSystem:
    """Float shadows of the constants the maps branch on."""

    n: int
    tau: float
    eps0: float
    y_left: float          # 1/(1 - 2 tau), left endpoint of the return set Y
    acc_top: float         # tau/(tau^2 + 1)

    @staticmethod
    def for_field(field: NumberField) -> "FloatSystem":
        return FloatSystem(
            n=field.n,
            tau=float(field.tau),
            eps0=float(eps0(field)),
            y_left=float((1 - 2 * field.tau).inverse()),
            acc_top=float(acceleration_fiber_top(field)),
        )


def sample_interval(fs: FloatSystem, rng, count: int) -> np.ndarray:
    u = rng.random(count)
    u = np.clip(u, 1e-12, 1.0 - 1e-12)
    return -fs.tau * u


def step_tv(fs: FloatSystem, t: np.ndarray, v: np.ndarray):
    """One vectorized accelerated step of (t, v); returns (t', v', digit)."""
    tau = fs.tau
    acc = t < fs.eps0
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_t = 1.0 / t
        k = np.floor((1.0 - inv_t) / tau) + 1.0
        k = np.maximum(k, 1.0)
        t_pos = 1.0 - k * tau - inv_t
        v_pos = -1.0 / (v + 1.0 - k * tau)

        u = t + tau
        u = np.maximum(u, 1e-300)
        jj = np.ceil(-1.0 / tau ** 2 + 1.0 / (tau * u)) - 1.0
        jj = np.maximum(jj, 1.0)
        t_acc = u / (1.0 - jj * tau * u) - tau
        v_acc = ((1.0 - jj * tau ** 2) * v + jj * tau) / (
            -jj * tau ** 3 * v + 1.0 + jj * tau ** 2
        )
    t_new = np.where(acc, t_acc, t_pos)
    v_new = np.where(acc, v_acc, v_pos)
    digit = np.where(acc, -jj, k)
    # keep strictly inside [-tau, 0) against rounding
    t_new = np.minimum(t_new, -1e-300)
    t_new = np.maximum(t_new, -tau)
    return t_new, v_new, digit


def step_scalar(fs: FloatSystem, t: float, v: float):
    """Scalar float step; raises PrecisionExhausted on a boundary collision
    (landing within 1e-14 of a branch point, where a double cannot decide
    the next digit reliably)."""
    from .errors import PrecisionExhausted

    tau = fs.tau
    if t < fs.eps0:
        u = t + tau
        if u < 1e-300:
            raise PrecisionExhausted(
                "float orbit reached the parabolic fixed point", boundary=-tau
            )
        j = math.ceil(-1.0 / tau ** 2 + 1.0 / (tau * u)) - 1.0
        if j < 1.0:
            j = 1.0
        t_new = u / (1.0 - j * tau * u) - tau
        v_new = ((1.0 - j * tau ** 2) * v + j * tau) / (
            -j * tau ** 3 * v + 1.0 + j * tau ** 2
        )
        digit = -j
    else:
        k = math.floor((1.0 - 1.0 / t) / tau) + 1.0
        if k < 1.0:
            k = 1.0
        t_new = 1.0 - k * tau - 1.0 / t
        v_new = -1.0 / (v + 1.0 - k * tau)
        digit = k
    if t_new > -1e-14:
        raise PrecisionExhausted(
            "float orbit landed on a cylinder boundary", boundary=t_new
        )
    if t_new < -tau:
        t_new = -tau
    return t_new, v_new, digit


def derivative_factor(fs: FloatSystem, t: float, digit: float) -> float:
    """|branch'(t)|: 1/t^2 on continued-fraction branches, the W^j formula
    on acceleration branches."""
    if digit >= 1.0:
        return 1.0 / (t * t)
    j = -digit
    u = t + fs.tau
    den = 1.0 - j * fs.tau * u
    return 1.0 / (den * den)


def borel_scan(
    field: NumberField,
    samples: int,
    steps: int,
    seed: int,
    tol: float = 1e-10,
) -> dict:
    """Window minima and run lengths of the Theta sequence over random orbits.

    Checks min{Theta_{m-1}, ..., Theta_{m+n-1}} <= tau + tol for every m and
    reports the longest observed run of consecutive Theta > tau.
    """
    fs = FloatSystem.for_field(field)
    n = fs.n
    rng = np.random.default_rng(seed)
    t = sample_interval(fs, rng, samples)
    v = np.zeros(samples)
    window = np.empty((n + 1, samples))
    window[0] = np.abs(t / (1.0 + t * v))  # Theta_0 = |x|
    run = (window[0] > fs.tau).astype(np.int64)
    max_run = int(run.max()) if samples else 0
    violations = 0
    max_window_min = 0.0
    worst_m = None
    for m in range(1, steps + 1):
        t, v, _ = step_tv(fs, t, v)
        theta = np.abs(t / (1.0 + t * v))
        window[m % (n + 1)] = theta
        run = np.where(theta > fs.tau, run + 1, 0)
        mr = int(run.max())
        if mr > max_run:
            max_run = mr
        if m >= n:
            wmin = window.min(axis=0)
            wm = float(wmin.max())
            if wm > max_window_min:
                max_window_min = wm
                worst_m = m - n + 1
            violations += int(np.count_nonzero(wmin > fs.tau + tol))
    return {
        "n": n,
        "samples": samples,
        "steps": steps,
        "seed": seed,
        "tolerance": tol,
        "violations": violations,
        "max_window_min": max_window_min,
        "worst_window_at": worst_m,
        "max_theta_run": max_run,
        "tau": fs.tau,
    }


def convergence_scan(
    field: NumberField,
    samples: int,
    steps: int,
    seed: int,
    target: float = 1e-10,
) -> dict:
    """Approximant convergence statistics along random orbits.

    |x - p_m/q_m| = Theta_m / q_m^2 is evaluated through log q_m (the q_m
    overflow doubles), so the convergence threshold is exact in log space.
    """
    fs = FloatSystem.for_field(field)
    rng = np.random.default_rng(seed)
    t = sample_interval(fs, rng, samples)
    v = np.zeros(samples)
    log_q = np.zeros(samples)
    converged_at = np.full(samples, -1, dtype=np.int64)
    max_v = 0.0
    min_one_plus_tv = np.inf
    min_margin_pos = np.inf      # 1 - |t v| over continued-fraction steps
    max_ratio_acc = 0.0          # |t v| over acceleration steps, bounded by 1
    v_above_one = 0
    log_target = math.log(target)
    for m in range(1, steps + 1):
        t, v, digit = step_tv(fs, t, v)
        theta = np.abs(t / (1.0 + t * v))
        log_q = log_q - np.log(np.abs(v))
        err_log = np.log(theta) - 2.0 * log_q
        hit = (err_log < log_target) & (converged_at < 0)
        converged_at[hit] = m
        max_v = max(max_v, float(v.max()))
        min_one_plus_tv = min(min_one_plus_tv, float((1.0 + t * v).min()))
        pos = digit >= 1.0
        if np.any(pos):
            margin = 1.0 - np.abs(t[pos] * v[pos])
            min_margin_pos = min(min_margin_pos, float(margin.min()))
        if not np.all(pos):
            ratios = np.abs(t[~pos] * v[~pos])
            max_ratio_acc = max(max_ratio_acc, float(ratios.max()))
        v_above_one += int(np.count_nonzero(v > 1.0))
    return {
        "n": fs.n,
        "samples": samples,
        "steps": steps,
        "seed": seed,
        "target": target,
        "all_converged": bool(np.all(converged_at > 0)),
        "max_steps_to_converge": int(converged_at.max()),
        "max_v": max_v,
        "min_one_plus_tv": min_one_plus_tv,
        "delta": min_margin_pos,
        "max_acceleration_ratio": max_ratio_acc,
        "v_above_one_count": v_above_one,
        "tau": fs.tau,
    }


def orbit_tv_arrays(field: NumberField, steps: int, seed: int, x0: float = None):
    """A single (t, v) orbit of (x, 0), stored densely for statistics."""
    fs = FloatSystem.for_field(field)
    if x0 is None:
        rng = np.random.default_rng(seed)
        x0 = float(sample_interval(fs, rng, 1)[0])
    ts = np.empty(steps)
    vs = np.empty(steps)
    t, v = x0, 0.0
    step = step_scalar
    for i in range(steps):
        t, v, _ = step(fs, t, v)
        ts[i] = t
        vs[i] = v
    return ts, vs


def digit_matrix_batch(field: NumberField, samples: int, length: int, seed: int) -> np.ndarray:
    """Digit words of random orbits, shape (length, samples)."""
    fs = FloatSystem.for_field(field)
    rng = np.random.default_rng(seed)
    t = sample_interval(fs, rng, samples)
    v = np.zeros(samples)
    out = np.empty((length, samples), dtype=np.int64)
    for i in range(length):
        t, v, digit = step_tv(fs, t, v)
        out[i] = digit.astype(np.int64)
    return out


def build_cells(field: NumberField, target_cells: int = 100):
    """Partition Gamma into ~target_cells sub-rectangles, weighted by mass."""
    rects = build_gamma(field).rects()
    masses = [mu_rect(r) for r in rects]
    total = sum(masses)
    counts = [max(1, round(target_cells * m / total)) for m in masses]
    while sum(counts) > target_cells:
        counts[counts.index(max(counts))] -= 1
    while sum(counts) < target_cells:
        counts[counts.index(max(counts))] += 1
    cells = []
    for r, parts in zip(rects, counts):
        x_lo, x_hi = r.x_lo, r.x_hi
        width = x_hi - x_lo
        for i in range(parts):
            a = x_lo + width * i / parts if i else x_lo
            b = x_lo + width * (i + 1) / parts if i + 1 < parts else x_hi
            from .planar import Rect

            sub = Rect(a, b, r.y_lo, r.y_hi)
            cells.append(
                {
                    "x_lo": float(a),
                    "x_hi": float(b),
                    "y_lo": float(r.y_lo),
                    "y_hi": float(r.y_hi),
                    "mass": mu_rect(sub),
                }
            )
    return cells


def uniform_distribution_experiment(
    field: NumberField,
    steps: int,
    cells: int = 100,
    seed: int = 1,
    x0: float = None,
    checkpoints=None,
) -> dict:
    """Empirical cell frequencies of the (t, v) orbit against mu(cell)/mu(Gamma),
    reported at intermediate checkpoints to show decay."""
    cell_list = build_cells(field, cells)
    ts, vs = orbit_tv_arrays(field, steps, seed, x0)
    mg = mu_gamma(field)
    if checkpoints is None:
        checkpoints = (steps // 2, steps)
    checkpoints = sorted({min(c, steps) for c in checkpoints})

    def discrepancy(upto: int) -> float:
        worst = 0.0
        for c in cell_list:
            inside = (
                (ts[:upto] >= c["x_lo"])
                & (ts[:upto] < c["x_hi"])
                & (vs[:upto] >= c["y_lo"])
                & (vs[:upto] <= c["y_hi"])
            )
            freq = float(np.count_nonzero(inside)) / upto
            worst = max(worst, abs(freq - c["mass"] / mg))
        return worst

    discrepancies = {c: discrepancy(c) for c in checkpoints}
    d_first = discrepancies[checkpoints[0]]
    d_full = discrepancies[checkpoints[-1]]
    outside = int(
        np.count_nonzero(
            ~((ts >= -float(field.tau)) & (ts < 0.0) & (vs >= 0.0) & (vs <= float(field.tau) + 1e-12))
        )
    )
    return {
        "n": field.n,
        "N": steps,
        "cells": len(cell_list),
        "seed": seed,
        "checkpoints": {str(k): v for k, v in discrepancies.items()},
        "max_discrepancy_half": d_first,
        "max_discrepancy": d_full,
        "decreasing": d_full <= d_first,
        "outside_box_count": outside,
    }


def birkhoff_experiment(
    field: NumberField,
    steps: int,
    intervals: int = 10,
    seed: int = 2,
) -> dict:
    """Time averages of interval indicators along an f-orbit vs nu-masses."""
    from .planar import nu_cdf

    fs = FloatSystem.for_field(field)
    ts, _ = orbit_tv_arrays(field, steps, seed)
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    rows = []
    from fractions import Fraction

    for _ in range(intervals):
        a, b = sorted(rng.random(2))
        if b - a < 0.05:
            b = min(1.0, a + 0.05)
        fa = Fraction(a).limit_denominator(1 << 30)
        fb = Fraction(b).limit_denominator(1 << 30)
        lo = -field.tau * fb
        hi = -field.tau * fa
        mass = nu_cdf(field, lo, hi)
        freq = float(np.count_nonzero((ts >= float(lo)) & (ts < float(hi)))) / steps
        rows.append({"nu": mass, "frequency": freq})
        worst = max(worst, abs(mass - freq))
    return {
        "n": field.n,
        "N": steps,
        "intervals": intervals,
        "seed": seed,
        "max_deviation": worst,
        "rows": rows,
    }
