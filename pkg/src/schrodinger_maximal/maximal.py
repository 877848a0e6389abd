"""Time selection and lower bounds for sup_{0<t<1} |e^{it Laplacian} f(x)|.

Every estimate is a maximum of genuinely evaluated values |e^{it Laplacian} f(x)|
with t in (0, 1), hence a certified lower bound for the supremum.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .datum import InitialDatum, l2_norm
from .errors import TimeOutOfRange, WindowViolated
from .numbertheory import (
    TWO_PI,
    OmegaSpec,
    RationalApprox,
    _signed,
    admissible_approximations,
    make_omega_spec,
    torus_map,
)
from .params import Params
from .propagator import propagate

DEFAULT_BUDGET = 64


class Strategy(str, enum.Enum):
    PREDICTED = "predicted"
    WINDOW_GRID = "window_grid"
    COMBINED = "combined"


class TimeSource(str, enum.Enum):
    PREDICTED = "predicted"
    GRID_REFINED = "grid_refined"


@dataclass(frozen=True)
class TimeSelection:
    t_star: float
    s_shift: float
    tau: float
    source: TimeSource = TimeSource.PREDICTED


@dataclass(frozen=True)
class MaximalEstimate:
    value: float
    argmax_t: float
    strategy: Strategy
    evaluations: int


def predicted_time(p: Params, x, approx: RationalApprox, c: float = 0.05) -> TimeSelection:
    """t* = -x_1 / (2R) + s / D^2 with s = 2 pi a_1 / q - y_1."""
    x = np.asarray(x, dtype=float)
    y = torus_map(p, x)
    s = float(_signed(TWO_PI * approx.a1 / approx.q - y.y1))
    if abs(s) > c * p.sigma:
        raise WindowViolated(f"|s| = {abs(s):.3g} exceeds c*sigma = {c * p.sigma:.3g}")
    tau = s / (p.D * p.D)
    t_star = -x[0] / (2.0 * p.R) + tau
    if not 0.0 < t_star < 1.0:
        raise TimeOutOfRange(f"t* = {t_star:.3g} outside (0, 1)")
    return TimeSelection(t_star, s, tau)


def local_grid(p: Params, x1: float, budget: int) -> np.ndarray:
    """``budget`` points across the tau-window around -x_1 / (2R), nested under doubling."""
    w = p.tau_halfwidth
    center = -x1 / (2.0 * p.R)
    return center + (-w + 2.0 * w * np.arange(budget) / budget)


def window_grid(p: Params, budget: int, c: float) -> np.ndarray:
    """``budget`` points in (0, c/R], nested under doubling."""
    return (c / p.R) * (np.arange(1, budget + 1) / budget)


def candidate_times(d: InitialDatum, x, strategy: Strategy, budget: int,
                    omega: OmegaSpec) -> np.ndarray:
    p = d.params
    x = np.asarray(x, dtype=float)
    strategy = Strategy(strategy)
    ts = []
    if strategy in (Strategy.PREDICTED, Strategy.COMBINED):
        for approx in admissible_approximations(omega, torus_map(p, x)):
            try:
                ts.append([predicted_time(p, x, approx, omega.c).t_star])
            except (TimeOutOfRange, WindowViolated):
                pass
        ts.append(local_grid(p, x[0], budget))
    if strategy in (Strategy.WINDOW_GRID, Strategy.COMBINED):
        ts.append(window_grid(p, budget, omega.c))
    t = np.concatenate(ts)
    t = t[(t > 0.0) & (t < 1.0)]
    if t.size == 0:
        # whole local window lies at t <= 0; keep one valid time
        t = np.array([p.tau_halfwidth])
    return t


def sup_estimate(d: InitialDatum, x, strategy: Strategy = Strategy.PREDICTED,
                 budget: int = DEFAULT_BUDGET, omega: OmegaSpec | None = None) -> MaximalEstimate:
    if budget < 1:
        raise ValueError("budget must be >= 1")
    omega = omega or make_omega_spec(d.params)
    t = candidate_times(d, x, strategy, budget, omega)
    vals = np.abs(propagate(d, x, t))
    i = int(np.argmax(vals))
    return MaximalEstimate(float(vals[i]), float(t[i]), Strategy(strategy), int(t.size))


def pointwise_ratio(d: InitialDatum, x, strategy: Strategy = Strategy.PREDICTED,
                    budget: int = DEFAULT_BUDGET, omega: OmegaSpec | None = None,
                    norm: float | None = None) -> float:
    norm = l2_norm(d) if norm is None else norm
    return sup_estimate(d, x, strategy, budget, omega).value / norm
