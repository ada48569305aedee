"""One-dimensional maximization over theta in [0, 2*pi).

A uniform coarse grid locates the best basin, then golden-section search
refines inside the two neighbouring grid cells.  No randomness, so repeated
calls are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .objective import (
    ChannelModel,
    DegenerateProtocolError,
    EvaluationResult,
    evaluate_at,
    noiseless_objective_at,
)
from .protocol import TWO_PI, Protocol, ProtocolParams

INV_PHI = (math.sqrt(5) - 1) / 2

MODES = ("noise_aware", "noiseless")


@dataclass(frozen=True)
class SearchConfig:
    grid_points: int = 1024
    refine_tol: float = 1e-9
    refine_max_iter: int = 200

    def __post_init__(self):
        if self.grid_points < 8:
            raise ValueError(f"grid_points must be >= 8, got {self.grid_points}")
        if not self.refine_tol > 0:
            raise ValueError(f"refine_tol must be positive, got {self.refine_tol}")
        if self.refine_max_iter < 1:
            raise ValueError(f"refine_max_iter must be positive, got {self.refine_max_iter}")


class ObjectiveEvaluationError(RuntimeError):
    def __init__(self, theta: float, cause: Exception):
        super().__init__(f"objective failed at theta={theta!r}: {cause}")
        self.theta = theta


def _call(objective: Callable[[float], float], theta: float) -> float:
    try:
        return objective(theta)
    except Exception as exc:
        raise ObjectiveEvaluationError(theta, exc) from exc


def _golden_max(f, lo, hi, tol, max_iter):
    """Return the best (value, theta) seen while shrinking [lo, hi]."""
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1 = f(x1)
    f2 = f(x2)
    best = max((f1, -x1, x1), (f2, -x2, x2))
    for _ in range(max_iter):
        if hi - lo < tol:
            break
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = f(x1)
            cand = (f1, -x1, x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = f(x2)
            cand = (f2, -x2, x2)
        best = max(best, cand)
    return best[0], best[2]


def maximize_theta(
    objective: Callable[[float], float], cfg: SearchConfig = SearchConfig()
) -> tuple[float, float]:
    """Return ``(theta_star, value)`` maximizing a 2*pi-periodic objective.

    The returned value is never below the best coarse-grid value; coarse-grid
    ties go to the smallest theta.
    """
    n = cfg.grid_points
    step = TWO_PI / n
    best_i, best_v = 0, -math.inf
    for i in range(n):
        v = _call(objective, TWO_PI * i / n)
        if v > best_v:
            best_i, best_v = i, v
    theta0 = TWO_PI * best_i / n
    refined_v, refined_theta = _golden_max(
        lambda t: _call(objective, t), theta0 - step, theta0 + step, cfg.refine_tol, cfg.refine_max_iter
    )
    if refined_v > best_v:
        theta = math.fmod(refined_theta, TWO_PI) % TWO_PI
        return (0.0 if theta >= TWO_PI else theta), refined_v
    return theta0, best_v


def _feasible(fn):
    # conditional objectives are undefined where the conditioning event has
    # zero probability; such angles are never maximizers
    def wrapped(theta):
        try:
            return fn(theta)
        except DegenerateProtocolError:
            return -math.inf

    return wrapped


def mode_objective(proto: Protocol, F: float, ch: ChannelModel, mode: str) -> Callable[[float], float]:
    if mode == "noise_aware":
        return _feasible(lambda t: evaluate_at(proto, t, F, ch).avg_fidelity)
    if mode == "noiseless":
        return _feasible(lambda t: noiseless_objective_at(proto, t, F))
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def optimize_protocol(
    proto: Protocol,
    F: float,
    ch: ChannelModel,
    mode: str = "noise_aware",
    cfg: SearchConfig = SearchConfig(),
) -> tuple[ProtocolParams, EvaluationResult]:
    """Pick theta by ``mode`` and report the channel-aware result at that theta.

    ``noise_aware`` maximizes the conditional average fidelity under ``ch``;
    ``noiseless`` maximizes F^00 (the channel-agnostic training target) and
    then scores the chosen angle under ``ch``.
    """
    if proto.num_params == 0:
        raise ValueError(f"protocol {proto.name!r} has no free parameters")
    theta, value = maximize_theta(mode_objective(proto, F, ch, mode), cfg)
    if value == -math.inf:
        raise DegenerateProtocolError(f"{proto.name}: objective undefined at every grid angle")
    params = ProtocolParams(theta)
    return params, evaluate_at(proto, params.theta, F, ch)
