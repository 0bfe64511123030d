"""Recede-bound computation and verification, one-point-convexity checking,
smoothness estimation, effective-learning-rate diagnostics, escape detection.

The central quantity is the second-momentum threshold below which a single
generic adaptive step

    x' = x - eta * diag(v)^(-1/2) * grad f(x)

cannot reduce the distance to the optimum x*. With D = ||x - x*||,
G = ||grad f(x)|| and a correlation level delta, the scalar sufficient
condition reads

    -2 eta delta D^2 + eta^2 G^2 / s  >=  s D^2        (s = sqrt(max_i v_i))

whose exact positive root is

    s* = eta * (sqrt(delta^2 + G^2/D^2) - delta).

:func:`recede_bound` returns that exact root; :func:`recede_bound_literal`
returns the looser printed form sqrt(delta^2 D^2 + G^2)/D^2 - delta (which
also omits the eta factor) for side-by-side comparison, selectable on the
CLI via --bound-literal. The guarantee "s <= s* implies non-decreasing
distance" is only valid when delta dominates the one-point correlation
<-grad f(x), x*-x>/D^2 at x; :func:`verify_recede` is the brute-force
single-step oracle that checks the distance claim directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateInput,
    DivisionByZero,
    HypothesisViolated,
    InsufficientData,
    InvalidParameter,
    InvalidRegion,
)
from .numerics import ParamVector, Rng, dot, norm2
from .objectives import Objective


def recede_bound(
    x: ParamVector, x_star: ParamVector, g: ParamVector, delta: float, eta: float
) -> float:
    """Exact root s* of the recede inequality; largest s such that every
    0 < sqrt(max_i v_i) <= s satisfies the scalar sufficient condition."""
    if delta <= 0:
        raise InvalidParameter(f"delta must be positive, got {delta}")
    if eta <= 0:
        raise InvalidParameter(f"eta must be positive, got {eta}")
    dist = norm2(x - x_star)
    if dist == 0.0:
        raise DegenerateInput("x coincides with x_star (D = 0)")
    q = norm2(g) / dist
    # sqrt(delta^2+q^2)-delta rewritten to avoid cancellation for q << delta
    return eta * q * q / (math.sqrt(delta * delta + q * q) + delta)


def recede_bound_literal(
    x: ParamVector, x_star: ParamVector, g: ParamVector, delta: float
) -> float:
    """The printed closed form sqrt(delta^2 D^2 + G^2) / D^2 - delta.

    Dimensionally inconsistent with the scalar inequality (it divides by D^2
    where the exact root divides by D, and carries no eta factor); kept for
    A/B comparison. Coincides with :func:`recede_bound` at D = 1, eta = 1.
    """
    if delta <= 0:
        raise InvalidParameter(f"delta must be positive, got {delta}")
    dist = norm2(x - x_star)
    if dist == 0.0:
        raise DegenerateInput("x coincides with x_star (D = 0)")
    grad_norm = norm2(g)
    return math.sqrt(delta * delta * dist * dist + grad_norm * grad_norm) / (dist * dist) - delta


def recede_inequality_margin(
    s: float, dist: float, grad_norm: float, delta: float, eta: float
) -> float:
    """Margin of the scalar condition at s: positive means it holds.

        margin(s) = -2 eta delta D^2 + eta^2 G^2 / s - s D^2
    """
    if s <= 0:
        raise InvalidParameter(f"s must be positive, got {s}")
    if dist <= 0:
        raise DegenerateInput(f"dist must be positive, got {dist}")
    d2 = dist * dist
    return -2.0 * eta * delta * d2 + (eta * grad_norm) ** 2 / s - s * d2


def verify_recede(
    f: Objective,
    x: ParamVector,
    v_diag: ParamVector,
    delta: float,
    eta: float,
    rel_slack: float = 1e-12,
) -> bool:
    """Brute-force oracle: take one generic adaptive step (no momentum, as in
    the underlying distance argument) and report whether the squared distance
    to the optimum did not decrease, up to ``rel_slack`` relative slack.

    Checks the strict one-point-correlation hypothesis at x and raises
    HypothesisViolated when it fails. v_diag entries must be strictly
    positive since the step applies their inverse square root.
    """
    if f.optimum is None:
        raise DegenerateInput(f"objective {f.name!r} has no recorded optimum")
    x_star = f.optimum
    offset = x - x_star
    d2_before = float(offset.data @ offset.data)
    if d2_before == 0.0:
        raise DegenerateInput("x coincides with the optimum (D = 0)")
    if v_diag.dim != x.dim:
        raise DegenerateInput(f"v_diag dim {v_diag.dim} != x dim {x.dim}")
    if np.any(v_diag.data <= 0.0):
        raise DegenerateInput("v_diag entries must be positive for the inverse root")
    if eta <= 0:
        raise InvalidParameter(f"eta must be positive, got {eta}")
    g = f.gradient(x)
    if dot(-g, x_star - x) <= delta * d2_before:
        raise HypothesisViolated(
            f"one-point correlation at x does not strictly exceed delta={delta}"
        )
    x_next = x.data - eta * g.data / np.sqrt(v_diag.data)
    diff = x_next - x_star.data
    d2_after = float(diff @ diff)
    return d2_after >= d2_before * (1.0 - rel_slack)


def _sample_annulus(
    x_star: ParamVector, r_min: float, r_max: float, n_samples: int, rng: Rng
):
    """Points with radius-squared uniform on [r_min^2, r_max^2] and uniform
    direction; uniform in r^2 avoids over-weighting the outer shell."""
    if not 0.0 <= r_min < r_max:
        raise InvalidRegion(f"need 0 <= r_min < r_max, got [{r_min}, {r_max}]")
    if not math.isfinite(r_max):
        raise InvalidRegion("r_max must be finite for sampling")
    if n_samples < 1:
        raise InvalidRegion(f"n_samples must be >= 1, got {n_samples}")
    produced = 0
    while produced < n_samples:
        r = math.sqrt(rng.uniform(r_min * r_min, r_max * r_max))
        if r == 0.0:
            continue
        direction = rng.standard_normal(x_star.dim)
        scale = np.linalg.norm(direction)
        if scale == 0.0:
            continue
        produced += 1
        yield ParamVector(x_star.data + r * direction / scale)


@dataclass(frozen=True)
class OpcCheckResult:
    holds: bool
    violations: list[ParamVector] = field(default_factory=list)
    min_ratio: float = math.inf


def check_opc(
    f: Objective,
    x_star: ParamVector,
    delta: float,
    r_min: float,
    r_max: float,
    n_samples: int,
    rng: Rng,
) -> OpcCheckResult:
    """Sample the annulus and collect every point where the strict inequality

        <-grad f(x), x* - x>  >  delta * ||x* - x||^2

    fails. ``holds`` means no sampled violation."""
    violations: list[ParamVector] = []
    min_ratio = math.inf
    for point in _sample_annulus(x_star, r_min, r_max, n_samples, rng):
        offset = x_star - point
        ratio = dot(-f.gradient(point), offset) / float(offset.data @ offset.data)
        min_ratio = min(min_ratio, ratio)
        if not ratio > delta:
            violations.append(point)
    return OpcCheckResult(holds=not violations, violations=violations, min_ratio=min_ratio)


def estimate_delta(
    f: Objective,
    x_star: ParamVector,
    r_min: float,
    r_max: float,
    n_samples: int,
    rng: Rng,
) -> float:
    """Minimum sampled one-point correlation ratio over the annulus; may be
    <= 0 when the region is not one-point convex at all."""
    result = check_opc(f, x_star, -math.inf, r_min, r_max, n_samples, rng)
    return result.min_ratio


def estimate_L(positions, gradients) -> float:
    """Max quotient ||g_{k+1} - g_k|| / ||x_{k+1} - x_k|| over consecutive
    recorded pairs, skipping zero-displacement pairs. Never exceeds the true
    gradient-Lipschitz constant of the sampled function."""
    xs = [ParamVector(p) for p in positions]
    gs = [ParamVector(g) for g in gradients]
    if len(xs) != len(gs):
        raise InsufficientData(
            f"positions and gradients differ in length: {len(xs)} vs {len(gs)}"
        )
    if len(xs) < 2:
        raise InsufficientData("need at least 2 recorded points with gradients")
    best: float | None = None
    for (x0, g0), (x1, g1) in zip(zip(xs, gs), zip(xs[1:], gs[1:])):
        displacement = norm2(x1 - x0)
        if displacement == 0.0:
            continue
        quotient = norm2(g1 - g0) / displacement
        best = quotient if best is None else max(best, quotient)
    if best is None:
        raise InsufficientData("all consecutive pairs have zero displacement")
    return best


def effective_lr(v_hat: ParamVector, eta: float, epsilon: float) -> ParamVector:
    """Per-coordinate multiplier eta / (sqrt(v_hat_i) + epsilon)."""
    if np.any(v_hat.data < 0.0):
        raise InvalidParameter("v_hat entries must be nonnegative")
    if eta <= 0:
        raise InvalidParameter(f"eta must be positive, got {eta}")
    if epsilon < 0:
        raise InvalidParameter(f"epsilon must be >= 0, got {epsilon}")
    denom = np.sqrt(v_hat.data) + epsilon
    if np.any(denom == 0.0):
        raise DivisionByZero("zero denominator: v_hat entry 0 with epsilon 0")
    return ParamVector(eta / denom)


@dataclass(frozen=True)
class EscapeReport:
    """Whether a trajectory left the ball of the given radius after first
    entering it. ``min_distance`` is the closest approach up to the first
    exit (or over the whole path when no exit), so appending post-escape
    points never changes the report."""

    escaped: bool
    first_escape_step: int | None
    min_distance: float
    min_distance_step: int


def detect_escape(
    positions, x_star: ParamVector, radius: float, steps=None
) -> EscapeReport:
    """Escape means some recorded distance exceeds ``radius`` strictly AFTER
    the trajectory first reaches distance <= radius."""
    if radius <= 0:
        raise InvalidParameter(f"radius must be positive, got {radius}")
    xs = [ParamVector(p) for p in positions]
    if not xs:
        raise InsufficientData("empty trajectory")
    labels = list(steps) if steps is not None else list(range(len(xs)))
    if len(labels) != len(xs):
        raise InsufficientData("steps and positions differ in length")
    dists = [norm2(p - x_star) for p in xs]

    entry = next((i for i, d in enumerate(dists) if d <= radius), None)
    escape = None
    if entry is not None:
        escape = next(
            (i for i in range(entry + 1, len(dists)) if dists[i] > radius), None
        )
    window = dists if escape is None else dists[: escape + 1]
    min_idx = int(np.argmin(window))
    return EscapeReport(
        escaped=escape is not None,
        first_escape_step=labels[escape] if escape is not None else None,
        min_distance=window[min_idx],
        min_distance_step=labels[min_idx],
    )
