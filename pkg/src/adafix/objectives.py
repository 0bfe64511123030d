"""Differentiable test functions with analytic gradients and known optima.

Each factory returns an :class:`Objective` whose analytic gradient is checked
against the finite-difference oracle in the test suite. Objectives are pure
and stateless; stochasticity comes only from the :class:`NoisyObjective`
wrapper so deterministic runs stay deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidParameter,
    NonFiniteEvaluation,
)
from .numerics import Array, ParamVector, Rng


@dataclass(frozen=True)
class OpcRegion:
    """Annulus around ``center`` on which the one-point correlation

        <-grad f(x), center - x> / ||center - x||^2

    strictly exceeds ``delta``. A ball is the r_min = 0 case; r_max may be
    ``inf`` when the condition holds at every radius.
    """

    center: ParamVector
    r_min: float
    r_max: float
    delta: float


@dataclass(frozen=True)
class Objective:
    """Evaluatable, differentiable function with optional optimum metadata.

    ``fn`` and ``grad_fn`` must be defined and finite on all of R^dim unless
    a restriction is documented on the instance. ``smoothness`` is the true
    gradient-Lipschitz constant when known, ``escape_radius`` the distance
    beyond which an iterate counts as having left the basin of ``optimum``.
    """

    name: str
    dim: int
    fn: Callable[[Array], float]
    grad_fn: Callable[[Array], Array]
    optimum: ParamVector | None = None
    opc_region: OpcRegion | None = None
    smoothness: float | None = None
    escape_radius: float | None = None

    def _check(self, x: ParamVector) -> Array:
        if x.dim != self.dim:
            raise DimensionMismatch(f"{self.name} expects dim {self.dim}, got {x.dim}")
        return x.data

    def value(self, x: ParamVector) -> float:
        out = float(self.fn(self._check(x)))
        if not math.isfinite(out):
            raise NonFiniteEvaluation(f"{self.name} returned {out} at {x!r}")
        return out

    def gradient(self, x: ParamVector) -> ParamVector:
        g = np.asarray(self.grad_fn(self._check(x)), dtype=np.float64)
        if not np.all(np.isfinite(g)):
            raise NonFiniteEvaluation(f"{self.name} gradient non-finite at {x!r}")
        return ParamVector(g)


def bowl(delta: float = 0.5) -> Objective:
    """2-d nonconvex bowl f(x) = 1 - cos(x1^2 + x2^2), optimum at the origin.

    The one-point correlation toward the origin is 2 sin(r^2), so the strict
    delta condition holds exactly on the annulus asin(delta/2) < r^2 <
    pi - asin(delta/2): it fails both near the flat origin and past the
    ridge at r^2 = pi. The recorded region is that annulus for the given
    ``delta``; the basin edge (escape radius) is sqrt(pi) regardless.
    """
    if not 0.0 < delta < 2.0:
        raise InvalidParameter(f"bowl delta must lie in (0, 2), got {delta}")
    r2_min = math.asin(delta / 2.0)
    origin = ParamVector.zeros(2)
    return Objective(
        name="bowl",
        dim=2,
        fn=lambda x: 1.0 - np.cos(x @ x),
        grad_fn=lambda x: 2.0 * np.sin(x @ x) * x,
        optimum=origin,
        opc_region=OpcRegion(
            center=origin,
            r_min=math.sqrt(r2_min),
            r_max=math.sqrt(math.pi - r2_min),
            delta=delta,
        ),
        escape_radius=math.sqrt(math.pi),
    )


def opc_quadratic(c: float, x_star: ParamVector) -> Objective:
    """Isotropic quadratic f(x) = (c/2) ||x - x*||^2.

    Its one-point correlation toward ``x_star`` is exactly ``c`` everywhere,
    so the strict delta condition holds on all of R^dim for every delta < c.
    The recorded region stores the tight ratio ``c`` itself.
    """
    if c <= 0:
        raise InvalidParameter(f"quadratic curvature c must be positive, got {c}")
    x_star = ParamVector(x_star)
    target = x_star.data
    return Objective(
        name="opc_quadratic",
        dim=x_star.dim,
        fn=lambda x: 0.5 * c * float((x - target) @ (x - target)),
        grad_fn=lambda x: c * (x - target),
        optimum=x_star,
        opc_region=OpcRegion(center=x_star, r_min=0.0, r_max=math.inf, delta=c),
        smoothness=c,
    )


def anisotropic_quadratic(diag: ParamVector) -> Objective:
    """Axis-aligned quadratic f(x) = (1/2) sum_i diag_i x_i^2.

    True gradient-Lipschitz constant is max_i diag_i; the one-point
    correlation toward the origin ranges over [min diag, max diag].
    """
    diag = ParamVector(diag)
    if np.any(diag.data <= 0):
        raise InvalidParameter(f"diag entries must be positive, got {diag!r}")
    d = diag.data
    origin = ParamVector.zeros(diag.dim)
    return Objective(
        name="aniso_quadratic",
        dim=diag.dim,
        fn=lambda x: 0.5 * float(d @ (x * x)),
        grad_fn=lambda x: d * x,
        optimum=origin,
        opc_region=OpcRegion(
            center=origin, r_min=0.0, r_max=math.inf, delta=float(d.min())
        ),
        smoothness=float(d.max()),
    )


class NoisyObjective:
    """Additive i.i.d. Gaussian noise on each gradient coordinate.

    Values are unperturbed. ``noise_sigma == 0`` reduces bit-exactly to the
    base objective (no draws are consumed). The wrapper owns its Rng and is
    single-consumer.
    """

    def __init__(self, base: Objective, noise_sigma: float, rng: Rng):
        if noise_sigma < 0:
            raise InvalidParameter(f"noise_sigma must be >= 0, got {noise_sigma}")
        self.base = base
        self.noise_sigma = float(noise_sigma)
        self.rng = rng

    @property
    def name(self) -> str:
        return self.base.name

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def optimum(self) -> ParamVector | None:
        return self.base.optimum

    @property
    def opc_region(self) -> OpcRegion | None:
        return self.base.opc_region

    @property
    def escape_radius(self) -> float | None:
        return self.base.escape_radius

    def value(self, x: ParamVector) -> float:
        return self.base.value(x)

    def gradient(self, x: ParamVector) -> ParamVector:
        if self.noise_sigma == 0.0:
            return self.base.gradient(x)
        noise = self.noise_sigma * self.rng.standard_normal(self.base.dim)
        return ParamVector(self.base.gradient(x).data + noise)

    def step_instance(self) -> Objective:
        """Freeze one noise draw: a per-step view whose gradient applies the
        same perturbation at every query point, so the two gradient
        evaluations inside a single optimizer step see one draw."""
        if self.noise_sigma == 0.0:
            return self.base
        noise = self.noise_sigma * self.rng.standard_normal(self.base.dim)
        base = self.base
        return Objective(
            name=base.name,
            dim=base.dim,
            fn=base.fn,
            grad_fn=lambda x: base.grad_fn(x) + noise,
            optimum=base.optimum,
            opc_region=base.opc_region,
            smoothness=base.smoothness,
            escape_radius=base.escape_radius,
        )


def make_objective(name: str, params: Mapping[str, object] | None = None) -> Objective:
    """Build a registry objective from its config name and flat parameters."""
    params = dict(params or {})
    if name == "bowl":
        delta = float(params.pop("bowl_delta", 0.5))
        obj = bowl(delta)
    elif name == "opc_quadratic":
        c = float(params.pop("opc_c", 1.0))
        x_star = ParamVector(params.pop("opc_x_star", [0.0, 0.0]))
        obj = opc_quadratic(c, x_star)
    elif name == "aniso_quadratic":
        diag = ParamVector(params.pop("aniso_diag", [4.0, 1.0]))
        obj = anisotropic_quadratic(diag)
    else:
        raise InvalidParameter(
            f"unknown objective {name!r}; expected one of: bowl, opc_quadratic, aniso_quadratic"
        )
    if params:
        raise InvalidParameter(f"unused objective parameters for {name!r}: {sorted(params)}")
    return obj


OBJECTIVE_NAMES = ("bowl", "opc_quadratic", "aniso_quadratic")
