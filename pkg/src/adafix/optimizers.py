"""One step-function interface, five optimizers.

All adaptive updates share the denominator convention sqrt(v_hat) + epsilon
(epsilon outside the root) and Adam-style bias corrections m_hat = m/(1-b1^t),
v_hat = v/(1-b2^t) with the step counter pre-incremented, so t = 1 on the
first step.

The AdaFix rule gates its second-momentum update per step: v (and the
bias-corrected copy actually used in the denominator) only moves while
max_i |g_i| >= L * eta, where L is a running gradient-Lipschitz estimate
built from the extra gradient at the new iterate:

    l_t = ||grad f(x_{t+1}) - g_t|| / ||x_{t+1} - x_t||,   L = max(L, l_t).

While the gate is closed the captured v_hat is reused verbatim, which pins
the effective learning rate instead of letting a decaying v inflate it.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidParameter,
    InvalidSchedule,
    NonFiniteIterate,
)
from .numerics import Array, ParamVector
from .objectives import Objective


@dataclass(frozen=True)
class HyperParams:
    """Hyperparameters shared by all five optimizers.

    ``bound_lower``/``bound_upper`` are the AdaBound effective-learning-rate
    schedules t -> real; when left as None the defaults

        lower(t) = c * (1 - 1/((1-beta2) t + 1))
        upper(t) = c * (1 + 1/((1-beta2) t))

    are used with c = ``bound_final``. ``L0`` seeds AdaFix's running
    smoothness estimate; with the default 0 the gate is open on the first
    step. ``gate_signed`` switches the AdaFix gate from max_i |g_i| to the
    signed max_i g_i; ``freeze_permanent`` makes the first closed gate final.
    """

    eta: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    mu: float = 0.9
    bound_lower: Callable[[int], float] | None = None
    bound_upper: Callable[[int], float] | None = None
    bound_final: float = 0.1
    L0: float = 0.0
    gate_signed: bool = False
    freeze_permanent: bool = False

    def __post_init__(self):
        if self.eta <= 0:
            raise InvalidParameter(f"eta must be positive, got {self.eta}")
        if not 0.0 <= self.beta1 < 1.0:
            raise InvalidParameter(f"beta1 must lie in [0, 1), got {self.beta1}")
        if not 0.0 <= self.beta2 < 1.0:
            raise InvalidParameter(f"beta2 must lie in [0, 1), got {self.beta2}")
        if self.epsilon <= 0:
            raise InvalidParameter(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 <= self.mu < 1.0:
            raise InvalidParameter(f"mu must lie in [0, 1), got {self.mu}")
        if self.bound_final <= 0:
            raise InvalidParameter(f"bound_final must be positive, got {self.bound_final}")
        if self.L0 < 0:
            raise InvalidParameter(f"L0 must be >= 0, got {self.L0}")

    def adabound_band(self, t: int) -> tuple[float, float]:
        """Effective-LR clip band at step t; raises InvalidSchedule if empty."""
        gamma = 1.0 - self.beta2
        if self.bound_lower is not None:
            lo = float(self.bound_lower(t))
        else:
            lo = self.bound_final * (1.0 - 1.0 / (gamma * t + 1.0))
        if self.bound_upper is not None:
            hi = float(self.bound_upper(t))
        else:
            hi = self.bound_final * (1.0 + 1.0 / (gamma * t))
        if lo > hi:
            raise InvalidSchedule(f"bound_lower({t})={lo} exceeds bound_upper({t})={hi}")
        return lo, hi


@dataclass(frozen=True)
class OptimizerState:
    """Per-run mutable state, advanced functionally (each step returns a new
    instance). ``m`` doubles as the SGDM velocity; ``v_hat_max`` is AMSGrad's
    running max of bias-corrected v; ``v_frozen_hat`` is the AdaFix capture."""

    t: int
    m: ParamVector
    v: ParamVector
    v_hat_max: ParamVector
    L: float
    v_frozen_hat: ParamVector
    frozen_permanently: bool = False

    @classmethod
    def initial(cls, dim: int, L0: float = 0.0) -> "OptimizerState":
        zero = ParamVector.zeros(dim)
        return cls(t=0, m=zero, v=zero, v_hat_max=zero, L=float(L0), v_frozen_hat=zero)


@dataclass(frozen=True)
class StepDiagnostics:
    """Per-step observables. ``v_hat_used`` and ``effective_lr`` are None for
    SGDM, which has no second momentum; for the adaptive optimizers
    effective_lr[i] is the multiplier actually applied to m_hat[i]."""

    v_hat_used: ParamVector | None
    effective_lr: ParamVector | None
    gate_open: bool | None = None
    l_t: float | None = None


@dataclass(frozen=True)
class StepResult:
    x_next: ParamVector
    state: OptimizerState
    diagnostics: StepDiagnostics
    # AdaFix evaluates the gradient at x_next; deterministic runs may reuse
    # it as the next step's input gradient.
    g_next: ParamVector | None = None


def _quiet_overflow(fn):
    """Overflow/invalid intermediates surface as typed NonFinite errors, not
    numpy warnings."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with np.errstate(over="ignore", invalid="ignore"):
            return fn(*args, **kwargs)

    return wrapper


def _check_dims(x: ParamVector, g: ParamVector, state: OptimizerState) -> None:
    if x.dim != g.dim or x.dim != state.m.dim:
        raise DimensionMismatch(
            f"dims differ: x={x.dim}, g={g.dim}, state={state.m.dim}"
        )


def _iterate(x: ParamVector, delta: Array) -> ParamVector:
    nxt = x.data - delta
    if not np.all(np.isfinite(nxt)):
        raise NonFiniteIterate(f"step produced non-finite iterate from {x!r}")
    return ParamVector(nxt)


def _moments(g: Array, state: OptimizerState, hp: HyperParams, t: int):
    m = hp.beta1 * state.m.data + (1.0 - hp.beta1) * g
    v = hp.beta2 * state.v.data + (1.0 - hp.beta2) * g * g
    m_hat = m / (1.0 - hp.beta1**t)
    v_hat = v / (1.0 - hp.beta2**t)
    return m, v, m_hat, v_hat


@_quiet_overflow
def sgdm_step(
    x: ParamVector, g: ParamVector, state: OptimizerState, hp: HyperParams
) -> StepResult:
    """Heavy-ball update u <- mu*u + g ; x <- x - eta*u (velocity kept in m)."""
    _check_dims(x, g, state)
    u = hp.mu * state.m.data + g.data
    x_next = _iterate(x, hp.eta * u)
    new_state = replace(state, t=state.t + 1, m=ParamVector(u))
    return StepResult(x_next, new_state, StepDiagnostics(None, None))


@_quiet_overflow
def adam_step(
    x: ParamVector, g: ParamVector, state: OptimizerState, hp: HyperParams
) -> StepResult:
    _check_dims(x, g, state)
    t = state.t + 1
    m, v, m_hat, v_hat = _moments(g.data, state, hp, t)
    eff = hp.eta / (np.sqrt(v_hat) + hp.epsilon)
    x_next = _iterate(x, eff * m_hat)
    new_state = replace(state, t=t, m=ParamVector(m), v=ParamVector(v))
    return StepResult(
        x_next, new_state, StepDiagnostics(ParamVector(v_hat), ParamVector(eff))
    )


@_quiet_overflow
def amsgrad_step(
    x: ParamVector, g: ParamVector, state: OptimizerState, hp: HyperParams
) -> StepResult:
    """Adam with a coordinatewise running max of bias-corrected v in the
    denominator, so the effective learning rate can only shrink."""
    _check_dims(x, g, state)
    t = state.t + 1
    m, v, m_hat, v_hat = _moments(g.data, state, hp, t)
    v_hat_used = np.maximum(state.v_hat_max.data, v_hat)
    eff = hp.eta / (np.sqrt(v_hat_used) + hp.epsilon)
    x_next = _iterate(x, eff * m_hat)
    new_state = replace(
        state, t=t, m=ParamVector(m), v=ParamVector(v), v_hat_max=ParamVector(v_hat_used)
    )
    return StepResult(
        x_next, new_state, StepDiagnostics(ParamVector(v_hat_used), ParamVector(eff))
    )


@_quiet_overflow
def adabound_step(
    x: ParamVector, g: ParamVector, state: OptimizerState, hp: HyperParams
) -> StepResult:
    """Adam whose per-coordinate effective LR is clipped into the band
    [bound_lower(t), bound_upper(t)] before multiplying m_hat."""
    _check_dims(x, g, state)
    t = state.t + 1
    m, v, m_hat, v_hat = _moments(g.data, state, hp, t)
    lo, hi = hp.adabound_band(t)
    eff = np.clip(hp.eta / (np.sqrt(v_hat) + hp.epsilon), lo, hi)
    x_next = _iterate(x, eff * m_hat)
    new_state = replace(state, t=t, m=ParamVector(m), v=ParamVector(v))
    return StepResult(
        x_next, new_state, StepDiagnostics(ParamVector(v_hat), ParamVector(eff))
    )


@_quiet_overflow
def adafix_step(
    x: ParamVector,
    g: ParamVector,
    state: OptimizerState,
    hp: HyperParams,
    f: Objective,
) -> StepResult:
    """Gated second-momentum update with a running smoothness estimate.

    The gate compares max_i |g_i| (or the signed max under ``gate_signed``)
    against L * eta. Open: v moves as in Adam and its bias-corrected value is
    captured. Closed: both v and the capture are carried over bit-exactly.
    After the update, the extra gradient at x_next feeds the quotient l_t,
    skipped when the step displacement is zero, and L = max(L, l_t).
    """
    _check_dims(x, g, state)
    t = state.t + 1
    m = hp.beta1 * state.m.data + (1.0 - hp.beta1) * g.data
    m_hat = m / (1.0 - hp.beta1**t)

    gate_metric = float(np.max(g.data)) if hp.gate_signed else float(np.max(np.abs(g.data)))
    gate_open = gate_metric >= state.L * hp.eta
    if hp.freeze_permanent and state.frozen_permanently:
        gate_open = False

    if gate_open:
        v_arr = hp.beta2 * state.v.data + (1.0 - hp.beta2) * g.data * g.data
        v = ParamVector(v_arr)
        v_frozen_hat = ParamVector(v_arr / (1.0 - hp.beta2**t))
    else:
        v = state.v
        v_frozen_hat = state.v_frozen_hat

    eff = hp.eta / (np.sqrt(v_frozen_hat.data) + hp.epsilon)
    x_next = _iterate(x, eff * m_hat)

    g_next = f.gradient(x_next)
    displacement = float(np.linalg.norm(x_next.data - x.data))
    l_t: float | None = None
    L = state.L
    if displacement > 0.0:
        l_t = float(np.linalg.norm(g_next.data - g.data)) / displacement
        L = max(L, l_t)

    new_state = replace(
        state,
        t=t,
        m=ParamVector(m),
        v=v,
        L=L,
        v_frozen_hat=v_frozen_hat,
        frozen_permanently=state.frozen_permanently
        or (hp.freeze_permanent and not gate_open),
    )
    diags = StepDiagnostics(v_frozen_hat, ParamVector(eff), gate_open, l_t)
    return StepResult(x_next, new_state, diags, g_next=g_next)


OPTIMIZER_NAMES = ("sgdm", "adam", "amsgrad", "adabound", "adafix")

STEP_FUNCTIONS = {
    "sgdm": sgdm_step,
    "adam": adam_step,
    "amsgrad": amsgrad_step,
    "adabound": adabound_step,
    # adafix_step takes the objective as an extra argument; the harness
    # dispatches it specially.
    "adafix": adafix_step,
}
