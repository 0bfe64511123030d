"""Experiment harness: config parsing, trajectory runs, CSV artifacts,
optimizer comparison, and the randomized verification suites.

Configs are flat ``key = value`` text files (``#`` starts a comment); CLI
flags override file values. Runs are bit-deterministic for a fixed seed:
identical config + seed produces byte-identical CSV output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import analysis
from .errors import ConfigError, InsufficientData, InvalidParameter, NonFiniteError
from .numerics import ParamVector, Rng, norm2
from .objectives import (
    NoisyObjective,
    Objective,
    anisotropic_quadratic,
    bowl,
    make_objective,
    opc_quadratic,
)
from .optimizers import (
    HyperParams,
    OptimizerState,
    STEP_FUNCTIONS,
    adafix_step,
)

CSV_COLUMNS = (
    "t",
    "f",
    "grad_norm",
    "v_norm",
    "sqrt_vmax_hat",
    "max_eff_lr",
    "dist_to_opt",
    "gate_open",
    "L_est",
    "diverged",
)

# Raw positions are appended as x_0..x_{d-1} columns only at small dims.
MAX_RECORDED_DIM = 16

_OBJECTIVE_PARAM_KEYS = ("bowl_delta", "opc_c", "opc_x_star", "aniso_diag")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one run."""

    objective: str
    optimizer: str
    x0: ParamVector
    steps: int
    hyper: HyperParams
    seed: int = 0
    noise_sigma: float = 0.0
    record_every: int = 1
    output_path: str | None = None
    objective_params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.optimizer not in STEP_FUNCTIONS:
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if self.record_every < 1:
            raise ConfigError(f"record_every must be >= 1, got {self.record_every}")
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma must be >= 0, got {self.noise_sigma}")

    def build_objective(self):
        try:
            base = make_objective(self.objective, self.objective_params)
        except InvalidParameter as exc:
            raise ConfigError(str(exc)) from exc
        if self.x0.dim != base.dim:
            raise ConfigError(
                f"x0 has dim {self.x0.dim} but objective {base.name!r} has dim {base.dim}"
            )
        if self.noise_sigma > 0:
            return NoisyObjective(base, self.noise_sigma, Rng(self.seed))
        return base


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read a flat ``key = value`` config file; ``#`` starts a comment."""
    mapping: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        mapping[key.strip()] = value.strip()
    return mapping


def _parse_vector(text: str) -> ParamVector:
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        return ParamVector([float(p) for p in parts])
    except (ValueError, InvalidParameter) as exc:
        raise ConfigError(f"cannot parse vector from {text!r}: {exc}") from exc


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse boolean from {text!r}")


def build_config(
    mapping: Mapping[str, object], overrides: Mapping[str, object] | None = None
) -> ExperimentConfig:
    """Assemble an ExperimentConfig from flat string keys; ``overrides``
    (e.g. CLI flags) win over file values. Unknown keys are rejected."""
    merged: dict[str, object] = dict(mapping)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value

    def pop(key: str, default=None):
        return merged.pop(key, default)

    def pop_float(key: str, default=None):
        raw = pop(key, default)
        if raw is None:
            return None
        try:
            return float(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config key {key!r}: expected a number, got {raw!r}") from exc

    def pop_int(key: str, default=None):
        raw = pop(key, default)
        if raw is None:
            return None
        try:
            return int(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config key {key!r}: expected an integer, got {raw!r}") from exc

    objective = pop("objective")
    optimizer = pop("optimizer")
    x0_raw = pop("x0")
    steps = pop_int("steps")
    if objective is None or optimizer is None or x0_raw is None or steps is None:
        missing = [
            name
            for name, value in (
                ("objective", objective),
                ("optimizer", optimizer),
                ("x0", x0_raw),
                ("steps", steps),
            )
            if value is None
        ]
        raise ConfigError(f"missing required config keys: {', '.join(missing)}")
    x0 = x0_raw if isinstance(x0_raw, ParamVector) else _parse_vector(str(x0_raw))

    eta = pop_float("eta")
    if eta is None:
        raise ConfigError("missing required config key: eta")
    hyper_kwargs: dict[str, object] = {"eta": eta}
    for key in ("beta1", "beta2", "epsilon", "mu", "bound_final", "L0"):
        value = pop_float(key)
        if value is not None:
            hyper_kwargs[key] = value
    for key in ("gate_signed", "freeze_permanent"):
        raw = pop(key)
        if raw is not None:
            hyper_kwargs[key] = raw if isinstance(raw, bool) else _parse_bool(str(raw))
    try:
        hyper = HyperParams(**hyper_kwargs)
    except InvalidParameter as exc:
        raise ConfigError(str(exc)) from exc

    objective_params: dict[str, object] = {}
    for key in _OBJECTIVE_PARAM_KEYS:
        raw = pop(key)
        if raw is None:
            continue
        if key in ("opc_x_star", "aniso_diag"):
            objective_params[key] = (
                raw if isinstance(raw, ParamVector) else _parse_vector(str(raw))
            )
        else:
            objective_params[key] = float(raw)  # type: ignore[arg-type]

    seed = pop_int("seed", 0)
    noise_sigma = pop_float("noise_sigma", 0.0)
    record_every = pop_int("record_every", 1)
    output_raw = pop("output")
    cfg = ExperimentConfig(
        objective=str(objective),
        optimizer=str(optimizer),
        x0=x0,
        steps=steps,
        hyper=hyper,
        seed=0 if seed is None else seed,
        noise_sigma=0.0 if noise_sigma is None else noise_sigma,
        record_every=1 if record_every is None else record_every,
        output_path=str(output_raw) if output_raw is not None else None,
        objective_params=objective_params,
    )
    if merged:
        raise ConfigError(f"unknown config keys: {sorted(merged)}")
    cfg.build_objective()  # validates names, dims and parameters
    return cfg


@dataclass
class TrajectoryRow:
    """One recorded step. ``x`` and ``g`` are kept in memory for analysis;
    the CSV carries their norms (plus raw coordinates at small dims). A
    terminal divergence row has ``diverged`` set and empty value fields."""

    t: int
    x: ParamVector | None
    g: ParamVector | None
    f: float | None
    grad_norm: float | None
    v_norm: float | None
    sqrt_vmax_hat: float | None
    max_eff_lr: float | None
    dist_to_opt: float | None
    gate_open: bool | None
    L_est: float | None
    diverged: bool = False


@dataclass
class TrajectoryRecord:
    objective: str
    optimizer: str
    dim: int
    rows: list[TrajectoryRow] = field(default_factory=list)

    @property
    def diverged(self) -> bool:
        return bool(self.rows) and self.rows[-1].diverged

    def positions(self) -> list[ParamVector]:
        return [r.x for r in self.rows if r.x is not None]

    def gradients(self) -> list[ParamVector]:
        return [r.g for r in self.rows if r.g is not None]

    def steps(self) -> list[int]:
        return [r.t for r in self.rows if r.x is not None]

    def distances(self) -> list[float]:
        return [r.dist_to_opt for r in self.rows if r.dist_to_opt is not None]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def export_csv(record: TrajectoryRecord, path: str | Path) -> None:
    """Write the record as UTF-8 CSV with full round-trip float precision
    (repr emits the shortest digits that parse back bit-exactly)."""
    if not record.rows:
        raise InsufficientData("cannot export an empty record")
    include_x = record.dim <= MAX_RECORDED_DIM
    header = list(CSV_COLUMNS)
    if include_x:
        header += [f"x_{i}" for i in range(record.dim)]
    lines = [",".join(header)]
    for row in record.rows:
        fields = [
            str(row.t),
            _fmt(row.f),
            _fmt(row.grad_norm),
            _fmt(row.v_norm),
            _fmt(row.sqrt_vmax_hat),
            _fmt(row.max_eff_lr),
            _fmt(row.dist_to_opt),
            _fmt(row.gate_open),
            _fmt(row.L_est),
            "1" if row.diverged else "0",
        ]
        if include_x:
            if row.x is None:
                fields += [""] * record.dim
            else:
                fields += [repr(float(v)) for v in row.x]
        lines.append(",".join(fields))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trajectory_csv(path: str | Path) -> list[dict]:
    """Parse a trajectory CSV back into dict rows (floats where present)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln]
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        values = line.split(",")
        row: dict = {}
        for key, raw in zip(header, values):
            if raw == "":
                row[key] = None
            elif key == "t":
                row[key] = int(raw)
            elif key in ("gate_open", "diverged"):
                row[key] = raw == "1"
            else:
                row[key] = float(raw)
        rows.append(row)
    return rows


def _make_row(t: int, x: ParamVector, g: ParamVector, obj, result) -> TrajectoryRow:
    optimum = obj.optimum
    diags = result.diagnostics if result is not None else None
    state = result.state if result is not None else None
    v_norm = None
    sqrt_vmax_hat = None
    max_eff_lr = None
    gate_open = None
    l_est = None
    if diags is not None and diags.v_hat_used is not None:
        v_norm = norm2(state.v)
        sqrt_vmax_hat = math.sqrt(float(np.max(diags.v_hat_used.data)))
        max_eff_lr = float(np.max(diags.effective_lr.data))
    if diags is not None and diags.gate_open is not None:
        gate_open = diags.gate_open
        l_est = state.L
    return TrajectoryRow(
        t=t,
        x=x,
        g=g,
        f=obj.value(x),
        grad_norm=norm2(g),
        v_norm=v_norm,
        sqrt_vmax_hat=sqrt_vmax_hat,
        max_eff_lr=max_eff_lr,
        dist_to_opt=norm2(x - optimum) if optimum is not None else None,
        gate_open=gate_open,
        L_est=l_est,
    )


def run_experiment(cfg: ExperimentConfig) -> TrajectoryRecord:
    """Execute ``cfg.steps`` optimizer steps from x0, recording every
    ``record_every``-th step plus the initial and final points. A non-finite
    iterate or evaluation terminates the run with a divergence marker row
    instead of raising."""
    obj = cfg.build_objective()
    record = TrajectoryRecord(cfg.objective, cfg.optimizer, obj.dim)
    hp = cfg.hyper
    x = cfg.x0
    state = OptimizerState.initial(obj.dim, L0=hp.L0)
    reuse_gradient = cfg.noise_sigma == 0.0
    step_fn = STEP_FUNCTIONS[cfg.optimizer]

    def fresh_view():
        return obj.step_instance() if isinstance(obj, NoisyObjective) else obj

    with np.errstate(over="ignore", invalid="ignore"):
        view = fresh_view()
        g = view.gradient(x)
        record.rows.append(_make_row(0, x, g, obj, None))

        for t in range(1, cfg.steps + 1):
            try:
                if cfg.optimizer == "adafix":
                    result = adafix_step(x, g, state, hp, view)
                else:
                    result = step_fn(x, g, state, hp)
                x = result.x_next
                state = result.state
                if reuse_gradient and result.g_next is not None:
                    g = result.g_next
                else:
                    view = fresh_view()
                    g = view.gradient(x)
                if t % cfg.record_every == 0 or t == cfg.steps:
                    record.rows.append(_make_row(t, x, g, obj, result))
            except NonFiniteError:
                record.rows.append(
                    TrajectoryRow(
                        t=t, x=None, g=None, f=None, grad_norm=None, v_norm=None,
                        sqrt_vmax_hat=None, max_eff_lr=None, dist_to_opt=None,
                        gate_open=None, L_est=None, diverged=True,
                    )
                )
                break

    if cfg.output_path:
        export_csv(record, cfg.output_path)
    return record


def compare_optimizers(
    cfgs: Sequence[ExperimentConfig], radius: float | None = None
) -> dict:
    """Run several configs sharing one objective and x0; summarize each by
    final distance, closest approach, escape status and max effective LR."""
    if len(cfgs) < 2:
        raise ConfigError("compare needs at least 2 configs")
    first = cfgs[0]
    for cfg in cfgs[1:]:
        if (
            cfg.objective != first.objective
            or dict(cfg.objective_params) != dict(first.objective_params)
            or cfg.x0 != first.x0
        ):
            raise ConfigError("compare configs must share objective and x0")
    obj = first.build_objective()
    if radius is None:
        radius = obj.escape_radius
    results = []
    for cfg in cfgs:
        record = run_experiment(cfg)
        dists = record.distances()
        eff = [r.max_eff_lr for r in record.rows if r.max_eff_lr is not None]
        escaped = None
        first_escape = None
        if radius is not None and obj.optimum is not None and record.positions():
            report = analysis.detect_escape(
                record.positions(), obj.optimum, radius, steps=record.steps()
            )
            escaped = report.escaped
            first_escape = report.first_escape_step
        results.append(
            {
                "optimizer": cfg.optimizer,
                "final_dist": dists[-1] if dists else None,
                "min_dist": min(dists) if dists else None,
                "escaped": escaped,
                "first_escape_step": first_escape,
                "max_eff_lr": max(eff) if eff else None,
                "diverged": record.diverged,
            }
        )
    return {
        "objective": first.objective,
        "x0": list(first.x0),
        "radius": radius,
        "results": results,
    }


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------

SUITE_KINDS = ("recede_bound", "gradients", "optimizer_properties")


def run_verification_suite(kind: str, seed: int = 0, n_cases: int = 1000) -> dict:
    """Execute one randomized property suite and return a JSON-able report
    with per-case inputs, observations and pass flags."""
    if n_cases < 1:
        raise ConfigError(f"n_cases must be >= 1, got {n_cases}")
    if kind == "recede_bound":
        return _suite_recede_bound(seed, n_cases)
    if kind == "gradients":
        return _suite_gradients(seed, n_cases)
    if kind == "optimizer_properties":
        return _suite_optimizer_properties(seed, n_cases)
    raise ConfigError(f"unknown suite {kind!r}; expected one of {SUITE_KINDS}")


def _suite_recede_bound(seed: int, n_cases: int) -> dict:
    """Randomized single-step recede checks on isotropic quadratics.

    Each case draws curvature c, dimension, a point at distance D from the
    optimum, a correlation level delta in (0, c), a rate eta, and a positive
    v_diag capped so sqrt(max v) <= bound * (1 - 1e-9) at the drawn delta.
    It then checks (a) the distance claim via the single-step oracle, (b)
    sharpness of the scalar inequality at bound*(1 -/+ 1e-6), and (c) the
    same distance claim with v capped by the bound at the instance's tight
    correlation ratio c, which is the level at which the scalar argument is
    actually valid.
    """
    rng = Rng(seed)
    cases = []
    for _ in range(n_cases):
        c = float(rng.uniform(0.5, 5.0))
        dim = int(rng.integers(0, 3))
        dim = (1, 2, 5)[dim]
        x_star = ParamVector(rng.standard_normal(dim))
        direction = rng.standard_normal(dim)
        direction = direction / np.linalg.norm(direction)
        dist = float(rng.uniform(0.1, 10.0))
        x = ParamVector(x_star.data + dist * direction)
        delta = float(rng.uniform(0.0, c))
        if delta == 0.0:  # measure-zero draw; the bound needs delta > 0
            delta = c / 2.0
        eta = float(rng.uniform(0.01, 1.0))
        objective = opc_quadratic(c, x_star)
        g = objective.gradient(x)
        grad_norm = norm2(g)

        bound = analysis.recede_bound(x, x_star, g, delta, eta)
        cap = bound * (1.0 - 1e-9)
        sqrt_v = np.maximum(rng.uniform(0.0, 1.0, dim) * cap, cap * 1e-12)
        v_diag = ParamVector(sqrt_v**2)
        receded = analysis.verify_recede(objective, x, v_diag, delta, eta)

        holds_below = (
            analysis.recede_inequality_margin(
                bound * (1.0 - 1e-6), dist, grad_norm, delta, eta
            )
            >= 0.0
        )
        fails_above = (
            analysis.recede_inequality_margin(
                bound * (1.0 + 1e-6), dist, grad_norm, delta, eta
            )
            < 0.0
        )

        bound_tight = analysis.recede_bound(x, x_star, g, c, eta)
        cap_tight = bound_tight * (1.0 - 1e-9)
        sqrt_v_tight = np.maximum(
            rng.uniform(0.0, 1.0, dim) * cap_tight, cap_tight * 1e-12
        )
        receded_tight = analysis.verify_recede(
            objective, x, ParamVector(sqrt_v_tight**2), delta, eta
        )

        cases.append(
            {
                "config": {
                    "c": c,
                    "dim": dim,
                    "delta": delta,
                    "eta": eta,
                    "dist": dist,
                    "grad_norm": grad_norm,
                },
                "bound": bound,
                "observed": {
                    "sqrt_vmax": float(sqrt_v.max()),
                    "receded": bool(receded),
                    "scalar_holds_below": bool(holds_below),
                    "scalar_fails_above": bool(fails_above),
                },
                "pass": bool(receded),
                "tight": {"bound": bound_tight, "pass": bool(receded_tight)},
            }
        )
    n_failed = sum(1 for case in cases if not case["pass"])
    return {
        "kind": "recede_bound",
        "criterion": "one generic adaptive step with sqrt(max v) <= bound*(1-1e-9) "
        "must not decrease the squared distance to the optimum (1e-12 rel slack)",
        "seed": seed,
        "n_cases": n_cases,
        "passed": n_failed == 0,
        "n_failed": n_failed,
        "scalar_sharpness_passed": all(
            case["observed"]["scalar_holds_below"] and case["observed"]["scalar_fails_above"]
            for case in cases
        ),
        "tight_passed": all(case["tight"]["pass"] for case in cases),
        "tight_n_failed": sum(1 for case in cases if not case["tight"]["pass"]),
        "cases": cases,
    }


def _gradient_check_instances() -> list[tuple[Objective, float]]:
    """Registry objectives paired with the sampling radius for probe points."""
    return [
        (bowl(), 2.0),
        (opc_quadratic(1.0, ParamVector([0.0, 0.0])), 5.0),
        (opc_quadratic(3.0, ParamVector([1.0, -2.0, 0.5])), 5.0),
        (anisotropic_quadratic(ParamVector([4.0, 1.0])), 5.0),
        (anisotropic_quadratic(ParamVector([2.5, 0.5, 1.0, 7.0, 3.0])), 5.0),
    ]


def _suite_gradients(seed: int, n_points: int) -> dict:
    """Analytic gradients against the central-difference oracle."""
    from .numerics import fd_gradient

    rng = Rng(seed)
    entries = []
    for objective, radius in _gradient_check_instances():
        worst = 0.0
        for _ in range(n_points):
            direction = rng.standard_normal(objective.dim)
            direction = direction / max(np.linalg.norm(direction), 1e-300)
            r = radius * float(rng.uniform(0.0, 1.0)) ** (1.0 / objective.dim)
            x = ParamVector(direction * r)
            analytic = objective.gradient(x)
            numeric = fd_gradient(objective, x)
            scale = max(norm2(analytic), 1e-12)
            worst = max(worst, norm2(numeric - analytic) / scale)
        entries.append(
            {
                "config": {
                    "objective": objective.name,
                    "dim": objective.dim,
                    "n_points": n_points,
                },
                "observed": {"max_rel_err": worst},
                "pass": worst < 1e-6,
            }
        )
    return {
        "kind": "gradients",
        "criterion": "analytic gradient matches central differences with "
        "relative error < 1e-6 at every sampled point",
        "seed": seed,
        "n_cases": n_points,
        "passed": all(e["pass"] for e in entries),
        "objectives": entries,
    }


def _random_hyper(rng: Rng) -> HyperParams:
    return HyperParams(
        eta=float(rng.uniform(0.001, 0.2)),
        beta1=float(rng.uniform(0.0, 0.95)),
        beta2=float(rng.uniform(0.9, 0.9999)),
    )


def _suite_optimizer_properties(seed: int, n_runs: int, n_steps: int = 1000) -> dict:
    """Randomized 1000-step runs checking the structural optimizer invariants."""
    rng = Rng(seed)
    checks = {
        "second_momentum_nonnegative": True,
        "amsgrad_vhat_monotone": True,
        "adabound_band_containment": True,
        "adafix_frozen_bits": True,
        "adafix_L_monotone": True,
        "first_step_magnitude": True,
    }

    for _ in range(n_runs):
        dim = int(rng.integers(1, 6))
        hp = _random_hyper(rng)

        # gradient-stream runs for the objective-free optimizers
        for name in ("sgdm", "adam", "amsgrad", "adabound"):
            state = OptimizerState.initial(dim)
            x = ParamVector(rng.standard_normal(dim))
            prev_vhat = None
            for step_index in range(n_steps):
                scale = 10.0 ** float(rng.uniform(-2.0, 2.0))
                g = ParamVector(scale * rng.standard_normal(dim))
                result = STEP_FUNCTIONS[name](x, g, state, hp)
                x, state = result.x_next, result.state
                if np.any(state.v.data < 0.0):
                    checks["second_momentum_nonnegative"] = False
                diags = result.diagnostics
                if name == "amsgrad":
                    vhat = diags.v_hat_used.data
                    if prev_vhat is not None and np.any(vhat < prev_vhat):
                        checks["amsgrad_vhat_monotone"] = False
                    prev_vhat = vhat
                if name == "adabound":
                    lo, hi = hp.adabound_band(state.t)
                    eff = diags.effective_lr.data
                    if np.any(eff < lo - 1e-12) or np.any(eff > hi + 1e-12):
                        checks["adabound_band_containment"] = False
        # first-step magnitude, checked on fresh states with nonzero gradients
        for name in ("adam", "amsgrad"):
            g = ParamVector(10.0 ** float(rng.uniform(-3.0, 3.0)) * rng.standard_normal(dim))
            x0 = ParamVector(rng.standard_normal(dim))
            result = STEP_FUNCTIONS[name](x0, g, OptimizerState.initial(dim), hp)
            delta_x = np.abs(result.x_next.data - x0.data)
            nonzero = g.data != 0.0
            if np.any(delta_x[nonzero] > hp.eta * (1.0 + 1e-6)):
                checks["first_step_magnitude"] = False

        # adafix on a noisy quadratic (needs an objective for the extra gradient)
        diag = ParamVector(rng.uniform(0.5, 5.0, dim))
        objective = NoisyObjective(
            anisotropic_quadratic(diag), float(rng.uniform(0.1, 0.5)), rng.spawn()
        )
        state = OptimizerState.initial(dim, L0=0.0)
        x = ParamVector(rng.standard_normal(dim))
        view = objective.step_instance()
        g = view.gradient(x)
        for _ in range(n_steps):
            prev_state = state
            result = adafix_step(x, g, state, hp, view)
            x, state = result.x_next, result.state
            diags = result.diagnostics
            if np.any(state.v.data < 0.0):
                checks["second_momentum_nonnegative"] = False
            if not diags.gate_open:
                if state.v is not prev_state.v and not np.array_equal(
                    state.v.data, prev_state.v.data
                ):
                    checks["adafix_frozen_bits"] = False
                if state.v_frozen_hat is not prev_state.v_frozen_hat and not np.array_equal(
                    state.v_frozen_hat.data, prev_state.v_frozen_hat.data
                ):
                    checks["adafix_frozen_bits"] = False
            if state.L < prev_state.L:
                checks["adafix_L_monotone"] = False
            view = objective.step_instance()
            g = view.gradient(x)

        # adafix first-step magnitude with the default open gate
        gfix = ParamVector(rng.standard_normal(dim))
        x0 = ParamVector(rng.standard_normal(dim))
        base = anisotropic_quadratic(diag)
        result = adafix_step(x0, gfix, OptimizerState.initial(dim, L0=0.0), hp, base)
        delta_x = np.abs(result.x_next.data - x0.data)
        nonzero = gfix.data != 0.0
        if np.any(delta_x[nonzero] > hp.eta * (1.0 + 1e-6)):
            checks["first_step_magnitude"] = False

    return {
        "kind": "optimizer_properties",
        "criterion": "structural step invariants hold over randomized 1000-step runs",
        "seed": seed,
        "n_cases": n_runs,
        "n_steps": n_steps,
        "passed": all(checks.values()),
        "checks": checks,
    }
