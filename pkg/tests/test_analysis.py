"""Recede bound against an independent root-finder, single-step distance
oracle, convexity checks against grid scans, smoothness and escape logic."""

import math

import numpy as np
import pytest

from adafix import (
    DegenerateInput,
    DivisionByZero,
    HypothesisViolated,
    InsufficientData,
    InvalidParameter,
    InvalidRegion,
    ParamVector,
    Rng,
    anisotropic_quadratic,
    bowl,
    check_opc,
    detect_escape,
    effective_lr,
    estimate_L,
    estimate_delta,
    opc_quadratic,
    recede_bound,
    recede_bound_literal,
    recede_inequality_margin,
    verify_recede,
)


def bisect_root(fn, lo, hi, iters=200):
    """Independent bisection root-finder for a decreasing function."""
    f_lo, f_hi = fn(lo), fn(hi)
    assert f_lo > 0 > f_hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if fn(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestRecedeBound:
    def test_unit_case_matches_bisection_oracle(self):
        # delta=D=G=eta=1: root of s^2 D^2 + 2 eta delta D^2 s - eta^2 G^2
        margin = lambda s: recede_inequality_margin(s, 1.0, 1.0, 1.0, 1.0)
        root = bisect_root(margin, 1e-9, 10.0)
        bound = recede_bound(
            ParamVector([1.0]), ParamVector([0.0]), ParamVector([1.0]), 1.0, 1.0
        )
        assert bound == pytest.approx(root, rel=1e-12)
        assert bound == pytest.approx(math.sqrt(2.0) - 1.0, rel=1e-15)

    def test_inequality_flips_exactly_at_bound(self):
        rng = np.random.default_rng(41)
        for _ in range(200):
            dist = float(rng.uniform(0.1, 10.0))
            grad_norm = float(rng.uniform(0.01, 20.0))
            delta = float(rng.uniform(1e-3, 5.0))
            eta = float(rng.uniform(0.01, 1.0))
            x = ParamVector([dist])
            bound = recede_bound(x, ParamVector([0.0]), ParamVector([grad_norm]), delta, eta)
            assert recede_inequality_margin(bound * (1 - 1e-6), dist, grad_norm, delta, eta) > 0
            assert recede_inequality_margin(bound * (1 + 1e-6), dist, grad_norm, delta, eta) < 0

    def test_small_delta_limit_is_eta_G_over_D(self):
        x, x_star = ParamVector([2.0, 0.0]), ParamVector([0.0, 0.0])
        g = ParamVector([3.0, 0.0])
        bound = recede_bound(x, x_star, g, 1e-15, 0.7)
        assert bound == pytest.approx(0.7 * 3.0 / 2.0, rel=1e-9)

    def test_zero_gradient_gives_zero(self):
        bound = recede_bound(
            ParamVector([1.0]), ParamVector([0.0]), ParamVector([0.0]), 1.0, 1.0
        )
        assert bound == 0.0

    def test_degenerate_distance(self):
        with pytest.raises(DegenerateInput):
            recede_bound(
                ParamVector([1.0]), ParamVector([1.0]), ParamVector([1.0]), 1.0, 1.0
            )

    def test_literal_form_coincides_only_at_unit_distance(self):
        x_star = ParamVector([0.0])
        g = ParamVector([2.0])
        delta = 0.5
        exact_d1 = recede_bound(ParamVector([1.0]), x_star, g, delta, 1.0)
        literal_d1 = recede_bound_literal(ParamVector([1.0]), x_star, g, delta)
        assert exact_d1 == pytest.approx(literal_d1, rel=1e-12)
        exact_d2 = recede_bound(ParamVector([2.0]), x_star, g, delta, 1.0)
        literal_d2 = recede_bound_literal(ParamVector([2.0]), x_star, g, delta)
        assert exact_d2 != pytest.approx(literal_d2, rel=1e-3)


class TestVerifyRecede:
    def setup_method(self):
        self.f = opc_quadratic(1.0, ParamVector([0.0, 0.0]))
        self.x = ParamVector([1.0, 0.0])
        self.g = self.f.gradient(self.x)

    def test_below_bound_distance_does_not_decrease(self):
        bound = recede_bound(self.x, self.f.optimum, self.g, 0.99, 1.0)
        s = bound / 2.0
        v_diag = ParamVector([s * s, s * s])
        assert verify_recede(self.f, self.x, v_diag, 0.99, 1.0) is True

    def test_far_above_bound_distance_decreases(self):
        bound = recede_bound(self.x, self.f.optimum, self.g, 0.99, 1.0)
        s = 100.0 * bound
        v_diag = ParamVector([s * s, s * s])
        assert verify_recede(self.f, self.x, v_diag, 0.99, 1.0) is False

    def test_hypothesis_checked_at_x(self):
        with pytest.raises(HypothesisViolated):
            verify_recede(self.f, self.x, ParamVector([1.0, 1.0]), 1.5, 1.0)

    def test_rejects_zero_v_entries(self):
        with pytest.raises(DegenerateInput):
            verify_recede(self.f, self.x, ParamVector([0.0, 1.0]), 0.5, 1.0)

    def test_rejects_point_at_optimum(self):
        with pytest.raises(DegenerateInput):
            verify_recede(
                self.f, ParamVector([0.0, 0.0]), ParamVector([1.0, 1.0]), 0.5, 1.0
            )


class TestCheckOpc:
    def test_bowl_holds_on_inner_annulus(self):
        # grid-scan oracle: min of 2 sin(u) over u=r^2 in [0.5, 2.0]
        us = np.linspace(0.5, 2.0, 20001)
        assert 2.0 * np.sin(us).min() > 0.5
        b = bowl()
        result = check_opc(
            b, b.optimum, 0.5,
            r_min=math.sqrt(0.5), r_max=math.sqrt(2.0),
            n_samples=1000, rng=Rng(11),
        )
        assert result.holds is True
        assert result.min_ratio > 0.5

    def test_bowl_violates_near_origin_for_large_delta(self):
        # near the origin 2 sin(r^2) ~ 2 r^2 -> 0, far below delta=1
        b = bowl()
        result = check_opc(
            b, b.optimum, 1.0,
            r_min=0.0, r_max=math.sqrt(0.1),
            n_samples=500, rng=Rng(12),
        )
        assert result.holds is False
        assert len(result.violations) == 500

    def test_quadratic_constant_ratio(self):
        f = opc_quadratic(2.0, ParamVector([0.0, 0.0]))
        result = check_opc(f, f.optimum, 1.9, 0.5, 3.0, 200, Rng(13))
        assert result.holds is True
        assert result.min_ratio == pytest.approx(2.0, rel=1e-12)

    def test_quadratic_holds_below_c_violates_above(self):
        rng = np.random.default_rng(100)
        for _ in range(100):
            c = float(rng.uniform(0.5, 5.0))
            f = opc_quadratic(c, ParamVector([0.0, 0.0]))
            below = float(rng.uniform(0.0, 0.999)) * c
            above = c * float(rng.uniform(1.001, 2.0))
            assert check_opc(f, f.optimum, below, 0.1, 2.0, 50, Rng(1)).holds
            result = check_opc(f, f.optimum, above, 0.1, 2.0, 50, Rng(2))
            assert not result.holds and len(result.violations) == 50

    def test_invalid_region(self):
        b = bowl()
        with pytest.raises(InvalidRegion):
            check_opc(b, b.optimum, 0.5, 2.0, 1.0, 10, Rng(0))
        with pytest.raises(InvalidRegion):
            check_opc(b, b.optimum, 0.5, 0.0, 1.0, 0, Rng(0))


class TestEstimateDelta:
    def test_quadratic_is_exact(self):
        f = opc_quadratic(3.0, ParamVector([0.0, 0.0]))
        est = estimate_delta(f, f.optimum, 0.1, 5.0, 500, Rng(21))
        assert est == pytest.approx(3.0, rel=1e-12)

    def test_bowl_annulus_min_is_at_inner_edge(self):
        # analytic: min over r^2 in [0.5, 2.0] of 2 sin(r^2) = 2 sin(0.5)
        b = bowl()
        est = estimate_delta(
            b, b.optimum, math.sqrt(0.5), math.sqrt(2.0), 2000, Rng(22)
        )
        assert est == pytest.approx(2.0 * math.sin(0.5), abs=5e-3)
        assert est >= 2.0 * math.sin(0.5) - 1e-12  # sampled min can't undershoot

    def test_bowl_near_origin_approaches_zero(self):
        b = bowl()
        est = estimate_delta(b, b.optimum, 0.0, 0.1, 500, Rng(23))
        assert 0.0 < est < 0.03  # 2 sin(r^2) <= 2 * 0.01


class TestEstimateL:
    def test_axis_trajectory_recovers_eigenvalue(self):
        f = anisotropic_quadratic(ParamVector([4.0, 1.0]))
        xs = [ParamVector([float(k), 0.0]) for k in range(1, 5)]
        gs = [f.gradient(x) for x in xs]
        assert estimate_L(xs, gs) == pytest.approx(4.0, rel=1e-12)

    def test_never_exceeds_true_constant(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            dim = int(rng.integers(1, 6))
            diag = rng.uniform(0.5, 8.0, dim)
            f = anisotropic_quadratic(ParamVector(diag))
            xs = [ParamVector(rng.standard_normal(dim)) for _ in range(50)]
            gs = [f.gradient(x) for x in xs]
            assert estimate_L(xs, gs) <= float(diag.max()) * (1 + 1e-9)

    def test_reaches_most_of_true_constant_with_random_probes(self):
        rng = np.random.default_rng(32)
        for diag in ([4.0, 1.0], [2.5, 0.5, 1.0, 7.0, 3.0]):
            f = anisotropic_quadratic(ParamVector(diag))
            x = np.zeros(len(diag))
            xs, gs = [], []
            for _ in range(1001):
                xs.append(ParamVector(x))
                gs.append(f.gradient(ParamVector(x)))
                x = x + rng.standard_normal(len(diag))
            assert estimate_L(xs, gs) >= 0.9 * max(diag)

    def test_insufficient_data(self):
        f = anisotropic_quadratic(ParamVector([1.0]))
        x = ParamVector([1.0])
        with pytest.raises(InsufficientData):
            estimate_L([x], [f.gradient(x)])
        with pytest.raises(InsufficientData):
            estimate_L([x, x], [f.gradient(x), f.gradient(x)])


class TestEffectiveLr:
    def test_direct_formula(self):
        out = effective_lr(ParamVector([4.0, 0.01]), 0.5, 0.0)
        assert list(out) == [0.25, 5.0]

    def test_epsilon_floor(self):
        out = effective_lr(ParamVector([0.0]), 0.001, 1e-8)
        assert out[0] == pytest.approx(1e5)

    def test_linear_in_eta(self):
        v = ParamVector([4.0, 0.25, 9.0])
        base = effective_lr(v, 0.1, 1e-8)
        scaled = effective_lr(v, 0.7, 1e-8)
        np.testing.assert_allclose(scaled.data, 7.0 * base.data, rtol=1e-15)

    def test_zero_denominator(self):
        with pytest.raises(DivisionByZero):
            effective_lr(ParamVector([0.0]), 0.1, 0.0)

    def test_negative_v_rejected(self):
        with pytest.raises(InvalidParameter):
            effective_lr(ParamVector([-1.0]), 0.1, 1e-8)


class TestDetectEscape:
    RADIUS = math.sqrt(math.pi)

    @staticmethod
    def _positions(distances):
        return [ParamVector([d, 0.0]) for d in distances]

    def test_escape_sequence(self):
        report = detect_escape(
            self._positions([0.9, 0.7, 1.2, 1.9]),
            ParamVector([0.0, 0.0]), self.RADIUS,
        )
        assert report.escaped is True
        assert report.first_escape_step == 3
        assert report.min_distance == pytest.approx(0.7)
        assert report.min_distance_step == 1

    def test_monotone_decrease_never_escapes(self):
        report = detect_escape(
            self._positions([1.5, 1.0, 0.5, 0.1]),
            ParamVector([0.0, 0.0]), self.RADIUS,
        )
        assert report.escaped is False
        assert report.first_escape_step is None
        assert report.min_distance == pytest.approx(0.1)

    def test_never_entering_is_not_escape(self):
        report = detect_escape(
            self._positions([2.0, 2.5, 3.0]),
            ParamVector([0.0, 0.0]), self.RADIUS,
        )
        assert report.escaped is False

    def test_append_invariance_after_escape(self):
        base = [0.9, 0.7, 1.2, 1.9]
        first = detect_escape(
            self._positions(base), ParamVector([0.0, 0.0]), self.RADIUS
        )
        extended = detect_escape(
            self._positions(base + [0.05, 5.0, 0.2]),
            ParamVector([0.0, 0.0]), self.RADIUS,
        )
        assert extended == first

    def test_step_labels_are_used(self):
        report = detect_escape(
            self._positions([0.9, 1.9]),
            ParamVector([0.0, 0.0]), self.RADIUS, steps=[10, 20],
        )
        assert report.first_escape_step == 20
        assert report.min_distance_step == 10

    def test_radius_must_be_positive(self):
        with pytest.raises(InvalidParameter):
            detect_escape(self._positions([1.0]), ParamVector([0.0, 0.0]), 0.0)
