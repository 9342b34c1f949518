"""Truncated Gaussian moments: quadrature vs closed forms and brackets."""

import math

import mpmath as mp
import numpy as np
import pytest

from lplab import (
    HalfMaxWindow,
    TruncationSpec,
    abs_moment,
    abs_tail,
    half_max_window,
    incomplete_integral,
    moment_bracket,
    moment_scale,
    trunc_moment_chi,
    trunc_moment_min,
)
from lplab.errors import DomainError


def closed_form(q: int, a: float) -> float:
    """Antiderivative values of ∫₀ᵃ x^q e^{-x²/2} dx for odd q and q=0."""
    if a == math.inf:
        if q == 0:
            return math.sqrt(math.pi / 2.0)
        if q == 1:
            return 1.0
        if q == 3:
            return 2.0
        if q == 5:
            return 8.0
    e = math.exp(-a * a / 2.0)
    if q == 0:
        return math.sqrt(math.pi / 2.0) * math.erf(a / math.sqrt(2.0))
    if q == 1:
        return 1.0 - e
    if q == 3:
        return 2.0 - (a * a + 2.0) * e
    if q == 5:
        return 8.0 - (a**4 + 4.0 * a * a + 8.0) * e
    raise AssertionError(q)


class TestTruncationSpec:
    def test_regimes(self):
        assert TruncationSpec(4.0, 3.0).regime == "low"  # q <= a^2
        assert TruncationSpec(9.0, 2.0).regime == "high"
        assert TruncationSpec(0.0, 1.0).regime == "low"

    def test_x_max(self):
        assert TruncationSpec(4.0, 10.0).x_max == 2.0
        assert TruncationSpec(4.0, 1.5).x_max == 1.5

    def test_validation(self):
        with pytest.raises(DomainError):
            TruncationSpec(-1.0, 1.0)
        with pytest.raises(DomainError):
            TruncationSpec(2.0, 0.0)
        with pytest.raises(DomainError):
            TruncationSpec(math.nan, 1.0)


class TestIncompleteIntegral:
    @pytest.mark.parametrize("q", [0, 1, 3, 5])
    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0, math.inf])
    def test_closed_forms(self, q, a):
        got = incomplete_integral(TruncationSpec(float(q), a))
        assert got.to_float() == pytest.approx(closed_form(q, a), rel=1e-9)

    @pytest.mark.parametrize(
        "q,a,expected",
        [
            (5.0, 2.0, 2.5865886705354923242),
            (4.0, 1.0, 0.1407505368259127151),
            (10.0, 3.0, 447.82386380869654648),
        ],
    )
    def test_frozen_noninteger_grid(self, q, a, expected):
        got = incomplete_integral(TruncationSpec(q, a))
        assert got.to_float() == pytest.approx(expected, rel=1e-10)

    def test_deep_log_domain(self):
        # values near e^1304 overflow floats; compare in the log
        got = incomplete_integral(TruncationSpec(500.0, 25.0))
        assert got.log == pytest.approx(1304.224094120092541515972, rel=1e-12)
        got2 = incomplete_integral(TruncationSpec(200.0, math.inf))
        assert got2.log == pytest.approx(430.4036849334921798422665, rel=1e-12)

    def test_monotone_in_a(self):
        vals = [
            incomplete_integral(TruncationSpec(6.0, a)).log for a in (1.0, 2.0, 3.0, math.inf)
        ]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_against_runtime_quadrature(self):
        mp.mp.dps = 30
        for q, a in [(2.5, 1.7), (13.0, 4.0), (37.5, math.inf)]:
            hi = mp.inf if a == math.inf else mp.mpf(a)
            ref = mp.quad(
                lambda x: mp.exp(q * mp.log(x) - x * x / 2), [0, mp.sqrt(q), hi]
            )
            got = incomplete_integral(TruncationSpec(q, a))
            assert got.log == pytest.approx(float(mp.log(ref)), rel=1e-11)


class TestHalfMaxWindow:
    def test_frozen_window(self):
        w = half_max_window(TruncationSpec(4.0, 10.0))
        assert w.x_max == pytest.approx(2.0, rel=1e-14)
        assert w.x_left == pytest.approx(1.233888349369101596, rel=1e-10)
        assert w.x_right == pytest.approx(2.8830265001213242063, rel=1e-10)
        assert w.f_max.log == pytest.approx(4.0 * math.log(2.0) - 2.0, rel=1e-13)

    def test_q_zero_degenerate_reported(self):
        w = half_max_window(TruncationSpec(0.0, 5.0))
        assert w.degenerate
        assert w.x_left == w.x_max == 0.0
        assert w.x_right == pytest.approx(1.177410022515474691, rel=1e-10)

    def test_truncation_clips_right_edge(self):
        w = half_max_window(TruncationSpec(4.0, 1.5))
        assert w.x_max == 1.5
        assert w.x_right == 1.5
        assert 0.0 < w.x_left < 1.5

    def test_half_value_at_edges(self):
        spec = TruncationSpec(10.0, math.inf)
        w = half_max_window(spec)
        for x in (w.x_left, w.x_right):
            log_f = 10.0 * math.log(x) - x * x / 2.0
            assert log_f == pytest.approx(w.f_max.log - math.log(2.0), abs=1e-8)

    def test_sandwich_on_grid(self):
        # 1/2 (x_r - x_l) f_max <= integral <= 2 (x_r - x_l) f_max
        for q in (2.0, 10.0, 50.0, 200.0):
            root = math.sqrt(q)
            for a in (root / 2.0, root, 2.0 * root, math.inf):
                spec = TruncationSpec(q, a)
                w = half_max_window(spec)
                integral = incomplete_integral(spec)
                lo = math.log(0.5 * w.width) + w.f_max.log
                hi = math.log(2.0 * w.width) + w.f_max.log
                assert lo <= integral.log <= hi, (q, a)


class TestTruncMoments:
    def test_chi_square_unit(self):
        assert trunc_moment_chi(TruncationSpec(2.0, math.inf)).to_float() == pytest.approx(
            1.0, rel=1e-12
        )

    def test_chi_matches_scaled_integral(self):
        spec = TruncationSpec(3.3, 2.2)
        got = trunc_moment_chi(spec)
        want = math.sqrt(2.0 / math.pi) * incomplete_integral(spec).to_float()
        assert got.to_float() == pytest.approx(want, rel=1e-13)

    @pytest.mark.parametrize(
        "q,a,expected",
        [
            (2.0, 1.0, 0.5160585509617133004),
            (7.0, 2.0, 11.29598505725307854),
        ],
    )
    def test_min_moment_frozen(self, q, a, expected):
        got = trunc_moment_min(TruncationSpec(q, a))
        assert got.to_float() == pytest.approx(expected, rel=1e-11)

    def test_min_moment_at_infinity_is_full_moment(self):
        for q in (1.0, 4.5, 12.0):
            got = trunc_moment_min(TruncationSpec(q, math.inf))
            assert got.log == pytest.approx(abs_moment(q).log, rel=1e-12)

    def test_min_moment_splits_at_cap(self):
        q, a = 5.0, 1.8
        got = trunc_moment_min(TruncationSpec(q, a))
        want = (
            trunc_moment_chi(TruncationSpec(q, a)).to_float()
            + a**q * abs_tail(a).to_float()
        )
        assert got.to_float() == pytest.approx(want, rel=1e-12)

    def test_min_moment_nondecreasing_in_a(self):
        for q in (1.0, 6.0, 30.0):
            vals = [
                trunc_moment_min(TruncationSpec(q, a)).log
                for a in (0.5, 1.0, 2.0, 4.0, math.inf)
            ]
            assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_min_moment_increasing_in_q_above_one(self):
        # for a > 1 the capped value min(a,|g|)^q gains mass as q grows
        vals = [
            trunc_moment_min(TruncationSpec(q, 3.0)).log for q in (2.0, 4.0, 8.0, 16.0)
        ]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestMomentScale:
    def test_low_branch(self):
        scale, regime = moment_scale(TruncationSpec(4.0, math.inf))
        assert regime == "low"
        assert scale.to_float() == pytest.approx((4.0 / math.e) ** 2, rel=1e-12)

    def test_high_branch(self):
        scale, regime = moment_scale(TruncationSpec(9.0, 2.0))
        assert regime == "high"
        assert scale.to_float() == pytest.approx(2**10 * math.exp(-2.0) / 7.0, rel=1e-12)

    def test_branches_comparable_at_crossover(self):
        # at q = a^2 both branch formulas describe the same mass
        q = 9.0
        low, _ = moment_scale(TruncationSpec(q, 3.0 + 1e-12))
        high, _ = moment_scale(TruncationSpec(q, 3.0 - 1e-12))
        assert abs(low.log - high.log) < 1.0


class TestMomentBracket:
    def test_contains_quadrature_default_factors(self):
        for q in (1.0, 5.0, 40.0, 300.0, 600.0):
            for a in (1.0, 3.0, 10.0, 30.0):
                spec = TruncationSpec(q, a)
                bracket = moment_bracket(spec)
                value = trunc_moment_chi(spec)
                assert bracket.contains(value), (q, a)

    def test_records_constants(self):
        bracket = moment_bracket(TruncationSpec(2.0, 2.0))
        assert "moment_bracket_lo" in bracket.constants_used
        assert "moment_bracket_hi" in bracket.constants_used

    def test_explicit_factors_override(self):
        spec = TruncationSpec(2.0, 2.0)
        wide = moment_bracket(spec, factors=(1e-6, 1e6))
        tight = moment_bracket(spec, factors=(0.999999, 1.000001))
        assert wide.upper.log - wide.lower.log > tight.upper.log - tight.lower.log
