"""Scalar Gaussian primitives: CDF, tails, quantiles, moments, p-norms.

Reference values were produced with 40-digit arithmetic (erf/erfc and
direct quadrature) and are frozen here as literals.
"""

import math

import mpmath as mp
import numpy as np
import pytest

from lplab import (
    abs_cdf,
    abs_moment,
    abs_tail,
    abs_tail_log,
    lp_norm,
    lp_norm_rows,
    mills_bounds,
    quantile,
    quantile_approx,
    quantile_tail,
    upper_quantile,
)
from lplab.errors import DomainError
from lplab.gaussian import log_abs_density


class TestAbsCdf:
    @pytest.mark.parametrize(
        "t,expected",
        [
            (0.5, 0.38292492254802620728),
            (1.0, 0.68268949213708589717),
            (2.0, 0.9544997361036415856),
            (3.0, 0.99730020393673981095),
        ],
    )
    def test_frozen_values(self, t, expected):
        assert abs_cdf(t) == pytest.approx(expected, rel=1e-14)

    def test_at_zero(self):
        assert abs_cdf(0.0) == 0.0

    def test_monotone(self):
        grid = np.linspace(0.0, 10.0, 200)
        vals = [abs_cdf(float(t)) for t in grid]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            abs_cdf(-0.1)


class TestAbsTail:
    @pytest.mark.parametrize(
        "t,expected_log",
        [
            (1.0, -1.147874464449318196354),
            (2.0, -3.090037153122086639418),
            (5.0, -14.37185121342878042667),
            (10.0, -52.53813796995252526893),
            (30.0, -453.6280967757832517979),
            (50.0, -1254.138213958859955945),
            (100.0, -5004.831061513645143317),
        ],
    )
    def test_frozen_log_values(self, t, expected_log):
        # spans the erfc branch and the far-tail asymptotic branch
        assert abs_tail_log(t) == pytest.approx(expected_log, rel=1e-13)

    def test_tail_plus_cdf_is_one(self):
        for t in (0.3, 1.0, 2.5, 4.0):
            assert abs_cdf(t) + abs_tail(t).to_float() == pytest.approx(1.0, rel=1e-13)

    def test_tail_at_zero(self):
        assert abs_tail(0.0).to_float() == 1.0

    def test_branches_agree_near_switch(self):
        # the implementation changes evaluation strategy in the deep tail;
        # both sides of the switch must track 30-digit erfc
        mp.mp.dps = 30
        for t in np.linspace(25.0, 35.0, 41):
            ref = float(mp.log(mp.erfc(mp.mpf(float(t)) / mp.sqrt(2))))
            assert abs_tail_log(float(t)) == pytest.approx(ref, rel=1e-13)


class TestQuantiles:
    @pytest.mark.parametrize(
        "tau,expected",
        [
            (1.0, 0.0),
            (0.5, 0.6744897501960817432),
            (1e-3, 3.2905267314918947932),
            (1e-6, 4.8916384756985903862),
            (1e-12, 7.130506848171324458),
        ],
    )
    def test_quantile_tail_frozen(self, tau, expected):
        assert quantile_tail(tau) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize(
        "n,expected",
        [
            (100, 2.575829303548900761),
            (1000, 3.2905267314918947932),
            (10**4, 3.890591886413093967),
            (10**6, 4.8916384756985903862),
        ],
    )
    def test_upper_quantile_frozen(self, n, expected):
        assert upper_quantile(n) == pytest.approx(expected, rel=1e-13)

    def test_round_trip_through_tail(self):
        for t in np.linspace(0.05, 8.0, 60):
            tau = abs_tail(float(t)).to_float()
            assert quantile_tail(tau) == pytest.approx(float(t), abs=1e-10)

    def test_quantile_matches_tail_parameterization(self):
        for alpha in (0.1, 0.5, 0.9, 0.999, 1 - 1e-9):
            assert quantile(alpha) == pytest.approx(quantile_tail(1.0 - alpha), abs=1e-11)

    def test_rejects_out_of_range(self):
        with pytest.raises(DomainError):
            quantile_tail(-0.1)
        with pytest.raises(DomainError):
            quantile_tail(1.5)

    def test_approx_expansion_value(self):
        assert quantile_approx(10**4, 1) == pytest.approx(4.033269196414206, rel=1e-12)

    def test_approx_tracks_true_quantile(self):
        # expansion error shrinks with n; cap it and require monotone decay
        errs = [
            abs(quantile_approx(n, 1) - upper_quantile(n))
            for n in (10**3, 10**4, 10**6, 10**8)
        ]
        assert max(errs) < 0.2
        assert all(b < a for a, b in zip(errs, errs[1:]))

    def test_approx_decreasing_in_i(self):
        vals = [quantile_approx(10**6, i) for i in (1, 2, 5, 20)]
        assert all(b < a for a, b in zip(vals, vals[1:]))


class TestMills:
    def test_strict_bracketing(self):
        for t in np.linspace(1.01, 8.0, 20):
            br = mills_bounds(float(t))
            tail = abs_tail(float(t))
            assert br.lower < tail < br.upper

    def test_bounds_tighten(self):
        # relative width of the bracket decays like 1/t^2
        widths = []
        for t in (2.0, 4.0, 8.0):
            br = mills_bounds(t)
            widths.append(br.upper.to_float() / br.lower.to_float() - 1.0)
        assert widths[0] > widths[1] > widths[2]
        assert widths[2] < 0.02


class TestAbsMoment:
    @pytest.mark.parametrize(
        "p,expected",
        [
            (1.0, 0.79788456080286535588),
            (2.0, 1.0),
            (3.0, 1.5957691216057307118),
            (4.0, 3.0),
            (6.0, 15.0),
            (7.0, 38.298458918537537082),
        ],
    )
    def test_frozen_values(self, p, expected):
        assert abs_moment(p).to_float() == pytest.approx(expected, rel=1e-13)

    def test_noninteger_p_against_quadrature(self):
        mp.mp.dps = 30
        for p in (0.5, 2.7, 13.3):
            ref = mp.quad(
                lambda x: mp.sqrt(2 / mp.pi) * x**p * mp.exp(-(x**2) / 2), [0, mp.inf]
            )
            assert abs_moment(p).to_float() == pytest.approx(float(ref), rel=1e-12)

    def test_large_p_stays_in_log_domain(self):
        # (p/e)^{p/2}-type growth overflows floats near p ~ 300; the log
        # representation must stay finite and match Stirling-free formula
        v = abs_moment(600.0)
        mp.mp.dps = 40
        ref = mp.log(2 ** mp.mpf(300) * mp.gamma(mp.mpf(601) / 2) / mp.sqrt(mp.pi))
        assert v.log == pytest.approx(float(ref), rel=1e-13)


class TestLpNorm:
    def test_hand_values(self):
        assert lp_norm([3.0, 4.0], 2.0) == pytest.approx(5.0, rel=1e-15)
        assert lp_norm([3.0, -4.0], 1.0) == pytest.approx(7.0, rel=1e-15)
        assert lp_norm([3.0, -4.0], math.inf) == 4.0

    def test_huge_entries_large_p(self):
        # |x|^p overflows in linear space; result must survive via logs
        x = [1e200, -1e200]
        got = lp_norm(x, 400.0)
        assert got == pytest.approx(1e200 * 2 ** (1 / 400.0), rel=1e-12)

    def test_tiny_entries(self):
        x = [1e-220, 1e-220]
        assert lp_norm(x, 3.0) == pytest.approx(1e-220 * 2 ** (1 / 3.0), rel=1e-12)

    def test_zero_vector(self):
        assert lp_norm([0.0, 0.0], 2.5) == 0.0

    def test_rows_matches_scalar(self):
        rows = np.array([[1.0, -2.0, 3.0], [0.5, 0.0, -0.25]])
        for p in (1.0, 2.0, 7.5, math.inf):
            got = lp_norm_rows(rows, p)
            want = [lp_norm(list(r), p) for r in rows]
            assert got == pytest.approx(want, rel=1e-12)

    def test_rejects_p_below_one(self):
        with pytest.raises(DomainError):
            lp_norm([1.0], 0.5)


def test_log_abs_density():
    # sqrt(2/pi) e^{-1/2} at t=1
    expected = 0.5 * math.log(2.0 / math.pi) - 0.5
    assert log_abs_density(1.0) == pytest.approx(expected, rel=1e-14)
