"""Scalar machinery for the absolute value of a standard Gaussian.

Everything downstream is built on four primitives: the CDF of |g|, its
upper tail with full relative precision far into the tail, the inverse of
both (quantiles), and absolute moments.  The tail is the delicate one:
quantiles of order 1 - 1/n are needed for n up to 1e8 and beyond, and the
deviation tests probe tails of size e^{-800}, so the tail is evaluated in
two branches and exposed on the log scale.

Also hosts the overflow-safe lp norm used by every sampler.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .logdomain import BoundBracket, LogValue, ZERO

SQRT_2 = math.sqrt(2.0)
# log sqrt(2/pi), the normalizing constant of the |g| density
_LOG_SQRT_2_OVER_PI = 0.5 * math.log(2.0 / math.pi)
# erfc branch holds full relative precision well past here; the asymptotic
# series takes over long before double underflow at t ~ 38.6
_TAIL_SERIES_CUTOFF = 30.0


def _require_real(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value):
        raise DomainError(f"{name} must not be NaN")
    return value


def abs_cdf(t: float) -> float:
    """P{|g| <= t} for a standard Gaussian g."""
    t = _require_real("t", t)
    if t < 0.0:
        raise DomainError("abs_cdf requires t >= 0")
    if math.isinf(t):
        return 1.0
    return math.erf(t / SQRT_2)


def log_abs_density(t: float) -> float:
    """log of the density sqrt(2/pi)·e^{-t²/2} of |g| at t >= 0."""
    return _LOG_SQRT_2_OVER_PI - 0.5 * t * t


def abs_tail_log(t: float) -> float:
    """log P{|g| >= t}, accurate in relative terms for all t >= 0.

    Below the cutoff the complementary error function is exact enough;
    beyond it the classical alternating asymptotic expansion
    sqrt(2/pi)·e^{-t²/2}/t · (1 - 1/t² + 3/t⁴ - ...) converges to full
    double precision, with truncation error below the first omitted term.
    """
    t = _require_real("t", t)
    if t < 0.0:
        raise DomainError("abs_tail_log requires t >= 0")
    if t == 0.0:
        return 0.0
    if math.isinf(t):
        return -math.inf
    if t <= _TAIL_SERIES_CUTOFF:
        return math.log(math.erfc(t / SQRT_2))
    inv_t2 = 1.0 / (t * t)
    term = 1.0
    total = 1.0
    for k in range(1, 60):
        term *= -(2 * k - 1) * inv_t2
        total += term
        if abs(term) < 1e-18 * total:
            break
    return _LOG_SQRT_2_OVER_PI - 0.5 * t * t - math.log(t) + math.log(total)


def abs_tail(t: float) -> LogValue:
    """P{|g| >= t} as a log-domain value."""
    return LogValue(abs_tail_log(t))


def quantile_tail(tail: float) -> float:
    """The t >= 0 with P{|g| >= t} = tail, for tail in (0, 1].

    Parameterizing by the tail instead of the CDF value keeps full
    precision for quantiles of order 1 - 1/n: the caller knows 1/n
    exactly, while 1 - 1/n rounds.  Safeguarded Newton on the log-tail,
    which is smooth, monotone, and has derivative -density/tail.
    """
    tail = _require_real("tail", tail)
    if not 0.0 < tail <= 1.0:
        raise DomainError("quantile_tail requires tail in (0, 1]")
    if tail == 1.0:
        return 0.0
    target = math.log(tail)
    lo, hi = 0.0, 10.0
    while abs_tail_log(hi) > target:
        lo, hi = hi, hi * 2.0
        if hi > 1e6:  # pragma: no cover - tail would be below e^{-5e11}
            raise DomainError("tail too small to bracket")
    t = min(max(math.sqrt(2.0 * max(-target, 0.5)), lo), hi)
    for _ in range(80):
        h = abs_tail_log(t) - target
        if h > 0.0:
            lo = t
        else:
            hi = t
        if abs(h) <= 1e-13:
            break
        slope = -math.exp(log_abs_density(t) - abs_tail_log(t))
        step = h / slope
        t_new = t - step
        if not lo < t_new < hi:
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) <= 1e-15 * (1.0 + t):
            t = t_new
            break
        t = t_new
    return t


def quantile(alpha: float) -> float:
    """The t with P{|g| <= t} = alpha, for alpha in [0, 1).

    Accepts the CDF value; for alpha very close to 1 the conversion
    1 - alpha is limited by double spacing near 1, so callers that know
    the tail directly should use quantile_tail.
    """
    alpha = _require_real("alpha", alpha)
    if not 0.0 <= alpha < 1.0:
        raise DomainError("quantile requires alpha in [0, 1)")
    if alpha == 0.0:
        return 0.0
    return quantile_tail(1.0 - alpha)


def upper_quantile(n: int) -> float:
    """The quantile of order 1 - 1/n of |g|, via the exact tail 1/n."""
    if n < 2:
        raise DomainError("upper_quantile requires n >= 2")
    return quantile_tail(1.0 / n)


def quantile_approx(n: int, i: int) -> float:
    """Closed-form approximation to the quantile of order 1 - i/n.

    Returns sqrt(2·log(n/i)) - (log log(n/i)) / (2·sqrt(2·log(n/i))).
    Valid when log(n/i) > 1; the discrepancy against the exact quantile
    is of order 1/sqrt(log(n/i)) and is checked against a configured
    constant by callers.
    """
    n = int(n)
    i = int(i)
    if i < 1 or 2 * i > n:
        raise DomainError("quantile_approx requires 1 <= i <= n/2")
    ratio_log = math.log(n / i)
    if ratio_log <= 1.0:
        raise DomainError("quantile_approx requires log(n/i) > 1")
    w = math.sqrt(2.0 * ratio_log)
    return w - 0.5 * math.log(ratio_log) / w


def mills_bounds(t: float) -> BoundBracket:
    """Two-sided elementary bounds on the tail P{|g| >= t}.

    Lower: sqrt(2/pi)(1/t - 1/t³)e^{-t²/2}, clamped to 0 for t <= 1.
    Upper: sqrt(2/pi)(1/t)e^{-t²/2}.  Strict for t > 1.
    """
    t = _require_real("t", t)
    if t <= 0.0:
        raise DomainError("mills_bounds requires t > 0")
    common = _LOG_SQRT_2_OVER_PI - 0.5 * t * t
    upper = LogValue(common - math.log(t))
    if t <= 1.0:
        lower = ZERO
    else:
        lower = LogValue(common + math.log(1.0 / t - 1.0 / t ** 3))
    return BoundBracket(lower, upper)


def abs_moment(p: float) -> LogValue:
    """E|g|^p = (1/sqrt(pi))·2^{p/2}·Gamma((p+1)/2), for p > -1."""
    p = _require_real("p", p)
    if math.isinf(p):
        raise DomainError("abs_moment requires finite p")
    if p <= -1.0:
        raise DomainError("abs_moment requires p > -1")
    log_val = 0.5 * p * math.log(2.0) + math.lgamma(0.5 * (p + 1.0)) - 0.5 * math.log(math.pi)
    return LogValue(log_val)


def _validate_p(p: float) -> float:
    p = _require_real("p", p)
    if p < 1.0:
        raise DomainError("lp norms require p >= 1 (or p = inf)")
    return p


def lp_norm(x, p: float) -> float:
    """(Σ|x_i|^p)^{1/p}, max-factored so huge p cannot overflow.

    With m = max|x_i| the ratios |x_i|/m lie in [0, 1], so the powered
    sum stays in [1, n] for any p; coordinates whose ratio underflows
    contribute nothing, which is already below double resolution of the
    result.  p = inf returns max|x_i|.
    """
    p = _validate_p(p)
    a = np.abs(np.asarray(x, dtype=float))
    if a.ndim != 1 or a.size == 0:
        raise DomainError("lp_norm requires a nonempty 1-d vector")
    m = float(a.max())
    if m == 0.0:
        return 0.0
    if math.isinf(p):
        return m
    s = float(((a / m) ** p).sum())
    return m * s ** (1.0 / p)


def lp_norm_rows(rows: np.ndarray, p: float) -> np.ndarray:
    """Row-wise lp norms of a 2-d array, same stabilization as lp_norm."""
    p = _validate_p(p)
    a = np.abs(np.asarray(rows, dtype=float))
    if a.ndim != 2 or a.shape[1] == 0:
        raise DomainError("lp_norm_rows requires a nonempty 2-d array")
    m = a.max(axis=1)
    if math.isinf(p):
        return m
    safe = np.where(m == 0.0, 1.0, m)
    s = ((a / safe[:, None]) ** p).sum(axis=1)
    return np.where(m == 0.0, 0.0, m * s ** (1.0 / p))
