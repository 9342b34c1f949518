"""Seeded Monte Carlo estimators for p-norm statistics of Gaussian vectors.

Reproducibility contract: every estimator is a pure function of
(seed, streams, samples, shape).  Streams use a counter-based generator
keyed by (seed, stream_index), so stream s always produces the same
draws no matter how many other streams run or in what order; per-stream
moment accumulators are merged along a fixed pairwise tree ordered by
stream index.  Rerunning any estimator therefore reproduces identical
output bits, which the test suite asserts.

Gaussians come from the inverse CDF applied to 53-bit uniforms rather
than rejection sampling: inverse transform keeps the quantile coupling
(sample i of stream s is a fixed monotone function of one uniform),
which the order-statistic tests rely on.

Accumulation tracks central moments up to order four so that variance
estimates carry honest standard errors (variance of the sample variance
needs the fourth moment).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .config import DEFAULT_CONSTANTS, Constants
from .errors import DomainError
from .logdomain import LogValue
from .variance import quantile_power_sum

_U53 = float(1 << 53)
# z for the 95% Wilson interval
_WILSON_Z = 1.959963984540054


@dataclass(frozen=True, slots=True)
class RngStream:
    """One reproducible substream: counter-based, keyed by (seed, index)."""

    seed: int
    stream_index: int

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must fit in 64 bits")
        if self.stream_index < 0:
            raise DomainError("stream_index must be nonnegative")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.Philox(key=np.array([self.seed, self.stream_index], dtype=np.uint64))
        )


def _uniforms(gen: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Open-interval (0,1) uniforms built from raw 53-bit integers."""
    raw = gen.integers(0, 1 << 53, size=shape, dtype=np.uint64)
    return (raw.astype(np.float64) + 0.5) / _U53


def gaussian_draws(gen: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    return ndtri(_uniforms(gen, shape))


@dataclass(frozen=True, slots=True)
class MomentAccumulator:
    """Count, mean and central sums of powers 2..4; exact merge rules."""

    count: int
    mean: float
    m2: float
    m3: float
    m4: float

    @classmethod
    def empty(cls) -> "MomentAccumulator":
        return cls(0, 0.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_batch(cls, values: np.ndarray) -> "MomentAccumulator":
        values = np.asarray(values, dtype=np.float64)
        count = int(values.size)
        if count == 0:
            return cls.empty()
        mean = float(values.mean())
        deltas = values - mean
        sq = deltas * deltas
        return cls(
            count,
            mean,
            float(sq.sum()),
            float((sq * deltas).sum()),
            float((sq * sq).sum()),
        )

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        if self.count == 0:
            return other
        if other.count == 0:
            return self
        na, nb = float(self.count), float(other.count)
        n = na + nb
        delta = other.mean - self.mean
        mean = self.mean + delta * nb / n
        m2 = self.m2 + other.m2 + delta * delta * na * nb / n
        m3 = (
            self.m3
            + other.m3
            + delta**3 * na * nb * (na - nb) / n**2
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n
        )
        m4 = (
            self.m4
            + other.m4
            + delta**4 * na * nb * (na * na - na * nb + nb * nb) / n**3
            + 6.0 * delta * delta * (na * na * other.m2 + nb * nb * self.m2) / n**2
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n
        )
        return MomentAccumulator(int(n), mean, m2, m3, m4)


def merge_pairwise(accumulators: list[MomentAccumulator]) -> MomentAccumulator:
    """Reduce stream accumulators along a fixed binary tree (by index)."""
    if not accumulators:
        return MomentAccumulator.empty()
    level = list(accumulators)
    while len(level) > 1:
        merged = []
        for j in range(0, len(level) - 1, 2):
            merged.append(level[j].merge(level[j + 1]))
        if len(level) % 2:
            merged.append(level[-1])
        level = merged
    return level[0]


@dataclass(frozen=True, slots=True)
class MCEstimate:
    mean: float
    variance: float
    stderr_mean: float
    stderr_variance: float
    samples: int
    seed: int
    streams: int

    def __post_init__(self) -> None:
        if self.variance < 0.0:
            raise DomainError("variance cannot be negative")


def _estimate(acc: MomentAccumulator, seed: int, streams: int) -> MCEstimate:
    n = acc.count
    if n < 2:
        raise DomainError("need at least 2 samples for a variance estimate")
    variance = acc.m2 / (n - 1)
    pop_var = acc.m2 / n
    fourth = acc.m4 / n
    var_of_var = max(fourth - pop_var * pop_var, 0.0) / n
    return MCEstimate(
        mean=acc.mean,
        variance=variance,
        stderr_mean=math.sqrt(variance / n) if variance > 0.0 else 0.0,
        stderr_variance=math.sqrt(var_of_var),
        samples=n,
        seed=seed,
        streams=streams,
    )


def _stream_quota(samples: int, streams: int, index: int) -> int:
    base, extra = divmod(samples, streams)
    return base + (1 if index < extra else 0)


def _chunk_rows(n: int, constants: Constants) -> int:
    rows = max(1, min((1 << 21) // max(n, 1), 8192))
    if rows * n * 8 > constants.memory_guard_bytes:
        raise DomainError(
            f"a single sample chunk ({rows}x{n} doubles) exceeds the memory guard"
        )
    return rows


def _validate_mc_args(samples: int, streams: int) -> None:
    if samples < 2:
        raise DomainError(f"need samples >= 2, got {samples}")
    if streams < 1:
        raise DomainError(f"need streams >= 1, got {streams}")


def default_samples(n: int) -> int:
    """Sample budget keeping runtimes in the seconds-to-minutes range."""
    return 100_000 if n <= 10_000 else 10_000


def _log_row_power_sums(block: np.ndarray, p: float) -> np.ndarray:
    """log sum_i |x_i|^p per row, max-factored; -inf for zero rows."""
    magnitudes = np.abs(block)
    peaks = magnitudes.max(axis=1)
    safe = np.where(peaks > 0.0, peaks, 1.0)
    sums = ((magnitudes / safe[:, None]) ** p).sum(axis=1)
    return np.where(
        peaks > 0.0, p * np.log(safe) + np.log(sums), -np.inf
    )


def _row_norms(block: np.ndarray, p: float) -> np.ndarray:
    if math.isinf(p):
        return np.abs(block).max(axis=1)
    return np.exp(_log_row_power_sums(block, p) / p)


def _accumulate_norms(
    n: int,
    p: float,
    samples: int,
    seed: int,
    streams: int,
    constants: Constants,
    transform,
) -> list[MomentAccumulator]:
    """Shared chunked driver: transform(block) -> per-row statistic array(s)."""
    chunk = _chunk_rows(n, constants)
    per_stream: list[MomentAccumulator] = []
    for index in range(streams):
        quota = _stream_quota(samples, streams, index)
        gen = RngStream(seed, index).generator()
        acc = MomentAccumulator.empty()
        remaining = quota
        while remaining > 0:
            rows = min(chunk, remaining)
            block = gaussian_draws(gen, (rows, n))
            acc = acc.merge(MomentAccumulator.from_batch(transform(block)))
            remaining -= rows
        per_stream.append(acc)
    return per_stream


def mc_norm_stats(
    n: int,
    p: float,
    samples: int,
    seed: int,
    streams: int = 4,
    constants: Constants = DEFAULT_CONSTANTS,
) -> MCEstimate:
    """Estimate mean and variance of ||G||_p over `samples` fresh vectors."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if not (math.isinf(p) or p >= 1.0):
        raise DomainError(f"need p >= 1 or inf, got {p}")
    _validate_mc_args(samples, streams)
    per_stream = _accumulate_norms(
        n, p, samples, seed, streams, constants, lambda block: _row_norms(block, p)
    )
    return _estimate(merge_pairwise(per_stream), seed, streams)


def mc_truncated_stats(
    n: int,
    p: float,
    T: float,
    samples: int,
    seed: int,
    streams: int = 4,
    constants: Constants = DEFAULT_CONSTANTS,
) -> tuple[MCEstimate, MCEstimate]:
    """Statistics of the capped norm f_T and of the squared gap, coupled.

    f_T(G) = (sum_i min(T, |g_i|)^p)^{1/p} caps coordinates at T; the
    second estimate is of (||G||_p - f_T(G))^2 on the same draws, the
    variance cost of the truncation.
    """
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if not (math.isinf(p) or p >= 1.0):
        raise DomainError(f"need p >= 1 or inf, got {p}")
    if not T > 0.0:
        raise DomainError(f"need T > 0, got {T}")
    _validate_mc_args(samples, streams)
    chunk = _chunk_rows(n, constants)
    norm_accs: list[MomentAccumulator] = []
    gap_accs: list[MomentAccumulator] = []
    for index in range(streams):
        quota = _stream_quota(samples, streams, index)
        gen = RngStream(seed, index).generator()
        acc_f = MomentAccumulator.empty()
        acc_gap = MomentAccumulator.empty()
        remaining = quota
        while remaining > 0:
            rows = min(chunk, remaining)
            block = gaussian_draws(gen, (rows, n))
            norms = _row_norms(block, p)
            if math.isinf(T):
                capped = norms
            else:
                capped = _row_norms(np.minimum(np.abs(block), T), p)
            gaps = norms - capped
            acc_f = acc_f.merge(MomentAccumulator.from_batch(capped))
            acc_gap = acc_gap.merge(MomentAccumulator.from_batch(gaps * gaps))
            remaining -= rows
        norm_accs.append(acc_f)
        gap_accs.append(acc_gap)
    return (
        _estimate(merge_pairwise(norm_accs), seed, streams),
        _estimate(merge_pairwise(gap_accs), seed, streams),
    )


def mc_negative_moment(
    n: int,
    q: float,
    L: float,
    T: float,
    samples: int,
    seed: int,
    streams: int = 4,
    constants: Constants = DEFAULT_CONSTANTS,
) -> MCEstimate:
    """Estimate E (sum_i min(|g_i|, T)^q)^{-L}.

    The per-sample value is exponentiated from the log of the capped
    power sum, so large q stays finite.  Precondition q L <= K log n
    keeps the target moment bounded away from underflow.
    """
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if q < 1.0:
        raise DomainError(f"need q >= 1, got {q}")
    if L < 0.0:
        raise DomainError(f"need L >= 0, got {L}")
    if q * L > constants.negative_moment_K * math.log(max(n, 2)):
        raise DomainError(
            f"need q*L <= {constants.negative_moment_K} log n, got {q * L}"
        )
    if not T > 0.0:
        raise DomainError(f"need T > 0, got {T}")
    _validate_mc_args(samples, streams)

    def values(block: np.ndarray) -> np.ndarray:
        capped = block if math.isinf(T) else np.minimum(np.abs(block), T)
        log_sums = _log_row_power_sums(capped, q)
        return np.exp(-L * log_sums)

    per_stream = _accumulate_norms(n, q, samples, seed, streams, constants, values)
    return _estimate(merge_pairwise(per_stream), seed, streams)


def mc_lower_identity(
    n: int,
    p: float,
    samples: int,
    seed: int,
    streams: int = 4,
    constants: Constants = DEFAULT_CONSTANTS,
) -> MCEstimate:
    """Estimate (n/2p^2) E[(|g_1|^p - |h_1|^p)^2 (S_g + S_h)^{2/p - 2}].

    G and H are independent Gaussian vectors with power sums S = ||.||_p^p.
    The quantity is a variance lower bound for ||G||_p; each sample is
    assembled in log-domain because |g_1|^p alone overflows for large p.
    """
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if not p >= 1.0 or math.isinf(p):
        raise DomainError(f"need finite p >= 1, got {p}")
    _validate_mc_args(samples, streams)
    log_prefactor = math.log(n) - math.log(2.0) - 2.0 * math.log(p)

    def values(block: np.ndarray) -> np.ndarray:
        rows = block.shape[0] // 2
        g = block[:rows]
        h = block[rows : 2 * rows]
        with np.errstate(divide="ignore"):
            la = p * np.log(np.abs(g[:, 0]))
            lb = p * np.log(np.abs(h[:, 0]))
        hi = np.maximum(la, lb)
        lo = np.minimum(la, lb)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_diff = np.where(lo == hi, -np.inf, hi + np.log1p(-np.exp(lo - hi)))
        log_ss = np.logaddexp(
            _log_row_power_sums(g, p), _log_row_power_sums(h, p)
        )
        return np.exp(log_prefactor + 2.0 * log_diff + (2.0 / p - 2.0) * log_ss)

    # each sample consumes a pair of vectors: draw 2x rows per chunk
    chunk = _chunk_rows(n, constants)
    per_stream: list[MomentAccumulator] = []
    for index in range(streams):
        quota = _stream_quota(samples, streams, index)
        gen = RngStream(seed, index).generator()
        acc = MomentAccumulator.empty()
        remaining = quota
        while remaining > 0:
            rows = min(max(chunk // 2, 1), remaining)
            block = gaussian_draws(gen, (2 * rows, n))
            acc = acc.merge(MomentAccumulator.from_batch(values(block)))
            remaining -= rows
        per_stream.append(acc)
    return _estimate(merge_pairwise(per_stream), seed, streams)


@dataclass(frozen=True, slots=True)
class SmallBallEstimate:
    probability: float
    wilson_low: float
    wilson_high: float
    successes: int
    samples: int
    log_threshold: float
    seed: int
    streams: int


def wilson_interval(successes: int, trials: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """Score interval for a binomial proportion; behaves at 0 and 1."""
    if trials < 1:
        raise DomainError("need at least one trial")
    if not 0 <= successes <= trials:
        raise DomainError("successes must lie in [0, trials]")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2.0 * trials)) / denom
    half = (
        z
        * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials))
        / denom
    )
    # at the extremes the exact endpoints are 0 and 1; rounding through
    # the sqrt can land an ulp off, so pin them
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == trials else min(1.0, center + half)
    return (low, high)


def mc_small_ball(
    n: int,
    q: float,
    tau: float,
    T: float,
    samples: int,
    seed: int,
    streams: int = 4,
    constants: Constants = DEFAULT_CONSTANTS,
) -> SmallBallEstimate:
    """Frequency of {sum_i min(|g_i|, T)^q <= tau * sum_i xi_{1-i/n}^q}."""
    if not 0.0 < tau < 0.5:
        raise DomainError(f"need tau in (0, 1/2), got {tau}")
    if q < 1.0:
        raise DomainError(f"need q >= 1, got {q}")
    if not T > 0.0:
        raise DomainError(f"need T > 0, got {T}")
    _validate_mc_args(samples, streams)
    log_threshold = math.log(tau) + quantile_power_sum(n, q).log
    chunk = _chunk_rows(n, constants)
    successes = 0
    total = 0
    for index in range(streams):
        quota = _stream_quota(samples, streams, index)
        gen = RngStream(seed, index).generator()
        remaining = quota
        while remaining > 0:
            rows = min(chunk, remaining)
            block = gaussian_draws(gen, (rows, n))
            capped = block if math.isinf(T) else np.minimum(np.abs(block), T)
            log_sums = _log_row_power_sums(capped, q)
            successes += int((log_sums <= log_threshold).sum())
            total += rows
            remaining -= rows
    low, high = wilson_interval(successes, total)
    return SmallBallEstimate(
        probability=successes / total,
        wilson_low=low,
        wilson_high=high,
        successes=successes,
        samples=total,
        log_threshold=log_threshold,
        seed=seed,
        streams=streams,
    )


def threshold_log_value(n: int, q: float, tau: float) -> LogValue:
    """tau * sum_i xi_{1-i/n}^q as a LogValue (the small-ball threshold)."""
    return LogValue(math.log(tau) + quantile_power_sum(n, q).log)
