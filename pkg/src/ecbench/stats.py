"""Statistical kernel: summaries, Student-t quantiles, mean confidence
intervals, paired differences, and ratio-asymmetry diagnostics.

Intervals use Student's t with n-1 degrees of freedom: conservative at the
n ~ 32 sample sizes the sampling designs produce, and converging to the
normal-limit interval for large n.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import EcbenchError, PairingError
from .runner import ResultSet


class StatsError(EcbenchError):
    pass


@dataclass(frozen=True)
class Sample:
    values: tuple[float, ...]
    label: str | None = None

    def __post_init__(self) -> None:
        if not self.values:
            raise StatsError("sample must be non-empty")
        if not all(math.isfinite(v) for v in self.values):
            raise StatsError("sample contains non-finite values")

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Interval:
    low: float
    high: float
    level: float
    center: float
    n: int

    def contains(self, x: float) -> bool:
        return self.low <= x <= self.high

    @property
    def half_width(self) -> float:
        return (self.high - self.low) / 2.0


@dataclass(frozen=True)
class Summary:
    mean: float
    std: float
    median: float
    geometric_mean: float | None


def summary(sample: Sample) -> Summary:
    vals = sample.values
    mean = statistics.fmean(vals)
    std = statistics.stdev(vals) if len(vals) > 1 else 0.0
    med = statistics.median(vals)
    if all(v > 0 for v in vals):
        gmean = math.exp(statistics.fmean(math.log(v) for v in vals))
    else:
        gmean = None
    return Summary(mean=mean, std=std, median=med, geometric_mean=gmean)


def geometric_mean(values: tuple[float, ...] | list[float]) -> float:
    if any(v <= 0 for v in values):
        raise StatsError("geometric mean requires all values > 0")
    return math.exp(statistics.fmean(math.log(v) for v in values))


def t_quantile(p: float, df: float) -> float:
    """Inverse CDF of Student's t, by bisection on the regularized incomplete
    beta representation of the CDF, refined to ~1e-12. Fractional df is
    accepted for Welch intervals."""
    if not 0 < p < 1:
        raise StatsError("p must be in (0, 1)")
    if df <= 0:
        raise StatsError("df must be positive")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -t_quantile(1.0 - p, df)

    def cdf(t: float) -> float:
        # P(T <= t) for t >= 0 via I_x(df/2, 1/2) with x = df / (df + t^2)
        x = df / (df + t * t)
        return 1.0 - 0.5 * float(special.betainc(df / 2.0, 0.5, x))

    lo, hi = 0.0, 1.0
    while cdf(hi) < p:
        hi *= 2.0
        if hi > 1e300:
            raise StatsError("t quantile diverged")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def confidence_interval(sample: Sample, level: float) -> Interval:
    """Mean CI: x_bar +/- t_{(1+level)/2, n-1} * s / sqrt(n)."""
    if not 0 < level < 1:
        raise StatsError("confidence level must be in (0, 1)")
    n = sample.n
    if n < 2:
        raise StatsError("confidence interval needs n >= 2")
    mean = statistics.fmean(sample.values)
    s = statistics.stdev(sample.values)
    if s == 0.0:
        return Interval(low=mean, high=mean, level=level, center=mean, n=n)
    half = t_quantile((1.0 + level) / 2.0, n - 1) * s / math.sqrt(n)
    return Interval(low=mean - half, high=mean + half, level=level,
                    center=mean, n=n)


def mean_ci_from_array(values: np.ndarray, level: float,
                       t_crit: float | None = None) -> tuple[float, float, float]:
    """Fast-path CI on a numpy array: (low, mean, high). Used by the Monte
    Carlo oracle where the t critical value is hoisted out of the loop."""
    n = values.size
    mean = float(values.mean())
    if n < 2:
        raise StatsError("confidence interval needs n >= 2")
    s = float(values.std(ddof=1))
    if t_crit is None:
        t_crit = t_quantile((1.0 + level) / 2.0, n - 1)
    half = t_crit * s / math.sqrt(n)
    return mean - half, mean, mean + half


def welch_interval(a: np.ndarray, b: np.ndarray, level: float) -> Interval:
    """Two-independent-sample CI for mean(a) - mean(b) with Welch df."""
    na, nb = a.size, b.size
    if na < 2 or nb < 2:
        raise StatsError("Welch interval needs n >= 2 per arm")
    va, vb = a.var(ddof=1), b.var(ddof=1)
    se2 = va / na + vb / nb
    center = float(a.mean() - b.mean())
    if se2 == 0.0:
        return Interval(low=center, high=center, level=level, center=center,
                        n=na + nb)
    df = se2**2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    t_crit = t_quantile((1.0 + level) / 2.0, df)
    half = t_crit * math.sqrt(se2)
    return Interval(low=center - half, high=center + half, level=level,
                    center=center, n=na + nb)


def _paired_keys(a: ResultSet, b: ResultSet) -> list[tuple[int, int]]:
    ka, kb = set(a.measurements), set(b.measurements)
    if ka != kb:
        missing_a = sorted(kb - ka)[:5]
        missing_b = sorted(ka - kb)[:5]
        raise PairingError(
            "result sets cover different (ec_index, ordinal) keys; "
            f"examples missing from a: {missing_a}, from b: {missing_b}"
        )
    return sorted(ka)


def paired_differences(a: ResultSet, b: ResultSet,
                       label: str | None = None) -> Sample:
    """Per matched key, aggregate(a) - aggregate(b), in sorted key order."""
    keys = _paired_keys(a, b)
    diffs = tuple(
        a.measurements[k].aggregate - b.measurements[k].aggregate for k in keys
    )
    return Sample(values=diffs, label=label)


@dataclass(frozen=True)
class RatioDiagnostics:
    ratios: Sample
    mean_ratio: float
    mean_reciprocal: float
    asymmetry_product: float  # mean(r) * mean(1/r); >= 1, = 1 iff constant


def ratio_diagnostics(a: ResultSet, b: ResultSet,
                      baseline: str = "b") -> RatioDiagnostics:
    """Per-key ratios with the chosen baseline as denominator, plus the
    Jensen asymmetry product that quantifies why ratios mislead."""
    if baseline not in ("a", "b"):
        raise StatsError("baseline must be 'a' or 'b'")
    keys = _paired_keys(a, b)
    num, den = (a, b) if baseline == "b" else (b, a)
    ratios = []
    for k in keys:
        d = den.measurements[k].aggregate
        if d <= 0 or num.measurements[k].aggregate <= 0:
            raise StatsError("ratios require positive aggregates")
        ratios.append(num.measurements[k].aggregate / d)
    mean_r = statistics.fmean(ratios)
    mean_inv = statistics.fmean(1.0 / r for r in ratios)
    return RatioDiagnostics(
        ratios=Sample(values=tuple(ratios)),
        mean_ratio=mean_r,
        mean_reciprocal=mean_inv,
        asymmetry_product=mean_r * mean_inv,
    )
