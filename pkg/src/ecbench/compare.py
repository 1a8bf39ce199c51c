"""Paired comparison of two evaluated objects under equivalent conditions.

Verdicts are read off difference confidence intervals relative to zero; the
minuend is always the first argument and both object ids appear in the report
so signs cannot be misread.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import PairingError
from .runner import ResultSet
from .stats import (
    Interval,
    RatioDiagnostics,
    Sample,
    confidence_interval,
    geometric_mean,
    paired_differences,
    ratio_diagnostics,
)
from .stats import StatsError


class Verdict(enum.Enum):
    NO_SIGNIFICANT_DIFFERENCE = "NoSignificantDifference"
    MINUEND_OUTPERFORMS = "MinuendOutperforms"
    SUBTRAHEND_OUTPERFORMS = "SubtrahendOutperforms"


def verdict_of(interval: Interval) -> Verdict:
    """Zero on either endpoint counts as containing zero (conservative)."""
    if interval.high < 0:
        return Verdict.MINUEND_OUTPERFORMS
    if interval.low > 0:
        return Verdict.SUBTRAHEND_OUTPERFORMS
    return Verdict.NO_SIGNIFICANT_DIFFERENCE


@dataclass(frozen=True)
class GroupResult:
    group: str
    n: int
    interval: Interval
    verdict: Verdict


@dataclass(frozen=True)
class ComparisonReport:
    minuend_id: str
    subtrahend_id: str
    level: float
    overall: GroupResult
    groups: tuple[GroupResult, ...]
    aggregation_policy: str
    ci_family: str = "student-t"

    def to_dict(self) -> dict:
        def group_doc(g: GroupResult) -> dict:
            return {
                "group": g.group,
                "n": g.n,
                "mean_diff": g.interval.center,
                "ci_lo": g.interval.low,
                "ci_hi": g.interval.high,
                "level": g.interval.level,
                "verdict": g.verdict.value,
            }

        return {
            "minuend": self.minuend_id,
            "subtrahend": self.subtrahend_id,
            "level": self.level,
            "aggregation_policy": self.aggregation_policy,
            "ci_family": self.ci_family,
            "overall": group_doc(self.overall),
            "groups": [group_doc(g) for g in self.groups],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ComparisonReport":
        def group(d: dict) -> GroupResult:
            iv = Interval(low=d["ci_lo"], high=d["ci_hi"], level=d["level"],
                          center=d["mean_diff"], n=d["n"])
            return GroupResult(group=d["group"], n=d["n"], interval=iv,
                               verdict=Verdict(d["verdict"]))

        return cls(
            minuend_id=doc["minuend"],
            subtrahend_id=doc["subtrahend"],
            level=doc["level"],
            overall=group(doc["overall"]),
            groups=tuple(group(g) for g in doc["groups"]),
            aggregation_policy=doc.get("aggregation_policy", "mean"),
            ci_family=doc.get("ci_family", "student-t"),
        )


def compare_objects(a: ResultSet, b: ResultSet, level: float,
                    group_by: dict[tuple[int, int], str] | None = None,
                    ) -> ComparisonReport:
    """Paired differences a - b with an overall CI/verdict and, when a
    grouping map is given, one CI/verdict per group."""
    diffs = paired_differences(a, b)
    overall_iv = confidence_interval(diffs, level)
    overall = GroupResult(group="overall", n=diffs.n, interval=overall_iv,
                          verdict=verdict_of(overall_iv))

    groups: list[GroupResult] = []
    if group_by is not None:
        keys = sorted(a.measurements)
        missing = [k for k in keys if k not in group_by]
        if missing:
            raise PairingError(
                f"group map misses keys, e.g. {missing[:5]}"
            )
        by_label: dict[str, list[float]] = {}
        for k in keys:
            d = a.measurements[k].aggregate - b.measurements[k].aggregate
            by_label.setdefault(group_by[k], []).append(d)
        for label in sorted(by_label):
            s = Sample(values=tuple(by_label[label]), label=label)
            iv = confidence_interval(s, level)
            groups.append(GroupResult(group=label, n=s.n, interval=iv,
                                      verdict=verdict_of(iv)))

    policies = {m.policy for m in a.measurements.values()}
    policies |= {m.policy for m in b.measurements.values()}
    return ComparisonReport(
        minuend_id=a.object_id,
        subtrahend_id=b.object_id,
        level=level,
        overall=overall,
        groups=tuple(groups),
        aggregation_policy="/".join(sorted(policies)) or "mean",
    )


@dataclass(frozen=True)
class AsymmetryReport:
    """Side-by-side demonstration of difference symmetry vs ratio asymmetry."""

    diff_ab: Interval        # CI of a - b
    diff_ba: Interval        # CI of b - a; mirrors diff_ab exactly
    ratio_base_b: Interval   # CI of a/b
    ratio_base_a: Interval   # CI of b/a; generally NOT the reciprocal
    diag_base_b: RatioDiagnostics
    diag_base_a: RatioDiagnostics

    def to_dict(self) -> dict:
        def iv(i: Interval) -> dict:
            return {"lo": i.low, "hi": i.high, "center": i.center,
                    "level": i.level, "n": i.n}

        return {
            "difference_a_minus_b": iv(self.diff_ab),
            "difference_b_minus_a": iv(self.diff_ba),
            "ratio_baseline_b": iv(self.ratio_base_b),
            "ratio_baseline_a": iv(self.ratio_base_a),
            "jensen_product_baseline_b": self.diag_base_b.asymmetry_product,
            "jensen_product_baseline_a": self.diag_base_a.asymmetry_product,
        }


def asymmetry_report(a: ResultSet, b: ResultSet, level: float) -> AsymmetryReport:
    diff_ab = confidence_interval(paired_differences(a, b), level)
    diff_ba = confidence_interval(paired_differences(b, a), level)
    diag_b = ratio_diagnostics(a, b, baseline="b")
    diag_a = ratio_diagnostics(a, b, baseline="a")
    return AsymmetryReport(
        diff_ab=diff_ab,
        diff_ba=diff_ba,
        ratio_base_b=confidence_interval(diag_b.ratios, level),
        ratio_base_a=confidence_interval(diag_a.ratios, level),
        diag_base_b=diag_b,
        diag_base_a=diag_a,
    )


def spec_composite(per_workload_scores: list[tuple[str, tuple[float, float, float]]],
                   ) -> float:
    """Median of each workload's three runs, combined by geometric mean."""
    medians = []
    for stratum, runs in per_workload_scores:
        if len(runs) != 3:
            raise StatsError(
                f"stratum {stratum!r}: expected exactly 3 runs, got {len(runs)}"
            )
        if any(v <= 0 for v in runs):
            raise StatsError(f"stratum {stratum!r}: non-positive score")
        medians.append(sorted(runs)[1])
    return geometric_mean(medians)
