"""Ground-truth machinery: exact population means over enumerable synthetic
spaces and Monte Carlo coverage experiments comparing sampling methodologies.

Each Monte Carlo iteration derives its own plan seed and noise seed from
(master seed, iteration index), so iterations are independent, order-stable,
and reproducible regardless of execution order.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

import numpy as np

from .design import (
    FactorSplit,
    factorial_2k,
    full_factorial,
    rct_assign,
    stratified_sample,
)
from .errors import PlanError, SpaceError
from .fingerprints import fingerprint
from .model import CompiledModel, SyntheticModel
from .runner import ResultSet
from .space import ConfigSpace
from .stats import mean_ci_from_array, t_quantile, welch_interval

ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class PopulationTruth:
    mean: float
    space_fingerprint: str
    model_fingerprint: str
    object_ids: tuple[str, ...]


@dataclass(frozen=True)
class Methodology:
    """A design kind plus its parameters, as one row of a comparison."""

    kind: str  # stratified | factorial2k | full_factorial | rct | spec_point
    params: dict = field(default_factory=dict)

    def describe(self) -> str:
        return ";".join(
            f"{k}={v}" for k, v in sorted(self.params.items())
            if not isinstance(v, (dict, list, FactorSplit))
        )


@dataclass(frozen=True)
class CoverageResult:
    methodology: str
    params: str
    cost_per_object: int
    iterations: int
    hits: int

    @property
    def coverage(self) -> float:
        return self.hits / self.iterations

    def to_row(self) -> dict:
        return {
            "methodology": self.methodology,
            "params": self.params,
            "cost_per_object": self.cost_per_object,
            "iterations": self.iterations,
            "coverage": self.coverage,
        }


def population_mean(model: SyntheticModel, space: ConfigSpace,
                    objects: str | tuple[str, str]) -> PopulationTruth:
    """Exact noiseless mean over every space point: the single object's value,
    or the per-point difference for an object pair."""
    if space.cardinality > ENUMERATION_CAP:
        raise SpaceError(
            f"cardinality {space.cardinality} exceeds enumeration cap"
        )
    compiled = model.compile(space)
    indices = np.arange(space.cardinality, dtype=np.int64)
    if isinstance(objects, str):
        mu = float(compiled.deterministic_values(indices, objects).mean())
        ids: tuple[str, ...] = (objects,)
    else:
        a, b = objects
        da = compiled.deterministic_values(indices, a)
        db = compiled.deterministic_values(indices, b)
        mu = float((da - db).mean())
        ids = (a, b)
    return PopulationTruth(
        mean=mu,
        space_fingerprint=fingerprint(space.to_dict()),
        model_fingerprint=fingerprint(model.to_dict()),
        object_ids=ids,
    )


def _iteration_seeds(master_seed: int, iteration: int) -> tuple[int, int]:
    state = np.random.SeedSequence([master_seed, iteration]).generate_state(4)
    plan_seed = (int(state[0]) << 32) | int(state[1])
    noise_seed = (int(state[2]) << 32) | int(state[3])
    return plan_seed, noise_seed


def _simulate_aggregates(compiled: CompiledModel, indices: np.ndarray,
                         object_id: str, reps: int, noise_seed: int,
                         policy: str = "mean") -> np.ndarray:
    """Per-configuration replicate aggregates, fully vectorized."""
    n = indices.size
    idx_rep = np.repeat(indices, reps)
    rep = np.tile(np.arange(reps, dtype=np.int64), n)
    vals = compiled.noisy_values(idx_rep, object_id, rep,
                                 noise_seed=noise_seed).reshape(n, reps)
    if policy == "median":
        return np.median(vals, axis=1)
    return vals.mean(axis=1)


def _default_spec_margin(compiled: CompiledModel, space: ConfigSpace,
                         model: SyntheticModel, objects: tuple[str, str],
                         level: float, master_seed: int,
                         probe_iterations: int = 200) -> float:
    """Margin for scoring the single-point methodology: the average half-width
    of the stratified (n=32 per stratum) paired-difference CI on this model."""
    half_widths = []
    n_strata = len(space.factor(model.stratum_factor).levels)
    t_crit = None
    for i in range(probe_iterations):
        plan_seed, noise_seed = _iteration_seeds(master_seed ^ 0x5BEC, i)
        plan = stratified_sample(space, model.stratum_factor, 32, 3, plan_seed)
        indices = np.array([e.ec_index for e in plan.entries], dtype=np.int64)
        agg_a = _simulate_aggregates(compiled, indices, objects[0], 3, noise_seed)
        agg_b = _simulate_aggregates(compiled, indices, objects[1], 3, noise_seed)
        if t_crit is None:
            t_crit = t_quantile((1.0 + level) / 2.0, indices.size - 1)
        lo, _, hi = mean_ci_from_array(agg_a - agg_b, level, t_crit=t_crit)
        half_widths.append((hi - lo) / 2.0)
    return statistics.fmean(half_widths)


def coverage_experiment(model: SyntheticModel, space: ConfigSpace,
                        methodology: Methodology, iterations: int, level: float,
                        master_seed: int, objects: tuple[str, str],
                        ) -> CoverageResult:
    """Fraction of iterations whose interval (or single-point margin test)
    contains the exact population difference mean."""
    truth = population_mean(model, space, objects)
    mu = truth.mean
    compiled = model.compile(space)
    kind = methodology.kind
    p = methodology.params
    reps = p.get("reps", 3)
    hits = 0
    cost = 0
    t_crit_cache: dict[int, float] = {}

    def t_for(n: int) -> float:
        if n not in t_crit_cache:
            t_crit_cache[n] = t_quantile((1.0 + level) / 2.0, n - 1)
        return t_crit_cache[n]

    if kind == "full_factorial":
        base_plan = full_factorial(space, reps)
        fixed_indices = np.array(
            [e.ec_index for e in base_plan.entries], dtype=np.int64
        )

    if kind == "spec_point":
        rec_index = p["recommended_index"]
        margin = p.get("margin")
        if margin is None:
            margin = _default_spec_margin(compiled, space, model, objects,
                                          level, master_seed)

    for i in range(iterations):
        plan_seed, noise_seed = _iteration_seeds(master_seed, i)
        if kind == "stratified":
            plan = stratified_sample(space, p["stratum_factor"],
                                     p["iterations"], reps, plan_seed)
            indices = np.array([e.ec_index for e in plan.entries], dtype=np.int64)
        elif kind == "factorial2k":
            plan = factorial_2k(space, p["split"], p["defaults"], reps, plan_seed)
            indices = np.array([e.ec_index for e in plan.entries], dtype=np.int64)
        elif kind == "full_factorial":
            indices = fixed_indices
        elif kind == "rct":
            assignment = rct_assign(space, p["per_arm"], reps, plan_seed)
            ctrl = np.array(
                [e.ec_index for e in assignment.control.entries], dtype=np.int64
            )
            treat = np.array(
                [e.ec_index for e in assignment.treatment.entries], dtype=np.int64
            )
            agg_a = _simulate_aggregates(compiled, ctrl, objects[0], reps,
                                         noise_seed)
            agg_b = _simulate_aggregates(compiled, treat, objects[1], reps,
                                         noise_seed)
            iv = welch_interval(agg_a, agg_b, level)
            if iv.low <= mu <= iv.high:
                hits += 1
            cost = p["per_arm"]
            continue
        elif kind == "spec_point":
            indices = np.array([rec_index], dtype=np.int64)
            agg_a = _simulate_aggregates(compiled, indices, objects[0], 3,
                                         noise_seed, policy="median")
            agg_b = _simulate_aggregates(compiled, indices, objects[1], 3,
                                         noise_seed, policy="median")
            estimate = float(agg_a[0] - agg_b[0])
            if abs(estimate - mu) <= margin:
                hits += 1
            cost = 1
            continue
        else:
            raise PlanError(f"unknown methodology kind {kind!r}")

        agg_a = _simulate_aggregates(compiled, indices, objects[0], reps,
                                     noise_seed)
        agg_b = _simulate_aggregates(compiled, indices, objects[1], reps,
                                     noise_seed)
        lo, _, hi = mean_ci_from_array(agg_a - agg_b, level,
                                       t_crit=t_for(indices.size))
        if lo <= mu <= hi:
            hits += 1
        cost = indices.size

    return CoverageResult(
        methodology=methodology.kind,
        params=methodology.describe(),
        cost_per_object=cost,
        iterations=iterations,
        hits=hits,
    )


def methodology_comparison(model: SyntheticModel, space: ConfigSpace,
                           methodologies: list[Methodology], iterations: int,
                           level: float, master_seed: int,
                           objects: tuple[str, str]) -> list[CoverageResult]:
    """One coverage row per methodology, in the given order."""
    return [
        coverage_experiment(model, space, m, iterations, level, master_seed,
                            objects)
        for m in methodologies
    ]


def best_level_report(results: ResultSet, space: ConfigSpace,
                      target_factor: str, group_by_factor: str,
                      ) -> list[tuple[str, str]]:
    """Per group level, the target-factor level with the lowest mean aggregate
    time; ties broken by the lowest level index."""
    t_pos = space.factor_position(target_factor)
    g_pos = space.factor_position(group_by_factor)
    target = space.factor(target_factor)
    group = space.factor(group_by_factor)

    sums: dict[tuple[int, int], list[float]] = {}
    for m in results.measurements.values():
        cfg = space.config_at(m.ec_index)
        g = cfg.assignments[g_pos][1]
        t = cfg.assignments[t_pos][1]
        sums.setdefault((g, t), []).append(m.aggregate)

    rows: list[tuple[str, str]] = []
    for g_level, g_label in enumerate(group.levels):
        candidates = {
            t: statistics.fmean(vals)
            for (g, t), vals in sums.items() if g == g_level
        }
        if not candidates:
            continue
        best = min(candidates, key=lambda t: (candidates[t], t))
        rows.append((g_label, target.levels[best]))
    return rows
