"""Independent reference implementations used only by the test suite.

Deliberately written on different mathematical routes from the package code:
the t quantile comes from direct numerical integration of the density (no
incomplete beta function), and the population enumerator walks the raw JSON
documents with itertools.product (no numpy, no mixed-radix decode).
"""

from __future__ import annotations

import itertools
import math
import statistics

import numpy as np

# Gauss-Legendre nodes/weights on [-1, 1]; 400 nodes resolve cos^(df-1)
# far past 1e-9 for df up to a few hundred.
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(400)


def _t_cdf_quadrature(t: float, df: float) -> float:
    """P(T <= t) via the angular substitution T = sqrt(df) tan(theta), under
    which the density is proportional to cos^(df-1)(theta) on (-pi/2, pi/2)."""

    def integral(a: float, b: float) -> float:
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        theta = mid + half * _NODES
        return half * float(np.sum(_WEIGHTS * np.cos(theta) ** (df - 1.0)))

    upper = math.atan(t / math.sqrt(df))
    total = integral(-math.pi / 2, math.pi / 2)
    return integral(-math.pi / 2, upper) / total


def t_quantile_oracle(p: float, df: float) -> float:
    """Inverse t CDF by bisection on the quadrature CDF."""
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -t_quantile_oracle(1.0 - p, df)
    lo, hi = 0.0, 1.0
    while _t_cdf_quadrature(hi, df) < p:
        hi *= 2.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if _t_cdf_quadrature(mid, df) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def brute_force_population_mean(space_doc: dict, model_doc: dict,
                                objects) -> float:
    """Noise-free mean over every configuration, straight from the JSON
    documents: nested loops over level labels, dict lookups, plain floats."""
    factors = [(f["name"], list(f["levels"])) for f in space_doc["factors"]]
    names = [n for n, _ in factors]
    level_lists = [ls for _, ls in factors]

    def value_at(labels: dict[str, str], object_id: str) -> float:
        total = model_doc["base"][labels[model_doc["stratum_factor"]]]
        for fname, table in model_doc.get("effects", {}).items():
            total += table[labels[fname]]
        for it in model_doc.get("interactions", []):
            fa, fb = it["factors"]
            for la, lb, v in it["table"]:
                if labels[fa] == la and labels[fb] == lb:
                    total += v
        total += model_doc.get("object_offsets", {}).get(object_id, 0.0)
        for fname, table in model_doc.get("object_effects", {}).get(
                object_id, {}).items():
            total += table.get(labels[fname], 0.0)
        return total

    if isinstance(objects, str):
        objects = (objects,)
    values = []
    for combo in itertools.product(*level_lists):
        labels = dict(zip(names, combo))
        if len(objects) == 1:
            values.append(value_at(labels, objects[0]))
        else:
            values.append(value_at(labels, objects[0])
                          - value_at(labels, objects[1]))
    return statistics.fmean(values)
