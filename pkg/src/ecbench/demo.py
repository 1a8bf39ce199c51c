"""Shipped demo spaces, synthetic models, and datasets.

These are the desk-scale stand-ins for hardware experiments: a 720-point
enumerable space with two synthetic CPUs, a billion-scale space exercising
lazy index arithmetic, and a frozen paired dataset demonstrating ratio
asymmetry.
"""

from __future__ import annotations

from .design import FactorSplit
from .model import SyntheticModel
from .runner import Measurement, ResultSet
from .space import ConfigSpace, Factor, ObjectConfig, build_space

OBJECT_A = ObjectConfig("cpu_a")
OBJECT_B = ObjectConfig("cpu_b")

THREAD_LABELS = (
    "1", "2", "4", "8", "10", "16", "20", "30", "32", "40", "50", "56",
    "60", "64", "70", "80", "90", "100", "110", "120", "128", "200",
    "256", "300",
)
FLAG_LABELS = ("-O1", "-O2", "-O3")
DATASET_LABELS = tuple(f"d{i:02d}" for i in range(1, 11))
WORKLOAD_720 = "exchange2"


def demo_space_720() -> ConfigSpace:
    """One workload x 10 datasets x 3 flag levels x 24 thread counts = 720."""
    return build_space([
        Factor("workload", (WORKLOAD_720,)),
        Factor("dataset", DATASET_LABELS),
        Factor("flags", FLAG_LABELS),
        Factor("threads", THREAD_LABELS),
    ])


def demo_space_billion() -> ConfigSpace:
    """43 workloads x 60,000 dataset sizes x 3 flags x 131 thread counts;
    cardinality above 10^9, exercising lazy enumeration."""
    workloads = tuple(f"wl{i:02d}" for i in range(1, 44))
    datasets = tuple(f"s{i:06d}" for i in range(60000))
    threads = tuple(str(t) for t in list(range(1, 129)) + [200, 256, 300])
    return build_space([
        Factor("workload", workloads),
        Factor("dataset", datasets),
        Factor("flags", FLAG_LABELS),
        Factor("threads", threads),
    ])


def gaussian_model() -> SyntheticModel:
    """Flat structure plus Gaussian noise: paired differences are exactly
    normal, so interval coverage sits at the nominal level."""
    return SyntheticModel(
        stratum_factor="workload",
        base=((WORKLOAD_720, 300.0),),
        object_offsets=(("cpu_a", 0.0), ("cpu_b", -25.0)),
        sigma=6.0,
        noise_seed=20_17,
    )


def skewed_model() -> SyntheticModel:
    """Strong object-by-dataset heterogeneity: the paired difference varies
    by +/- 200 s across datasets while each factorial half-split contains the
    full spread, so a 2-representative design is badly mis-centered whereas
    uniform stratified draws remain unbiased."""
    thread_effect = tuple(
        (lab, round(300.0 * 0.85**i, 6)) for i, lab in enumerate(THREAD_LABELS)
    )
    flag_effect = (("-O1", 60.0), ("-O2", 25.0), ("-O3", 0.0))
    dataset_effect = tuple(
        (lab, 15.0 * (i + 1)) for i, lab in enumerate(DATASET_LABELS)
    )
    # cpu_b dataset deltas: same +/-200 spread inside the low half (d01-d05)
    # and inside the high half (d06-d10)
    b_dataset = tuple(
        zip(DATASET_LABELS,
            (-200.0, -100.0, 0.0, 100.0, 200.0, -200.0, -100.0, 0.0, 100.0, 200.0))
    )
    b_threads = tuple(
        (lab, 8.0 if i % 2 else -8.0) for i, lab in enumerate(THREAD_LABELS)
    )
    return SyntheticModel(
        stratum_factor="workload",
        base=((WORKLOAD_720, 500.0),),
        effects=(
            ("dataset", dataset_effect),
            ("flags", flag_effect),
            ("threads", thread_effect),
        ),
        object_offsets=(("cpu_a", 0.0), ("cpu_b", -80.0)),
        object_effects=(
            ("cpu_b", (("dataset", b_dataset), ("threads", b_threads))),
        ),
        sigma=5.0,
        noise_seed=31_41,
    )


def demo_factor_split() -> FactorSplit:
    """Low/high halves mirroring the 720-space construction: 5 smallest
    datasets low, -O1 low / -O3 high, 12 smallest thread counts low."""
    return FactorSplit(splits=(
        ("dataset", tuple(range(5)), tuple(range(5, 10))),
        ("flags", (0,), (2,)),
        ("threads", tuple(range(12)), tuple(range(12, 24))),
    ))


def demo_recommended_index(space: ConfigSpace) -> int:
    """Vendor-style single recommendation: largest dataset, -O3, 56 threads."""
    cfg = space.config_from_labels({
        "workload": WORKLOAD_720,
        "dataset": "d10",
        "flags": "-O3",
        "threads": "56",
    })
    return cfg.index


def asymmetry_demo_results() -> tuple[ResultSet, ResultSet]:
    """Frozen paired dataset where both ratio baselines yield intervals
    entirely above 1 (each CPU 'slower' than the other), while difference
    intervals mirror consistently."""
    pairs: list[tuple[float, float]] = []
    for k in range(50):
        pairs.append((0.5 + 0.001 * k, 1.0 + 0.0005 * k))
    for k in range(50):
        pairs.append((2.0 - 0.001 * k, 1.0 - 0.0005 * k))

    a = ResultSet(object_id="cpu_a", plan_fingerprint="asymmetry-demo")
    b = ResultSet(object_id="cpu_b", plan_fingerprint="asymmetry-demo")
    for i, (va, vb) in enumerate(pairs):
        key = (i, 0)
        a.add(key, Measurement(ec_index=i, object_id="cpu_a",
                               replicates=(va,), aggregate=va, policy="mean"))
        b.add(key, Measurement(ec_index=i, object_id="cpu_b",
                               replicates=(vb,), aggregate=vb, policy="mean"))
    return a, b
