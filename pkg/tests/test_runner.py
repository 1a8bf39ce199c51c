import numpy as np
import pytest

from ecbench import demo
from ecbench.design import full_factorial, stratified_sample
from ecbench.errors import ExecutionError, FingerprintError
from ecbench.model import SyntheticModel, synth_time
from ecbench.runner import ExecutorSpec, aggregate, execute_plan, measure
from ecbench.space import Factor, ObjectConfig, build_space


def constant_model(value=100.0):
    return SyntheticModel(stratum_factor="workload",
                          base=(("w1", value),), sigma=0.0)


def one_point_space():
    return build_space([Factor("workload", ("w1",)), Factor("threads", ("1", "2"))])


class TestAggregate:
    def test_mean(self):
        assert aggregate([1, 2, 3], "mean") == 2

    def test_median_odd(self):
        assert aggregate([3, 1, 2], "median") == 2

    def test_median_even_averages_middle_pair(self):
        assert aggregate([1, 2, 3, 10], "median") == 2.5

    def test_unknown_policy(self):
        with pytest.raises(ExecutionError):
            aggregate([1.0], "mode")


class TestSynthTime:
    def effect_model(self):
        return SyntheticModel(
            stratum_factor="workload",
            base=(("w1", 10.0),),
            effects=(("threads", (("1", 0.0), ("2", 2.0), ("4", 4.0), ("8", 6.0))),),
            sigma=0.0,
        )

    def space(self):
        return build_space([
            Factor("workload", ("w1",)),
            Factor("threads", ("1", "2", "4", "8")),
        ])

    def test_direct_sum(self):
        space = self.space()
        ec = space.config_at(3)  # threads level index 3 -> +6
        val = synth_time(self.effect_model(), space, ObjectConfig("o"), ec, 0)
        assert val == 16.0

    def test_sigma_zero_identical_across_replicates(self):
        space = self.space()
        ec = space.config_at(1)
        vals = {synth_time(self.effect_model(), space, ObjectConfig("o"), ec, r)
                for r in range(5)}
        assert len(vals) == 1

    def test_deterministic_across_calls(self):
        model = SyntheticModel(stratum_factor="workload", base=(("w1", 50.0),),
                               sigma=2.0, noise_seed=9)
        space = self.space()
        ec = space.config_at(2)
        a = synth_time(model, space, ObjectConfig("o"), ec, 1)
        b = synth_time(model, space, ObjectConfig("o"), ec, 1)
        assert a == b
        assert a != 50.0  # noise actually applied

    def test_noise_varies_by_replicate_and_object(self):
        model = SyntheticModel(stratum_factor="workload", base=(("w1", 50.0),),
                               sigma=2.0, noise_seed=9)
        space = self.space()
        ec = space.config_at(0)
        v0 = synth_time(model, space, ObjectConfig("o"), ec, 0)
        v1 = synth_time(model, space, ObjectConfig("o"), ec, 1)
        w0 = synth_time(model, space, ObjectConfig("p"), ec, 0)
        assert v0 != v1 and v0 != w0

    def test_missing_effect_level_rejected(self):
        model = SyntheticModel(
            stratum_factor="workload", base=(("w1", 10.0),),
            effects=(("threads", (("1", 0.0),)),),
        )
        with pytest.raises(Exception):
            model.compile(self.space())

    def test_noise_is_mean_zero(self):
        model = SyntheticModel(stratum_factor="workload", base=(("w1", 100.0),),
                               sigma=3.0, noise_seed=123)
        space = self.space()
        compiled = model.compile(space)
        n = 10**5
        vals = compiled.noisy_values(
            np.zeros(n, dtype=np.int64), "o", np.arange(n, dtype=np.int64)
        )
        assert abs(vals.mean() - 100.0) < 5 * 3.0 / np.sqrt(n)
        assert abs(vals.std() - 3.0) < 0.05


class TestMeasure:
    def test_constant_model_any_reps(self):
        space = one_point_space()
        ex = ExecutorSpec(kind="synthetic", model=constant_model())
        m = measure(ex, ObjectConfig("o"), space, space.config_at(0), 5, "mean")
        assert m.aggregate == 100.0
        assert m.replicates == (100.0,) * 5

    def test_synthetic_timestamps_zeroed(self):
        space = one_point_space()
        ex = ExecutorSpec(kind="synthetic", model=constant_model())
        m = measure(ex, ObjectConfig("o"), space, space.config_at(0), 1, "mean")
        assert m.started_at == 0.0 and m.ended_at == 0.0

    def test_command_executor_times_process(self):
        space = one_point_space()
        ex = ExecutorSpec(kind="command", templates=(("*", "sleep 0.0{threads}"),))
        m = measure(ex, ObjectConfig("o"), space, space.config_at(0), 1, "mean")
        assert m.aggregate > 0.005
        assert m.ended_at >= m.started_at

    def test_command_failure_raises(self):
        space = one_point_space()
        ex = ExecutorSpec(kind="command", templates=(("*", "false"),))
        with pytest.raises(ExecutionError):
            measure(ex, ObjectConfig("o"), space, space.config_at(0), 1, "mean")

    def test_launch_failure_raises(self):
        space = one_point_space()
        ex = ExecutorSpec(kind="command",
                          templates=(("*", "no-such-binary-xyz"),))
        with pytest.raises(ExecutionError):
            measure(ex, ObjectConfig("o"), space, space.config_at(0), 1, "mean")


class TestExecutePlan:
    def test_one_measurement_per_entry(self):
        space = demo.demo_space_720()
        plan = stratified_sample(space, "workload", 32, 3, seed=6)
        ex = ExecutorSpec(kind="synthetic", model=demo.gaussian_model())
        rs = execute_plan(ex, demo.OBJECT_A, space, plan)
        assert len(rs.measurements) == 32

    def test_deterministic_given_seeded_model(self):
        space = demo.demo_space_720()
        plan = stratified_sample(space, "workload", 8, 3, seed=6)
        ex = ExecutorSpec(kind="synthetic", model=demo.gaussian_model())
        r1 = execute_plan(ex, demo.OBJECT_A, space, plan)
        r2 = execute_plan(ex, demo.OBJECT_A, space, plan)
        assert r1.measurements == r2.measurements

    def test_fingerprint_mismatch_rejected(self):
        space = demo.demo_space_720()
        other = one_point_space()
        plan = full_factorial(other, reps=1)
        ex = ExecutorSpec(kind="synthetic", model=demo.gaussian_model())
        with pytest.raises(FingerprintError):
            execute_plan(ex, demo.OBJECT_A, space, plan)

    def test_template_referencing_unknown_factor_rejected(self):
        space = one_point_space()
        plan = full_factorial(space, reps=1)
        ex = ExecutorSpec(kind="command", templates=(("*", "echo {bogus}"),))
        with pytest.raises(ExecutionError):
            execute_plan(ex, ObjectConfig("o"), space, plan)

    def test_failures_abort_by_default(self):
        space = one_point_space()
        plan = full_factorial(space, reps=1)
        ex = ExecutorSpec(kind="command", templates=(("*", "false"),))
        with pytest.raises(ExecutionError):
            execute_plan(ex, ObjectConfig("o"), space, plan)

    def test_skip_failures_records_and_continues(self):
        space = one_point_space()
        plan = full_factorial(space, reps=1)
        ex = ExecutorSpec(kind="command", templates=(("*", "false"),))
        rs = execute_plan(ex, ObjectConfig("o"), space, plan, skip_failures=True)
        assert len(rs.measurements) == 0
        assert len(rs.failures) == 2
        assert all(m.error for m in rs.failures)

    def test_duplicate_entries_get_distinct_ordinals(self):
        space = one_point_space()
        plan = full_factorial(space, reps=1)
        # duplicate every entry by executing a handcrafted plan
        from ecbench.design import PlanEntry, SamplePlan
        dup = SamplePlan(
            design="stratified",
            entries=tuple(
                PlanEntry(e.ec_index, stratum="w1")
                for e in plan.entries for _ in range(2)
            ),
            reps=1, seed=0, space_fingerprint=plan.space_fingerprint,
        )
        ex = ExecutorSpec(kind="synthetic", model=constant_model())
        rs = execute_plan(ex, ObjectConfig("o"), space, dup)
        assert set(rs.measurements) == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_full_factorial_sigma_zero_matches_analytic():
    # oracle equivalence: noiseless execution reproduces the model surface
    space = demo.demo_space_720()
    model = demo.skewed_model()
    noiseless = SyntheticModel(
        stratum_factor=model.stratum_factor, base=model.base,
        effects=model.effects, interactions=model.interactions,
        object_offsets=model.object_offsets, object_effects=model.object_effects,
        sigma=0.0, noise_seed=model.noise_seed,
    )
    plan = full_factorial(space, reps=2)
    ex = ExecutorSpec(kind="synthetic", model=noiseless)
    rs = execute_plan(ex, demo.OBJECT_B, space, plan)
    compiled = noiseless.compile(space)
    expected = compiled.deterministic_values(
        np.arange(720, dtype=np.int64), "cpu_b"
    )
    for (idx, _), m in rs.measurements.items():
        assert m.aggregate == pytest.approx(expected[idx], rel=1e-12)
