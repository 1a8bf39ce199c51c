"""Plan execution against evaluated objects.

Two executors: a real command executor (wall-clock timing of subprocesses)
and a synthetic model executor (deterministic desk-scale stand-in). Execution
is strictly sequential so real timings never overlap.
"""

from __future__ import annotations

import shlex
import statistics
import string
import subprocess
import time
from dataclasses import dataclass, field

from .errors import ExecutionError, FingerprintError
from .fingerprints import fingerprint
from .design import SamplePlan
from .model import SyntheticModel, synth_time
from .space import ConfigSpace, Configuration, ObjectConfig


@dataclass(frozen=True)
class ExecutorSpec:
    """How to obtain one duration: run a templated command, or evaluate a
    synthetic model. Command templates are keyed by stratum label ('*' is the
    catch-all) and use {factor_name} placeholders."""

    kind: str  # "command" | "synthetic"
    templates: tuple[tuple[str, str], ...] = ()
    model: SyntheticModel | None = None
    stratum_factor: str | None = None
    timeout: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("command", "synthetic"):
            raise ExecutionError(f"unknown executor kind {self.kind!r}")
        if self.kind == "synthetic" and self.model is None:
            raise ExecutionError("synthetic executor needs a model")
        if self.kind == "command" and not self.templates:
            raise ExecutionError("command executor needs templates")

    def template_for(self, stratum: str | None) -> str:
        tmap = dict(self.templates)
        if stratum is not None and stratum in tmap:
            return tmap[stratum]
        if "*" in tmap:
            return tmap["*"]
        raise ExecutionError(f"no command template for stratum {stratum!r}")

    def validate_against(self, space: ConfigSpace) -> None:
        if self.kind != "command":
            return
        names = {f.name for f in space.factors}
        for stratum, tpl in self.templates:
            for _, fld, _, _ in string.Formatter().parse(tpl):
                if fld is not None and fld not in names:
                    raise ExecutionError(
                        f"template for {stratum!r} references unknown factor {fld!r}"
                    )

    @classmethod
    def from_dict(cls, doc: dict) -> "ExecutorSpec":
        kind = doc["kind"]
        if kind == "command":
            return cls(
                kind="command",
                templates=tuple(doc["templates"].items()),
                stratum_factor=doc.get("stratum_factor"),
                timeout=doc.get("timeout"),
            )
        return cls(kind="synthetic", model=SyntheticModel.from_dict(doc["model"]))

    def to_dict(self) -> dict:
        if self.kind == "command":
            doc: dict = {"kind": "command", "templates": dict(self.templates)}
            if self.stratum_factor is not None:
                doc["stratum_factor"] = self.stratum_factor
            if self.timeout is not None:
                doc["timeout"] = self.timeout
            return doc
        assert self.model is not None
        return {"kind": "synthetic", "model": self.model.to_dict()}


@dataclass(frozen=True)
class Measurement:
    ec_index: int
    object_id: str
    replicates: tuple[float, ...]
    aggregate: float
    policy: str
    started_at: float = 0.0
    ended_at: float = 0.0
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "ec_index": self.ec_index,
            "object_id": self.object_id,
            "replicates": list(self.replicates),
            "aggregate": self.aggregate,
            "policy": self.policy,
            "started_at": self.started_at,
            "ended_at": self.ended_at,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Measurement":
        return cls(
            ec_index=doc["ec_index"],
            object_id=doc["object_id"],
            replicates=tuple(doc["replicates"]),
            aggregate=doc["aggregate"],
            policy=doc["policy"],
            started_at=doc.get("started_at", 0.0),
            ended_at=doc.get("ended_at", 0.0),
            error=doc.get("error"),
        )


@dataclass
class ResultSet:
    """Measurements keyed by (ec index, occurrence ordinal) for one object
    under one plan. Failed entries live in `failures`, never in the keyed map."""

    object_id: str
    plan_fingerprint: str
    measurements: dict[tuple[int, int], Measurement] = field(default_factory=dict)
    failures: list[Measurement] = field(default_factory=list)

    def add(self, key: tuple[int, int], m: Measurement) -> None:
        if key in self.measurements:
            raise ExecutionError(f"duplicate measurement key {key}")
        self.measurements[key] = m

    def aggregates(self) -> dict[tuple[int, int], float]:
        return {k: m.aggregate for k, m in self.measurements.items()}


def aggregate(replicates: list[float], policy: str) -> float:
    if policy == "mean":
        return statistics.fmean(replicates)
    if policy == "median":
        return statistics.median(replicates)
    raise ExecutionError(f"unknown aggregation policy {policy!r}")


def _run_command(template: str, labels: dict[str, str],
                 timeout: float | None) -> float:
    cmd = template.format(**labels)
    started = time.monotonic()
    try:
        proc = subprocess.run(
            shlex.split(cmd), capture_output=True, timeout=timeout
        )
    except FileNotFoundError as e:
        raise ExecutionError(f"launch failed: {e}") from e
    except subprocess.TimeoutExpired as e:
        raise ExecutionError(f"timed out after {timeout}s: {cmd}") from e
    elapsed = time.monotonic() - started
    if proc.returncode != 0:
        raise ExecutionError(
            f"exit status {proc.returncode}: {cmd}\n{proc.stderr.decode(errors='replace')}"
        )
    if elapsed <= 0:
        raise ExecutionError(f"non-positive measured duration {elapsed}")
    return elapsed


def measure(executor: ExecutorSpec, obj: ObjectConfig, space: ConfigSpace,
            ec: Configuration, reps: int, policy: str,
            stratum: str | None = None) -> Measurement:
    """Run `reps` sequential replicates and aggregate them."""
    if reps < 1:
        raise ExecutionError("reps must be >= 1")
    started_at = time.time()
    values: list[float] = []
    if executor.kind == "synthetic":
        assert executor.model is not None
        for r in range(reps):
            values.append(synth_time(executor.model, space, obj, ec, r))
        # synthetic runs carry no meaningful wall time; zero timestamps keep
        # result files byte-reproducible
        started_at = 0.0
        return Measurement(
            ec_index=ec.index,
            object_id=obj.object_id,
            replicates=tuple(values),
            aggregate=aggregate(values, policy),
            policy=policy,
            started_at=0.0,
            ended_at=0.0,
        )
    else:
        if stratum is None and executor.stratum_factor is not None:
            pos = ec.level_index(executor.stratum_factor)
            stratum = space.factor(executor.stratum_factor).levels[pos]
        template = executor.template_for(stratum)
        labels = space.labels_of(ec)
        for _ in range(reps):
            values.append(_run_command(template, labels, executor.timeout))
    ended_at = time.time()
    return Measurement(
        ec_index=ec.index,
        object_id=obj.object_id,
        replicates=tuple(values),
        aggregate=aggregate(values, policy),
        policy=policy,
        started_at=started_at,
        ended_at=ended_at,
    )


def execute_plan(executor: ExecutorSpec, obj: ObjectConfig, space: ConfigSpace,
                 plan: SamplePlan, skip_failures: bool = False,
                 policy: str | None = None,
                 on_measurement=None,
                 already_done: set[tuple[int, int]] | None = None) -> ResultSet:
    """One measurement per plan entry, strictly in plan order.

    `on_measurement(key, measurement)` is invoked after each entry (incremental
    persistence hook). `already_done` keys are skipped, enabling resume of an
    interrupted run without duplicate keys.
    """
    if plan.space_fingerprint != fingerprint(space.to_dict()):
        raise FingerprintError("plan was generated for a different space")
    executor.validate_against(space)
    policy = policy or plan.policy
    results = ResultSet(object_id=obj.object_id, plan_fingerprint=plan.fingerprint)
    occurrence: dict[int, int] = {}
    for entry in plan.entries:
        ordinal = occurrence.get(entry.ec_index, 0)
        occurrence[entry.ec_index] = ordinal + 1
        key = (entry.ec_index, ordinal)
        if already_done and key in already_done:
            continue
        ec = space.config_at(entry.ec_index)
        try:
            m = measure(executor, obj, space, ec, plan.reps, policy,
                        stratum=entry.stratum)
        except ExecutionError as e:
            failed = Measurement(
                ec_index=entry.ec_index, object_id=obj.object_id,
                replicates=(), aggregate=float("nan"), policy=policy,
                error=str(e),
            )
            if not skip_failures:
                raise
            results.failures.append(failed)
            if on_measurement is not None:
                on_measurement(key, failed)
            continue
        results.add(key, m)
        if on_measurement is not None:
            on_measurement(key, m)
    return results
