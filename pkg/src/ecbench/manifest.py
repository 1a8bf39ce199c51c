"""Run manifests, result persistence, and report emission.

Every result file on disk is accompanied by exactly one manifest recording
the fingerprint chain space -> plan -> results; a broken link is a load-time
error. Report files are byte-stable for identical inputs.
"""

from __future__ import annotations

import csv
import io
import json
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .compare import AsymmetryReport, ComparisonReport
from .errors import FingerprintError
from .fingerprints import canonical_json, fingerprint_bytes
from .oracle import CoverageResult
from .runner import Measurement, ResultSet


def manifest_path(results_path: str | Path) -> Path:
    return Path(str(results_path) + ".manifest.json")


def host_descriptor() -> dict:
    u = platform.uname()
    return {
        "system": u.system,
        "release": u.release,
        "machine": u.machine,
        "python": platform.python_version(),
    }


@dataclass
class RunManifest:
    space_fingerprint: str
    plan_fingerprint: str
    executor_hash: str
    object_config: dict
    seeds: dict = field(default_factory=dict)
    host: dict = field(default_factory=host_descriptor)
    tool_version: str = __version__
    created_at: float = field(default_factory=time.time)
    results_sha256: str | None = None

    def to_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "space_fingerprint": self.space_fingerprint,
            "plan_fingerprint": self.plan_fingerprint,
            "executor_hash": self.executor_hash,
            "object_config": self.object_config,
            "seeds": self.seeds,
            "host": self.host,
            "created_at": self.created_at,
            "results_sha256": self.results_sha256,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RunManifest":
        return cls(
            space_fingerprint=doc["space_fingerprint"],
            plan_fingerprint=doc["plan_fingerprint"],
            executor_hash=doc["executor_hash"],
            object_config=doc.get("object_config", {}),
            seeds=doc.get("seeds", {}),
            host=doc.get("host", {}),
            tool_version=doc.get("tool_version", "unknown"),
            created_at=doc.get("created_at", 0.0),
            results_sha256=doc.get("results_sha256"),
        )


def measurement_line(m: Measurement) -> str:
    return canonical_json(m.to_dict())


class ResultWriter:
    """Incremental JSON Lines writer: one flushed line per measurement, with
    the manifest (including the results-file hash) written at finalize."""

    def __init__(self, path: str | Path, manifest: RunManifest,
                 append: bool = False):
        self.path = Path(path)
        self.manifest = manifest
        mode = "a" if append and self.path.exists() else "w"
        self._fh = self.path.open(mode)

    def write(self, key: tuple[int, int], m: Measurement) -> None:
        self._fh.write(measurement_line(m) + "\n")
        self._fh.flush()

    def finalize(self) -> None:
        self._fh.close()
        self.manifest.results_sha256 = fingerprint_bytes(self.path.read_bytes())
        manifest_path(self.path).write_text(
            json.dumps(self.manifest.to_dict(), sort_keys=True, indent=2) + "\n"
        )


def persist_results(results: ResultSet, manifest: RunManifest,
                    path: str | Path) -> None:
    if manifest.plan_fingerprint != results.plan_fingerprint:
        raise FingerprintError(
            "manifest plan fingerprint does not match the result set"
        )
    writer = ResultWriter(path, manifest)
    for key in sorted(results.measurements):
        writer.write(key, results.measurements[key])
    for m in results.failures:
        writer.write((m.ec_index, -1), m)
    writer.finalize()


def load_results(path: str | Path) -> tuple[ResultSet, RunManifest]:
    """Load a results file and validate it against its manifest: content hash,
    one manifest per file, no duplicate keys. Unknown extra fields in either
    file are ignored for forward compatibility."""
    path = Path(path)
    mpath = manifest_path(path)
    if not mpath.exists():
        raise FingerprintError(f"missing manifest for {path}")
    manifest = RunManifest.from_dict(json.loads(mpath.read_text()))

    data = path.read_bytes()
    if manifest.results_sha256 is not None:
        actual = fingerprint_bytes(data)
        if actual != manifest.results_sha256:
            raise FingerprintError(
                f"results file hash {actual[:12]}... does not match manifest"
            )

    results: ResultSet | None = None
    occurrence: dict[int, int] = {}
    for lineno, line in enumerate(data.decode().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as e:
            raise FingerprintError(f"{path}:{lineno}: parse failure: {e}") from e
        m = Measurement.from_dict(doc)
        if results is None:
            results = ResultSet(object_id=m.object_id,
                                plan_fingerprint=manifest.plan_fingerprint)
        if m.error is not None:
            results.failures.append(m)
            continue
        ordinal = occurrence.get(m.ec_index, 0)
        occurrence[m.ec_index] = ordinal + 1
        key = (m.ec_index, ordinal)
        results.add(key, m)
    if results is None:
        results = ResultSet(object_id=str(manifest.object_config.get("object_id", "")),
                            plan_fingerprint=manifest.plan_fingerprint)
    return results, manifest


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def comparison_csv(report: ComparisonReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["group", "n", "mean_diff", "ci_lo", "ci_hi", "level", "verdict"])
    for g in (report.overall, *report.groups):
        w.writerow([
            g.group, g.n, _fmt(g.interval.center), _fmt(g.interval.low),
            _fmt(g.interval.high), _fmt(g.interval.level), g.verdict.value,
        ])
    return buf.getvalue()


def coverage_csv(rows: list[CoverageResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["methodology", "params", "cost_per_object", "iterations",
                "coverage"])
    for r in rows:
        w.writerow([r.methodology, r.params, r.cost_per_object, r.iterations,
                    _fmt(r.coverage)])
    return buf.getvalue()


def emit_report(report: ComparisonReport | AsymmetryReport | list[CoverageResult],
                fmt: str, path: str | Path) -> None:
    """Bit-stable serialization: sorted keys in JSON, fixed 6-decimal CSV."""
    path = Path(path)
    if fmt == "json":
        if isinstance(report, list):
            doc: object = [r.to_row() for r in report]
        else:
            doc = report.to_dict()
        path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    elif fmt == "csv":
        if isinstance(report, list):
            path.write_text(coverage_csv(report))
        elif isinstance(report, ComparisonReport):
            path.write_text(comparison_csv(report))
        else:
            raise ValueError("asymmetry reports are JSON-only")
    else:
        raise ValueError(f"unknown report format {fmt!r}")
