"""Command-line surface tying the modules into reproducible batch workflows.

Exit codes: 0 success, 1 usage error, 2 execution failure, 3 pairing or
fingerprint violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .compare import ComparisonReport, asymmetry_report, compare_objects
from .design import (
    FactorSplit,
    SamplePlan,
    factorial_2k,
    full_factorial,
    rct_assign,
    spec_point,
    stratified_sample,
)
from .errors import EcbenchError, FingerprintError, PairingError
from .fingerprints import fingerprint
from .manifest import ResultWriter, RunManifest, emit_report, load_results
from .model import SyntheticModel
from .oracle import Methodology, methodology_comparison
from .runner import ExecutorSpec, execute_plan
from .space import ConfigSpace, ObjectConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_EXECUTION = 2
EXIT_INTEGRITY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_object(path: str) -> ObjectConfig:
    doc = json.loads(Path(path).read_text())
    return ObjectConfig(
        object_id=doc["object_id"],
        settings=tuple(doc.get("settings", {}).items()),
    )


def plan_group_map(plan: SamplePlan) -> dict[tuple[int, int], str]:
    """Key -> stratum label, replaying the plan's occurrence ordering."""
    occurrence: dict[int, int] = {}
    mapping: dict[tuple[int, int], str] = {}
    for entry in plan.entries:
        ordinal = occurrence.get(entry.ec_index, 0)
        occurrence[entry.ec_index] = ordinal + 1
        mapping[(entry.ec_index, ordinal)] = entry.stratum or ""
    return mapping


def _cmd_space_info(args) -> int:
    space = ConfigSpace.load(args.space)
    print(f"fingerprint: {fingerprint(space.to_dict())}")
    print(f"cardinality: {space.cardinality}")
    for f in space.factors:
        weighted = " (weighted)" if f.weights is not None else ""
        print(f"  {f.name}: {len(f.levels)} levels{weighted}")
    return EXIT_OK


def _cmd_plan(args) -> int:
    space = ConfigSpace.load(args.space)
    if args.design == "stratified":
        plan = stratified_sample(space, args.stratum_factor, args.iterations,
                                 args.reps, args.seed)
    elif args.design == "factorial2k":
        split = FactorSplit.from_dict(json.loads(Path(args.split).read_text()))
        defaults = {
            k: int(v) for k, v in (d.split("=", 1) for d in args.default)
        }
        plan = factorial_2k(space, split, defaults, args.reps, args.seed)
    elif args.design == "full-factorial":
        plan = full_factorial(space, args.reps)
    elif args.design == "rct":
        assignment = rct_assign(space, args.per_arm, args.reps, args.seed)
        assignment.control.save(args.out_control)
        assignment.treatment.save(args.out_treatment)
        print(f"wrote {args.out_control} and {args.out_treatment}")
        return EXIT_OK
    else:  # spec-point
        labels = dict(kv.split("=", 1) for kv in args.level_label)
        cfg = space.config_from_labels(labels)
        plan = spec_point(space, cfg, stratum_factor=args.stratum_factor)
    plan.save(args.out)
    print(f"wrote {args.out} ({len(plan.entries)} entries, "
          f"fingerprint {plan.fingerprint[:12]})")
    return EXIT_OK


def _cmd_run(args) -> int:
    space = ConfigSpace.load(args.space)
    plan = SamplePlan.load(args.plan)
    executor_doc = json.loads(Path(args.executor).read_text())
    executor = ExecutorSpec.from_dict(executor_doc)
    obj = _load_object(args.object)

    already_done: set[tuple[int, int]] | None = None
    append = False
    out = Path(args.out)
    if args.resume and out.exists():
        occurrence: dict[int, int] = {}
        already_done = set()
        for line in out.read_text().splitlines():
            if not line.strip():
                continue
            doc = json.loads(line)
            if doc.get("error") is not None:
                continue
            ordinal = occurrence.get(doc["ec_index"], 0)
            occurrence[doc["ec_index"]] = ordinal + 1
            already_done.add((doc["ec_index"], ordinal))
        append = True

    manifest = RunManifest(
        space_fingerprint=fingerprint(space.to_dict()),
        plan_fingerprint=plan.fingerprint,
        executor_hash=fingerprint(executor_doc),
        object_config={"object_id": obj.object_id,
                       "settings": dict(obj.settings)},
        seeds={"plan_seed": plan.seed},
    )
    writer = ResultWriter(out, manifest, append=append)
    try:
        results = execute_plan(
            executor, obj, space, plan,
            skip_failures=args.skip_failures,
            policy=args.agg,
            on_measurement=writer.write,
            already_done=already_done,
        )
    finally:
        writer.finalize()
    print(f"wrote {args.out} ({len(results.measurements)} measurements, "
          f"{len(results.failures)} failures)")
    return EXIT_OK


def _cmd_compare(args) -> int:
    a, _ = load_results(args.a)
    b, _ = load_results(args.b)
    group_by = None
    if args.group_by_plan:
        group_by = plan_group_map(SamplePlan.load(args.group_by_plan))
    report = compare_objects(a, b, args.level, group_by=group_by)
    emit_report(report, "json", args.out)
    if args.csv:
        emit_report(report, "csv", args.csv)
    if args.asymmetry:
        emit_report(asymmetry_report(a, b, args.level), "json", args.asymmetry)
    g = report.overall
    print(f"{report.minuend_id} - {report.subtrahend_id}: "
          f"mean {g.interval.center:.6f}, "
          f"[{g.interval.low:.6f}, {g.interval.high:.6f}] "
          f"@ {args.level}: {g.verdict.value}")
    return EXIT_OK


def _parse_methodologies(doc: dict) -> list[Methodology]:
    out = []
    for m in doc["methodologies"]:
        params = dict(m.get("params", {}))
        if "split" in params:
            params["split"] = FactorSplit.from_dict(params["split"])
        out.append(Methodology(kind=m["kind"], params=params))
    return out


def _cmd_simulate(args) -> int:
    space = ConfigSpace.load(args.space)
    model = SyntheticModel.load(args.model)
    doc = json.loads(Path(args.methodologies).read_text())
    methodologies = _parse_methodologies(doc)
    objects = tuple(doc["objects"])
    rows = methodology_comparison(model, space, methodologies,
                                  args.iterations, args.level, args.seed,
                                  objects)
    emit_report(rows, args.format, args.out)
    for r in rows:
        print(f"{r.methodology:16s} cost={r.cost_per_object:4d}/object "
              f"coverage={r.coverage:.4f}")
    return EXIT_OK


def _cmd_report(args) -> int:
    doc = json.loads(Path(args.input).read_text())
    report = ComparisonReport.from_dict(doc)
    emit_report(report, args.format, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="ecbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p_space = sub.add_parser("space", parents=[], help="space utilities")
    space_sub = p_space.add_subparsers(dest="space_command", required=True)
    p_info = space_sub.add_parser("info", help="print cardinality and factors")
    p_info.add_argument("--space", required=True)
    p_info.set_defaults(func=_cmd_space_info)

    p_plan = sub.add_parser("plan", help="generate a sampling plan")
    plan_sub = p_plan.add_subparsers(dest="design", required=True)

    ps = plan_sub.add_parser("stratified")
    ps.add_argument("--space", required=True)
    ps.add_argument("--stratum-factor", required=True)
    ps.add_argument("--iterations", type=int, required=True)
    ps.add_argument("--reps", type=int, default=3)
    ps.add_argument("--seed", type=int, required=True)
    ps.add_argument("--out", required=True)

    pf = plan_sub.add_parser("factorial2k")
    pf.add_argument("--space", required=True)
    pf.add_argument("--split", required=True,
                    help="JSON file: {factor: {low: [...], high: [...]}}")
    pf.add_argument("--default", action="append", default=[],
                    metavar="FACTOR=LEVEL_INDEX")
    pf.add_argument("--reps", type=int, default=3)
    pf.add_argument("--seed", type=int, required=True)
    pf.add_argument("--out", required=True)

    pff = plan_sub.add_parser("full-factorial")
    pff.add_argument("--space", required=True)
    pff.add_argument("--reps", type=int, default=3)
    pff.add_argument("--out", required=True)

    pr = plan_sub.add_parser("rct")
    pr.add_argument("--space", required=True)
    pr.add_argument("--per-arm", type=int, required=True)
    pr.add_argument("--reps", type=int, default=3)
    pr.add_argument("--seed", type=int, required=True)
    pr.add_argument("--out-control", required=True)
    pr.add_argument("--out-treatment", required=True)

    pp = plan_sub.add_parser("spec-point")
    pp.add_argument("--space", required=True)
    pp.add_argument("--level-label", action="append", required=True,
                    metavar="FACTOR=LABEL")
    pp.add_argument("--stratum-factor", default=None)
    pp.add_argument("--out", required=True)

    for p in (ps, pf, pff, pr, pp):
        p.set_defaults(func=_cmd_plan)

    p_run = sub.add_parser("run", help="execute a plan")
    p_run.add_argument("--space", required=True)
    p_run.add_argument("--plan", required=True)
    p_run.add_argument("--executor", required=True)
    p_run.add_argument("--object", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--agg", choices=["mean", "median"], default=None)
    p_run.add_argument("--skip-failures", action="store_true")
    p_run.add_argument("--resume", action="store_true")
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare", help="paired comparison of two runs")
    p_cmp.add_argument("--a", required=True, help="minuend results file")
    p_cmp.add_argument("--b", required=True, help="subtrahend results file")
    p_cmp.add_argument("--level", type=float, required=True)
    p_cmp.add_argument("--group-by-plan", default=None)
    p_cmp.add_argument("--out", required=True)
    p_cmp.add_argument("--csv", default=None)
    p_cmp.add_argument("--asymmetry", default=None,
                       help="also write a ratio-asymmetry report")
    p_cmp.set_defaults(func=_cmd_compare)

    p_sim = sub.add_parser("simulate", help="Monte Carlo coverage comparison")
    p_sim.add_argument("--space", required=True)
    p_sim.add_argument("--model", required=True)
    p_sim.add_argument("--methodologies", required=True,
                       help="JSON file: {objects: [..], methodologies: [..]}")
    p_sim.add_argument("--iterations", type=int, required=True)
    p_sim.add_argument("--level", type=float, required=True)
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--format", choices=["csv", "json"], default="csv")
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=_cmd_simulate)

    p_rep = sub.add_parser("report", help="re-emit a stored report")
    p_rep.add_argument("--input", required=True)
    p_rep.add_argument("--format", choices=["csv", "json"], required=True)
    p_rep.add_argument("--out", required=True)
    p_rep.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PairingError, FingerprintError) as e:
        print(f"ecbench: integrity error: {e}", file=sys.stderr)
        return EXIT_INTEGRITY
    except EcbenchError as e:
        print(f"ecbench: error: {e}", file=sys.stderr)
        return EXIT_EXECUTION
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as e:
        print(f"ecbench: error: {e}", file=sys.stderr)
        return EXIT_EXECUTION


if __name__ == "__main__":
    raise SystemExit(main())
