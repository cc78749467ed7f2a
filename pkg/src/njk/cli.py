"""Command line interface: njk run | catalog | parse.

Exit codes: 0 when every task met expectations (negative controls are
expected to fail and count as met when they do), 1 on any mismatch, 2 on
input errors.  Machine reports are deterministic: identical inputs and
flags produce byte-identical output; timing appears only in the text
rendering.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

from . import catalog as catalog_mod
from .algebroids import check_lie_algebroid
from .dsl import Document, DocumentError, Task, parse_document
from .graded import theorem1_check
from .groupoids import lemma_check, multiplicative_check, theorem2_check
from .reports import CheckReport
from .scalars import Config, VerificationResult, proved_nonzero
from .tensors import nijenhuis_torsion, vvform_is_zero

SCHEMA = "njk-report/1"


@dataclass
class TaskResult:
    label: str
    report: CheckReport
    expected_fail: frozenset = frozenset()
    seconds: float = 0.0

    @property
    def met(self) -> bool:
        for item in self.report.items:
            want_fail = item.name in self.expected_fail
            if item.result.holds == want_fail:
                return False
        return True


@dataclass
class RunReport:
    config: Config
    results: list[TaskResult] = field(default_factory=list)

    @property
    def met(self) -> bool:
        return all(r.met for r in self.results)

    @property
    def exit_code(self) -> int:
        return 0 if self.met else 1


def _result_json(r: VerificationResult) -> dict:
    return {
        "verdict": r.verdict,
        "mode": r.mode,
        "n_points": r.n_points,
        "tolerance": r.tolerance,
        "witness": [[k, v] for k, v in r.witness],
        "value": r.value,
        "note": r.note,
    }


def render_machine(run: RunReport) -> str:
    doc = {
        "schema": SCHEMA,
        "config": {
            "mode": run.config.mode,
            "samples": run.config.samples,
            "tol": run.config.tol,
            "seed": run.config.seed,
            "precision": run.config.precision,
        },
        "tasks": [
            {
                "task": tr.label,
                "identities": [
                    {"name": item.name, **_result_json(item.result)}
                    for item in tr.report.items
                ],
                "notes": list(tr.report.notes),
                "expected_fail": sorted(tr.expected_fail),
                "met": tr.met,
            }
            for tr in run.results
        ],
        "overall": {"met": run.met, "exit_code": run.exit_code},
    }
    return json.dumps(doc, indent=2) + "\n"


def render_text(run: RunReport) -> str:
    lines = []
    for tr in run.results:
        status = "MET" if tr.met else "MISMATCH"
        lines.append(f"task {tr.label}: {status} ({tr.seconds:.2f}s)")
        for item in tr.report.items:
            marker = ""
            if item.name in tr.expected_fail:
                marker = " [expected to fail]"
            lines.append(item.line() + marker)
        for note in tr.report.notes:
            lines.append(f"  note: {note}")
    lines.append(f"overall: {'MET' if run.met else 'MISMATCH'}")
    return "\n".join(lines) + "\n"


def run_task(doc: Document, task: Task, config: Config) -> TaskResult:
    t0 = time.perf_counter()
    expected_fail: frozenset = frozenset()
    try:
        if task.kind == "torsion":
            _, T = doc.vvforms[task.args[0]]
            report = CheckReport(f"torsion of {task.args[0]}")
            report.add("torsion[T_N = 0]", vvform_is_zero(nijenhuis_torsion(T), config))
        elif task.kind == "algebroid-check":
            report = check_lie_algebroid(doc.algebroids[task.args[0]], config)
        elif task.kind == "theorem1":
            A = doc.algebroids[task.args[0]]
            _, _, U = doc.bundlemaps[task.args[1]]
            report = theorem1_check(A, U, config)
        elif task.kind == "theorem2":
            P = doc.groupoids[task.args[0]]
            _, _, U = doc.bundlemaps[task.args[1]]
            report = theorem2_check(P, U, config).report
        elif task.kind == "lemma":
            P = doc.groupoids[task.args[0]]
            _, _, U = doc.bundlemaps[task.args[1]]
            report = lemma_check(P, U, config)
        elif task.kind == "multiplicative":
            P = doc.groupoids[task.args[0]]
            chart_name, T = doc.vvforms[task.args[1]]
            if chart_name != P.G.name:
                raise ValueError(f"tensor {task.args[1]} lives on {chart_name}, not {P.G.name}")
            report = multiplicative_check(P, T, config)
        elif task.kind == "catalog":
            entry = catalog_mod.build(task.args[0])
            report = entry.verify(config)
            expected_fail = entry.expected_fail
        else:
            raise ValueError(f"unknown task kind {task.kind}")
    except Exception as err:  # record, never abort sibling tasks
        report = CheckReport(task.label())
        report.add("error", proved_nonzero(f"{type(err).__name__}: {err}"))
    return TaskResult(task.label(), report, expected_fail, time.perf_counter() - t0)


def run_document(doc: Document, config: Config) -> RunReport:
    run = RunReport(config)
    for task in doc.tasks:
        run.results.append(run_task(doc, task, config))
    return run


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=["exact", "sample", "auto"], default="auto")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--precision", type=int, default=100, help="working precision in bits")
    p.add_argument("--report", choices=["text", "machine", "both"], default="text")


def _config_from(args) -> Config:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("NJK_SEED", "0"))
    return Config(
        mode=args.mode,
        samples=args.samples,
        tol=args.tol,
        seed=seed,
        precision=args.precision,
    )


def _emit(run: RunReport, kind: str) -> None:
    if kind in ("text", "both"):
        sys.stdout.write(render_text(run))
    if kind in ("machine", "both"):
        sys.stdout.write(render_machine(run))


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="njk",
        description="exact symbolic verification of Nijenhuis structures on "
        "Lie groupoids and algebroids",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the tasks of a definition file")
    p_run.add_argument("file")
    _add_config_flags(p_run)

    p_cat = sub.add_parser("catalog", help="verify a prebuilt catalog entry")
    p_cat.add_argument("name", nargs="?", default=None)
    p_cat.add_argument("--list", action="store_true", help="list catalog entries")
    _add_config_flags(p_cat)

    p_parse = sub.add_parser("parse", help="parse a definition file and report structure")
    p_parse.add_argument("file")

    args = parser.parse_args(argv)

    if args.command == "parse":
        try:
            text = open(args.file, encoding="utf-8").read()
        except OSError as err:
            print(f"error: {err}", file=sys.stderr)
            return 2
        try:
            doc = parse_document(text, args.file)
        except DocumentError as err:
            print(f"error: {args.file}: {err}", file=sys.stderr)
            return 2
        print(
            f"{args.file}: {len(doc.opaques)} opaques, {len(doc.charts)} charts, "
            f"{len(doc.maps)} maps, {len(doc.vvforms)} tensors, "
            f"{len(doc.bundlemaps)} bundle maps, {len(doc.algebroids)} algebroids, "
            f"{len(doc.groupoids)} groupoids, {len(doc.tasks)} tasks"
        )
        return 0

    if args.command == "catalog":
        if args.list or args.name is None:
            for name in sorted(catalog_mod.BUILDERS):
                print(name)
            return 0
        config = _config_from(args)
        try:
            entry = catalog_mod.build(args.name)
        except KeyError as err:
            print(f"error: {err}", file=sys.stderr)
            return 2
        t0 = time.perf_counter()
        report = entry.verify(config)
        tr = TaskResult(
            f"catalog {args.name}", report, entry.expected_fail, time.perf_counter() - t0
        )
        run = RunReport(config, [tr])
        _emit(run, args.report)
        return run.exit_code

    # run
    config = _config_from(args)
    try:
        text = open(args.file, encoding="utf-8").read()
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    try:
        doc = parse_document(text, args.file)
    except DocumentError as err:
        print(f"error: {args.file}: {err}", file=sys.stderr)
        return 2
    run = run_document(doc, config)
    _emit(run, args.report)
    return run.exit_code


if __name__ == "__main__":
    sys.exit(main())
