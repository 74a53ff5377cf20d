"""Benchmark runs over (instance, setting) pairs and summary tables."""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .engine import OPTIMAL, TIME_LIMIT, SolverConfig, solve
from .instances import MKCS, InstanceError, Problem, load
from .instances.mkcs import DimacsError
from .subsym import SETTINGS, configure, settings_for

log = logging.getLogger(__name__)

CSV_COLUMNS = ("instance", "setting", "status", "objective", "nodes", "time_s", "seed")
ERROR = "error"
SHIFT = 1.0
DEFAULT_TIME_LIMIT = 3600.0
FAMILY_TIME_LIMIT = {MKCS: 7200.0}


@dataclass(frozen=True)
class Job:
    """One solve. A ``config.time_limit_s`` of None means the family default."""

    source: str | Problem
    setting: str
    config: SolverConfig
    k: int | None = None


def _instance_label(source) -> str:
    if isinstance(source, Problem):
        return source.name
    return Path(source).stem


def run_job(job: Job) -> dict:
    """One solve; failures to read or configure the instance become an error row."""
    label = _instance_label(job.source)
    row = {"instance": label, "setting": job.setting, "status": ERROR, "objective": "",
           "nodes": 0, "time_s": 0.0, "seed": job.config.random_seed}
    try:
        problem = job.source if isinstance(job.source, Problem) else load(job.source, job.k)
        row["instance"] = problem.name or label
        configured = configure(problem, job.setting)
    except (InstanceError, DimacsError, ValueError, OSError) as exc:
        log.error("%s: %s", label, exc)
        return row
    limit = job.config.time_limit_s
    if limit is None:
        limit = FAMILY_TIME_LIMIT.get(problem.kind, DEFAULT_TIME_LIMIT)
    cfg = replace(job.config, setting=job.setting, time_limit_s=limit)
    report = solve(configured.program, cfg, configured.handlers)
    row["status"] = report.status
    row["objective"] = "" if report.objective is None else str(report.objective)
    row["nodes"] = report.nodes
    row["time_s"] = cfg.time_limit_s if report.status == TIME_LIMIT else round(report.time_s, 6)
    return row


def run(sources: Sequence[str | Problem], settings: Sequence[str] | None = None,
        config: SolverConfig | None = None, jobs: int = 1, k: int | None = None) -> list[dict]:
    """Rows in (instance, setting) order; ``settings=None`` picks the family's defaults."""
    config = config or SolverConfig()
    work = []
    for src in sources:
        chosen = settings
        if chosen is None:
            try:
                problem = src if isinstance(src, Problem) else load(src, k)
                chosen = settings_for(problem.kind)
            except (InstanceError, DimacsError, ValueError, OSError):
                chosen = ("no-sym",)
        work += [Job(src, s, config, k) for s in chosen]
    if jobs <= 1:
        return [run_job(j) for j in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_job, work))


def write_csv(rows: Iterable[dict], stream) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: row.get(c, "") for c in CSV_COLUMNS})


def read_csv(stream) -> list[dict]:
    reader = csv.DictReader(stream)
    if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_COLUMNS:
        raise ValueError(f"expected CSV header {','.join(CSV_COLUMNS)}")
    rows = []
    for line, raw in enumerate(reader, start=2):
        try:
            rows.append({**raw, "nodes": int(raw["nodes"]), "time_s": float(raw["time_s"])})
        except (TypeError, ValueError) as exc:
            raise ValueError(f"line {line}: {exc}") from None
    return rows


def shifted_geometric_mean(times: Sequence[float], shift: float = SHIFT) -> float:
    if not times:
        raise ValueError("no times to average")
    return math.exp(math.fsum(math.log(t + shift) for t in times) / len(times)) - shift


@dataclass
class SummaryRow:
    label: str
    count: int
    opt: dict = field(default_factory=dict)
    time: dict = field(default_factory=dict)


@dataclass
class Summary:
    settings: list
    rows: list
    excluded: list
    errors: list

    def format(self) -> str:
        out = io.StringIO()
        head = f"{'Instances':<16}{'#':>6}" + "".join(f"{s + ' Opt':>18}{'Time':>10}"
                                                      for s in self.settings)
        out.write(head + "\n")
        for r in self.rows:
            cells = "".join(f"{r.opt[s]:>18}{r.time[s]:>10.1f}" for s in self.settings)
            out.write(f"{r.label:<16}{r.count:>6}{cells}\n")
        if self.excluded:
            out.write(f"{len(self.excluded)} instances excluded: every setting hit the time limit\n")
        if self.errors:
            out.write(f"{len(self.errors)} instances skipped because of errors\n")
        return out.getvalue()


def _bound_label(a: float, b: float) -> str:
    def fmt(x):
        return "inf" if math.isinf(x) else f"{x:g}"
    return f"[{fmt(a)},{fmt(b)})"


def summarize(rows: Iterable[dict], class_bounds: Sequence[float] = (0, 10, 100, math.inf),
              shift: float = SHIFT, settings: Sequence[str] | None = None) -> Summary:
    """Per time class and setting: instances solved to optimality and shifted geometric mean.

    An instance falls in class ``[a, b)`` when its largest time over all
    settings lies in that range, so the classes partition the instances (0
    and infinity are always added to ``class_bounds``).
    Instances where every setting hit the time limit are excluded, and so are
    instances with an error row.
    """
    by_inst: dict[str, dict[str, dict]] = {}
    order: list[str] = []
    for row in rows:
        inst = row["instance"]
        if inst not in by_inst:
            by_inst[inst] = {}
            order.append(inst)
        by_inst[inst][row["setting"]] = row
    if settings is None:
        seen = {s for d in by_inst.values() for s in d}
        settings = [s for s in SETTINGS if s in seen] + sorted(seen - set(SETTINGS))
    settings = list(settings)
    bounds = sorted({float(b) for b in class_bounds} | {0.0, math.inf})
    errors = sorted(i for i in order if any(r["status"] == ERROR for r in by_inst[i].values()))
    excluded = sorted(i for i in order if i not in errors
                      and all(r["status"] == TIME_LIMIT for r in by_inst[i].values()))
    kept = sorted(i for i in order if i not in errors and i not in excluded)

    def row_for(label, members):
        r = SummaryRow(label, len(members))
        for s in settings:
            present = [by_inst[i][s] for i in members if s in by_inst[i]]
            r.opt[s] = sum(1 for x in present if x["status"] == OPTIMAL)
            r.time[s] = shifted_geometric_mean([float(x["time_s"]) for x in present], shift) \
                if present else math.nan
        return r

    table = []
    if kept:
        table.append(row_for("All", kept))
    for a, b in zip(bounds, bounds[1:]):
        members = [i for i in kept if a <= max(float(r["time_s"]) for r in by_inst[i].values()) < b]
        if members:
            table.append(row_for(_bound_label(a, b), members))
    return Summary(settings, table, excluded, errors)
