"""On-disk formats: JSON-lines episode logs, metric CSVs and report documents.

Floats are written with ``repr`` (shortest round-trip form), so files are
byte-identical for identical inputs and re-read values are bit-exact.
"""
from __future__ import annotations

import csv
import json
import os
from pathlib import Path
from typing import Iterable, Sequence

from ..diagnostics import AGGREGATE_METRICS, MetricsRecord, StepRecord
from ..harness import AggregateReport, EpisodeLog
from ..stats import Comparison


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False, ensure_ascii=False)


def write_episode_log(log: EpisodeLog, path: str | os.PathLike) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(_dumps(log.header()) + "\n")
        for rec in log.steps:
            fh.write(_dumps({"type": "step", **rec.to_dict()}) + "\n")
        fh.write(_dumps(log.summary()) + "\n")
    return path


def read_episode_log(path: str | os.PathLike) -> EpisodeLog:
    header = summary = None
    steps = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            obj = json.loads(line)
            kind = obj.pop("type", None)
            if kind == "header":
                header = obj
            elif kind == "step":
                steps.append(StepRecord.from_dict(obj))
            elif kind == "summary":
                summary = obj
            else:
                raise ValueError(f"{path}:{lineno}: unknown record type {kind!r}")
    if header is None or summary is None:
        raise ValueError(f"{path}: missing header or summary record")
    return EpisodeLog.from_parts({"type": "header", **header}, steps, summary)


def _cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_metrics_csv(
    records: Iterable[MetricsRecord],
    path: str | os.PathLike,
    index: Sequence[Sequence] | None = None,
    index_columns: Sequence[str] = ("seed_index", "episode"),
) -> Path:
    """One row per record in ``MetricsRecord.columns()`` order, optionally prefixed by index columns."""
    path = Path(path)
    records = list(records)
    header = MetricsRecord.columns()
    if index is not None:
        header = list(index_columns) + header
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for k, rec in enumerate(records):
            row = [_cell(v) for v in rec.values()]
            if index is not None:
                row = [_cell(v) for v in index[k]] + row
            w.writerow(row)
    return path


def read_metrics_csv(path: str | os.PathLike) -> list[MetricsRecord]:
    cols = MetricsRecord.columns()
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            kwargs = {}
            for c in cols:
                v = row[c]
                if c in ("total_conflicts", "horizon", "completed"):
                    kwargs[c] = int(v)
                elif c == "no_decision_activity":
                    kwargs[c] = v == "1"
                else:
                    kwargs[c] = float(v)
            out.append(MetricsRecord(**kwargs))
    return out


def write_report(report: AggregateReport, outdir: str | os.PathLike) -> dict[str, Path]:
    """Write ``report.json``, ``summary.csv``, ``per_seed.csv`` and ``episodes.csv``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {}
    paths["json"] = outdir / "report.json"
    paths["json"].write_text(json.dumps(report.to_dict(), indent=2, allow_nan=False) + "\n", encoding="utf-8")

    paths["summary"] = outdir / "summary.csv"
    with paths["summary"].open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "mean", "ci95", "seed_count", "episodes_per_seed"])
        for key, s in report.metrics.items():
            w.writerow([key, _cell(s.mean), _cell(s.ci95), report.seed_count, report.episodes_per_seed])

    paths["per_seed"] = outdir / "per_seed.csv"
    with paths["per_seed"].open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        keys = list(report.metrics)
        w.writerow(["seed_index"] + keys)
        for k, s in enumerate(report.seeds):
            w.writerow([s] + [_cell(report.metrics[key].per_seed[k]) for key in keys])

    if report.episodes:
        paths["episodes"] = write_metrics_csv(
            [rec for _, _, rec in report.episodes], outdir / "episodes.csv",
            index=[(s, e) for s, e, _ in report.episodes],
        )
    return paths


def read_report(path: str | os.PathLike) -> AggregateReport:
    """Load a report from ``report.json`` or a directory containing it."""
    path = Path(path)
    if path.is_dir():
        path = path / "report.json"
    return AggregateReport.from_dict(json.loads(path.read_text(encoding="utf-8")))


COMPARISON_COLUMNS = ["metric", "mean_a", "mean_b", "delta", "direction", "significant", "cell",
                      "statistic", "df", "p_value"]


def write_comparison_csv(rows: Sequence[Comparison], path: str | os.PathLike) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COMPARISON_COLUMNS)
        for c in rows:
            w.writerow([c.metric, _cell(c.mean_a), _cell(c.mean_b), _cell(c.delta), c.direction,
                        _cell(c.significant), c.cell, _cell(c.statistic), _cell(c.df), _cell(c.p_value)])
    return path


__all__ = [
    "AGGREGATE_METRICS", "write_episode_log", "read_episode_log", "write_metrics_csv",
    "read_metrics_csv", "write_report", "read_report", "write_comparison_csv",
]
