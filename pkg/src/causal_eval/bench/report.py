"""Report files: long-form rows, effect tables, summary statistics, scatter data."""

from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
from scipy.stats import spearmanr

from .runner import MetricReport

METRICS = ("shd", "sid", "tvd_mean", "tvd_sum")
PAIRS = (("shd", "sid"), ("shd", "tvd_mean"), ("sid", "tvd_mean"))
ROW_FIELDS = ("experiment", "dataset_id", "trial", "algorithm", "shd", "sid",
              "tvd_mean", "tvd_sum", "seed", "extension", "status")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv(header, rows) -> str:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _clean(x):
    if x is None:
        return None
    x = float(x)
    return None if math.isnan(x) else x


def _spearman(rows, a, b):
    xs = [getattr(r, a) for r in rows]
    ys = [getattr(r, b) for r in rows]
    if len(rows) < 3 or len(set(xs)) < 2 or len(set(ys)) < 2:
        return None
    return _clean(spearmanr(xs, ys).statistic)


def _describe(values):
    if not values:
        return {"n": 0, "mean": None, "median": None, "min": None, "max": None}
    arr = np.asarray(values, dtype=float)
    return {"n": len(values), "mean": float(arr.mean()), "median": float(np.median(arr)),
            "min": float(arr.min()), "max": float(arr.max())}


def _flags(report: MetricReport, by_alg: dict) -> dict:
    """Directional checks for the studies that make a qualitative claim."""
    flags = {}
    med = {alg: stats["tvd_sum"]["median"] for alg, stats in by_alg.items()}
    if report.experiment == "algo_compare" and med.get("ges") is not None:
        others = [m for alg, m in med.items() if alg != "ges" and m is not None]
        flags["ges_lowest_median_tvd_sum"] = all(med["ges"] <= m for m in others)
    if report.experiment == "spec_error":
        over = [r for r in report.rows if r.algorithm == "overspecify" and r.status == "ok"]
        flags["overspecify_zero_sid"] = bool(over) and all(r.sid == 0 for r in over)
        if med.get("overspecify") and med.get("underspecify") is not None:
            flags["under_over_tvd_sum_ratio"] = med["underspecify"] / med["overspecify"]
    return flags


def summarize(report: MetricReport) -> dict:
    ok = [r for r in report.rows if r.status == "ok"]
    algorithms = list(dict.fromkeys(r.algorithm for r in report.rows))
    by_alg = {
        alg: {m: _describe([getattr(r, m) for r in ok if r.algorithm == alg]) for m in METRICS}
        for alg in algorithms
    }
    return {
        "experiment": report.experiment,
        "n_rows": len(report.rows),
        "n_failed": len(report.rows) - len(ok),
        "algorithms": by_alg,
        "spearman": {f"{a}_{b}": _spearman(ok, a, b) for a, b in PAIRS},
        "spearman_by_algorithm": {
            alg: {f"{a}_{b}": _spearman([r for r in ok if r.algorithm == alg], a, b) for a, b in PAIRS}
            for alg in algorithms
        },
        "flags": _flags(report, by_alg),
        "config": report.config,
    }


def load_schema() -> dict:
    return json.loads(resources.files("causal_eval.bench").joinpath("report.schema.json").read_text())


def emit_report(report: MetricReport, output_dir) -> dict:
    """Write every report file; returns the summary document.

    ``rows.csv``, ``effects.csv``, ``summary.json`` and the scatter files are
    a pure function of the report rows. Timings go to ``timings.csv``.
    """
    out = Path(output_dir)
    summary = summarize(report)
    jsonschema.validate(summary, load_schema())
    files = {
        "rows.csv": _csv(ROW_FIELDS, [[getattr(r, f) for f in ROW_FIELDS] for r in report.rows]),
        "effects.csv": _csv(
            ("experiment", "dataset_id", "trial", "algorithm", "treatment", "value", "outcome", "tvd"),
            [[r.experiment, r.dataset_id, r.trial, r.algorithm, *e] for r in report.rows for e in r.effects],
        ),
        "timings.csv": _csv(
            ("dataset_id", "trial", "algorithm", "wall_time"),
            [[r.dataset_id, r.trial, r.algorithm, r.wall_time] for r in report.rows],
        ),
        "summary.json": json.dumps(summary, indent=2, sort_keys=True) + "\n",
    }
    for a, b in PAIRS:
        files[f"scatter_{a}_{b}.csv"] = _csv(
            ("algorithm", "dataset_id", "trial", a, b),
            [[r.algorithm, r.dataset_id, r.trial, getattr(r, a), getattr(r, b)]
             for r in report.rows if r.status == "ok"],
        )
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (out / name).write_text(text, newline="")
    except OSError as exc:
        raise OSError(f"cannot write report to {out}: {exc}") from exc
    return summary
