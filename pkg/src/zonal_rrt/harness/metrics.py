"""Per-planner summaries and the CSV ledger of record."""
from __future__ import annotations

import csv
import io

import numpy as np

__all__ = ["CSV_COLUMNS", "bootstrap_ci", "summarize", "emit_csv"]

CSV_COLUMNS = ("map_id", "planner_id", "success", "wall_time_s", "path_length", "failure_stage")
BOOTSTRAP_RESAMPLES = 2000


def bootstrap_ci(values, level: float = 0.95, resamples: int = BOOTSTRAP_RESAMPLES,
                 seed: int = 0) -> tuple:
    """Percentile bootstrap interval for the mean; deterministic in ``seed``."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        return (float("nan"), float("nan"))
    rng = np.random.default_rng(seed)
    means = x[rng.integers(0, x.size, size=(resamples, x.size))].mean(axis=1)
    tail = 50.0 * (1.0 - level)
    lo, hi = np.percentile(means, [tail, 100.0 - tail])
    return (float(lo), float(hi))


def _mean(xs) -> float | None:
    return float(np.mean(xs)) if len(xs) else None


def summarize(records) -> dict:
    """Planner id -> aggregate metrics.

    ``avg_time`` averages successful trials only, the usual convention for
    planner comparison tables; ``avg_time_all`` covers every trial.  ``success_rate``
    is a percentage.
    """
    if not records:
        raise ValueError("summarize needs at least one record")
    groups: dict = {}
    for r in records:
        groups.setdefault(r.planner_id, []).append(r)
    out = {}
    for pid, rs in groups.items():
        ok = [r for r in rs if r.success]
        times = [r.wall_time_s for r in ok]
        lengths = [r.path_length for r in ok]
        warm = [r.warm_time_s for r in ok if r.warm_time_s is not None]
        failures: dict = {}
        for r in rs:
            if not r.success:
                failures[r.failure_stage] = failures.get(r.failure_stage, 0) + 1
        out[pid] = {
            "trials": len(rs),
            "successes": len(ok),
            "success_rate": 100.0 * len(ok) / len(rs),
            "avg_time": _mean(times),
            "avg_time_ci95": list(bootstrap_ci(times)) if times else None,
            "avg_time_all": _mean([r.wall_time_s for r in rs]),
            "mean_path_length": _mean(lengths),
            "median_path_length": float(np.median(lengths)) if lengths else None,
            "avg_warm_time": _mean(warm),
            "invalid_paths": sum(r.path_valid is False for r in rs),
            "errors": sum(r.failure_stage == "error" for r in rs),
            "failures": failures,
        }
    return out


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_csv(records, path=None) -> str:
    """CSV text with one row per trial, written to ``path`` when given."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([_cell(getattr(r, c)) for c in CSV_COLUMNS])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
