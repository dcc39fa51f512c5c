"""Sweep execution: one simulation per (sweep point, replication), rows in
deterministic order, plus per-point aggregate statistics.

Each run's seed derives from (base seed, point index, replication), so
any single run can be reproduced in isolation.
"""

import csv
import math
import statistics
from concurrent.futures import ProcessPoolExecutor

from .config import ExperimentSpec, build_run_config
from .simulation import run_single

ROW_COLUMNS = [
    "seed", "mac_variant", "slot_size_s", "retx_delay_s", "retx_limit",
    "reliability", "mean_latency_s", "p95_latency_s", "delivered",
    "generated", "collisions", "arq_discards", "queue_drops",
    "mean_daily_energy_mwh", "max_daily_energy_mwh",
]

SUMMARY_METRICS = ["reliability", "mean_latency_s", "p95_latency_s",
                   "mean_daily_energy_mwh"]


class RunFailure(RuntimeError):
    def __init__(self, seed, cause):
        super().__init__(f"run with seed {seed} failed: {cause}")
        self.seed = seed


def _execute(task):
    values, seed = task
    cfg = build_run_config(values)
    try:
        sim = run_single(cfg, seed)
    except Exception as exc:  # noqa: BLE001 - reported with the seed
        raise RunFailure(seed, exc) from exc
    m = sim.metrics
    return {
        "seed": seed,
        "mac_variant": cfg.mac.variant,
        "slot_size_s": cfg.mac.slot_size,
        "retx_delay_s": cfg.mac.retx_delay,
        "retx_limit": cfg.mac.retx_limit,
        "reliability": m.reliability,
        "mean_latency_s": m.mean_latency,
        "p95_latency_s": m.p95_latency,
        "delivered": m.delivered_events,
        "generated": m.generated_events,
        "collisions": m.collisions,
        "arq_discards": m.arq_discards,
        "queue_drops": m.queue_drops,
        "mean_daily_energy_mwh": m.mean_daily_energy,
        "max_daily_energy_mwh": m.max_daily_energy,
    }


def run_experiment(spec: ExperimentSpec, jobs=1, progress=None):
    """Returns (rows, summary_rows); row order is (point, replication)."""
    points = spec.points()
    # Validate every point up front so config errors surface before runs.
    tasks = []
    for pi, overrides in enumerate(points):
        values = dict(spec.values)
        values.update(overrides)
        build_run_config(values)
        for ri in range(spec.replications):
            tasks.append((values, spec.run_seed(pi, ri)))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_execute, tasks, chunksize=1))
    else:
        rows = []
        for i, task in enumerate(tasks):
            rows.append(_execute(task))
            if progress:
                progress(i + 1, len(tasks))

    summary = []
    for pi, overrides in enumerate(points):
        chunk = rows[pi * spec.replications:(pi + 1) * spec.replications]
        entry = {"point": pi, "n": len(chunk)}
        for key, _ in spec.axes:
            entry[key] = overrides[key]
        for metric in SUMMARY_METRICS:
            vals = [r[metric] for r in chunk if r[metric] is not None]
            entry[f"{metric}_mean"] = statistics.fmean(vals) if vals else None
            entry[f"{metric}_std"] = (statistics.stdev(vals)
                                      if len(vals) > 1 else 0.0 if vals else None)
        summary.append(entry)
    return rows, summary


def _format(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))  # plain repr even for numpy scalars
    return str(value)


def write_rows_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ROW_COLUMNS)
        for row in rows:
            writer.writerow([_format(row[c]) for c in ROW_COLUMNS])


def write_summary_csv(summary, axes, path):
    columns = ["point", "n"] + [k for k, _ in axes]
    for metric in SUMMARY_METRICS:
        columns += [f"{metric}_mean", f"{metric}_std"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for entry in summary:
            writer.writerow([_format(entry[c]) for c in columns])


def pooled_standard_error(sample_a, sample_b):
    """Standard error of the difference of two replication means."""
    va = statistics.variance(sample_a) if len(sample_a) > 1 else 0.0
    vb = statistics.variance(sample_b) if len(sample_b) > 1 else 0.0
    return math.sqrt(va / len(sample_a) + vb / len(sample_b))
