"""Comparative sweeps and the decision/learning-time benchmark.

A sweep runs every variation (a dict of config overrides) over a shared
seed list and tabulates long-term averages, computed over the final 20%
of slots to exclude the online-learning transient.  Distinct (variation,
seed) runs are independent and can execute in parallel workers.

The timing benchmark runs the kernel and dnn agents under identical
environment seeds and reports per-slot decision + learning time over a
post-warmup window (the environment step and file I/O are never counted).
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from agmec.config import SimConfig, build_config
from agmec.runner import Simulation, run_experiment


def apply_overrides(config: SimConfig, overrides: dict[str, object]) -> SimConfig:
    """New config with override values applied (re-validated via the key parser)."""
    base_entries = {}
    text = config.to_text()
    for line in text.splitlines():
        key, value = (part.strip() for part in line.split("=", 1))
        base_entries[key] = value
    base_entries.update({k: str(v) for k, v in overrides.items()})
    return build_config(base_entries)


def _one_run(args) -> dict:
    config, seed = args
    return run_experiment(config, seed)


def sweep(
    base_config: SimConfig,
    variations: list[dict[str, object]],
    seeds: tuple[int, ...] | None = None,
    out_dir: str | None = None,
    workers: int = 1,
) -> list[dict]:
    """Run every variation over the seed list; one summary row per variation.

    Each row carries the per-seed long-term averages and their means.
    Writes ``sweep.csv`` under ``out_dir`` when given.
    """
    if len(variations) < 2:
        raise ValueError("a sweep needs at least 2 variations")
    seeds = seeds if seeds is not None else base_config.seeds
    jobs = []
    labels = []
    for overrides in variations:
        config = apply_overrides(base_config, overrides)
        label = ",".join(f"{k}={v}" for k, v in overrides.items()) or "base"
        labels.append(label)
        for seed in seeds:
            jobs.append((config, seed))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_run, jobs))
    else:
        results = [_one_run(job) for job in jobs]

    rows = []
    per_variation = len(seeds)
    for v, label in enumerate(labels):
        chunk = results[v * per_variation : (v + 1) * per_variation]
        energies = [r["longterm_avg_energy_j"] for r in chunk]
        backlogs = [r["longterm_avg_backlog_bits"] for r in chunk]
        rows.append(
            {
                "variation": label,
                "seeds": ",".join(str(s) for s in seeds),
                "energy_per_seed": energies,
                "backlog_per_seed": backlogs,
                "mean_longterm_energy_j": float(np.mean(energies)),
                "mean_longterm_backlog_bits": float(np.mean(backlogs)),
            }
        )

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "sweep.csv"), "w", encoding="utf-8") as fh:
            fh.write("variation,seed,longterm_avg_energy_j,longterm_avg_backlog_bits\n")
            for v, label in enumerate(labels):
                chunk = results[v * per_variation : (v + 1) * per_variation]
                for seed, r in zip(seeds, chunk):
                    fh.write(
                        f"{label},{seed},{r['longterm_avg_energy_j']!r},"
                        f"{r['longterm_avg_backlog_bits']!r}\n"
                    )
            for row in rows:
                fh.write(
                    f"{row['variation']},mean,{row['mean_longterm_energy_j']!r},"
                    f"{row['mean_longterm_backlog_bits']!r}\n"
                )
    return rows


def timing_benchmark(
    config: SimConfig,
    seed: int = 0,
    warmup_slots: int = 500,
    measure_slots: int = 2000,
) -> dict:
    """Per-slot mean decision+learning time for the kernel and dnn agents.

    Both runs use the same master seed, hence identical environment random
    sequences.  Returns means and standard deviations over the measured
    window plus the dnn/kernel ratio of the means.
    """
    out: dict = {"seed": seed, "warmup_slots": warmup_slots, "measure_slots": measure_slots}
    for kind in ("kernel", "dnn"):
        sim = Simulation(replace(config, agent=kind, record_timing=True), seed)
        totals = np.empty(measure_slots)
        for _ in range(warmup_slots):
            sim.run_slot()
        for i in range(measure_slots):
            record = sim.run_slot()
            totals[i] = record.t_decide_s + record.t_learn_s
        out[kind] = {
            "mean_s": float(totals.mean()),
            "std_s": float(totals.std()),
        }
    out["dnn_over_kernel_ratio"] = out["dnn"]["mean_s"] / out["kernel"]["mean_s"]
    return out
