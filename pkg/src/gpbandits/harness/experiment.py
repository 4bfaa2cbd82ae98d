"""Config-driven experiment runs with reproducible CSV and JSON outputs."""

from __future__ import annotations

import json
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..algorithms import algo_from_dict, algo_to_dict, run
from ..envs import CSV_COLUMNS, RunRecord, env_from_dict
from ..errors import ConfigError


@dataclass
class ExperimentConfig:
    env: dict
    algorithms: list
    labels: list
    T: int
    seeds: list
    out: str | None = None
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, cfg):
        bad = [k for k in ("env", "algorithms", "T") if k not in cfg]
        T = cfg.get("T", 1)
        if not isinstance(T, int) or T < 1:
            bad.append("T")
        env = cfg.get("env", {})
        if not isinstance(env, dict):
            bad.append("env")
            env = {}
        bad += [f"env.{k}" for k in ("kernel", "domain", "function", "noise") if k not in env]
        seeds = cfg.get("seeds", [env.get("seed", 0)])
        if not isinstance(seeds, list) or not seeds or not all(
                isinstance(s, int) and s >= 0 for s in seeds):
            bad.append("seeds")
        algos = cfg.get("algorithms", [{}])
        if not isinstance(algos, list) or not algos:
            bad.append("algorithms")
        else:
            bad += [f"algorithms[{i}].algorithm" for i, a in enumerate(algos)
                    if "algorithm" not in a and "algorithms" in cfg]
        if bad:
            raise ConfigError(bad)
        # build everything once so bad configs fail before any file is written
        env_from_dict(cfg["env"])
        parsed = [algo_from_dict(a) for a in algos]
        labels = _unique_labels([a.get("label", a["algorithm"]) for a in algos])
        return cls(cfg["env"], parsed, labels, T, list(seeds), cfg.get("out"), cfg)


def _unique_labels(names):
    seen, out = {}, []
    for n in names:
        k = seen.get(n, 0)
        seen[n] = k + 1
        out.append(n if k == 0 else f"{n}_{k}")
    return out


def parse_seeds(text: str):
    """``"a..b"`` (inclusive) or a comma list."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            a, b = int(a), int(b)
            if b < a:
                raise ValueError
            return list(range(a, b + 1))
        return [int(s) for s in text.split(",")]
    except ValueError:
        raise ConfigError(["--seeds"], f"cannot parse seeds {text!r}") from None


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(record: RunRecord, path) -> None:
    lines = [",".join(CSV_COLUMNS)]
    lines += [",".join(fmt(v) for v in row) for row in record.rows()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path):
    """Columns of a run CSV as a dict of arrays."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {name: data[:, i] for i, name in enumerate(header)}


def _jsonable(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _one_run(args):
    env_cfg, algo, label, T, seed, out = args
    env = env_from_dict(env_cfg, seed=seed)
    rec = run(env, T, algo)
    stem = os.path.join(out, f"{label}_seed{seed}")
    write_csv(rec, stem + ".csv")
    summary = rec.summary()
    sidecar = {
        "algorithm": algo_to_dict(algo),
        "label": label,
        "T": T,
        "seed": seed,
        "env": env.to_dict(),
        "summary": summary,
        "meta": rec.meta,
    }
    dump_json(sidecar, stem + ".json")
    return {"label": label, "seed": seed, **summary}


def run_experiment(cfg: ExperimentConfig | dict, out: str | None = None, seeds=None,
                   jobs: int = 1) -> dict:
    """Run every (seed, algorithm) pair, write per-run files and ``summary.json``.

    Returns the aggregate summary.
    """
    if isinstance(cfg, dict):
        cfg = ExperimentConfig.from_dict(cfg)
    out = out or cfg.out
    if out is None:
        raise ConfigError(["out"], "no output directory given")
    seeds = list(cfg.seeds if seeds is None else seeds)
    os.makedirs(out, exist_ok=True)
    tasks = [(cfg.env, algo, label, cfg.T, s, out)
             for s in seeds for algo, label in zip(cfg.algorithms, cfg.labels)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(_one_run, tasks))
    else:
        runs = [_one_run(t) for t in tasks]
    summary = {"T": cfg.T, "seeds": seeds, "runs": runs, "by_algorithm": aggregate(runs)}
    dump_json(summary, os.path.join(out, "summary.json"))
    return summary


def aggregate(runs):
    out = {}
    for label in dict.fromkeys(r["label"] for r in runs):
        rows = [r for r in runs if r["label"] == label]
        R = [r["R_T"] for r in rows]
        rs = [r["r_T"] for r in rows]
        out[label] = {"n": len(rows), "median_R_T": statistics.median(R),
                      "mean_R_T": statistics.fmean(R), "median_r_T": statistics.median(rs),
                      "mean_r_T": statistics.fmean(rs)}
    return out
