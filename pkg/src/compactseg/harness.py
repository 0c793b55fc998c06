"""Experiment harness: run solvers over lambda grids and image corpora."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
import math

import numpy as np

from .admm import AdmmConfig, run_admm
from .fields import EmptyRegion
from .metrics import compactness, dice, iou
from .pd import SolverConfig, run_pdstd, run_pdtd

ALGOS = ("pd-td", "pd-std", "admm")
COLUMNS = ("algo", "lambda", "dice", "iou", "compactness", "energy", "iters", "seconds")

_RUNNERS = {"pd-td": run_pdtd, "pd-std": run_pdstd, "admm": run_admm}


def make_config(algo, **params):
    """Config object for ``algo``, silently ignoring keys it does not use."""
    if algo not in _RUNNERS:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {ALGOS}")
    cls = AdmmConfig if algo == "admm" else SolverConfig
    names = {f.name for f in fields(cls)}
    return cls(**{k: v for k, v in params.items() if k in names and v is not None})


def run_algo(algo, f, **params):
    return _RUNNERS[algo](f, make_config(algo, **params))


def evaluate(report, gt=None, lam=math.nan):
    """One metrics row (a dict keyed by :data:`COLUMNS`) for a solve."""
    row = {
        "algo": report.algo,
        "lambda": lam,
        "dice": math.nan,
        "iou": math.nan,
        "compactness": math.nan,
        "energy": report.energy,
        "iters": report.iters_used,
        "seconds": report.wall_time,
    }
    if gt is not None:
        row["dice"] = dice(report.mask, gt)
        row["iou"] = iou(report.mask, gt)
    try:
        row["compactness"] = compactness(report.mask)
    except EmptyRegion:
        pass
    return row


def _cell(args):
    algo, f, gt, params = args
    report = run_algo(algo, f, **params)
    return evaluate(report, gt, params.get("lam", math.nan)), report.mask


def _map(cells, jobs):
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_cell, cells))
    return [_cell(c) for c in cells]


def lambda_sweep(f, lambdas, algos=ALGOS, gt=None, jobs=1, **params):
    """Solve every ``(lambda, algo)`` cell; rows come back in grid order.

    Returns ``(rows, masks)`` with ``masks[(algo, lam)]``.
    """
    cells = [(algo, f, gt, dict(params, lam=lam)) for lam in lambdas for algo in algos]
    results = _map(cells, jobs)
    rows = [r for r, _ in results]
    masks = {(c[0], c[3]["lam"]): m for c, (_, m) in zip(cells, results)}
    return rows, masks


def benchmark(pairs, algos=ALGOS, jobs=1, **params):
    """Per-algorithm means of Dice, IoU, compactness and wall time over ``pairs``.

    ``pairs`` holds ``(region_force, ground_truth)``. Returns
    ``(summary, rows)``; ``summary`` maps algo to a dict of means.
    """
    if not pairs:
        raise ValueError("benchmark needs at least one (image, ground truth) pair")
    cells = [(algo, f, gt, dict(params)) for f, gt in pairs for algo in algos]
    rows = [r for r, _ in _map(cells, jobs)]
    summary = {}
    for algo in algos:
        mine = [r for r in rows if r["algo"] == algo]
        summary[algo] = {
            key: float(np.nanmean([r[key] for r in mine])) if any(np.isfinite(r[key]) for r in mine) else math.nan
            for key in ("dice", "iou", "compactness", "seconds")
        }
        summary[algo]["n"] = len(mine)
    return summary, rows
