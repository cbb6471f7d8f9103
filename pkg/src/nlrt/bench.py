"""Relative-error benchmark over methods, noise levels and random restarts.

Noise draws use seeds ``seed + 1 + i`` and baseline initialisations use
seeds ``seed + 1000 + j``; the ground truth uses ``seed`` itself. NLRT is
deterministic for a fixed input, so its row aggregates over noise draws
only, while baseline rows aggregate over every (noise draw, restart) pair.
"""

import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import baselines as bl
from .datagen import add_noise_snr, case1_ground_truth, case2_random
from .fileio import read_tensor
from .metrics import rel_error
from .solver import SolverConfig, nlrt_approximate

log = logging.getLogger(__name__)

BENCH_COLUMNS = [
    "method",
    "snr_db",
    "trial_count",
    "rel_err_mean",
    "rel_err_std",
    "seconds_mean",
    "iterations_mean",
]
IMPLEMENTED = ["NLRT", "NTD-MU", "NTD-HALS", "NCPD-MU", "NCPD-HALS"]
NOT_IMPLEMENTED = ["NTD-BCD", "NTD-APG", "NCPD-BCD", "NCPD-APG", "NCPD-CDTF", "NCPD-SaCD"]


@dataclass
class ExperimentSpec:
    case: str = "case1"
    shape: tuple = (40, 40, 40)
    ranks: tuple = (3, 3, 3)
    cp_ranks: list = None
    snr_db: list = field(default_factory=lambda: [30.0, 40.0, 50.0])
    trials: int = 10
    noise_trials: int = 1
    seed: int = 0
    methods: list = field(default_factory=lambda: list(IMPLEMENTED))
    tol: float = 1e-5
    max_iters: int = 5000
    input_path: str = None
    out: str = None

    def __post_init__(self):
        self.shape = tuple(int(n) for n in self.shape)
        self.ranks = tuple(int(r) for r in self.ranks)
        self.snr_db = [float(s) for s in self.snr_db]
        if self.case not in ("case1", "case2", "file"):
            raise ValueError(f"unknown case {self.case!r}")
        if self.trials < 1 or self.noise_trials < 1:
            raise ValueError("trials and noise_trials must be >= 1")
        unknown = [m for m in self.methods if m not in IMPLEMENTED + NOT_IMPLEMENTED]
        if unknown:
            raise ValueError(f"unknown method(s): {', '.join(unknown)}")
        if self.case == "file" and not self.input_path:
            raise ValueError("case 'file' needs input_path")
        if self.cp_ranks is None:
            self.cp_ranks = bl.cp_rank_candidates(self.ranks) if self.case == "case1" else [max(self.ranks)]

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls(**json.load(fh))

    def to_dict(self):
        return asdict(self)


def _truth(spec):
    if spec.case == "case1":
        return case1_ground_truth(spec.shape, spec.ranks, spec.seed)
    if spec.case == "case2":
        return case2_random(spec.shape, spec.seed)
    return read_tensor(spec.input_path)


def _noisy(truth, snr, i, spec):
    if math.isinf(snr):
        return truth
    return add_noise_snr(truth, snr, spec.seed + 1 + i)


def _run(method, a, spec, init_seed, cp_rank=None):
    """Fit one method; returns ``(estimate, iterations)``."""
    if method == "NLRT":
        res = nlrt_approximate(a, SolverConfig(ranks=spec.ranks, tol=spec.tol, max_iters=spec.max_iters))
        return res.approximation, res.iterations
    cfg = bl.FitConfig(tol=spec.tol, max_iters=spec.max_iters, seed=init_seed)
    if method == "NTD-MU":
        f, tr = bl.ntd_mu(a, spec.ranks, cfg)
    elif method == "NTD-HALS":
        f, tr = bl.ntd_hals(a, spec.ranks, cfg)
    elif method == "NCPD-MU":
        f, tr = bl.ncpd_mu(a, cp_rank, cfg)
    elif method == "NCPD-HALS":
        f, tr = bl.ncpd_hals(a, cp_rank, cfg)
    else:
        raise ValueError(f"unknown method {method!r}")
    est = bl.reconstruct_tucker(f) if method.startswith("NTD") else bl.reconstruct_cp(f)
    return est, tr.iterations


def _row(method, snr, errs, secs, iters):
    return {
        "method": method,
        "snr_db": snr,
        "trial_count": len(errs),
        "rel_err_mean": float(np.mean(errs)),
        "rel_err_std": float(np.std(errs)),
        "seconds_mean": float(np.mean(secs)),
        "iterations_mean": float(np.mean(iters)),
    }


def run_bench(spec):
    """Run every requested method at every SNR; returns one dict per CSV row."""
    truth = _truth(spec)
    rows = []
    for m in spec.methods:
        if m in NOT_IMPLEMENTED:
            print(f"{m}: not implemented")
    for snr in spec.snr_db:
        inputs = [_noisy(truth, snr, i, spec) for i in range(spec.noise_trials)]
        for method in spec.methods:
            if method in NOT_IMPLEMENTED:
                continue
            restarts = [None] if method == "NLRT" else [spec.seed + 1000 + j for j in range(spec.trials)]
            cp_choices = spec.cp_ranks if method.startswith("NCPD") else [None]
            best = None
            for cp in cp_choices:
                errs, secs, iters = [], [], []
                for a in inputs:
                    for seed in restarts:
                        t0 = time.perf_counter()
                        est, it = _run(method, a, spec, seed, cp)
                        secs.append(time.perf_counter() - t0)
                        errs.append(rel_error(est, truth))
                        iters.append(it)
                row = _row(method, snr, errs, secs, iters)
                if cp is not None:
                    log.info("%s cp_rank=%d snr=%s mean rel err %.6g", method, cp, snr, row["rel_err_mean"])
                if best is None or row["rel_err_mean"] < best["rel_err_mean"]:
                    best = row
            rows.append(best)
    return rows


def rows_as_lists(rows):
    return [[r[c] for c in BENCH_COLUMNS] for r in rows]
