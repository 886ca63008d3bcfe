"""GHZ benchmark grid: every estimator on one shared dataset per (n, shots) cell.

Outputs in ``output_dir``:

``results.csv`` / ``results.json``
    one row per (n, shots, estimator)
``scaling.csv``
    (n, estimator, params, mean target fidelity over shot counts)
``residuals_n{n}_shots{N}_{tag}.csv``
    top-k residuals of each structured model against that cell's MLE

By default no wall-clock values are written, so every file is a pure
function of the configuration. ``timing=True`` fills the ``wall_ms`` column.
"""
from dataclasses import asdict, dataclass, field
import csv
import io
import json
import logging
import math
import os
import time

import numpy as np

from .estimators import OptimizerConfig, mle_fit, psd_estimate, fit_gibbs
from .measurement import NoiseModel, calibrated_depolarizing, generate_dataset
from .metrics import mle_agreement, observable_error, residuals, residuals_csv, target_fidelity, top_k_residuals
from .operators import by_tag, full_set, param_count
from .serialize import dumps, fmt_float, write_atomic
from .states import ghz

log = logging.getLogger(__name__)

CSV_COLUMNS = ["n", "shots", "estimator", "params", "fidelity_target", "agreement_mle",
               "observable_error", "loss", "wall_ms", "status"]
ESTIMATORS = ("MLE", "PSD", "G1", "G2", "G3", "G4")
MIN_QUBITS = {"G1": 1, "G2": 2, "G3": 2, "G4": 3, "MLE": 1, "PSD": 1}

# MLE fidelity levels the default depolarizing strength is calibrated to
DEFAULT_MLE_LEVEL = {3: 0.770, 4: 0.558, 5: 0.573}


def default_depolarizing(n: int) -> float:
    nearest = min(DEFAULT_MLE_LEVEL, key=lambda k: (abs(k - n), k))
    return calibrated_depolarizing(n, DEFAULT_MLE_LEVEL[nearest])


def derive_seed(*words) -> int:
    """64-bit seed from a tuple of non-negative integers."""
    return int(np.random.SeedSequence([int(w) for w in words]).generate_state(1, np.uint64)[0])


@dataclass
class BenchConfig:
    qubit_counts: list = field(default_factory=lambda: [3, 4, 5])
    shot_counts: list = field(default_factory=lambda: [256, 1024, 2048])
    estimators: list = field(default_factory=lambda: list(ESTIMATORS))
    noise: NoiseModel = None  # None -> calibrated depolarizing per n
    master_seed: int = 2024
    restarts: int = 10
    max_iters: int = 500
    lambda_bound: float = 30.0
    top_k: int = 5
    output_dir: str = "bench_out"
    emit: list = field(default_factory=lambda: ["csv", "json"])
    timing: bool = False

    def __post_init__(self):
        if not self.qubit_counts or not self.shot_counts or not self.estimators:
            raise ValueError("qubit_counts, shot_counts and estimators must be non-empty")
        self.estimators = [e.upper() for e in self.estimators]
        unknown = [e for e in self.estimators if e not in ESTIMATORS]
        if unknown:
            raise ValueError(f"unknown estimators {unknown}; choose from {ESTIMATORS}")
        if isinstance(self.noise, dict):
            self.noise = NoiseModel.from_dict(self.noise)

    def noise_for(self, n: int) -> NoiseModel:
        return self.noise if self.noise is not None else NoiseModel(depolarizing_p=default_depolarizing(n))

    @classmethod
    def from_dict(cls, d) -> "BenchConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown benchmark config keys: {sorted(extra)}")
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["noise"] = None if self.noise is None else self.noise.to_dict()
        return d


@dataclass
class ResultRow:
    n: int
    shots: int
    estimator: str
    params_count: int
    target_fidelity: float = math.nan
    mle_agreement: float = math.nan
    observable_error: float = math.nan
    final_loss: float = math.nan
    wall_time: float = None
    seed: int = 0
    status: str = "ok"

    def csv_fields(self) -> list:
        wall = "" if self.wall_time is None else fmt_float(1000.0 * self.wall_time)
        return [self.n, self.shots, self.estimator, self.params_count, fmt_float(self.target_fidelity),
                fmt_float(self.mle_agreement), fmt_float(self.observable_error),
                fmt_float(self.final_loss), wall, self.status]


def _estimators_for(config, n):
    # MLE first: agreement and observable error reference it
    tags = [t for t in config.estimators if n >= MIN_QUBITS[t]]
    return sorted(tags, key=lambda t: t != "MLE")


def run_cell(config: BenchConfig, n: int, shots: int):
    """All estimators on one dataset; returns (rows, residual CSV texts keyed by tag)."""
    target = ghz(n)
    seed = derive_seed(config.master_seed, n, shots)
    ds = generate_dataset(target, full_set(n), shots, config.noise_for(n), seed)
    rows, resid = [], {}
    mle_state = None
    for tag in _estimators_for(config, n):
        role = ESTIMATORS.index(tag)
        opt = OptimizerConfig(max_iters=config.max_iters, restarts=config.restarts,
                              seed=derive_seed(config.master_seed, n, shots, role),
                              lambda_bound=config.lambda_bound)
        row = ResultRow(n, shots, tag, param_count(tag, n), seed=seed)
        t0 = time.perf_counter()
        try:
            if tag == "MLE":
                res = mle_fit(ds, opt)
                mle_state = res.state
            elif tag == "PSD":
                res = psd_estimate(ds)
            else:
                res = fit_gibbs(by_tag(tag, n), ds, opt)
            row.target_fidelity = target_fidelity(res.state, target)
            row.final_loss = res.final_loss
            if not res.converged:
                row.status = "not_converged"
            if mle_state is not None:
                row.mle_agreement = mle_agreement(res.state, mle_state)
                row.observable_error = observable_error(mle_state, res.state)
                if tag in ("G1", "G2", "G3", "G4"):
                    top = top_k_residuals(residuals(mle_state, res.state), config.top_k)
                    resid[tag] = residuals_csv(top)
            elif "MLE" in config.estimators:
                row.status = "no_mle_reference"
        except Exception as exc:  # recorded per row; the grid keeps going
            log.exception("n=%d shots=%d %s failed", n, shots, tag)
            row.status = f"error: {type(exc).__name__}: {exc}".replace("\n", " ")
        elapsed = time.perf_counter() - t0
        if config.timing:
            row.wall_time = elapsed
        log.info("n=%d shots=%d %-3s F=%.4f agree=%.4f err=%.5f (%.2fs)", n, shots, tag,
                 row.target_fidelity, row.mle_agreement, row.observable_error, elapsed)
        rows.append(row)
    return rows, resid


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.csv_fields())
    return buf.getvalue()


def scaling_csv(rows) -> str:
    """Mean target fidelity per (n, estimator) against parameter count."""
    groups = {}
    for r in rows:
        groups.setdefault((r.n, r.estimator, r.params_count), []).append(r.target_fidelity)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "estimator", "params", "fidelity_target"])
    for (n, tag, params), vals in groups.items():
        w.writerow([n, tag, params, fmt_float(np.mean(vals))])
    return buf.getvalue()


def _json_row(row) -> dict:
    return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in asdict(row).items()}


def run_benchmark(config: BenchConfig, write: bool = True) -> list:
    rows = []
    outputs = {}
    for n in config.qubit_counts:
        for shots in config.shot_counts:
            cell_rows, resid = run_cell(config, n, shots)
            rows.extend(cell_rows)
            for tag, text in resid.items():
                outputs[f"residuals_n{n}_shots{shots}_{tag}.csv"] = text
    if write:
        out = config.output_dir
        if "csv" in config.emit:
            write_atomic(os.path.join(out, "results.csv"), rows_to_csv(rows))
            write_atomic(os.path.join(out, "scaling.csv"), scaling_csv(rows))
            for name, text in outputs.items():
                write_atomic(os.path.join(out, name), text)
        if "json" in config.emit:
            payload = {"config": config.to_dict(), "rows": [_json_row(r) for r in rows]}
            write_atomic(os.path.join(out, "results.json"), dumps(payload))
    return rows


def load_config(path) -> BenchConfig:
    with open(path) as fh:
        return BenchConfig.from_dict(json.load(fh))
