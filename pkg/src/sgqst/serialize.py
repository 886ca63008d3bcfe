"""JSON/CSV file formats and atomic file writes."""
import json
import math
import os
import tempfile

import numpy as np

from .estimators import ReconstructionResult
from .measurement import Dataset
from .pauli import parse_label
from .states import DensityMatrix


def fmt_float(x) -> str:
    """17 significant digits, enough to round-trip any double."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def write_atomic(path, text: str):
    """Write ``text`` to a temporary sibling file, then rename it over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    # json uses repr() for floats, the shortest string that round-trips exactly
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def save_dataset(ds: Dataset, path):
    write_atomic(path, dumps(ds.to_dict()))


def load_dataset(path) -> Dataset:
    with open(path) as fh:
        return Dataset.from_dict(json.load(fh))


def state_to_pairs(state) -> list:
    m = np.asarray(getattr(state, "matrix", state))
    return [[float(z.real), float(z.imag)] for z in m.ravel()]


def state_from_pairs(pairs, dim) -> DensityMatrix:
    arr = np.asarray(pairs, dtype=float)
    return DensityMatrix((arr[:, 0] + 1j * arr[:, 1]).reshape(dim, dim))


def _plain(v):
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def result_to_dict(res: ReconstructionResult, metrics=None) -> dict:
    return {
        "estimator": res.estimator,
        "n": res.n,
        "dim": res.state.dim,
        "operators": [p.label for p in res.operators],
        "params": _plain(res.params),
        "final_loss": float(res.final_loss),
        "iterations": int(res.iterations),
        "restarts_used": int(res.restarts_used),
        "wall_time": float(res.wall_time),
        "converged": bool(res.converged),
        "diagnostics": _plain(res.diagnostics),
        "state": state_to_pairs(res.state),
        "metrics": _plain(metrics or {}),
    }


def result_from_dict(d) -> ReconstructionResult:
    n = int(d["n"])
    return ReconstructionResult(
        estimator=d["estimator"],
        state=state_from_pairs(d["state"], int(d["dim"])),
        params=np.asarray(d["params"], dtype=float),
        operators=tuple(parse_label(s, n) for s in d["operators"]),
        final_loss=float(d["final_loss"]),
        iterations=int(d.get("iterations", 0)),
        restarts_used=int(d.get("restarts_used", 0)),
        wall_time=float(d.get("wall_time", 0.0)),
        converged=bool(d.get("converged", True)),
        diagnostics=d.get("diagnostics", {}),
    )


def load_result(path) -> ReconstructionResult:
    with open(path) as fh:
        return result_from_dict(json.load(fh))


def save_result(res, path, metrics=None):
    write_atomic(path, dumps(result_to_dict(res, metrics)))
