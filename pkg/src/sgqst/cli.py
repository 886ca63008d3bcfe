"""Command-line entry point: ``sgqst {simulate,reconstruct,evaluate,residuals,benchmark}``."""
import argparse
import json
import logging
import os
import sys

from . import bench
from .estimators import CoverageError, OptimizerConfig, reconstruct
from .measurement import MeasurementError, NoiseModel, generate_dataset
from .metrics import mle_agreement, observable_error, residuals, residuals_csv, target_fidelity, top_k_residuals
from .operators import by_tag, load_custom
from .pauli import PauliError
from .serialize import (dumps, load_dataset, load_result, result_to_dict, save_dataset, save_result,
                        write_atomic)
from .states import StateError, ghz

log = logging.getLogger("sgqst")

STATES = {"ghz": ghz}


class UsageError(Exception):
    pass


def _operator_set(name, n):
    """A tag (g1..g4, full) or a path to a JSON label list."""
    if name.upper() in ("G1", "G2", "G3", "G4", "FULL"):
        return by_tag(name, n)
    if os.path.exists(name):
        return load_custom(name, n)
    raise UsageError(f"--set/--ops {name!r} is neither a known set (g1-g4, full) nor a file")


def _emit(text, out):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _config_file(args):
    if not args.config:
        return {}
    with open(args.config) as fh:
        return json.load(fh)


def cmd_simulate(args):
    if args.n is None:
        raise UsageError("simulate requires --n")
    opts = _config_file(args)
    ops = _operator_set(args.set or opts.get("set", "full"), args.n)
    noise = NoiseModel(depolarizing_p=args.depolarizing, dephasing_p=args.dephasing,
                       readout_eps=args.readout)
    state = STATES[args.state](args.n)
    ds = generate_dataset(state, ops, args.shots, noise, seed=args.seed or 0, state_tag=args.state)
    if args.out:
        save_dataset(ds, args.out)
    else:
        sys.stdout.write(dumps(ds.to_dict()))
    log.info("wrote %d records (n=%d, %d shots)", len(ds.records), ds.n, args.shots)


def _metrics(state, n, target, mle_ref, probe):
    out = {}
    if target and target != "none":
        out["fidelity_target"] = target_fidelity(state, STATES[target](n))
    if mle_ref:
        ref = load_result(mle_ref)
        if ref.n != n:
            raise UsageError(f"MLE reference has n={ref.n}, result has n={n}")
        ops = _operator_set(probe, n) if probe else None
        out["agreement_mle"] = mle_agreement(state, ref.state)
        out["observable_error"] = observable_error(ref.state, state, ops)
    return out


def _opt_config(args):
    opts = _config_file(args).get("optimizer", {})
    for key in ("restarts", "max_iters", "lambda_bound"):
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    if args.seed is not None:
        opts["seed"] = args.seed
    return OptimizerConfig(**opts)


def cmd_reconstruct(args):
    ds = load_dataset(args.data)
    tag = args.estimator.upper()
    ops = _operator_set(args.ops, ds.n) if args.ops else None
    if tag == "CUSTOM" and ops is None:
        raise UsageError("--estimator CUSTOM needs --ops FILE")
    res = reconstruct(tag, ds, _opt_config(args), ops=ops)
    metrics = _metrics(res.state, ds.n, args.target, args.mle_ref, args.probe)
    if args.out:
        save_result(res, args.out, metrics)
    else:
        sys.stdout.write(dumps(result_to_dict(res, metrics)))
    for k, v in metrics.items():
        log.info("%s %s = %.6f", res.estimator, k, v)


def cmd_evaluate(args):
    res = load_result(args.result)
    metrics = _metrics(res.state, res.n, args.target, args.mle_ref, args.probe)
    metrics["final_loss"] = res.final_loss
    _emit(dumps({"estimator": res.estimator, "n": res.n, **metrics}), args.out)


def cmd_residuals(args):
    ref = load_result(args.mle)
    model = load_result(args.model)
    if ref.n != model.n:
        raise UsageError(f"mismatched qubit counts: reference n={ref.n}, model n={model.n}")
    ops = _operator_set(args.probe, ref.n) if args.probe else None
    top = top_k_residuals(residuals(ref.state, model.state, ops), args.k)
    _emit(residuals_csv(top), args.out)


def cmd_benchmark(args):
    cfg = _config_file(args)
    overrides = {
        "qubit_counts": args.qubits, "shot_counts": args.shots, "estimators": args.estimators,
        "restarts": args.restarts, "max_iters": args.max_iters, "master_seed": args.seed,
        "output_dir": args.out,
    }
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    if args.timing:
        cfg["timing"] = True
    if args.depolarizing is not None or args.dephasing or args.readout:
        cfg["noise"] = {"depolarizing_p": args.depolarizing or 0.0, "dephasing_p": args.dephasing,
                        "readout_eps": args.readout}
    config = bench.BenchConfig.from_dict(cfg)
    rows = bench.run_benchmark(config)
    bad = [r for r in rows if r.status.startswith("error")]
    log.info("%d rows written to %s (%d errors)", len(rows), config.output_dir, len(bad))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (master seed for benchmark)")
    common.add_argument("--out", default=None, help="output file (directory for benchmark)")
    common.add_argument("--config", default=None, help="JSON file with defaults")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="sgqst", description="Structured Gibbs state tomography toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="sample a Pauli measurement dataset")
    s.add_argument("--n", type=int, default=None, help="number of qubits")
    s.add_argument("--set", default=None, help="g1|g2|g3|g4|full or a JSON label file (default full)")
    s.add_argument("--shots", type=int, default=2048)
    s.add_argument("--state", choices=sorted(STATES), default="ghz")
    s.add_argument("--depolarizing", type=float, default=0.0)
    s.add_argument("--dephasing", type=float, default=0.0)
    s.add_argument("--readout", type=float, default=0.0)
    s.set_defaults(func=cmd_simulate)

    def metric_flags(q):
        q.add_argument("--target", default="ghz", help="target state for fidelity ('none' to skip)")
        q.add_argument("--mle-ref", default=None, help="MLE result JSON for agreement/error metrics")
        q.add_argument("--probe", default=None, help="probe set for the observable error (default full)")

    r = sub.add_parser("reconstruct", parents=[common], help="fit one estimator to a dataset")
    r.add_argument("--data", required=True)
    r.add_argument("--estimator", required=True, type=str.upper,
                   choices=["MLE", "PSD", "G1", "G2", "G3", "G4", "CUSTOM"])
    r.add_argument("--ops", default=None, help="JSON label list for CUSTOM")
    r.add_argument("--restarts", type=int, default=None)
    r.add_argument("--max-iters", type=int, default=None)
    r.add_argument("--lambda-bound", type=float, default=None)
    metric_flags(r)
    r.set_defaults(func=cmd_reconstruct)

    e = sub.add_parser("evaluate", parents=[common], help="metrics of a saved result")
    e.add_argument("--result", required=True)
    metric_flags(e)
    e.set_defaults(func=cmd_evaluate)

    d = sub.add_parser("residuals", parents=[common], help="top-k Pauli residuals, MLE minus model")
    d.add_argument("--mle", required=True, help="reference (MLE) result JSON")
    d.add_argument("--model", required=True, help="model result JSON")
    d.add_argument("-k", type=int, default=5)
    d.add_argument("--probe", default=None)
    d.set_defaults(func=cmd_residuals)

    b = sub.add_parser("benchmark", parents=[common], help="run the (n, shots, estimator) grid")
    b.add_argument("--qubits", type=int, nargs="+", default=None)
    b.add_argument("--shots", type=int, nargs="+", default=None)
    b.add_argument("--estimators", nargs="+", default=None)
    b.add_argument("--restarts", type=int, default=None)
    b.add_argument("--max-iters", type=int, default=None)
    b.add_argument("--depolarizing", type=float, default=None,
                   help="fixed depolarizing strength (default: calibrated per n)")
    b.add_argument("--dephasing", type=float, default=0.0)
    b.add_argument("--readout", type=float, default=0.0)
    b.add_argument("--timing", action="store_true", help="record wall_ms (makes output non-reproducible)")
    b.set_defaults(func=cmd_benchmark)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.print_usage(sys.stderr)
        print(f"sgqst {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (CoverageError, PauliError, MeasurementError, StateError, FileNotFoundError, ValueError) as exc:
        print(f"sgqst {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
