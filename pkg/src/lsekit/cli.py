"""Command line interface: ``lsekit generate | fit | eval``.

Exit codes: 0 success, 1 runtime or data error, 2 usage or configuration
error.
"""

import argparse
import json
import logging
import math
from pathlib import Path
import sys

import numpy as np

from . import formats
from .batch import StreamingCost, solve_batch
from .errors import ConfigError, EmptyInputError, LSEError
from .recursive import ForgettingConfig, iter_run
from .simulate import KINDS, ScenarioSpec, generate

log = logging.getLogger("lsekit")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _floats(text, what, count=None):
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if not values or (count is not None and len(values) != count):
        raise UsageError(f"{what}: expected {count or 'at least one'} value(s), got {text!r}")
    if not all(math.isfinite(v) for v in values):
        raise UsageError(f"{what}: values must be finite")
    return values


def _dump(obj):
    return json.dumps(obj, sort_keys=True, allow_nan=False)


def _default_truth_path(out):
    out = Path(out)
    return out.with_name(out.stem + ".truth.csv")


def build_parser():
    parser = argparse.ArgumentParser(prog="lsekit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic samples CSV and its ground truth")
    g.add_argument("--scenario", required=True, choices=KINDS)
    g.add_argument("--out", required=True, help="samples CSV path")
    g.add_argument("--truth", help="ground-truth CSV path (default: <out stem>.truth.csv)")
    g.add_argument("--n", type=int, default=100, help="number of samples")
    g.add_argument("--noise", type=float, default=0.0, help="output noise standard deviation")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--k", type=float, help="spring constant (spring scenario)")
    g.add_argument("--cl0", type=float, help="lift coefficient at zero angle of attack")
    g.add_argument("--cla", type=float, help="lift-curve slope per radian")
    g.add_argument("--theta", help="comma-separated true parameters (generic-linear, drifting)")
    g.add_argument("--range", dest="input_range", help="regressor excitation interval as lo,hi")
    g.add_argument("--rho", type=float, default=1.225)
    g.add_argument("--velocity", type=float, default=20.0)
    g.add_argument("--area", type=float, default=0.5)
    g.add_argument("--drift", choices=("sinusoid", "piecewise"), default="sinusoid")
    g.add_argument("--amplitude", type=float, default=0.5)
    g.add_argument("--period", type=float, default=200.0)
    g.add_argument("--levels", help="piecewise levels, vectors separated by ';' (e.g. '1;2' or '1,0;2,1')")
    g.add_argument("--segment", type=int, default=100, help="steps per piecewise level")
    g.set_defaults(func=cmd_generate, subparser=g)

    f = sub.add_parser("fit", help="fit a samples CSV and print a JSON report")
    f.add_argument("input", help="samples CSV")
    f.add_argument("--mode", choices=("batch", "recursive"), default="batch")
    f.add_argument("--lambda", dest="lam", type=float, default=1.0, help="forgetting factor in (0, 1]")
    f.add_argument("--f0-scale", type=float, default=1e6, help="initial gain F(0) = scale * I")
    f.add_argument("--theta0", help="comma-separated initial estimate (default zeros)")
    f.add_argument("--rcond", type=float, help="pseudo-inverse cutoff (batch mode)")
    f.add_argument("--trace", help="per-step trace CSV (recursive mode)")
    f.set_defaults(func=cmd_fit, subparser=f)

    e = sub.add_parser("eval", help="windowed RMSE of a trace against ground truth")
    e.add_argument("--trace", required=True)
    e.add_argument("--truth", required=True)
    e.add_argument("--window", type=int, default=100)
    e.set_defaults(func=cmd_eval, subparser=e)
    return parser


def cmd_generate(args):
    theta = None
    if args.scenario == "spring" and args.k is not None:
        theta = (args.k,)
    elif args.scenario == "lift" and (args.cl0 is not None or args.cla is not None):
        if args.cl0 is None or args.cla is None:
            raise UsageError("--cl0 and --cla must be given together")
        theta = (args.cl0, args.cla)
    if args.theta is not None:
        theta = tuple(_floats(args.theta, "--theta"))
    levels = ()
    if args.levels:
        levels = tuple(tuple(_floats(part, "--levels")) for part in args.levels.split(";"))
    spec = ScenarioSpec(
        kind=args.scenario,
        true_theta=theta,
        num_samples=args.n,
        noise_std=args.noise,
        seed=args.seed,
        input_range=_floats(args.input_range, "--range", 2) if args.input_range else None,
        rho=args.rho,
        velocity=args.velocity,
        area=args.area,
        drift=args.drift,
        drift_amplitude=args.amplitude,
        drift_period=args.period,
        drift_levels=levels,
        drift_segment=args.segment,
    )
    stream = generate(spec)
    truth = args.truth or _default_truth_path(args.out)
    formats.write_samples(args.out, stream.dataset)
    formats.write_truth(truth, stream.true_theta_per_step)
    log.info("wrote %d samples to %s and ground truth to %s", spec.num_samples, args.out, truth)
    return EXIT_OK


def _fit_batch(args):
    ds = formats.read_samples(args.input)
    if len(ds) == 0:
        raise EmptyInputError(f"{args.input} has no samples")
    sol = solve_batch(ds, args.rcond)
    return {
        "mode": "batch",
        "theta_hat": sol.theta_hat.tolist(),
        "residual_cost": sol.residual_cost,
        "num_samples": len(ds),
        "lambda": 1.0,
        "f0_scale": None,
        "rank": sol.rank,
        "used_pseudo_inverse": sol.used_pseudo_inverse,
    }


def _fit_recursive(args):
    theta0 = _floats(args.theta0, "--theta0") if args.theta0 else None
    cfg = ForgettingConfig(lam=args.lam, f0_scale=args.f0_scale, theta0=theta0)
    acc = None

    def tap(samples):
        nonlocal acc
        for s in samples:
            if acc is None:
                acc = StreamingCost(s.dim, cfg.lam)
            acc.add(s)
            yield s

    writer = None
    state = None
    try:
        for state, rec in iter_run(tap(formats.iter_samples(args.input)), cfg):
            if args.trace:
                if writer is None:
                    writer = formats.TraceWriter(args.trace, state.dim)
                writer.write(rec)
    finally:
        if writer is not None:
            writer.close()
    if state is None:
        raise EmptyInputError(f"{args.input} has no samples")
    return {
        "mode": "recursive",
        "theta_hat": state.theta_hat.tolist(),
        "residual_cost": acc(state.theta_hat),
        "num_samples": state.step,
        "lambda": cfg.lam,
        "f0_scale": cfg.f0_scale,
        "final_gain_trace": float(np.trace(state.gain)),
    }


def cmd_fit(args):
    if args.mode == "batch":
        if args.trace:
            raise UsageError("--trace is only available in recursive mode")
        report = _fit_batch(args)
    else:
        report = _fit_recursive(args)
    print(_dump(report))
    return EXIT_OK


def window_rmse(estimates, truth, window):
    """RMSE over consecutive windows aligned to the end of the run.

    The last window always spans exactly `window` steps (or the whole run if
    it is shorter); the first may be partial. Returns a list of
    ``(start, end, rmse)`` with 1-based inclusive step bounds.
    """
    sq = np.mean((np.asarray(estimates) - np.asarray(truth)) ** 2, axis=1)
    k = sq.size
    out = []
    end = k
    while end > 0:
        start = max(end - window, 0)
        out.append((start + 1, end, float(np.sqrt(np.mean(sq[start:end])))))
        end = start
    return out[::-1]


def cmd_eval(args):
    if args.window < 1:
        raise UsageError("--window must be a positive integer")
    trace = formats.read_trace(args.trace)
    # a trace file is accepted as ground truth too
    try:
        steps, truth = formats.read_truth(args.truth)
    except LSEError:
        other = formats.read_trace(args.truth)
        steps, truth = other["step"], other["theta"]
    est = trace["theta"]
    if est.shape != truth.shape or not np.array_equal(trace["step"], steps):
        raise LSEError(
            f"trace ({est.shape[0]} steps x {est.shape[1]}) and truth "
            f"({truth.shape[0]} steps x {truth.shape[1]}) do not align"
        )
    if est.shape[0] == 0:
        raise EmptyInputError("trace is empty")
    windows = window_rmse(est, truth, args.window)
    sq = (est - truth) ** 2
    report = {
        "num_steps": int(est.shape[0]),
        "window": args.window,
        "windows": [{"start": s, "end": e, "rmse": r} for s, e, r in windows],
        "final_window_rmse": windows[-1][2],
        "overall_rmse": float(np.sqrt(np.mean(sq))),
    }
    print(_dump(report))
    return EXIT_OK


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        args.subparser.print_usage(sys.stderr)
        print(f"lsekit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LSEError as exc:
        print(f"lsekit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"lsekit {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
