"""Command line interface: ``qbound bound | simulate | reproduce | check``.

Exit codes: 0 success, 1 failed checks, 2 configuration or domain errors.
Every error is reported on one line as ``qbound: error: <Kind>: <message>``.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .bounds import (
    BoundReport,
    asymptotic_continuous_bound,
    discrete_asymptotic_exponent,
    multiparam_bound,
    qcr_bound,
    qhcrk_bound,
    qk_bound,
)
from .checks import run_checks
from .estimators import (
    ESTIMATOR_CSV_COLUMNS,
    Observable,
    discrete_optimal_observable,
    exact_bias_mse,
    simulate_concurrence_estimator,
    simulate_povm_sampling,
)
from .exceptions import InvalidInputError, QBoundError
from .models import DifferenceSpec, absolute_value, coordinate
from .reproduce import FIGURES, reproduce
from .serialization import BUILTIN_MODELS, build_builtin, load_model, write_csv

__all__ = ["build_parser", "main"]

KINDS = ("qcr", "qhcrk", "qk", "multi", "asympt_discrete", "asympt_cont")


class UsageError(QBoundError):
    """Bad command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _grid(text):
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must be START:STOP:STEP, got {text!r}") from None
    if step <= 0:
        raise UsageError("grid step must be positive")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(max(count, 0))]


def _add_model_args(p):
    p.add_argument("--model", help=f"builtin model: {', '.join(sorted(BUILTIN_MODELS))}")
    p.add_argument("--model-file", help="JSON model description")
    p.add_argument("--sigma2", type=float, help="Gaussian variance (gaussian models)")
    p.add_argument("--truncation", type=int, help="Fock truncation per mode")
    p.add_argument("--dim-cut", type=int, help="dimension of the discrete model")
    p.add_argument("--theta", action="append", default=[],
                   help="parameter point, repeatable; comma-separated for vectors")
    p.add_argument("--theta-grid", help="scalar grid START:STOP:STEP (inclusive)")


def _add_output_args(p, default_format="json"):
    p.add_argument("--format", choices=("csv", "json"), default=default_format)
    p.add_argument("--output", help="write here instead of standard output")


def build_parser():
    parser = _Parser(prog="qbound", description="Quantum estimation lower bounds.")
    parser.add_argument("--version", action="version", version=f"qbound {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bound", help="compute a lower bound")
    _add_model_args(b)
    b.add_argument("--kind", choices=KINDS, default="qcr")
    b.add_argument("--flavor", choices=("sld", "rld"), default="sld")
    b.add_argument("--delta", help="difference step; comma-separated per coordinate; 0 = limit")
    b.add_argument("--t", help="split weight in [0, 1]; comma-separated per coordinate")
    b.add_argument("--r", type=int, default=1, help="highest difference order (qk)")
    b.add_argument("--G", default="identity",
                   help="weight matrix: 'identity' or a JSON nested list (multi)")
    b.add_argument("--g", choices=("coordinate", "abs"), default="coordinate",
                   help="estimand: a coordinate of theta or its absolute value")
    b.add_argument("--coord", type=int, default=0, help="coordinate used by --g")
    _add_output_args(b)

    s = sub.add_parser("simulate", help="bias and MSE of an estimator")
    _add_model_args(s)
    s.add_argument("--mode", choices=("mc", "exact"), default="mc")
    s.add_argument("--n", type=int, default=1, help="copies per estimate")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    _add_output_args(s, "csv")

    r = sub.add_parser("reproduce", help="write the data behind a figure or table")
    r.add_argument("figure", help=f"one of {', '.join(FIGURES)}")
    r.add_argument("--sigma2", type=float, help="variance for fig1 and fig3")
    r.add_argument("--no-sld", action="store_true", help="fig1: skip the Fock-space SLD column")
    r.add_argument("--output", help="CSV path (default standard output)")

    c = sub.add_parser("check", help="run the acceptance checks")
    c.add_argument("--quick", action="store_true", help="skip Monte Carlo checks")
    c.add_argument("--extra-model", action="append", default=[],
                   help="also validate this model file (repeatable)")
    c.add_argument("--only", action="append", help="run only these check keys, e.g. C5")
    return parser


def _model(args):
    if bool(args.model) == bool(args.model_file):
        raise UsageError("give exactly one of --model or --model-file")
    if args.model_file:
        return load_model(args.model_file)
    params = {}
    if args.sigma2 is not None:
        params["sigma2"] = args.sigma2
    if args.truncation is not None:
        params["truncation"] = args.truncation
    if args.dim_cut is not None:
        params["dim_cut"] = args.dim_cut
    return build_builtin(args.model, **params)


def _thetas(args, model):
    if args.theta_grid is not None:
        if args.theta:
            raise UsageError("use either --theta or --theta-grid")
        if model.m != 1:
            raise UsageError("--theta-grid is for scalar models")
        pts = [[x] for x in _grid(args.theta_grid)]
        if not pts:
            raise UsageError(f"parameter grid {args.theta_grid!r} is empty")
        return pts
    if not args.theta:
        return [[0.0] * model.m]
    pts = [_floats(t) for t in args.theta]
    for p in pts:
        if len(p) != model.m:
            raise UsageError(f"--theta needs {model.m} value(s), got {len(p)}")
    return pts


def _emit(text, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _weight(text, m):
    if text == "identity":
        return np.eye(m)
    try:
        return np.asarray(json.loads(text), dtype=float)
    except (json.JSONDecodeError, TypeError, ValueError):
        raise UsageError(f"--G must be 'identity' or a JSON matrix, got {text!r}") from None


def _spec(args, model, default_t):
    delta = _floats(args.delta) if args.delta else [0.0]
    t = _floats(args.t) if args.t else [default_t]
    for name, v in (("delta", delta), ("t", t)):
        if len(v) not in (1, model.m):
            raise UsageError(f"--{name} needs 1 or {model.m} values")
    return DifferenceSpec(delta[0] if len(delta) == 1 else delta, t[0] if len(t) == 1 else t)


def _one_bound(args, model, theta):
    g = absolute_value(args.coord) if args.g == "abs" else coordinate(args.coord)
    kind = args.kind
    if kind == "qcr":
        return qcr_bound(model, theta, g, args.flavor)
    if kind == "qhcrk":
        return qhcrk_bound(model, theta, g, _spec(args, model, 1.0), args.flavor)
    if kind == "qk":
        if not args.delta:
            raise UsageError("qk needs a nonzero --delta")
        return qk_bound(model, theta, g, _floats(args.delta)[0], args.r, args.flavor)
    if kind == "multi":
        spec = _spec(args, model, 0.5) if args.delta or args.t else None
        return multiparam_bound(model, theta, _weight(args.G, model.m), spec, args.flavor)
    if kind == "asympt_discrete":
        if not args.delta:
            raise UsageError("asympt_discrete needs --delta")
        rate = discrete_asymptotic_exponent(model, theta, _floats(args.delta)[0])
        return BoundReport(rate, "ASYMPT_DISCRETE", flavor="rld",
                           spec={"delta": _floats(args.delta)[0], "t": 1.0},
                           theta=list(theta), model=model.label)
    t = _floats(args.t)[0] if args.t else 1.0
    return asymptotic_continuous_bound(model, theta, g, t)


def cmd_bound(args):
    model = _model(args)
    reports = [_one_bound(args, model, th) for th in _thetas(args, model)]
    if args.format == "json":
        data = [r.to_dict() for r in reports]
        _emit(json.dumps(data[0] if len(data) == 1 else data, indent=2), args.output)
    else:
        cols = ["theta", "value", "infinite", "kind", "flavor"]
        rows = [[",".join(repr(x) for x in r.theta) if len(r.theta) > 1 else r.theta[0],
                 r.value, r.infinite, r.kind, r.flavor] for r in reports]
        _emit(write_csv(cols, rows, version=__version__), args.output)
    return 0


def _exact_observable(model):
    if model.label == "concurrence":
        return Observable(np.diag([1.0, -1.0])).to_pvm()
    if model.label.startswith("discrete"):
        return discrete_optimal_observable(model.dim).to_pvm()
    raise UsageError(f"no built-in estimator for model {model.label!r}")


def cmd_simulate(args):
    model = _model(args)
    if model.m != 1:
        raise UsageError("simulate supports scalar models only")
    reports = []
    for th in _thetas(args, model):
        theta = th[0]
        if args.mode == "exact":
            reports.append(exact_bias_mse(model, theta, coordinate(), _exact_observable(model)))
        elif model.label == "concurrence":
            reports.append(simulate_concurrence_estimator(theta, args.n, args.trials, args.seed))
        else:
            reports.append(simulate_povm_sampling(model, theta, _exact_observable(model),
                                                  args.n, args.trials, args.seed))
    if args.format == "json":
        data = [r.to_dict() for r in reports]
        _emit(json.dumps(data[0] if len(data) == 1 else data, indent=2), args.output)
    else:
        _emit(write_csv(ESTIMATOR_CSV_COLUMNS, [r.csv_row() for r in reports], version=__version__),
              args.output)
    return 0


def cmd_reproduce(args):
    kw = {}
    if args.sigma2 is not None:
        if args.figure not in ("fig1", "fig3"):
            raise UsageError("--sigma2 applies to fig1 and fig3 only")
        kw["sigma2"] = args.sigma2
    if args.no_sld:
        if args.figure != "fig1":
            raise UsageError("--no-sld applies to fig1 only")
        kw["include_sld"] = False
    if args.figure not in FIGURES:
        raise InvalidInputError(f"unknown figure {args.figure!r}; choose from {', '.join(FIGURES)}")
    columns, rows = reproduce(args.figure, **kw)
    _emit(write_csv(columns, rows, version=__version__), args.output)
    return 0


def cmd_check(args):
    results = run_checks(quick=args.quick, extra_models=args.extra_model, only=args.only,
                         report=lambda r: print(r.line(), flush=True))
    failed = [r.key for r in results if r.passed is False]
    ran = sum(1 for r in results if not r.skipped)
    if failed:
        print(f"qbound: {len(failed)} of {ran} checks failed: {', '.join(failed)}")
        return 1
    print(f"qbound: all {ran} checks passed")
    return 0


COMMANDS = {"bound": cmd_bound, "simulate": cmd_simulate,
            "reproduce": cmd_reproduce, "check": cmd_check}


_VALUE_OPTIONS = ("--theta", "--theta-grid", "--delta", "--t", "--G")


def _join_negative_values(argv):
    """Attach values like ``-0.5,1`` or ``-1:0:0.1`` to their option.

    argparse only accepts a leading minus for plain numbers.
    """
    out = []
    for arg in argv:
        if out and out[-1] in _VALUE_OPTIONS and arg.startswith("-") and arg[1:2] in "0123456789.":
            out[-1] = f"{out[-1]}={arg}"
        else:
            out.append(arg)
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(_join_negative_values(argv))
        return COMMANDS[args.command](args)
    except QBoundError as exc:
        msg = " ".join(str(exc).split())
        print(f"qbound: error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 2
    except OverflowError as exc:
        print(f"qbound: error: OverflowError: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"qbound: error: OSError: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
