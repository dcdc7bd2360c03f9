"""Experiment harness: pointwise error tables, E_inf sweeps, rule inspection.

Every command writes deterministic CSV plus a gnuplot companion script;
timestamps and version stamps live in a ``.meta.json`` sidecar so repeated
runs with the same configuration produce byte-identical data files.
"""

import argparse
import os
import sys

import numpy as np

from . import report
from .diffusive import Method, Signal, TimeGrid, caputo_derivative, max_error
from .oracle import builtin_cases
from .quadrature import gauss_laguerre

DEFAULT_SWEEP = (10, 20, 40, 80, 160)


def theoretical_exponent(method: Method, alpha: float) -> float:
    """Quadrature-error exponent the E_inf(N) slope is compared against."""
    if method is Method.CDR:
        return alpha - 2.0
    if method is Method.SDR:
        return alpha - 1.0
    return 2.0 * alpha - 2.0


def _parse_sweep(text: str):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad sweep list {text!r}") from exc
    if len(values) < 2 or any(b <= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError("sweep must be a strictly increasing list")
    return values


def load_samples(path):
    """Read a two-column t,y CSV and validate the uniform grid."""
    times, values = [], []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "t,y":
            raise ValueError(f"sample file must start with header 't,y', got {header!r}")
        for line in fh:
            if not line.strip():
                continue
            a, b = line.split(",")
            times.append(float(a))
            values.append(float(b))
    times = np.array(times)
    values = np.array(values)
    if len(times) < 2:
        raise ValueError("sample file needs at least two rows")
    if times[0] != 0.0:
        raise ValueError("sample grid must start at t=0")
    h = (times[-1] - times[0]) / (len(times) - 1)
    expected = times[0] + h * np.arange(len(times))
    if np.max(np.abs(times - expected)) > 1e-12 * max(abs(times[-1]), h):
        raise ValueError("sample grid spacing is not uniform to 1e-12 relative")
    return times, values


def _stability_check(h: float, order: int, gamma: float) -> None:
    z_top = 4.0 * order + 2.0 * gamma + 6.0
    if h * z_top * z_top >= 1.0:
        print(
            f"warning: h*z_max^2 = {h * z_top * z_top:.3g} >= 1 "
            f"(N={order}); proceeding, quadrature error usually dominates",
            file=sys.stderr,
        )


def _resolve_problem(args):
    """Turn --case/--input flags into (label, signal, alpha, grid, exact)."""
    if args.input is not None:
        if args.case is not None:
            raise SystemExit("--case and --input are mutually exclusive")
        if args.alpha is None:
            raise SystemExit("--input mode requires --alpha")
        times, values = load_samples(args.input)
        grid = TimeGrid(horizon=float(times[-1]), count=len(times))
        return args.input, Signal.from_samples(times, values), args.alpha, grid, None
    cases = builtin_cases()
    name = args.case if args.case is not None else "cubic"
    if name not in cases:
        raise SystemExit(f"unknown case {name!r}; choose from {sorted(cases)}")
    case = cases[name]
    alpha = case.alpha if args.alpha is None else args.alpha
    horizon = case.horizon if args.T is None else args.T
    grid = TimeGrid(horizon=horizon, count=args.n)
    exact = lambda t: case.exact(t, alpha)
    return name, case.signal, alpha, grid, exact


def _echo(args, **extra) -> dict:
    payload = {k: v for k, v in vars(args).items() if k != "func"}
    payload.update(extra)
    return payload


def cmd_deriv(args) -> report.ErrorReport:
    label, signal, alpha, grid, exact_fn = _resolve_problem(args)
    method = Method(args.method)
    _stability_check(grid.step, args.N, method.weight_exponent(alpha))
    approx = caputo_derivative(
        method, args.solver, alpha, args.N, grid, signal, fully_implicit=args.fully_implicit
    )
    t = grid.times()
    exact_vals = None if exact_fn is None else np.asarray(exact_fn(t), dtype=float)

    csv_path = f"{args.out}_pointwise.csv"
    report.write_pointwise_csv(csv_path, t, approx, exact_vals)
    report.write_gnuplot_script(
        f"{args.out}_pointwise.gp",
        _basename(csv_path),
        {"abs_err": 4, "rel_err": 5} if exact_vals is not None else {"approx": 2},
        f"{label} {method.value} {args.solver} N={args.N}",
    )
    rep = report.ErrorReport(t=t, approx=approx, exact=exact_vals)
    if exact_vals is not None:
        rep.e_inf = max_error(approx, exact_vals)
    report.write_meta(
        f"{args.out}.meta.json",
        _echo(args, command="deriv", label=label, alpha=alpha, e_inf=rep.e_inf),
    )
    rep.provenance = _echo(args, command="deriv", label=label, alpha=alpha)
    return rep


def _sweep_errors(args, method, signal, alpha, grid, exact_vals):
    errors = []
    for order in args.sweep:
        approx = caputo_derivative(
            method, args.solver, alpha, order, grid, signal, fully_implicit=args.fully_implicit
        )
        errors.append(max_error(approx, exact_vals))
    return np.array(errors)


def cmd_convergence(args) -> report.ErrorReport:
    if len(args.sweep) < 4:
        raise SystemExit("convergence needs a sweep of at least 4 orders")
    label, signal, alpha, grid, exact_fn = _resolve_problem(args)
    if exact_fn is None:
        raise SystemExit("convergence requires a built-in case (an exact reference)")
    method = Method(args.method)
    _stability_check(grid.step, max(args.sweep), method.weight_exponent(alpha))
    exact_vals = np.asarray(exact_fn(grid.times()), dtype=float)
    errors = _sweep_errors(args, method, signal, alpha, grid, exact_vals)
    fit = report.fit_loglog(args.sweep, errors)

    csv_path = f"{args.out}_sweep.csv"
    report.write_sweep_csv(csv_path, args.sweep, errors)
    report.write_gnuplot_script(
        f"{args.out}_sweep.gp",
        _basename(csv_path),
        {"E_inf": 2},
        f"{label} {method.value} {args.solver} E_inf(N)",
        logscale=True,
    )
    rep = report.ErrorReport(
        orders=np.array(args.sweep), e_inf_sweep=errors, e_inf=float(errors[-1]), fit=fit
    )
    meta = _echo(
        args,
        command="convergence",
        label=label,
        alpha=alpha,
        slope=fit.slope,
        slope_stderr=fit.stderr,
        excluded_smallest=fit.excluded_smallest,
        theoretical_exponent=theoretical_exponent(method, alpha),
    )
    report.write_meta(f"{args.out}.meta.json", meta)
    rep.provenance = meta
    return rep


def cmd_compare(args) -> dict:
    if len(args.sweep) < 4:
        raise SystemExit("compare needs a sweep of at least 4 orders")
    label, signal, alpha, grid, exact_fn = _resolve_problem(args)
    if exact_fn is None:
        raise SystemExit("compare requires a built-in case (an exact reference)")
    exact_vals = np.asarray(exact_fn(grid.times()), dtype=float)
    errors = {}
    slopes = {}
    for method in (Method.YA, Method.CDR, Method.SDR, Method.ISDR):
        _stability_check(grid.step, max(args.sweep), method.weight_exponent(alpha))
        errors[method.value] = _sweep_errors(args, method, signal, alpha, grid, exact_vals)
        slopes[method.value] = report.fit_loglog(args.sweep, errors[method.value]).slope

    csv_path = f"{args.out}_compare.csv"
    report.write_compare_csv(csv_path, args.sweep, errors)
    report.write_gnuplot_script(
        f"{args.out}_compare.gp",
        _basename(csv_path),
        {tag: i + 2 for i, tag in enumerate(errors)},
        f"{label} four-method E_inf(N), {args.solver}",
        logscale=True,
    )
    report.write_meta(
        f"{args.out}.meta.json",
        _echo(args, command="compare", label=label, alpha=alpha, slopes=slopes),
    )
    return errors


def cmd_nodes(args):
    rule = gauss_laguerre(args.N, args.gamma)
    if args.out is None:
        report.write_nodes_csv("/dev/stdout", rule)
        return rule
    csv_path = f"{args.out}_nodes.csv"
    report.write_nodes_csv(csv_path, rule)
    report.write_meta(f"{args.out}.meta.json", _echo(args, command="nodes"))
    return rule


def _basename(path: str) -> str:
    return os.path.basename(path)


def _add_run_flags(p, sweep: bool):
    p.add_argument("--solver", choices=("euler", "trapezoid"), default="euler")
    p.add_argument("--alpha", type=float, default=None, help="fractional order in (0,1)")
    p.add_argument("--n", type=int, default=10_000, help="number of time grid points")
    p.add_argument("--T", type=float, default=None, help="time horizon (case default)")
    p.add_argument("--case", default=None, help="built-in case name (default: cubic)")
    p.add_argument("--input", default=None, help="external t,y sample CSV (uniform grid)")
    p.add_argument("--out", required=True, help="output file prefix")
    p.add_argument("--fully-implicit", action="store_true", dest="fully_implicit")
    if sweep:
        p.add_argument("--sweep", type=_parse_sweep, default=list(DEFAULT_SWEEP))
    else:
        p.add_argument("--N", type=int, default=50, help="quadrature order")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caputodr",
        description="Caputo fractional derivatives via diffusive representations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deriv", help="pointwise derivative table for one method")
    p.add_argument("--method", choices=[m.value for m in Method], default="CDR")
    _add_run_flags(p, sweep=False)
    p.set_defaults(func=cmd_deriv)

    p = sub.add_parser("convergence", help="E_inf(N) sweep and fitted slope")
    p.add_argument("--method", choices=[m.value for m in Method], default="CDR")
    _add_run_flags(p, sweep=True)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("compare", help="E_inf(N) sweep for all four methods")
    _add_run_flags(p, sweep=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("nodes", help="dump a Gauss-Laguerre rule as CSV")
    p.add_argument("--N", type=int, required=True, help="quadrature order")
    p.add_argument("--gamma", type=float, required=True, help="weight exponent, > -1")
    p.add_argument("--out", default=None, help="output prefix (stdout when omitted)")
    p.set_defaults(func=cmd_nodes)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "alpha", None) is not None and not 0.0 < args.alpha < 1.0:
        raise SystemExit(f"--alpha must lie in (0, 1), got {args.alpha}")
    if getattr(args, "n", 2) < 2:
        raise SystemExit("--n must be at least 2")
    try:
        args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
