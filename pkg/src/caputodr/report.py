"""Error reports: pointwise tables, E_inf sweeps, log-log slope fits, CSV I/O.

All numeric CSV fields are written with ``repr(float(x))`` so files are
byte-stable across runs and parse back to the identical doubles; anything
time- or host-dependent goes to a JSON sidecar instead.
"""

import json
import platform
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

REL_ERR_FLOOR = 1e-14

__all__ = [
    "SlopeFit",
    "ErrorReport",
    "fit_loglog",
    "write_pointwise_csv",
    "read_pointwise_csv",
    "write_sweep_csv",
    "read_sweep_csv",
    "write_compare_csv",
    "write_nodes_csv",
    "write_gnuplot_script",
    "write_meta",
]


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares slope of log E against log N."""

    slope: float
    intercept: float
    stderr: float
    excluded_smallest: bool = False


def _ols(x: np.ndarray, y: np.ndarray):
    xm = x - x.mean()
    slope = float(xm @ (y - y.mean()) / (xm @ xm))
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    dof = max(len(x) - 2, 1)
    stderr = float(np.sqrt(resid @ resid / dof))
    return slope, intercept, stderr, resid


def fit_loglog(orders, errors) -> SlopeFit:
    """Fit log E_inf ~ slope * log N + c over a sweep.

    When the smallest-N point sits more than twice the fit's residual
    standard error off the line (a pre-asymptotic transient), it is dropped
    and the remaining points refitted; the exclusion is flagged on the
    result.
    """
    orders = np.asarray(orders, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(orders) < 3 or len(orders) != len(errors):
        raise ValueError("need at least 3 matching (N, E) pairs")
    if np.any(orders <= 0) or np.any(errors <= 0):
        raise ValueError("orders and errors must be positive for a log-log fit")
    x = np.log(orders)
    y = np.log(errors)
    slope, intercept, stderr, resid = _ols(x, y)
    if len(orders) > 3 and abs(resid[0]) > 2.0 * stderr:
        slope, intercept, stderr, _ = _ols(x[1:], y[1:])
        return SlopeFit(slope, intercept, stderr, excluded_smallest=True)
    return SlopeFit(slope, intercept, stderr)


@dataclass
class ErrorReport:
    """Bundle of a run's outputs: per-point table and/or an E_inf sweep."""

    t: Optional[np.ndarray] = None
    approx: Optional[np.ndarray] = None
    exact: Optional[np.ndarray] = None
    orders: Optional[np.ndarray] = None
    e_inf_sweep: Optional[np.ndarray] = None
    e_inf: Optional[float] = None
    fit: Optional[SlopeFit] = None
    provenance: dict = field(default_factory=dict)

    @property
    def abs_err(self):
        if self.approx is None or self.exact is None:
            return None
        return np.abs(self.approx - self.exact)

    @property
    def rel_err(self):
        """Relative errors, NaN wherever |exact| sits below the floor."""
        ae = self.abs_err
        if ae is None:
            return None
        with np.errstate(divide="ignore", invalid="ignore"):
            out = ae / np.abs(self.exact)
        out[np.abs(self.exact) < REL_ERR_FLOOR] = np.nan
        return out


def _fmt(x) -> str:
    return repr(float(x))


def write_pointwise_csv(path, t, approx, exact=None) -> None:
    """Write the t,approx,exact,abs_err,rel_err table.

    The exactness columns are left blank when no reference is available
    (external sample input); rel_err is blank wherever |exact| < 1e-14.
    """
    with open(path, "w") as fh:
        fh.write("t,approx,exact,abs_err,rel_err\n")
        for i in range(len(t)):
            if exact is None:
                fh.write(f"{_fmt(t[i])},{_fmt(approx[i])},,,\n")
                continue
            ae = abs(approx[i] - exact[i])
            rel = "" if abs(exact[i]) < REL_ERR_FLOOR else _fmt(ae / abs(exact[i]))
            fh.write(f"{_fmt(t[i])},{_fmt(approx[i])},{_fmt(exact[i])},{_fmt(ae)},{rel}\n")


def read_pointwise_csv(path):
    """Parse a pointwise table back into column arrays (rel_err blanks -> NaN)."""
    cols = {"t": [], "approx": [], "exact": [], "abs_err": [], "rel_err": []}
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header != ["t", "approx", "exact", "abs_err", "rel_err"]:
            raise ValueError(f"unexpected header in {path}: {header}")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            for name, raw in zip(cols, parts):
                cols[name].append(float(raw) if raw else np.nan)
    return {name: np.array(vals) for name, vals in cols.items()}


def write_sweep_csv(path, orders, e_inf) -> None:
    with open(path, "w") as fh:
        fh.write("N,E_inf\n")
        for N, e in zip(orders, e_inf):
            fh.write(f"{int(N)},{_fmt(e)}\n")


def read_sweep_csv(path):
    orders, errors = [], []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "N,E_inf":
            raise ValueError(f"unexpected header in {path}: {header}")
        for line in fh:
            a, b = line.strip().split(",")
            orders.append(int(a))
            errors.append(float(b))
    return np.array(orders), np.array(errors)


def write_compare_csv(path, orders, errors_by_method) -> None:
    """Merged sweep table, one E_inf column per method tag."""
    tags = list(errors_by_method)
    with open(path, "w") as fh:
        fh.write("N," + ",".join(f"E_{tag}" for tag in tags) + "\n")
        for i, N in enumerate(orders):
            row = ",".join(_fmt(errors_by_method[tag][i]) for tag in tags)
            fh.write(f"{int(N)},{row}\n")


def write_nodes_csv(path, rule) -> None:
    with open(path, "w") as fh:
        fh.write("index,node,weight,scaled_weight\n")
        for i in range(rule.order):
            fh.write(
                f"{i},{_fmt(rule.nodes[i])},{_fmt(rule.weights[i])},{_fmt(rule.scaled_weights[i])}\n"
            )


def write_gnuplot_script(path, csv_path, columns, title, logscale=False) -> None:
    """Companion gnuplot commands referencing a CSV by relative name.

    ``columns`` maps plot labels to 1-based CSV column indices.
    """
    lines = [
        "set datafile separator ','",
        f"set title '{title}'",
        "set key outside",
    ]
    if logscale:
        lines += ["set logscale xy", "set format y '%.1e'"]
    plots = ", ".join(
        f"'{csv_path}' using 1:{idx} with linespoints title '{label}'"
        for label, idx in columns.items()
    )
    lines.append(f"plot {plots}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_meta(path, payload: dict) -> None:
    """JSON sidecar holding config echo, timestamp, and versions."""
    import caputodr

    meta = dict(payload)
    meta["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    meta["versions"] = {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "caputodr": getattr(caputodr, "__version__", "unknown"),
    }
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
