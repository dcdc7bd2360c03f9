"""Independent ground truth: closed-form Caputo derivatives and an L1 evaluator.

The L1 scheme is a brute-force O(n^2) product-integration discretization of
the Caputo integral.  It shares no machinery with the diffusive stepping,
which is what makes it a trustworthy cross-check; its global accuracy is
O(h^(2-alpha)).
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import specfun
from .diffusive import Signal, TimeGrid, _alpha_value, _sample

__all__ = [
    "TestCase",
    "exact_power",
    "exact_sin",
    "exact_bessel",
    "caputo_l1",
    "builtin_cases",
]


def exact_power(p: float, alpha, t):
    """Caputo derivative of t^p: Gamma(p+1)/Gamma(p+1-alpha) * t^(p-alpha)."""
    if p <= 0.0:
        raise ValueError(f"p must be positive, got {p!r}")
    a = _alpha_value(alpha)
    ratio = specfun.gamma(p + 1.0) / specfun.gamma(p + 1.0 - a)
    return ratio * np.asarray(t, dtype=float) ** (p - a)


def exact_sin(alpha, t):
    """Caputo derivative of sin t, by its alternating series."""
    a = _alpha_value(alpha)
    if np.ndim(t):
        return np.array([specfun.caputo_sin_series(a, float(ti), 1e-15) for ti in t])
    return specfun.caputo_sin_series(a, float(t), 1e-15)


def exact_bessel(nu: float, alpha, t):
    """Caputo derivative of t^(nu/2) J_nu(2 sqrt(t)): t^((nu-a)/2) J_(nu-a)(2 sqrt(t))."""
    a = _alpha_value(alpha)
    if nu - a <= -1.0:
        raise ValueError(f"need nu - alpha > -1, got nu={nu:g}, alpha={a:g}")

    def one(ti):
        if ti < 0.0:
            raise ValueError(f"t must be non-negative, got {ti!r}")
        return ti ** (0.5 * (nu - a)) * specfun.bessel_j(nu - a, 2.0 * np.sqrt(ti))

    if np.ndim(t):
        return np.array([one(float(ti)) for ti in t])
    return one(float(t))


def caputo_l1(signal: Signal, alpha, grid: TimeGrid) -> np.ndarray:
    """Classical L1 product-integration values of the Caputo derivative.

    result[k] = h^(-alpha)/Gamma(2-alpha) * sum_{m=1}^{k} b_m (y_{k-m+1} - y_{k-m})
    with b_m = m^(1-alpha) - (m-1)^(1-alpha); exact for linear signals, and
    O(h^(2-alpha)) accurate in general.  The convolution runs through
    numpy's direct (non-FFT) kernel, so the cost stays honestly O(n^2).
    """
    a = _alpha_value(alpha)
    times = grid.times()
    n = grid.count
    h = grid.step
    yv = _sample(signal.y, times)
    m = np.arange(1, n, dtype=float)
    b = m ** (1.0 - a) - (m - 1.0) ** (1.0 - a)
    conv = np.convolve(b, np.diff(yv))[: n - 1]
    out = np.zeros(n)
    out[1:] = conv * h ** (-a) / specfun.gamma(2.0 - a)
    return out


@dataclass(frozen=True)
class TestCase:
    """A signal with known fractional derivative, for error studies."""

    name: str
    signal: Signal
    alpha: float
    horizon: float
    exact: Callable


def _bessel_signal(nu: float) -> Signal:
    def y(t):
        return t ** (0.5 * nu) * specfun.bessel_j(nu, 2.0 * np.sqrt(t))

    def y_prime(t):
        # d/dt [t^(nu/2) J_nu(2 sqrt t)] = t^((nu-1)/2) J_(nu-1)(2 sqrt t)
        return t ** (0.5 * (nu - 1.0)) * specfun.bessel_j(nu - 1.0, 2.0 * np.sqrt(t))

    return Signal(y=y, y_prime=y_prime)


def builtin_cases() -> dict:
    """The four benchmark cases: two powers, sine, and a Bessel profile."""
    cases = [
        TestCase(
            name="power16",
            signal=Signal(y=lambda t: t**1.6, y_prime=lambda t: 1.6 * t**0.6),
            alpha=0.4,
            horizon=3.0,
            exact=lambda t, a=0.4: exact_power(1.6, a, t),
        ),
        TestCase(
            name="cubic",
            signal=Signal(y=lambda t: t**3, y_prime=lambda t: 3.0 * t**2),
            alpha=0.6,
            horizon=1.0,
            exact=lambda t, a=0.6: exact_power(3.0, a, t),
        ),
        TestCase(
            name="sine",
            signal=Signal(y=np.sin, y_prime=np.cos),
            alpha=0.5,
            horizon=1.0,
            exact=lambda t, a=0.5: exact_sin(a, t),
        ),
        TestCase(
            name="bessel",
            signal=_bessel_signal(3.0),
            alpha=0.5,
            horizon=1.0,
            exact=lambda t, a=0.5: exact_bessel(3.0, a, t),
        ),
    ]
    return {c.name: c for c in cases}
