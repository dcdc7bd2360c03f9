"""Scalar special functions backing the exact-derivative oracles.

Everything here is plain double precision; callers needing more digits
should cross-check externally (the test suite does).
"""

import math

__all__ = ["gamma", "bessel_j", "caputo_sin_series"]

# Lanczos approximation, g = 7, 9 coefficients.  Relative error is a few
# ulps over the positive axis, comfortably below 1e-13 on [0.1, 30].
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


def gamma(x: float) -> float:
    """Euler's Gamma function for real ``x``.

    Raises ``ValueError`` at the poles (zero and the negative integers).
    Arguments below 0.5 go through the reflection formula.
    """
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise ValueError(f"gamma has a pole at x={x:g}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    w = x - 1.0
    acc = _LANCZOS_C[0]
    for i in range(1, len(_LANCZOS_C)):
        acc += _LANCZOS_C[i] / (w + i)
    t = w + _LANCZOS_G + 0.5
    # t**(w+0.5) alone overflows near the top of the double range; split the
    # power so each factor stays representable.
    p = t ** (0.5 * w + 0.25)
    return _SQRT_TWO_PI * acc * p * (p * math.exp(-t))


def bessel_j(nu: float, x: float, max_terms: int = 200) -> float:
    """Bessel function of the first kind J_nu(x) by its ascending series.

    Intended for nu > -1 and small non-negative x (the series is summed
    until a term drops below 1e-16 of the running sum, which is fast and
    accurate for x up to roughly 10; this library only needs x in [0, 4]).
    """
    if nu <= -1.0:
        raise ValueError(f"bessel_j requires nu > -1, got nu={nu:g}")
    if x < 0.0:
        raise ValueError(f"bessel_j requires x >= 0, got x={x:g}")
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    half = 0.5 * x
    term = half**nu / gamma(nu + 1.0)
    total = term
    for m in range(1, max_terms):
        term *= -(half * half) / (m * (nu + m))
        total += term
        if abs(term) < 1e-16 * abs(total) + 1e-300:
            return total
    raise RuntimeError(f"bessel_j series did not converge for nu={nu:g}, x={x:g}")


def caputo_sin_series(alpha: float, t: float, tol: float = 1e-15) -> float:
    """Fractional derivative of sin at order ``alpha`` in (0, 1).

    Evaluates t^(1-alpha) * sum_k (-t^2)^k / Gamma(2k+2-alpha), truncating
    once a term falls below ``tol`` of the partial sum (with an absolute
    floor so t=0 terminates immediately).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha:g}")
    if t < 0.0:
        raise ValueError(f"t must be non-negative, got {t:g}")
    if t == 0.0:
        return 0.0
    tt = t * t
    term = 1.0 / gamma(2.0 - alpha)
    total = term
    k = 0
    while abs(term) >= tol * abs(total) + 1e-300:
        term *= -tt / ((2 * k + 2.0 - alpha) * (2 * k + 3.0 - alpha))
        total += term
        k += 1
        if k > 1000:
            raise RuntimeError("caputo_sin_series failed to converge")
    return t ** (1.0 - alpha) * total
