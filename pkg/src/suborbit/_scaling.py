"""Overflow-safe handling of integer powers ``base**exponent`` carried beside data.

Vectors produced by ``T^n`` / ``S^n`` keep ``lambda**(+-n)`` as an integer
exponent instead of multiplying it in; these helpers fold the factor in only
when values are read.
"""

import math

import numpy as np

# exp() overflows a double just above 709.78
_SAFE_LOG = 700.0


def log_factor(base, exponent):
    """Natural log of ``|base| ** exponent``."""
    if exponent == 0:
        return 0.0
    return exponent * math.log(abs(base))


def factor(base, exponent):
    """``base ** exponent`` as a float; ``inf`` on overflow."""
    if exponent == 0:
        return 1.0
    try:
        return math.pow(base, exponent)
    except OverflowError:
        return math.inf


def apply_factor(values, base, exponent):
    """Multiply ``values`` by ``base**exponent`` without intermediate overflow.

    Small exponents use a direct multiply (so cancellation of equal exponents
    stays bit-exact); large ones go through ``exp(log|v| + e*log|base|)``.
    """
    values = np.asarray(values)
    if exponent == 0:
        return values.copy()
    lf = log_factor(base, exponent)
    sign = 1.0 if base > 0 or exponent % 2 == 0 else -1.0
    if abs(lf) < _SAFE_LOG:
        return values * math.pow(base, exponent)
    mag = np.abs(values)
    with np.errstate(divide="ignore"):
        logmag = np.log(mag)
    out_mag = np.exp(logmag + lf)
    phase = np.where(mag > 0, values / np.where(mag > 0, mag, 1.0), 0.0)
    return sign * phase * out_mag
