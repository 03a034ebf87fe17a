"""Sine and cosine integrals Si/Ci.

Two genuinely independent evaluation strategies are exposed:

* a Maclaurin-series route (:func:`sine_integral_series`,
  :func:`cosine_integral_series`) summed in arbitrary precision, usable at
  any argument and serving as the reference;
* an auxiliary-function route (:func:`sine_integral_asymptotic`,
  :func:`cosine_integral_asymptotic`) from the Lentz continued fraction,
  accurate to ~1e-15 for arguments >= ~2.

The production functions :func:`sine_integral` / :func:`cosine_integral`
dispatch between a float64 series and the auxiliary route at
``PHI_CROSSOVER`` = 8.  A float64 Maclaurin sum loses ~6 digits to
cancellation by phi = 20, so the crossover sits where both branches hold
better than 1e-12; the two strategies above are cross-checked on the
overlap window [5, 50] by the test suite.
"""

import mpmath
import numpy as np

from . import _kernels
from ._kernels import EULER_GAMMA, PHI_CROSSOVER
from .errors import DomainError

__all__ = [
    "EULER_GAMMA",
    "PHI_CROSSOVER",
    "sine_integral",
    "cosine_integral",
    "sine_integral_series",
    "cosine_integral_series",
    "sine_integral_asymptotic",
    "cosine_integral_asymptotic",
    "aux_fg",
]


def _validate(phi, *, positive):
    arr = np.asarray(phi, dtype=float)
    if arr.ndim > 1:
        raise DomainError("argument must be scalar or 1-d")
    flat = np.atleast_1d(arr)
    if not np.all(np.isfinite(flat)):
        raise DomainError("argument must be finite")
    if positive:
        if np.any(flat <= 0):
            raise DomainError("argument must be > 0 (logarithmic singularity at 0)")
    elif np.any(flat < 0):
        raise DomainError("argument must be >= 0")
    return arr, flat


def sine_integral(phi):
    """Si(phi) = integral_0^phi sin(t)/t dt for phi >= 0."""
    arr, flat = _validate(phi, positive=False)
    si, _ = _kernels.sici_arrays(flat)
    return float(si[0]) if arr.ndim == 0 else si


def cosine_integral(phi):
    """Ci(phi) = -integral_phi^inf cos(t)/t dt for phi > 0."""
    arr, flat = _validate(phi, positive=True)
    _, ci = _kernels.sici_arrays(flat)
    return float(ci[0]) if arr.ndim == 0 else ci


def _series_prec(phi):
    # worst partial term ~ exp(phi); add guard digits for the target accuracy
    return max(50, int(1.45 * phi) + 90)


def sine_integral_series(phi):
    """Series strategy: Maclaurin sum of Si in arbitrary precision."""
    _validate(float(phi), positive=False)
    if phi == 0:
        return 0.0
    with mpmath.workprec(_series_prec(phi)):
        x = mpmath.mpf(phi)
        term = x
        total = mpmath.mpf(0)
        k = 0
        while True:
            total += term
            term *= -x * x * (2 * k + 1) / ((2 * k + 2) * (2 * k + 3) ** 2)
            if abs(term) < mpmath.eps * abs(total):
                break
            k += 1
        return float(total)


def cosine_integral_series(phi):
    """Series strategy: Ci = gamma + ln(phi) - Cin(phi) in arbitrary precision."""
    _validate(float(phi), positive=True)
    with mpmath.workprec(_series_prec(phi)):
        x = mpmath.mpf(phi)
        term = x * x / 4
        cin = mpmath.mpf(0)
        k = 1
        while True:
            cin += term
            term *= -x * x * (2 * k) / ((2 * k + 1) * (2 * k + 2) ** 2)
            if abs(term) < mpmath.eps * max(abs(cin), mpmath.mpf(1e-320)):
                break
            k += 1
        return float(mpmath.euler + mpmath.log(x) - cin)


def sine_integral_asymptotic(phi):
    """Auxiliary-function strategy: Si = pi/2 - f cos - g sin (phi >= 1)."""
    arr = np.asarray(phi, dtype=float)
    flat = np.atleast_1d(arr)
    if np.any(flat < 1.0):
        raise DomainError("auxiliary-function strategy requires phi >= 1")
    f, g = _kernels.aux_fg_arrays(flat)
    out = np.pi / 2 - f * np.cos(flat) - g * np.sin(flat)
    return float(out[0]) if arr.ndim == 0 else out


def cosine_integral_asymptotic(phi):
    """Auxiliary-function strategy: Ci = f sin - g cos (phi >= 1)."""
    arr = np.asarray(phi, dtype=float)
    flat = np.atleast_1d(arr)
    if np.any(flat < 1.0):
        raise DomainError("auxiliary-function strategy requires phi >= 1")
    f, g = _kernels.aux_fg_arrays(flat)
    out = f * np.sin(flat) - g * np.cos(flat)
    return float(out[0]) if arr.ndim == 0 else out


def aux_fg(phi):
    """Auxiliary functions (f, g): Ci = f sin - g cos, Si = pi/2 - f cos - g sin.

    g > 0 supplies the non-negative closed form of the transit-noise bracket.
    """
    arr, flat = _validate(phi, positive=True)
    f, g = _kernels.aux_fg_arrays(flat)
    if arr.ndim == 0:
        return float(f[0]), float(g[0])
    return f, g


def grid_table(start, stop, points, log_spacing=True):
    """(phi, Si, Ci) columns on a grid; backs the ``specfun`` CLI subcommand."""
    if points < 2:
        raise DomainError("need at least 2 grid points")
    if start <= 0 or stop <= 0:
        raise DomainError("grid endpoints must be positive (Ci diverges at 0)")
    if log_spacing:
        phi = np.geomspace(start, stop, points)
    else:
        phi = np.linspace(start, stop, points)
    si, ci = _kernels.sici_arrays(np.asarray(phi, dtype=float))
    return phi, si, ci
