"""Hot numeric kernels with a numba lane and a pure-numpy fallback lane.

The numba lane compiles tight per-element loops; the numpy lane runs the
same mathematics as masked vector iterations.  Set ``SUPERHET_NO_NUMBA=1``
(or uninstall numba) to force the numpy lane.  ``benchmarks/bench_kernels.py``
compares the two.

Kernels:
  * ``sici_arrays`` -- sine/cosine integrals Si, Ci on a positive grid
    (Maclaurin series below ``PHI_CROSSOVER``, Lentz continued fraction for
    the auxiliary functions above it).
  * ``aux_fg_arrays`` -- the auxiliary pair (f, g) with
    Ci = f sin - g cos, Si = pi/2 - f cos - g sin; g is the
    cancellation-free route to the transit-noise bracket.
  * ``cos_tail_integral`` -- adaptive half-period panel quadrature with
    repeated-averaging (Euler) acceleration for
    integral_0^inf cos(phi*u)/(1+u) du.
"""

import math
import os

import numpy as np

EULER_GAMMA = 0.57721566490153286
PHI_CROSSOVER = 8.0
_CF_MAX_ITER = 2000
_CF_EPS = 1e-16
_SERIES_MAX_TERMS = 120

_env = os.environ.get("SUPERHET_NO_NUMBA", "").strip().lower()
_FORCE_NUMPY = _env not in ("", "0", "false", "no")

try:
    if _FORCE_NUMPY:
        raise ImportError("numba disabled via SUPERHET_NO_NUMBA")
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(func):
            return func

        return deco


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


# ---------------------------------------------------------------------------
# scalar building blocks (compiled per element in the numba lane)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _si_cin_series_scalar(phi):
    """Maclaurin sums for Si(phi) and Cin(phi); well conditioned for phi < ~10."""
    si = 0.0
    term = phi
    k = 0
    while k < _SERIES_MAX_TERMS:
        si += term
        term *= -phi * phi * (2 * k + 1) / ((2 * k + 2) * (2 * k + 3) * (2 * k + 3))
        if abs(term) < 1e-18 * abs(si) + 1e-300:
            break
        k += 1
    cin = 0.0
    term = phi * phi / 4.0
    k = 1
    while k < _SERIES_MAX_TERMS:
        cin += term
        term *= -phi * phi * (2 * k) / ((2 * k + 1) * (2 * k + 2) * (2 * k + 2))
        if abs(term) < 1e-18 * abs(cin) + 1e-300:
            break
        k += 1
    return si, cin


@njit(cache=True)
def _aux_fg_scalar(phi):
    """Auxiliary (f, g) via the modified Lentz continued fraction for
    exp(z) E1(z) at z = i*phi.  Accurate to ~1e-15 for phi >= ~2."""
    z = complex(0.0, phi)
    b = z + 1.0
    c = complex(1e308, 0.0)
    d = 1.0 / b
    h = d
    for i in range(1, _CF_MAX_ITER):
        a = -float(i) * float(i)
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h = h * delta
        if abs(delta.real - 1.0) + abs(delta.imag) < _CF_EPS:
            break
    # h = exp(z) E1(z) = g - i f
    return -h.imag, h.real


@njit(cache=True)
def _sici_scalar(phi):
    if phi == 0.0:
        return 0.0, -np.inf
    if phi < PHI_CROSSOVER:
        si, cin = _si_cin_series_scalar(phi)
        return si, EULER_GAMMA + math.log(phi) - cin
    f, g = _aux_fg_scalar(phi)
    s = math.sin(phi)
    c = math.cos(phi)
    return math.pi / 2 - f * c - g * s, f * s - g * c


# ---------------------------------------------------------------------------
# array kernels, numba lane
# ---------------------------------------------------------------------------

@njit(cache=True)
def _sici_arrays_numba(phi):
    n = phi.shape[0]
    si = np.empty(n)
    ci = np.empty(n)
    for i in range(n):
        si[i], ci[i] = _sici_scalar(phi[i])
    return si, ci


@njit(cache=True)
def _aux_fg_arrays_numba(phi):
    n = phi.shape[0]
    f = np.empty(n)
    g = np.empty(n)
    for i in range(n):
        if phi[i] < PHI_CROSSOVER:
            si, cin = _si_cin_series_scalar(phi[i])
            ci = EULER_GAMMA + math.log(phi[i]) - cin
            s = math.sin(phi[i])
            c = math.cos(phi[i])
            # invert Ci = f s - g c, pi/2 - Si = f c + g s
            f[i] = ci * s + (math.pi / 2 - si) * c
            g[i] = (math.pi / 2 - si) * s - ci * c
        else:
            f[i], g[i] = _aux_fg_scalar(phi[i])
    return f, g


# ---------------------------------------------------------------------------
# array kernels, numpy lane
# ---------------------------------------------------------------------------

def _sici_arrays_numpy(phi):
    si = np.zeros_like(phi)
    ci = np.full_like(phi, -np.inf)
    small = (phi > 0) & (phi < PHI_CROSSOVER)
    large = phi >= PHI_CROSSOVER
    if np.any(small):
        p = phi[small]
        p2 = p * p
        s = np.zeros_like(p)
        term = p.copy()
        for k in range(_SERIES_MAX_TERMS):
            s += term
            term *= -p2 * (2 * k + 1) / ((2 * k + 2) * (2 * k + 3) ** 2)
            if np.max(np.abs(term)) < 1e-18 * max(np.min(np.abs(s)), 1e-300):
                break
        cin = np.zeros_like(p)
        term = p2 / 4.0
        for k in range(1, _SERIES_MAX_TERMS):
            cin += term
            term *= -p2 * (2 * k) / ((2 * k + 1) * (2 * k + 2) ** 2)
            if np.max(np.abs(term)) < 1e-18 * max(np.min(np.abs(cin)), 1e-300):
                break
        si[small] = s
        ci[small] = EULER_GAMMA + np.log(p) - cin
    if np.any(large):
        f, g = _aux_fg_numpy(phi[large])
        s = np.sin(phi[large])
        c = np.cos(phi[large])
        si[large] = np.pi / 2 - f * c - g * s
        ci[large] = f * s - g * c
    return si, ci


def _aux_fg_numpy(phi):
    """Vectorized masked Lentz iteration; phi must be >= ~2."""
    z = 1j * phi
    b = z + 1.0
    c = np.full(phi.shape, 1e308, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(phi.shape, dtype=bool)
    for i in range(1, _CF_MAX_ITER):
        if not np.any(active):
            break
        a = -float(i) * float(i)
        b = b + 2.0
        d[active] = 1.0 / (a * d[active] + b[active])
        c[active] = b[active] + a / c[active]
        delta = c[active] * d[active]
        h[active] = h[active] * delta
        still = np.abs(delta.real - 1.0) + np.abs(delta.imag) >= _CF_EPS
        idx = np.where(active)[0]
        active[idx[~still]] = False
    return -h.imag, h.real


def _aux_fg_arrays_numpy(phi):
    f = np.empty_like(phi)
    g = np.empty_like(phi)
    small = phi < PHI_CROSSOVER
    if np.any(small):
        si, ci = _sici_arrays_numpy(phi[small])
        s = np.sin(phi[small])
        c = np.cos(phi[small])
        f[small] = ci * s + (np.pi / 2 - si) * c
        g[small] = (np.pi / 2 - si) * s - ci * c
    if np.any(~small):
        f[~small], g[~small] = _aux_fg_numpy(phi[~small])
    return f, g


# ---------------------------------------------------------------------------
# oscillatory tail quadrature: integral_0^inf cos(phi*u)/(1+u) du
# ---------------------------------------------------------------------------

@njit(cache=True)
def _gl_panel(phi, lo, hi, nodes, weights):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    acc = 0.0
    for i in range(nodes.shape[0]):
        u = mid + half * nodes[i]
        acc += weights[i] * math.cos(phi * u) / (1.0 + u)
    return acc * half


@njit(cache=True)
def _cos_tail_numba(phi, tol, max_panels, nodes, weights):
    # head: geometric sub-panels up to the first zero of cos(phi*u)
    u0 = math.pi / (2.0 * phi)
    head = 0.0
    lo = 0.0
    step = min(1.0, u0)
    while lo < u0:
        hi = min(lo + step, u0)
        head += _gl_panel(phi, lo, hi, nodes, weights)
        lo = hi
        step *= 3.0
    # alternating half-period panels, accelerated by repeated averaging
    width = math.pi / phi
    partial = np.empty(max_panels + 1)
    partial[0] = head
    total = head
    best = head
    est = abs(head) + 1.0
    n = 0
    for j in range(1, max_panels + 1):
        a = _gl_panel(phi, u0 + (j - 1) * width, u0 + j * width, nodes, weights)
        total += a
        partial[j] = total
        n = j
        if j >= 6 and j % 2 == 0:
            work = partial[: j + 1].copy()
            m = j + 1
            prev = work[m - 1]
            est = abs(prev)
            while m > 1:
                for i in range(m - 1):
                    work[i] = 0.5 * (work[i] + work[i + 1])
                m -= 1
                est = abs(work[m - 1] - prev)
                prev = work[m - 1]
            best = prev
            scale = abs(best)
            if scale < 1e-300:
                scale = 1e-300
            if est / scale < tol / 10.0:
                return best, est / scale, 1, n
    scale = abs(best)
    if scale < 1e-300:
        scale = 1e-300
    return best, est / scale, 0, n


def _cos_tail_numpy(phi, tol, max_panels, nodes, weights):
    u0 = math.pi / (2.0 * phi)
    half_nodes = nodes
    head = 0.0
    lo = 0.0
    step = min(1.0, u0)
    while lo < u0:
        hi = min(lo + step, u0)
        mid = 0.5 * (hi + lo)
        h = 0.5 * (hi - lo)
        u = mid + h * half_nodes
        head += h * np.sum(weights * np.cos(phi * u) / (1.0 + u))
        lo = hi
        step *= 3.0
    width = math.pi / phi
    partial = [head]
    total = head
    best = head
    est = abs(head) + 1.0
    for j in range(1, max_panels + 1):
        a = u0 + (j - 1) * width
        b = a + width
        mid = 0.5 * (a + b)
        h = 0.5 * (b - a)
        u = mid + h * half_nodes
        total += h * np.sum(weights * np.cos(phi * u) / (1.0 + u))
        partial.append(total)
        if j >= 6 and j % 2 == 0:
            work = np.array(partial)
            prev = work[-1]
            est = abs(prev)
            while work.shape[0] > 1:
                work = 0.5 * (work[:-1] + work[1:])
                est = abs(work[-1] - prev)
                prev = work[-1]
            best = prev
            scale = max(abs(best), 1e-300)
            if est / scale < tol / 10.0:
                return best, est / scale, 1, j
    scale = max(abs(best), 1e-300)
    return best, est / scale, 0, max_panels


# ---------------------------------------------------------------------------
# lane selection
# ---------------------------------------------------------------------------

def sici_arrays(phi):
    """Si and Ci on a 1-d float64 array with non-negative entries."""
    if NUMBA_ENABLED:
        return _sici_arrays_numba(phi)
    return _sici_arrays_numpy(phi)


def aux_fg_arrays(phi):
    """Auxiliary (f, g) on a 1-d float64 array with positive entries."""
    if NUMBA_ENABLED:
        return _aux_fg_arrays_numba(phi)
    return _aux_fg_arrays_numpy(phi)


def cos_tail_integral(phi, tol, max_panels=400):
    """Accelerated quadrature of integral_0^inf cos(phi*u)/(1+u) du.

    Returns ``(value, relative_error_estimate, converged, panels_used)``.
    """
    if NUMBA_ENABLED:
        return _cos_tail_numba(float(phi), float(tol), int(max_panels),
                               _GL_NODES, _GL_WEIGHTS)
    return _cos_tail_numpy(float(phi), float(tol), int(max_panels),
                           _GL_NODES, _GL_WEIGHTS)


def gl_panel_integral(func, lo, hi):
    """16-node Gauss-Legendre panel integral of ``func`` on [lo, hi].

    Exposed for validating the panel machinery against trivial integrands.
    """
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    u = mid + half * _GL_NODES
    return half * float(np.sum(_GL_WEIGHTS * func(u)))
