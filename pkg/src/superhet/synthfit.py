"""Synthetic noise power spectra and the data-reduction pipeline:
subtract the probe reference, section-average, regroup by frequency, fit
the atom-number power law, and fit dB-domain scaling slopes.

Spectra are synthesized directly in the frequency domain.  Each bin of an
n-averaged periodogram is modeled as gamma-distributed with shape n_avg
(relative standard deviation 1/sqrt(n_avg)); draws are deterministic under
a fixed seed.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import curve_fit

from .errors import AlignmentError, DomainError, FitError
from .receiver import NoiseBudget


def _lin(p_dbm):
    return 10.0 ** (np.asarray(p_dbm, dtype=float) / 10.0)


def _dbm(p_lin):
    return 10.0 * np.log10(np.asarray(p_lin, dtype=float))


@dataclass(frozen=True)
class NoiseSpectrum:
    """Frequency grid (Hz), per-bin power (dBm at resolution bandwidth rbw),
    averaging depth, seed, and per-bin exclusion flags."""

    freqs: np.ndarray
    power_dbm: np.ndarray
    rbw: float
    n_avg: int
    seed: Optional[int] = None
    flagged: np.ndarray = None

    def __post_init__(self):
        if len(self.freqs) != len(self.power_dbm):
            raise DomainError("freqs and power arrays must have equal length")
        if not self.rbw > 0:
            raise DomainError("rbw must be > 0")
        if self.n_avg < 1:
            raise DomainError("n_avg must be >= 1")
        if self.flagged is None:
            object.__setattr__(self, "flagged", np.zeros(len(self.freqs), dtype=bool))
        good = ~self.flagged
        if not np.all(np.isfinite(self.power_dbm[good])):
            raise DomainError("unflagged power values must be finite")

    def linear_power(self):
        return _lin(self.power_dbm)


@dataclass(frozen=True)
class PowerLawFit:
    """Parameters of P = A * N^(2 kappa) + P0 in linear power units, with
    standard errors; ``p_n0_clamped`` marks a negative constant clamped to 0."""

    a_coeff: float
    kappa: float
    p_n0: float
    stderr_a: float
    stderr_kappa: float
    stderr_p_n0: float
    kappa_fixed: bool
    p_n0_clamped: bool = False


@dataclass(frozen=True)
class ScalingResult:
    """Ordinary least squares in (N_a dB, P dBm) coordinates."""

    slope: float
    intercept: float
    r_squared: float
    residuals: np.ndarray
    regime: str = "all"


def relative_atom_number(l_mm) -> float:
    """Relative atom number in dB: 20 log10(l / 1 mm)."""
    arr = np.asarray(l_mm, dtype=float)
    if np.any(np.atleast_1d(arr) <= 0):
        raise DomainError("interaction length must be > 0")
    out = 20.0 * np.log10(arr)
    return float(out) if arr.ndim == 0 else out


def synthesize_nps(budget: NoiseBudget, grid, rbw, n_avg, seed,
                   include_atoms=True, include_residual=True) -> NoiseSpectrum:
    """Draw an averaged-periodogram spectrum around the budget's mean.

    ``include_atoms=False`` synthesizes the probe-only reference measurement
    (cell removed); the residual term belongs to the superhet side only.
    """
    if n_avg < 1:
        raise DomainError("n_avg must be >= 1")
    grid = np.asarray(grid, dtype=float)
    mean = budget.probe_power(grid)
    if include_atoms:
        mean = mean + budget.atomic_power(grid, rbw)
        if include_residual:
            mean = mean + budget.residual_power(grid)
    rng = np.random.default_rng(seed)
    draws = rng.gamma(shape=float(n_avg), scale=1.0 / float(n_avg), size=grid.size)
    linear = mean * draws * 10.0 ** (budget.dbm_cal / 10.0)
    return NoiseSpectrum(grid, _dbm(linear), rbw, int(n_avg), seed)


def subtract_probe_noise(p_na: NoiseSpectrum, p_np: NoiseSpectrum) -> NoiseSpectrum:
    """Linear-power subtraction per bin; non-positive results are flagged."""
    if p_na.freqs.shape != p_np.freqs.shape or not np.allclose(
            p_na.freqs, p_np.freqs, rtol=0, atol=0):
        raise AlignmentError("spectra are on different frequency grids")
    if p_na.rbw != p_np.rbw:
        raise AlignmentError("spectra have different resolution bandwidths")
    diff = p_na.linear_power() - p_np.linear_power()
    flagged = (diff <= 0) | p_na.flagged | p_np.flagged
    power = np.full_like(diff, np.nan)
    power[~flagged] = _dbm(diff[~flagged])
    return NoiseSpectrum(p_na.freqs, power, p_na.rbw, p_na.n_avg, p_na.seed, flagged)


def section_average(s: NoiseSpectrum, width=1000.0) -> NoiseSpectrum:
    """Average linear power inside fixed-width frequency sections.

    One output bin per section at the section-center frequency; flagged bins
    are excluded from the mean; sections left empty are dropped.
    """
    if s.freqs[-1] - s.freqs[0] < width:
        raise DomainError("grid span is smaller than the section width")
    start = s.freqs[0]
    idx = np.floor((s.freqs - start) / width).astype(int)
    # a bin landing exactly on the upper edge belongs to the last section
    n_sec = int(idx.max()) + 1
    last = idx == n_sec - 1
    if np.count_nonzero(last) == 1 and n_sec > 1:
        idx[last] = n_sec - 2
        n_sec -= 1
    centers = []
    means = []
    lin = s.linear_power()
    for k in range(n_sec):
        in_sec = idx == k
        good = in_sec & ~s.flagged
        if not np.any(good):
            continue
        centers.append(start + (k + 0.5) * width)
        means.append(float(np.mean(lin[good])))
    if not centers:
        raise DomainError("all sections empty after exclusions")
    return NoiseSpectrum(np.asarray(centers), _dbm(np.asarray(means)),
                         s.rbw, s.n_avg, s.seed)


def fit_power_law(points: Sequence[Tuple[float, float]],
                  kappa_fixed: Optional[float] = 0.5) -> PowerLawFit:
    """Least-squares fit of P = A * N^(2 kappa) + P0 in linear power units.

    With ``kappa_fixed`` the model is linear in (A, P0) and solved in closed
    form; with ``kappa_fixed=None`` the exponent is free (needs >= 4 points).
    """
    pts = [(float(n), float(p)) for n, p in points]
    n = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if len(set(n.tolist())) < len(n):
        raise FitError("atom-number values must be distinct")
    if kappa_fixed is not None:
        if len(pts) < 3:
            raise FitError("need at least 3 points with kappa fixed")
        x = n ** (2 * kappa_fixed)
        design = np.column_stack([x, np.ones_like(x)])
        coef, res, rank, _ = np.linalg.lstsq(design, y, rcond=None)
        if rank < 2:
            raise FitError("rank-deficient design matrix")
        a, p0 = float(coef[0]), float(coef[1])
        dof = max(len(pts) - 2, 1)
        rss = float(res[0]) if res.size else float(np.sum((design @ coef - y) ** 2))
        sigma2 = rss / dof
        cov = sigma2 * np.linalg.inv(design.T @ design)
        err_a, err_p0 = math.sqrt(cov[0, 0]), math.sqrt(cov[1, 1])
        clamped = p0 < 0
        return PowerLawFit(a, float(kappa_fixed), max(p0, 0.0),
                           err_a, 0.0, err_p0, True, clamped)
    if len(pts) < 4:
        raise FitError("need at least 4 points with kappa free")

    def model(nn, a, kappa, p0):
        return a * nn ** (2 * kappa) + p0

    a0 = max((y[-1] - y[0]) / max(n[-1] - n[0], 1e-30), 1e-30)
    try:
        popt, pcov = curve_fit(model, n, y, p0=[a0, 0.5, max(y.min(), 0.0)],
                               maxfev=20000)
    except RuntimeError as exc:
        raise FitError(f"power-law fit did not converge: {exc}") from exc
    err = np.sqrt(np.clip(np.diag(pcov), 0, np.inf))
    a, kappa, p0 = (float(v) for v in popt)
    clamped = p0 < 0
    return PowerLawFit(a, kappa, max(p0, 0.0),
                       float(err[0]), float(err[1]), float(err[2]), False, clamped)


@dataclass(frozen=True)
class SectionFitRow:
    f_hz: float
    fit: PowerLawFit


def a_and_pn0_vs_frequency(sections_by_na) -> List[SectionFitRow]:
    """Fixed-exponent fits per frequency section.

    ``sections_by_na`` maps section-center frequency to a list of
    (N_a linear, P linear) points regrouped across interaction lengths.
    """
    rows = []
    for f in sorted(sections_by_na):
        rows.append(SectionFitRow(float(f), fit_power_law(sections_by_na[f], 0.5)))
    return rows


def fit_db_slope(na_db, p_dbm, regime="all") -> ScalingResult:
    """Ordinary least squares of P(dBm) against N_a(dB); the slope is the
    scaling exponent."""
    x = np.asarray(na_db, dtype=float)
    y = np.asarray(p_dbm, dtype=float)
    if x.size < 3:
        raise FitError(f"need at least 3 points per regime (got {x.size})")
    design = np.column_stack([x, np.ones_like(x)])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 2:
        raise FitError("degenerate design: atom-number values collinear")
    fitted = design @ coef
    resid = y - fitted
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return ScalingResult(float(coef[0]), float(coef[1]), r2, resid, regime)


def split_by_threshold(l_mm, threshold_db):
    """Partition lengths (mm) into below/above the lambda/4 threshold on the
    relative-atom-number axis; every point lands in exactly one regime."""
    na = np.atleast_1d(relative_atom_number(np.asarray(l_mm, dtype=float)))
    below = na < threshold_db
    return below, ~below


def fit_scaling_regimes(l_mm, p_dbm, threshold_db) -> List[ScalingResult]:
    """Separate dB-domain fits below and above the threshold."""
    l_arr = np.asarray(l_mm, dtype=float)
    na = np.atleast_1d(relative_atom_number(l_arr))
    y = np.asarray(p_dbm, dtype=float)
    below, above = split_by_threshold(l_arr, threshold_db)
    out = []
    for mask, name in ((below, "below"), (above, "above")):
        if np.count_nonzero(mask) < 3:
            raise FitError(f"insufficient points in regime '{name}'")
        out.append(fit_db_slope(na[mask], y[mask], name))
    return out
