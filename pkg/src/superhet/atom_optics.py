"""Ladder EIT spectra, Autler-Townes splitting, and the standing-wave
field model inside the vapor cell.

The probe response is the steady-state weak-probe coherence of a 3-level
ladder, dressed to 4 levels when a microwave field couples the Rydberg
state.  Decoherence rates are effective values chosen so the default
configuration reproduces a 7.5 MHz EIT width; they ship with the default
config and are documented as phenomenological.
"""

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import CalibrationError, DomainError, ExtractionError

TWO_PI = 2 * math.pi

BASELINE_DETUNING_HZ = 25e6  # far outside the 7.5 MHz window


@dataclass(frozen=True)
class LadderConfig:
    """Probe/coupling/microwave drive and effective decoherence rates.

    Rabi frequencies and rates in rad/s, detunings in rad/s, interaction
    length in mm.  ``omega_mw`` = 0 selects plain EIT; > 0 dresses the
    Rydberg state (A-T mode).  ``gamma_rr`` is the dressed-coherence decay.
    """

    omega_p: float
    omega_c: float
    gamma_e: float
    gamma_r: float
    od_per_mm: float
    l_mm: float
    delta_p: float = 0.0
    delta_c: float = 0.0
    omega_mw: float = 0.0
    gamma_rr: float = TWO_PI * 0.02e6

    def __post_init__(self):
        for name in ("gamma_e", "gamma_r", "gamma_rr"):
            if not getattr(self, name) > 0:
                raise DomainError(f"LadderConfig.{name} must be > 0")
        if self.od_per_mm < 0:
            raise DomainError("LadderConfig.od_per_mm must be >= 0")
        if not self.l_mm > 0:
            raise DomainError("LadderConfig.l_mm must be > 0")
        if self.omega_mw < 0 or self.omega_c < 0 or self.omega_p < 0:
            raise DomainError("Rabi frequencies must be >= 0")

    def with_length(self, l_mm):
        return replace(self, l_mm=l_mm)


@dataclass(frozen=True)
class EITSpectrum:
    """Probe transmission versus coupling detuning (Hz), with the extracted
    peak contrast and width when a single EIT peak exists."""

    detuning_hz: np.ndarray
    transmission: np.ndarray
    baseline: float
    a_eit: Optional[float] = None
    fwhm: Optional[float] = None


@dataclass(frozen=True)
class CellGeometry:
    """Scalar standing-wave geometry of the microwave inside the cell.

    ``l`` is the reference interaction length (m) used as the calibration
    anchor; ``z0`` the path start offset (m); ``signal_offset`` the phase
    offset between the signal and local standing-wave patterns (rad).
    """

    lambda_mw: float
    reflection_r: float
    l: float
    z0: float
    signal_offset: float = 0.0

    def __post_init__(self):
        if not 0 <= self.reflection_r < 1:
            raise DomainError("CellGeometry.reflection_r must lie in [0, 1)")
        if not self.l > 0:
            raise DomainError("CellGeometry.l must be > 0")
        if not self.lambda_mw > 0:
            raise DomainError("CellGeometry.lambda_mw must be > 0")


def _normalized_absorption(detuning_hz, cfg: LadderConfig):
    """Im of the weak-probe susceptibility, normalized to 1 on the bare line.

    gamma_ge = gamma_e / 2 is the optical coherence decay; the coupling
    (and optionally microwave) ladder terms enter as nested shifts.
    """
    dc = TWO_PI * np.asarray(detuning_hz, dtype=float)
    g_ge = cfg.gamma_e / 2.0
    two_photon = cfg.gamma_r - 1j * (cfg.delta_p + dc)
    if cfg.omega_mw > 0:
        two_photon = two_photon + (cfg.omega_mw / 2) ** 2 / (
            cfg.gamma_rr - 1j * (cfg.delta_p + dc)
        )
    denom = g_ge - 1j * cfg.delta_p + (cfg.omega_c / 2) ** 2 / two_photon
    return g_ge * np.real(1.0 / denom)


def eit_transmission(detuning_hz, cfg: LadderConfig) -> EITSpectrum:
    """Beer-Lambert probe transmission exp(-OD * alpha) over a detuning grid.

    With ``omega_c`` = 0 the on-resonance transmission collapses to the
    2-level value exp(-od_per_mm * l).
    """
    grid = np.asarray(detuning_hz, dtype=float)
    if grid.size == 0:
        raise DomainError("detuning grid must be non-empty")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise DomainError("detuning grid must be strictly increasing")
    od = cfg.od_per_mm * cfg.l_mm
    transmission = np.exp(-od * _normalized_absorption(grid, cfg))
    base = float(np.exp(-od * _normalized_absorption(
        np.array([BASELINE_DETUNING_HZ]), cfg)[0]))
    spectrum = EITSpectrum(grid, transmission, base)
    if cfg.omega_mw == 0 and cfg.omega_c > 0:
        try:
            a_eit, fwhm = extract_amplitude_fwhm(spectrum)
        except ExtractionError:
            return spectrum
        return EITSpectrum(grid, transmission, base, a_eit, fwhm)
    return spectrum


def _cross(x0, y0, x1, y1, level):
    return x0 + (level - y0) / (y1 - y0) * (x1 - x0)


def extract_amplitude_fwhm(spectrum: EITSpectrum):
    """Peak contrast and full width at half maximum of an EIT spectrum.

    The contrast is measured relative to the baseline transmission,
    a_eit = T_peak / T_baseline - 1, mirroring the constant detector-power
    normalization used when the absorption path length varies.  The width
    comes from linear interpolation at half contrast.
    """
    t = spectrum.transmission
    x = spectrum.detuning_hz
    base = spectrum.baseline
    if base <= 0:
        raise ExtractionError("baseline transmission must be positive")
    contrast = t / base - 1.0
    i = int(np.argmax(contrast))
    a_eit = float(contrast[i])
    if a_eit <= 1e-12:
        raise ExtractionError("no peak above baseline")
    half = a_eit / 2.0
    left = np.where(contrast[:i] < half)[0]
    right_rel = np.where(contrast[i:] < half)[0]
    if left.size == 0 or right_rel.size == 0:
        raise ExtractionError("half-maximum level not crossed inside the grid")
    j = left[-1]
    k = i + right_rel[0]
    x_lo = _cross(x[j], contrast[j], x[j + 1], contrast[j + 1], half)
    x_hi = _cross(x[k - 1], contrast[k - 1], x[k], contrast[k], half)
    fwhm = float(x_hi - x_lo)
    if fwhm <= 0:
        raise ExtractionError("degenerate width")
    return a_eit, fwhm


def _refine_peak(x, y, i):
    # 3-point parabolic refinement of a grid maximum
    if i == 0 or i == len(y) - 1:
        return x[i]
    denom = y[i - 1] - 2 * y[i] + y[i + 1]
    if denom == 0:
        return x[i]
    return x[i] + 0.5 * (y[i - 1] - y[i + 1]) / denom * (x[1] - x[0])


def at_splitting(cfg: LadderConfig) -> float:
    """Peak-to-peak splitting (Hz) of the dressed transmission doublet.

    Equals omega_mw / 2pi in the strong-dressing regime.  Raises
    :class:`CalibrationError` when the doublet is unresolved.
    """
    if cfg.omega_mw <= 0:
        raise CalibrationError("microwave dressing field is off")
    if cfg.omega_mw < 5 * cfg.gamma_rr:
        raise CalibrationError(
            "dressing Rabi frequency below 5x the dressed-coherence decay")
    # peak pulling scales as gamma_r * gamma_rr / omega_mw^2; past this
    # threshold the splitting no longer tracks the Rabi frequency to 2%
    if cfg.omega_mw ** 2 < 50 * cfg.gamma_r * cfg.gamma_rr:
        raise CalibrationError(
            "dressing Rabi frequency below the doublet resolution threshold")
    span = 1.8 * cfg.omega_mw / TWO_PI
    grid = np.linspace(-span, span, 24001)
    t = np.exp(-cfg.od_per_mm * cfg.l_mm * _normalized_absorption(grid, cfg))
    mid = len(grid) // 2
    i_left = int(np.argmax(t[:mid]))
    i_right = mid + int(np.argmax(t[mid:]))
    t_valley = float(np.min(t[i_left:i_right + 1]))
    prominence = min(t[i_left], t[i_right]) - t_valley
    depth = min(t[i_left], t[i_right]) - float(np.min(t))
    if i_left == 0 or i_right == len(grid) - 1 or prominence <= 0.05 * depth:
        raise CalibrationError("dressed doublet unresolved at this Rabi frequency")
    x_left = _refine_peak(grid, t, i_left)
    x_right = _refine_peak(grid, t, i_right)
    return float(x_right - x_left)


def mw_field_profile(z, g: CellGeometry, e0: float, signal_pattern=False):
    """Scalar standing-wave field magnitude E(z) = e0 |1 + r exp(i 4 pi z / lambda)|."""
    z_arr = np.asarray(z, dtype=float)
    out = np.abs(_complex_profile(z_arr, g, signal_pattern)) * e0
    return float(out) if z_arr.ndim == 0 else out


def _complex_profile(z, g: CellGeometry, signal_pattern=False):
    phase = 4 * math.pi * np.asarray(z, dtype=float) / g.lambda_mw
    if signal_pattern:
        phase = phase + g.signal_offset
    return 1.0 + g.reflection_r * np.exp(1j * phase)


_PATH_POINTS = 4001


def path_average_field(l, g: CellGeometry, e0=1.0):
    """Path-averaged field magnitude over [z0, z0 + l]."""
    if not l > 0:
        raise DomainError("interaction length must be > 0")
    z = np.linspace(g.z0, g.z0 + l, _PATH_POINTS)
    return float(np.trapezoid(mw_field_profile(z, g, e0), z) / l)


def calibration_correction(l, g: CellGeometry, l_ref=None) -> float:
    """First-order power correction (dB) that keeps the path-averaged field
    constant: -20 log10(Ebar(l) / Ebar(l_ref)).  ``l_ref`` defaults to the
    geometry's reference length."""
    if l_ref is None:
        l_ref = g.l
    e_l = path_average_field(l, g)
    e_ref = path_average_field(l_ref, g)
    if e_l <= 0 or e_ref <= 0:
        raise DomainError("degenerate geometry: vanishing path-averaged field")
    return -20.0 * math.log10(e_l / e_ref)


def heterodyne_path_factor(l, g: CellGeometry) -> float:
    """Residual signal factor from standing-wave inhomogeneity, after the
    first-order power correction.

    The local beat contribution carries the signal pattern's amplitude and
    the phase difference between the signal and local patterns; the factor
    is the coherent path average of that phasor divided by the corrected
    mean local field.  It equals 1 for r = 0 and declines with length once
    the path accumulates pattern dephasing, which is what depresses the
    signal scaling beyond a quarter wavelength.
    """
    if not l > 0:
        raise DomainError("interaction length must be > 0")
    if g.reflection_r == 0:
        return 1.0
    z = np.linspace(g.z0, g.z0 + l, _PATH_POINTS)
    local = _complex_profile(z, g, signal_pattern=False)
    sig = _complex_profile(z, g, signal_pattern=True)
    response = np.abs(np.trapezoid(sig * np.exp(-1j * np.angle(local)), z) / l)
    mean_local = np.trapezoid(np.abs(local), z) / l
    return float(response / mean_local)


def conversion_gain(a_eit: float, fwhm: float, cal: float) -> float:
    """Intrinsic conversion gain kappa0 = cal * a_eit / fwhm."""
    if fwhm <= 0:
        raise DomainError("fwhm must be > 0")
    return cal * a_eit / fwhm
