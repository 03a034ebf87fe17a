"""Superheterodyne measurement equation, noise budget, SNR and sensitivity.

The conversion gain kappa0 maps the signal Rabi amplitude to the optical
read-out amplitude; the spectrum analyzer reports the squared amplitude,
so doubling the Rabi frequency raises the read-out power by 6.02 dB and a
gain proportional to atom number gives a dB-power slope of exactly 1
against the amplitude-convention atom-number axis 20*log10(l).

Powers convert to dBm through a single calibration offset ``dbm_cal``
(dBm = 10 log10(model power) + dbm_cal).  A zero-signal power is the
explicit absent value ``None``, never a float infinity.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .atom_optics import CellGeometry, calibration_correction, heterodyne_path_factor
from .errors import DomainError
from .transit import TransitParams, transit_psd_closed


def dbm_from_linear(power, dbm_cal=0.0):
    if power is None or power <= 0:
        return None
    return 10.0 * math.log10(power) + dbm_cal


def linear_from_dbm(dbm, dbm_cal=0.0):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - dbm_cal) / 10.0)


@dataclass(frozen=True)
class FrequencyTable:
    """Piecewise level table in dBm, interpolated linearly in log10(f) and
    clamped at the ends."""

    freqs_hz: Tuple[float, ...]
    levels_dbm: Tuple[float, ...]

    def __post_init__(self):
        if len(self.freqs_hz) != len(self.levels_dbm) or len(self.freqs_hz) == 0:
            raise DomainError("frequency table needs matching non-empty columns")
        if any(f <= 0 for f in self.freqs_hz):
            raise DomainError("table frequencies must be > 0")
        if list(self.freqs_hz) != sorted(self.freqs_hz):
            raise DomainError("table frequencies must be increasing")

    def level_dbm(self, f):
        f_arr = np.asarray(f, dtype=float)
        out = np.interp(np.log10(f_arr),
                        np.log10(np.asarray(self.freqs_hz)),
                        np.asarray(self.levels_dbm))
        return float(out) if f_arr.ndim == 0 else out


@dataclass(frozen=True)
class SuperhetConfig:
    """Local/signal microwave drive and the read-out calibration.

    ``kappa0`` converts Rabi amplitude (rad/s) to read-out amplitude in
    model units; ``dbm_cal`` maps model power onto dBm.
    """

    omega_local: float
    omega_sig: float
    f_readout: float
    kappa0: float
    dbm_cal: float

    def __post_init__(self):
        if not self.f_readout > 0:
            raise DomainError("SuperhetConfig.f_readout must be > 0")
        if self.kappa0 < 0:
            raise DomainError("SuperhetConfig.kappa0 must be >= 0")


@dataclass(frozen=True)
class NoiseBudget:
    """Composite read-out noise model.

    ``transit`` drives the frequency-dependent atomic term; ``projection_floor``
    is a flat per-unit-length PSD in model units (scaled by l in mm);
    ``probe_laser`` and ``shot_floor_dbm`` make up the atom-free probe
    reference; ``residual`` is superhet-side system noise that survives the
    probe subtraction and shows up as the fitted constant term.
    """

    transit: Optional[TransitParams]
    projection_floor: float
    probe_laser: Optional[FrequencyTable]
    shot_floor_dbm: Optional[float]
    residual: Optional[FrequencyTable]
    dbm_cal: float

    def __post_init__(self):
        if self.projection_floor < 0:
            raise DomainError("projection_floor must be >= 0")

    def atomic_power(self, f, rbw):
        """Transit + projection power (model units) in one resolution bandwidth.
        Accepts scalar or array frequencies."""
        f_arr = np.asarray(f, dtype=float)
        total = np.zeros_like(f_arr)
        if self.transit is not None and self.transit.n_a > 0:
            total = total + transit_psd_closed(f_arr, self.transit) * rbw
            total = total + self.projection_floor * (self.transit.l * 1e3) * rbw
        return float(total) if f_arr.ndim == 0 else total

    def probe_power(self, f):
        """Probe-reference power (model units): technical floor plus shot floor."""
        f_arr = np.asarray(f, dtype=float)
        total = np.zeros_like(f_arr)
        if self.probe_laser is not None:
            total = total + linear_from_dbm(self.probe_laser.level_dbm(f_arr), self.dbm_cal)
        if self.shot_floor_dbm is not None:
            total = total + linear_from_dbm(self.shot_floor_dbm, self.dbm_cal)
        return float(total) if f_arr.ndim == 0 else total

    def residual_power(self, f):
        f_arr = np.asarray(f, dtype=float)
        if self.residual is None:
            out = np.zeros_like(f_arr)
        else:
            out = linear_from_dbm(self.residual.level_dbm(f_arr), self.dbm_cal)
        return float(out) if f_arr.ndim == 0 else out

    def total_power(self, f, rbw):
        return self.atomic_power(f, rbw) + self.probe_power(f) + self.residual_power(f)


def rabi_from_power(p_readout_dbm, cfg: SuperhetConfig) -> float:
    """Invert the measurement equation: the signal Rabi amplitude whose
    read-out lands at ``p_readout_dbm``."""
    if cfg.kappa0 == 0:
        raise DomainError("degenerate conversion gain kappa0 = 0")
    if p_readout_dbm is None:
        return 0.0
    amplitude = math.sqrt(linear_from_dbm(p_readout_dbm, cfg.dbm_cal))
    return amplitude / cfg.kappa0


def signal_power(omega_sig, cfg: SuperhetConfig) -> Optional[float]:
    """Read-out power (dBm) of a signal with Rabi amplitude ``omega_sig``;
    ``None`` marks the absent-signal case."""
    if omega_sig < 0:
        raise DomainError("omega_sig must be >= 0")
    if omega_sig == 0 or cfg.kappa0 == 0:
        return None
    amplitude = cfg.kappa0 * omega_sig
    return dbm_from_linear(amplitude ** 2, cfg.dbm_cal)


def total_noise_power(f, budget: NoiseBudget, rbw) -> float:
    """Total read-out noise (dBm) in one resolution bandwidth: linear sum of
    transit PSD*rbw, projection floor*rbw, probe floor, shot floor, and the
    residual system term."""
    if not f > 0:
        raise DomainError("f must be > 0")
    if not rbw > 0:
        raise DomainError("rbw must be > 0")
    return dbm_from_linear(budget.total_power(f, rbw), budget.dbm_cal)


def effective_signal_power(l, g: Optional[CellGeometry], cfg: SuperhetConfig) -> Optional[float]:
    """Signal power (dBm) including the standing-wave inhomogeneity residual.

    The first-order power correction is assumed applied (it holds the
    path-averaged field constant); what remains is the coherent path
    average of the beat phasor.  With ``g`` absent or r = 0 this equals
    :func:`signal_power` exactly.
    """
    base = signal_power(cfg.omega_sig, cfg)
    if base is None:
        return None
    if g is None or g.reflection_r == 0:
        return base
    factor = heterodyne_path_factor(l, g)
    return base + 20.0 * math.log10(factor)


def snr_and_sensitivity(cfg: SuperhetConfig, budget: NoiseBudget, l, f,
                        g: Optional[CellGeometry] = None, rbw=1.0):
    """(SNR in dB, minimum detectable Rabi amplitude in rad/s) at length ``l``
    and read-out frequency ``f``."""
    p_s = effective_signal_power(l, g, cfg)
    p_na = total_noise_power(f, budget, rbw)
    snr = None if p_s is None else p_s - p_na
    return snr, rabi_from_power(p_na, cfg)


def lambda_quarter_threshold_db(f_mw_hz) -> float:
    """Atom-number axis value (dB re 1 mm) where the interaction length
    crosses a quarter of the microwave wavelength."""
    lam = 299792458.0 / float(f_mw_hz)
    return 20.0 * math.log10(lam / 4 * 1e3)


def apply_power_correction(e0, l, g: CellGeometry, l_ref=None) -> float:
    """Field amplitude after the first-order power correction; the
    path-averaged field of the corrected profile is length-independent."""
    corr_db = calibration_correction(l, g, l_ref)
    return e0 * 10.0 ** (corr_db / 20.0)
