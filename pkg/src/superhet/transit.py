"""Transit-noise power spectral density of atoms diffusing through a beam.

Closed form, an independent oscillatory-quadrature oracle, the in-band and
out-of-band asymptotes, and the resonant absorption cross-section.

PSD values are in model units (intensity^2 per Hz); conversion to dBm
happens in :mod:`superhet.receiver` through a calibration constant.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels, specfun
from .errors import DomainError, NumericalError

HBAR = 1.054571817e-34        # J s
SPEED_OF_LIGHT = 299792458.0  # m/s
EPSILON_0 = 8.8541878128e-12  # F/m


@dataclass(frozen=True)
class AtomTransition:
    """Resonant optical transition: dipole moment (C m), line frequency (Hz),
    natural width (rad/s)."""

    mu: float
    f_l: float
    gamma: float

    def __post_init__(self):
        if not (self.mu >= 0 and math.isfinite(self.mu)):
            raise DomainError("AtomTransition.mu must be >= 0")
        if not (self.f_l > 0 and math.isfinite(self.f_l)):
            raise DomainError("AtomTransition.f_l must be > 0")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise DomainError("AtomTransition.gamma must be > 0")


@dataclass(frozen=True)
class TransitParams:
    """Physical inputs of the transit-noise spectrum.

    D: diffusion constant (m^2/s); omega: beam radius (m); i0: peak beam
    intensity (W/m^2); n_a: atom number density (m^-3, 0 allowed for the
    empty cell); l: interaction length (m); sigma0: absorption
    cross-section (m^2).
    """

    D: float
    omega: float
    i0: float
    n_a: float
    l: float
    sigma0: float

    def __post_init__(self):
        for name in ("D", "omega", "i0", "l", "sigma0"):
            val = getattr(self, name)
            if not (val > 0 and math.isfinite(val)):
                raise DomainError(f"TransitParams.{name} must be > 0")
        if not (self.n_a >= 0 and math.isfinite(self.n_a)):
            raise DomainError("TransitParams.n_a must be >= 0")

    def atom_number(self):
        """N_a = n_a * pi * omega^2 * l."""
        return self.n_a * math.pi * self.omega ** 2 * self.l

    def scaled(self, **changes):
        fields = {k: getattr(self, k) for k in ("D", "omega", "i0", "n_a", "l", "sigma0")}
        fields.update(changes)
        return TransitParams(**fields)


class AsymptoteResult(NamedTuple):
    """Asymptotic amplitude plus a flag telling whether the queried
    frequency lies inside the asymptote's validity regime."""

    value: float
    in_regime: bool


def absorption_cross_section(t: AtomTransition) -> float:
    """sigma0 = 4 pi mu^2 f_l / (hbar c eps0 Gamma); exactly quadratic in mu."""
    return 4 * math.pi * t.mu ** 2 * t.f_l / (HBAR * SPEED_OF_LIGHT * EPSILON_0 * t.gamma)


def phi_of(f, p: TransitParams):
    """Dimensionless frequency phi = 2 pi f omega^2 / (4 D)."""
    f_arr = np.asarray(f, dtype=float)
    if np.any(np.atleast_1d(f_arr) <= 0) or not np.all(np.isfinite(np.atleast_1d(f_arr))):
        raise DomainError("read-out frequency must be > 0 and finite")
    out = 2 * math.pi * f_arr * p.omega ** 2 / (4 * p.D)
    return float(out) if f_arr.ndim == 0 else out


def _bracket(phi_flat):
    """B(phi) = -2 cos(phi) Ci(phi) + sin(phi) [pi - 2 Si(phi)].

    Above the series/auxiliary crossover B equals 2 g(phi) identically,
    which avoids the large-phi cancellation between the two terms.
    """
    out = np.empty_like(phi_flat)
    small = phi_flat < _kernels.PHI_CROSSOVER
    if np.any(small):
        si, ci = _kernels.sici_arrays(phi_flat[small])
        ph = phi_flat[small]
        out[small] = -2 * np.cos(ph) * ci + np.sin(ph) * (np.pi - 2 * si)
    if np.any(~small):
        _, g = _kernels.aux_fg_arrays(phi_flat[~small])
        out[~small] = 2 * g
    return out


def transit_psd_closed(f, p: TransitParams):
    """Closed-form transit-noise PSD,
    P(f) = I0^2 sigma0^2 N_a phi / (8 pi f) * B(phi); linear in N_a."""
    f_arr = np.asarray(f, dtype=float)
    phi = phi_of(f, p)
    phi_flat = np.atleast_1d(np.asarray(phi, dtype=float))
    bracket = _bracket(phi_flat)
    pref = p.i0 ** 2 * p.sigma0 ** 2 * p.atom_number() * phi_flat \
        / (8 * math.pi * np.atleast_1d(f_arr))
    out = pref * bracket
    return float(out[0]) if f_arr.ndim == 0 else out


def transit_psd_quadrature(f, p: TransitParams, tol=1e-9, max_panels=400):
    """Quadrature oracle: direct evaluation of the Fourier integral
    (pi/4) n_a l I0^2 omega^2 sigma0^2 * (2/a) * integral_0^inf cos(phi u)/(1+u) du
    with a = 4 D / omega^2, by adaptive half-period panels with
    repeated-averaging acceleration of the alternating partial sums."""
    if not (1e-12 < tol < 1e-3):
        raise DomainError("tol must lie in (1e-12, 1e-3)")
    f = float(f)
    phi = phi_of(f, p)
    value, est, converged, _ = _kernels.cos_tail_integral(phi, tol, max_panels)
    if not converged:
        raise NumericalError(
            f"oscillatory quadrature did not converge at phi={phi:.4g}",
            estimate=est,
        )
    a = 4 * p.D / p.omega ** 2
    pref = (math.pi / 4) * p.n_a * p.l * p.i0 ** 2 * p.omega ** 2 * p.sigma0 ** 2
    return pref * (2.0 / a) * value


IN_BAND_PHI_MAX = 1e-2
OUT_OF_BAND_PHI_MIN = 1e2


def in_band_amplitude(f, p: TransitParams) -> AsymptoteResult:
    """Low-frequency asymptotic noise amplitude (square root of the PSD).

    Implemented from the phi -> 0 expansion of the closed form,
    A = (I0 sigma0 omega / 2) sqrt(N_a |ln(phi) + gamma| / (2 D)),
    which grows ~ omega^2 at fixed n_a and l.
    """
    phi = float(phi_of(float(f), p))
    log_factor = abs(math.log(phi) + specfun.EULER_GAMMA)
    value = (p.i0 * p.sigma0 * p.omega / 2) * math.sqrt(
        p.atom_number() * log_factor / (2 * p.D)
    )
    return AsymptoteResult(value, phi < IN_BAND_PHI_MAX)


def out_of_band_amplitude(f, p: TransitParams) -> AsymptoteResult:
    """High-frequency asymptotic noise amplitude,
    A = sqrt(D N_a / 2) I0 sigma0 / (pi f omega), an exact 1/f law that is
    independent of the beam radius at fixed n_a * l."""
    f = float(f)
    phi = float(phi_of(f, p))
    value = math.sqrt(p.D * p.atom_number() / 2) * p.i0 * p.sigma0 \
        / (math.pi * f * p.omega)
    return AsymptoteResult(value, phi > OUT_OF_BAND_PHI_MIN)


def out_of_band_amplitude_density_form(f, p: TransitParams) -> float:
    """Algebraically identical variant sqrt(D n_a l / (2 pi)) I0 sigma0 / f,
    kept for the beam-radius-independence cross-check."""
    return math.sqrt(p.D * p.n_a * p.l / (2 * math.pi)) * p.i0 * p.sigma0 / float(f)
