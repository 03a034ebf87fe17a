"""Campaign configuration: sectioned key-value files, validation, defaults.

Angular frequencies are written in the ``<value> MHz_x2pi`` convention
(parsed to rad/s); level tables are comma-separated ``f_hz:dbm`` pairs
interpolated in log frequency.  An empty file yields the default campaign.
Unknown sections or keys are rejected.

The default decoherence rates, standing-wave geometry, and the two
calibration constants (``dbm_cal``, ``kappa_cal``) are frozen values tuned
once against the receiver's target spectra; they are phenomenological, not
first-principles numbers.
"""

import configparser
import io
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .atom_optics import CellGeometry, LadderConfig
from .errors import ConfigError, DomainError
from .receiver import FrequencyTable, NoiseBudget, SuperhetConfig
from .transit import AtomTransition, TransitParams, absorption_cross_section

TWO_PI = 2 * math.pi
SPEED_OF_LIGHT = 299792458.0


def _fmt(value):
    # repr round-trips float64 exactly, so dump(load(x)) == load(dump(..))
    return repr(float(value))


def format_rabi(rad_s):
    """rad/s -> '<MHz> MHz_x2pi'."""
    return f"{_fmt(rad_s / TWO_PI / 1e6)} MHz_x2pi"


def parse_rabi(text, field_name):
    """'<MHz> MHz_x2pi' -> rad/s."""
    parts = text.strip().split()
    if len(parts) != 2 or parts[1] != "MHz_x2pi":
        raise ConfigError("expected '<value> MHz_x2pi'", field=field_name)
    try:
        return TWO_PI * float(parts[0]) * 1e6
    except ValueError as exc:
        raise ConfigError(f"bad number {parts[0]!r}", field=field_name) from exc


def format_table(table: FrequencyTable):
    return ", ".join(f"{_fmt(f)}:{_fmt(d)}"
                     for f, d in zip(table.freqs_hz, table.levels_dbm))


def parse_table(text, field_name):
    freqs, levels = [], []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise ConfigError(f"expected 'f_hz:dbm' pair, got {chunk!r}",
                              field=field_name)
        f_s, d_s = chunk.split(":", 1)
        try:
            freqs.append(float(f_s))
            levels.append(float(d_s))
        except ValueError as exc:
            raise ConfigError(f"bad pair {chunk!r}", field=field_name) from exc
    if not freqs:
        raise ConfigError("empty table", field=field_name)
    try:
        return FrequencyTable(tuple(freqs), tuple(levels))
    except DomainError as exc:
        raise ConfigError(str(exc), field=field_name) from exc


def format_lengths(lengths):
    return ", ".join(_fmt(v) for v in lengths)


def parse_lengths(text, field_name):
    text = text.strip()
    if ":" in text and "," not in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("length sweep must be 'start:stop:count'",
                              field=field_name)
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ConfigError("bad sweep specification", field=field_name) from exc
        if count < 1:
            raise ConfigError("sweep count must be >= 1", field=field_name)
        if count == 1:
            return (start,)
        step = (stop - start) / (count - 1)
        return tuple(start + i * step for i in range(count))
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError("bad length list", field=field_name) from exc
    if not values:
        raise ConfigError("length sweep must be non-empty", field=field_name)
    return values


@dataclass(frozen=True)
class CampaignConfig:
    """Everything a campaign run needs; all physics values in SI."""

    lengths_mm: Tuple[float, ...] = (7.28, 8.405, 9.53, 10.655, 11.78,
                                     12.905, 14.03, 15.155, 16.28)
    f_start_hz: float = 10e3
    f_stop_hz: float = 100e3
    bin_hz: float = 1.0
    rbw_hz: float = 1.0
    n_avg: int = 400
    seeds: int = 5
    base_seed: int = 20230817
    section_width_hz: float = 1000.0

    # transit-noise physics
    diffusion_m2_s: float = 0.1
    omega_m: float = 1e-3
    i0_w_m2: float = 44.0
    n_a_m3: float = 4e16
    mu_cm: float = 2.697e-29
    line_freq_hz: float = 3.518e14
    natural_width: float = TWO_PI * 5.22e6

    # ladder optics (rates phenomenological, tuned to the 7.5 MHz width)
    probe_rabi: float = TWO_PI * 5.92e6
    coupling_rabi: float = TWO_PI * 0.26e6
    gamma_e: float = TWO_PI * 5.22e6
    gamma_r: float = TWO_PI * 3.8366e6
    gamma_rr: float = TWO_PI * 0.02e6
    od_per_mm: float = 0.3
    probe_detuning: float = 0.0

    # cell standing-wave geometry
    mw_freq_hz: float = 6.95e9
    reflection_r: float = 0.3
    z0_m: float = 0.007375
    signal_offset_rad: float = 0.9375
    l_ref_mm: float = 7.28

    # superhet drive and calibration
    local_rabi: float = TWO_PI * 7.75e6
    signal_rabi: float = TWO_PI * 0.10e6
    f_readout_hz: float = 55e3
    kappa_cal: float = 1.2007e-3
    dbm_cal: float = 74.6296

    # noise floors
    shot_floor_dbm: Optional[float] = -113.68
    probe_floor: Optional[FrequencyTable] = FrequencyTable(
        (10e3, 100e3), (-115.0, -126.0))
    residual: Optional[FrequencyTable] = FrequencyTable(
        (10e3, 100e3), (-114.5, -121.3))
    projection_floor: float = 4.495966458017e-21

    def __post_init__(self):
        if not self.lengths_mm:
            raise ConfigError("length sweep must be non-empty",
                              field="campaign.lengths_mm")
        if any(l <= 0 for l in self.lengths_mm):
            raise ConfigError("lengths must be > 0", field="campaign.lengths_mm")
        if self.seeds < 1:
            raise ConfigError("seeds must be >= 1", field="campaign.seeds")
        if not 0 < self.f_start_hz < self.f_stop_hz:
            raise ConfigError("need 0 < f_start_hz < f_stop_hz",
                              field="campaign.f_start_hz")
        for name, field_path in (
            ("bin_hz", "campaign.bin_hz"), ("rbw_hz", "campaign.rbw_hz"),
            ("section_width_hz", "campaign.section_width_hz"),
            ("diffusion_m2_s", "transit.D"), ("omega_m", "transit.omega"),
            ("i0_w_m2", "transit.i0"), ("line_freq_hz", "transit.line_freq_hz"),
            ("natural_width", "transit.natural_width"),
            ("mw_freq_hz", "cell.mw_freq_hz"), ("l_ref_mm", "cell.l_ref_mm"),
            ("f_readout_hz", "superhet.f_readout_hz"),
        ):
            if not getattr(self, name) > 0:
                raise ConfigError("must be > 0", field=field_path)
        if self.n_a_m3 < 0:
            raise ConfigError("must be >= 0", field="transit.n_a")
        if self.n_avg < 1:
            raise ConfigError("n_avg must be >= 1", field="campaign.n_avg")
        if not 0 <= self.reflection_r < 1:
            raise ConfigError("must lie in [0, 1)", field="cell.reflection_r")
        if self.projection_floor < 0:
            raise ConfigError("must be >= 0", field="budget.projection_floor")

    # -- derived pieces ----------------------------------------------------

    def sigma0(self):
        return absorption_cross_section(
            AtomTransition(self.mu_cm, self.line_freq_hz, self.natural_width))

    def transit_for(self, l_mm) -> TransitParams:
        return TransitParams(D=self.diffusion_m2_s, omega=self.omega_m,
                             i0=self.i0_w_m2, n_a=self.n_a_m3,
                             l=l_mm * 1e-3, sigma0=self.sigma0())

    def ladder_for(self, l_mm, omega_mw=0.0) -> LadderConfig:
        return LadderConfig(
            omega_p=self.probe_rabi, omega_c=self.coupling_rabi,
            gamma_e=self.gamma_e, gamma_r=self.gamma_r,
            od_per_mm=self.od_per_mm, l_mm=l_mm,
            delta_p=self.probe_detuning, omega_mw=omega_mw,
            gamma_rr=self.gamma_rr)

    def cell_geometry(self, ideal=False) -> CellGeometry:
        return CellGeometry(
            lambda_mw=SPEED_OF_LIGHT / self.mw_freq_hz,
            reflection_r=0.0 if ideal else self.reflection_r,
            l=self.l_ref_mm * 1e-3, z0=self.z0_m,
            signal_offset=self.signal_offset_rad)

    def budget_for(self, l_mm, ideal=False) -> NoiseBudget:
        return NoiseBudget(
            transit=self.transit_for(l_mm),
            projection_floor=self.projection_floor,
            probe_laser=None if ideal else self.probe_floor,
            shot_floor_dbm=None if ideal else self.shot_floor_dbm,
            residual=None if ideal else self.residual,
            dbm_cal=self.dbm_cal)

    def superhet_for(self, kappa0) -> SuperhetConfig:
        return SuperhetConfig(
            omega_local=self.local_rabi, omega_sig=self.signal_rabi,
            f_readout=self.f_readout_hz, kappa0=kappa0, dbm_cal=self.dbm_cal)

    def frequency_grid(self):
        import numpy as np

        n = int(round((self.f_stop_hz - self.f_start_hz) / self.bin_hz)) + 1
        return self.f_start_hz + np.arange(n) * self.bin_hz

    def seed_list(self):
        return [self.base_seed + i for i in range(self.seeds)]


# schema: section -> key -> (parse, format, attribute)
_SCHEMA = {
    "campaign": {
        "lengths_mm": ("lengths", "lengths_mm"),
        "f_start_hz": ("float", "f_start_hz"),
        "f_stop_hz": ("float", "f_stop_hz"),
        "bin_hz": ("float", "bin_hz"),
        "rbw_hz": ("float", "rbw_hz"),
        "n_avg": ("int", "n_avg"),
        "seeds": ("int", "seeds"),
        "base_seed": ("int", "base_seed"),
        "section_width_hz": ("float", "section_width_hz"),
    },
    "transit": {
        "d_m2_s": ("float", "diffusion_m2_s"),
        "omega_m": ("float", "omega_m"),
        "i0_w_m2": ("float", "i0_w_m2"),
        "n_a_m3": ("float", "n_a_m3"),
        "mu_cm": ("float", "mu_cm"),
        "line_freq_hz": ("float", "line_freq_hz"),
        "natural_width": ("rabi", "natural_width"),
    },
    "ladder": {
        "probe_rabi": ("rabi", "probe_rabi"),
        "coupling_rabi": ("rabi", "coupling_rabi"),
        "gamma_e": ("rabi", "gamma_e"),
        "gamma_r": ("rabi", "gamma_r"),
        "gamma_rr": ("rabi", "gamma_rr"),
        "od_per_mm": ("float", "od_per_mm"),
        "probe_detuning": ("rabi", "probe_detuning"),
    },
    "cell": {
        "mw_freq_hz": ("float", "mw_freq_hz"),
        "reflection_r": ("float", "reflection_r"),
        "z0_m": ("float", "z0_m"),
        "signal_offset_rad": ("float", "signal_offset_rad"),
        "l_ref_mm": ("float", "l_ref_mm"),
    },
    "superhet": {
        "local_rabi": ("rabi", "local_rabi"),
        "signal_rabi": ("rabi", "signal_rabi"),
        "f_readout_hz": ("float", "f_readout_hz"),
        "kappa_cal": ("float", "kappa_cal"),
        "dbm_cal": ("float", "dbm_cal"),
    },
    "budget": {
        "shot_floor_dbm": ("optional_float", "shot_floor_dbm"),
        "probe_floor_dbm": ("optional_table", "probe_floor"),
        "residual_dbm": ("optional_table", "residual"),
        "projection_floor": ("float", "projection_floor"),
    },
}


def _parse_value(kind, text, field_name):
    text = text.strip()
    if kind == "float":
        try:
            return float(text)
        except ValueError as exc:
            raise ConfigError(f"bad number {text!r}", field=field_name) from exc
    if kind == "int":
        try:
            return int(text)
        except ValueError as exc:
            raise ConfigError(f"bad integer {text!r}", field=field_name) from exc
    if kind == "rabi":
        return parse_rabi(text, field_name)
    if kind == "lengths":
        return parse_lengths(text, field_name)
    if kind == "optional_float":
        if text.lower() in ("off", "none", ""):
            return None
        try:
            return float(text)
        except ValueError as exc:
            raise ConfigError(f"bad number {text!r}", field=field_name) from exc
    if kind == "optional_table":
        if text.lower() in ("off", "none", ""):
            return None
        return parse_table(text, field_name)
    raise AssertionError(kind)


def _format_value(kind, value):
    if kind == "float":
        return _fmt(value)
    if kind == "int":
        return str(int(value))
    if kind == "rabi":
        return format_rabi(value)
    if kind == "lengths":
        return format_lengths(value)
    if kind == "optional_float":
        return "off" if value is None else _fmt(value)
    if kind == "optional_table":
        return "off" if value is None else format_table(value)
    raise AssertionError(kind)


def load_config_text(text) -> CampaignConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        if line is None and getattr(exc, "errors", None):
            line = exc.errors[0][0]
        raise ConfigError(f"parse error: {exc.message.splitlines()[0]}",
                          line=line) from exc
    overrides = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", field=section)
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError("unknown key", field=f"{section}.{key}")
            kind, attr = _SCHEMA[section][key]
            overrides[attr] = _parse_value(kind, raw, f"{section}.{key}")
    return CampaignConfig(**overrides)


def load_config(path) -> CampaignConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    return load_config_text(text)


def dump_config(cfg: CampaignConfig) -> str:
    out = io.StringIO()
    for section, keys in _SCHEMA.items():
        out.write(f"[{section}]\n")
        for key, (kind, attr) in keys.items():
            out.write(f"{key} = {_format_value(kind, getattr(cfg, attr))}\n")
        out.write("\n")
    return out.getvalue()


def configs_equivalent(a: CampaignConfig, b: CampaignConfig, rel=1e-12) -> bool:
    """Semantic equality: every field equal to within ``rel`` (unit
    conversions in the text format cost a last-place digit)."""

    def close(x, y):
        if x is None or y is None:
            return x is y
        if isinstance(x, FrequencyTable):
            return (close(x.freqs_hz, y.freqs_hz)
                    and close(x.levels_dbm, y.levels_dbm))
        if isinstance(x, tuple):
            return len(x) == len(y) and all(close(u, v) for u, v in zip(x, y))
        if isinstance(x, float):
            return math.isclose(x, y, rel_tol=rel, abs_tol=1e-300)
        return x == y

    return all(close(getattr(a, f), getattr(b, f))
               for f in a.__dataclass_fields__)


DEFAULT_CONFIG = CampaignConfig()
