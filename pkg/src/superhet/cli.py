"""Command-line surface.

Subcommands: specfun, psd, eit, atcal, synth, fit, scaling, sensitivity,
campaign.  Exit codes: 0 success, 2 config error, 3 numerical/fit error,
4 I/O error.
"""

import argparse
import sys

import numpy as np

from . import campaign as campaign_mod
from . import synthfit
from .atom_optics import at_splitting, calibration_correction, eit_transmission
from .config import DEFAULT_CONFIG, dump_config, load_config
from .errors import (CalibrationError, ConfigError, DomainError,
                     ExtractionError, FitError, NumericalError, SuperhetError)
from .receiver import (effective_signal_power, rabi_from_power,
                       total_noise_power)
from .specfun import grid_table
from .transit import (in_band_amplitude, out_of_band_amplitude, phi_of,
                      transit_psd_closed, transit_psd_quadrature)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _load(args):
    if args.config:
        return load_config(args.config)
    return DEFAULT_CONFIG


def _emit(args, header, rows):
    path = args.out
    if path and path != "-":
        campaign_mod.write_csv(path, header, rows)
        print(f"wrote {path}")
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(campaign_mod._fmt(v) for v in row))


def cmd_specfun(args):
    phi, si, ci = grid_table(args.start, args.stop, args.points,
                             log_spacing=not args.linear)
    _emit(args, ["phi", "si", "ci"], list(zip(phi, si, ci)))


def cmd_psd(args):
    cfg = _load(args)
    p = cfg.transit_for(args.l_mm)
    if args.linear:
        freqs = np.linspace(args.f_start, args.f_stop, args.points)
    else:
        freqs = np.geomspace(args.f_start, args.f_stop, args.points)
    rows = []
    for f in freqs:
        f = float(f)
        closed = transit_psd_closed(f, p)
        quad = transit_psd_quadrature(f, p, args.tol) if args.oracle else None
        rows.append((f, phi_of(f, p), closed, quad,
                     in_band_amplitude(f, p).value,
                     out_of_band_amplitude(f, p).value))
    _emit(args, ["f_hz", "phi", "psd_closed", "psd_quadrature",
                 "inband_asym", "outband_asym"], rows)


def cmd_eit(args):
    cfg = _load(args)
    grid = np.linspace(-args.span_hz, args.span_hz, args.points)
    spec = eit_transmission(grid, cfg.ladder_for(args.l_mm, omega_mw=args.mw_rabi))
    _emit(args, ["detuning_hz", "transmission"],
          list(zip(spec.detuning_hz, spec.transmission)))


def cmd_atcal(args):
    cfg = _load(args)
    rows = campaign_mod.run_atcal_sweep(cfg)
    _emit(args, ["l_mm", "splitting_hz", "correction_db"], rows)


def cmd_synth(args):
    cfg = _load(args)
    budget = cfg.budget_for(args.l_mm, ideal=args.ideal)
    grid = cfg.frequency_grid()
    spec = synthfit.synthesize_nps(budget, grid, cfg.rbw_hz, cfg.n_avg,
                                   args.seed, include_atoms=not args.probe_only)
    _emit(args, ["f_hz", "p_dbm", "flagged"],
          list(zip(spec.freqs, spec.power_dbm, spec.flagged)))


def cmd_fit(args):
    points = []
    with open(args.points, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header[:2] != ["n_a_linear", "p_linear"]:
            raise ConfigError("fit input needs columns n_a_linear,p_linear",
                              field=args.points)
        for line in fh:
            if line.strip():
                n, p = line.strip().split(",")[:2]
                points.append((float(n), float(p)))
    fit = synthfit.fit_power_law(points,
                                 None if args.free_kappa else args.kappa)
    _emit(args, ["a_linear", "p_n0_linear", "kappa", "stderr_a",
                 "stderr_p_n0", "stderr_kappa", "p_n0_clamped"],
          [(fit.a_coeff, fit.p_n0, fit.kappa, fit.stderr_a, fit.stderr_p_n0,
            fit.stderr_kappa, fit.p_n0_clamped)])


def cmd_scaling(args):
    cfg = _load(args)
    rows = []
    with open(args.points, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header[:2] != ["l_mm", "p_dbm"]:
            raise ConfigError("scaling input needs columns l_mm,p_dbm",
                              field=args.points)
        for line in fh:
            if line.strip():
                l_s, p_s = line.strip().split(",")[:2]
                rows.append((float(l_s), float(p_s)))
    lengths = np.array([r[0] for r in rows])
    p_dbm = np.array([r[1] for r in rows])
    threshold = campaign_mod.lambda_quarter_threshold_db(cfg.mw_freq_hz)
    if args.split:
        fits = synthfit.fit_scaling_regimes(lengths, p_dbm, threshold)
    else:
        fits = [synthfit.fit_db_slope(synthfit.relative_atom_number(lengths),
                                      p_dbm)]
    _emit(args, ["regime", "slope", "intercept", "r2"],
          [(f.regime, f.slope, f.intercept, f.r_squared) for f in fits])


def cmd_sensitivity(args):
    cfg = _load(args)
    optics = campaign_mod.run_eit_sweep(cfg)
    geom = cfg.cell_geometry(ideal=args.ideal)
    rows = []
    for o in optics:
        sh = cfg.superhet_for(o.kappa0)
        budget = cfg.budget_for(o.l_mm, ideal=args.ideal)
        p_s = effective_signal_power(o.l_mm * 1e-3, geom, sh)
        p_na = total_noise_power(cfg.f_readout_hz, budget, cfg.rbw_hz)
        rows.append((o.l_mm, synthfit.relative_atom_number(o.l_mm), p_s, p_na,
                     None if p_s is None else p_s - p_na,
                     rabi_from_power(p_na, sh)))
    _emit(args, ["l_mm", "n_a_db", "p_s_dbm", "p_na_dbm", "snr_db",
                 "min_rabi_rad_s"], rows)


def cmd_campaign(args):
    cfg = _load(args)
    if args.seed is not None:
        from dataclasses import replace
        cfg = replace(cfg, base_seed=args.seed)
    out_dir = args.out or "campaign_out"
    result = campaign_mod.run_campaign(cfg, out_dir)
    print(f"campaign written to {result.out_dir}")
    for row in result.scaling:
        print(f"  {row['scenario']:8s} {row['metric']:6s} {row['regime']:5s} "
              f"slope={row['slope']:.4f} r2={row['r_squared']:.6f}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="superhet",
        description="Atomic superheterodyne receiver simulator")
    parser.add_argument("--config", help="campaign config file (INI)")
    parser.add_argument("--out", help="output CSV file or directory")
    parser.add_argument("--seed", type=int, help="override the base seed")
    parser.add_argument("--format", choices=["csv"], default="csv",
                        help="output format (CSV only)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("specfun", help="tabulate Si/Ci on a grid")
    p.add_argument("--start", type=float, default=1e-3)
    p.add_argument("--stop", type=float, default=1e3)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--linear", action="store_true", help="linear grid spacing")
    p.set_defaults(func=cmd_specfun)

    p = sub.add_parser("psd", help="transit-noise spectral density")
    p.add_argument("--f-start", type=float, default=1e3)
    p.add_argument("--f-stop", type=float, default=1e6)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--linear", action="store_true")
    p.add_argument("--l-mm", type=float, default=1.0)
    p.add_argument("--oracle", action="store_true",
                   help="also evaluate the quadrature oracle")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_psd)

    p = sub.add_parser("eit", help="EIT / A-T transmission spectrum")
    p.add_argument("--l-mm", type=float, default=11.78)
    p.add_argument("--span-hz", type=float, default=25e6)
    p.add_argument("--points", type=int, default=2501)
    p.add_argument("--mw-rabi", type=float, default=0.0,
                   help="dressing Rabi frequency (rad/s)")
    p.set_defaults(func=cmd_eit)

    p = sub.add_parser("atcal", help="A-T calibration sweep")
    p.set_defaults(func=cmd_atcal)

    p = sub.add_parser("synth", help="synthesize a noise power spectrum")
    p.add_argument("--l-mm", type=float, default=11.78)
    p.add_argument("--probe-only", action="store_true")
    p.add_argument("--ideal", action="store_true")
    p.set_defaults(func=cmd_synth, seed=0)

    p = sub.add_parser("fit", help="power-law fit of (n_a_linear, p_linear) CSV")
    p.add_argument("points")
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--free-kappa", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("scaling", help="dB-domain slope fit of (l_mm, p_dbm) CSV")
    p.add_argument("points")
    p.add_argument("--split", action="store_true",
                   help="fit below/above the lambda/4 threshold separately")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("sensitivity", help="signal, noise, SNR, min Rabi vs length")
    p.add_argument("--ideal", action="store_true")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("campaign", help="run the full campaign into a directory")
    p.set_defaults(func=cmd_campaign)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
        return EXIT_OK if code is None else code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, FitError, NumericalError, ExtractionError,
            CalibrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SuperhetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
