"""Campaign orchestration: sweep interaction lengths and seeds, synthesize
and reduce noise spectra, fit scaling laws, and emit a deterministic CSV
tree with a hashed manifest.

Two scenarios run side by side: ``ideal`` (no standing wave, atomic noise
only) and ``nonideal`` (shot/probe/residual floors plus the standing-wave
signal reduction).  Workers fan out over (length, seed) pairs when
``SUPERHET_WORKERS`` > 1; all files are written by the parent process in a
fixed order so output trees are byte-identical for identical configs.
"""

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from . import __version__
from .atom_optics import at_splitting, calibration_correction, eit_transmission, path_average_field
from .config import CampaignConfig, dump_config
from .errors import SuperhetError
from .receiver import (effective_signal_power, lambda_quarter_threshold_db,
                       rabi_from_power, signal_power, total_noise_power)
from .synthfit import (NoiseSpectrum, SectionFitRow, a_and_pn0_vs_frequency,
                       fit_db_slope, fit_power_law, relative_atom_number,
                       section_average, split_by_threshold, subtract_probe_noise,
                       synthesize_nps)

_EIT_GRID = np.linspace(-25e6, 25e6, 2501)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return ""
    return format(v, ".12g")


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _child_seed(base_seed, *key):
    return int(np.random.SeedSequence((base_seed,) + tuple(key)).generate_state(1)[0])


def _l_tag(l_mm):
    return f"l{l_mm:06.3f}mm"


@dataclass
class LengthOptics:
    l_mm: float
    a_eit: float
    fwhm_hz: float
    kappa0: float
    spectrum_transmission: np.ndarray


def run_eit_sweep(cfg: CampaignConfig) -> List[LengthOptics]:
    out = []
    for l_mm in cfg.lengths_mm:
        spec = eit_transmission(_EIT_GRID, cfg.ladder_for(l_mm))
        kappa0 = cfg.kappa_cal * spec.a_eit / spec.fwhm
        out.append(LengthOptics(l_mm, spec.a_eit, spec.fwhm, kappa0,
                                spec.transmission))
    return out


def run_atcal_sweep(cfg: CampaignConfig):
    """Measured A-T splitting of the uncorrected local field, and the
    first-order power correction, per interaction length."""
    geom = cfg.cell_geometry()
    e_ref = path_average_field(cfg.l_ref_mm * 1e-3, geom)
    rows = []
    for l_mm in cfg.lengths_mm:
        scale = path_average_field(l_mm * 1e-3, geom) / e_ref
        ladder = cfg.ladder_for(l_mm, omega_mw=cfg.local_rabi * scale)
        rows.append((l_mm, at_splitting(ladder),
                     calibration_correction(l_mm * 1e-3, geom)))
    return rows


def _synth_task(args):
    """One (length, seed) synthesis: full spectra plus the reduced products."""
    cfg, l_mm, seed_idx = args
    try:
        grid = cfg.frequency_grid()
        budget = cfg.budget_for(l_mm)
        li = cfg.lengths_mm.index(l_mm)
        na = synthesize_nps(budget, grid, cfg.rbw_hz, cfg.n_avg,
                            _child_seed(cfg.base_seed, li, seed_idx, 0))
        np_ref = synthesize_nps(budget, grid, cfg.rbw_hz, cfg.n_avg,
                                _child_seed(cfg.base_seed, 0, seed_idx, 1),
                                include_atoms=False)
        ni = subtract_probe_noise(na, np_ref)
        ni_sections = section_average(ni, cfg.section_width_hz)
        na_sections = section_average(na, cfg.section_width_hz)
        # ideal-scenario noise, synthesized on the read-out section only
        sec_lo = cfg.f_start_hz + math.floor(
            (cfg.f_readout_hz - cfg.f_start_hz) / cfg.section_width_hz
        ) * cfg.section_width_hz
        n_bins = int(round(cfg.section_width_hz / cfg.bin_hz))
        sec_grid = sec_lo + np.arange(n_bins) * cfg.bin_hz
        ideal = synthesize_nps(cfg.budget_for(l_mm, ideal=True), sec_grid,
                               cfg.rbw_hz, cfg.n_avg,
                               _child_seed(cfg.base_seed, li, seed_idx, 2))
        ideal_dbm = 10 * math.log10(float(np.mean(ideal.linear_power())))
        return (l_mm, seed_idx, na, np_ref, ni_sections, na_sections, ideal_dbm)
    except SuperhetError as exc:
        raise SuperhetError(
            f"(l={l_mm} mm, seed index {seed_idx}): {exc}") from exc


def _section_value(sections: NoiseSpectrum, f_hz):
    idx = int(np.argmin(np.abs(sections.freqs - f_hz)))
    return float(sections.power_dbm[idx])


def worker_count():
    raw = os.environ.get("SUPERHET_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class CampaignResult:
    out_dir: str
    scaling: List[dict]
    kappa_estimates: List[float]
    threshold_db: float


def run_campaign(cfg: CampaignConfig, out_dir: str) -> CampaignResult:
    os.makedirs(out_dir, exist_ok=True)
    files: Dict[str, Tuple[List[str], List[tuple]]] = {}

    # ---- optics sweeps ----------------------------------------------------
    optics = run_eit_sweep(cfg)
    for o in optics:
        files[f"eit/spectrum_{_l_tag(o.l_mm)}.csv"] = (
            ["detuning_hz", "transmission"],
            list(zip(_EIT_GRID, o.spectrum_transmission)))
    files["eit/summary.csv"] = (
        ["l_mm", "a_eit", "fwhm_hz", "kappa0"],
        [(o.l_mm, o.a_eit, o.fwhm_hz, o.kappa0) for o in optics])

    atcal_rows = run_atcal_sweep(cfg)
    files["atcal/summary.csv"] = (
        ["l_mm", "splitting_hz", "correction_db"], atcal_rows)

    # ---- noise synthesis over (l, seed) ------------------------------------
    tasks = [(cfg, l_mm, s) for l_mm in cfg.lengths_mm for s in range(cfg.seeds)]
    n_workers = worker_count()
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_synth_task, tasks))
    else:
        results = [_synth_task(t) for t in tasks]
    results.sort(key=lambda r: (r[0], r[1]))

    by_seed_sections: Dict[int, Dict[float, NoiseSpectrum]] = {}
    noise_points: Dict[Tuple[float, int], float] = {}
    ideal_noise_points: Dict[Tuple[float, int], float] = {}
    for (l_mm, seed_idx, na, np_ref, ni_sections, na_sections, ideal_dbm) in results:
        if seed_idx == 0:
            files[f"nps/na_full_{_l_tag(l_mm)}_s0.csv"] = (
                ["f_hz", "p_dbm", "flagged"],
                list(zip(na.freqs, na.power_dbm, na.flagged)))
        files[f"nps/ni_sections_{_l_tag(l_mm)}_s{seed_idx}.csv"] = (
            ["f_hz", "p_dbm", "flagged"],
            list(zip(ni_sections.freqs, ni_sections.power_dbm,
                     ni_sections.flagged)))
        by_seed_sections.setdefault(seed_idx, {})[l_mm] = ni_sections
        noise_points[(l_mm, seed_idx)] = _section_value(na_sections,
                                                        cfg.f_readout_hz)
        ideal_noise_points[(l_mm, seed_idx)] = ideal_dbm
        if seed_idx == 0 and l_mm == cfg.lengths_mm[0]:
            files["nps/np_full_s0.csv"] = (
                ["f_hz", "p_dbm", "flagged"],
                list(zip(np_ref.freqs, np_ref.power_dbm, np_ref.flagged)))

    # ---- per-section power-law fits (Eq-style reduction) --------------------
    kappa_rows = []
    kappa_estimates = []
    for seed_idx in range(cfg.seeds):
        sections = by_seed_sections[seed_idx]
        centers = sections[cfg.lengths_mm[0]].freqs
        regrouped = {}
        for f_center in centers:
            pts = []
            for l_mm in cfg.lengths_mm:
                sec = sections[l_mm]
                idx = int(np.argmin(np.abs(sec.freqs - f_center)))
                pts.append((l_mm, 10 ** (float(sec.power_dbm[idx]) / 10)))
            regrouped[float(f_center)] = pts
        rows: List[SectionFitRow] = a_and_pn0_vs_frequency(regrouped)
        files[f"fits/af_s{seed_idx}.csv"] = (
            ["f_hz", "a_linear", "p_n0_linear", "kappa",
             "stderr_a", "stderr_p_n0", "stderr_kappa", "p_n0_clamped"],
            [(r.f_hz, r.fit.a_coeff, r.fit.p_n0, r.fit.kappa, r.fit.stderr_a,
              r.fit.stderr_p_n0, r.fit.stderr_kappa, r.fit.p_n0_clamped)
             for r in rows])
        readout_center = min(regrouped, key=lambda f: abs(f - cfg.f_readout_hz))
        free_fit = fit_power_law(regrouped[readout_center], kappa_fixed=None)
        kappa_rows.append((seed_idx, readout_center, free_fit.kappa,
                           free_fit.stderr_kappa))
        kappa_estimates.append(free_fit.kappa)
    files["fits/kappa.csv"] = (
        ["seed_index", "f_hz", "kappa", "stderr_kappa"], kappa_rows)

    # ---- scaling points and fits -------------------------------------------
    threshold_db = lambda_quarter_threshold_db(cfg.mw_freq_hz)
    geom = cfg.cell_geometry()
    point_rows = []
    mean_points: Dict[str, Dict[str, List[float]]] = {}
    for scenario in ("ideal", "nonideal"):
        sig_dbm = {}
        for o in optics:
            sh = cfg.superhet_for(o.kappa0)
            if scenario == "ideal":
                sig_dbm[o.l_mm] = signal_power(cfg.signal_rabi, sh)
            else:
                sig_dbm[o.l_mm] = effective_signal_power(o.l_mm * 1e-3, geom, sh)
        pts = noise_points if scenario == "nonideal" else ideal_noise_points
        na_db, ps_list, pna_list, snr_list = [], [], [], []
        for o in optics:
            ps = sig_dbm[o.l_mm]
            per_seed_pna = [pts[(o.l_mm, s)] for s in range(cfg.seeds)]
            for s in range(cfg.seeds):
                point_rows.append(
                    (scenario, s, o.l_mm, relative_atom_number(o.l_mm), ps,
                     per_seed_pna[s],
                     None if ps is None else ps - per_seed_pna[s]))
            pna_mean = float(np.mean(per_seed_pna))
            na_db.append(relative_atom_number(o.l_mm))
            ps_list.append(ps)
            pna_list.append(pna_mean)
            snr_list.append(None if ps is None else ps - pna_mean)
        mean_points[scenario] = {
            "na_db": na_db, "p_s": ps_list, "p_na": pna_list, "snr": snr_list}

    files["scaling/points.csv"] = (
        ["scenario", "seed_index", "l_mm", "n_a_db", "p_s_dbm", "p_na_dbm",
         "snr_db"], point_rows)

    lengths = np.asarray(cfg.lengths_mm)
    below, above = split_by_threshold(lengths, threshold_db)
    summary_rows = []
    scaling_list = []

    def add_fit(scenario, metric, regime, mask, values):
        na = np.asarray(mean_points[scenario]["na_db"])[mask]
        res = fit_db_slope(na, np.asarray(values, dtype=float)[mask], regime)
        summary_rows.append((scenario, metric, regime, res.slope,
                             res.intercept, res.r_squared, int(mask.sum())))
        scaling_list.append({"scenario": scenario, "metric": metric,
                             "regime": regime, "slope": res.slope,
                             "intercept": res.intercept,
                             "r_squared": res.r_squared})

    all_mask = np.ones(len(lengths), dtype=bool)
    for metric, key in (("signal", "p_s"), ("noise", "p_na"), ("snr", "snr")):
        add_fit("ideal", metric, "all", all_mask, mean_points["ideal"][key])
    add_fit("nonideal", "signal", "below", below, mean_points["nonideal"]["p_s"])
    add_fit("nonideal", "signal", "above", above, mean_points["nonideal"]["p_s"])
    add_fit("nonideal", "noise", "all", all_mask, mean_points["nonideal"]["p_na"])
    add_fit("nonideal", "snr", "below", below, mean_points["nonideal"]["snr"])
    add_fit("nonideal", "snr", "above", above, mean_points["nonideal"]["snr"])
    files["scaling/summary.csv"] = (
        ["scenario", "metric", "regime", "slope", "intercept", "r_squared",
         "n_points"], summary_rows)

    # ---- deterministic sensitivity table (model level, non-ideal) -----------
    sens_rows = []
    for o in optics:
        sh = cfg.superhet_for(o.kappa0)
        budget = cfg.budget_for(o.l_mm)
        p_s = effective_signal_power(o.l_mm * 1e-3, geom, sh)
        p_na = total_noise_power(cfg.f_readout_hz, budget, cfg.rbw_hz)
        sens_rows.append((o.l_mm, relative_atom_number(o.l_mm), p_s, p_na,
                          None if p_s is None else p_s - p_na,
                          rabi_from_power(p_na, sh)))
    files["sensitivity/summary.csv"] = (
        ["l_mm", "n_a_db", "p_s_dbm", "p_na_dbm", "snr_db",
         "min_rabi_rad_s"], sens_rows)

    # ---- write tree + manifest ----------------------------------------------
    config_text = dump_config(cfg)
    with open(os.path.join(out_dir, "config.ini"), "w", encoding="utf-8") as fh:
        fh.write(config_text)
    for rel in sorted(files):
        header, rows = files[rel]
        write_csv(os.path.join(out_dir, rel), header, rows)

    manifest = {
        "package_version": __version__,
        "config_sha256": hashlib.sha256(config_text.encode()).hexdigest(),
        "seeds": cfg.seed_list(),
        "scenarios": ["ideal", "nonideal"],
        "lambda_quarter_threshold_db": threshold_db,
        "files": {},
    }
    for rel in sorted(list(files) + ["config.ini"]):
        with open(os.path.join(out_dir, rel), "rb") as fh:
            manifest["files"][rel] = hashlib.sha256(fh.read()).hexdigest()
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    return CampaignResult(out_dir, scaling_list, kappa_estimates, threshold_db)
