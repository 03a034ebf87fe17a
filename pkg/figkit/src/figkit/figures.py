"""Renderers for the seven campaign figures.

Every renderer consumes only campaign CSV files, draws error bars as the
standard deviation across seeds, overlays the fitted lines shipped in the
campaign's own fit CSVs, and writes a deterministic PNG (fixed dpi, fixed
metadata, no timestamps).  :func:`render` returns a report carrying the
numbers actually drawn (for instance the fitted slopes annotated in the
scaling figure) so callers can cross-check them against the CSVs.
"""

import math
import os
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import schema
from .schema import SchemaError, load_table

FIGURE_IDS = ("fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4a", "fig4c")

_SAVE_OPTS = dict(dpi=130, metadata={"Software": "figkit"})


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: id, campaign tree, output path, axis overrides."""

    figure_id: str
    campaign_dir: str
    output_path: str
    xlim: Optional[Tuple[float, float]] = None
    ylim: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise SchemaError(f"unknown figure id '{self.figure_id}'; "
                              f"expected one of {', '.join(FIGURE_IDS)}")


@dataclass
class RenderReport:
    figure_id: str
    output_path: str
    metadata: Dict = field(default_factory=dict)


def _finish(fig, ax, spec):
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)
    os.makedirs(os.path.dirname(os.path.abspath(spec.output_path)), exist_ok=True)
    fig.savefig(spec.output_path, **_SAVE_OPTS)
    plt.close(fig)


def _lin(dbm):
    return 10.0 ** (np.asarray(dbm, dtype=float) / 10.0)


def _dbm(lin):
    return 10.0 * np.log10(np.asarray(lin, dtype=float))


def _render_fig2a(spec):
    paths, probe_path = schema.full_nps_paths(spec.campaign_dir)
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    cmap = plt.get_cmap("viridis")
    for i, path in enumerate(paths):
        table = load_table(path, ["f_hz", "p_dbm"])
        step = max(1, table["f_hz"].size // 3000)
        ax.plot(table["f_hz"][::step] / 1e3, table["p_dbm"][::step],
                lw=0.7, color=cmap(i / max(len(paths) - 1, 1)),
                label=f"{schema.length_from_path(path):.2f} mm")
    probe = load_table(probe_path, ["f_hz", "p_dbm"])
    step = max(1, probe["f_hz"].size // 3000)
    ax.plot(probe["f_hz"][::step] / 1e3, probe["p_dbm"][::step],
            lw=0.9, color="0.3", label="probe only")
    ax.set_xlabel("read-out frequency (kHz)")
    ax.set_ylabel("noise power (dBm)")
    ax.legend(fontsize=6, ncol=2, title="interaction length", title_fontsize=7)
    _finish(fig, ax, spec)
    return {"traces": len(paths) + 1}


def _mean_std_sections(campaign_dir):
    tables = schema.sections_by_length_and_seed(campaign_dir)
    lengths = sorted({k[0] for k in tables})
    seeds = sorted({k[1] for k in tables})
    freqs = tables[(lengths[0], seeds[0])]["f_hz"]
    mean = {}
    std = {}
    for l_mm in lengths:
        stack = np.vstack([_lin(tables[(l_mm, s)]["p_dbm"]) for s in seeds])
        mean[l_mm] = stack.mean(axis=0)
        std[l_mm] = stack.std(axis=0)
    return freqs, lengths, seeds, mean, std


def _render_fig2b(spec):
    freqs, lengths, seeds, mean, std = _mean_std_sections(spec.campaign_dir)
    picks = np.linspace(0, freqs.size - 1, 5).astype(int)
    na_db = 20 * np.log10(np.asarray(lengths))
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    cmap = plt.get_cmap("plasma")
    for j, idx in enumerate(picks):
        y = np.array([mean[l][idx] for l in lengths])
        yerr = np.array([std[l][idx] for l in lengths])
        upper = _dbm(y + yerr)
        lower = _dbm(np.maximum(y - yerr, y * 1e-3))
        ax.errorbar(na_db, _dbm(y),
                    yerr=[_dbm(y) - lower, upper - _dbm(y)],
                    fmt="o", ms=3.5, lw=0.9, capsize=2,
                    color=cmap(j / (len(picks) - 1)),
                    label=f"{freqs[idx] / 1e3:.1f} kHz")
    ax.set_xlabel("relative atom number (dB)")
    ax.set_ylabel("interaction noise power (dBm)")
    ax.legend(fontsize=7, title="read-out frequency", title_fontsize=7)
    _finish(fig, ax, spec)
    return {"frequencies": [float(freqs[i]) for i in picks]}


def _render_fig2c(spec):
    import glob as _glob
    paths = sorted(_glob.glob(os.path.join(spec.campaign_dir, "fits",
                                           "af_s*.csv")))
    if not paths:
        raise SchemaError(f"no fit tables under {spec.campaign_dir}/fits")
    tables = [load_table(p, ["f_hz", "a_linear", "p_n0_linear"])
              for p in paths]
    freqs = tables[0]["f_hz"]
    a_stack = np.vstack([t["a_linear"] for t in tables])
    p0_stack = np.vstack([t["p_n0_linear"] for t in tables])
    fig, ax = plt.subplots(figsize=(6.4, 4.2))

    def band(stack, color, label):
        m = stack.mean(axis=0)
        s = stack.std(axis=0)
        ax.errorbar(freqs / 1e3, _dbm(m),
                    yerr=[_dbm(m) - _dbm(np.maximum(m - s, m * 1e-3)),
                          _dbm(m + s) - _dbm(m)],
                    fmt="o", ms=3, lw=0.8, capsize=2, color=color, label=label)

    band(a_stack, "tab:blue", "per-atom coefficient A")
    band(p0_stack, "tab:red", "constant term")
    ax.set_xlabel("read-out frequency (kHz)")
    ax.set_ylabel("fitted power (dBm)")
    ax.legend(fontsize=8)
    _finish(fig, ax, spec)
    return {"sections": int(freqs.size), "seeds": len(paths)}


def _render_fig3a(spec):
    paths = schema.eit_spectra_paths(spec.campaign_dir)
    summary = load_table(os.path.join(spec.campaign_dir, "eit", "summary.csv"),
                         ["l_mm", "a_eit", "fwhm_hz"])
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    cmap = plt.get_cmap("viridis")
    shift = 5e6
    peak_x, peak_y = [], []
    for i, path in enumerate(paths):
        table = load_table(path, ["detuning_hz", "transmission"])
        x = table["detuning_hz"] + i * shift
        ax.plot(x / 1e6, table["transmission"], lw=0.8,
                color=cmap(i / max(len(paths) - 1, 1)))
        j = int(np.argmax(table["transmission"]))
        peak_x.append(x[j] / 1e6)
        peak_y.append(table["transmission"][j])
    ax.plot(peak_x, peak_y, "o", ms=4, color="tab:blue")
    coef = np.polyfit(summary["l_mm"], peak_y, 1)
    ax.plot(peak_x, np.polyval(coef, summary["l_mm"]), "--",
            color="tab:blue", lw=1.0, label="linear amplitude fit")
    ax.set_xlabel("coupling detuning, shifted per trace (MHz)")
    ax.set_ylabel("probe transmission")
    ax.legend(fontsize=8)
    _finish(fig, ax, spec)
    return {"traces": len(paths), "fit_slope_per_mm": float(coef[0])}


def _render_fig3b(spec):
    paths = schema.eit_spectra_paths(spec.campaign_dir)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    cmap = plt.get_cmap("viridis")
    for i, path in enumerate(paths):
        table = load_table(path, ["detuning_hz", "transmission"])
        t = table["transmission"]
        norm = (t - t.min()) / (t.max() - t.min())
        ax.plot(table["detuning_hz"] / 1e6, norm, lw=0.8,
                color=cmap(i / max(len(paths) - 1, 1)),
                label=f"{schema.length_from_path(path):.2f} mm")
    ax.set_xlabel("coupling detuning (MHz)")
    ax.set_ylabel("normalized probe transmission")
    ax.legend(fontsize=6, ncol=2)
    _finish(fig, ax, spec)
    return {"traces": len(paths)}


def _render_fig4a(spec):
    table = load_table(os.path.join(spec.campaign_dir, "atcal", "summary.csv"),
                       ["l_mm", "splitting_hz", "correction_db"])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(table["l_mm"], table["correction_db"], "s", ms=5,
            color="tab:blue", label="power correction")
    coef = np.polyfit(table["l_mm"], table["correction_db"], 1)
    ax.plot(table["l_mm"], np.polyval(coef, table["l_mm"]), "-",
            color="tab:blue", lw=1.0, label="linear fit")
    ax.set_xlabel("interaction length (mm)")
    ax.set_ylabel("first-order power correction (dB)")
    ax.legend(fontsize=8)
    _finish(fig, ax, spec)
    return {"fit_slope_db_per_mm": float(coef[0])}


def _render_fig4c(spec):
    points = load_table(os.path.join(spec.campaign_dir, "scaling",
                                     "points.csv"),
                        ["scenario", "seed_index", "l_mm", "n_a_db",
                         "p_s_dbm", "p_na_dbm", "snr_db"])
    summary = load_table(os.path.join(spec.campaign_dir, "scaling",
                                      "summary.csv"),
                         ["scenario", "metric", "regime", "slope",
                          "intercept", "r_squared"])
    sel = points["scenario"] == "nonideal"
    na = points["n_a_db"][sel]
    lengths = points["l_mm"][sel]
    fig, ax = plt.subplots(figsize=(6.8, 4.6))
    ax2 = ax.twinx()

    drawn_slopes = {}

    def series(column, axis, color, marker, label):
        values = points[column][sel]
        xs = np.unique(na)
        mean = np.array([np.mean(values[na == x]) for x in xs])
        std = np.array([np.std(values[na == x]) for x in xs])
        axis.errorbar(xs, mean, yerr=std, fmt=marker, ms=5, lw=0.9,
                      capsize=2, color=color, label=label)
        return xs

    xs = series("p_s_dbm", ax, "black", "s", "signal power")
    series("p_na_dbm", ax, "tab:red", "o", "noise power")
    series("snr_db", ax2, "tab:blue", "^", "SNR")

    styles = {("signal", "below"): ("black", "-"),
              ("signal", "above"): ("black", "--"),
              ("noise", "all"): ("tab:red", "-"),
              ("snr", "below"): ("tab:blue", "-"),
              ("snr", "above"): ("tab:blue", "--")}
    texts = []
    for i in range(summary["scenario"].size):
        key = (summary["metric"][i], summary["regime"][i])
        if summary["scenario"][i] != "nonideal" or key not in styles:
            continue
        slope = float(summary["slope"][i])
        intercept = float(summary["intercept"][i])
        color, ls = styles[key]
        axis = ax2 if key[0] == "snr" else ax
        if key[1] == "below":
            grid = np.linspace(xs.min(), 20.656, 30)
        elif key[1] == "above":
            grid = np.linspace(20.656, xs.max(), 30)
        else:
            grid = np.linspace(xs.min(), xs.max(), 30)
        axis.plot(grid, slope * grid + intercept, ls, color=color, lw=1.1)
        drawn_slopes[f"{key[0]}_{key[1]}"] = round(slope, 3)
        texts.append(f"{key[0]} {key[1]}: {slope:.3f}")
    ax.text(0.02, 0.98, "\n".join(texts), transform=ax.transAxes,
            va="top", fontsize=7,
            bbox=dict(boxstyle="round", fc="white", ec="0.7"))
    ax.set_xlabel("relative atom number (dB)")
    ax.set_ylabel("power (dBm)")
    ax2.set_ylabel("SNR (dB)")
    ax.legend(loc="lower right", fontsize=7)
    ax2.legend(loc="center right", fontsize=7)
    _finish(fig, ax, spec)
    return {"slopes": drawn_slopes, "lengths": sorted(set(lengths.tolist()))}


_RENDERERS = {
    "fig2a": _render_fig2a,
    "fig2b": _render_fig2b,
    "fig2c": _render_fig2c,
    "fig3a": _render_fig3a,
    "fig3b": _render_fig3b,
    "fig4a": _render_fig4a,
    "fig4c": _render_fig4c,
}


def render(spec: FigureSpec) -> RenderReport:
    """Render one figure; returns a report with the drawn metadata."""
    metadata = _RENDERERS[spec.figure_id](spec)
    return RenderReport(spec.figure_id, spec.output_path, metadata)


def render_all(campaign_dir, out_dir, only=None):
    ids = FIGURE_IDS if not only else tuple(only)
    reports = []
    for figure_id in ids:
        spec = FigureSpec(figure_id, campaign_dir,
                          os.path.join(out_dir, f"{figure_id}.png"))
        reports.append(render(spec))
    return reports
