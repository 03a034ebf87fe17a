"""CSV loading with schema validation against the campaign file contracts."""

import csv
import glob
import os
import re

import numpy as np


class SchemaError(Exception):
    """Input CSV does not match the expected campaign schema."""


def load_table(path, required):
    """Read a campaign CSV into a dict of float arrays (strings preserved
    for non-numeric columns).  Raises :class:`SchemaError` naming any
    missing column, and on empty files."""
    if not os.path.exists(path):
        raise SchemaError(f"missing input file {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty") from None
        for col in required:
            if col not in header:
                raise SchemaError(f"{path}: missing column '{col}'")
        rows = [row for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    columns = {}
    for i, name in enumerate(header):
        values = [row[i] if i < len(row) else "" for row in rows]
        try:
            columns[name] = np.array(
                [float(v) if v != "" else np.nan for v in values])
        except ValueError:
            columns[name] = np.array(values, dtype=object)
    return columns


def sections_by_length_and_seed(campaign_dir):
    """All nps/ni_sections_* files, keyed (l_mm, seed_index)."""
    pattern = os.path.join(campaign_dir, "nps", "ni_sections_l*_s*.csv")
    paths = sorted(glob.glob(pattern))
    if not paths:
        raise SchemaError(f"no section files under {campaign_dir}/nps")
    out = {}
    for path in paths:
        stem = os.path.basename(path)[len("ni_sections_l"):-len(".csv")]
        l_part, seed_part = stem.split("mm_s")
        table = load_table(path, ["f_hz", "p_dbm", "flagged"])
        out[(float(l_part), int(seed_part))] = table
    return out


def full_nps_paths(campaign_dir):
    pattern = os.path.join(campaign_dir, "nps", "na_full_l*_s0.csv")
    paths = sorted(glob.glob(pattern))
    if not paths:
        raise SchemaError(f"no full NPS files under {campaign_dir}/nps")
    probe = os.path.join(campaign_dir, "nps", "np_full_s0.csv")
    return paths, probe


def eit_spectra_paths(campaign_dir):
    pattern = os.path.join(campaign_dir, "eit", "spectrum_l*.csv")
    paths = sorted(glob.glob(pattern))
    if not paths:
        raise SchemaError(f"no EIT spectra under {campaign_dir}/eit")
    return paths


def length_from_path(path):
    match = re.search(r"_l(\d+\.\d+)mm", os.path.basename(path))
    if match is None:
        raise SchemaError(f"cannot parse interaction length from {path}")
    return float(match.group(1))
