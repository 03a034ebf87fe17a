import csv
import os

import numpy as np
import pytest

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def sici_reference():
    """Frozen arbitrary-precision Si/Ci values (see data/gen_sici_reference.py)."""
    path = os.path.join(DATA_DIR, "sici_reference.csv")
    phi, si, ci = [], [], []
    with open(path) as fh:
        for row in csv.DictReader(fh):
            phi.append(float(row["phi"]))
            si.append(float(row["si"]))
            ci.append(float(row["ci"]))
    return np.array(phi), np.array(si), np.array(ci)


@pytest.fixture(scope="session")
def default_campaign(tmp_path_factory):
    """One full default campaign shared by the acceptance tests."""
    import time

    from superhet.campaign import run_campaign
    from superhet.config import DEFAULT_CONFIG

    out = tmp_path_factory.mktemp("campaign") / "default"
    t0 = time.monotonic()
    result = run_campaign(DEFAULT_CONFIG, str(out))
    elapsed = time.monotonic() - t0
    return result, elapsed
