import subprocess
import sys

import pytest


@pytest.fixture(scope="session")
def campaign_tree(tmp_path_factory):
    """A default campaign tree produced through the superhet CLI."""
    out = tmp_path_factory.mktemp("campaign") / "default"
    res = subprocess.run(
        [sys.executable, "-m", "superhet.cli", "--out", str(out), "campaign"],
        capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    return str(out)
