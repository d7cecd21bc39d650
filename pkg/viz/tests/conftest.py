"""Shared fixtures: real run artifacts produced once per session.

The engine is a test-only dependency here; the package under test reads the
files it leaves behind and never imports it.
"""

import pytest

geopursuit = pytest.importorskip("geopursuit")


@pytest.fixture(scope="session")
def run_dirs(tmp_path_factory):
    """One finished run per preset, keyed by preset name."""
    base = tmp_path_factory.mktemp("runs")
    out = {}
    for name in geopursuit.preset_names():
        cfg = geopursuit.preset_config(name)
        res = geopursuit.run_scenario(cfg, outdir=base)
        out[name] = res.outdir
    return out


@pytest.fixture(scope="session")
def torus_run(run_dirs):
    return run_dirs["torus_10"]


@pytest.fixture(scope="session")
def triangle_run(run_dirs):
    return run_dirs["triangle"]
