"""Shared fixtures: real engine outputs, generated once per session.

The engine is driven through its installed CLI only; nothing in this package
imports it.
"""

import shutil
import subprocess

import pytest
import yaml

ECL = shutil.which("ecl")


def run_engine(args):
    proc = subprocess.run([ECL, *args], capture_output=True, text=True)
    assert proc.returncode == 0, f"ecl {' '.join(args)} failed: {proc.stderr}"


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    if ECL is None:
        pytest.skip("the simulation engine CLI is not installed")
    root = tmp_path_factory.mktemp("engine_data")

    sweep_cfg = root / "sweep.yaml"
    sweep_cfg.write_text(
        yaml.safe_dump(
            {
                "kind": "sweep",
                "alphas": [0.5, 1.5, 2.5],
                "n_states": 20,
                "horizon": 150,
                "replicates": 2,
            }
        )
    )
    phase_cfg = root / "phase.yaml"
    phase_cfg.write_text(
        yaml.safe_dump(
            {
                "kind": "phase",
                "alphas": [0.5, 2.5],
                "betas": [0.003, 0.3],
                "n_states": 10,
                "horizon": 150,
                "replicates": 1,
            }
        )
    )

    out = str(root)
    run_engine(["sweep", "--config", str(sweep_cfg), "--out", out])
    run_engine(["irrev", "--alpha", "1.875", "--n", "20", "--steps", "160", "--out", out])
    run_engine(["universal", "--n", "20", "--steps", "100", "--out", out])
    run_engine(["phase", "--config", str(phase_cfg), "--out", out])
    return root
