import subprocess
import sys

import pytest


def run_dynmix(args):
    """Invoke the primary CLI as an external process; the plots package
    consumes only its emitted files."""
    proc = subprocess.run(
        [sys.executable, "-m", "dynmix.cli", *args],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def outputs(tmp_path_factory):
    """One small run per table kind, produced through the dynmix CLI."""
    root = tmp_path_factory.mktemp("dynmix-out")
    mix_csv = root / "mix.csv"
    run_dynmix([
        "mixing", "--regular", "24", "3", "--alpha", "0.2", "--epsilon", "0.2",
        "--horizon", "8", "--replicas", "2000", "--seed", "5",
        "--out", str(mix_csv),
    ])
    mix2_csv = root / "mix2.csv"
    run_dynmix([
        "mixing", "--regular", "24", "3", "--alpha", "0.4", "--epsilon", "0.2",
        "--horizon", "6", "--replicas", "2000", "--seed", "6",
        "--out", str(mix2_csv),
    ])
    tau_csv = root / "tau.csv"
    run_dynmix([
        "tau", "--regular", "200", "3", "--alpha", "0.1", "--horizon", "8",
        "--replicas", "3000", "--seed", "7", "--out", str(tau_csv),
    ])
    topo_csv = root / "topo.csv"
    run_dynmix([
        "topology", "--regular", "400", "3", "--samples", "80", "--tmax", "6",
        "--seed", "8", "--out", str(topo_csv),
    ])
    return {
        "mixing_csv": mix_csv,
        "mixing_sidecar": root / "mix.json",
        "mixing2_sidecar": root / "mix2.json",
        "tau_csv": tau_csv,
        "topology_csv": topo_csv,
        "root": root,
    }
