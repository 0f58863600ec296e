import csv
import json
import math

import pytest

from ramanfock.cli import EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_OK, EXIT_TRUNCATION, RunConfig, main, parse_initial
from ramanfock.errors import ConfigError

PARAMS = {"g_hz": 50e3, "omega_l_hz": 50e3 / 30, "delta_hz": 1e6}


def run(tmp_path, command, config=None, *extra):
    args = [command, "--out", str(tmp_path)]
    tmp_path.mkdir(parents=True, exist_ok=True)
    if config is not None:
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config))
        args += ["--config", str(path)]
    return main(args + list(extra))


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def summary(tmp_path, name):
    return json.loads((tmp_path / name).read_text())


def test_prepare_fock_preset(tmp_path):
    assert run(tmp_path, "prepare-fock", None, "--preset", "fig2") == EXIT_OK
    s = summary(tmp_path, "prepare_fock_summary.json")
    assert s["target_fock"] == 6
    assert s["fidelity"] > 0.99
    assert s["selectivity_ok"] is True
    dist = read_rows(tmp_path / "prepare_fock_distribution.csv")
    assert sum(float(r["p_conditioned"]) for r in dist) <= 1 + 1e-9
    assert len(read_rows(tmp_path / "prepare_fock_b.csv")) == s["dim"]


def test_prepare_from_resonant_fock(tmp_path):
    assert run(tmp_path, "prepare-fock", {**PARAMS, "n_o": 5, "initial": "fock:5"}) == EXIT_OK
    assert summary(tmp_path, "prepare_fock_summary.json")["fidelity"] == 1.0


def test_prepare_infeasible(tmp_path):
    assert run(tmp_path, "prepare-fock", {**PARAMS, "n_o": 5, "initial": "fock:9"}) == EXIT_INFEASIBLE


def test_sequential_preparation(tmp_path):
    cfg = {**PARAMS, "n_o": 4, "initial": "fock:4", "atoms": 3}
    assert run(tmp_path, "prepare-fock", cfg) == EXIT_OK
    s = summary(tmp_path, "prepare_fock_summary.json")
    assert s["target_fock"] == 7 and s["fidelity"] == 1.0


def test_wigner_single_point(tmp_path):
    cfg = {**PARAMS, "n_o": 6, "initial": "fock:6", "grid": {"points": [[0, 0]]}}
    assert run(tmp_path, "reconstruct-wigner", cfg) == EXIT_OK
    (row,) = read_rows(tmp_path / "wigner_grid.csv")
    assert float(row["w_exact"]) == pytest.approx(2 / math.pi, abs=1e-11)
    assert float(row["w_reconstructed"]) == pytest.approx(2 / math.pi, abs=0.05 * 2 / math.pi)
    assert summary(tmp_path, "wigner_summary.json")["grid_size"] == 1


def test_wigner_empty_grid(tmp_path):
    cfg = {**PARAMS, "initial": "fock:6", "grid": {"points": []}}
    assert run(tmp_path, "reconstruct-wigner", cfg) == EXIT_CONFIG


def test_photon_stats_peaks(tmp_path):
    for n in (6, 0):
        out = tmp_path / str(n)
        assert run(out, "photon-stats", {**PARAMS, "initial": f"fock:{n}", "n_max": 10}) == EXIT_OK
        s = summary(out, "photon_stats_summary.json")
        assert s["peak_n"] == n
        rows = read_rows(out / "photon_stats.csv")
        assert sum(float(r["p_true"]) for r in rows) <= 1 + 1e-9
        # each scan entry is a separate experiment, so only entrywise bounds apply
        assert all(0 <= float(r["p_excited"]) <= 1 + 1e-9 for r in rows)


def test_photon_stats_truncation(tmp_path):
    cfg = {**PARAMS, "initial": "fock:2", "dim": 12, "n_max": 11}
    assert run(tmp_path, "photon-stats", cfg) == EXIT_TRUNCATION


def test_validate_without_coupling(tmp_path):
    cfg = {"g_hz": 0.0, "omega_l_hz": 0.0, "delta_hz": 1e6, "initial": "fock:2", "n_o": 2}
    assert run(tmp_path, "validate-effective", cfg) == EXIT_OK
    s = summary(tmp_path, "validate_effective_summary.json")
    assert s["pe_full"] == 0 and s["pe_effective"] == 0 and s["abs_diff"] == 0


def test_identical_seed_gives_identical_files(tmp_path):
    cfg = {**PARAMS, "initial": "coherent:1.5,0.5", "n_max": 8, "mode": "mc", "atom_count": 300}
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "photon-stats", cfg, "--seed", "42") == EXIT_OK
    assert run(b, "photon-stats", cfg, "--seed", "42") == EXIT_OK
    for name in ("photon_stats.csv", "photon_stats_summary.json", "config.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    c = tmp_path / "c"
    run(c, "photon-stats", cfg, "--seed", "43")
    assert (a / "photon_stats.csv").read_bytes() != (c / "photon_stats.csv").read_bytes()


def test_config_errors(tmp_path):
    assert run(tmp_path, "photon-stats", {**PARAMS, "bogus": 1}) == EXIT_CONFIG
    assert run(tmp_path, "photon-stats", {"g_hz": 1.0}) == EXIT_CONFIG
    assert run(tmp_path, "photon-stats", {**PARAMS, "initial": "squeezed:1"}) == EXIT_CONFIG
    assert main(["photon-stats", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_parse_initial():
    assert parse_initial("fock:6") == ("fock", 6)
    assert parse_initial("coherent:2.5") == ("coherent", 2.5 + 0j)
    with pytest.raises(ConfigError):
        parse_initial("fock:-1")
    with pytest.raises(ConfigError):
        RunConfig.from_dict({**PARAMS, "mode": "quantum"})
