import json
import subprocess
import sys
from pathlib import Path

import numpy as np

from noisyspins import io

REPO = Path(__file__).resolve().parents[1]
SCHEMA = json.loads((REPO / "schema" / "csv_schema.json").read_text())


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "noisyspins.cli", *args],
        capture_output=True, text=True,
    )


def check_schema(path: Path):
    kind = path.stem
    cols = list(io.read_csv(path))
    assert kind in SCHEMA["files"], f"{kind} missing from schema"
    assert cols == list(SCHEMA["files"][kind]["columns"])
    meta = json.loads(Path(str(path) + ".meta.json").read_text())
    for key in ("params", "seed", "version", "timestamp", "columns"):
        assert key in meta
    return meta


def test_fig1_outputs_and_cluster_count(tmp_path):
    r = run_cli("fig1", "--out-dir", str(tmp_path), "--seed", "7")
    assert r.returncode == 0, r.stderr
    meta = check_schema(tmp_path / "fig1_spectrum.csv")
    assert meta["cluster_count"] == 15
    cols = io.read_csv(tmp_path / "fig1_spectrum.csv")
    assert len(cols["re"]) == 3 ** 6
    assert cols["re"].max() <= 1e-10
    # conjugation symmetry of the written spectrum
    ev = cols["re"] + 1j * cols["im"]
    from noisyspins import liouvillian as lv

    assert lv.conjugation_defect(ev) < 1e-8
    check_schema(tmp_path / "fig1_multiplet.csv")


def test_fig1_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        r = run_cli("fig1", "--out-dir", str(d), "--seed", "3")
        assert r.returncode == 0
    assert (a / "fig1_spectrum.csv").read_bytes() == (b / "fig1_spectrum.csv").read_bytes()
    assert (a / "fig1_multiplet.csv").read_bytes() == (b / "fig1_multiplet.csv").read_bytes()


def test_fig2_outputs(tmp_path):
    r = run_cli("fig2", "--n", "8", "--g-grid", "100,50", "--out-dir", str(tmp_path))
    assert r.returncode == 0, r.stderr
    meta = check_schema(tmp_path / "fig2_roots.csv")
    cols = io.read_csv(tmp_path / "fig2_roots.csv")
    roots = cols["kind"] == "root"
    assert int(roots.sum()) == 8 * 2
    assert int((~roots).sum()) == 8  # pole rows
    assert np.all(cols["residual_norm"][roots] < 1e-10)
    # the branch escapes to infinity as 1/g vanishes
    g = cols["g_plus"][roots]
    re = cols["re_mu"][roots]
    assert np.abs(re[g == 100.0]).mean() > np.abs(re[g == 50.0]).mean()
    assert meta["params"]["n_spins"] == 8


def test_fig3_reduced_grid(tmp_path):
    r = run_cli("fig3", "--g-grid", "1000,100,20", "--out-dir", str(tmp_path))
    assert r.returncode == 0, r.stderr
    meta = check_schema(tmp_path / "fig3_rates.csv")
    cols = io.read_csv(tmp_path / "fig3_rates.csv")
    ed, be = cols["rate_ed_n8"], cols["rate_bethe_n8"]
    assert np.all(np.abs(ed - be) < 1e-6 * np.abs(ed))
    # closer to the asymptote at n=60 than at n=8, per spin
    gap8 = np.abs(be / 8 - cols["rate_asymptotic"] / 60)
    gap60 = np.abs(cols["rate_bethe_n60"] / 60 - cols["rate_asymptotic"] / 60)
    assert np.all(gap60 < gap8)
    assert meta["asymptotic_formula_validated"] is True
    # linearity of the rate in 1/g on the strong-coupling side
    x, y = cols["inv_g_plus"], cols["rate_bethe_n60"]
    coeffs = np.polyfit(x, y, 1)
    ss_res = np.sum((y - np.polyval(coeffs, x)) ** 2)
    ss_tot = np.sum((y - y.mean()) ** 2)
    assert 1 - ss_res / ss_tot > 0.999


def test_fig4_outputs_and_crossings(tmp_path):
    r = run_cli("fig4", "--out-dir", str(tmp_path))
    assert r.returncode == 0, r.stderr
    meta = check_schema(tmp_path / "fig4_flow.csv")
    cols = io.read_csv(tmp_path / "fig4_flow.csv")
    ids = np.unique(cols["trajectory_id"])
    per_id = [np.sum(cols["trajectory_id"] == k) for k in ids]
    assert len(set(per_id)) == 1  # constant trajectory count along the grid
    assert len(meta["crossing_events"]) >= 1
    r2 = run_cli("fig4", "--out-dir", str(tmp_path / "again"))
    meta2 = json.loads((tmp_path / "again" / "fig4_flow.csv.meta.json").read_text())
    assert meta2["crossing_events"] == meta["crossing_events"]


def test_ed_command_sector_restriction(tmp_path):
    r = run_cli("ed", "--n", "3", "--delta-y", "1.0", "--g-plus", "2.0",
                "--sector", "0", "--out-dir", str(tmp_path))
    assert r.returncode == 0, r.stderr
    cols = io.read_csv(tmp_path / "spectrum.csv")
    assert len(cols["re"]) == 7  # S^z_tot = 0 block of three spin-1s
    assert set(cols["sector"]) == {0.0}


def test_bethe_solve_command(tmp_path):
    r = run_cli("bethe-solve", "--n", "4", "--delta-y", "2.0",
                "--g-grid", "100,10", "--out-dir", str(tmp_path))
    assert r.returncode == 0, r.stderr
    cols = io.read_csv(tmp_path / "bethe_roots.csv")
    assert len(cols["k"]) == 8
    assert np.all(cols["residual_norm"] < 1e-10)


def test_sweep_command(tmp_path):
    r = run_cli("sweep", "--n", "3", "--g-grid", "100,10", "--seed", "5",
                "--out-dir", str(tmp_path))
    assert r.returncode == 0, r.stderr
    cols = io.read_csv(tmp_path / "sweep_rates.csv")
    assert np.all(cols["rate"] > 0)
    assert cols["rate"][0] < cols["rate"][1]  # stronger noise, slower decay


def test_validate_subset_and_report(tmp_path):
    r = run_cli("validate", "--only", "A1,A2", "--out-dir", str(tmp_path))
    assert r.returncode == 0, r.stderr
    report = json.loads((tmp_path / "validation_report.json").read_text())
    assert report["all_passed"] is True
    assert [c["id"] for c in report["criteria"]] == ["A1", "A2"]
    assert all("runtime_s" in c for c in report["criteria"])


def test_validate_fault_injection_fails_a5(tmp_path):
    r = run_cli("validate", "--only", "A5", "--inject-fault", "bethe-sign",
                "--out-dir", str(tmp_path))
    assert r.returncode == 1
    report = json.loads((tmp_path / "validation_report.json").read_text())
    assert report["criteria"][0]["passed"] is False


def test_usage_error_exit_code():
    assert run_cli("no-such-command").returncode == 2


def test_numerical_failure_exit_code(tmp_path):
    om = tmp_path / "om.txt"
    om.write_text("1.0\n1.0\n2.0\n")
    r = run_cli("bethe-solve", "--omega-file", str(om), "--g-plus", "100",
                "--out-dir", str(tmp_path))
    assert r.returncode == 3


def test_config_file_merging(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nn = 4\ng-plus = 5.0\nseed = 9\n")
    r = run_cli("ed", "--config", str(cfg), "--delta-y", "1.0",
                "--out-dir", str(tmp_path))
    assert r.returncode == 0, r.stderr
    meta = json.loads((tmp_path / "spectrum.csv.meta.json").read_text())
    assert meta["params"]["n_spins"] == 4
    assert meta["params"]["g_plus"] == 5.0
    # flags override the file
    r = run_cli("ed", "--config", str(cfg), "--delta-y", "1.0", "--g-plus", "7.5",
                "--out-dir", str(tmp_path / "b"))
    meta = json.loads((tmp_path / "b" / "spectrum.csv.meta.json").read_text())
    assert meta["params"]["g_plus"] == 7.5


def test_unknown_config_key_is_usage_error(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bogus = 1\n")
    assert run_cli("ed", "--config", str(cfg)).returncode == 2
