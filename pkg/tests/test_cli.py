import csv
import json
import subprocess
import sys

import pytest

from nsbeltrami.cli import EXIT_IO, EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION, main

ABC_CONFIG = """
solver.n = 32
solver.nu = 0.5
solver.dt = 0.01
solver.t_end = 0.64
solver.snapshot_interval = 0.04
ic.type = abc
cylinder.0.x0 = 3.0, 3.3, 2.8
cylinder.0.t0 = 0.64
cylinder.0.r = 0.4
cylinder.1.x0 = 2.0, 2.5, 3.5
cylinder.1.t0 = 0.64
cylinder.1.r = 0.4
diagnostics.M = 0.5
"""


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    base = tmp_path_factory.mktemp("cli")
    cfg = base / "abc.cfg"
    cfg.write_text(ABC_CONFIG)
    assert main(["simulate", "--config", str(cfg), "--out", str(base / "run")]) == EXIT_OK
    return base / "run"


def _read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestSimulate:
    def test_writes_snapshots_and_manifest(self, run_dir):
        manifest = json.loads((run_dir / "manifest.json").read_text())
        assert len(manifest["snapshots"]) == 17
        assert (run_dir / "config.txt").exists()
        assert (run_dir / "snap_000016.nsef").stat().st_size == 36 + 24 * 32**3

    def test_invalid_config(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(ABC_CONFIG.replace("solver.n = 32", "solver.n = 7"))
        assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "r")]) == EXIT_VALIDATION
        assert "line 2" in capsys.readouterr().err

    def test_missing_config_is_io_error(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "nope.cfg")]) == EXIT_IO

    def test_unresolved_run_is_runtime_error(self, tmp_path):
        cfg = tmp_path / "hot.cfg"
        cfg.write_text("solver.n = 16\nsolver.nu = 0.001\nsolver.dt = 0.01\nsolver.t_end = 1\n"
                       "ic.type = random\nic.amplitude = 5\nic.k_peak = 3\n")
        with pytest.warns(RuntimeWarning):
            assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "r")]) == EXIT_RUNTIME


class TestDiagnose:
    def test_abc_alpha_column(self, run_dir):
        assert main(["diagnose", "--run", str(run_dir), "--cylinder", "0"]) == EXIT_OK
        rows = _read_csv(run_dir / "diagnostics_cyl0.csv")
        assert list(rows[0]) == ["t", "alpha", "grad_norm_S", "criterion", "local_enstrophy", "set_volume"]
        assert len(rows) == 17
        assert all(float(r["alpha"]) <= 1e-6 for r in rows)

    def test_fan_out_matches_serial(self, run_dir, monkeypatch, tmp_path):
        assert main(["diagnose", "--run", str(run_dir), "--cylinder", "0", "1"]) == EXIT_OK
        serial = [(run_dir / f"diagnostics_cyl{i}.csv").read_bytes() for i in (0, 1)]
        monkeypatch.setenv("NSE_THREADS", "2")
        assert main(["diagnose", "--run", str(run_dir), "--cylinder", "0", "1"]) == EXIT_OK
        assert [(run_dir / f"diagnostics_cyl{i}.csv").read_bytes() for i in (0, 1)] == serial

    def test_extra_columns(self, run_dir, tmp_path):
        out = tmp_path / "d.csv"
        assert main(["diagnose", "--run", str(run_dir), "--cylinder", "0", "--extra", "--out", str(out)]) == EXIT_OK
        assert "criterion_ball" in _read_csv(out)[0]

    def test_unknown_cylinder(self, run_dir):
        assert main(["diagnose", "--run", str(run_dir), "--cylinder", "5"]) == EXIT_VALIDATION

    def test_missing_run(self, tmp_path):
        assert main(["diagnose", "--run", str(tmp_path / "none"), "--cylinder", "0",
                     "--config", str(tmp_path / "none.cfg")]) == EXIT_IO

    def test_gapped_manifest(self, run_dir, tmp_path):
        import shutil

        copy = tmp_path / "gapped"
        shutil.copytree(run_dir, copy)
        manifest = json.loads((copy / "manifest.json").read_text())
        manifest["snapshots"] = [e for e in manifest["snapshots"] if e["index"] != 3]
        for i, e in enumerate(manifest["snapshots"]):
            e["index"] = i
        (copy / "manifest.json").write_text(json.dumps(manifest))
        assert main(["diagnose", "--run", str(copy), "--cylinder", "0"]) == EXIT_IO


class TestLedger:
    def test_writes_csv_and_text(self, run_dir, capsys):
        assert main(["ledger", "--run", str(run_dir), "--cylinder", "0", "--t", "0.64", "--quadrature", "simpson"]) == EXIT_OK
        rows = _read_csv(run_dir / "ledger_cyl0_t0.64.csv")
        assert len(rows) == 1
        assert float(rows[0]["residual_est2"]) <= 1e-3
        assert rows[0]["cylinder"] == "0"
        assert "residual_major1" in (run_dir / "ledger_cyl0_t0.64.txt").read_text()
        assert "bounds:" in capsys.readouterr().out

    def test_endpoint_outside_range(self, run_dir):
        assert main(["ledger", "--run", str(run_dir), "--cylinder", "0", "--t", "5.0"]) == EXIT_VALIDATION


class TestOtherCommands:
    def test_verify_cutoff(self, tmp_path, capsys):
        cfg = tmp_path / "abc.cfg"
        cfg.write_text(ABC_CONFIG)
        assert main(["verify-cutoff", "--config", str(cfg)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "FAIL" not in out and out.count("PASS") == 16

    def test_selftest(self, capsys):
        assert main(["selftest"]) == EXIT_OK
        lines = [line for line in capsys.readouterr().out.splitlines() if line.strip()]
        assert lines and all(line.startswith("PASS") for line in lines)

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "nsbeltrami", "--help"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert "selftest" in proc.stdout
