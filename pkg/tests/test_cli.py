"""Command line interface: config parsing, subcommands, exit codes,
determinism of outputs."""

import os
import subprocess
import sys

import numpy as np
import pytest

from jetwave.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_PINCH,
    EXIT_VERIFY,
    _ConfigProblem,
    load_config,
    main,
)

BASE = """
[grid]
n_theta = 16
n_z = 16
n_rho = 24

[physics]
r = 1.0
sigma = 1.0
"""


def write(tmp_path, text, name="c.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestConfig:
    def test_parses(self, tmp_path):
        cfg = load_config(write(tmp_path, BASE + """
[ic]
mode.1 = 1e-3 2 0 eta 0.0
mode.2 = 5e-4 0 1 psi 0.3

[evolution]
dt = auto
t_final = 0.5
"""))
        assert cfg["n_theta"] == 16
        assert cfg["modes"] == [(1e-3, 2, 0.0, "eta", 0.0),
                                (5e-4, 0, 1.0, "psi", 0.3)]
        assert cfg["t_final"] == 0.5

    def test_missing_key_named(self, tmp_path):
        path = write(tmp_path, "[grid]\nn_theta = 16\nn_z = 16\nn_rho = 8\n"
                               "[physics]\nr = 1.0\n")
        with pytest.raises(_ConfigProblem, match="sigma"):
            load_config(path)

    def test_unknown_key_named(self, tmp_path):
        path = write(tmp_path, BASE + "[evolution]\nstep_size = 0.1\n")
        with pytest.raises(_ConfigProblem, match="step_size"):
            load_config(path)

    def test_unknown_section_named(self, tmp_path):
        path = write(tmp_path, BASE + "[turbo]\nx = 1\n")
        with pytest.raises(_ConfigProblem, match="turbo"):
            load_config(path)

    def test_bad_mode_target(self, tmp_path):
        path = write(tmp_path, BASE + "[ic]\nmode.1 = 1e-3 2 0 phi 0.0\n")
        with pytest.raises(_ConfigProblem, match="target"):
            load_config(path)

    def test_pi_syntax(self, tmp_path):
        cfg = load_config(write(tmp_path, BASE.replace(
            "n_rho = 24", "n_rho = 24\nz_period = 4pi")))
        assert cfg["z_period"] == pytest.approx(4 * np.pi)


class TestExitCodes:
    def test_missing_key_exit_2(self, tmp_path, capsys):
        path = write(tmp_path, "[grid]\nn_theta = 16\nn_z = 16\nn_rho = 8\n"
                               "[physics]\nr = 1.0\n")
        code = main(["simulate", "--config", path, "--out", str(tmp_path)])
        assert code == EXIT_CONFIG
        assert "sigma" in capsys.readouterr().err

    def test_equilibrium_simulate_exit_0(self, tmp_path):
        path = write(tmp_path, BASE + "[evolution]\nt_final = 0.05\n")
        code = main(["simulate", "--config", path, "--out", str(tmp_path),
                     "--quiet"])
        assert code == EXIT_OK
        series = (tmp_path / "run_series.csv").read_text().splitlines()
        assert series[0] == ("t,E_k,E_p,H_total,volume,min_eta,max_eta,"
                             "mean_psi,elliptic_iters")
        # equilibrium: all-zero-drift time series
        for line in series[1:]:
            cells = line.split(",")
            assert float(cells[1]) == 0.0 and float(cells[3]) == 0.0

    def test_pinch_off_exit_4(self, tmp_path):
        path = write(tmp_path, BASE + """
[ic]
mode.1 = -0.9995 0 1 eta 0.0

[evolution]
dt = 0.01
t_final = 0.5
""")
        code = main(["simulate", "--config", path, "--out", str(tmp_path),
                     "--quiet"])
        assert code == EXIT_PINCH
        manifest = (tmp_path / "run_manifest.txt").read_text()
        assert "status=pinch_off" in manifest
        assert "t_last_valid=" in manifest

    def test_verify_fault_exit_3(self, tmp_path, capsys):
        path = write(tmp_path, BASE + "\n[verify]\nheavy = false\n"
                                      "structure_states = 2\n"
                                      "fault = lambda0_sign\n")
        code = main(["verify", "--config", path, "--out", str(tmp_path),
                     "--quiet"])
        assert code == EXIT_VERIFY
        assert "symbol.im_lambda0" in capsys.readouterr().err

    def test_verify_underresolved_bessel_named(self, tmp_path, capsys):
        path = write(tmp_path, BASE.replace("n_rho = 24", "n_rho = 6")
                     + "\n[verify]\nheavy = false\nstructure_states = 2\n")
        code = main(["verify", "--config", path, "--out", str(tmp_path),
                     "--quiet"])
        assert code == EXIT_VERIFY
        assert "dtn.bessel_accuracy" in capsys.readouterr().err


class TestDtnCommand:
    def test_pure_mode_dump(self, tmp_path):
        path = write(tmp_path, BASE + "[ic]\nmode.1 = 1.0 3 0 psi 0.0\n")
        code = main(["dtn", "--config", path, "--out", str(tmp_path),
                     "--quiet"])
        assert code == EXIT_OK
        rows = (tmp_path / "run_dtn_fields.csv").read_text().splitlines()
        header = rows[0].split(",")
        gi = header.index("G")
        ti = header.index("theta")
        worst = 0.0
        for line in rows[1:]:
            cells = [float(x) for x in line.split(",")]
            worst = max(worst, abs(cells[gi] - 3.0 * np.cos(3 * cells[ti])))
        assert worst < 1e-8
        manifest = (tmp_path / "run_dtn_manifest.txt").read_text()
        assert "gradient_identity_residual=" in manifest

    def test_constant_trace_all_zero(self, tmp_path):
        path = write(tmp_path, BASE + "[ic]\nmode.1 = 2.0 0 0 psi 0.0\n")
        main(["dtn", "--config", path, "--out", str(tmp_path), "--quiet"])
        rows = (tmp_path / "run_dtn_fields.csv").read_text().splitlines()
        for line in rows[1:]:
            cells = [float(x) for x in line.split(",")]
            assert max(abs(c) for c in cells[2:]) < 1e-10


class TestDispersionCommand:
    def test_signs_and_accuracy(self, tmp_path):
        path = write(tmp_path, BASE.replace("sigma = 1.0", "sigma = 2.0")
                     + "\n[dispersion]\nmodes = 2 0; 3 0; 0 2\n")
        code = main(["dispersion", "--config", path, "--out", str(tmp_path),
                     "--quiet"])
        assert code == EXIT_OK
        rows = (tmp_path / "run_dispersion.csv").read_text().splitlines()[1:]
        for line in rows:
            m, k, a, b, rel = (float(x) for x in line.split(","))
            assert rel < 1e-8
            assert a > 0.0  # k = 0 scans of m >= 2 and axial kR > 1: stable


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        path = write(tmp_path, BASE + """
[ic]
mode.1 = 1e-3 2 1 eta 0.0

[evolution]
t_final = 0.05
""")
        main(["simulate", "--config", path, "--out", str(tmp_path / "a"),
              "--seed", "7", "--quiet"])
        main(["simulate", "--config", path, "--out", str(tmp_path / "b"),
              "--seed", "7", "--quiet"])
        a = (tmp_path / "a" / "run_series.csv").read_bytes()
        b = (tmp_path / "b" / "run_series.csv").read_bytes()
        assert a == b

    def test_seventeen_digit_floats(self, tmp_path):
        path = write(tmp_path, BASE + "[evolution]\nt_final = 0.05\n")
        main(["simulate", "--config", path, "--out", str(tmp_path),
              "--quiet"])
        manifest = (tmp_path / "run_manifest.txt").read_text()
        dt_line = [l for l in manifest.splitlines() if l.startswith("dt=")][0]
        assert len(dt_line.split("=")[1].replace(".", "").replace("-", "")
                   .lstrip("0")) >= 15


class TestEntryPoint:
    def test_console_script(self, tmp_path):
        path = write(tmp_path, "[grid]\nn_theta = 16\nn_z = 16\nn_rho = 8\n"
                               "[physics]\nr = 1.0\n")
        proc = subprocess.run(
            [sys.executable, "-m", "jetwave.cli", "simulate",
             "--config", path, "--out", str(tmp_path)],
            capture_output=True, text=True,
            env={**os.environ, "JETWAVE_THREADS": "1"})
        assert proc.returncode == EXIT_CONFIG
        assert "sigma" in proc.stderr
