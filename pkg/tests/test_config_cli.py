"""Configuration validation, experiment orchestration and CLI behavior."""

import json
import math

import pytest

from lsiib import ConfigError
from lsiib.cli import main, run_experiment
from lsiib.config import parse_config

BLOCKADE = """
experiment = "blockade"

[ladder]
n_atoms = 1225
omega1 = 1e-3
omega2 = 100.0
delta = 1000.0
truncation = 2

[run]
duration = 2400.0
sample_step = 4.0
"""

CNOT = """
experiment = "cnot"

[cnot]
alpha_re = 0.7071067811865476
beta_re = 0.7071067811865476
xi_re = 1.0
eta_re = 0.0
"""

CAVITY = """
experiment = "cavity"

[cavity]
length = 40e-6
mode_diameter = 5e-6
mirror_transmittivity = 1.2e-6
"""


class TestParseConfig:
    def test_happy_path_with_derived_echo(self):
        config = parse_config(BLOCKADE)
        assert config.experiment == "blockade"
        assert config.ladder.n_atoms == 1225
        echo = config.describe()["ladder"]
        assert echo["delta"] == 1000.0
        assert echo["two_photon_rule"] == "dressed"
        assert config.run.duration == 2400.0

    def test_truncation_error_names_both_keys(self):
        bad = BLOCKADE.replace("truncation = 2", "truncation = 2000")
        with pytest.raises(ConfigError) as info:
            parse_config(bad)
        message = str(info.value)
        assert "ladder.truncation" in message
        assert "ladder.n_atoms" in message

    def test_unknown_key_rejected_with_path(self):
        bad = BLOCKADE.replace("omega2 = 100.0", "omega2 = 100.0\nomega3 = 1.0")
        with pytest.raises(ConfigError) as info:
            parse_config(bad)
        assert "ladder.omega3" in str(info.value)
        assert "unknown key" in str(info.value)

    def test_all_errors_collected(self):
        bad = "\n".join(
            [
                'experiment = "blockade"',
                "[ladder]",
                "n_atoms = 0",
                "omega1 = -1.0",
                "omega2 = 100.0",
                "delta = 0.0",
                "[run]",
                "duration = -5.0",
                "sample_step = 1.0",
            ]
        )
        with pytest.raises(ConfigError) as info:
            parse_config(bad)
        assert len(info.value.problems) >= 4

    def test_unknown_experiment(self):
        with pytest.raises(ConfigError) as info:
            parse_config('experiment = "warp-drive"')
        assert "experiment" in str(info.value)

    def test_missing_section(self):
        with pytest.raises(ConfigError) as info:
            parse_config('experiment = "cnot"')
        assert "cnot" in str(info.value)

    def test_section_not_allowed(self):
        bad = CNOT + "\n[cavity]\nlength = 1e-3\nmode_diameter = 1e-6\nmirror_transmittivity = 1e-6\n"
        with pytest.raises(ConfigError) as info:
            parse_config(bad)
        assert "not allowed" in str(info.value)

    def test_numeric_two_photon(self):
        text = BLOCKADE.replace("truncation = 2", "truncation = 2\ntwo_photon = 2.5")
        config = parse_config(text)
        assert config.two_photon == 2.5

    def test_not_toml(self):
        with pytest.raises(ConfigError):
            parse_config("this is not { toml")


class TestRunExperiment:
    def test_blockade_artifacts(self, tmp_path, capsys):
        config = parse_config(BLOCKADE)
        summary = run_experiment(config, tmp_path)
        assert "pi_time=" in summary and "max_P_C2=" in summary
        assert capsys.readouterr().out.strip() == summary
        header = (tmp_path / "trajectory.csv").read_text().splitlines()[0]
        assert header == "t,A,G1,C1,G11,C2"
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["fit"]["first_pi_time_gamma"] == pytest.approx(1795.2, rel=0.05)
        assert report["config_echo"]["ladder"]["two_photon_rule"] == "dressed"

    def test_blockade_trailing_g_columns(self, tmp_path):
        text = BLOCKADE.replace("truncation = 2", "truncation = 2\ninclude_trailing_g = true")
        run_experiment(parse_config(text), tmp_path, quiet=True)
        header = (tmp_path / "trajectory.csv").read_text().splitlines()[0]
        assert header == "t,A,G1,C1,G11,C2,G12"

    def test_cnot_report(self, tmp_path):
        summary = run_experiment(parse_config(CNOT), tmp_path, quiet=True)
        assert "fidelity=1.000000000000" in summary
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["fidelity_vs_target"] >= 1 - 1e-12
        assert report["coincidence"]["p_coincidence"] == pytest.approx(0.5, abs=1e-12)

    def test_cavity_report_matches_reference_numbers(self, tmp_path):
        run_experiment(parse_config(CAVITY), tmp_path, quiet=True)
        figures = json.loads((tmp_path / "report.json").read_text())["figures"]
        assert figures["g_gamma"] == pytest.approx(54.25, rel=1e-12)
        assert figures["finesse"] == pytest.approx(2.618e6, rel=1e-3)
        assert figures["fsr_hz"] == pytest.approx(3.7474e12, rel=1e-3)
        assert figures["gamma_hwhm_gamma"] == pytest.approx(0.119, rel=5e-3)
        assert figures["lifetime_s"] == pytest.approx(222e-9, rel=5e-3)

    def test_cavity_with_ladder_adds_feasibility(self, tmp_path):
        text = CAVITY.replace("mirror_transmittivity = 1.2e-6", "mirror_transmittivity = 1.2e-6\nn_atoms = 3000")
        text = text.replace("length = 40e-6", "length = 5e-2")
        text += """
[ladder]
n_atoms = 3000
omega1 = 8.693e-7
omega2 = 7e4
delta = 1000.0
"""
        run_experiment(parse_config(text), tmp_path, quiet=True)
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["feasibility"]["feasible"] is True
        assert report["feasibility"]["pi_time_s"] == pytest.approx(5e-5, rel=0.02)

    def test_interlink_with_ancilla(self, tmp_path):
        text = """
experiment = "interlink"

[interlink]
alpha_re = 1.0
beta_re = 0.0
with_ancilla = true
"""
        summary = run_experiment(parse_config(text), tmp_path, quiet=True)
        assert "ancilla_entropy_bits=1.000000000" in summary

    def test_ladder_spectrum(self, tmp_path):
        text = BLOCKADE.replace('experiment = "blockade"', 'experiment = "ladder-spectrum"')
        text = text.replace("[run]\nduration = 2400.0\nsample_step = 4.0", "")
        summary = run_experiment(parse_config(text), tmp_path, quiet=True)
        assert summary.startswith("dim=5")
        report = json.loads((tmp_path / "report.json").read_text())
        assert len(report["eigenvalues"]) == 5

    def test_sweep_rows_ordered(self, tmp_path):
        text = """
experiment = "sweep"

[sweep]
target = "cavity"
parameter = "length"
start = 40e-6
stop = 80e-6
count = 5

[cavity]
length = 40e-6
mode_diameter = 5e-6
mirror_transmittivity = 1.2e-6
"""
        run_experiment(parse_config(text), tmp_path, quiet=True)
        lines = (tmp_path / "sweep.csv").read_text().splitlines()
        assert lines[0].startswith("index,value,")
        assert len(lines) == 6
        indices = [int(line.split(",")[0]) for line in lines[1:]]
        assert indices == [0, 1, 2, 3, 4]

    def test_byte_identical_reruns(self, tmp_path):
        first = tmp_path / "a"
        second = tmp_path / "b"
        config = parse_config(BLOCKADE)
        run_experiment(config, first, quiet=True)
        run_experiment(config, second, quiet=True)
        assert (first / "trajectory.csv").read_bytes() == (second / "trajectory.csv").read_bytes()
        assert (first / "report.json").read_bytes() == (second / "report.json").read_bytes()


class TestMainExitCodes:
    def write(self, tmp_path, text):
        path = tmp_path / "config.toml"
        path.write_text(text)
        return str(path)

    def test_success(self, tmp_path, capsys):
        code = main(["--config", self.write(tmp_path, CNOT), "--output", str(tmp_path)])
        assert code == 0
        assert "fidelity=" in capsys.readouterr().out

    def test_quiet_suppresses_summary(self, tmp_path, capsys):
        code = main(
            ["--config", self.write(tmp_path, CNOT), "--output", str(tmp_path), "--quiet"]
        )
        assert code == 0
        assert capsys.readouterr().out == ""

    def test_missing_file_is_config_error(self, tmp_path, capsys):
        code = main(["--config", str(tmp_path / "absent.toml")])
        assert code == 2
        assert "config error" in capsys.readouterr().err

    def test_invalid_config(self, tmp_path, capsys):
        bad = BLOCKADE.replace("omega2 = 100.0", "omega2 = 100.0\nomega3 = 1.0")
        code = main(["--config", self.write(tmp_path, bad), "--output", str(tmp_path)])
        assert code == 2
        assert "ladder.omega3" in capsys.readouterr().err

    def test_physics_precondition_error(self, tmp_path, capsys):
        bad = CNOT.replace("beta_re = 0.7071067811865476", "beta_re = 0.9")
        code = main(["--config", self.write(tmp_path, bad), "--output", str(tmp_path)])
        assert code == 3
        assert "precondition" in capsys.readouterr().err

    def test_numerical_error_from_fit(self, tmp_path, capsys):
        # no weak drive: the C1 population never oscillates, the fit fails
        bad = BLOCKADE.replace("omega1 = 1e-3", "omega1 = 0.0")
        code = main(["--config", self.write(tmp_path, bad), "--output", str(tmp_path)])
        assert code == 4
        assert "numerical error" in capsys.readouterr().err
