import json

import pytest

from usc_rabi.cli import main, selftest

DYNAMICS_SMALL = """
kind = rabi_dynamics

[system]
geometry = half_wave
omega1_ghz = 4.0
delta_ghz = 2.25
ip2_na = 630.0
g1_over_omega1 = 0.15
n_max = 10

[dissipation]
kappa_over_omega1 = 1.8e-4
gamma_over_omega1 = 1.8e-4

[drive]
resonance = two_photon
amplitude_area = 3.4
tau_omega1 = 5.0

[run]
periods = 0.5
samples = 60
"""


class TestSelftest:
    def test_all_oracles_pass(self, capsys):
        assert selftest() == 0
        out = capsys.readouterr().out
        assert out.count("[pass]") == 5
        assert "FAIL" not in out


class TestRun:
    def test_run_small_scenario(self, tmp_path, capsys):
        scenario = tmp_path / "small.scenario"
        scenario.write_text(DYNAMICS_SMALL)
        code = main(["run", str(scenario), "--out", str(tmp_path / "out")])
        assert code == 0
        assert (tmp_path / "out" / "dynamics.csv").exists()
        assert (tmp_path / "out" / "manifest.json").exists()

    def test_run_bundled_fig7(self, tmp_path):
        code = main(["run", "fig7", "--out", str(tmp_path / "fig7")])
        assert code == 0
        rows = (tmp_path / "fig7" / "comparison.csv").read_text().splitlines()
        assert rows[0] == ("g_over_omega_q,analytic_2omega_over_omega_q,"
                           "numeric_2omega_over_omega_q,rel_deviation")
        assert len(rows) == 9

    def test_parse_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.scenario"
        bad.write_text("kind = rabi_dynamics\n[drive]\nampltude = 3\n")
        code = main(["run", str(bad), "--out", str(tmp_path / "out")])
        assert code == 2
        assert "ampltude" in capsys.readouterr().err

    def test_validation_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.scenario"
        bad.write_text(DYNAMICS_SMALL.replace("resonance = two_photon",
                                              "resonance = six_photon"))
        code = main(["run", str(bad), "--out", str(tmp_path / "out")])
        assert code == 3

    def test_missing_file(self, capsys):
        assert main(["run", "does_not_exist.scenario"]) == 1

    def test_invariant_breach_exit_code(self, tmp_path, capsys):
        # A convergence check at a cutoff that truncates the physics must
        # exit 5 after still writing its artifacts.
        text = DYNAMICS_SMALL.replace("kind = rabi_dynamics",
                                      "kind = convergence_check")
        text = text.replace("n_max = 10", "n_max = 8")
        scenario = tmp_path / "tight.scenario"
        scenario.write_text(text)
        code = main(["run", str(scenario), "--out", str(tmp_path / "out")])
        assert code == 5
        assert (tmp_path / "out" / "convergence.csv").exists()

    def test_nmax_override_flag(self, tmp_path):
        scenario = tmp_path / "small.scenario"
        scenario.write_text(DYNAMICS_SMALL)
        code = main(["run", str(scenario), "--out", str(tmp_path / "out"),
                     "--nmax", "9"])
        assert code == 0
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["resolved"]["system"]["n_max"] == 9

    def test_emit_plot_script(self, tmp_path):
        code = main(["run", "fig7", "--out", str(tmp_path / "out"),
                     "--emit-plot-script"])
        assert code == 0
        script = (tmp_path / "out" / "plot_artifacts.py").read_text()
        assert "matplotlib" in script


class TestConverge:
    def test_converge_small_dynamics(self, tmp_path, capsys):
        scenario = tmp_path / "small.scenario"
        scenario.write_text(DYNAMICS_SMALL)
        code = main(["converge", str(scenario)])
        assert code == 0
        assert "convergence gate passed" in capsys.readouterr().out

    def test_converge_rejects_protocol_kind(self, capsys):
        code = main(["converge", "ghz"])
        assert code == 3


@pytest.mark.slow
class TestBundledScenariosEndToEnd:
    def test_every_bundled_scenario_runs(self, tmp_path):
        import time

        for name in ("fig1b", "fig1c", "fig3", "fig4b", "fig5",
                     "fig_dephasing", "fig7", "ghz"):
            started = time.monotonic()
            code = main(["run", name, "--out", str(tmp_path / name)])
            elapsed = time.monotonic() - started
            assert code == 0, name
            assert elapsed < 300.0, (name, elapsed)
            assert (tmp_path / name / "manifest.json").exists()

        # The two-photon dynamics CSV carries its advertised first peak.
        rows = (tmp_path / "fig3" / "dynamics.csv").read_text().splitlines()
        header = rows[0].split(",")
        col = header.index("photon_number")
        photon = [float(r.split(",")[col]) for r in rows[1:]]
        assert 1.8 <= max(photon) <= 2.2

        # The comparison table's analytic column follows the quadratic law.
        rows = (tmp_path / "fig7" / "comparison.csv").read_text().splitlines()
        analytic = [float(r.split(",")[1]) for r in rows[1:]]
        assert analytic == sorted(analytic)
