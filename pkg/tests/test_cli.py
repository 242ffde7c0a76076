import json
import math

import numpy as np
import pytest

from kerrcubic import cli


def run(args):
    return cli.dispatch(list(args))


class TestDispatchBasics:
    def test_unknown_subcommand(self, capsys):
        assert run(["definitely-not-a-command"]) == 2

    def test_no_subcommand_prints_usage(self, capsys):
        assert run([]) == 2
        assert "usage" in capsys.readouterr().err.lower()

    def test_error_json_on_stderr(self, tmp_path, capsys):
        code = run(["soliton-fom", "--out", str(tmp_path)])  # neither table nor CSV
        assert code == 2
        doc = json.loads(capsys.readouterr().err.strip())
        assert doc["error"]["type"] == "ConfigError"

    def test_unsupported_configuration_exit_code(self, tmp_path, capsys):
        # trotter with loss is an unsupported combination
        code = run(["trotter", "--out", str(tmp_path), "--lambda-db", "6",
                    "--alpha", "3", "--fock", "64", "--chi-over-kappa", "1e-4",
                    "--values", "2", "--input", "vacuum"])
        assert code == 2
        doc = json.loads(capsys.readouterr().err.strip())
        assert doc["error"]["type"] == "UnsupportedConfigurationError"


class TestConfigFile:
    def test_unknown_key_reports_line(self, tmp_path, capsys):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("alpha = 10\nnot_a_key = 3\n")
        code = run(["gate", "--config", str(cfgfile), "--out", str(tmp_path)])
        assert code == 2
        msg = json.loads(capsys.readouterr().err.strip())["error"]["message"]
        assert ":2:" in msg and "not_a_key" in msg

    def test_bad_line_shape(self, tmp_path, capsys):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("alpha 10\n")
        assert run(["gate", "--config", str(cfgfile), "--out", str(tmp_path)]) == 2

    def test_comments_and_flag_override(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text(
            "# a comment\nlambda_db = 6\nalpha = 3\ngamma = 0.1\nfock = 48\n"
            "input = vacuum\n"
        )
        out = tmp_path / "o"
        assert run(["gate", "--config", str(cfgfile), "--out", str(out),
                    "--alpha", "4"]) == 0
        sidecar = json.loads((out / "gate_result.config.json").read_text())
        assert sidecar["resolved_config"]["gate_config"]["alpha"] == 4.0
        assert sidecar["schema_version"] == cli.SCHEMA_VERSION

    def test_env_var_out_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("KERRCUBIC_OUT", str(tmp_path / "envout"))
        assert run(["soliton-fom", "--builtin-table"]) == 0
        assert (tmp_path / "envout" / "soliton_fom.csv").exists()


class TestSolitonFom:
    def test_builtin_table_values(self, tmp_path):
        assert run(["soliton-fom", "--builtin-table", "--out", str(tmp_path)]) == 0
        header, rows = cli.read_csv(tmp_path / "soliton_fom.csv")
        assert header[-1] == "chi_over_kappa"
        vals = {r[0]: float(r[-1]) for r in rows}
        assert abs(vals["silicon-on-insulator"] - 3.456e-6) < 0.01e-6
        assert abs(vals["algaas-on-insulator"] - 2.254e-5) < 0.01e-5
        assert abs(vals["si3n4"] - 5.069e-6) < 0.01e-6

    def test_materials_csv_roundtrip(self, tmp_path):
        src = tmp_path / "mats.csv"
        cli.write_csv(src, ["name", "gamma_nl", "alpha_att_dB_per_m",
                            "wavelength_m", "t_fwhm_s"],
                      [("custom", 100.0, 10.0, 1.5e-6, 1e-13)])
        assert run(["soliton-fom", "--materials", str(src), "--out", str(tmp_path)]) == 0
        _, rows = cli.read_csv(tmp_path / "soliton_fom.csv")
        assert rows[0][0] == "custom"
        assert float(rows[0][-1]) > 0

    def test_materials_csv_bad_header(self, tmp_path):
        src = tmp_path / "mats.csv"
        src.write_text("a,b\n1,2\n")
        assert run(["soliton-fom", "--materials", str(src), "--out", str(tmp_path)]) == 2


class TestHeffExpand:
    def test_counterterm_table(self, tmp_path):
        db = 20.0 * math.log10(2.0)
        assert run(["heff-expand", "--chi", "1", "--lambda-db", str(db),
                    "--alpha", "8", "--out", str(tmp_path)]) == 0
        header, rows = cli.read_csv(tmp_path / "heff_expand.csv")
        assert header == ["monomial", "coefficient-real", "coefficient-imag"]
        table = {r[0]: complex(float(r[1]), float(r[2])) for r in rows}
        # counter-terms cancel the pure x and x^2 monomials identically
        assert "x^1 p^0" not in table
        assert "x^2 p^0" not in table
        assert abs(table["x^3 p^0"].real + 2.0**3 * 8.0 / math.sqrt(2.0)) < 1e-9

    def test_explicit_detuning_and_drive(self, tmp_path):
        db = 20.0 * math.log10(2.0)
        assert run(["heff-expand", "--chi", "1", "--lambda-db", str(db),
                    "--alpha", "8", "--delta", "0.3", "--beta", "0.1",
                    "--out", str(tmp_path)]) == 0
        _, rows = cli.read_csv(tmp_path / "heff_expand.csv")
        table = {r[0]: float(r[1]) for r in rows}
        # x^2 coefficient: (lam^2/2)(-3 chi a^2 + chi + delta)
        want = 0.5 * 4.0 * (-3 * 64.0 + 1.0 + 0.3)
        assert abs(table["x^2 p^0"] - want) < 1e-9


class TestStateAndGate:
    def test_state_amplitudes(self, tmp_path):
        assert run(["state", "--input", "fock:2", "--fock", "16",
                    "--out", str(tmp_path)]) == 0
        _, rows = cli.read_csv(tmp_path / "state_amplitudes.csv")
        amps = {int(r[0]): complex(float(r[1]), float(r[2])) for r in rows}
        assert abs(amps[2] - 1.0) < 1e-12
        assert len(rows) == 16

    def test_state_wigner_grid(self, tmp_path):
        assert run(["state", "--input", "vacuum", "--fock", "24", "--wigner",
                    "--out", str(tmp_path)]) == 0
        header, rows = cli.read_csv(tmp_path / "state_wigner.csv")
        assert header == ["x", "p", "w"]
        center = [r for r in rows if float(r[0]) == 0.0 and float(r[1]) == 0.0]
        assert abs(float(center[0][2]) - 1.0 / math.pi) < 1e-8

    def test_gate_json(self, tmp_path):
        assert run(["gate", "--lambda-db", "6", "--alpha", "3", "--gamma", "0.05",
                    "--fock", "64", "--input", "vacuum", "--out", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "gate_result.json").read_text())
        assert 0.0 <= doc["error"] <= 1.0
        assert doc["tau"] > 0

    def test_optimize_alpha_json(self, tmp_path):
        assert run(["optimize-alpha", "--lambda-db", "8", "--gamma", "0.1",
                    "--fock", "96", "--input", "squeezed:0.5",
                    "--bracket", "8,60", "--out", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "optimize_alpha.json").read_text())
        assert 8.0 <= doc["alpha"] <= 60.0

    def test_sweep_lambda_csv(self, tmp_path):
        assert run(["sweep-lambda", "--values", "8,10", "--gamma", "0.1",
                    "--fock", "64", "--input", "squeezed:0.5",
                    "--alpha-mode", "cube", "--out", str(tmp_path)]) == 0
        header, rows = cli.read_csv(tmp_path / "sweep_lambda.csv")
        assert len(rows) == 2
        assert float(rows[0][header.index("error")]) > float(rows[1][header.index("error")])

    def test_sweep_noise_csv(self, tmp_path):
        assert run(["sweep-noise", "--noise", "dtheta", "--values", "1e-4",
                    "--lambda-db-values", "10", "--gamma", "0.1", "--fock", "64",
                    "--input", "squeezed:0.5", "--out", str(tmp_path)]) == 0
        header, rows = cli.read_csv(tmp_path / "sweep_noise.csv")
        assert "excess" in header

    def test_trotter_csv(self, tmp_path):
        assert run(["trotter", "--lambda-db", "6", "--alpha", "3", "--gamma", "0.05",
                    "--fock", "96", "--values", "1,2", "--input", "vacuum",
                    "--out", str(tmp_path)]) == 0
        _, rows = cli.read_csv(tmp_path / "trotter.csv")
        assert len(rows) == 2
        # difference to the continuous scheme shrinks with more steps
        assert float(rows[1][2]) <= float(rows[0][2])


class TestEmitDeterminism:
    def test_csv_roundtrip_bit_exact(self, tmp_path):
        rows = [(0.1, -1.2345678901234567e-8, 3), (2.0, math.pi, -7)]
        p = tmp_path / "t.csv"
        cli.write_csv(p, ["a", "b", "c"], rows)
        _, parsed = cli.read_csv(p)
        for row, orig in zip(parsed, rows):
            assert float(row[0]) == orig[0]
            assert float(row[1]) == orig[1]
            assert int(row[2]) == orig[2]

    def test_reruns_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        args = ["gate", "--lambda-db", "6", "--alpha", "3", "--gamma", "0.05",
                "--fock", "48", "--input", "squeezed:0.5", "--chi-over-kappa", "0.1"]
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b)]) == 0
        assert (a / "gate_result.json").read_bytes() == (b / "gate_result.json").read_bytes()

    def test_emit_kinds(self, tmp_path):
        cli.emit("json", {"x": 1.5}, tmp_path / "d.json")
        assert json.loads((tmp_path / "d.json").read_text()) == {"x": 1.5}
        cli.emit("grid", {"xs": np.array([0.0]), "ps": np.array([1.0]),
                          "w": np.array([[0.25]])}, tmp_path / "g.csv")
        assert cli.read_csv(tmp_path / "g.csv")[1] == [["0", "1", "0.25"]]
        with pytest.raises(ValueError):
            cli.emit("blob", {}, tmp_path / "x")

    def test_empty_table_is_header_only(self, tmp_path):
        p = tmp_path / "e.csv"
        cli.write_csv(p, ["a", "b"], [])
        assert p.read_text() == "a,b\n"


class TestReproduce:
    def test_table1(self, tmp_path):
        assert run(["reproduce", "table1", "--out", str(tmp_path)]) == 0
        _, rows = cli.read_csv(tmp_path / "table1.csv")
        assert len(rows) == 3
        assert (tmp_path / "table1.config.json").exists()

    @pytest.mark.parametrize("recipe", cli.RECIPES)
    def test_dry_run_writes_sidecar(self, tmp_path, recipe):
        assert run(["reproduce", recipe, "--dry-run", "--out", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / f"{recipe}.config.json").read_text())
        assert doc["resolved_config"]["recipe"] == recipe

    def test_fig4_runs(self, tmp_path):
        assert run(["reproduce", "fig4", "--out", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "fig4.json").read_text())
        assert abs(doc["fidelity"] - 0.978) < 0.005
        assert doc["wigner_min"] < 0

    def test_unknown_recipe(self, tmp_path):
        assert run(["reproduce", "fig99", "--out", str(tmp_path)]) == 2
