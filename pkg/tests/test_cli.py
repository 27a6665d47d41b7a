import csv
import io
import json

import numpy as np
import pytest

from epikit.calibrate import FermiDiracParams, fermi_dirac_eval, make_synthetic, sir_fit_model
from epikit.cli import main

SUBCOMMANDS = ("simulate", "linear-seir", "spatial", "stability", "gillespie", "langevin", "fit",
               "fit-curve", "data")


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def write_cases(path, cases, deaths=None):
    deaths = np.zeros(len(cases), dtype=int) if deaths is None else deaths
    lines = ["date,cases,deaths"]
    for k, (c, d) in enumerate(zip(cases, deaths)):
        day = np.datetime64("2020-03-01") + k
        lines.append(f"{day},{int(c)},{int(d)}")
    path.write_text("\n".join(lines) + "\n")


def test_help_lists_every_subcommand(capsys):
    assert main(["--help"]) == 0
    text = capsys.readouterr().out
    for name in SUBCOMMANDS:
        assert name in text


@pytest.mark.parametrize("argv", [
    ["simulate", "--preset", "fig4", "--bogus"],
    ["nosuchcommand"],
    [],
    ["simulate"],
    ["stability", "--params", "1,2"],
])
def test_usage_errors_exit_one(argv, capsys):
    assert main(argv) == 1


def test_invalid_scenario_points_at_schema(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"model": "seir", "params": {"beta0": 1}}))
    assert main(["simulate", "--scenario", str(path)]) == 1
    assert "scenario.schema.json" in capsys.readouterr().err


def test_numerical_failure_exits_two(capsys):
    assert main(["simulate", "--preset", "fig5a", "--dt", "20"]) == 2
    assert "NegativePopulation" in capsys.readouterr().err


def test_ebola_stats_report_r0_of_five(tmp_path, capsys):
    out, stats = tmp_path / "ebola.csv", tmp_path / "stats.json"
    assert main(["simulate", "--preset", "ebola", "--t-end", "700", "--out", str(out),
                 "--stats", str(stats)]) == 0
    block = json.loads(stats.read_text())
    assert block["r0"] == pytest.approx(5.0, abs=0.01)
    table = rows(out.read_text())
    assert list(table[0]) == ["t", "S", "E", "I", "R", "D", "C", "new_cases", "new_deaths"]
    assert float(table[-1]["t"]) == pytest.approx(700.0)
    # stats go to stdout when only --out is given
    assert main(["simulate", "--preset", "ebola", "--sample", "50", "--out", str(out)]) == 0
    assert json.loads(capsys.readouterr().out)["r0"] == pytest.approx(5.0, abs=0.01)


def test_data_ma_on_constant_file(tmp_path, capsys):
    path = tmp_path / "us.csv"
    write_cases(path, [500] * 12, [7] * 12)
    assert main(["data", "ma", "--window", "7", str(path)]) == 0
    table = rows(capsys.readouterr().out)
    assert len(table) == 12
    assert {float(r["cases_ma"]) for r in table} == {500.0}
    assert {float(r["deaths_ma"]) for r in table} == {7.0}


def test_data_diff_and_ingest(tmp_path, capsys):
    path = tmp_path / "us.csv"
    write_cases(path, [10, 15, 15, 12])
    assert main(["data", "diff", str(path)]) == 0
    cap = capsys.readouterr()
    table = rows(cap.out)
    assert [int(r["new_cases"]) for r in table] == [5, 0, -3]
    assert table[-1]["correction"] == "true"
    assert "warning" in cap.err
    assert main(["data", "ingest", str(path), "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["data"]["cases"] == [10, 15, 15, 12]


def test_data_missing_file_is_input_error(tmp_path):
    assert main(["data", "ingest", str(tmp_path / "nope.csv")]) == 1


def test_turing_sweep_emits_both_curves(capsys):
    assert main(["stability", "--preset", "fig10b", "--turing-sweep"]) == 0
    table = rows(capsys.readouterr().out)
    assert list(table[0]) == ["red_nu", "red_mu", "blue_nu", "blue_mu"]
    red = np.array([[float(r["red_nu"]), float(r["red_mu"])] for r in table])
    # with lam = 1 and D_I/D_S = 0.1 the red Turing line is mu = 1 + 0.1 nu
    assert np.allclose(red[:, 1], 1 + 0.1 * red[:, 0], rtol=1e-12)
    blue = np.array([[float(r["blue_nu"]), float(r["blue_mu"])] for r in table])
    assert np.all((blue[:, 1] > 0) & (blue[:, 1] < 1))


def test_gillespie_seed_env_override(monkeypatch, capsys):
    argv = ["gillespie", "--runs", "2", "--t-end", "5"]
    monkeypatch.setenv("EPIKIT_SEED", "7")
    assert main(argv) == 0
    env_out = capsys.readouterr().out
    assert main([*argv, "--seed", "7"]) == 0
    assert capsys.readouterr().out == env_out
    monkeypatch.delenv("EPIKIT_SEED")
    assert main(argv) == 0
    assert capsys.readouterr().out != env_out
    monkeypatch.setenv("EPIKIT_SEED", "x")
    assert main(argv) == 1


def test_gillespie_workers_do_not_change_output(capsys):
    argv = ["gillespie", "--runs", "4", "--t-end", "10", "--seed", "3"]
    assert main(argv) == 0
    serial = capsys.readouterr().out
    assert main([*argv, "--workers", "2"]) == 0
    assert capsys.readouterr().out == serial


def test_langevin_modes(capsys):
    for extra in ([], ["--real-noise"], ["--no-noise"]):
        assert main(["langevin", "--t-end", "2", "--sample", "1", "--seed", "1", *extra]) == 0
        table = rows(capsys.readouterr().out)
        assert [float(r["t"]) for r in table] == [0.0, 1.0, 2.0]


def test_langevin_aborts_on_low_occupancy(capsys):
    assert main(["langevin", "--preset", "fig8a", "--t-end", "1", "--seed", "1"]) == 2
    assert "ComplexDrift" in capsys.readouterr().err


def test_linear_seir_custom_params(capsys):
    assert main(["linear-seir", "--params", "0.5,0.5,0.25,0.1", "--init", "1000,0,10",
                 "--eval-grid", "0,10,5"]) == 0
    table = rows(capsys.readouterr().out)
    assert [float(r["t"]) for r in table] == [0.0, 5.0, 10.0]


def test_fit_sir_recovers_parameters(tmp_path, capsys):
    model = sir_fit_model(1e4, 5.0, with_cases=True)
    days = np.arange(0.0, 61.0)
    cum = make_synthetic(model, [0.5, 0.25], days[1:], (2,))[:, 0]
    path = tmp_path / "sir.csv"
    write_cases(path, np.round(np.concatenate([[5.0], cum])))
    assert main(["fit", "--model", "sir", "--data", str(path), "--p0", "0.45,0.28",
                 "--population", "1e4", "--fit-space", "log", "--method", "gauss-newton"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["p"] == pytest.approx([0.5, 0.25], rel=1e-2)
    assert res["grad_check"] < 1e-4
    assert res["param_names"] == ["beta", "gamma"]


def test_fit_rejects_wrong_p0_length(tmp_path):
    path = tmp_path / "c.csv"
    write_cases(path, range(1, 30))
    assert main(["fit", "--model", "seir", "--data", str(path), "--p0", "0.5,0.2",
                 "--population", "1e4"]) == 1


def test_fit_curve_and_plot(tmp_path, capsys):
    t = np.arange(0.0, 100.0)
    path = tmp_path / "fd.csv"
    write_cases(path, np.round(fermi_dirac_eval(FermiDiracParams(10.0, 50.0, 0.08), t)))
    svg = tmp_path / "fit.svg"
    assert main(["fit-curve", "--data", str(path), "--fit-space", "log", "--plot", str(svg)]) == 0
    res = json.loads(capsys.readouterr().out)
    # counts are rounded to integers, which biases the early log residuals
    assert res["a"] == pytest.approx(10.0, rel=1e-2)
    assert res["t0"] == pytest.approx(50.0, rel=1e-2)
    text = svg.read_text()
    assert text.startswith("<svg") and "<polyline" in text


@pytest.mark.parametrize("argv", [
    ["simulate", "--preset", "fig5c", "--sample", "5"],
    ["spatial", "--preset", "fig8b", "--t-end", "10", "--sample", "5"],
    ["stability", "--preset", "fig10b"],
    ["gillespie", "--runs", "2", "--t-end", "5"],
])
def test_plot_written_for_each_command(argv, tmp_path, capsys):
    svg = tmp_path / "p.svg"
    extra = ["--stats", str(tmp_path / "s.json")] if argv[0] == "simulate" else []
    assert main([*argv, "--plot", str(svg), *extra]) == 0
    assert svg.read_text().count("<polyline") >= 2
