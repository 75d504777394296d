"""Command-line interface: every subcommand plus the exit-code contract."""

import numpy as np
import pytest

import abmemu.cli as cli
from abmemu.errors import NumericalError
from abmemu.pipeline import read_design_csv, read_runs_csv


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


def test_design_command(workdir, capsys):
    out = workdir / "design.csv"
    code = cli.main(["design", "--method", "lptau", "--n", "8",
                     "--out", str(out)])
    assert code == 0
    names, matrix = read_design_csv(out)
    assert matrix.shape == (8, 10)
    assert len(names) == 10
    capsys.readouterr()


def test_design_lhs_seeded(workdir):
    a = workdir / "lhs_a.csv"
    b = workdir / "lhs_b.csv"
    assert cli.main(["design", "--method", "maximinLHS", "--n", "6",
                     "--seed", "3", "--lhs-iterations", "200",
                     "--out", str(a)]) == 0
    assert cli.main(["design", "--method", "maximinLHS", "--n", "6",
                     "--seed", "3", "--lhs-iterations", "200",
                     "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_command(workdir, capsys):
    design = workdir / "sim_design.csv"
    runs = workdir / "runs.csv"
    assert cli.main(["design", "--method", "lptau", "--n", "5",
                     "--out", str(design)]) == 0
    code = cli.main(["simulate", "--design", str(design), "--seed", "2",
                     "--out", str(runs), "--quiet"])
    assert code == 0
    out = capsys.readouterr().out
    assert "5 runs" in out
    names, records = read_runs_csv(runs)
    assert len(records) == 5
    assert all(r.output >= 0 for r in records)


def test_train_and_main_effects_chain(workdir, runs_csv, capsys):
    runs = runs_csv
    model_path = workdir / "gbt.npz"
    code = cli.main(["train", "--runs", str(runs), "--method", "gbt",
                     "--out", str(model_path)])
    assert code == 0
    assert "test_mse" in capsys.readouterr().out
    assert model_path.exists()

    effects = workdir / "effects.csv"
    code = cli.main(["main-effects", "--model", str(model_path),
                     "--grid", "5", "--samples", "100",
                     "--out", str(effects)])
    assert code == 0
    lines = effects.read_text().splitlines()
    assert lines[0] == "parameter,grid_value,effect"
    assert len(lines) == 1 + 10 * 5
    capsys.readouterr()


def test_pca_command(workdir, runs_csv, capsys):
    runs = runs_csv
    out = workdir / "pca.csv"
    code = cli.main(["pca", "--runs", str(runs), "--out", str(out)])
    assert code == 0
    assert "retained" in capsys.readouterr().out
    lines = out.read_text().splitlines()
    assert lines[0].startswith("component,eigenvalue,")
    assert len(lines) == 1 + 11


def test_compare_command(workdir, runs_csv, capsys):
    runs = runs_csv
    config = workdir / "study.cfg"
    config.write_text("methods = linear, knn\n"
                      "mainEffectsGrid = 5\n"
                      "mainEffectsSamples = 100\n")
    out_dir = workdir / "report"
    code = cli.main(["compare", "--runs", str(runs), "--config",
                     str(config), "--out", str(out_dir), "--quiet"])
    assert code == 0
    produced = {p.name for p in out_dir.iterdir()}
    assert "comparison.csv" in produced
    assert "spider.csv" in produced
    assert "report.json" in produced
    assert "pred_vs_actual_linear.csv" in produced
    lines = (out_dir / "comparison.csv").read_text().splitlines()
    assert lines[0] == "scenario,method,runtime_s,mse"
    assert len(lines) == 3
    capsys.readouterr()


def test_usage_errors_exit_1(workdir, capsys):
    assert cli.main([]) == 1
    assert cli.main(["frobnicate"]) == 1
    assert cli.main(["design", "--method", "lptau", "--n", "8"]) == 1
    assert cli.main(["design", "--method", "halton", "--n", "8",
                     "--out", str(workdir / "x.csv")]) == 1
    assert cli.main(["train", "--runs", "r.csv", "--method", "ridge",
                     "--out", "m.npz"]) == 1
    capsys.readouterr()


def test_data_errors_exit_2(workdir, capsys):
    assert cli.main(["simulate", "--design", str(workdir / "missing.csv"),
                     "--out", str(workdir / "o.csv")]) == 2
    assert cli.main(["pca", "--runs", str(workdir / "missing.csv"),
                     "--out", str(workdir / "o.csv")]) == 2
    bad_model = workdir / "bad_model.npz"
    np.savez(bad_model, junk=np.zeros(2))
    assert cli.main(["main-effects", "--model", str(bad_model),
                     "--out", str(workdir / "o.csv")]) == 2
    err = capsys.readouterr().err
    assert "error" in err


def test_numerical_failure_exit_3(workdir, runs_csv, monkeypatch, capsys):
    runs = runs_csv

    def explode(*args, **kwargs):
        raise NumericalError("synthetic instability")

    monkeypatch.setattr(cli, "pca_decompose", explode)
    code = cli.main(["pca", "--runs", str(runs),
                     "--out", str(workdir / "o.csv")])
    assert code == 3
    assert "numerical failure" in capsys.readouterr().err
