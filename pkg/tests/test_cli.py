import csv
import io
import json
import math
import subprocess
import sys

import pytest

from egcs.cli import RunConfig, main, parse_int_range
from egcs.metrology import fit_exponent


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_int_range():
    assert parse_int_range("1..4") == [1, 2, 3, 4]
    assert parse_int_range("0,2,5") == [0, 2, 5]
    assert parse_int_range("7") == [7]


def test_sweep_noon(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "noon", "--n", "1..10")
    assert code == 0
    r = rows(out)
    assert len(r) == 10
    for row in r:
        assert float(row["delta_phi"]) == pytest.approx(1 / int(row["n"]), abs=1e-12)
    assert "\r" not in out


def test_sweep_egcs_monotone(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "egcs", "--n", "2", "--alpha-max", "3", "--grid", "60")
    assert code == 0
    nb = [float(row["N_bar"]) for row in rows(out)]
    assert len(nb) == 60
    assert all(b > a for a, b in zip(nb, nb[1:]))
    for row in rows(out):
        assert float(row["shot_noise"]) == pytest.approx(1 / math.sqrt(float(row["N_bar"])), rel=1e-15)


def test_sweep_json_schema(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "ecs", "--grid", "4", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["command"] == "sweep" and len(doc["records"]) == 4
    assert list(doc["records"][0]) == doc["columns"]


def test_empty_grid_exit_2(capsys):
    code, out, err = run(capsys, "sweep", "--family", "egcs", "--grid", "0")
    assert code == 2 and out == "" and "grid" in err


@pytest.mark.parametrize("argv", [
    ["sweep", "--family", "cat"],
    ["sweep", "--family", "ecs", "--n", "1"],
    ["sweep", "--family", "egcs", "--alpha-max", "-1"],
    ["fit", "--grid", "2"],
    ["compare", "--nbar-range", "3,2"],
])
def test_config_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_adequacy_exit_3(capsys):
    code, _, err = run(capsys, "sweep", "--family", "egcs", "--n", "1", "--alpha-max", "3", "--grid", "5",
                       "--dim", "10")
    assert code == 3 and err


def test_degenerate_fit_exit_4(capsys):
    # every alpha in a one-point-wide grid collapses onto the same N-bar
    code, _, err = run(capsys, "fit", "--n", "1", "--alpha-max", "0.05", "--grid", "3")
    assert code == 4 and "N-bar" in err


@pytest.mark.parametrize("model", ["unit", "power"])
def test_fit_self_test(capsys, model):
    code, out, _ = run(capsys, "fit", "--self-test", "--model", model)
    assert code == 0
    assert float(rows(out)[0]["x"]) == pytest.approx(1.06, abs=1e-9)


def test_fit_csv_round_trip(capsys, tmp_path):
    sweep_path = tmp_path / "sweep.csv"
    assert main(["sweep", "--family", "egcs", "--n", "3", "--alpha-max", "2", "--grid", "15",
                 "-o", str(sweep_path)]) == 0
    data = rows(sweep_path.read_text())
    code, out, _ = run(capsys, "fit", "--n", "3", "--alpha-max", "2", "--grid", "15")
    assert code == 0
    fitted = rows(out)[0]
    refit = fit_exponent(n_bar=[float(r["N_bar"]) for r in data],
                         delta_phi=[float(r["delta_phi"]) for r in data], model="unit")
    assert refit.x == pytest.approx(float(fitted["x"]), abs=1e-12)
    assert refit.rss == pytest.approx(float(fitted["rss"]), abs=1e-12)


def test_fit_n10_alpha5(capsys):
    code, out, _ = run(capsys, "fit", "--n", "10")
    assert code == 0
    assert float(rows(out)[0]["x"]) == pytest.approx(1.06, abs=0.05)


def test_fit_n0_alpha5_pins(capsys):
    # ECS on the default grid falls below 1 for both models
    _, out, _ = run(capsys, "fit", "--n", "0")
    assert float(rows(out)[0]["x"]) == pytest.approx(0.852, abs=1e-3)
    _, out, _ = run(capsys, "fit", "--n", "0", "--model", "power")
    assert float(rows(out)[0]["x"]) == pytest.approx(0.722, abs=1e-3)


def test_verify_formulas_rows(capsys):
    code, out, _ = run(capsys, "verify-formulas", "--n", "0,1", "--alphas", "0,1")
    assert code == 0
    table = {(r["quantity"], int(r["n"]), float(r["alpha"])): r for r in rows(out)}
    assert float(table[("normalization", 0, 0.0)]["abs_dev"]) == 0.0
    assert float(table[("variance_h", 1, 0.0)]["printed"]) == 0.25
    assert float(table[("variance_h", 1, 0.0)]["numerical"]) == pytest.approx(0.25, abs=1e-15)
    dev = table[("variance_h", 1, 1.0)]
    assert float(dev["printed"]) == pytest.approx(1.0893038296032456, abs=1e-12)
    assert float(dev["numerical"]) == pytest.approx(1.2793525126025083, abs=1e-12)


def test_generate_pbs(capsys):
    code, out, _ = run(capsys, "generate", "--scheme", "pbs", "--alpha", "0")
    rep = json.loads(out)
    assert code == 0 and rep["fidelity_to_target"] >= 1 - 1e-9
    assert rep["success_probability"] == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("scheme", ["beam-splitter", "bs-appendix"])
def test_generate_beam_splitter_has_flag(capsys, scheme):
    code, out, _ = run(capsys, "generate", "--scheme", scheme, "--alpha", "1")
    rep = json.loads(out)
    assert code == 0 and "discrepancy" in rep
    assert rep["scheme"] == "beam-splitter"


def test_compare_columns(capsys):
    code, out, _ = run(capsys, "compare", "--grid", "20")
    assert code == 0
    r = rows(out)
    assert len(r) == 20
    assert set(r[0]) == {"N_bar", "noon", "ecs", "egcs_1", "egcs_2", "shot_noise", "ordered"}
    for row in r:
        assert float(row["ecs"]) < float(row["noon"])


def test_run_config_validate():
    RunConfig("sweep").validate()
    with pytest.raises(ValueError):
        RunConfig("sweep", format="xml").validate()


def test_determinism_across_processes(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.csv"
        subprocess.run([sys.executable, "-m", "egcs", "verify-formulas", "-o", str(path)], check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
