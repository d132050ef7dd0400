import json

import numpy as np
import pytest

from secbc import ValidationError, sweep
from secbc.cli import main
from secbc.io import (
    SWEEP_HEADER,
    format_sweep_csv,
    load_spec_file,
    parse_sweep_csv,
    render_sweep_svg,
)

MIDDLE = {
    "format_version": 1,
    "x_alphabet": ["0", "1"],
    "y1": [[1.0, 0.0], [0.0, 1.0]],
    "y2": [[0.8, 0.2], [0.2, 0.8]],
    "z": [[0.9, 0.1], [0.1, 0.9]],
}
EQUAL = {
    "format_version": 1,
    "y1": [[0.9, 0.1], [0.1, 0.9]],
    "y2": [[0.9, 0.1], [0.1, 0.9]],
    "z": [[0.9, 0.1], [0.1, 0.9]],
}
GAUSSIAN = {
    "format_version": 1,
    "gaussian": {"power": 2.0, "sigma1_sq": 3.0, "sigma2_sq": 5.0, "sigmaz_sq": 4.0},
}


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_load_spec_dmc(tmp_path):
    doc = load_spec_file(write(tmp_path, "m.json", MIDDLE))
    assert doc.kind == "dmc"
    assert doc.broadcast.x_size == 2


def test_load_spec_gaussian(tmp_path):
    doc = load_spec_file(write(tmp_path, "g.json", GAUSSIAN))
    assert doc.kind == "gaussian"
    assert doc.sigmaz_sq == 4.0


def test_load_spec_rejects_mixed(tmp_path):
    bad = dict(MIDDLE)
    bad["gaussian"] = GAUSSIAN["gaussian"]
    with pytest.raises(ValidationError):
        load_spec_file(write(tmp_path, "bad.json", bad))


def test_load_spec_rejects_bad_version(tmp_path):
    bad = dict(MIDDLE)
    bad["format_version"] = 2
    with pytest.raises(ValidationError):
        load_spec_file(write(tmp_path, "bad.json", bad))


def test_load_spec_rejects_non_stochastic(tmp_path):
    bad = dict(MIDDLE)
    bad["z"] = [[0.9, 0.2], [0.1, 0.9]]
    with pytest.raises(ValidationError):
        load_spec_file(write(tmp_path, "bad.json", bad))


def test_cli_classify(tmp_path, capsys):
    assert main(["classify", write(tmp_path, "m.json", MIDDLE)]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "EavesdropperInMiddle"

    assert main(["classify", write(tmp_path, "e.json", EQUAL)]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "EqualOutputs"


def test_cli_capacity_middle(tmp_path, capsys):
    assert main(["capacity", write(tmp_path, "m.json", MIDDLE)]) == 0
    out = capsys.readouterr().out
    assert "EavesdropperInMiddle" in out
    assert "0.278071905" in out


def test_cli_wiretap(tmp_path, capsys):
    assert main(["wiretap", write(tmp_path, "m.json", MIDDLE), "--key-rate", "0.1"]) == 0
    out = capsys.readouterr().out
    assert "0.1" in out


def test_cli_gaussian(tmp_path, capsys):
    assert main(["gaussian", write(tmp_path, "g.json", GAUSSIAN)]) == 0
    out = capsys.readouterr().out
    assert "Middle" in out and "0.168109840" in out


def test_cli_gaussian_needs_sigmaz(tmp_path, capsys):
    payload = {"format_version": 1, "gaussian": {"power": 2.0, "sigma1_sq": 3.0, "sigma2_sq": 5.0}}
    assert main(["gaussian", write(tmp_path, "g.json", payload)]) == 2


def test_cli_sweep_and_files(tmp_path, capsys):
    spec = write(
        tmp_path,
        "g.json",
        {"format_version": 1, "gaussian": {"power": 2.0, "sigma1_sq": 3.0, "sigma2_sq": 5.0}},
    )
    out_csv = tmp_path / "sweep.csv"
    out_svg = tmp_path / "sweep.svg"
    code = main(
        ["sweep", spec, "--z-grid", "0.5:20:0.5", "--out", str(out_csv), "--svg", str(out_svg)]
    )
    assert code == 0
    text = out_csv.read_text()
    assert text.splitlines()[0] == SWEEP_HEADER
    rows = parse_sweep_csv(text)
    assert len(rows) == 40
    assert [r.sigmaz_sq for r in rows] == sorted(r.sigmaz_sq for r in rows)
    # byte-identical round trip
    assert format_sweep_csv(rows) == text
    svg = out_svg.read_text()
    assert svg.startswith("<svg") and "polyline" in svg


def test_cli_svg_pure_function_of_table():
    rows = sweep(2.0, 3.0, 5.0, [1.0, 3.0, 4.5, 7.0, 15.0])
    assert render_sweep_svg(rows) == render_sweep_svg(list(rows))


def test_cli_simulate_otp(tmp_path, capsys):
    code = main(
        [
            "simulate",
            write(tmp_path, "e.json", EQUAL),
            "--scheme",
            "otp",
            "--n",
            "8",
            "--seed",
            "1",
            "--trials",
            "200",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "leakage" in out and "finite-blocklength" in out


def test_cli_simulate_wiretap(tmp_path, capsys):
    spec = {
        "format_version": 1,
        "y1": [[0.9, 0.1], [0.1, 0.9]],
        "y2": [[0.9, 0.1], [0.1, 0.9]],
        "z": [[0.8, 0.2], [0.2, 0.8]],
    }
    code = main(
        [
            "simulate",
            write(tmp_path, "w.json", spec),
            "--scheme",
            "wiretap",
            "--n",
            "8",
            "--seed",
            "2",
            "--trials",
            "300",
            "--rates",
            "0.125,0.25,0.25",
        ]
    )
    assert code == 0


def test_cli_simulate_hybrid(tmp_path, capsys):
    code = main(
        [
            "simulate",
            write(tmp_path, "m.json", MIDDLE),
            "--scheme",
            "hybrid",
            "--n",
            "8",
            "--seed",
            "3",
            "--trials",
            "200",
        ]
    )
    assert code == 0


def test_cli_verify_quick(capsys):
    assert main(["verify", "lemma2", "--cases", "5", "--seed", "1"]) == 0
    assert "ok" in capsys.readouterr().out
    assert main(["verify", "fm", "--cases", "10", "--seed", "3"]) == 0
    capsys.readouterr()


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["nonsense"]) == 64
    capsys.readouterr()
    assert main(["classify", str(tmp_path / "missing.json")]) == 2
    capsys.readouterr()
    # resource refusal: per-symbol rates too big for exact leakage at n=20
    spec = write(tmp_path, "w.json", EQUAL)
    code = main(
        [
            "simulate",
            spec,
            "--scheme",
            "wiretap",
            "--n",
            "22",
            "--seed",
            "1",
            "--trials",
            "10",
            "--rates",
            "0.25,0.25,0.25",
        ]
    )
    assert code == 3
    capsys.readouterr()
    # a General-regime spec has no capacity formula
    general = {
        "format_version": 1,
        "y1": [[1.0, 0.0], [0.5, 0.5]],
        "y2": [[0.95, 0.05], [0.05, 0.95]],
        "z": [[0.5, 0.5], [0.0, 1.0]],
    }
    assert main(["capacity", write(tmp_path, "gen.json", general)]) == 2
    capsys.readouterr()


def test_cli_gaussian_file_on_dmc_command(tmp_path, capsys):
    assert main(["classify", write(tmp_path, "g.json", GAUSSIAN)]) == 2
    capsys.readouterr()
