import csv
import json

import numpy as np
import pytest

from dualseries.cli import main, parse_model_text
from dualseries.errors import InvalidParam, WrongModelKind


def model_file(tmp_path, text, name="model.txt"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config-hash: ")
    rows = list(csv.reader(lines[1:]))
    return rows[0], np.array(rows[1:], dtype=float)


def test_propagate_schwinger(tmp_path):
    m = model_file(tmp_path, "kind=schwinger\nomega0=1\nomega=0.2\ntheta=1.0\n")
    out = tmp_path / "u.csv"
    assert main(["propagate", "--model", m, "--t1", "20", "--steps", "1000", "--out", str(out)]) == 0
    header, data = read_csv(out)
    assert header[:5] == ["t", "u00_re", "u00_im", "u01_re", "u01_im"] and len(header) == 9
    assert data.shape == (1001, 9)
    assert data[0, 0] == 0.0 and data[0, 1] == 1.0 and data[0, 3] == 0.0


def test_closed_form_and_numeric_oracle_agree(tmp_path):
    m = model_file(tmp_path, "kind=jc\ng=1\ndelta=0.5\nphoton_n=1\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["propagate", "--model", m, "--t1", "5", "--steps", "500", "--out", str(a)]) == 0
    assert main(["propagate", "--model", m, "--t1", "5", "--steps", "500", "--oracle", "numeric", "--out", str(b)]) == 0
    assert np.abs(read_csv(a)[1] - read_csv(b)[1]).max() <= 1e-8


def test_reruns_are_byte_identical(tmp_path):
    m = model_file(tmp_path, "kind=driven_tls\nepsilon=0.3\nV=1\nomega0=1\n")
    outs = []
    for name in ("r1.json", "r2.json"):
        out = tmp_path / name
        assert main(["diagnose", "--model", m, "--t1", "30", "--steps", "3000", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert "config_hash" in json.loads(outs[0])


def test_config_hash_tracks_configuration(tmp_path):
    m = model_file(tmp_path, "kind=schwinger\n")
    hashes = []
    for steps in ("100", "100", "200"):
        out = tmp_path / f"u{len(hashes)}.csv"
        main(["propagate", "--model", m, "--steps", steps, "--out", str(out)])
        hashes.append(out.read_text().splitlines()[0])
    assert hashes[0] == hashes[1] != hashes[2]


def test_expand_writes_orders_and_summary(tmp_path):
    m = model_file(tmp_path, "kind=jc\ng=1\ndelta=0.2\n")
    out = tmp_path / "orders"
    assert main(["expand", "--model", m, "--t1", "6.3", "--steps", "2000", "--order", "2", "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["order_0.csv", "order_1.csv", "order_2.csv", "summary.json"]
    summary = json.loads((out / "summary.json").read_text())
    assert list(summary) == ["kind", "lambda", "orders", "sup_norm_per_order", "config_hash"]
    assert summary["orders"] == 2 and len(summary["sup_norm_per_order"]) == 3
    _, first = read_csv(out / "order_0.csv")
    assert first[0, 1] == 1.0


def test_expand_dyson_series(tmp_path):
    m = model_file(tmp_path, "kind=jc\ng=0.5\ndelta=10\n")
    out = tmp_path / "d"
    assert main(["expand", "--model", m, "--t1", "1", "--steps", "200", "--series", "dyson", "--lambda", "0.1", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["kind"] == "Dyson" and summary["lambda"] == 0.1


def test_diagnose_report_layout(tmp_path):
    m = model_file(tmp_path, "kind=schwinger\nomega=0.01\ntheta=1.0471975511965976\n")
    out = tmp_path / "report.json"
    assert main(["diagnose", "--model", m, "--t1", "10", "--steps", "4000", "--order", "2", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert list(report)[:6] == ["condition_lhs", "secular_slope", "slope_stderr", "verdict", "recovered_parameter", "error_curve"]
    assert list(report)[-1] == "config_hash"
    assert report["verdict"] == "ConditionReliable"


@pytest.mark.parametrize("text", ["kind=jc\ng=1\ndelta=2\n", "kind=driven_tls\nepsilon=0.1\nV=5\n"])
def test_resum_layout(tmp_path, text):
    m = model_file(tmp_path, text)
    out = tmp_path / "resum.json"
    assert main(["resum", "--model", m, "--t1", "40", "--steps", "8000", "--out", str(out)]) == 0
    body = json.loads(out.read_text())
    assert list(body) == ["before", "after", "slopes", "method", "config_hash"]
    assert len(body["before"]) == 8001 and len(body["after"][0]) == 2
    assert set(body["slopes"]) == {"before", "after"}


def test_resum_rejects_schwinger(tmp_path):
    m = model_file(tmp_path, "kind=schwinger\n")
    out = tmp_path / "r.json"
    assert main(["resum", "--model", m, "--out", str(out)]) == 2
    assert not out.exists()


@pytest.mark.parametrize(
    "text, extra, code",
    [
        ("kind=ising\n", [], 2),
        ("kind=jc\nfoo=1\n", [], 2),
        ("kind=jc\ng=abc\n", [], 2),
        ("kind=jc\n", ["--steps", "8"], 2),
        ("kind=jc\n", ["--order", "5"], 2),
        ("kind=jc\n", ["--t0", "3", "--t1", "1"], 2),
        ("kind=schwinger\ntheta=nan\n", [], 2),
        ("kind=jc\ng=0\ndelta=1\n", ["--order", "1"], 3),
    ],
)
def test_exit_codes_and_no_partial_output(tmp_path, text, extra, code):
    m = model_file(tmp_path, text)
    out = tmp_path / "report.json"
    assert main(["diagnose", "--model", m, "--out", str(out), *extra]) == code
    assert not out.exists()


def test_degenerate_expand_is_numeric_failure(tmp_path):
    m = model_file(tmp_path, "kind=jc\ng=0\ndelta=1\n")
    out = tmp_path / "orders"
    assert main(["expand", "--model", m, "--out", str(out)]) == 3
    assert not out.exists()


def test_io_errors(tmp_path):
    assert main(["propagate", "--model", str(tmp_path / "missing.txt"), "--out", str(tmp_path / "u.csv")]) == 4
    m = model_file(tmp_path, "kind=schwinger\n")
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["propagate", "--model", m, "--steps", "100", "--out", str(blocker / "u.csv")]) == 4


def test_argparse_errors_exit_two(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["propagate", "--out", "x.csv"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["diagnose", "--model", "m", "--out", "o", "--series", "taylor"])
    assert exc.value.code == 2


def test_model_text_parsing():
    desc = parse_model_text("# comment\nkind = JC\n g = 0.5  # inline\nphoton_n=3\n")
    assert desc == {"kind": "jc", "g": 0.5, "delta": 0.2, "photon_n": 3, "hbar": 1.0}
    assert parse_model_text("kind=driven_tls\npicture=interaction\n")["picture"] == "interaction"
    with pytest.raises(InvalidParam):
        parse_model_text("kind=jc\ng=1\ng=2\n")
    with pytest.raises(InvalidParam):
        parse_model_text("g=1\n")
    with pytest.raises(InvalidParam):
        parse_model_text("kind=schwinger\npicture=interaction\n")
    with pytest.raises(WrongModelKind):
        parse_model_text("kind=ising\n")
