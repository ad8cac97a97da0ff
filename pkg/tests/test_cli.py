import csv
import io
import json
import logging
import subprocess
import sys

import numpy as np
import pytest

from prolate import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_lambda_closed_form(capsys):
    code, out, _ = run(capsys, "spectrum", "--variant", "lambda", "--count", "5")
    assert code == 0
    body = json.loads(out)
    vals = [row[1] for row in body["results"]["rows"]]
    assert np.allclose(vals, [1, 3, 7, 13, 21], atol=1e-12)
    assert body["meta"]["config"]["variant"] == "lambda"
    assert all(c["pass"] for c in body["checks"])


def test_spectrum_li_with_shooting(capsys):
    code, out, _ = run(capsys, "spectrum", "--count", "4")
    assert code == 0
    body = json.loads(out)
    assert body["results"]["columns"][-1] == "shooting"
    names = {c["name"] for c in body["checks"]}
    assert {"shooting agreement", "parity alternates", "strictly increasing"} <= names


def test_count_zero(capsys):
    code, out, _ = run(capsys, "spectrum", "--count", "0")
    assert code == 0
    assert json.loads(out)["results"]["rows"] == []


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--a", "-1"],
        ["spectrum", "--count", "100", "--basis", "32"],
        ["nonsense"],
        ["witness", "--u", "1 2 3 4"],
        ["witness", "--u", "1 2 3"],
        ["witness", "--u", "identity"],
        ["pswf", "--index", "70"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 1


def test_version(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == 0 and "0.1.0" in out


def test_parse_unitary_forms():
    u = cli.parse_unitary("1j 0 0 1")
    assert np.allclose(u.matrix, np.diag([1j, 1]))
    v = cli.parse_unitary("0,1, 0,0; 0,0, 1,0")
    assert u == v
    assert cli.parse_unitary("identity").is_identity()
    with pytest.raises(cli.UsageError):
        cli.parse_unitary("1 0 0 1.001")


def test_extensions_check_and_negative_control(capsys):
    code, out, _ = run(capsys, "extensions-check", "--samples", "10")
    assert code == 0
    code, out, _ = run(capsys, "extensions-check", "--samples", "10", "--corrupt-j")
    assert code == 2
    assert not all(c["pass"] for c in json.loads(out)["checks"])


def test_commutator_and_gram(capsys):
    code, out, _ = run(capsys, "commutator")
    assert code == 0
    code, out, _ = run(capsys, "gram-check", "--a", "2")
    assert code == 0
    assert all(c["pass"] for c in json.loads(out)["checks"])


def test_witness(capsys):
    code, out, _ = run(capsys, "witness", "--u", "1j 0 0 1")
    assert code == 0
    body = json.loads(out)
    assert all(c["pass"] for c in body["checks"])


def test_seeded_output_is_deterministic(capsys):
    _, first, _ = run(capsys, "extensions-check", "--samples", "5", "--seed", "3")
    _, second, _ = run(capsys, "extensions-check", "--samples", "5", "--seed", "3")
    assert first == second


def test_csv_format(capsys, tmp_path):
    path = tmp_path / "out.csv"
    code, out, _ = run(capsys, "pswf", "--index", "2", "--points", "11", "--format", "csv", "--out", str(path))
    assert code == 0 and out == ""
    raw = path.read_bytes()
    assert b"\r\n" in raw
    lines = raw.decode().split("\r\n")
    assert lines[0].startswith("# ")
    table = [ln for ln in lines if ln and not ln.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(table))))
    assert rows[0] == ["t", "value", "derivative"] and len(rows) == 12
    assert float(rows[1][0]) == -1.0


def test_log_level_env(monkeypatch, capsys):
    monkeypatch.setenv("PROLATE_LOG", "INFO")
    root = logging.getLogger()
    saved = root.handlers[:]
    root.handlers.clear()
    try:
        code, _, err = run(capsys, "gram-check")
    finally:
        root.handlers[:] = saved
    assert code == 0 and "pass" in err


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "prolate.cli", "spectrum", "--variant", "lambda", "--count", "2", "--format", "csv"], capture_output=True, text=True)
    assert proc.returncode == 0 and "eigenvalue" in proc.stdout
