import csv
import io
import json

import pytest

from quantumwalks.cli import SCHEMA_VERSION, main, parse_complex, parse_state
from quantumwalks.core import DomainError, NormalizationError

# fast argv for every subcommand
FAST = {
    "line": ["line", "--steps", "20"],
    "cycle": ["cycle", "--n", "5", "--T", "50"],
    "hypercube": ["hypercube", "--dim", "4"],
    "search": ["search", "--dim", "4"],
    "ctqw": ["ctqw", "--graph", "cycle:8", "--t", "1.5"],
    "gluedtrees": ["gluedtrees", "--depth", "3", "--samples", "50"],
    "scatter": ["scatter"],
    "szegedy": ["szegedy", "--lazy-cycle", "6", "--steps", "20"],
    "decohere": ["decohere", "--steps", "20", "--coin-p", "0.3", "--trials", "50", "--seed", "4"],
    "oracle": ["oracle", "--check", "moments", "--points", "11"],
    "gate": ["gate"],
}


def run(argv, capsys):
    code = main([*argv, "--quiet"])
    out = capsys.readouterr()
    return code, out.out, out.err


def summary(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


def test_line_csv(capsys):
    code, out, _ = run(["line", "--steps", "100", "--coin", "hadamard", "--init", "1,0", "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["position", "probability"]
    pos = [int(r[0]) for r in rows[1:]]
    assert pos and all(x % 2 == 0 for x in pos)
    assert sum(float(r[1]) for r in rows[1:]) == pytest.approx(1.0)


def test_konno_report(capsys):
    code, out, _ = run(["oracle", "--check", "konno", "--t", "2000"], capsys)
    assert code == 0
    assert float(summary(out)["l1_distance"]) <= 0.05


def test_phase_gate_report(capsys):
    code, out, _ = run(["gate", "--name", "phase", "--alpha", "1", "--beta", "0"], capsys)
    s = summary(out)
    assert code == 0
    assert s["phase0"] == "e^{-5i*pi/4}"
    assert s["phase0_match"] == "true"


def test_unknown_flag(capsys):
    code, _, err = run(["line", "--bogus"], capsys)
    assert code == 2 and "usage" in err


def test_unknown_subcommand(capsys):
    assert run(["teleport"], capsys)[0] == 2


def test_bad_init_is_failure(capsys):
    code, _, err = run(["line", "--init", "1,1"], capsys)
    assert code == 1 and "norm" in err


def test_domain_failure(capsys):
    assert run(["gate", "--name", "cnot", "--wires", "1,0"], capsys)[0] == 1


@pytest.mark.parametrize("sub", sorted(FAST))
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_formats(sub, fmt, capsys):
    code, out, _ = run([*FAST[sub], "--format", fmt], capsys)
    assert code == 0
    if fmt == "json":
        doc = json.loads(out)
        assert doc["schema_version"] == SCHEMA_VERSION
        assert doc["command"] == sub
        assert doc["config"]["format"] == "json"
    else:
        rows = list(csv.reader(io.StringIO(out)))
        assert len(rows) >= 2 and all(len(r) == len(rows[0]) for r in rows)


@pytest.mark.parametrize("sub", ["decohere", "gluedtrees", "line"])
def test_byte_identical(sub, tmp_path):
    out = tmp_path / "r.json"
    assert main([*FAST[sub], "--format", "json", "--out", str(out), "--quiet"]) == 0
    first = out.read_bytes()
    assert main([*FAST[sub], "--format", "json", "--out", str(out), "--quiet"]) == 0
    assert out.read_bytes() == first


def test_outdir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("QUANTUMWALKS_OUTDIR", str(tmp_path))
    assert main(["gate", "--format", "csv", "--quiet"]) == 0
    assert (tmp_path / "gate.csv").exists()
    assert main(["line", "--steps", "4", "--out", "sub/l.txt", "--quiet"]) == 0
    assert (tmp_path / "sub" / "l.txt").exists()
    assert capsys.readouterr().out == ""


def test_config_logged(caplog):
    with caplog.at_level("INFO", logger="quantumwalks"):
        assert main(["gate"]) == 0
    assert any(r.getMessage().startswith("config {") for r in caplog.records)


def test_schemas(capsys):
    _, out, _ = run(["cycle", "--n", "5", "--T", "20", "--format", "csv"], capsys)
    assert out.splitlines()[0] == "index,probability"
    _, out, _ = run(["gate", "--name", "cnot", "--format", "csv"], capsys)
    assert out.splitlines()[0] == "index,re,im"


class TestParsing:
    @pytest.mark.parametrize(
        "tok,z", [("1", 1), ("0.5+0.5i", 0.5 + 0.5j), ("-i", -1j), ("2-i", 2 - 1j), ("0.7071i", 0.7071j)]
    )
    def test_complex(self, tok, z):
        assert parse_complex(tok) == z

    def test_bad_complex(self):
        with pytest.raises(DomainError):
            parse_complex("abc")

    def test_state_renormalised(self):
        v = parse_state("0.70710678,0.70710678i")
        assert abs(abs(v[0]) ** 2 + abs(v[1]) ** 2 - 1) <= 1e-15

    def test_state_tolerance(self):
        with pytest.raises(NormalizationError):
            parse_state("0.7,0.7")
