import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from addca.cli import CSV_HEADER, main, parse_along
from addca.events import parse_measure

from conftest import EXAMPLE_BLOCKS

EXAMPLE_RULE = "m=2;range=-2..2;coeffs=1,1,1,1,1"
ONES3 = "m=2;range=-1..1;coeffs=1,1,1"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_preimage_example_json(capsys):
    code, out, _ = run_cli(capsys, "preimage", "--rule", EXAMPLE_RULE, "--event", "@-2:[1,0,1,0,1]",
                           "--i", "1", "--j", "1", "--cap", "32", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["window"] == [-3, 5]
    assert data["measure"] == "16/2^9"
    assert set(data["blocks"]) == EXAMPLE_BLOCKS and len(data["blocks"]) == 16


def test_measure_text(capsys):
    code, out, _ = run_cli(capsys, "measure", "--rule", "m=3;range=0..0;coeffs=1", "--event", "@0:[2]")
    assert code == 0 and out.strip() == "1/3^1"


def test_correlate(capsys):
    code, out, _ = run_cli(capsys, "correlate", "--rule", ONES3, "--A", "@0:[1]", "--B", "@0:[1]",
                           "--i", "0", "--j", "1", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["value"] == "2/2^3" and data["deviation"] == "0"


def test_cesaro_json_round_trip(capsys):
    code, out, _ = run_cli(capsys, "cesaro", "--rule", EXAMPLE_RULE, "--A", "@-2:[1,0,1,0,1]",
                           "--B", "@-2:[1,0,1,0,1]", "--p", "8", "--n", "2", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert len(data["lattice"]) == 16
    for pt in data["lattice"]:
        mu = parse_measure(pt["value"])
        assert (mu.count, mu.width) == (pt["count"], pt["width"])
        assert str(mu) == pt["value"]
        assert str(Fraction(pt["deviation"])) == pt["deviation"]
    for key in ("cesaro_value", "cesaro_deviation", "weak_sum", "tail_bound", "product"):
        assert str(Fraction(data[key])) == data[key]
    assert abs(Fraction(data["cesaro_deviation"])) <= Fraction(data["tail_bound"])


def test_csv_schema(capsys):
    code, out, _ = run_cli(capsys, "weakmix", "--rule", EXAMPLE_RULE, "--A", "@0:[1]",
                           "--B", "@0:[1]", "--p", "4", "--n", "2", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 1 + 8
    first = dict(zip(CSV_HEADER, rows[1]))
    assert (first["i"], first["j"], first["deviation_num"], first["deviation_den"]) == ("0", "0", "1", "4")


def test_strongmix_and_threshold(capsys):
    code, out, _ = run_cli(capsys, "strongmix", "--rule", EXAMPLE_RULE, "--A", "@-2:[1,0,1,0,1]",
                           "--B", "@-2:[1,0,1,0,1]", "--along", "0,0;7,1;9,2", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert [r["deviation"] for r in data["probe"]][1:] == ["0", "0"]
    code, out, _ = run_cli(capsys, "threshold", "--rule", EXAMPLE_RULE, "--A", "@-2:[1,0,1,0,1]",
                           "--B", "@-2:[1,0,1,0,1]", "--j", "1", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["threshold"] == 7 and data["reference_bound"] == 2


def test_search_nonfactor(capsys):
    code, out, _ = run_cli(capsys, "search-nonfactor", "--rule", "m=2;range=0..0;coeffs=1",
                           "--max-len", "1", "--max-j", "1", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["total"] == 4
    assert {w["deviation"] for w in data["witnesses"]} == {"1/4", "-1/4"}


def test_oracle_check(capsys):
    code, out, _ = run_cli(capsys, "oracle-check", "--rule", ONES3, "--max-len", "2",
                           "--max-i", "2", "--max-j", "2", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert all(v["fail"] == 0 for v in data["counts"].values())
    assert data["counts"]["correlation"]["pass"] == 6 * 6 * 3 * 3


def test_exit_codes(capsys):
    assert run_cli(capsys, "measure", "--rule", "m=2;range=0..0", "--event", "@0:[1]")[0] == 2
    assert run_cli(capsys, "measure", "--rule", ONES3, "--event", "@0:[5]")[0] == 2
    assert run_cli(capsys, "measure", "--rule", ONES3, "--event", "@0:[1]", "--format", "csv")[0] == 2
    code, _, err = run_cli(capsys, "preimage", "--rule", EXAMPLE_RULE, "--event", "@-2:[1,0,1,0,1]",
                           "--i", "1", "--j", "1", "--cap", "4")
    assert code == 1 and "cap" in err
    code, _, err = run_cli(capsys, "correlate", "--rule", ONES3, "--A", "@0:[1]", "--B", "@0:[1]",
                           "--i", "-1")
    assert code == 1
    with pytest.raises(SystemExit) as info:
        main(["nonsense", "--rule", ONES3])
    assert info.value.code == 2


def test_oracle_budget_env(capsys, monkeypatch):
    monkeypatch.setenv("ADDCA_ORACLE_BUDGET", "4")
    code, _, err = run_cli(capsys, "oracle-check", "--rule", ONES3, "--max-len", "1",
                           "--max-i", "0", "--max-j", "1")
    assert code == 1 and "budget" in err


def test_output_file_and_determinism(tmp_path, capsys):
    args = ["cesaro", "--rule", EXAMPLE_RULE, "--A", "@0:[1]", "--B", "@0:[1,1]",
            "--p", "6", "--n", "3", "--format", "json"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b), "--parallel", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_parse_along():
    assert parse_along("0,0; 1,2") == [(0, 0), (1, 2)]
    with pytest.raises(ValueError):
        parse_along("1;2")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "addca", "measure", "--rule",
                          "m=3;range=0..0;coeffs=1", "--event", "@0:[2]"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "1/3^1"
