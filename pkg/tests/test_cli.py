import json
import subprocess
import sys

import pytest

from conftest import FIXTURES, GOLDEN
from hfsurgery.cli import (EXIT_OK, EXIT_PARSE, EXIT_UNSUPPORTED, EXIT_VALIDATION, SCHEMA, main,
                           render_json, run)

GOLDEN_COMMANDS = {
    "surgery_5_2_1.json": ["surgery", "5_2", "1/1"],
    "surgery_T2_3_1_2.json": ["surgery", "T2_3", "1/2"],
    "surgery_unknot_3.json": ["surgery", "unknot", "3/1"],
    "invariants_5_2.json": ["invariants", "5_2"],
    "invariants_unknot.json": ["invariants", "unknot"],
    "invariants_P-3,3,8.json": ["invariants", "P-3,3,8"],
    "obstruct_5_2_P-3,3,8_sweep.json": ["obstruct", "5_2", "P-3,3,8", "sweep"],
    "obstruct_5_2_5_2_1.json": ["obstruct", "5_2", "5_2", "1"],
    "obstruct_5_2_15n43522_sweep.json": ["obstruct", "5_2", "15n43522", "sweep"],
}


@pytest.mark.parametrize("fname", sorted(GOLDEN_COMMANDS))
def test_golden_byte_stable(fname, capsys):
    assert main(GOLDEN_COMMANDS[fname]) == EXIT_OK
    out = capsys.readouterr().out
    assert out == (GOLDEN / fname).read_text()
    doc = json.loads(out)
    assert doc["schema"] == SCHEMA
    assert set(doc) == {"schema", "version", "command", "inputs", "results", "provenance"}


def _golden(fname):
    return json.loads((GOLDEN / fname).read_text())["results"]


def test_golden_surgery_values():
    r = _golden("surgery_5_2_1.json")
    assert r["hf_hat_total"] == 5 and r["spin_c"][0]["d"] == "0"
    r = _golden("surgery_T2_3_1_2.json")
    assert r["spin_c"][0]["module"]["text"] == "T+(-2) + Q(-2)" and r["hf_hat_total"] == 3
    r = _golden("surgery_unknot_3.json")
    assert [e["d"] for e in r["spin_c"]] == ["1/2", "-1/6", "-1/6"]
    assert r["hf_hat_total"] == 3


def test_golden_invariant_values():
    r = _golden("invariants_5_2.json")
    assert (r["a2"], r["a4"], r["four_v3"]) == ("2", "0", ["-3"])
    assert r["profile"] == {"r0_hat": 3, "nu_hat": -1} and r["lspace_class"] == "Neither"
    r = _golden("invariants_P-3,3,8.json")
    assert r["a4"] == "1" and r["four_v3"] == ["-8"]
    assert r["alexander"]["text"] == "t^2 - 2*t + 3 - 2*t^-1 + t^-2"
    r = _golden("invariants_unknot.json")
    assert r["genus"] == 0 and r["four_v3"] == ["0"]


def test_golden_obstruct_values():
    assert _golden("obstruct_5_2_P-3,3,8_sweep.json")["surviving_slopes"] == ["1/1"]
    assert _golden("obstruct_5_2_5_2_1.json")["surviving_slopes"] == ["1/1"]
    r = _golden("obstruct_5_2_15n43522_sweep.json")
    assert r["surviving_slopes"] == []
    assert {v["verdict"] for v in r["ito"]} == {"IncompatiblePair"}


def test_table_output_either_position(capsys):
    assert main(["--table", "invariants", "5_2"]) == EXIT_OK
    first = capsys.readouterr().out
    assert main(["invariants", "5_2", "--table"]) == EXIT_OK
    assert capsys.readouterr().out == first
    assert first.startswith("# invariants 5_2")
    assert any(line.split() == ["a4", "0"] for line in first.splitlines())


def test_catalog(capsys):
    assert main(["catalog"]) == EXIT_OK
    knots = json.loads(capsys.readouterr().out)["results"]["knots"]
    names = [k["name"] for k in knots]
    assert names == sorted(names) and "5_2" in names and "P-3,3,<k>" in names


def test_validate_good_and_bad(capsys):
    assert main(["validate", str(FIXTURES / "T2_5.json")]) == EXIT_OK
    capsys.readouterr()
    assert main(["validate", str(FIXTURES / "5_2_broken_flip.json")]) == EXIT_VALIDATION
    doc = json.loads(capsys.readouterr().out)
    assert doc["results"]["valid"] is False and doc["results"]["violations"]


@pytest.mark.parametrize("argv, code", [
    (["surgery", "5_2", "0"], EXIT_UNSUPPORTED),
    (["surgery", "5_2", "0/3"], EXIT_UNSUPPORTED),
    (["surgery", "5_2", "x/2"], EXIT_PARSE),
    (["surgery", "8_19", "1"], EXIT_PARSE),
    (["surgery", "15n43522", "2"], EXIT_UNSUPPORTED),
    (["obstruct", "5_2", "5_2", "0"], EXIT_UNSUPPORTED),
])
def test_exit_codes(argv, code, capsys):
    assert main(argv) == code
    assert capsys.readouterr().err


def test_surgery_on_ingested_file(capsys):
    assert main(["surgery", str(FIXTURES / "T2_5.json"), "1"]) == EXIT_OK
    r = json.loads(capsys.readouterr().out)["results"]
    # L-space knot: p + 2 max(0, (2g - 1) q - p) = 1 + 2 * 2
    assert r["hf_hat_total"] == 5 and r["spin_c"][0]["d"] == "-2"


def test_ingest_rejects_broken_file(capsys):
    assert main(["surgery", str(FIXTURES / "5_2_broken_flip.json"), "1"]) == EXIT_VALIDATION


def test_stored_record_surgery():
    r = run(["surgery", "15n43522", "1"])["results"]
    assert r["stored"] and r["spin_c"][0]["module"]["text"] == "T+(0) + Q(-2) + Q(-2)"


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "hfsurgery.cli", "surgery", "unknot", "1"],
                         capture_output=True, text=True, check=True).stdout
    assert json.loads(out)["results"]["hf_hat_total"] == 1
    assert out == render_json(run(["surgery", "unknot", "1"]))
