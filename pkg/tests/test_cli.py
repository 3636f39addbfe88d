import json
import math
from pathlib import Path

import jsonschema
import pytest

from blochsynth.cli import SCHEMA, emit_json, main, parse_angle, validate

GOLDEN = Path(__file__).parent / "golden" / "alternation.json"


def run(args, tmp_path, name="out"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, (out.read_text() if out.exists() else None)


def test_parse_angle():
    assert parse_angle("pi/3") == pytest.approx(math.pi / 3)
    assert parse_angle("2*pi/5") == pytest.approx(2 * math.pi / 5)
    assert parse_angle("0.25") == 0.25


def test_pole2pole_large_with_raw_units(tmp_path):
    code, text = run(["pole2pole", "--energy", "1", "--bound", str(math.sqrt(3))], tmp_path)
    assert code == 0
    doc = json.loads(text)
    r = doc["result"]
    assert r["regime"] == "large" and len(r["optimal"]) == 4
    assert r["T"] == pytest.approx(2 * math.pi)
    assert r["T_raw"] == pytest.approx(math.pi / 2)
    jsonschema.validate(doc, SCHEMA)


def test_pole2pole_small(tmp_path):
    code, text = run(["pole2pole", "--alpha", "0.13"], tmp_path)
    r = json.loads(text)["result"]
    assert code == 0 and r["pattern"] == "A" and r["bounds_ok"]
    assert r["T"] == pytest.approx(38.0678546, abs=1e-6)
    assert {c["kind"] for c in r["candidates"]} == {"TYPE1", "TYPE2"}


def test_synthesis_target_csv(tmp_path):
    code, text = run(["synthesis", "--alpha", "pi/3", "--target", "1,0,0", "--format", "csv"], tmp_path)
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "t,u,y1,y2,y3"
    last = [float(x) for x in lines[-1].split(",")]
    assert last[2:] == pytest.approx([1.0, 0.0, 0.0], abs=1e-9)


def test_synthesis_target_case(tmp_path):
    code, text = run(["synthesis", "--alpha", "pi/3", "--target", "1,0,0"], tmp_path)
    r = json.loads(text)["result"]
    assert r["case"] == "T3" and r["trajectories"][0]["label"] == "+S"


def test_synthesis_sample_and_coverage(tmp_path):
    code, text = run(["synthesis", "--alpha", "pi/3", "--sample", "500"], tmp_path)
    r = json.loads(text)["result"]
    assert code == 0 and sum(r["counts"].values()) == 500
    code, text = run(["synthesis", "--alpha", "1.4", "--coverage"], tmp_path)
    r = json.loads(text)["result"]
    assert code == 0 and r["T"] == pytest.approx(10.4031326, abs=1e-6)


def test_compare_rwa(tmp_path):
    code, text = run(["compare-rwa", "--energy", "1", "--bound", "1", "--sweep-M", "5"], tmp_path)
    r = json.loads(text)["result"]
    assert code == 0 and r["all_tc_le_t"]
    first = r["rows"][0]
    assert first["T_raw"] == pytest.approx(math.pi / math.sqrt(2))
    assert first["T_C"] == pytest.approx(math.pi / 2)
    assert len(r["rows"]) == 6


def test_oracle_small_run(tmp_path):
    front = tmp_path / "front.csv"
    args = ["oracle", "--alpha", "pi/3", "--mesh-level", "3", "--dt", "0.01", "--targets", "10", "--front", str(front)]
    code, text = run(args, tmp_path)
    r = json.loads(text)["result"]
    assert len(r["targets"]) == 10 and r["all_witness_pass"]
    assert code == (0 if r["all_pass"] else 1)
    assert r["failures"] == sum(not t["pass"] for t in r["targets"])
    assert front.read_text().startswith("x,y,z,value\n")


def test_oracle_south_pole_small_alpha(tmp_path):
    args = ["oracle", "--alpha", "0.3", "--mesh-level", "5", "--dt", "0.005", "--targets", "1", "--include-poles"]
    _, text = run(args, tmp_path)
    pole = json.loads(text)["result"]["targets"][-1]
    assert pole["target"] == [0.0, 0.0, -1.0]
    assert pole["deviation"] <= 0.1


@pytest.mark.parametrize(
    "args",
    [
        ["pole2pole"],
        ["pole2pole", "--alpha", "0.3", "--energy", "1", "--bound", "1"],
        ["pole2pole", "--energy", "1"],
        ["pole2pole", "--alpha", "abc"],
        ["synthesis", "--alpha", "1.0"],
        ["synthesis", "--alpha", "1.0", "--target", "1,0"],
        ["oracle", "--alpha", "1.0", "--dt", "-1"],
        ["nonsense"],
    ],
)
def test_usage_errors_exit_2(args, capsys):
    with pytest.raises(SystemExit) as e:
        main(args)
    assert e.value.code == 2


@pytest.mark.parametrize(
    "args",
    [
        ["pole2pole", "--alpha", "1.6"],
        ["synthesis", "--alpha", "0.3", "--target", "1,0,0"],
        ["synthesis", "--alpha", "0.9", "--coverage"],
        ["oracle", "--alpha", "1.0", "--mesh-level", "2"],
        ["compare-rwa", "--alpha", "0.5"],
    ],
)
def test_domain_errors_exit_2(args, tmp_path):
    assert run(args, tmp_path)[0] == 2


def test_unwritable_output_exit_2(tmp_path):
    assert main(["pole2pole", "--alpha", "1.0", "--out", str(tmp_path / "no" / "such" / "file")]) == 2


def test_checked_property_failure_exit_1(tmp_path):
    # 16 remainder samples cannot resolve the m = 40 boundary below R = 1/32
    assert run(["patterns", "--sweep-R", "16"], tmp_path)[0] == 1


def test_schema_rejects_bad_documents():
    good = {
        "schema_version": "1.0",
        "command": "patterns",
        "params": {"alpha": None, "energy": None, "bound": None, "k": None, "seed": 0},
        "result": {"sweeps": [], "r2_strictly_decreasing": True},
    }
    emit_json(good)
    for bad in (
        {**good, "schema_version": "0"},
        {**good, "extra": 1},
        {**good, "result": {"sweeps": []}},
    ):
        with pytest.raises(jsonschema.ValidationError):
            validate(bad)


def test_golden_alternation(tmp_path):
    code, text = run(["patterns"], tmp_path)
    assert code == 0
    new, old = json.loads(text)["result"], json.loads(GOLDEN.read_text())["result"]
    assert new["r2_strictly_decreasing"] and old["r2_strictly_decreasing"]
    for a, b in zip(new["sweeps"], old["sweeps"]):
        assert a["m"] == b["m"] and a["sequence"] == b["sequence"] and a["patterns"] == b["patterns"]
        assert a["r2"] == pytest.approx(b["r2"], abs=1e-9)
        assert a["r1"] == pytest.approx(b["r1"], abs=1e-9)


def test_seed_changes_oracle_targets(tmp_path):
    base = ["oracle", "--alpha", "1.0", "--mesh-level", "3", "--dt", "0.01", "--targets", "3"]
    _, a = run([*base, "--seed", "1"], tmp_path, "a")
    _, b = run([*base, "--seed", "2"], tmp_path, "b")
    ta = [t["target"] for t in json.loads(a)["result"]["targets"]]
    tb = [t["target"] for t in json.loads(b)["result"]["targets"]]
    assert ta != tb
