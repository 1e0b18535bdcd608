"""CLI golden files.

Regenerate after an intended output change with
``BELYI_UPDATE_GOLDEN=1 pytest tests/test_cli.py``.
"""

import csv
import io
import json
import os
from pathlib import Path

import pytest

from belyi_geodesics.cli import flatten, main, round12

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("BELYI_UPDATE_GOLDEN") == "1"
BASE = ["--seed", "7", "--threads", "1", "--no-save"]

CASES = {
    "gen_graph": ["gen-graph", "--n", "5"],
    "cycles": ["cycles", "--n", "20", "--max-len", "4"],
    "poisson_check": ["poisson-check", "--n", "100", "--samples", "40", "--i-max", "4"],
    "systole": ["systole", "--n", "100", "--samples", "8"],
    "ordered": ["ordered", "--n", "100", "--samples", "5", "--k", "2"],
    "genus_sweep": ["genus-sweep", "--ns", "50", "100", "--samples", "5", "--k", "2"],
    "disconnect_sweep": ["disconnect-sweep", "--vertex-counts", "16", "32", "--samples", "5"],
    "intersect_sweep": ["intersect-sweep", "--vertex-counts", "16", "32", "--samples", "5"],
    "bounds_upper": ["bounds", "upper", "--kmax", "60"],
    "bounds_lower": ["bounds", "lower", "--kmax", "12"],
    "stern": ["stern", "--steps", "2"],
    "stern_table": ["stern", "--steps", "6", "--table"],
    "trace_stats": ["trace-stats", "--N", "8"],
    "trace_stats_sampled": ["trace-stats", "--N", "8", "--mode", "sampled", "--samples", "50"],
    "growth": ["growth", "--block", "5"],
}


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("fmt", ["json", "csv"])
@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(capsys, name, fmt):
    code, out, _ = run(capsys, CASES[name] + BASE + ["--format", fmt])
    assert code in (0, 2)
    path = GOLDEN / f"{name}.{fmt}"
    if UPDATE:
        GOLDEN.mkdir(exist_ok=True)
        path.write_text(out)
    assert out == path.read_text()


def _numbers(values):
    out = []
    for v in values:
        if isinstance(v, bool):
            v = int(v)  # csv writes flags as 0/1
        if v is None or v == "":
            continue
        try:
            out.append(float(v))
        except (TypeError, ValueError):
            pass
    return out


@pytest.mark.parametrize("name", sorted(set(CASES) - {"gen_graph", "stern"}))
def test_json_and_csv_carry_same_numbers(capsys, name):
    _, js, _ = run(capsys, CASES[name] + BASE + ["--format", "json"])
    _, cs, _ = run(capsys, CASES[name] + BASE + ["--format", "csv"])
    from_json = sorted(_numbers(v for _, v in flatten(json.loads(js))))
    rows = list(csv.reader(io.StringIO(cs)))
    from_csv = sorted(_numbers(cell for row in rows[1:] for cell in row))
    # csv may be a projection (term tables, row lists); every csv number must appear in the json
    assert from_csv
    pool = list(from_json)
    for x in from_csv:
        assert any(x == pytest.approx(y, rel=1e-11, abs=1e-300) for y in pool), x


def test_stern_row_csv(capsys):
    code, out, _ = run(capsys, ["stern", "--steps", "2", "--format", "csv"])
    assert code == 0 and out == "1,2,1,1,0\n"
    _, out, _ = run(capsys, ["stern", "--steps", "2"])
    assert json.loads(out)["row"] == [1, 2, 1, 1, 0]


def test_bounds_upper_value(capsys):
    code, out, _ = run(capsys, ["bounds", "upper", "--kmax", "60", "--format", "json"])
    data = json.loads(out)
    assert code == 0
    assert data["value"] == pytest.approx(3.085, abs=1e-3)
    assert "value_other_weight" in data


def test_gen_graph_twice_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["gen-graph", "--n", "5", "--seed", "7", "--out", str(a)]) == 0
    assert main(["gen-graph", "--n", "5", "--seed", "7", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    code, out, _ = run(capsys, ["cycles", "--graph", str(a), "--max-len", "3", "--unsafe", "--format", "csv"])
    assert code == 0 and out.startswith("graph_id,length,stubs,disconnecting\n")


def test_numbers_have_12_digits():
    assert round12(1 / 3) == 0.333333333333
    assert round12({"x": [2 / 3]}) == {"x": [0.666666666667]}


def test_usage_errors(capsys):
    code, _, err = run(capsys, ["systole", "--bogus"])
    assert code == 1 and "usage" in err
    code, _, err = run(capsys, [])
    assert code == 1
    code, _, err = run(capsys, ["growth", "--block", "99"])
    assert code == 1


def test_alpha_cap_violation(capsys):
    code, _, err = run(capsys, ["cycles", "--n", "20", "--max-len", "9"])
    assert code == 1
    assert "alpha cutoff" in err


def test_assertion_failure_exit_code(capsys):
    # 16 vertices is too small for disconnection to be rare
    code, _, err = run(capsys, ["disconnect-sweep", "--vertex-counts", "8", "16", "--samples", "3"] + BASE)
    assert code == 2
    assert "FAIL" in err


def test_report_saved(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("BELYI_RESULTS_DIR", str(tmp_path))
    code, _, err = run(capsys, ["trace-stats", "--N", "4", "--seed", "1"])
    assert code == 0
    saved = list((tmp_path / "trace_stats").glob("1-*.json"))
    assert len(saved) == 1 and "saved" in err
    assert json.loads(saved[0].read_text())["summary"]["trace_mean"] == pytest.approx(82 / 16)
