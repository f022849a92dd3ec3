import csv
import io
import json
import os
import subprocess
import sys

import pytest

from hulthen_dirac import cli
from hulthen_dirac.cli import UsageError, main, parse_invocation, parse_levels, scan_rows
from hulthen_dirac.hulthen import PotentialSpec, Variant, alpha_window


def read_csv(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


# -- parsing -----------------------------------------------------------------

def test_parse_spectrum_plan():
    plan = parse_invocation("spectrum --variant pt --m 1 --q 1 --alpha 2 --V0 2.5 --n 0..3 --format json".split())
    assert plan.command == "spectrum"
    assert plan.spec == PotentialSpec(2.5, 1.0, 2.0, 1.0, Variant.PT)
    assert plan.levels == (0, 1, 2, 3)
    assert plan.output.fmt == "json" and plan.output.path is None


def test_parse_coupling_scan():
    plan = parse_invocation("scan --variant pt --vary V0 --from 2.0 --to 6.0 --steps 200 --n 0 --q 1 --alpha 1".split())
    assert plan.scan.param == "V0" and plan.scan.steps == 200
    assert (plan.scan.start, plan.scan.stop) == (2.0, 6.0)
    assert plan.levels == (0,)


def test_parse_range_scan():
    plan = parse_invocation("scan --vary alpha --from 0.2 --to 4.5 --steps 400 --q -1 --V0 2.5 --n 0,1,2".split())
    assert plan.spec.q == -1.0 and plan.spec.variant is Variant.PT
    assert plan.levels == (0, 1, 2)


def test_parse_levels():
    assert parse_levels("0..3") == (0, 1, 2, 3)
    assert parse_levels("2,0,2") == (0, 2)
    assert parse_levels("4") == (4,)
    for bad in ("", "a", "-1", "3..1"):
        with pytest.raises(UsageError):
            parse_levels(bad)


@pytest.mark.parametrize("argv", [
    [],
    ["spectrum", "--bogus"],
    ["frobnicate"],
    ["scan", "--vary", "V0", "--from", "1", "--to", "2", "--steps", "1"],
    ["scan", "--vary", "width", "--from", "1", "--to", "2", "--steps", "5"],
    ["spectrum", "--variant", "exp"],
    ["spectrum", "--alpha", "-1"],
    ["wavefunction", "--n", "0,1"],
    ["wavefunction", "--variant", "exp"],
    ["oracle", "--points", "4"],
    ["verify", "--tol-scale", "0"],
])
def test_usage_errors(argv):
    with pytest.raises(UsageError):
        parse_invocation(argv)


def test_usage_error_exit_status(capsys):
    assert main(["spectrum", "--bogus"]) == 2
    assert "error" in capsys.readouterr().err


def test_runtime_error_exit_status(capsys):
    # V0^2 = (q alpha - V0)^2 makes the energy formula singular
    assert main(["spectrum", "--V0", "1", "--alpha", "2"]) == 2
    assert "DegenerateShape" in capsys.readouterr().err


# -- spectrum ----------------------------------------------------------------

def test_spectrum_json(capsys):
    assert main("spectrum --variant pt --q 1 --alpha 2 --V0 2.5 --n 0 --format json".split()) == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) == {"params", "results", "provenance"}
    assert set(doc["provenance"]) == {"version", "command_line"}
    energies = sorted(r["E"]["re"] for r in doc["results"])
    assert energies == pytest.approx([1.10566243, 1.39433757], abs=5e-9)
    for r in doc["results"]:
        assert set(r) == {"n", "branch", "E", "is_real", "in_window"}
        assert r["is_real"] and r["in_window"]


def test_spectrum_csv(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["spectrum", "--n", "0..2", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("# hulthen-dirac ")
    rows = read_csv(text)
    assert len(rows) == 6
    assert rows[0].keys() == {"n", "branch", "E_re", "E_im", "is_real", "in_window"}


def test_floats_round_trip(capsys):
    main("spectrum --alpha 2 --format csv".split())
    rows = read_csv(capsys.readouterr().out)
    from hulthen_dirac.hulthen import energy_closed_form
    E = energy_closed_form(PotentialSpec(2.5, 1, 2, 1, "pt"), 0, 1).energy
    assert float(rows[0]["E_re"]) == E.real


# -- scan --------------------------------------------------------------------

def scan_plan(*extra):
    return parse_invocation(["scan", "--vary", "alpha", "--from", "0.3", "--to", "4.55", "--steps", "18",
                             "--n", "0,1,2", *extra])


def test_scan_rows_sorted_and_complete():
    rows = scan_rows(scan_plan())
    assert len(rows) == 18 * 3 * 2
    assert rows == sorted(rows, key=lambda r: (r[0], r[1], r[2]))


def test_scan_outside_rows_have_blank_energy():
    rows = scan_rows(scan_plan())
    outside = [r for r in rows if r[6]]
    assert outside and all(r[3] == "" and r[4] == "" for r in outside)
    kept = scan_rows(scan_plan("--keep-outside"))
    assert all(r[3] != "" for r in kept)


def test_scan_flips_at_window_endpoints():
    spec = PotentialSpec(2.5, 1.0, 1.0, 1.0, Variant.PT)
    for n in range(3):
        lo, hi = alpha_window(spec, n)
        # nodes at lo - step, lo, ..., hi, hi + step, hi + 2 step with step = (hi - lo)/6
        step = (hi - lo) / 6
        plan = parse_invocation(["scan", "--vary", "alpha", "--from", repr(lo - step), "--to",
                                 repr(hi + 2 * step), "--steps", "10", "--n", str(n)])
        for branch in ("plus", "minus"):
            flags = [r[6] for r in scan_rows(plan) if r[2] == branch]
            assert flags == [1] + [0] * 7 + [1, 1]


def test_scan_through_singular_point():
    # q alpha (n + 1) = 2 V0 makes the energy formula singular (alpha = 5 for n = 0)
    plan = parse_invocation("scan --vary alpha --from 4.5 --to 5.5 --steps 3 --keep-outside".split())
    rows = scan_rows(plan)
    singular = [r for r in rows if r[0] == 5.0]
    assert len(singular) == 2 and all(r[3] == "" and r[6] == 1 for r in singular)


def test_scan_endpoint_energies_coincide():
    spec = PotentialSpec(2.5, 1.0, 1.0, 1.0, Variant.PT)
    lo, hi = alpha_window(spec, 0)
    plan = parse_invocation(["scan", "--vary", "alpha", "--from", repr(lo), "--to", repr(hi), "--steps", "2"])
    rows = scan_rows(plan)
    assert len(rows) == 4
    for r in rows:
        assert abs(r[3] - 1.25) <= 1e-10 and abs(r[4]) <= 1e-10


def test_scan_json_schema(capsys):
    assert main("scan --vary V0 --from 2 --to 6 --steps 5 --format json".split()) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["params"]["vary"] == "V0"
    for r in doc["results"]:
        assert {"n", "branch", "E", "is_real", "in_window", "param_value"} <= set(r)
        assert (r["E"] is None) == (not r["in_window"])


def test_scan_csv_columns(capsys):
    main("scan --vary V0 --from 2 --to 6 --steps 5".split())
    rows = read_csv(capsys.readouterr().out)
    assert list(rows[0]) == ["param_value", "n", "branch", "E_re", "E_im", "is_real", "outside_window"]


def test_scan_invalid_parameter_value(capsys):
    assert main("scan --vary alpha --from -1 --to 1 --steps 3".split()) == 2


# -- wavefunction and oracle -------------------------------------------------

def test_wavefunction_csv(capsys):
    assert main("wavefunction --alpha 2 --x-min 0.1 --x-max 3 --points 7".split()) == 0
    rows = read_csv(capsys.readouterr().out)
    assert len(rows) == 7
    assert list(rows[0]) == ["x", "upper_re", "upper_im", "lower_re", "lower_im"]


def test_wavefunction_exp_variant(capsys):
    assert main("wavefunction --variant exp --energy 0.55 --points 5 --format json".split()) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["results"]) == 5 and doc["params"]["q"] == 0


def test_oracle_json(capsys):
    assert main("oracle --points 400 --format json".split()) == 0
    doc = json.loads(capsys.readouterr().out)
    gap = [r["E_re"] for r in doc["results"] if r["in_gap"]]
    assert len(gap) == 1 and abs(gap[0] - 0.5549) < 1e-3
    assert len(doc["results"]) == 2 * 400 - 1


# -- determinism and file handling -------------------------------------------

@pytest.mark.parametrize("argv", [
    ["spectrum", "--n", "0..3"],
    ["scan", "--vary", "alpha", "--from", "0.2", "--to", "4.5", "--steps", "40", "--n", "0,1,2", "--q", "-1"],
    ["wavefunction", "--points", "50"],
    ["oracle", "--points", "200"],
])
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_byte_identical_reruns(tmp_path, argv, fmt):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([*argv, "--format", fmt, "--out", str(a)]) == 0
    assert main([*argv, "--format", fmt, "--out", str(b)]) == 0
    # the command line recorded in the header differs only by the output path
    strip = lambda p: p.read_bytes().replace(str(p).encode(), b"OUT")
    assert strip(a) == strip(b)


def test_failed_write_leaves_no_partial_file(tmp_path, monkeypatch):
    target = tmp_path / "out.csv"

    def boom(*args, **kwargs):
        raise OSError("disk full")

    monkeypatch.setattr(cli.os, "replace", boom)
    assert main(["spectrum", "--out", str(target)]) == 2
    assert not target.exists()
    assert os.listdir(tmp_path) == []


def test_verify_subset_passes(capsys):
    assert main(["verify", "--criteria", "1,6,7"]) == 0
    out = capsys.readouterr().out
    assert "[PASS] C1" in out and "[FAIL]" not in out


def test_verify_fails_with_tightened_tolerances(capsys):
    assert main(["verify", "--criteria", "1,7", "--tol-scale", "1e-30"]) == 1
    assert "[FAIL]" in capsys.readouterr().out


def test_verify_json(capsys):
    assert main(["verify", "--criteria", "1", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["results"][0]["passed"] is True


def test_verify_unknown_group(capsys):
    assert main(["verify", "--criteria", "42"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hulthen_dirac", "spectrum", "--alpha", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "1.1056624" in proc.stdout
