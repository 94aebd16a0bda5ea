import csv
import io
import json
import math

import numpy as np
import pytest

from lifshitz_lab import cli
from lifshitz_lab.units import EV_TO_RADS


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    reader = csv.reader(io.StringIO(text))
    header = [h.split(" [")[0] for h in next(reader)]
    return [dict(zip(header, r)) for r in reader]


def lorentz_csv(path, C=10.66, w0=4.2, gamma_frac=0.01, n=4000, im_scale=1.0):
    w = np.geomspace(1e-3, 1e3, n)
    g = gamma_frac * w0
    im = im_scale * C * w0**2 * g * w / ((w0**2 - w**2) ** 2 + (g * w) ** 2)
    lines = ["# extrapolate_low: zero", "# extrapolate_high: zero", "omega_ev,im_eps"]
    lines += [f"{x!r},{y!r}" for x, y in zip(w.tolist(), im.tolist())]
    path.write_text("\n".join(lines) + "\n")
    return path


def test_compute_csv(capsys):
    code, out, _ = run(capsys, "compute", "--diel", "const:11.66", "--a", "300nm", "--T", "10K")
    assert code == 0
    (r,) = rows(out)
    assert float(r["F"]) < 0 and float(r["P"]) < 0
    assert float(r["a"]) == 3e-07
    assert r["analytic_branch"] == "low_t"
    assert abs(float(r["dev_F"])) < 1e-3


def test_header_carries_units(capsys):
    _, out, _ = run(capsys, "compute", "--diel", "const:2", "--a", "1um", "--T", "300K")
    header = out.splitlines()[0].split(",")
    assert "F [J/m^2]" in header and "P [Pa]" in header


def test_compute_vacuum_is_zero(capsys):
    code, out, _ = run(capsys, "compute", "--diel", "vacuum", "--a", "300nm", "--T", "300K",
                       "--quantities", "F,P,S")
    assert code == 0
    (r,) = rows(out)
    assert float(r["F"]) == 0.0 and float(r["P"]) == 0.0 and float(r["S"]) == 0.0


def test_compute_zero_temperature_json(capsys):
    code, out, _ = run(capsys, "compute", "--diel", "const:11.66", "--a", "300nm", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["units"]["F"] == "J/m^2"
    (r,) = doc["records"]
    assert r["analytic_branch"] == "zero_t"
    assert r["F_analytic"] == pytest.approx(r["F"], rel=1e-8, abs=0)
    assert r["P_analytic"] == pytest.approx(r["P"], rel=1e-8, abs=0)


@pytest.mark.parametrize("spec", ["bogus", "const:abc", "osc:10.66", "plasma:9parsecs"])
def test_bad_model_spec_exit_2(capsys, spec):
    code, _, err = run(capsys, "compute", "--diel", spec, "--a", "300nm")
    assert code == 2
    assert err


def test_bad_units_exit_2(capsys):
    code, _, err = run(capsys, "compute", "--diel", "const:2", "--a", "300furlongs")
    assert code == 2


def test_sweep_eps0(capsys):
    code, out, _ = run(capsys, "sweep", "--variable", "eps0", "--start", "2", "--stop", "20", "--points", "4",
                       "--a", "1um", "--T", "300K")
    assert code == 0
    rs = rows(out)
    assert [float(r["eps0"]) for r in rs] == [2.0, 8.0, 14.0, 20.0]
    F = [float(r["F"]) for r in rs]
    assert all(x > y for x, y in zip(F, F[1:]))


def test_sweep_parallel_matches_serial(capsys):
    argv = ["sweep", "--variable", "temperature", "--start", "50K", "--stop", "300K", "--points", "4",
            "--a", "500nm", "--diel", "const:11.66", "--no-analytic"]
    _, serial, _ = run(capsys, *argv, "--jobs", "1")
    _, parallel, _ = run(capsys, *argv, "--jobs", "2")
    assert serial == parallel
    T = [float(r["T"]) for r in rows(serial)]
    assert T == sorted(T)


def test_jobs_environment(capsys, monkeypatch):
    monkeypatch.setenv(cli.JOBS_ENV, "nope")
    code, _, _ = run(capsys, "sweep", "--variable", "separation", "--start", "1um", "--stop", "2um",
                     "--points", "2", "--diel", "const:2")
    assert code == 2


def test_sweep_separation_log(capsys):
    code, out, _ = run(capsys, "sweep", "--variable", "separation", "--start", "100nm", "--stop", "10um",
                       "--points", "3", "--scale", "log", "--diel", "const:11.66", "--T", "300K")
    assert code == 0
    a = [float(r["a"]) for r in rows(out)]
    assert a == pytest.approx([1e-7, 1e-6, 1e-5], rel=1e-12, abs=0)


def test_nernst_pass(capsys):
    code, out, _ = run(capsys, "nernst", "--diel", "const:11.66", "--a", "300nm")
    assert code == 0
    (r,) = rows(out)
    assert r["verdict"] == "PASS"
    assert float(r["S_predicted"]) == 0.0


def test_nernst_violation_with_dc(capsys):
    code, out, _ = run(capsys, "nernst", "--diel", "const:11.66", "--a", "300nm", "--with-dc")
    assert code == 0
    (r,) = rows(out)
    assert r["verdict"] == "VIOLATION"
    assert float(r["S_limit"]) == pytest.approx(float(r["S_predicted"]), rel=1e-3, abs=0)


def test_nernst_vacuum(capsys):
    code, out, _ = run(capsys, "nernst", "--diel", "vacuum", "--a", "300nm")
    assert code == 0
    assert rows(out)[0]["verdict"] == "PASS"


def test_nernst_needs_two_temperatures(capsys):
    code, _, _ = run(capsys, "nernst", "--diel", "const:2", "--a", "300nm", "--temps", "1K")
    assert code == 2


def test_ingest_lorentzian(capsys, tmp_path):
    src = lorentz_csv(tmp_path / "lor.csv")
    model_path = tmp_path / "lor.model"
    code, out, err = run(capsys, "ingest", str(src), "--model-out", str(model_path), "--points", "20")
    assert code == 0
    assert "static limit" in err
    for r in rows(out):
        xi = float(r["xi"])
        ref = 1 + 10.66 * (4.2 * EV_TO_RADS) ** 2 / ((4.2 * EV_TO_RADS) ** 2 + xi**2)
        assert float(r["eps"]) == pytest.approx(ref, rel=1e-2, abs=0)
    # the written model is usable as a dielectric
    code, out, _ = run(capsys, "compute", "--diel", f"table:{model_path}", "--a", "300nm", "--T", "300K")
    assert code == 0
    assert float(rows(out)[0]["F"]) < 0


def test_ingest_zero_absorption(capsys, tmp_path):
    src = lorentz_csv(tmp_path / "flat.csv", im_scale=0.0)
    code, out, _ = run(capsys, "ingest", str(src), "--points", "5")
    assert code == 0
    assert all(float(r["eps"]) == 1.0 for r in rows(out))


def test_ingest_non_monotone_reports_line(capsys, tmp_path):
    src = tmp_path / "bad.csv"
    src.write_text("omega_ev,im_eps\n1.0,0.1\n2.0,0.2\n1.5,0.3\n")
    code, _, err = run(capsys, "ingest", str(src))
    assert code == 2
    assert "4" in err


def test_ingest_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "ingest", str(tmp_path / "nope.csv"))
    assert code == 2


def test_model_file_round_trip(tmp_path):
    from lifshitz_lab.models import SampledPermittivity

    m = SampledPermittivity(np.geomspace(1e13, 1e17, 30), np.linspace(11.0, 1.5, 30), source="x")
    p = tmp_path / "m.model"
    cli.write_model_file(p, m, source="x")
    back = cli.load_model_file(p)
    assert np.array_equal(back.xi, m.xi) and np.array_equal(back.eps, m.eps)


def test_spec_model_file(tmp_path):
    p = tmp_path / "s.model"
    p.write_text(f"{cli.MODEL_HEADER}\nkind: spec\nmodel: osc:10.66@4.2eV\n")
    m = cli.parse_model(f"table:{p}")
    assert m.terms[0][0] == 10.66


def test_schema(capsys):
    code, out, _ = run(capsys, "schema", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["compute/sweep"]["P"]["unit"] == "Pa"
    code, out, _ = run(capsys, "schema")
    assert "F [J/m^2]" in out


def test_determinism(capsys):
    argv = ["compute", "--diel", "osc:10.66@4.2eV", "--metal", "plasma:9eV", "--a", "400nm", "--T", "77K",
            "--quantities", "F,P,S"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "lifshitz_lab", "schema"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "[nernst]" in res.stdout
