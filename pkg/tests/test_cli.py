import csv
import io
import json

import pytest

from ntlab import abclab, cli
from ntlab.bounds import BoundReport
from ntlab.sweep import SweepRecord, iter_sweep, read_records


def run(*argv):
    buf = io.StringIO()
    code = cli.run(list(map(str, argv)), out=buf)
    return code, buf.getvalue()


def test_factor_text_and_json():
    assert run("factor", 50) == (0, "50 = 2 * 5^2\n")
    code, out = run("--format", "json", "factor", "50")
    assert code == 0 and json.loads(out)["factors"] == [[2, 1], [5, 2]]
    code, out = run("factor", "72", "--format", "csv")
    assert out.splitlines() == ["p,e", "2,3", "3,2"]


def test_theta():
    code, out = run("--format", "json", "theta", "10")
    assert code == 0 and json.loads(out)["theta"] == pytest.approx(5.3471, abs=5e-5)


def test_gaussian_example():
    code, out = run("gaussian", 7)
    assert code == 0
    assert "unit: -i" in out and "(1+i)^1 (2+i)^2" in out
    code, out = run("--format", "json", "gaussian", 7, "--threshold", "1.5")
    d = json.loads(out)
    assert d["unit"] == "-i" and d["factors"] == [["1+i", 1], ["2+i", 2]]
    dec = d["decomposition"]
    assert dec["m"] == 2 and dec["w"] == "-1" and dec["xi0"] == "-i" and dec["exact"]
    assert dec["large_part"] == [["(2-i)/(2+i)", 2, 5]]


def test_curve_and_frey():
    code, out = run("--format", "json", "curve", 7)
    d = json.loads(out)
    assert code == 0 and d["discriminant"] == -1728 * 50 and d["s"] == 6 and d["t"] == 3
    assert {row["p"]: row["reduction"] for row in d["local"]}[5] == "multiplicative"
    code, out = run("--format", "json", "frey", 1, 8, 9)
    assert code == 0 and json.loads(out)["discriminant"] == 82944
    assert run("frey", 2, 4, 6)[0] == 2


def test_exit_codes():
    assert run("factor", "-3")[0] == 2
    assert run("factor", "abc")[0] == 2
    assert run("nosuch")[0] == 2
    assert run("sweep", "--from", "5", "--to", "10", "--out", "/dev/null")[0] == 2
    assert run("theta", "1e9")[0] == 3
    assert run("gaussian", "1")[0] == 2  # auto threshold undefined for rad = 2
    assert run("--help")[0] == 0


def test_bounds_eval_and_constants(tmp_path):
    code, out = run("bounds", "eval", "--expr", "threshold_B", "--args", "R=10")
    assert code == 0 and float(out.split("=")[1]) == pytest.approx(3.998, abs=5e-4)
    args = ["bounds", "eval", "--expr", "eg_arch", "--args", "m=2", "heights=0.8047189562170501,0.8047189562170501", "h_xi=1"]
    code, out = run(*args, "--constants", "K_d=4")
    assert code == 0 and float(out.split("=")[1]) == pytest.approx(10.36, abs=5e-3)
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# constants\nK_d = 4\nK = 2\n")
    code, out = run("--config", cfg, *args)
    assert float(out.split("=")[1]) == pytest.approx(10.36, abs=5e-3)
    # flags override the file
    code, out = run("--config", cfg, *args, "--constants", "K_d=1")
    assert float(out.split("=")[1]) == pytest.approx(10.36 / 16, abs=1e-3)
    assert run(*args, "--constants", "nope=1")[0] == 2
    assert run(*args, "--constants", "K_d=-1")[0] == 2
    assert run("bounds", "eval", "--expr", "amgm", "--args", "logR=4")[0] == 2
    assert run("bounds", "eval", "--expr", "amgm", "--args", "logR=4", "m=3", "extra=1")[0] == 2


def test_sweep_counts_round_trip_and_jobs(tmp_path):
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert run("sweep", "--from", 16, "--to", 1000, "--out", out1)[0] == 0
    lines = out1.read_text().splitlines()
    assert len(lines) == 985
    for line in lines:
        rec = SweepRecord.from_json(line)
        assert rec.to_json() == line
        assert list(json.loads(line)) == ["n", "p_max", "rad", "nu_product", "m", "thm1_ratio", "thm2_ratio"]
    assert run("sweep", "--from", 16, "--to", 1000, "--jobs", 3, "--chunk", 97, "--out", out2)[0] == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_sweep_csv_projection(tmp_path):
    p = tmp_path / "s.csv"
    assert run("--format", "csv", "sweep", "--from", 16, "--to", 40, "--out", p)[0] == 0
    rows = list(csv.reader(p.open()))
    assert rows[0] == SweepRecord.csv_header() and len(rows) == 26


def test_sweep_record_rejects_bad_lines():
    with pytest.raises(ValueError):
        SweepRecord.from_json('{"n": 1}')
    with pytest.raises(ValueError):
        list(read_records(['{"n":16,"p_max":257,"rad":257,"nu_product":1,"m":1.5,"thm1_ratio":1,"thm2_ratio":1}']))


def test_fit_file_equals_memory(tmp_path):
    p = tmp_path / "s.jsonl"
    run("sweep", "--from", 16, "--to", 3000, "--out", p)
    for shape in ("thm1", "thm2"):
        _, mem = run("--format", "json", "fit", shape, "--from", 100, "--to", 3000)
        _, fil = run("--format", "json", "fit", shape, "--from", 100, "--to", 3000, "--input", p)
        assert json.loads(mem)["kappa"] == json.loads(fil)["kappa"] > 0
    t = tmp_path / "t.txt"
    assert run("abc", "enumerate", "--cmax", 200, "--out", t)[0] == 0
    for shape in ("cor4", "abc-case2"):
        _, mem = run("--format", "json", "fit", shape, "--from", 2, "--to", 200)
        _, fil = run("--format", "json", "fit", shape, "--from", 2, "--to", 200, "--input", t)
        assert json.loads(mem)["kappa"] == pytest.approx(json.loads(fil)["kappa"], rel=1e-12)


def test_fit_stable_across_jobs():
    vals = {j: run("--format", "json", "fit", "thm2", "--from", 100, "--to", 5000, "--jobs", j)[1] for j in (1, 2)}
    assert vals[1] == vals[2]
    vals = {j: run("--format", "json", "fit", "cor4", "--from", 2, "--to", 500, "--jobs", j)[1] for j in (1, 3)}
    assert vals[1] == vals[3]


def test_abc_scan(tmp_path, capsys):
    src = tmp_path / "in.txt"
    src.write_text("# triples\n1 1 2\n5 27 32\n2 4 6\n1 8 9\n")
    dst = tmp_path / "out.csv"
    code, out = run("abc", "scan", "--input", src, "--out", dst)
    assert code == 0 and "1 rejected" in out
    assert "line 4" in capsys.readouterr().err
    rows = list(csv.reader(dst.open()))
    assert rows[0] == list(abclab.CSV_HEADER)
    assert rows[1][:3] == ["1", "1", "2"] and rows[1][8:] == ["", ""]
    assert rows[2][:5] == ["5", "27", "32", "30", "2"] and rows[2][8] != ""
    assert len(rows) == 4
    bad = tmp_path / "bad.txt"
    bad.write_text("1 8\n")
    assert run("abc", "scan", "--input", bad, "--out", dst)[0] == 2


def test_abc_scan_invariant_violation_exits_1(tmp_path, monkeypatch):
    src = tmp_path / "in.txt"
    src.write_text("1 8 9\n")
    monkeypatch.setattr(abclab, "shimura_abc_check", lambda rep, e=3: BoundReport.compare(2.0, 1.0))
    assert run("abc", "scan", "--input", src, "--out", tmp_path / "o.csv")[0] == 1


def test_iter_sweep_ordering():
    ns = [r.n for r in iter_sweep(16, 500, jobs=1, chunk=37)]
    assert ns == list(range(16, 501))


def test_sweep_invariant_violation_exits_1(tmp_path, monkeypatch):
    from ntlab import sweep

    def broken(n, fact):
        raise sweep.InvariantViolation(f"n = {n}: forced")

    monkeypatch.setattr(sweep, "sweep_record", broken)
    assert run("sweep", "--from", 16, "--to", 20, "--out", tmp_path / "s.jsonl")[0] == 1
