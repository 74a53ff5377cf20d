import io
import json
import math
import random

import pytest

import actsym.bench as bench
from actsym.bench import (CSV_COLUMNS, ERROR, read_csv, run, shifted_geometric_mean, summarize,
                          write_csv)
from actsym.cli import main
from actsym.engine import SolverConfig
from actsym.instances import MKCS, MKP, MkcsData, Problem, gen_mkp, save
from actsym.instances.mkcs import path
from actsym.instances.mkp import mkp_from_lists


def csv_text(rows):
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def without_time(text):
    return [line.rsplit(",", 2)[0] + "," + line.rsplit(",", 1)[1]
            for line in text.splitlines()]


@pytest.mark.parametrize("times,expected", [([4.0], 4.0), ([0, 0], 0.0),
                                            ([1, 3], 2 * math.sqrt(2) - 1)])
def test_shifted_geometric_mean(times, expected):
    assert shifted_geometric_mean(times) == pytest.approx(expected, abs=1e-12)


def test_mean_of_nothing():
    with pytest.raises(ValueError):
        shifted_geometric_mean([])


def test_one_instance_two_settings():
    problem = Problem(MKP, mkp_from_lists([3, 4], [3, 4], [6, 6], "pair"))
    rows = run([problem], ["no-sym", "act"])
    assert [(r["instance"], r["setting"], r["status"], r["objective"]) for r in rows] == [
        ("pair", "no-sym", "optimal", "7"), ("pair", "act", "optimal", "7")]


def test_rerun_gives_identical_csv_up_to_timing():
    problems = [Problem(MKP, gen_mkp(s, 6, 2)) for s in range(3)]
    first, second = csv_text(run(problems)), csv_text(run(problems))
    assert first.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert without_time(first) == without_time(second)


def test_forced_timeout_records_the_limit():
    problem = Problem(MKP, gen_mkp(0, 20, 4))
    (row,) = run([problem], ["no-sym"], SolverConfig(time_limit_s=0.001))
    assert row["status"] == "time_limit" and row["time_s"] == 0.001


def test_unreadable_instance_becomes_error_row(tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    good = tmp_path / "good.json"
    save(Problem(MKP, gen_mkp(0, 4, 2)), good)
    rows = run([str(bad), str(good)], ["no-sym"])
    assert rows[0]["status"] == ERROR and rows[0]["instance"] == "broken"
    assert rows[1]["status"] == "optimal"


def test_parallel_matches_serial():
    problems = [Problem(MKP, gen_mkp(s, 5, 2)) for s in range(2)]
    assert without_time(csv_text(run(problems, jobs=2))) == without_time(csv_text(run(problems)))


def test_read_csv_checks_header():
    with pytest.raises(ValueError):
        read_csv(io.StringIO("instance,setting\nx,y\n"))


def synthetic_rows():
    rows = []
    times = {"p": (0.5, 1.5), "q": (30, 12), "r": (250, 600), "s": (600, 600), "t": (5, 9.99)}
    for inst, pair in times.items():
        for setting, t in zip(("no-sym", "act"), pair):
            status = "time_limit" if t == 600 else "optimal"
            rows.append({"instance": inst, "setting": setting, "status": status,
                         "objective": "1", "nodes": 3, "time_s": t, "seed": 0})
    return rows


def test_summary_accounting_and_order_invariance():
    rows = synthetic_rows()
    table = summarize(rows)
    counts = {r.label: r.count for r in table.rows}
    assert table.excluded == ["s"]
    assert counts == {"All": 4, "[0,10)": 2, "[10,100)": 1, "[100,inf)": 1}
    assert sum(v for k, v in counts.items() if k != "All") == counts["All"]
    shuffled = rows[:]
    random.Random(3).shuffle(shuffled)
    assert summarize(shuffled).format() == table.format()


def test_empty_classes_are_omitted():
    table = summarize(synthetic_rows(), (0, 1000))
    assert [r.label for r in table.rows] == ["All", "[0,1000)"]


def test_error_instances_are_reported():
    rows = synthetic_rows() + [{"instance": "bad", "setting": "act", "status": ERROR,
                                "objective": "", "nodes": 0, "time_s": 0, "seed": 0}]
    table = summarize(rows)
    assert table.errors == ["bad"] and "skipped" in table.format()


def test_cli_end_to_end(tmp_path, capsys):
    out = tmp_path / "inst"
    assert main(["gen", "mkp", "--out", str(out), "--count", "2", "--m", "5", "--n", "2"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    files = [str(out / e["file"]) for e in manifest["instances"]]
    assert len(files) == 2
    csv_path = tmp_path / "res.csv"
    assert main(["bench", *files, "--out", str(csv_path), "--time-limit", "60"]) == 0
    with open(csv_path) as fh:
        rows = read_csv(fh)
    assert len(rows) == 8 and {r["status"] for r in rows} == {"optimal"}
    assert main(["summarize", str(csv_path)]) == 0
    assert "All" in capsys.readouterr().out
    assert main(["solve", files[0], "--setting", "ineq"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "optimal"


def test_cli_coloring_from_dimacs(data_dir, capsys):
    assert main(["solve", str(data_dir / "petersen.col"), "-k", "3", "--setting",
                 "act-consec"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["objective"] == "10" and row["instance"] == "petersen_k3"


def test_cli_gen_other_families(tmp_path):
    assert main(["gen", "mucp", "--out", str(tmp_path / "u"), "--periods", "3"]) == 0
    assert main(["gen", "mkcs", "--out", str(tmp_path / "c"), "--graph", "myciel3", "-k", "2"]) == 0
    assert (tmp_path / "c" / "myciel3_k2.json").exists()


def test_family_time_limit_defaults(monkeypatch):
    seen = []
    real = bench.solve

    def spy(program, cfg, handlers):
        seen.append(cfg.time_limit_s)
        return real(program, cfg, handlers)

    monkeypatch.setattr(bench, "solve", spy)
    cfg = SolverConfig(time_limit_s=None)
    run([Problem(MKP, gen_mkp(0, 3, 2)), Problem(MKCS, MkcsData(path(3), 2, "p3"))],
        ["no-sym"], cfg)
    assert seen == [3600.0, 7200.0]
