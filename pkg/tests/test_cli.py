import json
import random
import subprocess
import sys

import pytest

from carrot import fixtures
from carrot.cli import expand_paths, main
from carrot.spectra import compute_spectrum, dump_model, load_model, Model
from carrot.trace import read_trace_file


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name in ("isisosceles.mini", "isisosceles.cases", "partial_id.mini", "partial_id.cases", "scan.cases"):
        (tmp_path / name).write_text(fixtures.read(name))
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_trace_writes_good_and_bad_files(work, capsys):
    code, out, _ = run(capsys, "trace", "isisosceles.mini", "isisosceles.cases", "--out", "t")
    assert code == 0
    assert "3 good, 1 bad" in out
    assert sorted(p.name for p in (work / "t").iterdir()) == [
        "run_000_good.trace", "run_001_good.trace", "run_002_good.trace", "run_003_bad.trace",
    ]
    t = read_trace_file(work / "t" / "run_003_bad.trace")
    assert t.samples[0].values == (2, 3, 2)


def test_trace_default_directory(work, capsys):
    assert run(capsys, "trace", "isisosceles.mini", "isisosceles.cases")[0] == 0
    assert len(list((work / "traces").glob("*.trace"))) == 4


def test_trace_empty_case_file_warns(work, capsys):
    (work / "empty.cases").write_text("# nothing\n")
    code, _, err = run(capsys, "trace", "isisosceles.mini", "empty.cases")
    assert code == 0
    assert "warning" in err
    assert not (work / "traces").exists()


def test_trace_arity_error_names_line(work, capsys):
    (work / "bad.cases").write_text("1 2 3 -> 0\n1 2 -> 0\n")
    code, _, err = run(capsys, "trace", "isisosceles.mini", "bad.cases")
    assert code != 0
    assert "line 2" in err and err.startswith("carrot: error:")


def test_trace_program_error(work, capsys):
    (work / "broken.mini").write_text("fn f( { }")
    code, _, err = run(capsys, "trace", "broken.mini", "isisosceles.cases")
    assert code == 1 and "broken.mini:1:7:" in err


def _traced(work, capsys):
    run(capsys, "trace", "isisosceles.mini", "isisosceles.cases")
    return sorted(str(p) for p in (work / "traces").glob("*_good.trace"))


def test_model_lessthan_entry_only(work, capsys):
    _traced(work, capsys)
    code, out, _ = run(capsys, "model", "traces/*_good.trace", "--schemata", "lessthan", "--points", "ENTER",
                       "--out", "iso.model")
    assert code == 0
    assert "model of 3 run(s): 1 live invariant(s)" in out
    invs = [l for l in (work / "iso.model").read_text().splitlines() if l.startswith("inv ")]
    assert invs == ["inv isIsosceles:::ENTER LessThan x z"]


def test_model_default_output(work, capsys):
    _traced(work, capsys)
    assert run(capsys, "model", "traces/*_good.trace")[0] == 0
    assert load_model((work / "carrot.model").read_text()).runs_absorbed == 3


def test_single_trace_model_equals_its_spectrum(work, capsys):
    paths = _traced(work, capsys)
    run(capsys, "model", paths[0], "--out", "one.model")
    m = load_model((work / "one.model").read_text())
    assert m == Model.from_spectrum(compute_spectrum(read_trace_file(paths[0])))


def test_spectrum_command(work, capsys):
    paths = _traced(work, capsys)
    code, out, _ = run(capsys, "spectrum", paths[0], "--schemata", "lessthan", "--no-vsets")
    assert code == 0
    assert out.startswith("spectrum run_0\n")
    assert "vsets off" in out and "vset " not in out


def test_mixed_programs_are_incompatible(work, capsys):
    run(capsys, "trace", "isisosceles.mini", "isisosceles.cases", "--out", "a")
    run(capsys, "trace", "partial_id.mini", "partial_id.cases", "--out", "b")
    code, _, err = run(capsys, "model", "a/run_000_good.trace", "b/run_000_good.trace")
    assert code == 1 and "incompatible" in err.lower()


def test_missing_files(work, capsys):
    code, _, err = run(capsys, "model", "nothing/*.trace")
    assert code == 1 and "no trace files" in err
    code, _, err = run(capsys, "diff", "nope.model", "nope.trace")
    assert code == 1


def test_bad_schema_name(work, capsys):
    _traced(work, capsys)
    code, _, err = run(capsys, "model", "traces/*_good.trace", "--schemata", "gt")
    assert code == 1 and "gt" in err


def test_diff_isosceles(work, capsys):
    _traced(work, capsys)
    run(capsys, "model", "traces/*_good.trace", "--schemata", "lessthan", "--no-vsets", "--points", "ENTER")
    code, out, _ = run(capsys, "diff", "carrot.model", "traces/run_003_bad.trace", "--points", "ENTER")
    assert code == 0
    assert out == "isIsosceles:::ENTER  violated: x < z\n"


def test_diff_structured(work, capsys):
    _traced(work, capsys)
    run(capsys, "model", "traces/*_good.trace")
    code, out, _ = run(capsys, "diff", "carrot.model", "traces/run_003_bad.trace", "--format", "structured")
    assert code == 0
    records = [json.loads(l) for l in out.splitlines()]
    assert {"category": "invalidated", "ppt": "isIsosceles:::ENTER", "kind": "LessThan",
            "vars": ["x", "z"], "detail": {"predicate": "x < z", "const": None}} in records


def test_diff_of_a_good_run_is_empty(work, capsys):
    paths = _traced(work, capsys)
    run(capsys, "model", *paths)
    code, out, _ = run(capsys, "diff", "carrot.model", paths[1])
    assert out == "no invariants invalidated; no value-set extensions\n"


def test_diff_partial_id(work, capsys):
    run(capsys, "trace", "partial_id.mini", "partial_id.cases")
    run(capsys, "model", "traces/*_good.trace")
    for bad in sorted((work / "traces").glob("*_bad.trace")):
        code, out, _ = run(capsys, "diff", "carrot.model", str(bad))
        assert "partial_id:::EXIT  violated: c == return" in out.splitlines()


def test_diff_rejects_corrupt_model(work, capsys):
    paths = _traced(work, capsys)
    (work / "junk.model").write_text("model 1\nbogus\n")
    code, _, err = run(capsys, "diff", "junk.model", paths[0])
    assert code == 1 and "junk.model" in err


def test_converge_isosceles(work, capsys):
    _traced(work, capsys)
    code, out, _ = run(capsys, "converge", "traces/*_good.trace", "--schemata", "lessthan", "--points", "ENTER",
                       "--window", "1")
    lines = out.splitlines()
    assert lines[0] == "run,live,falsified,vset_ins,pset_ins"
    assert [int(l.split(",")[1]) for l in lines[1:4]] == [3, 2, 1]
    assert lines[-1] == "steady_state=none"


def test_converge_identical_runs(work, capsys):
    paths = _traced(work, capsys)
    code, out, _ = run(capsys, "converge", *([paths[0]] * 5), "--window", "3")
    assert code == 0 and out.splitlines()[-1] == "steady_state=1"


def test_converge_csv_to_file(work, capsys):
    paths = _traced(work, capsys)
    code, out, _ = run(capsys, "converge", *paths, "--out", "curve.csv")
    assert out.startswith("steady_state=")
    assert (work / "curve.csv").read_text().startswith("run,live,")


def test_converge_hundred_scan_runs(work, capsys):
    rng = random.Random(11)
    lines = ["entry scan"]
    for _ in range(100):
        c, pos = rng.choice([10, 20, 30]), rng.randint(0, 5000)
        lines.append(f"{c} {pos} -> {c * 1000 + pos}")
    (work / "hundred.cases").write_text("\n".join(lines) + "\n")
    run(capsys, "trace", "partial_id.mini", "hundred.cases")
    code, out, _ = run(capsys, "converge", "traces/*_good.trace")
    rows = [l.split(",") for l in out.splitlines()[1:-1]]
    assert len(rows) == 100
    assert [int(r[0]) for r in rows] == list(range(1, 101))  # natural order of run files
    assert out.splitlines()[-1] != "steady_state=none"
    assert sum(int(r[3]) for r in rows[-5:]) >= 1


def test_step_budget_env(work, capsys, monkeypatch):
    (work / "deep.mini").write_text("fn f(n) { if (n < 1) { return 0; } return 1 + f(n - 1); }\n")
    (work / "deep.cases").write_text("100 -> 100\n")
    monkeypatch.setenv("CARROT_STEP_BUDGET", "30")
    code, _, err = run(capsys, "trace", "deep.mini", "deep.cases")
    assert code == 1 and "step budget" in err
    monkeypatch.setenv("CARROT_STEP_BUDGET", "100000")
    assert run(capsys, "trace", "deep.mini", "deep.cases")[0] == 0


def test_expand_paths_natural_order(tmp_path):
    for i in (10, 2, 1):
        (tmp_path / f"run_{i}.trace").write_text("")
    got = expand_paths([str(tmp_path / "run_*.trace")])
    assert [p.rsplit("/", 1)[1] for p in got] == ["run_1.trace", "run_2.trace", "run_10.trace"]


def test_module_entry_point(work):
    proc = subprocess.run([sys.executable, "-m", "carrot", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "converge" in proc.stdout


def test_model_round_trips_through_cli(work, capsys):
    paths = _traced(work, capsys)
    run(capsys, "model", *paths)
    text = (work / "carrot.model").read_text()
    assert dump_model(load_model(text)) == text
