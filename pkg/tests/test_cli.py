import csv
import io
import json

import pytest

from cesaro import weights as wm
from cesaro.cli import (EXIT_ADMISSIBILITY, EXIT_ARGS, EXIT_DOCUMENT, EXIT_OK, EXIT_UNSUPPORTED,
                        SWEEP_COLUMNS, main)
from cesaro.problems import fixture


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def write_problem(tmp_path, pr, name="problem.json"):
    path = tmp_path / name
    path.write_text(json.dumps(pr.to_dict()))
    return str(path)


def test_classify(capsys):
    status, out, err = run(capsys, "classify", "--params", "1/2,1,1/2")
    assert status == EXIT_OK
    doc = json.loads(out)
    assert doc["regime"] == "T1a" and doc["formulas"] == ["A1"]


def test_classify_trivial_hint(capsys):
    status, out, err = run(capsys, "classify", "--params", "2,3,1")
    assert status == EXIT_OK
    assert json.loads(out)["regime"] == "Trivial_p_gt_1"
    assert "oracle --triviality" in err


def test_constant_unsupported(capsys):
    status, _, err = run(capsys, "constant", "--params", "1/2,1/2,1/2")
    assert status == EXIT_UNSUPPORTED
    assert "q < p" in err


def test_bad_arguments(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["classify", "--bogus"])
    assert exc.value.code == EXIT_ARGS
    status, _, _ = run(capsys, "classify", "--params", "1/2,1")
    assert status == EXIT_ARGS
    status, _, _ = run(capsys, "oracle", "--params", "1/2,1,1/2", "--budget", "10")
    assert status == EXIT_ARGS


def test_malformed_document(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"segments": [{"c": -1}]}))
    status, _, err = run(capsys, "constant", "--params", "1/2,1,1/2", "--u", str(bad))
    assert status == EXIT_DOCUMENT
    assert "bad.json:segments[0]" in err
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    status, _, err = run(capsys, "constant", "--params", "1/2,1,1/2", "--u", str(broken))
    assert status == EXIT_DOCUMENT and "broken.json:1:" in err


def test_constant_admissibility_failure(capsys, tmp_path):
    pr = fixture("T1a").with_weights(w=wm.analytic(1, -1))
    status, out, _ = run(capsys, "constant", "--problem", write_problem(tmp_path, pr))
    assert status == EXIT_ADMISSIBILITY
    assert json.loads(out)["verdict"] == "not-applicable"


def test_verify_t1a(capsys, tmp_path):
    path = write_problem(tmp_path, fixture("T1a"))
    status, out, _ = run(capsys, "verify", "--problem", path, "--budget", "800")
    assert status == EXIT_OK
    doc = json.loads(out)
    assert doc["verdict"] == "pass"
    assert doc["constant"]["combined"] == pytest.approx(0.25, abs=1e-6)


def test_oracle_triviality(capsys, tmp_path):
    decay = tmp_path / "decay.json"
    decay.write_text(wm.dumps(wm.analytic(1, 0, 0, -1)))
    status, out, _ = run(capsys, "oracle", "--params", "2,2,1", "--u", str(decay), "--w", str(decay),
                         "--triviality", "--widths", "0.1,0.01")
    assert status == EXIT_OK
    spikes = json.loads(out)["spikes"]
    assert [s["width"] for s in spikes] == [0.1, 0.01]
    status, _, _ = run(capsys, "oracle", "--params", "1/2,1,1/2", "--triviality")
    assert status == EXIT_UNSUPPORTED


def test_sweep_regimes(capsys):
    status, out, _ = run(capsys, "sweep", "--p", "1/2", "--q", "1/2,1,2", "--theta", "1/2", "--no-oracle")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == SWEEP_COLUMNS
    assert [r[3] for r in rows[1:]] == ["Unsupported_q_le_p", "T1a", "T1a"]


def test_sweep_example_regimes(capsys):
    # q in {0.5, 1, 2} with theta = p = 1/2: q = p is excluded, so take q = 3/4 for the T1b point
    status, out, _ = run(capsys, "sweep", "--p", "1/2", "--q", "3/4,1,2", "--theta", "1/2", "--no-oracle")
    rows = list(csv.reader(io.StringIO(out)))
    assert [r[3] for r in rows[1:]] == ["T1b", "T1a", "T1a"]
    assert status == EXIT_OK


def test_reduce_and_copson(capsys, tmp_path):
    one = tmp_path / "one.json"
    one.write_text(wm.dumps(wm.constant(1.0)))
    status, out, _ = run(capsys, "reduce", "--embedding", "1,2,1/2,1", "--u1", str(one), "--v1", str(one),
                         "--u2", str(one), "--v2", str(one))
    assert status == EXIT_OK
    assert json.loads(out)["params"] == {"p": "1/2", "q": "1", "theta": "2"}
    status, out, _ = run(capsys, "copson-transform", "--exponents", "2,3", "--u", str(one), "--v", str(one))
    doc = json.loads(out)
    assert doc["u"]["segments"][0]["alpha"] == -1


def test_out_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    status, out, _ = run(capsys, "classify", "--params", "1,2,1", "--out", str(target))
    assert status == EXIT_OK and out == ""
    assert json.loads(target.read_text())["regime"] == "T2"
