import json

import jsonschema
import pytest

from binkoszul.cli import (EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO, EXIT_OK, EXIT_PROPERTY, REPORT_SCHEMA,
                           THREADS_ENV, CliError, main, resolve_threads)
from binkoszul.sparse import load_sms


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["gen", "--model", "prym", "--genus", "6", "--prime", "131", "--seed", "7"]
    assert run(capsys, *argv, "--out", str(a))[0] == 0
    assert run(capsys, *argv, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["model"] == "prym" and doc["genus"] == 6 and doc["prime"] == 131
    assert len(doc["a"]) == 2 and all(len(row) == 5 for row in doc["a"])
    assert all(x != 0 and len(set(row)) == 5 for row in doc["a"] for x in row)


def test_gen_stdout_and_digest(capsys):
    code, out, err = run(capsys, "gen", "--model", "canonical", "--genus", "4")
    assert code == 0
    assert json.loads(out)["model"] == "canonical"
    assert len(err.strip()) == 64


@pytest.mark.parametrize("argv,code", [
    (["gen", "--model", "prym", "--genus", "4"], EXIT_CONFIG),
    (["gen", "--model", "prym"], EXIT_CONFIG),
    (["gen", "--model", "prym", "--genus", "6", "--prime", "13"], EXIT_DOMAIN),
    (["gen", "--model", "prym", "--genus", "6", "--prime", "91"], EXIT_DOMAIN),
    (["verify", "--model", "prym", "--genus", "4"], EXIT_CONFIG),
    (["verify", "--model", "prym", "--genus", "6", "--np", "5"], EXIT_CONFIG),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_missing_and_corrupt_files(capsys, tmp_path):
    assert run(capsys, "rank", str(tmp_path / "nope.sms"), "--prime", "131")[0] == EXIT_IO
    bad = tmp_path / "bad.sms"
    bad.write_text("2 2 M\n1 1 1\n")
    assert run(capsys, "rank", str(bad), "--prime", "131")[0] == EXIT_IO
    curve = tmp_path / "c.json"
    curve.write_text("{}")
    assert run(capsys, "assemble", "--curve", str(curve), "--out", str(tmp_path / "m.sms"))[0] == EXIT_IO


@pytest.mark.parametrize("argv,head", [
    (["--model", "prym", "--genus", "6", "--np", "0"], "220 30"),
    (["--model", "prym", "--genus", "8", "--np", "1"], "1050 140"),
    (["--model", "canonical", "--genus", "5", "--ell", "2", "--subspace", "v"], "90 40"),
])
def test_assemble_headers(capsys, tmp_path, argv, head):
    out_path = tmp_path / "m.sms"
    code, out, _ = run(capsys, "assemble", *argv, "--out", str(out_path))
    assert code == 0 and out.startswith(head)
    assert out_path.read_text().splitlines()[0] == head + " M"
    assert json.loads((tmp_path / "m.sms.json").read_text())["prime"] == 131


def test_assemble_from_curve_file(capsys, tmp_path):
    curve = tmp_path / "c.json"
    run(capsys, "gen", "--model", "prym", "--genus", "6", "--out", str(curve))
    a, b = tmp_path / "a.sms", tmp_path / "b.sms"
    run(capsys, "assemble", "--curve", str(curve), "--np", "0", "--out", str(a))
    run(capsys, "assemble", "--model", "prym", "--genus", "6", "--np", "0", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_rank_identity(capsys, tmp_path):
    path = tmp_path / "id.sms"
    path.write_text("3 3 M\n1 1 1\n2 2 1\n3 3 1\n0 0 0\n")
    code, out, _ = run(capsys, "rank", str(path), "--prime", "7")
    assert code == 0 and out.startswith("rank 3 of 3x3, kernel_dim 0")


@pytest.mark.parametrize("np_index,method,rank", [("0", "elim", 30), ("1", "elim", 139),
                                                  ("1", "wiedemann", 139)])
def test_rank_koszul(capsys, tmp_path, np_index, method, rank):
    genus = "6" if np_index == "0" else "8"
    path = tmp_path / "m.sms"
    run(capsys, "assemble", "--model", "prym", "--genus", genus, "--np", np_index, "--prime", "65537",
        "--out", str(path))
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "rank", str(path), "--method", method, "--report", str(report))
    assert code == 0 and out.startswith(f"rank {rank} ")
    doc = json.loads(report.read_text())
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["rank"] == rank
    assert load_sms(path).prime == 65537


def test_rank_prime_disagreement(capsys, tmp_path):
    path = tmp_path / "m.sms"
    run(capsys, "assemble", "--model", "prym", "--genus", "6", "--np", "0", "--out", str(path))
    assert run(capsys, "rank", str(path), "--prime", "257")[0] == EXIT_CONFIG


def test_verify_holds(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "--model", "prym", "--genus", "6", "--report", str(report))
    assert code == 0
    assert out.splitlines()[-1] == "N_0 HOLDS (generic witness)"
    doc = json.loads(report.read_text())
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["kernel_dim"] == 0 and len(doc["breakdown"]) == 2
    assert doc["config"]["p"] == 0 and doc["config"]["l"] == 3


def test_verify_reports_kernel(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "--model", "prym", "--genus", "8", "--np", "1",
                       "--prime", "131,65537", "--seed", "0,1", "--retries", "0", "--report", str(report))
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "kernel_dim = 1 across seeds/primes"
    doc = json.loads(report.read_text())
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert [r["kernel_dim"] for r in doc["breakdown"]] == [1, 1, 1, 1]
    assert len(doc["curve_digest"]) == 4


def test_verify_green_default(capsys):
    code, out, _ = run(capsys, "verify", "--model", "canonical", "--genus", "6", "--prime", "131")
    assert code == 0 and "l=3" in out and out.splitlines()[-1].endswith("HOLDS (generic witness)")


def test_selftest_pass_and_flip(capsys, tmp_path):
    report = tmp_path / "s.json"
    code, out, _ = run(capsys, "selftest", "--genus", "6", "--report", str(report))
    assert code == EXIT_OK and out.splitlines()[-1] == "all properties hold"
    jsonschema.validate(json.loads(report.read_text()), REPORT_SCHEMA)
    code, out, _ = run(capsys, "selftest", "--genus", "6", "--flip-sign")
    assert code == EXIT_PROPERTY
    assert "FAIL dd_zero" in out


def test_threads_resolution(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert resolve_threads(None) == 3
    assert resolve_threads(2) == 2
    monkeypatch.setenv(THREADS_ENV, "lots")
    with pytest.raises(CliError):
        resolve_threads(None)
    monkeypatch.delenv(THREADS_ENV)
    assert resolve_threads(None) >= 1


def test_threads_do_not_change_output(capsys, tmp_path, monkeypatch):
    a, b = tmp_path / "a.sms", tmp_path / "b.sms"
    run(capsys, "assemble", "--model", "prym", "--genus", "7", "--np", "0", "--threads", "1", "--out", str(a))
    monkeypatch.setenv(THREADS_ENV, "4")
    run(capsys, "assemble", "--model", "prym", "--genus", "7", "--np", "0", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
