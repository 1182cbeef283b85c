import io
import json
import subprocess
import sys

import pytest

from singweight.cli import EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, run


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    return code, buf.getvalue()


def test_catalog_formats():
    code, out = call("catalog", "--format", "json")
    assert code == EXIT_OK and len(json.loads(out)) == 39
    code, out = call("catalog", "--format", "csv")
    assert out.splitlines()[0] == "id,n,genus,lattice,d,split_N"
    assert len(out.splitlines()) == 40


def test_usage_errors():
    assert call("nope")[0] == EXIT_USAGE
    assert call("coeffs", "n99_x")[0] == EXIT_USAGE
    assert call("coeffs", "n3_8_7p1", "--cap", "-1")[0] == EXIT_USAGE
    assert call("theta-verify", "5.9")[0] == EXIT_USAGE
    assert call("classify")[0] == EXIT_USAGE
    assert call("--help")[0] == EXIT_OK


def test_coeffs_deterministic_and_cache(tmp_path):
    args = ["coeffs", "n3_2_7p1_4p2", "--cap", "5", "--format", "csv"]
    _, a = call(*args)
    _, b = call(*args)
    cache = str(tmp_path / "c.jsonl")
    _, c = call(*args, "--cache", cache)
    _, d = call(*args, "--cache", cache)
    assert a == b == c == d
    assert a.startswith("gamma,n,coefficient\n")


def test_coeffs_orbits():
    code, out = call("coeffs", "n3_2_7p1_4p4", "--cap", "12", "--orbits", "--format", "json")
    assert code == EXIT_OK
    sizes = sorted(o["size"] for o in json.loads(out)["orbits"])
    assert sizes == [1, 6, 10, 15, 120, 120, 120, 120]


def test_bound():
    code, out = call("bound", "n3_2_7p1_4p4", "--format", "json")
    rec = json.loads(out)
    assert code == EXIT_OK and rec["N"] == 4 and rec["d"] == 512


def test_classify_check_single():
    code, out = call("classify", "n3_8_7p1", "--check")
    assert code == EXIT_OK and "admitting genera: 1" in out
    code, out = call("classify", "n3_2_7p1", "--check", "--format", "json")
    assert code == EXIT_OK and json.loads(out)[0]["solution_count"] == 0


def test_theta_verify_single():
    code, out = call("theta-verify", "5.1", "--seed", "3")
    assert code == EXIT_OK and "ok" in out
    code2, out2 = call("theta-verify", "5.1", "--seed", "3")
    assert out == out2


def test_selftest():
    code, out = call("selftest")
    assert code == EXIT_OK and "FAIL" not in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "singweight", "bound", "n3_2_7p1_4p4"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "n < 13" in res.stdout
    res = subprocess.run([sys.executable, "-m", "singweight", "coeffs", "bogus"], capture_output=True, text=True)
    assert res.returncode == EXIT_USAGE
