import json
import os
import random
import subprocess
import sys

import pytest

from ratkon import codec, randgen
from ratkon.cli import NU_MARKER, main
from ratkon.diagrams import DiagramSum, strut
from ratkon.gaussian import ClasperSpec, Integrand
from ratkon.verify import random_linking, wrap_example_matrix


def run(*args, threads=None):
    env = dict(os.environ)
    if threads is not None:
        env["RATKON_THREADS"] = str(threads)
    return subprocess.run([sys.executable, "-m", "ratkon.cli", *args], capture_output=True, text=True, env=env)


@pytest.fixture
def integrand_file(tmp_path):
    rng = random.Random(3)
    X = ["x1", "x2"]
    R = randgen.substantial_sum(rng, X, ["y"], 2, terms=4, max_degree=2)
    I = Integrand(X, wrap_example_matrix(), R)
    p = tmp_path / "integrand.json"
    codec.dump(codec.integrand_to_json(I), str(p))
    return str(p)


def test_verify_pass_and_fail_exit_codes(capsys):
    assert main(["verify", "wheels", "--g", "1", "--degree", "4", "--matrix", "[t1]"]) == 0
    assert capsys.readouterr().out.startswith("PASS wheels")
    assert main(["verify", "eta-example"]) == 0
    assert main(["verify", "lkG"]) == 0


def test_usage_errors_exit_one(capsys):
    assert main(["verify", "no-such-identity"]) == 1
    assert main([]) == 1
    assert main(["verify", "wheels", "--matrix", "[t1 +]"]) == 1
    assert "error" in capsys.readouterr().err


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "verify" in capsys.readouterr().out


def test_console_script_exit_code():
    p = run("verify", "wheels", "--matrix", "[[1 - t1]]")
    assert p.returncode == 1
    assert run("verify", "eta-example").returncode == 0


def test_expand(capsys):
    assert main(["expand", "(2 - t1)^-1", "--degree", "2"]) == 0
    assert capsys.readouterr().out.strip() == "1 + h1 + 3/2*h1*h1"


def test_integrate_is_deterministic_across_threads(integrand_file):
    one = run("integrate", integrand_file, threads=1)
    four = run("integrate", integrand_file, threads=4)
    assert one.returncode == 0 and four.returncode == 0
    assert one.stdout == four.stdout
    assert json.loads(one.stdout)["terms"]


def test_verify_is_deterministic_across_threads():
    a = run("verify", "iterated", "--cases", "3", "--seed", "5", threads=1)
    b = run("verify", "iterated", "--cases", "3", "--seed", "5", threads=3)
    assert a.returncode == b.returncode == 0
    assert a.stdout.split("(")[0] == b.stdout.split("(")[0]


def test_hair_with_matrix_marks_nu(tmp_path, capsys):
    p = tmp_path / "s.json"
    codec.dump(codec.sum_to_json(DiagramSum.from_raw(strut("x", "y", (1,)))), str(p))
    assert main(["hair", str(p), "--degree", "2", "--matrix", "[t1]"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["meta"]["note"] == NU_MARKER
    assert main(["hair", str(p), "--degree", "2", "--matrix", "[t1]", "--text"]) == 0
    assert capsys.readouterr().out.startswith(NU_MARKER)


def test_hair_without_matrix(tmp_path, capsys):
    p = tmp_path / "s.json"
    codec.dump(codec.sum_to_json(DiagramSum.from_raw(strut("x", "y", (1,)))), str(p))
    assert main(["hair", str(p), "--degree", "1", "--text"]) == 0
    out = capsys.readouterr().out
    assert "h1" in out and "nu" not in out


def test_contract(tmp_path, capsys):
    p = tmp_path / "c.json"
    L = random_linking(random.Random(1), 2, 6)
    codec.dump(codec.clasper_to_json(ClasperSpec(2, L)), str(p))
    assert main(["contract", str(p)]) == 0
    assert json.loads(capsys.readouterr().out)["terms"]


def test_bad_files_exit_one(tmp_path):
    assert main(["integrate", str(tmp_path / "missing.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["contract", str(bad)]) == 1
    bad.write_text('{"n": 1}')
    assert main(["contract", str(bad)]) == 1
