import random

import pytest

from ratkon.diagrams import DiagramSum, strut
from ratkon.errors import SingularAugmentation
from ratkon.freegroup import GroupRingElement
from ratkon.verify import CHECKS, VerifyReport, _first_diff, identity_checks, run_verify

# every identity the harness reproduces, and the one subcommand that checks it
COVERAGE = {
    "wheels identity": "wheels",
    "eta on the two-by-two example": "eta-example",
    "wrapping move trace and bead relation": "wrap-example",
    "iterated integration": "iterated",
    "integration by parts": "by-parts",
    "integral of a conjugation substitution": "varphi",
    "powers of the extended eta": "etadeg3",
    "additivity of the trace log": "chi-additivity",
    "inverse of the linking block matrix": "lkG",
    "localization arithmetic": "loc-arith",
    "complete contraction": "contraction",
    "pairing and gluing identities": "identities",
}


def test_every_identity_has_exactly_one_subcommand():
    commands = list(COVERAGE.values())
    assert len(commands) == len(set(commands))
    assert set(commands) == set(CHECKS)
    assert len(set(map(id, CHECKS.values()))) == len(CHECKS)


def test_pairing_identity_parts():
    parts = identity_checks(random.Random(0))
    assert set("abcdefg") <= set(parts)


@pytest.mark.parametrize("name", ["identities", "contraction", "loc-arith", "wrap-example", "lkG"])
def test_seed_determinism(name):
    a = run_verify(name, seed=7, cases=3)
    b = run_verify(name, seed=7, cases=3)
    assert a.passed and b.passed
    assert (a.name, a.params, a.witness) == (b.name, b.params, b.witness)


def test_unknown_identity():
    with pytest.raises(KeyError):
        run_verify("nothing")


def test_report_line_and_witness():
    ok = VerifyReport("x", {"seed": 1}, True, None, 0.5)
    assert ok.line() == "PASS x seed=1 (0.50s)"
    a = DiagramSum.from_raw(strut("x", "y", (1,)))
    w = _first_diff(a, DiagramSum.zero())
    assert w is not None and "x y" in w
    bad = VerifyReport("x", {}, False, w, 0.0)
    assert bad.line().startswith("FAIL x") and "witness" in bad.line()


def test_singular_matrix_is_rejected():
    with pytest.raises(SingularAugmentation):
        run_verify("wheels", matrix=[[1 - GroupRingElement.generator(1, 1)]])
