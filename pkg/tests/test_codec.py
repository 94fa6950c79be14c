import json
import random

import pytest
from hypothesis import given

from ratkon import codec, randgen
from ratkon.diagrams import DiagramSum, strut, wheel
from ratkon.errors import ParseError
from ratkon.freegroup import GroupRingElement
from ratkon.gaussian import ClasperSpec, Integrand
from ratkon.localization import LocElement, as_loc, loc_equal
from ratkon.verify import random_linking, wrap_example_matrix

from conftest import presentations, ring_elements, seeds


def test_parse_ring_expression():
    a = codec.parse_element("3 - 2*t1^-1 + t1*t2", 2)
    assert a == GroupRingElement(2, {(): 3, (-1,): -2, (1, 2): 1})


def test_parse_rational_coefficients_and_powers():
    assert codec.parse_element("1/2*t1^2") == GroupRingElement(1, {(1, 1): "1/2"})
    assert codec.parse_element("(t1 + t2)^2") == GroupRingElement(2, {(1, 1): 1, (1, 2): 1, (2, 1): 1, (2, 2): 1})


def test_parse_localized_inverse():
    s = codec.parse_element("(2 - t1)^-1")
    assert isinstance(s, LocElement)
    assert s.augment() == 1


@pytest.mark.parametrize("text, token", [("2 * t", "t"), ("t1 + $", "$"), ("(t1", "end of input"), ("t1 ^ x", "x")])
def test_parse_error_names_token(text, token):
    with pytest.raises(ParseError) as err:
        codec.parse_element(text)
    assert token in str(err.value)


def test_parse_error_zero_augmentation():
    with pytest.raises(ParseError):
        codec.parse_element("(1 - t1)^-1")


@given(ring_elements(g=2))
def test_ring_text_round_trip(a):
    assert codec.parse_ring(codec.format_ring(a), 2) == a


@given(presentations())
def test_element_round_trip(s):
    back = codec.element_from_json(codec.element_to_json(s), s.g)
    assert loc_equal(as_loc(back, s.g), s, 6)


def test_matrix_round_trip():
    M = wrap_example_matrix()
    back = codec.matrix_from_json(codec.matrix_to_json(M), 3)
    for i in range(2):
        for j in range(2):
            assert loc_equal(as_loc(back[i][j], 3), as_loc(M[i][j], 3), 6)
    assert codec.matrix_from_json("[[1, t3 - t2*t1^-1], [t3^-1 - t1*t2^-1, 1]]") == M


def test_matrix_must_be_square():
    with pytest.raises(ParseError):
        codec.matrix_from_json([["1", "t1"]])


@given(seeds)
def test_sum_round_trip(seed):
    rng = random.Random(seed)
    s = randgen.diagram_sum(rng, ["x", "y", "h1"], 2, terms=3, loc_prob=0.2)
    text = codec.dump(codec.sum_to_json(s))
    assert codec.sum_from_json(json.loads(text), 2) == s


def test_sum_round_trip_is_exact_for_words():
    s = DiagramSum.from_raw(wheel(["x", "y"], [(1,), (-2, 1)]), 3) + DiagramSum.from_raw(strut("x", "x", (2,)), -1)
    assert codec.sum_from_json(codec.sum_to_json(s), 2) == s


def test_malformed_bead_in_diagram():
    doc = codec.sum_to_json(DiagramSum.from_raw(strut("x", "y", (1,))))
    doc["terms"][0]["diagram"]["edges"][0]["bead"] = "t1 ** 2"
    with pytest.raises(ParseError) as err:
        codec.sum_from_json(doc)
    assert "*" in str(err.value)


def test_integrand_round_trip():
    M = wrap_example_matrix()
    I = Integrand(["x1", "x2"], M, DiagramSum.from_raw(strut("x1", "y", (3,))), 4)
    back = codec.integrand_from_json(codec.integrand_to_json(I))
    assert back.variables == I.variables and back.cap == 4
    assert back.covariance == M
    assert back.substantial == I.substantial


def test_clasper_round_trip():
    L = random_linking(random.Random(4), 2, 6)
    back = codec.clasper_from_json(codec.clasper_to_json(ClasperSpec(2, L)))
    assert back.count == 2 and back.linking == L


def test_load_and_dump(tmp_path):
    p = tmp_path / "m.json"
    codec.dump({"a": "t1"}, str(p))
    assert codec.load(str(p)) == {"a": "t1"}
