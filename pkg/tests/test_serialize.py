from fractions import Fraction

import pytest

from conftest import p2_fan
from toricexc.serialize import Certificate, fan_from_document, parse_rational, parse_vector, to_jsonable


def test_rationals_travel_as_strings():
    assert to_jsonable({"a": Fraction(3, 4), "b": (Fraction(2), 1)}) == {"a": "3/4", "b": [2, 1]}
    with pytest.raises(TypeError):
        to_jsonable(0.5)


def test_parsers():
    assert parse_rational("-1/8") == Fraction(-1, 8)
    assert parse_rational(3) == 3
    with pytest.raises(ValueError):
        parse_rational("0.125")
    assert parse_vector("1,-2,3") == parse_vector("[1, -2, 3]") == (1, -2, 3)


def test_certificate_round_trip():
    cert = Certificate("rank-k0", {"x": 1}, {"rank_k0": 3})
    cert.add_check("agree", True, {"v": Fraction(1, 2)})
    doc = cert.to_json()
    assert doc["checks"][0] == {"name": "agree", "status": "pass", "witness": {"v": "1/2"}}
    back = Certificate.from_json(doc)
    assert back.ok and back.outputs == {"rank_k0": 3}
    cert.add_check("broken", False)
    assert not cert.ok


def test_fan_documents():
    fan = p2_fan()
    assert fan_from_document(fan.to_json()).rays == fan.rays
    assert fan_from_document({"outputs": {"fan": fan.to_json()}}).rays == fan.rays
    with pytest.raises(ValueError):
        fan_from_document({"outputs": {}})
