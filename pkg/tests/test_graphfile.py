import json
from fractions import Fraction

import pytest

from landaukit.errors import ParseError, ValidationError
from landaukit.graphfile import (
    dump_graph,
    dump_graph_json,
    fixture_dir,
    list_fixtures,
    load_fixture,
    parse_graph_file,
    parse_graph_text,
)

ONE_PHOTON = """\
landaukit-graph 1
# one photon
name one_photon
side 1 a
side 2 b
side 3
photon 1 a b
"""


def test_one_photon_file_counts(fixture):
    g = parse_graph_file(fixture_dir() / "one_photon.graph")
    assert g.segment_counts() == (2, 2, 1)
    assert g == fixture("one_photon")


def test_empty_file(tmp_path):
    p = tmp_path / "e.graph"
    p.write_text("")
    with pytest.raises(ParseError):
        parse_graph_file(p)
    with pytest.raises(ParseError):
        parse_graph_text("# only a comment\n\n")


def test_photon_with_one_endpoint():
    with pytest.raises(ValidationError, match="photon endpoints"):
        parse_graph_text(ONE_PHOTON.replace("photon 1 a b", "photon 1 a"))


@pytest.mark.parametrize(
    "bad,line,col",
    [
        ("landaukit-graph 2\n", 1, 17),
        ("graph 1\n", 1, 1),
        (ONE_PHOTON + "wibble 3\n", 8, 1),
        (ONE_PHOTON.replace("side 3", "side 4"), 6, 6),
        (ONE_PHOTON.replace("photon 1 a b", "photon x a b"), 7, 8),
        (ONE_PHOTON + "delta one\n", 8, 7),
        (ONE_PHOTON + "order 1.0 nope\n", 8, 11),
        (ONE_PHOTON + "side 1 c\n", 8, 1),
    ],
)
def test_parse_errors_carry_position(bad, line, col):
    with pytest.raises(ParseError) as exc:
        parse_graph_text(bad)
    assert (exc.value.line, exc.value.column) == (line, col)


def test_optional_fields():
    g = parse_graph_text(ONE_PHOTON + "order 2.0 2.1 1.0 1.1 3.0\nstar 0 1 0\ndelta 1/50\ndelta-prime 1/5\n")
    assert g.row_order == ("2.0", "2.1", "1.0", "1.1", "3.0")
    assert g.star == (0, 1, 0)
    assert (g.delta, g.delta_prime) == (Fraction(1, 50), Fraction(1, 5))


def test_missing_side_is_validation_error():
    with pytest.raises(ValidationError, match="sides"):
        parse_graph_text(ONE_PHOTON.replace("side 3\n", ""))


def test_text_and_json_round_trip():
    for name in list_fixtures():
        g = load_fixture(name) if name != "single_v1v3" else parse_graph_file(fixture_dir() / f"{name}.graph")
        assert parse_graph_text(dump_graph(g)) == g
        assert parse_graph_text(dump_graph_json(g)) == g


def test_json_errors():
    with pytest.raises(ParseError):
        parse_graph_text('{"sides": ')
    with pytest.raises(ParseError):
        parse_graph_text(json.dumps({"format": "other", "sides": {}}))


def test_fixture_dir_env_override(tmp_path, monkeypatch):
    (tmp_path / "mine.graph").write_text(ONE_PHOTON)
    monkeypatch.setenv("LANDAUKIT_FIXTURES", str(tmp_path))
    assert list_fixtures() == ["mine"]
    assert load_fixture("mine").name == "one_photon"
    with pytest.raises(ParseError):
        load_fixture("side_loop")
