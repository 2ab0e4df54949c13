from fractions import Fraction

import pytest

from landaukit.errors import InvalidStarGraph, NoValidRouting, ValidationError
from landaukit.graphs import (
    DressedGraph,
    Photon,
    candidate_routes,
    contract_segment,
    enumerate_star_graphs,
    enumerate_zigzag_paths,
    is_separable,
    route_photon_loops,
    separated_parts,
    sign_table,
    star_graph,
    validate_graph,
)


def graph(sides, photons, **kw):
    return DressedGraph({1: (), 2: (), 3: (), **sides}, tuple(Photon(*p) for p in photons), **kw)


def test_segments_and_ends(fixture):
    g = fixture("one_photon")
    assert g.segment_counts() == (2, 2, 1)
    assert g.segments() == ["1.0", "1.1", "2.0", "2.1", "3.0"]
    assert g.segment_ends("1.0") == ("v2", "a")
    assert g.segment_ends("2.1") == ("b", "v2")
    assert g.segment_ends("3.0") == ("v1", "v3")


@pytest.mark.parametrize(
    "sides,photons,message",
    [
        ({1: ("a",)}, [(1, "a", "")], "photon endpoints"),
        ({1: ("a",)}, [(1, "a", "zz")], "photon endpoints"),
        ({1: ("a",)}, [(1, "a", "a")], "photon endpoints"),
        ({1: ("a", "b")}, [(1, "a", "v3")], "couplings"),
        ({1: ("a",), 2: ("a",)}, [(1, "a", "v3")], "couplings"),
        ({1: ("v1",)}, [(1, "v1", "v3")], "couplings"),
        ({1: ("a",)}, [(2, "a", "v3")], "photon indices"),
        ({1: ("a", "b")}, [(1, "a", "b")], "self-energy"),
    ],
)
def test_validation_names_violation(sides, photons, message):
    with pytest.raises(ValidationError, match=message):
        validate_graph(graph(sides, photons))


def test_bound_violation():
    g = graph({1: ("a",), 2: ("b",)}, [(1, "a", "b")], delta=Fraction(1, 5), delta_prime=Fraction(1, 10))
    with pytest.raises(ValidationError, match="bounds"):
        validate_graph(g)


def test_one_photon_routes_through_v2(fixture):
    routing = route_photon_loops(fixture("one_photon"))
    route = routing[1]
    assert route.vertices == ("v2",)
    assert route.sides == (1, 2)


def test_candidate_routes_cover_both_arcs(fixture):
    g = fixture("one_photon")
    arcs = candidate_routes(g, g.photon(1))
    assert {frozenset(r.vertices) for r in arcs} == {frozenset({"v2"}), frozenset({"v1", "v3"})}


def test_single_v1_v3_photon_has_no_routing(fixture):
    with pytest.raises(NoValidRouting):
        route_photon_loops(fixture("single_v1v3"))


def test_star_graph_counts(fixture):
    assert len(enumerate_star_graphs(fixture("one_photon"))) == 4
    assert len(enumerate_star_graphs(fixture("two_photon"))) == 9
    assert len(enumerate_star_graphs(fixture("ladder321"))) == 6


def test_star_graph_out_of_range(fixture):
    with pytest.raises(InvalidStarGraph):
        star_graph(fixture("one_photon"), (2, 0, 0))


def test_sign_table_one_photon_a(fixture):
    table = sign_table(star_graph(fixture("one_photon_a")))
    assert set(table) == {"1.1", "2.0"}
    assert all(e.sigma == -1 and e.ell == 1 for e in table.values())


def test_sign_table_side_loop_both_sectors(fixture):
    sg = star_graph(fixture("side_loop"))
    first = {seg: (e.sigma, e.ell) for seg, e in sign_table(sg, (1, 2)).items()}
    second = {seg: (e.sigma, e.ell) for seg, e in sign_table(sg, (2, 1)).items()}
    assert first == {"1.0": (-1, 1), "1.1": (1, 2), "1.3": (-1, 1), "2.1": (1, 2)}
    # swapping the norm ordering moves the leading photon of each difference
    assert second == {"1.0": (1, 1), "1.1": (1, 1), "1.3": (-1, 2), "2.1": (1, 1)}


def test_separated_parts_cover_residues(fixture):
    sg = star_graph(fixture("one_photon_d"))
    parts = separated_parts(sg)
    assert set(parts) == {"v1", "v2", "v3"}
    assert set().union(*parts.values()) == set(sg.residue_segments())


def test_is_separable_counts_one_photon(fixture):
    flags = {sg.star: is_separable(sg) for sg in enumerate_star_graphs(fixture("one_photon"))}
    assert flags == {(0, 0, 0): False, (0, 1, 0): False, (1, 0, 0): True, (1, 1, 0): False}


def test_zigzag_paths(fixture):
    paths = enumerate_zigzag_paths(fixture("zigzag"))
    assert [(p.vertices, p.photons) for p in paths] == [(("v1", "z", "v3"), (1, 2))]
    assert enumerate_zigzag_paths(fixture("side_loop")) == []


def test_contract_segment_makes_vertex_coupling(fixture):
    g = contract_segment(fixture("one_photon"), "2.1")
    assert g.sides[2] == ()
    assert g.photon(1).head == "v2"
    assert validate_graph(g) is g
    with pytest.raises(ValidationError):
        contract_segment(fixture("two_photon"), "1.1")
