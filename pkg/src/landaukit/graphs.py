"""Topology of the soft-photon dressed triangle graph.

Conventions. The charged loop runs ``v2 -> v1`` along side 1, ``v1 -> v3``
along side 3 and ``v3 -> v2`` along side 2, so every side arrow points the
same way around the triangle. Side ``s`` lists its coupling vertices in arrow
order; segment ``"s.j"`` joins the ``j``-th and ``(j+1)``-th node of
``[start, *couplings, end]``. A photon carries its momentum from ``tail`` to
``head``; an endpoint named ``v1``/``v2``/``v3`` is a C-type coupling.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .errors import InvalidStarGraph, NoValidRouting, ValidationError

EXTERNAL = ("v1", "v2", "v3")
SIDE_ENDS = {1: ("v2", "v1"), 2: ("v3", "v2"), 3: ("v1", "v3")}
# arrow order around the loop
CYCLE_SIDES = (1, 3, 2)


@dataclass(frozen=True)
class Photon:
    index: int
    tail: str
    head: str

    def flipped(self) -> "Photon":
        return Photon(self.index, self.head, self.tail)


@dataclass(frozen=True)
class DressedGraph:
    """Triangle graph with soft photons inserted.

    ``row_order`` optionally fixes the order of charged-segment rows in
    denominator sets (to match an external listing); ``star`` optionally records
    the per-side star selection a fixture stands for.
    """

    sides: Mapping[int, tuple[str, ...]]
    photons: tuple[Photon, ...]
    name: str = "graph"
    row_order: tuple[str, ...] | None = None
    star: tuple[int, int, int] | None = None
    delta: Fraction = Fraction(1, 100)
    delta_prime: Fraction = Fraction(1, 10)

    @property
    def n(self) -> int:
        return len(self.photons)

    def nodes_of_side(self, s: int) -> list[str]:
        start, end = SIDE_ENDS[s]
        return [start, *self.sides[s], end]

    def segment_count(self, s: int) -> int:
        return len(self.sides[s]) + 1

    def segment_counts(self) -> tuple[int, int, int]:
        return tuple(self.segment_count(s) for s in (1, 2, 3))

    def segments(self) -> list[str]:
        return [f"{s}.{j}" for s in (1, 2, 3) for j in range(self.segment_count(s))]

    def segment_ends(self, seg: str) -> tuple[str, str]:
        s, j = parse_segment(seg)
        nodes = self.nodes_of_side(s)
        return nodes[j], nodes[j + 1]

    def photon(self, index: int) -> Photon:
        for ph in self.photons:
            if ph.index == index:
                return ph
        raise KeyError(index)

    def coupling_side(self) -> dict[str, tuple[int, int]]:
        """Coupling name -> (side, 1-based position)."""
        return {c: (s, i + 1) for s in (1, 2, 3) for i, c in enumerate(self.sides[s])}

    def with_photons(self, photons: Iterable[Photon]) -> "DressedGraph":
        return replace(self, photons=tuple(photons))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "sides": {str(s): list(self.sides[s]) for s in (1, 2, 3)},
            "photons": [[ph.index, ph.tail, ph.head] for ph in self.photons],
            "row_order": list(self.row_order) if self.row_order else None,
            "star": list(self.star) if self.star else None,
            "delta": str(self.delta),
            "delta_prime": str(self.delta_prime),
        }


def parse_segment(seg: str) -> tuple[int, int]:
    s, j = seg.split(".")
    return int(s), int(j)


def validate_graph(g: DressedGraph) -> DressedGraph:
    """Check the graph invariants; raises ValidationError naming the violation."""
    if set(g.sides) != {1, 2, 3}:
        raise ValidationError("sides: exactly sides 1, 2, 3 required")
    names = [c for s in (1, 2, 3) for c in g.sides[s]]
    if len(set(names)) != len(names):
        raise ValidationError("couplings: duplicate coupling name")
    if any(c in EXTERNAL for c in names):
        raise ValidationError("couplings: external vertex used as side coupling")
    idx = [ph.index for ph in g.photons]
    if sorted(idx) != list(range(1, len(idx) + 1)):
        raise ValidationError("photon indices must be 1..n")
    used: dict[str, int] = {}
    for ph in g.photons:
        for end in (ph.tail, ph.head):
            if not end:
                raise ValidationError("photon endpoints: missing endpoint")
            if end not in EXTERNAL and end not in names:
                raise ValidationError(f"photon endpoints: unknown node {end!r}")
            if end not in EXTERNAL:
                used[end] = used.get(end, 0) + 1
        if ph.tail == ph.head:
            raise ValidationError("photon endpoints: both ends on the same vertex")
    for c in names:
        if used.get(c, 0) < 1:
            raise ValidationError(f"couplings: vertex {c!r} carries no photon end")
    if not g.n * g.delta < g.delta_prime:
        raise ValidationError("bounds: n*delta < delta' violated")
    _reject_self_energy(g)
    return g


def _reject_self_energy(g: DressedGraph) -> None:
    owner = {}
    for ph in g.photons:
        for end in (ph.tail, ph.head):
            owner.setdefault(end, set()).add(ph.index)
    for s in (1, 2, 3):
        cs = g.sides[s]
        for i in range(len(cs)):
            for j in range(i + 1, len(cs)):
                inside = set(cs[i : j + 1])
                photons = set().union(*(owner[c] for c in inside))
                ends = {e for ph in g.photons if ph.index in photons for e in (ph.tail, ph.head)}
                if ends <= inside:
                    raise ValidationError(f"self-energy insertion on side {s} between {cs[i]} and {cs[j]}")


# routing ------------------------------------------------------------------


def _cycle(g: DressedGraph) -> tuple[list[str], list[str]]:
    """Nodes and segments around the loop in arrow order, starting at v2."""
    nodes: list[str] = []
    segs: list[str] = []
    for s in CYCLE_SIDES:
        seq = g.nodes_of_side(s)
        nodes.extend(seq[:-1])
        segs.extend(f"{s}.{j}" for j in range(len(seq) - 1))
    return nodes, segs


@dataclass(frozen=True)
class LoopRoute:
    photon: int
    segments: tuple[tuple[str, int], ...]  # (segment, sign relative to its arrow)
    vertices: tuple[str, ...]
    sides: tuple[int, ...]


@dataclass(frozen=True)
class PhotonRouting:
    routes: Mapping[int, LoopRoute]

    def __getitem__(self, i: int) -> LoopRoute:
        return self.routes[i]

    def segment_momenta(self, g: DressedGraph) -> dict[str, dict[int, int]]:
        """Segment -> {photon: sign} of the photon momenta flowing along it."""
        out: dict[str, dict[int, int]] = {seg: {} for seg in g.segments()}
        for i, route in self.routes.items():
            for seg, sign in route.segments:
                out[seg][i] = out[seg].get(i, 0) + sign
        return {seg: {i: c for i, c in d.items() if c} for seg, d in out.items()}

    def to_dict(self) -> dict:
        return {
            str(i): {
                "segments": [[seg, sign] for seg, sign in r.segments],
                "vertices": list(r.vertices),
                "sides": list(r.sides),
            }
            for i, r in sorted(self.routes.items())
        }


def _arc(nodes: list[str], segs: list[str], start: str, stop: str, forward: bool):
    n = len(nodes)
    i = nodes.index(start)
    out_segs: list[tuple[str, int]] = []
    visited = [start]
    while nodes[i] != stop:
        if forward:
            out_segs.append((segs[i], 1))
            i = (i + 1) % n
        else:
            i = (i - 1) % n
            out_segs.append((segs[i], -1))
        visited.append(nodes[i])
        if len(out_segs) > n:
            raise NoValidRouting("endpoint not on loop")
    return out_segs, visited


def candidate_routes(g: DressedGraph, ph: Photon) -> list[LoopRoute]:
    """Both ways of closing the photon loop through the charged line."""
    nodes, segs = _cycle(g)
    out = []
    for forward in (True, False):
        arc, visited = _arc(nodes, segs, ph.head, ph.tail, forward)
        vertices = tuple(v for v in visited if v in EXTERNAL)
        sides = tuple(sorted({int(seg.split(".")[0]) for seg, _ in arc}))
        out.append(LoopRoute(ph.index, tuple(arc), vertices, sides))
    return out


def route_photon_loops(g: DressedGraph) -> PhotonRouting:
    """Close every photon loop along the charged line.

    A loop may pass through at most one external vertex (anchors at an
    external vertex count) and along at most two sides. Among valid arcs the
    one with fewer external vertices wins, then the lexicographically smaller
    side set, then the arc along the arrows.
    """
    routes = {}
    for ph in g.photons:
        cands = [r for r in candidate_routes(g, ph) if len(r.vertices) <= 1 and len(r.sides) <= 2]
        if not cands:
            raise NoValidRouting(f"photon {ph.index}: every closing arc passes two external vertices")
        routes[ph.index] = min(cands, key=lambda r: (len(r.vertices), r.sides))
    return PhotonRouting(routes)


def orient_photon_arrows(g: DressedGraph, routing: PhotonRouting | None = None) -> DressedGraph:
    """Flip photon arrows so every ``p_s.k_i`` enters the denominators with ``+``."""
    routing = routing or route_photon_loops(g)
    photons = []
    for ph in g.photons:
        signs = {sign for _, sign in routing[ph.index].segments}
        if len(signs) > 1:
            raise NoValidRouting(f"photon {ph.index}: loop runs both ways along the charged line")
        photons.append(ph.flipped() if signs == {-1} else ph)
    return g.with_photons(photons)


# star graphs ----------------------------------------------------------------


@dataclass(frozen=True)
class StarGraph:
    graph: DressedGraph
    routing: PhotonRouting
    star: tuple[int, int, int]  # per side, index of the star segment

    @property
    def n(self) -> int:
        return self.graph.n

    def star_segment(self, s: int) -> str:
        return f"{s}.{self.star[s - 1]}"

    def star_segments(self) -> list[str]:
        return [self.star_segment(s) for s in (1, 2, 3)]

    def residue_segments(self, s: int | None = None) -> list[str]:
        sides = (1, 2, 3) if s is None else (s,)
        return [
            f"{t}.{j}"
            for t in sides
            for j in range(self.graph.segment_count(t))
            if j != self.star[t - 1]
        ]

    def momenta(self) -> dict[str, dict[int, int]]:
        """``K_j`` for every segment as {photon: coefficient}."""
        return self.routing.segment_momenta(self.graph)

    def label(self) -> str:
        return "star(" + ",".join(str(i) for i in self.star) + ")"

    def loops_through(self, seg: str) -> set[int]:
        return set(self.momenta()[seg])


def prepare(g: DressedGraph) -> tuple[DressedGraph, PhotonRouting]:
    """Validate, route and orient; returns the oriented graph and its routing."""
    validate_graph(g)
    oriented = orient_photon_arrows(g, route_photon_loops(g))
    return oriented, route_photon_loops(oriented)


def enumerate_star_graphs(g: DressedGraph) -> list[StarGraph]:
    oriented, routing = prepare(g)
    ranges = [range(oriented.segment_count(s)) for s in (1, 2, 3)]
    return [StarGraph(oriented, routing, tuple(choice)) for choice in itertools.product(*ranges)]


def star_graph(g: DressedGraph, star: Sequence[int] | None = None) -> StarGraph:
    oriented, routing = prepare(g)
    choice = tuple(star if star is not None else (g.star or (0, 0, 0)))
    for s in (1, 2, 3):
        if not 0 <= choice[s - 1] < oriented.segment_count(s):
            raise InvalidStarGraph(f"side {s}: no segment {choice[s - 1]}")
    return StarGraph(oriented, routing, choice)


# sign table -----------------------------------------------------------------


@dataclass(frozen=True)
class SignEntry:
    segment: str
    side: int
    ell: int  # sector position of the leading photon
    photon: int  # photon index at that position
    sigma: int
    difference: Mapping[int, int]  # K_j - K_i as {photon: coefficient}


def identity_sector(n: int) -> tuple[int, ...]:
    return tuple(range(1, n + 1))


def sign_table(sg: StarGraph, sector: Sequence[int] | None = None) -> dict[str, SignEntry]:
    """``ell(i, j)`` and ``sigma_ij`` for every residue segment.

    ``sector[pos-1]`` is the photon at sector position ``pos`` (descending
    Euclidean norm). ``ell`` is reported as a sector position.
    """
    sector = tuple(sector or identity_sector(sg.n))
    pos = {ph: i + 1 for i, ph in enumerate(sector)}
    K = sg.momenta()
    table = {}
    for s in (1, 2, 3):
        Ki = K[sg.star_segment(s)]
        for seg in sg.residue_segments(s):
            Kj = K[seg]
            diff = {i: Kj.get(i, 0) - Ki.get(i, 0) for i in set(Ki) | set(Kj)}
            diff = {i: c for i, c in diff.items() if c}
            if not diff:
                raise InvalidStarGraph(f"segment {seg} carries the same momentum as the star segment")
            lead = min(diff, key=lambda i: pos[i])
            sigma = 1 if diff[lead] > 0 else -1
            table[seg] = SignEntry(seg, s, pos[lead], lead, sigma, diff)
    return table


# structure ------------------------------------------------------------------


def topology(g: DressedGraph) -> nx.MultiGraph:
    G = nx.MultiGraph()
    G.add_nodes_from(EXTERNAL)
    for s in (1, 2, 3):
        nodes = g.nodes_of_side(s)
        for j in range(len(nodes) - 1):
            G.add_edge(nodes[j], nodes[j + 1], key=f"{s}.{j}", kind="charged")
    for ph in g.photons:
        G.add_edge(ph.tail, ph.head, key=f"photon{ph.index}", kind="photon")
    return G


def is_separable(sg: StarGraph) -> bool:
    """True iff cutting the three star segments leaves three parts, one external vertex each."""
    G = topology(sg.graph)
    for seg in sg.star_segments():
        a, b = sg.graph.segment_ends(seg)
        G.remove_edge(a, b, key=seg)
    comps = list(nx.connected_components(G))
    if len(comps) != 3:
        return False
    return all(len(c & set(EXTERNAL)) == 1 for c in comps)


def separated_parts(sg: StarGraph) -> dict[str, set[str]]:
    """External vertex -> residue segments in its part after cutting the stars."""
    G = topology(sg.graph)
    for seg in sg.star_segments():
        a, b = sg.graph.segment_ends(seg)
        G.remove_edge(a, b, key=seg)
    parts = {}
    for comp in nx.connected_components(G):
        for v in comp & set(EXTERNAL):
            parts[v] = {seg for seg in sg.residue_segments() if set(sg.graph.segment_ends(seg)) <= comp}
    return parts


@dataclass(frozen=True)
class ZigZagPath:
    vertices: tuple[str, ...]
    photons: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.photons)


def enumerate_zigzag_paths(g: DressedGraph | StarGraph) -> list[ZigZagPath]:
    """Simple photon-line paths joining two distinct external vertices via internal vertices."""
    if isinstance(g, StarGraph):
        g = g.graph
    adj: dict[str, list[tuple[str, int]]] = {}
    for ph in g.photons:
        adj.setdefault(ph.tail, []).append((ph.head, ph.index))
        adj.setdefault(ph.head, []).append((ph.tail, ph.index))
    found: list[ZigZagPath] = []

    def walk(node: str, verts: list[str], used: list[int]) -> None:
        for nxt, idx in sorted(adj.get(node, []), key=lambda t: (t[1], t[0])):
            if idx in used or nxt in verts:
                continue
            if nxt in EXTERNAL:
                if nxt > verts[0]:
                    found.append(ZigZagPath(tuple(verts + [nxt]), tuple(used + [idx])))
                continue
            walk(nxt, verts + [nxt], used + [idx])

    for v in EXTERNAL:
        walk(v, [v], [])
    return found


def contract_segment(g: DressedGraph, seg: str) -> DressedGraph:
    """Turn the coupling at the far end of an end segment into a C coupling.

    Only segments touching an external vertex can be contracted; the coupling
    they end on is merged into that vertex.
    """
    s, j = parse_segment(seg)
    couplings = list(g.sides[s])
    start, end = SIDE_ENDS[s]
    if j == 0 and couplings:
        moved, vertex = couplings.pop(0), start
    elif j == len(couplings) and couplings:
        moved, vertex = couplings.pop(), end
    else:
        raise ValidationError(f"segment {seg} does not touch an external vertex")
    photons = [
        Photon(ph.index, vertex if ph.tail == moved else ph.tail, vertex if ph.head == moved else ph.head)
        for ph in g.photons
    ]
    sides = dict(g.sides)
    sides[s] = tuple(couplings)
    order = None
    if g.row_order:
        order = tuple(_renumber(o, s, j) for o in g.row_order if o != seg)
    return replace(g, sides=sides, photons=tuple(photons), row_order=order, star=None, name=g.name + f"-c{seg}")


def _renumber(seg: str, side: int, removed: int) -> str:
    s, j = parse_segment(seg)
    if s == side and j > removed:
        return f"{s}.{j - 1}"
    return seg
