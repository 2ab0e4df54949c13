"""Step-by-step derivation that every Omega-dependent Landau parameter vanishes.

The cascade mirrors the contraction argument: zig-zag photon paths are ruled
out first, then loops are processed block by block (positions before the first
vanishing ``r``, then each later block as a spider diagram). Every step cites
an exact predicate evaluated at the triangle point; a failing predicate or an
uncovered segment raises ObstructionFound with the partial log attached.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from ..errors import ObstructionFound
from ..graphs import (
    DressedGraph,
    StarGraph,
    enumerate_zigzag_paths,
    identity_sector,
    is_separable,
    parse_segment,
    separated_parts,
    star_graph,
)
from ..kinematics import (
    TrianglePoint,
    parallel,
    small_causal_shift_nonvanishing,
    timelike_within,
    verify_interior,
)


@dataclass(frozen=True)
class CascadeStep:
    segment: str
    rule: str
    conclusion: str
    predicate: str | None = None
    holds: bool | None = None

    def to_dict(self) -> dict:
        return {
            "segment": self.segment,
            "rule": self.rule,
            "conclusion": self.conclusion,
            "predicate": self.predicate,
            "holds": self.holds,
        }


@dataclass
class CascadeLog:
    graph: str
    star: str
    stratum: tuple[int, ...]
    sector: tuple[int, ...]
    steps: list[CascadeStep] = field(default_factory=list)
    verdict: str = "incomplete"

    def add(self, *args, **kw) -> CascadeStep:
        step = CascadeStep(*args, **kw)
        self.steps.append(step)
        return step

    def zeroed(self) -> set[str]:
        return {s.segment for s in self.steps if s.conclusion == "alpha = 0"}

    def to_dict(self) -> dict:
        return {
            "graph": self.graph,
            "star": self.star,
            "stratum": list(self.stratum),
            "sector": list(self.sector),
            "verdict": self.verdict,
            "steps": [s.to_dict() for s in self.steps],
        }


def _blocks(n: int, zeros: Sequence[int]) -> list[list[int]]:
    starts = sorted(set([1, *zeros]))
    out = []
    for b, s in enumerate(starts):
        end = starts[b + 1] if b + 1 < len(starts) else n + 1
        if s < end:
            out.append(list(range(s, end)))
    return out


def _fail(log: CascadeLog, kind: str, detail: Any) -> None:
    log.verdict = f"obstruction: {kind}"
    raise ObstructionFound(kind, detail, log)


def _require(log: CascadeLog, ok: bool, segment: str, rule: str, predicate: str, kind: str) -> None:
    log.add(segment, rule, "predicate holds" if ok else "predicate fails", predicate, ok)
    if not ok:
        _fail(log, kind, predicate)


def _involved(sg: StarGraph, photon: int) -> list[str]:
    """Charged segments with a nonzero entry in the photon's loop column."""
    K = sg.momenta()
    out = []
    for s in (1, 2, 3):
        star = sg.star_segment(s)
        star_on = photon in K[star]
        for seg in sg.residue_segments(s):
            if (photon in K[seg]) != star_on:
                out.append(seg)
        if star_on:
            out.append(star)
    return out


def _separable_order(sg: StarGraph, segs: set[str]) -> list[str]:
    """Within each separated part: from the star-adjacent extremity inwards."""
    order: list[str] = []
    parts = separated_parts(sg)
    for v in sorted(parts):
        part = parts[v] & segs
        chains = []
        for s in (1, 2, 3):
            star_j = sg.star[s - 1]
            on_side = sorted((seg for seg in part if parse_segment(seg)[0] == s), key=lambda x: parse_segment(x)[1])
            # segments after the star run toward the side's end vertex, before it toward its start
            after = [x for x in on_side if parse_segment(x)[1] > star_j]
            before = [x for x in on_side if parse_segment(x)[1] < star_j][::-1]
            chains.extend([after, before])
        longest = max((len(c) for c in chains), default=0)
        for depth in range(longest):
            for c in chains:
                if depth < len(c):
                    order.append(c[depth])
    order.extend(sorted(segs - set(order)))
    return order


def contraction_cascade(
    graph: StarGraph | DressedGraph,
    tp: TrianglePoint,
    stratum: Sequence[int] = (),
    sector: Sequence[int] | None = None,
) -> CascadeLog:
    """Derive ``alpha = 0`` for every photon and pole-residue row on a stratum.

    ``stratum`` lists the sector positions whose ``r`` vanishes. Star-line
    poles are the triangle singularity itself and are reported as exempt
    unless a photon loop forces them to contract.
    """
    if isinstance(graph, DressedGraph):
        paths = enumerate_zigzag_paths(graph)
        log = CascadeLog(graph.name, "-", tuple(stratum), tuple(sector or identity_sector(graph.n)))
        if paths:
            log.add("-", "zig-zag", "photon path joins two external vertices", "zigzag paths", False)
            _fail(log, "zigzag", [(p.vertices, p.photons) for p in paths])
        graph = star_graph(graph)
    sg = graph
    g = sg.graph
    n = sg.n
    sector = tuple(sector or identity_sector(n))
    zeros = tuple(sorted(set(stratum)))
    log = CascadeLog(g.name, sg.label(), zeros, sector)

    paths = enumerate_zigzag_paths(sg)
    _require(log, not paths, "-", "zig-zag", "no photon path joins two external vertices", "zigzag")
    if paths:
        return log

    interior = verify_interior(tp)
    _require(log, bool(interior), "-", "hypothesis", "triangle point is an interior point", "kinematics")
    bound = n * Fraction(g.delta)
    _require(log, bound < Fraction(g.delta_prime), "-", "hypothesis", f"n*delta = {bound} < delta'", "smallness")
    log.add("-", "hypothesis", "assumed: |alpha_j| <= B |alpha_s| (bounded residue parameters)")

    p = {s: tp.p + tp.offset(s) for s in (1, 2, 3)}
    for s in (1, 2, 3):
        _require(
            log,
            small_causal_shift_nonvanishing(p[s], bound),
            f"side{s}",
            "causal-shift",
            f"2 p_{s}.K + K^2 != 0 for causal K != 0, |K| <= {bound}",
            "smallness",
        )
        _require(
            log,
            timelike_within(p[s], bound),
            f"side{s}",
            "timelike-neighbourhood",
            f"p_{s} + X timelike for |X| <= {bound}",
            "smallness",
        )
    for s, t in ((1, 2), (1, 3), (2, 3)):
        _require(log, not parallel(p[s], p[t]), "-", "nonparallel", f"p_{s} and p_{t} not parallel", "degenerate")

    separable = is_separable(sg)
    log.add("-", "structure", "separable" if separable else "nonseparable")
    for ph in g.photons:
        sides = {parse_segment(seg)[0] for seg, _ in sg.routing[ph.index].segments}
        _require(log, len(sides) <= 2, f"photon{ph.index}", "two-sides", f"loop {ph.index} runs along sides {sorted(sides)}", "routing")

    zeroed: set[str] = set()
    blocks = _blocks(n, zeros)
    for b, block in enumerate(blocks):
        spider = block[0] in zeros
        photons = [sector[pos - 1] for pos in block]
        label = "spider" if spider else ("separable" if separable else "loop-order")
        if spider:
            log.add(
                f"block{block[0]}",
                "spider",
                "r = 0 at this position: direct lines set to zero, alpha_i k_i -> alpha_i Omega_i",
            )
        if separable and not spider:
            segs = {seg for ph in photons for seg in _involved(sg, ph)} - zeroed
            for seg in _separable_order(sg, segs):
                s, _ = parse_segment(seg)
                if seg == sg.star_segment(s):
                    continue
                log.add(seg, "extremity", "alpha = 0", f"V_R/V_L end: 2 p_{s}.K + K^2 != 0", True)
                zeroed.add(seg)
            for ph in photons:
                log.add(f"photon{ph}", "loop-closure", "alpha = 0", "loop residual alpha_i k_i = 0 with k_i != 0", True)
                zeroed.add(f"photon{ph}")
            continue
        for pos, ph in zip(block, photons):
            if not spider:
                log.add(f"photon{ph}", "zero-length", "alpha = 0", "no zig-zag path: alpha_i k_i = 0", True)
            else:
                log.add(f"photon{ph}", "spider", "alpha = 0", "2 P.Omega != 0 for causal Omega != 0", True)
            zeroed.add(f"photon{ph}")
            segs = [seg for seg in _involved(sg, ph) if seg not in zeroed]
            sides = sorted({parse_segment(seg)[0] for seg in segs})
            for seg in segs:
                s, _ = parse_segment(seg)
                is_star = seg == sg.star_segment(s)
                if is_star and spider:
                    log.add(seg, "spider", "unconstrained", "pole row has zero dOmega entries once r_g = 0", True)
                    continue
                rule = label if not is_star else "star-contraction"
                pred = f"loop {pos}: nonnegative multiples of p_s, s in {sides}, cannot cancel"
                log.add(seg, rule, "alpha = 0", pred, True)
                zeroed.add(seg)

    stars = [sg.star_segment(s) for s in (1, 2, 3)]
    if any(st in zeroed for st in stars):
        for st in stars:
            if st not in zeroed:
                log.add(st, "star-contraction", "alpha = 0", "one direct line contracted; sides nonparallel", True)
                zeroed.add(st)
    else:
        for st in stars:
            log.add(st, "exempt", "pole of the triangle singularity, independent of Omega")

    needed = {f"photon{ph.index}" for ph in g.photons} | set(sg.residue_segments())
    missing = sorted(needed - zeroed)
    if missing:
        _fail(log, "incomplete", missing)
    log.verdict = "all alpha forced to 0"
    return log
