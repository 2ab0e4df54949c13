"""Geometric Landau diagrams of star graphs in the momentum form.

Segment vectors:
  photon ``i``        ``alpha_i k_i``
  residue ``j`` on s  ``beta_j Sigma_j`` with ``sigma_j beta_j = alpha_j >= 0``
  direct line ``s``   ``alpha_s Sigma_s + sum_j beta_j (Sigma_j - Sigma_s)``

"Left" is the positive time direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

from ..errors import SignViolation
from ..graphs import EXTERNAL, SIDE_ENDS, StarGraph, identity_sector, parse_segment, sign_table
from ..kinematics import FourVector, TrianglePoint
from ..symbolic.denominators import KFormMatrix

ZERO4 = FourVector(Fraction(0), Fraction(0), Fraction(0), Fraction(0))


@dataclass(frozen=True)
class DiagramParams:
    """Landau parameters; residues are keyed by segment id, stars by side."""

    photon: Mapping[int, Any] = field(default_factory=dict)
    residue: Mapping[str, Any] = field(default_factory=dict)
    star: Mapping[int, Any] = field(default_factory=dict)

    @classmethod
    def zero(cls) -> "DiagramParams":
        return cls()

    def alpha_photon(self, i: int) -> Fraction:
        return Fraction(self.photon.get(i, 0))

    def alpha_residue(self, seg: str) -> Fraction:
        return Fraction(self.residue.get(seg, 0))

    def alpha_star(self, s: int) -> Fraction:
        return Fraction(self.star.get(s, 0))

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DiagramParams":
        return cls(
            {int(k): Fraction(v) for k, v in data.get("photon", {}).items()},
            {str(k): Fraction(v) for k, v in data.get("residue", {}).items()},
            {int(k): Fraction(v) for k, v in data.get("star", {}).items()},
        )

    def to_dict(self) -> dict:
        return {
            "photon": {str(k): str(Fraction(v)) for k, v in sorted(self.photon.items())},
            "residue": {k: str(Fraction(v)) for k, v in sorted(self.residue.items())},
            "star": {str(k): str(Fraction(v)) for k, v in sorted(self.star.items())},
        }


@dataclass(frozen=True)
class DiagramSegment:
    key: str  # "photon1", "residue1.0", "direct1"
    kind: str  # photon | residue | direct_star
    tail: str
    head: str
    vector: FourVector
    alpha: Fraction
    beta: Fraction | None = None
    sigma: int | None = None

    def is_zero(self) -> bool:
        return self.vector.is_zero()


@dataclass
class LandauDiagram:
    star_graph: StarGraph
    point: TrianglePoint
    k: dict[int, FourVector]
    params: DiagramParams
    segments: list[DiagramSegment]
    positions: dict[str, FourVector]
    sector: tuple[int, ...]

    def segment(self, key: str) -> DiagramSegment:
        for s in self.segments:
            if s.key == key:
                return s
        raise KeyError(key)

    def of_kind(self, kind: str) -> list[DiagramSegment]:
        return [s for s in self.segments if s.kind == kind]

    def is_point(self) -> bool:
        return all(s.is_zero() for s in self.segments)


def sigma_momenta(sg: StarGraph, tp: TrianglePoint, k: Mapping[int, FourVector]) -> dict[str, FourVector]:
    """``Sigma_j = p_s + K_j`` for every charged segment."""
    out = {}
    for seg, coeffs in sg.momenta().items():
        s, _ = parse_segment(seg)
        v = tp.p + tp.offset(s)
        for ph, c in coeffs.items():
            v = v + k[ph] * c
        out[seg] = v
    return out


def build_diagram(
    sg: StarGraph,
    params: DiagramParams,
    tp: TrianglePoint,
    k: Mapping[int, FourVector] | Sequence[FourVector],
    sector: Sequence[int] | None = None,
) -> LandauDiagram:
    """Vertex positions are prefix sums along the sides, starting from ``v2`` at 0."""
    if not isinstance(k, Mapping):
        k = {i + 1: v for i, v in enumerate(k)}
    k = dict(k)
    sector = tuple(sector or identity_sector(sg.n))
    signs = sign_table(sg, sector)
    Sig = sigma_momenta(sg, tp, k)
    g = sg.graph
    unknown = set(params.residue) - set(sg.residue_segments())
    if unknown:
        raise ValueError(f"parameters name non-residue segments: {sorted(unknown)}")
    segs: list[DiagramSegment] = []

    for ph in g.photons:
        a = params.alpha_photon(ph.index)
        if a < 0:
            raise SignViolation(f"photon {ph.index}: alpha = {a} < 0")
        segs.append(DiagramSegment(f"photon{ph.index}", "photon", ph.tail, ph.head, k[ph.index] * a, a))

    graph_vectors: dict[str, FourVector] = {}
    for s in (1, 2, 3):
        star = sg.star_segment(s)
        a_s = params.alpha_star(s)
        direct = Sig[star] * a_s
        beta_total = Fraction(0)
        for seg in sg.residue_segments(s):
            a_j = params.alpha_residue(seg)
            sigma = signs[seg].sigma
            if a_j < 0:
                raise SignViolation(f"segment {seg}: sigma*beta = {a_j} < 0")
            beta = a_j * sigma
            beta_total += beta
            direct = direct + (Sig[seg] - Sig[star]) * beta
            graph_vectors[seg] = Sig[seg] * beta
            a, b = g.segment_ends(seg)
            segs.append(DiagramSegment(f"residue{seg}", "residue", a, b, Sig[seg] * beta, a_j, beta, sigma))
        graph_vectors[star] = Sig[star] * (a_s - beta_total)
        start, end = SIDE_ENDS[s]
        segs.append(DiagramSegment(f"direct{s}", "direct_star", start, end, direct, a_s))

    positions: dict[str, FourVector] = {"v2": ZERO4}
    for s in (1, 3, 2):
        nodes = g.nodes_of_side(s)
        for j in range(len(nodes) - 1):
            nxt = positions[nodes[j]] + graph_vectors[f"{s}.{j}"]
            if nodes[j + 1] == "v2":
                continue  # closing the loop; mismatch is the p-loop residual
            positions[nodes[j + 1]] = nxt
    return LandauDiagram(sg, tp, k, params, segs, positions, sector)


@dataclass(frozen=True)
class ClosureReport:
    p_loop: FourVector
    photon_loops: dict[int, FourVector]

    @property
    def closed(self) -> bool:
        return self.p_loop.is_zero() and all(v.is_zero() for v in self.photon_loops.values())

    def to_dict(self) -> dict:
        return {
            "closed": self.closed,
            "p_loop": [str(c) for c in self.p_loop],
            "photon_loops": {str(i): [str(c) for c in v] for i, v in sorted(self.photon_loops.items())},
        }


def check_closure(d: LandauDiagram) -> ClosureReport:
    sg = d.star_graph
    p_loop = ZERO4
    for s in (1, 2, 3):
        p_loop = p_loop + d.segment(f"direct{s}").vector
    K = sg.momenta()
    Sig = sigma_momenta(sg, d.point, d.k)
    loops = {}
    for ph in sg.graph.photons:
        i = ph.index
        total = d.segment(f"photon{i}").vector
        for s in (1, 2, 3):
            star = sg.star_segment(s)
            through_star = K[star].get(i, 0)
            for seg in sg.residue_segments(s):
                beta = d.segment(f"residue{seg}").beta
                c = K[seg].get(i, 0)
                if c:
                    total = total + Sig[seg] * (beta * c)
                if through_star:
                    total = total - Sig[star] * (beta * through_star)
            if through_star:
                total = total + Sig[star] * (d.params.alpha_star(s) * through_star)
        loops[i] = total
    return ClosureReport(p_loop, loops)


def matrix_contractions(km: KFormMatrix, d: LandauDiagram) -> ClosureReport:
    """``sum_j alpha_j (1/2) df_j/dk_l`` and the ``dp`` column, from the momentum-form matrix."""
    sg = d.star_graph
    pos = {ph: i + 1 for i, ph in enumerate(d.sector)}
    vals: dict[str, Fraction] = {}
    for mu, c in enumerate(d.point.p):
        vals[f"p{mu}"] = Fraction(c)
    for ph, v in d.k.items():
        for mu, c in enumerate(v):
            vals[f"k{pos[ph]}.{mu}"] = Fraction(c)
    alphas: dict[str, Fraction] = {}
    for row in km.rows:
        if row.kind == "photon_propagator":
            alphas[row.name] = d.params.alpha_photon(row.photon)
        elif row.kind == "residue":
            alphas[row.name] = d.params.alpha_residue(row.segment)
        else:
            s, _ = parse_segment(row.segment)
            alphas[row.name] = d.params.alpha_star(s)

    def contract(col: str) -> FourVector:
        total = ZERO4
        for row in km.rows:
            a = alphas[row.name]
            if a:
                e = km.k_entry(row.name, col)
                total = total + e.map(lambda c: c.evaluate(vals)) * a
        return total

    loops = {ph: contract(f"dk{pos[ph]}") for ph in (p.index for p in sg.graph.photons)}
    return ClosureReport(contract("dp"), loops)


# V_R / V_L ------------------------------------------------------------------


@dataclass(frozen=True)
class VertexClassification:
    V: tuple[str, ...]
    right: tuple[str, ...]  # V_R candidates
    left: tuple[str, ...]  # V_L candidates
    condition7: bool
    energy_flow_ok: bool

    def to_dict(self) -> dict:
        return {
            "V": list(self.V),
            "V_R": list(self.right),
            "V_L": list(self.left),
            "condition7": self.condition7,
            "energy_flow_ok": self.energy_flow_ok,
        }


def classify_VR_VL(d: LandauDiagram) -> VertexClassification:
    """Ends of nonzero photon lines; the head lies left of the tail iff ``V^0 > 0``."""
    other: dict[str, list[int]] = {}  # vertex -> list of +1 (other end left) / -1 (right) / 0
    energy_ok = True
    for seg in d.of_kind("photon"):
        if seg.is_zero():
            continue
        t = seg.vector.t
        idx = int(seg.key[len("photon") :])
        k0 = d.k[idx].t
        if seg.alpha > 0 and (t > 0) != (k0 > 0):
            energy_ok = False
        head_side = 1 if t > 0 else (-1 if t < 0 else 0)
        other.setdefault(seg.tail, []).append(head_side)
        other.setdefault(seg.head, []).append(-head_side)
    V = tuple(sorted(other))
    right = tuple(v for v in V if all(x == 1 for x in other[v]))
    left = tuple(v for v in V if all(x == -1 for x in other[v]))
    cond7 = set(right) <= set(EXTERNAL) and set(left) <= set(EXTERNAL)
    return VertexClassification(V, right, left, cond7, energy_ok)


# DOT --------------------------------------------------------------------------

_STYLE = {"photon": "style=dashed", "residue": "style=solid", "direct_star": "style=bold, label=\"*\""}


def emit_dot(d: LandauDiagram) -> str:
    """Coincident vertices are merged; zero-length segments are omitted."""
    groups: dict[tuple, list[str]] = {}
    for name in sorted(d.positions):
        key = tuple(d.positions[name])
        groups.setdefault(key, []).append(name)
    node_of = {}
    lines = ["digraph landau {", "  rankdir=RL;"]
    for i, (key, names) in enumerate(sorted(groups.items(), key=lambda kv: kv[1])):
        nid = f"n{i}"
        for nm in names:
            node_of[nm] = nid
        label = ",".join(names)
        lines.append(f'  {nid} [label="{label}", t="{key[0]}"];')
    for seg in d.segments:
        if seg.is_zero():
            continue
        a, b = node_of[seg.tail], node_of[seg.head]
        vec = "(" + ", ".join(str(c) for c in seg.vector) + ")"
        lines.append(f'  {a} -> {b} [{_STYLE[seg.kind]}, comment="{seg.key} {vec}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
