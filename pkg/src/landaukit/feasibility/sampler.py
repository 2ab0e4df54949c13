"""Exact point construction on radial strata and the distortion sweep.

Points are built in momentum space, block by block. Block 0 holds the full
soft momenta ``k_t`` for positions before the first vanishing ``r``; each later
block, starting at a zero ``z``, holds local momenta ``r_{z+1}...r_t Omega_t``.
Targeted photon and residue rows are made to vanish exactly there, and the
conversion to ``(r, Omega)`` telescopes, so exact zeros survive snapping.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Iterable, Sequence

from ..graphs import parse_segment
from ..kinematics import FourVector, TrianglePoint
from ..radial_coords import SectorPoint, check_sector_point
from ..symbolic.denominators import DenominatorSet, LandauMatrix, eliminate_delta_rows
from .core import (
    DEFAULT_EPS,
    ActiveSystem,
    Distortion,
    LandauSolution,
    evaluate_active_system,
    farkas_decide,
    gradient_row,
    point_values,
    snap,
)

UNIT_TOL = 1e-10


@dataclass(frozen=True)
class SamplerConfig:
    samples: int = 100
    seed: int = 0
    max_attempts: int = 50  # per requested sample
    eps: Fraction = DEFAULT_EPS
    probe_radius: float = 1e-4
    probes: int = 2
    strata: Any = "all"  # "all", "interior", or an iterable of zero-position tuples


def all_strata(n: int) -> list[tuple[int, ...]]:
    out = []
    for size in range(n + 1):
        out.extend(combinations(range(1, n + 1), size))
    return out


def resolve_strata(n: int, spec: Any) -> list[tuple[int, ...]]:
    if spec == "all":
        return all_strata(n)
    if spec == "interior":
        return [()]
    out = []
    for z in spec:
        z = tuple(sorted(int(v) for v in z))
        if any(not 1 <= v <= n for v in z):
            raise ValueError(f"stratum {z} outside positions 1..{n}")
        out.append(z)
    return out


def _rand(rng: random.Random, lo: float = -1.0, hi: float = 1.0) -> Fraction:
    return Fraction(round(rng.uniform(lo, hi) * 1000), 1000)


def rational_unit_3vector(rng: random.Random) -> tuple[Fraction, Fraction, Fraction]:
    """Inverse stereographic image of a random rational point: exact unit vector."""
    a, b = _rand(rng, -2, 2), _rand(rng, -2, 2)
    s = a * a + b * b
    return (2 * a / (s + 1), 2 * b / (s + 1), (s - 1) / (s + 1))


def _scale_to(v: FourVector, norm: float) -> FourVector:
    cur = math.sqrt(float(v.euclid_sq()))
    return v * snap(norm / cur)


def _lightlike(rng: random.Random, norm: float) -> FourVector:
    u = rational_unit_3vector(rng)
    sign = 1 if rng.random() < 0.5 else -1
    v = FourVector(Fraction(sign), *u)
    return v * snap(norm / math.sqrt(2))


def _generic(rng: random.Random, norm: float) -> FourVector:
    while True:
        v = FourVector(*(_rand(rng) for _ in range(4)))
        if v.euclid_sq() > Fraction(1, 100):
            return _scale_to(v, norm)


def _blocks(n: int, zeros: Sequence[int]) -> list[tuple[int, list[int]]]:
    """``(start, positions)`` per block; start 1 without a zero is the full block."""
    starts = sorted(set([1, *zeros]))
    out = []
    for b, s in enumerate(starts):
        end = starts[b + 1] if b + 1 < len(starts) else n + 1
        out.append((s, list(range(s, end))))
    return out


@dataclass
class _Target:
    segment: str
    D: dict[int, int]  # position -> coefficient of K_seg - K_star
    Kstar: dict[int, int]
    side: int
    ell: int


def _residue_targets(ds: DenominatorSet) -> list[_Target]:
    sg = ds.star_graph
    pos = {ph: i + 1 for i, ph in enumerate(ds.sector)}
    K = sg.momenta()
    out = []
    for row in ds.rows:
        if row.kind != "residue":
            continue
        s, _ = parse_segment(row.segment)
        star = sg.star_segment(s)
        kj = {pos[ph]: c for ph, c in K[row.segment].items()}
        ki = {pos[ph]: c for ph, c in K[star].items()}
        D = {t: kj.get(t, 0) - ki.get(t, 0) for t in set(kj) | set(ki)}
        D = {t: c for t, c in D.items() if c}
        out.append(_Target(row.segment, D, ki, s, row.ell))
    return out


def _combo(coeffs: dict[int, int], vecs: dict[int, FourVector], keep: Iterable[int]) -> FourVector:
    keep = set(keep)
    total = FourVector.zero()
    for t, c in coeffs.items():
        if t in keep:
            total = total + vecs[t] * c
    return total


def construct_point(
    ds: DenominatorSet, tp: TrianglePoint, zeros: Sequence[int], rng: random.Random, delta: Any
) -> SectorPoint | None:
    """One attempt at an exact point on the stratum ``{r_z = 0 : z in zeros}``."""
    n = ds.n
    delta = Fraction(delta)
    blocks = _blocks(n, zeros)
    full = set(blocks[0][1]) if blocks[0][0] not in zeros else set()
    targets = _residue_targets(ds)

    light = {t for t in range(1, n + 1) if rng.random() < 0.5}
    target = rng.choice(targets) if targets and rng.random() < 0.7 else None
    adjust = None
    if target is not None:
        adjust = target.ell
        light.discard(adjust)

    vecs: dict[int, FourVector] = {}
    for start, positions in blocks:
        norm = float(delta) * rng.uniform(0.3, 0.9) if start in full else 1.0
        for t in positions:
            if t != start:
                norm *= rng.uniform(0.25, 0.9)
            vecs[t] = _lightlike(rng, norm) if t in light else _generic(rng, norm)

    if target is not None:
        P = tp.p + tp.offset(target.side)
        if target.ell in full:
            P_v = FourVector(*(Fraction(c) for c in P))

            def g(x: Fraction) -> Fraction:
                trial = dict(vecs)
                v = vecs[adjust]
                trial[adjust] = FourVector(x, v.x, v.y, v.z)
                Dv = _combo(target.D, trial, full)
                Ki = _combo(target.Kstar, trial, full)
                return 2 * P_v.dot(Dv) + (Ki + Dv).sq() - Ki.sq()

            g0, g1, gm = g(Fraction(0)), g(Fraction(1)), g(Fraction(-1))
            a = (g1 + gm) / 2 - g0
            b = (g1 - gm) / 2
            if a == 0:
                if b == 0:
                    return None
                roots = [float(-g0 / b)]
            else:
                disc = float(b * b - 4 * a * g0)
                if disc < 0:
                    return None
                roots = [(-float(b) + sg * math.sqrt(disc)) / (2 * float(a)) for sg in (1, -1)]
            x = snap(min(roots, key=abs))
            v = vecs[adjust]
            vecs[adjust] = FourVector(x, v.x, v.y, v.z)
            Dv = _combo(target.D, vecs, full)
            Ki = _combo(target.Kstar, vecs, full)
            quad = (Ki + Dv).sq() - Ki.sq()
            if quad == 0:
                return None
            tau = -2 * P_v.dot(Dv) / quad
            if tau <= 0:
                return None
            for t in full:
                vecs[t] = vecs[t] * tau
        else:
            block = next(pos for s, pos in blocks if adjust in pos)
            local = [t for t in block if t >= target.ell]
            Pb = FourVector(*(Fraction(c) for c in P)) + _combo(target.Kstar, vecs, full)
            v = vecs[adjust]
            base = FourVector(Fraction(0), v.x, v.y, v.z)
            trial = dict(vecs)
            trial[adjust] = base
            rest = _combo(target.D, trial, local)
            c = target.D[adjust]
            if Pb.t == 0:
                return None
            # Pb . (rest + c x e0) = 0
            x = -Pb.dot(rest) / (c * Pb.t)
            vecs[adjust] = FourVector(x, v.x, v.y, v.z)

    return _to_sector_point(ds, vecs, blocks, full, delta)


def _to_sector_point(ds, vecs, blocks, full, delta) -> SectorPoint | None:
    n = ds.n
    norms = {}
    for t in range(1, n + 1):
        sq = float(vecs[t].euclid_sq())
        if sq == 0:
            return None
        # exact binary value of the float root: relative error ~1e-16, unlike
        # a bounded-denominator snap, which is too coarse for norms near delta
        norms[t] = Fraction(math.sqrt(sq))
        if norms[t] == 0:
            return None
    r, omega = [], []
    starts = {s for s, _ in blocks}
    for t in range(1, n + 1):
        if t in starts and t not in full:
            r.append(Fraction(0))
        elif t == 1:
            r.append(norms[1])
        else:
            r.append(norms[t] / norms[t - 1])
        omega.append(vecs[t] / norms[t])
    sp = SectorPoint(tuple(ds.sector), tuple(r), tuple(omega))
    if check_sector_point(sp, delta, UNIT_TOL):
        return None
    if 1 in full and r[0] == 0:
        return None
    return sp


@dataclass
class SampleRecord:
    index: int
    point: SectorPoint
    system: ActiveSystem
    certificate: Any
    probe_ok: int = 0
    probe_total: int = 0

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "point": self.point.to_dict(),
            "active": list(self.system.active),
            "eta_rows": list(self.system.eta_rows),
            "certificate": self.certificate.to_dict(),
            "continuity": [self.probe_ok, self.probe_total],
        }


@dataclass
class StratumReport:
    stratum: tuple[int, ...]
    requested: int
    attempts: int = 0
    records: list[SampleRecord] = field(default_factory=list)

    @property
    def active_points(self) -> int:
        return len(self.records)

    @property
    def distortions(self) -> int:
        return sum(isinstance(r.certificate, Distortion) for r in self.records)

    @property
    def landau_solutions(self) -> int:
        return sum(isinstance(r.certificate, LandauSolution) for r in self.records)

    @property
    def min_margin(self) -> Fraction | None:
        margins = [r.certificate.margin for r in self.records if isinstance(r.certificate, Distortion)]
        return min(margins) if margins else None

    @property
    def continuity_fraction(self) -> float | None:
        total = sum(r.probe_total for r in self.records)
        return None if total == 0 else sum(r.probe_ok for r in self.records) / total

    def summary(self) -> dict:
        mm = self.min_margin
        return {
            "stratum": list(self.stratum),
            "requested": self.requested,
            "attempts": self.attempts,
            "active_points": self.active_points,
            "distortions": self.distortions,
            "landau_solutions": self.landau_solutions,
            "min_margin": None if mm is None else str(mm),
            "continuity": self.continuity_fraction,
        }

    def to_dict(self, certificates: bool = True) -> dict:
        out = self.summary()
        if certificates:
            out["samples"] = [r.to_dict() for r in self.records]
        return out


@dataclass
class SweepReport:
    sector: tuple[int, ...]
    strata: list[StratumReport]
    delta_certificates: list = field(default_factory=list)

    @property
    def distortions(self) -> int:
        return sum(s.distortions for s in self.strata)

    @property
    def landau_solutions(self) -> int:
        return sum(s.landau_solutions for s in self.strata)

    @property
    def all_distortable(self) -> bool:
        return self.landau_solutions == 0

    def to_dict(self, certificates: bool = True) -> dict:
        return {
            "sector": list(self.sector),
            "distortions": self.distortions,
            "landau_solutions": self.landau_solutions,
            "delta_certificates": [c.to_dict() for c in self.delta_certificates],
            "strata": [s.to_dict(certificates) for s in self.strata],
        }


def _perturb(sp: SectorPoint, rng: random.Random, h: float) -> SectorPoint:
    r = tuple(ri if ri == 0 else snap(max(1e-12, float(ri) + rng.uniform(-h, h) * float(ri))) for ri in sp.r)
    omega = tuple(om.map(lambda c: snap(float(c) + rng.uniform(-h, h))) for om in sp.omega)
    return SectorPoint(sp.perm, r, omega)


def continuity_probe(
    lm: LandauMatrix, tp: TrianglePoint, sp: SectorPoint, system: ActiveSystem, cert: Distortion, rng, h, count
) -> int:
    """How many perturbed points still see ``eta' . delta > 0`` for the same rows."""
    ok = 0
    for _ in range(count):
        vals = point_values(tp, _perturb(sp, rng, h))
        good = True
        for name in system.eta_rows:
            row = gradient_row(lm, name, vals)
            if sum((a * b for a, b in zip(row, cert.delta)), Fraction(0)) <= 0:
                good = False
                break
        ok += good
    return ok


def distortion_sweep(
    ds: DenominatorSet,
    lm: LandauMatrix,
    tp: TrianglePoint,
    sector: Sequence[int] | None = None,
    config: SamplerConfig | None = None,
) -> SweepReport:
    """Sample active points on every requested stratum and decide each one."""
    config = config or SamplerConfig()
    if sector is not None and tuple(sector) != tuple(ds.sector):
        raise ValueError("sector does not match the denominator set")
    certs: list = []
    if any(r.kind == "delta_constraint" for r in lm.rows):
        lm, certs = eliminate_delta_rows(lm)
    delta = ds.star_graph.graph.delta if ds.star_graph is not None else Fraction(1, 100)
    reports = []
    for zeros in resolve_strata(ds.n, config.strata):
        rng = random.Random(f"{config.seed}:{ds.sector}:{zeros}")
        rep = StratumReport(zeros, config.samples)
        limit = config.samples * config.max_attempts
        while rep.active_points < config.samples and rep.attempts < limit:
            rep.attempts += 1
            sp = construct_point(ds, tp, zeros, rng, delta)
            if sp is None:
                continue
            system = evaluate_active_system(ds, lm, tp, sp, config.eps)
            if not system.eta:
                continue
            cert = farkas_decide(system)
            rec = SampleRecord(rep.active_points, sp, system, cert)
            if isinstance(cert, Distortion) and config.probes:
                rec.probe_total = config.probes
                rec.probe_ok = continuity_probe(lm, tp, sp, system, cert, rng, config.probe_radius, config.probes)
            rep.records.append(rec)
        reports.append(rep)
    return SweepReport(tuple(ds.sector), reports, certs)
