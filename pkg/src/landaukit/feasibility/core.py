"""Active systems at a point and the exact distortion-or-solution decision."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from ..errors import LandauKitError
from ..kinematics import FourVector, TrianglePoint
from ..radial_coords import SectorPoint
from ..symbolic.denominators import DenominatorSet, LandauMatrix
from .simplex import solve_lp

DEFAULT_EPS = Fraction(1, 10**9)
SNAP_DENOMINATOR = 10**6
ETA_KINDS = ("photon_propagator", "residue")


def snap(x: Any) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(x).limit_denominator(SNAP_DENOMINATOR)


def _dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


@dataclass(frozen=True)
class ActiveSystem:
    """Rows of ``eta`` need ``alpha >= 0``; rows of ``lam`` are equalities."""

    eta: tuple[tuple[Fraction, ...], ...]
    lam: tuple[tuple[Fraction, ...], ...]
    dim: int
    eta_rows: tuple[str, ...] = ()
    lambda_rows: tuple[str, ...] = ()
    active: tuple[str, ...] = ()
    values: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_matrices(cls, eta: Sequence[Sequence[Any]], lam: Sequence[Sequence[Any]] = (), dim: int | None = None):
        eta_t = tuple(tuple(Fraction(v) for v in row) for row in eta)
        lam_t = tuple(tuple(Fraction(v) for v in row) for row in lam)
        if dim is None:
            dim = len(eta_t[0]) if eta_t else (len(lam_t[0]) if lam_t else 0)
        for row in eta_t + lam_t:
            if len(row) != dim:
                raise ValueError("inconsistent row length")
        return cls(eta_t, lam_t, dim)

    def without_eta_row(self, i: int) -> "ActiveSystem":
        keep = [j for j in range(len(self.eta)) if j != i]
        return ActiveSystem(
            tuple(self.eta[j] for j in keep),
            self.lam,
            self.dim,
            tuple(self.eta_rows[j] for j in keep) if self.eta_rows else (),
            self.lambda_rows,
            self.active,
        )

    def scaled(self, factors: Sequence[Any]) -> "ActiveSystem":
        eta = tuple(tuple(Fraction(f) * v for v in row) for f, row in zip(factors, self.eta))
        return ActiveSystem(eta, self.lam, self.dim, self.eta_rows, self.lambda_rows, self.active)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "eta_rows": list(self.eta_rows),
            "lambda_rows": list(self.lambda_rows),
            "active": list(self.active),
            "eta": [[str(v) for v in row] for row in self.eta],
            "lambda": [[str(v) for v in row] for row in self.lam],
        }


class CertificateError(LandauKitError):
    """A certificate failed its own substitution check (internal error)."""


@dataclass(frozen=True)
class Distortion:
    delta: tuple[Fraction, ...]
    margin: Fraction

    kind = "distortion"

    def verify(self, system: ActiveSystem) -> bool:
        if self.margin <= 0 or len(self.delta) != system.dim:
            return False
        if any(abs(d) > 1 for d in self.delta):
            return False
        return all(_dot(row, self.delta) >= self.margin for row in system.eta) and all(
            _dot(row, self.delta) == 0 for row in system.lam
        )

    def to_dict(self) -> dict:
        return {"kind": self.kind, "delta": [str(v) for v in self.delta], "margin": str(self.margin)}


@dataclass(frozen=True)
class LandauSolution:
    alpha: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]

    kind = "landau_solution"

    def verify(self, system: ActiveSystem) -> bool:
        if len(self.alpha) != len(system.eta) or len(self.beta) != len(system.lam):
            return False
        if any(a < 0 for a in self.alpha) or sum(self.alpha) <= 0:
            return False
        for col in range(system.dim):
            total = sum((a * row[col] for a, row in zip(self.alpha, system.eta)), Fraction(0))
            total += sum((b * row[col] for b, row in zip(self.beta, system.lam)), Fraction(0))
            if total != 0:
                return False
        return True

    def to_dict(self) -> dict:
        return {"kind": self.kind, "alpha": [str(v) for v in self.alpha], "beta": [str(v) for v in self.beta]}


Certificate = Distortion | LandauSolution


def _max_margin(system: ActiveSystem) -> tuple[Fraction, tuple[Fraction, ...]]:
    # delta = u - 1 with 0 <= u <= 2; columns: u (d), w (d), t, s (m)
    d, m = system.dim, len(system.eta)
    ncols = 2 * d + 1 + m
    A, b = [], []
    for i, row in enumerate(system.eta):
        line = [Fraction(0)] * ncols
        line[:d] = row
        line[2 * d] = Fraction(-1)
        line[2 * d + 1 + i] = Fraction(-1)
        A.append(line)
        b.append(sum(row, Fraction(0)))
    for row in system.lam:
        line = [Fraction(0)] * ncols
        line[:d] = row
        A.append(line)
        b.append(sum(row, Fraction(0)))
    for a in range(d):
        line = [Fraction(0)] * ncols
        line[a] = line[d + a] = Fraction(1)
        A.append(line)
        b.append(Fraction(2))
    c = [Fraction(0)] * ncols
    c[2 * d] = Fraction(1)
    res = solve_lp(A, b, c)
    if res.status != "optimal":
        raise CertificateError(f"margin LP returned {res.status}")
    delta = tuple(res.x[a] - 1 for a in range(d))
    return res.value, delta


def _dual_solution(system: ActiveSystem) -> LandauSolution:
    d, m, k = system.dim, len(system.eta), len(system.lam)
    ncols = m + 2 * k
    A, b = [], []
    for col in range(d):
        line = [row[col] for row in system.eta]
        line += [row[col] for row in system.lam] + [-row[col] for row in system.lam]
        A.append(line)
        b.append(Fraction(0))
    A.append([Fraction(1)] * m + [Fraction(0)] * (2 * k))
    b.append(Fraction(1))
    res = solve_lp(A, b, [Fraction(0)] * ncols)
    if res.status != "optimal":
        raise CertificateError("zero margin but no multipliers found")
    alpha = res.x[:m]
    beta = tuple(res.x[m + i] - res.x[m + k + i] for i in range(k))
    return LandauSolution(tuple(alpha), beta)


def farkas_decide(system: ActiveSystem) -> Certificate:
    """Return exactly one of Distortion / LandauSolution, verified exactly."""
    if not system.eta:
        cert: Certificate = Distortion(tuple(Fraction(0) for _ in range(system.dim)), Fraction(1))
    else:
        t, delta = _max_margin(system)
        cert = Distortion(delta, t) if t > 0 else _dual_solution(system)
    if not cert.verify(system):
        raise CertificateError(f"{cert.kind} certificate failed verification")
    return cert


def point_values(tp: TrianglePoint, sp: SectorPoint) -> dict[str, Fraction]:
    vals = {k: snap(v) for k, v in sp.variables().items()}
    for mu, c in enumerate(tp.p):
        vals[f"p{mu}"] = snap(c)
    return vals


def _flatten_lowered(vectors: Sequence[FourVector]) -> tuple[Fraction, ...]:
    out: list[Fraction] = []
    for v in vectors:
        out.extend(Fraction(c) for c in v.lowered())
    return tuple(out)


def gradient_row(lm: LandauMatrix, name: str, vals: dict[str, Fraction]) -> tuple[Fraction, ...]:
    """Covariant ``d f / d Omega`` (all positions) at ``vals``; half factor dropped."""
    vecs = []
    for i in range(1, lm.n + 1):
        e = lm.entries[name][f"dW{i}"]
        vecs.append(e.map(lambda c: c.evaluate(vals)) * 2)
    return _flatten_lowered(vecs)


def evaluate_active_system(
    ds: DenominatorSet,
    lm: LandauMatrix,
    tp: TrianglePoint,
    sp: SectorPoint,
    eps: Any = DEFAULT_EPS,
) -> ActiveSystem:
    """Active rows at a point; delta rows enter only if ``lm`` still carries them."""
    vals = point_values(tp, sp)
    scale = max(Fraction(1), abs(snap(tp.mass) ** 2))
    tol = snap(eps) * scale
    eta, eta_rows, lam, lam_rows, active = [], [], [], [], []
    values = {}
    for row in lm.rows:
        v = row.poly.evaluate(vals)
        values[row.name] = v
        if row.kind == "delta_constraint":
            lam.append(gradient_row(lm, row.name, vals))
            lam_rows.append(row.name)
            continue
        if abs(v) > tol:
            continue
        active.append(row.name)
        if row.kind in ETA_KINDS:
            eta.append(gradient_row(lm, row.name, vals))
            eta_rows.append(row.name)
        elif row.kind == "theta":
            lam.append(gradient_row(lm, row.name, vals))
            lam_rows.append(row.name)
    return ActiveSystem(tuple(eta), tuple(lam), 4 * lm.n, tuple(eta_rows), tuple(lam_rows), tuple(active), values)
