"""Nested radial coordinates ``k_{pi(i)} = r_1 ... r_i Omega_i`` and sectors."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Sequence

from .errors import BoundViolation
from .kinematics import FourVector, _rational_sqrt

FLOAT_TOL = 1e-12


@dataclass(frozen=True)
class SectorPoint:
    """``perm[i-1]`` is the photon at sector position ``i``; ``r`` and ``omega`` are by position."""

    perm: tuple[int, ...]
    r: tuple[Any, ...]
    omega: tuple[FourVector, ...]

    @property
    def n(self) -> int:
        return len(self.perm)

    def radial_products(self) -> list[Any]:
        out, acc = [], 1
        for ri in self.r:
            acc = acc * ri
            out.append(acc)
        return out

    def first_zero(self) -> int:
        """Position ``g`` of the first vanishing ``r``; ``n + 1`` if none vanish."""
        for i, ri in enumerate(self.r, start=1):
            if ri == 0:
                return i
        return self.n + 1

    def variables(self) -> dict[str, Any]:
        """Binding of the polynomial variables ``r<i>`` and ``W<i>.<mu>``."""
        vals: dict[str, Any] = {}
        for i, (ri, om) in enumerate(zip(self.r, self.omega), start=1):
            vals[f"r{i}"] = ri
            for mu, c in enumerate(om):
                vals[f"W{i}.{mu}"] = c
        return vals

    def to_dict(self) -> dict:
        return {
            "perm": list(self.perm),
            "r": [str(x) for x in self.r],
            "omega": [[str(c) for c in om] for om in self.omega],
        }


def _norm(k: FourVector) -> tuple[Any, bool]:
    sq = k.euclid_sq()
    if isinstance(sq, (int, Fraction)):
        root = _rational_sqrt(Fraction(sq))
        if root is not None:
            return root, True
    return math.sqrt(float(sq)), False


def to_nested(k: Sequence[FourVector], delta: Any) -> SectorPoint:
    """Sector permutation plus nested radii and unit directions.

    Exact whenever every Euclidean norm is rational; otherwise the whole point
    is returned in floating point.
    """
    norms = [_norm(v) for v in k]
    exact = all(ex for _, ex in norms)
    vals = [nm if exact else float(nm) for nm, _ in norms]
    if exact:
        delta = Fraction(delta)
    for i, nm in enumerate(vals, start=1):
        if nm > delta * (1 + (0 if exact else FLOAT_TOL)):
            raise BoundViolation(f"|k_{i}| = {nm} exceeds delta = {delta}")
    order = sorted(range(len(k)), key=lambda i: (-vals[i], i))
    perm = tuple(i + 1 for i in order)
    r: list[Any] = []
    omega: list[FourVector] = []
    prev = None
    for pos, idx in enumerate(order):
        nm = vals[idx]
        if pos == 0:
            r.append(nm)
        elif prev == 0:
            r.append(Fraction(0) if exact else 0.0)
        else:
            r.append(nm / prev)
        vec = k[idx] if exact else k[idx].map(float)
        if nm == 0:
            # direction is undefined at k = 0; any unit vector will do
            omega.append(FourVector(Fraction(1), Fraction(0), Fraction(0), Fraction(0)) if exact else FourVector(1.0, 0.0, 0.0, 0.0))
        else:
            omega.append(vec / nm)
        prev = nm
    return SectorPoint(perm, tuple(r), tuple(omega))


def from_nested(sp: SectorPoint) -> list[FourVector]:
    out: dict[int, FourVector] = {}
    for R, om, ph in zip(sp.radial_products(), sp.omega, sp.perm):
        out[ph] = om * R
    return [out[i] for i in sorted(out)]


def boundary_point(sp: SectorPoint, g: int) -> SectorPoint:
    """Copy of ``sp`` with ``r_g = 0``; directions are kept as supplied."""
    if not 1 <= g <= sp.n:
        raise ValueError(f"g must lie in 1..{sp.n}")
    r = list(sp.r)
    r[g - 1] = Fraction(0) if isinstance(r[g - 1], (int, Fraction)) else 0.0
    return replace(sp, r=tuple(r))


def check_sector_point(sp: SectorPoint, delta: Any, tol: float = FLOAT_TOL) -> list[str]:
    """List violated SectorPoint invariants (empty when valid)."""
    problems = []
    for i, om in enumerate(sp.omega, start=1):
        if abs(float(om.euclid_sq()) - 1) > tol:
            problems.append(f"|Omega_{i}| != 1")
    for i, ri in enumerate(sp.r, start=1):
        hi = delta if i == 1 else 1
        if ri < 0 or ri > hi:
            problems.append(f"r_{i} out of range")
    return problems
