"""Four-vectors under the (+,-,-,-) metric and triangle-singularity kinematics.

Components are kept generic: anything closed under ``+``, ``-`` and ``*``
works (``Fraction``, ``float``, :class:`Surd`, or a symbolic polynomial), which
lets the same class carry numeric momenta and symbolic gradient entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import DegenerateKinematics

Rational = Fraction


def _q(x: Any) -> Any:
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return x


class Surd:
    """Exact number ``a + b*sqrt(d)`` with rational ``a, b`` and fixed ``d > 0``.

    Used for the single square root needed to put ``p2`` on mass shell.
    Mixing surds with different radicands is an error.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a: Any = 0, b: Any = 0, d: Any = 1):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = Fraction(d)
        if self.d <= 0:
            raise ValueError("radicand must be positive")

    def _coerce(self, other: Any) -> "Surd":
        if isinstance(other, Surd):
            if other.b != 0 and self.b != 0 and other.d != self.d:
                raise ValueError("incompatible radicands")
            return other
        if isinstance(other, (int, Fraction)):
            return Surd(other, 0, self.d)
        return NotImplemented

    def _d(self, other: "Surd") -> Fraction:
        return self.d if self.b != 0 else other.d

    def __add__(self, other: Any) -> "Surd":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Surd(self.a + o.a, self.b + o.b, self._d(o))

    __radd__ = __add__

    def __neg__(self) -> "Surd":
        return Surd(-self.a, -self.b, self.d)

    def __sub__(self, other: Any) -> "Surd":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Any) -> "Surd":
        return (-self) + other

    def __mul__(self, other: Any) -> "Surd":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        d = self._d(o)
        return Surd(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def conjugate(self) -> "Surd":
        return Surd(self.a, -self.b, self.d)

    def __truediv__(self, other: Any) -> "Surd":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        norm = o.a * o.a - o.b * o.b * o._d(self)
        if norm == 0:
            raise ZeroDivisionError("division by zero surd")
        num = self * o.conjugate()
        return Surd(num.a / norm, num.b / norm, num.d)

    def __rtruediv__(self, other: Any) -> "Surd":
        return Surd(other, 0, self.d) / self

    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt(d)``."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb or sa
        # opposite signs: compare a^2 with b^2 d
        lhs, rhs = self.a * self.a, self.b * self.b * self.d
        if lhs == rhs:
            return 0
        return sa if lhs > rhs else sb

    def __eq__(self, other: Any) -> bool:
        try:
            return (self - other).sign() == 0
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.d if self.b else 0))

    def __lt__(self, other: Any) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other: Any) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other: Any) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other: Any) -> bool:
        return (self - other).sign() >= 0

    def __abs__(self) -> "Surd":
        return -self if self.sign() < 0 else self

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(float(self.d))

    def __repr__(self) -> str:
        return f"Surd({self.a}, {self.b}, {self.d})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.d})"


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def exact_sqrt(x: Any) -> Fraction | Surd:
    """Square root of a nonnegative rational, as a rational when possible."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative radicand")
    r = _rational_sqrt(x)
    if r is not None:
        return r
    return Surd(0, 1, x)


@dataclass(frozen=True)
class FourVector:
    """Energy-momentum four-vector ``(t, x, y, z)``."""

    t: Any = Fraction(0)
    x: Any = Fraction(0)
    y: Any = Fraction(0)
    z: Any = Fraction(0)

    @classmethod
    def of(cls, *comps: Any) -> "FourVector":
        if len(comps) == 1 and not isinstance(comps[0], (int, Fraction, float, str)):
            comps = tuple(comps[0])
        if len(comps) != 4:
            raise ValueError("four components required")
        return cls(*(_q(c) for c in comps))

    @classmethod
    def zero(cls) -> "FourVector":
        return cls()

    def components(self) -> tuple:
        return (self.t, self.x, self.y, self.z)

    def __iter__(self):
        return iter(self.components())

    def __getitem__(self, mu: int) -> Any:
        return self.components()[mu]

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t + other.t, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t - other.t, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "FourVector":
        return FourVector(-self.t, -self.x, -self.y, -self.z)

    def __mul__(self, s: Any) -> "FourVector":
        return FourVector(self.t * s, self.x * s, self.y * s, self.z * s)

    def __rmul__(self, s: Any) -> "FourVector":
        return FourVector(s * self.t, s * self.x, s * self.y, s * self.z)

    def __truediv__(self, s: Any) -> "FourVector":
        return FourVector(self.t / s, self.x / s, self.y / s, self.z / s)

    def dot(self, other: "FourVector") -> Any:
        return self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z

    def sq(self) -> Any:
        return self.dot(self)

    def euclid_sq(self) -> Any:
        return self.t * self.t + self.x * self.x + self.y * self.y + self.z * self.z

    def lowered(self) -> "FourVector":
        """Covariant components ``(t, -x, -y, -z)``; also the Euclidean dual."""
        return FourVector(self.t, -self.x, -self.y, -self.z)

    def map(self, fn) -> "FourVector":
        return FourVector(*(fn(c) for c in self.components()))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.components())

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components()) + ")"


def minkowski_dot(a: FourVector, b: FourVector) -> Any:
    return a.dot(b)


def euclid_norm_sq(k: FourVector) -> Any:
    return k.euclid_sq()


def vsum(vectors: Iterable[FourVector]) -> FourVector:
    total = FourVector()
    for v in vectors:
        total = total + v
    return total


def rank_of(vectors: Sequence[FourVector]) -> int:
    """Rank of the matrix whose rows are ``vectors`` (exact for rationals)."""
    rows = [[Fraction(c) if not isinstance(c, Surd) else c for c in v] for v in vectors]
    rank, col = 0, 0
    ncols = 4
    while rank < len(rows) and col < ncols:
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def parallel(a: FourVector, b: FourVector) -> bool:
    return rank_of([a, b]) < 2


@dataclass(frozen=True)
class TrianglePoint:
    """An interior point of the triangle-diagram Landau surface.

    ``p1, p2, p3`` are on mass shell with ``alpha1 p1 + alpha2 p2 + alpha3 p3 = 0``.
    The external offsets follow ``p1 = p + q1``, ``p2 = p - q3``, ``p3 = p``.
    """

    p1: FourVector
    p2: FourVector
    p3: FourVector
    alpha1: Any
    alpha2: Any
    alpha3: Any
    mass: Any = Fraction(1)

    @property
    def q1(self) -> FourVector:
        return self.p1 - self.p3

    @property
    def q3(self) -> FourVector:
        return self.p3 - self.p2

    @property
    def q2(self) -> FourVector:
        return -self.q1 - self.q3

    @property
    def p(self) -> FourVector:
        return self.p3

    def momenta(self) -> dict[int, FourVector]:
        return {1: self.p1, 2: self.p2, 3: self.p3}

    def alphas(self) -> dict[int, Any]:
        return {1: self.alpha1, 2: self.alpha2, 3: self.alpha3}

    def offset(self, side: int) -> FourVector:
        """Constant ``c_s`` with ``p_s = p + c_s``."""
        return {1: self.q1, 2: -self.q3, 3: FourVector()}[side]

    def is_rational(self) -> bool:
        vals = [c for v in (self.p1, self.p2, self.p3) for c in v]
        vals += [self.alpha1, self.alpha2, self.alpha3, self.mass]
        return all(isinstance(c, (int, Fraction)) for c in vals)

    def loop_residual(self) -> FourVector:
        return self.p1 * self.alpha1 + self.p2 * self.alpha2 + self.p3 * self.alpha3

    def to_dict(self) -> dict:
        """Decimal strings for reading, exact strings alongside for re-verification."""

        def dec(x: Any) -> str:
            return f"{float(x):.12g}"

        out: dict = {}
        for name, v in (("p1", self.p1), ("p2", self.p2), ("p3", self.p3)):
            out[name] = [dec(c) for c in v]
            out[f"{name}_exact"] = [str(c) for c in v]
        for name, a in (("alpha1", self.alpha1), ("alpha2", self.alpha2), ("alpha3", self.alpha3), ("mass", self.mass)):
            out[name] = dec(a)
            out[f"{name}_exact"] = str(a)
        return out


def hyperbola_point(c: Any, s: Any) -> tuple[Fraction, Fraction]:
    """Validate a rational point ``(c, s)`` with ``c^2 - s^2 = 1`` and ``c > 0``."""
    c, s = Fraction(c), Fraction(s)
    if c * c - s * s != 1 or c <= 0:
        raise DegenerateKinematics(f"({c}, {s}) is not on the unit hyperbola")
    return c, s


def rapidity_point(u: Any) -> tuple[Fraction, Fraction]:
    """Rational point on the unit hyperbola from a parameter ``u`` in (-1, 1)."""
    u = Fraction(u)
    if not -1 < u < 1:
        raise ValueError("parameter must lie in (-1, 1)")
    den = 1 - u * u
    return (1 + u * u) / den, 2 * u / den


def construct_triangle_point(
    a1: Any,
    a3: Any,
    rapidity1: tuple,
    rapidity3: tuple,
    mass: Any = 1,
    exact: bool = True,
) -> TrianglePoint:
    """Build ``p1, p3`` from hyperbola points and close the loop with ``p2``.

    ``w = a1 p1 + a3 p3`` must be timelike; then ``alpha2 = sqrt(w^2)/m`` and
    ``p2 = -m w / sqrt(w^2)``. In exact mode the root lives in a quadratic
    extension; in float mode the invariants are validated to 1e-12.
    """
    a1, a3, mass = Fraction(a1), Fraction(a3), Fraction(mass)
    if a1 <= 0 or a3 <= 0:
        raise DegenerateKinematics("alpha1 and alpha3 must be positive")
    c1, s1 = hyperbola_point(*rapidity1)
    c3, s3 = hyperbola_point(*rapidity3)
    if (c1, s1) == (c3, s3):
        raise DegenerateKinematics("p1 and p3 are parallel")
    p1 = FourVector(mass * c1, mass * s1, Fraction(0), Fraction(0))
    p3 = FourVector(mass * c3, mass * s3, Fraction(0), Fraction(0))
    w = p1 * a1 + p3 * a3
    w2 = w.sq()
    if w2 <= 0 or w.t <= 0:
        raise DegenerateKinematics("a1 p1 + a3 p3 is not forward timelike")
    if exact:
        root = exact_sqrt(w2)
        p2 = -(w * (mass / root))
        alpha2 = root / mass
        tp = TrianglePoint(p1, p2, p3, a1, alpha2, a3, mass)
    else:
        root = math.sqrt(float(w2))
        fm = float(mass)
        p2 = FourVector(*(-fm * float(c) / root for c in w))
        p1f = p1.map(float)
        p3f = p3.map(float)
        tp = TrianglePoint(p1f, p2, p3f, float(a1), root / fm, float(a3), fm)
        report = verify_interior(tp, tol=1e-12)
        if not report.ok:
            raise DegenerateKinematics("; ".join(report.violations))
    return tp


def rational_triangle_point(
    rapidity1: tuple, rapidity2: tuple, rapidity3: tuple, mass: Any = 1
) -> TrianglePoint:
    """Fully rational point: ``p2 = -m (c2, s2, 0, 0)`` and alphas solved exactly.

    The loop equation fixes the alphas up to scale; ``alpha2`` is normalized
    so that all three are integers-or-simple rationals from Cramer's rule.
    """
    mass = Fraction(mass)
    c1, s1 = hyperbola_point(*rapidity1)
    c2, s2 = hyperbola_point(*rapidity2)
    c3, s3 = hyperbola_point(*rapidity3)
    # a1 (c1, s1) + a3 (c3, s3) = a2 (c2, s2) with a2 = 1
    det = c1 * s3 - c3 * s1
    if det == 0:
        raise DegenerateKinematics("p1 and p3 are parallel")
    a1 = (c2 * s3 - c3 * s2) / det
    a3 = (c1 * s2 - c2 * s1) / det
    if a1 <= 0 or a3 <= 0:
        raise DegenerateKinematics("p2 direction is outside the cone of p1, p3")
    p1 = FourVector(mass * c1, mass * s1, Fraction(0), Fraction(0))
    p2 = FourVector(-mass * c2, -mass * s2, Fraction(0), Fraction(0))
    p3 = FourVector(mass * c3, mass * s3, Fraction(0), Fraction(0))
    scale = Fraction(math.lcm(a1.denominator, a3.denominator))
    return TrianglePoint(p1, p2, p3, a1 * scale, scale, a3 * scale, mass)


def default_triangle_point() -> TrianglePoint:
    """The fixed generic interior point used by fixtures and the CLI."""
    return rational_triangle_point(
        (Fraction(5, 4), Fraction(-3, 4)),
        (Fraction(1), Fraction(0)),
        (Fraction(13, 5), Fraction(12, 5)),
    )


@dataclass
class InteriorReport:
    ok: bool
    violations: list[str] = field(default_factory=list)
    residuals: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def verify_interior(tp: TrianglePoint, tol: float | None = None) -> InteriorReport:
    """Check every TrianglePoint invariant; exact unless ``tol`` is given."""

    def is_zero(x: Any) -> bool:
        return abs(float(x)) <= tol if tol is not None else x == 0

    violations: list[str] = []
    residuals: dict[str, Any] = {}
    m2 = tp.mass * tp.mass
    for s, ps in tp.momenta().items():
        r = ps.sq() - m2
        residuals[f"mass_shell_{s}"] = r
        if not is_zero(r):
            violations.append(f"mass shell p{s}")
    loop = tp.loop_residual()
    residuals["loop"] = loop
    if not all(is_zero(c) for c in loop):
        violations.append("loop equation")
    for s, a in tp.alphas().items():
        if not a > 0:
            violations.append("alpha nonzero")
            break
    if not (tp.p1.t > 0 and tp.p2.t < 0 and tp.p3.t > 0):
        violations.append("energy signs")
    vecs = [tp.p1, tp.p2, tp.p3]
    if tol is None:
        pairs_parallel = any(parallel(vecs[i], vecs[j]) for i in range(3) for j in range(i + 1, 3))
        coplanar = rank_of(vecs) <= 2
    else:
        arr = np.array([[float(c) for c in v] for v in vecs])
        pairs_parallel = any(
            np.linalg.matrix_rank(arr[[i, j]], tol=1e-9) < 2 for i in range(3) for j in range(i + 1, 3)
        )
        coplanar = np.linalg.matrix_rank(arr, tol=1e-9) <= 2
    if pairs_parallel:
        violations.append("nonparallel")
    if not coplanar:
        violations.append("coplanar")
    return InteriorReport(not violations, violations, residuals)


def small_causal_shift_nonvanishing(P: FourVector, bound: Any) -> bool:
    """Sufficient exact test that ``2 P.K + K^2 != 0`` for causal ``K != 0``, ``|K| <= bound``.

    For timelike ``P`` and causal ``K``, ``2|P.K| >= |K0| P^2/|P0|`` while
    ``K^2 <= K0^2``; so ``bound * |P0| < P^2`` rules out a zero.
    """
    P2 = P.sq()
    if not P2 > 0:
        return False
    return bound * abs(P.t) < P2


def timelike_within(P: FourVector, bound: Any) -> bool:
    """Exact sufficient test that ``(P + X)^2 > 0`` for every ``|X|_E <= bound``."""
    P2 = P.sq()
    gap = P2 - bound * bound
    if not gap > 0:
        return False
    return gap * gap > 4 * P.euclid_sq() * bound * bound
