"""Sparse multivariate polynomials with exact rational coefficients.

Variables are plain strings. The fixed enumeration used for term ordering is
the ``p`` block (``p0..p3``), the angular blocks ``W<i>.<mu>``, the radial
variables ``r<i>``, then momentum variables ``k<i>.<mu>``; anything else
sorts last by name.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Any, Iterable, Mapping

from ..kinematics import FourVector

Monomial = tuple  # tuple[tuple[str, int], ...] sorted by var_key

_VAR_RE = re.compile(r"^(p|W|r|k)(\d*)(?:\.(\d))?$")


def var_key(name: str) -> tuple:
    m = _VAR_RE.match(name)
    if m is None:
        return (9, name, 0)
    head, idx, mu = m.groups()
    block = {"p": 0, "W": 1, "r": 2, "k": 3}[head]
    if head == "p":
        return (block, 0, int(idx))
    return (block, int(idx), int(mu or 0))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items(), key=lambda ve: var_key(ve[0])))


def _mono_deg(m: Monomial) -> int:
    return sum(e for _, e in m)


def _term_key(m: Monomial) -> tuple:
    # graded lexicographic: higher degree first, then by variable enumeration
    return (-_mono_deg(m), tuple((var_key(v), -e) for v, e in m))


class Poly:
    """Immutable sparse polynomial; no zero coefficients are ever stored."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Any] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c != 0:
                    clean[m] = c
        self._terms = clean
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c: Any) -> "Poly":
        return cls({(): c})

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({((name, 1),): 1})

    @staticmethod
    def lift(x: Any) -> "Poly":
        if isinstance(x, Poly):
            return x
        return Poly.const(x)

    # inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda mc: _term_key(mc[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def variables(self) -> set[str]:
        return {v for m in self._terms for v, _ in m}

    def degree(self, variables: Iterable[str] | None = None) -> int:
        if not self._terms:
            return -1
        if variables is None:
            return max(_mono_deg(m) for m in self._terms)
        vs = set(variables)
        return max(sum(e for v, e in m if v in vs) for m in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    # arithmetic ---------------------------------------------------------
    def __add__(self, other: Any) -> "Poly":
        other = Poly.lift(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: Any) -> "Poly":
        return self + (-Poly.lift(other))

    def __rsub__(self, other: Any) -> "Poly":
        return Poly.lift(other) - self

    def __mul__(self, other: Any) -> "Poly":
        if not isinstance(other, Poly):
            c = Fraction(other)
            return Poly({m: v * c for m, v in self._terms.items()})
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, c: Any) -> "Poly":
        c = Fraction(c)
        return Poly({m: v / c for m, v in self._terms.items()})

    def __pow__(self, n: int) -> "Poly":
        result = Poly.const(1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Poly):
            try:
                other = Poly.const(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # calculus -----------------------------------------------------------
    def diff(self, name: str) -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            for i, (v, e) in enumerate(m):
                if v == name:
                    rest = m[:i] + ((v, e - 1),) + m[i + 1 :] if e > 1 else m[:i] + m[i + 1 :]
                    out[rest] = out.get(rest, 0) + c * e
        return Poly(out)

    def divide_monomial(self, mono: Mapping[str, int]) -> "Poly":
        """Exact division by a monomial; raises ValueError if not divisible."""
        out: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            d = dict(m)
            for v, e in mono.items():
                if d.get(v, 0) < e:
                    raise ValueError(f"term not divisible by {dict(mono)}")
                d[v] -= e
                if d[v] == 0:
                    del d[v]
            out[tuple(sorted(d.items(), key=lambda ve: var_key(ve[0])))] = c
        return Poly(out)

    def multiply_monomial(self, mono: Mapping[str, int]) -> "Poly":
        m0 = tuple(sorted(((v, e) for v, e in mono.items() if e), key=lambda ve: var_key(ve[0])))
        return Poly({_mono_mul(m, m0): c for m, c in self._terms.items()})

    def subs(self, values: Mapping[str, Any]) -> "Poly":
        """Substitute numbers or polynomials for some variables."""
        result = Poly()
        for m, c in self._terms.items():
            term = Poly({(): c})
            keep = []
            for v, e in m:
                if v in values:
                    term = term * (Poly.lift(values[v]) ** e)
                else:
                    keep.append((v, e))
            result = result + term.multiply_monomial(dict(keep))
        return result

    def evaluate(self, values: Mapping[str, Any], zero: Any = Fraction(0)) -> Any:
        """Evaluate with every variable bound; works over any ring."""
        total = zero
        for m, c in self._terms.items():
            t = c
            for v, e in m:
                x = values[v]
                t = t * (x if e == 1 else x**e)
            total = total + t
        return total

    def compile(self) -> "CompiledPoly":
        return CompiledPoly(self)

    # display ------------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.items():
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Poly({self})"

    def to_json(self) -> list:
        return [[[[v, e] for v, e in m], str(c)] for m, c in self.items()]


class CompiledPoly:
    """Flattened form of a Poly for repeated numeric evaluation."""

    __slots__ = ("terms",)

    def __init__(self, poly: Poly):
        self.terms = [(c, m) for m, c in poly._terms.items()]

    def __call__(self, values: Mapping[str, Any]) -> Any:
        total = 0
        for c, m in self.terms:
            t = c
            for v, e in m:
                x = values[v]
                t = t * (x if e == 1 else x**e)
            total = total + t
        return total


ZERO = Poly()
ONE = Poly.const(1)


def p_vector() -> FourVector:
    return FourVector(*(Poly.var(f"p{mu}") for mu in range(4)))


def omega_vector(i: int) -> FourVector:
    return FourVector(*(Poly.var(f"W{i}.{mu}") for mu in range(4)))


def k_vector(i: int) -> FourVector:
    return FourVector(*(Poly.var(f"k{i}.{mu}") for mu in range(4)))


def r_var(i: int) -> Poly:
    return Poly.var(f"r{i}")


def const_vector(v: FourVector) -> FourVector:
    return FourVector(*(Poly.const(c) for c in v))


def poly_vector_zero() -> FourVector:
    return FourVector(ZERO, ZERO, ZERO, ZERO)


def vector_is_zero(v: FourVector) -> bool:
    return all(Poly.lift(c).is_zero() for c in v)


def grad_vector(f: Poly, prefix: str) -> FourVector:
    """Half-gradient of ``f`` with respect to a four-vector block, index raised.

    For ``f = a.b`` this returns ``a/2`` for the block of ``b`` (gradient as
    the vector in the other slot of the bilinear form).
    """
    comps = []
    for mu in range(4):
        d = f.diff(f"{prefix}{mu}") / 2
        comps.append(d if mu == 0 else -d)
    return FourVector(*comps)
