"""Denominator sets of star graphs and their Landau matrices.

Rows use nested radial variables: position ``i`` of the sector carries
``W<i>.<mu>`` (the unit direction) and ``r<i>``. Photon propagators are kept
as ``Omega_i^2`` with the extracted factor ``(r_1...r_i)^2`` recorded in
``Row.scale``; residues have ``rho = r_1...r_ell`` divided out and recorded
the same way, so the momentum form is recoverable by multiplying back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

from ..errors import CertificationFailure, InvalidStarGraph, ZeroScale
from ..graphs import StarGraph, identity_sector, parse_segment, sign_table
from ..kinematics import FourVector, TrianglePoint
from .poly import ONE, ZERO, Poly, const_vector, grad_vector, omega_vector, p_vector, r_var, var_key

KINDS = ("photon_propagator", "pole", "residue", "delta_constraint", "theta")
# i0 prescription carried as metadata: which half-plane the row is pushed into
I0 = {"photon_propagator": "+i0", "pole": "+i0", "residue": "+i0", "delta_constraint": None, "theta": None}


@dataclass(frozen=True)
class Row:
    name: str
    poly: Poly
    kind: str
    side: int | None = None
    segment: str | None = None
    position: int | None = None  # sector position, for photon/delta/theta rows
    photon: int | None = None
    scale: Mapping[str, int] = field(default_factory=dict)
    sigma: int = 1
    ell: int | None = None

    @property
    def i0(self) -> str | None:
        return I0[self.kind]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "poly": str(self.poly),
            "side": self.side,
            "segment": self.segment,
            "position": self.position,
            "photon": self.photon,
            "scale": dict(self.scale),
            "sigma": self.sigma,
            "ell": self.ell,
        }


@dataclass(frozen=True)
class DenominatorSet:
    rows: tuple[Row, ...]
    n: int
    sector: tuple[int, ...]
    star_graph: StarGraph | None = None
    point: TrianglePoint | None = None

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def row(self, name: str) -> Row:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def by_segment(self, seg: str) -> Row:
        for r in self.rows:
            if r.segment == seg:
                return r
        raise KeyError(seg)

    def of_kind(self, kind: str) -> list[Row]:
        return [r for r in self.rows if r.kind == kind]

    def to_dict(self) -> dict:
        return {"n": self.n, "sector": list(self.sector), "rows": [r.to_dict() for r in self.rows]}


def radial_product(i: int) -> Poly:
    out = ONE
    for h in range(1, i + 1):
        out = out * r_var(h)
    return out


def photon_momentum(position: int) -> FourVector:
    """``k`` at sector position ``i`` as ``r_1...r_i Omega_i``."""
    R = radial_product(position)
    return omega_vector(position) * R


def side_momentum(tp: TrianglePoint, side: int) -> FourVector:
    return p_vector() + const_vector(tp.offset(side))


def _sum_momenta(coeffs: Mapping[int, int], pos: Mapping[int, int]) -> FourVector:
    total = FourVector(ZERO, ZERO, ZERO, ZERO)
    for ph, c in coeffs.items():
        total = total + photon_momentum(pos[ph]) * c
    return total


def _charged_order(sg: StarGraph) -> list[str]:
    g = sg.graph
    if g.row_order:
        order = list(g.row_order)
        if sorted(order) != sorted(g.segments()):
            raise InvalidStarGraph("row_order must list every segment exactly once")
        return order
    return g.segments()


def build_denominator_set(
    sg: StarGraph, sector: Sequence[int] | None = None, tp: TrianglePoint | None = None
) -> DenominatorSet:
    """All ``f_j`` of one pole-decomposition term, in the sector's radial variables."""
    from ..kinematics import default_triangle_point

    tp = tp or default_triangle_point()
    if not tp.is_rational():
        raise ValueError("denominator sets need a rational triangle point")
    n = sg.n
    sector = tuple(sector or identity_sector(n))
    pos = {ph: i + 1 for i, ph in enumerate(sector)}
    K = sg.momenta()
    signs = sign_table(sg, sector)
    m2 = tp.mass * tp.mass
    rows: list[tuple] = []

    for i in range(1, n + 1):
        om = omega_vector(i)
        scale = {f"r{h}": 2 for h in range(1, i + 1)}
        rows.append(("photon_propagator", om.sq(), dict(side=None, position=i, photon=sector[i - 1], scale=scale)))

    for seg in _charged_order(sg):
        s, _ = parse_segment(seg)
        P = side_momentum(tp, s)
        star = sg.star_segment(s)
        Sigma_i = P + _sum_momenta(K[star], pos)
        if seg == star:
            rows.append(("pole", Sigma_i.sq() - m2, dict(side=s, segment=seg)))
            continue
        entry = signs[seg]
        Sigma_j = P + _sum_momenta(K[seg], pos)
        raw = (Sigma_j.sq() - Sigma_i.sq()) * entry.sigma
        rho = {f"r{h}": 1 for h in range(1, entry.ell + 1)}
        f = raw.divide_monomial(rho)
        if f.is_zero():
            raise InvalidStarGraph(f"residue {seg} vanishes identically")
        rows.append(("residue", f, dict(side=s, segment=seg, scale=rho, sigma=entry.sigma, ell=entry.ell)))

    for i in range(1, n + 1):
        rows.append(("delta_constraint", omega_vector(i).euclid_sq() - 1, dict(position=i, photon=sector[i - 1])))
    for i in range(1, n + 1):
        rows.append(("theta", r_var(i), dict(position=i, photon=sector[i - 1])))

    built = tuple(Row(f"f{j}", poly, kind, **meta) for j, (kind, poly, meta) in enumerate(rows, start=1))
    return DenominatorSet(built, n, sector, sg, tp)


# Landau matrix -------------------------------------------------------------


def columns_for(n: int) -> list[str]:
    return [f"dW{i}" for i in range(1, n + 1)] + [f"dr{i}" for i in range(1, n + 1)] + ["dp"]


def _entry(f: Poly, col: str) -> Any:
    if col == "dp":
        return grad_vector(f, "p")
    if col.startswith("dW"):
        return grad_vector(f, f"W{col[2:]}.")
    if col.startswith("dr"):
        return f.diff(f"r{col[2:]}") / 2
    if col.startswith("dk"):
        return grad_vector(f, f"k{col[2:]}.")
    raise KeyError(col)


def _is_zero_entry(e: Any) -> bool:
    if isinstance(e, FourVector):
        return all(Poly.lift(c).is_zero() for c in e)
    return Poly.lift(e).is_zero()


@dataclass(frozen=True)
class LandauMatrix:
    """``entries[row_name][column]`` holds ``(1/2) df/dx`` (vector or scalar Poly)."""

    rows: tuple[Row, ...]
    columns: tuple[str, ...]
    entries: Mapping[str, Mapping[str, Any]]
    n: int

    def entry(self, row: str, col: str) -> Any:
        return self.entries[row][col]

    def row(self, name: str) -> Row:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def row_names(self) -> list[str]:
        return [r.name for r in self.rows]

    def nonzero(self, row: str, col: str) -> bool:
        return not _is_zero_entry(self.entries[row][col])

    def without(self, names: Sequence[str]) -> "LandauMatrix":
        drop = set(names)
        return LandauMatrix(
            tuple(r for r in self.rows if r.name not in drop),
            self.columns,
            {k: v for k, v in self.entries.items() if k not in drop},
            self.n,
        )

    def table(self) -> list[list[str]]:
        out = [["f_j", *self.columns]]
        for r in self.rows:
            out.append([f"{r.name} = {r.poly}", *(_fmt(self.entries[r.name][c]) for c in self.columns)])
        return out

    def pretty(self) -> str:
        return render_table(self.table())

    def to_dict(self) -> dict:
        return {
            "columns": list(self.columns),
            "rows": [
                {"row": r.to_dict(), "entries": {c: _fmt(self.entries[r.name][c]) for c in self.columns}}
                for r in self.rows
            ],
        }


def _fmt(e: Any) -> str:
    if isinstance(e, FourVector):
        if all(Poly.lift(c).is_zero() for c in e):
            return "0"
        return "(" + ", ".join(str(c) for c in e) + ")"
    return str(e)


def render_table(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for k, r in enumerate(rows):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
        if k == 0:
            lines.append("-" * len(lines[0]))
    return "\n".join(lines)


def landau_matrix(ds: DenominatorSet) -> LandauMatrix:
    cols = tuple(columns_for(ds.n))
    entries = {r.name: {c: _entry(r.poly, c) for c in cols} for r in ds.rows}
    return LandauMatrix(ds.rows, cols, entries, ds.n)


# momentum (k) form ---------------------------------------------------------


def _r_monomial_for(position: int, power: int = 1) -> dict[str, int]:
    return {f"r{h}": power for h in range(1, position + 1)}


def to_k_variables(f: Poly) -> Poly:
    """Rewrite a polynomial in ``(p, W, r)`` into ``(p, k)`` using ``k_i = r_1...r_i W_i``.

    Raises ValueError when some monomial is not a product of whole ``k``
    factors (i.e. the radial powers do not match the angular degrees).
    """
    out: dict[tuple, Fraction] = {}
    for mono, c in f.terms.items():
        wdeg: dict[int, int] = {}
        rexp: dict[int, int] = {}
        rest = []
        for v, e in mono:
            if v.startswith("W"):
                i = int(v[1:].split(".")[0])
                wdeg[i] = wdeg.get(i, 0) + e
                rest.append(("k" + v[1:], e))
            elif v.startswith("r"):
                rexp[int(v[1:])] = e
            else:
                rest.append((v, e))
        top = max([*wdeg, *rexp, 0])
        for h in range(1, top + 1):
            need = sum(d for i, d in wdeg.items() if i >= h)
            if rexp.get(h, 0) != need:
                raise ValueError(f"monomial {mono} is not expressible through k variables")
        key = tuple(sorted(rest, key=lambda ve: var_key(ve[0])))
        out[key] = out.get(key, 0) + c
    return Poly(out)


@dataclass(frozen=True)
class KFormMatrix:
    """Landau matrix after row/column rescaling into momentum variables.

    ``row_factor[name]`` multiplies row ``name`` and ``column_factor[col]``
    divides column ``dW<i>`` (renamed ``dk<i>``). Entries stay polynomials in
    ``(p, W, r)``; :meth:`k_entry` rewrites them with ``k`` variables.
    """

    rows: tuple[Row, ...]
    columns: tuple[str, ...]
    entries: Mapping[str, Mapping[str, Any]]
    functions: Mapping[str, Poly]
    row_factor: Mapping[str, Mapping[str, int]]
    column_factor: Mapping[str, Mapping[str, int]]
    n: int

    def entry(self, row: str, col: str) -> Any:
        return self.entries[row][col]

    def k_entry(self, row: str, col: str) -> Any:
        e = self.entries[row][col]
        if isinstance(e, FourVector):
            return e.map(to_k_variables)
        return to_k_variables(e)

    def k_function(self, row: str) -> Poly:
        return to_k_variables(self.functions[row])

    def table(self) -> list[list[str]]:
        out = [["f_j", *self.columns]]
        for r in self.rows:
            out.append(
                [f"{r.name} = {self.k_function(r.name)}", *(_fmt(self.k_entry(r.name, c)) for c in self.columns)]
            )
        return out

    def pretty(self) -> str:
        return render_table(self.table())

    def to_dict(self) -> dict:
        return {
            "columns": list(self.columns),
            "row_factor": {k: dict(v) for k, v in self.row_factor.items()},
            "column_factor": {k: dict(v) for k, v in self.column_factor.items()},
            "rows": [
                {
                    "name": r.name,
                    "kind": r.kind,
                    "function": str(self.k_function(r.name)),
                    "entries": {c: _fmt(self.k_entry(r.name, c)) for c in self.columns},
                }
                for r in self.rows
            ],
        }


def to_k_form(lm: LandauMatrix, r_values: Sequence[Any] | None = None) -> KFormMatrix:
    """Convert to momentum variables; needs every ``r_i`` nonzero.

    Photon rows are multiplied by ``(r_1...r_i)^2``, residue rows by ``rho``,
    and each ``dOmega_i`` column is divided by ``r_1...r_i``. Delta-constraint
    and theta rows have no momentum-form counterpart and are dropped.
    """
    if r_values is not None:
        for i, ri in enumerate(r_values, start=1):
            if ri == 0:
                raise ZeroScale(f"r_{i} = 0: the momentum form needs every radial variable nonzero")
    keep = [r for r in lm.rows if r.kind in ("photon_propagator", "pole", "residue")]
    cols = tuple(f"dk{i}" for i in range(1, lm.n + 1)) + ("dp",)
    entries: dict[str, dict[str, Any]] = {}
    functions: dict[str, Poly] = {}
    row_factor = {r.name: dict(r.scale) for r in keep}
    column_factor = {f"dk{i}": _r_monomial_for(i) for i in range(1, lm.n + 1)}
    for r in keep:
        fac = row_factor[r.name]
        functions[r.name] = r.poly.multiply_monomial(fac)
        entries[r.name] = {}
        for i in range(1, lm.n + 1):
            e = lm.entries[r.name][f"dW{i}"]
            entries[r.name][f"dk{i}"] = e.map(lambda c: c.multiply_monomial(fac).divide_monomial(column_factor[f"dk{i}"]))
        e = lm.entries[r.name]["dp"]
        entries[r.name]["dp"] = e.map(lambda c: c.multiply_monomial(fac))
    return KFormMatrix(tuple(keep), cols, entries, functions, row_factor, column_factor, lm.n)


# H operator calculus ------------------------------------------------------


def apply_H(j: int, f: Poly) -> Poly:
    """``Omega_j . d/dOmega_j - r_j d/dr_j + r_{j+1} d/dr_{j+1}`` applied to ``f``."""
    out = ZERO
    for mu in range(4):
        v = f"W{j}.{mu}"
        out = out + Poly.var(v) * f.diff(v)
    out = out - r_var(j) * f.diff(f"r{j}")
    out = out + r_var(j + 1) * f.diff(f"r{j + 1}")
    return out


def _proportionality(g: Poly, f: Poly) -> Fraction | None:
    """``c`` with ``g == c f``, or None."""
    if g.is_zero():
        return Fraction(0)
    if f.is_zero():
        return None
    mono, coef = f.items()[0]
    c = g.terms.get(mono, Fraction(0)) / coef
    return c if g == f * c else None


@dataclass(frozen=True)
class DeltaCertificate:
    position: int
    delta_row: str | None
    factors: Mapping[str, Fraction]  # row -> c with H_j f = c f

    def to_dict(self) -> dict:
        return {
            "position": self.position,
            "delta_row": self.delta_row,
            "beta_forced_zero": True,
            "factors": {k: str(v) for k, v in self.factors.items()},
        }


def eliminate_delta_rows(lm: LandauMatrix) -> tuple[LandauMatrix, list[DeltaCertificate]]:
    """Drop the ``Omega_i Omega~_i - 1`` rows after certifying ``beta_i = 0``.

    For each position ``j`` every other row must satisfy ``H_j f = c f``; then
    the loop-equation combination of columns reduces to ``2 beta_j = 0``.
    """
    certs = []
    for j in range(1, lm.n + 1):
        delta_rows = [r for r in lm.rows if r.kind == "delta_constraint" and r.position == j]
        factors: dict[str, Fraction] = {}
        for r in lm.rows:
            if r in delta_rows:
                h = apply_H(j, r.poly)
                if h != (r.poly + 1) * 2:
                    raise CertificationFailure(f"{r.name}: H_{j} does not reproduce the normalization")
                continue
            c = _proportionality(apply_H(j, r.poly), r.poly)
            if c is None:
                raise CertificationFailure(f"{r.name}: H_{j} f is not proportional to f")
            factors[r.name] = c
        certs.append(DeltaCertificate(j, delta_rows[0].name if delta_rows else None, factors))
    reduced = lm.without([r.name for r in lm.rows if r.kind == "delta_constraint"])
    return reduced, certs


# pole decomposition ---------------------------------------------------------


def pole_decomposition(z: Sequence[Any], m2: Any) -> list[Fraction]:
    """Terms ``1 / ((z_i - m^2) prod_{j != i} (z_j - z_i))`` of the partial-fraction sum."""
    z = [Fraction(x) for x in z]
    m2 = Fraction(m2)
    if len(set(z)) != len(z):
        raise ValueError("pole positions must be distinct")
    terms = []
    for i, zi in enumerate(z):
        den = zi - m2
        for j, zj in enumerate(z):
            if j != i:
                den *= zj - zi
        terms.append(1 / den)
    return terms


def propagator_product(z: Sequence[Any], m2: Any) -> Fraction:
    out = Fraction(1)
    for x in z:
        out /= Fraction(x) - Fraction(m2)
    return out
