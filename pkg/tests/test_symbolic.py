from dataclasses import replace
import random
from fractions import Fraction

import pytest

from helpers import fv
from landaukit.errors import CertificationFailure, ZeroScale
from landaukit.graphs import enumerate_star_graphs, star_graph
from landaukit.kinematics import exact_sqrt
from landaukit.radial_coords import SectorPoint, from_nested
from landaukit.symbolic import (
    Poly,
    apply_H,
    build_denominator_set,
    eliminate_delta_rows,
    grad_vector,
    landau_matrix,
    omega_vector,
    p_vector,
    r_var,
    to_k_form,
    to_k_variables,
)

x, y = Poly.var("x"), Poly.var("y")


def test_poly_arithmetic():
    f = (x + y) ** 2
    assert f == x * x + x * y * 2 + y * y
    assert (f - f).is_zero()
    assert f.diff("x") == x * 2 + y * 2
    assert f.degree() == 2 and f.degree(["x"]) == 2
    assert f.evaluate({"x": Fraction(1, 2), "y": 3}) == Fraction(49, 4)
    assert f.subs({"y": x}) == x * x * 4
    assert (x * y * y).divide_monomial({"y": 2}) == x
    with pytest.raises(ValueError):
        x.divide_monomial({"y": 1})
    assert str(Poly()) == "0"


def test_grad_vector_is_other_slot():
    p, W = p_vector(), omega_vector(1)
    g = grad_vector(p.dot(W) * 2, "W1.")
    assert all(Poly.lift(a) == b for a, b in zip(g, p))


def test_theta_row_entries(fixture, tp):
    lm = landau_matrix(build_denominator_set(star_graph(fixture("one_photon_a")), (1,), tp))
    theta = lm.row("f8")
    assert theta.kind == "theta"
    assert Poly.lift(lm.entry("f8", "dr1")) == Poly.const(Fraction(1, 2))
    assert not lm.nonzero("f8", "dW1") and not lm.nonzero("f8", "dp")


def _random_sector_point(rng, n, sector):
    def unit():
        a, b, c, d = (rng.randint(-5, 5) for _ in range(4))
        v = fv(a, b, c, d)
        sq = v.euclid_sq()
        if sq == 0:
            return fv(1, 0, 0, 0)
        # a unit vector only when the norm is rational; otherwise a fixed one
        root = exact_sqrt(sq)
        return v / root if isinstance(root, Fraction) else fv(0, 3, 4, 0) / 5

    r = tuple(Fraction(rng.randint(1, 9), 100 if i == 0 else 10) for i in range(n))
    return SectorPoint(tuple(sector), r, tuple(unit() for _ in range(n)))


@pytest.mark.parametrize("name", ["one_photon", "two_photon", "side_loop", "chain3", "ladder321"])
def test_residue_rows_expand_to_sigma_difference(fixture, tp, name):
    rng = random.Random(name)
    g = fixture(name)
    for sg in enumerate_star_graphs(g):
        sector = tuple(rng.sample(range(1, g.n + 1), g.n))
        ds = build_denominator_set(sg, sector, tp)
        sp = _random_sector_point(rng, g.n, sector)
        ks = dict(enumerate(from_nested(sp), start=1))
        vals = {**sp.variables(), **{f"p{mu}": c for mu, c in enumerate(tp.p)}}
        K = sg.momenta()

        def Sigma(seg):
            s = int(seg[0])
            v = tp.p + tp.offset(s)
            for ph, c in K[seg].items():
                v = v + ks[ph] * c
            return v

        for row in ds.of_kind("residue"):
            rho = 1
            for h in range(1, row.ell + 1):
                rho *= sp.r[h - 1]
            star = sg.star_segment(row.side)
            expect = row.sigma * (Sigma(row.segment).sq() - Sigma(star).sq())
            assert rho * row.poly.evaluate(vals) == expect


def test_matrix_matches_finite_differences(fixture, tp):
    rng = random.Random(50)
    sg = star_graph(fixture("side_loop"))
    lm = landau_matrix(build_denominator_set(sg, (1, 2), tp))
    h = 1e-6
    for _ in range(50):
        vals = {v: rng.uniform(-1, 1) for row in lm.rows for v in row.poly.variables()}
        for row in lm.rows:
            for var in sorted(row.poly.variables()):
                up, dn = dict(vals), dict(vals)
                up[var] += h
                dn[var] -= h
                fd = (row.poly.evaluate(up, 0.0) - row.poly.evaluate(dn, 0.0)) / (4 * h)
                if var.startswith("r"):
                    got = float(Poly.lift(lm.entry(row.name, "d" + var)).evaluate(vals, 0.0))
                else:
                    block, mu = var.split(".") if "." in var else (var[0], var[1])
                    col = "dp" if var.startswith("p") else "d" + block
                    mu = int(mu)
                    comp = lm.entry(row.name, col)[mu]
                    got = float(Poly.lift(comp).evaluate(vals, 0.0)) * (1 if mu == 0 else -1)
                assert abs(got - fd) <= 1e-8 * max(1.0, abs(fd)) + 1e-7, (row.name, var)


def test_k_variables_rewrite():
    W1, r1 = omega_vector(1), r_var(1)
    k = to_k_variables((W1 * r1).sq())
    assert k == Poly.var("k1.0") ** 2 - Poly.var("k1.1") ** 2 - Poly.var("k1.2") ** 2 - Poly.var("k1.3") ** 2
    with pytest.raises(ValueError):
        to_k_variables(W1.sq() * r1)


def test_k_form_zero_scale(fixture, tp):
    lm = landau_matrix(build_denominator_set(star_graph(fixture("side_loop")), (1, 2), tp))
    with pytest.raises(ZeroScale):
        to_k_form(lm, [0, Fraction(1, 2)])
    km = to_k_form(lm, [Fraction(1, 100), Fraction(1, 2)])
    assert km.columns[:2] == ("dk1", "dk2")
    assert dict(km.row_factor["f2"]) == {"r1": 2, "r2": 2}


def test_apply_H_on_delta_row():
    d = omega_vector(2).euclid_sq() - 1
    assert apply_H(2, d) == (d + 1) * 2
    assert apply_H(1, d).is_zero()


def test_chain3_delta_rows_removed(fixture, tp):
    lm = landau_matrix(build_denominator_set(star_graph(fixture("chain3")), (1, 2, 3), tp))
    reduced, certs = eliminate_delta_rows(lm)
    assert len(certs) == 3
    assert len(reduced.rows) == len(lm.rows) - 3
    for c in certs:
        for name, factor in c.factors.items():
            assert apply_H(c.position, lm.row(name).poly) == lm.row(name).poly * factor


def test_malformed_row_fails_certificate(fixture, tp):
    lm = landau_matrix(build_denominator_set(star_graph(fixture("one_photon_a")), (1,), tp))
    bad_row = replace(lm.rows[0], poly=lm.rows[0].poly + r_var(1) ** 3)
    broken = replace(lm, rows=(bad_row, *lm.rows[1:]))
    with pytest.raises(CertificationFailure):
        eliminate_delta_rows(broken)


def test_machine_dicts_are_strings(fixture, tp):
    ds = build_denominator_set(star_graph(fixture("one_photon_a")), (1,), tp)
    d = ds.to_dict()
    assert d["rows"][0]["name"] == "f1"
    lm = landau_matrix(ds)
    assert "f1" in lm.pretty()
    assert lm.to_dict()["columns"] == ["dW1", "dr1", "dp"]
