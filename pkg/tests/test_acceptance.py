"""End-to-end acceptance checks, one marker per criterion.

A per-criterion PASS/FAIL line is printed in the terminal summary.
"""

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from helpers import fv, side_vector, vec_eq
from landaukit import cli
from landaukit.diagrams import (
    DiagramParams,
    build_diagram,
    check_closure,
    contraction_cascade,
    matrix_contractions,
)
from landaukit.errors import ObstructionFound
from landaukit.feasibility import (
    ActiveSystem,
    Distortion,
    LandauSolution,
    SamplerConfig,
    distortion_sweep,
    farkas_decide,
)
from landaukit.feasibility import sampler as sampler_mod
from landaukit.feasibility.sampler import all_strata
from landaukit.graphs import (
    EXTERNAL,
    enumerate_star_graphs,
    is_separable,
    star_graph,
)
from landaukit.kinematics import FourVector
from landaukit.radial_coords import check_sector_point, from_nested, to_nested
from landaukit.symbolic import (
    Poly,
    apply_H,
    build_denominator_set,
    eliminate_delta_rows,
    k_vector,
    landau_matrix,
    omega_vector,
    pole_decomposition,
    propagator_product,
    r_var,
    to_k_form,
)

ROUTABLE = ["one_photon", "one_photon_a", "one_photon_b", "one_photon_c", "one_photon_d", "two_photon", "two_photon_ordered", "side_loop", "chain3", "ladder321"]


def sectors(n):
    return list(itertools.permutations(range(1, n + 1)))


# 1. golden matrices ----------------------------------------------------------


def one_photon_expected(tp, variant):
    W, r = omega_vector(1), r_var(1)
    P1, P2, P3 = (side_vector(tp, s) for s in (1, 2, 3))

    def res(P):
        return P.dot(W) * 2 + r * W.sq()

    def pole(P):
        return P.sq() - 1

    rows = {
        "a": [W.sq(), res(P2), pole(P2 + W * r), pole(P1 + W * r), res(P1), pole(P3)],
        "b": [W.sq(), res(P2), pole(P2 + W * r), res(P1), pole(P1), pole(P3)],
        "c": [W.sq(), pole(P2), res(P2), pole(P1 + W * r), res(P1), pole(P3)],
        "d": [W.sq(), pole(P2), res(P2), res(P1), pole(P1), pole(P3)],
    }[variant]
    return rows + [W.euclid_sq() - 1, r]


@pytest.mark.criterion(1)
@pytest.mark.parametrize("variant", "abcd")
def test_one_photon_function_lists(fixture, tp, variant):
    sg = star_graph(fixture(f"one_photon_{variant}"))
    ds = build_denominator_set(sg, (1,), tp)
    got = [row.poly for row in ds.rows]
    assert [r.name for r in ds.rows] == [f"f{i}" for i in range(1, 9)]
    assert got == one_photon_expected(tp, variant)


@pytest.mark.criterion(1)
def test_one_photon_matrix_entries(fixture, tp):
    sg = star_graph(fixture("one_photon_a"))
    lm = landau_matrix(build_denominator_set(sg, (1,), tp))
    W, r = omega_vector(1), r_var(1)
    P1, P2, P3 = (side_vector(tp, s) for s in (1, 2, 3))
    zero = FourVector(Poly(), Poly(), Poly(), Poly())
    W_dual = FourVector(W.t, -W.x, -W.y, -W.z)
    half = Fraction(1, 2)
    expected = {
        "f1": (W, 0, zero),
        "f2": (P2 + W * r, W.sq() * half, W),
        "f3": ((P2 + W * r) * r, (P2 + W * r).dot(W), P2 + W * r),
        "f4": ((P1 + W * r) * r, (P1 + W * r).dot(W), P1 + W * r),
        "f5": (P1 + W * r, W.sq() * half, W),
        "f6": (zero, 0, P3),
        "f7": (W_dual, 0, zero),
        "f8": (zero, half, zero),
    }
    for name, (dW, dr, dp) in expected.items():
        assert vec_eq(lm.entry(name, "dW1"), dW), name
        assert Poly.lift(lm.entry(name, "dr1")) == Poly.lift(dr), name
        assert vec_eq(lm.entry(name, "dp"), dp), name
    # sigma is negative exactly on the two residue rows
    assert {r.name: r.sigma for r in lm.rows if r.kind == "residue"} == {"f2": -1, "f5": -1}


@pytest.mark.criterion(1)
def test_two_photon_ordered_matrix(fixture, tp):
    sg = star_graph(fixture("two_photon_ordered"))
    lm = landau_matrix(build_denominator_set(sg, (1, 2), tp))
    W1, W2, r1, r2 = omega_vector(1), omega_vector(2), r_var(1), r_var(2)
    P1, P2 = side_vector(tp, 1), side_vector(tp, 2)
    X = W1 + W2 * r2
    zero = FourVector(Poly(), Poly(), Poly(), Poly())
    expected = [
        (W1.sq(), W1, zero),
        (W2.sq(), zero, W2),
        (P1.dot(W1) * 2 + r1 * W1.sq(), P1 + W1 * r1, zero),
        (P1.dot(X) * 2 + r1 * X.sq(), P1 + X * r1, (P1 + X * r1) * r2),
        # differentiation of this row gives p_2 in the last entry
        (P2.dot(X) * 2 + r1 * X.sq(), P2 + X * r1, (P2 + X * r1) * r2),
        (P2.dot(W2) * 2 + r1 * r2 * W2.sq(), zero, P2 + W2 * (r1 * r2)),
    ]
    rows = [r for r in lm.rows if r.kind in ("photon_propagator", "residue")]
    assert len(rows) == len(expected)
    for row, (f, d1, d2) in zip(rows, expected):
        assert row.poly == f, row.name
        assert vec_eq(lm.entry(row.name, "dW1"), d1), row.name
        assert vec_eq(lm.entry(row.name, "dW2"), d2), row.name
    reduced, certs = eliminate_delta_rows(lm)
    assert len(certs) == 2
    assert not any(r.kind == "delta_constraint" for r in reduced.rows)


@pytest.mark.criterion(1)
def test_side_loop_momentum_form(fixture, tp):
    sg = star_graph(fixture("side_loop"))
    km = to_k_form(landau_matrix(build_denominator_set(sg, (1, 2), tp)))
    k1, k2 = k_vector(1), k_vector(2)
    P1, P2, P3 = (side_vector(tp, s) for s in (1, 2, 3))
    zero = FourVector(Poly(), Poly(), Poly(), Poly())
    expected = {
        "f1": (k1.sq(), k1, zero, zero),
        "f2": (k2.sq(), zero, k2, zero),
        "f3": (P1.dot(k1) * 2 + k1.sq(), P1 + k1, zero, k1),
        "f4": ((P1 + k1).sq() - 1, P1 + k1, zero, P1 + k1),
        "f5": (P1.dot(k2) * 2 + k1.dot(k2) * 2 + k2.sq(), k2, P1 + k1 + k2, k2),
        "f6": (P1.dot(k1 - k2) * 2 + k1.sq() - k2.sq(), P1 + k1, -(P1 + k2), k1 - k2),
        "f7": (P2.dot(k2) * 2 + k2.sq(), zero, P2 + k2, k2),
        "f8": (P2.sq() - 1, zero, zero, P2),
        "f9": (P3.sq() - 1, zero, zero, P3),
    }
    assert [r.name for r in km.rows] == list(expected)
    for name, (f, d1, d2, dp) in expected.items():
        assert km.k_function(name) == f, name
        assert vec_eq(km.k_entry(name, "dk1"), d1), name
        assert vec_eq(km.k_entry(name, "dk2"), d2), name
        assert vec_eq(km.k_entry(name, "dp"), dp), name
    sigmas = {r.name: r.sigma for r in km.rows if r.kind == "residue"}
    assert sigmas == {"f3": -1, "f5": 1, "f6": -1, "f7": 1}


@pytest.mark.criterion(1)
def test_golden_runtime(fixture, tp, timer):
    with timer() as t:
        for v in "abcd":
            landau_matrix(build_denominator_set(star_graph(fixture(f"one_photon_{v}")), (1,), tp))
        landau_matrix(build_denominator_set(star_graph(fixture("two_photon_ordered")), (1, 2), tp))
        to_k_form(landau_matrix(build_denominator_set(star_graph(fixture("side_loop")), (1, 2), tp)))
    assert t.elapsed < 5


# 2. pole decomposition -------------------------------------------------------


@pytest.mark.criterion(2)
def test_pole_decomposition_worked_value():
    terms = pole_decomposition([3, 4], 1)  # z - m^2 = 2 and 3
    assert terms == [Fraction(1, 2), Fraction(-1, 3)]
    assert sum(terms) == Fraction(1, 6) == propagator_product([3, 4], 1)


@pytest.mark.criterion(2)
def test_pole_decomposition_identity(timer):
    rng = random.Random(20)

    def q():
        return Fraction(rng.randint(-40, 40), rng.randint(1, 12))

    with timer() as t:
        for n in range(1, 7):
            done = 0
            while done < 100:
                p = FourVector(q() + 3, q(), q(), q())
                Ks = [FourVector(q(), q(), q(), q()) * Fraction(1, 10) for _ in range(n + 1)]
                m2 = q() ** 2
                z = [(p + K).sq() for K in Ks]
                if len(set(z)) != len(z) or m2 in z:
                    continue
                assert sum(pole_decomposition(z, m2)) == propagator_product(z, m2)
                done += 1
    assert t.elapsed < 10


# 3. H_j classification and delta certificates --------------------------------


def _radial(lo, hi):
    out = Poly.const(1)
    for h in range(lo, hi + 1):
        out = out * r_var(h)
    return out


def _random_form(rng, n):
    p = FourVector(*(Poly.var(f"p{mu}") + rng.randint(-3, 3) for mu in range(4)))
    X = p
    for m in range(1, n + 1):
        X = X + omega_vector(m) * (_radial(1, m) * rng.choice((-1, 0, 1)))
    if rng.random() < 0.5:
        return "A1", None, X.sq() - 1
    s = rng.randint(1, n)
    Y = omega_vector(s)
    for t in range(s + 1, n + 1):
        Y = Y + omega_vector(t) * (_radial(s + 1, t) * rng.choice((-1, 0, 1)))
    return "A2", s, X.dot(Y) * 2 + _radial(1, s) * Y.sq()


@pytest.mark.criterion(3)
def test_H_classification_random_forms():
    rng = random.Random(3)
    seen = set()
    for _ in range(200):
        n = rng.randint(1, 5)
        kind, s, f = _random_form(rng, n)
        seen.add(kind)
        for j in range(1, n + 1):
            expect = f if (kind == "A2" and j == s) else Poly()
            assert apply_H(j, f) == expect
    assert seen == {"A1", "A2"}


@pytest.mark.criterion(3)
def test_delta_certificates_every_fixture(fixture, tp):
    for name in ROUTABLE:
        g = fixture(name)
        for sg in enumerate_star_graphs(g):
            for sec in sectors(g.n):
                lm = landau_matrix(build_denominator_set(sg, sec, tp))
                reduced, certs = eliminate_delta_rows(lm)
                assert [c.position for c in certs] == list(range(1, g.n + 1))
                assert all(c.delta_row is not None for c in certs)
                assert len(reduced.rows) == len(lm.rows) - g.n


@pytest.mark.criterion(3)
def test_one_photon_delta_row_forced_to_zero(fixture, tp):
    lm = landau_matrix(build_denominator_set(star_graph(fixture("one_photon_a")), (1,), tp))
    reduced, (cert,) = eliminate_delta_rows(lm)
    assert cert.delta_row == "f7"
    assert len(reduced.rows) == 7 and "f7" not in reduced.row_names()
    # H f = c f on every other row, so the loop combination leaves 2 * alpha_7 = 0
    assert dict(cert.factors) == {
        "f1": 2, "f2": 1, "f3": 0, "f4": 0, "f5": 1, "f6": 0, "f8": -1,
    }


# 4. Farkas exclusivity ---------------------------------------------------------


def _float_margin(system):
    """Independent oracle: max t s.t. eta d >= t, lam d = 0, |d_i| <= 1, t <= 1."""
    d = system.dim
    c = np.zeros(d + 1)
    c[-1] = -1
    A_ub = [[-float(v) for v in row] + [1.0] for row in system.eta]
    A_eq = [[float(v) for v in row] + [0.0] for row in system.lam] or None
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=np.zeros(len(A_ub)),
        A_eq=A_eq,
        b_eq=np.zeros(len(system.lam)) if system.lam else None,
        bounds=[(-1, 1)] * d + [(None, 1)],
        method="highs",
    )
    assert res.status == 0
    return -res.fun


def _float_dual_feasible(system):
    """Independent oracle: alpha >= 0, sum alpha = 1, eta^T alpha + lam^T beta = 0."""
    m, k = len(system.eta), len(system.lam)
    A = [[float(r[c]) for r in system.eta] + [float(r[c]) for r in system.lam] for c in range(system.dim)]
    A.append([1.0] * m + [0.0] * k)
    b = [0.0] * system.dim + [1.0]
    res = linprog(np.zeros(m + k), A_eq=A, b_eq=b, bounds=[(0, None)] * m + [(None, None)] * k, method="highs")
    return res.status == 0


def _random_system(rng):
    d = rng.randint(1, 5)
    m = rng.randint(1, 6)
    k = rng.randint(0, 2)
    eta = [[rng.randint(-3, 3) for _ in range(d)] for _ in range(m)]
    if rng.random() < 0.3:
        # plant a positive combination summing to zero
        a = [rng.randint(0, 3) for _ in range(m - 1)] + [1]
        last = [-sum(a[i] * eta[i][c] for i in range(m - 1)) for c in range(d)]
        eta[-1] = last
    lam = [[rng.randint(-2, 2) for _ in range(d)] for _ in range(k)]
    return ActiveSystem.from_matrices(eta, lam, d)


@pytest.mark.criterion(4)
def test_farkas_exclusivity_random_systems():
    rng = random.Random(4)
    kinds = set()
    for _ in range(500):
        system = _random_system(rng)
        cert = farkas_decide(system)
        kinds.add(cert.kind)
        assert cert.verify(system)
        oracle = _float_margin(system)
        if isinstance(cert, Distortion):
            assert oracle > 1e-9
            assert not _float_dual_feasible(system)
        else:
            assert abs(oracle) < 1e-9
            assert _float_dual_feasible(system)
    assert kinds == {"distortion", "landau_solution"}


@pytest.mark.criterion(4)
def test_farkas_invariances():
    rng = random.Random(44)
    for _ in range(100):
        system = _random_system(rng)
        base = farkas_decide(system).kind
        factors = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in system.eta]
        assert farkas_decide(system.scaled(factors)).kind == base
        if base == "distortion" and len(system.eta) > 1:
            # removing an inequality keeps a distortion a distortion
            i = rng.randrange(len(system.eta))
            assert farkas_decide(system.without_eta_row(i)).kind == "distortion"
        if base == "landau_solution":
            sol = farkas_decide(system)
            # rows outside the support can go without changing the verdict
            for i in reversed(range(len(system.eta))):
                if sol.alpha[i] == 0 and len(system.eta) > 1:
                    assert farkas_decide(system.without_eta_row(i)).kind == "landau_solution"
                    break


# 5. distortion sweep -------------------------------------------------------------


SWEEP_CASES = [("one_photon", None), ("two_photon", (2, 0, 0)), ("side_loop", (2, 0, 0))]


@pytest.mark.criterion(5)
def test_distortion_sweep_everywhere(fixture, tp, timer):
    units = 0
    with timer() as t:
        for name, star in SWEEP_CASES:
            g = fixture(name)
            sgs = enumerate_star_graphs(g) if star is None else [star_graph(g, star)]
            if name == "one_photon":
                assert len(sgs) == 4
            for sg in sgs:
                for sec in sectors(g.n):
                    ds = build_denominator_set(sg, sec, tp)
                    rep = distortion_sweep(ds, landau_matrix(ds), tp, config=SamplerConfig(samples=100, seed=5))
                    assert [s.stratum for s in rep.strata] == all_strata(g.n)
                    for st in rep.strata:
                        assert st.active_points >= 100, (name, sg.label(), sec, st.stratum)
                        assert st.landau_solutions == 0
                        assert st.distortions == st.active_points
                        assert st.min_margin > 0
                        assert all(rec.certificate.verify(rec.system) for rec in st.records)
                    units += 1
    assert units == 4 + 2 + 2
    assert t.elapsed < 60


# 6. nested radial coordinates ----------------------------------------------------


def _soft_momenta(rng, n, delta):
    out = []
    for _ in range(n):
        v = np.array([rng.uniform(-1, 1) for _ in range(4)])
        v *= rng.uniform(1e-3, 1) * delta / np.linalg.norm(v)
        out.append(FourVector(*map(float, v)))
    return out


@pytest.mark.criterion(6)
def test_round_trip_float():
    rng = random.Random(6)
    delta = 0.01
    for _ in range(1000):
        n = rng.randint(1, 5)
        ks = _soft_momenta(rng, n, delta)
        sp = to_nested(ks, delta)
        assert check_sector_point(sp, delta) == []
        assert all(abs(float(om.euclid_sq()) - 1) < 1e-12 for om in sp.omega)
        assert float(sp.r[0]) <= delta and all(0 <= float(x) <= 1 for x in sp.r[1:])
        back = from_nested(sp)
        for a, b in zip(ks, back):
            assert max(abs(x - y) for x, y in zip(a, b)) < 1e-12


PYTHAGOREAN = [(1, 2, 2, 4), (2, 3, 6, 0), (1, 4, 8, 0), (2, 4, 5, 6), (0, 3, 0, 4), (6, 6, 7, 0)]


@pytest.mark.criterion(6)
def test_round_trip_exact_pythagorean():
    rng = random.Random(66)
    delta = Fraction(1, 10)
    for _ in range(50):
        n = rng.randint(1, 4)
        ks = []
        for _ in range(n):
            comps = list(rng.choice(PYTHAGOREAN))
            rng.shuffle(comps)
            comps = [c * rng.choice((-1, 1)) for c in comps]
            ks.append(fv(*comps) * Fraction(1, rng.randint(120, 400)))
        sp = to_nested(ks, delta)
        assert all(isinstance(x, Fraction) for x in sp.r)
        assert all(om.euclid_sq() == 1 for om in sp.omega)
        assert from_nested(sp) == ks


# 7. closure versus matrix contractions -----------------------------------------


def _random_params(rng, sg):
    def a():
        return Fraction(rng.randint(0, 9), rng.randint(1, 5))

    return DiagramParams(
        {ph.index: a() for ph in sg.graph.photons},
        {seg: a() for seg in sg.residue_segments()},
        {s: a() for s in (1, 2, 3)},
    )


@pytest.mark.criterion(7)
@pytest.mark.parametrize("name", ROUTABLE)
def test_closure_equals_matrix_contractions(fixture, tp, name):
    rng = random.Random(name)
    g = fixture(name)
    sgs = enumerate_star_graphs(g)
    forms = {}
    for _ in range(100):
        sg = rng.choice(sgs)
        sec = tuple(rng.sample(range(1, g.n + 1), g.n))
        key = (sg.star, sec)
        if key not in forms:
            forms[key] = to_k_form(landau_matrix(build_denominator_set(sg, sec, tp)))
        k = [fv(*(Fraction(rng.randint(-20, 20), 1000) for _ in range(4))) for _ in range(g.n)]
        d = build_diagram(sg, _random_params(rng, sg), tp, k, sec)
        ref = check_closure(d)
        got = matrix_contractions(forms[key], d)
        assert got.p_loop == ref.p_loop
        assert got.photon_loops == ref.photon_loops


# 8. structure --------------------------------------------------------------------


def _components_oracle(sg):
    """Union-find over the graph with the three star segments cut."""
    g = sg.graph
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            x = parent[x]
        return x

    def union(a, b):
        parent[find(a)] = find(b)

    stars = set(sg.star_segments())
    for seg in g.segments():
        a, b = g.segment_ends(seg)
        find(a), find(b)
        if seg not in stars:
            union(a, b)
    for ph in g.photons:
        union(ph.tail, ph.head)
    comps = {}
    for v in list(parent):
        comps.setdefault(find(v), set()).add(v)
    return len(comps) == 3 and all(len(c & set(EXTERNAL)) == 1 for c in comps.values())


@pytest.mark.criterion(8)
@pytest.mark.parametrize("name,expected", [("one_photon_d", True), ("two_photon", True), ("one_photon_a", False), ("one_photon_c", False), ("side_loop", False)])
def test_separability(fixture, name, expected):
    sg = star_graph(fixture(name))
    assert is_separable(sg) is expected
    assert _components_oracle(sg) is expected


@pytest.mark.criterion(8)
def test_routing_limits(fixture):
    for name in ROUTABLE:
        for sg in enumerate_star_graphs(fixture(name)):
            for route in sg.routing.routes.values():
                assert len(route.vertices) <= 1
                assert len(route.sides) <= 2


@pytest.mark.criterion(8)
def test_cascade_complete_on_fixtures(fixture, tp):
    for name in ROUTABLE:
        g = fixture(name)
        assert contraction_cascade(g, tp).verdict == "all alpha forced to 0"
        for sg in enumerate_star_graphs(g):
            for sec in sectors(g.n):
                for zeros in all_strata(g.n):
                    log = contraction_cascade(sg, tp, zeros, sec)
                    assert log.verdict == "all alpha forced to 0"
                    forced = log.zeroed()
                    assert {f"photon{ph.index}" for ph in g.photons} <= forced
                    assert set(sg.residue_segments()) <= forced


@pytest.mark.criterion(8)
@pytest.mark.parametrize("name", ["zigzag", "single_v1v3"])
def test_cascade_reports_zigzag(fixture, tp, name):
    with pytest.raises(ObstructionFound) as exc:
        contraction_cascade(fixture(name), tp)
    assert exc.value.kind == "zigzag"
    assert exc.value.log.verdict.startswith("obstruction")


# 9. reproducibility ----------------------------------------------------------------


@pytest.mark.criterion(9)
def test_machine_report_byte_identical(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        assert cli.main(["check", "side_loop", "--samples", "20", "--seed", "11", "--format", "machine", "-o", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    other = tmp_path / "other.json"
    cli.main(["check", "side_loop", "--samples", "20", "--seed", "12", "--format", "machine", "-o", str(other)])
    assert other.read_bytes() != outs[0]


@pytest.mark.criterion(9)
@pytest.mark.parametrize(
    "args,code",
    [
        (["check", "one_photon"], 0),
        (["check", "one_photon_a"], 0),
        (["check", "two_photon"], 0),
        (["check", "side_loop"], 0),
        (["cascade", "side_loop"], 0),
        (["report", "one_photon_d"], 0),
        (["check", "zigzag"], 3),
        (["cascade", "zigzag"], 3),
        (["check", "single_v1v3"], 3),
        (["report", "zigzag"], 3),
        (["check", "no_such_fixture"], 1),
        (["check", "one_photon", "--sector", "1,2"], 1),
        (["check", "one_photon", "--stratum", "4"], 1),
    ],
)
def test_exit_code_matrix(tmp_path, args, code):
    out = tmp_path / "out.txt"
    assert cli.main([*args, "--samples", "10", "-o", str(out)]) == code


@pytest.mark.criterion(9)
def test_exit_code_for_landau_solution(monkeypatch, tmp_path):
    # inject a decider that always produces multipliers to exercise the exit path
    def decide(system):
        return LandauSolution(tuple(Fraction(1) for _ in system.eta), tuple(Fraction(0) for _ in system.lam))

    monkeypatch.setattr(sampler_mod, "farkas_decide", decide)
    out = tmp_path / "out.txt"
    assert cli.main(["check", "one_photon", "--samples", "3", "-o", str(out)]) == 2
    assert "Landau solution" in out.read_text()


@pytest.mark.criterion(9)
def test_exit_code_input_errors(tmp_path):
    empty = tmp_path / "empty.graph"
    empty.write_text("")
    assert cli.main(["check", str(empty)]) == 1
    one_end = tmp_path / "bad.graph"
    one_end.write_text("landaukit-graph 1\nside 1 a\nside 2\nside 3\nphoton 1 a\n")
    assert cli.main(["decompose", str(one_end)]) == 1
