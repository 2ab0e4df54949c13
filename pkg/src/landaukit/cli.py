"""Command-line front end: ``landaukit <command> GRAPH [options]``.

Exit codes: 0 every sampled point distortable, 1 input error, 2 a Landau
solution was found, 3 an obstruction (zig-zag stratum or failed cascade),
4 an internal certificate failed its own check.
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .diagrams import (
    DiagramParams,
    build_diagram,
    check_closure,
    classify_VR_VL,
    contraction_cascade,
    emit_dot,
)
from .errors import (
    CertificationFailure,
    InvalidStarGraph,
    LandauKitError,
    NoValidRouting,
    ObstructionFound,
    ParseError,
    ValidationError,
)
from .feasibility import SamplerConfig, distortion_sweep
from .feasibility.sampler import resolve_strata
from .feasibility.core import CertificateError
from .graphfile import fixture_path, parse_graph_file
from .graphs import (
    DressedGraph,
    StarGraph,
    enumerate_star_graphs,
    enumerate_zigzag_paths,
    is_separable,
    sign_table,
    star_graph,
    validate_graph,
)
from .kinematics import FourVector, default_triangle_point
from .symbolic import build_denominator_set, landau_matrix, to_k_form

REPORT_SCHEMA = "landaukit-report"
REPORT_VERSION = 1
COMMANDS = ("decompose", "matrix", "check", "cascade", "diagram", "report")

EXIT_OK, EXIT_INPUT, EXIT_SOLUTION, EXIT_OBSTRUCTION, EXIT_INTERNAL = 0, 1, 2, 3, 4
INPUT_ERRORS = (ParseError, ValidationError, NoValidRouting, InvalidStarGraph, ValueError, OSError)


@dataclass
class AnalysisConfig:
    input: str
    command: str
    sector: Any = "all"  # "all" or a permutation tuple
    stratum: Any = "all"  # "all", "interior" or a list of zero-position tuples
    samples: int = 100
    seed: int = 0
    delta: Fraction | None = None
    delta_prime: Fraction | None = None
    tolerance: Fraction | None = None
    format: str = "text"
    star: tuple[int, int, int] | None = None
    kform: bool = False
    params: str | None = None
    jobs: int = 1

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "sector": self.sector if isinstance(self.sector, str) else list(self.sector),
            "stratum": self.stratum if isinstance(self.stratum, str) else [list(z) for z in self.stratum],
            "samples": self.samples,
            "seed": self.seed,
            "tolerance": None if self.tolerance is None else str(self.tolerance),
            "star": None if self.star is None else list(self.star),
            "kform": self.kform,
        }


@dataclass
class Report:
    data: dict
    exit_code: int = EXIT_OK
    text: list[str] = field(default_factory=list)
    dot: str | None = None

    def machine(self) -> str:
        return json.dumps(self.data, indent=2, sort_keys=True) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "machine":
            return self.machine()
        if fmt == "dot":
            if self.dot is None:
                raise ValueError("--format dot is only available for the diagram command")
            return self.dot
        return "\n".join(self.text) + "\n"


# argument helpers ------------------------------------------------------------


def _positions(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise ValueError(f"expected comma-separated positions, got {text!r}") from None


def parse_sector(spec: str) -> Any:
    return "all" if spec == "all" else _positions(spec)


def parse_strata(specs: Sequence[str] | None) -> Any:
    if not specs:
        return "all"
    if len(specs) == 1 and specs[0] in ("all", "interior"):
        return specs[0]
    return [() if s == "interior" else _positions(s) for s in specs]


def sectors_for(n: int, spec: Any) -> list[tuple[int, ...]]:
    if spec == "all":
        return [tuple(p) for p in itertools.permutations(range(1, n + 1))]
    if sorted(spec) != list(range(1, n + 1)):
        raise ValueError(f"sector {spec} is not a permutation of 1..{n}")
    return [tuple(spec)]


def load_graph(cfg: AnalysisConfig) -> DressedGraph:
    g = parse_graph_file(fixture_path(cfg.input))
    changes = {}
    if cfg.delta is not None:
        changes["delta"] = cfg.delta
    if cfg.delta_prime is not None:
        changes["delta_prime"] = cfg.delta_prime
    if changes:
        g = validate_graph(dataclasses.replace(g, **changes))
    return g


def star_graphs_for(g: DressedGraph, cfg: AnalysisConfig) -> list[StarGraph]:
    chosen = cfg.star or g.star
    if chosen is not None:
        return [star_graph(g, chosen)]
    return enumerate_star_graphs(g)


# per-command work -------------------------------------------------------------


def _decompose(g, cfg, tp, report):
    units = []
    for sg in star_graphs_for(g, cfg):
        report.text.append(f"{sg.label()}  separable={is_separable(sg)}")
        sectors = []
        for sec in sectors_for(g.n, cfg.sector):
            ds = build_denominator_set(sg, sec, tp)
            signs = sign_table(sg, sec)
            sectors.append(
                {
                    "sector": list(sec),
                    "signs": {
                        seg: {"ell": e.ell, "photon": e.photon, "sigma": e.sigma}
                        for seg, e in sorted(signs.items())
                    },
                    "denominators": ds.to_dict(),
                }
            )
            report.text.append(f"  sector {sec}")
            for row in ds.rows:
                report.text.append(f"    {row.name:4} {row.kind:18} {row.poly}")
        units.append(
            {
                "star": sg.label(),
                "separable": is_separable(sg),
                "routing": sg.routing.to_dict(),
                "sectors": sectors,
            }
        )
    report.data["units"] = units


def _matrix(g, cfg, tp, report):
    units = []
    for sg in star_graphs_for(g, cfg):
        for sec in sectors_for(g.n, cfg.sector):
            lm = landau_matrix(build_denominator_set(sg, sec, tp))
            m = to_k_form(lm) if cfg.kform else lm
            units.append({"star": sg.label(), "sector": list(sec), "form": "k" if cfg.kform else "radial", "matrix": m.to_dict()})
            report.text.append(f"{sg.label()} sector {sec} ({'momentum' if cfg.kform else 'radial'} form)")
            report.text.append(m.pretty())
    report.data["units"] = units


def _sweep_unit(args) -> dict:
    g, star, sec, samples, seed, strata, tol = args
    tp = default_triangle_point()
    sg = star_graph(g, star)
    ds = build_denominator_set(sg, sec, tp)
    lm = landau_matrix(ds)
    conf = SamplerConfig(samples=samples, seed=seed, strata=strata)
    if tol is not None:
        conf = dataclasses.replace(conf, eps=tol)
    rep = distortion_sweep(ds, lm, tp, config=conf)
    return {"star": sg.label(), "sector": list(sec), "sweep": rep.to_dict()}


def _approx(x: Any) -> str:
    return "-" if x is None else f"{float(Fraction(x)):.6g}"


def _zigzag_gate(g, report) -> bool:
    paths = enumerate_zigzag_paths(g)
    if not paths:
        return False
    report.data["obstructions"] = [
        {"kind": "zigzag", "vertices": list(p.vertices), "photons": list(p.photons)} for p in paths
    ]
    report.text.append(f"obstruction: {len(paths)} zig-zag path(s) join external vertices")
    for p in paths:
        report.text.append(f"  {' -> '.join(p.vertices)} via photons {list(p.photons)}")
    report.exit_code = max(report.exit_code, EXIT_OBSTRUCTION)
    return True


def _check(g, cfg, tp, report):
    if _zigzag_gate(g, report):
        report.data["units"] = []
        report.data["verdict"] = "obstruction"
        return
    strata = resolve_strata(g.n, cfg.stratum)
    work = [
        (g, sg.star, sec, cfg.samples, cfg.seed, strata, cfg.tolerance)
        for sg in star_graphs_for(g, cfg)
        for sec in sectors_for(g.n, cfg.sector)
    ]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            units = list(pool.map(_sweep_unit, work))
    else:
        units = [_sweep_unit(w) for w in work]
    solutions = 0
    for u in units:
        sw = u["sweep"]
        solutions += sw["landau_solutions"]
        for st in sw["strata"]:
            report.text.append(
                f"{u['star']} sector {tuple(u['sector'])} stratum r=0 at {tuple(st['stratum'])}: "
                f"{st['active_points']} active points, {st['distortions']} distortions, "
                f"{st['landau_solutions']} Landau solutions, min margin {_approx(st['min_margin'])}"
            )
    report.data["units"] = units
    if solutions:
        report.exit_code = max(report.exit_code, EXIT_SOLUTION)
        report.data["verdict"] = f"{solutions} Landau solution(s) found"
    else:
        report.data["verdict"] = "distortable everywhere sampled"
    report.text.append(f"verdict: {report.data['verdict']}")


def _cascade(g, cfg, tp, report):
    units = []
    try:
        contraction_cascade(g, tp)  # zig-zag check on the dressed graph
        for sg in star_graphs_for(g, cfg):
            for sec in sectors_for(g.n, cfg.sector):
                for zeros in resolve_strata(g.n, cfg.stratum):
                    log = contraction_cascade(sg, tp, zeros, sec)
                    units.append(log.to_dict())
                    report.text.append(f"{sg.label()} sector {sec} stratum {zeros}: {log.verdict}")
    except ObstructionFound as exc:
        if exc.log is not None:
            units.append(exc.log.to_dict())
        report.data.setdefault("obstructions", []).append({"kind": exc.kind, "detail": _jsonable(exc.detail)})
        report.text.append(f"obstruction: {exc.kind}: {exc.detail}")
        report.exit_code = max(report.exit_code, EXIT_OBSTRUCTION)
    report.data["units"] = units
    report.data["verdict"] = "obstruction" if report.exit_code == EXIT_OBSTRUCTION else "all alpha forced to 0"


def _jsonable(x: Any) -> Any:
    return json.loads(json.dumps(x, default=str))


def _diagram(g, cfg, tp, report):
    if not cfg.params:
        raise ValueError("the diagram command needs --params FILE")
    data = json.loads(Path(cfg.params).read_text())
    sg = star_graph(g, data.get("star_graph") or cfg.star)
    k = [FourVector(*(Fraction(c) for c in v)) for v in data["k"]]
    if len(k) != g.n:
        raise ValueError(f"params give {len(k)} photon momenta, graph has {g.n} photons")
    sector = tuple(data["sector"]) if data.get("sector") else None
    d = build_diagram(sg, DiagramParams.from_dict(data), tp, k, sector)
    closure = check_closure(d)
    cls = classify_VR_VL(d)
    report.dot = emit_dot(d)
    report.data["diagram"] = {
        "star": sg.label(),
        "params": DiagramParams.from_dict(data).to_dict(),
        "closure": closure.to_dict(),
        "vertices": cls.to_dict(),
        "dot": report.dot,
    }
    report.text.append(report.dot.rstrip("\n"))


def _full(g, cfg, tp, report):
    out = {}
    codes = set()
    for name, fn in (("decompose", _decompose), ("matrix", _matrix), ("check", _check), ("cascade", _cascade)):
        part = Report({})
        fn(g, cfg, tp, part)
        out[name] = part.data
        report.text.append(f"== {name}")
        report.text.extend(part.text)
        codes.add(part.exit_code)
    # a Landau solution outranks an obstruction
    report.exit_code = next((c for c in (EXIT_SOLUTION, EXIT_OBSTRUCTION) if c in codes), EXIT_OK)
    report.data["sections"] = out
    report.data["verdict"] = out["check"].get("verdict")


HANDLERS = {
    "decompose": _decompose,
    "matrix": _matrix,
    "check": _check,
    "cascade": _cascade,
    "diagram": _diagram,
    "report": _full,
}


def run_pipeline(cfg: AnalysisConfig) -> Report:
    if cfg.command not in HANDLERS:
        raise ValueError(f"unknown command {cfg.command!r}")
    g = load_graph(cfg)
    tp = default_triangle_point()
    report = Report(
        {
            "schema": REPORT_SCHEMA,
            "version": REPORT_VERSION,
            "config": cfg.to_dict(),
            "graph": g.to_dict(),
            "point": tp.to_dict(),
        }
    )
    HANDLERS[cfg.command](g, cfg, tp, report)
    report.data["exit_code"] = report.exit_code
    return report


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="landaukit", description="Landau singularity checks for photon-dressed triangle graphs.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("graph", help="graph file, or the name of a bundled fixture")
    ap.add_argument("--sector", default="all", help="'all' or a permutation such as 2,1")
    ap.add_argument(
        "--stratum",
        action="append",
        help="'all', 'interior', or comma-separated positions with r = 0 (repeatable)",
    )
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--delta", type=Fraction)
    ap.add_argument("--delta-prime", type=Fraction)
    ap.add_argument("--tolerance", type=Fraction, help="activity threshold for |f_j|")
    ap.add_argument("--format", choices=("text", "machine", "dot"), default=None)
    ap.add_argument("--output", "-o", help="write the report here instead of stdout")
    ap.add_argument("--star", help="restrict to one star selection, e.g. 0,1,0")
    ap.add_argument("--kform", action="store_true", help="matrix: momentum-form columns dk_i")
    ap.add_argument("--params", help="diagram: JSON file with k, photon, residue, star")
    ap.add_argument("--jobs", type=int, default=1)
    return ap


def config_from_args(ns: argparse.Namespace) -> AnalysisConfig:
    fmt = ns.format or ("dot" if ns.command == "diagram" else "text")
    star = _positions(ns.star) if ns.star else None
    if star is not None and len(star) != 3:
        raise ValueError("--star needs three indices")
    if ns.samples < 1:
        raise ValueError("--samples must be positive")
    return AnalysisConfig(
        input=ns.graph,
        command=ns.command,
        sector=parse_sector(ns.sector),
        stratum=parse_strata(ns.stratum),
        samples=ns.samples,
        seed=ns.seed,
        delta=ns.delta,
        delta_prime=ns.delta_prime,
        tolerance=ns.tolerance,
        format=fmt,
        star=star,
        kform=ns.kform,
        params=ns.params,
        jobs=ns.jobs,
    )


def main(argv: Sequence[str] | None = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        report = run_pipeline(cfg)
        text = report.render(cfg.format)
    except INPUT_ERRORS as exc:
        print(f"landaukit: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CertificateError, CertificationFailure) as exc:
        print(f"landaukit: internal certificate failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except LandauKitError as exc:
        print(f"landaukit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if ns.output:
        Path(ns.output).write_text(text)
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
