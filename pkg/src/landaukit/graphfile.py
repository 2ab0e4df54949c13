"""Line-oriented graph description files and their JSON mirror.

    landaukit-graph 1
    name one_photon
    side 1 a          # couplings in arrow order; an empty side is just "side 3"
    side 2 b
    side 3
    photon 1 a b      # index, tail, head
    order 2.0 2.1 1.0 1.1 3.0
    star 0 1 0
    delta 1/100
    delta-prime 1/10

Everything after ``#`` is a comment. A file whose first non-blank character
is ``{`` is read as JSON with the keys of ``DressedGraph.to_dict``.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction
from pathlib import Path

from .errors import ParseError, ValidationError
from .graphs import DressedGraph, Photon, parse_segment, validate_graph

HEADER = "landaukit-graph"
VERSION = 1
FIXTURE_ENV = "LANDAUKIT_FIXTURES"


def _tokens(line: str) -> list[tuple[str, int]]:
    out = []
    col = 0
    for part in line.split(" "):
        if part:
            out.append((part, col + 1))
        col += len(part) + 1
    return out


def _fraction(tok: str, line: int, col: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {tok!r}", line, col) from None


def _int(tok: str, line: int, col: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"not an integer: {tok!r}", line, col) from None


def _segment(tok: str, line: int, col: int) -> str:
    try:
        parse_segment(tok)
    except ValueError:
        raise ParseError(f"not a segment id: {tok!r}", line, col) from None
    return tok


def parse_graph_text(text: str, source: str = "<string>") -> DressedGraph:
    stripped = text.strip()
    if not stripped:
        raise ParseError("empty graph description", 1, 1)
    if stripped.startswith("{"):
        return _parse_json(stripped)

    sides: dict[int, tuple[str, ...]] = {}
    photons: list[Photon] = []
    fields: dict = {"name": Path(source).stem if source != "<string>" else "graph"}
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].replace("\t", " ").rstrip()
        toks = _tokens(line)
        if not toks:
            continue
        head, hcol = toks[0]
        args = toks[1:]
        if not header_seen:
            if head != HEADER:
                raise ParseError(f"expected header '{HEADER} {VERSION}'", lineno, hcol)
            if len(args) != 1 or args[0][0] != str(VERSION):
                col = args[0][1] if args else len(line) + 1
                raise ParseError(f"unsupported format version (want {VERSION})", lineno, col)
            header_seen = True
            continue
        if head == "name":
            if len(args) != 1:
                raise ParseError("name takes one word", lineno, hcol)
            fields["name"] = args[0][0]
        elif head == "side":
            if not args:
                raise ParseError("side needs an index", lineno, len(line) + 1)
            s = _int(args[0][0], lineno, args[0][1])
            if s not in (1, 2, 3):
                raise ParseError("side index must be 1, 2 or 3", lineno, args[0][1])
            if s in sides:
                raise ParseError(f"side {s} declared twice", lineno, hcol)
            sides[s] = tuple(t for t, _ in args[1:])
        elif head == "photon":
            if not args:
                raise ParseError("photon needs an index", lineno, len(line) + 1)
            if len(args) > 3:
                raise ParseError("photon takes index, tail, head", lineno, args[3][1])
            idx = _int(args[0][0], lineno, args[0][1])
            ends = [t for t, _ in args[1:]] + ["", ""]
            photons.append(Photon(idx, ends[0], ends[1]))
        elif head == "order":
            fields["row_order"] = tuple(_segment(t, lineno, c) for t, c in args)
        elif head == "star":
            if len(args) != 3:
                raise ParseError("star takes three segment indices", lineno, hcol)
            fields["star"] = tuple(_int(t, lineno, c) for t, c in args)
        elif head in ("delta", "delta-prime"):
            if len(args) != 1:
                raise ParseError(f"{head} takes one value", lineno, hcol)
            key = "delta" if head == "delta" else "delta_prime"
            fields[key] = _fraction(args[0][0], lineno, args[0][1])
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, hcol)
    if not header_seen:
        raise ParseError("empty graph description", 1, 1)
    missing = {1, 2, 3} - set(sides)
    if missing:
        raise ValidationError(f"sides: missing declaration for side(s) {sorted(missing)}")
    g = DressedGraph(sides, tuple(photons), **fields)
    return validate_graph(g)


def _parse_json(text: str) -> DressedGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if data.get("format", HEADER) != HEADER or int(data.get("version", VERSION)) != VERSION:
        raise ParseError("unsupported JSON graph format", 1, 1)
    try:
        sides = {int(k): tuple(v) for k, v in data["sides"].items()}
        photons = tuple(Photon(int(p[0]), *(list(p[1:]) + ["", ""])[:2]) for p in data.get("photons", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed JSON graph: {exc}", 1, 1) from None
    if set(sides) != {1, 2, 3}:
        raise ValidationError("sides: exactly sides 1, 2, 3 required")
    g = DressedGraph(
        sides,
        photons,
        name=data.get("name", "graph"),
        row_order=tuple(data["row_order"]) if data.get("row_order") else None,
        star=tuple(data["star"]) if data.get("star") else None,
        delta=Fraction(data.get("delta", "1/100")),
        delta_prime=Fraction(data.get("delta_prime", "1/10")),
    )
    return validate_graph(g)


def parse_graph_file(path: str | os.PathLike) -> DressedGraph:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ParseError(f"no such file: {path}", 0, 0) from None
    return parse_graph_text(text, str(path))


def dump_graph(g: DressedGraph) -> str:
    lines = [f"{HEADER} {VERSION}", f"name {g.name}"]
    for s in (1, 2, 3):
        lines.append(" ".join(["side", str(s), *g.sides[s]]))
    for ph in g.photons:
        lines.append(f"photon {ph.index} {ph.tail} {ph.head}")
    if g.row_order:
        lines.append("order " + " ".join(g.row_order))
    if g.star:
        lines.append("star " + " ".join(str(i) for i in g.star))
    lines.append(f"delta {g.delta}")
    lines.append(f"delta-prime {g.delta_prime}")
    return "\n".join(lines) + "\n"


def dump_graph_json(g: DressedGraph) -> str:
    data = {"format": HEADER, "version": VERSION, **g.to_dict()}
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def fixture_dir() -> Path:
    env = os.environ.get(FIXTURE_ENV)
    return Path(env) if env else Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    """Resolve a bare fixture name (``one_photon``) or a path to an existing file."""
    p = Path(name)
    if p.exists():
        return p
    base = fixture_dir()
    for cand in (base / name, base / f"{name}.graph", base / f"{name}.json"):
        if cand.exists():
            return cand
    raise ParseError(f"no such graph file or fixture: {name}", 0, 0)


def load_fixture(name: str) -> DressedGraph:
    return parse_graph_file(fixture_path(name))


def list_fixtures() -> list[str]:
    return sorted(p.stem for p in fixture_dir().glob("*.graph"))
