"""
Line-oriented text formats: catalogs, polyhedron models, encoding graphs and
Kirby data. Every render_* output parses back to an equal object and renders
to the same bytes; Kirby data is written only. Parse errors carry 1-based
line numbers.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from core import config
from core.encoding import EncodingEdge, EncodingGraph
from core.enumeration import Catalog, CatalogRecord, decode_key
from core.errors import FormatError, ShadowError
from core.homology import HomologyProfile
from core.kirby import KirbyData
from core.polyhedron import (
    FREE,
    CirclePiece,
    CircuitRef,
    PolyhedronModel,
    SingularGraph,
    Slot,
    SurfaceRegion,
    VertexPiece,
)
from utils.logger import get_logger

log = get_logger(__name__)


# ─── HELPERS ─────────────────────────────────────────────────────────────────

def _lines(text: str) -> Iterator[Tuple[int, List[str]]]:
    """(line number, tokens), skipping blank lines and # comments."""
    for no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped and not stripped.startswith("#"):
            yield no, stripped.split()


def _fields(tokens: Sequence[str], line: int) -> Dict[str, str]:
    out = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep:
            raise FormatError(f"expected key=value, got {tok!r}", line)
        out[key] = value
    return out


def _require(fields: Dict[str, str], keys: Sequence[str], line: int) -> None:
    missing = [k for k in keys if k not in fields]
    if missing:
        raise FormatError(f"missing field(s) {', '.join(missing)}", line)


def _int(value: str, line: int, what: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise FormatError(f"{what}: {value!r} is not an integer", line) from None


def _version(tokens: List[str], line: int, header: str, expected: int) -> None:
    if len(tokens) != 2 or tokens[0] != header:
        raise FormatError(f"expected '{header} <n>' header", line)
    found = _int(tokens[1], line, header)
    if found != expected:
        raise FormatError(f"unsupported {header} {found} (this build reads {expected})", line)


def render_edges(graph: SingularGraph) -> str:
    return ",".join(f"{a[0]}.{a[1]}-{b[0]}.{b[1]}" for a, b in graph.edges)


def render_gluings(piece: VertexPiece) -> str:
    return ",".join("".join(map(str, g)) for g in piece.gluings)


def _parse_piece(edges: str, gluings: str, line: int) -> VertexPiece:
    legs = []
    try:
        for item in edges.split(","):
            a, b = item.split("-")
            legs.append(tuple(tuple(int(x) for x in end.split(".")) for end in (a, b)))
        glue = [tuple(int(ch) for ch in g) for g in gluings.split(",")]
    except ValueError:
        raise FormatError(f"bad edges/gluings {edges!r} {gluings!r}", line) from None
    if any(len(end) != 2 for pair in legs for end in pair):
        raise FormatError(f"bad leg in {edges!r}", line)
    vertex_count = 1 + max(end[0] for pair in legs for end in pair)
    try:
        return VertexPiece(SingularGraph(vertex_count, tuple(legs)), tuple(glue))
    except ShadowError as e:
        raise FormatError(str(e), line) from e


def _csv_ints(value: str) -> Tuple[int, ...]:
    return () if value == "-" else tuple(int(x) for x in value.split(","))


def _render_csv(values: Sequence[int]) -> str:
    return ",".join(map(str, values)) or "-"


# ─── CATALOG ─────────────────────────────────────────────────────────────────

def render_record(rec: CatalogRecord) -> str:
    p = rec.profile
    cancel = "-" if rec.canceling is None else str(int(rec.canceling))
    return (
        f"{rec.key_hex} edges={render_edges(rec.piece.graph)} gluings={render_gluings(rec.piece)} "
        f"regions={rec.region_count} betti={_render_csv(p.betti)} "
        f"t1={_render_csv(p.torsion_1)} t2={_render_csv(p.torsion_2)} "
        f"acyclic={int(p.acyclic)} cancel={cancel}"
    )


def render_catalog(catalog: Catalog) -> str:
    lines = [
        f"catalog-version {config.CATALOG_FORMAT_VERSION}",
        f"vertices {catalog.vertex_count}",
        " ".join(["histogram"] + [str(c) for c in catalog.histogram_row()]),
        f"records {len(catalog)}",
    ]
    lines += [render_record(rec) for rec in catalog.records]
    return "\n".join(lines) + "\n"


def _parse_record(tokens: List[str], line: int, n: int) -> CatalogRecord:
    try:
        key = bytes.fromhex(tokens[0])
    except ValueError:
        raise FormatError(f"bad key {tokens[0]!r}", line) from None
    fields = _fields(tokens[1:], line)
    _require(fields, ("edges", "gluings", "regions", "betti", "t1", "t2", "acyclic", "cancel"), line)

    stored = _parse_piece(fields["edges"], fields["gluings"], line)
    try:
        piece = decode_key(key)
    except ShadowError as e:
        raise FormatError(f"key does not decode: {e}", line) from e
    if piece != stored or piece.vertex_count != n:
        raise FormatError("edges/gluings disagree with the canonical key", line)

    try:
        betti = _csv_ints(fields["betti"])
        profile = HomologyProfile(betti, _csv_ints(fields["t1"]), _csv_ints(fields["t2"]))
    except ValueError:
        raise FormatError("bad homology fields", line) from None
    if len(betti) != 3:
        raise FormatError("betti needs three numbers", line)
    if fields["acyclic"] != str(int(profile.acyclic)):
        raise FormatError("acyclic flag disagrees with betti/torsion", line)
    cancel = {"-": None, "0": False, "1": True}.get(fields["cancel"], "bad")
    if cancel == "bad":
        raise FormatError(f"bad cancel flag {fields['cancel']!r}", line)
    return CatalogRecord(key, piece, _int(fields["regions"], line, "regions"), profile, cancel)


def parse_catalog(text: str) -> Catalog:
    rows = list(_lines(text))
    last = max(len(text.splitlines()), 1)
    if len(rows) < 4:
        raise FormatError("catalog header incomplete", last)
    _version(rows[0][1], rows[0][0], "catalog-version", config.CATALOG_FORMAT_VERSION)

    (ln, tok) = rows[1]
    if len(tok) != 2 or tok[0] != "vertices":
        raise FormatError("expected 'vertices <n>'", ln)
    n = _int(tok[1], ln, "vertices")
    hist_line, hist_tok = rows[2]
    if hist_tok[0] != "histogram":
        raise FormatError("expected 'histogram ...'", hist_line)
    histogram = [_int(x, hist_line, "histogram") for x in hist_tok[1:]]
    (ln, tok) = rows[3]
    if len(tok) != 2 or tok[0] != "records":
        raise FormatError("expected 'records <N>'", ln)
    expected = _int(tok[1], ln, "records")

    records = [_parse_record(tok, ln, n) for ln, tok in rows[4:]]
    if len(records) < expected:
        raise FormatError(f"truncated: {len(records)} of {expected} records", last)
    if len(records) > expected:
        raise FormatError(f"more than {expected} records", rows[4 + expected][0])
    try:
        catalog = Catalog(n, tuple(records))
    except ShadowError as e:
        raise FormatError(str(e)) from e
    if catalog.histogram_row() != histogram:
        raise FormatError("histogram line disagrees with the records", hist_line)
    return catalog


def write_catalog(catalog: Catalog, path) -> None:
    Path(path).write_text(render_catalog(catalog), encoding="utf-8")
    log.info("[CLI] wrote %d records to %s", len(catalog), path)


def read_catalog(path) -> Catalog:
    return parse_catalog(Path(path).read_text(encoding="utf-8"))


# ─── MODEL ───────────────────────────────────────────────────────────────────

_SLOT = re.compile(r"^([VC])(\d+)\.(\d+)([+-]?)$")


def _render_slot(slot: Slot) -> str:
    if slot.is_free:
        return "free"
    ref = slot.ref
    return f"{ref.kind}{ref.piece}.{ref.circuit}{'+' if slot.sign > 0 else '-'}"


def _parse_slot(text: str, line: int) -> Slot:
    if text == "free":
        return FREE
    m = _SLOT.match(text)
    if not m:
        raise FormatError(f"bad slot {text!r}", line)
    kind, piece, circuit, sign = m.groups()
    return Slot(CircuitRef(kind, int(piece), int(circuit)), -1 if sign == "-" else 1)


def render_model(model: PolyhedronModel, gleams: Optional[Sequence[int]] = None) -> str:
    lines = [f"model-version {config.MODEL_FORMAT_VERSION}"]
    for i, piece in enumerate(model.vertex_pieces):
        lines.append(f"piece {i} edges={render_edges(piece.graph)} gluings={render_gluings(piece)}")
    for j, circle in enumerate(model.circle_pieces):
        lines.append(f"circle {j} monodromy={circle.monodromy}")
    for r, region in enumerate(model.regions):
        slots = ",".join(_render_slot(s) for s in region.slots) or "-"
        lines.append(f"region {r} genus={region.genus} orientable={int(region.orientable)} slots={slots}")
    for r, g in enumerate(gleams or ()):
        lines.append(f"gleam {r} {g}")
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> Tuple[PolyhedronModel, Optional[Tuple[int, ...]]]:
    """Model plus doubled gleams (None when the file has no gleam lines)."""
    rows = list(_lines(text))
    if not rows:
        raise FormatError("empty model file", 1)
    _version(rows[0][1], rows[0][0], "model-version", config.MODEL_FORMAT_VERSION)

    pieces: List[VertexPiece] = []
    circles: List[CirclePiece] = []
    regions: List[SurfaceRegion] = []
    gleams: Dict[int, int] = {}
    counters = {"piece": pieces, "circle": circles, "region": regions}

    for ln, tok in rows[1:]:
        head = tok[0]
        if head == "gleam":
            if len(tok) != 3:
                raise FormatError("expected 'gleam <region> <doubled>'", ln)
            gleams[_int(tok[1], ln, "gleam region")] = _int(tok[2], ln, "gleam")
            continue
        if head not in counters or len(tok) < 2:
            raise FormatError(f"unknown line {head!r}", ln)
        index = _int(tok[1], ln, head)
        if index != len(counters[head]):
            raise FormatError(f"{head} {index} out of order (expected {len(counters[head])})", ln)
        fields = _fields(tok[2:], ln)
        try:
            if head == "piece":
                _require(fields, ("edges", "gluings"), ln)
                pieces.append(_parse_piece(fields["edges"], fields["gluings"], ln))
            elif head == "circle":
                _require(fields, ("monodromy",), ln)
                circles.append(CirclePiece(fields["monodromy"]))
            else:
                _require(fields, ("genus", "orientable", "slots"), ln)
                slots = () if fields["slots"] == "-" else tuple(
                    _parse_slot(s, ln) for s in fields["slots"].split(",")
                )
                if fields["orientable"] not in ("0", "1"):
                    raise FormatError("orientable must be 0 or 1", ln)
                regions.append(SurfaceRegion(
                    _int(fields["genus"], ln, "genus"), fields["orientable"] == "1", slots
                ))
        except FormatError:
            raise
        except ShadowError as e:
            raise FormatError(str(e), ln) from e

    try:
        model = PolyhedronModel(tuple(pieces), tuple(circles), tuple(regions))
    except ShadowError as e:
        raise FormatError(str(e)) from e
    if not gleams:
        return model, None
    if sorted(gleams) != list(range(len(regions))):
        raise FormatError(f"gleams given for regions {sorted(gleams)}, model has {len(regions)}")
    return model, tuple(gleams[r] for r in range(len(regions)))


def write_model(model: PolyhedronModel, path, gleams: Optional[Sequence[int]] = None) -> None:
    Path(path).write_text(render_model(model, gleams), encoding="utf-8")


def read_model(path) -> Tuple[PolyhedronModel, Optional[Tuple[int, ...]]]:
    return parse_model(Path(path).read_text(encoding="utf-8"))


# ─── ENCODING GRAPH ──────────────────────────────────────────────────────────

def render_encoding(g: EncodingGraph) -> str:
    lines = [f"encoding-version {config.ENCODING_FORMAT_VERSION}"]
    lines += [f"vertex {v} kind={kind}" for v, kind in enumerate(g.kinds)]
    for edge in g.edges:
        marks = [m for m in (edge.mark_a, edge.mark_b) if m is not None]
        suffix = f" mark={','.join(marks)}" if marks else ""
        lines.append(f"edge {edge.a} {edge.b}{suffix}")
    lines += [f"cycle {i} {' '.join(map(str, c))}" for i, c in enumerate(g.cycles)]
    lines += [f"beta {i} {v}" for i, v in g.beta]
    return "\n".join(lines) + "\n"


def parse_encoding(text: str) -> EncodingGraph:
    """The `encoding-version` header is optional; when present it must match."""
    rows = list(_lines(text))
    if rows and rows[0][1][0] == "encoding-version":
        _version(rows[0][1], rows[0][0], "encoding-version", config.ENCODING_FORMAT_VERSION)
        rows = rows[1:]

    kinds: List[str] = []
    edges: List[EncodingEdge] = []
    cycles: List[Tuple[int, ...]] = []
    beta: List[Tuple[int, int]] = []
    for ln, tok in rows:
        head = tok[0]
        if head == "vertex":
            if len(tok) != 3 or edges:
                raise FormatError("expected 'vertex <id> kind=<kind>' before any edge", ln)
            if _int(tok[1], ln, "vertex") != len(kinds):
                raise FormatError(f"vertex ids must run 0,1,2,... (expected {len(kinds)})", ln)
            fields = _fields(tok[2:], ln)
            _require(fields, ("kind",), ln)
            kinds.append(fields["kind"])
        elif head == "edge":
            if len(tok) not in (3, 4):
                raise FormatError("expected 'edge <a> <b> [mark=...]'", ln)
            a, b = _int(tok[1], ln, "edge"), _int(tok[2], ln, "edge")
            if not (0 <= a < len(kinds) and 0 <= b < len(kinds)):
                raise FormatError(f"edge {a} {b}: unknown vertex", ln)
            marks = _fields(tok[3:], ln).get("mark", "")
            edges.append(_marked_edge(kinds, a, b, marks.split(",") if marks else [], ln))
        elif head == "cycle":
            if len(tok) < 3 or _int(tok[1], ln, "cycle") != len(cycles):
                raise FormatError("expected 'cycle <index> <edge ids...>' in index order", ln)
            cycles.append(tuple(_int(x, ln, "cycle edge") for x in tok[2:]))
        elif head == "beta":
            if len(tok) != 3:
                raise FormatError("expected 'beta <index> <0|1>'", ln)
            beta.append((_int(tok[1], ln, "beta"), _int(tok[2], ln, "beta")))
        else:
            raise FormatError(f"unknown line {head!r}", ln)
    if not kinds:
        raise FormatError("encoding has no vertices", 1)
    return EncodingGraph(tuple(kinds), tuple(edges), tuple(beta), tuple(cycles))


def _marked_edge(kinds: List[str], a: int, b: int, marks: List[str], line: int) -> EncodingEdge:
    y12 = [kinds[v].partition(":")[0] == "Y12" for v in (a, b)]
    if len(marks) != sum(y12):
        raise FormatError(f"edge {a} {b}: expected {sum(y12)} mark(s), got {len(marks)}", line)
    queue = list(marks)
    mark_a = queue.pop(0) if y12[0] else None
    mark_b = queue.pop(0) if y12[1] else None
    return EncodingEdge(a, b, mark_a, mark_b)


def read_encoding(path) -> EncodingGraph:
    return parse_encoding(Path(path).read_text(encoding="utf-8"))


# ─── KIRBY DATA ──────────────────────────────────────────────────────────────

def write_kirby(k: KirbyData, path) -> None:
    Path(path).write_text(k.render(), encoding="utf-8")
