"""
Command-line entry point.

    python cli.py enumerate --vertices 1 --out n1.catalog
    python cli.py classify --catalog n1.catalog [--records]
    python cli.py classify --db census.db
    python cli.py homology --model x.model
    python cli.py cancel --catalog n1.catalog [--index I] [--out flagged.catalog]
    python cli.py kirby --catalog n1.catalog --index I --gleams 1,-1/2,0 [--tree 0,2] [--out k.txt]
    python cli.py certify --model x.model
    python cli.py encode --graph g.encoding [--out x.model]

Reports go to stdout, logs to stderr. Exit 0 on success, 1 when a check
fails, 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from core import config
from core.cancellation import (
    BallCertificate,
    admits_canceling_pairs,
    certify_ball,
    find_canceling_sequence,
    flag_catalog,
    maximal_trees,
)
from core.decomposition import regions_planarity_check
from core.encoding import acyclic_encoding_check, reconstruct_from_encoding, retraction_check
from core.enumeration import Catalog, classify_catalog, enumerate_special
from core.errors import (
    FormatError,
    InvariantViolation,
    PreconditionError,
    ShadowError,
    StructuralError,
)
from core.homology import homology_profile
from core.kirby import ShadowedPolyhedron, parse_gleam, shadow_to_kirby, simplify_kirby
from core.polyhedron import euler_characteristic
from data import database
from data.formats import (
    read_catalog,
    read_encoding,
    read_model,
    render_catalog,
    render_model,
    write_catalog,
    write_kirby,
    write_model,
)
from data.reports import cancellation_frame, catalog_frame, histogram_frame, to_text
from utils.logger import get_logger, set_level

log = get_logger(__name__)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2


def _out(text: str) -> None:
    sys.stdout.write(text)


def _fail(reason: str) -> None:
    sys.stderr.write(reason + "\n")


def _load_catalog(args) -> Catalog:
    if getattr(args, "catalog", None):
        return read_catalog(args.catalog)
    if getattr(args, "db", None) and getattr(args, "vertices", None):
        return database.load_catalog(args.vertices, args.db)
    raise PreconditionError("give --catalog FILE, or --db FILE with --vertices N")


def _record_index(catalog: Catalog, index: int) -> int:
    if not 0 <= index < len(catalog):
        raise PreconditionError(f"index {index} outside 0..{len(catalog) - 1}")
    return index


# ─── COMMANDS ────────────────────────────────────────────────────────────────

def cmd_enumerate(args) -> int:
    catalog = enumerate_special(args.vertices, jobs=args.jobs)
    if args.db:
        database.save_catalog(catalog, args.db)
    if args.out:
        write_catalog(catalog, args.out)
        _out(f"records: {len(catalog)}\n")
        _out(to_text(histogram_frame(catalog)))
    else:
        _out(render_catalog(catalog))
    return EXIT_OK


def cmd_classify(args) -> int:
    if args.db and args.vertices is None and not args.catalog:
        return _list_stored(args.db)
    catalog = _load_catalog(args)
    report = classify_catalog(catalog)
    labels = catalog.labels()
    _out(f"vertices: {report.vertex_count}\n")
    _out(f"records: {report.total}\n")
    _out(f"acyclic: {report.acyclic_count}\n")
    _out(f"homology-circle: {report.homology_circle_count}\n")
    _out(to_text(histogram_frame(catalog, report)))
    for i in report.acyclic_indices:
        _out(f"acyclic {labels[i]} {catalog.records[i].key_hex}\n")
    if args.records:
        _out(to_text(catalog_frame(catalog)))
    return EXIT_OK


def _list_stored(path: str) -> int:
    for row in database.list_catalogs(path):
        histogram = row["histogram"] or "-"
        _out(f"stored vertices={row['vertices']} records={row['record_count']} histogram={histogram}\n")
    _out(f"stored records: {database.record_count(path)}\n")
    return EXIT_OK


def cmd_homology(args) -> int:
    model, _ = read_model(args.model)
    profile = homology_profile(model)
    planarity = regions_planarity_check(model, profile)
    _out(f"{profile.render()}\n")
    _out(f"acyclic: {int(profile.acyclic)}\n")
    _out(f"euler: {euler_characteristic(model)}\n")
    _out(f"components: {model.component_count()}\n")
    _out(f"closed: {int(model.is_closed())}\n")
    _out(f"nonplanar-regions: {','.join(map(str, planarity.nonplanar_regions)) or '-'}\n")
    return EXIT_OK


def cmd_cancel(args) -> int:
    catalog = _load_catalog(args)
    indices = [_record_index(catalog, args.index)] if args.index is not None else range(len(catalog))
    results = [admits_canceling_pairs(catalog.records[i].model()) for i in indices]
    shown = Catalog(catalog.vertex_count, tuple(catalog.records[i] for i in indices))
    _out(to_text(cancellation_frame(shown, results)))
    if args.out:
        write_catalog(flag_catalog(catalog, dict(zip(indices, results))), args.out)
    return EXIT_OK


def cmd_kirby(args) -> int:
    catalog = _load_catalog(args)
    rec = catalog.records[_record_index(catalog, args.index)]
    model = rec.model()
    gleams = tuple(parse_gleam(g) for g in args.gleams.split(","))
    shadow = ShadowedPolyhedron(model, gleams)

    trees = list(maximal_trees(rec.piece.graph))
    if args.tree is not None:
        try:
            tree = tuple(sorted(int(e) for e in args.tree.split(","))) if args.tree else ()
        except ValueError:
            raise PreconditionError(f"bad --tree {args.tree!r}") from None
        if tree not in trees:
            raise PreconditionError(f"{args.tree!r} is not a maximal tree of the singular graph")
    else:
        result = admits_canceling_pairs(model)
        tree = result.tree if result.admits else trees[0]

    emitted = shadow_to_kirby(shadow, tree)
    _out(f"tree: {','.join(map(str, tree)) or '-'}\n")
    _out("emitted:\n")
    _out(emitted.render())

    witness = find_canceling_sequence(model, tree, rec.vertex_count)
    final = emitted
    if witness is not None:
        final = simplify_kirby(emitted, witness)
        _out("simplified:\n")
        _out(final.render())
        _out(f"terminal: {int(final.is_terminal)}\n")
    if args.out:
        write_kirby(final, args.out)
    if witness is None:
        _fail(f"no {rec.vertex_count} canceling pairs for tree {tree}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_certify(args) -> int:
    model, _ = read_model(args.model)
    outcome = certify_ball(model)
    if not isinstance(outcome, BallCertificate):
        _out("certified: 0\n")
        for reason in outcome.reasons:
            _fail(reason)
        return EXIT_CHECK_FAILED
    _out("certified: 1\n")
    _out(f"{outcome.profile.render()}\n")
    for piece, tree, seq in outcome.witnesses:
        pairs = " ".join(f"(e{p.edge},R{p.region})" for p in seq.pairs)
        _out(f"witness piece={piece} tree={','.join(map(str, tree)) or '-'} pairs={pairs or '-'}\n")
    for piece in outcome.non_qualifying:
        _out(f"non-qualifying piece={piece}\n")
    for item in outcome.verified:
        _out(f"verified {item}\n")
    for item in outcome.hypotheses:
        _out(f"hypothesis {item}\n")
    return EXIT_OK


def cmd_encode(args) -> int:
    g = read_encoding(args.graph)
    model = reconstruct_from_encoding(g)
    profile = homology_profile(model)
    if args.out:
        write_model(model, args.out)
    else:
        _out(render_model(model))
    _out(f"{profile.render()}\n")
    _out(f"retraction: {int(retraction_check(g, model))}\n")
    if sum(1 for v in range(g.vertex_count) if g.base(v) == "B") == 1:
        _out(acyclic_encoding_check(g).render())
    else:
        _out("acyclic-check: skipped (needs exactly one B-vertex)\n")
    return EXIT_OK


# ─── PARSER ──────────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cli.py", description="Special polyhedra census and shadow tools")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="census of closed special polyhedra")
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=config.DEFAULT_JOBS)
    p.add_argument("--db", help="also store the catalog in this SQLite file")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("classify", help="acyclic / homology-circle classification")
    p.add_argument("--catalog")
    p.add_argument("--db")
    p.add_argument("--vertices", type=int, help="without it, --db lists the stored catalogs")
    p.add_argument("--records", action="store_true", help="also print one row per record")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("homology", help="integral homology of a model file")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("cancel", help="canceling pairs for catalog records")
    p.add_argument("--catalog")
    p.add_argument("--db")
    p.add_argument("--vertices", type=int)
    p.add_argument("--index", type=int)
    p.add_argument("--out", help="write the whole catalog with cancel flags filled in")
    p.set_defaults(func=cmd_cancel)

    p = sub.add_parser("kirby", help="Kirby data of a shadowed catalog record")
    p.add_argument("--catalog")
    p.add_argument("--db")
    p.add_argument("--vertices", type=int)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--gleams", required=True, help="comma-separated half-integers, one per region")
    p.add_argument("--tree", help="comma-separated edge ids of a maximal tree")
    p.add_argument("--out", help="write the final Kirby data to this file")
    p.set_defaults(func=cmd_kirby)

    p = sub.add_parser("certify", help="check a closed model for the ball criterion")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("encode", help="reconstruct and check a vertexless encoding graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", help="write the reconstructed model here instead of stdout")
    p.set_defaults(func=cmd_encode)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        set_level("DEBUG")
    log.debug("[CLI] %s", args.command)

    try:
        return args.func(args)
    except (FormatError, StructuralError, PreconditionError, OSError) as e:
        log.error("[CLI] %s: %s", args.command, e)
        return EXIT_USAGE
    except InvariantViolation as e:
        log.error("[CLI] %s: invariant violated: %s", args.command, e)
        return EXIT_CHECK_FAILED
    except ShadowError as e:
        log.error("[CLI] %s: %s", args.command, e)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
