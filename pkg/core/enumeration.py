"""
Census of special polyhedra with n vertices.

Singular graphs are enumerated as pairings of the 4n legs and reduced up to
multigraph isomorphism. For every graph all 6^(2n) wing gluings are visited.
The symmetry group is vertex renumbering x independent S4 on the legs of every
vertex; edge reversal and edge reordering are absorbed by the normalized
serialization. Choosing a root vertex and its leg order forces the labels of
every other vertex, so the canonical key is the least of 24n serializations
instead of the minimum over the whole orbit.

The gluing space is cut into chunks that can run in a process pool; the only
synchronization is the key-sorted merge, so every job count yields the same
catalog.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from core import config
from core.errors import EnumerationLimitError, InvariantViolation, PreconditionError
from core.homology import HomologyProfile, homology_profile
from core.polyhedron import (
    PolyhedronModel,
    SingularGraph,
    VertexPiece,
    euler_characteristic,
    special_model,
    trace_circuits,
    wing_labels,
)
from utils.logger import get_logger

log = get_logger(__name__)

CanonicalKey = bytes
_S3 = tuple(itertools.permutations(range(3)))
_S4 = tuple(itertools.permutations(range(4)))


# ─── SINGULAR GRAPHS ─────────────────────────────────────────────────────────

def _pairings(items: Sequence) -> Iterator[Tuple]:
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for i, other in enumerate(rest):
        for tail in _pairings(rest[:i] + rest[i + 1:]):
            yield ((first, other),) + tail


def enumerate_singular_graphs(n: int) -> List[SingularGraph]:
    """Connected 4-regular multigraphs on n vertices (loops allowed), one per isomorphism class."""
    if n < 1:
        raise PreconditionError(
            "enumerate requires n >= 1; the only vertexless special polyhedron is D2"
        )
    legs = [(v, p) for v in range(n) for p in range(4)]
    buckets: Dict[Tuple, List[Tuple[SingularGraph, nx.MultiGraph]]] = {}
    found: List[SingularGraph] = []
    for pairing in _pairings(legs):
        graph = SingularGraph(n, pairing)
        if not graph.is_connected():
            continue
        mg = graph.to_networkx()
        loops_at = [0] * n
        for e in graph.loops():
            loops_at[graph.edges[e][0][0]] += 1
        signature = tuple(sorted(loops_at))
        bucket = buckets.setdefault(signature, [])
        if any(nx.is_isomorphic(mg, other) for _, other in bucket):
            continue
        bucket.append((graph, mg))
        found.append(graph)
    log.info("[CENSUS] n=%d: %d singular graphs", n, len(found))
    return found


# ─── CANONICAL FORM ──────────────────────────────────────────────────────────

def serialize(piece: VertexPiece, vperm: Sequence[int], lperms: Sequence[Sequence[int]]) -> bytes:
    """Image of the piece under a relabeling, with every edge stored low end first, edges sorted."""
    rows = []
    for e, (a, b) in enumerate(piece.graph.edges):
        sa, sb = lperms[a[0]], lperms[b[0]]
        na, nb = (vperm[a[0]], sa[a[1]]), (vperm[b[0]], sb[b[1]])
        image = {sa[q]: sb[piece.forward(e, q)] for q in wing_labels(a[1])}
        if nb < na:
            na, nb = nb, na
            image = {v: k for k, v in image.items()}
        rows.append((na[0], na[1], nb[0], nb[1]) + tuple(image[q] for q in wing_labels(na[1])))
    rows.sort()
    return bytes([piece.vertex_count] + [x for row in rows for x in row])


def propagate_labels(piece: VertexPiece, root: int, root_legs: Sequence[int]) -> Tuple[List[int], List[Tuple[int, ...]]]:
    """
    Vertex numbering and leg permutations forced by one root labelling.
    Vertices are numbered in discovery order, scanning the new legs 0..3 of
    each numbered vertex; a vertex first reached across an edge takes the
    labels that turn that edge's gluing into the identity.
    """
    graph = piece.graph
    new_id = [-1] * graph.vertex_count
    legs: List[Optional[List[int]]] = [None] * graph.vertex_count
    new_id[root], legs[root] = 0, list(root_legs)
    order = [root]
    for v in order:
        old_leg = {new: old for old, new in enumerate(legs[v])}
        for leg in range(4):
            p = old_leg[leg]
            e, end = graph.leg_table[(v, p)]
            w, pw = graph.edges[e][1 - end]
            if new_id[w] >= 0:
                continue
            image = [0] * 4
            image[pw] = leg
            for q in wing_labels(p):
                x = piece.forward(e, q) if end == 0 else piece.backward(e, q)
                image[x] = legs[v][q]
            new_id[w], legs[w] = len(order), image
            order.append(w)
    return new_id, [tuple(l) for l in legs]


def canonical_form(piece: VertexPiece) -> CanonicalKey:
    """Least serialization over the 24n root choices; equal exactly on symmetry orbits."""
    return min(
        serialize(piece, *propagate_labels(piece, root, root_legs))
        for root in range(piece.vertex_count)
        for root_legs in _S4
    )


def decode_key(key: CanonicalKey) -> VertexPiece:
    n, body = key[0], key[1:]
    if len(body) != 2 * n * 7:
        raise PreconditionError(f"key length {len(key)} does not fit {n} vertices")
    rows = [tuple(body[i:i + 7]) for i in range(0, len(body), 7)]
    edges = tuple(((r[0], r[1]), (r[2], r[3])) for r in rows)
    return VertexPiece(SingularGraph(n, edges), tuple(r[4:] for r in rows))


def _gluing(graph: SingularGraph, choice: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
    out = []
    for e, (_, b) in enumerate(graph.edges):
        targets = wing_labels(b[1])
        out.append(tuple(targets[i] for i in _S3[choice[e]]))
    return tuple(out)


def _census_chunk(graph: SingularGraph, start: int, stop: int, cap: int) -> FrozenSet[bytes]:
    """Canonical keys of every gluing index in [start, stop) of one graph."""
    keys = set()
    choices = itertools.islice(itertools.product(range(6), repeat=graph.edge_count), start, stop)
    for choice in choices:
        keys.add(canonical_form(VertexPiece(graph, _gluing(graph, choice))))
        if len(keys) > cap:
            raise EnumerationLimitError(cap)
    return frozenset(keys)


# ─── CATALOG ─────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class CatalogRecord:
    key: CanonicalKey
    piece: VertexPiece
    region_count: int
    profile: HomologyProfile
    canceling: Optional[bool] = None

    @property
    def vertex_count(self) -> int:
        return self.piece.vertex_count

    @property
    def acyclic(self) -> bool:
        return self.profile.acyclic

    @property
    def euler_characteristic(self) -> int:
        return self.region_count - self.vertex_count

    @property
    def key_hex(self) -> str:
        return self.key.hex()

    def model(self) -> PolyhedronModel:
        return special_model(self.piece)


def make_record(key: CanonicalKey, canceling: Optional[bool] = None) -> CatalogRecord:
    piece = decode_key(key)
    model = special_model(piece)
    r = len(trace_circuits(piece))
    if euler_characteristic(model) != r - piece.vertex_count:
        raise InvariantViolation(f"record {key.hex()}: chi != r - n")
    return CatalogRecord(key, piece, r, homology_profile(model), canceling)


@dataclass(frozen=True)
class Catalog:
    vertex_count: int
    records: Tuple[CatalogRecord, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        order = [(r.region_count, r.key) for r in self.records]
        if any(x >= y for x, y in zip(order, order[1:])):
            raise InvariantViolation("catalog records not strictly sorted by (regions, key)")
        if len({r.key for r in self.records}) != len(self.records):
            raise InvariantViolation("duplicate canonical key in catalog")

    def __len__(self) -> int:
        return len(self.records)

    @property
    def histogram(self) -> Dict[int, int]:
        hist: Dict[int, int] = {}
        for rec in self.records:
            hist[rec.region_count] = hist.get(rec.region_count, 0) + 1
        return dict(sorted(hist.items()))

    def histogram_row(self) -> List[int]:
        hist = self.histogram
        top = max(hist, default=0)
        return [hist.get(r, 0) for r in range(1, top + 1)]

    def labels(self) -> List[str]:
        out, counter = [], {}
        for rec in self.records:
            counter[rec.region_count] = counter.get(rec.region_count, 0) + 1
            out.append(f"n{self.vertex_count}r{rec.region_count}.{counter[rec.region_count]}")
        return out


def enumerate_special(n: int, jobs: Optional[int] = None, cap: Optional[int] = None) -> Catalog:
    """All closed special polyhedra with n vertices, one record per homeomorphism class."""
    if n < 1:
        raise PreconditionError("enumerate requires n >= 1")
    jobs = jobs or config.DEFAULT_JOBS
    cap = cap or config.ORBIT_CAP
    if n > config.MAX_CENSUS_VERTICES:
        raise EnumerationLimitError(config.MAX_CENSUS_VERTICES, "vertex count")

    graphs = enumerate_singular_graphs(n)
    space = sum(6 ** g.edge_count for g in graphs)
    if space > config.MAX_GLUINGS:
        raise EnumerationLimitError(config.MAX_GLUINGS, "gluing space")
    log.info("[CENSUS] n=%d: %d gluings over %d graphs, jobs=%d", n, space, len(graphs), jobs)

    tasks = []
    for graph in graphs:
        total = 6 ** graph.edge_count
        size = total if jobs <= 1 else config.CHUNK_SIZE
        tasks += [(graph, start, min(start + size, total), cap) for start in range(0, total, size)]

    if jobs <= 1:
        parts = [_census_chunk(*task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_census_chunk, *task) for task in tasks]
            parts = [f.result() for f in futures]

    keys = frozenset().union(*parts)
    if len(keys) > cap:
        raise EnumerationLimitError(cap)
    records = sorted((make_record(k) for k in keys), key=lambda rec: (rec.region_count, rec.key))
    catalog = Catalog(n, tuple(records))
    log.info("[CENSUS] n=%d: %d classes, histogram %s", n, len(catalog), catalog.histogram)
    return catalog


@dataclass(frozen=True)
class ClassificationReport:
    vertex_count: int
    total: int
    acyclic_count: int
    homology_circle_count: int
    acyclic_indices: Tuple[int, ...]
    histogram: Dict[int, int]
    acyclic_by_regions: Dict[int, int]


def classify_catalog(catalog: Catalog) -> ClassificationReport:
    acyclic = []
    circles = 0
    by_regions: Dict[int, int] = {}
    for i, rec in enumerate(catalog.records):
        if rec.acyclic:
            if rec.region_count != rec.vertex_count + 1:
                raise InvariantViolation(
                    f"acyclic record {rec.key_hex} has {rec.region_count} regions, "
                    f"expected {rec.vertex_count + 1}"
                )
            acyclic.append(i)
            by_regions[rec.region_count] = by_regions.get(rec.region_count, 0) + 1
        elif rec.profile.homology_circle:
            circles += 1
    return ClassificationReport(
        vertex_count=catalog.vertex_count,
        total=len(catalog),
        acyclic_count=len(acyclic),
        homology_circle_count=circles,
        acyclic_indices=tuple(acyclic),
        histogram=catalog.histogram,
        acyclic_by_regions=by_regions,
    )
