"""
Canceling pairs, the cancellation condition and the bipartite tree used to
certify that an acyclic closed shadow with the condition bounds a 4-ball.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple, Union

import networkx as nx

from core.decomposition import far_side
from core.enumeration import Catalog
from core.errors import InternalConsistencyError, InvariantViolation, PreconditionError
from core.homology import HomologyProfile, homology_profile
from core.polyhedron import CircuitRef, PolyhedronModel, SingularGraph, cap_off, submodel
from utils.logger import get_logger

log = get_logger(__name__)

MaximalTree = Tuple[int, ...]
EXTERNAL_HYPOTHESES = ("boundary of M is S^3 (assumed, not checked)",)


# ─── TREES AND INCIDENCE ─────────────────────────────────────────────────────

def maximal_trees(g: SingularGraph) -> Iterator[MaximalTree]:
    """Every spanning tree once, as sorted edge-id tuples in lexicographic order."""
    if not g.is_connected():
        raise PreconditionError("maximal trees need a connected graph")
    loops = set(g.loops())
    candidates = [e for e in range(g.edge_count) if e not in loops]
    for subset in itertools.combinations(candidates, g.vertex_count - 1):
        t = nx.MultiGraph()
        t.add_nodes_from(range(g.vertex_count))
        t.add_edges_from((g.edges[e][0][0], g.edges[e][1][0]) for e in subset)
        if nx.is_tree(t):
            yield subset


def _require_special(x: PolyhedronModel) -> None:
    if not x.is_special() or not x.is_closed() or not x.vertex_pieces:
        raise PreconditionError("expected a closed special model with at least one vertex")


def incidence(x: PolyhedronModel) -> List[Dict[int, int]]:
    """Unsigned strand traversals per edge, one dict per region."""
    return [x.circuit(region.slots[0].ref).edge_counts() for region in x.regions]


def signed_incidence(x: PolyhedronModel) -> List[Dict[int, int]]:
    return [x.circuit(region.slots[0].ref).signed_counts() for region in x.regions]


# ─── CANCELING SEQUENCES ─────────────────────────────────────────────────────

class CancelingPair(NamedTuple):
    edge: int
    region: int


@dataclass(frozen=True)
class CancelingSequence:
    pairs: Tuple[CancelingPair, ...] = ()

    def __len__(self) -> int:
        return len(self.pairs)

    def verify(self, x: PolyhedronModel, tree: MaximalTree) -> bool:
        inc = incidence(x)
        edges = [p.edge for p in self.pairs]
        regions = [p.region for p in self.pairs]
        if len(set(edges)) != len(edges) or len(set(regions)) != len(regions):
            return False
        if any(e in tree for e in edges):
            return False
        for i, (e, r) in enumerate(self.pairs):
            if inc[r].get(e, 0) != 1:
                return False
            if any(inc[r].get(later, 0) for later in edges[i + 1:]):
                return False
        return True


def find_canceling_sequence(x: PolyhedronModel, t: MaximalTree, k: int) -> Optional[CancelingSequence]:
    """First witness in (edge id, region id) order, or None for this tree."""
    _require_special(x)
    if k > x.region_count or k < 0:
        raise PreconditionError(f"k={k} outside 0..{x.region_count}")
    inc = incidence(x)
    non_tree = [e for e in range(x.vertex_pieces[0].edge_count) if e not in t]

    def search(pairs: List[CancelingPair]) -> Optional[List[CancelingPair]]:
        if len(pairs) == k:
            return pairs
        used_edges = {p.edge for p in pairs}
        used_regions = {p.region for p in pairs}
        for e in non_tree:
            if e in used_edges or any(inc[p.region].get(e, 0) for p in pairs):
                continue
            for r in range(x.region_count):
                if r in used_regions or inc[r].get(e, 0) != 1:
                    continue
                found = search(pairs + [CancelingPair(e, r)])
                if found is not None:
                    return found
        return None

    found = search([])
    return None if found is None else CancelingSequence(tuple(found))


@dataclass(frozen=True)
class CancellationResult:
    admits: bool
    tree: Optional[MaximalTree] = None
    sequence: Optional[CancelingSequence] = None
    trees_checked: int = 0
    trees_admitting: int = 0

    @property
    def tree_dependent(self) -> bool:
        return 0 < self.trees_admitting < self.trees_checked


def admits_canceling_pairs(x: PolyhedronModel, reverse_trees: bool = False) -> CancellationResult:
    """
    True iff some maximal tree carries n canceling pairs. Every tree is
    inspected so tree dependence can be reported; the first admitting tree in
    enumeration order supplies the witness.
    """
    _require_special(x)
    n = x.vertex_count
    if x.region_count < n:
        return CancellationResult(False)

    trees = list(maximal_trees(x.vertex_pieces[0].graph))
    order = reversed(range(len(trees))) if reverse_trees else range(len(trees))
    hits: Dict[int, CancelingSequence] = {}
    for i in order:
        seq = find_canceling_sequence(x, trees[i], n)
        if seq is not None:
            hits[i] = seq
    if not hits:
        return CancellationResult(False, trees_checked=len(trees))
    first = min(hits)
    return CancellationResult(True, trees[first], hits[first], len(trees), len(hits))


def flag_catalog(catalog: Catalog, known: Optional[Dict[int, CancellationResult]] = None) -> Catalog:
    """Fill the canceling flag of every record, reusing results already computed by index."""
    known = known or {}
    records = []
    for i, rec in enumerate(catalog.records):
        result = known[i] if i in known else admits_canceling_pairs(rec.model())
        if result.tree_dependent:
            log.info("[CANCEL] %s: flag depends on the maximal tree", rec.key_hex)
        records.append(replace(rec, canceling=result.admits))
    return replace(catalog, records=tuple(records))


# ─── CANCELLATION CONDITION ──────────────────────────────────────────────────

@dataclass(frozen=True)
class ComponentCheck:
    piece_index: int
    vertex_count: int
    boundary_count: int
    result: Optional[CancellationResult]    # None for non-qualifying components

    @property
    def qualifying(self) -> bool:
        return self.boundary_count == self.vertex_count + 1


@dataclass(frozen=True)
class ConditionReport:
    components: Tuple[ComponentCheck, ...]

    @property
    def holds(self) -> bool:
        return all(c.result.admits for c in self.components if c.qualifying)

    @property
    def witnesses(self) -> Tuple[Tuple[int, MaximalTree, CancelingSequence], ...]:
        return tuple(
            (c.piece_index, c.result.tree, c.result.sequence)
            for c in self.components if c.qualifying and c.result.admits
        )

    @property
    def non_qualifying(self) -> Tuple[int, ...]:
        return tuple(c.piece_index for c in self.components if not c.qualifying)


def cancellation_condition(x: PolyhedronModel) -> ConditionReport:
    if not x.is_closed():
        raise PreconditionError("cancellation condition is defined for closed models")
    checks = []
    for i, piece in enumerate(x.vertex_pieces):
        m = x.circuit_count("V", i)
        n = piece.vertex_count
        if m != n + 1:
            checks.append(ComponentCheck(i, n, m, None))
            continue
        capped = cap_off(PolyhedronModel((piece,)), [CircuitRef("V", 0, c) for c in range(m)])
        if capped.region_count != n + 1:
            raise InternalConsistencyError(f"piece {i}: capping {m} circuits gave {capped.region_count} regions")
        result = admits_canceling_pairs(capped)
        log.debug("[CANCEL] piece %d: n=%d admits=%s", i, n, result.admits)
        checks.append(ComponentCheck(i, n, m, result))
    return ConditionReport(tuple(checks))


# ─── BIPARTITE TREE ──────────────────────────────────────────────────────────

class BipartiteEdge(NamedTuple):
    x: int
    y: int
    label: int          # 0 far side acyclic, 1 far side homology circle
    circuit: int = -1


@dataclass(frozen=True)
class BipartiteTree:
    x_count: int
    y_count: int
    edges: Tuple[BipartiteEdge, ...]

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(("X", i) for i in range(self.x_count))
        g.add_nodes_from(("Y", j) for j in range(self.y_count))
        for e in self.edges:
            g.add_edge(("X", e.x), ("Y", e.y), label=e.label)
        return g

    def is_tree(self) -> bool:
        g = self.to_networkx()
        return g.number_of_nodes() > 0 and nx.is_tree(g)

    def incident(self, kind: str, index: int) -> List[BipartiteEdge]:
        return [e for e in self.edges if (e.x if kind == "X" else e.y) == index]


def build_bipartite_tree(x: PolyhedronModel, profile: Optional[HomologyProfile] = None) -> BipartiteTree:
    if not x.is_closed() or not x.vertex_pieces:
        raise PreconditionError("bipartite tree needs a closed model with vertex pieces")
    profile = profile or homology_profile(x)
    if not profile.acyclic:
        raise PreconditionError("bipartite tree needs an acyclic model")

    rest = x.structure_graph()
    rest.remove_nodes_from(("V", i) for i in range(len(x.vertex_pieces)))
    y_parts = sorted((sorted(c) for c in nx.connected_components(rest)), key=lambda c: c[0])
    y_of = {node: j for j, part in enumerate(y_parts) for node in part}

    edges = []
    attachments = x.attachments
    for i in range(len(x.vertex_pieces)):
        for c in range(x.circuit_count("V", i)):
            region, slot = attachments[("V", i, c)]
            far = submodel(x, far_side(x, ("V", i), region, slot))
            p = homology_profile(far)
            if p.acyclic:
                label = 0
            elif p.homology_circle:
                label = 1
            else:
                raise InvariantViolation(
                    f"far side of piece {i} circuit {c} is neither acyclic nor a homology circle "
                    f"({p.render()})"
                )
            edges.append(BipartiteEdge(i, y_of[("R", region)], label, c))

    tree = BipartiteTree(len(x.vertex_pieces), len(y_parts), tuple(edges))
    if not tree.is_tree():
        raise InvariantViolation("bipartite graph of an acyclic model is not a tree")
    return tree


def find_all_one_y_vertex(t: BipartiteTree) -> Optional[int]:
    """A Y-vertex all of whose edges carry label 1, when every X-vertex has a 1-edge."""
    if any(not any(e.label == 1 for e in t.incident("X", i)) for i in range(t.x_count)):
        return None
    for j in range(t.y_count):
        around = t.incident("Y", j)
        if around and all(e.label == 1 for e in around):
            return j
    raise InvariantViolation("no Y-vertex with all edges labeled 1 although every X-vertex has one")


# ─── CERTIFICATE ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class BallCertificate:
    model: PolyhedronModel
    profile: HomologyProfile
    witnesses: Tuple[Tuple[int, MaximalTree, CancelingSequence], ...]
    non_qualifying: Tuple[int, ...]
    hypotheses: Tuple[str, ...] = EXTERNAL_HYPOTHESES
    verified: Tuple[str, ...] = ("closed", "acyclic", "cancellation condition")


@dataclass(frozen=True)
class CertificationFailure:
    reasons: Tuple[str, ...]
    profile: Optional[HomologyProfile] = None


def certify_ball(x: PolyhedronModel) -> Union[BallCertificate, CertificationFailure]:
    reasons: List[str] = []
    if not x.is_closed():
        reasons.append("not closed")
    profile = homology_profile(x)
    if not profile.acyclic:
        reasons.append("not acyclic")
    if reasons:
        return CertificationFailure(tuple(reasons), profile)

    report = cancellation_condition(x)
    if x.vertex_pieces and not any(c.qualifying for c in report.components):
        y = find_all_one_y_vertex(build_bipartite_tree(x, profile))
        raise InvariantViolation(
            f"closed acyclic model has no qualifying component (all-one Y-vertex {y})"
        )
    failed = [c for c in report.components if c.qualifying and not c.result.admits]
    if failed:
        return CertificationFailure(
            tuple(f"piece {c.piece_index}: no {c.vertex_count} canceling pairs" for c in failed),
            profile,
        )
    log.info("[CANCEL] certified: %d witnesses", len(report.witnesses))
    return BallCertificate(x, profile, report.witnesses, report.non_qualifying)
