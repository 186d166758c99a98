"""
Graph encoding of simple polyhedra without vertices.

Vertices of the encoding graph G are pieces: B (a free boundary circle),
D (disk), P:d (sphere with d holes), M2 (Moebius band) and the three
Y-bundles Y111, Y12, Y3. An edge glues one boundary circle of each end.
At a Y12 end the edge is marked `single` (the circle wrapping the core once)
or `double` (the circle wrapping it twice).

Surface pieces joined by edges merge into one region. An edge whose ends are
both non-surface pieces becomes an annulus region. The map beta on a cycle
basis of H1(G; Z/2) says which cycles reverse orientation; it is turned into
one twist sign per edge (tree edges +1).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from core.errors import InternalConsistencyError, PreconditionError, StructuralError
from core.homology import (
    CellLabel,
    HomologyProfile,
    build_chain_complex,
    gf2_rank,
    homology_profile,
    mod2_betti_1,
)
from core.polyhedron import (
    FREE,
    CirclePiece,
    PolyhedronModel,
    Slot,
    SurfaceRegion,
    attached,
)
from utils.logger import get_logger

log = get_logger(__name__)

SURFACE_KINDS = ("D", "P", "M2")
CIRCLE_MONODROMY = {"Y111": "trivial", "Y12": "transposition", "Y3": "three_cycle"}
FIXED_DEGREE = {"B": 1, "D": 1, "M2": 1, "Y111": 3, "Y12": 2, "Y3": 1}
MARKS = ("single", "double")
COLLAPSE_NOTE = "collapse normalization not performed; checks assume a minimal encoding"


def parse_kind(kind: str) -> Tuple[str, int]:
    """'P:4' -> ('P', 4); every other kind has its fixed degree."""
    base, sep, holes = kind.partition(":")
    if base == "P":
        if not sep or not holes.isdigit() or int(holes) < 3:
            raise StructuralError(f"bad piece kind {kind!r}, expected P:<d> with d >= 3")
        return base, int(holes)
    if sep or base not in FIXED_DEGREE:
        raise StructuralError(f"unknown piece kind {kind!r}")
    return base, FIXED_DEGREE[base]


def piece_euler_characteristic(kind: str) -> int:
    base, degree = parse_kind(kind)
    if base == "M2":
        return 0
    return 2 - degree


class EncodingEdge(NamedTuple):
    a: int
    b: int
    mark_a: Optional[str] = None
    mark_b: Optional[str] = None

    def endpoint(self, end: int) -> int:
        return self.a if end == 0 else self.b

    def mark(self, end: int) -> Optional[str]:
        return self.mark_a if end == 0 else self.mark_b


# ─── ENCODING GRAPH ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class EncodingGraph:
    kinds: Tuple[str, ...]
    edges: Tuple[EncodingEdge, ...]
    beta: Tuple[Tuple[int, int], ...] = ()              # (basis index, 0|1)
    cycles: Tuple[Tuple[int, ...], ...] = ()            # explicit basis; empty = fundamental cycles

    def __post_init__(self):
        object.__setattr__(self, "kinds", tuple(self.kinds))
        object.__setattr__(self, "edges", tuple(EncodingEdge(*e) for e in self.edges))
        object.__setattr__(self, "beta", tuple(sorted((int(i), int(v)) for i, v in self.beta)))
        object.__setattr__(self, "cycles", tuple(tuple(int(e) for e in c) for c in self.cycles))
        if not self.kinds:
            raise StructuralError("encoding graph has no vertices")

        degree = [0] * len(self.kinds)
        y12_marks: Dict[int, List[str]] = {}
        for e, edge in enumerate(self.edges):
            for end in (0, 1):
                v, mark = edge.endpoint(end), edge.mark(end)
                if not 0 <= v < len(self.kinds):
                    raise StructuralError(f"edge {e}: no vertex {v}")
                degree[v] += 1
                is_y12 = self.base(v) == "Y12"
                if is_y12 and mark not in MARKS:
                    raise StructuralError(f"edge {e}: unmarked incidence at Y12 vertex {v}")
                if not is_y12 and mark is not None:
                    raise StructuralError(f"edge {e}: mark at non-Y12 vertex {v}")
                if is_y12:
                    y12_marks.setdefault(v, []).append(mark)

        for v, kind in enumerate(self.kinds):
            _, expected = parse_kind(kind)
            if degree[v] != expected:
                raise StructuralError(f"vertex {v} ({kind}) has degree {degree[v]}, expected {expected}")
        for v, marks in y12_marks.items():
            if sorted(marks) != sorted(MARKS):
                raise StructuralError(f"Y12 vertex {v} needs one single and one double incidence")

        rank = self.cycle_rank()
        seen = set()
        for i, value in self.beta:
            if not 0 <= i < rank:
                raise StructuralError(f"beta index {i} outside the cycle basis 0..{rank - 1}")
            if value not in (0, 1) or i in seen:
                raise StructuralError(f"bad beta entry ({i}, {value})")
            seen.add(i)
        if self.cycles:
            if len(self.cycles) != rank:
                raise StructuralError(f"{len(self.cycles)} basis cycles given, H1(G; Z/2) has rank {rank}")
            for i, cycle in enumerate(self.cycles):
                self._check_cycle(i, cycle)

    def _check_cycle(self, index: int, cycle: Sequence[int]) -> None:
        parity = [0] * len(self.kinds)
        if len(set(cycle)) != len(cycle):
            raise StructuralError(f"cycle {index} repeats an edge")
        for e in cycle:
            if not 0 <= e < len(self.edges):
                raise StructuralError(f"cycle {index}: no edge {e}")
            parity[self.edges[e].a] ^= 1
            parity[self.edges[e].b] ^= 1
        if any(parity):
            raise StructuralError(f"cycle {index} is not closed")

    def base(self, v: int) -> str:
        return self.kinds[v].partition(":")[0]

    @property
    def vertex_count(self) -> int:
        return len(self.kinds)

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.vertex_count))
        for e, edge in enumerate(self.edges):
            g.add_edge(edge.a, edge.b, key=e)
        return g

    def cycle_rank(self) -> int:
        components = nx.number_connected_components(self.to_networkx())
        return len(self.edges) - self.vertex_count + components

    def incidences(self, v: int) -> List[Tuple[int, int]]:
        """(edge, end) pairs at v in edge-id order."""
        return [(e, end) for e, edge in enumerate(self.edges) for end in (0, 1) if edge.endpoint(end) == v]

    def beta_vector(self) -> List[int]:
        values = [0] * self.cycle_rank()
        for i, v in self.beta:
            values[i] = v
        return values

    def cycle_basis(self) -> Tuple[Tuple[int, ...], ...]:
        if self.cycles:
            return self.cycles
        return tuple(cycle for _, cycle in self._fundamental_cycles())

    def _fundamental_cycles(self) -> List[Tuple[int, Tuple[int, ...]]]:
        triples = [(e, edge.a, edge.b) for e, edge in enumerate(self.edges)]
        parent, _, non_tree = _spanning_forest(range(self.vertex_count), triples)

        def to_root(v: int) -> set:
            path = set()
            while parent[v] is not None:
                e, v = parent[v]
                path ^= {e}
            return path

        out = []
        for e in non_tree:
            edge = self.edges[e]
            out.append((e, tuple(sorted(to_root(edge.a) ^ to_root(edge.b) ^ {e}))))
        return out

    def twists(self) -> Tuple[int, ...]:
        """+1 / -1 per edge; only edges outside the BFS forest can be -1."""
        signs = [1] * len(self.edges)
        fundamental = self._fundamental_cycles()
        if not fundamental:
            return tuple(signs)
        beta = np.array(self.beta_vector(), dtype=np.uint8)
        non_tree = [e for e, _ in fundamental]
        if self.cycles:
            m = np.array([[1 if e in cycle else 0 for e in non_tree] for cycle in self.cycles], dtype=np.uint8)
            flips = _gf2_solve(m, beta)
        else:
            flips = beta
        for e, flip in zip(non_tree, flips):
            if flip:
                signs[e] = -1
        return tuple(signs)


def _spanning_forest(vertices: Iterable[int], edges: Sequence[Tuple[int, int, int]],
                     root: Optional[int] = None):
    """
    BFS forest over (edge id, a, b) triples, neighbours visited in edge-id
    order, each tree started at the lowest unvisited vertex (root first).
    Returns (parent map v -> (edge, parent) or None, visit order, non-tree edge ids).
    """
    vertices = sorted(vertices)
    adjacency: Dict[int, List[Tuple[int, int]]] = {v: [] for v in vertices}
    for e, a, b in edges:
        adjacency[a].append((e, b))
        if a != b:
            adjacency[b].append((e, a))
    starts = vertices if root is None else [root] + [v for v in vertices if v != root]

    parent: Dict[int, Optional[Tuple[int, int]]] = {}
    order: List[int] = []
    tree_edges = set()
    for s in starts:
        if s in parent:
            continue
        parent[s] = None
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for e, w in sorted(adjacency[v]):
                if w not in parent:
                    parent[w] = (e, v)
                    tree_edges.add(e)
                    queue.append(w)
    non_tree = sorted(e for e, _, _ in edges if e not in tree_edges)
    return parent, order, non_tree


def _gf2_solve(m: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    k = m.shape[0]
    a = np.concatenate([m % 2, (rhs % 2)[:, None]], axis=1).astype(np.uint8)
    for c in range(k):
        hits = np.nonzero(a[c:, c])[0]
        if hits.size == 0:
            raise StructuralError("cycle lines do not form a basis of H1(G; Z/2)")
        p = c + hits[0]
        a[[c, p]] = a[[p, c]]
        for r in np.nonzero(a[:, c])[0]:
            if r != c:
                a[r] ^= a[c]
    return a[:, k]


# ─── RECONSTRUCTION ──────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class _Layout:
    model: PolyhedronModel
    twist: Tuple[int, ...]
    region_of: Dict[int, int]                            # surface vertex -> region
    edge_image: Dict[int, Tuple[CellLabel, ...]] = field(default_factory=dict)   # 1-cells an edge of G runs along


def _layout(g: EncodingGraph) -> _Layout:
    twist = g.twists()
    circle = [v for v in range(g.vertex_count) if g.base(v) in CIRCLE_MONODROMY]
    piece_of = {v: j for j, v in enumerate(circle)}

    circuit_at: Dict[Tuple[int, int], int] = {}
    for v in circle:
        for i, (e, end) in enumerate(g.incidences(v)):
            if g.base(v) == "Y12":
                circuit_at[(e, end)] = MARKS.index(g.edges[e].mark(end))
            else:
                circuit_at[(e, end)] = i

    def slot_at(e: int, end: int, sign: int) -> Slot:
        w = g.edges[e].endpoint(end)
        if g.base(w) == "B":
            return FREE
        return attached("C", piece_of[w], circuit_at[(e, end)], sign)

    def is_surface(v: int) -> bool:
        return g.base(v) in SURFACE_KINDS

    sg = nx.MultiGraph()
    sg.add_nodes_from(v for v in range(g.vertex_count) if is_surface(v))
    sg.add_edges_from(
        (edge.a, edge.b, e) for e, edge in enumerate(g.edges) if is_surface(edge.a) and is_surface(edge.b)
    )
    components = sorted((sorted(c) for c in nx.connected_components(sg)), key=lambda c: c[0])

    regions: List[SurfaceRegion] = []
    region_of: Dict[int, int] = {}
    edge_image: Dict[int, Tuple[CellLabel, ...]] = {}
    pending_spokes: List[Tuple[int, int, int]] = []      # (edge, region, slot)

    for comp in components:
        r = len(regions)
        members = set(comp)
        internal = [(e, edge.a, edge.b) for e, edge in enumerate(g.edges) if edge.a in members and edge.b in members]
        parent, order, non_tree = _spanning_forest(comp, internal)

        side = {}
        for v in order:
            if parent[v] is None:
                side[v] = 1
            else:
                e, u = parent[v]
                side[v] = side[u] * twist[e]
        conflict = any(side[a] * twist[e] != side[b] for e, a, b in internal if e in non_tree)
        m2 = sum(1 for v in comp if g.base(v) == "M2")
        orientable = not conflict and m2 == 0

        slots: List[Slot] = []
        for e, edge in enumerate(g.edges):
            for end in (0, 1):
                v, w = edge.endpoint(end), edge.endpoint(1 - end)
                if v in members and not is_surface(w):
                    pending_spokes.append((e, r, len(slots)))
                    slots.append(slot_at(e, 1 - end, side[v] * twist[e]))

        chi = sum(piece_euler_characteristic(g.kinds[v]) for v in comp)
        deficit = 2 - len(slots) - chi
        if deficit != 2 * len(non_tree) + m2:
            raise InternalConsistencyError(f"region {r}: surface pieces do not add up")
        genus = deficit // 2 if orientable else deficit
        regions.append(SurfaceRegion(genus, orientable, tuple(slots)))
        for v in comp:
            region_of[v] = r
        for k, e in enumerate(non_tree):
            edge_image[e] = (("handle", r, k, "a"),) if orientable else (("crosscap", r, k),)

    for e, edge in enumerate(g.edges):
        if is_surface(edge.a) or is_surface(edge.b):
            continue
        r = len(regions)
        regions.append(SurfaceRegion(0, True, (slot_at(e, 0, 1), slot_at(e, 1, twist[e]))))
        edge_image[e] = (("spoke", r, 0), ("spoke", r, 1))

    for e, r, s in pending_spokes:
        if not regions[r].is_direct:
            edge_image[e] = (("spoke", r, s),)

    model = PolyhedronModel(
        circle_pieces=tuple(CirclePiece(CIRCLE_MONODROMY[g.base(v)]) for v in circle),
        regions=tuple(regions),
    )
    boundaries = sum(1 for v in range(g.vertex_count) if g.base(v) == "B")
    if len(model.free_region_slots()) != boundaries:
        raise InternalConsistencyError(
            f"{len(model.free_region_slots())} free slots for {boundaries} B-vertices"
        )
    return _Layout(model, twist, region_of, edge_image)


def reconstruct_from_encoding(g: EncodingGraph) -> PolyhedronModel:
    layout = _layout(g)
    log.debug("[ENCODE] %d pieces -> %d circle pieces, %d regions",
              g.vertex_count, len(layout.model.circle_pieces), layout.model.region_count)
    return layout.model


# ─── CHECKS ──────────────────────────────────────────────────────────────────

def retraction_check(g: EncodingGraph, x: PolyhedronModel) -> bool:
    """
    True iff H1(G; Z/2) -> H1(X; Z/2) is injective for G sitting inside X:
    Y-pieces at their cores, regions at their centres, edges along spokes.
    """
    layout = _layout(g)
    if x != layout.model:
        raise PreconditionError("model is not the reconstruction of this encoding")
    basis = g.cycle_basis()
    k = len(basis)
    if k == 0:
        return True

    cc = build_chain_complex(x)
    images = np.zeros((cc.cell_counts[1], k), dtype=np.int64)
    for i, cycle in enumerate(basis):
        for e in cycle:
            for label in layout.edge_image.get(e, ()):
                try:
                    images[cc.index_1(label), i] += 1
                except ValueError as err:
                    raise InternalConsistencyError(f"edge {e} runs along missing cell {label}") from err
    images %= 2
    if np.any((cc.boundary_1 @ images) % 2):
        raise InternalConsistencyError("image of a cycle of G is not a cycle")

    rank_2 = gf2_rank(cc.boundary_2)
    gained = gf2_rank(np.hstack([cc.boundary_2, images])) - rank_2
    b1 = mod2_betti_1(cc)
    ok = gained == k and k <= b1
    log.debug("[ENCODE] retraction: rank H1(G)=%d, independent images=%d, b1(X; Z/2)=%d", k, gained, b1)
    return ok


@dataclass(frozen=True)
class EncodingReport:
    is_tree: bool
    forbidden: Tuple[Tuple[int, str], ...]      # M2 / Y3 / Y111 vertices
    misdirected: Tuple[int, ...]                # Y12 vertices whose double mark points away from B
    profile: HomologyProfile
    note: str = COLLAPSE_NOTE

    @property
    def violations(self) -> Tuple[str, ...]:
        out = [] if self.is_tree else ["G is not a tree"]
        out += [f"vertex {v}: {kind} piece" for v, kind in self.forbidden]
        out += [f"vertex {v}: Y12 double mark points away from B" for v in self.misdirected]
        return tuple(out)

    @property
    def clean(self) -> bool:
        return not self.violations

    @property
    def consistent(self) -> bool:
        return self.clean == self.profile.acyclic

    def render(self) -> str:
        lines = [f"clean={int(self.clean)} acyclic={int(self.profile.acyclic)} {self.profile.render()}"]
        lines += [f"violation {v}" for v in self.violations]
        lines.append(f"note {self.note}")
        return "\n".join(lines) + "\n"


def acyclic_encoding_check(g: EncodingGraph) -> EncodingReport:
    boundary = [v for v in range(g.vertex_count) if g.base(v) == "B"]
    if len(boundary) != 1:
        raise PreconditionError(f"expected exactly one B-vertex, found {len(boundary)}")

    is_tree = nx.is_tree(g.to_networkx())
    forbidden = tuple((v, g.kinds[v]) for v in range(g.vertex_count) if g.base(v) in ("M2", "Y3", "Y111"))
    misdirected: List[int] = []
    if is_tree:
        triples = [(e, edge.a, edge.b) for e, edge in enumerate(g.edges)]
        parent, _, _ = _spanning_forest(range(g.vertex_count), triples, root=boundary[0])
        for v in range(g.vertex_count):
            if g.base(v) != "Y12":
                continue
            e, _ = parent[v]
            end = 0 if g.edges[e].a == v else 1
            if g.edges[e].mark(end) != "double":
                misdirected.append(v)

    report = EncodingReport(is_tree, forbidden, tuple(misdirected),
                            homology_profile(reconstruct_from_encoding(g)))
    if not report.consistent:
        log.warning("[ENCODE] structure checks (clean=%s) disagree with homology (%s)",
                    report.clean, report.profile.render())
    return report
