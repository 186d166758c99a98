"""
Combinatorial model of simple polyhedra.

A vertex piece is the regular neighbourhood of one singular component that
contains true vertices. Each vertex is the cone over the complete graph on
legs 0..3; the wing at leg p towards q is the cone over the edge {p, q}.
A singular edge joins two legs and carries a bijection between the three
wings at its ends. Everything else (circle pieces, surface regions and the
slot assignment) is bookkeeping on top of that.

All types are frozen values; operations return new models.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property, lru_cache
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

import networkx as nx

from core.errors import InternalConsistencyError, PreconditionError, StructuralError
from utils.logger import get_logger

log = get_logger(__name__)

Leg = Tuple[int, int]           # (vertex, leg)
Edge = Tuple[Leg, Leg]          # (end a, end b); traversed forward from a to b

MONODROMY_WRAPS: Dict[str, Tuple[int, ...]] = {
    "trivial":      (1, 1, 1),  # Y111
    "transposition": (1, 2),    # Y12: circuit 0 wraps once, circuit 1 twice
    "three_cycle":  (3,),       # Y3
}


def wing_labels(leg: int) -> Tuple[int, int, int]:
    """Wing labels at a leg: the other three leg indices, ascending."""
    return tuple(q for q in range(4) if q != leg)


def identity_gluing(leg_a: int, leg_b: int) -> Tuple[int, int, int]:
    """Gluing that keeps every wing label, sending the wing towards leg_b to the wing towards leg_a."""
    return tuple(leg_a if q == leg_b else q for q in wing_labels(leg_a))


# ─── SINGULAR GRAPH ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SingularGraph:
    vertex_count: int
    edges: Tuple[Edge, ...]

    def __post_init__(self):
        edges = tuple((tuple(a), tuple(b)) for a, b in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.vertex_count < 0:
            raise StructuralError("negative vertex count")
        seen: Set[Leg] = set()
        for a, b in edges:
            for v, p in (a, b):
                if not (0 <= v < self.vertex_count and 0 <= p < 4):
                    raise StructuralError(f"leg {(v, p)} out of range")
                if (v, p) in seen:
                    raise StructuralError(f"leg {(v, p)} used twice")
                seen.add((v, p))
        if len(seen) != 4 * self.vertex_count:
            raise StructuralError("graph is not 4-regular")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def leg_table(self) -> Dict[Leg, Tuple[int, int]]:
        """(vertex, leg) -> (edge id, end index 0 for a / 1 for b)."""
        table = {}
        for e, (a, b) in enumerate(self.edges):
            table[a] = (e, 0)
            table[b] = (e, 1)
        return table

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.vertex_count))
        for e, (a, b) in enumerate(self.edges):
            g.add_edge(a[0], b[0], key=e)
        return g

    def is_connected(self) -> bool:
        return self.vertex_count > 0 and nx.is_connected(self.to_networkx())

    def loops(self) -> List[int]:
        return [e for e, (a, b) in enumerate(self.edges) if a[0] == b[0]]


# ─── VERTEX PIECE ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class VertexPiece:
    """
    Nbd(S'; X) for a singular component with at least one vertex.
    gluings[e][i] is the wing label at end b receiving the i-th wing label
    (ascending) at end a.
    """
    graph: SingularGraph
    gluings: Tuple[Tuple[int, int, int], ...]

    def __post_init__(self):
        gluings = tuple(tuple(int(x) for x in g) for g in self.gluings)
        object.__setattr__(self, "gluings", gluings)
        if self.graph.vertex_count < 1:
            raise StructuralError("a vertex piece needs at least one vertex")
        if len(gluings) != self.graph.edge_count:
            raise StructuralError(
                f"{len(gluings)} gluings for {self.graph.edge_count} edges"
            )
        for e, (_, (_, pb)) in enumerate(self.graph.edges):
            if sorted(gluings[e]) != list(wing_labels(pb)):
                raise StructuralError(
                    f"edge {e}: gluing {gluings[e]} is not a bijection onto wings of leg {pb}"
                )
        if not self.graph.is_connected():
            raise StructuralError("vertex piece graph must be connected")

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    @property
    def edge_count(self) -> int:
        return self.graph.edge_count

    @cached_property
    def _maps(self) -> Tuple[Tuple[Dict[int, int], Dict[int, int]], ...]:
        out = []
        for e, (a, _) in enumerate(self.graph.edges):
            fwd = dict(zip(wing_labels(a[1]), self.gluings[e]))
            out.append((fwd, {v: k for k, v in fwd.items()}))
        return tuple(out)

    def forward(self, edge: int, label: int) -> int:
        return self._maps[edge][0][label]

    def backward(self, edge: int, label: int) -> int:
        return self._maps[edge][1][label]

    def reversed_edge(self, edge: int) -> "VertexPiece":
        """Same polyhedron with one edge stored in the opposite direction."""
        a, b = self.graph.edges[edge]
        inverse = tuple(self.backward(edge, q) for q in wing_labels(b[1]))
        edges = list(self.graph.edges)
        edges[edge] = (b, a)
        gluings = list(self.gluings)
        gluings[edge] = inverse
        return VertexPiece(SingularGraph(self.vertex_count, tuple(edges)), tuple(gluings))

    def relabeled(self, vertex_perm: Sequence[int], leg_perms: Sequence[Sequence[int]]) -> "VertexPiece":
        """Apply v -> vertex_perm[v] and, at vertex v, leg p -> leg_perms[v][p]."""
        edges, gluings = [], []
        for e, (a, b) in enumerate(self.graph.edges):
            sa, sb = leg_perms[a[0]], leg_perms[b[0]]
            na = (vertex_perm[a[0]], sa[a[1]])
            nb = (vertex_perm[b[0]], sb[b[1]])
            image = {sa[q]: sb[self.forward(e, q)] for q in wing_labels(a[1])}
            edges.append((na, nb))
            gluings.append(tuple(image[q] for q in wing_labels(na[1])))
        return VertexPiece(SingularGraph(self.vertex_count, tuple(edges)), tuple(gluings))


# ─── CIRCUITS ────────────────────────────────────────────────────────────────

class Traversal(NamedTuple):
    edge: int
    wing: int        # wing label at the entry end
    forward: bool    # True: end a -> end b
    slot: int        # wing label at end a (identifies the strand)


@dataclass(frozen=True)
class Circuit:
    traversals: Tuple[Traversal, ...]

    def __len__(self) -> int:
        return len(self.traversals)

    def edge_counts(self) -> Dict[int, int]:
        """Unsigned number of strand traversals per edge."""
        counts: Dict[int, int] = {}
        for t in self.traversals:
            counts[t.edge] = counts.get(t.edge, 0) + 1
        return counts

    def signed_counts(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for t in self.traversals:
            counts[t.edge] = counts.get(t.edge, 0) + (1 if t.forward else -1)
        return counts

    def start_vertex(self, piece: VertexPiece) -> int:
        first = self.traversals[0]
        a, b = piece.graph.edges[first.edge]
        return a[0] if first.forward else b[0]


@lru_cache(maxsize=65536)
def trace_circuits(piece: VertexPiece) -> Tuple[Circuit, ...]:
    """
    Boundary circuits of the piece. A circuit arriving at leg p on wing {p, q}
    crosses the vertex to leg q and leaves along the edge at leg q carrying
    label p. Tracing starts at the lowest untraversed (edge, slot), forward.
    """
    graph = piece.graph
    used: Set[Tuple[int, int]] = set()
    circuits: List[Circuit] = []

    for e0, (a0, _) in enumerate(graph.edges):
        for q0 in wing_labels(a0[1]):
            if (e0, q0) in used:
                continue
            path: List[Traversal] = []
            edge, wing, fwd = e0, q0, True
            while True:
                slot = wing if fwd else piece.backward(edge, wing)
                if (edge, slot) in used:
                    raise InternalConsistencyError(f"strand {(edge, slot)} traversed twice")
                used.add((edge, slot))
                path.append(Traversal(edge, wing, fwd, slot))

                a, b = graph.edges[edge]
                if fwd:
                    (v, p), r = b, piece.forward(edge, slot)
                else:
                    (v, p), r = a, slot
                edge, end = graph.leg_table[(v, r)]
                wing, fwd = p, end == 0
                next_slot = wing if fwd else piece.backward(edge, wing)
                if (edge, next_slot) == (e0, q0):
                    if not fwd:
                        raise InternalConsistencyError("circuit closed against its direction")
                    break
            circuits.append(Circuit(tuple(path)))

    if sum(len(c) for c in circuits) != 3 * graph.edge_count:
        raise InternalConsistencyError("circuits do not partition the strand slots")
    return tuple(circuits)


# ─── CIRCLE PIECES AND REGIONS ───────────────────────────────────────────────

@dataclass(frozen=True)
class CirclePiece:
    """Y-bundle over a circle: Y111 (trivial), Y12 (transposition) or Y3 (three_cycle)."""
    monodromy: str

    def __post_init__(self):
        if self.monodromy not in MONODROMY_WRAPS:
            raise StructuralError(f"unknown monodromy {self.monodromy!r}")

    @property
    def wraps(self) -> Tuple[int, ...]:
        return MONODROMY_WRAPS[self.monodromy]

    @property
    def circuit_count(self) -> int:
        return len(self.wraps)


class CircuitRef(NamedTuple):
    kind: str        # "V" vertex piece | "C" circle piece
    piece: int
    circuit: int


class RegionSlotRef(NamedTuple):
    region: int
    slot: int


@dataclass(frozen=True)
class Slot:
    ref: Optional[CircuitRef] = None
    sign: int = 1

    def __post_init__(self):
        if self.ref is not None:
            object.__setattr__(self, "ref", CircuitRef(*self.ref))
        if self.sign not in (1, -1):
            raise StructuralError(f"slot sign must be +1 or -1, got {self.sign}")

    @property
    def is_free(self) -> bool:
        return self.ref is None


FREE = Slot()


def attached(kind: str, piece: int, circuit: int, sign: int = 1) -> Slot:
    return Slot(CircuitRef(kind, piece, circuit), sign)


@dataclass(frozen=True)
class SurfaceRegion:
    """
    Compact surface. For non-orientable regions `genus` counts crosscaps.
    """
    genus: int = 0
    orientable: bool = True
    slots: Tuple[Slot, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        if self.genus < 0:
            raise StructuralError("negative genus")
        if not self.orientable and self.genus < 1:
            raise StructuralError("non-orientable region needs at least one crosscap")

    @property
    def is_disk(self) -> bool:
        return self.genus == 0 and self.orientable and len(self.slots) == 1

    @property
    def is_direct(self) -> bool:
        """Disk attached straight along its circuit, no auxiliary cells."""
        return self.is_disk and not self.slots[0].is_free

    @property
    def is_planar(self) -> bool:
        return self.genus == 0 and self.orientable

    def euler_characteristic(self) -> int:
        g = 2 * self.genus if self.orientable else self.genus
        return 2 - g - len(self.slots)


def disk_on(ref: CircuitRef, sign: int = 1) -> SurfaceRegion:
    return SurfaceRegion(0, True, (Slot(ref, sign),))


# ─── MODEL ───────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class PolyhedronModel:
    vertex_pieces: Tuple[VertexPiece, ...] = ()
    circle_pieces: Tuple[CirclePiece, ...] = ()
    regions: Tuple[SurfaceRegion, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertex_pieces", tuple(self.vertex_pieces))
        object.__setattr__(self, "circle_pieces", tuple(self.circle_pieces))
        object.__setattr__(self, "regions", tuple(self.regions))
        seen: Dict[CircuitRef, RegionSlotRef] = {}
        for r, region in enumerate(self.regions):
            for s, slot in enumerate(region.slots):
                if slot.is_free:
                    continue
                ref = slot.ref
                if not (0 <= ref.circuit < self.circuit_count(ref.kind, ref.piece)):
                    raise StructuralError(f"region {r} slot {s}: no circuit {tuple(ref)}")
                if ref in seen:
                    raise StructuralError(f"circuit {tuple(ref)} matched to two slots")
                seen[ref] = RegionSlotRef(r, s)
        object.__setattr__(self, "_attachments", seen)

    # ── queries ──
    def circuit_count(self, kind: str, piece: int) -> int:
        if kind == "V":
            if not 0 <= piece < len(self.vertex_pieces):
                raise StructuralError(f"no vertex piece {piece}")
            return len(trace_circuits(self.vertex_pieces[piece]))
        if kind == "C":
            if not 0 <= piece < len(self.circle_pieces):
                raise StructuralError(f"no circle piece {piece}")
            return self.circle_pieces[piece].circuit_count
        raise StructuralError(f"unknown piece kind {kind!r}")

    def circuit_refs(self) -> List[CircuitRef]:
        refs = []
        for i in range(len(self.vertex_pieces)):
            refs += [CircuitRef("V", i, c) for c in range(self.circuit_count("V", i))]
        for j in range(len(self.circle_pieces)):
            refs += [CircuitRef("C", j, c) for c in range(self.circuit_count("C", j))]
        return refs

    @property
    def attachments(self) -> Dict[CircuitRef, RegionSlotRef]:
        return dict(self._attachments)

    def free_circuits(self) -> List[CircuitRef]:
        return [ref for ref in self.circuit_refs() if ref not in self._attachments]

    def free_region_slots(self) -> List[RegionSlotRef]:
        return [
            RegionSlotRef(r, s)
            for r, region in enumerate(self.regions)
            for s, slot in enumerate(region.slots)
            if slot.is_free
        ]

    @property
    def vertex_count(self) -> int:
        return sum(p.vertex_count for p in self.vertex_pieces)

    @property
    def region_count(self) -> int:
        return len(self.regions)

    def is_closed(self) -> bool:
        return not self.free_circuits() and not self.free_region_slots()

    def is_disk_model(self) -> bool:
        return (
            not self.vertex_pieces and not self.circle_pieces
            and len(self.regions) == 1 and self.regions[0].is_disk
            and self.regions[0].slots[0].is_free
        )

    def is_special(self) -> bool:
        if self.is_disk_model():
            return True
        return (
            not self.circle_pieces
            and len(self.vertex_pieces) == 1
            and self.is_closed()
            and all(r.is_disk for r in self.regions)
        )

    def structure_graph(self) -> nx.MultiGraph:
        """Pieces and regions as nodes; one edge per attached slot."""
        g = nx.MultiGraph()
        g.add_nodes_from(("V", i) for i in range(len(self.vertex_pieces)))
        g.add_nodes_from(("C", j) for j in range(len(self.circle_pieces)))
        g.add_nodes_from(("R", r) for r in range(len(self.regions)))
        for ref, (r, s) in sorted(self._attachments.items()):
            g.add_edge(("R", r), (ref.kind, ref.piece), key=(r, s), circuit=ref.circuit)
        return g

    def component_count(self) -> int:
        g = self.structure_graph()
        return nx.number_connected_components(g) if g.number_of_nodes() else 0

    def circuit(self, ref: CircuitRef) -> Circuit:
        return trace_circuits(self.vertex_pieces[ref.piece])[ref.circuit]


# ─── OPERATIONS ──────────────────────────────────────────────────────────────

def special_model(piece: VertexPiece) -> PolyhedronModel:
    """Cap every boundary circuit of a vertex piece with a disk."""
    circuits = trace_circuits(piece)
    return PolyhedronModel(
        vertex_pieces=(piece,),
        regions=tuple(disk_on(CircuitRef("V", 0, c)) for c in range(len(circuits))),
    )


def disk_model() -> PolyhedronModel:
    return PolyhedronModel(regions=(SurfaceRegion(0, True, (FREE,)),))


def euler_characteristic(model: PolyhedronModel) -> int:
    """Singular vertices - singular edges + sum of region characteristics."""
    chi = 0
    for piece in model.vertex_pieces:
        chi += piece.vertex_count - piece.edge_count
    return chi + sum(r.euler_characteristic() for r in model.regions)


def cap_off(model: PolyhedronModel, slots: Iterable) -> PolyhedronModel:
    """
    Glue a disk along each named boundary circle. A CircuitRef gets a new disk
    region; a RegionSlotRef closes that free boundary of its region.
    """
    new_regions: List[SurfaceRegion] = []
    closing: Dict[int, Set[int]] = {}
    named: Set = set()

    for item in slots:
        if item in named:
            raise PreconditionError(f"{tuple(item)} named twice")
        named.add(item)
        if isinstance(item, RegionSlotRef):
            if not (0 <= item.region < len(model.regions)
                    and 0 <= item.slot < len(model.regions[item.region].slots)):
                raise PreconditionError(f"no region slot {tuple(item)}")
            if not model.regions[item.region].slots[item.slot].is_free:
                raise PreconditionError(f"region slot {tuple(item)} is already attached")
            closing.setdefault(item.region, set()).add(item.slot)
        else:
            ref = CircuitRef(*item)
            try:
                count = model.circuit_count(ref.kind, ref.piece)
            except StructuralError as e:
                raise PreconditionError(str(e)) from e
            if not 0 <= ref.circuit < count:
                raise PreconditionError(f"no circuit {tuple(ref)}")
            if ref in model.attachments:
                raise PreconditionError(f"circuit {tuple(ref)} is already capped")
            new_regions.append(disk_on(ref))

    regions = []
    for r, region in enumerate(model.regions):
        if r in closing:
            kept = tuple(s for i, s in enumerate(region.slots) if i not in closing[r])
            region = replace(region, slots=kept)
        regions.append(region)
    log.debug("[POLY] cap_off: %d new disks, %d region boundaries closed",
              len(new_regions), sum(len(v) for v in closing.values()))
    return replace(model, regions=tuple(regions) + tuple(new_regions))


def submodel(model: PolyhedronModel, nodes: Iterable[Tuple[str, int]]) -> PolyhedronModel:
    """
    Restrict to a set of structure-graph nodes. Slots attached to circuits of
    dropped pieces become free; circuits of kept pieces lose their dropped
    regions and become free.
    """
    nodes = set(nodes)
    vmap = {i: n for n, i in enumerate(i for i in range(len(model.vertex_pieces)) if ("V", i) in nodes)}
    cmap = {j: n for n, j in enumerate(j for j in range(len(model.circle_pieces)) if ("C", j) in nodes)}
    regions = []
    for r, region in enumerate(model.regions):
        if ("R", r) not in nodes:
            continue
        slots = []
        for slot in region.slots:
            ref = slot.ref
            table = vmap if ref is not None and ref.kind == "V" else cmap
            if ref is None or ref.piece not in table:
                slots.append(FREE)
            else:
                slots.append(Slot(CircuitRef(ref.kind, table[ref.piece], ref.circuit), slot.sign))
        regions.append(replace(region, slots=tuple(slots)))
    return PolyhedronModel(
        vertex_pieces=tuple(model.vertex_pieces[i] for i in sorted(vmap)),
        circle_pieces=tuple(model.circle_pieces[j] for j in sorted(cmap)),
        regions=tuple(regions),
    )


def disjoint_union(a: PolyhedronModel, b: PolyhedronModel) -> PolyhedronModel:
    nv, nc = len(a.vertex_pieces), len(a.circle_pieces)

    def shift(slot: Slot) -> Slot:
        if slot.is_free:
            return slot
        off = nv if slot.ref.kind == "V" else nc
        return Slot(slot.ref._replace(piece=slot.ref.piece + off), slot.sign)

    moved = tuple(replace(r, slots=tuple(shift(s) for s in r.slots)) for r in b.regions)
    return PolyhedronModel(
        vertex_pieces=a.vertex_pieces + b.vertex_pieces,
        circle_pieces=a.circle_pieces + b.circle_pieces,
        regions=a.regions + moved,
    )
