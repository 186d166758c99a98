import itertools

import pytest

from core.enumeration import _gluing
from core.errors import PreconditionError, StructuralError
from core.homology import homology_profile
from core.polyhedron import (
    FREE,
    CirclePiece,
    CircuitRef,
    PolyhedronModel,
    RegionSlotRef,
    SingularGraph,
    SurfaceRegion,
    VertexPiece,
    attached,
    cap_off,
    disjoint_union,
    disk_model,
    disk_on,
    euler_characteristic,
    identity_gluing,
    special_model,
    submodel,
    trace_circuits,
    wing_labels,
)
from tests.builders import TWO_LOOPS, capped_y3, y12_assembly
from tests.oracles import strand_circuits, subdivided_homology


def _edge_counts(piece):
    return sorted(tuple(sorted(c.edge_counts().items())) for c in trace_circuits(piece))


# ─── graph and gluing data ───────────────────────────────────────────────────

def test_wing_labels_and_identity_gluing():
    assert wing_labels(0) == (1, 2, 3)
    assert wing_labels(2) == (0, 1, 3)
    assert identity_gluing(0, 1) == (0, 2, 3)
    assert identity_gluing(2, 3) == (0, 1, 2)


def test_singular_graph_rejects_bad_legs():
    with pytest.raises(StructuralError):
        SingularGraph(1, (((0, 0), (0, 1)), ((0, 1), (0, 2))))
    with pytest.raises(StructuralError):
        SingularGraph(1, (((0, 0), (0, 1)),))
    with pytest.raises(StructuralError):
        SingularGraph(1, (((0, 0), (0, 4)), ((0, 2), (0, 3))))


def test_vertex_piece_rejects_non_bijective_gluing():
    with pytest.raises(StructuralError):
        VertexPiece(TWO_LOOPS, ((0, 0, 3), (0, 1, 2)))
    with pytest.raises(StructuralError):
        VertexPiece(TWO_LOOPS, ((0, 2, 3),))


def test_vertex_piece_rejects_disconnected_graph():
    graph = SingularGraph(2, (((0, 0), (0, 1)), ((0, 2), (0, 3)), ((1, 0), (1, 1)), ((1, 2), (1, 3))))
    with pytest.raises(StructuralError):
        VertexPiece(graph, tuple(identity_gluing(a[1], b[1]) for a, b in graph.edges))


def test_singular_graph_views():
    assert TWO_LOOPS.loops() == [0, 1]
    assert TWO_LOOPS.is_connected()
    assert TWO_LOOPS.leg_table[(0, 3)] == (1, 1)
    assert TWO_LOOPS.to_networkx().number_of_edges() == 2


# ─── circuits ────────────────────────────────────────────────────────────────

def test_identity_piece_circuits(piece_b):
    circuits = trace_circuits(piece_b)
    assert [len(c) for c in circuits] == [1, 4, 1]
    assert circuits[0].signed_counts() == {0: 1}
    assert circuits[1].edge_counts() == {0: 2, 1: 2}
    assert circuits[1].signed_counts() == {0: 0, 1: 0}
    assert circuits[2].signed_counts() == {1: 1}


def test_acyclic_piece_circuits(piece_a):
    c0, c1 = trace_circuits(piece_a)
    assert c0.edge_counts() == {0: 1}
    assert c1.edge_counts() == {0: 2, 1: 3}
    assert c1.signed_counts() == {0: 0, 1: 1}
    assert [t.forward for t in c1.traversals] == [True, True, True, False, False]


def test_identity_piece_matches_strand_oracle(piece_b):
    assert _edge_counts(piece_b) == strand_circuits(piece_b)


def test_every_one_vertex_gluing_matches_strand_oracle():
    counts = set()
    for choice in itertools.product(range(6), repeat=2):
        piece = VertexPiece(TWO_LOOPS, _gluing(TWO_LOOPS, choice))
        circuits = trace_circuits(piece)
        assert _edge_counts(piece) == strand_circuits(piece)
        assert sum(len(c) for c in circuits) == 6
        counts.add(len(circuits))
    assert counts <= {1, 2, 3, 4}


def test_strand_slots_are_partitioned(piece_a):
    slots = [(t.edge, t.slot) for c in trace_circuits(piece_a) for t in c.traversals]
    assert len(slots) == len(set(slots)) == 3 * piece_a.edge_count


def test_reversing_an_edge_keeps_circuit_structure(piece_a):
    flipped = piece_a.reversed_edge(1)
    assert flipped.graph.edges[1] == ((0, 3), (0, 2))
    assert strand_circuits(flipped) == strand_circuits(piece_a)
    assert homology_profile(special_model(flipped)) == homology_profile(special_model(piece_a))


def test_relabeling_legs_keeps_circuit_structure(piece_a):
    moved = piece_a.relabeled((0,), ((2, 0, 3, 1),))
    assert sorted(len(c) for c in trace_circuits(moved)) == [1, 5]


# ─── models ──────────────────────────────────────────────────────────────────

def test_model_rejects_double_attachment_and_missing_circuit(piece_a):
    with pytest.raises(StructuralError):
        PolyhedronModel((piece_a,), (), (disk_on(CircuitRef("V", 0, 0)), disk_on(CircuitRef("V", 0, 0))))
    with pytest.raises(StructuralError):
        PolyhedronModel((piece_a,), (), (disk_on(CircuitRef("V", 0, 5)),))
    with pytest.raises(StructuralError):
        CirclePiece("twisted")


def test_region_validation():
    with pytest.raises(StructuralError):
        SurfaceRegion(0, False, (FREE,))
    with pytest.raises(StructuralError):
        attached("V", 0, 0, sign=2)


def test_special_model_queries(special_a):
    assert special_a.is_closed()
    assert special_a.is_special()
    assert special_a.vertex_count == 1
    assert special_a.region_count == 2
    assert special_a.component_count() == 1
    assert not special_a.is_disk_model()


def test_open_model_queries(piece_a):
    model = PolyhedronModel((piece_a,), (), (disk_on(CircuitRef("V", 0, 0)),))
    assert model.free_circuits() == [CircuitRef("V", 0, 1)]
    assert not model.is_closed()
    assert not model.is_special()


@pytest.mark.parametrize("gluing", [(0, 0), (3, 5), (1, 2), (4, 4)])
def test_euler_characteristic_of_special_model(gluing):
    piece = VertexPiece(TWO_LOOPS, _gluing(TWO_LOOPS, gluing))
    model = special_model(piece)
    assert euler_characteristic(model) == model.region_count - 1


def test_euler_characteristic_small_cases():
    assert euler_characteristic(disk_model()) == 1
    assert euler_characteristic(capped_y3()) == subdivided_homology(capped_y3())[2] == 1
    assert disk_model().is_disk_model() and disk_model().is_special()


def test_cap_off_closes_a_disk_into_a_sphere():
    sphere = cap_off(disk_model(), [RegionSlotRef(0, 0)])
    assert sphere.is_closed()
    assert euler_characteristic(sphere) == 2
    assert homology_profile(sphere).betti == (1, 0, 1)
    assert subdivided_homology(sphere)[0] == (1, 0, 1)


def test_cap_off_nothing_is_identity(composite):
    assert cap_off(composite, []) == composite


def test_cap_off_all_circuits_of_a_piece_gives_its_special_model(piece_a):
    bare = PolyhedronModel((piece_a,))
    capped = cap_off(bare, [CircuitRef("V", 0, 0), CircuitRef("V", 0, 1)])
    assert capped == special_model(piece_a)
    assert capped.is_special()


def test_cap_off_rejects_bad_targets(special_a, piece_a):
    with pytest.raises(PreconditionError):
        cap_off(special_a, [CircuitRef("V", 0, 0)])
    with pytest.raises(PreconditionError):
        cap_off(PolyhedronModel((piece_a,)), [CircuitRef("V", 0, 0), CircuitRef("V", 0, 0)])
    with pytest.raises(PreconditionError):
        cap_off(special_a, [RegionSlotRef(0, 0)])
    with pytest.raises(PreconditionError):
        cap_off(special_a, [CircuitRef("V", 3, 0)])


def test_submodel_frees_cut_slots(composite):
    side = submodel(composite, {("R", 1), ("V", 1), ("R", 2), ("R", 3)})
    assert len(side.vertex_pieces) == 1
    assert side.regions[0].slots[0] == FREE
    assert side.regions[0].slots[1].ref == CircuitRef("V", 0, 1)
    assert homology_profile(side).acyclic


def test_disjoint_union_shifts_references(special_a):
    union = disjoint_union(special_a, y12_assembly())
    assert union.component_count() == 2
    assert union.regions[2].slots[0].ref == CircuitRef("C", 0, 0)
    assert homology_profile(union).betti[0] == 2


def test_structure_graph_links_regions_to_pieces(composite):
    g = composite.structure_graph()
    assert g.degree(("V", 0)) == 2
    assert g.degree(("V", 1)) == 3
    assert g.degree(("R", 1)) == 2
    assert composite.component_count() == 1
