import itertools
import random

import pytest

from core import config, enumeration
from core.enumeration import (
    Catalog,
    _gluing,
    canonical_form,
    classify_catalog,
    decode_key,
    enumerate_singular_graphs,
    enumerate_special,
    make_record,
    propagate_labels,
)
from core.errors import EnumerationLimitError, InvariantViolation, PreconditionError
from core.polyhedron import SingularGraph, VertexPiece
from tests.builders import TWO_LOOPS
from tests.oracles import all_matchings, burnside_histogram, orbit_key, stabilizer, wing_matching

DOUBLED_TRIANGLE = SingularGraph(3, (
    ((0, 0), (1, 0)), ((0, 1), (1, 1)),
    ((1, 2), (2, 0)), ((1, 3), (2, 1)),
    ((2, 2), (0, 2)), ((2, 3), (0, 3)),
))


def _random_relabeling(rng, n):
    vperm = list(range(n))
    rng.shuffle(vperm)
    return vperm, [rng.sample(range(4), 4) for _ in range(n)]


def _same_partition(pieces, key_a, key_b):
    """Two keyings induce the same equivalence relation on pieces."""
    pairs = {(key_a(p), key_b(p)) for p in pieces}
    return len(pairs) == len({a for a, _ in pairs}) == len({b for _, b in pairs})


def test_singular_graph_counts():
    assert len(enumerate_singular_graphs(1)) == 1
    graphs = enumerate_singular_graphs(2)
    assert len(graphs) == 2
    loop_counts = sorted(len(g.loops()) for g in graphs)
    assert loop_counts == [0, 2]


def test_singular_graphs_need_a_vertex():
    with pytest.raises(PreconditionError):
        enumerate_singular_graphs(0)
    with pytest.raises(PreconditionError):
        enumerate_special(0)


# ─── canonical form ──────────────────────────────────────────────────────────

def test_canonical_form_ignores_relabeling_and_edge_direction(piece_a):
    key = canonical_form(piece_a)
    assert canonical_form(piece_a.relabeled((0,), ((2, 0, 3, 1),))) == key
    assert canonical_form(piece_a.reversed_edge(0)) == key
    assert canonical_form(piece_a.reversed_edge(1).relabeled((0,), ((1, 3, 0, 2),))) == key


def test_canonical_form_separates_the_two_pieces(piece_a, piece_b):
    assert canonical_form(piece_a) != canonical_form(piece_b)


def test_propagated_labels_are_permutations():
    rng = random.Random(3)
    piece = VertexPiece(DOUBLED_TRIANGLE, _gluing(DOUBLED_TRIANGLE, [rng.randrange(6) for _ in range(6)]))
    new_id, legs = propagate_labels(piece, 2, (3, 1, 0, 2))
    assert new_id[2] == 0
    assert sorted(new_id) == [0, 1, 2]
    assert all(sorted(l) == [0, 1, 2, 3] for l in legs)


def test_three_vertex_keys_survive_relabeling():
    rng = random.Random(11)
    for _ in range(20):
        piece = VertexPiece(DOUBLED_TRIANGLE, _gluing(DOUBLED_TRIANGLE, [rng.randrange(6) for _ in range(6)]))
        key = canonical_form(piece)
        other = piece.reversed_edge(rng.randrange(6)).relabeled(*_random_relabeling(rng, 3))
        assert canonical_form(other) == key
        assert canonical_form(decode_key(key)) == key


def test_one_vertex_gluings_fall_into_eleven_classes():
    keys = {
        canonical_form(VertexPiece(TWO_LOOPS, _gluing(TWO_LOOPS, choice)))
        for choice in itertools.product(range(6), repeat=2)
    }
    assert len(keys) == 11


def test_one_vertex_keys_match_explicit_orbits():
    group = stabilizer(TWO_LOOPS)
    pieces = [VertexPiece(TWO_LOOPS, _gluing(TWO_LOOPS, c)) for c in itertools.product(range(6), repeat=2)]
    assert _same_partition(pieces, canonical_form, lambda p: orbit_key(wing_matching(p), group))


@pytest.mark.slow
def test_two_vertex_keys_match_explicit_orbits():
    for graph in enumerate_singular_graphs(2):
        group = stabilizer(graph)
        pieces = [
            VertexPiece(graph, _gluing(graph, c))
            for c in itertools.product(range(6), repeat=graph.edge_count)
        ]
        assert _same_partition(pieces, canonical_form, lambda p: orbit_key(wing_matching(p), group))


def test_decode_key_returns_a_member_of_the_class(piece_a):
    key = canonical_form(piece_a)
    piece = decode_key(key)
    assert canonical_form(piece) == key
    with pytest.raises(PreconditionError):
        decode_key(key[:-1])


# ─── census ──────────────────────────────────────────────────────────────────

def test_one_vertex_census(catalog_n1):
    assert len(catalog_n1) == 11
    assert catalog_n1.histogram == {1: 2, 2: 5, 3: 3, 4: 1}
    assert catalog_n1.histogram_row() == [2, 5, 3, 1]
    for rec in catalog_n1.records:
        assert rec.euler_characteristic == rec.region_count - 1
        assert rec.model().is_special()
    assert catalog_n1.labels()[:3] == ["n1r1.1", "n1r1.2", "n1r2.1"]


def test_one_vertex_census_matches_burnside(catalog_n1):
    assert burnside_histogram(TWO_LOOPS) == catalog_n1.histogram
    assert sum(1 for _ in all_matchings(TWO_LOOPS)) == 36


def test_census_is_independent_of_job_count(catalog_n1, monkeypatch):
    monkeypatch.setattr(config, "CHUNK_SIZE", 7)
    parallel = enumerate_special(1, jobs=2)
    assert [r.key for r in parallel.records] == [r.key for r in catalog_n1.records]


def test_chunked_serial_census_matches(catalog_n1):
    graph = enumerate_singular_graphs(1)[0]
    total = 6 ** graph.edge_count
    keys = set()
    for start in range(0, total, 5):
        keys |= enumeration._census_chunk(graph, start, min(start + 5, total), config.ORBIT_CAP)
    assert keys == {r.key for r in catalog_n1.records}


def test_orbit_cap_stops_the_census():
    with pytest.raises(EnumerationLimitError) as excinfo:
        enumerate_special(1, jobs=1, cap=5)
    assert excinfo.value.cap == 5


def test_vertex_count_guard_fires_before_any_work(monkeypatch):
    monkeypatch.setattr(enumeration, "enumerate_singular_graphs", lambda n: pytest.fail("graphs built"))
    with pytest.raises(EnumerationLimitError) as excinfo:
        enumerate_special(config.MAX_CENSUS_VERTICES + 1)
    assert excinfo.value.what == "vertex count"


def test_gluing_space_guard(monkeypatch):
    monkeypatch.setattr(config, "MAX_GLUINGS", 35)
    monkeypatch.setattr(enumeration, "_census_chunk", lambda *a: pytest.fail("gluings visited"))
    with pytest.raises(EnumerationLimitError) as excinfo:
        enumerate_special(1)
    assert excinfo.value.what == "gluing space"
    assert "35" in str(excinfo.value)


def test_catalog_rejects_unsorted_or_duplicate_records(catalog_n1):
    first, second = catalog_n1.records[0], catalog_n1.records[-1]
    with pytest.raises(InvariantViolation):
        Catalog(1, (second, first))
    with pytest.raises(InvariantViolation):
        Catalog(1, (first, first))


def test_make_record_carries_profile(piece_a):
    rec = make_record(canonical_form(piece_a))
    assert rec.acyclic
    assert rec.region_count == 2
    assert rec.canceling is None
    assert bytes.fromhex(rec.key_hex) == rec.key


# ─── classification ──────────────────────────────────────────────────────────

def test_classify_one_vertex(catalog_n1):
    report = classify_catalog(catalog_n1)
    assert report.total == 11
    assert report.acyclic_count == 2
    assert report.acyclic_by_regions == {2: 2}
    assert all(catalog_n1.records[i].region_count == 2 for i in report.acyclic_indices)
    assert report.histogram == catalog_n1.histogram


def test_classify_empty_catalog():
    report = classify_catalog(Catalog(3))
    assert (report.total, report.acyclic_count, report.homology_circle_count) == (0, 0, 0)
    assert report.acyclic_indices == ()
    assert report.histogram == {}


@pytest.mark.slow
def test_two_vertex_census(catalog_n2):
    assert len(catalog_n2) == 173
    assert catalog_n2.histogram_row() == [36, 59, 51, 21, 5, 1]
    by_graph = {}
    for rec in catalog_n2.records:
        loops = len(rec.piece.graph.loops())
        by_graph.setdefault(loops, {}).setdefault(rec.region_count, 0)
        by_graph[loops][rec.region_count] += 1
    for graph in enumerate_singular_graphs(2):
        assert burnside_histogram(graph) == by_graph[len(graph.loops())]
    assert sum(by_graph[2].values()) == 116
    assert sum(by_graph[0].values()) == 57


@pytest.mark.slow
def test_two_vertex_classification(catalog_n2):
    report = classify_catalog(catalog_n2)
    assert report.acyclic_count == 17
    assert report.acyclic_by_regions == {3: 17}
