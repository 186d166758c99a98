"""
Splitting a closed acyclic model along the boundary of one vertex piece,
and the planarity checks that acyclicity forces on regions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import networkx as nx

from core.errors import InvariantViolation, PreconditionError
from core.homology import HomologyProfile, homology_profile
from core.polyhedron import PolyhedronModel, submodel
from utils.logger import get_logger

log = get_logger(__name__)


@dataclass(frozen=True)
class SplitComponent:
    circuit: int                # circuit of the split piece this component meets
    model: PolyhedronModel
    profile: HomologyProfile
    vertex_count: int

    @property
    def kind(self) -> str:
        if self.profile.acyclic:
            return "acyclic"
        if self.profile.homology_circle:
            return "homology_circle"
        return "other"


@dataclass(frozen=True)
class DecompositionReport:
    piece_index: int
    vertex_count: int           # n
    boundary_count: int         # m
    piece: PolyhedronModel      # X' with all of its circuits free
    components: Tuple[SplitComponent, ...]

    @property
    def acyclic_count(self) -> int:
        return sum(1 for c in self.components if c.kind == "acyclic")

    @property
    def circle_count(self) -> int:
        return sum(1 for c in self.components if c.kind == "homology_circle")


def far_side(model: PolyhedronModel, node: Tuple[str, int], region: int, slot: int) -> set:
    """
    Nodes of the structure graph reached from `region` once the attachment
    (region, slot) -> node is cut. Raises if the cut does not separate.
    """
    g = model.structure_graph()
    g.remove_edge(("R", region), node, key=(region, slot))
    side = nx.node_connected_component(g, ("R", region))
    if node in side:
        raise InvariantViolation(
            f"boundary curve at region {region} slot {slot} does not separate the model"
        )
    return side


def split_along_slots(model: PolyhedronModel, piece_index: int,
                      profile: Optional[HomologyProfile] = None) -> DecompositionReport:
    if not model.is_closed():
        raise PreconditionError("split_along_slots needs a closed model")
    if not 0 <= piece_index < len(model.vertex_pieces):
        raise PreconditionError(f"no vertex piece {piece_index}")
    profile = profile or homology_profile(model)
    if not profile.acyclic:
        raise PreconditionError(f"model is not acyclic ({profile.render()})")

    node = ("V", piece_index)
    n = model.vertex_pieces[piece_index].vertex_count
    m = model.circuit_count("V", piece_index)
    attachments = model.attachments

    components = []
    for c in range(m):
        region, slot = attachments[(("V", piece_index, c))]
        side = far_side(model, node, region, slot)
        part = submodel(model, side)
        components.append(SplitComponent(c, part, homology_profile(part), part.vertex_count))

    report = DecompositionReport(
        piece_index, n, m, submodel(model, {node}), tuple(components)
    )
    log.debug("[SPLIT] piece %d: n=%d m=%d acyclic=%d circle=%d",
              piece_index, n, m, report.acyclic_count, report.circle_count)

    if any(c.kind == "other" for c in components):
        raise InvariantViolation("complementary component neither acyclic nor a homology circle")
    if report.acyclic_count != n + 1 or report.circle_count != m - n - 1:
        raise InvariantViolation(
            f"expected {n + 1} acyclic and {m - n - 1} homology-circle components, "
            f"got {report.acyclic_count} and {report.circle_count}"
        )
    for c in components:
        if c.kind == "homology_circle" and c.vertex_count == 0:
            raise InvariantViolation(f"homology-circle component at circuit {c.circuit} has no vertex")
    return report


@dataclass(frozen=True)
class PlanarityReport:
    nonplanar_regions: Tuple[int, ...]
    acyclic: bool
    vertexless: bool
    has_boundary: bool

    @property
    def ok(self) -> bool:
        return not self.nonplanar_regions


def regions_planarity_check(model: PolyhedronModel,
                            profile: Optional[HomologyProfile] = None) -> PlanarityReport:
    """
    Lists regions that are not spheres with holes. An acyclic model must have
    none, and an acyclic model without vertices must have boundary.
    """
    profile = profile or homology_profile(model)
    nonplanar = tuple(r for r, region in enumerate(model.regions) if not region.is_planar)
    report = PlanarityReport(
        nonplanar_regions=nonplanar,
        acyclic=profile.acyclic,
        vertexless=model.vertex_count == 0,
        has_boundary=not model.is_closed(),
    )
    if report.acyclic and nonplanar:
        raise InvariantViolation(f"acyclic model has non-planar regions {list(nonplanar)}")
    if report.acyclic and report.vertexless and not report.has_boundary:
        raise InvariantViolation("acyclic model without vertices has empty boundary")
    return report
