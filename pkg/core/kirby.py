"""
Gleams, shadow gluing and abstract Kirby data.

Gleams are half-integers stored doubled. A Kirby diagram is kept only as
incidence data: for every framed component, how often (geometric) and with
which algebraic sign it passes each dotted circle.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, List, Tuple

from core.cancellation import CancelingSequence, MaximalTree, incidence, signed_incidence
from core.errors import (
    InternalConsistencyError,
    KirbySimplificationError,
    PreconditionError,
)
from core.polyhedron import PolyhedronModel, RegionSlotRef, SurfaceRegion, disjoint_union
from utils.logger import get_logger

log = get_logger(__name__)


def parse_gleam(text: str) -> int:
    """'3/2' -> 3, '-1' -> -2. Rejects anything that is not a half-integer."""
    try:
        doubled = Fraction(text.strip()) * 2
    except (ValueError, ZeroDivisionError) as e:
        raise PreconditionError(f"bad gleam {text!r}") from e
    if doubled.denominator != 1:
        raise PreconditionError(f"gleam {text!r} is not a half-integer")
    return int(doubled)


def format_gleam(doubled: int) -> str:
    return str(doubled // 2) if doubled % 2 == 0 else f"{doubled}/2"


@dataclass(frozen=True)
class ShadowedPolyhedron:
    model: PolyhedronModel
    gleams: Tuple[int, ...]         # doubled, one per region

    def __post_init__(self):
        object.__setattr__(self, "gleams", tuple(int(g) for g in self.gleams))
        if len(self.gleams) != self.model.region_count:
            raise PreconditionError(
                f"{len(self.gleams)} gleams for {self.model.region_count} regions"
            )


# ─── KIRBY DATA ──────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class KirbyComponent:
    name: int                                   # region id it came from
    framing: int                                # doubled
    tags: Tuple[str, ...] = ()
    incidence: Tuple[Tuple[int, int, int], ...] = ()   # (dotted id, geometric, signed)

    def geo(self, u: int) -> int:
        return next((g for d, g, _ in self.incidence if d == u), 0)

    def signed(self, u: int) -> int:
        return next((s for d, _, s in self.incidence if d == u), 0)

    def render(self) -> str:
        inc = ",".join(f"({u},{g},{s})" for u, g, s in self.incidence)
        return f"C{self.name} framing={self.framing}/2 tags=[{','.join(self.tags)}] inc=[{inc}]"


@dataclass(frozen=True)
class KirbyData:
    components: Tuple[KirbyComponent, ...]
    dotted: Tuple[int, ...]                     # non-tree edge ids

    @property
    def is_terminal(self) -> bool:
        return len(self.components) == 1 and len(self.dotted) == 1

    def component(self, name: int) -> KirbyComponent:
        for c in self.components:
            if c.name == name:
                return c
        raise PreconditionError(f"no component C{name}")

    def total_geometric(self) -> int:
        return sum(g for c in self.components for _, g, _ in c.incidence)

    def render(self) -> str:
        lines = [c.render() for c in self.components] + [f"U{u}" for u in self.dotted]
        return "\n".join(lines) + "\n"


def _row(geo: Dict[int, int], signed: Dict[int, int], dotted) -> Tuple[Tuple[int, int, int], ...]:
    return tuple(
        (u, geo.get(u, 0), signed.get(u, 0))
        for u in dotted if geo.get(u, 0) or signed.get(u, 0)
    )


def shadow_to_kirby(x: ShadowedPolyhedron, t: MaximalTree) -> KirbyData:
    """One framed component per region, one dotted circle per edge outside the tree."""
    model = x.model
    if not model.is_special() or not model.is_closed() or not model.vertex_pieces:
        raise PreconditionError("shadow_to_kirby needs a closed special model with vertices")
    dotted = tuple(e for e in range(model.vertex_pieces[0].edge_count) if e not in t)
    geo, signed = incidence(model), signed_incidence(model)
    components = tuple(
        KirbyComponent(r, x.gleams[r], (), _row(geo[r], signed[r], dotted))
        for r in range(model.region_count)
    )
    k = KirbyData(components, dotted)
    for u in dotted:
        if sum(c.geo(u) for c in components) != 3:
            raise InternalConsistencyError(f"dotted circle U{u} does not meet three strands")
    log.debug("[KIRBY] emitted %d components, %d dotted circles", len(components), len(dotted))
    return k


def cancel_handle_pair(k: KirbyData, u: int, c: int) -> KirbyData:
    """
    Cancel dotted circle u against component c. Every other component slides
    over c once per pass through u: geometric counts add, and each copy adds
    c's signed row with the orientation that cancels the pass.
    """
    if u not in k.dotted:
        raise PreconditionError(f"no dotted circle U{u}")
    comp = k.component(c)
    if comp.geo(u) != 1:
        raise PreconditionError(f"C{c} passes U{u} {comp.geo(u)} times, expected 1")
    s_cu = comp.signed(u)
    dotted = tuple(d for d in k.dotted if d != u)

    out: List[KirbyComponent] = []
    for other in k.components:
        if other.name == c:
            continue
        m, s = other.geo(u), other.signed(u)
        geo = {d: other.geo(d) + m * comp.geo(d) for d in dotted}
        signed = {d: other.signed(d) - s * s_cu * comp.signed(d) for d in dotted}
        tags = other.tags + comp.tags if m else other.tags
        out.append(replace(other, tags=tags, incidence=_row(geo, signed, dotted)))
    return KirbyData(tuple(out), dotted)


def simplify_kirby(k: KirbyData, witness: CancelingSequence) -> KirbyData:
    for step, (edge, region) in enumerate(witness.pairs, start=1):
        try:
            k = cancel_handle_pair(k, edge, region)
        except PreconditionError as e:
            raise KirbySimplificationError(step, str(e)) from e
    log.debug("[KIRBY] simplified to %d components, %d dotted (terminal=%s)",
              len(k.components), len(k.dotted), k.is_terminal)
    return k


def attach_external_summand(k: KirbyData, c: int, label: str) -> KirbyData:
    """Record a connected summand K on component c; it links no dotted circle."""
    comp = k.component(c)
    return replace(k, components=tuple(
        replace(comp, tags=comp.tags + (label,)) if other.name == c else other
        for other in k.components
    ))


# ─── GLUING SHADOWS ──────────────────────────────────────────────────────────

def _merge_regions(ra: SurfaceRegion, rb: SurfaceRegion, slots) -> SurfaceRegion:
    chi = ra.euler_characteristic() + rb.euler_characteristic()
    orientable = ra.orientable and rb.orientable
    deficit = 2 - len(slots) - chi
    return SurfaceRegion(deficit // 2 if orientable else deficit, orientable, tuple(slots))


def glue_shadows_along_knots(a: ShadowedPolyhedron, ka: RegionSlotRef,
                             b: ShadowedPolyhedron, kb: RegionSlotRef) -> ShadowedPolyhedron:
    """Identify two free boundary circles; the adjacent regions merge and their gleams add."""
    for name, model, ref in (("first", a.model, ka), ("second", b.model, kb)):
        ref = RegionSlotRef(*ref)
        if not (0 <= ref.region < model.region_count
                and 0 <= ref.slot < len(model.regions[ref.region].slots)):
            raise PreconditionError(f"{name} shadow has no region slot {tuple(ref)}")
        if not model.regions[ref.region].slots[ref.slot].is_free:
            raise PreconditionError(f"{name} shadow slot {tuple(ref)} is not free")

    union = disjoint_union(a.model, b.model)
    ra_index = ka[0]
    rb_index = a.model.region_count + kb[0]
    ra, rb = union.regions[ra_index], union.regions[rb_index]
    slots = [s for i, s in enumerate(ra.slots) if i != ka[1]] + \
            [s for i, s in enumerate(rb.slots) if i != kb[1]]
    merged = _merge_regions(ra, rb, slots)

    regions, gleams = [], []
    all_gleams = a.gleams + b.gleams
    for r, region in enumerate(union.regions):
        if r == rb_index:
            continue
        if r == ra_index:
            regions.append(merged)
            gleams.append(all_gleams[ra_index] + all_gleams[rb_index])
        else:
            regions.append(region)
            gleams.append(all_gleams[r])
    log.debug("[KIRBY] glued regions %d and %d, gleam %s", ra_index, rb_index,
              format_gleam(gleams[ra_index]))
    return ShadowedPolyhedron(replace(union, regions=tuple(regions)), tuple(gleams))
