"""
Cellular chain complex of a polyhedron model and integral homology.

Cell structure
--------------
0-cells  ("vertex", i, v)     singular vertex v of vertex piece i
         ("core", j)          base point of circle piece j
         ("centre", r)        interior point of a non-direct region r
         ("rim", r, s)        base point of free boundary slot s of region r
1-cells  ("edge", i, e)       singular edge, oriented end a -> end b
         ("core", j)          core circle of circle piece j
         ("spoke", r, s)      centre of r -> base point of slot s
         ("rim", r, s)        the free boundary circle itself
         ("handle", r, k, "a"|"b")   orientable genus loops at the centre
         ("crosscap", r, k)   crosscap loops at the centre
2-cells  ("region", r)

A direct region (disk on one attached circuit) gets no auxiliary cells and
its 2-cell is glued straight along the circuit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core import config
from core.errors import ArithmeticOverflowError, InternalConsistencyError
from core.polyhedron import CircuitRef, PolyhedronModel, euler_characteristic
from utils.logger import get_logger

log = get_logger(__name__)

CellLabel = Tuple


@dataclass(frozen=True, eq=False)
class ChainComplex:
    boundary_1: np.ndarray          # (#0-cells) x (#1-cells)
    boundary_2: np.ndarray          # (#1-cells) x (#2-cells)
    cells_0: Tuple[CellLabel, ...]
    cells_1: Tuple[CellLabel, ...]
    cells_2: Tuple[CellLabel, ...]

    @property
    def cell_counts(self) -> Tuple[int, int, int]:
        return len(self.cells_0), len(self.cells_1), len(self.cells_2)

    def index_1(self, label: CellLabel) -> int:
        return self.cells_1.index(label)


class _Builder:
    def __init__(self):
        self.cells_0: List[CellLabel] = []
        self.cells_1: List[CellLabel] = []
        self.idx_0: Dict[CellLabel, int] = {}
        self.idx_1: Dict[CellLabel, int] = {}
        self.d1: Dict[Tuple[int, int], int] = {}
        self.columns: List[Dict[int, int]] = []

    def cell_0(self, label: CellLabel) -> int:
        self.idx_0[label] = len(self.cells_0)
        self.cells_0.append(label)
        return self.idx_0[label]

    def cell_1(self, label: CellLabel, tail: Optional[int] = None, head: Optional[int] = None) -> int:
        col = len(self.cells_1)
        self.idx_1[label] = col
        self.cells_1.append(label)
        if tail is not None and head is not None and tail != head:
            self.d1[(head, col)] = self.d1.get((head, col), 0) + 1
            self.d1[(tail, col)] = self.d1.get((tail, col), 0) - 1
        return col


def circuit_chain(model: PolyhedronModel, ref: CircuitRef,
                  edge_index: Dict[CellLabel, int]) -> Dict[int, int]:
    """1-chain of a boundary circuit, keyed by 1-cell column."""
    chain: Dict[int, int] = {}
    if ref.kind == "C":
        col = edge_index[("core", ref.piece)]
        chain[col] = model.circle_pieces[ref.piece].wraps[ref.circuit]
        return chain
    for t in model.circuit(ref).traversals:
        col = edge_index[("edge", ref.piece, t.edge)]
        chain[col] = chain.get(col, 0) + (1 if t.forward else -1)
    return chain


def _base_point(model: PolyhedronModel, ref: CircuitRef, vertex_index: Dict[CellLabel, int]) -> int:
    if ref.kind == "C":
        return vertex_index[("core", ref.piece)]
    piece = model.vertex_pieces[ref.piece]
    return vertex_index[("vertex", ref.piece, model.circuit(ref).start_vertex(piece))]


def build_chain_complex(model: PolyhedronModel) -> ChainComplex:
    b = _Builder()

    for i, piece in enumerate(model.vertex_pieces):
        for v in range(piece.vertex_count):
            b.cell_0(("vertex", i, v))
    for j in range(len(model.circle_pieces)):
        b.cell_0(("core", j))
    for i, piece in enumerate(model.vertex_pieces):
        for e, (a, h) in enumerate(piece.graph.edges):
            b.cell_1(("edge", i, e), b.idx_0[("vertex", i, a[0])], b.idx_0[("vertex", i, h[0])])
    for j in range(len(model.circle_pieces)):
        b.cell_1(("core", j))

    for r, region in enumerate(model.regions):
        column: Dict[int, int] = {}

        def add(chain: Dict[int, int], sign: int) -> None:
            for col, val in chain.items():
                column[col] = column.get(col, 0) + sign * val

        if region.is_direct:
            slot = region.slots[0]
            add(circuit_chain(model, slot.ref, b.idx_1), slot.sign)
        else:
            centre = b.cell_0(("centre", r))
            for s, slot in enumerate(region.slots):
                if slot.is_free:
                    rim = b.cell_0(("rim", r, s))
                    b.cell_1(("spoke", r, s), centre, rim)
                    add({b.cell_1(("rim", r, s)): 1}, 1)
                else:
                    b.cell_1(("spoke", r, s), centre, _base_point(model, slot.ref, b.idx_0))
                    add(circuit_chain(model, slot.ref, b.idx_1), slot.sign)
            if region.orientable:
                for k in range(region.genus):
                    b.cell_1(("handle", r, k, "a"))
                    b.cell_1(("handle", r, k, "b"))
            else:
                for k in range(region.genus):
                    add({b.cell_1(("crosscap", r, k)): 2}, 1)
        b.columns.append(column)

    n0, n1, n2 = len(b.cells_0), len(b.cells_1), len(b.columns)
    d1 = np.zeros((n0, n1), dtype=np.int64)
    for (row, col), val in b.d1.items():
        d1[row, col] = val
    d2 = np.zeros((n1, n2), dtype=np.int64)
    for col, column in enumerate(b.columns):
        for row, val in column.items():
            d2[row, col] = val

    cc = ChainComplex(d1, d2, tuple(b.cells_0), tuple(b.cells_1),
                      tuple(("region", r) for r in range(n2)))
    if n0 and n2 and np.any(d1 @ d2):
        raise InternalConsistencyError("boundary_1 . boundary_2 != 0")
    return cc


# ─── SMITH NORMAL FORM ───────────────────────────────────────────────────────

def smith_normal_form(m, mode: Optional[str] = None) -> Tuple[List[int], int]:
    """
    Invariant factors d1 | d2 | ... | dr (positive) and rank of an integer matrix.
    Exact python-int arithmetic; mode="checked" bounds every entry by
    CHECKED_INT_BOUND and raises instead of growing.
    """
    mode = mode or config.SNF_MODE
    a = [[int(x) for x in row] for row in np.asarray(m, dtype=object).tolist()] if np.size(m) else []
    rows = len(a)
    cols = len(a[0]) if rows else 0
    bound = config.CHECKED_INT_BOUND if mode == "checked" else None

    def guard(vals: Sequence[int]) -> None:
        if bound is None:
            return
        for x in vals:
            if abs(x) > bound:
                raise ArithmeticOverflowError(x, bound)

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]

    def swap_cols(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, q: int) -> None:
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        guard(a[dst])

    def add_col(dst: int, src: int, q: int) -> None:
        for row in a:
            row[dst] += q * row[src]
        guard([row[dst] for row in a])

    factors: List[int] = []
    t = 0
    while t < min(rows, cols):
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])

        while True:
            p = a[t][t]
            clean = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    clean = clean and a[t][j] == 0
            if not clean:
                # move the smallest leftover of row/column t onto the diagonal
                best, where = abs(p), None
                for i in range(t + 1, rows):
                    if a[i][t] and abs(a[i][t]) < best:
                        best, where = abs(a[i][t]), ("r", i)
                for j in range(t + 1, cols):
                    if a[t][j] and abs(a[t][j]) < best:
                        best, where = abs(a[t][j]), ("c", j)
                if where is not None:
                    (swap_rows if where[0] == "r" else swap_cols)(t, where[1])
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)

        factors.append(abs(a[t][t]))
        t += 1
    return factors, len(factors)


def gf2_rank(m) -> int:
    """Rank over Z/2."""
    a = (np.asarray(m, dtype=np.int64) % 2).astype(np.uint8)
    if a.size == 0:
        return 0
    rank = 0
    rows, cols = a.shape
    for c in range(cols):
        hits = np.nonzero(a[rank:, c])[0]
        if hits.size == 0:
            continue
        pivot = rank + hits[0]
        a[[rank, pivot]] = a[[pivot, rank]]
        below = np.nonzero(a[:, c])[0]
        for r in below:
            if r != rank:
                a[r] ^= a[rank]
        rank += 1
        if rank == rows:
            break
    return rank


# ─── HOMOLOGY ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class HomologyProfile:
    betti: Tuple[int, int, int]
    torsion_1: Tuple[int, ...] = ()
    torsion_2: Tuple[int, ...] = ()

    @property
    def acyclic(self) -> bool:
        return self.betti == (1, 0, 0) and not self.torsion_1 and not self.torsion_2

    @property
    def homology_circle(self) -> bool:
        return self.betti == (1, 1, 0) and not self.torsion_1 and not self.torsion_2

    @property
    def euler_characteristic(self) -> int:
        b0, b1, b2 = self.betti
        return b0 - b1 + b2

    def render(self) -> str:
        t1 = ",".join(map(str, self.torsion_1)) or "-"
        t2 = ",".join(map(str, self.torsion_2)) or "-"
        return f"betti={','.join(map(str, self.betti))} t1={t1} t2={t2}"


def profile_of_complex(cc: ChainComplex) -> HomologyProfile:
    n0, n1, n2 = cc.cell_counts
    _, rank_1 = smith_normal_form(cc.boundary_1)
    factors_2, rank_2 = smith_normal_form(cc.boundary_2)
    betti = (n0 - rank_1, n1 - rank_1 - rank_2, n2 - rank_2)
    return HomologyProfile(betti, tuple(sorted(d for d in factors_2 if d > 1)), ())


def homology_profile(model: PolyhedronModel) -> HomologyProfile:
    profile = profile_of_complex(build_chain_complex(model))
    if profile.betti[0] != model.component_count():
        raise InternalConsistencyError(
            f"b0={profile.betti[0]} but model has {model.component_count()} components"
        )
    chi = euler_characteristic(model)
    if profile.euler_characteristic != chi:
        raise InternalConsistencyError(
            f"euler characteristic {chi} disagrees with betti numbers {profile.betti}"
        )
    log.debug("[HOMOLOGY] %s", profile.render())
    return profile


def mod2_betti_1(cc: ChainComplex) -> int:
    return cc.cell_counts[1] - gf2_rank(cc.boundary_1) - gf2_rank(cc.boundary_2)

