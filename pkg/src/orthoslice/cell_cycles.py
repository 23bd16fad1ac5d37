"""Arcs between node points, their two adjacent cells, and per-cell cycle
extraction into spatial polygons.

Every clipped contour is cut at its node-point-bearing vertices into arcs.
An arc lives in one lattice cell of its plane and is adjacent to exactly
the two 3D cells on either side of that plane over the lattice cell.  Cells
then partition their incident arcs into cycles by degree-2 walking; each
cycle is a spatial polygon whose geometry stays inside the cell, and every
arc ends up in exactly two polygons (one per adjacent cell) — the
watertightness precursor.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import NonManifoldJunction, UnpairedInput
from .geometry import AXES, Axis, ContourId, Grid
from .node_points import ClippedContour, NodePoint, UnpairedRegistration

Cell = tuple[int, int, int]


@dataclass(frozen=True)
class Arc:
    """A contour piece between two consecutive node points."""

    id: int
    contour: ContourId
    start_vertex: int
    end_vertex: int
    head: int  # node-point id at start_vertex
    tail: int  # node-point id at end_vertex
    cells: tuple[Cell, Cell]
    points: np.ndarray  # (k, 3): head position, interior vertices, tail position

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class ArcGraph:
    """Node points joined by contour arcs, with per-cell incidence."""

    node_points: tuple[NodePoint, ...]
    arcs: tuple[Arc, ...]
    cell_arcs: dict[Cell, tuple[int, ...]]
    orphan_contours: tuple[ContourId, ...]


@dataclass(frozen=True)
class SpatialPolygon:
    """A closed cycle of arcs inside one cell."""

    cell: Cell
    arcs: tuple[tuple[int, int], ...]  # (arc id, +1 forward / -1 reversed)
    boundary: np.ndarray  # (m, 3) loop points, junctions deduplicated
    in_cell: bool  # geometric containment check result (epsilon slack)

    def __post_init__(self):
        b = np.ascontiguousarray(np.asarray(self.boundary, dtype=float))
        b.flags.writeable = False
        object.__setattr__(self, "boundary", b)

    @property
    def size(self) -> int:
        return len(self.arcs)


def _cells_for_arc(
    axis: Axis, plane_index: int, in_plane_cell: tuple[int, int]
) -> tuple[Cell, Cell]:
    iu, iv = in_plane_cell
    base = {axis.u_axis: iu, axis.v_axis: iv}
    below = dict(base)
    below[axis] = plane_index
    above = dict(base)
    above[axis] = plane_index + 1
    mk = lambda d: (d[Axis.X], d[Axis.Y], d[Axis.Z])
    return mk(below), mk(above)


def build_arc_graph(
    clipped: list[ClippedContour],
    node_points: list[NodePoint],
    grid: Grid,
    unpaired: list[UnpairedRegistration] | None = None,
    allow_unpaired: bool = False,
    merge_tolerance: float | None = None,
) -> ArcGraph:
    """Cut every clipped contour at its node points into tagged arcs.

    Raises :class:`UnpairedInput` unless pairing was complete or
    ``allow_unpaired`` is set (unpaired crossings are then treated as plain
    interior vertices, degrading geometry but keeping the graph usable).
    Contours without any node point become orphan reports, not errors.

    When the surface passes through a point where three grid planes meet,
    the three contours there cross pairwise within sampling error, leaving a
    cycle of near-coincident node points joined by interior-free micro arcs.
    Such cycles are fused into one junction (see
    :func:`_merge_singular_junctions`); ``merge_tolerance`` defaults to an
    eighth of the pairing tolerance.
    """
    if unpaired and not allow_unpaired:
        raise UnpairedInput(f"{len(unpaired)} unpaired registrations")

    np_by_ref: dict[tuple[ContourId, int], int] = {}
    for node in node_points:
        np_by_ref[(node.ref_a.contour, node.ref_a.vertex)] = node.id
        np_by_ref[(node.ref_b.contour, node.ref_b.vertex)] = node.id

    arcs: list[Arc] = []
    cell_arcs: dict[Cell, list[int]] = {}
    orphans: list[ContourId] = []
    positions = {node.id: node.position for node in node_points}

    for cc in sorted(clipped, key=lambda c: c.contour.id):
        cuts = [
            (i, np_by_ref[(cc.contour.id, i)])
            for i, v in enumerate(cc.vertices)
            if v.is_crossing and (cc.contour.id, i) in np_by_ref
        ]
        if not cuts:
            orphans.append(cc.contour.id)
            continue
        n = len(cc.vertices)
        for k, (i_start, np_start) in enumerate(cuts):
            i_end, np_end = cuts[(k + 1) % len(cuts)]
            cell2d = cc.vertices[i_start].cell_after
            cells = _cells_for_arc(cc.axis, cc.plane_index, cell2d)
            pts = [positions[np_start]]
            j = (i_start + 1) % n
            while j != i_end:
                p = cc.vertices[j].point
                p3 = cc.axis.to_world(p[0], p[1], cc.plane_coord)
                if p3 != pts[-1]:
                    pts.append(p3)
                j = (j + 1) % n
            if positions[np_end] != pts[-1] or len(pts) == 1:
                pts.append(positions[np_end])
            arc = Arc(
                len(arcs),
                cc.contour.id,
                i_start,
                i_end,
                np_start,
                np_end,
                cells,
                np.asarray(pts),
            )
            arcs.append(arc)

    if merge_tolerance is None:
        merge_tolerance = grid.pairing_tolerance / 8.0
    kept_nodes, arcs = _merge_singular_junctions(
        list(node_points), arcs, grid, merge_tolerance
    )

    for arc in arcs:
        for cell in arc.cells:
            cell_arcs.setdefault(cell, []).append(arc.id)
    return ArcGraph(
        tuple(kept_nodes),
        tuple(arcs),
        {c: tuple(a) for c, a in sorted(cell_arcs.items())},
        tuple(orphans),
    )


def _merge_singular_junctions(
    node_points: list[NodePoint], arcs: list[Arc], grid: Grid, tol: float
) -> tuple[list[NodePoint], list[Arc]]:
    """Fuse cycles of micro arcs into single junctions.

    A micro arc has no interior vertices and length at most ``tol``.  Only
    clusters where the micro arcs close a cycle are fused: that is the
    signature of the surface passing through a grid corner, where exact
    arithmetic would collapse all crossings to one point.  A lone micro arc
    (an ordinary close pass) is left alone, since fusing two genuinely
    distinct junctions would break the two-arcs-per-node structure.  Fused
    junction coordinates snap to grid planes within ``tol``, restoring the
    exact corner position.
    """
    micro = [
        a
        for a in arcs
        if len(a.points) == 2
        and float(np.linalg.norm(a.points[1] - a.points[0])) <= tol
        and a.head != a.tail
    ]
    if not micro:
        return node_points, arcs

    parent = {n.id: n.id for n in node_points}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in micro:
        ra, rb = find(a.head), find(a.tail)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    clusters: dict[int, list[int]] = {}
    for n in node_points:
        clusters.setdefault(find(n.id), []).append(n.id)
    arcs_per_cluster: dict[int, int] = {}
    for a in micro:
        arcs_per_cluster[find(a.head)] = arcs_per_cluster.get(find(a.head), 0) + 1

    by_id = {n.id: n for n in node_points}
    remap: dict[int, int] = {}
    new_pos: dict[int, tuple[float, float, float]] = {}
    for root, members in clusters.items():
        if len(members) < 2 or arcs_per_cluster.get(root, 0) < len(members):
            continue  # not a closed micro-arc cycle
        pts = np.asarray([by_id[m].position for m in members])
        center = pts.mean(axis=0)
        snapped = []
        for axis in AXES:
            c = float(center[axis.index])
            planes = grid.plane_coords(axis)
            j = int(np.argmin(np.abs(planes - c)))
            snapped.append(float(planes[j]) if abs(planes[j] - c) <= tol else c)
        for m in members:
            remap[m] = root
        new_pos[root] = (snapped[0], snapped[1], snapped[2])

    if not remap:
        return node_points, arcs

    nodes_out = []
    for n in node_points:
        if n.id in new_pos:
            nodes_out.append(replace(n, position=new_pos[n.id]))
        elif n.id in remap:
            continue  # absorbed into its cluster representative
        else:
            nodes_out.append(n)

    micro_ids = {a.id for a in micro}
    arcs_out: list[Arc] = []
    for a in arcs:
        head = remap.get(a.head, a.head)
        tail = remap.get(a.tail, a.tail)
        if a.id in micro_ids and a.head in remap and head == tail:
            continue  # fused away
        pts = np.asarray(a.points).copy()
        if head in new_pos:
            pts[0] = new_pos[head]
        if tail in new_pos:
            pts[-1] = new_pos[tail]
        arcs_out.append(
            Arc(
                len(arcs_out),
                a.contour,
                a.start_vertex,
                a.end_vertex,
                head,
                tail,
                a.cells,
                pts,
            )
        )
    return nodes_out, arcs_out


def classify_cells(ag: ArcGraph, grid: Grid) -> tuple[list[Cell], list[Cell]]:
    """Split all grid cells into surface-crossing (incident to at least one
    arc) and surface-passing (the rest)."""
    crossing = sorted(c for c, a in ag.cell_arcs.items() if a)
    crossing_set = set(crossing)
    passing = [c for c in grid.all_cells() if c not in crossing_set]
    return crossing, passing


def extract_cycles(
    ag: ArcGraph, grid: Grid, strict: bool = False
) -> tuple[list[SpatialPolygon], list[NonManifoldJunction]]:
    """Partition each cell's incident arcs into closed cycles.

    Within a cell every node point must touch exactly two of the cell's
    arcs; walking the unique continuation at every junction splits the arcs
    into cycles.  A violating cell is skipped and reported (or raises in
    strict mode).  Output order is (cell lexicographic, then smallest arc
    id), independent of the walk schedule.
    """
    polygons: list[SpatialPolygon] = []
    failures: list[NonManifoldJunction] = []
    eps = grid.epsilon

    for cell, arc_ids in ag.cell_arcs.items():
        incident: dict[int, list[int]] = {}
        for aid in arc_ids:
            arc = ag.arcs[aid]
            incident.setdefault(arc.head, []).append(aid)
            incident.setdefault(arc.tail, []).append(aid)
        bad = next(((n, a) for n, a in sorted(incident.items()) if len(a) != 2), None)
        if bad is not None:
            err = NonManifoldJunction(cell, bad[0], len(bad[1]))
            if strict:
                raise err
            failures.append(err)
            continue

        visited: set[int] = set()
        for seed in sorted(arc_ids):
            if seed in visited:
                continue
            cycle: list[tuple[int, int]] = []
            aid, direction = seed, +1
            while True:
                cycle.append((aid, direction))
                visited.add(aid)
                arc = ag.arcs[aid]
                node = arc.tail if direction > 0 else arc.head
                a, b = incident[node]
                nxt = b if a == aid else a
                if nxt == seed:
                    break
                nxt_arc = ag.arcs[nxt]
                direction = +1 if nxt_arc.head == node else -1
                aid = nxt
                if len(cycle) > len(arc_ids):  # unreachable under degree-2
                    raise NonManifoldJunction(cell, node, len(incident[node]))
            polygons.append(_make_polygon(ag, grid, cell, cycle, eps))

    polygons.sort(key=lambda p: (p.cell, min(a for a, _ in p.arcs)))
    return polygons, failures


def _make_polygon(ag: ArcGraph, grid: Grid, cell, cycle, eps) -> SpatialPolygon:
    pts: list[tuple[float, float, float]] = []
    for aid, direction in cycle:
        arc_pts = ag.arcs[aid].points
        seq = arc_pts if direction > 0 else arc_pts[::-1]
        for p in map(tuple, seq):
            if pts and p == pts[-1]:
                continue
            pts.append(p)
    if len(pts) > 1 and pts[-1] == pts[0]:
        pts.pop()
    boundary = np.asarray(pts)
    lo, hi = grid.cell_bounds(cell)
    in_cell = bool(
        np.all(boundary >= lo - eps) and np.all(boundary <= hi + eps)
    )
    return SpatialPolygon(cell, tuple(cycle), boundary, in_cell)
