"""Contour clipping against the in-plane lattice, edge registration, and
nearest-pair matching of registrations into node points.

Within its slice plane every contour sees a lattice: the lines where the
other two plane sets cut that plane.  Each segment is classified against
lattice-cell bounds by outcode-style interval tracking before any exact
intersection, so crossings are found cell by cell; each crossing lands on a
3D grid edge and is registered there.  An edge then holds registrations
from the two orthogonal contour families, and the nearest ones pair up into
node points.

Singular crossings (a vertex sitting on a lattice line, or a crossing at a
lattice corner) are collapsed deterministically: runs of on-line vertices
produce one crossing when the contour actually changes side and none when
it only touches, and the edge interval of a corner-adjacent crossing comes
from the traversal state immediately after the crossing, which is the
epsilon-forward snap along the contour.  ``snap_corners=False`` turns these
cases into hard :class:`CornerSingularity` errors instead.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import CornerSingularity, EdgeNotInGrid
from .geometry import (
    AXES,
    Axis,
    Contour,
    ContourId,
    Grid,
    GridEdgeId,
    other_axis,
)


@dataclass
class _Event:
    """One lattice-line crossing, ordered along the contour by seg + t."""

    seg: int
    t: float
    family: int  # 0 = crossed a u_axis plane, 1 = crossed a v_axis plane
    line: int  # plane index of the crossed line
    direction: int  # +1 toward higher coordinates
    at_vertex: bool
    point: tuple[float, float]
    edge: GridEdgeId | None = None
    t_edge: float = 0.0
    cell_after: tuple[int, int] | None = None

    @property
    def tau(self) -> float:
        return self.seg + self.t


@dataclass(frozen=True)
class ClippedVertex:
    """One vertex of the augmented contour.

    ``inserted`` marks vertices added by clipping; crossing-bearing vertices
    (inserted or original vertices that sit on a lattice line) carry the
    grid edge they registered on, the world coordinate ``t_edge`` along that
    edge, their 3D position, and the in-plane lattice cell entered after the
    crossing.
    """

    point: tuple[float, float]
    inserted: bool
    edge: GridEdgeId | None = None
    t_edge: float = 0.0
    position: tuple[float, float, float] | None = None
    cell_after: tuple[int, int] | None = None

    @property
    def is_crossing(self) -> bool:
        return self.edge is not None


@dataclass(frozen=True)
class ClippedContour:
    """A contour augmented with its lattice-line intersections.

    Removing the inserted vertices recovers the original vertex list
    exactly; crossings that coincide with original vertices are flagged in
    place rather than duplicated.
    """

    contour: Contour
    axis: Axis
    plane_index: int
    plane_coord: float
    vertices: tuple[ClippedVertex, ...]
    start_cell: tuple[int, int]

    def crossings(self) -> list[tuple[int, ClippedVertex]]:
        return [(i, v) for i, v in enumerate(self.vertices) if v.is_crossing]

    @property
    def n_insertions(self) -> int:
        return sum(1 for v in self.vertices if v.inserted)

    def original_vertices(self) -> np.ndarray:
        return np.asarray([v.point for v in self.vertices if not v.inserted])


def _edge_for_crossing(
    plane_axis: Axis, plane_index: int, crossed_axis: Axis, crossed_index: int, interval: int
) -> GridEdgeId:
    direction = other_axis(plane_axis, crossed_axis)
    planes = {plane_axis: plane_index, crossed_axis: crossed_index}
    return GridEdgeId(
        direction, planes[direction.u_axis], planes[direction.v_axis], interval
    )


def _family_events(
    vals: np.ndarray, other: np.ndarray, lines: np.ndarray, family: int, eps: float
) -> list[_Event]:
    events: list[_Event] = []
    n = len(vals)
    for li, line in enumerate(lines):
        delta = vals - line
        sides = np.where(np.abs(delta) <= eps, 0, np.sign(delta)).astype(int)
        if not np.any(sides):
            raise CornerSingularity(f"contour lies on a grid line at {line}")
        nxt = np.roll(sides, -1)
        strict = np.nonzero((sides != 0) & (nxt != 0) & (sides != nxt))[0]
        for k in strict:
            k2 = (k + 1) % n
            t = float((line - vals[k]) / (vals[k2] - vals[k]))
            o = float(other[k] + t * (other[k2] - other[k]))
            pt = (float(line), o) if family == 0 else (o, float(line))
            events.append(_Event(int(k), t, family, li, int(nxt[k]), False, pt))
        if np.any(sides == 0):
            events.extend(_run_events(vals, other, sides, li, line, family))
    return events


def _run_events(vals, other, sides, li, line, family) -> list[_Event]:
    """Collapse maximal runs of on-line vertices into zero or one crossing."""
    n = len(sides)
    events = []
    zero_idx = np.nonzero(sides == 0)[0]
    seen: set[int] = set()
    for z in zero_idx:
        if int(z) in seen:
            continue
        start = int(z)
        while sides[(start - 1) % n] == 0:
            start = (start - 1) % n
        end = start
        run = [start]
        while sides[(end + 1) % n] == 0:
            end = (end + 1) % n
            run.append(end)
        seen.update(run)
        before = int(sides[(start - 1) % n])
        after = int(sides[(end + 1) % n])
        if before == after:
            continue  # tangential touch: no crossing
        pt = (float(vals[start]), float(other[start]))
        if family == 1:
            pt = (pt[1], pt[0])
        events.append(_Event(start, 0.0, family, li, after, True, pt))
    return events


def _interval_of(value: float, lines: np.ndarray) -> int:
    return bisect_right(lines.tolist(), float(value))


def clip_contour(c: Contour, grid: Grid, snap_corners: bool = True) -> ClippedContour:
    """Insert a vertex at every crossing of ``c`` with its plane's lattice.

    Crossings carry the 3D grid edge they lie on.  With ``snap_corners``
    disabled, any crossing within epsilon of a lattice corner raises
    :class:`CornerSingularity`; with it enabled (the default) the crossing
    is resolved deterministically toward the side the contour travels.
    """
    axis = c.id.axis
    plane_index = c.id.plane
    if not 0 <= plane_index < grid.n_planes(axis):
        raise EdgeNotInGrid(f"contour {c.id}: plane index outside grid")
    plane_coord = float(grid.plane_coords(axis)[plane_index])
    eps = grid.epsilon
    u_lines = grid.plane_coords(axis.u_axis)
    v_lines = grid.plane_coords(axis.v_axis)
    verts = c.vertices
    n = len(verts)

    events = _family_events(verts[:, 0], verts[:, 1], u_lines, 0, eps)
    events += _family_events(verts[:, 1], verts[:, 0], v_lines, 1, eps)

    if not snap_corners:
        du = np.min(np.abs(verts[:, 0][:, None] - u_lines[None, :]), axis=1)
        dv = np.min(np.abs(verts[:, 1][:, None] - v_lines[None, :]), axis=1)
        k = np.nonzero((du <= eps) & (dv <= eps))[0]
        if len(k):
            raise CornerSingularity(
                f"contour {c.id}: vertex {int(k[0])} sits on a lattice corner"
            )
        for ev in events:
            du = np.min(np.abs(ev.point[0] - u_lines))
            dv = np.min(np.abs(ev.point[1] - v_lines))
            if du <= eps and dv <= eps:
                raise CornerSingularity(
                    f"contour {c.id}: crossing at {ev.point} hits a lattice corner"
                )

    # safe march start: a vertex clear of every lattice line
    du = np.min(np.abs(verts[:, 0][:, None] - u_lines[None, :]), axis=1)
    dv = np.min(np.abs(verts[:, 1][:, None] - v_lines[None, :]), axis=1)
    clear = np.nonzero((du > eps) & (dv > eps))[0]
    if len(clear) == 0 and events:
        raise CornerSingularity(f"contour {c.id}: no vertex clear of the lattice")
    start = int(clear[0]) if len(clear) else 0

    iu = _interval_of(verts[start, 0], u_lines)
    iv = _interval_of(verts[start, 1], v_lines)
    if not events:
        return ClippedContour(
            c,
            axis,
            plane_index,
            plane_coord,
            tuple(ClippedVertex((float(p[0]), float(p[1])), False) for p in verts),
            (iu, iv),
        )
    start_cell = (iu, iv)

    ordered = sorted(
        events, key=lambda e: ((e.tau - start) % n, e.family, e.line, e.direction)
    )
    for ev in ordered:
        if ev.family == 0:
            before = ev.line if ev.direction > 0 else ev.line + 1
            if iu != before:
                raise CornerSingularity(
                    f"contour {c.id}: unresolvable crossing order near {ev.point}"
                )
            iu = ev.line + 1 if ev.direction > 0 else ev.line
            crossed_axis, crossed_index, interval = axis.u_axis, ev.line, iv
            ev.t_edge = ev.point[1]
        else:
            before = ev.line if ev.direction > 0 else ev.line + 1
            if iv != before:
                raise CornerSingularity(
                    f"contour {c.id}: unresolvable crossing order near {ev.point}"
                )
            iv = ev.line + 1 if ev.direction > 0 else ev.line
            crossed_axis, crossed_index, interval = axis.v_axis, ev.line, iu
            ev.t_edge = ev.point[0]
        ev.edge = _edge_for_crossing(axis, plane_index, crossed_axis, crossed_index, interval)
        ev.cell_after = (iu, iv)

    by_seg: dict[int, list[_Event]] = {}
    for ev in events:
        by_seg.setdefault(ev.seg, []).append(ev)
    out: list[ClippedVertex] = []
    for k in range(n):
        seg_events = sorted(by_seg.get(k, []), key=lambda e: (e.t, e.family, e.line))
        vertex_events = [e for e in seg_events if e.at_vertex]
        p = (float(verts[k, 0]), float(verts[k, 1]))
        if vertex_events:
            first = vertex_events[0]
            out.append(_crossing_vertex(p, False, first, axis, plane_coord))
            for e in vertex_events[1:]:
                out.append(_crossing_vertex(p, True, e, axis, plane_coord))
        else:
            out.append(ClippedVertex(p, False))
        for e in seg_events:
            if not e.at_vertex:
                out.append(_crossing_vertex(e.point, True, e, axis, plane_coord))
    return ClippedContour(c, axis, plane_index, plane_coord, tuple(out), start_cell)


def _crossing_vertex(point, inserted, ev: _Event, axis: Axis, plane_coord) -> ClippedVertex:
    return ClippedVertex(
        point=(float(point[0]), float(point[1])),
        inserted=inserted,
        edge=ev.edge,
        t_edge=float(ev.t_edge),
        position=axis.to_world(float(point[0]), float(point[1]), plane_coord),
        cell_after=ev.cell_after,
    )


@dataclass(frozen=True)
class Registration:
    """One contour crossing registered on a grid edge."""

    axis: Axis
    contour: ContourId
    vertex: int
    t: float
    position: tuple[float, float, float]

    def sort_key(self):
        return (self.t, self.contour, self.vertex)


class EdgeRegistry:
    """Per-edge sorted lists of registrations."""

    def __init__(self, grid: Grid):
        self.grid = grid
        self._edges: dict[GridEdgeId, list[Registration]] = {}

    def add(self, edge: GridEdgeId, reg: Registration) -> None:
        if not self.grid.validate_edge(edge):
            raise EdgeNotInGrid(f"edge {edge} outside grid")
        if reg.axis is edge.direction:
            raise EdgeNotInGrid(
                f"registration axis {reg.axis.value} cannot feed a "
                f"{edge.direction.value}-parallel edge"
            )
        self._edges.setdefault(edge, []).append(reg)

    def edges(self) -> list[GridEdgeId]:
        return sorted(self._edges)

    def registrations(self, edge: GridEdgeId) -> list[Registration]:
        return list(self._edges.get(edge, ()))

    def __len__(self) -> int:
        return sum(len(v) for v in self._edges.values())

    def resort(self) -> None:
        for regs in self._edges.values():
            regs.sort(key=Registration.sort_key)


def register_intersections(cc: ClippedContour, registry: EdgeRegistry) -> EdgeRegistry:
    """Append one registration per crossing vertex of ``cc`` and re-sort."""
    for idx, vx in cc.crossings():
        registry.add(
            vx.edge,
            Registration(cc.axis, cc.contour.id, idx, vx.t_edge, vx.position),
        )
    registry.resort()
    return registry


@dataclass(frozen=True)
class NodePoint:
    """Merged intersection of two orthogonal contours on one grid edge."""

    id: int
    position: tuple[float, float, float]
    edge: GridEdgeId
    ref_a: Registration
    ref_b: Registration


@dataclass(frozen=True)
class UnpairedRegistration:
    """A registration left without an orthogonal partner (under-sampling)."""

    edge: GridEdgeId
    registration: Registration


def _match(A, B, tol):
    A = sorted(A, key=Registration.sort_key)
    B = sorted(B, key=Registration.sort_key)
    if len(A) == len(B) and all(abs(a.t - b.t) <= tol for a, b in zip(A, B)):
        return list(zip(A, B)), []
    # counts differ (or rank pairing failed): greedy mutually-nearest pairs
    cand = []
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            d = abs(a.t - b.t)
            if d <= tol:
                cand.append((d, a.t, b.t, a.contour, a.vertex, b.contour, b.vertex, i, j))
    cand.sort()
    used_a: set[int] = set()
    used_b: set[int] = set()
    pairs = []
    for item in cand:
        i, j = item[-2], item[-1]
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        pairs.append((A[i], B[j]))
    pairs.sort(key=lambda p: p[0].sort_key())
    left = [A[i] for i in range(len(A)) if i not in used_a]
    left += [B[j] for j in range(len(B)) if j not in used_b]
    return pairs, left


def pair_node_points(
    registry: EdgeRegistry,
) -> tuple[list[NodePoint], list[UnpairedRegistration]]:
    """Pair nearest orthogonal registrations into node points.

    Registrations are grouped per grid line (all bounded edges of one plane
    intersection together): when a true crossing lies within sampling error
    of a lattice plane, the two polygonal contours can register it on either
    side of the interval boundary, so matching strictly inside one bounded
    edge would lose exactly those pairs.  When both source families register
    the same count, sorted rank-to-rank pairing applies (crossings of one
    surface curve alternate); a failed distance post-check or a count
    mismatch demotes the line to greedy mutually-nearest matching.  The
    remainder is returned as unpaired, never dropped.

    Node-point positions are the midpoints of the paired crossings; the
    node's edge interval is located from that midpoint.  Ids follow
    lexicographic line order.
    """
    grid = registry.grid
    tol = grid.pairing_tolerance
    lines: dict[tuple[Axis, int, int], list[tuple[GridEdgeId, Registration]]] = {}
    for edge in registry.edges():
        for reg in registry.registrations(edge):
            legal = tuple(a for a in AXES if a is not edge.direction)
            if reg.axis not in legal:
                raise EdgeNotInGrid(f"edge {edge} has a registration from a wrong axis")
            lines.setdefault((edge.direction, edge.u_plane, edge.v_plane), []).append(
                (edge, reg)
            )

    node_points: list[NodePoint] = []
    unpaired: list[UnpairedRegistration] = []
    for (direction, u_plane, v_plane), items in sorted(
        lines.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])
    ):
        edge_of = {reg: edge for edge, reg in items}
        legal = sorted(a for a in AXES if a is not direction)
        A = [r for _, r in items if r.axis is legal[0]]
        B = [r for _, r in items if r.axis is legal[1]]
        pairs, left = _match(A, B, tol)
        coords = grid.coords[direction].tolist()
        for a, b in pairs:
            pos = (
                (a.position[0] + b.position[0]) / 2.0,
                (a.position[1] + b.position[1]) / 2.0,
                (a.position[2] + b.position[2]) / 2.0,
            )
            t_mid = (a.t + b.t) / 2.0
            interval = min(max(bisect_right(coords, t_mid) - 1, 0), len(coords) - 2)
            edge = GridEdgeId(direction, u_plane, v_plane, interval)
            node_points.append(NodePoint(len(node_points), pos, edge, a, b))
        unpaired.extend(UnpairedRegistration(edge_of[r], r) for r in left)
    return node_points, unpaired
