"""Core domain types: axes and slice frames, contours, slice documents,
and the sentinel-extended reconstruction grid.

All types are immutable after construction and safe to share between
workers. One relative tolerance (``DEFAULT_EPSILON_SCALE`` times the grid
diagonal) governs plane duplication, vertex distinctness and on-plane tests.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import DuplicatePlane, OnPlane, OutOfHull, TooFewPlanes

DEFAULT_EPSILON_SCALE = 1e-9


class Axis(str, Enum):
    """One of the three world axes a slice set is perpendicular to.

    The in-plane frame follows the cyclic convention Z->(x,y), X->(y,z),
    Y->(z,x).  With this choice, a contour whose material side is on the
    left of the traversal direction (viewed from the positive end of the
    axis) has positive signed area in its (u, v) frame, uniformly for all
    three axes.
    """

    X = "x"
    Y = "y"
    Z = "z"

    @property
    def index(self) -> int:
        return "xyz".index(self.value)

    @property
    def u_axis(self) -> "Axis":
        return _FRAMES[self][0]

    @property
    def v_axis(self) -> "Axis":
        return _FRAMES[self][1]

    def to_world(self, u: float, v: float, coord: float) -> tuple[float, float, float]:
        """Lift in-plane coordinates (u, v) at plane position ``coord`` to 3D."""
        out = [0.0, 0.0, 0.0]
        out[self.u_axis.index] = u
        out[self.v_axis.index] = v
        out[self.index] = coord
        return (out[0], out[1], out[2])

    def project(self, point: Sequence[float]) -> tuple[float, float]:
        """Drop a 3D point into this axis' (u, v) frame."""
        return (point[self.u_axis.index], point[self.v_axis.index])


_FRAMES = {
    Axis.X: (Axis.Y, Axis.Z),
    Axis.Y: (Axis.Z, Axis.X),
    Axis.Z: (Axis.X, Axis.Y),
}

AXES: tuple[Axis, Axis, Axis] = (Axis.X, Axis.Y, Axis.Z)


def other_axis(a: Axis, b: Axis) -> Axis:
    """The axis that is neither ``a`` nor ``b``."""
    return next(ax for ax in AXES if ax is not a and ax is not b)


class ContourId(NamedTuple):
    """Stable identifier: slice-set axis, plane index within the set,
    contour index within the plane."""

    axis: Axis
    plane: int
    index: int

    def __str__(self) -> str:
        return f"{self.axis.value}:{self.plane}:{self.index}"


class GridEdgeId(NamedTuple):
    """A bounded segment of the intersection line of two slice planes.

    ``direction`` is the axis the edge is parallel to; the line is fixed by
    one plane of ``direction.u_axis`` (index ``u_plane``) and one plane of
    ``direction.v_axis`` (index ``v_plane``), both non-sentinel.  ``interval``
    indexes the cell interval along ``direction`` and may address the
    sentinel intervals (0 and n_cells-1).
    """

    direction: Axis
    u_plane: int
    v_plane: int
    interval: int

    def __str__(self) -> str:
        return f"{self.direction.value}[{self.u_plane},{self.v_plane}]@{self.interval}"


def signed_area(vertices: np.ndarray) -> float:
    """Shoelace area of a closed polygon given as an (n, 2) vertex array."""
    v = np.asarray(vertices, dtype=float)
    u, w = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(u, np.roll(w, -1)) - np.dot(w, np.roll(u, -1)))


def point_in_polygon(point: Sequence[float], vertices: np.ndarray) -> bool:
    """Even-odd test; points on the boundary may resolve either way."""
    x, y = float(point[0]), float(point[1])
    v = np.asarray(vertices, dtype=float)
    x1, y1 = v[:, 0], v[:, 1]
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    # half-open rule in y keeps vertices from being counted twice
    straddle = (y1 <= y) != (y2 <= y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
    hits = straddle & (x < xs)
    return bool(np.count_nonzero(hits) % 2)


def segments_cross(p1, p2, q1, q2) -> bool:
    """True if the open segments p1-p2 and q1-q2 properly cross."""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


def polygon_interior_point(vertices: np.ndarray) -> tuple[float, float]:
    """A point strictly inside a simple polygon.

    Uses the standard ear-based construction: take an extreme (hence convex)
    vertex v with neighbours a, b; if triangle a-v-b is empty return its
    centroid, otherwise step toward the contained vertex farthest from the
    a-b line.
    """
    v = np.asarray(vertices, dtype=float)
    n = len(v)
    i = int(np.lexsort((v[:, 1], v[:, 0]))[-1])  # max x, then max y
    a, b, c = v[(i - 1) % n], v[i], v[(i + 1) % n]
    tri = np.array([a, b, c])
    best = None
    best_d = 0.0
    for j in range(n):
        if j in ((i - 1) % n, i, (i + 1) % n):
            continue
        p = v[j]
        if point_in_polygon(p, tri):
            d = abs(
                (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
            )
            if d >= best_d:
                best_d = d
                best = p
    if best is None:
        q = (a + b + c) / 3.0
    else:
        q = (b + best) / 2.0
    return (float(q[0]), float(q[1]))


@dataclass(frozen=True)
class Contour:
    """Closed polygonal curve in one slice plane.

    ``vertices`` are in the plane's (u, v) frame, in world length units; the
    closing edge from the last vertex back to the first is implicit.  Outer
    boundaries of material are positively oriented; hole boundaries carry
    negative signed area and are flagged by :func:`validate_document` rather
    than rejected.
    """

    id: ContourId
    vertices: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=float))
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 1:
            raise ValueError(f"contour {self.id}: vertices must be an (n, 2) array")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"contour {self.id}: non-finite vertex coordinates")
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def signed_area(self) -> float:
        return signed_area(self.vertices)

    def reversed(self) -> "Contour":
        return Contour(self.id, self.vertices[::-1].copy())


@dataclass(frozen=True)
class SlicePlane:
    """All contours cut by one plane ``{axis} = coord``."""

    axis: Axis
    coord: float
    contours: tuple[Contour, ...] = ()


@dataclass(frozen=True)
class SliceDocument:
    """Three slice sets, one per axis, each a coord-sorted list of planes."""

    sets: dict[Axis, tuple[SlicePlane, ...]]

    def __post_init__(self):
        norm: dict[Axis, tuple[SlicePlane, ...]] = {}
        for axis in AXES:
            planes = tuple(self.sets.get(axis, ()))
            if any(p.axis is not axis for p in planes):
                raise ValueError(f"plane with wrong axis in {axis.value}-set")
            norm[axis] = tuple(sorted(planes, key=lambda p: p.coord))
        object.__setattr__(self, "sets", norm)

    def planes(self, axis: Axis) -> tuple[SlicePlane, ...]:
        return self.sets[axis]

    def plane_coords(self, axis: Axis) -> list[float]:
        return [p.coord for p in self.sets[axis]]

    def contours(self) -> Iterator[tuple[SlicePlane, Contour]]:
        for axis in AXES:
            for plane in self.sets[axis]:
                for contour in plane.contours:
                    yield plane, contour

    def contour_ids(self) -> list[ContourId]:
        return [c.id for _, c in self.contours()]

    @property
    def n_contours(self) -> int:
        return sum(len(p.contours) for axis in AXES for p in self.sets[axis])


@dataclass(frozen=True)
class Grid:
    """Axis-aligned grid whose planes are the document's slice planes plus
    one sentinel interval per axis per side.

    ``coords[axis]`` is strictly increasing and sentinel-extended: index 0
    and -1 are sentinels whose spacing copies the adjacent interior
    interval.  Cell index k along an axis addresses the interval
    ``coords[k] .. coords[k+1]``; cells 0 and n_cells-1 are sentinel cells.
    """

    coords: dict[Axis, np.ndarray]
    epsilon: float

    def __post_init__(self):
        frozen = {}
        for axis in AXES:
            c = np.ascontiguousarray(np.asarray(self.coords[axis], dtype=float))
            c.flags.writeable = False
            frozen[axis] = c
        object.__setattr__(self, "coords", frozen)

    def n_planes(self, axis: Axis) -> int:
        return len(self.coords[axis]) - 2

    def n_cells(self, axis: Axis) -> int:
        return len(self.coords[axis]) - 1

    def plane_coords(self, axis: Axis) -> np.ndarray:
        """Non-sentinel plane coordinates."""
        return self.coords[axis][1:-1]

    @property
    def diagonal(self) -> float:
        spans = [self.coords[a][-1] - self.coords[a][0] for a in AXES]
        return float(np.sqrt(sum(s * s for s in spans)))

    @property
    def pairing_tolerance(self) -> float:
        """Half the minimum interior plane spacing, used when matching
        registrations on one edge."""
        gaps = [np.diff(self.plane_coords(a)).min() for a in AXES]
        return 0.5 * float(min(gaps))

    def cell_bounds(self, cell: tuple[int, int, int]) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([self.coords[a][cell[a.index]] for a in AXES])
        hi = np.array([self.coords[a][cell[a.index] + 1] for a in AXES])
        return lo, hi

    def cell_center(self, cell: tuple[int, int, int]) -> np.ndarray:
        lo, hi = self.cell_bounds(cell)
        return (lo + hi) / 2.0

    def is_sentinel_cell(self, cell: tuple[int, int, int]) -> bool:
        return any(
            cell[a.index] == 0 or cell[a.index] == self.n_cells(a) - 1 for a in AXES
        )

    def all_cells(self) -> Iterator[tuple[int, int, int]]:
        for i in range(self.n_cells(Axis.X)):
            for j in range(self.n_cells(Axis.Y)):
                for k in range(self.n_cells(Axis.Z)):
                    yield (i, j, k)

    def edge_line(self, edge: GridEdgeId) -> tuple[float, float]:
        """(u, v) coordinates of the line the edge lies on, in the frame of
        ``edge.direction``."""
        d = edge.direction
        u = float(self.plane_coords(d.u_axis)[edge.u_plane])
        v = float(self.plane_coords(d.v_axis)[edge.v_plane])
        return u, v

    def edge_interval(self, edge: GridEdgeId) -> tuple[float, float]:
        c = self.coords[edge.direction]
        return float(c[edge.interval]), float(c[edge.interval + 1])

    def validate_edge(self, edge: GridEdgeId) -> bool:
        d = edge.direction
        return (
            0 <= edge.u_plane < self.n_planes(d.u_axis)
            and 0 <= edge.v_plane < self.n_planes(d.v_axis)
            and 0 <= edge.interval < self.n_cells(d)
        )


def build_grid(doc: SliceDocument, epsilon: float | None = None) -> Grid:
    """Build the sentinel-extended grid from a document's plane coordinates.

    Raises :class:`TooFewPlanes` if any axis has fewer than two planes and
    :class:`DuplicatePlane` if two planes of one axis coincide within
    tolerance.
    """
    raw: dict[Axis, np.ndarray] = {}
    for axis in AXES:
        coords = np.asarray(doc.plane_coords(axis), dtype=float)
        if len(coords) < 2:
            raise TooFewPlanes(f"{axis.value}-set has {len(coords)} planes; need >= 2")
        raw[axis] = coords

    extended: dict[Axis, np.ndarray] = {}
    for axis, coords in raw.items():
        lo = coords[0] - (coords[1] - coords[0])
        hi = coords[-1] + (coords[-1] - coords[-2])
        extended[axis] = np.concatenate(([lo], coords, [hi]))

    spans = [extended[a][-1] - extended[a][0] for a in AXES]
    eps = epsilon if epsilon is not None else DEFAULT_EPSILON_SCALE * float(
        np.sqrt(sum(s * s for s in spans))
    )
    if eps <= 0:
        raise ValueError("epsilon must be positive")

    for axis, coords in raw.items():
        gaps = np.diff(coords)
        if np.any(gaps <= eps):
            i = int(np.argmin(gaps))
            raise DuplicatePlane(
                f"{axis.value}-planes {coords[i]} and {coords[i + 1]} coincide"
            )
    return Grid(extended, eps)


def locate_cell(grid: Grid, point: Sequence[float]) -> tuple[int, int, int]:
    """Cell index of a point strictly inside the sentinel-extended hull.

    Raises :class:`OnPlane` if the point is within epsilon of any grid
    coordinate and :class:`OutOfHull` if it lies outside the hull.
    """
    cell = []
    for axis in AXES:
        coords = grid.coords[axis]
        c = float(point[axis.index])
        if c < coords[0] - grid.epsilon or c > coords[-1] + grid.epsilon:
            raise OutOfHull(f"{axis.value}={c} outside [{coords[0]}, {coords[-1]}]")
        nearest = np.min(np.abs(coords - c))
        if nearest <= grid.epsilon:
            raise OnPlane(f"{axis.value}={c} lies on a grid plane")
        if c < coords[0] or c > coords[-1]:
            raise OutOfHull(f"{axis.value}={c} outside [{coords[0]}, {coords[-1]}]")
        cell.append(int(bisect_right(coords.tolist(), c)) - 1)
    return (cell[0], cell[1], cell[2])


@dataclass(frozen=True)
class Violation:
    """One rule violation found by :func:`validate_document`."""

    contour: ContourId | None
    rule: str
    detail: str = ""

    def __str__(self) -> str:
        who = str(self.contour) if self.contour else "document"
        return f"{who}: {self.rule} {self.detail}".rstrip()


def document_epsilon(doc: SliceDocument) -> float:
    """Tolerance derived from the document's own extent (used before a grid
    exists)."""
    lo = np.full(3, np.inf)
    hi = np.full(3, -np.inf)
    for axis in AXES:
        for plane in doc.planes(axis):
            i = axis.index
            lo[i] = min(lo[i], plane.coord)
            hi[i] = max(hi[i], plane.coord)
            for c in plane.contours:
                if len(c.vertices) == 0:
                    continue
                ui, vi = axis.u_axis.index, axis.v_axis.index
                lo[ui] = min(lo[ui], c.vertices[:, 0].min())
                hi[ui] = max(hi[ui], c.vertices[:, 0].max())
                lo[vi] = min(lo[vi], c.vertices[:, 1].min())
                hi[vi] = max(hi[vi], c.vertices[:, 1].max())
    span = np.where(np.isfinite(hi - lo), hi - lo, 0.0)
    diag = float(np.sqrt(np.sum(span * span)))
    return DEFAULT_EPSILON_SCALE * diag if diag > 0 else DEFAULT_EPSILON_SCALE


def _self_intersects(vertices: np.ndarray) -> bool:
    n = len(vertices)
    segs = [(vertices[i], vertices[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if segments_cross(segs[i][0], segs[i][1], segs[j][0], segs[j][1]):
                return True
    return False


def validate_document(
    doc: SliceDocument,
    epsilon: float | None = None,
    check_simplicity: bool = False,
) -> list[Violation]:
    """Check every contour against the contour invariants.

    Violations are data, not failures: ``orientation`` marks negative signed
    area (a hole boundary or a mis-oriented contour), ``too_few_vertices``,
    ``duplicate_vertex`` and ``degenerate_area`` mark structural defects,
    and ``outside_grid_hull`` marks geometry escaping the sentinel-extended
    hull.  Self-intersection is only checked when ``check_simplicity`` is
    set (quadratic cost).
    """
    eps = epsilon if epsilon is not None else document_epsilon(doc)
    out: list[Violation] = []

    hull: dict[Axis, tuple[float, float] | None] = {}
    for axis in AXES:
        coords = doc.plane_coords(axis)
        if len(coords) >= 2 and np.all(np.diff(coords) > eps):
            lo = coords[0] - (coords[1] - coords[0])
            hi = coords[-1] + (coords[-1] - coords[-2])
            hull[axis] = (lo, hi)
        else:
            hull[axis] = None

    for plane, contour in doc.contours():
        v = contour.vertices
        if len(v) < 3:
            out.append(Violation(contour.id, "too_few_vertices", f"n={len(v)}"))
            continue
        gaps = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
        if np.any(gaps <= eps):
            out.append(Violation(contour.id, "duplicate_vertex"))
        area = signed_area(v)
        if abs(area) <= eps * eps:
            out.append(Violation(contour.id, "degenerate_area", f"area={area:g}"))
        elif area < 0:
            out.append(Violation(contour.id, "orientation", f"area={area:g}"))
        if check_simplicity and _self_intersects(v):
            out.append(Violation(contour.id, "self_intersection"))

        hu = hull[plane.axis.u_axis]
        hv = hull[plane.axis.v_axis]
        if hu is not None and (v[:, 0].min() <= hu[0] or v[:, 0].max() >= hu[1]):
            out.append(Violation(contour.id, "outside_grid_hull", "u range"))
        if hv is not None and (v[:, 1].min() <= hv[0] or v[:, 1].max() >= hv[1]):
            out.append(Violation(contour.id, "outside_grid_hull", "v range"))
    return out
