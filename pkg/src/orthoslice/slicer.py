"""Synthetic slicer: cut analytic shapes and triangle meshes into correctly
oriented slice documents.

Cross sections are exact curves sampled as polygons.  Outer boundaries come
out counterclockwise in the slice frame (material on the left of traversal);
hole boundaries come out clockwise with negative signed area.  Tangency is
the caller's problem: planes that graze a shape raise instead of being
silently perturbed, because a perturbed oracle is no oracle.
"""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np

from .errors import DegenerateContour, OpenChain, TangencyDetected, VertexOnPlane
from .geometry import (
    AXES,
    Axis,
    Contour,
    ContourId,
    SliceDocument,
    SlicePlane,
    DEFAULT_EPSILON_SCALE,
    polygon_interior_point,
    signed_area,
)
from .shapes import (
    AnalyticShape,
    Box,
    Cylinder,
    Sphere,
    Torus,
    Union,
    bounds,
    contains,
    extent_along,
)


def orient_contour(c: Contour, epsilon: float | None = None) -> Contour:
    """Return ``c`` with positive signed area, reversing it if needed."""
    v = c.vertices
    if epsilon is None:
        span = v.max(axis=0) - v.min(axis=0) if len(v) else np.zeros(2)
        diag = float(np.hypot(span[0], span[1]))
        epsilon = DEFAULT_EPSILON_SCALE * diag if diag > 0 else DEFAULT_EPSILON_SCALE
    area = c.signed_area
    if abs(area) <= epsilon * epsilon:
        raise DegenerateContour(f"contour {c.id}: |area|={abs(area):g}")
    return c if area > 0 else c.reversed()


def _normalize_planes(planes: Mapping) -> dict[Axis, list[float]]:
    out: dict[Axis, list[float]] = {axis: [] for axis in AXES}
    for key, coords in planes.items():
        axis = key if isinstance(key, Axis) else Axis(str(key))
        out[axis] = sorted(float(c) for c in coords)
    return out


def _classify_penetration(h: float, coord: float, scale: float, tol: float) -> str:
    """Classify a plane's penetration depth into a solid's extent.

    Depths below float-noise level count as non-intersecting: an exactly
    tangent plane computed with rounded coordinates can land a few ulps to
    either side, and must not flip between "outside" and "grazing".
    """
    noise = 1e-12 * max(1.0, abs(coord), abs(scale))
    if h <= noise:
        return "none"
    if h <= tol:
        return "graze"
    return "cut"


def _circle(center_u: float, center_v: float, radius: float, n: int) -> np.ndarray:
    theta = 2.0 * math.pi * np.arange(n) / n
    return np.stack(
        [center_u + radius * np.cos(theta), center_v + radius * np.sin(theta)], axis=1
    )


def _rectangle(lo_u, lo_v, hi_u, hi_v, n: int) -> np.ndarray:
    corners = [(lo_u, lo_v), (hi_u, lo_v), (hi_u, hi_v), (lo_u, hi_v)]
    per_side = [n // 4] * 4
    for i in range(n - 4 * (n // 4)):
        per_side[i] += 1
    pts = []
    for k in range(4):
        a = np.asarray(corners[k], dtype=float)
        b = np.asarray(corners[(k + 1) % 4], dtype=float)
        m = max(per_side[k], 1)
        for i in range(m):
            pts.append(a + (i / m) * (b - a))
    return np.asarray(pts)


def _orient_to_material(
    loops: list[np.ndarray], shape: AnalyticShape, axis: Axis, coord: float
) -> list[np.ndarray]:
    """Fix each loop's winding so material lies on its left side."""
    out = []
    for pts in loops:
        if signed_area(pts) < 0:
            pts = pts[::-1]
        qu, qv = polygon_interior_point(pts)
        inside = bool(contains(shape, axis.to_world(qu, qv, coord))[0])
        out.append(pts if inside else pts[::-1])
    return out


def _sphere_section(shape: Sphere, axis: Axis, coord, n, tol):
    d = coord - shape.center[axis.index]
    h = shape.radius - abs(d)
    kind = _classify_penetration(h, coord, shape.radius, tol)
    if kind == "none":
        return []
    if kind == "graze":
        raise TangencyDetected(f"plane {axis.value}={coord} grazes sphere")
    rho = math.sqrt(shape.radius**2 - d * d)
    cu, cv = axis.project(shape.center)
    return [_circle(cu, cv, rho, n)]


def _box_section(shape: Box, axis: Axis, coord, n, tol):
    lo, hi = extent_along(shape, axis)
    h = min(coord - lo, hi - coord)
    kind = _classify_penetration(h, coord, hi - lo, tol)
    if kind == "none":
        return []
    if kind == "graze":
        raise TangencyDetected(f"plane {axis.value}={coord} coincides with box face")
    lo3, hi3 = np.asarray(shape.min_corner), np.asarray(shape.max_corner)
    ui, vi = axis.u_axis.index, axis.v_axis.index
    return [_rectangle(lo3[ui], lo3[vi], hi3[ui], hi3[vi], n)]


def _torus_section(shape: Torus, axis: Axis, coord, n, tol):
    c = np.asarray(shape.center)
    R, r = shape.major_radius, shape.minor_radius
    if axis is shape.axis:
        d = coord - c[axis.index]
        h = r - abs(d)
        kind = _classify_penetration(h, coord, r, tol)
        if kind == "none":
            return []
        if kind == "graze":
            raise TangencyDetected(f"plane {axis.value}={coord} grazes torus tube")
        w = math.sqrt(r * r - d * d)
        cu, cv = axis.project(c)
        return [_circle(cu, cv, R + w, n), _circle(cu, cv, R - w, n)]

    d = coord - c[axis.index]
    h_outer = (R + r) - abs(d)
    kind = _classify_penetration(h_outer, coord, R + r, tol)
    if kind == "none":
        return []
    if kind == "graze":
        raise TangencyDetected(f"plane {axis.value}={coord} grazes torus rim")
    saddle = abs(d) - (R - r)
    if abs(saddle) <= tol:
        raise TangencyDetected(f"plane {axis.value}={coord} pinches torus tube")

    f_axis = next(a for a in AXES if a is not axis and a is not shape.axis)

    def world_points(phi: np.ndarray, sign: float) -> np.ndarray:
        rho = R + r * np.cos(phi)
        free = sign * np.sqrt(np.maximum(rho * rho - d * d, 0.0))
        pts = np.empty((len(phi), 2))
        frame = {axis.u_axis.index: 0, axis.v_axis.index: 1}
        col_f = frame[f_axis.index]
        col_s = frame[shape.axis.index]
        pts[:, col_f] = c[f_axis.index] + free
        pts[:, col_s] = c[shape.axis.index] + r * np.sin(phi)
        return pts

    if saddle < 0:
        # two disjoint tube cuts, one per side of the axis
        phi = 2.0 * math.pi * np.arange(n) / n
        return [world_points(phi, +1.0), world_points(phi, -1.0)]

    # single loop: walk the positive branch out and the negative branch back
    phi0 = math.acos((abs(d) - R) / r)
    m = max(n // 2, 4)
    phi = np.linspace(-phi0, phi0, m + 1)
    upper = world_points(phi, +1.0)
    lower = world_points(phi[m - 1 : 0 : -1], -1.0)
    return [np.concatenate([upper, lower], axis=0)]


def _section_interior_point(shape: Cylinder, axis: Axis, coord, tol):
    """A point of the plane safely inside the solid, or None if none found."""
    a = np.asarray(shape.axis_dir)
    b = np.asarray(shape.base)
    i = axis.index

    def margin(pt3: np.ndarray) -> float:
        w = pt3 - b
        s = float(w @ a)
        rad = float(np.linalg.norm(w - s * a))
        return min(shape.radius - rad, s, shape.length - s)

    safe = min(shape.radius, shape.length) * 0.25
    if abs(a[i]) > 1e-12:
        s_star = (coord - b[i]) / a[i]
        if safe <= s_star <= shape.length - safe:
            return b + s_star * a
    mid = b + 0.5 * shape.length * a
    mid = mid.copy()
    mid[i] = coord
    if margin(mid) > safe * 0.5:
        return mid

    # coarse-to-fine grid over the section's bounding rectangle
    lo3, hi3 = bounds(shape)
    ui, vi = axis.u_axis.index, axis.v_axis.index
    lo = np.array([lo3[ui], lo3[vi]])
    hi = np.array([hi3[ui], hi3[vi]])
    best, best_m = None, -np.inf
    for _ in range(4):
        uu = np.linspace(lo[0], hi[0], 33)
        vv = np.linspace(lo[1], hi[1], 33)
        gu, gv = np.meshgrid(uu, vv, indexing="ij")
        pts = np.empty((gu.size, 3))
        pts[:, ui] = gu.ravel()
        pts[:, vi] = gv.ravel()
        pts[:, i] = coord
        w = pts - b
        s = w @ a
        rad = np.linalg.norm(w - s[:, None] * a[None, :], axis=1)
        m = np.minimum.reduce([shape.radius - rad, s, shape.length - s])
        k = int(np.argmax(m))
        if m[k] > best_m:
            best_m = float(m[k])
            best = pts[k]
        step = (hi - lo) / 32.0
        center = np.array([pts[k, ui], pts[k, vi]])
        lo, hi = center - 2 * step, center + 2 * step
    if best_m <= tol * 8:
        return None
    return best


def _cylinder_section(shape: Cylinder, axis: Axis, coord, n, tol):
    lo, hi = extent_along(shape, axis)
    h = min(coord - lo, hi - coord)
    kind = _classify_penetration(h, coord, hi - lo, tol)
    if kind == "none":
        return []
    if kind == "graze":
        raise TangencyDetected(f"plane {axis.value}={coord} grazes cylinder")
    q0 = _section_interior_point(shape, axis, coord, tol)
    if q0 is None:
        raise TangencyDetected(
            f"plane {axis.value}={coord} cuts a sliver off the cylinder"
        )
    ui, vi = axis.u_axis.index, axis.v_axis.index
    lo3, hi3 = bounds(shape)
    t_hi0 = float(np.linalg.norm(hi3 - lo3)) + 1.0

    theta = 2.0 * math.pi * np.arange(n) / n
    dirs = np.zeros((n, 3))
    dirs[:, ui] = np.cos(theta)
    dirs[:, vi] = np.sin(theta)
    t_lo = np.zeros(n)
    t_hi = np.full(n, t_hi0)
    # the section of a convex solid is convex: one boundary point per ray
    for _ in range(80):
        t_mid = 0.5 * (t_lo + t_hi)
        pts = q0[None, :] + t_mid[:, None] * dirs
        inside = contains(shape, pts)
        t_lo = np.where(inside, t_mid, t_lo)
        t_hi = np.where(inside, t_hi, t_mid)
    t = 0.5 * (t_lo + t_hi)
    pts3 = q0[None, :] + t[:, None] * dirs
    return [np.stack([pts3[:, ui], pts3[:, vi]], axis=1)]


def _sections(shape: AnalyticShape, axis: Axis, coord, n, tol) -> list[np.ndarray]:
    if isinstance(shape, Sphere):
        loops = _sphere_section(shape, axis, coord, n, tol)
    elif isinstance(shape, Box):
        loops = _box_section(shape, axis, coord, n, tol)
    elif isinstance(shape, Torus):
        loops = _torus_section(shape, axis, coord, n, tol)
    elif isinstance(shape, Cylinder):
        loops = _cylinder_section(shape, axis, coord, n, tol)
    elif isinstance(shape, Union):
        loops = []
        for m in shape.members:
            loops.extend(_sections(m, axis, coord, n, tol))
    else:
        raise TypeError(f"unsupported shape {type(shape).__name__}")
    return loops


def slice_analytic(
    shape: AnalyticShape,
    planes: Mapping,
    samples_per_contour: int = 64,
    epsilon: float | None = None,
) -> SliceDocument:
    """Slice an analytic shape by the given plane coordinates per axis.

    Every plane carries the exact cross-section curves of the solid sampled
    as ``samples_per_contour``-gon contours with vertices on the true
    surface.  Planes that miss the shape carry zero contours; planes that
    graze it (penetration depth below tolerance) raise
    :class:`TangencyDetected`.
    """
    if samples_per_contour < 8:
        raise ValueError("samples_per_contour must be >= 8")
    plane_map = _normalize_planes(planes)
    lo3, hi3 = bounds(shape)
    diag = float(np.linalg.norm(hi3 - lo3))
    tol = epsilon if epsilon is not None else DEFAULT_EPSILON_SCALE * diag

    sets: dict[Axis, tuple[SlicePlane, ...]] = {}
    for axis in AXES:
        planes_out = []
        for pi, coord in enumerate(plane_map[axis]):
            loops = _sections(shape, axis, coord, samples_per_contour, tol)
            loops = _orient_to_material(loops, shape, axis, coord)
            contours = tuple(
                Contour(ContourId(axis, pi, ci), pts) for ci, pts in enumerate(loops)
            )
            planes_out.append(SlicePlane(axis, coord, contours))
        sets[axis] = tuple(planes_out)
    return SliceDocument(sets)


def slice_mesh(mesh, planes: Mapping, epsilon: float | None = None) -> SliceDocument:
    """Slice a consistently wound, watertight triangle mesh.

    Plane/triangle intersection segments are chained into closed loops; the
    segment orientation is ``plane_normal x triangle_normal``, which puts
    material on the left in the slice frame (holes come out clockwise).
    Raises :class:`VertexOnPlane` if a mesh vertex sits on a slice plane and
    :class:`OpenChain` if the segments fail to close.
    """
    verts = np.asarray(mesh.vertices, dtype=float)
    tris = np.asarray(mesh.triangles, dtype=int)
    if len(verts) == 0 or len(tris) == 0:
        raise OpenChain("mesh has no triangles")
    span = verts.max(axis=0) - verts.min(axis=0)
    eps = (
        epsilon
        if epsilon is not None
        else DEFAULT_EPSILON_SCALE * float(np.linalg.norm(span))
    )
    plane_map = _normalize_planes(planes)

    sets: dict[Axis, tuple[SlicePlane, ...]] = {}
    for axis in AXES:
        planes_out = []
        for pi, coord in enumerate(plane_map[axis]):
            loops = _mesh_plane_loops(verts, tris, axis, coord, eps)
            contours = tuple(
                Contour(ContourId(axis, pi, ci), pts) for ci, pts in enumerate(loops)
            )
            planes_out.append(SlicePlane(axis, coord, contours))
        sets[axis] = tuple(planes_out)
    return SliceDocument(sets)


def _mesh_plane_loops(verts, tris, axis: Axis, coord: float, eps) -> list[np.ndarray]:
    i = axis.index
    height = verts[:, i] - coord
    if np.any(np.abs(height) <= eps):
        j = int(np.argmin(np.abs(height)))
        raise VertexOnPlane(
            f"vertex {j} lies on plane {axis.value}={coord}; jitter the plane"
        )
    pos = height > 0
    tri_pos = pos[tris]
    straddles = (tri_pos.any(axis=1)) & (~tri_pos.all(axis=1))

    plane_n = np.zeros(3)
    plane_n[i] = 1.0

    def edge_point(a: int, b: int):
        if a > b:
            a, b = b, a
        t = (coord - verts[a, i]) / (verts[b, i] - verts[a, i])
        return (a, b), verts[a] + t * (verts[b] - verts[a])

    segments: dict[tuple[int, int], tuple[tuple[int, int], np.ndarray, np.ndarray]] = {}
    for ti in np.nonzero(straddles)[0]:
        ia, ib, ic = (int(v) for v in tris[ti])
        crossing = []
        for a, b in ((ia, ib), (ib, ic), (ic, ia)):
            if pos[a] != pos[b]:
                crossing.append(edge_point(a, b))
        key1, p1 = crossing[0]
        key2, p2 = crossing[1]
        n = np.cross(verts[ib] - verts[ia], verts[ic] - verts[ia])
        d = np.cross(plane_n, n)
        if float((p2 - p1) @ d) < 0.0:
            key1, key2, p1, p2 = key2, key1, p2, p1
        if key1 in segments:
            raise OpenChain(
                f"inconsistent winding around edge {key1} at {axis.value}={coord}"
            )
        segments[key1] = (key2, p1, p2)

    loops = []
    while segments:
        start = min(segments)
        pts3 = []
        key = start
        while True:
            nxt, p1, _ = segments.pop(key, (None, None, None))
            if nxt is None:
                raise OpenChain(
                    f"chain broke at edge {key} on plane {axis.value}={coord}"
                )
            pts3.append(p1)
            key = nxt
            if key == start:
                break
        pts3 = np.asarray(pts3)
        ui, vi = axis.u_axis.index, axis.v_axis.index
        loops.append(np.stack([pts3[:, ui], pts3[:, vi]], axis=1))
    return loops
