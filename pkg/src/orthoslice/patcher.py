"""Patching: central points, triangle fans over spatial polygons, mesh
assembly with vertex welding, and orientation canonicalization."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .cell_cycles import Cell, SpatialPolygon
from .errors import DegenerateLoop, NonOrientable


@dataclass
class Mesh:
    """Indexed triangle mesh with optional per-triangle source-cell tags."""

    vertices: np.ndarray  # (V, 3)
    triangles: np.ndarray  # (F, 3) int
    cells: tuple[Cell | None, ...] = ()  # provenance per triangle

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        t = np.asarray(self.triangles, dtype=int).reshape(-1, 3)
        self.vertices = v
        self.triangles = t
        if not self.cells:
            self.cells = (None,) * len(t)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def triangle_points(self, i: int) -> np.ndarray:
        return self.vertices[self.triangles[i]]


def triangle_area(p0, p1, p2) -> float:
    return 0.5 * float(np.linalg.norm(np.cross(np.asarray(p1) - p0, np.asarray(p2) - p0)))


def signed_volume(mesh: Mesh) -> float:
    """Sum of signed tetra volumes against the origin; positive for
    outward-oriented closed meshes."""
    v = mesh.vertices
    t = mesh.triangles
    p0, p1, p2 = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
    return float(np.einsum("ij,ij->i", p0, np.cross(p1, p2)).sum() / 6.0)


def _distinct_points(boundary: np.ndarray) -> int:
    return len({tuple(p) for p in boundary})


def polygon_center(p: SpatialPolygon) -> np.ndarray:
    """Arithmetic mean of the boundary loop (junction points counted once)."""
    if _distinct_points(p.boundary) < 3:
        raise DegenerateLoop(f"polygon in cell {p.cell} has < 3 distinct points")
    return p.boundary.mean(axis=0)


def patch_polygon(
    p: SpatialPolygon, center: np.ndarray, epsilon: float
) -> list[np.ndarray]:
    """Fan triangles center-v[i]-v[i+1] over the boundary loop, dropping
    triangles with area below epsilon squared."""
    if _distinct_points(p.boundary) < 3:
        raise DegenerateLoop(f"polygon in cell {p.cell} has < 3 distinct points")
    b = p.boundary
    tris = []
    thresh = epsilon * epsilon
    for i in range(len(b)):
        tri = np.asarray([center, b[i], b[(i + 1) % len(b)]])
        if triangle_area(*tri) >= thresh:
            tris.append(tri)
    return tris


def assemble_mesh(polygons: list[SpatialPolygon], epsilon: float) -> Mesh:
    """Patch every polygon and merge the fans into one indexed mesh.

    Vertices are welded by exact coordinate key after quantizing to an
    epsilon/4 lattice; node points are bitwise identical across the two
    cells sharing them, so the weld is a safety net, not a matcher.
    Polygons with fewer than three distinct boundary points (degenerate
    bigons) are skipped.
    """
    quantum = epsilon / 4.0
    index: dict[tuple[int, int, int], int] = {}
    verts: list[tuple[float, float, float]] = []
    tris: list[tuple[int, int, int]] = []
    cells: list[Cell | None] = []

    def vid(p) -> int:
        key = (round(p[0] / quantum), round(p[1] / quantum), round(p[2] / quantum))
        found = index.get(key)
        if found is None:
            found = len(verts)
            index[key] = found
            verts.append((float(p[0]), float(p[1]), float(p[2])))
        return found

    for poly in polygons:
        if _distinct_points(poly.boundary) < 3:
            continue  # zero-area bigon: nothing to patch
        center = polygon_center(poly)
        for tri in patch_polygon(poly, center, epsilon):
            ids = (vid(tri[0]), vid(tri[1]), vid(tri[2]))
            if ids[0] == ids[1] or ids[1] == ids[2] or ids[0] == ids[2]:
                continue
            tris.append(ids)
            cells.append(poly.cell)

    return Mesh(
        np.asarray(verts, dtype=float).reshape(-1, 3),
        np.asarray(tris, dtype=int).reshape(-1, 3),
        tuple(cells),
    )


def folded_fan_count(p: SpatialPolygon, center: np.ndarray, epsilon: float) -> int:
    """Quality diagnostic: fan triangles whose normal points against the
    polygon's plane normal (Newell summation over the boundary loop).
    Non-zero counts flag strongly non-planar polygons whose mean-point fan
    folds over itself."""
    b = p.boundary
    normal = np.zeros(3)
    for i in range(len(b)):
        v0, v1 = b[i], b[(i + 1) % len(b)]
        normal += np.cross(v0, v1)
    if np.linalg.norm(normal) == 0:
        return 0
    folded = 0
    thresh = epsilon * epsilon
    for i in range(len(b)):
        tri_n = np.cross(b[i] - center, b[(i + 1) % len(b)] - center)
        if 0.5 * np.linalg.norm(tri_n) >= thresh and float(tri_n @ normal) < 0:
            folded += 1
    return folded


def _edge_map(triangles: np.ndarray) -> dict[tuple[int, int], list[int]]:
    edges: dict[tuple[int, int], list[int]] = {}
    for ti, (a, b, c) in enumerate(triangles):
        for u, v in ((a, b), (b, c), (c, a)):
            key = (u, v) if u < v else (v, u)
            edges.setdefault(key, []).append(ti)
    return edges


def orient_mesh(mesh: Mesh) -> Mesh:
    """Make triangle windings consistent per connected component.

    Winding propagates breadth-first across shared edges; closed components
    are flipped globally if their signed volume is negative so normals point
    outward.  Open components keep the propagated orientation.  Raises
    :class:`NonOrientable` on a winding contradiction or an edge shared by
    more than two triangles.
    """
    tris = mesh.triangles.copy()
    n = len(tris)
    if n == 0:
        return Mesh(mesh.vertices.copy(), tris, mesh.cells)
    edges = _edge_map(tris)
    over = [e for e, ts in edges.items() if len(ts) > 2]
    if over:
        raise NonOrientable(f"edge {over[0]} shared by {len(edges[over[0]])} triangles")

    def directed(tri, u, v) -> bool:
        # True if edge u->v appears in this winding order
        a, b, c = tri
        return (a, b) == (u, v) or (b, c) == (u, v) or (c, a) == (u, v)

    flip = np.zeros(n, dtype=bool)
    seen = np.zeros(n, dtype=bool)
    for root in range(n):
        if seen[root]:
            continue
        comp = [root]
        seen[root] = True
        queue = deque([root])
        while queue:
            ti = queue.popleft()
            a, b, c = tris[ti]
            w = ((a, b), (b, c), (c, a))
            if flip[ti]:
                w = tuple((v, u) for u, v in w)
            for u, v in w:
                key = (u, v) if u < v else (v, u)
                for tj in edges[key]:
                    if tj == ti:
                        continue
                    # consistent neighbours traverse the shared edge oppositely
                    same_dir = directed(tris[tj], u, v)
                    if seen[tj]:
                        if bool(flip[tj]) != bool(same_dir):
                            raise NonOrientable(
                                f"contradictory winding at edge {key}"
                            )
                        continue
                    flip[tj] = same_dir
                    seen[tj] = True
                    comp.append(tj)
                    queue.append(tj)

        comp_tris = tris[comp]
        comp_flip = flip[comp]
        oriented = comp_tris.copy()
        oriented[comp_flip] = oriented[comp_flip][:, ::-1]
        comp_set = set(comp)
        boundary = any(
            len(ts) == 1 and ts[0] in comp_set for ts in edges.values()
        )
        if not boundary:
            vol = float(
                np.einsum(
                    "ij,ij->i",
                    mesh.vertices[oriented[:, 0]],
                    np.cross(
                        mesh.vertices[oriented[:, 1]], mesh.vertices[oriented[:, 2]]
                    ),
                ).sum()
                / 6.0
            )
            if vol < 0:
                oriented = oriented[:, ::-1]
        tris[comp] = oriented

    return Mesh(mesh.vertices.copy(), tris, mesh.cells)
