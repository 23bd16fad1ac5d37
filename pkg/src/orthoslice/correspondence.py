"""Contour correspondence: the intersection graph over orthogonal contours,
plus two classic baselines restricted to a single parallel set — footprint
overlap chaining and minimum-spanning-tree linking over ellipse fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateContour
from .geometry import (
    Contour,
    ContourId,
    SlicePlane,
    point_in_polygon,
    segments_cross,
)
from .node_points import NodePoint


@dataclass(frozen=True)
class CorrespondenceGraph:
    """Contours as nodes; an edge joins two contours sharing a node point."""

    nodes: tuple[ContourId, ...]
    edges: tuple[tuple[ContourId, ContourId], ...]


def build_correspondence_graph(
    node_points: list[NodePoint], contour_ids: list[ContourId]
) -> CorrespondenceGraph:
    """One node per document contour (intersection-free contours stay as
    isolated nodes); multiple intersections collapse to one edge."""
    nodes = tuple(sorted(set(contour_ids)))
    edges = set()
    for np_ in node_points:
        a, b = np_.ref_a.contour, np_.ref_b.contour
        edges.add((a, b) if a <= b else (b, a))
    return CorrespondenceGraph(nodes, tuple(sorted(edges)))


def _connected_components(
    nodes: tuple[ContourId, ...], edges
) -> dict[ContourId, int]:
    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = sorted({find(n) for n in nodes})
    order = {r: i for i, r in enumerate(roots)}
    return {n: order[find(n)] for n in nodes}


def component_labels(g: CorrespondenceGraph) -> dict[ContourId, int]:
    """Component index per contour, numbered by smallest member id."""
    return _connected_components(g.nodes, g.edges)


def component_count(g: CorrespondenceGraph) -> int:
    labels = component_labels(g)
    return len(set(labels.values())) if labels else 0


@dataclass(frozen=True)
class EllipseFit:
    """Moment-based ellipse of one contour's vertex set."""

    contour: ContourId
    center: tuple[float, float]  # in-plane (u, v)
    plane_coord: float
    a: float  # semi-major
    b: float  # semi-minor


def fit_ellipse(c: Contour, plane_coord: float = 0.0) -> EllipseFit:
    """Center = vertex centroid; axes from the vertex covariance eigenvalues
    as sqrt(2 * lambda) (uniform perimeter samples of an ellipse have axis
    variance equal to half the squared semi-axis)."""
    v = c.vertices
    if len(v) < 3:
        raise DegenerateContour(f"contour {c.id}: fewer than 3 vertices")
    mean = v.mean(axis=0)
    d = v - mean
    sxx = float(np.mean(d[:, 0] * d[:, 0]))
    syy = float(np.mean(d[:, 1] * d[:, 1]))
    sxy = float(np.mean(d[:, 0] * d[:, 1]))
    half_tr = 0.5 * (sxx + syy)
    det = sxx * syy - sxy * sxy
    disc = max(half_tr * half_tr - det, 0.0)
    l1 = half_tr + math.sqrt(disc)
    l2 = half_tr - math.sqrt(disc)
    if l2 <= 1e-12 * max(l1, 1e-300):
        raise DegenerateContour(f"contour {c.id}: vertices are collinear")
    return EllipseFit(
        c.id,
        (float(mean[0]), float(mean[1])),
        plane_coord,
        math.sqrt(2.0 * l1),
        math.sqrt(2.0 * max(l2, 0.0)),
    )


def mst_cost(e_i: EllipseFit, e_j: EllipseFit) -> float:
    """Squared differences of centers and semi-axes; the plane coordinate
    does not enter."""
    return (
        (e_i.center[0] - e_j.center[0]) ** 2
        + (e_i.center[1] - e_j.center[1]) ** 2
        + (e_i.a - e_j.a) ** 2
        + (e_i.b - e_j.b) ** 2
    )


@dataclass(frozen=True)
class MstForest:
    """Accepted linking edges between contours of adjacent parallel planes."""

    edges: tuple[tuple[ContourId, ContourId], ...]


def mst_correspondence(planes: list[SlicePlane]) -> MstForest:
    """Minimum spanning forest over all contour pairs of consecutive planes.

    Greedy edge selection with ties broken by lexicographic contour-id pair,
    so the edge set is deterministic under any candidate input order.
    """
    planes = sorted(planes, key=lambda p: p.coord)
    fits: dict[ContourId, EllipseFit] = {}
    for plane in planes:
        for c in plane.contours:
            fits[c.id] = fit_ellipse(c, plane.coord)

    candidates = []
    for p0, p1 in zip(planes, planes[1:]):
        for c0 in p0.contours:
            for c1 in p1.contours:
                a, b = sorted((c0.id, c1.id))
                candidates.append((mst_cost(fits[a], fits[b]), a, b))
    candidates.sort()

    nodes = tuple(sorted(fits))
    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    accepted = []
    for cost, a, b in candidates:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
            accepted.append((a, b))
    return MstForest(tuple(sorted(accepted)))


def mst_labels(planes: list[SlicePlane], forest: MstForest) -> dict[ContourId, int]:
    nodes = tuple(sorted(c.id for p in planes for c in p.contours))
    return _connected_components(nodes, forest.edges)


def polygons_overlap(p: np.ndarray, q: np.ndarray) -> bool:
    """True if two simple polygons' interiors intersect: some vertex of one
    lies inside the other, or some edges properly cross."""
    if any(point_in_polygon(v, q) for v in p):
        return True
    if any(point_in_polygon(v, p) for v in q):
        return True
    np_, nq = len(p), len(q)
    for i in range(np_):
        a1, a2 = p[i], p[(i + 1) % np_]
        for j in range(nq):
            if segments_cross(a1, a2, q[j], q[(j + 1) % nq]):
                return True
    return False


def overlap_chains(planes: list[SlicePlane]) -> tuple[int, dict[ContourId, int]]:
    """Link contours of adjacent planes whose in-plane footprints overlap;
    return the component count and the component index per contour."""
    planes = sorted(planes, key=lambda p: p.coord)
    nodes = tuple(sorted(c.id for p in planes for c in p.contours))
    edges = []
    for p0, p1 in zip(planes, planes[1:]):
        for c0 in p0.contours:
            for c1 in p1.contours:
                if polygons_overlap(c0.vertices, c1.vertices):
                    edges.append(tuple(sorted((c0.id, c1.id))))
    labels = _connected_components(nodes, edges)
    count = len(set(labels.values())) if labels else 0
    return count, labels
