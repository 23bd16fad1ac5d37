"""Analytic test shapes: solid membership, surface distance, extents and
deterministic surface sampling.

These back the synthetic slicer and the distance metrics.  All queries are
vectorized over (n, 3) point arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .geometry import Axis

# R2 low-discrepancy sequence (plastic-constant lattice); the additive
# constants below are the documented sampling seed for all metrics.
R2_ALPHA = (0.7548776662466927, 0.5698402909980532)
SAMPLE_SEED = f"R2({R2_ALPHA[0]}, {R2_ALPHA[1]})"


def r2_sequence(n: int, dims: int = 2, offset: int = 1) -> np.ndarray:
    """First ``n`` points of the R2 lattice in the unit square/line."""
    k = np.arange(offset, offset + n, dtype=float)[:, None]
    alpha = np.array(R2_ALPHA[:dims])[None, :]
    return np.mod(k * alpha, 1.0)


@dataclass(frozen=True)
class Sphere:
    center: tuple[float, float, float]
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("sphere radius must be positive")


@dataclass(frozen=True)
class Box:
    min_corner: tuple[float, float, float]
    max_corner: tuple[float, float, float]

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.min_corner, self.max_corner)):
            raise ValueError("box corners must satisfy min < max per axis")


@dataclass(frozen=True)
class Cylinder:
    """Finite solid cylinder with flat caps."""

    base: tuple[float, float, float]
    axis_dir: tuple[float, float, float]
    radius: float
    length: float

    def __post_init__(self):
        if self.radius <= 0 or self.length <= 0:
            raise ValueError("cylinder radius and length must be positive")
        d = np.asarray(self.axis_dir, dtype=float)
        n = float(np.linalg.norm(d))
        if n == 0:
            raise ValueError("cylinder axis direction must be non-zero")
        object.__setattr__(self, "axis_dir", tuple(d / n))


@dataclass(frozen=True)
class Torus:
    center: tuple[float, float, float]
    major_radius: float
    minor_radius: float
    axis: Axis = Axis.Z

    def __post_init__(self):
        if not 0 < self.minor_radius < self.major_radius:
            raise ValueError("torus needs 0 < minor radius < major radius")


@dataclass(frozen=True)
class Union:
    """Disjoint union; members must not overlap (bounding-box check)."""

    members: tuple

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        boxes = [bounds(m) for m in members]
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                (alo, ahi), (blo, bhi) = boxes[i], boxes[j]
                if np.all(alo < bhi) and np.all(blo < ahi):
                    raise ValueError(f"union members {i} and {j} overlap")


AnalyticShape = Sphere | Box | Cylinder | Torus | Union


def _pts(points) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    return p[None, :] if p.ndim == 1 else p


def _cyl_meridian(shape: Cylinder, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(radial distance from axis, arc-length along axis) per point."""
    b = np.asarray(shape.base)
    a = np.asarray(shape.axis_dir)
    w = p - b
    s = w @ a
    rad = np.linalg.norm(w - s[:, None] * a[None, :], axis=1)
    return rad, s


def _torus_meridian(shape: Torus, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = np.asarray(shape.center)
    w = p - c
    i = shape.axis.index
    s = w[:, i]
    radial = np.delete(w, i, axis=1)
    rho = np.linalg.norm(radial, axis=1)
    return rho, s


def contains(shape: AnalyticShape, points) -> np.ndarray:
    """Boolean solid-membership per point (boundary counts as inside)."""
    p = _pts(points)
    if isinstance(shape, Sphere):
        return np.linalg.norm(p - np.asarray(shape.center), axis=1) <= shape.radius
    if isinstance(shape, Box):
        lo, hi = np.asarray(shape.min_corner), np.asarray(shape.max_corner)
        return np.all((p >= lo) & (p <= hi), axis=1)
    if isinstance(shape, Cylinder):
        rad, s = _cyl_meridian(shape, p)
        return (rad <= shape.radius) & (s >= 0.0) & (s <= shape.length)
    if isinstance(shape, Torus):
        rho, s = _torus_meridian(shape, p)
        return np.hypot(rho - shape.major_radius, s) <= shape.minor_radius
    if isinstance(shape, Union):
        out = np.zeros(len(p), dtype=bool)
        for m in shape.members:
            out |= contains(m, p)
        return out
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def surface_distance(shape: AnalyticShape, points) -> np.ndarray:
    """Exact distance from each point to the shape's boundary surface."""
    p = _pts(points)
    if isinstance(shape, Sphere):
        return np.abs(np.linalg.norm(p - np.asarray(shape.center), axis=1) - shape.radius)
    if isinstance(shape, Box):
        lo, hi = np.asarray(shape.min_corner), np.asarray(shape.max_corner)
        outside = np.maximum(np.maximum(lo - p, 0.0), np.maximum(p - hi, 0.0))
        d_out = np.linalg.norm(outside, axis=1)
        margin = np.minimum(p - lo, hi - p)
        d_in = np.maximum(margin.min(axis=1), 0.0)
        return np.where(d_out > 0, d_out, d_in)
    if isinstance(shape, Cylinder):
        # in the meridian half-plane the solid is the rectangle
        # [0, radius] x [0, length]
        rad, s = _cyl_meridian(shape, p)
        dr_out = np.maximum(rad - shape.radius, 0.0)
        ds_out = np.maximum(np.maximum(-s, s - shape.length), 0.0)
        d_out = np.hypot(dr_out, ds_out)
        d_in = np.minimum.reduce([shape.radius - rad, s, shape.length - s])
        return np.where(d_out > 0, d_out, np.maximum(d_in, 0.0))
    if isinstance(shape, Torus):
        rho, s = _torus_meridian(shape, p)
        return np.abs(np.hypot(rho - shape.major_radius, s) - shape.minor_radius)
    if isinstance(shape, Union):
        return np.minimum.reduce([surface_distance(m, p) for m in shape.members])
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def bounds(shape: AnalyticShape) -> tuple[np.ndarray, np.ndarray]:
    """Axis-aligned bounding box (min corner, max corner)."""
    if isinstance(shape, Sphere):
        c = np.asarray(shape.center)
        return c - shape.radius, c + shape.radius
    if isinstance(shape, Box):
        return np.asarray(shape.min_corner, float), np.asarray(shape.max_corner, float)
    if isinstance(shape, Cylinder):
        b = np.asarray(shape.base)
        t = b + shape.length * np.asarray(shape.axis_dir)
        a = np.asarray(shape.axis_dir)
        pad = shape.radius * np.sqrt(np.maximum(1.0 - a * a, 0.0))
        return np.minimum(b, t) - pad, np.maximum(b, t) + pad
    if isinstance(shape, Torus):
        c = np.asarray(shape.center)
        pad = np.full(3, shape.major_radius + shape.minor_radius)
        pad[shape.axis.index] = shape.minor_radius
        return c - pad, c + pad
    if isinstance(shape, Union):
        bs = [bounds(m) for m in shape.members]
        return (
            np.minimum.reduce([b[0] for b in bs]),
            np.maximum.reduce([b[1] for b in bs]),
        )
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def extent_along(shape: AnalyticShape, axis: Axis) -> tuple[float, float]:
    lo, hi = bounds(shape)
    return float(lo[axis.index]), float(hi[axis.index])


def surface_area(shape: AnalyticShape) -> float:
    if isinstance(shape, Sphere):
        return 4.0 * math.pi * shape.radius**2
    if isinstance(shape, Box):
        d = np.asarray(shape.max_corner) - np.asarray(shape.min_corner)
        return 2.0 * float(d[0] * d[1] + d[1] * d[2] + d[2] * d[0])
    if isinstance(shape, Cylinder):
        return 2.0 * math.pi * shape.radius * shape.length + 2.0 * math.pi * shape.radius**2
    if isinstance(shape, Torus):
        return 4.0 * math.pi**2 * shape.major_radius * shape.minor_radius
    if isinstance(shape, Union):
        return sum(surface_area(m) for m in shape.members)
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def _cyl_frame(shape: Cylinder) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    a = np.asarray(shape.axis_dir)
    ref = np.array([0.0, 0.0, 1.0]) if abs(a[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(a, ref)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(a, e1)
    return a, e1, e2


def surface_points(shape: AnalyticShape, n: int) -> np.ndarray:
    """About ``n`` deterministic points on the boundary surface.

    Sampling runs off the documented R2 lattice seed so repeated calls are
    byte-identical.  Sharp features (box corners and edges) are included so
    distance maxima attained there are not missed.
    """
    n = max(int(n), 8)
    if isinstance(shape, Sphere):
        # Fibonacci sphere
        k = np.arange(n, dtype=float)
        z = 1.0 - (2.0 * k + 1.0) / n
        phi = 2.0 * math.pi * np.mod(k * R2_ALPHA[0], 1.0)
        r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        pts = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
        return np.asarray(shape.center) + shape.radius * pts
    if isinstance(shape, Box):
        lo = np.asarray(shape.min_corner, float)
        hi = np.asarray(shape.max_corner, float)
        d = hi - lo
        faces = []
        areas = []
        for ax in range(3):
            u, v = (ax + 1) % 3, (ax + 2) % 3
            for side in (lo[ax], hi[ax]):
                faces.append((ax, u, v, side))
                areas.append(d[u] * d[v])
        total = sum(areas)
        pts = []
        for (ax, u, v, side), area in zip(faces, areas):
            nf = max(int(round(n * area / total)), 4)
            ku = max(int(round(math.sqrt(nf * d[u] / d[v]))), 2)
            kv = max(int(math.ceil(nf / ku)), 2)
            uu = np.linspace(lo[u], hi[u], ku)  # inclusive: keeps edges/corners
            vv = np.linspace(lo[v], hi[v], kv)
            gu, gv = np.meshgrid(uu, vv, indexing="ij")
            face = np.empty((gu.size, 3))
            face[:, ax] = side
            face[:, u] = gu.ravel()
            face[:, v] = gv.ravel()
            pts.append(face)
        return np.concatenate(pts, axis=0)
    if isinstance(shape, Cylinder):
        a, e1, e2 = _cyl_frame(shape)
        b = np.asarray(shape.base)
        area_tube = 2.0 * math.pi * shape.radius * shape.length
        area_cap = math.pi * shape.radius**2
        n_tube = max(int(round(n * area_tube / (area_tube + 2 * area_cap))), 8)
        n_cap = max((n - n_tube) // 2, 4)
        uv = r2_sequence(n_tube)
        theta = 2.0 * math.pi * uv[:, 0]
        s = shape.length * uv[:, 1]
        radial = np.outer(np.cos(theta), e1) + np.outer(np.sin(theta), e2)
        tube = b + s[:, None] * a + shape.radius * radial
        caps = []
        for s0 in (0.0, shape.length):
            uv = r2_sequence(n_cap, offset=7)
            rr = shape.radius * np.sqrt(uv[:, 0])
            th = 2.0 * math.pi * uv[:, 1]
            radial = np.outer(np.cos(th), e1) + np.outer(np.sin(th), e2)
            caps.append(b + s0 * a + rr[:, None] * radial)
        # rim circles carry the sharp crease
        th = 2.0 * math.pi * np.arange(64) / 64.0
        radial = np.outer(np.cos(th), e1) + np.outer(np.sin(th), e2)
        rims = [b + s0 * a + shape.radius * radial for s0 in (0.0, shape.length)]
        return np.concatenate([tube] + caps + rims, axis=0)
    if isinstance(shape, Torus):
        uv = r2_sequence(n)
        psi = 2.0 * math.pi * uv[:, 0]
        phi = 2.0 * math.pi * uv[:, 1]
        rho = shape.major_radius + shape.minor_radius * np.cos(phi)
        s = shape.minor_radius * np.sin(phi)
        i = shape.axis.index
        u, v = (i + 1) % 3, (i + 2) % 3
        pts = np.empty((n, 3))
        pts[:, u] = rho * np.cos(psi)
        pts[:, v] = rho * np.sin(psi)
        pts[:, i] = s
        return np.asarray(shape.center) + pts
    if isinstance(shape, Union):
        total = surface_area(shape)
        parts = [
            surface_points(m, max(int(round(n * surface_area(m) / total)), 8))
            for m in shape.members
        ]
        return np.concatenate(parts, axis=0)
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def parse_shape(spec: dict) -> AnalyticShape:
    """Build a shape from its JSON description (see the CLI docs)."""
    kind = spec.get("type")
    if kind == "sphere":
        return Sphere(tuple(spec["center"]), float(spec["radius"]))
    if kind == "box":
        return Box(tuple(spec["min"]), tuple(spec["max"]))
    if kind == "cylinder":
        return Cylinder(
            tuple(spec["base"]),
            tuple(spec["axis"]),
            float(spec["radius"]),
            float(spec["length"]),
        )
    if kind == "torus":
        return Torus(
            tuple(spec["center"]),
            float(spec["major_radius"]),
            float(spec["minor_radius"]),
            Axis(spec.get("axis", "z")),
        )
    if kind == "union":
        return Union(tuple(parse_shape(m) for m in spec["members"]))
    raise ValueError(f"unknown shape type {kind!r}")
