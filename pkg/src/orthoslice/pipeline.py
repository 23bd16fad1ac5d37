"""End-to-end reconstruction: validate, grid, clip, register, pair, build
arcs, extract cycles, patch, assemble, orient, and report.

The pipeline is fully deterministic: contour order, node-point ids, polygon
order and mesh bytes are identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import metrics
from .cell_cycles import (
    ArcGraph,
    SpatialPolygon,
    build_arc_graph,
    classify_cells,
    extract_cycles,
)
from .errors import NonManifoldJunction, UnpairedInput
from .geometry import (
    Grid,
    SliceDocument,
    Violation,
    build_grid,
    validate_document,
)
from .node_points import (
    ClippedContour,
    EdgeRegistry,
    NodePoint,
    UnpairedRegistration,
    clip_contour,
    pair_node_points,
    register_intersections,
)
from .patcher import Mesh, assemble_mesh, folded_fan_count, orient_mesh, polygon_center


@dataclass
class ReconstructionResult:
    grid: Grid
    violations: list[Violation]
    clipped: list[ClippedContour]
    registry: EdgeRegistry
    node_points: list[NodePoint]
    unpaired: list[UnpairedRegistration]
    arc_graph: ArcGraph
    polygons: list[SpatialPolygon]
    nonmanifold: list[NonManifoldJunction]
    mesh: Mesh
    report: dict


def _map_ordered(fn, items, workers: int):
    """Map preserving input order; thread pool only when asked for."""
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def reconstruct_document(
    doc: SliceDocument,
    epsilon: float | None = None,
    strict: bool = False,
    workers: int = 1,
) -> ReconstructionResult:
    """Run the whole reconstruction on a slice document.

    ``strict`` turns corner singularities, unpaired registrations and
    non-manifold junctions into hard errors; otherwise the pipeline degrades
    gracefully and reports them.
    """
    if doc.n_contours == 0:
        raise ValueError("nothing to reconstruct: document has no contours")
    violations = validate_document(doc, epsilon, check_simplicity=strict)
    fatal = [v for v in violations if v.rule in ("too_few_vertices", "duplicate_vertex")]
    if fatal:
        raise ValueError(f"document has invalid contours: {fatal[0]}")

    grid = build_grid(doc, epsilon)
    contours = [c for _, c in doc.contours()]
    contours.sort(key=lambda c: c.id)
    clipped = _map_ordered(
        lambda c: clip_contour(c, grid, snap_corners=not strict), contours, workers
    )

    registry = EdgeRegistry(grid)
    for cc in clipped:
        register_intersections(cc, registry)

    node_points, unpaired = pair_node_points(registry)
    if strict and unpaired:
        raise UnpairedInput(f"{len(unpaired)} unpaired registrations")

    arc_graph = build_arc_graph(
        clipped, node_points, grid, unpaired, allow_unpaired=True
    )
    crossing, passing = classify_cells(arc_graph, grid)
    polygons, nonmanifold = extract_cycles(arc_graph, grid, strict=strict)

    patchable = [p for p in polygons if len({tuple(q) for q in p.boundary}) >= 3]
    skipped = len(polygons) - len(patchable)
    mesh = orient_mesh(assemble_mesh(patchable, grid.epsilon))
    dropped = sum(len(p.boundary) for p in patchable) - mesh.n_triangles
    folded = sum(
        folded_fan_count(p, polygon_center(p), grid.epsilon) for p in patchable
    )

    topo = metrics.topology(mesh)
    hist = metrics.polygon_histogram(polygons)
    report = {
        "nodePoints": len(node_points),
        "mergedJunctions": len(node_points) - len(arc_graph.node_points),
        "unpaired": [
            {"edge": str(u.edge), "contour": str(u.registration.contour), "t": u.registration.t}
            for u in unpaired
        ],
        "orphanContours": [str(c) for c in arc_graph.orphan_contours],
        "polygons": len(polygons),
        "histogram": {str(k): v for k, v in hist.items()},
        "topology": topo.to_json(),
        "contours": len(contours),
        "arcs": len(arc_graph.arcs),
        "cells": {"crossing": len(crossing), "passing": len(passing)},
        "violations": [str(v) for v in violations],
        "skippedPolygons": skipped,
        "droppedTriangles": int(dropped),
        "foldedTriangles": int(folded),
        "nonManifoldCells": [str(e.cell) for e in nonmanifold],
        "polygonsOutsideCell": sum(1 for p in polygons if not p.in_cell),
        "epsilon": grid.epsilon,
    }
    return ReconstructionResult(
        grid,
        violations,
        clipped,
        registry,
        node_points,
        unpaired,
        arc_graph,
        polygons,
        nonmanifold,
        mesh,
        report,
    )
