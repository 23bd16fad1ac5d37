"""orthoslice: triangle-mesh surface reconstruction from three mutually
orthogonal sets of planar contours."""

from .cell_cycles import (
    Arc,
    ArcGraph,
    SpatialPolygon,
    build_arc_graph,
    classify_cells,
    extract_cycles,
)
from .correspondence import (
    CorrespondenceGraph,
    EllipseFit,
    MstForest,
    build_correspondence_graph,
    component_count,
    component_labels,
    fit_ellipse,
    mst_correspondence,
    mst_cost,
    overlap_chains,
)
from .estimators import (
    MstCorrespondence,
    OrthogonalCorrespondence,
    OverlapCorrespondence,
    SurfaceReconstructor,
    check_document,
)
from .geometry import (
    AXES,
    Axis,
    Contour,
    ContourId,
    Grid,
    GridEdgeId,
    SliceDocument,
    SlicePlane,
    Violation,
    build_grid,
    locate_cell,
    validate_document,
)
from .io import load_document, load_obj, save_document, save_obj
from .metrics import (
    TopologyReport,
    hausdorff,
    polygon_histogram,
    topology,
)
from .node_points import (
    ClippedContour,
    EdgeRegistry,
    NodePoint,
    Registration,
    UnpairedRegistration,
    clip_contour,
    pair_node_points,
    register_intersections,
)
from .patcher import Mesh, assemble_mesh, orient_mesh, patch_polygon, polygon_center
from .pipeline import ReconstructionResult, reconstruct_document
from .shapes import Box, Cylinder, Sphere, Torus, Union, parse_shape
from .slicer import orient_contour, slice_analytic, slice_mesh

__version__ = "0.1.0"

__all__ = [
    "AXES",
    "Arc",
    "ArcGraph",
    "Axis",
    "Box",
    "ClippedContour",
    "Contour",
    "ContourId",
    "CorrespondenceGraph",
    "Cylinder",
    "EdgeRegistry",
    "EllipseFit",
    "Grid",
    "GridEdgeId",
    "Mesh",
    "MstCorrespondence",
    "MstForest",
    "NodePoint",
    "OrthogonalCorrespondence",
    "OverlapCorrespondence",
    "ReconstructionResult",
    "Registration",
    "SliceDocument",
    "SlicePlane",
    "SpatialPolygon",
    "Sphere",
    "SurfaceReconstructor",
    "TopologyReport",
    "Torus",
    "Union",
    "UnpairedRegistration",
    "Violation",
    "assemble_mesh",
    "build_arc_graph",
    "build_correspondence_graph",
    "build_grid",
    "check_document",
    "classify_cells",
    "clip_contour",
    "component_count",
    "component_labels",
    "extract_cycles",
    "fit_ellipse",
    "hausdorff",
    "load_document",
    "load_obj",
    "locate_cell",
    "mst_correspondence",
    "mst_cost",
    "orient_contour",
    "orient_mesh",
    "overlap_chains",
    "pair_node_points",
    "parse_shape",
    "patch_polygon",
    "polygon_center",
    "polygon_histogram",
    "reconstruct_document",
    "register_intersections",
    "save_document",
    "save_obj",
    "slice_analytic",
    "slice_mesh",
    "topology",
    "validate_document",
]
