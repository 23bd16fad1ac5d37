"""Exception types raised by the reconstruction pipeline."""


class OrthosliceError(Exception):
    """Base class for all library errors."""


class DuplicatePlane(OrthosliceError):
    """Two slice planes of one axis coincide within tolerance."""


class TooFewPlanes(OrthosliceError):
    """An axis has fewer than two slice planes."""


class OnPlane(OrthosliceError):
    """A query point lies within tolerance of a grid plane."""


class OutOfHull(OrthosliceError):
    """A query point lies outside the sentinel-extended grid hull."""


class TangencyDetected(OrthosliceError):
    """A slice plane grazes a shape, producing a degenerate cross section."""


class OpenChain(OrthosliceError):
    """Mesh slicing produced intersection segments that do not close."""


class VertexOnPlane(OrthosliceError):
    """A mesh vertex lies within tolerance of a slice plane."""


class DegenerateContour(OrthosliceError):
    """A contour has no usable area (collinear or near-zero)."""


class CornerSingularity(OrthosliceError):
    """A contour crosses the in-plane lattice at a cell corner and
    deterministic snapping is disabled (or cannot resolve the crossing)."""


class EdgeNotInGrid(OrthosliceError):
    """A registration references a grid edge that does not exist."""


class UnpairedInput(OrthosliceError):
    """Node-point pairing left unpaired registrations and strict mode is on."""


class NonManifoldJunction(OrthosliceError):
    """A node point touches a number of arcs other than two inside one cell."""

    def __init__(self, cell, node_point, count):
        super().__init__(
            f"node point {node_point} touches {count} arcs in cell {cell}; expected 2"
        )
        self.cell = cell
        self.node_point = node_point
        self.count = count


class DegenerateLoop(OrthosliceError):
    """A polygon boundary has fewer than three distinct points."""


class NonOrientable(OrthosliceError):
    """Triangle winding propagation reached a contradiction."""


class EmptyMesh(OrthosliceError):
    """An operation requires a mesh with at least one triangle."""
