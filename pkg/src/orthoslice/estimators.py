"""scikit-learn style estimators wrapping the functional pipeline.

``SurfaceReconstructor`` is transform-shaped (slice document in, triangle
mesh out); the three correspondence criteria are clusterer-shaped (fit a
document, read component labels per contour).  All parameters live in
``__init__`` so ``get_params``/``set_params``/``clone`` work as usual; the
"X" these estimators consume is a :class:`SliceDocument`, not an array.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator

from . import correspondence as corr
from .geometry import Axis, SliceDocument, validate_document
from .pipeline import reconstruct_document


def check_document(document) -> SliceDocument:
    """Validation helper used by every estimator's ``fit``."""
    if not isinstance(document, SliceDocument):
        raise TypeError(
            f"expected a SliceDocument, got {type(document).__name__}"
        )
    fatal = [
        v
        for v in validate_document(document)
        if v.rule in ("too_few_vertices", "duplicate_vertex")
    ]
    if fatal:
        raise ValueError(f"invalid document: {fatal[0]}")
    return document


class SurfaceReconstructor(BaseEstimator):
    """Reconstruct a triangle mesh from three orthogonal slice sets.

    Parameters
    ----------
    epsilon : float or None
        Absolute tolerance; defaults to 1e-9 times the grid diagonal.
    strict : bool
        Escalate corner singularities, unpaired registrations and
        non-manifold junctions to errors.
    workers : int
        Worker threads for the parallel phases; results are identical for
        any value.

    Attributes (after ``fit``)
    --------------------------
    mesh_, grid_, node_points_, unpaired_, arc_graph_, polygons_, report_
    """

    def __init__(self, epsilon=None, strict=False, workers=1):
        self.epsilon = epsilon
        self.strict = strict
        self.workers = workers

    def fit(self, document, y=None):
        result = reconstruct_document(
            check_document(document),
            epsilon=self.epsilon,
            strict=self.strict,
            workers=self.workers,
        )
        self.result_ = result
        self.grid_ = result.grid
        self.node_points_ = result.node_points
        self.unpaired_ = result.unpaired
        self.arc_graph_ = result.arc_graph
        self.polygons_ = result.polygons
        self.mesh_ = result.mesh
        self.report_ = result.report
        return self

    def transform(self, document):
        """Reconstruct ``document`` and return its mesh (stateless: nothing
        is learned in ``fit``, so transform recomputes for its input)."""
        return reconstruct_document(
            check_document(document),
            epsilon=self.epsilon,
            strict=self.strict,
            workers=self.workers,
        ).mesh

    def fit_transform(self, document, y=None):
        return self.fit(document).mesh_


class OrthogonalCorrespondence(BaseEstimator):
    """Cluster contours by mutual intersection of orthogonal contours.

    After ``fit``: ``graph_``, ``labels_`` (contour id -> component index)
    and ``n_components_``.
    """

    def __init__(self, epsilon=None, workers=1):
        self.epsilon = epsilon
        self.workers = workers

    def fit(self, document, y=None):
        doc = check_document(document)
        result = reconstruct_document(
            doc, epsilon=self.epsilon, strict=False, workers=self.workers
        )
        self.graph_ = corr.build_correspondence_graph(
            result.node_points, doc.contour_ids()
        )
        self.labels_ = corr.component_labels(self.graph_)
        self.n_components_ = corr.component_count(self.graph_)
        return self

    def fit_predict(self, document, y=None):
        return self.fit(document).labels_


class OverlapCorrespondence(BaseEstimator):
    """Chain contours of one parallel set by footprint overlap."""

    def __init__(self, axis="z"):
        self.axis = axis

    def fit(self, document, y=None):
        doc = check_document(document)
        planes = doc.planes(Axis(self.axis))
        self.n_components_, self.labels_ = corr.overlap_chains(list(planes))
        return self

    def fit_predict(self, document, y=None):
        return self.fit(document).labels_


class MstCorrespondence(BaseEstimator):
    """Link contours of one parallel set by a minimum spanning forest over
    ellipse-fit costs."""

    def __init__(self, axis="z"):
        self.axis = axis

    def fit(self, document, y=None):
        doc = check_document(document)
        planes = list(doc.planes(Axis(self.axis)))
        self.forest_ = corr.mst_correspondence(planes)
        self.labels_ = corr.mst_labels(planes, self.forest_)
        self.n_components_ = len(set(self.labels_.values())) if self.labels_ else 0
        return self

    def fit_predict(self, document, y=None):
        return self.fit(document).labels_
