import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthoslice.errors import CornerSingularity, EdgeNotInGrid
from orthoslice.geometry import (
    AXES,
    Axis,
    Contour,
    ContourId,
    GridEdgeId,
    SliceDocument,
    SlicePlane,
    build_grid,
)
from orthoslice.node_points import (
    EdgeRegistry,
    Registration,
    _match,
    clip_contour,
    pair_node_points,
    register_intersections,
)

from oracles import line_crossings


def doc_with(planes_by_axis, z_contours=()):
    sets = {}
    for axis in AXES:
        planes = []
        for pi, coord in enumerate(planes_by_axis[axis.value]):
            contours = ()
            if axis is Axis.Z and coord == 1.0 and z_contours:
                contours = tuple(
                    Contour(ContourId(axis, pi, ci), v)
                    for ci, v in enumerate(z_contours)
                )
            planes.append(SlicePlane(axis, coord, contours))
        sets[axis] = tuple(planes)
    return SliceDocument(sets)


@pytest.fixture()
def grid3():
    return build_grid(doc_with({a: [0.0, 1.0, 2.0] for a in "xyz"}))


def make_z_contour(verts, plane=1):
    return Contour(ContourId(Axis.Z, plane, 0), verts)


class TestClipContour:
    def test_square_crossing_center_lines(self, grid3):
        c = make_z_contour([[0.5, 0.5], [1.5, 0.5], [1.5, 1.5], [0.5, 1.5]])
        cc = clip_contour(c, grid3)
        assert len(cc.vertices) == 8
        assert cc.n_insertions == 4
        inserted = [v.point for v in cc.vertices if v.inserted]
        assert inserted == [(1.0, 0.5), (1.5, 1.0), (1.0, 1.5), (0.5, 1.0)]
        np.testing.assert_array_equal(cc.original_vertices(), c.vertices)
        for v in cc.vertices:
            if v.is_crossing:
                u, w = grid3.edge_line(v.edge)
                p3 = v.position
                axes = (v.edge.direction.u_axis.index, v.edge.direction.v_axis.index)
                assert abs(p3[axes[0]] - u) <= grid3.epsilon
                assert abs(p3[axes[1]] - w) <= grid3.epsilon

    def test_contour_within_one_cell_untouched(self, grid3):
        c = make_z_contour([[0.2, 0.2], [0.8, 0.2], [0.8, 0.8], [0.2, 0.8]])
        cc = clip_contour(c, grid3)
        assert cc.n_insertions == 0
        assert all(not v.is_crossing for v in cc.vertices)
        np.testing.assert_array_equal(cc.original_vertices(), c.vertices)

    def test_vertex_at_corner_with_snapping_disabled(self, grid3):
        c = make_z_contour([[1.0, 1.0], [1.7, 1.1], [1.3, 1.7]])
        with pytest.raises(CornerSingularity):
            clip_contour(c, grid3, snap_corners=False)
        clip_contour(c, grid3)  # default snapping resolves it

    def test_vertex_on_line_is_flagged_not_duplicated(self, grid3):
        # transversal crossing exactly at an original vertex
        c = make_z_contour([[1.0, 0.5], [1.5, 1.2], [0.5, 1.2]])
        cc = clip_contour(c, grid3)
        flagged = [v for v in cc.vertices if v.is_crossing and not v.inserted]
        assert any(v.point == (1.0, 0.5) for v in flagged)
        np.testing.assert_array_equal(cc.original_vertices(), c.vertices)

    def test_plane_index_checked(self, grid3):
        c = Contour(ContourId(Axis.Z, 7, 0), [[0.2, 0.2], [0.8, 0.2], [0.5, 0.8]])
        with pytest.raises(EdgeNotInGrid):
            clip_contour(c, grid3)


class TestRegisterIntersections:
    def test_square_registrations(self, grid3):
        c = make_z_contour([[0.5, 0.5], [1.5, 0.5], [1.5, 1.5], [0.5, 1.5]])
        cc = clip_contour(c, grid3)
        reg = register_intersections(cc, EdgeRegistry(grid3))
        assert len(reg) == 4
        edges = reg.edges()
        # two different edges on the line {x=1, z=1} split by y=1
        assert GridEdgeId(Axis.Y, 1, 1, 1) in edges
        assert GridEdgeId(Axis.Y, 1, 1, 2) in edges
        # and two on the line {y=1, z=1}
        assert GridEdgeId(Axis.X, 1, 1, 1) in edges
        assert GridEdgeId(Axis.X, 1, 1, 2) in edges
        t_by_edge = {e: [r.t for r in reg.registrations(e)] for e in edges}
        assert t_by_edge[GridEdgeId(Axis.Y, 1, 1, 1)] == [0.5]
        assert t_by_edge[GridEdgeId(Axis.Y, 1, 1, 2)] == [1.5]

    def test_no_insertions_leaves_registry_unchanged(self, grid3):
        c = make_z_contour([[0.2, 0.2], [0.8, 0.2], [0.8, 0.8], [0.2, 0.8]])
        cc = clip_contour(c, grid3)
        reg = register_intersections(cc, EdgeRegistry(grid3))
        assert len(reg) == 0
        assert reg.edges() == []

    def test_two_contours_match_brute_force(self, grid3):
        # two contours of the same plane both crossing x=1
        c1 = make_z_contour([[0.6, 0.3], [1.4, 0.3], [1.4, 0.7], [0.6, 0.7]])
        c2 = Contour(
            ContourId(Axis.Z, 1, 1),
            [[0.7, 1.2], [1.3, 1.2], [1.3, 1.6], [0.7, 1.6]],
        )
        reg = EdgeRegistry(grid3)
        for c in (c1, c2):
            register_intersections(clip_contour(c, grid3), reg)
        got = sorted(
            r.t for e in reg.edges() if e.direction is Axis.Y for r in reg.registrations(e)
        )
        expect = sorted(
            line_crossings(c1.vertices, 0, 1.0) + line_crossings(c2.vertices, 0, 1.0)
        )
        assert got == pytest.approx(expect, abs=1e-12)

    def test_conservation(self, grid3):
        contours = [
            make_z_contour([[0.5, 0.5], [1.5, 0.5], [1.5, 1.5], [0.5, 1.5]]),
            Contour(
                ContourId(Axis.Z, 1, 1), [[0.2, 0.2], [1.8, 0.3], [1.7, 1.8], [0.1, 1.6]]
            ),
        ]
        reg = EdgeRegistry(grid3)
        crossings = 0
        for c in contours:
            cc = clip_contour(c, grid3)
            crossings += len(cc.crossings())
            register_intersections(cc, reg)
        assert len(reg) == crossings


class TestPairing:
    def mkreg(self, axis, t, pos, cid=0, vid=0):
        return Registration(
            axis, ContourId(axis, 1, cid), vid, t, tuple(map(float, pos))
        )

    def test_midpoint_rule(self, grid3):
        reg = EdgeRegistry(grid3)
        edge = GridEdgeId(Axis.Y, 1, 1, 1)  # line {x=1, z=1}
        reg.add(edge, self.mkreg(Axis.Z, 0.70, (1.0, 0.70, 1.0)))
        reg.add(edge, self.mkreg(Axis.X, 0.72, (1.0, 0.72, 1.0)))
        nodes, unpaired = pair_node_points(reg)
        assert unpaired == []
        (n,) = nodes
        assert n.position == (1.0, 0.71, 1.0)
        assert {n.ref_a.axis, n.ref_b.axis} == {Axis.Z, Axis.X}

    def test_empty_registry(self, grid3):
        nodes, unpaired = pair_node_points(EdgeRegistry(grid3))
        assert nodes == [] and unpaired == []

    def test_single_registration_unpaired(self, grid3):
        reg = EdgeRegistry(grid3)
        edge = GridEdgeId(Axis.Y, 1, 1, 1)
        reg.add(edge, self.mkreg(Axis.Z, 0.5, (1.0, 0.5, 1.0)))
        nodes, unpaired = pair_node_points(reg)
        assert nodes == []
        assert len(unpaired) == 1
        assert unpaired[0].registration.t == 0.5

    def test_wrong_axis_rejected(self, grid3):
        reg = EdgeRegistry(grid3)
        edge = GridEdgeId(Axis.Y, 1, 1, 1)
        with pytest.raises(EdgeNotInGrid):
            reg.add(edge, self.mkreg(Axis.Y, 0.5, (1.0, 0.5, 1.0)))

    def test_match_symmetric_in_families(self):
        A = [self.mkreg(Axis.Z, t, (1, t, 1), vid=i) for i, t in enumerate([0.1, 0.4, 0.9])]
        B = [self.mkreg(Axis.X, t, (1, t, 1), vid=i) for i, t in enumerate([0.12, 0.41, 0.88])]
        pab, la = _match(A, B, 0.5)
        pba, lb = _match(B, A, 0.5)
        assert [(a.t, b.t) for a, b in pab] == [(b.t, a.t) for a, b in pba]
        assert la == [] and lb == []

    def test_rank_pairing_demoted_on_distance_failure(self):
        # counts match but ranks collide: fall back to mutual-nearest
        A = [self.mkreg(Axis.Z, 0.1, (1, 0.1, 1), vid=0)]
        B = [self.mkreg(Axis.X, 5.0, (1, 5.0, 1), vid=0)]
        pairs, left = _match(A, B, 0.5)
        assert pairs == []
        assert len(left) == 2


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=3, max_value=16),
    st.floats(0.15, 0.9),
    st.floats(0.2, 1.8),
    st.floats(0.2, 1.8),
)
def test_clip_properties_on_random_convex_contours(n, radius, cx, cy):
    doc = doc_with({a: [0.0, 1.0, 2.0] for a in "xyz"})
    grid = build_grid(doc)
    angles = 2 * np.pi * np.arange(n) / n + 0.37
    verts = np.stack(
        [cx + radius * np.cos(angles), cy + radius * np.sin(angles)], axis=1
    )
    c = make_z_contour(verts)
    cc = clip_contour(c, grid)
    # removing inserted vertices recovers the input exactly
    np.testing.assert_array_equal(cc.original_vertices(), verts)
    # one registration per crossing, each on its edge's line
    reg = register_intersections(cc, EdgeRegistry(grid))
    assert len(reg) == len(cc.crossings())
    for _, vx in cc.crossings():
        u, w = grid.edge_line(vx.edge)
        du = abs(vx.position[vx.edge.direction.u_axis.index] - u)
        dw = abs(vx.position[vx.edge.direction.v_axis.index] - w)
        assert du <= grid.epsilon and dw <= grid.epsilon
    # transversal crossings come in pairs per line
    per_line = {}
    for _, vx in cc.crossings():
        key = (vx.edge.direction, vx.edge.u_plane, vx.edge.v_plane)
        per_line[key] = per_line.get(key, 0) + 1
    assert all(count % 2 == 0 for count in per_line.values())


class TestBoxNodePoints:
    def test_exact_positions(self, box_result):
        expected = {
            (1.0, 0.25, 1.0),
            (1.0, 1.75, 1.0),
            (0.25, 1.0, 1.0),
            (1.75, 1.0, 1.0),
            (1.0, 1.0, 0.25),
            (1.0, 1.0, 1.75),
        }
        assert len(box_result.node_points) == 6
        eps = box_result.grid.epsilon
        for n in box_result.node_points:
            best = min(
                max(abs(a - b) for a, b in zip(n.position, e)) for e in expected
            )
            assert best <= eps
        assert len(box_result.unpaired) == 0

    def test_refs_come_from_different_axes(self, box_result):
        for n in box_result.node_points:
            assert n.ref_a.axis is not n.ref_b.axis
            assert n.ref_a.axis is not n.edge.direction
            assert n.ref_b.axis is not n.edge.direction

    def test_pair_positions_within_tolerance(self, sphere_result):
        tol = sphere_result.grid.pairing_tolerance
        for n in sphere_result.node_points:
            assert abs(n.ref_a.t - n.ref_b.t) <= tol
