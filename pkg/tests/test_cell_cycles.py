from collections import Counter

import numpy as np
import pytest

from orthoslice.cell_cycles import (
    Arc,
    ArcGraph,
    build_arc_graph,
    classify_cells,
    extract_cycles,
)
from orthoslice.errors import NonManifoldJunction, UnpairedInput
from orthoslice.geometry import Axis, locate_cell
from orthoslice.pipeline import reconstruct_document
from orthoslice.shapes import Cylinder, Union
from orthoslice.slicer import slice_analytic


def assert_double_cover(result):
    counts = Counter()
    for p in result.polygons:
        for arc_id, _ in p.arcs:
            counts[arc_id] += 1
    assert set(counts.values()) == {2}
    assert len(counts) == len(result.arc_graph.arcs)
    assert sum(p.size for p in result.polygons) == 2 * len(result.arc_graph.arcs)


class TestBuildArcGraph:
    def test_box_arcs(self, box_result):
        ag = box_result.arc_graph
        assert len(ag.arcs) == 12
        per_contour = Counter(a.contour for a in ag.arcs)
        assert sorted(per_contour.values()) == [4, 4, 4]
        for arc in ag.arcs:
            b1, b2 = arc.cells
            diff = [i for i in range(3) if b1[i] != b2[i]]
            assert diff == [arc.contour.axis.index]
        # every one of the 8 interior cells owns exactly 3 arcs
        sizes = sorted(len(v) for v in ag.cell_arcs.values())
        assert sizes == [3] * 8

    def test_two_node_points_give_two_arcs(self):
        # tube crossing only the x=1 lattice plane: each contour is cut twice
        cyl = Cylinder((0.2, 0.75, 1.0), (1.0, 0, 0), 0.2, 1.6)
        doc = slice_analytic(cyl, {a: [0.0, 1.0, 2.0] for a in "xyz"})
        res = reconstruct_document(doc)
        per_contour = Counter(a.contour for a in res.arc_graph.arcs)
        assert set(per_contour.values()) == {2}

    def test_orphan_contour_reported(self):
        from orthoslice.geometry import Contour, ContourId, SliceDocument, SlicePlane

        tiny = Contour(
            ContourId(Axis.Z, 1, 0),
            [[0.3, 0.3], [0.7, 0.3], [0.7, 0.7], [0.3, 0.7]],
        )
        sets = {}
        for axis in (Axis.X, Axis.Y, Axis.Z):
            planes = []
            for pi, coord in enumerate([0.0, 1.0, 2.0]):
                contours = (tiny,) if axis is Axis.Z and pi == 1 else ()
                planes.append(SlicePlane(axis, coord, contours))
            sets[axis] = tuple(planes)
        res = reconstruct_document(SliceDocument(sets))
        assert res.report["orphanContours"] == ["z:1:0"]
        assert res.arc_graph.arcs == ()
        assert res.mesh.n_triangles == 0

    def test_unpaired_input_rejected_by_default(self, box_result):
        fake = [object()]
        with pytest.raises(UnpairedInput):
            build_arc_graph(
                box_result.clipped,
                box_result.node_points,
                box_result.grid,
                unpaired=fake,
            )


class TestClassifyCells:
    def test_box_classification(self, box_result):
        crossing, passing = classify_cells(box_result.arc_graph, box_result.grid)
        assert len(crossing) == 8
        assert all(not box_result.grid.is_sentinel_cell(c) for c in crossing)
        assert all(box_result.grid.is_sentinel_cell(c) for c in passing)
        assert len(crossing) + len(passing) == 4 * 4 * 4

    def test_empty_graph_all_passing(self, box_result):
        empty = ArcGraph((), (), {}, ())
        crossing, passing = classify_cells(empty, box_result.grid)
        assert crossing == []
        assert len(passing) == 64

    def test_sphere_center_cell_passes(self, sphere_result):
        grid = sphere_result.grid
        center_cell = locate_cell(grid, (1.01, 1.01, 1.01))
        crossing, passing = classify_cells(sphere_result.arc_graph, grid)
        assert center_cell in passing


class TestExtractCycles:
    def test_box_cycles(self, box_result):
        polys = box_result.polygons
        assert len(polys) == 8
        assert all(p.size == 3 for p in polys)
        assert all(p.in_cell for p in polys)
        # the cell spanning [0,1]^3 carries the hand-computed corner cycle
        cell = locate_cell(box_result.grid, (0.5, 0.5, 0.5))
        (poly,) = [p for p in polys if p.cell == cell]
        by_id = {n.id: n for n in box_result.arc_graph.node_points}
        nodes = {box_result.arc_graph.arcs[a].head for a, _ in poly.arcs}
        positions = {by_id[n].position for n in nodes}
        assert positions == {(1.0, 0.25, 1.0), (0.25, 1.0, 1.0), (1.0, 1.0, 0.25)}

    def test_double_cover(self, box_result, sphere_result, torus_result):
        for result in (box_result, sphere_result, torus_result):
            assert_double_cover(result)

    def test_two_tubes_through_one_cell(self):
        u = Union(
            (
                Cylinder((1.0, 0.3, -0.5), (0, 0, 1.0), 0.12, 3.0),
                Cylinder((1.0, 0.7, -0.5), (0, 0, 1.0), 0.12, 3.0),
            )
        )
        doc = slice_analytic(u, {a: [0.0, 1.0, 2.0] for a in "xyz"})
        res = reconstruct_document(doc)
        assert res.unpaired == []
        cell = locate_cell(res.grid, (0.5, 0.5, 0.5))
        in_cell = [p for p in res.polygons if p.cell == cell]
        assert len(in_cell) == 2  # two disjoint cycles in one cell
        # brute-force check: the cell's arc incidence graph has 2 components
        arcs = res.arc_graph.cell_arcs[cell]
        adj = {}
        for aid in arcs:
            arc = res.arc_graph.arcs[aid]
            adj.setdefault(arc.head, []).append(aid)
            adj.setdefault(arc.tail, []).append(aid)
        seen = set()
        comps = 0
        for aid in arcs:
            if aid in seen:
                continue
            comps += 1
            stack = [aid]
            while stack:
                a = stack.pop()
                if a in seen:
                    continue
                seen.add(a)
                arc = res.arc_graph.arcs[a]
                for n in (arc.head, arc.tail):
                    stack.extend(adj[n])
        assert comps == 2

    def test_nonmanifold_junction_detected(self, box_result):
        grid = box_result.grid
        cell = (1, 1, 1)
        pts = np.array([[0.1, 0.1, 0.1], [0.2, 0.2, 0.2]])
        cid = box_result.arc_graph.arcs[0].contour
        arcs = tuple(
            Arc(i, cid, 0, 1, 0, 1, (cell, (1, 1, 2)), pts) for i in range(3)
        )
        ag = ArcGraph((), arcs, {cell: (0, 1, 2)}, ())
        with pytest.raises(NonManifoldJunction):
            extract_cycles(ag, grid, strict=True)
        polys, failures = extract_cycles(ag, grid, strict=False)
        assert polys == []
        assert len(failures) == 1
        assert failures[0].cell == cell

    def test_deterministic_output(self, sphere_document):
        r1 = reconstruct_document(sphere_document)
        r2 = reconstruct_document(sphere_document)
        assert [(p.cell, p.arcs) for p in r1.polygons] == [
            (p.cell, p.arcs) for p in r2.polygons
        ]


class TestSingularJunctionMerge:
    def test_sphere_grid_vertex_junctions_fused(self, sphere_result):
        # the sphere passes through lattice points like (1.5, 0.5, 0.75);
        # crossings there must fuse into single junctions at the exact corner
        positions = {n.position for n in sphere_result.arc_graph.node_points}
        assert (1.5, 0.5, 0.75) in positions
        assert (0.5, 0.5, 0.75) in positions
        assert sphere_result.report["mergedJunctions"] == 48  # 24 corners, 3 -> 1
        assert len(sphere_result.report["nonManifoldCells"]) == 0

    def test_junction_degree_two_per_cell(self, sphere_result):
        ag = sphere_result.arc_graph
        for cell, arc_ids in ag.cell_arcs.items():
            degree = Counter()
            for aid in arc_ids:
                degree[ag.arcs[aid].head] += 1
                degree[ag.arcs[aid].tail] += 1
            assert set(degree.values()) == {2}
