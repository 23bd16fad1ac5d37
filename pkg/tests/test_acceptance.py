"""Acceptance suite: one test per criterion, each printing a PASS line when
its assertions hold (run with ``pytest tests/test_acceptance.py -v -s``).

All expected values are frozen from hand enumeration or from the
brute-force oracles in ``oracles.py``; tolerances are stated inline.
"""

import math
import time
from collections import Counter

import numpy as np
import pytest

from orthoslice.cli import main
from orthoslice.correspondence import (
    build_correspondence_graph,
    component_count,
    fit_ellipse,
    mst_correspondence,
    mst_cost,
    overlap_chains,
)
from orthoslice.geometry import Axis, Contour, ContourId, SlicePlane
from orthoslice.io import save_document
from orthoslice.metrics import hausdorff, polygon_histogram, topology
from orthoslice.pipeline import reconstruct_document

from oracles import minimum_spanning_forests, polygons_overlap_brute

CELL_DIAGONAL_SPHERE = 0.25 * math.sqrt(3)  # plane spacing 0.25


def report_pass(n, detail):
    print(f"ACCEPTANCE {n}: PASS  {detail}")


def test_criterion_1_box_fixture(box_document):
    t0 = time.perf_counter()
    res = reconstruct_document(box_document)
    elapsed = time.perf_counter() - t0

    expected = {
        (1.0, 0.25, 1.0),
        (1.0, 1.75, 1.0),
        (0.25, 1.0, 1.0),
        (1.75, 1.0, 1.0),
        (1.0, 1.0, 0.25),
        (1.0, 1.0, 1.75),
    }
    assert len(res.node_points) == 6
    eps = res.grid.epsilon
    for node in res.node_points:
        err = min(
            max(abs(a - b) for a, b in zip(node.position, e)) for e in expected
        )
        assert err <= eps
    assert len(res.arc_graph.arcs) == 12
    assert len(res.polygons) == 8
    assert all(p.size == 3 for p in res.polygons)
    topo = topology(res.mesh)
    assert topo.watertight
    assert topo.euler == 2
    assert topo.components == 1
    assert topo.per_component[0].genus == 0
    assert elapsed < 0.1
    report_pass(1, f"box: 6 nodes, 12 arcs, 8x3 polygons, chi=2, {elapsed * 1e3:.1f} ms")


def test_criterion_2_sphere_fixture(sphere_document, sphere_shape):
    t0 = time.perf_counter()
    res = reconstruct_document(sphere_document)
    elapsed = time.perf_counter() - t0

    assert res.unpaired == []
    topo = topology(res.mesh)
    assert topo.watertight
    assert topo.components == 1
    assert topo.euler == 2
    h = hausdorff(res.mesh, sphere_shape, 2000)
    assert h <= CELL_DIAGONAL_SPHERE
    assert elapsed < 1.0
    report_pass(
        2,
        f"sphere: watertight chi=2, hausdorff {h:.4f} <= {CELL_DIAGONAL_SPHERE:.4f}, "
        f"{elapsed:.3f} s",
    )


def test_criterion_3_torus_fixture():
    from orthoslice.shapes import Torus
    from orthoslice.slicer import slice_analytic

    doc = slice_analytic(
        Torus((1.0, 1.0, 1.0), 0.6, 0.25, Axis.Z),
        {a: [0.125 * i for i in range(17)] for a in "xyz"},
    )
    t0 = time.perf_counter()
    res = reconstruct_document(doc)
    elapsed = time.perf_counter() - t0
    topo = topology(res.mesh)
    assert topo.watertight
    assert topo.components == 1
    assert topo.euler == 0
    assert topo.per_component[0].genus == 1
    assert elapsed < 5.0
    report_pass(3, f"torus: watertight chi=0 genus=1, {elapsed:.3f} s")


def test_criterion_4_disjoint_components(two_spheres_document, two_spheres_result):
    res = two_spheres_result
    graph = build_correspondence_graph(
        res.node_points, two_spheres_document.contour_ids()
    )
    n_graph = component_count(graph)
    n_mesh = topology(res.mesh).components
    assert n_graph == 2
    assert n_mesh == 2
    report_pass(4, f"two spheres: graph components={n_graph}, mesh components={n_mesh}")


def test_criterion_5_tilt_failure_mode(tilted_cylinder_document, tilted_cylinder_result):
    planes = list(tilted_cylinder_document.planes(Axis.Z))
    n_overlap, labels = overlap_chains(planes)
    n_contours = sum(len(p.contours) for p in planes)
    assert n_overlap >= 4
    assert n_overlap == n_contours  # every contour its own component
    # brute-force overlap oracle agrees: no adjacent footprints intersect
    occupied = [p for p in planes if p.contours]
    for p0, p1 in zip(occupied, occupied[1:]):
        for c0 in p0.contours:
            for c1 in p1.contours:
                assert not polygons_overlap_brute(c0.vertices, c1.vertices)

    res = tilted_cylinder_result
    graph = build_correspondence_graph(
        res.node_points, tilted_cylinder_document.contour_ids()
    )
    n_orth = component_count(graph)
    assert n_orth == 1
    assert topology(res.mesh).components == 1  # pipeline oracle agrees
    report_pass(
        5, f"tilted cylinder: overlap components={n_overlap} (>=4), orthogonal=1"
    )


def test_criterion_6_mst_baseline():
    def zid(plane, index=0):
        return ContourId(Axis.Z, plane, index)

    def circle(cx, n=64):
        t = 2 * np.pi * np.arange(n) / n
        return np.stack([cx + np.cos(t), np.sin(t)], axis=1)

    # identical ellipses cost exactly zero
    fit = fit_ellipse(Contour(zid(0), circle(0.0)), 0.0)
    assert mst_cost(fit, fit) == 0.0

    # cost formula spot check
    from orthoslice.correspondence import EllipseFit

    c = mst_cost(
        EllipseFit(zid(0), (0, 0), 0.0, 2, 1), EllipseFit(zid(1), (1, 1), 1.0, 1, 0.5)
    )
    assert c == 3.25

    # Y-branch: the chosen forest is a brute-force minimum spanning tree
    planes = [
        SlicePlane(Axis.Z, 0.0, (Contour(zid(0, 0), circle(0.0)),)),
        SlicePlane(
            Axis.Z,
            1.0,
            (Contour(zid(1, 0), circle(-1.0)), Contour(zid(1, 1), circle(+1.0))),
        ),
    ]
    forest = mst_correspondence(planes)
    assert set(forest.edges) == {(zid(0, 0), zid(1, 0)), (zid(0, 0), zid(1, 1))}
    fits = {c.id: fit_ellipse(c, p.coord) for p in planes for c in p.contours}
    candidates = [
        (mst_cost(fits[zid(0, 0)], fits[b]), zid(0, 0), b)
        for b in (zid(1, 0), zid(1, 1))
    ]
    best_cost, best_sets = minimum_spanning_forests(list(fits), candidates)
    got = sum(mst_cost(fits[a], fits[b]) for a, b in forest.edges)
    assert got == pytest.approx(best_cost, abs=1e-12)
    assert frozenset(forest.edges) in best_sets
    report_pass(6, f"mst baseline: cost 0 / 3.25 exact, Y-branch matches brute force")


def test_criterion_7_structural_invariants(
    box_result,
    sphere_result,
    torus_result,
    two_spheres_result,
    tilted_cylinder_result,
    tmp_path,
    sphere_document,
    tilted_cylinder_document,
):
    corpus = {
        "box": box_result,
        "sphere": sphere_result,
        "torus": torus_result,
        "two-spheres": two_spheres_result,
        "tilted-cylinder": tilted_cylinder_result,
    }
    support = set()
    for name, res in corpus.items():
        counts = Counter()
        for poly in res.polygons:
            for arc_id, _ in poly.arcs:
                counts[arc_id] += 1
        assert set(counts.values()) == {2}, f"{name}: arc not in exactly 2 polygons"
        assert len(counts) == len(res.arc_graph.arcs), f"{name}: uncovered arcs"
        assert sum(p.size for p in res.polygons) == 2 * len(res.arc_graph.arcs)
        assert res.report["droppedTriangles"] == 0, f"{name}: degenerate fans"
        assert res.report["skippedPolygons"] == 0, f"{name}: degenerate bigons"
        support |= set(polygon_histogram(res.polygons))
    assert min(support) >= 2 and max(support) <= 16

    # byte-identical CLI outputs for any worker count
    for name, doc in (("sphere", sphere_document), ("cylinder", tilted_cylinder_document)):
        src = tmp_path / f"{name}.json"
        save_document(doc, src)
        blobs = []
        for w in (1, 4):
            obj = tmp_path / f"{name}-w{w}.obj"
            rep = tmp_path / f"{name}-w{w}.json"
            rc = main(
                [
                    "reconstruct",
                    "--input",
                    str(src),
                    "--output",
                    str(obj),
                    "--report",
                    str(rep),
                    "--workers",
                    str(w),
                ]
            )
            assert rc == 0
            blobs.append(obj.read_bytes() + rep.read_bytes())
        assert blobs[0] == blobs[1], f"{name}: outputs differ across worker counts"
    report_pass(
        7,
        f"invariants: double cover on 5 fixtures, histogram support {sorted(support)}"
        " within [2, 16], worker-count independent bytes",
    )
