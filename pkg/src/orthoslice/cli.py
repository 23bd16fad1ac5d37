"""Command-line frontend.

Subcommands: ``slice`` (synthetic slicer), ``reconstruct`` (full pipeline),
``correspond`` (overlap / mst / orthogonal criteria), ``metrics`` (topology
and optional Hausdorff distance) and ``histogram`` (polygon sizes as CSV).

Exit codes: 0 success; 1 input or usage errors; 2 data-quality errors
(tangency, open chains, unpaired registrations in strict mode); 3 manifold
violations in strict mode.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io, metrics
from .correspondence import (
    build_correspondence_graph,
    component_count,
    component_labels,
    mst_correspondence,
    mst_labels,
    overlap_chains,
)
from .errors import (
    CornerSingularity,
    NonManifoldJunction,
    OpenChain,
    OrthosliceError,
    TangencyDetected,
    UnpairedInput,
    VertexOnPlane,
)
from .geometry import AXES, Axis
from .pipeline import reconstruct_document
from .shapes import SAMPLE_SEED, parse_shape
from .slicer import slice_analytic, slice_mesh

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DATA = 2
EXIT_MANIFOLD = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def parse_plane_spec(spec: str) -> tuple[Axis, list[float]]:
    """Parse one ``axis:start:step:count`` plane sweep."""
    parts = spec.split(":")
    if len(parts) != 4:
        raise _UsageError(f"plane spec {spec!r} must be axis:start:step:count")
    try:
        axis = Axis(parts[0])
        start, step = float(parts[1]), float(parts[2])
        count = int(parts[3])
    except ValueError as exc:
        raise _UsageError(f"plane spec {spec!r}: {exc}") from exc
    if count < 1 or step <= 0:
        raise _UsageError(f"plane spec {spec!r}: need step > 0 and count >= 1")
    return axis, [start + i * step for i in range(count)]


def _build_parser() -> _Parser:
    p = _Parser(prog="orthoslice", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sl = sub.add_parser("slice", help="slice a shape or mesh into a document")
    src = sl.add_mutually_exclusive_group(required=True)
    src.add_argument("--shape", help="inline shape spec JSON")
    src.add_argument("--mesh", help="path to a triangles-only OBJ mesh")
    sl.add_argument(
        "--planes",
        action="append",
        required=True,
        help="axis:start:step:count (repeat per axis)",
    )
    sl.add_argument("--samples", type=int, default=64, help="vertices per contour")
    sl.add_argument(
        "--epsilon",
        type=float,
        default=None,
        help="absolute tolerance (default: 1e-9 times the shape diagonal)",
    )
    sl.add_argument("--output", required=True, help="slice JSON output path")

    rc = sub.add_parser("reconstruct", help="reconstruct a mesh from slices")
    rc.add_argument("--input", required=True, help="slice JSON path")
    rc.add_argument("--output", required=True, help="OBJ output path")
    rc.add_argument("--report", default=None, help="report JSON path")
    rc.add_argument(
        "--epsilon",
        type=float,
        default=None,
        help="absolute tolerance (default: 1e-9 times the grid diagonal)",
    )
    rc.add_argument("--strict", action="store_true")
    rc.add_argument("--workers", type=int, default=1)
    rc.add_argument("--dump-nodes", default=None, help="debug node/registry JSON path")
    rc.add_argument("--dump-polygons", default=None, help="debug polygon JSON path")
    rc.add_argument("--cell-comments", action="store_true", help="tag OBJ faces with cells")

    co = sub.add_parser("correspond", help="run a correspondence criterion")
    co.add_argument("--input", required=True)
    co.add_argument("--method", required=True, choices=["overlap", "mst", "orthogonal"])
    co.add_argument("--axis", default="z", choices=["x", "y", "z"])
    co.add_argument("--epsilon", type=float, default=None)
    co.add_argument("--workers", type=int, default=1)
    co.add_argument("--output", default=None, help="report JSON path (default stdout)")

    me = sub.add_parser("metrics", help="topology and distance of an OBJ mesh")
    me.add_argument("--input", required=True, help="OBJ mesh path")
    me.add_argument("--reference", default=None, help="shape spec JSON or OBJ path")
    me.add_argument("--samples", type=int, default=2000)
    me.add_argument("--output", default=None, help="report JSON path (default stdout)")

    hi = sub.add_parser("histogram", help="polygon-size histogram as CSV")
    hi.add_argument("--input", required=True, help="slice JSON path")
    hi.add_argument("--epsilon", type=float, default=None)
    hi.add_argument("--workers", type=int, default=1)
    hi.add_argument("--output", default=None, help="CSV path (default stdout)")
    return p


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _cmd_slice(args) -> int:
    planes: dict[Axis, list[float]] = {}
    for spec in args.planes:
        axis, coords = parse_plane_spec(spec)
        if axis in planes:
            raise _UsageError(f"axis {axis.value} given twice in --planes")
        planes[axis] = coords
    if args.shape is not None:
        try:
            shape = parse_shape(json.loads(args.shape))
        except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
            raise _UsageError(f"bad shape spec: {exc}") from exc
        doc = slice_analytic(shape, planes, args.samples, args.epsilon)
    else:
        mesh = io.load_obj(args.mesh)
        doc = slice_mesh(mesh, planes, args.epsilon)
    io.save_document(doc, args.output)
    for axis in AXES:
        for plane in doc.planes(axis):
            print(f"{axis.value}={plane.coord:g}: {len(plane.contours)} contours")
    return EXIT_OK


def _dump_nodes(result, path) -> None:
    data = {
        "registry": [
            {
                "edge": str(edge),
                "registrations": [
                    {
                        "axis": r.axis.value,
                        "contour": str(r.contour),
                        "vertex": r.vertex,
                        "t": r.t,
                    }
                    for r in result.registry.registrations(edge)
                ],
            }
            for edge in result.registry.edges()
        ],
        "nodePoints": [
            {
                "id": n.id,
                "position": list(n.position),
                "edge": str(n.edge),
                "refA": {"contour": str(n.ref_a.contour), "vertex": n.ref_a.vertex},
                "refB": {"contour": str(n.ref_b.contour), "vertex": n.ref_b.vertex},
            }
            for n in result.node_points
        ],
        "unpaired": [
            {
                "edge": str(u.edge),
                "contour": str(u.registration.contour),
                "vertex": u.registration.vertex,
                "t": u.registration.t,
            }
            for u in result.unpaired
        ],
    }
    Path(path).write_text(json.dumps(data, indent=1) + "\n", encoding="utf-8")


def _dump_polygons(result, path) -> None:
    data = [
        {
            "cell": list(p.cell),
            "arcs": [[a, d] for a, d in p.arcs],
            "boundary": p.boundary.tolist(),
            "inCell": p.in_cell,
        }
        for p in result.polygons
    ]
    Path(path).write_text(json.dumps(data, indent=1) + "\n", encoding="utf-8")


def _cmd_reconstruct(args) -> int:
    doc = io.load_document(args.input)
    result = reconstruct_document(
        doc, epsilon=args.epsilon, strict=args.strict, workers=args.workers
    )
    io.save_obj(result.mesh, args.output, cell_comments=args.cell_comments)
    report_path = args.report or str(Path(args.output).with_suffix(".report.json"))
    Path(report_path).write_text(
        json.dumps(result.report, indent=1) + "\n", encoding="utf-8"
    )
    if args.dump_nodes:
        _dump_nodes(result, args.dump_nodes)
    if args.dump_polygons:
        _dump_polygons(result, args.dump_polygons)
    topo = result.report["topology"]
    print(
        f"nodes={result.report['nodePoints']} arcs={result.report['arcs']} "
        f"polygons={result.report['polygons']} "
        f"watertight={topo['watertight']} chi={topo['eulerCharacteristic']}"
    )
    return EXIT_OK


def _cmd_correspond(args) -> int:
    doc = io.load_document(args.input)
    axis = Axis(args.axis)
    if args.method in ("overlap", "mst"):
        planes = list(doc.planes(axis))
        if not any(p.contours for p in planes):
            print(f"error: no {axis.value}-set contours in document", file=sys.stderr)
            return EXIT_INPUT
        if args.method == "overlap":
            count, labels = overlap_chains(planes)
            report = {
                "method": "overlap",
                "axis": axis.value,
                "components": count,
                "assignments": {str(k): v for k, v in sorted(labels.items())},
            }
        else:
            forest = mst_correspondence(planes)
            labels = mst_labels(planes, forest)
            report = {
                "method": "mst",
                "axis": axis.value,
                "components": len(set(labels.values())) if labels else 0,
                "edges": [[str(a), str(b)] for a, b in forest.edges],
                "assignments": {str(k): v for k, v in sorted(labels.items())},
            }
    else:
        if any(len(doc.planes(a)) < 2 for a in AXES):
            print("error: orthogonal method needs all three slice sets", file=sys.stderr)
            return EXIT_INPUT
        result = reconstruct_document(doc, epsilon=args.epsilon, workers=args.workers)
        graph = build_correspondence_graph(result.node_points, doc.contour_ids())
        labels = component_labels(graph)
        report = {
            "method": "orthogonal",
            "components": component_count(graph),
            "edges": [[str(a), str(b)] for a, b in graph.edges],
            "assignments": {str(k): v for k, v in sorted(labels.items())},
        }
    _emit(json.dumps(report, indent=1) + "\n", args.output)
    return EXIT_OK


def _cmd_metrics(args) -> int:
    mesh = io.load_obj(args.input)
    report = {"topology": metrics.topology(mesh).to_json()}
    if args.reference is not None:
        ref_path = Path(args.reference)
        if ref_path.exists() and ref_path.suffix.lower() == ".obj":
            reference = io.load_obj(args.reference)
        else:
            try:
                reference = parse_shape(json.loads(args.reference))
            except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
                raise _UsageError(f"bad reference: {exc}") from exc
        report["hausdorff"] = metrics.hausdorff(mesh, reference, args.samples)
        report["samples"] = args.samples
        report["sampleSeed"] = SAMPLE_SEED
    _emit(json.dumps(report, indent=1) + "\n", args.output)
    return EXIT_OK


def _cmd_histogram(args) -> int:
    doc = io.load_document(args.input)
    result = reconstruct_document(doc, epsilon=args.epsilon, workers=args.workers)
    hist = metrics.polygon_histogram(result.polygons)
    _emit(metrics.histogram_to_csv(hist), args.output)
    return EXIT_OK


_COMMANDS = {
    "slice": _cmd_slice,
    "reconstruct": _cmd_reconstruct,
    "correspond": _cmd_correspond,
    "metrics": _cmd_metrics,
    "histogram": _cmd_histogram,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    except (TangencyDetected, OpenChain, VertexOnPlane, UnpairedInput, CornerSingularity) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NonManifoldJunction as exc:
        print(f"manifold error: {exc}", file=sys.stderr)
        return EXIT_MANIFOLD
    except (OSError, ValueError, json.JSONDecodeError, OrthosliceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
