"""File formats: the canonical slice-document JSON and Wavefront OBJ."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .geometry import AXES, Axis, Contour, ContourId, SliceDocument, SlicePlane
from .patcher import Mesh


def document_to_dict(doc: SliceDocument) -> dict:
    """Canonical slice JSON structure: sets in x, y, z order, planes by
    ascending coordinate."""
    sets = []
    for axis in AXES:
        planes = []
        for plane in doc.planes(axis):
            planes.append(
                {
                    "coord": plane.coord,
                    "contours": [c.vertices.tolist() for c in plane.contours],
                }
            )
        sets.append({"axis": axis.value, "planes": planes})
    return {"sets": sets}


def document_from_dict(data: dict) -> SliceDocument:
    if not isinstance(data, dict) or "sets" not in data:
        raise ValueError("slice document JSON must have a top-level 'sets' list")
    sets: dict[Axis, tuple[SlicePlane, ...]] = {axis: () for axis in AXES}
    for entry in data["sets"]:
        axis = Axis(entry["axis"])
        raw_planes = sorted(entry.get("planes", []), key=lambda p: p["coord"])
        planes = []
        for pi, praw in enumerate(raw_planes):
            contours = tuple(
                Contour(ContourId(axis, pi, ci), np.asarray(verts, dtype=float))
                for ci, verts in enumerate(praw.get("contours", []))
            )
            planes.append(SlicePlane(axis, float(praw["coord"]), contours))
        sets[axis] = tuple(planes)
    return SliceDocument(sets)


def save_document(doc: SliceDocument, path) -> None:
    Path(path).write_text(
        json.dumps(document_to_dict(doc), indent=1) + "\n", encoding="utf-8"
    )


def load_document(path) -> SliceDocument:
    return document_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def mesh_to_obj(mesh: Mesh, cell_comments: bool = False) -> str:
    """Wavefront OBJ text: ``v`` lines then 1-indexed ``f`` lines, LF line
    endings, coordinates at 9 significant digits.  With ``cell_comments``
    each run of faces from one source cell is preceded by ``# cell i j k``."""
    header = [f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}" for v in mesh.vertices]
    face_lines = []
    last_cell = object()
    for tri, cell in zip(mesh.triangles, mesh.cells):
        if cell_comments and cell != last_cell and cell is not None:
            face_lines.append(f"# cell {cell[0]} {cell[1]} {cell[2]}")
        last_cell = cell
        face_lines.append(f"f {tri[0] + 1} {tri[1] + 1} {tri[2] + 1}")
    return "\n".join(header + face_lines) + "\n"


def save_obj(mesh: Mesh, path, cell_comments: bool = False) -> None:
    Path(path).write_text(mesh_to_obj(mesh, cell_comments), encoding="utf-8", newline="\n")


def load_obj(path) -> Mesh:
    """Read a triangles-only OBJ (``v`` and ``f`` records; other records are
    ignored, polygons with more than three vertices are rejected)."""
    verts: list[list[float]] = []
    tris: list[list[int]] = []
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            if len(parts) < 4:
                raise ValueError(f"line {line_no}: malformed vertex record")
            verts.append([float(parts[1]), float(parts[2]), float(parts[3])])
        elif parts[0] == "f":
            if len(parts) != 4:
                raise ValueError(
                    f"line {line_no}: only triangular faces are supported"
                )
            idx = []
            for tok in parts[1:]:
                tok = tok.split("/")[0]
                i = int(tok)
                idx.append(i - 1 if i > 0 else len(verts) + i)
            tris.append(idx)
    return Mesh(
        np.asarray(verts, dtype=float).reshape(-1, 3),
        np.asarray(tris, dtype=int).reshape(-1, 3),
    )
