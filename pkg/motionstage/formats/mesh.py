"""Triangle meshes as Wavefront OBJ.

Only ``v x y z`` and ``f i j k`` records (1-based indices) matter; both are
read and written through trimesh without processing, so vertex order is
kept. A mesh sequence is a directory of ``*.obj`` files taken in
lexicographic filename order.
"""

from pathlib import Path
from typing import List, Sequence

import trimesh
from trimesh.exchange.obj import export_obj

from ..errors import FormatError
from ..models.geometry import TriMesh

OBJ_DIGITS = 17


def read_mesh(path) -> TriMesh:
    try:
        loaded = trimesh.load(str(path), file_type="obj", process=False, maintain_order=True, force="mesh")
    except Exception as exc:  # trimesh raises a variety of parser errors
        raise FormatError(f"cannot read OBJ ({exc})", str(path)) from exc
    if not isinstance(loaded, trimesh.Trimesh) or len(loaded.faces) == 0:
        raise FormatError("OBJ holds no triangles", str(path))
    try:
        return TriMesh.from_trimesh(loaded)
    except ValueError as exc:
        raise FormatError(f"invalid mesh ({exc})", str(path)) from exc


def dumps_mesh(mesh: TriMesh) -> str:
    return export_obj(
        mesh.to_trimesh(),
        include_normals=False,
        include_color=False,
        include_texture=False,
        digits=OBJ_DIGITS,
        header=None,
    )


def write_mesh(path, mesh: TriMesh) -> None:
    Path(path).write_text(dumps_mesh(mesh), encoding="utf-8")


def read_mesh_sequence(directory) -> List[TriMesh]:
    directory = Path(directory)
    if not directory.is_dir():
        raise FormatError("mesh sequence must be a directory", str(directory))
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() == ".obj")
    if not files:
        raise FormatError("no .obj files in mesh sequence directory", str(directory))
    return [read_mesh(p) for p in files]


def write_mesh_sequence(directory, meshes: Sequence[TriMesh]) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    width = max(5, len(str(len(meshes))))
    for i, mesh in enumerate(meshes):
        write_mesh(directory / f"frame_{i:0{width}d}.obj", mesh)
