"""Scene catalog and navigation grid.

Catalog: one object per line, ``name minx miny minz maxx maxy maxz``
(meters, whitespace-separated). Names may repeat.

Navigation grid: plain PBM (``P1``) where ``1`` marks a walkable cell and
row 0 is the northmost row, plus a sidecar ``<navgrid>.meta`` with
``origin_x=``, ``origin_y=`` (the south-west corner) and ``resolution=``
(cell size in meters). Blank lines and ``#`` comments are skipped in all
three files.
"""

import re
from pathlib import Path
from typing import Dict, List

import numpy as np
from pydantic import ValidationError

from ..errors import FormatError
from ..models.plot import NavGrid, SceneCatalog, SceneObject
from .motion import format_row

META_KEYS = ("origin_x", "origin_y", "resolution")
COMMENT_RE = re.compile(r"#[^\n]*")


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FormatError(f"cannot read file ({exc})", str(path)) from exc


def meta_path(navgrid_path) -> Path:
    return Path(f"{navgrid_path}.meta")


def read_objects(path) -> List[SceneObject]:
    objects = []
    for number, line in enumerate(_read_text(path).splitlines(), start=1):
        line = COMMENT_RE.sub("", line).strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 7:
            raise FormatError(f"expected 'name minx miny minz maxx maxy maxz', got {len(fields)} fields", str(path), number)
        try:
            corners = [float(v) for v in fields[1:]]
            objects.append(SceneObject(name=fields[0], bbox_min=corners[:3], bbox_max=corners[3:]))
        except ValueError as exc:
            raise FormatError(f"invalid object ({exc})", str(path), number) from exc
    return objects


def _read_meta(path) -> Dict[str, float]:
    values: Dict[str, float] = {}
    for number, line in enumerate(_read_text(path).splitlines(), start=1):
        line = COMMENT_RE.sub("", line).strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in META_KEYS:
            raise FormatError(f"unknown navgrid metadata line {line!r}", str(path), number)
        try:
            values[key] = float(value)
        except ValueError as exc:
            raise FormatError(f"{key} is not a number", str(path), number) from exc
    missing = [k for k in META_KEYS if k not in values]
    if missing:
        raise FormatError(f"navgrid metadata misses {', '.join(missing)}", str(path))
    return values


def read_navgrid(path) -> NavGrid:
    tokens = COMMENT_RE.sub(" ", _read_text(path)).split()
    if not tokens or tokens[0] != "P1":
        raise FormatError("navgrid must be a plain PBM starting with 'P1'", str(path), 1)
    try:
        width, height = int(tokens[1]), int(tokens[2])
    except (IndexError, ValueError) as exc:
        raise FormatError("PBM header needs width and height", str(path)) from exc
    bits = "".join(tokens[3:])
    if set(bits) - {"0", "1"}:
        raise FormatError("PBM pixels must be 0 or 1", str(path))
    if len(bits) != width * height or width < 1 or height < 1:
        raise FormatError(f"PBM holds {len(bits)} pixels, header says {width}x{height}", str(path))
    walkable = np.frombuffer(bits.encode("ascii"), dtype=np.uint8).reshape(height, width) == ord("1")
    meta = _read_meta(meta_path(path))
    try:
        return NavGrid(walkable=walkable, origin=(meta["origin_x"], meta["origin_y"]), resolution=meta["resolution"])
    except ValidationError as exc:
        raise FormatError(f"invalid navgrid: {exc.errors()[0]['msg']}", str(path)) from exc


def read_catalog(catalog_path, navgrid_path) -> SceneCatalog:
    return SceneCatalog(objects=read_objects(catalog_path), navgrid=read_navgrid(navgrid_path))


def write_navgrid(path, navgrid: NavGrid) -> None:
    rows, cols = navgrid.shape
    lines = ["P1", f"{cols} {rows}"]
    lines.extend(" ".join("1" if cell else "0" for cell in row) for row in navgrid.walkable)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    meta = {"origin_x": navgrid.origin[0], "origin_y": navgrid.origin[1], "resolution": navgrid.resolution}
    meta_path(path).write_text("".join(f"{k}={format_row([v])}\n" for k, v in meta.items()), encoding="utf-8")


def write_catalog(catalog_path, navgrid_path, catalog: SceneCatalog) -> None:
    lines = [f"{o.name} {format_row(o.bbox_min)} {format_row(o.bbox_max)}" for o in catalog.objects]
    Path(catalog_path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    write_navgrid(navgrid_path, catalog.navgrid)
