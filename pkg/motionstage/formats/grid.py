"""Binary SDF grids.

Layout (little-endian)::

    4 bytes   magic "SDFG"
    u16       format version (1)
    3 x u32   dims (x, y, z)
    6 x f64   bbox min xyz, bbox max xyz
    payload   ceil(n / 8) bytes, one bit per node in x-major order

Bit 1 is a free node (+1), bit 0 a solid node (-1). Node 0 is the most
significant bit of the first payload byte.
"""

import struct
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import ValidationError

from ..errors import FormatError
from ..models.scene import SdfGrid

MAGIC = b"SDFG"
VERSION = 1
HEADER = struct.Struct("<4sH3I6d")


def dumps_grid(grid: SdfGrid) -> bytes:
    header = HEADER.pack(MAGIC, VERSION, *grid.dims, *grid.bbox_min, *grid.bbox_max)
    bits = np.packbits((grid.values == 1).astype(np.uint8), bitorder="big")
    return header + bits.tobytes()


def loads_grid(data: bytes, path: Optional[str] = None) -> SdfGrid:
    if len(data) < HEADER.size:
        raise FormatError(f"grid file truncated: {len(data)} bytes, header needs {HEADER.size}", path)
    magic, version, sx, sy, sz, *bbox = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}", path)
    if version != VERSION:
        raise FormatError(f"unsupported grid format version {version}", path)
    n = sx * sy * sz
    payload = data[HEADER.size :]
    expected = (n + 7) // 8
    if len(payload) != expected:
        raise FormatError(f"grid payload is {len(payload)} bytes, expected {expected}", path)
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), count=n, bitorder="big")
    try:
        return SdfGrid(
            dims=(sx, sy, sz),
            bbox_min=bbox[:3],
            bbox_max=bbox[3:],
            values=np.where(bits == 1, 1, -1).astype(np.int8),
        )
    except ValidationError as exc:
        raise FormatError(f"invalid grid: {exc.errors()[0]['msg']}", path) from exc


def read_grid(path) -> SdfGrid:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read grid ({exc})", str(path)) from exc
    return loads_grid(data, str(path))


def write_grid(path, grid: SdfGrid) -> None:
    Path(path).write_bytes(dumps_grid(grid))
