"""Synthetic SDF scenes around a motion's walkable region."""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from ..errors import BadParams, EmptyInput, OutOfBounds
from ..models.geometry import Hull2D, ObstaclePattern, TriMesh
from ..models.scene import SceneSynthParams, SdfGrid
from .geometry import convex_hull_2d, points_in_hull, points_in_pattern, project_vertices

logger = logging.getLogger(__name__)

SNAP_TOLERANCE = 1e-9
PATTERN_KINDS = ("rectangle", "ellipse")


def make_synth_params(**values) -> SceneSynthParams:
    """Build ``SceneSynthParams``, reporting invalid combinations as ``BadParams``."""
    try:
        return SceneSynthParams(**values)
    except ValidationError as exc:
        raise BadParams(str(exc)) from exc


def walkable_hull(meshes: Sequence[TriMesh]) -> Hull2D:
    """Convex hull of every vertex of every frame projected onto the ground plane."""
    projected = project_vertices(meshes)
    if len(projected) == 0:
        raise EmptyInput("walkable hull needs at least one vertex")
    return convex_hull_2d(projected)


def ceiling_range(meshes: Sequence[TriMesh], box_top: float, clearance: float = 0.0) -> Tuple[float, float]:
    """Ceiling draw range: from the highest body vertex (plus ``clearance``) up to the top of the box."""
    if not meshes:
        raise EmptyInput("ceiling range needs at least one mesh")
    top = max(float(m.vertices[:, 2].max()) for m in meshes if len(m.vertices))
    return min(top + clearance, box_top), box_top


def _grid_frame(params: SceneSynthParams) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    lo, hi = params.bbox_min, params.bbox_max
    spacing = (hi - lo) / (np.asarray(params.dims, dtype=np.float64) - 1.0)
    return tuple(lo[a] + np.arange(params.dims[a]) * spacing[a] for a in range(3))


def _column_points(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    return np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)


def _floor_and_ceiling(zs: np.ndarray, params: SceneSynthParams, t_ceiling: float) -> np.ndarray:
    """(Sx, Sy, Sz) int8 volume with only floor and ceiling solid."""
    values = np.ones(params.dims, dtype=np.int8)
    values[:, :, (zs <= params.t_floor) | (zs >= t_ceiling)] = -1
    return values


def _extrude(values: np.ndarray, zs: np.ndarray, t_floor: float, heights: np.ndarray) -> None:
    """Mark nodes strictly between the floor and each column's height as solid."""
    solid = (zs[None, None, :] > t_floor) & (zs[None, None, :] < heights[:, :, None])
    values[solid] = -1


def _to_grid(values: np.ndarray, params: SceneSynthParams) -> SdfGrid:
    return SdfGrid(dims=params.dims, bbox_min=params.bbox_min, bbox_max=params.bbox_max, values=values.reshape(-1))


def rasterize_patterns(
    hull: Hull2D, params: SceneSynthParams, t_ceiling: float, patterns: Sequence[ObstaclePattern]
) -> SdfGrid:
    """Extrude flat-topped patterns outside the hull between the floor and each pattern's height.

    A column covered by several patterns takes the tallest of them.
    """
    if any(p.height is None for p in patterns):
        raise BadParams("every pattern needs a height to be rasterized")
    xs, ys, zs = _grid_frame(params)
    values = _floor_and_ceiling(zs, params, t_ceiling)

    columns = _column_points(xs, ys)
    free = ~points_in_hull(hull, columns)
    heights = np.full(len(columns), -np.inf)
    for pattern in patterns:
        covered = points_in_pattern(pattern, columns) & free
        heights[covered] = np.maximum(heights[covered], pattern.height)
    _extrude(values, zs, params.t_floor, heights.reshape(params.dims[0], params.dims[1]))
    return _to_grid(values, params)


def _random_pattern(rng: np.random.Generator, params: SceneSynthParams, t_ceiling: float) -> ObstaclePattern:
    kind = PATTERN_KINDS[int(rng.integers(len(PATTERN_KINDS)))]
    center = rng.uniform(params.bbox_min[:2], params.bbox_max[:2])
    half_extents = rng.uniform(*params.pattern_extent_range, size=2)
    yaw = rng.uniform(0.0, np.pi)
    height = rng.uniform(params.t_floor, t_ceiling)
    return ObstaclePattern(kind=kind, center=center, half_extents=half_extents, yaw=yaw, height=height)


def synthesize_plane_based(hull: Hull2D, params: SceneSynthParams) -> Tuple[SdfGrid, List[ObstaclePattern]]:
    """Random flat-topped obstacles around the walkable hull; deterministic in ``params.seed``."""
    rng = np.random.default_rng(params.seed)
    t_ceiling = float(rng.uniform(*params.t_ceiling_range))
    k = int(rng.integers(params.k_range[0], params.k_range[1], endpoint=True))
    patterns = [_random_pattern(rng, params, t_ceiling) for _ in range(k)]
    grid = rasterize_patterns(hull, params, t_ceiling, patterns)
    logger.info("plane-based scene: K=%d ceiling=%.3f dims=%s", k, t_ceiling, params.dims)
    return grid, patterns


def synthesize_point_based(hull: Hull2D, params: SceneSynthParams, rng=None) -> SdfGrid:
    """Independent random height per out-of-hull column.

    ``rng`` defaults to ``numpy.random.default_rng(params.seed)``; anything with a
    numpy-compatible ``uniform`` works.
    """
    rng = np.random.default_rng(params.seed) if rng is None else rng
    t_ceiling = float(rng.uniform(*params.t_ceiling_range))
    xs, ys, zs = _grid_frame(params)
    values = _floor_and_ceiling(zs, params, t_ceiling)

    columns = _column_points(xs, ys)
    heights = np.asarray(rng.uniform(params.t_floor, t_ceiling, size=len(columns)), dtype=np.float64)
    heights = np.where(points_in_hull(hull, columns), -np.inf, heights)
    _extrude(values, zs, params.t_floor, heights.reshape(params.dims[0], params.dims[1]))
    logger.info("point-based scene: ceiling=%.3f dims=%s", t_ceiling, params.dims)
    return _to_grid(values, params)


def sample_sdf_many(grid: SdfGrid, points, mode: str = "clamp") -> np.ndarray:
    """Trilinear samples at (n, 3) points.

    ``mode`` is ``clamp`` (points outside the box take the border value) or
    ``error`` (raise ``OutOfBounds``). Coordinates within 1e-9 of a lattice
    plane snap onto it, so a node returns its exact value.
    """
    if mode not in ("clamp", "error"):
        raise BadParams(f"unknown sampling mode '{mode}'")
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    dims = np.asarray(grid.dims)
    u = (pts - grid.bbox_min) / grid.spacing
    if mode == "error":
        outside = np.any((u < -SNAP_TOLERANCE) | (u > dims - 1 + SNAP_TOLERANCE), axis=1)
        if np.any(outside):
            raise OutOfBounds(f"point {pts[outside][0].tolist()} lies outside the grid box")
    u = np.clip(u, 0.0, dims - 1)
    nearest = np.round(u)
    u = np.where(np.abs(u - nearest) <= SNAP_TOLERANCE, nearest, u)
    i0 = np.minimum(np.floor(u).astype(np.int64), dims - 2)
    f = u - i0

    volume = grid.volume.astype(np.float64)
    out = np.zeros(len(pts))
    for dx in (0, 1):
        wx = f[:, 0] if dx else 1.0 - f[:, 0]
        for dy in (0, 1):
            wy = f[:, 1] if dy else 1.0 - f[:, 1]
            for dz in (0, 1):
                wz = f[:, 2] if dz else 1.0 - f[:, 2]
                out += wx * wy * wz * volume[i0[:, 0] + dx, i0[:, 1] + dy, i0[:, 2] + dz]
    return out


def sample_sdf(grid: SdfGrid, point, mode: str = "clamp") -> float:
    return float(sample_sdf_many(grid, [point], mode=mode)[0])


def condition_points(grid: SdfGrid, anchor) -> np.ndarray:
    """(n, 4) rows of node position relative to ``anchor`` and node value, in storage order."""
    positions = grid.node_positions() - np.asarray(anchor, dtype=np.float64)
    return np.column_stack([positions, grid.values.astype(np.float64)])


def params_for_motion(
    meshes: Sequence[TriMesh],
    anchor,
    seed: int,
    box_size: float = 3.0,
    dims: int = 128,
    k_max: int = 10,
    t_floor: Optional[float] = None,
    ground_z: float = 0.0,
) -> SceneSynthParams:
    """Cubic box of side ``box_size`` centered on ``anchor``, ceiling drawn above the body.

    Without an explicit ``t_floor`` the floor sits at ``ground_z``, lowered by one node.
    """
    anchor = np.asarray(anchor, dtype=np.float64)
    box_top = float(anchor[2] + box_size / 2.0)
    spacing = box_size / (dims - 1)
    # one node of headroom keeps the top markers out of the ceiling's interpolation band
    low, _ = ceiling_range(meshes, box_top, clearance=spacing)
    if t_floor is None:
        # one node below the ground keeps the foot markers out of the floor's interpolation band
        floor = max(float(ground_z) - spacing, float(anchor[2] - box_size / 2.0))
    else:
        floor = t_floor
    try:
        return SceneSynthParams.centered_on(
            anchor,
            low,
            box_size=(box_size,) * 3,
            dims=(dims,) * 3,
            t_floor=floor,
            k_range=(0, k_max),
            seed=seed,
        )
    except ValidationError as exc:
        raise BadParams(str(exc)) from exc
