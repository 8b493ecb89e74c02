"""Route-point sampling on the walkable navigation grid."""

import logging
from typing import Optional

import numpy as np

from ..errors import BadParams, NoWalkableCell, Unreachable
from ..models.plot import NavGrid, SceneCatalog

logger = logging.getLogger(__name__)

INITIAL_MARGIN = 0.5
MARGIN_GROWTH = 1.5
REJECTIONS_PER_GROWTH = 8


def _require_walkable(navgrid: NavGrid) -> None:
    if not navgrid.walkable.any():
        raise NoWalkableCell("navigation grid has no walkable cell")


def _sample_in_box(
    navgrid: NavGrid, lo: np.ndarray, hi: np.ndarray, rng: np.random.Generator, max_attempts: int, what: str
) -> np.ndarray:
    """Rejection-sample a walkable point from the box ``[lo, hi]`` grown by a margin on every side.

    The margin starts at ``INITIAL_MARGIN`` and grows by ``MARGIN_GROWTH``
    after every ``REJECTIONS_PER_GROWTH`` rejections.
    """
    margin = INITIAL_MARGIN
    for attempt in range(max_attempts):
        if attempt and attempt % REJECTIONS_PER_GROWTH == 0:
            margin *= MARGIN_GROWTH
            logger.debug("route sampling near %s: margin grown to %.3f", what, margin)
        point = rng.uniform(lo - margin, hi + margin)
        if navgrid.is_walkable(point):
            return point
    raise Unreachable(f"no walkable point near {what} after {max_attempts} attempts")


def sample_route_point(
    catalog: SceneCatalog,
    target: Optional[str],
    seed: int,
    max_attempts: int = 64,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Walkable 2D point to route a character to.

    With no target, a uniformly chosen walkable cell's center. With an object
    name, one object bearing that name is picked at random and the point is
    drawn around its footprint.
    """
    navgrid = catalog.navgrid
    _require_walkable(navgrid)
    rng = rng if rng is not None else np.random.default_rng(seed)
    if target is None:
        cells = np.argwhere(navgrid.walkable)
        row, col = cells[rng.integers(len(cells))]
        return navgrid.cell_center(int(row), int(col))

    name = catalog.resolve(target)
    candidates = catalog.named(name) if name is not None else []
    if not candidates:
        raise BadParams(f"no catalog object named '{target}'")
    obj = candidates[int(rng.integers(len(candidates)))]
    return _sample_in_box(navgrid, obj.bbox_min[:2], obj.bbox_max[:2], rng, max_attempts, f"'{obj.name}'")


def sample_near_point(
    catalog: SceneCatalog,
    center,
    seed: int,
    max_attempts: int = 64,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Walkable point around ``center``, e.g. next to the partner before an HHI."""
    _require_walkable(catalog.navgrid)
    rng = rng if rng is not None else np.random.default_rng(seed)
    point = np.asarray(center, dtype=np.float64)[:2]
    return _sample_in_box(catalog.navgrid, point, point, rng, max_attempts, f"({point[0]:.2f}, {point[1]:.2f})")
