"""
Tests for Task 3: Walkable hulls, SDF scene synthesis, trilinear sampling and condition points.

Acceptance criteria:
- walkable_hull covers every projected vertex of every frame and rejects empty input
- Plane-based synthesis: floor and ceiling solid, hull columns free, flat-topped patterns
  outside the hull, the tallest covering pattern wins, identical seeds give identical grids
- Point-based synthesis: independent per-column heights outside the hull, so a fixed footprint
  loses its flat top on nearly every seed
- params_for_motion puts the floor one node below the ground unless a floor height is given
- sample_sdf returns exact node values, interpolates trilinearly, clamps or raises outside the box
- condition_points lists node positions relative to the anchor plus the node value, in storage order
"""

import numpy as np
import pytest
from pydantic import ValidationError

from motionstage.errors import BadParams, EmptyInput, OutOfBounds
from motionstage.models import Hull2D, ObstaclePattern, SceneSynthParams, SdfGrid
from motionstage.services.geometry import convex_hull_2d, points_in_hull, points_in_pattern
from motionstage.services.metrics import human_scene_penetration, marker_meshes
from motionstage.services.scene import (
    ceiling_range,
    condition_points,
    make_synth_params,
    params_for_motion,
    rasterize_patterns,
    sample_sdf,
    sample_sdf_many,
    synthesize_plane_based,
    synthesize_point_based,
    walkable_hull,
)

from .synthetic import box_mesh, standing

DIMS = (32, 32, 32)


def _params(seed=42, k_range=(3, 3), dims=DIMS, **kwargs):
    return SceneSynthParams(
        center=(0.0, 0.0, 1.5),
        box_size=(3.0, 3.0, 3.0),
        dims=dims,
        t_floor=0.05,
        t_ceiling_range=(2.0, 2.9),
        k_range=k_range,
        seed=seed,
        **kwargs,
    )


def _square_hull(half=0.4):
    return convex_hull_2d([(-half, -half), (half, -half), (half, half), (-half, half)])


def _coordinates(params):
    lo, hi = params.bbox_min, params.bbox_max
    return [lo[a] + np.arange(params.dims[a]) * (hi[a] - lo[a]) / (params.dims[a] - 1) for a in range(3)]


def _trilinear_reference(grid: SdfGrid, p) -> float:
    volume = grid.volume
    result = 0.0
    cell, frac = [], []
    for axis in range(3):
        u = (float(p[axis]) - float(grid.bbox_min[axis])) / float(grid.spacing[axis])
        i = min(int(np.floor(u)), grid.dims[axis] - 2)
        cell.append(i)
        frac.append(u - i)
    for dx in (0, 1):
        for dy in (0, 1):
            for dz in (0, 1):
                weight = (frac[0] if dx else 1 - frac[0]) * (frac[1] if dy else 1 - frac[1]) * (frac[2] if dz else 1 - frac[2])
                result += weight * float(volume[cell[0] + dx, cell[1] + dy, cell[2] + dz])
    return result


def test_walkable_hull_of_unit_prism():
    hull = walkable_hull([box_mesh(1.0, (0.5, 0.5, 0.5))])
    np.testing.assert_allclose(hull.vertices, [[0, 0], [1, 0], [1, 1], [0, 1]])


def test_walkable_hull_of_translating_cube():
    """A cube moving 1 m in x sweeps the 2 x 1 rectangle."""
    hull = walkable_hull([box_mesh(1.0, (0.5, 0.5, 0.5)), box_mesh(1.0, (1.5, 0.5, 0.5))])
    np.testing.assert_allclose(hull.vertices, [[0, 0], [2, 0], [2, 1], [0, 1]])


def test_walkable_hull_contains_all_vertices(rng):
    meshes = [box_mesh(0.5, rng.uniform(-1, 1, 3)) for _ in range(5)]
    hull = walkable_hull(meshes)
    for mesh in meshes:
        assert np.all(points_in_hull(hull, mesh.vertices[:, :2]))


def test_walkable_hull_rejects_empty():
    with pytest.raises(EmptyInput):
        walkable_hull([])


def test_params_reject_inverted_floor_and_ceiling():
    with pytest.raises(ValidationError):
        SceneSynthParams(t_floor=2.0, t_ceiling_range=(1.0, 2.5), dims=DIMS)
    with pytest.raises(BadParams):
        make_synth_params(t_floor=0.0, t_ceiling_range=(1.0, 2.0), k_range=(0, 65), dims=DIMS)


def test_ceiling_range_starts_above_body():
    """The range runs from the top vertex plus clearance to the box top, capped at the box top."""
    meshes = [box_mesh(1.0, (0.0, 0.0, 0.5))]
    assert ceiling_range(meshes, 3.0, clearance=0.1) == (pytest.approx(1.1), 3.0)
    assert ceiling_range(meshes, 0.8) == (0.8, 0.8)


def test_plane_based_without_patterns_is_open():
    """K = 0 leaves every node strictly between floor and ceiling free."""
    params = _params(k_range=(0, 0))
    grid, patterns = synthesize_plane_based(_square_hull(), params)
    assert patterns == []
    zs = _coordinates(params)[2]
    volume = grid.volume
    t_ceiling = float(np.random.default_rng(params.seed).uniform(*params.t_ceiling_range))
    inner = (zs > params.t_floor) & (zs < t_ceiling)
    assert np.all(volume[:, :, inner] == 1)
    assert np.all(volume[:, :, ~inner] == -1)


def test_full_footprint_pattern_at_ceiling_is_solid_block():
    params = _params()
    pattern = ObstaclePattern(kind="rectangle", center=(0.0, 0.0), half_extents=(2.0, 2.0), height=2.5)
    grid = rasterize_patterns(Hull2D.empty(), params, 2.5, [pattern])
    assert np.all(grid.values == -1)


def test_rasterize_requires_heights():
    pattern = ObstaclePattern(kind="ellipse", center=(0.0, 0.0), half_extents=(1.0, 1.0))
    with pytest.raises(BadParams):
        rasterize_patterns(Hull2D.empty(), _params(), 2.5, [pattern])


@pytest.mark.parametrize("seed", range(100))
def test_plane_based_node_audit(seed):
    """Every node agrees with the returned patterns, the hull and the floor and ceiling."""
    params = _params(seed=seed)
    hull = _square_hull()
    grid, patterns = synthesize_plane_based(hull, params)
    assert len(patterns) == 3
    t_ceiling = float(np.random.default_rng(seed).uniform(*params.t_ceiling_range))

    xs, ys, zs = _coordinates(params)
    columns = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
    outside = ~points_in_hull(hull, columns)
    tallest = np.full(len(columns), -np.inf)
    for pattern in patterns:
        assert params.t_floor <= pattern.height <= t_ceiling
        covered = points_in_pattern(pattern, columns) & outside
        tallest[covered] = np.maximum(tallest[covered], pattern.height)
    tallest = tallest.reshape(params.dims[0], params.dims[1])

    expected = np.ones(params.dims, dtype=np.int8)
    expected[:, :, (zs <= params.t_floor) | (zs >= t_ceiling)] = -1
    expected[(zs[None, None, :] > params.t_floor) & (zs[None, None, :] < tallest[:, :, None])] = -1
    np.testing.assert_array_equal(grid.volume, expected)


def test_plane_based_hull_columns_stay_free():
    params = _params(seed=3, k_range=(10, 10), pattern_extent_range=(0.5, 1.5))
    hull = _square_hull(0.6)
    grid, _ = synthesize_plane_based(hull, params)
    xs, ys, zs = _coordinates(params)
    columns = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
    inside = points_in_hull(hull, columns).reshape(params.dims[0], params.dims[1])
    t_ceiling = float(np.random.default_rng(3).uniform(*params.t_ceiling_range))
    band = (zs > params.t_floor) & (zs < t_ceiling)
    assert np.all(grid.volume[inside][:, band] == 1)


def _top_nodes(volume, zs, t_floor, t_ceiling):
    """(Sx, Sy) index of the highest solid node strictly between floor and ceiling, -1 when none."""
    solid = (volume == -1) & ((zs > t_floor) & (zs < t_ceiling))[None, None, :]
    last = volume.shape[2] - 1 - np.argmax(solid[:, :, ::-1], axis=2)
    return np.where(solid.any(axis=2), last, -1)


def test_plane_based_flat_tops_with_overlaps():
    """Every column takes the top of its tallest covering pattern, so each pattern's own columns share one top."""
    hull = _square_hull(0.2)
    overlapping = 0
    for seed in range(100):
        params = _params(seed=seed, k_range=(4, 4), pattern_extent_range=(0.5, 1.2))
        grid, patterns = synthesize_plane_based(hull, params)
        xs, ys, zs = _coordinates(params)
        t_ceiling = float(np.random.default_rng(seed).uniform(*params.t_ceiling_range))
        columns = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
        outside = ~points_in_hull(hull, columns)
        covering = np.stack([points_in_pattern(p, columns) & outside for p in patterns])
        heights = np.array([p.height for p in patterns])
        overlapping += int(np.count_nonzero(covering.sum(axis=0) > 1))

        tops = _top_nodes(grid.volume, zs, params.t_floor, t_ceiling).reshape(-1)
        owner = np.argmax(np.where(covering, heights[:, None], -np.inf), axis=0)
        for k, pattern in enumerate(patterns):
            owned = covering.any(axis=0) & (owner == k)
            below = np.nonzero((zs > params.t_floor) & (zs < pattern.height))[0]
            expected = int(below.max()) if len(below) else -1
            assert set(tops[owned].tolist()) <= {expected}, f"seed {seed}, pattern {k}"
        assert np.all(tops[~covering.any(axis=0)] == -1)
    assert overlapping > 0


def test_point_based_breaks_flat_tops():
    """Under per-column heights a fixed footprint outside the hull almost never keeps a flat top."""
    hull = _square_hull(0.2)
    footprint = ObstaclePattern(kind="rectangle", center=(0.9, 0.9), half_extents=(0.4, 0.4))
    broken = 0
    for seed in range(100):
        params = _params(seed=seed)
        grid = synthesize_point_based(hull, params)
        xs, ys, zs = _coordinates(params)
        t_ceiling = float(np.random.default_rng(seed).uniform(*params.t_ceiling_range))
        columns = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
        owned = points_in_pattern(footprint, columns) & ~points_in_hull(hull, columns)
        tops = _top_nodes(grid.volume, zs, params.t_floor, t_ceiling).reshape(-1)[owned]
        broken += len(set(tops.tolist())) > 1
    assert broken >= 95


def test_plane_based_is_deterministic():
    first, _ = synthesize_plane_based(_square_hull(), _params(seed=5))
    second, _ = synthesize_plane_based(_square_hull(), _params(seed=5))
    assert first.values.tobytes() == second.values.tobytes()


def test_point_based_full_hull_has_only_floor_and_ceiling():
    params = _params(seed=1)
    hull = convex_hull_2d([(-2, -2), (2, -2), (2, 2), (-2, 2)])
    grid = synthesize_point_based(hull, params)
    zs = _coordinates(params)[2]
    t_ceiling = float(np.random.default_rng(1).uniform(*params.t_ceiling_range))
    band = (zs > params.t_floor) & (zs < t_ceiling)
    assert np.all(grid.volume[:, :, band] == 1)
    assert np.all(grid.volume[:, :, ~band] == -1)


class _TopRng:
    """Stand-in generator that always draws the upper bound."""

    def uniform(self, low, high, size=None):
        return high if size is None else np.full(size, high, dtype=float)


def test_point_based_with_top_heights_is_solid_block():
    grid = synthesize_point_based(Hull2D.empty(), _params(), rng=_TopRng())
    assert np.all(grid.values == -1)


def test_point_based_columns_are_independent():
    """Neighboring column heights are uncorrelated over 10k columns."""
    params = _params(seed=8, dims=(100, 100, 16))
    grid = synthesize_point_based(Hull2D.empty(), params)
    # floor and ceiling contribute the same count to every column
    heights = (grid.volume == -1).sum(axis=2).astype(float)
    rho = np.corrcoef(heights[:-1].ravel(), heights[1:].ravel())[0, 1]
    assert abs(rho) < 0.05


def _two_node_grid():
    values = np.ones((2, 2, 2), dtype=np.int8)
    values[1, 0, 0] = -1
    return SdfGrid(dims=(2, 2, 2), bbox_min=(0, 0, 0), bbox_max=(1, 1, 1), values=values)


def test_sample_at_nodes_and_edge_midpoint():
    grid = _two_node_grid()
    assert sample_sdf(grid, (0.0, 0.0, 0.0)) == 1.0
    assert sample_sdf(grid, (1.0, 0.0, 0.0)) == -1.0
    assert sample_sdf(grid, (0.5, 0.0, 0.0)) == pytest.approx(0.0, abs=1e-15)


def test_sample_returns_exact_node_values_on_large_grid():
    grid, _ = synthesize_plane_based(_square_hull(), _params(seed=21))
    nodes = grid.node_positions()[::97]
    np.testing.assert_array_equal(sample_sdf_many(grid, nodes), grid.values[::97].astype(float))


def test_sample_matches_scalar_reference(rng):
    grid, _ = synthesize_plane_based(_square_hull(), _params(seed=42))
    points = rng.uniform(grid.bbox_min, grid.bbox_max, (1000, 3))
    fast = sample_sdf_many(grid, points)
    for p, value in zip(points, fast):
        assert value == pytest.approx(_trilinear_reference(grid, p), abs=1e-12)
    assert np.all((fast >= -1.0) & (fast <= 1.0))


def test_sample_is_lipschitz(rng):
    grid, _ = synthesize_plane_based(_square_hull(), _params(seed=9))
    bound = 2.0 / grid.spacing.min()
    points = rng.uniform(grid.bbox_min + 0.01, grid.bbox_max - 0.01, (300, 3))
    for axis in range(3):
        step = np.zeros(3)
        step[axis] = 1e-6
        change = np.abs(sample_sdf_many(grid, points + step) - sample_sdf_many(grid, points))
        assert np.all(change <= bound * 1e-6 + 1e-12)


def test_sample_outside_clamps_or_raises():
    grid = _two_node_grid()
    assert sample_sdf(grid, (5.0, 0.0, 0.0)) == -1.0
    assert sample_sdf(grid, (-3.0, -3.0, -3.0)) == 1.0
    with pytest.raises(OutOfBounds):
        sample_sdf(grid, (1.5, 0.5, 0.5), mode="error")
    with pytest.raises(BadParams):
        sample_sdf(grid, (0.5, 0.5, 0.5), mode="wrap")


def test_condition_points_symmetric_offsets():
    grid = SdfGrid(dims=(2, 2, 2), bbox_min=(-1, -1, -1), bbox_max=(1, 1, 1), values=np.ones(8))
    rows = condition_points(grid, (0.0, 0.0, 0.0))
    assert rows.shape == (8, 4)
    np.testing.assert_array_equal(np.abs(rows[:, :3]), np.ones((8, 3)))
    np.testing.assert_array_equal(rows[0], [-1, -1, -1, 1])
    np.testing.assert_array_equal(rows[1], [-1, -1, 1, 1])


def test_condition_points_ordering_and_length():
    grid, _ = synthesize_plane_based(_square_hull(), _params(seed=4))
    anchor = np.array([0.2, -0.1, 0.95])
    rows = condition_points(grid, anchor)
    assert len(rows) == 32 ** 3
    np.testing.assert_allclose(rows[:, :3] + anchor, grid.node_positions())
    np.testing.assert_array_equal(rows[:, 3], grid.values)


def test_params_for_motion_anchors_box():
    meshes = [box_mesh(0.5, (1.0, 2.0, 0.9))]
    params = params_for_motion(meshes, (1.0, 2.0, 0.95), seed=3, box_size=3.0, dims=32, k_max=4)
    np.testing.assert_allclose(params.bbox_min, [-0.5, 0.5, -0.55])
    assert params.t_floor == pytest.approx(-3.0 / 31)
    assert params.k_range == (0, 4)
    assert params.t_ceiling_range[0] == pytest.approx(1.15 + 3.0 / 31)
    assert params.t_ceiling_range[1] == pytest.approx(2.45)


def test_params_for_motion_floor_follows_ground():
    meshes = [box_mesh(0.5, (0.0, 0.0, 0.9))]
    raised = params_for_motion(meshes, (0.0, 0.0, 0.95), seed=3, dims=32, ground_z=0.3)
    assert raised.t_floor == pytest.approx(0.3 - 3.0 / 31)
    sunk = params_for_motion(meshes, (0.0, 0.0, 0.95), seed=3, dims=32, ground_z=-2.0)
    assert sunk.t_floor == pytest.approx(-0.55)
    explicit = params_for_motion(meshes, (0.0, 0.0, 0.95), seed=3, dims=32, t_floor=0.1, ground_z=0.3)
    assert explicit.t_floor == pytest.approx(0.1)


def test_synthesized_floor_sits_at_the_feet():
    """The top floor layer lies within two nodes below the ground, and a standing body stays clear of it."""
    seq = standing((0.0, 0.0))
    meshes = marker_meshes(seq)
    params = params_for_motion(meshes, seq.pelvis[0], seed=5, dims=32, k_max=0)
    grid, _ = synthesize_plane_based(walkable_hull(meshes), params)
    zs = _coordinates(params)[2]
    floor_nodes = np.nonzero(np.all(grid.volume == -1, axis=(0, 1)) & (zs < 0.5))[0]
    top = zs[floor_nodes.max()]
    spacing = 3.0 / 31
    assert params.t_floor == pytest.approx(-spacing)
    assert -2.0 * spacing < top <= -spacing + 1e-9
    assert human_scene_penetration(seq, grid) == 0.0
