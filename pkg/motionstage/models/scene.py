"""Synthetic scene models: the binary SDF grid and its synthesis parameters."""

from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ._arrays import frozen_array

# Box geometry and object count used for training-time synthesis.
DEFAULT_BOX_SIZE = (3.0, 3.0, 3.0)
DEFAULT_DIMS = (128, 128, 128)
DEFAULT_K_RANGE = (0, 10)
MAX_PATTERNS = 64


class SdfGrid(BaseModel):
    """Axis-aligned lattice of +1 (free) / -1 (solid) labels.

    ``values`` is stored flat in x-major order (x slowest, z fastest), so
    ``values.reshape(dims)[i, j, k]`` is node (i, j, k). Node (i, j, k) sits at
    ``bbox_min + (i, j, k) * spacing``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dims: Tuple[int, int, int]
    bbox_min: np.ndarray
    bbox_max: np.ndarray
    values: np.ndarray

    @field_validator("bbox_min", "bbox_max", mode="before")
    @classmethod
    def _check_corner(cls, value, info):
        return frozen_array(value, (3,), info.field_name)

    @field_validator("values", mode="before")
    @classmethod
    def _check_values(cls, value):
        array = np.asarray(value).reshape(-1)
        return frozen_array(array, (None,), "values", dtype=np.int8)

    @model_validator(mode="after")
    def _check_grid(self):
        if any(d < 2 for d in self.dims):
            raise ValueError("every grid axis needs at least 2 nodes")
        if not np.all(self.bbox_min < self.bbox_max):
            raise ValueError("bbox min must be below max on every axis")
        if self.values.size != int(np.prod(self.dims)):
            raise ValueError(f"expected {int(np.prod(self.dims))} values, got {self.values.size}")
        if not np.all((self.values == 1) | (self.values == -1)):
            raise ValueError("grid values must be +1 or -1")
        return self

    @property
    def spacing(self) -> np.ndarray:
        return (self.bbox_max - self.bbox_min) / (np.asarray(self.dims, dtype=np.float64) - 1.0)

    @property
    def volume(self) -> np.ndarray:
        """Values as a read-only (Sx, Sy, Sz) view."""
        return self.values.reshape(self.dims)

    def axis_coordinates(self, axis: int) -> np.ndarray:
        return self.bbox_min[axis] + np.arange(self.dims[axis]) * self.spacing[axis]

    def node_positions(self) -> np.ndarray:
        """World positions of every node, (n, 3), in storage order."""
        xs, ys, zs = (self.axis_coordinates(a) for a in range(3))
        grid = np.stack(np.meshgrid(xs, ys, zs, indexing="ij"), axis=-1)
        return grid.reshape(-1, 3)


class SceneSynthParams(BaseModel):
    """Parameters of one synthetic scene.

    ``center`` anchors the box (typically one character's pelvis). The ceiling
    height is drawn uniformly from ``t_ceiling_range`` and the object count
    uniformly from ``k_range`` (inclusive).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    box_size: Tuple[float, float, float] = DEFAULT_BOX_SIZE
    dims: Tuple[int, int, int] = DEFAULT_DIMS
    t_floor: float = 0.0
    t_ceiling_range: Tuple[float, float]
    k_range: Tuple[int, int] = DEFAULT_K_RANGE
    pattern_extent_range: Tuple[float, float] = (0.1, 0.8)
    center: np.ndarray = Field(default_factory=lambda: np.zeros(3))
    seed: int = 0

    @field_validator("center", mode="before")
    @classmethod
    def _check_center(cls, value):
        return frozen_array(value, (3,), "center")

    @model_validator(mode="after")
    def _check_params(self):
        low, high = self.t_ceiling_range
        if not self.t_floor < low <= high:
            raise ValueError("need t_floor < t_ceiling low <= t_ceiling high")
        k_low, k_high = self.k_range
        if not 0 <= k_low <= k_high <= MAX_PATTERNS:
            raise ValueError(f"k_range must lie within [0, {MAX_PATTERNS}] and be ordered")
        e_low, e_high = self.pattern_extent_range
        if not 0 < e_low <= e_high:
            raise ValueError("pattern extents must be positive and ordered")
        if any(s <= 0 for s in self.box_size):
            raise ValueError("box size must be positive")
        if any(d < 2 for d in self.dims):
            raise ValueError("every grid axis needs at least 2 nodes")
        return self

    @property
    def bbox_min(self) -> np.ndarray:
        return self.center - np.asarray(self.box_size) / 2.0

    @property
    def bbox_max(self) -> np.ndarray:
        return self.center + np.asarray(self.box_size) / 2.0

    @classmethod
    def centered_on(cls, pelvis, max_body_z: float, **kwargs) -> "SceneSynthParams":
        """Box centered on ``pelvis``; ceiling drawn between the body top and the box top."""
        center = np.asarray(pelvis, dtype=np.float64)
        box_size = kwargs.get("box_size", DEFAULT_BOX_SIZE)
        top = float(center[2] + box_size[2] / 2.0)
        low = min(max_body_z, top)
        return cls(center=center, t_ceiling_range=(low, top), **kwargs)
