"""Geometry models: 2D hulls, triangle meshes and obstacle footprints."""

from typing import List, Literal, Optional

import numpy as np
import trimesh
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ._arrays import frozen_array


class Hull2D(BaseModel):
    """Convex polygon, counter-clockwise, starting at its lexicographically smallest vertex.

    ``degenerate`` is set when the input collapsed to a point or a segment
    (1-2 vertices). An empty hull (0 vertices) contains nothing.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    vertices: np.ndarray
    degenerate: bool = False

    @field_validator("vertices", mode="before")
    @classmethod
    def _check_vertices(cls, value):
        array = np.asarray(value, dtype=np.float64)
        if array.size == 0:
            array = np.zeros((0, 2))
        return frozen_array(array, (None, 2), "vertices")

    @model_validator(mode="after")
    def _check_degenerate_flag(self):
        if len(self.vertices) < 3 and not self.degenerate:
            raise ValueError("a hull with fewer than 3 vertices must be flagged degenerate")
        return self

    @classmethod
    def empty(cls) -> "Hull2D":
        return cls(vertices=np.zeros((0, 2)), degenerate=True)


class TriMesh(BaseModel):
    """Indexed triangle mesh; vertices (V, 3) meters, triangles (F, 3) indices."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    vertices: np.ndarray
    triangles: np.ndarray

    @field_validator("vertices", mode="before")
    @classmethod
    def _check_vertices(cls, value):
        return frozen_array(value, (None, 3), "vertices")

    @field_validator("triangles", mode="before")
    @classmethod
    def _check_triangles(cls, value):
        array = np.asarray(value, dtype=np.int64)
        if array.size == 0:
            array = np.zeros((0, 3), dtype=np.int64)
        return frozen_array(array, (None, 3), "triangles", dtype=np.int64)

    @model_validator(mode="after")
    def _check_indices(self):
        if len(self.triangles):
            if self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices):
                raise ValueError("triangle index out of range")
            t = self.triangles
            if np.any((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])):
                raise ValueError("triangle with repeated vertex index")
        return self

    @classmethod
    def from_trimesh(cls, mesh: trimesh.Trimesh) -> "TriMesh":
        return cls(vertices=np.asarray(mesh.vertices), triangles=np.asarray(mesh.faces))

    def to_trimesh(self) -> trimesh.Trimesh:
        return trimesh.Trimesh(
            vertices=np.array(self.vertices), faces=np.array(self.triangles), process=False
        )

    def translated(self, offset) -> "TriMesh":
        return TriMesh(vertices=self.vertices + np.asarray(offset, dtype=np.float64), triangles=self.triangles)


MeshSequence = List[TriMesh]


class ObstaclePattern(BaseModel):
    """Footprint of a synthetic obstacle: a rotated rectangle or ellipse.

    ``half_extents`` are (a, b) in meters along the pattern's own axes;
    ``yaw`` rotates those axes counter-clockwise about z. ``height`` is the
    flat top assigned during synthesis (None for a bare footprint).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: Literal["rectangle", "ellipse"]
    center: np.ndarray
    half_extents: np.ndarray
    yaw: float = 0.0
    height: Optional[float] = None

    @field_validator("center", mode="before")
    @classmethod
    def _check_center(cls, value):
        return frozen_array(value, (2,), "center")

    @field_validator("half_extents", mode="before")
    @classmethod
    def _check_extents(cls, value):
        array = frozen_array(value, (2,), "half_extents")
        if np.any(array <= 0):
            raise ValueError("half extents must be positive")
        return array
