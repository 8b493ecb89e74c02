"""Motion data models.

Coordinates are meters with x, y horizontal and z up. A frame holds 67 body
markers plus one pelvis position. Marker layout conventions used by the
defaults in this package (all configurable where they matter):

* markers 0-7 are the heel/toe markers (``FOOT_MARKER_IDS``)
* marker 65 is the left hip, marker 66 the right hip
"""

from typing import List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ._arrays import frozen_array, unit_quaternions

MARKER_COUNT = 67
FOOT_MARKER_IDS = (0, 1, 2, 3, 4, 5, 6, 7)
LEFT_HIP_MARKER = 65
RIGHT_HIP_MARKER = 66
HAND_JOINTS = 30


class MarkerFrame(BaseModel):
    """One frame: 67 marker positions and the pelvis position."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    markers: np.ndarray
    pelvis: np.ndarray

    @field_validator("markers", mode="before")
    @classmethod
    def _check_markers(cls, value):
        return frozen_array(value, (MARKER_COUNT, 3), "markers")

    @field_validator("pelvis", mode="before")
    @classmethod
    def _check_pelvis(cls, value):
        return frozen_array(value, (3,), "pelvis")


class Quaternion(BaseModel):
    """Unit rotation quaternion, w first. Normalized on construction."""

    model_config = ConfigDict(frozen=True)

    w: float
    x: float
    y: float
    z: float

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data):
        if isinstance(data, dict):
            values = np.array([data.get(k, 0.0) for k in ("w", "x", "y", "z")], dtype=np.float64)
            norm = float(np.linalg.norm(values))
            if not np.isfinite(norm) or norm < 1e-12:
                raise ValueError("quaternion must be finite and non-zero")
            values = values / norm
            return dict(zip(("w", "x", "y", "z"), values.tolist()))
        return data

    @classmethod
    def from_array(cls, wxyz) -> "Quaternion":
        w, x, y, z = (float(v) for v in wxyz)
        return cls(w=w, x=x, y=y, z=z)

    @classmethod
    def identity(cls) -> "Quaternion":
        return cls(w=1.0, x=0.0, y=0.0, z=0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=np.float64)


class MotionSequence(BaseModel):
    """A marker motion at a fixed frame rate.

    ``markers`` is (N, 67, 3) and ``pelvis`` is (N, 3). The optional
    ``rotations`` (body joints) and ``hands`` (hand joints) channels are
    (N, J, 4) arrays of w-first unit quaternions.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    markers: np.ndarray
    pelvis: np.ndarray
    fps: int
    rotations: Optional[np.ndarray] = None
    hands: Optional[np.ndarray] = None

    @field_validator("markers", mode="before")
    @classmethod
    def _check_markers(cls, value):
        return frozen_array(value, (None, MARKER_COUNT, 3), "markers")

    @field_validator("pelvis", mode="before")
    @classmethod
    def _check_pelvis(cls, value):
        return frozen_array(value, (None, 3), "pelvis")

    @field_validator("rotations", "hands", mode="before")
    @classmethod
    def _check_channel(cls, value, info):
        if value is None:
            return None
        array = unit_quaternions(value, info.field_name)
        if array.ndim != 3:
            raise ValueError(f"{info.field_name} must be (frames, joints, 4)")
        return array

    @model_validator(mode="after")
    def _check_lengths(self):
        n = self.markers.shape[0]
        if n < 1:
            raise ValueError("a motion needs at least one frame")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if self.pelvis.shape[0] != n:
            raise ValueError("pelvis track length differs from marker frames")
        for name in ("rotations", "hands"):
            channel = getattr(self, name)
            if channel is not None and channel.shape[0] != n:
                raise ValueError(f"{name} channel length differs from marker frames")
        return self

    @property
    def n_frames(self) -> int:
        return int(self.markers.shape[0])

    def __len__(self) -> int:
        return self.n_frames

    def frame(self, index: int) -> MarkerFrame:
        return MarkerFrame(markers=self.markers[index], pelvis=self.pelvis[index])

    def frames(self) -> List[MarkerFrame]:
        return [self.frame(i) for i in range(self.n_frames)]

    @classmethod
    def from_frames(cls, frames: Sequence[MarkerFrame], fps: int) -> "MotionSequence":
        return cls(
            markers=np.stack([f.markers for f in frames]),
            pelvis=np.stack([f.pelvis for f in frames]),
            fps=fps,
        )

    def slice(self, start: int, stop: int) -> "MotionSequence":
        """Frames ``[start, stop)`` with every channel cut alike."""
        return MotionSequence(
            markers=self.markers[start:stop],
            pelvis=self.pelvis[start:stop],
            fps=self.fps,
            rotations=None if self.rotations is None else self.rotations[start:stop],
            hands=None if self.hands is None else self.hands[start:stop],
        )

    def with_channels(self, **channels) -> "MotionSequence":
        data = {
            "markers": self.markers,
            "pelvis": self.pelvis,
            "fps": self.fps,
            "rotations": self.rotations,
            "hands": self.hands,
        }
        data.update(channels)
        return MotionSequence(**data)


class CanonicalPair(BaseModel):
    """Two characters after canonicalization plus what is needed to undo it.

    ``mode`` is ``initial`` (both characters moved rigidly so that A starts at
    the origin facing +Y) or ``improved`` (each character pelvis-local, pelvis
    tracks kept separately). ``origin`` and ``frame0_yaw`` describe the rigid
    transform ``p -> Rz(frame0_yaw) @ (p - origin)``; they are zero for the
    improved form.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mode: Literal["initial", "improved"]
    seq_a: MotionSequence
    seq_b: MotionSequence
    pelvis_track_a: np.ndarray
    pelvis_track_b: np.ndarray
    frame0_yaw: float = 0.0
    origin: np.ndarray = Field(default_factory=lambda: np.zeros(3))

    @field_validator("pelvis_track_a", "pelvis_track_b", mode="before")
    @classmethod
    def _check_track(cls, value, info):
        return frozen_array(value, (None, 3), info.field_name)

    @field_validator("origin", mode="before")
    @classmethod
    def _check_origin(cls, value):
        return frozen_array(value, (3,), "origin")


class HandClip(BaseModel):
    """Hand-pose clip: (F, J, 4) w-first unit quaternions per joint."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    rotations: np.ndarray
    fps: int

    @field_validator("rotations", mode="before")
    @classmethod
    def _check_rotations(cls, value):
        array = unit_quaternions(value, "rotations")
        if array.ndim != 3 or array.shape[0] < 1:
            raise ValueError("rotations must be (frames >= 1, joints, 4)")
        return array

    @property
    def n_frames(self) -> int:
        return int(self.rotations.shape[0])

    @property
    def n_joints(self) -> int:
        return int(self.rotations.shape[1])
