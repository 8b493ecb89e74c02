"""Quaternion helpers (w-first) built on numpy and scipy's Rotation."""

import numpy as np
from scipy.spatial.transform import Rotation

from ..models.motion import Quaternion

# Below this arc angle slerp falls back to normalized lerp.
SLERP_EPSILON = 1e-6


def slerp_arrays(q0: np.ndarray, q1: np.ndarray, t) -> np.ndarray:
    """Shorter-arc slerp between broadcastable (..., 4) arrays at parameter(s) ``t``."""
    q0 = np.asarray(q0, dtype=np.float64)
    q1 = np.asarray(q1, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)[..., None]

    dot = np.sum(q0 * q1, axis=-1, keepdims=True)
    q1 = np.where(dot < 0.0, -q1, q1)
    dot = np.clip(np.abs(dot), 0.0, 1.0)

    theta = np.arccos(dot)
    small = theta < SLERP_EPSILON
    sin_theta = np.where(small, 1.0, np.sin(theta))
    w0 = np.where(small, 1.0 - t, np.sin((1.0 - t) * theta) / sin_theta)
    w1 = np.where(small, t, np.sin(t * theta) / sin_theta)

    out = w0 * q0 + w1 * q1
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def slerp(q0: Quaternion, q1: Quaternion, t: float) -> Quaternion:
    """Constant angular velocity interpolation from ``q0`` (t=0) to ``q1`` (t=1)."""
    return Quaternion.from_array(slerp_arrays(q0.as_array(), q1.as_array(), t))


def to_scipy(wxyz: np.ndarray) -> Rotation:
    return Rotation.from_quat(np.roll(np.asarray(wxyz, dtype=np.float64), -1, axis=-1))


def from_scipy(rotation: Rotation) -> np.ndarray:
    return np.roll(rotation.as_quat(), 1, axis=-1)


def angle_between(q0: np.ndarray, q1: np.ndarray) -> np.ndarray:
    """Rotation angle (radians) taking ``q0`` to ``q1``, elementwise over (..., 4)."""
    dot = np.abs(np.sum(np.asarray(q0) * np.asarray(q1), axis=-1))
    return 2.0 * np.arccos(np.clip(dot, 0.0, 1.0))


def mean_rotations(quats: np.ndarray) -> np.ndarray:
    """Per-joint chordal mean of (F, J, 4) rotations, returned as (J, 4)."""
    quats = np.asarray(quats, dtype=np.float64)
    means = [from_scipy(to_scipy(quats[:, j]).mean()) for j in range(quats.shape[1])]
    return np.stack(means)


def yaw_matrix(yaw: float) -> np.ndarray:
    """3x3 rotation by ``yaw`` radians counter-clockwise about +z."""
    return Rotation.from_euler("z", yaw).as_matrix()
