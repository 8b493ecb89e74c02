"""Motion canonicalization, velocities and resampling."""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import BadLength, FpsMismatch, IndexOutOfRange, LengthMismatch, MarkerMismatch, TooShort
from ..models.geometry import TriMesh
from ..models.motion import (
    LEFT_HIP_MARKER,
    MARKER_COUNT,
    RIGHT_HIP_MARKER,
    CanonicalPair,
    MotionSequence,
)
from .quaternion import slerp_arrays, yaw_matrix

logger = logging.getLogger(__name__)


def facing_yaw(markers: np.ndarray) -> float:
    """Yaw that turns the hip-derived facing direction of one frame onto +Y.

    Facing is the horizontal left-hip to right-hip vector rotated +90 degrees
    about z. A frame with coincident hips (in plan view) is taken as already
    facing +Y.
    """
    across = markers[RIGHT_HIP_MARKER, :2] - markers[LEFT_HIP_MARKER, :2]
    facing = np.array([-across[1], across[0]])
    if np.linalg.norm(facing) < 1e-12:
        return 0.0
    return float(np.pi / 2.0 - np.arctan2(facing[1], facing[0]))


def _check_pair(seq_a: MotionSequence, seq_b: MotionSequence) -> None:
    if seq_a.n_frames != seq_b.n_frames:
        raise LengthMismatch(f"characters have {seq_a.n_frames} and {seq_b.n_frames} frames")
    if seq_a.fps != seq_b.fps:
        raise FpsMismatch(f"characters run at {seq_a.fps} and {seq_b.fps} fps")


def _rigid(seq: MotionSequence, rotation: np.ndarray, origin: np.ndarray) -> MotionSequence:
    return seq.with_channels(
        markers=(seq.markers - origin) @ rotation.T,
        pelvis=(seq.pelvis - origin) @ rotation.T,
    )


def canonicalize_initial(seq_a: MotionSequence, seq_b: MotionSequence) -> CanonicalPair:
    """Move both characters rigidly so A's frame-0 pelvis is the origin and A faces +Y.

    Markers stay global; joint and hand rotation channels are carried unchanged.
    """
    _check_pair(seq_a, seq_b)
    origin = np.array(seq_a.pelvis[0])
    yaw = facing_yaw(seq_a.markers[0])
    rotation = yaw_matrix(yaw)
    out_a = _rigid(seq_a, rotation, origin)
    out_b = _rigid(seq_b, rotation, origin)
    return CanonicalPair(
        mode="initial",
        seq_a=out_a,
        seq_b=out_b,
        pelvis_track_a=out_a.pelvis,
        pelvis_track_b=out_b.pelvis,
        frame0_yaw=yaw,
        origin=origin,
    )


def canonicalize_improved(seq_a: MotionSequence, seq_b: MotionSequence) -> CanonicalPair:
    """Express each character's markers relative to its own per-frame pelvis."""
    _check_pair(seq_a, seq_b)

    def local(seq: MotionSequence) -> MotionSequence:
        return seq.with_channels(
            markers=seq.markers - seq.pelvis[:, None, :],
            pelvis=np.zeros_like(seq.pelvis),
        )

    return CanonicalPair(
        mode="improved",
        seq_a=local(seq_a),
        seq_b=local(seq_b),
        pelvis_track_a=seq_a.pelvis,
        pelvis_track_b=seq_b.pelvis,
    )


def decode(pair: CanonicalPair) -> Tuple[MotionSequence, MotionSequence]:
    """Global-frame sequences; the inverse of whichever canonicalization built ``pair``."""
    if pair.mode == "improved":

        def world(seq: MotionSequence, track: np.ndarray) -> MotionSequence:
            return seq.with_channels(markers=seq.markers + track[:, None, :], pelvis=track)

        return world(pair.seq_a, pair.pelvis_track_a), world(pair.seq_b, pair.pelvis_track_b)

    inverse = yaw_matrix(-pair.frame0_yaw)

    def undo(seq: MotionSequence) -> MotionSequence:
        return seq.with_channels(
            markers=seq.markers @ inverse.T + pair.origin,
            pelvis=seq.pelvis @ inverse.T + pair.origin,
        )

    return undo(pair.seq_a), undo(pair.seq_b)


def marker_dispersion(seq: MotionSequence) -> float:
    """Mean Euclidean norm of the stored marker positions."""
    return float(np.mean(np.linalg.norm(seq.markers, axis=-1)))


def velocities(seq: MotionSequence) -> np.ndarray:
    """(N, 67, 3) forward-difference marker velocities in m/s; the last frame repeats."""
    if seq.n_frames < 2:
        raise TooShort(f"velocities need at least 2 frames, got {seq.n_frames}")
    diffs = np.diff(seq.markers, axis=0) * seq.fps
    return np.concatenate([diffs, diffs[-1:]], axis=0)


def _sample_params(n: int, new_len: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    t = np.arange(new_len) * (n - 1) / (new_len - 1)
    i0 = np.minimum(np.floor(t).astype(np.int64), n - 2)
    return i0, i0 + 1, t - i0


def resample_array(values: np.ndarray, new_len: int) -> np.ndarray:
    """Linear resampling along axis 0 at t = i (N-1) / (new_len-1); endpoints exact."""
    n = len(values)
    if n == new_len:
        return np.array(values)
    if n == 1:
        return np.repeat(values, new_len, axis=0)
    i0, i1, frac = _sample_params(n, new_len)
    frac = frac.reshape((-1,) + (1,) * (values.ndim - 1))
    return (1.0 - frac) * values[i0] + frac * values[i1]


def resample_rotations(quats: np.ndarray, new_len: int) -> np.ndarray:
    """Slerp resampling of (N, J, 4) rotations at the same parameters as ``resample_array``."""
    n = len(quats)
    if n == new_len:
        return np.array(quats)
    if n == 1:
        return np.repeat(quats, new_len, axis=0)
    i0, i1, frac = _sample_params(n, new_len)
    out = slerp_arrays(quats[i0], quats[i1], np.broadcast_to(frac[:, None], quats[i0].shape[:-1]))
    exact0, exact1 = frac == 0.0, frac == 1.0
    out[exact0] = quats[i0[exact0]]
    out[exact1] = quats[i1[exact1]]
    return out


def resample(seq: MotionSequence, new_len: int) -> MotionSequence:
    """Uniform-length resampling; positions linear, rotation channels slerped, fps unchanged."""
    if new_len < 2:
        raise BadLength(f"resample length must be at least 2, got {new_len}")
    if new_len == seq.n_frames:
        return seq
    return MotionSequence(
        markers=resample_array(seq.markers, new_len),
        pelvis=resample_array(seq.pelvis, new_len),
        fps=seq.fps,
        rotations=None if seq.rotations is None else resample_rotations(seq.rotations, new_len),
        hands=None if seq.hands is None else resample_rotations(seq.hands, new_len),
    )


def extract_markers(mesh: TriMesh, index_map: Sequence[int]) -> np.ndarray:
    """(67, 3) marker positions read off ``mesh`` at the given vertex indices."""
    indices = np.asarray(index_map, dtype=np.int64)
    if indices.shape != (MARKER_COUNT,):
        raise MarkerMismatch(f"marker index map must hold {MARKER_COUNT} entries, got {indices.size}")
    bad = (indices < 0) | (indices >= len(mesh.vertices))
    if np.any(bad):
        raise IndexOutOfRange(
            f"marker index {int(indices[bad][0])} outside mesh with {len(mesh.vertices)} vertices"
        )
    return np.array(mesh.vertices[indices])


def _stack_channel(seqs: Sequence[MotionSequence], name: str) -> Optional[np.ndarray]:
    channels = [getattr(s, name) for s in seqs]
    if any(c is None for c in channels) or len({c.shape[1] for c in channels}) != 1:
        return None
    return np.concatenate(channels, axis=0)


def concatenate(seqs: Sequence[MotionSequence]) -> MotionSequence:
    """Play ``seqs`` back to back. A rotation channel survives only if every part carries it."""
    if len({s.fps for s in seqs}) != 1:
        raise FpsMismatch("cannot concatenate sequences with different frame rates")
    return MotionSequence(
        markers=np.concatenate([s.markers for s in seqs], axis=0),
        pelvis=np.concatenate([s.pelvis for s in seqs], axis=0),
        fps=seqs[0].fps,
        rotations=_stack_channel(seqs, "rotations"),
        hands=_stack_channel(seqs, "hands"),
    )
