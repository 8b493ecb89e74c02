"""Motion synchronization: junction blending, order segmentation and hover padding."""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import BadLength, BadParams, FpsMismatch, HhiCountMismatch, MarkerMismatch
from ..models.motion import MotionSequence
from ..models.plot import Hhi
from ..models.sync import ORDER_SECONDS, SYSTEM_FPS, JunctionBlendParams, OrderSegment, SegmentAlignment
from .motion import concatenate
from .quaternion import slerp, slerp_arrays

logger = logging.getLogger(__name__)

__all__ = [
    "slerp",
    "blend_junction",
    "blend_exit",
    "blend_hhi_clip",
    "segment_orders",
    "align_segment_lengths",
    "pad_with_hover",
    "frames_for_orders",
]

HOVER_SIGMA = 0.002
HOVER_CLIP = 3.0 * HOVER_SIGMA


def _check_compatible(prev: MotionSequence, next_: MotionSequence) -> None:
    if prev.fps != next_.fps:
        raise FpsMismatch(f"cannot blend {prev.fps} fps into {next_.fps} fps")
    if prev.markers.shape[1:] != next_.markers.shape[1:]:
        raise MarkerMismatch("sequences carry different marker sets")
    for name in ("rotations", "hands"):
        a, b = getattr(prev, name), getattr(next_, name)
        if a is not None and b is not None and a.shape[1] != b.shape[1]:
            raise MarkerMismatch(f"{name} channels have {a.shape[1]} and {b.shape[1]} joints")


def _ramp(start: MotionSequence, start_idx: int, end: MotionSequence, end_idx: int, count: int) -> dict:
    """``count`` in-between frames from ``start[start_idx]`` to ``end[end_idx]`` (both excluded)."""
    alpha = (np.arange(count) + 1.0) / (count + 1.0)
    a = alpha[:, None, None]
    frames = {
        "markers": (1.0 - a) * start.markers[start_idx] + a * end.markers[end_idx],
        "pelvis": (1.0 - alpha[:, None]) * start.pelvis[start_idx] + alpha[:, None] * end.pelvis[end_idx],
    }
    for name in ("rotations", "hands"):
        q0, q1 = getattr(start, name), getattr(end, name)
        if q0 is not None and q1 is not None:
            frames[name] = slerp_arrays(q0[start_idx][None], q1[end_idx][None], np.broadcast_to(alpha[:, None], (count, q0.shape[1])))
    return frames


def _replace(seq: MotionSequence, start: int, frames: dict) -> MotionSequence:
    channels = {}
    for name in ("markers", "pelvis", "rotations", "hands"):
        current = getattr(seq, name)
        if current is None:
            continue
        if name in frames:
            current = np.array(current)
            current[start:start + len(frames[name])] = frames[name]
        channels[name] = current
    return seq.with_channels(**channels)


def blend_junction(prev: MotionSequence, next_: MotionSequence, params: JunctionBlendParams) -> MotionSequence:
    """Concatenate, ramping the first ``buffer_frames`` of ``next_`` from ``prev``'s last frame.

    Frame j < b of ``next_`` becomes ``(1 - a) prev[-1] + a next_[b]`` with
    a = (j + 1) / (b + 1); rotation channels are slerped. ``b`` is capped so
    that the anchor frame exists.
    """
    _check_compatible(prev, next_)
    b = min(params.buffer_frames, next_.n_frames - 1)
    if b > 0:
        next_ = _replace(next_, 0, _ramp(prev, prev.n_frames - 1, next_, b, b))
    return concatenate([prev, next_])


def blend_exit(prev: MotionSequence, next_: MotionSequence, params: JunctionBlendParams) -> MotionSequence:
    """Concatenate, ramping the last ``buffer_frames`` of ``prev`` into ``next_``'s first frame."""
    _check_compatible(prev, next_)
    b = min(params.buffer_frames, prev.n_frames - 1)
    if b > 0:
        anchor = prev.n_frames - 1 - b
        prev = _replace(prev, anchor + 1, _ramp(prev, anchor, next_, 0, b))
    return concatenate([prev, next_])


def blend_hhi_clip(
    before: MotionSequence,
    hhi: MotionSequence,
    after: Optional[MotionSequence],
    params: JunctionBlendParams,
) -> MotionSequence:
    """Blend both buffers of an HHI clip, entry first and exit second."""
    joined = blend_junction(before, hhi, params)
    if after is None:
        return joined
    return blend_exit(joined, after, params)


def _split(commands: Sequence) -> List[List]:
    segments, current = [], []
    for command in commands:
        current.append(command)
        if isinstance(command, Hhi):
            segments.append(current)
            current = []
    if current:
        segments.append(current)
    return segments


def segment_orders(orders_a: Sequence, orders_b: Sequence) -> List[Tuple[OrderSegment, OrderSegment]]:
    """Split both order lists after each HHI command and pair the i-th pieces.

    A trailing run without an HHI is its own final segment; the other character
    gets an empty segment there if it has no trailing run.
    """
    count_a = sum(isinstance(c, Hhi) for c in orders_a)
    count_b = sum(isinstance(c, Hhi) for c in orders_b)
    if count_a != count_b:
        raise HhiCountMismatch(f"character A has {count_a} HHI orders, character B has {count_b}")
    parts_a, parts_b = _split(orders_a), _split(orders_b)
    total = max(len(parts_a), len(parts_b))
    parts_a += [[]] * (total - len(parts_a))
    parts_b += [[]] * (total - len(parts_b))
    return [(OrderSegment(commands=a), OrderSegment(commands=b)) for a, b in zip(parts_a, parts_b)]


def frames_for_orders(count: int, clip_seconds: float = ORDER_SECONDS, fps: int = SYSTEM_FPS) -> int:
    """Frame budget of ``count`` orders, rounded half up."""
    return int(math.floor(count * clip_seconds * fps + 0.5))


def align_segment_lengths(
    seg_a: OrderSegment, seg_b: OrderSegment, clip_seconds: float = ORDER_SECONDS, fps: int = SYSTEM_FPS
) -> SegmentAlignment:
    """Common pre-HHI length of a segment pair and the hover pad each side needs to reach it."""
    if clip_seconds <= 0:
        raise BadParams("clip_seconds must be positive")
    if fps <= 0:
        raise BadParams("fps must be positive")
    target = frames_for_orders(max(seg_a.pre_hhi_count, seg_b.pre_hhi_count), clip_seconds, fps)
    return SegmentAlignment(
        target_frames=target,
        pad_a=target - frames_for_orders(seg_a.pre_hhi_count, clip_seconds, fps),
        pad_b=target - frames_for_orders(seg_b.pre_hhi_count, clip_seconds, fps),
    )


def pad_with_hover(seq: MotionSequence, pad: int, seed: int) -> MotionSequence:
    """Append ``pad`` frames hovering at the last frame.

    Each hover frame is the last frame shifted by a small seeded offset
    (sigma 2 mm, clipped at 6 mm per axis); rotation channels hold still.
    """
    if pad < 0:
        raise BadLength(f"hover pad must be non-negative, got {pad}")
    if pad == 0:
        return seq
    rng = np.random.default_rng(seed)
    offsets = np.clip(rng.normal(0.0, HOVER_SIGMA, size=(pad, 3)), -HOVER_CLIP, HOVER_CLIP)
    channels = {
        "markers": seq.markers[-1][None] + offsets[:, None, :],
        "pelvis": seq.pelvis[-1][None] + offsets,
        "fps": seq.fps,
    }
    for name in ("rotations", "hands"):
        channel = getattr(seq, name)
        if channel is not None:
            channels[name] = np.repeat(channel[-1:], pad, axis=0)
    return concatenate([seq, MotionSequence(**channels)])
