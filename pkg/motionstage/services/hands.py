"""Hand-pose retrieval and splicing."""

import logging
from typing import List, Optional

import numpy as np
from sklearn.metrics.pairwise import cosine_similarity

from ..errors import BadLength, DimensionMismatch, EmptyIndex, InvalidQuery, LengthMismatch
from ..models.hands import EmbeddingIndex
from ..models.motion import HAND_JOINTS, HandClip, MotionSequence
from .motion import resample_rotations
from .quaternion import mean_rotations, slerp_arrays

logger = logging.getLogger(__name__)


def _check_queries(index: EmbeddingIndex, queries: np.ndarray) -> None:
    if len(index) == 0:
        raise EmptyIndex("hand index has no entries")
    if queries.shape[-1] != index.dim:
        raise DimensionMismatch(f"query has dimension {queries.shape[-1]}, index has {index.dim}")
    if not np.all(np.isfinite(queries)) or np.any(np.linalg.norm(queries, axis=-1) < 1e-12):
        raise InvalidQuery("query vectors must be finite and non-zero")


def retrieve(index: EmbeddingIndex, query) -> str:
    """Id of the entry most cosine-similar to ``query``; ties go to the smallest id."""
    query = np.asarray(query, dtype=np.float64).reshape(-1)
    _check_queries(index, query[None])
    similarities = cosine_similarity(query.reshape(1, -1), index.embeddings)[0]
    best = int(np.argmax(similarities))
    logger.debug("retrieved %s (similarity %.4f)", index.clip_ids[best], similarities[best])
    return index.clip_ids[best]


def retrieve_many(index: EmbeddingIndex, queries) -> List[str]:
    """Batch ``retrieve`` over (q, d) queries."""
    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    _check_queries(index, queries)
    best = np.argmax(cosine_similarity(queries, index.embeddings), axis=1)
    return [index.clip_ids[i] for i in best]


def fit_clip_length(clip: HandClip, target_len: int, seed: int) -> HandClip:
    """Cut a seeded random window from a longer clip, or slerp-upsample a shorter one."""
    if target_len < 2:
        raise BadLength(f"hand clip target length must be at least 2, got {target_len}")
    frames = clip.n_frames
    if frames == target_len:
        return clip
    if frames > target_len:
        start = int(np.random.default_rng(seed).integers(0, frames - target_len + 1))
        return HandClip(rotations=clip.rotations[start:start + target_len], fps=clip.fps)
    return HandClip(rotations=resample_rotations(clip.rotations, target_len), fps=clip.fps)


def flat_hand_pose(joints: int = HAND_JOINTS) -> np.ndarray:
    """Identity rotation for every hand joint, (J, 4)."""
    pose = np.zeros((joints, 4))
    pose[:, 0] = 1.0
    return pose


def mean_hand_pose(clip: HandClip) -> np.ndarray:
    """Per-joint mean rotation of a clip, (J, 4)."""
    return mean_rotations(clip.rotations)


def splice_hands(
    seq: MotionSequence,
    clip: HandClip,
    ambient: Optional[np.ndarray] = None,
    blend_frames: int = 4,
) -> MotionSequence:
    """Attach ``clip`` as the hand channel, easing in from and out to the ambient pose.

    The first ``b`` frames ramp from ``ambient`` to clip frame ``b`` and the last
    ``b`` ramp from clip frame ``F - 1 - b`` back to ``ambient``, with
    b = min(blend_frames, (F - 1) // 2). ``ambient`` defaults to the flat pose.
    """
    if clip.n_frames != seq.n_frames:
        raise LengthMismatch(f"hand clip has {clip.n_frames} frames, sequence has {seq.n_frames}")
    joints = clip.n_joints
    ambient = flat_hand_pose(joints) if ambient is None else np.asarray(ambient, dtype=np.float64)
    if ambient.shape != (joints, 4):
        raise LengthMismatch(f"ambient pose must be ({joints}, 4), got {ambient.shape}")

    hands = np.array(clip.rotations)
    frames = clip.n_frames
    b = max(0, min(blend_frames, (frames - 1) // 2))
    if b > 0:
        alpha = np.broadcast_to(((np.arange(b) + 1.0) / (b + 1.0))[:, None], (b, joints))
        hands[:b] = slerp_arrays(ambient[None], clip.rotations[b][None], alpha)
        hands[frames - b:] = slerp_arrays(clip.rotations[frames - 1 - b][None], ambient[None], alpha)
    return seq.with_channels(hands=hands)
