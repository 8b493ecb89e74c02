"""Collision revision by local retiming of two simultaneously playing characters."""

import logging
from typing import Callable, List, Literal, Optional, Sequence, Tuple

import numpy as np

from ..errors import DegenerateInterval, IndexOutOfRange, LengthMismatch
from ..models.geometry import TriMesh
from ..models.motion import MotionSequence
from ..models.revision import CollisionInterval, RevisionConfig, RevisionReport, RevisionStep
from .geometry import marker_hull_mesh, mesh_intersection_count
from .motion import concatenate, resample

logger = logging.getLogger(__name__)

MeshBuilder = Callable[[np.ndarray], TriMesh]


def _disjoint(mesh_a: TriMesh, mesh_b: TriMesh) -> bool:
    lo_a, hi_a = mesh_a.vertices.min(axis=0), mesh_a.vertices.max(axis=0)
    lo_b, hi_b = mesh_b.vertices.min(axis=0), mesh_b.vertices.max(axis=0)
    return bool(np.any(hi_a < lo_b) or np.any(hi_b < lo_a))


def collision_fractions(
    meshes_a: Sequence[TriMesh], meshes_b: Sequence[TriMesh], cfg: RevisionConfig
) -> np.ndarray:
    """Per-frame fraction of intersecting vertices; frames with disjoint bounding boxes score 0."""
    if len(meshes_a) != len(meshes_b):
        raise LengthMismatch(f"mesh sequences have {len(meshes_a)} and {len(meshes_b)} frames")
    out = np.zeros(len(meshes_a))
    for i, (mesh_a, mesh_b) in enumerate(zip(meshes_a, meshes_b)):
        if _disjoint(mesh_a, mesh_b):
            continue
        a_in_b, b_in_a = mesh_intersection_count(mesh_a, mesh_b, cfg.winding_threshold)
        out[i] = (a_in_b + b_in_a) / (len(mesh_a.vertices) + len(mesh_b.vertices))
    return out


def intervals_from_flags(flags: Sequence[bool]) -> List[CollisionInterval]:
    """Maximal runs of True, ascending."""
    intervals, start = [], None
    for i, flag in enumerate(flags):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            intervals.append(CollisionInterval(start=start, end=i - 1))
            start = None
    if start is not None:
        intervals.append(CollisionInterval(start=start, end=len(flags) - 1))
    return intervals


def detect_collision_intervals(
    meshes_a: Sequence[TriMesh], meshes_b: Sequence[TriMesh], cfg: RevisionConfig
) -> List[CollisionInterval]:
    """Runs of frames whose intersecting-vertex fraction exceeds ``cfg.hhp_threshold``."""
    return intervals_from_flags(collision_fractions(meshes_a, meshes_b, cfg) > cfg.hhp_threshold)


def retime_around(
    seq: MotionSequence, interval: CollisionInterval, role: Literal["lead", "yield"]
) -> MotionSequence:
    """Speed up (lead) or slow down (yield) the motion before the interval midpoint.

    With m = floor((start + end) / 2) and h = floor((end - start) / 2), the lead
    role resamples [0, m) to m - h frames and [m, L) to L - m + h frames; the
    yield role does the mirror image. Total length stays L.
    """
    length = seq.n_frames
    if interval.end >= length:
        raise IndexOutOfRange(f"interval [{interval.start}, {interval.end}] outside {length} frames")
    m = (interval.start + interval.end) // 2
    h = (interval.end - interval.start) // 2
    if m - h < 2 or length - m - h < 2:
        raise DegenerateInterval(
            f"retiming [{interval.start}, {interval.end}] of {length} frames leaves a part under 2 frames"
        )
    if h == 0:
        return seq
    shift = -h if role == "lead" else h
    head = resample(seq.slice(0, m), m + shift)
    tail = resample(seq.slice(m, length), length - m - shift)
    return concatenate([head, tail])


def _dilate(interval: CollisionInterval, margin: int, length: int) -> CollisionInterval:
    if margin == 0:
        return interval
    return CollisionInterval(start=max(0, interval.start - margin), end=min(length - 1, interval.end + margin))


def revise(
    seq_a: MotionSequence,
    seq_b: MotionSequence,
    mesh_builder: Optional[MeshBuilder] = None,
    cfg: Optional[RevisionConfig] = None,
) -> Tuple[MotionSequence, MotionSequence, RevisionReport]:
    """Retime A (lead) and B (yield) around collision intervals until clean or out of tries.

    A retiming is kept only when the collided-frame count strictly drops; then
    detection restarts from the first interval. Otherwise the next interval is
    tried. At most ``cfg.max_iterations`` retimings are evaluated.
    """
    if seq_a.n_frames != seq_b.n_frames:
        raise LengthMismatch(f"characters have {seq_a.n_frames} and {seq_b.n_frames} frames")
    cfg = cfg or RevisionConfig()
    builder = mesh_builder or marker_hull_mesh

    def flags(a: MotionSequence, b: MotionSequence) -> np.ndarray:
        meshes_a = [builder(a.markers[i]) for i in range(a.n_frames)]
        meshes_b = [builder(b.markers[i]) for i in range(b.n_frames)]
        return collision_fractions(meshes_a, meshes_b, cfg) > cfg.hhp_threshold

    current = flags(seq_a, seq_b)
    before = int(current.sum())
    intervals = intervals_from_flags(current)
    steps: List[RevisionStep] = []
    position = 0

    while intervals and position < len(intervals) and len(steps) < cfg.max_iterations:
        interval = _dilate(intervals[position], cfg.interval_margin, seq_a.n_frames)
        count = int(current.sum())
        try:
            cand_a = retime_around(seq_a, interval, "lead")
            cand_b = retime_around(seq_b, interval, "yield")
        except DegenerateInterval as exc:
            logger.info("revision: skipping interval %d-%d: %s", interval.start, interval.end, exc.detail)
            steps.append(RevisionStep(iteration=len(steps) + 1, interval=interval,
                                      collided_before=count, collided_after=count, accepted=False))
            position += 1
            continue

        candidate = flags(cand_a, cand_b)
        after = int(candidate.sum())
        accepted = after < count
        steps.append(RevisionStep(iteration=len(steps) + 1, interval=interval,
                                  collided_before=count, collided_after=after, accepted=accepted))
        logger.info(
            "revision step %d: interval %d-%d collided %d -> %d (%s)",
            len(steps), interval.start, interval.end, count, after, "kept" if accepted else "reverted",
        )
        if accepted:
            seq_a, seq_b, current = cand_a, cand_b, candidate
            intervals = intervals_from_flags(current)
            position = 0
        else:
            position += 1

    report = RevisionReport(
        iterations=len(steps),
        collided_before=before,
        collided_after=int(current.sum()),
        steps=steps,
        residual=intervals_from_flags(current),
    )
    if report.residual:
        logger.warning("revision left %d collided frames in %d intervals", report.collided_after, len(report.residual))
    return seq_a, seq_b, report
