"""Physical-compliance metrics: foot skate, foot penetration, scene and human penetration."""

import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import LengthMismatch, TooShort
from ..models.geometry import TriMesh
from ..models.metrics import ContactParams, MetricsReport
from ..models.motion import MarkerFrame, MotionSequence
from ..models.scene import SdfGrid
from .geometry import WINDING_THRESHOLD, marker_hull_mesh, mesh_intersection_count
from .motion import velocities
from .scene import sample_sdf_many

logger = logging.getLogger(__name__)

MeshBuilder = Callable[[np.ndarray], TriMesh]


def _foot_heights(seq: MotionSequence, cp: ContactParams) -> np.ndarray:
    return seq.markers[:, list(cp.foot_marker_ids), 2] - cp.ground_z


def _foot_speeds(seq: MotionSequence, cp: ContactParams) -> Tuple[np.ndarray, np.ndarray]:
    """(N, F) horizontal foot-marker speeds and the matching contact mask."""
    if seq.n_frames < 2:
        raise TooShort(f"foot skate needs at least 2 frames, got {seq.n_frames}")
    speed = np.linalg.norm(velocities(seq)[:, list(cp.foot_marker_ids), :2], axis=-1)
    return speed, _foot_heights(seq, cp) <= cp.height_eps


def foot_skate_per_frame(seq: MotionSequence, cp: ContactParams) -> np.ndarray:
    """Mean horizontal speed of the in-contact foot markers in each frame (0 without contact)."""
    speed, contact = _foot_speeds(seq, cp)
    counts = contact.sum(axis=1)
    sums = np.where(contact, speed, 0.0).sum(axis=1)
    return np.divide(sums, counts, out=np.zeros(seq.n_frames), where=counts > 0)


def foot_skate(seq: MotionSequence, cp: ContactParams) -> float:
    """Mean horizontal foot-marker speed (m/s) over in-contact samples; 0 when nothing touches."""
    speed, contact = _foot_speeds(seq, cp)
    return float(speed[contact].mean()) if np.any(contact) else 0.0


def foot_penetration_per_frame(seq: MotionSequence, cp: ContactParams) -> np.ndarray:
    return np.maximum(0.0, -_foot_heights(seq, cp)).mean(axis=1)


def foot_penetration(seq: MotionSequence, cp: ContactParams) -> float:
    """Mean depth (m) of foot markers below the ground over frames and foot markers."""
    return float(np.maximum(0.0, -_foot_heights(seq, cp)).mean())


def scene_penetration_samples(seq: MotionSequence, grid: SdfGrid) -> np.ndarray:
    """(N, 67) SDF samples of every marker, clamped to the grid box."""
    flat = sample_sdf_many(grid, seq.markers.reshape(-1, 3), mode="clamp")
    return flat.reshape(seq.n_frames, -1)


def human_scene_penetration(seq: MotionSequence, grid: SdfGrid) -> float:
    """Per-frame average of the summed penalty ``max(0, -sdf)`` over all markers."""
    samples = scene_penetration_samples(seq, grid)
    return float(np.maximum(0.0, -samples).sum() / seq.n_frames)


def human_human_perturbation_per_frame(
    meshes_a: Sequence[TriMesh], meshes_b: Sequence[TriMesh], threshold: float = WINDING_THRESHOLD
) -> List[float]:
    """Fraction of intersecting vertices, (A in B + B in A) / (|V_A| + |V_B|), per frame."""
    if len(meshes_a) != len(meshes_b):
        raise LengthMismatch(f"mesh sequences have {len(meshes_a)} and {len(meshes_b)} frames")
    fractions = []
    for mesh_a, mesh_b in zip(meshes_a, meshes_b):
        a_in_b, b_in_a = mesh_intersection_count(mesh_a, mesh_b, threshold)
        fractions.append((a_in_b + b_in_a) / (len(mesh_a.vertices) + len(mesh_b.vertices)))
    return fractions


def human_human_perturbation(
    meshes_a: Sequence[TriMesh], meshes_b: Sequence[TriMesh], threshold: float = WINDING_THRESHOLD
) -> float:
    fractions = human_human_perturbation_per_frame(meshes_a, meshes_b, threshold)
    return float(np.mean(fractions)) if fractions else 0.0


def _markers(value) -> np.ndarray:
    return value.markers if isinstance(value, MarkerFrame) else np.asarray(value, dtype=np.float64)


def scene_reg(pred, ref) -> float:
    """Sum over marker pairs of |L1 distance in ``pred`` - L1 distance in ``ref``|."""
    pred_d = cdist(_markers(pred), _markers(pred), metric="cityblock")
    ref_d = cdist(_markers(ref), _markers(ref), metric="cityblock")
    return float(np.abs(pred_d - ref_d).sum())


def human_reg(markers, extracted) -> float:
    """Sum of Euclidean distances between corresponding markers."""
    return float(np.linalg.norm(_markers(markers) - _markers(extracted), axis=-1).sum())


def marker_meshes(seq: MotionSequence, builder: Optional[MeshBuilder] = None) -> List[TriMesh]:
    builder = builder or marker_hull_mesh
    return [builder(seq.markers[i]) for i in range(seq.n_frames)]


def _combine(a: Sequence[float], b: Optional[Sequence[float]]) -> List[float]:
    if b is None:
        return [float(v) for v in a]
    return [float(x + y) / 2.0 for x, y in zip(a, b)]


def evaluate(
    seq_a: MotionSequence,
    cp: ContactParams,
    seq_b: Optional[MotionSequence] = None,
    grid: Optional[SdfGrid] = None,
    meshes: Optional[Tuple[Sequence[TriMesh], Sequence[TriMesh]]] = None,
    threshold: float = WINDING_THRESHOLD,
) -> MetricsReport:
    """Full report for one character or a pair.

    FS and FP average the characters. HSP sums both characters' per-frame
    penalties. HHP uses ``meshes`` when given, else the marker hulls.
    """
    if seq_b is not None and seq_b.n_frames != seq_a.n_frames:
        raise LengthMismatch(f"characters have {seq_a.n_frames} and {seq_b.n_frames} frames")
    seqs = [seq_a] if seq_b is None else [seq_a, seq_b]

    fs_frames = [foot_skate_per_frame(s, cp) for s in seqs]
    fp_frames = [foot_penetration_per_frame(s, cp) for s in seqs]
    record = {
        "fs": float(np.mean([foot_skate(s, cp) for s in seqs])),
        "fp": float(np.mean([foot_penetration(s, cp) for s in seqs])),
        "per_frame": {
            "fs": _combine(fs_frames[0], fs_frames[1] if seq_b is not None else None),
            "fp": _combine(fp_frames[0], fp_frames[1] if seq_b is not None else None),
        },
    }

    if grid is not None:
        samples = [scene_penetration_samples(s, grid) for s in seqs]
        penalties = [np.maximum(0.0, -x).sum(axis=1) for x in samples]
        per_char = [float(p.sum() / seq_a.n_frames) for p in penalties]
        record["hsp_a"] = per_char[0]
        if seq_b is not None:
            record["hsp_b"] = per_char[1]
        record["hsp"] = float(sum(per_char))
        record["hsp_count"] = int(sum(np.count_nonzero(x < 0.0) for x in samples))
        record["per_frame"]["hsp"] = [float(v) for v in np.sum(penalties, axis=0)]

    if seq_b is not None:
        meshes_a, meshes_b = meshes if meshes is not None else (marker_meshes(seq_a), marker_meshes(seq_b))
        hhp_frames = human_human_perturbation_per_frame(meshes_a, meshes_b, threshold)
        record["hhp"] = float(np.mean(hhp_frames))
        record["per_frame"]["hhp"] = hhp_frames

    report = MetricsReport(**record)
    logger.info(
        "metrics: fs=%.4g fp=%.4g hsp=%s hhp=%s", report.fs, report.fp, report.hsp, report.hhp
    )
    return report
