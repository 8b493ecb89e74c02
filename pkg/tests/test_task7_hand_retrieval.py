"""
Tests for Task 7: Hand-pose retrieval, clip fitting and splicing.

Acceptance criteria:
- The index stores unique ids sorted, with unit-length embeddings
- retrieve returns the most cosine-similar entry, smallest id on ties, and is scale-invariant
- retrieve agrees with a brute-force scan and answers a 10k-entry index quickly
- fit_clip_length cuts a seeded window or slerp-upsamples to exactly the target length
- splice_hands eases in from and out to the ambient pose without larger steps than the clip itself
"""

import time

import numpy as np
import pytest
from pydantic import ValidationError

from motionstage.errors import BadLength, DimensionMismatch, EmptyIndex, InvalidQuery, LengthMismatch
from motionstage.models import EmbeddingIndex, HandClip
from motionstage.services.hands import (
    fit_clip_length,
    flat_hand_pose,
    mean_hand_pose,
    retrieve,
    retrieve_many,
    splice_hands,
)
from motionstage.services.quaternion import angle_between

from .synthetic import standing, z_rotations


def _index(vectors, ids=None):
    vectors = np.asarray(vectors, dtype=float)
    ids = ids or [f"clip_{i:04d}" for i in range(len(vectors))]
    return EmbeddingIndex(clip_ids=ids, lengths=[60] * len(ids), embeddings=vectors)


def test_index_normalizes_and_sorts():
    index = _index([[3.0, 4.0], [0.0, 2.0]], ids=["b", "a"])
    assert index.clip_ids == ("a", "b")
    np.testing.assert_allclose(np.linalg.norm(index.embeddings, axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(index.embeddings[1], [0.6, 0.8])


def test_index_rejects_duplicates_and_zero_vectors():
    with pytest.raises(ValidationError):
        _index([[1.0, 0.0], [0.0, 1.0]], ids=["a", "a"])
    with pytest.raises(ValidationError):
        _index([[0.0, 0.0]])


def test_retrieve_exact_entry(rng):
    vectors = rng.normal(size=(20, 8))
    index = _index(vectors)
    assert retrieve(index, vectors[7]) == "clip_0007"


def test_retrieve_single_aligned_entry():
    index = _index(np.eye(4))
    assert retrieve(index, [0.0, 0.0, 2.5, 0.0]) == "clip_0002"


def test_retrieve_ties_go_to_smallest_id():
    index = _index([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]], ids=["zeta", "alpha", "mid"])
    assert retrieve(index, [1.0, 0.0]) == "alpha"


def test_retrieve_matches_brute_force(rng):
    """Over 1000 random entries the pick has the largest cosine similarity."""
    vectors = rng.normal(size=(1000, 16))
    index = _index(vectors)
    for query in rng.normal(size=(25, 16)):
        picked = retrieve(index, query)
        sims = vectors @ query / (np.linalg.norm(vectors, axis=1) * np.linalg.norm(query))
        best = int(np.argmax(sims))
        assert sims[index.position(picked)] >= sims[best] - 1e-12


def test_retrieve_is_scale_invariant(rng):
    index = _index(rng.normal(size=(50, 6)))
    query = rng.normal(size=6)
    assert retrieve(index, query) == retrieve(index, 17.0 * query) == retrieve(index, 1e-3 * query)


def test_retrieve_many_matches_single_queries(rng):
    index = _index(rng.normal(size=(40, 5)))
    queries = rng.normal(size=(10, 5))
    assert retrieve_many(index, queries) == [retrieve(index, q) for q in queries]


def test_retrieve_errors():
    with pytest.raises(EmptyIndex):
        retrieve(EmbeddingIndex(clip_ids=[], lengths=[], embeddings=np.zeros((0, 4))), [1.0, 0.0, 0.0, 0.0])
    index = _index(np.eye(3))
    with pytest.raises(DimensionMismatch):
        retrieve(index, [1.0, 0.0])
    with pytest.raises(InvalidQuery):
        retrieve(index, [0.0, 0.0, 0.0])


def test_retrieve_large_index_is_fast(rng):
    index = _index(rng.normal(size=(10_000, 512)))
    started = time.perf_counter()
    retrieve(index, rng.normal(size=512))
    assert time.perf_counter() - started < 5.0


def _clip(frames, joints=2):
    angles = np.linspace(0.0, 90.0, frames)
    return HandClip(rotations=z_rotations(angles, joints=joints), fps=40)


def test_fit_equal_length_is_identity():
    clip = _clip(30)
    assert fit_clip_length(clip, 30, seed=1) is clip


def test_fit_cuts_seeded_window():
    clip = _clip(100)
    out = fit_clip_length(clip, 40, seed=9)
    start = int(np.random.default_rng(9).integers(0, 61))
    assert out.n_frames == 40
    np.testing.assert_array_equal(out.rotations, clip.rotations[start:start + 40])
    np.testing.assert_array_equal(fit_clip_length(clip, 40, seed=9).rotations, out.rotations)


def test_fit_upsamples_short_clip():
    clip = _clip(10)
    out = fit_clip_length(clip, 25, seed=0)
    assert out.n_frames == 25
    np.testing.assert_allclose(out.rotations[0], clip.rotations[0], atol=1e-12)
    np.testing.assert_allclose(out.rotations[-1], clip.rotations[-1], atol=1e-12)


def test_fit_output_length_always_matches(rng):
    for frames, target in [(5, 2), (2, 9), (60, 59), (7, 300)]:
        assert fit_clip_length(_clip(frames), target, seed=int(rng.integers(100))).n_frames == target


def test_fit_rejects_short_target():
    with pytest.raises(BadLength):
        fit_clip_length(_clip(10), 1, seed=0)


def test_splice_with_ambient_clip_is_constant():
    ambient = flat_hand_pose(2)
    clip = HandClip(rotations=np.repeat(ambient[None], 12, axis=0), fps=40)
    out = splice_hands(standing(frames=12), clip, ambient=ambient)
    np.testing.assert_allclose(out.hands, np.repeat(ambient[None], 12, axis=0), atol=1e-12)


def test_splice_without_blend_is_raw():
    clip = _clip(12)
    out = splice_hands(standing(frames=12), clip, blend_frames=0)
    np.testing.assert_allclose(out.hands, clip.rotations)
    np.testing.assert_array_equal(out.markers, standing(frames=12).markers)


def test_splice_blend_steps_stay_within_clip_steps():
    """A clip flickering between 40 and 52 degrees is eased in from and out to the flat pose."""
    angles = [40.0 if i % 2 == 0 else 52.0 for i in range(30)]
    clip = HandClip(rotations=z_rotations(angles), fps=40)
    out = splice_hands(standing(frames=30), clip, ambient=flat_hand_pose(2))
    steps = np.degrees(angle_between(out.hands[1:, 0], out.hands[:-1, 0]))
    interior = np.degrees(angle_between(clip.rotations[1:, 0], clip.rotations[:-1, 0])).max()
    assert steps.max() <= interior + 1e-6
    assert np.degrees(angle_between(out.hands[0, 0], flat_hand_pose(2)[0])) == pytest.approx(8.0, abs=1e-6)


def test_splice_length_checks():
    with pytest.raises(LengthMismatch):
        splice_hands(standing(frames=10), _clip(12))
    with pytest.raises(LengthMismatch):
        splice_hands(standing(frames=12), _clip(12), ambient=flat_hand_pose(5))


def test_mean_hand_pose_of_symmetric_clip():
    clip = HandClip(rotations=z_rotations([-20.0, 20.0]), fps=40)
    np.testing.assert_allclose(np.abs(mean_hand_pose(clip)), flat_hand_pose(2), atol=1e-9)
