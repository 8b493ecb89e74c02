"""
Tests for Task 1: Motion data model, canonicalization, velocities and resampling.

Acceptance criteria:
- MarkerFrame/MotionSequence reject wrong marker counts, non-finite values and empty sequences
- Quaternions are normalized on construction
- canonicalize_initial moves A's frame-0 pelvis to the origin facing +Y and moves B rigidly with it
- canonicalize_improved stores pelvis-local markers with zero pelvis entries and keeps the tracks
- decode inverts both canonicalizations within 1e-6 m
- Canonicalization bias: B's dispersion under the initial form is at least twice the improved form
- velocities: forward differences times fps, last frame repeated, TooShort below 2 frames
- resample: endpoints exact, identity at equal length, BadLength below 2
- extract_markers indexes mesh vertices and rejects bad maps
"""

import numpy as np
import pytest
from pydantic import ValidationError

from motionstage.errors import BadLength, FpsMismatch, IndexOutOfRange, LengthMismatch, MarkerMismatch, TooShort
from motionstage.models import MarkerFrame, MotionSequence, Quaternion, TriMesh
from motionstage.services.motion import (
    canonicalize_improved,
    canonicalize_initial,
    concatenate,
    decode,
    extract_markers,
    facing_yaw,
    marker_dispersion,
    resample,
    velocities,
)

from .synthetic import body_markers, standing, walking, with_rotations


def _random_pair(rng, frames=12):
    start_a, start_b = rng.uniform(-3, 3, 2), rng.uniform(-3, 3, 2)
    seq_a = walking(start_a, start_a + rng.uniform(-1, 1, 2), frames)
    seq_b = walking(start_b, start_b + rng.uniform(-1, 1, 2), frames)
    return seq_a, seq_b


def _rigid(seq, yaw, offset):
    c, s = np.cos(yaw), np.sin(yaw)
    rotation = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return seq.with_channels(markers=seq.markers @ rotation.T + offset, pelvis=seq.pelvis @ rotation.T + offset)


def test_marker_frame_requires_67_markers():
    """A frame with 66 markers is rejected."""
    with pytest.raises(ValidationError):
        MarkerFrame(markers=np.zeros((66, 3)), pelvis=np.zeros(3))


def test_motion_sequence_rejects_nan_and_empty():
    """NaN coordinates and zero frames are invariant violations."""
    markers = np.zeros((2, 67, 3))
    markers[1, 5, 0] = np.nan
    with pytest.raises(ValidationError):
        MotionSequence(markers=markers, pelvis=np.zeros((2, 3)), fps=40)
    with pytest.raises(ValidationError):
        MotionSequence(markers=np.zeros((0, 67, 3)), pelvis=np.zeros((0, 3)), fps=40)


def test_motion_sequence_rejects_non_positive_fps():
    """fps must be positive."""
    with pytest.raises(ValidationError):
        MotionSequence(markers=np.zeros((1, 67, 3)), pelvis=np.zeros((1, 3)), fps=0)


def test_quaternion_is_normalized():
    """Construction normalizes to unit length."""
    q = Quaternion(w=2.0, x=0.0, y=0.0, z=0.0)
    assert abs(np.linalg.norm(q.as_array()) - 1.0) <= 1e-6
    assert q.w == pytest.approx(1.0)


def test_facing_yaw_of_body_facing_plus_y_is_zero():
    """The synthetic body at yaw 0 faces +Y."""
    assert facing_yaw(body_markers()) == pytest.approx(0.0, abs=1e-12)


def test_facing_yaw_undoes_body_yaw():
    """A body turned by 0.7 rad needs -0.7 rad to face +Y again."""
    assert facing_yaw(body_markers(yaw=0.7)) == pytest.approx(-0.7, abs=1e-9)


def test_canonicalize_initial_identity_when_at_origin_facing_y():
    """A already at the origin facing +Y leaves both characters unchanged."""
    seq_a = standing((0.0, 0.0), frames=3)
    seq_a = seq_a.with_channels(markers=seq_a.markers - seq_a.pelvis[0], pelvis=seq_a.pelvis - seq_a.pelvis[0])
    seq_b = standing((2.0, 1.0), frames=3)
    pair = canonicalize_initial(seq_a, seq_b)
    np.testing.assert_allclose(pair.seq_a.markers, seq_a.markers, atol=1e-12)
    np.testing.assert_allclose(pair.seq_b.markers, seq_b.markers, atol=1e-12)


def test_canonicalize_initial_translated_a_subtracts_pelvis_offset():
    """A standing at (3, -2) facing +Y: every output position equals input minus A's frame-0 pelvis."""
    seq_a, seq_b = standing((3.0, -2.0), frames=4), standing((0.0, 1.0), frames=4)
    pair = canonicalize_initial(seq_a, seq_b)
    offset = seq_a.pelvis[0]
    np.testing.assert_allclose(pair.seq_a.markers, seq_a.markers - offset, atol=1e-12)
    np.testing.assert_allclose(pair.seq_b.markers, seq_b.markers - offset, atol=1e-12)
    np.testing.assert_allclose(pair.seq_a.pelvis[0], np.zeros(3), atol=1e-12)


def test_canonicalize_initial_aligns_facing():
    """After canonicalization A's frame-0 facing is +Y."""
    seq_a = standing((1.0, 1.0), frames=2, yaw=1.1)
    pair = canonicalize_initial(seq_a, standing((4.0, 0.0), frames=2))
    assert facing_yaw(pair.seq_a.markers[0]) == pytest.approx(0.0, abs=1e-9)


def test_canonicalize_initial_is_rigid_invariant(rng):
    """Moving both characters by the same rigid transform does not change the canonical output."""
    seq_a, seq_b = _random_pair(rng)
    moved_a, moved_b = _rigid(seq_a, 0.9, np.array([4.0, -1.0, 0.0])), _rigid(seq_b, 0.9, np.array([4.0, -1.0, 0.0]))
    first, second = canonicalize_initial(seq_a, seq_b), canonicalize_initial(moved_a, moved_b)
    np.testing.assert_allclose(first.seq_a.markers, second.seq_a.markers, atol=1e-6)
    np.testing.assert_allclose(first.seq_b.markers, second.seq_b.markers, atol=1e-6)


def test_canonicalize_improved_definition():
    """A character standing with pelvis (5, 5, 0.95) stores markers minus that pelvis."""
    seq = standing((5.0, 5.0), frames=3)
    pair = canonicalize_improved(seq, standing((0.0, 0.0), frames=3))
    np.testing.assert_allclose(pair.seq_a.markers, seq.markers - seq.pelvis[:, None, :], atol=1e-12)
    np.testing.assert_allclose(pair.pelvis_track_a, seq.pelvis)
    assert np.all(pair.seq_a.pelvis == 0.0)
    assert np.all(pair.seq_b.pelvis == 0.0)


@pytest.mark.parametrize("canonicalize", [canonicalize_initial, canonicalize_improved])
def test_decode_round_trip(rng, canonicalize):
    """decode inverts both canonical forms within 1e-6 m."""
    for _ in range(10):
        seq_a, seq_b = _random_pair(rng)
        out_a, out_b = decode(canonicalize(seq_a, seq_b))
        np.testing.assert_allclose(out_a.markers, seq_a.markers, atol=1e-6)
        np.testing.assert_allclose(out_b.markers, seq_b.markers, atol=1e-6)
        np.testing.assert_allclose(out_b.pelvis, seq_b.pelvis, atol=1e-6)


def test_canonicalize_rejects_mismatched_pairs():
    """Different lengths raise LengthMismatch; different rates raise FpsMismatch."""
    with pytest.raises(LengthMismatch):
        canonicalize_improved(standing(frames=3), standing(frames=4))
    with pytest.raises(FpsMismatch):
        canonicalize_initial(standing(frames=3, fps=30), standing(frames=3, fps=40))


def test_canonicalization_bias(rng):
    """Over 50 walking pairs at least 2 m apart, B is at least twice as dispersed in the initial form."""
    initial, improved = [], []
    for _ in range(50):
        start_a = rng.uniform(-1, 1, 2)
        angle = rng.uniform(0, 2 * np.pi)
        start_b = start_a + rng.uniform(2.0, 6.0) * np.array([np.cos(angle), np.sin(angle)])
        seq_a = walking(start_a, start_a + rng.uniform(-0.5, 0.5, 2), 20)
        seq_b = walking(start_b, start_b + rng.uniform(-0.5, 0.5, 2), 20)
        initial.append(marker_dispersion(canonicalize_initial(seq_a, seq_b).seq_b))
        improved.append(marker_dispersion(canonicalize_improved(seq_a, seq_b).seq_b))
    assert np.mean(initial) >= 2.0 * np.mean(improved)
    assert all(i > m for i, m in zip(initial, improved))


def test_velocities_static_is_zero():
    """A still body has zero velocity everywhere."""
    assert np.all(velocities(standing(frames=5)) == 0.0)


def test_velocities_constant_motion():
    """+0.01 m in x per frame at 40 fps is 0.4 m/s, and the last frame repeats."""
    seq = walking((0.0, 0.0), (0.09, 0.0), 10)
    v = velocities(seq)
    assert v.shape == seq.markers.shape
    np.testing.assert_allclose(v[..., 0], 0.4, atol=1e-9)
    np.testing.assert_allclose(v[-1], v[-2])


def test_velocities_telescope_to_displacement(rng):
    """Summing v / fps over all but the last frame reconstructs the total displacement."""
    seq_a, _ = _random_pair(rng)
    v = velocities(seq_a)
    np.testing.assert_allclose(v[:-1].sum(axis=0) / seq_a.fps, seq_a.markers[-1] - seq_a.markers[0], atol=1e-6)


def test_velocities_too_short():
    with pytest.raises(TooShort):
        velocities(standing(frames=1))


def test_resample_identity_and_midpoint():
    """Equal length returns the input; 2 -> 3 frames puts the average in the middle."""
    seq = walking((0.0, 0.0), (1.0, 0.0), 2)
    assert resample(seq, 2) is seq
    up = resample(seq, 3)
    np.testing.assert_allclose(up.markers[1], (seq.markers[0] + seq.markers[1]) / 2.0)
    assert up.fps == seq.fps


def test_resample_endpoints_exact_and_linear_round_trip():
    """Endpoints are bit-identical; linear motion survives down- then up-sampling."""
    seq = walking((0.0, 0.0), (2.0, 1.0), 41)
    down = resample(seq, 11)
    assert np.array_equal(down.markers[0], seq.markers[0])
    assert np.array_equal(down.markers[-1], seq.markers[-1])
    back = resample(down, 41)
    np.testing.assert_allclose(back.markers, seq.markers, atol=1e-6)


def test_resample_slerps_rotation_channel():
    """Rotation channels are resampled on the sphere and stay unit length."""
    seq = with_rotations(walking((0.0, 0.0), (1.0, 0.0), 5))
    out = resample(seq, 9)
    np.testing.assert_allclose(np.linalg.norm(out.rotations, axis=-1), 1.0, atol=1e-9)
    np.testing.assert_allclose(out.rotations[2], seq.rotations[1], atol=1e-9)


def test_resample_bad_length():
    with pytest.raises(BadLength):
        resample(standing(frames=4), 1)


def test_extract_markers_identity_and_translation():
    """Identity map returns the vertex list; translating the mesh translates the markers."""
    vertices = np.arange(67 * 3, dtype=float).reshape(67, 3)
    mesh = TriMesh(vertices=vertices, triangles=[[0, 1, 2]])
    np.testing.assert_array_equal(extract_markers(mesh, range(67)), vertices)
    moved = mesh.translated((1.0, 2.0, 3.0))
    np.testing.assert_array_equal(extract_markers(moved, range(67)), vertices + (1.0, 2.0, 3.0))


def test_extract_markers_matches_direct_indexing(rng):
    vertices = rng.normal(size=(300, 3))
    mesh = TriMesh(vertices=vertices, triangles=[[0, 1, 2]])
    index_map = rng.integers(0, 300, 67)
    np.testing.assert_array_equal(extract_markers(mesh, index_map), vertices[index_map])


def test_extract_markers_errors():
    """Out-of-range indices and maps of the wrong size are rejected."""
    mesh = TriMesh(vertices=np.zeros((67, 3)), triangles=[[0, 1, 2]])
    with pytest.raises(IndexOutOfRange):
        extract_markers(mesh, [0] * 66 + [67])
    with pytest.raises(MarkerMismatch):
        extract_markers(mesh, range(60))


def test_concatenate_keeps_common_channels():
    """A rotation channel survives only when every part has it."""
    rotated = with_rotations(standing(frames=3))
    joined = concatenate([rotated, rotated])
    assert joined.n_frames == 6 and joined.rotations.shape == (6, 3, 4)
    assert concatenate([rotated, standing(frames=2)]).rotations is None
