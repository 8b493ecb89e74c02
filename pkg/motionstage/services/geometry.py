"""Geometric kernels: 2D hulls, footprint membership and generalized winding numbers."""

import logging
from typing import Sequence, Tuple

import numpy as np
import trimesh

from ..errors import BadParams, EmptyInput, PointOnSurface
from ..models.geometry import Hull2D, ObstaclePattern, TriMesh

logger = logging.getLogger(__name__)

# Inclusive-boundary slack for hull and pattern membership (meters).
BOUNDARY_TOLERANCE = 1e-9
SURFACE_TOLERANCE = 1e-9
WINDING_THRESHOLD = 0.5
WINDING_CHUNK = 256


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points) -> Hull2D:
    """Monotone-chain hull, counter-clockwise from the lexicographically smallest vertex.

    Collinear boundary points are dropped. Inputs that collapse to a point or a
    segment give a degenerate hull of 1 or 2 vertices.
    """
    array = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(array) == 0:
        raise EmptyInput("convex hull of no points")
    if not np.all(np.isfinite(array)):
        raise BadParams("hull input contains NaN or Inf")

    unique = np.unique(array, axis=0)
    if len(unique) == 1:
        return Hull2D(vertices=unique, degenerate=True)

    pts = [tuple(p) for p in unique]
    lower = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)

    chain = lower[:-1] + upper[:-1]
    return Hull2D(vertices=np.array(chain), degenerate=len(chain) < 3)


def points_in_hull(hull: Hull2D, points) -> np.ndarray:
    """Inclusive containment for (n, 2) points. An empty hull contains nothing."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    verts = hull.vertices
    if len(verts) == 0:
        return np.zeros(len(pts), dtype=bool)
    if len(verts) == 1:
        return np.linalg.norm(pts - verts[0], axis=1) <= BOUNDARY_TOLERANCE
    if len(verts) == 2:
        a, b = verts
        ab = b - a
        t = np.clip((pts - a) @ ab / (ab @ ab), 0.0, 1.0)
        closest = a + t[:, None] * ab
        return np.linalg.norm(pts - closest, axis=1) <= BOUNDARY_TOLERANCE

    edges = np.roll(verts, -1, axis=0) - verts
    lengths = np.linalg.norm(edges, axis=1)
    rel = pts[:, None, :] - verts[None, :, :]
    cross = edges[None, :, 0] * rel[..., 1] - edges[None, :, 1] * rel[..., 0]
    return np.all(cross / lengths[None, :] >= -BOUNDARY_TOLERANCE, axis=1)


def point_in_hull(hull: Hull2D, point) -> bool:
    return bool(points_in_hull(hull, [point])[0])


def points_in_pattern(pattern: ObstaclePattern, points) -> np.ndarray:
    """Membership of (n, 2) points in a rotated rectangle or ellipse, boundary included."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    d = pts - pattern.center
    cos, sin = np.cos(pattern.yaw), np.sin(pattern.yaw)
    u = cos * d[:, 0] + sin * d[:, 1]
    v = -sin * d[:, 0] + cos * d[:, 1]
    a, b = pattern.half_extents
    if pattern.kind == "rectangle":
        return (np.abs(u) <= a + BOUNDARY_TOLERANCE) & (np.abs(v) <= b + BOUNDARY_TOLERANCE)
    return (u / a) ** 2 + (v / b) ** 2 <= 1.0 + BOUNDARY_TOLERANCE


def point_in_pattern(pattern: ObstaclePattern, point) -> bool:
    return bool(points_in_pattern(pattern, [point])[0])


def _check_on_surface(a: np.ndarray, b: np.ndarray, c: np.ndarray, triple: np.ndarray) -> None:
    normal = np.cross(b - a, c - a)
    norm = np.linalg.norm(normal, axis=-1)
    distance = np.abs(triple) / np.where(norm > 0, norm, 1.0)
    near = (distance <= SURFACE_TOLERANCE) & (norm > 0)
    if not np.any(near):
        return
    # the query sits at the origin of a, b, c; its projection lies inside when
    # it is on the same side of all three edges
    s0 = np.einsum("...i,...i->...", np.cross(a, b), normal)
    s1 = np.einsum("...i,...i->...", np.cross(b, c), normal)
    s2 = np.einsum("...i,...i->...", np.cross(c, a), normal)
    slack = -SURFACE_TOLERANCE * norm
    inside = (s0 >= slack) & (s1 >= slack) & (s2 >= slack)
    if np.any(near & inside):
        raise PointOnSurface("query point lies on a mesh triangle")


def winding_numbers(mesh: TriMesh, points, strict: bool = False) -> np.ndarray:
    """Generalized winding numbers of (n, 3) query points.

    Sums the signed solid angle of every triangle, computed with the two-argument
    arctangent form, divided by 4 pi. Outward-oriented closed meshes give about 1
    inside and 0 outside. With ``strict`` a query lying on a triangle raises
    ``PointOnSurface``.
    """
    if len(mesh.triangles) == 0:
        raise EmptyInput("winding number against a mesh without triangles")
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    tri = mesh.vertices[mesh.triangles]
    out = np.empty(len(pts))
    for start in range(0, len(pts), WINDING_CHUNK):
        chunk = pts[start:start + WINDING_CHUNK]
        a = tri[None, :, 0, :] - chunk[:, None, :]
        b = tri[None, :, 1, :] - chunk[:, None, :]
        c = tri[None, :, 2, :] - chunk[:, None, :]
        la = np.linalg.norm(a, axis=-1)
        lb = np.linalg.norm(b, axis=-1)
        lc = np.linalg.norm(c, axis=-1)
        triple = np.einsum("...i,...i->...", a, np.cross(b, c))
        if strict:
            _check_on_surface(a, b, c, triple)
        denom = (
            la * lb * lc
            + np.einsum("...i,...i->...", a, b) * lc
            + np.einsum("...i,...i->...", b, c) * la
            + np.einsum("...i,...i->...", c, a) * lb
        )
        out[start:start + WINDING_CHUNK] = 2.0 * np.arctan2(triple, denom).sum(axis=1) / (4.0 * np.pi)
    return out


def winding_number(mesh: TriMesh, point, strict: bool = False) -> float:
    return float(winding_numbers(mesh, [point], strict=strict)[0])


def mesh_intersection_count(
    mesh_a: TriMesh, mesh_b: TriMesh, threshold: float = WINDING_THRESHOLD
) -> Tuple[int, int]:
    """(A's vertices inside B, B's vertices inside A); inside means winding number > threshold."""
    if len(mesh_a.vertices) == 0 or len(mesh_b.vertices) == 0:
        raise EmptyInput("intersection count needs two non-empty meshes")
    a_in_b = int(np.count_nonzero(winding_numbers(mesh_b, mesh_a.vertices) > threshold))
    b_in_a = int(np.count_nonzero(winding_numbers(mesh_a, mesh_b.vertices) > threshold))
    return a_in_b, b_in_a


def marker_hull_mesh(markers: np.ndarray) -> TriMesh:
    """Outward-oriented convex hull mesh of one frame's marker cloud."""
    hull = trimesh.convex.convex_hull(np.asarray(markers, dtype=np.float64))
    return TriMesh.from_trimesh(hull)


def project_vertices(meshes: Sequence[TriMesh]) -> np.ndarray:
    """Ground-plane (x, y) projections of every vertex of every mesh."""
    if not meshes:
        return np.zeros((0, 2))
    return np.concatenate([m.vertices[:, :2] for m in meshes], axis=0)
