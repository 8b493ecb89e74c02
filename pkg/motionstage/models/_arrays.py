"""Array coercion shared by the pydantic models."""

from typing import Optional, Sequence

import numpy as np


def frozen_array(
    value,
    shape: Sequence[Optional[int]],
    name: str,
    dtype=np.float64,
    finite: bool = True,
) -> np.ndarray:
    """Return ``value`` as a read-only array, checking shape and finiteness.

    ``None`` entries in ``shape`` accept any extent on that axis.
    """
    array = np.array(value, dtype=dtype, copy=True)
    if array.ndim != len(shape):
        raise ValueError(f"{name} must have {len(shape)} dimensions, got shape {array.shape}")
    for axis, (got, want) in enumerate(zip(array.shape, shape)):
        if want is not None and got != want:
            raise ValueError(f"{name} axis {axis} must have extent {want}, got {got}")
    if finite and np.issubdtype(array.dtype, np.floating) and not np.all(np.isfinite(array)):
        raise ValueError(f"{name} contains NaN or Inf")
    array.setflags(write=False)
    return array


def unit_quaternions(value, name: str) -> np.ndarray:
    """Return a read-only (..., 4) array of w-first unit quaternions."""
    array = np.array(value, dtype=np.float64, copy=True)
    if array.ndim < 1 or array.shape[-1] != 4:
        raise ValueError(f"{name} must end in a quaternion axis of extent 4, got {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{name} contains NaN or Inf")
    norms = np.linalg.norm(array, axis=-1, keepdims=True)
    if np.any(norms < 1e-12):
        raise ValueError(f"{name} contains a zero quaternion")
    array = array / norms
    array.setflags(write=False)
    return array
