"""Flat space-time primitives.

Points of (d+1)-dimensional Minkowski space are stored as arrays
``(t, x_1, ..., x_d)`` with signature (+, -, ..., -) and c = 1. Most of the
package works with d = 1; the Slater/Maxwell demonstration uses d = 3.
"""
from __future__ import annotations

import numpy as np


def minkowski_metric(d: int) -> np.ndarray:
    """eta = diag(+1, -1, ..., -1) for d spatial dimensions."""
    eta = -np.eye(d + 1)
    eta[0, 0] = 1.0
    return eta


def interval2(p, q) -> np.ndarray:
    """Minkowski square s^2(p, q) = (dt)^2 - |dx|^2.

    Accepts single points or arrays of points in the last axis.
    """
    diff = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    return diff[..., 0] ** 2 - np.sum(diff[..., 1:] ** 2, axis=-1)


def proper_time(p, q):
    """Proper time between causally related events (sqrt of interval2).

    Returns nan where the separation is spacelike.
    """
    s2 = interval2(p, q)
    return np.sqrt(np.where(s2 >= 0.0, s2, np.nan))


def boost_matrix(v: float) -> np.ndarray:
    """1+1-dimensional boost with velocity v, acting on (t, x)."""
    if abs(v) >= 1.0:
        raise ValueError("boost velocity must satisfy |v| < 1")
    g = 1.0 / np.sqrt(1.0 - v * v)
    return np.array([[g, -g * v], [-g * v, g]])


def apply_boost(v: float, points) -> np.ndarray:
    """Boost an array of (t, x) points by velocity v."""
    pts = np.asarray(points, dtype=float)
    return pts @ boost_matrix(v).T


def lower_index(vec) -> np.ndarray:
    """Flip the sign of the spatial components (eta contraction)."""
    vec = np.asarray(vec, dtype=float)
    out = -vec.copy()
    out[..., 0] = vec[..., 0]
    return out


raise_index = lower_index
