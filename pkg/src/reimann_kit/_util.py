"""Shared numeric helpers: direction sets, closed-form operator norms,
canonical JSON hashing, and worker-count resolution."""

from __future__ import annotations

import hashlib
import json
import math
import os

import numpy as np

THREADS_ENV = "REIMANN_KIT_THREADS"


def worker_count(requested: int | None = None) -> int:
    """Number of workers: min(requested, REIMANN_KIT_THREADS, cpu count)."""
    cap = os.environ.get(THREADS_ENV)
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap is not None:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, n)


def canonical_json(obj) -> str:
    """Deterministic JSON encoding (sorted keys, fixed separators).

    Floats go through repr via json's default float handling, which is
    shortest-roundtrip and stable across runs.
    """
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def stable_hash(obj) -> str:
    """Short stable hash of a JSON-serializable object."""
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# direction sets
# ---------------------------------------------------------------------------

def circle_directions(count: int) -> np.ndarray:
    """`count` unit vectors at uniformly spaced angles 2*pi*j/count.

    Prefixes nest under doubling of `count` (angle set for count divides the
    set for 2*count), which keeps probe refinement monotone.
    """
    if count < 1:
        raise ValueError("count must be positive")
    ang = 2.0 * np.pi * np.arange(count) / count
    return np.stack([np.cos(ang), np.sin(ang)], axis=1)


def sphere_directions(count: int) -> np.ndarray:
    """Roughly `count` unit vectors on S^2 from a latitude/longitude lattice.

    Uses m latitude values cos(theta) = -1 + 2i/m (poles included) with 2m
    longitudes each, m chosen so the total is close to `count`.  The lattice
    for m is a subset of the lattice for 2m, so refinement by quadrupling the
    count only adds points.  Canonical axes are appended.
    """
    if count < 6:
        count = 6
    m = max(2, int(round(math.sqrt(count / 2.0))))
    zs = -1.0 + 2.0 * np.arange(m + 1) / m
    pts = []
    for z in zs:
        s = math.sqrt(max(0.0, 1.0 - z * z))
        if s < 1e-15:
            pts.append((0.0, 0.0, 1.0 if z > 0 else -1.0))
            continue
        nphi = 2 * m
        ang = 2.0 * np.pi * np.arange(nphi) / nphi
        for a in ang:
            pts.append((s * math.cos(a), s * math.sin(a), z))
    axes = [(1.0, 0.0, 0.0), (-1.0, 0.0, 0.0), (0.0, 1.0, 0.0),
            (0.0, -1.0, 0.0), (0.0, 0.0, 1.0), (0.0, 0.0, -1.0)]
    return np.array(pts + axes)


def unit_directions(dim: int, count: int) -> np.ndarray:
    """Deterministic unit direction set for the given dimension."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        return circle_directions(count)
    if dim == 3:
        return sphere_directions(count)
    raise ValueError(f"unsupported dimension {dim}")


# ---------------------------------------------------------------------------
# closed-form operator norms (largest singular value)
# ---------------------------------------------------------------------------

def opnorm_2x2(m: np.ndarray) -> float:
    """Largest singular value of a 2x2 matrix, closed form."""
    a, b, c, d = float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1])
    f = a * a + b * b + c * c + d * d
    det = a * d - b * c
    disc = max(f * f - 4.0 * det * det, 0.0)
    return math.sqrt(max(0.5 * (f + math.sqrt(disc)), 0.0))


def _symmetric_eigmax_3x3(s: np.ndarray) -> float:
    """Largest eigenvalue of a symmetric 3x3 matrix by the trigonometric
    solution of the characteristic cubic (deterministic, no iteration)."""
    p1 = s[0, 1] ** 2 + s[0, 2] ** 2 + s[1, 2] ** 2
    q = float(np.trace(s)) / 3.0
    if p1 == 0.0:
        return float(max(s[0, 0], s[1, 1], s[2, 2]))
    p2 = (s[0, 0] - q) ** 2 + (s[1, 1] - q) ** 2 + (s[2, 2] - q) ** 2 + 2.0 * p1
    p = math.sqrt(p2 / 6.0)
    b = (s - q * np.eye(3)) / p
    r = float(np.linalg.det(b)) / 2.0
    r = min(1.0, max(-1.0, r))
    phi = math.acos(r) / 3.0
    return q + 2.0 * p * math.cos(phi)


def opnorm_3x3(m: np.ndarray) -> float:
    """Largest singular value of a 3x3 matrix, closed form via M^T M."""
    s = m.T @ m
    return math.sqrt(max(_symmetric_eigmax_3x3(s), 0.0))


def opnorm(m: np.ndarray) -> float:
    """Operator (spectral) norm; closed form for 1x1/2x2/3x3, SVD otherwise."""
    m = np.asarray(m, dtype=float)
    if m.shape == (1, 1):
        return abs(float(m[0, 0]))
    if m.shape == (2, 2):
        return opnorm_2x2(m)
    if m.shape == (3, 3):
        return opnorm_3x3(m)
    return float(np.linalg.norm(m, 2))


def top_singular_pair(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Leading singular triple (u, v, sigma) with deterministic sign.

    Returns unit vectors with <m v, u> = sigma >= 0.
    """
    u, s, vt = np.linalg.svd(np.asarray(m, dtype=float))
    uvec, vvec, sigma = u[:, 0], vt[0], float(s[0])
    k = int(np.argmax(np.abs(vvec)))
    if vvec[k] < 0:
        vvec = -vvec
        uvec = -uvec
    return uvec, vvec, sigma
