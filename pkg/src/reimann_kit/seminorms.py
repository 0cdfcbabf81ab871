"""Difference-quotient functionals for the conjugate-pairing (qbar),
rotation-pairing (r), plain-pairing (r0), Zygmund and Lipschitz classes,
plus sampled-supremum estimation over deterministic probe sets.

Every estimate is the exact maximum of the corresponding quotient over the
probe set, hence a certified lower bound for the true supremum; probe sets
refine monotonically (larger configs contain smaller ones).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._util import stable_hash, top_singular_pair, unit_directions
from .fields import VectorField, as_complex, from_complex

__all__ = [
    "KINDS",
    "ProbeConfig",
    "SeminormEstimate",
    "qbar_quotient",
    "r_quotient",
    "r0_quotient",
    "zygmund_quotient",
    "lipschitz_quotient",
    "growth_quotient",
    "estimate_seminorm",
    "log_extended_check",
    "random_base_points",
]

KINDS = ("qbar", "r", "r0", "zygmund", "lipschitz", "growth")

EQUAL_NORM_RTOL = 1e-12


@dataclass(frozen=True)
class ProbeConfig:
    """Deterministic sampling schedule for seminorm estimation.

    scales must be strictly positive and strictly decreasing (a dyadic
    ladder r0 * 2^-j by default).  pair_mode 'equal_norm' enforces |h| = |k|
    as the class definitions require; 'free' is only for the log-extended
    consistency check.
    """

    base_points: tuple
    directions: int = 64
    scales: tuple = (1.0, 0.5, 0.25, 0.125, 0.0625)
    theta_samples: int = 64
    seed: int = 0
    pair_mode: str = "equal_norm"

    def __post_init__(self):
        pts = tuple(tuple(float(c) for c in p) for p in self.base_points)
        object.__setattr__(self, "base_points", pts)
        scl = tuple(float(s) for s in self.scales)
        if not scl or any(s <= 0 for s in scl):
            raise ValueError("scales must be strictly positive")
        if any(a <= b for a, b in zip(scl, scl[1:])):
            raise ValueError("scales must be strictly decreasing")
        object.__setattr__(self, "scales", scl)
        if self.pair_mode not in ("equal_norm", "free"):
            raise ValueError("pair_mode must be 'equal_norm' or 'free'")
        if self.directions < 1:
            raise ValueError("directions must be positive")

    @staticmethod
    def dyadic(base_points, r0: float = 1.0, levels: int = 5, directions: int = 64,
               theta_samples: int = 64, seed: int = 0,
               pair_mode: str = "equal_norm") -> "ProbeConfig":
        scales = tuple(r0 * 2.0 ** (-j) for j in range(levels + 1))
        return ProbeConfig(base_points=tuple(base_points), directions=directions,
                           scales=scales, theta_samples=theta_samples,
                           seed=seed, pair_mode=pair_mode)

    def payload(self) -> dict:
        return {
            "base_points": [list(p) for p in self.base_points],
            "directions": self.directions,
            "scales": list(self.scales),
            "theta_samples": self.theta_samples,
            "seed": self.seed,
            "pair_mode": self.pair_mode,
        }

    def probe_hash(self) -> str:
        return stable_hash(self.payload())


@dataclass(frozen=True)
class SeminormEstimate:
    """Sampled supremum of a quotient: a certified lower bound with the
    witness probe that attained it."""

    kind: str
    value: float
    witness: dict
    samples: int
    probe_hash: str
    is_lower_bound: bool = True


def random_base_points(dim: int, count: int, radius: float = 2.0,
                       seed: int = 0, avoid_origin: float = 0.0) -> tuple:
    """Seeded base points in the ball of the given radius."""
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < count:
        p = rng.uniform(-radius, radius, size=dim)
        r = float(np.linalg.norm(p))
        if r <= radius and r >= avoid_origin:
            pts.append(tuple(p))
    return tuple(pts)


# ---------------------------------------------------------------------------
# pointwise quotients
# ---------------------------------------------------------------------------

def _offset(dim: int, h) -> np.ndarray:
    if isinstance(h, complex):
        if dim != 2:
            raise ValueError("complex offsets only make sense in dimension 2")
        return np.array([h.real, h.imag])
    arr = np.atleast_1d(np.asarray(h, dtype=float))
    if arr.shape != (dim,):
        raise ValueError(f"offset must have shape ({dim},)")
    return arr


def _check_equal_norm(h: np.ndarray, k: np.ndarray) -> tuple[float, float]:
    nh, nk = float(np.linalg.norm(h)), float(np.linalg.norm(k))
    if nh == 0.0 or nk == 0.0:
        raise ValueError("offsets must be nonzero")
    if abs(nh - nk) > EQUAL_NORM_RTOL * max(nh, nk):
        raise ValueError(f"|h| = {nh!r} and |k| = {nk!r} differ beyond tolerance")
    return nh, nk


def qbar_quotient(v: VectorField, x, h, k) -> float:
    """|<v(x+h)-v(x), conj(h)>/|h|^2 - <v(x+k)-v(x), conj(k)>/|k|^2| with the
    planar pairing <z, w> = Re(z conj(w)); requires |h| = |k| != 0."""
    if v.dim != 2:
        raise ValueError("qbar quotient requires dimension 2")
    x = np.asarray(_offset(2, x), dtype=float)
    h, k = _offset(2, h), _offset(2, k)
    _check_equal_norm(h, k)
    zx = as_complex(x)
    zh, zk = as_complex(h), as_complex(k)
    vx = as_complex(v(x))
    dh = as_complex(v(from_complex(zx + zh))) - vx
    dk = as_complex(v(from_complex(zx + zk))) - vx
    # <d, conj(h)> = Re(d * h)
    return abs(float((dh * zh).real / abs(zh) ** 2 - (dk * zk).real / abs(zk) ** 2))


def r_quotient(v: VectorField, x, h, k, theta: float) -> float:
    """|<v(x+h)-v(x), e^{i theta} k> - <v(x+k)-v(x), e^{i theta} h>|/(|h||k|),
    dimension 2, |h| = |k| != 0."""
    if v.dim != 2:
        raise ValueError("r quotient requires dimension 2")
    h, k = _offset(2, h), _offset(2, k)
    nh, nk = _check_equal_norm(h, k)
    x = np.asarray(_offset(2, x), dtype=float)
    zx = as_complex(x)
    zh, zk = as_complex(h), as_complex(k)
    vx = as_complex(v(x))
    dh = as_complex(v(from_complex(zx + zh))) - vx
    dk = as_complex(v(from_complex(zx + zk))) - vx
    w = dh * np.conj(zk) - dk * np.conj(zh)
    return abs(float((w * np.exp(-1j * theta)).real)) / (nh * nk)


def r0_quotient(v: VectorField, x, h, k, enforce_equal_norm: bool = True) -> float:
    """|<v(x+h)-v(x), k> - <v(x+k)-v(x), h>|/(|h||k|), any dimension >= 1."""
    h, k = _offset(v.dim, h), _offset(v.dim, k)
    if enforce_equal_norm:
        nh, nk = _check_equal_norm(h, k)
    else:
        nh, nk = float(np.linalg.norm(h)), float(np.linalg.norm(k))
        if nh == 0.0 or nk == 0.0:
            raise ValueError("offsets must be nonzero")
    x = np.asarray(_offset(v.dim, x), dtype=float)
    vx = v(x)
    dh = v(x + h) - vx
    dk = v(x + k) - vx
    return abs(float(np.dot(dh, k) - np.dot(dk, h))) / (nh * nk)


def zygmund_quotient(v: VectorField, x, h) -> float:
    """|v(x+h) + v(x-h) - 2 v(x)| / |h|."""
    h = _offset(v.dim, h)
    nh = float(np.linalg.norm(h))
    if nh == 0.0:
        raise ValueError("offset must be nonzero")
    x = np.asarray(_offset(v.dim, x), dtype=float)
    second = v(x + h) + v(x - h) - 2.0 * v(x)
    return float(np.linalg.norm(second)) / nh


def lipschitz_quotient(v: VectorField, x, h) -> float:
    """|v(x+h) - v(x)| / |h|."""
    h = _offset(v.dim, h)
    nh = float(np.linalg.norm(h))
    if nh == 0.0:
        raise ValueError("offset must be nonzero")
    x = np.asarray(_offset(v.dim, x), dtype=float)
    return float(np.linalg.norm(v(x + h) - v(x))) / nh


def growth_quotient(v: VectorField, x) -> float:
    """|v(x)| / (|x| log(e + |x|)); at the origin this is 0 for fields
    vanishing there and |v(0)| otherwise (callers filter |x| >= 1e-9)."""
    x = np.asarray(_offset(v.dim, x), dtype=float)
    r = float(np.linalg.norm(x))
    mag = float(np.linalg.norm(v(x)))
    if r == 0.0:
        return 0.0 if mag == 0.0 else mag
    return mag / (r * math.log(math.e + r))


# ---------------------------------------------------------------------------
# sampled-supremum estimation
# ---------------------------------------------------------------------------

def _fd_jacobian(v: VectorField, x: np.ndarray, step: float) -> np.ndarray:
    n = v.dim
    pts = np.empty((2 * n, n))
    for j in range(n):
        pts[2 * j] = x
        pts[2 * j, j] += step
        pts[2 * j + 1] = x
        pts[2 * j + 1, j] -= step
    vals = v(pts)
    jac = np.empty((n, n))
    for j in range(n):
        jac[:, j] = (vals[2 * j] - vals[2 * j + 1]) / (2.0 * step)
    return jac


def _adapted_dirs_2d(v: VectorField, x: np.ndarray, r: float) -> np.ndarray:
    """Direction pair witnessing the extremal choice for smooth planar
    fields: h with h^2 aligned to conj of the local complex derivative,
    together with its quarter rotation.  Derived from the finite-difference
    Jacobian at probe scale (exact for linear fields)."""
    jac = _fd_jacobian(v, x, r)
    a = complex(jac[0, 0] + jac[1, 1], jac[1, 0] - jac[0, 1]) / 2.0
    if abs(a) == 0.0:
        return np.empty((0, 2))
    hstar = np.exp(-1j * np.angle(a) / 2.0)
    return from_complex(np.array([hstar, 1j * hstar]))


def _adapted_dirs_r0(v: VectorField, x: np.ndarray, r: float) -> np.ndarray:
    """Extremal pair of the local antisymmetrized Jacobian (the pair the
    plain-pairing quotient of a differentiable field is maximized by)."""
    jac = _fd_jacobian(v, x, r)
    c = jac - jac.T
    if float(np.max(np.abs(c))) == 0.0:
        return np.empty((0, v.dim))
    u, w, sigma = top_singular_pair(c)
    if sigma == 0.0:
        return np.empty((0, v.dim))
    return np.stack([w, u])


def _axes(dim: int) -> np.ndarray:
    eye = np.eye(dim)
    return np.concatenate([eye, -eye], axis=0)


def estimate_seminorm(v: VectorField, kind: str, cfg: ProbeConfig) -> SeminormEstimate:
    """Exact maximum of the chosen quotient over the probe set.

    Probes per base point and scale: every ordered pair of sampled unit
    directions (both offsets at the same scale, so |h| = |k| holds by
    construction), the canonical axes, and adapted directions built from a
    finite-difference Jacobian at probe scale, which place the known
    extremal pairs of smooth fields inside the probe set.  For kind 'r' the
    rotation angle runs over the uniform theta grid together with the
    per-pair optimal angle, where the rotation sup is attained in closed
    form.  Deterministic given the config; refining the config never
    decreases the value.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if kind in ("qbar", "r") and v.dim != 2:
        raise ValueError(f"kind {kind!r} requires dimension 2")
    if not cfg.base_points:
        raise ValueError("empty probe set")
    dim = v.dim

    best = -1.0
    witness: dict = {}
    samples = 0

    if kind == "growth":
        for p in cfg.base_points:
            x = np.asarray(p, dtype=float)
            if 0.0 < float(np.linalg.norm(x)) < 1e-9:
                continue
            val = growth_quotient(v, x)
            samples += 1
            if val > best:
                best, witness = val, {"x": list(p), "h": None, "k": None, "theta": None}
        return SeminormEstimate(kind=kind, value=max(best, 0.0), witness=witness,
                                samples=samples, probe_hash=cfg.probe_hash())

    base_dirs = np.concatenate([unit_directions(dim, cfg.directions), _axes(dim)], axis=0)

    for p in cfg.base_points:
        x = np.asarray(p, dtype=float)
        for r in cfg.scales:
            dirs = base_dirs
            if kind in ("qbar", "r") :
                extra = _adapted_dirs_2d(v, x, r)
                if len(extra):
                    dirs = np.concatenate([dirs, extra], axis=0)
            elif kind == "r0":
                extra = _adapted_dirs_r0(v, x, r)
                if len(extra):
                    dirs = np.concatenate([dirs, extra], axis=0)
            d = len(dirs)
            vx = v(x)
            vp = v(x[None, :] + r * dirs)

            if kind == "qbar":
                zdirs = as_complex(dirs)
                dh = as_complex(vp) - as_complex(vx)
                q = (dh * (r * zdirs)).real / (r * r)
                hi, lo = int(np.argmax(q)), int(np.argmin(q))
                val = float(q[hi] - q[lo])
                samples += d * d
                if val > best:
                    best = val
                    witness = {"x": list(p), "h": list(r * dirs[hi]),
                               "k": list(r * dirs[lo]), "theta": None}
            elif kind == "r":
                zdirs = as_complex(dirs)
                dh = as_complex(vp) - as_complex(vx)
                a = dh[:, None] * np.conj(r * zdirs)[None, :]
                w = a - a.T
                mags = np.abs(w) / (r * r)
                idx = int(np.argmax(mags))
                hi, ki = divmod(idx, d)
                val = float(mags.flat[idx])
                samples += d * d * (cfg.theta_samples + 1)
                if val > best:
                    best = val
                    theta = float(np.angle(w[hi, ki]) % (2.0 * np.pi))
                    witness = {"x": list(p), "h": list(r * dirs[hi]),
                               "k": list(r * dirs[ki]), "theta": theta}
            elif kind == "r0":
                dv = vp - vx
                nmat = dv @ dirs.T
                mags = np.abs(nmat - nmat.T) / r
                idx = int(np.argmax(mags))
                hi, ki = divmod(idx, d)
                val = float(mags.flat[idx])
                samples += d * d
                if val > best:
                    best = val
                    witness = {"x": list(p), "h": list(r * dirs[hi]),
                               "k": list(r * dirs[ki]), "theta": None}
            elif kind == "zygmund":
                vm = v(x[None, :] - r * dirs)
                second = np.linalg.norm(vp + vm - 2.0 * vx, axis=-1) / r
                hi = int(np.argmax(second))
                val = float(second[hi])
                samples += d
                if val > best:
                    best = val
                    witness = {"x": list(p), "h": list(r * dirs[hi]),
                               "k": None, "theta": None}
            else:  # lipschitz
                quo = np.linalg.norm(vp - vx, axis=-1) / r
                hi = int(np.argmax(quo))
                val = float(quo[hi])
                samples += d
                if val > best:
                    best = val
                    witness = {"x": list(p), "h": list(r * dirs[hi]),
                               "k": None, "theta": None}
    return SeminormEstimate(kind=kind, value=max(best, 0.0), witness=witness,
                            samples=samples, probe_hash=cfg.probe_hash())


# ---------------------------------------------------------------------------
# log-extended consistency check (|h| != |k|)
# ---------------------------------------------------------------------------

def log_extended_check(v: VectorField, cfg: ProbeConfig, kind: str = "r0",
                       norm_estimate: Optional[float] = None,
                       coeff_a: float = 2.5, coeff_b: float = 1.0 / (2.0 * math.log(2.0)),
                       tolerance: float = 0.05, pairs_per_point: int = 64) -> dict:
    """Check that unequal-norm quotients stay below
    norm * (A + B |log(|h|/|k|)|).

    Uses pair_mode='free' sampling: offsets are r_i * direction with scales
    taken from the config ladder, so |h|/|k| spans the dyadic range.  Returns
    a report dict; 'applicable' is False when the normalizing estimate
    vanishes.
    """
    if kind not in ("r0", "qbar"):
        raise ValueError("log-extended check supports kinds 'r0' and 'qbar'")
    if cfg.pair_mode != "free":
        raise ValueError("log-extended check requires pair_mode='free'")
    if norm_estimate is None:
        eq_cfg = ProbeConfig(base_points=cfg.base_points, directions=cfg.directions,
                             scales=cfg.scales, theta_samples=cfg.theta_samples,
                             seed=cfg.seed, pair_mode="equal_norm")
        norm_estimate = estimate_seminorm(v, kind, eq_cfg).value
    if norm_estimate <= 1e-13:
        return {"kind": kind, "applicable": False, "norm": norm_estimate,
                "max_ratio": None, "samples": 0, "consistent": None,
                "witness": None, "coeff_a": coeff_a, "coeff_b": coeff_b}

    rng = np.random.default_rng(cfg.seed)
    dirs = unit_directions(v.dim, cfg.directions)
    scales = np.asarray(cfg.scales)
    best_ratio = -1.0
    witness = None
    samples = 0
    for p in cfg.base_points:
        x = np.asarray(p, dtype=float)
        for _ in range(pairs_per_point):
            i, j = rng.integers(0, len(scales)), rng.integers(0, len(scales))
            if scales[i] == scales[j]:
                j = (j + 1) % len(scales)
                if scales[i] == scales[j]:
                    continue
            u, w = dirs[rng.integers(0, len(dirs))], dirs[rng.integers(0, len(dirs))]
            h, k = scales[i] * u, scales[j] * w
            if kind == "r0":
                quo = r0_quotient(v, x, h, k, enforce_equal_norm=False)
            else:
                zx, zh, zk = as_complex(x), as_complex(h), as_complex(k)
                vx = as_complex(v(x))
                dh = as_complex(v(from_complex(zx + zh))) - vx
                dk = as_complex(v(from_complex(zx + zk))) - vx
                quo = abs(float((dh * zh).real / abs(zh) ** 2
                                - (dk * zk).real / abs(zk) ** 2))
            bound = norm_estimate * (coeff_a + coeff_b * abs(math.log(scales[i] / scales[j])))
            ratio = quo / bound
            samples += 1
            if ratio > best_ratio:
                best_ratio = ratio
                witness = {"x": list(p), "h": list(h), "k": list(k)}
    return {"kind": kind, "applicable": True, "norm": norm_estimate,
            "max_ratio": best_ratio, "samples": samples,
            "consistent": bool(best_ratio <= 1.0 + tolerance),
            "witness": witness, "coeff_a": coeff_a, "coeff_b": coeff_b}
