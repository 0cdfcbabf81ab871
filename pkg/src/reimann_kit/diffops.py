"""Pointwise differential operators (divergence, curl matrix, complex
derivatives, traceless-symmetric and rotation parts), multiscale recovery
estimates of those operators from difference quotients, and the coordinate
rotation generators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._util import opnorm
from .fields import VectorField
from .seminorms import ProbeConfig, estimate_seminorm

__all__ = [
    "DerivativeBundle",
    "RotationGenerators",
    "jacobian_fd",
    "derivative_bundle",
    "pointwise_limit_estimate",
    "rotation_generators",
    "rn_attempt_sup",
]


@dataclass(frozen=True)
class DerivativeBundle:
    """Jacobian of a field at a point with its standard decompositions.

    jacobian = S + A exactly, with S the traceless symmetric part
    (D + D^T)/2 - (div/n) Id and A the rotation-plus-trace part
    (D - D^T)/2 + (div/n) Id.  In dimension 2, d_complex = (div + i curl)/2
    and the matrix A acts on vectors as multiplication by d_complex.
    """

    dim: int
    jacobian: np.ndarray
    div: float
    curl_matrix: np.ndarray
    s_part: np.ndarray
    a_part: np.ndarray
    curl_scalar: Optional[float] = None
    d_complex: Optional[complex] = None
    dbar_complex: Optional[complex] = None

    def as_dict(self) -> dict:
        out = {
            "dim": self.dim,
            "jacobian": self.jacobian.tolist(),
            "div": self.div,
            "curl_matrix": self.curl_matrix.tolist(),
            "S": self.s_part.tolist(),
            "A": self.a_part.tolist(),
        }
        if self.dim == 2:
            out["curl_scalar"] = self.curl_scalar
            out["d_complex"] = [self.d_complex.real, self.d_complex.imag]
            out["dbar_complex"] = [self.dbar_complex.real, self.dbar_complex.imag]
        return out


@dataclass(frozen=True)
class RotationGenerators:
    """The n(n-1)/2 coordinate-plane rotation generators J_{i,j} with
    J e_i = -e_j, J e_j = e_i and identity on the other axes."""

    dim: int
    matrices: tuple


def jacobian_fd(v: VectorField, x, step: float) -> np.ndarray:
    """Central-difference Jacobian (v_i(x + e_j step) - v_i(x - e_j step)) /
    (2 step); passing step = 0 returns the closed-form Jacobian."""
    x = np.asarray(x, dtype=float)
    if step < 0:
        raise ValueError("step must be nonnegative")
    if step == 0:
        return v.jacobian_at(x)
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


def bundle_from_jacobian(jac: np.ndarray) -> DerivativeBundle:
    jac = np.asarray(jac, dtype=float)
    n = jac.shape[0]
    div = float(np.trace(jac))
    curl_matrix = jac - jac.T
    s_part = 0.5 * (jac + jac.T) - (div / n) * np.eye(n)
    a_part = 0.5 * (jac - jac.T) + (div / n) * np.eye(n)
    if n == 2:
        curl_scalar = float(jac[1, 0] - jac[0, 1])
        d_complex = complex(div / 2.0, curl_scalar / 2.0)
        dbar_complex = complex((jac[0, 0] - jac[1, 1]) / 2.0,
                               (jac[1, 0] + jac[0, 1]) / 2.0)
        return DerivativeBundle(dim=2, jacobian=jac, div=div,
                                curl_matrix=curl_matrix, s_part=s_part,
                                a_part=a_part, curl_scalar=curl_scalar,
                                d_complex=d_complex, dbar_complex=dbar_complex)
    return DerivativeBundle(dim=n, jacobian=jac, div=div,
                            curl_matrix=curl_matrix, s_part=s_part, a_part=a_part)


def derivative_bundle(v: VectorField, x, step: float) -> DerivativeBundle:
    """All pointwise operators derived from the (FD or closed-form) Jacobian."""
    return bundle_from_jacobian(jacobian_fd(v, x, step))


_RECOVERY_KINDS = {
    "qbar_recovery": "qbar",
    "r_recovery": "r",
    "r0_recovery": "r0",
}


def pointwise_limit_estimate(v: VectorField, x, kind: str, scales,
                             directions: int = 256, theta_samples: int = 64) -> float:
    """Multiscale quotient maximization at one point; returns the value at
    the finest scale of the ladder.

    For smooth fields this converges to 2|d_complex| (qbar/r recovery) or to
    the operator norm of the curl matrix (r0 recovery).  The finest-scale
    value is reported as-is, without extrapolation.
    """
    if kind not in _RECOVERY_KINDS:
        raise ValueError(f"unknown recovery kind {kind!r}")
    scales = tuple(float(s) for s in scales)
    if not scales:
        raise ValueError("empty scale ladder")
    if any(a <= b for a, b in zip(scales, scales[1:])):
        raise ValueError("scales must be strictly decreasing")
    x = tuple(float(c) for c in np.atleast_1d(np.asarray(x, dtype=float)))
    value = 0.0
    for r in scales:
        cfg = ProbeConfig(base_points=(x,), directions=directions, scales=(r,),
                          theta_samples=theta_samples)
        value = estimate_seminorm(v, _RECOVERY_KINDS[kind], cfg).value
    return value


def rotation_generators(n: int) -> RotationGenerators:
    if n < 2:
        raise ValueError("need dimension >= 2")
    mats = []
    for i in range(n):
        for j in range(i + 1, n):
            m = np.eye(n)
            m[i, i] = 0.0
            m[j, j] = 0.0
            m[j, i] = -1.0
            m[i, j] = 1.0
            mats.append(m)
    return RotationGenerators(dim=n, matrices=tuple(mats))


def rn_attempt_sup(m: np.ndarray, gens: RotationGenerators) -> float:
    """sup over J in the generator set plus the identity of the operator
    norm of M^T J - J^T M (the linear-field value of the rotation-pairing
    quotient)."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if m.shape != (n, n) or n != gens.dim:
        raise ValueError("matrix dimension does not match the generator set")
    best = opnorm(m.T - m)  # J = Id
    for j in gens.matrices:
        best = max(best, opnorm(m.T @ j - j.T @ m))
    return float(best)
