"""Vector/scalar field abstractions, the analytic test-field zoo, and the
logarithmic cutoff used to reduce unbounded fields to compact support."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from ._util import opnorm

__all__ = [
    "VectorField",
    "ScalarField",
    "ZooEntry",
    "QuadrantVortexRecipe",
    "make_zoo",
    "cutoff_g",
    "apply_cutoff",
    "linear_field",
    "bump_profile",
    "bump_profile_ds",
    "as_complex",
    "from_complex",
]


def as_complex(points: np.ndarray) -> np.ndarray:
    """Identify (..., 2) real points with complex numbers."""
    p = np.asarray(points, dtype=float)
    return p[..., 0] + 1j * p[..., 1]


def from_complex(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z)
    return np.stack([z.real, z.imag], axis=-1)


@dataclass(frozen=True)
class VectorField:
    """Deterministic total map R^n -> R^n.

    `eval` must accept arrays of shape (..., dim) and return the same shape
    (vectorized over leading axes).  `jacobian`, when present, maps a single
    point (dim,) to the (dim, dim) matrix with entries J[i, j] = d v_i / d x_j
    and must agree with central differences to second order at smooth points.
    `support_radius` is None for unbounded support.
    """

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    support_radius: Optional[float] = None
    name: str = "field"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if self.support_radius is not None and not self.support_radius > 0:
            raise ValueError("support_radius must be positive")

    def __call__(self, points) -> np.ndarray:
        return self.eval(np.asarray(points, dtype=float))

    def jacobian_at(self, x) -> np.ndarray:
        if self.jacobian is None:
            raise ValueError(f"field {self.name!r} has no closed-form jacobian")
        return np.asarray(self.jacobian(np.asarray(x, dtype=float)), dtype=float)


@dataclass(frozen=True)
class ScalarField:
    """Deterministic total map R^n -> R (vectorized over leading axes)."""

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    support_radius: Optional[float] = None
    name: str = "scalar"

    def __call__(self, points) -> np.ndarray:
        return self.eval(np.asarray(points, dtype=float))


@dataclass(frozen=True)
class QuadrantVortexRecipe:
    """Recipe for the quadrant-sign vorticity field: omega = sign(x1*x2) on
    the square [-extent, extent]^2, sampled on a grid_n^2 grid over
    [-box, box]^2; the velocity is produced by the planar vorticity
    convolution (see singular_integrals.quadrant_velocity_field)."""

    extent: float = 1.0
    box: float = 2.0
    grid_n: int = 256


@dataclass(frozen=True)
class ZooEntry:
    """A test field together with its hand-derived expected quantities.

    Every value in `expected` carries a provenance note in `notes`
    explaining the derivation it came from.
    """

    name: str
    field: Optional[VectorField]
    expected: dict = dc_field(default_factory=dict)
    notes: dict = dc_field(default_factory=dict)
    lipschitz: bool = True
    grid_recipe: Optional[QuadrantVortexRecipe] = None


# ---------------------------------------------------------------------------
# field constructors
# ---------------------------------------------------------------------------

def linear_field(m: np.ndarray, name: str) -> VectorField:
    m = np.asarray(m, dtype=float)
    n = m.shape[0]

    def ev(p, _m=m):
        return p @ _m.T

    def jac(x, _m=m):
        return _m.copy()

    return VectorField(dim=n, eval=ev, jacobian=jac, support_radius=None, name=name)


def bump_profile(s: np.ndarray) -> np.ndarray:
    """phi(s) = exp(1 - 1/(1-s)) for s < 1, else 0; C-infinity in s."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = s < 1.0
    out[m] = np.exp(1.0 - 1.0 / (1.0 - s[m]))
    return out


def bump_profile_ds(s: np.ndarray) -> np.ndarray:
    """d phi / d s."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = s < 1.0
    out[m] = -np.exp(1.0 - 1.0 / (1.0 - s[m])) / (1.0 - s[m]) ** 2
    return out


def _bump_field(dim: int, direction, radius: float, name: str) -> VectorField:
    a = np.asarray(direction, dtype=float)
    r2 = radius * radius

    def ev(p, _a=a, _r2=r2):
        s = np.sum(p * p, axis=-1) / _r2
        return bump_profile(s)[..., None] * _a

    def jac(x, _a=a, _r2=r2):
        s = float(np.dot(x, x)) / _r2
        grad = bump_profile_ds(np.array(s)) * 2.0 * np.asarray(x) / _r2
        return np.outer(_a, grad)

    return VectorField(dim=dim, eval=ev, jacobian=jac, support_radius=radius, name=name)


def _conjlog_field() -> VectorField:
    def ev(p):
        z = as_complex(p)
        r2 = np.abs(z) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(r2 > 0, np.conj(z) * np.log(np.where(r2 > 0, r2, 1.0)), 0.0)
        return from_complex(w)

    def jac(x):
        # d1 v1 = log r^2 + 2 x^2/r^2, d2 v1 = 2xy/r^2,
        # d1 v2 = -2xy/r^2,           d2 v2 = -log r^2 - 2 y^2/r^2
        a, b = float(x[0]), float(x[1])
        r2 = a * a + b * b
        if r2 == 0.0:
            raise ValueError("conjlog jacobian undefined at the origin")
        lg = math.log(r2)
        return np.array([
            [lg + 2.0 * a * a / r2, 2.0 * a * b / r2],
            [-2.0 * a * b / r2, -lg - 2.0 * b * b / r2],
        ])

    return VectorField(dim=2, eval=ev, jacobian=jac, support_radius=None, name="conjlog")


# fixed, versioned zoo matrices so every expected value reproduces exactly
ROTATION_2 = np.array([[0.0, -1.0], [1.0, 0.0]])
CONJ_2 = np.array([[1.0, 0.0], [0.0, -1.0]])
GENERIC_2 = np.array([[0.3, -0.8], [0.5, 0.2]])
ROTATION_3 = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
SYMTRACELESS_3 = np.array([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 0.0]])
GENERIC_3 = np.array([
    [0.2, -0.7, 0.4],
    [0.3, 0.1, -0.5],
    [-0.6, 0.2, -0.3],
])


def _linear_expected(m: np.ndarray) -> tuple[dict, dict]:
    """Closed-form quantities of v(x) = M x by hand expansion of the
    difference quotients (linear fields make every quotient scale-free)."""
    n = m.shape[0]
    curl = m - m.T
    expected = {
        "r0": opnorm(curl),
        "zygmund": 0.0,
        "lipschitz": opnorm(m),
        "growth_bounded": True,
    }
    notes = {
        "r0": "equal-norm pair quotient of a linear map reduces to "
              "<(M - M^T) h, k>/(|h||k|); supremum is the operator norm",
        "zygmund": "second differences of affine maps vanish",
        "lipschitz": "|M h|/|h| sups at the largest singular value",
    }
    if n == 2:
        div = float(np.trace(m))
        curl_s = float(m[1, 0] - m[0, 1])
        d = complex(div / 2.0, curl_s / 2.0)
        dbar = complex((m[0, 0] - m[1, 1]) / 2.0, (m[1, 0] + m[0, 1]) / 2.0)
        expected.update({
            "d_complex": d,
            "dbar_complex": dbar,
            "div": div,
            "curl_scalar": curl_s,
            "qbar": 2.0 * abs(d),
            "r": 2.0 * abs(d),
        })
        notes.update({
            "d_complex": "(div + i curl)/2 for the constant Jacobian M",
            "qbar": "conjugate-pairing quotient of a linear map equals "
                    "|Re(a (h^2 - k^2))|/|h|^2 with a the complex derivative; "
                    "sup over equal-norm pairs is 2|a|",
            "r": "rotation-pairing quotient expands to "
                 "2 Im(a e^{-i theta}) Im(h conj(k))/(|h||k|); sup is 2|a|",
        })
    return expected, notes


def make_zoo(dim: int) -> list[ZooEntry]:
    """Analytic test fields with reproducible expected values.

    dim=2 also includes the conjugate-log field (our stand-in for a
    non-Lipschitz field with unit complex derivative) and the
    quadrant-vorticity recipe whose velocity comes from the vorticity
    convolution.
    """
    if dim not in (2, 3):
        raise ValueError(f"unsupported dim {dim}; expected 2 or 3")

    entries: list[ZooEntry] = []

    if dim == 2:
        for name, m in (("rot", ROTATION_2), ("conj", CONJ_2), ("generic", GENERIC_2)):
            exp, notes = _linear_expected(m)
            entries.append(ZooEntry(name=name, field=linear_field(m, name),
                                    expected=exp, notes=notes, lipschitz=True))

        conjlog = _conjlog_field()
        entries.append(ZooEntry(
            name="conjlog",
            field=conjlog,
            expected={"d_complex_abs": 1.0, "growth_bounded": True},
            notes={
                "d_complex_abs": "product rule in Wirtinger form: the z-derivative "
                                 "of conj(z) log|z|^2 is conj(z)/z, unit modulus "
                                 "away from the origin",
                "value_at_origin": "defined as 0 (continuous extension)",
            },
            lipschitz=False,
        ))

        entries.append(ZooEntry(
            name="bump",
            field=_bump_field(2, (1.0, 0.5), 1.0, "bump"),
            expected={"support_radius": 1.0, "growth_bounded": True},
            notes={"support_radius": "compactly supported smooth profile by construction"},
            lipschitz=True,
        ))

        entries.append(ZooEntry(
            name="bc_quadrant",
            field=None,
            expected={"non_lipschitz_log_rate": True},
            notes={
                "non_lipschitz_log_rate": "velocity of a bounded quadrant-sign "
                "vorticity; its difference quotient at the origin grows like "
                "log(1/r) while the conjugate-pairing seminorm stays bounded",
            },
            lipschitz=False,
            grid_recipe=QuadrantVortexRecipe(),
        ))
    else:
        for name, m in (("rot3", ROTATION_3), ("sym3", SYMTRACELESS_3),
                        ("generic3", GENERIC_3)):
            exp, notes = _linear_expected(m)
            entries.append(ZooEntry(name=name, field=linear_field(m, name),
                                    expected=exp, notes=notes, lipschitz=True))
        entries.append(ZooEntry(
            name="bump3",
            field=_bump_field(3, (1.0, 0.5, -0.25), 1.0, "bump3"),
            expected={"support_radius": 1.0, "growth_bounded": True},
            notes={"support_radius": "compactly supported smooth profile by construction"},
            lipschitz=True,
        ))
    return entries


def zoo_field(name: str, dim: int = 2) -> VectorField:
    """Look up a zoo field by name (entries backed by an evaluatable field)."""
    for e in make_zoo(dim):
        if e.name == name and e.field is not None:
            return e.field
    raise KeyError(f"no evaluatable zoo field named {name!r} in dim {dim}")


# ---------------------------------------------------------------------------
# logarithmic cutoff
# ---------------------------------------------------------------------------

def cutoff_profile(t: float, r: np.ndarray) -> np.ndarray:
    """Radial profile of the cutoff: 1 on [0, t], then
    1 - (1/t) log(log r / log t) until r = t^(e^t), then 0.

    Requires t > e so log t > 1 and the middle branch decreases from 1 to 0.
    Comparisons with the upper breakpoint are done in log space because
    t^(e^t) overflows floats already for moderate t.
    """
    if not t > math.e:
        raise ValueError("cutoff parameter t must exceed e")
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    log_t = math.log(t)
    upper_log = math.exp(t) * log_t  # log of the upper breakpoint
    inner = r <= t
    out[inner] = 1.0
    mid = (~inner) & (np.log(np.maximum(r, t)) < upper_log)
    if np.any(mid):
        out[mid] = 1.0 - np.log(np.log(r[mid]) / log_t) / t
    return out


def cutoff_g(t: float, x) -> float | np.ndarray:
    """Cutoff value at a point (vectorized over leading axes of x)."""
    x = np.asarray(x, dtype=float)
    r = np.sqrt(np.sum(x * x, axis=-1))
    val = cutoff_profile(t, np.atleast_1d(r))
    return float(val[0]) if r.ndim == 0 else val.reshape(r.shape)


def apply_cutoff(v: VectorField, t: float) -> VectorField:
    """Multiply a field by the cutoff profile; equals v on |x| <= t and has
    compact support of radius t^(e^t) (stored as inf when that overflows)."""
    if not t > math.e:
        raise ValueError("cutoff parameter t must exceed e")
    lsr = math.exp(t) * math.log(t)
    support = math.exp(lsr) if lsr < 700.0 else math.inf

    def ev(p, _v=v, _t=t):
        vals = _v.eval(p)
        r = np.sqrt(np.sum(p * p, axis=-1))
        g = cutoff_profile(_t, np.atleast_1d(r)).reshape(r.shape if r.ndim else ())
        return vals * np.asarray(g)[..., None]

    return VectorField(dim=v.dim, eval=ev, jacobian=None,
                       support_radius=support, name=f"{v.name}*g_{t:g}")
