"""Grid-based convolution and spectral operators: the Cauchy transform
(inverting the complex z-derivative on compact data), recovery of the
conjugate derivative from the z-derivative by a spectral multiplier, the
planar vorticity-to-velocity convolution, Riesz transforms, and the
divergence/curl decomposition residual check

    b = grad(div u) + div(curl u),   Delta u = b.

Non-periodic singular convolutions are direct quadrature sums: every
non-singular cell uses the kernel value at its center; the singular cell
uses the closed-form integral of the kernel over the cell, which vanishes
for all three kernels here (they are odd under z -> -z or under the
quarter-turn symmetry of 1/conj(z)^2 on a centered square).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .fields import QuadrantVortexRecipe, VectorField
from .grids import GridField

__all__ = [
    "SpectralPlan",
    "cauchy_transform",
    "beurling_recover_dbar",
    "biot_savart",
    "biot_savart_velocity",
    "riesz_transform",
    "hodge_check",
    "grid_derivative_bundle",
    "disk_vorticity",
    "quadrant_vorticity",
    "quadrant_velocity_field",
]


# ---------------------------------------------------------------------------
# direct (non-FFT) convolution of a kernel table against grid samples
# ---------------------------------------------------------------------------

def _direct_conv2(src: np.ndarray, ker: np.ndarray) -> np.ndarray:
    """out[i,j] = sum_{p,q} ker[i-p+n-1, j-q+n-1] src[p,q].

    The sum is organized as 2n-1 Toeplitz matrix products (one per row
    offset), which is the same direct quadrature sum evaluated by BLAS.
    """
    n = src.shape[0]
    if src.shape != (n, n) or ker.shape != (2 * n - 1, 2 * n - 1):
        raise ValueError("src must be square and ker its full offset table")
    out = np.zeros((n, n))
    swk = sliding_window_view(ker, n, axis=1)  # swk[r, c, j] = ker[r, c + j]
    for d in range(-(n - 1), n):
        r = d + n - 1
        toep = swk[r][::-1]  # toep[q, j] = ker[r, j - q + n - 1]
        p_lo, p_hi = max(0, -d), min(n, n - d)
        out[p_lo + d:p_hi + d] += src[p_lo:p_hi] @ toep
    return out


def _offset_table(grid: GridField) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = grid.shape[0]
    if grid.shape != (n, n) or abs(grid.spacing[0] - grid.spacing[1]) > 1e-15:
        raise ValueError("need a square grid with equal spacings")
    h = grid.spacing[0]
    off = np.arange(-(n - 1), n) * h
    dx, dy = np.meshgrid(off, off, indexing="ij")
    r2 = dx * dx + dy * dy
    r2[n - 1, n - 1] = 1.0  # placeholder; the singular cell is set separately
    return dx, dy, r2


def cauchy_transform(g: GridField, mode: str = "compact") -> GridField:
    """Direct convolution with 1/(pi conj(z)) on a compact complex scalar
    grid; inverts the complex z-derivative, so feeding samples of the
    z-derivative of a compactly supported field returns that field (up to
    quadrature and tail error).

    The singular cell contributes its closed-form cell integral, which is 0
    because z/|z|^2 is odd.
    """
    if mode != "compact":
        raise ValueError("only compact mode is supported")
    g.require_compact_support("cauchy transform")
    if g.dim != 2:
        raise ValueError("cauchy transform requires a planar grid")
    data = g.complex_data()
    dx, dy, r2 = _offset_table(g)
    n = g.shape[0]
    # 1/(pi conj(z)) = (x + i y) / (pi |z|^2)
    kr = dx / (math.pi * r2)
    ki = dy / (math.pi * r2)
    kr[n - 1, n - 1] = 0.0
    ki[n - 1, n - 1] = 0.0
    w = g.spacing[0] * g.spacing[1]
    re = (_direct_conv2(data.real, kr) - _direct_conv2(data.imag, ki)) * w
    im = (_direct_conv2(data.real, ki) + _direct_conv2(data.imag, kr)) * w
    return GridField(dim=2, shape=g.shape, origin=g.origin, spacing=g.spacing,
                     components={"re": re, "im": im}, boundary_mode="compact")


def biot_savart(omega: GridField) -> GridField:
    """Velocity of a compactly supported planar vorticity by direct
    convolution with the rotational kernel (-y, x) / (2 pi |z|^2): the
    returned field has (discretely) zero divergence and curl equal to the
    vorticity in the interior."""
    omega.require_compact_support("vorticity convolution")
    if omega.dim != 2:
        raise ValueError("vorticity convolution requires a planar grid")
    if len(omega.components) != 1:
        raise ValueError("vorticity must be a single scalar component")
    (w_arr,) = omega.components.values()
    dx, dy, r2 = _offset_table(omega)
    n = omega.shape[0]
    k1 = -dy / (2.0 * math.pi * r2)
    k2 = dx / (2.0 * math.pi * r2)
    k1[n - 1, n - 1] = 0.0
    k2[n - 1, n - 1] = 0.0
    w = omega.spacing[0] * omega.spacing[1]
    v1 = _direct_conv2(w_arr, k1) * w
    v2 = _direct_conv2(w_arr, k2) * w
    return GridField(dim=2, shape=omega.shape, origin=omega.origin,
                     spacing=omega.spacing, components={"v1": v1, "v2": v2},
                     boundary_mode="compact")


def biot_savart_velocity(omega: GridField, points) -> np.ndarray:
    """Same quadrature as `biot_savart` evaluated at arbitrary points
    (cells within half a spacing of the evaluation point are dropped, the
    closed-form cell integral of the odd kernel being 0)."""
    omega.require_compact_support("vorticity convolution")
    (w_arr,) = omega.components.values()
    xg, yg = omega.meshes()
    h = omega.spacing[0]
    area = omega.spacing[0] * omega.spacing[1]
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.empty((len(pts), 2))
    for i, p in enumerate(pts):
        dx = p[0] - xg
        dy = p[1] - yg
        r2 = dx * dx + dy * dy
        near = r2 < (0.5 * h) ** 2
        r2 = np.where(near, 1.0, r2)
        k1 = np.where(near, 0.0, -dy / (2.0 * math.pi * r2))
        k2 = np.where(near, 0.0, dx / (2.0 * math.pi * r2))
        out[i, 0] = float(np.sum(k1 * w_arr)) * area
        out[i, 1] = float(np.sum(k2 * w_arr)) * area
    return out


# ---------------------------------------------------------------------------
# spectral operators on periodic boxes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralPlan:
    """Wavenumber grids for a periodic box; zero_mode 'project_out' maps the
    mean to zero under every singular multiplier, 'error' rejects input with
    nonzero mean."""

    shape: tuple
    spacing: tuple
    zero_mode: str = "project_out"

    def __post_init__(self):
        if self.zero_mode not in ("project_out", "error"):
            raise ValueError("zero_mode must be 'project_out' or 'error'")

    def wavenumbers(self) -> list[np.ndarray]:
        ks = [2.0 * np.pi * np.fft.fftfreq(n, d=h)
              for n, h in zip(self.shape, self.spacing)]
        return list(np.meshgrid(*ks, indexing="ij"))

    def k2(self) -> np.ndarray:
        kk = self.wavenumbers()
        return sum(k * k for k in kk)


def _plan_for(grid: GridField, zero_mode: str = "project_out") -> SpectralPlan:
    grid.require_mode("periodic", "spectral operator")
    grid.require_power_of_two("spectral operator")
    return SpectralPlan(shape=grid.shape, spacing=grid.spacing, zero_mode=zero_mode)


def beurling_recover_dbar(db: GridField) -> GridField:
    """Recover the conjugate derivative from z-derivative samples via the
    frequency multiplier xi / conj(xi) (complex frequency xi = xi1 + i xi2,
    zero mode mapped to 0) on the input box treated as a torus.

    The input must be compactly supported well inside its box (support
    confined to the central half per axis gives the 2x padding the periodic
    surrogate of the plane operator needs); support touching the margin is
    rejected.
    """
    if db.dim != 2:
        raise ValueError("requires a planar grid")
    db.require_compact_support("spectral conjugate-derivative recovery")
    data = db.complex_data()
    n0, n1 = db.shape
    mag = np.abs(data)
    support = mag > 0
    inner = np.zeros_like(support)
    inner[n0 // 4:(3 * n0) // 4, n1 // 4:(3 * n1) // 4] = True
    if np.any(support & ~inner):
        raise ValueError("support touches the padding margin; embed the data "
                         "in a box at least twice its support")
    plan = SpectralPlan(shape=db.shape, spacing=db.spacing)
    kx, ky = plan.wavenumbers()
    xi = kx + 1j * ky
    with np.errstate(divide="ignore", invalid="ignore"):
        mult = np.where(np.abs(xi) > 0, xi / np.conj(xi), 0.0)
    rec = np.fft.ifft2(mult * np.fft.fft2(data))
    return GridField(dim=2, shape=db.shape, origin=db.origin, spacing=db.spacing,
                     components={"re": rec.real, "im": rec.imag},
                     boundary_mode="compact")


def riesz_transform(g: GridField, j: int, zero_mode: str = "project_out") -> GridField:
    """j-th Riesz transform on a periodic box: multiplier -i k_j / |k|.

    The composition sum_j R_j R_j is minus the identity on mean-zero data.
    """
    plan = _plan_for(g, zero_mode)
    if not 0 <= j < g.dim:
        raise ValueError(f"axis j must be in 0..{g.dim - 1}")
    if len(g.components) != 1:
        raise ValueError("expected a single scalar component")
    (arr,) = g.components.values()
    mean = float(np.mean(arr))
    if plan.zero_mode == "error" and abs(mean) > 1e-12 * max(1.0, float(np.max(np.abs(arr)))):
        raise ValueError("input has nonzero mean and zero_mode='error'")
    kk = plan.wavenumbers()
    mag = np.sqrt(plan.k2())
    mag[(0,) * g.dim] = 1.0
    mult = -1j * kk[j] / mag
    mult[(0,) * g.dim] = 0.0
    out = np.fft.ifftn(mult * np.fft.fftn(arr)).real
    name = list(g.components.keys())[0]
    return GridField(dim=g.dim, shape=g.shape, origin=g.origin, spacing=g.spacing,
                     components={name: out}, boundary_mode="periodic")


def _spectral_derivative(arr_hat: np.ndarray, k: np.ndarray) -> np.ndarray:
    return np.fft.ifftn(1j * k * arr_hat).real


def hodge_check(b: GridField) -> dict:
    """Solve Delta u = b spectrally (means projected out), rebuild b as
    grad(div u) + div(curl u) with (curl u)_{ij} = d_j u_i - d_i u_j, and
    report relative residuals, together with the residuals of
    Delta(div u) = div b and Delta(curl u) = curl b."""
    plan = _plan_for(b)
    n = b.dim
    vecs = b.vector_data()
    kk = plan.wavenumbers()
    k2 = plan.k2()
    zero = (0,) * n
    k2_safe = k2.copy()
    k2_safe[zero] = 1.0

    hats = []
    for c in range(n):
        arr_hat = np.fft.fftn(vecs[c])
        arr_hat[zero] = 0.0  # project out the mean
        hats.append(arr_hat)
    u_hats = [-h / k2_safe for h in hats]
    for h in u_hats:
        h[zero] = 0.0

    b0 = np.stack([np.fft.ifftn(h).real for h in hats])  # mean-projected b
    du = [[_spectral_derivative(u_hats[i], kk[j]) for j in range(n)] for i in range(n)]
    div_u = sum(du[i][i] for i in range(n))
    div_u_hat = np.fft.fftn(div_u)

    grad_div = np.stack([_spectral_derivative(div_u_hat, kk[i]) for i in range(n)])
    div_curl = np.zeros_like(grad_div)
    for i in range(n):
        acc = np.zeros(b.shape)
        for j in range(n):
            curl_ij_hat = np.fft.fftn(du[i][j] - du[j][i])
            acc += _spectral_derivative(curl_ij_hat, kk[j])
        div_curl[i] = acc
    rebuilt = grad_div + div_curl

    scale = math.sqrt(float(np.sum(b0 * b0))) or 1.0
    diff = rebuilt - b0
    res_l2 = math.sqrt(float(np.sum(diff * diff))) / scale
    res_linf = float(np.max(np.abs(diff))) / (float(np.max(np.abs(b0))) or 1.0)

    div_b = sum(_spectral_derivative(hats[i], kk[i]) for i in range(n))
    lap_div_u = np.fft.ifftn(-k2 * div_u_hat).real
    num = float(np.sqrt(np.sum((lap_div_u - div_b) ** 2)))
    den = float(np.sqrt(np.sum(div_b ** 2))) or 1.0
    res_div = num / den

    num_c = den_c = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            curl_b_ij = _spectral_derivative(hats[i], kk[j]) - _spectral_derivative(hats[j], kk[i])
            lap_curl_u_ij = np.fft.ifftn(-k2 * np.fft.fftn(du[i][j] - du[j][i])).real
            num_c += float(np.sum((lap_curl_u_ij - curl_b_ij) ** 2))
            den_c += float(np.sum(curl_b_ij ** 2))
    res_curl = math.sqrt(num_c) / (math.sqrt(den_c) or 1.0)

    return {
        "residual_l2": res_l2,
        "residual_linf": res_linf,
        "residual_div_poisson": res_div,
        "residual_curl_poisson": res_curl,
        "shape": list(b.shape),
    }


# ---------------------------------------------------------------------------
# grid derivative bundle
# ---------------------------------------------------------------------------

def grid_derivative_bundle(b: GridField) -> GridField:
    """Jacobian grid of a sampled vector field with its decompositions:
    spectral derivatives on periodic boxes, centered differences otherwise.

    Components: d{i}{j} = d_j b_i, div, curl{i}{j} (i < j), s{i}{j},
    a{i}{j}; in the plane additionally curl (scalar) and the complex
    derivative pair d_re/d_im, dbar_re/dbar_im.
    """
    n = b.dim
    vecs = b.vector_data()
    derivs = np.empty((n, n) + b.shape)
    if b.boundary_mode == "periodic":
        plan = _plan_for(b)
        kk = plan.wavenumbers()
        for i in range(n):
            hat = np.fft.fftn(vecs[i])
            for j in range(n):
                derivs[i, j] = _spectral_derivative(hat, kk[j])
    else:
        for i in range(n):
            for j in range(n):
                derivs[i, j] = np.gradient(vecs[i], b.spacing[j], axis=j)

    comps = {}
    for i in range(n):
        for j in range(n):
            comps[f"d{i + 1}{j + 1}"] = derivs[i, j]
    div = sum(derivs[i, i] for i in range(n))
    comps["div"] = div
    for i in range(n):
        for j in range(n):
            sym = 0.5 * (derivs[i, j] + derivs[j, i])
            comps[f"s{i + 1}{j + 1}"] = sym - (div / n if i == j else 0.0)
            comps[f"a{i + 1}{j + 1}"] = 0.5 * (derivs[i, j] - derivs[j, i]) \
                + (div / n if i == j else 0.0)
            if i < j:
                comps[f"curl{i + 1}{j + 1}"] = derivs[i, j] - derivs[j, i]
    if n == 2:
        curl = derivs[1, 0] - derivs[0, 1]
        comps["curl"] = curl
        comps["d_re"] = div / 2.0
        comps["d_im"] = curl / 2.0
        comps["dbar_re"] = (derivs[0, 0] - derivs[1, 1]) / 2.0
        comps["dbar_im"] = (derivs[1, 0] + derivs[0, 1]) / 2.0
    return GridField(dim=n, shape=b.shape, origin=b.origin, spacing=b.spacing,
                     components=comps, boundary_mode=b.boundary_mode)


# ---------------------------------------------------------------------------
# vorticity builders and the quadrant-vorticity velocity field
# ---------------------------------------------------------------------------

def disk_vorticity(grid_n: int = 256, box: float = 2.0, radius: float = 1.0) -> GridField:
    """Unit vorticity on a disk (rigid-rotation benchmark)."""
    gf = GridField.from_box(2, grid_n, box, components={"omega": np.zeros((grid_n,) * 2)})
    xg, yg = gf.meshes()
    gf.components["omega"][:] = (xg * xg + yg * yg <= radius * radius).astype(float)
    return gf


def quadrant_vorticity(grid_n: int = 256, box: float = 2.0, extent: float = 1.0) -> GridField:
    """sign(x1 x2) on the square [-extent, extent]^2."""
    gf = GridField.from_box(2, grid_n, box, components={"omega": np.zeros((grid_n,) * 2)})
    xg, yg = gf.meshes()
    inside = (np.abs(xg) <= extent) & (np.abs(yg) <= extent)
    gf.components["omega"][:] = np.sign(xg * yg) * inside
    return gf


@lru_cache(maxsize=4)
def _cached_quadrant(extent: float, box: float, grid_n: int) -> GridField:
    return quadrant_vorticity(grid_n=grid_n, box=box, extent=extent)


def quadrant_velocity_field(recipe: QuadrantVortexRecipe | None = None) -> VectorField:
    """Evaluatable velocity field of the quadrant-sign vorticity; every
    evaluation is the direct convolution quadrature at that point against
    the fixed vorticity grid of the recipe."""
    recipe = recipe or QuadrantVortexRecipe()
    omega = _cached_quadrant(recipe.extent, recipe.box, recipe.grid_n)

    def ev(p, _omega=omega):
        p = np.asarray(p, dtype=float)
        flat = p.reshape(-1, 2)
        vals = biot_savart_velocity(_omega, flat)
        return vals.reshape(p.shape)

    return VectorField(dim=2, eval=ev, jacobian=None, support_radius=None,
                       name="bc_quadrant")
