"""Uniform grid containers for scalar/vector/matrix samples and their JSON
file format:

    {dim, shape, origin, spacing, boundary_mode,
     components: {name: flat row-major float64 array}}

Coordinates of sample i along an axis are origin + i * spacing (builders in
this package place samples at cell centers).  Compact-mode data fed to the
convolution and spectral operators must vanish on the outermost two-cell
margin; operators validate this on their inputs (outputs such as velocity
windows are decaying fields sampled on the same grid and are exempt).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

__all__ = ["GridField", "cell_centered_axes"]


def cell_centered_axes(shape, box) -> tuple[np.ndarray, ...]:
    """Cell-center coordinates for a symmetric box [-box, box]^dim."""
    out = []
    for n in shape:
        h = 2.0 * box / n
        out.append((np.arange(n) + 0.5) * h - box)
    return tuple(out)


@dataclass
class GridField:
    dim: int
    shape: tuple
    origin: tuple
    spacing: tuple
    components: dict
    boundary_mode: str = "compact"

    def __post_init__(self):
        self.shape = tuple(int(s) for s in self.shape)
        self.origin = tuple(float(o) for o in self.origin)
        self.spacing = tuple(float(s) for s in self.spacing)
        if self.dim not in (1, 2, 3):
            raise ValueError("dim must be 1, 2 or 3")
        if len(self.shape) != self.dim or len(self.origin) != self.dim \
                or len(self.spacing) != self.dim:
            raise ValueError("shape/origin/spacing must have length dim")
        if any(s <= 0 for s in self.spacing):
            raise ValueError("spacing must be positive")
        if self.boundary_mode not in ("periodic", "compact"):
            raise ValueError("boundary_mode must be 'periodic' or 'compact'")
        comps = {}
        for name, arr in self.components.items():
            arr = np.asarray(arr, dtype=float)
            if arr.shape != self.shape:
                raise ValueError(f"component {name!r} has shape {arr.shape}, "
                                 f"expected {self.shape}")
            comps[str(name)] = arr
        self.components = comps

    # -- geometry ----------------------------------------------------------

    def axes(self) -> tuple:
        return tuple(self.origin[a] + np.arange(self.shape[a]) * self.spacing[a]
                     for a in range(self.dim))

    def meshes(self) -> tuple:
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))

    def component(self, name: str) -> np.ndarray:
        return self.components[name]

    def names(self) -> tuple:
        return tuple(self.components.keys())

    # -- validation helpers --------------------------------------------------

    def require_mode(self, mode: str, what: str):
        if self.boundary_mode != mode:
            raise ValueError(f"{what} requires a {mode} grid, "
                             f"got {self.boundary_mode}")

    def require_power_of_two(self, what: str):
        for s in self.shape:
            if s & (s - 1):
                raise ValueError(f"{what} requires power-of-two sample counts, "
                                 f"got {self.shape}")

    def margin_is_zero(self, cells: int = 2) -> bool:
        for arr in self.components.values():
            for ax in range(self.dim):
                sl_lo = [slice(None)] * self.dim
                sl_hi = [slice(None)] * self.dim
                sl_lo[ax] = slice(0, cells)
                sl_hi[ax] = slice(-cells, None)
                if np.any(arr[tuple(sl_lo)] != 0.0) or np.any(arr[tuple(sl_hi)] != 0.0):
                    return False
        return True

    def require_compact_support(self, what: str, cells: int = 2):
        self.require_mode("compact", what)
        if not self.margin_is_zero(cells):
            raise ValueError(f"{what} requires data vanishing on the outer "
                             f"{cells}-cell margin")

    # -- complex scalar convenience -----------------------------------------

    def complex_data(self) -> np.ndarray:
        """Interpret the components as one complex scalar: 're'/'im' pair, or
        a single real component (imaginary part zero)."""
        if "re" in self.components and "im" in self.components:
            return self.components["re"] + 1j * self.components["im"]
        if len(self.components) == 1:
            (arr,) = self.components.values()
            return arr.astype(complex)
        raise ValueError("expected components {'re','im'} or a single component")

    def vector_data(self) -> np.ndarray:
        """Stack vector components v1..v{dim} along the first axis."""
        names = [f"v{i + 1}" for i in range(self.dim)]
        if not all(nm in self.components for nm in names):
            raise ValueError(f"expected vector components {names}")
        return np.stack([self.components[nm] for nm in names])

    # -- IO -------------------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "shape": list(self.shape),
            "origin": list(self.origin),
            "spacing": list(self.spacing),
            "boundary_mode": self.boundary_mode,
            "components": {k: v.ravel().tolist() for k, v in self.components.items()},
        }

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_json_dict(), f, sort_keys=True)

    @staticmethod
    def from_json_dict(doc: dict) -> "GridField":
        shape = tuple(int(s) for s in doc["shape"])
        comps = {k: np.asarray(v, dtype=float).reshape(shape)
                 for k, v in doc["components"].items()}
        return GridField(dim=int(doc["dim"]), shape=shape,
                         origin=tuple(doc["origin"]), spacing=tuple(doc["spacing"]),
                         components=comps, boundary_mode=doc["boundary_mode"])

    @staticmethod
    def load(path) -> "GridField":
        with open(path) as f:
            return GridField.from_json_dict(json.load(f))

    @staticmethod
    def from_box(dim: int, n: int, box: float, components: dict,
                 boundary_mode: str = "compact") -> "GridField":
        """Grid over [-box, box]^dim with n cell-centered samples per axis."""
        h = 2.0 * box / n
        origin = tuple(-box + 0.5 * h for _ in range(dim))
        return GridField(dim=dim, shape=(n,) * dim, origin=origin,
                         spacing=(h,) * dim, components=components,
                         boundary_mode=boundary_mode)
