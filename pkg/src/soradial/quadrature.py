"""Weyl-weighted quadrature on uniform torus grids.

A class function integrates against normalised Haar measure as
``N^-p sum_k f(Theta_k) u_n(Theta_k)`` over the nodes ``2 pi k / N``. For
trigonometric polynomials of low enough degree this is exact.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from ._fourier import fourier_derivative
from .errors import GridMismatch, NotClassFunction
from .radial import grid_mesh, radial_laplacian_on_grid, weyl_density
from .torus import GroupDim, as_group, weyl_generators


def default_grid_size(group) -> int:
    return {1: 64, 2: 64, 3: 32, 4: 16}.get(as_group(group).p, 8)


@dataclass(frozen=True)
class QuadratureGrid:
    group: GroupDim
    N: int

    def __post_init__(self):
        object.__setattr__(self, "group", as_group(self.group))
        if self.N < 4 or self.N % 2:
            raise ValueError(f"grid size must be even and >= 4, got {self.N}")

    @classmethod
    def default(cls, group) -> "QuadratureGrid":
        return cls(as_group(group), default_grid_size(group))

    @property
    def p(self) -> int:
        return self.group.p

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.p

    @cached_property
    def nodes(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.N) / self.N

    @cached_property
    def mesh(self) -> np.ndarray:
        """Node coordinates, shape ``(N,)*p + (p,)``; last angle varies fastest."""
        return grid_mesh(self.group, self.N)

    @property
    def points(self) -> np.ndarray:
        return self.mesh.reshape(-1, self.p)

    @cached_property
    def weights(self) -> np.ndarray:
        """``u_n(Theta_k) / N^p`` flattened; sums to one."""
        return weyl_density(self.group, self.points) / self.N ** self.p


@dataclass(frozen=True, eq=False)
class ClassFunctionGrid:
    """Samples of a class function on a :class:`QuadratureGrid` (row-major, flat)."""

    grid: QuadratureGrid
    values: np.ndarray
    weyl_invariant: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if values.size != self.grid.N ** self.grid.p:
            raise ValueError(f"expected {self.grid.N ** self.grid.p} values, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid values must be finite")
        object.__setattr__(self, "values", values)
        if self.weyl_invariant:
            self._check_weyl()

    def _check_weyl(self, tol: float = 1e-8):
        # Weyl generators permute (and reflect) the grid nodes.
        arr = self.shaped
        N = self.grid.N
        for w in weyl_generators(self.grid.group):
            idx = np.indices(arr.shape).reshape(self.grid.p, -1).T
            moved = np.mod(idx @ w.T.astype(int), N)
            other = arr[tuple(moved.T)]
            err = np.max(np.abs(other - arr.reshape(-1)))
            if err > tol * (1.0 + np.max(np.abs(arr))):
                raise NotClassFunction(f"grid values not Weyl invariant (error {err:.2e})")

    @classmethod
    def from_function(cls, grid: QuadratureGrid, f: Callable, **kw) -> "ClassFunctionGrid":
        return cls(grid, np.asarray(f(grid.points), dtype=float), **kw)

    @property
    def group(self) -> GroupDim:
        return self.grid.group

    @property
    def shaped(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)

    def with_values(self, values) -> "ClassFunctionGrid":
        return ClassFunctionGrid(self.grid, values)

    def to_json(self) -> str:
        return json.dumps({"n": self.grid.group.n, "N": self.grid.N,
                           "values": [float(v) for v in self.values]})

    @classmethod
    def from_json(cls, text: str) -> "ClassFunctionGrid":
        doc = json.loads(text)
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "ClassFunctionGrid":
        for key in ("n", "N", "values"):
            if key not in doc:
                raise ValueError(f"grid document lacks {key!r}")
        if not isinstance(doc["n"], int) or not isinstance(doc["N"], int):
            raise ValueError("'n' and 'N' must be integers")
        if not isinstance(doc["values"], list):
            raise ValueError("'values' must be a list")
        return cls(QuadratureGrid(GroupDim(doc["n"]), doc["N"]), np.array(doc["values"], dtype=float))


def integrate_class(f: ClassFunctionGrid) -> float:
    """Haar integral of a class function from its torus samples."""
    return float(np.dot(f.values, f.grid.weights))


def inner_product(f: ClassFunctionGrid, g: ClassFunctionGrid) -> float:
    if f.grid != g.grid:
        raise GridMismatch(f"grids differ: {f.grid} vs {g.grid}")
    return float(np.dot(f.values * g.values, f.grid.weights))


def l2_norm(f: ClassFunctionGrid) -> float:
    return float(np.sqrt(max(inner_product(f, f), 0.0)))


def spectral_derivative(f: ClassFunctionGrid, j: int, order: int = 1) -> ClassFunctionGrid:
    """``d f / d theta_j`` (or second derivative) by the discrete Fourier transform."""
    if not 0 <= j < f.grid.p:
        raise ValueError(f"axis {j} out of range for p = {f.grid.p}")
    return f.with_values(fourier_derivative(f.shaped, j, order).reshape(-1))


def apply_radial_laplacian_grid(f: ClassFunctionGrid, form: str = "direct") -> np.ndarray:
    """Radial Laplacian of grid data (NaN at singular nodes), flat like ``values``."""
    return radial_laplacian_on_grid(f.group, f.shaped, form).reshape(-1)
