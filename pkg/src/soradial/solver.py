"""Character expansions of class functions and the spectral Poisson solver."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .characters import character
from .errors import GridTooCoarse, IncompatibleRHS
from .quadrature import ClassFunctionGrid, QuadratureGrid, integrate_class
from .torus import GroupDim, TorusAngles, as_group
from .weights import SpectralLine, enumerate_dominant

COMPAT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpectralExpansion:
    """Truncated series ``sum_lambda c_lambda phi_lambda`` over ``kappa <= kappa_max``.

    ``residual_norm`` is the Haar L2 norm of the part of the source function
    that lies outside the band (0 when unknown or exactly band limited).
    """

    group: GroupDim
    lines: tuple[SpectralLine, ...]
    coeffs: np.ndarray
    kappa_max: float
    residual_norm: float = field(default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "group", as_group(self.group))
        object.__setattr__(self, "lines", tuple(self.lines))
        coeffs = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if coeffs.size != len(self.lines):
            raise ValueError("one coefficient per spectral line is required")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls, group, kappa_max) -> "SpectralExpansion":
        lines = enumerate_dominant(group, kappa_max)
        return cls(group, lines, np.zeros(len(lines)), float(kappa_max))

    def coefficient(self, lam) -> float:
        for line, c in zip(self.lines, self.coeffs):
            if line.lam == tuple(lam):
                return float(c)
        raise KeyError(tuple(lam))

    def to_dict(self) -> dict:
        return {
            "n": self.group.n,
            "kappa_max": float(self.kappa_max),
            "terms": [{"lambda": list(line.lam), "kappa": line.kappa, "coeff": float(c)}
                      for line, c in zip(self.lines, self.coeffs)],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "SpectralExpansion":
        group = GroupDim(int(doc["n"]))
        lines, coeffs = [], []
        for term in doc["terms"]:
            line = SpectralLine.from_weight(group, tuple(int(x) for x in term["lambda"]))
            if "kappa" in term and abs(float(term["kappa"]) - line.kappa) > 1e-9:
                raise ValueError(f"kappa {term['kappa']} inconsistent with lambda {line.lam}")
            lines.append(line)
            coeffs.append(float(term["coeff"]))
        return cls(group, lines, np.array(coeffs), float(doc["kappa_max"]))

    @classmethod
    def from_json(cls, text: str) -> "SpectralExpansion":
        return cls.from_dict(json.loads(text))


def required_grid_size(group, kappa_max) -> int:
    """Smallest even N with ``N >= 2 max |lambda + delta|_inf + 2`` over the band."""
    lines = enumerate_dominant(group, kappa_max)
    top = max(max(abs(x) for x in line.shifted) for line in lines)
    N = int(np.ceil(2 * top + 2))
    return N + (N % 2)


def _check_resolution(grid: QuadratureGrid, kappa_max):
    need = required_grid_size(grid.group, kappa_max)
    if grid.N < need:
        raise GridTooCoarse(f"N = {grid.N} cannot resolve kappa <= {kappa_max}; need N >= {need}")


@lru_cache(maxsize=256)
def _grid_character(grid: QuadratureGrid, line: SpectralLine) -> np.ndarray:
    values = character(line, grid.points)
    values.flags.writeable = False
    return values


def expand(f: ClassFunctionGrid, kappa_max) -> SpectralExpansion:
    """Coefficients ``c_lambda = <f, phi_lambda>`` for every line with ``kappa <= kappa_max``."""
    _check_resolution(f.grid, kappa_max)
    lines = enumerate_dominant(f.group, kappa_max)
    fw = f.values * f.grid.weights
    coeffs = np.array([np.dot(fw, _grid_character(f.grid, line)) for line in lines])
    energy = float(np.dot(f.values * f.values, f.grid.weights))
    residual = float(np.sqrt(max(energy - float(np.dot(coeffs, coeffs)), 0.0)))
    return SpectralExpansion(f.group, lines, coeffs, float(kappa_max), residual)


def reconstruct(e: SpectralExpansion, angles) -> np.ndarray:
    """Evaluate the truncated series at ``angles`` (batched)."""
    if isinstance(angles, TorusAngles):
        angles = angles.array
    theta = np.asarray(angles, dtype=float)
    if e.group.p == 1 and theta.shape[-1:] != (1,):
        theta = theta[..., None]
    out = np.zeros(theta.shape[:-1])
    for line, c in zip(e.lines, e.coeffs):
        if c != 0.0:
            out = out + c * character(line, theta)
    return out


def reconstruct_grid(e: SpectralExpansion, grid: QuadratureGrid) -> ClassFunctionGrid:
    if grid.group != e.group:
        raise ValueError("expansion and grid belong to different groups")
    out = np.zeros(grid.N ** grid.p)
    for line, c in zip(e.lines, e.coeffs):
        if c != 0.0:
            out = out + c * _grid_character(grid, line)
    return ClassFunctionGrid(grid, out)


def solve_poisson(eta: ClassFunctionGrid, kappa_max, tol: float = COMPAT_TOL) -> SpectralExpansion:
    """Mean-zero solution of ``-L phi = eta`` on the band ``kappa <= kappa_max``.

    Raises :class:`IncompatibleRHS` when ``eta`` has Haar mean above ``tol``.
    The out-of-band part of ``eta`` is reported in ``residual_norm``.
    """
    mean = integrate_class(eta)
    if abs(mean) > tol:
        raise IncompatibleRHS(f"right-hand side has Haar mean {mean:.3e}; must vanish")
    src = expand(eta, kappa_max)
    coeffs = np.array([0.0 if line.kappa_exact == 0 else c / line.kappa
                       for line, c in zip(src.lines, src.coeffs)])
    return SpectralExpansion(src.group, src.lines, coeffs, src.kappa_max, src.residual_norm)
