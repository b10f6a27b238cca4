"""Invariant suites: each returns residuals checked against fixed tolerances.

The suites are shared by the CLI ``verify`` command and the acceptance tests.
Defaults reproduce the full-size checks; smaller arguments give quick runs.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import ambient
from .characters import character
from .errors import IncompatibleRHS
from .quadrature import ClassFunctionGrid, QuadratureGrid, integrate_class
from .radial import (FORMS, apply_radial_laplacian, density_gradient, exact_grid_size,
                     fd_first, normalization_audit, radial_laplacian_on_grid,
                     verify_pi_eigenidentity, weyl_density)
from .solver import _grid_character, reconstruct_grid, required_grid_size, solve_poisson
from .torus import GroupDim, as_group, singular_distance, weyl_group
from .weights import enumerate_dominant

TOLERANCES = {
    "eigen": 1e-6,
    "orth": 1e-8,
    "forms_fd": 1e-5,
    "forms_spectral": 1e-9,
    "pi_identity": 1e-5,
    "density_gradient": 1e-6,
    "poisson": 1e-8,
    "ambient_bridge": 1e-3,
    "embedded_vs_group": 1e-3,
    "fonda": 1e-4,
    "fonda_negative": 1e-2,
    "integration": 1e-10,
    "monte_carlo_se": 4.0,
    "normalization": 1e-10,
}

ORTH_GRID = {3: 128, 4: 128}
ORTH_GRID_DEFAULT = 32
NONDEGENERATE = 1e-2


@dataclass
class CriterionResult:
    name: str
    n: int | None
    residual: float
    tolerance: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _result(name, n, residual, tol, **detail) -> CriterionResult:
    residual = float(residual)
    return CriterionResult(name, n, residual, tol, bool(residual <= tol), detail)


# -- test functions -------------------------------------------------------------

def random_invariant_trig_poly(group, rng: np.random.Generator, degree: int = 3,
                               terms: int = 4) -> Callable[[np.ndarray], np.ndarray]:
    """Weyl-group average of a random trigonometric polynomial of the given degree."""
    group = as_group(group)
    p = group.p
    freqs = rng.integers(-degree, degree + 1, size=(terms, p)).astype(float)
    phases = rng.uniform(0, 2 * np.pi, terms)
    amps = rng.normal(size=terms) / np.sqrt(terms)
    W = weyl_group(group)

    def f(theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape[:-1])
        for w in W:
            arg = (theta @ w.T) @ freqs.T + phases
            out = out + np.cos(arg) @ amps
        return out / len(W)

    return f


def _random_regular_points(group, rng, count, min_distance):
    pts = []
    while sum(len(x) for x in pts) < count:
        cand = rng.uniform(-np.pi, np.pi, (4 * count, group.p))
        pts.append(cand[singular_distance(group, cand) >= min_distance])
    return np.concatenate(pts)[:count]


# -- suites ---------------------------------------------------------------------

def eigen_suite(ns: Iterable[int] = (3, 4, 5, 6, 7), kappa_max: float = 30,
                min_points: int = 200, form: str = "direct") -> list[CriterionResult]:
    """``|L phi + kappa phi| / (1 + kappa |phi|)`` on nondegenerate grid nodes."""
    out = []
    for n in ns:
        group = GroupDim(n)
        lines = enumerate_dominant(group, kappa_max)
        N = max(required_grid_size(group, kappa_max), 8)
        while True:
            grid = QuadratureGrid(group, N)
            keep = singular_distance(group, grid.points) >= NONDEGENERATE
            if keep.sum() >= min_points:
                break
            N += 2
        worst = 0.0
        for line in lines:
            phi = character(line, grid.points)
            lap = radial_laplacian_on_grid(group, phi.reshape(grid.shape), form).reshape(-1)
            res = np.abs(lap + line.kappa * phi) / (1.0 + line.kappa * np.abs(phi))
            worst = max(worst, float(np.max(res[keep])))
        out.append(_result("eigen", n, worst, TOLERANCES["eigen"], lines=len(lines),
                           grid=N, points=int(keep.sum())))
    return out


def orth_suite(ns: Iterable[int] = (3, 4, 5, 6, 7), kappa_max: float = 20,
               grid_size: int | None = None) -> list[CriterionResult]:
    """``max |G - I|`` for the Gram matrix of the real character basis."""
    out = []
    for n in ns:
        group = GroupDim(n)
        N = grid_size or ORTH_GRID.get(n, ORTH_GRID_DEFAULT)
        grid = QuadratureGrid(group, N)
        lines = enumerate_dominant(group, kappa_max)
        Phi = np.stack([character(line, grid.points) for line in lines])
        G = (Phi * grid.weights) @ Phi.T
        err = float(np.max(np.abs(G - np.eye(len(lines)))))
        out.append(_result("orth", n, err, TOLERANCES["orth"], lines=len(lines), grid=N))
    return out


def forms_suite(ns: Iterable[int] = (3, 4, 5, 6, 7), count: int = 50, seed: int = 0,
                degree: int = 3, min_distance: float = 0.1,
                fd_points: int = 4) -> list[CriterionResult]:
    """Pairwise agreement of the four radial-Laplacian forms (FD and spectral)."""
    rng = np.random.default_rng(seed)
    out = []
    for n in ns:
        group = GroupDim(n)
        grid = QuadratureGrid(group, exact_grid_size(group, degree))
        keep = singular_distance(group, grid.points) >= min_distance
        fd_worst = sp_worst = 0.0
        for _ in range(count):
            f = random_invariant_trig_poly(group, rng, degree)
            pts = _random_regular_points(group, rng, fd_points, min_distance)
            vals = [apply_radial_laplacian(f, pts, form, group=group) for form in FORMS]
            fd_worst = max(fd_worst, max(float(np.max(np.abs(a - b)))
                                         for a, b in itertools.combinations(vals, 2)))
            values = f(grid.mesh)
            grids = [radial_laplacian_on_grid(group, values, form).reshape(-1)[keep] for form in FORMS]
            sp_worst = max(sp_worst, max(float(np.max(np.abs(a - b)))
                                         for a, b in itertools.combinations(grids, 2)))
        out.append(_result("forms_fd", n, fd_worst, TOLERANCES["forms_fd"], polys=count))
        out.append(_result("forms_spectral", n, sp_worst, TOLERANCES["forms_spectral"],
                           polys=count, grid=grid.N))
    return out


def pi_suite(ns: Iterable[int] = (3, 4, 5, 6, 7), count: int = 100,
             seed: int = 0) -> list[CriterionResult]:
    """``Pi_n`` eigen-identity and the closed-form density gradient."""
    rng = np.random.default_rng(seed)
    out = []
    for n in ns:
        group = GroupDim(n)
        pts = rng.uniform(-np.pi, np.pi, (count, group.p))
        res = verify_pi_eigenidentity(group, pts)
        out.append(_result("pi_identity", n, res, TOLERANCES["pi_identity"], points=count))
        grad = density_gradient(group, pts)
        fd = np.stack([fd_first(lambda t: weyl_density(group, t), pts, j)
                       for j in range(group.p)], axis=-1)
        out.append(_result("density_gradient", n, np.max(np.abs(grad - fd)),
                           TOLERANCES["density_gradient"], points=count))
    return out


def random_band_rhs(grid: QuadratureGrid, kappa_max, rng) -> ClassFunctionGrid:
    """Random mean-zero combination of the characters with ``kappa <= kappa_max``."""
    lines = [line for line in enumerate_dominant(grid.group, kappa_max) if line.kappa_exact != 0]
    coeffs = rng.normal(size=len(lines))
    values = sum(c * _grid_character(grid, line) for c, line in zip(coeffs, lines))
    return ClassFunctionGrid(grid, values)


def poisson_suite(ns: Iterable[int] = (3, 4, 5, 6, 7), kappa_max: float = 50, count: int = 20,
                  seed: int = 0) -> list[CriterionResult]:
    """Relative weighted L2 error of ``-L solve(eta)`` against ``eta``; ``eta = 1`` is rejected."""
    rng = np.random.default_rng(seed)
    out = []
    for n in ns:
        group = GroupDim(n)
        top = max(max(abs(x) for x in line.shifted) for line in enumerate_dominant(group, kappa_max))
        N = max(required_grid_size(group, kappa_max), exact_grid_size(group, int(np.ceil(top))))
        grid = QuadratureGrid(group, N)
        w = grid.weights
        worst = 0.0
        for _ in range(count):
            eta = random_band_rhs(grid, kappa_max, rng)
            sol = solve_poisson(eta, kappa_max)
            phi = reconstruct_grid(sol, grid).values
            lap = radial_laplacian_on_grid(group, phi.reshape(grid.shape), "direct").reshape(-1)
            ok = np.isfinite(lap) & (w > 0)
            err = np.sqrt(np.sum(w[ok] * (-lap[ok] - eta.values[ok]) ** 2))
            worst = max(worst, float(err / np.sqrt(np.sum(w[ok] * eta.values[ok] ** 2))))
        try:
            solve_poisson(ClassFunctionGrid(grid, np.ones(grid.N ** group.p)), kappa_max)
            rejected = False
        except IncompatibleRHS:
            rejected = True
        res = _result("poisson", n, worst, TOLERANCES["poisson"], rhs=count, grid=N,
                      constant_rejected=rejected)
        res.passed = res.passed and rejected
        out.append(res)
    return out


def random_unit_skew(rng, n):
    """Uniformly random direction in so(n), unit length for ``Tr(X^T Y) / 2``."""
    M = rng.normal(size=(n, n))
    X = M - M.T
    return X / np.sqrt(ambient.inner(X, X))


def ambient_suite(ns_bridge: Iterable[int] = (3, 4, 5), ns_embedded: Iterable[int] = (3, 4),
                  kappa_max: float = 12, count: int = 20, seed: int = 0) -> list[CriterionResult]:
    """Group Laplacian of characters, and embedded versus group Laplacian."""
    rng = np.random.default_rng(seed)
    out = []
    for n in ns_bridge:
        lines = [line for line in enumerate_dominant(n, kappa_max)]
        fs = [(line, ambient.class_function(line)) for line in lines]
        worst = 0.0
        for A in ambient.haar_sample(rng, n, count):
            for line, f in fs:
                worst = max(worst, abs(ambient.group_laplacian(f, A) + line.kappa * f(A)))
        out.append(_result("ambient_bridge", n, worst, TOLERANCES["ambient_bridge"],
                           samples=count, lines=len(lines)))
    for n in ns_embedded:
        worst = 0.0
        ratios = []
        for A in ambient.haar_sample(rng, n, count):
            f = ambient.random_polynomial(n, rng)
            dm, dg = ambient.embedded_laplacian(f, A), ambient.group_laplacian(f, A)
            worst = max(worst, abs(dm - dg))
            if abs(dg) > 1e-3:
                ratios.append(dm / dg)
        out.append(_result("embedded_vs_group", n, worst, TOLERANCES["embedded_vs_group"],
                           samples=count, median_ratio=float(np.median(ratios)) if ratios else None))
    return out


def fonda_suite(ns: Iterable[int] = (3, 4, 5), count: int = 20, kappa_max: float = 12,
                seed: int = 0) -> list[CriterionResult]:
    """Class-function identity residual and its non-class negative control."""
    rng = np.random.default_rng(seed)
    out = []
    for n in ns:
        lines = [line for line in enumerate_dominant(n, kappa_max) if line.kappa_exact != 0]
        worst = 0.0
        hits = 0
        for _ in range(count):
            A = ambient.haar_sample(rng, n)
            X = random_unit_skew(rng, n)
            line = lines[int(rng.integers(len(lines)))]
            worst = max(worst, ambient.verify_fonda(ambient.class_function(line), A, X, rng=rng))
            g = ambient.random_polynomial(n, rng)
            hits += ambient.verify_fonda(g, A, X, check=False) > TOLERANCES["fonda_negative"]
        out.append(_result("fonda", n, worst, TOLERANCES["fonda"], samples=count))
        frac = hits / count
        out.append(CriterionResult("fonda_negative", n, frac, 0.9, frac >= 0.9,
                                   {"samples": count, "meaning": "fraction above 1e-2, must be >= 0.9"}))
    return out


def integration_suite(ns: Iterable[int] = (4, 5), samples: int = 100_000,
                      seed: int = 0) -> list[CriterionResult]:
    """Quadrature of 1, trace, trace^2 and a Haar Monte-Carlo cross-check."""
    rng = np.random.default_rng(seed)
    out = []
    for n in ns:
        group = GroupDim(n)
        grid = QuadratureGrid(group, 32)
        trace = 2.0 * np.cos(grid.points).sum(axis=-1) + (1.0 if group.odd else 0.0)
        quad = [integrate_class(ClassFunctionGrid(grid, v))
                for v in (np.ones_like(trace), trace, trace ** 2)]
        err = max(abs(q - e) for q, e in zip(quad, (1.0, 0.0, 1.0)))
        out.append(_result("integration", n, err, TOLERANCES["integration"], values=quad))
        A = ambient.haar_sample(rng, n, samples)
        tr = np.trace(A, axis1=1, axis2=2)
        z = []
        for vals, q in ((tr, quad[1]), (tr ** 2, quad[2])):
            se = vals.std(ddof=1) / np.sqrt(samples)
            z.append(abs(vals.mean() - q) / se)
        out.append(_result("monte_carlo_se", n, max(z), TOLERANCES["monte_carlo_se"], samples=samples))
    return out


def normalization_suite(ns: Iterable[int] = (3, 4, 5, 6, 7, 8)) -> list[CriterionResult]:
    """Empirical Weyl-density normalization against the closed-form constant.

    Even n must match; odd-n mismatches pass when reported as a diagnostic.
    """
    out = []
    for n in ns:
        audit = normalization_audit(n)
        rel = abs(audit["ratio"] - 1.0)
        if GroupDim(n).odd:
            res = CriterionResult("normalization", n, rel, TOLERANCES["normalization"],
                                  audit["matches"] or audit["diagnostic"] is not None,
                                  {k: audit[k] for k in ("ratio", "diagnostic")})
        else:
            res = _result("normalization", n, rel, TOLERANCES["normalization"], ratio=audit["ratio"])
        out.append(res)
    return out


SUITES = {
    "eigen": lambda ns, seed: eigen_suite(ns),
    "orth": lambda ns, seed: orth_suite(ns),
    "forms": lambda ns, seed: forms_suite(ns, seed=seed),
    "pi": lambda ns, seed: pi_suite(ns, seed=seed),
    "poisson": lambda ns, seed: poisson_suite(ns, seed=seed),
    "ambient": lambda ns, seed: ambient_suite([n for n in ns if n <= 5], [n for n in ns if n <= 4], seed=seed),
    "fonda": lambda ns, seed: fonda_suite([n for n in ns if n <= 5], seed=seed),
    "integration": lambda ns, seed: integration_suite(ns, seed=seed),
    "normalization": lambda ns, seed: normalization_suite(ns),
}


def run_suite(name: str, ns: Iterable[int], seed: int = 0) -> list[CriterionResult]:
    """Run one suite (or ``"all"``) for the given group dimensions."""
    ns = [int(n) for n in ns]
    for n in ns:
        GroupDim(n)
    if name == "all":
        return [r for key in SUITES for r in SUITES[key](ns, seed)]
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {sorted(SUITES) + ['all']}")
    return SUITES[name](ns, seed)
