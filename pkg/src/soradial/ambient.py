"""Matrix-level SO(n): Lie algebra basis, Haar sampling and finite-difference Laplacians.

Everything here is a verification oracle for the torus-level machinery:
derivatives are fixed-step central differences, so residuals scale like
``h^2``.
"""
from __future__ import annotations

import itertools
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .characters import character
from .errors import NotClassFunction
from .torus import extract_angles
from .weights import SpectralLine

H_FIRST = 1e-4
H_SECOND = 1e-3

MatrixFunction = Callable[[np.ndarray], float]


def inner(A, B) -> float:
    """``A . B = Tr(A^T B) / 2``."""
    return 0.5 * float(np.trace(np.asarray(A).T @ np.asarray(B)))


def bracket(X, Y):
    return X @ Y - Y @ X


def is_skew(X, tol: float = 1e-13) -> bool:
    return bool(np.max(np.abs(X + X.T)) <= tol)


def skew_basis(n: int, dtype=float) -> list[np.ndarray]:
    """``F_ij = E_ij - E_ji`` for ``i < j`` in lexicographic order (orthonormal for ``inner``)."""
    basis = []
    for i, j in itertools.combinations(range(n), 2):
        F = np.zeros((n, n), dtype=dtype)
        F[i, j], F[j, i] = 1, -1
        basis.append(F)
    return basis


def commutator_table_defect(n: int) -> int:
    """Largest entry of ``[F_ij, F_kl] - (d_jk F_il + d_il F_jk - d_ik F_jl - d_jl F_ik)``.

    Integer arithmetic over every index tuple, with ``F_ab = -F_ba`` and
    ``F_aa = 0`` extending the basis to all index pairs.
    """
    def F(a, b):
        M = np.zeros((n, n), dtype=np.int64)
        if a != b:
            M[a, b], M[b, a] = 1, -1
        return M

    worst = 0
    idx = range(n)
    for i, j, k, l in itertools.product(idx, repeat=4):
        lhs = bracket(F(i, j), F(k, l))
        rhs = (j == k) * F(i, l) + (i == l) * F(j, k) - (i == k) * F(j, l) - (j == l) * F(i, k)
        worst = max(worst, int(np.max(np.abs(lhs - rhs))))
    return worst


def random_orthonormal_basis(n: int, rng: np.random.Generator) -> list[np.ndarray]:
    """The ``F`` basis rotated by a random orthogonal matrix of its coefficient space."""
    F = skew_basis(n)
    m = len(F)
    O, _ = np.linalg.qr(rng.standard_normal((m, m)))
    return [sum(O[a, b] * F[b] for b in range(m)) for a in range(m)]


def haar_sample(rng: np.random.Generator, n: int, size: int | None = None) -> np.ndarray:
    """Haar-distributed rotations: QR of a Gaussian matrix with ``R_kk > 0``,
    then the first column negated when the determinant is -1."""
    shape = (1 if size is None else size, n, n)
    Q, R = np.linalg.qr(rng.standard_normal(shape))
    d = np.sign(np.diagonal(R, axis1=-2, axis2=-1))
    d[d == 0] = 1.0
    Q = Q * d[:, None, :]
    neg = np.linalg.det(Q) < 0
    Q[neg, :, 0] *= -1.0
    return Q[0] if size is None else Q


def adjoint(A, X):
    """``Ad(A) X = A X A^-1``."""
    return A @ X @ A.T


def rho_derivative(f: MatrixFunction, A, X, order: int = 1, h: float | None = None) -> float:
    """``d^k/dt^k f(A exp(tX))`` at ``t = 0`` by three-point central differences."""
    if order == 1:
        h = H_FIRST if h is None else h
        return (f(A @ expm(h * X)) - f(A @ expm(-h * X))) / (2 * h)
    if order == 2:
        h = H_SECOND if h is None else h
        return (f(A @ expm(h * X)) - 2.0 * f(A) + f(A @ expm(-h * X))) / (h * h)
    raise ValueError("order must be 1 or 2")


def group_laplacian(f: MatrixFunction, A, basis=None) -> float:
    """Lie-group Laplacian: sum over an orthonormal basis of ``rho(X)^2 f``."""
    A = np.asarray(A, dtype=float)
    basis = skew_basis(A.shape[0]) if basis is None else basis
    return float(sum(rho_derivative(f, A, X, 2) for X in basis))


def tangent_projection(A, M):
    """Orthogonal projection of ``M`` onto ``T_A SO(n)``: ``A (A^T M - M^T A) / 2``."""
    return A @ (A.T @ M - M.T @ A) / 2.0


def _along(f, B, V, h):
    """Central difference of ``f`` along the geodesic through ``B`` with velocity ``V``."""
    X = B.T @ V
    return (f(B @ expm(h * X)) - f(B @ expm(-h * X))) / (2 * h)


def embedded_laplacian(f: MatrixFunction, A) -> float:
    """Riemannian Laplacian ``2 sum_ij (P_T E_ij)^2 f`` with nested differences.

    The inner derivative re-projects ``E_ij`` at the moved point, so the
    variation of the vector field is included.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    total = 0.0
    for i, j in itertools.product(range(n), repeat=2):
        E = np.zeros((n, n))
        E[i, j] = 1.0

        def field_derivative(B, E=E):
            return _along(f, B, tangent_projection(B, E), H_FIRST)

        total += _along(field_derivative, A, tangent_projection(A, E), H_SECOND)
    return 2.0 * total


def class_function(line: SpectralLine) -> MatrixFunction:
    """``A -> phi_lambda(Theta(A))`` via angle extraction."""
    group = line.group

    def f(A):
        return float(character(line, extract_angles(A, group).array))

    return f


def check_class_function(f: MatrixFunction, A, rng: np.random.Generator | None = None,
                         trials: int = 3, tol: float = 1e-8) -> float:
    """Spot check ``f(g A g^T) = f(A)``; raises :class:`NotClassFunction`."""
    rng = np.random.default_rng(2024) if rng is None else rng
    base = f(A)
    worst = 0.0
    for _ in range(trials):
        g = haar_sample(rng, A.shape[0])
        worst = max(worst, abs(f(g @ A @ g.T) - base))
    if worst > tol * (1.0 + abs(base)):
        raise NotClassFunction(f"conjugation changes f by {worst:.3e}")
    return worst


def verify_fonda(f: MatrixFunction, A, X, check: bool = True, rng=None) -> float:
    """Residual of ``rho(Ad(A^-1)X - X)^2 f(A) - rho([Ad(A^-1)X, X]) f(A)``.

    Vanishes (up to differencing error) for class functions.
    """
    A = np.asarray(A, dtype=float)
    if check:
        check_class_function(f, A, rng)
    Xa = adjoint(A.T, X)
    second = rho_derivative(f, A, Xa - X, 2)
    first = rho_derivative(f, A, bracket(Xa, X), 1)
    return abs(second - first)


def conjugation_invariance_check(f: MatrixFunction, A, g) -> float:
    """``|Lap f(g A g^T) - Lap f(A)|``."""
    return abs(group_laplacian(f, g @ A @ g.T) - group_laplacian(f, A))


def left_invariance_residual(f: MatrixFunction, A, B) -> float:
    """``|Lap(L(B) f)(A) - (L(B) Lap f)(A)|`` with ``(L(B) f)(A) = f(B^T A)``."""
    def lf(M):
        return f(B.T @ M)
    return abs(group_laplacian(lf, A) - group_laplacian(f, B.T @ A))


def right_invariance_residual(f: MatrixFunction, A, B) -> float:
    """``|Lap(R(B) f)(A) - (R(B) Lap f)(A)|`` with ``(R(B) f)(A) = f(A B)``."""
    def rf(M):
        return f(M @ B)
    return abs(group_laplacian(rf, A) - group_laplacian(f, A @ B))


def random_polynomial(n: int, rng: np.random.Generator, degree: int = 3, terms: int = 6) -> MatrixFunction:
    """Random polynomial in the matrix entries (a smooth non-class test function)."""
    monomials = []
    for _ in range(terms):
        k = int(rng.integers(1, degree + 1))
        idx = [tuple(rng.integers(0, n, 2)) for _ in range(k)]
        monomials.append((float(rng.normal()), idx))

    def f(A):
        return float(sum(c * np.prod([A[i, j] for i, j in idx]) for c, idx in monomials))

    return f
