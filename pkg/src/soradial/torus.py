"""Maximal-torus coordinates on SO(n).

Every rotation is conjugate to a block-diagonal matrix of planar rotations
``A_Theta``; the angles ``Theta = (theta_1, ..., theta_p)`` are defined up to
the action of the Weyl group (permutations and sign changes, with only even
numbers of sign changes when ``n`` is even).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import NotARotation

TWO_PI = 2.0 * np.pi

# Boundary detection for canonical forms (theta = 0 or pi).
_BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class GroupDim:
    """Dimension data for SO(n): ``n``, rank ``p = n // 2`` and parity."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ValueError(f"SO(n) requires an integer n >= 3, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def p(self) -> int:
        return self.n // 2

    @property
    def odd(self) -> bool:
        return self.n % 2 == 1

    @property
    def parity(self) -> str:
        return "odd" if self.odd else "even"

    @cached_property
    def delta(self) -> tuple[Fraction, ...]:
        """Weyl vector: ``p - l`` (even n) or ``p - l + 1/2`` (odd n)."""
        half = Fraction(1, 2) if self.odd else Fraction(0)
        return tuple(Fraction(self.p - l) + half for l in range(1, self.p + 1))

    @cached_property
    def gamma_exact(self) -> Fraction:
        return sum((d * d for d in self.delta), Fraction(0))

    @property
    def gamma(self) -> float:
        return float(self.gamma_exact)

    def __str__(self):
        return f"SO({self.n})"


def as_group(group) -> GroupDim:
    if isinstance(group, GroupDim):
        return group
    return GroupDim(int(group))


@dataclass(frozen=True)
class TorusAngles:
    """A point of the maximal torus, angles in radians (taken mod 2 pi)."""

    group: GroupDim
    theta: tuple[float, ...]
    canonical: bool = field(default=False, compare=False)

    def __post_init__(self):
        group = as_group(self.group)
        theta = tuple(float(t) for t in np.atleast_1d(np.asarray(self.theta, dtype=float)))
        if len(theta) != group.p:
            raise ValueError(f"{group} needs {group.p} angles, got {len(theta)}")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "theta", theta)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.theta)


def _theta_and_group(angles, group=None):
    if isinstance(angles, TorusAngles):
        return angles.array, angles.group
    if group is None:
        raise TypeError("raw angle arrays need an explicit group")
    return np.asarray(angles, dtype=float), as_group(group)


def planar_rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def block_rotation(angles, group=None) -> np.ndarray:
    """Block-diagonal rotation ``A_Theta`` (trailing 1 for odd n)."""
    theta, group = _theta_and_group(angles, group)
    A = np.eye(group.n)
    for j, t in enumerate(theta):
        A[2 * j:2 * j + 2, 2 * j:2 * j + 2] = planar_rotation(t)
    return A


def check_rotation(A, tol: float = 1e-9) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotARotation(f"expected a square matrix, got shape {A.shape}")
    ortho = np.max(np.abs(A.T @ A - np.eye(A.shape[0])))
    det = np.linalg.det(A)
    if ortho > tol or abs(det - 1.0) > tol:
        raise NotARotation(f"|A^T A - I| = {ortho:.3e}, det A = {det:.12g}")
    return A


def pfaffian(M) -> float:
    """Pfaffian of a real skew-symmetric matrix (Parlett-Reid elimination)."""
    A = np.array(M, dtype=float)
    n = A.shape[0]
    if n % 2:
        return 0.0
    pf = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(A[k + 1:, k])))
        if kp != k + 1:
            A[[k + 1, kp], :] = A[[kp, k + 1], :]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            pf = -pf
        if A[k + 1, k] == 0.0:
            return 0.0
        pf *= A[k, k + 1]
        if k + 2 < n:
            tau = A[k, k + 2:] / A[k, k + 1]
            col = A[k + 2:, k + 1].copy()
            A[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return pf


def canonical_theta(theta, group) -> np.ndarray:
    """Representative of the Weyl orbit of ``theta`` in the fundamental domain.

    Odd n: ``pi >= theta_1 >= ... >= theta_p >= 0``.
    Even n: ``pi >= theta_1 >= ... >= theta_{p-1} >= |theta_p|``; the sign of
    ``theta_p`` carries the orientation, and is positive whenever some angle
    sits at 0 or pi (where a sign flip is free).
    """
    group = as_group(group)
    t = np.mod(np.asarray(theta, dtype=float) + np.pi, TWO_PI) - np.pi
    a = np.abs(t)
    a[a > np.pi - _BOUNDARY_TOL] = np.pi
    a[a < _BOUNDARY_TOL] = 0.0
    order = np.argsort(-a, kind="stable")
    out = a[order]
    if not group.odd:
        free = np.any((a == 0.0) | (a == np.pi))
        negatives = int(np.sum(t[(a > 0.0) & (a < np.pi)] < 0))
        if not free and negatives % 2:
            out[-1] = -out[-1]
    return out


def canonicalize(angles: TorusAngles) -> TorusAngles:
    return TorusAngles(angles.group, tuple(canonical_theta(angles.theta, angles.group)), canonical=True)


def extract_angles(A, group=None, tol: float = 1e-9) -> TorusAngles:
    """Canonical torus angles of the conjugacy class of the rotation ``A``.

    Magnitudes come from the eigenvalues ``exp(+-i theta_j)``; for even n the
    orientation (sign of ``prod sin theta_j``) is read off the Pfaffian of
    ``A - A^T``, which is conjugation invariant under SO(n).
    """
    A = check_rotation(A)
    n = A.shape[0]
    group = as_group(n if group is None else group)
    if group.n != n:
        raise ValueError(f"matrix is {n}x{n} but group is {group}")
    ev = np.linalg.eigvals(A)
    upper = ev[ev.imag > tol]
    real = ev[np.abs(ev.imag) <= tol].real
    n_minus = int(np.sum(real < 0))
    n_plus = real.size - n_minus
    theta = list(np.angle(upper)) + [np.pi] * (n_minus // 2) + [0.0] * (n_plus // 2)
    if len(theta) != group.p:
        raise NotARotation(f"could not pair eigenvalues {ev}")
    theta = np.sort(np.array(theta))[::-1]
    if not group.odd and theta[-1] > 0.0 and theta[0] < np.pi:
        # Pf(A - A^T) = prod_j (-2 sin theta_j)
        if pfaffian(A - A.T) * (-1) ** group.p < 0:
            theta[-1] = -theta[-1]
    return TorusAngles(group, tuple(canonical_theta(theta, group)), canonical=True)


def weyl_generators(group) -> list[np.ndarray]:
    """Signed permutation matrices generating the Weyl group action on angles.

    Transpositions, plus paired sign flips (even n) or single flips (odd n).
    Acting on a row vector of angles: ``theta @ w.T``.
    """
    group = as_group(group)
    p = group.p
    gens = []
    for i, j in itertools.combinations(range(p), 2):
        w = np.eye(p)
        w[[i, j]] = w[[j, i]]
        gens.append(w)
        if not group.odd:
            w = np.eye(p)
            w[i, i] = w[j, j] = -1.0
            gens.append(w)
    if group.odd:
        for i in range(p):
            w = np.eye(p)
            w[i, i] = -1.0
            gens.append(w)
    return gens


def weyl_group(group) -> list[np.ndarray]:
    """All elements of the Weyl group as signed permutation matrices."""
    group = as_group(group)
    p = group.p
    out = []
    for perm in itertools.permutations(range(p)):
        for signs in itertools.product((1.0, -1.0), repeat=p):
            if not group.odd and np.prod(signs) < 0:
                continue
            w = np.zeros((p, p))
            w[np.arange(p), perm] = signs
            out.append(w)
    return out


def singular_distance(group, theta) -> np.ndarray:
    """Smallest denominator of the radial-Laplacian coefficients at ``theta``.

    ``min |cos theta_j - cos theta_k|`` over pairs, together with
    ``1 - cos theta_j`` for odd n. Works on batches ``(..., p)``.
    """
    group = as_group(group)
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta)
    terms = []
    for j, k in itertools.combinations(range(group.p), 2):
        terms.append(np.abs(c[..., j] - c[..., k]))
    if group.odd:
        terms.extend(1.0 - c[..., j] for j in range(group.p))
    if not terms:
        return np.full(theta.shape[:-1], np.inf)
    return np.min(np.stack(terms, axis=-1), axis=-1)
