"""Weyl characters of SO(n) on the maximal torus.

Two evaluation routes:

* fast: the determinant ratio of the Weyl character formula, divided by the
  closed-form Weyl denominator ``c_n * Pi_n``. Accurate away from the
  singular set ``{Pi_n = 0}``.
* confluent: every column of the numerator is a polynomial in
  ``X_k = 2 cos theta_k`` (after factoring ``sin(theta_k / 2)`` or
  ``sin theta_k``), so the ratio by the Vandermonde determinant equals the
  determinant of divided differences, which we expand in complete
  homogeneous symmetric polynomials. No division occurs, so the result is
  finite and accurate at coincident angles.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericalDegeneracy
from .torus import TorusAngles, as_group
from .weights import SpectralLine

# Fast path is used only when every factor of Pi_n exceeds DEGENERACY_TAU
# and |Pi_n| itself exceeds PI_TAU (a product of several factors just above
# tau still loses digits for p >= 3).
DEGENERACY_TAU = 1e-3
PI_TAU = 1e-3
_SQRT2 = np.sqrt(2.0)


def _theta_batch(theta, p):
    if isinstance(theta, TorusAngles):
        theta = theta.array
    theta = np.asarray(theta, dtype=float)
    if p == 1 and theta.shape[-1:] != (1,):
        # rank one: allow bare angles
        theta = theta[..., None]
    if theta.shape[-1] != p:
        raise ValueError(f"expected trailing dimension {p}, got shape {theta.shape}")
    return theta


def pi_n(group, theta) -> np.ndarray:
    """``prod_{j<k} (cos theta_j - cos theta_k)``, times ``prod sin(theta_j/2)`` for odd n."""
    if isinstance(theta, TorusAngles):
        group = theta.group
    group = as_group(group)
    theta = _theta_batch(theta, group.p)
    c = np.cos(theta)
    out = np.ones(theta.shape[:-1])
    for j, k in itertools.combinations(range(group.p), 2):
        out = out * (c[..., j] - c[..., k])
    if group.odd:
        out = out * np.prod(np.sin(theta / 2.0), axis=-1)
    return out


def degeneracy(group, theta) -> np.ndarray:
    """Smallest factor of ``|Pi_n|``: ``|cos theta_j - cos theta_k|`` and, odd n, ``|sin(theta_j/2)|``."""
    group = as_group(group)
    theta = _theta_batch(theta, group.p)
    c = np.cos(theta)
    terms = [np.abs(c[..., j] - c[..., k]) for j, k in itertools.combinations(range(group.p), 2)]
    if group.odd:
        terms.extend(np.abs(np.sin(theta[..., j] / 2.0)) for j in range(group.p))
    return np.min(np.stack(terms, axis=-1), axis=-1)


def denominator_scale(group) -> complex:
    """``c_n`` with ``A_delta = c_n * Pi_n`` for the determinants used here.

    Even n: ``det(2 cos(delta_l theta_k)) = 2^(1 + p(p-1)/2) Pi_2p``.
    Odd n:  ``det(2i sin(delta_l theta_k)) = (2i)^p 2^(p(p-1)/2) Pi_2p+1``.
    """
    group = as_group(group)
    p = group.p
    if group.odd:
        return (2j) ** p * 2.0 ** (p * (p - 1) // 2)
    return 2.0 ** (1 + p * (p - 1) // 2)


# -- polynomial columns in X = 2 cos(theta) -----------------------------------

@lru_cache(maxsize=None)
def _cos_poly(m: int) -> tuple[float, ...]:
    """Coefficients (low to high) of ``2 cos(m theta)`` as a polynomial in X."""
    m = abs(m)
    prev, cur = np.array([2.0]), np.array([0.0, 1.0])
    if m == 0:
        return tuple(prev)
    for _ in range(m - 1):
        nxt = np.zeros(cur.size + 1)
        nxt[1:] += cur
        nxt[:prev.size] -= prev
        prev, cur = cur, nxt
    return tuple(cur)


@lru_cache(maxsize=None)
def _sin_poly(m: int) -> tuple[float, ...]:
    """Coefficients of ``sin(m theta) / sin(theta)`` in X (odd in m)."""
    sign = -1.0 if m < 0 else 1.0
    m = abs(m)
    if m == 0:
        return (0.0,)
    prev, cur = np.array([0.0]), np.array([1.0])
    for _ in range(m - 1):
        nxt = np.zeros(cur.size + 1)
        nxt[1:] += cur
        nxt[:prev.size] -= prev
        prev, cur = cur, nxt
    return tuple(sign * cur)


@lru_cache(maxsize=None)
def _half_sin_poly(m: int) -> tuple[float, ...]:
    """Coefficients of ``sin((m + 1/2) theta) / sin(theta / 2) = 1 + sum_{r<=m} 2 cos(r theta)``."""
    out = np.zeros(m + 1)
    out[0] = 1.0
    for r in range(1, m + 1):
        c = np.array(_cos_poly(r))
        out[:c.size] += c
    return tuple(out)


def _vandermonde_ratio(polys, X) -> np.ndarray:
    """``det(g_l(X_k)) / prod_{k<l} (X_k - X_l)`` without division.

    Uses ``det(g_l(X_k)) = prod_{k<l}(X_l - X_k) * det(g_l[X_1..X_k])`` and
    ``X^d[X_1..X_k] = h_{d-k+1}(X_1..X_k)`` (complete homogeneous polynomials).
    """
    M, p = X.shape
    D = max(len(c) for c in polys) - 1
    # H[:, k, j] = h_j(X_1, ..., X_{k+1})
    H = np.zeros((M, p, D + 1))
    h = np.zeros((M, D + 1))
    h[:, 0] = 1.0
    for k in range(p):
        new = np.empty_like(h)
        new[:, 0] = 1.0
        for j in range(1, D + 1):
            new[:, j] = h[:, j] + X[:, k] * new[:, j - 1]
        h = new
        H[:, k, :] = h
    DD = np.zeros((M, p, p))
    for l, coeffs in enumerate(polys):
        for d, a in enumerate(coeffs):
            if a == 0.0:
                continue
            for k in range(min(d, p - 1) + 1):
                DD[:, k, l] += a * H[:, k, d - k]
    sign = -1.0 if (p * (p - 1) // 2) % 2 else 1.0
    return sign * np.linalg.det(DD)


def _confluent(line: SpectralLine, theta: np.ndarray) -> np.ndarray:
    group = line.group
    X = 2.0 * np.cos(theta)
    l = line.weight.shifted
    if group.odd:
        polys = [_half_sin_poly(int(x - 0.5)) for x in l]
        return _vandermonde_ratio(polys, X).astype(complex)
    li = [int(x) for x in l]
    out = _vandermonde_ratio([_cos_poly(m) for m in li], X).astype(complex)
    if line.lam[-1] != 0:
        s = _vandermonde_ratio([_sin_poly(m) for m in li], X)
        out = out + (2j) ** group.p * np.prod(np.sin(theta), axis=-1) * s
    return out / 2.0


def _fast(line: SpectralLine, theta: np.ndarray) -> np.ndarray:
    group = line.group
    l = np.array(line.shifted)
    arg = theta[:, :, None] * l[None, None, :]          # [point, k, l]
    den = denominator_scale(group) * pi_n(group, theta)
    if group.odd:
        num = (2j) ** group.p * np.linalg.det(np.sin(arg))
        return num / den
    num = 2.0 ** group.p * np.linalg.det(np.cos(arg)).astype(complex)
    if line.lam[-1] != 0:
        num = num + (2j) ** group.p * np.linalg.det(np.sin(arg))
    return num / den


def character_complex(line: SpectralLine, theta, *, path: str = "auto") -> np.ndarray:
    """Weyl character ``chi_lambda(A_Theta)`` (complex in general).

    ``path`` is ``"auto"``, ``"fast"`` or ``"confluent"``; ``auto`` picks the
    fast path when the degeneracy measure exceeds ``DEGENERACY_TAU`` and
    ``|Pi_n| > PI_TAU``.
    """
    group = line.group
    theta = _theta_batch(theta, group.p)
    shape = theta.shape[:-1]
    flat = theta.reshape(-1, group.p)
    if path == "fast":
        out = _fast(line, flat)
    elif path == "confluent":
        out = _confluent(line, flat)
    elif path == "auto":
        out = np.empty(flat.shape[0], dtype=complex)
        ok = (degeneracy(group, flat) > DEGENERACY_TAU) & (np.abs(pi_n(group, flat)) > PI_TAU)
        if np.any(ok):
            out[ok] = _fast(line, flat[ok])
        if not np.all(ok):
            out[~ok] = _confluent(line, flat[~ok])
    else:
        raise ValueError(f"unknown path {path!r}")
    if not np.all(np.isfinite(out)):
        raise NumericalDegeneracy(f"non-finite character value for lambda={line.lam}")
    return out.reshape(shape)


def character(line: SpectralLine, theta, *, path: str = "auto") -> np.ndarray:
    """Real character basis function ``phi_lambda`` on the torus.

    Equals the Weyl character whenever it is real-valued (odd n, n divisible
    by 4, or ``lambda_p = 0``). For the complex-conjugate pairs of SO(4k+2)
    the pair ``{chi, conj(chi)}`` is replaced by the real orthonormal pair
    ``sqrt(2) Re chi`` (for ``lambda_p > 0``) and ``sqrt(2) Im chi`` (for
    ``lambda_p < 0``, taken from the conjugate weight); both are eigenfunctions
    of the radial Laplacian with the same eigenvalue.
    """
    z = character_complex(line, theta, path=path)
    if line.is_real:
        bad = np.abs(z.imag) > 1e-9 * (1.0 + np.abs(z.real))
        if np.any(bad):
            raise NumericalDegeneracy(
                f"imaginary residue {np.max(np.abs(z.imag)):.2e} for real character {line.lam}")
        return z.real
    if line.lam[-1] > 0:
        return _SQRT2 * z.real
    return -_SQRT2 * z.imag


def dimension(line: SpectralLine) -> int:
    """Character value at the identity, rounded (residue must be below 1e-6)."""
    value = character_complex(line, np.zeros(line.group.p), path="confluent")
    value = complex(value)
    d = round(value.real)
    if abs(value - d) >= 1e-6:
        raise NumericalDegeneracy(f"character at identity is {value}, not an integer")
    return int(d)


@dataclass(frozen=True)
class CharacterFunction:
    """A character as a callable on torus angles (batched over leading axes)."""

    line: SpectralLine

    @property
    def group(self):
        return self.line.group

    def __call__(self, theta):
        return character(self.line, theta)
