"""Dominant weights, Casimir eigenvalues and spectrum enumeration."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotDominant
from .torus import GroupDim, as_group


def is_dominant(group, lam) -> bool:
    group = as_group(group)
    lam = tuple(lam)
    if len(lam) != group.p or any(int(x) != x for x in lam):
        return False
    if any(lam[i] < lam[i + 1] for i in range(group.p - 1)):
        return False
    if group.odd:
        return lam[-1] >= 0
    if group.p == 1:
        return True
    return lam[-2] >= abs(lam[-1])


@dataclass(frozen=True)
class DominantWeight:
    group: GroupDim
    lam: tuple[int, ...]

    def __post_init__(self):
        group = as_group(self.group)
        lam = tuple(int(x) for x in self.lam)
        if len(lam) != group.p or lam != tuple(self.lam) or not is_dominant(group, lam):
            raise NotDominant(f"{tuple(self.lam)} is not a dominant weight of {group}")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "lam", lam)

    @property
    def shifted(self) -> tuple[Fraction, ...]:
        """``lambda + delta``."""
        return tuple(l + d for l, d in zip(self.lam, self.group.delta))


def shift_delta(group) -> tuple[Fraction, ...]:
    return as_group(group).delta


def casimir_eigenvalue(w: DominantWeight) -> Fraction:
    """``|lambda + delta|^2 - |delta|^2`` in exact arithmetic."""
    if not isinstance(w, DominantWeight):
        raise TypeError("casimir_eigenvalue expects a DominantWeight")
    if not is_dominant(w.group, w.lam):
        raise NotDominant(str(w.lam))
    return sum((x * x for x in w.shifted), Fraction(0)) - w.group.gamma_exact


def weyl_dimension(w: DominantWeight) -> int:
    """Weyl dimension formula (product over positive roots)."""
    l, d = w.shifted, w.group.delta
    p = w.group.p
    num = den = Fraction(1)
    for i in range(p):
        for j in range(i + 1, p):
            num *= l[i] * l[i] - l[j] * l[j]
            den *= d[i] * d[i] - d[j] * d[j]
        if w.group.odd:
            num *= l[i]
            den *= d[i]
    value = num / den
    assert value.denominator == 1
    return int(value)


@dataclass(frozen=True)
class SpectralLine:
    """One irreducible representation: weight, shift, eigenvalue, dimension."""

    weight: DominantWeight
    kappa_exact: Fraction
    dim: int

    @classmethod
    def from_weight(cls, group, lam) -> "SpectralLine":
        w = DominantWeight(as_group(group), tuple(lam))
        return cls(w, casimir_eigenvalue(w), weyl_dimension(w))

    @property
    def group(self) -> GroupDim:
        return self.weight.group

    @property
    def lam(self) -> tuple[int, ...]:
        return self.weight.lam

    @property
    def delta(self) -> tuple[Fraction, ...]:
        return self.weight.group.delta

    @property
    def kappa(self) -> float:
        return float(self.kappa_exact)

    @property
    def shifted(self) -> tuple[float, ...]:
        return tuple(float(x) for x in self.weight.shifted)

    @property
    def is_real(self) -> bool:
        """False for the complex-conjugate pairs of SO(4k+2) (``lambda_p != 0``)."""
        g = self.group
        return g.odd or g.p % 2 == 0 or self.lam[-1] == 0

    @property
    def conjugate_lam(self) -> tuple[int, ...]:
        if self.group.odd:
            return self.lam
        return self.lam[:-1] + (-self.lam[-1],)


def enumerate_dominant(group, kappa_max) -> list[SpectralLine]:
    """All dominant weights with ``kappa <= kappa_max``, sorted by ``(kappa, lambda)``.

    The search is bounded by ``|lambda + delta|^2 <= kappa_max + gamma``.
    """
    group = as_group(group)
    kmax = Fraction(kappa_max)
    if kmax < 0:
        raise ValueError("kappa_max must be non-negative")
    budget = kmax + group.gamma_exact
    delta = group.delta
    p = group.p
    found = []

    def rec(prefix, used):
        i = len(prefix)
        if i == p:
            lam = tuple(prefix)
            if is_dominant(group, lam):
                found.append(lam)
            return
        upper = prefix[-1] if prefix else math.isqrt(int(budget)) + 1
        lower = -upper if (not group.odd and i == p - 1) else 0
        for v in range(lower, upper + 1):
            s = (v + delta[i]) ** 2
            if used + s > budget:
                continue
            rec(prefix + [v], used + s)

    rec([], Fraction(0))
    lines = [SpectralLine.from_weight(group, lam) for lam in found]
    lines = [ln for ln in lines if ln.kappa_exact <= kmax]
    lines.sort(key=lambda ln: (ln.kappa_exact, ln.lam))
    return lines
