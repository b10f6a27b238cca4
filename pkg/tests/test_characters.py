import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from soradial.characters import (DEGENERACY_TAU, CharacterFunction, character, character_complex,
                                 degeneracy, dimension, pi_n)
from soradial.torus import GroupDim, TorusAngles, block_rotation, weyl_generators
from soradial.weights import SpectralLine, enumerate_dominant, weyl_dimension

angle = st.floats(-np.pi, np.pi, allow_nan=False)


def line(n, lam):
    return SpectralLine.from_weight(n, lam)


def elementary(A, k):
    """k-th elementary symmetric polynomial of the eigenvalues (trace of the k-th exterior power)."""
    coeffs = np.poly(np.linalg.eigvals(A))
    return float(((-1) ** k * coeffs[k]).real)


# -- Pi_n --------------------------------------------------------------------------

def test_pi_examples():
    assert pi_n(4, np.array([0.5, 2.0])) == pytest.approx(np.cos(0.5) - np.cos(2.0), abs=1e-15)
    assert pi_n(4, np.array([0.5, 2.0])) == pytest.approx(1.293729398437515, abs=1e-14)
    assert pi_n(3, np.array([np.pi])) == pytest.approx(1.0)
    assert pi_n(3, np.array([0.8])) == pytest.approx(np.sin(0.4))
    for n in (4, 6, 8):
        theta = np.linspace(0.3, 2.5, n // 2)
        theta[1] = theta[0]
        assert pi_n(n, theta) == 0.0


# -- closed forms and matrix oracles ------------------------------------------------

def test_character_examples():
    assert character(line(3, (1,)), np.pi / 2) == pytest.approx(1.0, abs=1e-12)
    assert character(line(4, (1, 0)), np.array([0.3, 1.1])) == pytest.approx(2.8178652211023665, abs=1e-12)
    assert character(line(3, (0,)), 2.2) == 1.0


@pytest.mark.parametrize("n", range(3, 10))
@given(data=st.data())
def test_trivial_character(n, data):
    theta = np.array(data.draw(st.lists(angle, min_size=n // 2, max_size=n // 2)))
    assert character(line(n, (0,) * (n // 2)), theta) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("l", range(0, 7))
@given(theta=angle)
def test_so3_closed_form(l, theta):
    if abs(np.sin(theta / 2)) < 1e-3:
        return
    expected = np.sin((l + 0.5) * theta) / np.sin(theta / 2)
    assert character(line(3, (l,)), theta) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("n", range(3, 9))
@given(data=st.data())
def test_standard_is_trace(n, data):
    theta = np.array(data.draw(st.lists(angle, min_size=n // 2, max_size=n // 2)))
    std = line(n, (1,) + (0,) * (n // 2 - 1))
    assert character(std, theta) == pytest.approx(np.trace(block_rotation(theta, n)), abs=1e-9)


@pytest.mark.parametrize("n", range(5, 10))
def test_exterior_powers(n, rng):
    group = GroupDim(n)
    top = group.p if group.odd else group.p - 1
    for k in range(1, top + 1):
        ln = line(n, (1,) * k + (0,) * (group.p - k))
        for _ in range(20):
            theta = rng.uniform(-np.pi, np.pi, group.p)
            if rng.random() < 0.3:
                theta[-1] = theta[0]  # exercise the confluent route
            assert character(ln, theta) == pytest.approx(elementary(block_rotation(theta, group), k), abs=1e-9)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_middle_exterior_power_splits(n, rng):
    p = n // 2
    plus = (1,) * p
    minus = (1,) * (p - 1) + (-1,)
    for _ in range(20):
        theta = rng.uniform(-np.pi, np.pi, p)
        total = character_complex(line(n, plus), theta) + character_complex(line(n, minus), theta)
        assert total.real == pytest.approx(elementary(block_rotation(theta, n), p), abs=1e-9)
        assert abs(total.imag) < 1e-9


@pytest.mark.parametrize("n", range(3, 9))
def test_symmetric_square(n, rng):
    ln = line(n, (2,) + (0,) * (n // 2 - 1))
    for _ in range(20):
        theta = rng.uniform(-np.pi, np.pi, n // 2)
        A = block_rotation(theta, n)
        expected = (np.trace(A) ** 2 + np.trace(A @ A)) / 2 - 1
        assert character(ln, theta) == pytest.approx(expected, abs=1e-9)


def su2(m, phi):
    # character of the (m+1)-dimensional SU(2) representation
    if abs(np.sin(phi / 2)) < 1e-9:
        return (m + 1) * np.cos(phi / 2) ** m
    return np.sin((m + 1) * phi / 2) / np.sin(phi / 2)


@pytest.mark.parametrize("lam", [(1, 0), (1, 1), (1, -1), (2, 0), (2, 1), (2, -2), (3, -1)])
def test_so4_via_su2(lam, rng):
    a, b = lam
    for _ in range(20):
        t1, t2 = rng.uniform(-np.pi, np.pi, 2)
        expected = su2(a + b, t1 + t2) * su2(a - b, t1 - t2)
        assert character(line(4, lam), np.array([t1, t2])) == pytest.approx(expected, abs=1e-9)


# frozen 120-digit reference values of the Weyl character ratio, including
# exactly coincident angles (limit taken by an O(1e-30) perturbation)
MP_REFERENCE = [
    (5, (2, 1), (0.7, 0.7), 18.5778277213543125, 0.0),
    (5, (2, 1), (0.0, 2.0), -0.412504783030234454, 0.0),
    (5, (3, 0), (1.3, 0.4), 4.28074273783912097, 0.0),
    (6, (3, 1, -1), (1.0, 1.0, 0.3), 13.255510564440431, 6.93300022355420334),
    (6, (3, 1, -1), (1.1, 0.6, -0.3), 24.963678150989431, -6.29524203921069256),
    (6, (2, 2, 2), (0.4, 0.4, 0.0), 27.0174175761160612, 0.0),
    (7, (2, 2, 1), (0.5, 0.5, 0.0), 275.579745423785169, 0.0),
    (8, (2, 1, 1, 0), (2.0, 1.0, 1.0, 0.2), 11.1722027582554028, 0.0),
    (8, (1, 1, 1, -1), (0.9, 0.9, 0.2, 0.2), 20.9106598655393147, 0.0),
]


@pytest.mark.parametrize("n,lam,theta,re,im", MP_REFERENCE)
def test_high_precision_reference(n, lam, theta, re, im):
    z = complex(character_complex(line(n, lam), np.array(theta)))
    assert abs(z - complex(re, im)) <= 1e-10 * (1 + abs(re))


# -- structural properties ------------------------------------------------------------

@pytest.mark.parametrize("n", range(3, 9))
def test_weyl_invariance_and_periodicity(n, rng):
    group = GroupDim(n)
    for ln in enumerate_dominant(group, 16):
        theta = rng.uniform(-np.pi, np.pi, (10, group.p))
        base = character(ln, theta)
        for w in weyl_generators(group):
            assert np.max(np.abs(character(ln, theta @ w.T) - base)) <= 1e-9
        for j in range(group.p):
            shifted = theta.copy()
            shifted[:, j] += 2 * np.pi
            assert np.max(np.abs(character(ln, shifted) - base)) <= 1e-9


@pytest.mark.parametrize("n", range(3, 9))
def test_fast_and_confluent_agree_near_degeneracy(n, rng):
    group = GroupDim(n)
    for ln in enumerate_dominant(group, 20):
        theta = rng.uniform(0.2, 2.9, (10, group.p))
        if group.p > 1:
            theta[:, 1] = theta[:, 0] + 10 * DEGENERACY_TAU
        else:
            theta[:, 0] = 10 * DEGENERACY_TAU
        fast = character_complex(ln, theta, path="fast")
        slow = character_complex(ln, theta, path="confluent")
        assert np.max(np.abs(fast - slow)) <= 1e-8 * (1 + np.max(np.abs(slow)))


def test_degeneracy_measure():
    assert degeneracy(5, np.array([1.0, 1.0])) == 0.0
    assert degeneracy(3, np.array([0.0])) == 0.0


@pytest.mark.parametrize("n", range(3, 9))
def test_dimension_matches_weyl_formula(n):
    for ln in enumerate_dominant(n, 30):
        assert dimension(ln) == weyl_dimension(ln.weight) == ln.dim


def test_dimension_examples():
    assert dimension(line(7, (0, 0, 0))) == 1
    assert dimension(line(3, (2,))) == 5
    assert dimension(line(5, (1, 0))) == 5


def test_complex_pairs_so6(rng):
    ln, conj = line(6, (2, 1, 1)), line(6, (2, 1, -1))
    theta = rng.uniform(-np.pi, np.pi, (20, 3))
    z, zc = character_complex(ln, theta), character_complex(conj, theta)
    assert np.allclose(zc, np.conj(z), atol=1e-10)
    assert np.allclose(character(ln, theta), np.sqrt(2) * z.real)
    assert np.allclose(character(conj, theta), np.sqrt(2) * z.imag)


def test_character_function_wrapper():
    f = CharacterFunction(line(4, (1, 0)))
    assert f(TorusAngles(4, (0.0, 0.0))) == pytest.approx(4.0)
    assert f.group.n == 4


def test_bad_path():
    with pytest.raises(ValueError):
        character_complex(line(4, (1, 0)), np.zeros(2), path="slow")
    with pytest.raises(ValueError):
        character(line(4, (1, 0)), np.zeros(3))
