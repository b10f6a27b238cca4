import numpy as np
import pytest
from scipy import stats
from scipy.linalg import expm

from soradial import ambient
from soradial.ambient import (adjoint, bracket, class_function, commutator_table_defect,
                              conjugation_invariance_check, embedded_laplacian, group_laplacian,
                              haar_sample, inner, random_orthonormal_basis, rho_derivative,
                              skew_basis, tangent_projection, verify_fonda)
from soradial.errors import NotClassFunction
from soradial.radial import TorusFunction, apply_radial_laplacian
from soradial.torus import GroupDim, block_rotation, extract_angles, singular_distance
from soradial.verify import random_invariant_trig_poly
from soradial.weights import SpectralLine, enumerate_dominant


def const(A):
    return 1.0


def chi1(A):
    return float(np.trace(A))


def random_skew(rng, n):
    M = rng.normal(size=(n, n))
    return (M - M.T) / 2


# -- Lie algebra -------------------------------------------------------------------

@pytest.mark.parametrize("n", range(3, 7))
def test_commutator_table(n):
    assert commutator_table_defect(n) == 0


@pytest.mark.parametrize("n", [3, 5, 8])
def test_basis_orthonormal(n):
    F = skew_basis(n)
    assert len(F) == n * (n - 1) // 2
    G = np.array([[inner(a, b) for b in F] for a in F])
    assert np.array_equal(G, np.eye(len(F)))
    assert all(ambient.is_skew(X) for X in F)


def test_bracket_example():
    F12, F13, F23 = skew_basis(3)
    assert np.array_equal(bracket(F12, F23), F13)


def test_inner_product_ad_invariant(rng):
    for n in (3, 4, 6):
        for _ in range(10):
            A = haar_sample(rng, n)
            X, Y = random_skew(rng, n), random_skew(rng, n)
            assert abs(inner(adjoint(A, X), adjoint(A, Y)) - inner(X, Y)) <= 1e-12


def test_exponential(rng):
    X = random_skew(rng, 5)
    assert np.max(np.abs(expm(X) @ expm(-X) - np.eye(5))) <= 1e-12
    t = 0.7
    F12 = skew_basis(3)[0]
    assert np.allclose(expm(t * F12), block_rotation(np.array([-t]), 3), atol=1e-14)


# -- Haar sampling -----------------------------------------------------------------

def test_haar_samples_are_rotations(rng):
    A = haar_sample(rng, 6, 200)
    assert np.max(np.abs(np.einsum("kji,kjl->kil", A, A) - np.eye(6))) <= 1e-12
    assert np.allclose(np.linalg.det(A), 1.0)
    single = haar_sample(rng, 4)
    assert single.shape == (4, 4)


def test_haar_deterministic():
    a = haar_sample(np.random.default_rng(5), 4, 3)
    b = haar_sample(np.random.default_rng(5), 4, 3)
    assert np.array_equal(a, b)


def test_haar_trace_moments():
    A = haar_sample(np.random.default_rng(11), 4, 100_000)
    tr = np.trace(A, axis1=1, axis2=2)
    for vals, expected in ((tr, 0.0), (tr ** 2, 1.0)):
        se = vals.std(ddof=1) / np.sqrt(vals.size)
        assert abs(vals.mean() - expected) <= 4 * se


def test_haar_rotation_angle_distribution():
    # SO(3) rotation angles have density (1 - cos t) / pi on [0, pi]
    A = haar_sample(np.random.default_rng(3), 3, 20_000)
    t = np.arccos(np.clip((np.trace(A, axis1=1, axis2=2) - 1) / 2, -1, 1))
    p = stats.kstest(t, lambda x: (x - np.sin(x)) / np.pi).pvalue
    assert p > 1e-3


# -- derivatives -------------------------------------------------------------------

def test_rho_derivative_examples():
    F12 = skew_basis(3)[0]
    assert rho_derivative(chi1, np.eye(3), F12, 1) == pytest.approx(0.0, abs=1e-12)
    assert rho_derivative(lambda A: A[0, 0], np.eye(3), F12, 2) == pytest.approx(-1.0, abs=1e-6)
    with pytest.raises(ValueError):
        rho_derivative(chi1, np.eye(3), F12, 3)


def test_constant_laplacians(rng):
    A = haar_sample(rng, 4)
    assert group_laplacian(const, A) == pytest.approx(0.0, abs=1e-10)
    assert embedded_laplacian(const, A) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_standard_character_eigen(n, rng):
    for A in haar_sample(rng, n, 5):
        assert group_laplacian(chi1, A) == pytest.approx(-(n - 1) * chi1(A), abs=1e-5)


def test_basis_independence(rng):
    f = ambient.random_polynomial(4, rng)
    A = haar_sample(rng, 4)
    assert group_laplacian(f, A, random_orthonormal_basis(4, rng)) == pytest.approx(group_laplacian(f, A), abs=1e-4)


def test_tangent_projection(rng):
    A = haar_sample(rng, 5)
    M = rng.normal(size=(5, 5))
    V = tangent_projection(A, M)
    assert ambient.is_skew(A.T @ V, tol=1e-12)
    assert np.allclose(tangent_projection(A, V), V, atol=1e-12)
    # the residual is orthogonal to the tangent space
    for F in skew_basis(5):
        assert abs(np.trace((M - V).T @ (A @ F))) <= 1e-12


@pytest.mark.parametrize("n", [3, 4])
def test_embedded_equals_group(n, rng):
    for _ in range(5):
        f = ambient.random_polynomial(n, rng)
        A = haar_sample(rng, n)
        assert abs(embedded_laplacian(f, A) - group_laplacian(f, A)) <= 1e-3


def test_left_right_invariance(rng):
    f = ambient.random_polynomial(4, rng)
    A, B = haar_sample(rng, 4, 2)
    assert ambient.left_invariance_residual(f, A, B) <= 1e-4
    assert ambient.right_invariance_residual(f, A, B) <= 1e-4


@pytest.mark.parametrize("n", [3, 4, 5])
def test_bridge_identity(n, rng):
    group = GroupDim(n)
    for _ in range(4):
        phi = random_invariant_trig_poly(group, rng, degree=2)
        f = lambda A, phi=phi: float(phi(extract_angles(A, group).array))
        while True:
            theta = rng.uniform(-np.pi, np.pi, group.p)
            if singular_distance(group, theta) >= 0.2:
                break
        lhs = group_laplacian(f, block_rotation(theta, group))
        rhs = apply_radial_laplacian(TorusFunction(phi, group), theta, "direct")
        assert abs(lhs - float(rhs)) <= 2e-3


# -- class-function identity ---------------------------------------------------------

def test_fonda_on_torus_commuting():
    A = block_rotation(np.array([0.9]), 3)
    X = skew_basis(3)[0]
    assert np.allclose(adjoint(A.T, X), X, atol=1e-15)
    assert verify_fonda(class_function(SpectralLine.from_weight(3, (1,))), A, X) <= 1e-9


def test_fonda_class_and_negative_control(rng):
    f = class_function(SpectralLine.from_weight(3, (1,)))
    hits = 0
    for _ in range(20):
        A, X = haar_sample(rng, 3), random_skew(rng, 3)
        assert verify_fonda(f, A, X, rng=rng) <= 1e-4
        hits += verify_fonda(lambda M: M[0, 1], A, X, check=False) > 1e-2
    assert hits >= 18


def test_fonda_rejects_non_class(rng):
    with pytest.raises(NotClassFunction):
        verify_fonda(lambda M: M[0, 1], haar_sample(rng, 3), random_skew(rng, 3))


def test_conjugation_invariance(rng):
    f = class_function(SpectralLine.from_weight(3, (1,)))
    A, g = haar_sample(rng, 3, 2)
    assert conjugation_invariance_check(f, A, g) <= 1e-4
    assert conjugation_invariance_check(const, A, g) == 0.0


def test_class_function_matches_trace(rng):
    for n in (4, 5, 6):
        f = class_function(enumerate_dominant(n, n - 1)[1])
        A = haar_sample(rng, n)
        assert f(A) == pytest.approx(np.trace(A), abs=1e-9)
