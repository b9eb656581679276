import numpy as np
import pytest

from ofldg.basis import basis_set, eval_poly, gauss_rule, legendre_orthonormal


def test_orthonormal_legendre_point_values():
    x = np.linspace(-1, 1, 7)
    np.testing.assert_allclose(legendre_orthonormal(0, x),
                               np.full_like(x, 1 / np.sqrt(2)))
    assert legendre_orthonormal(1, 0.5) == pytest.approx(np.sqrt(1.5) * 0.5)
    # P2(x) = (3x^2 - 1)/2, so P2(0.5) = -1/8
    assert legendre_orthonormal(2, 0.5) == pytest.approx(np.sqrt(2.5) * (-0.125))


def test_orthonormality_under_matching_quadrature():
    for k in range(5):
        rule = gauss_rule(k + 2)
        vals = np.stack([legendre_orthonormal(m, rule.nodes)
                         for m in range(k + 1)])
        gram = (vals * rule.weights) @ vals.T
        np.testing.assert_allclose(gram, np.eye(k + 1), atol=1e-12)


def test_gauss_rules_low_order():
    r1 = gauss_rule(1)
    np.testing.assert_allclose(r1.nodes, [0.0], atol=0)
    np.testing.assert_allclose(r1.weights, [2.0], atol=0)
    r2 = gauss_rule(2)
    np.testing.assert_allclose(np.sort(r2.nodes),
                               [-1 / np.sqrt(3), 1 / np.sqrt(3)], atol=1e-15)
    np.testing.assert_allclose(r2.weights, [1.0, 1.0], atol=1e-15)


def test_gauss_rule_degree_of_exactness():
    """n points integrate monomials up to degree 2n - 1 exactly."""
    for n in range(1, 9):
        rule = gauss_rule(n)
        assert rule.weights.sum() == pytest.approx(2.0, abs=1e-14)
        for m in range(2 * n):
            exact = (1.0 - (-1.0) ** (m + 1)) / (m + 1)
            got = np.sum(rule.weights * rule.nodes ** m)
            assert got == pytest.approx(exact, abs=1e-13), (n, m)


def test_gauss_five_points_integrate_x8():
    rule = gauss_rule(5)
    val = np.sum(rule.weights * rule.nodes ** 8)
    assert abs(val - 2.0 / 9.0) <= 1e-14


def test_eval_poly_constant():
    coeffs = np.array([np.sqrt(2.0), 0.0, 0.0])   # the constant function 1
    assert eval_poly(coeffs, -1.0, 0, 0.5) == pytest.approx(1.0)
    assert eval_poly(coeffs, 0.3, 0, 2.0) == pytest.approx(1.0)
    assert eval_poly(coeffs, 0.3, 1, 2.0) == 0.0


def test_eval_poly_linear_derivative():
    # u(x) = x on the reference cell (width 2): du/dx = 1 everywhere
    coeffs = np.array([0.0, np.sqrt(2.0 / 3.0)])
    for xr in (-1.0, 0.0, 0.7):
        assert eval_poly(coeffs, xr, 1, 2.0) == pytest.approx(1.0)


def test_eval_poly_second_derivative_of_x_squared():
    """Project x^2 on a narrow cell and recover u'' = 2 via the chain rule."""
    width = 0.5
    center = 0.3
    rule = gauss_rule(6)
    x = center + 0.5 * width * rule.nodes
    k = 2
    vals = np.stack([legendre_orthonormal(m, rule.nodes) for m in range(k + 1)])
    coeffs = (vals * rule.weights) @ (x ** 2)
    assert eval_poly(coeffs, 0.1, 2, width) == pytest.approx(2.0, rel=1e-12)
    # first derivative at the left endpoint: 2*(center - width/2)
    assert eval_poly(coeffs, -1.0, 1, width) == pytest.approx(2 * (center - width / 2))


def test_eval_poly_reproduces_random_polynomials():
    rng = np.random.default_rng(20240817)
    for k in (1, 2, 3, 4):
        coeffs = rng.standard_normal(k + 1)
        pts = rng.uniform(-1, 1, 50)
        direct = sum(coeffs[m] * legendre_orthonormal(m, pts) for m in range(k + 1))
        got = np.array([eval_poly(coeffs, p, 0, 1.7) for p in pts])
        np.testing.assert_allclose(got, direct, rtol=1e-12)


def test_eval_poly_chain_rule_scaling():
    rng = np.random.default_rng(3)
    coeffs = rng.standard_normal(4)
    for order in (1, 2, 3):
        wide = eval_poly(coeffs, 0.25, order, 1.0)
        narrow = eval_poly(coeffs, 0.25, order, 0.5)
        assert narrow == pytest.approx(2.0 ** order * wide, rel=1e-12)


def test_eval_poly_rejects_negative_order():
    with pytest.raises(ValueError):
        eval_poly(np.array([1.0]), 0.0, -1, 1.0)


def test_basis_set_tables_are_consistent():
    bs = basis_set(3)
    assert bs.point_values.shape == (bs.quad.n_points, 4)
    # left/right traces match direct evaluation at the endpoints
    for m in range(4):
        assert bs.left_values[m] == pytest.approx(legendre_orthonormal(m, -1.0))
        assert bs.right_values[m] == pytest.approx(legendre_orthonormal(m, 1.0))
    # tabulated first derivatives agree with a central difference
    eps = 1e-6
    for m in range(4):
        fd = (legendre_orthonormal(m, bs.quad.nodes + eps)
              - legendre_orthonormal(m, bs.quad.nodes - eps)) / (2 * eps)
        np.testing.assert_allclose(bs.point_dx[:, m], fd, atol=1e-8)


def test_gauss_rule_rejects_bad_counts():
    with pytest.raises(ValueError):
        gauss_rule(0)
    with pytest.raises(ValueError):
        gauss_rule(33)
