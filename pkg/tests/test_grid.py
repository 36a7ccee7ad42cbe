import numpy as np
import pytest

from modgp.grid import QuadratureRule, gauss_legendre, make_grid, trapezoid, uniform_trapezoid


@pytest.mark.parametrize("n", [1, 2, 17, 400])
def test_gauss_legendre_weights_sum(n):
    g = gauss_legendre(0.0, 4.0, n)
    assert g.weights.sum() == pytest.approx(4.0, abs=1e-10 * 4)
    assert np.all(np.diff(g.nodes) > 0) and np.all(g.weights > 0)


def test_gauss_legendre_exact_for_polynomials():
    g = gauss_legendre(1.0, 3.0, 5)
    assert g.integrate(g.nodes**9) == pytest.approx((3**10 - 1) / 10, rel=1e-13)


def test_trapezoid_nonuniform():
    g = trapezoid([0.0, 1.0, 3.0])
    np.testing.assert_array_equal(g.weights, [0.5, 1.5, 1.0])
    assert g.rule is QuadratureRule.TRAPEZOID


def test_norm_and_inner():
    g = uniform_trapezoid(0, 1, 2)
    assert g.norm([1.0, 1.0]) == 1.0
    assert g.inner([1.0, 0.0], [0.0, 1.0]) == 0.0


def test_duplicate_nodes_rejected():
    with pytest.raises(ValueError, match="strictly increasing"):
        trapezoid([0.0, 1.0, 1.0, 2.0])


def test_grid_is_read_only():
    g = make_grid("GaussLegendre", 0, 1, 4)
    with pytest.raises(ValueError):
        g.nodes[0] = 5.0
