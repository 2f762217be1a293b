import numpy as np
import pytest

from regdae.oracles import contour_dunford_projection, determinant_roots, matched_distance


def test_determinant_roots_example():
    roots = determinant_roots(np.diag([1.0, 0.0]), np.array([[3.0, 1.0], [2.0, 1.0]]))
    np.testing.assert_allclose(roots, [-1.0], atol=1e-13)


def test_determinant_roots_of_diagonal():
    roots = determinant_roots(np.eye(3), -np.diag([1.0, 2j, -3.0]))
    assert matched_distance(roots, [1.0, 2j, -3.0]) <= 1e-12


def test_no_finite_roots_when_m0_zero():
    assert determinant_roots(np.zeros((2, 2)), np.eye(2)).size == 0


def test_matched_distance():
    assert matched_distance([1, 2, 3], [3.0, 1.0, 2.0 + 1e-3]) == pytest.approx(1e-3)
    assert matched_distance([1], [1, 2]) == float("inf")
    assert matched_distance([], []) == 0.0


def test_contour_projection_example():
    p = contour_dunford_projection(np.array([[-1.0, 5.0], [0.0, 2.0]]))
    np.testing.assert_allclose(p, [[1.0, -5.0 / 3.0], [0.0, 0.0]], atol=1e-11)


def test_contour_projection_extremes():
    np.testing.assert_allclose(contour_dunford_projection(np.diag([-1.0, -2.0 + 3j])), np.eye(2), atol=1e-11)
    np.testing.assert_allclose(contour_dunford_projection(np.diag([1.0, 2.0])), np.zeros((2, 2)), atol=1e-11)
