import numpy as np
import pytest

from gapcert.errors import ConfigError
from gapcert.fields import parse_coefficient, parse_potential


def test_wells_potential_values():
    V = parse_potential({"type": "wells", "background": 0.5, "wells": [
        {"center": [0, 0], "radius": 1.0, "depth": -8.0}]}, 2)
    pts = np.array([[0.0, 0.0], [0.5, 0.5], [2.0, 0.0]])
    assert V(pts) == pytest.approx([-7.5, -7.5, 0.5])


def test_wells_dimension_mismatch():
    with pytest.raises(ConfigError):
        parse_potential({"type": "wells", "wells": [
            {"center": [0, 0, 0], "radius": 1.0, "depth": -1.0}]}, 2)


def test_constant_coefficient_window():
    A = parse_coefficient({"type": "constant", "diag": [1.0, 2.0]}, 2)
    assert (A.nu, A.mu) == (1.0, 2.0)
    widened = parse_coefficient({"type": "constant", "diag": [1, 1], "nu": 1, "mu": 2}, 2)
    assert (widened.nu, widened.mu) == (1.0, 2.0)
    with pytest.raises(ConfigError):
        parse_coefficient({"type": "constant", "diag": [1.0, 3.0], "nu": 1, "mu": 2}, 2)


def test_full_matrix_window_uses_eigenvalues():
    A = parse_coefficient({"type": "constant", "diag": [2.0, 2.0], "a12": 1.0}, 2)
    assert A.nu == pytest.approx(1.0)
    assert A.mu == pytest.approx(3.0)
    assert A.has_offdiag


def test_checkerboard_values_and_window():
    A = parse_coefficient({"type": "checkerboard", "low": 0.5, "high": 4.0}, 2)
    assert (A.nu, A.mu) == (0.5, 4.0)
    pts = np.array([[0.5, 0.5], [1.5, 0.5], [1.5, 1.5], [-0.5, 0.5]])
    diag = A.diag(pts)
    assert diag[:, 0] == pytest.approx([0.5, 4.0, 0.5, 4.0])
    assert np.array_equal(diag[:, 0], diag[:, 1])


def test_scaled_coefficient():
    A = parse_coefficient({"type": "constant", "diag": [1.0, 2.0]}, 2).scaled(0.25)
    assert (A.nu, A.mu) == (0.25, 0.5)
    pts = np.zeros((1, 2))
    assert A.diag(pts)[0] == pytest.approx([0.25, 0.5])
