import numpy as np
import pytest

from kacward.utils.constants import MAX_QUAD_RES
from kacward.utils.exceptions import QuadratureResolutionError
from kacward.utils.quadrature import (
    QuadratureSpec,
    integrate_periodic,
    periodic_mean,
    periodic_nodes,
    quad_spec,
    richardson_h2,
)


def test_nodes():
    nodes = periodic_nodes(4)
    shifted = periodic_nodes(4, offset=True)

    assert np.allclose(nodes, [0, np.pi / 2, np.pi, 3 * np.pi / 2])
    assert shifted[0] == pytest.approx(np.pi / 4)
    with pytest.raises(QuadratureResolutionError):
        periodic_nodes(0)


def test_periodic_mean_is_exact_for_trigonometric_polynomials():
    # cos^2 eps cos^2 eta averages to 1/4; cos(3 eps) averages to 0 once there are more than 3 nodes
    def f(eps, eta):
        return np.cos(eps)**2 * np.cos(eta)**2 + np.cos(3 * eps)

    assert periodic_mean(f, 4) == pytest.approx(0.25, abs=1e-15)
    assert periodic_mean(f, 3) != pytest.approx(0.25, abs=1e-3)


def test_richardson_removes_h2_term():
    exact = 1.0
    assert richardson_h2(exact + 4e-3, exact + 1e-3) == pytest.approx(exact, abs=1e-15)


def test_integrate_periodic_converges():
    result = integrate_periodic(lambda eps, eta: np.log(3.0 - np.cos(eps) - np.cos(eta)), QuadratureSpec(16))

    assert result.converged
    assert result.method == 'trapezoid'
    assert result.resolution > 16
    assert len(result.history) >= 2


def test_spec_validation():
    with pytest.raises(QuadratureResolutionError):
        QuadratureSpec(resolution=0)
    with pytest.raises(QuadratureResolutionError):
        QuadratureSpec(resolution=64, max_resolution=32)
    with pytest.raises(ValueError):
        QuadratureSpec(tol=0.0)


def test_quad_spec():
    assert quad_spec(None) is None
    assert quad_spec(32).resolution == 32
    assert quad_spec(4 * MAX_QUAD_RES).max_resolution == 4 * MAX_QUAD_RES
