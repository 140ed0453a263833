import json
import math
from pathlib import Path

import numpy as np
import pytest

from kacward.core.paths import base_point_amplitude
from kacward.core.transfer import (
    ALPHA,
    TURN_PHASES,
    DirectionIndex,
    StepMatrix,
    arrival_amplitude,
    closed_amplitude_sum,
    det_closed_form,
    det_direct,
    det_from_coupling,
    field_at,
    log_det_integrand,
    log_det_mean,
    matrix_M,
    step_matrices,
    trace_element_from_recursion,
    trace_from_recursion,
    trace_log_series_check,
    trace_power_integral,
)
from kacward.utils.exceptions import QuadratureResolutionError, SingularityError
from kacward.utils.quadrature import periodic_nodes

EXAMPLES = json.loads((Path(__file__).parent / 'fixtures' / 'amplitude_examples.json').read_text())


def grid_mean(values: np.ndarray) -> complex:
    return complex(values.mean())


def test_turn_phases():
    U, D, L, R = (d.index for d in DirectionIndex)

    assert TURN_PHASES[U, U] == 1
    assert TURN_PHASES[U, D] == 0
    # Moving up then leftward is a left turn
    assert TURN_PHASES[U, R] == pytest.approx(ALPHA)
    assert TURN_PHASES[U, L] == pytest.approx(ALPHA.conjugate())
    assert TURN_PHASES[L, U] == pytest.approx(ALPHA)


@pytest.mark.parametrize('example', EXAMPLES['arrival'])
def test_arrival_amplitude_examples(example):
    u = 0.7
    expected = example['coefficient'] * ALPHA**example['alpha_power'] * u**example['n']
    value = arrival_amplitude(example['n'], example['x'], example['y'], example['direction'] and
                              DirectionIndex[example['direction']], u=u)

    assert value == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize('example', EXAMPLES['arrival_totals'])
def test_arrival_amplitude_totals(example):
    u = 0.5
    n = example['n']
    expected = sum(c * ALPHA**p * u**n for c, p in example['terms'])

    assert arrival_amplitude(n, example['x'], example['y'], None, u=u) == pytest.approx(expected, abs=1e-12)


def test_amplitude_field_window():
    field = field_at(5, 0.5)

    assert field.values.shape == (4, 11, 11)
    assert field.window == 5
    assert field.at(6, 0) == 0j
    # Every site reached in n steps has x + y of the parity of n
    assert field.at(2, 2) == 0j


def test_step_matrix_columns():
    eps, eta, u = 0.3, 1.1, 0.5
    M = matrix_M(eps, eta, u)
    v = np.exp(-1j * eta)
    h_bar = np.exp(-1j * eps)

    assert M.shape == (4, 4)
    assert M[0, 0] == pytest.approx(u * v)
    assert M[0, 2] == pytest.approx(u * ALPHA.conjugate() * h_bar)
    assert M[2, 2] == pytest.approx(u * h_bar)
    assert M[0, 1] == 0


def test_step_matrix_entries_and_determinant():
    step = StepMatrix(u=0.4, eps=0.7, eta=2.1)
    M = step.matrix

    for i, j in ((0, 1), (1, 0), (2, 3), (3, 2)):
        assert M[i, j] == 0
    nonzero = np.abs(M)[np.abs(M) > 0]
    assert len(nonzero) == 12
    assert np.allclose(nonzero, 0.4)

    assert step.trace_power(0) == pytest.approx(4.0)
    assert step.trace_power(3) == pytest.approx(np.trace(M @ M @ M))
    assert step.det() == pytest.approx(det_closed_form(0.7, 2.1, 0.4), abs=1e-12)
    with pytest.raises(ValueError):
        step.power(-1)


@pytest.mark.parametrize('example', EXAMPLES['matrix_products'])
def test_matrix_product_means(example):
    nodes = periodic_nodes(8)
    M = step_matrices(nodes[:, None], nodes[None, :], 1.0)
    product = np.ones(M.shape[:2], dtype=complex)
    for i, j in example['entries']:
        product = product * M[..., i - 1, j - 1]

    assert grid_mean(product) == pytest.approx(ALPHA**example['alpha_power'], abs=1e-12)


def test_low_matrix_powers_average_to_zero():
    nodes = periodic_nodes(8)
    M = step_matrices(nodes[:, None], nodes[None, :], 0.9)
    power = M
    for n in (1, 2, 3):
        if n > 1:
            power = power @ M
        assert np.abs(power.mean(axis=(0, 1))).max() < 1e-12


@pytest.mark.parametrize('example', EXAMPLES['trace_means'])
def test_trace_power_integral(example):
    u = 0.3
    n = example['n']

    assert trace_power_integral(n, u) == pytest.approx(example['coefficient'] * u**n, abs=1e-12)


def test_trace_power_integral_edge_cases():
    assert trace_power_integral(0, 0.3) == 4.0
    with pytest.raises(QuadratureResolutionError):
        trace_power_integral(8, 0.3, resolution=8)
    with pytest.raises(ValueError):
        trace_power_integral(-1, 0.3)


def test_closed_amplitudes_match_walk_enumeration():
    u = 0.3
    for n in (4, 6, 8):
        assert closed_amplitude_sum(n, u) == pytest.approx(base_point_amplitude(n, u), abs=1e-10)


def test_recursion_trace_needs_every_seed():
    u = 0.4
    for n in (4, 6, 8):
        trace = trace_power_integral(n, u)
        assert trace_from_recursion(n, u) == pytest.approx(trace, abs=1e-12)
        # Rotation symmetry: each diagonal element carries a quarter of the trace
        for seed in DirectionIndex:
            assert trace_element_from_recursion(n, u, seed) == pytest.approx(trace / 4, abs=1e-12)


def test_determinant_closed_form_at_random_points():
    rng = np.random.default_rng(7)
    eps, eta = rng.uniform(0, 2 * np.pi, (2, 10_000))
    us = rng.uniform(-0.95, 0.95, 10_000)
    direct = np.linalg.det(np.eye(4) - step_matrices(eps, eta, us[:, None, None]))

    assert np.abs(direct.imag).max() < 1e-12
    assert np.abs(direct.real - det_closed_form(eps, eta, us)).max() < 1e-12
    assert np.abs(det_closed_form(eps, eta, us) - det_from_coupling(eps, eta, np.arctanh(us))).max() < 1e-12
    assert det_direct(0.4, 2.0, 0.3) == pytest.approx(complex(det_closed_form(0.4, 2.0, 0.3)), abs=1e-14)


def test_determinant_vanishes_only_at_critical_weight():
    u_c = math.sqrt(2.0) - 1.0

    assert det_closed_form(0.0, 0.0, u_c) == pytest.approx(0.0, abs=1e-14)
    assert det_closed_form(0.0, 0.0, 0.3) > 0.0


def test_trace_log_series_converges():
    report = trace_log_series_check(0.2, 40)

    assert report.final_residual < 1e-8
    assert report.monotone
    assert report.to_dict()['residuals'][-1]['n_max'] == 40
    with pytest.raises(ValueError):
        trace_log_series_check(0.3, 10)


def test_log_det_mean_small_weight():
    # The mean of ln det(I - uM) starts 2u^4 + 4u^6
    u = 0.05
    assert log_det_mean(u).value == pytest.approx(2 * u**4 + 4 * u**6, rel=1e-3)


def test_log_det_integrand_matches_direct_determinant():
    rng = np.random.default_rng(11)
    eps, eta = rng.uniform(0, 2 * np.pi, (2, 500))
    u = 0.35
    direct = np.array([det_direct(a, b, u) for a, b in zip(eps, eta)])

    assert np.abs(log_det_integrand(eps, eta, u) - np.log(direct.real)).max() < 1e-12
    assert np.all(log_det_integrand(eps, eta, 0.0) == 0.0)


def test_log_det_integrand_raises_at_critical_node():
    u_c = math.sqrt(2.0) - 1.0

    with pytest.raises(SingularityError):
        log_det_integrand(0.0, 0.0, u_c)
    with pytest.raises(SingularityError):
        log_det_integrand(np.array([0.0, 1.0]), np.array([0.0, 2.0]), u_c)
    # Away from the origin the critical weight is harmless
    assert math.isfinite(float(log_det_integrand(0.5, 0.5, u_c)))
