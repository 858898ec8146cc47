#!/usr/bin/env python
"""Checks for the scalar fractional ODE: closed form, Duhamel integral and the stepper."""
import math
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from fracode_utils import (ScalarTrajectory, TimeGrid, caputo_derivative, caputo_stepper, closed_form_forced,
                           closed_form_forced_array, duhamel_solution, forced_response_symbol, phi_omega_array)
from specfun_utils import ConvergenceError, DomainError, FracParams, mittag_leffler


# ------------------------------------------------------------------
# grids and the discrete Caputo derivative
def test_time_grid():
    grid = TimeGrid.uniform(2.0, 1e-3)
    assert len(grid) == 2001
    assert abs(grid.h - 1e-3) < 1e-15
    with pytest.raises(DomainError):
        TimeGrid.uniform(1.0, 0.3)
    with pytest.raises(DomainError):
        TimeGrid([0.0, 0.1, 0.3])
    with pytest.raises(DomainError):
        TimeGrid([0.1, 0.2, 0.3])


def test_trajectory_frame():
    grid = TimeGrid.uniform(1.0, 0.5)
    df = ScalarTrajectory(grid, [0, 1j, 2]).to_frame()
    assert list(df.columns) == ['t', 're', 'im']
    assert df['im'].tolist() == [0.0, 1.0, 0.0]


def test_caputo_of_square():
    grid = TimeGrid.uniform(1.0, 1e-3)
    traj = ScalarTrajectory(grid, grid.t**2)
    exact = 2/math.gamma(1.5)
    assert abs(caputo_derivative(traj, 1.5, len(grid)-1) - exact) < 1e-4


def test_caputo_annihilates_affine():
    grid = TimeGrid.uniform(1.0, 1e-2)
    traj = ScalarTrajectory(grid, 3.0 - 2.0*grid.t, dy0=-2.0)
    assert abs(caputo_derivative(traj, 1.3, 50)) < 1e-10


def test_caputo_rejects_index():
    traj = ScalarTrajectory(TimeGrid.uniform(1.0, 0.1), np.zeros(11))
    with pytest.raises(DomainError):
        caputo_derivative(traj, 1.5, 1)
    with pytest.raises(DomainError):
        caputo_derivative(traj, 1.5, 11)
    with pytest.raises(DomainError):
        caputo_derivative(traj, 2.5, 5)


def test_phi_omega_is_eigenfunction():
    # D^alpha phi = i^alpha omega^alpha phi, first order or better under refinement
    params = FracParams(1.5, 1.0)
    errors = []
    for h in (1e-2, 1e-3, 1e-4):
        grid = TimeGrid.uniform(1.0, h)
        traj = ScalarTrajectory(grid, phi_omega_array(params, grid.t))
        k = len(grid) - 1
        errors.append(abs(caputo_derivative(traj, params.alpha, k) - params.forcing_eig*traj.y[k]))
    assert errors[0] > errors[1] > errors[2]
    order = math.log10(errors[0]/errors[2])/2
    assert order >= 0.8


# ------------------------------------------------------------------
# stepper
def test_stepper_pure_fractional_integral():
    grid = TimeGrid.uniform(1.0, 1e-3)
    traj = caputo_stepper(0.0, lambda t: np.ones_like(t), grid, 1.5)
    assert traj.y[0] == 0
    assert abs(traj.y[-1] - 1/math.gamma(2.5)) < 5e-4


def test_stepper_constant_forcing():
    grid = TimeGrid.uniform(2.0, 1e-3)
    traj = caputo_stepper(1.0, np.ones(len(grid)), grid, 1.5)
    exact = 2.0**1.5*mittag_leffler(1.5, 2.5, -2.0**1.5).value
    assert abs(traj.y[-1] - exact) < 1e-3


def test_stepper_matches_closed_form():
    params = FracParams(1.5, 1.0)
    grid = TimeGrid.uniform(2.0, 1e-3)
    traj = caputo_stepper(1.0, lambda t: phi_omega_array(params, t), grid, params.alpha)
    assert abs(traj.y[-1] - closed_form_forced(1.0, params, 2.0)) < 1e-3


def test_stepper_initial_slope_vanishes():
    ratios = []
    for h in (1e-2, 1e-3):
        grid = TimeGrid.uniform(0.1, h)
        traj = caputo_stepper(1.0, lambda t: np.ones_like(t), grid, 1.5)
        assert traj.y[0] == 0
        ratios.append(abs(traj.y[1])/h)
    assert ratios[1] < ratios[0]


def test_stepper_rejects_negative_lambda():
    with pytest.raises(DomainError):
        caputo_stepper(-1.0, lambda t: np.ones_like(t), TimeGrid.uniform(1.0, 0.1), 1.5)


# ------------------------------------------------------------------
# closed form and Duhamel integral
def test_closed_form_special_cases():
    params = FracParams(1.5, 1.0)
    assert closed_form_forced(1.0, params, 0.0) == 0
    t = 1.7
    expected = t**1.5*mittag_leffler(1.5, 2.5, params.forcing_eig*t**1.5).value
    assert abs(closed_form_forced(0.0, params, t) - expected) < 1e-13
    with pytest.raises(DomainError):
        closed_form_forced(-1.0, params, 1.0)


def test_closed_form_array_matches_scalar():
    params = FracParams(1.25, 2.0)
    lam = np.array([0.0, 0.5, 1.0, 4.0, 100.0])
    values = closed_form_forced_array(lam, params, 3.0)
    expected = [closed_form_forced(l, params, 3.0) for l in lam]
    assert_allclose(values, expected, rtol=1e-9, atol=1e-13)


def test_forced_response_symbol_bounded():
    params = FracParams(1.5)
    x = np.concatenate([[0.0], np.geomspace(1e-3, 1e4, 60)])
    values = np.array([forced_response_symbol(v, params, 1.0) for v in x])
    assert np.max(np.abs(values)) < 2
    assert abs(values[-1] - 1) < 1e-3


def test_duhamel_matches_closed_form():
    params = FracParams(1.5, 1.0)
    assert duhamel_solution(1.0, params, 0.0) == 0
    assert abs(duhamel_solution(1.0, params, 2.0) - closed_form_forced(1.0, params, 2.0)) < 1e-8
    assert abs(duhamel_solution(0.0, params, 2.0) - closed_form_forced(0.0, params, 2.0)) < 1e-8


@pytest.mark.filterwarnings('ignore::scipy.integrate.IntegrationWarning')
def test_duhamel_reports_unreached_tolerance():
    params = FracParams(1.5, 1.0)
    with pytest.raises(ConvergenceError, match='quadrature error') as info:
        duhamel_solution(1.0, params, 2.0, tol=1e-300)
    assert info.value.best_abs_err > 0


@pytest.mark.slow
@pytest.mark.parametrize('alpha', [1.25, 1.5, 1.75])
@pytest.mark.parametrize('lam', [0.5, 1.0, 4.0])
@pytest.mark.parametrize('omega', [1.0, 2.0])
def test_oracle_triangle(alpha, lam, omega):
    params = FracParams(alpha, omega)
    grid = TimeGrid.uniform(2.0, 1e-3)
    traj = caputo_stepper(lam, lambda t: phi_omega_array(params, t), grid, alpha)
    for t in (0.5, 1.0, 2.0):
        closed = closed_form_forced(lam, params, t)
        assert abs(duhamel_solution(lam, params, t) - closed) < 1e-8
        assert abs(traj.y[int(round(t/grid.h))] - closed) < 1e-3


if __name__ == '__main__':
    from conftest import run_file
    sys.exit(run_file(__file__, "Testing fracwave scalar fractional ODE"))
