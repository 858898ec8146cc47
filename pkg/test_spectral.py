#!/usr/bin/env python
"""Checks for finite spectral operators and the periodic lattice solver."""
import math
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from fracode_utils import TimeGrid, caputo_stepper, closed_form_forced, phi_omega_array
from spectral_utils import (FiniteSpectralOperator, LatticeField, evolve_field, evolve_operator,
                            limiting_amplitude_operator, limiting_amplitude_target, residual_trend, z2_symbol)
from specfun_utils import DomainError, FracParams, mittag_leffler


SHAPE, SPACING = (16, 16, 16), 0.5
XI0 = 2*math.pi/8


def sin_mode(points):
    return np.sin(XI0*points[..., 0])


# ------------------------------------------------------------------
# finite spectral operators
def test_operator_validation():
    with pytest.raises(DomainError):
        FiniteSpectralOperator([1.0, 2.0], [1.0])
    with pytest.raises(DomainError):
        FiniteSpectralOperator([-1.0], [1.0])
    with pytest.raises(DomainError):
        FiniteSpectralOperator([], [])
    op = FiniteSpectralOperator([0.0, 1.0], [1.0, 1.0])
    with pytest.raises(DomainError):
        op.check_theorem_hypotheses()


def test_evolve_operator_basics():
    params = FracParams(1.5, 1.0)
    op = FiniteSpectralOperator([2.0], [1.0])
    assert np.all(evolve_operator(op, params, 0.0) == 0)
    assert abs(evolve_operator(op, params, 1.3)[0] - closed_form_forced(2.0, params, 1.3)) < 1e-14


def test_evolve_operator_matches_stepper_per_mode():
    params = FracParams(1.5, 1.0)
    lam = np.arange(1.0, 6.0)
    op = FiniteSpectralOperator(lam, 1/lam)
    grid = TimeGrid.uniform(2.0, 1e-3)
    values = evolve_operator(op, params, 2.0)
    for k, l in enumerate(lam):
        traj = caputo_stepper(l, lambda t: phi_omega_array(params, t), grid, params.alpha)
        assert abs(traj.y[-1]/l - values[k]) < 1e-3


def test_limiting_amplitude_operator():
    params = FracParams(1.5, 1.0)
    lam = np.arange(1.0, 6.0)
    op = FiniteSpectralOperator(lam, 1/lam)
    rows = limiting_amplitude_operator(op, params, [2.0**j for j in range(9)])
    trend = residual_trend(rows, op.f0_norm)
    assert trend.normalized[-1] < 1e-2
    assert trend.normalized[-1] < trend.normalized[0]
    assert trend.tail_slope < 0
    assert trend.monotone_tail


def test_limiting_amplitude_target():
    params = FracParams(1.5, 2.0)
    op = FiniteSpectralOperator([1.0, 3.0], [1.0, 1j])
    target = limiting_amplitude_target(op, params)
    assert_allclose(target*(op.eigenvalues + params.forcing_eig), op.weights, rtol=1e-15)


def test_default_schedule_is_used():
    params = FracParams(1.5, 1.0)
    rows = limiting_amplitude_operator(FiniteSpectralOperator([1.0], [1.0]), params)
    assert [row[0] for row in rows] == [2.0**j for j in range(12)]
    assert all(np.isfinite(row[1]) for row in rows)


# ------------------------------------------------------------------
# lattice fields
def test_lattice_round_trip():
    rng = np.random.default_rng(2022)
    field = LatticeField(SHAPE, SPACING, rng.normal(size=SHAPE))
    back = LatticeField.from_modes(field.modes, SPACING)
    assert np.max(np.abs(back.values - field.values)) < 1e-10*np.max(np.abs(field.values))


def test_lattice_validation():
    with pytest.raises(DomainError):
        LatticeField((4, 4), 0.5, np.zeros((4, 5)))
    with pytest.raises(DomainError):
        LatticeField((4, 4), 0.0, np.zeros((4, 4)))
    with pytest.raises(DomainError):
        LatticeField((2, 2, 2, 2), 0.5, np.zeros((2, 2, 2, 2)))


def test_lattice_symbols():
    field = LatticeField.from_function(sin_mode, SHAPE, SPACING)
    lam = field.lam()
    assert lam[0, 0, 0] == 0
    assert abs(lam[1, 0, 0] - XI0**2) < 1e-13
    assert field.dim == 3
    assert_allclose(field.period, [8.0, 8.0, 8.0])
    assert field.metadata() == {'shape': [16, 16, 16], 'spacing': 0.5, 't': 0.0}
    assert list(field.to_frame().columns) == ['index', 're', 'im']


@pytest.mark.parametrize('t', [0.5, 2.0, 10.0])
def test_evolve_sin_mode_exact(t):
    params = FracParams(1.5)
    u0 = LatticeField.from_function(sin_mode, SHAPE, SPACING)
    u = evolve_field(u0, None, None, params, t)
    decay = mittag_leffler(1.5, 1.0, -XI0**2*t**1.5).value
    assert np.max(np.abs(u.values - decay*u0.values)) < 1e-10
    assert u.t == t


def test_evolve_slope_and_constants():
    params = FracParams(1.25, 1.0)
    t = 3.0
    u1 = LatticeField.from_function(sin_mode, SHAPE, SPACING)
    u = evolve_field(None, u1, None, params, t)
    assert np.max(np.abs(u.values - z2_symbol(params, XI0**2, t)*u1.values)) < 1e-10

    c = LatticeField(SHAPE, SPACING, np.full(SHAPE, 2.5))
    assert np.max(np.abs(evolve_field(c, None, None, params, t).values - 2.5)) < 1e-12
    assert np.max(np.abs(evolve_field(c, None, None, params, t, drop_zero_mode=True).values)) < 1e-12
    forced = evolve_field(None, None, c, params, t)
    assert np.max(np.abs(forced.values - 2.5*closed_form_forced(0.0, params, t))) < 1e-10


def test_evolve_field_rejects():
    params = FracParams(1.5)
    a = LatticeField((4, 4), 0.5, np.ones((4, 4)))
    b = LatticeField((4, 4), 0.25, np.ones((4, 4)))
    with pytest.raises(DomainError):
        evolve_field(a, b, None, params, 1.0)
    with pytest.raises(DomainError):
        evolve_field(None, None, None, params, 1.0)
    with pytest.raises(DomainError):
        evolve_field(a, None, None, params, -1.0)


def test_evolve_field_forcing_matches_stepper_per_mode():
    params = FracParams(1.5, 1.0)
    F = LatticeField.from_function(lambda p: np.sin(XI0*p[..., 0]) + 0.5*np.cos(2*XI0*p[..., 1]), SHAPE, SPACING)
    t = 2.0
    u = evolve_field(None, None, F, params, t)
    grid = TimeGrid.uniform(t, 1e-3)
    forcing = lambda s: phi_omega_array(params, s)
    y1 = caputo_stepper(XI0**2, forcing, grid, params.alpha).y[-1]
    y2 = caputo_stepper(4*XI0**2, forcing, grid, params.alpha).y[-1]
    points = np.stack(LatticeField.coordinates(SHAPE, SPACING), axis=-1)
    expected = y1*np.sin(XI0*points[..., 0]) + 0.5*y2*np.cos(2*XI0*points[..., 1])
    assert np.max(np.abs(u.values - expected)) < 1e-3


def test_evolve_field_is_linear():
    params = FracParams(1.25, 2.0)
    rng = np.random.default_rng(7)
    u0a, u0b, u1a, u1b, Fa, Fb = [LatticeField(SHAPE, SPACING, rng.normal(size=SHAPE)) for _ in range(6)]
    mix = lambda a, b, x, y: LatticeField(SHAPE, SPACING, x*a.values + y*b.values)
    t = 1.7
    lhs = evolve_field(mix(u0a, u0b, 2.0, -1.0), mix(u1a, u1b, 0.5, 3.0), mix(Fa, Fb, 1.0, 1.0), params, t).values
    part = lambda u0=None, u1=None, F=None: evolve_field(u0, u1, F, params, t).values
    rhs = (2.0*part(u0=u0a) - part(u0=u0b) + 0.5*part(u1=u1a) + 3.0*part(u1=u1b)
           + part(F=Fa) + part(F=Fb))
    assert np.max(np.abs(lhs - rhs)) < 1e-10*np.max(np.abs(lhs))


if __name__ == '__main__':
    from conftest import run_file
    sys.exit(run_file(__file__, "Testing fracwave spectral solvers"))
