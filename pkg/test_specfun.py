#!/usr/bin/env python
"""Checks for the special functions: Mittag-Leffler, Wright, Macdonald, principal powers."""
import cmath
import math
import sys

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate, special

from specfun_utils import (ComplexSample, ConvergenceError, DomainError, FracParams, crossover_radius,
                           get_num_threads, macdonald_k, mittag_leffler, mittag_leffler_array,
                           mittag_leffler_on_ray, principal_power, ray_remainder, wright_decay_rate,
                           wright_density, wright_phi, wright_phi_array)


def ml_reference(alpha, beta, z, dps=60):
    with mpmath.workdps(dps):
        z = mpmath.mpc(z)
        total, k = mpmath.mpf(0), 0
        while True:
            term = z**k*mpmath.rgamma(alpha*k + beta)
            total += term
            if k > 20 and abs(term) < mpmath.mpf(10)**(-40):
                return complex(total)
            k += 1


# ------------------------------------------------------------------
# parameters and containers
def test_frac_params_derived_fields():
    params = FracParams(1.5, 2.0)
    assert abs(abs(params.i_pow_alpha) - 1) < 1e-15
    assert abs(cmath.phase(params.i_pow_alpha) - 0.75*math.pi) < 1e-14
    assert abs(params.forcing_eig - params.i_pow_alpha*2.0**1.5) < 1e-13
    assert params.helmholtz_root.real > 0
    assert params.gamma == 0.75


@pytest.mark.parametrize('alpha,omega', [(2.5, 1.0), (1.0, 1.0), (1.5, 0.0), (1.5, -1.0)])
def test_frac_params_rejects_invalid(alpha, omega):
    with pytest.raises(DomainError, match='alpha|omega'):
        FracParams(alpha, omega)


def test_frac_params_message_names_range():
    with pytest.raises(DomainError, match=r'\(1, 2\)'):
        FracParams(2.5)


def test_complex_sample_validation():
    assert ComplexSample(1, 0, 'series').value == 1+0j
    with pytest.raises(DomainError):
        ComplexSample(1, 0, 'guess')
    with pytest.raises(DomainError):
        ComplexSample(1, -1e-3, 'series')


def test_num_threads(monkeypatch):
    monkeypatch.setenv('FRACWAVE_THREADS', '3')
    assert get_num_threads() == 3
    monkeypatch.setenv('FRACWAVE_THREADS', '0')
    with pytest.raises(DomainError):
        get_num_threads()
    monkeypatch.delenv('FRACWAVE_THREADS')
    assert get_num_threads() >= 1


def test_principal_power():
    assert abs(principal_power(-1, 0.5) - 1j) < 1e-15
    assert abs(principal_power(1j, 1.5) - cmath.exp(0.75j*math.pi)) < 1e-15
    assert principal_power(0, 0.5) == 0
    with pytest.raises(DomainError):
        principal_power(0, -1.0)


# ------------------------------------------------------------------
# Mittag-Leffler
@pytest.mark.parametrize('beta', [0.5, 1.0, 2.0, 2.5])
def test_ml_at_zero(beta):
    sample = mittag_leffler(1.5, beta, 0)
    assert abs(sample.value - 1/math.gamma(beta)) < 1e-15
    assert sample.regime == 'series'


def test_ml_exponential_and_cosine():
    assert abs(mittag_leffler(1.0, 1.0, 1.0).value - math.e) < 1e-13
    for x in (1.0, 3.0):
        assert abs(mittag_leffler(2.0, 1.0, -x*x).value - math.cos(x)) < 1e-12


@pytest.mark.parametrize('alpha', [1.25, 1.5, 1.75])
@pytest.mark.parametrize('z', [3.0, -3.0, 4j, 8*cmath.exp(2j), -20.0, 25*cmath.exp(1j), 25*cmath.exp(2.5j)])
def test_ml_against_mpmath(alpha, z):
    sample = mittag_leffler(alpha, 1.0, z)
    reference = ml_reference(alpha, 1.0, z)
    assert abs(sample.value - reference) <= 1e-9*max(1.0, abs(reference))
    if abs(z) <= crossover_radius(alpha):
        assert sample.regime == 'series'


@pytest.mark.parametrize('alpha', [1.25, 1.5, 1.75])
@pytest.mark.parametrize('beta_kind', ['1', '2', 'alpha', 'alpha+1'])
@pytest.mark.parametrize('theta', [0.0, math.pi/3, 2*math.pi/3, math.pi])
def test_ml_regimes_agree_on_overlap(alpha, beta_kind, theta):
    beta = {'1': 1.0, '2': 2.0, 'alpha': alpha, 'alpha+1': alpha+1}[beta_kind]
    z = (crossover_radius(alpha) + 1)*cmath.exp(1j*theta)
    near = mittag_leffler(alpha, beta, z, regime='series')
    far = mittag_leffler(alpha, beta, z, regime='asymptotic')
    assert abs(near.value - far.value) <= 1e-10*max(1.0, abs(near.value))


def test_ml_large_argument_regimes():
    far = mittag_leffler(1.5, 1.0, -1e4)
    assert far.regime == 'asymptotic'
    assert abs(far.value - 1e-4/math.gamma(-0.5)) < 1e-10
    assert cmath.isfinite(far.value)
    cut = mittag_leffler(1.5, 1.0, -30.0)
    assert cut.regime in ('asymptotic', 'quadrature')


@pytest.mark.parametrize('alpha', [1.25, 1.5, 1.75])
@pytest.mark.parametrize('beta_kind', ['1', '2', 'alpha', 'alpha+1'])
def test_ml_far_field_is_finite(alpha, beta_kind):
    # E_{a,b}(-x) = x^{-1}/Gamma(b-a) + O(x^{-2}) on the negative axis
    beta = {'1': 1.0, '2': 2.0, 'alpha': alpha, 'alpha+1': alpha+1}[beta_kind]
    for x in (5e3, 1e5, 1e7):
        value = mittag_leffler(alpha, beta, -x).value
        leading = special.rgamma(beta - alpha)/x
        assert cmath.isfinite(value)
        bound = 2*abs(special.rgamma(beta - 2*alpha))/x**2 + 2*abs(special.rgamma(beta - 3*alpha))/x**3
        assert abs(value - leading) <= bound + 1e-15/x
    values = mittag_leffler_array(alpha, beta, -np.geomspace(5e3, 1e7, 9))
    assert np.all(np.isfinite(values))


def test_complex_sample_rejects_non_finite_value():
    with pytest.raises(ConvergenceError):
        ComplexSample(complex(float('nan'), 0), 0.0, 'asymptotic')
    with pytest.raises(ConvergenceError):
        ComplexSample(float('inf'), 0.0, 'series')


@pytest.mark.parametrize('z', [float('nan'), complex(float('inf'), 0)])
def test_ml_rejects_non_finite(z):
    with pytest.raises(DomainError):
        mittag_leffler(1.5, 1.0, z)


def test_ml_rejects_bad_parameters():
    with pytest.raises(DomainError):
        mittag_leffler(2.5, 1.0, 1.0)
    with pytest.raises(DomainError):
        mittag_leffler(1.5, 0.0, 1.0)
    with pytest.raises(DomainError):
        mittag_leffler(1.5, 1.0, 1.0, regime='magic')


def test_convergence_error_carries_best_error():
    e = ConvergenceError('unreachable', best_abs_err=1e-3)
    assert isinstance(e, ArithmeticError)
    assert e.best_abs_err == 1e-3


@pytest.mark.parametrize('alpha,beta', [(1.5, 1.0), (1.25, 2.0), (1.75, 2.75)])
def test_ml_array_matches_scalar(alpha, beta):
    z = np.concatenate([-np.geomspace(0.1, 400.0, 25), np.geomspace(0.1, 30.0, 7)*np.exp(2j),
                        -np.geomspace(0.1, 400.0, 25)])
    values = mittag_leffler_array(alpha, beta, z)
    expected = np.array([mittag_leffler(alpha, beta, zi).value for zi in z])
    assert_allclose(values, expected, rtol=1e-8, atol=1e-12)
    assert values.shape == z.shape


@pytest.mark.parametrize('beta', [1.0, 1.5, 2.0])
def test_ml_laplace_pair(beta):
    # int_0^inf e^{-st} t^{beta-1} E_{a,beta}(-lam t^a) dt = s^{a-beta}/(s^a + lam)
    alpha, lam, s = 1.5, 1.0, 2.0
    f = lambda t: math.exp(-s*t)*t**(beta-1)*mittag_leffler(alpha, beta, -lam*t**alpha).value.real
    value = sum(integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
                for a, b in ((0.0, 1.0), (1.0, 8.0), (8.0, 40.0)))
    assert abs(value - s**(alpha-beta)/(s**alpha + lam)) < 1e-9


@pytest.mark.parametrize('alpha', [1.25, 1.5, 1.75])
@pytest.mark.parametrize('beta', [1.0, 1.5, 2.0])
def test_ml_recurrence(alpha, beta):
    # E_{a,b}(z) = z E_{a,a+b}(z) + 1/Gamma(b)
    for z in (0.5, -3.0, 10.0, -10.0, 6j, 10*cmath.exp(2j), 7*cmath.exp(-0.8j)):
        lhs = mittag_leffler(alpha, beta, z).value
        rhs = z*mittag_leffler(alpha, alpha+beta, z).value + special.rgamma(beta)
        assert abs(lhs - rhs) <= 1e-10*max(1.0, abs(lhs))


def test_on_ray_leading_term():
    params = FracParams(1.5, 1.0)
    value = mittag_leffler_on_ray(params, 50.0).value
    assert abs(value - np.exp(50j)/1.5) < 1e-2
    assert abs(ray_remainder(params, 200.0).value) < abs(ray_remainder(params, 50.0).value)
    with pytest.raises(DomainError):
        mittag_leffler_on_ray(params, -1.0)


def test_on_ray_bounded_away_from_zero():
    params = FracParams(1.5, 1.0)
    t = np.concatenate([np.linspace(0.0, 40.0, 161), np.geomspace(40.0, 1e4, 60)])
    moduli = np.array([abs(mittag_leffler_on_ray(params, ti).value) for ti in t])
    assert np.all(np.isfinite(moduli))
    assert moduli.min() > 0.05
    assert moduli.max() < 2.0
    assert abs(moduli[-1] - 1/1.5) < 1e-3


def test_ray_remainder_slope():
    # |phi_omega(t) - e^{i omega t}/alpha| = O(t^{-alpha})
    params = FracParams(1.5, 1.0)
    t = np.geomspace(10.0, 1e4, 13)
    r = np.array([abs(ray_remainder(params, ti).value) for ti in t])
    slope = np.polyfit(np.log(t), np.log(r), 1)[0]
    assert abs(slope + 1.5) < 0.05


# ------------------------------------------------------------------
# Wright
@pytest.mark.parametrize('z', [0.5, 3.0, 7.0])
def test_wright_half_is_gaussian(z):
    # Phi(-1/2, 1/2; -z) = exp(-z^2/4)/sqrt(pi)
    sample = wright_phi(-0.5, 0.5, -z)
    assert abs(sample.value - math.exp(-z*z/4)/math.sqrt(math.pi)) < 1e-11
    assert sample.regime == ('series' if z <= 1 else 'quadrature')


@pytest.mark.parametrize('gamma,delta', [(0.75, 0.0), (0.75, -0.5), (0.625, 0.375)])
def test_wright_against_mpmath(gamma, delta):
    def reference(z):
        # slowly converging for gamma near 1: sum well past the peak term
        with mpmath.workdps(60):
            total, m = mpmath.mpf(0), 0
            while True:
                term = (-z)**m*mpmath.rgamma(delta - gamma*m)/mpmath.factorial(m)
                total += term
                if m > 50 and abs(term) < mpmath.mpf(10)**(-30):
                    return float(total)
                m += 1
    for z in (0.3, 1.5, 4.0):
        assert abs(wright_phi(-gamma, delta, -z).value - reference(z)) < 1e-10


@pytest.mark.parametrize('z', [-0.5, -3.0])
def test_wright_derivative_rule(z):
    # d/dz Phi(rho, delta; z) = Phi(rho, delta + rho; z)
    rho, delta, h = -0.75, 0.0, 1e-4
    fd = (wright_phi(rho, delta, z+h).value - wright_phi(rho, delta, z-h).value)/(2*h)
    assert abs(fd - wright_phi(rho, delta+rho, z).value) < 1e-6


def test_wright_array_matches_scalar():
    x = np.concatenate([np.linspace(0.0, 1.0, 5), np.geomspace(1.1, 30.0, 12)])
    values = wright_phi_array(-0.75, -0.5, x)
    expected = [wright_phi(-0.75, -0.5, -xi).value.real for xi in x]
    assert_allclose(values, expected, rtol=1e-9, atol=1e-13)


def test_wright_rejects_rho():
    with pytest.raises(DomainError):
        wright_phi(0.5, 1.0, 1.0)
    with pytest.raises(DomainError):
        wright_phi_array(-0.5, 0.5, [-1.0])


@pytest.mark.parametrize('alpha', [1.25, 1.5, 1.75])
def test_wright_density_moments(alpha):
    f = lambda z: wright_density(alpha, z).value.real
    edges = [0.0, 1.0, 5.0, 20.0, 60.0]
    mass = sum(integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)[0] for a, b in zip(edges, edges[1:]))
    first = sum(integrate.quad(lambda z: z*f(z), a, b, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
                for a, b in zip(edges, edges[1:]))
    assert abs(mass - 1) < 1e-8
    assert abs(first - 1/math.gamma(1 + 1/alpha)) < 1e-8


def test_wright_decay_rate():
    assert abs(wright_decay_rate(0.5) - 0.25) < 1e-15
    with pytest.raises(DomainError):
        wright_decay_rate(1.0)


# ------------------------------------------------------------------
# Macdonald
@pytest.mark.parametrize('z', [0.1, 1.0, 3.0, 10.0, 2+1j])
def test_macdonald_half_closed_form(z):
    expected = cmath.sqrt(math.pi/(2*z))*cmath.exp(-z)
    assert abs(macdonald_k(0.5, z).value - expected) <= 1e-12*abs(expected)


def test_macdonald_matches_scipy():
    assert abs(macdonald_k(1.5, 2.0).value - special.kv(1.5, 2.0)) < 1e-14


@pytest.mark.parametrize('nu', [1.0, 1.5])
@pytest.mark.parametrize('z', [0.5, 2.0, 2+1j])
def test_macdonald_integral_representation(nu, z):
    # K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt for Re z > 0
    f = lambda t, part: part(cmath.exp(-z*math.cosh(t)))*math.cosh(nu*t)
    re = integrate.quad(f, 0.0, 12.0, args=(lambda w: w.real,), epsabs=1e-15, epsrel=1e-13, limit=200)[0]
    im = integrate.quad(f, 0.0, 12.0, args=(lambda w: w.imag,), epsabs=1e-15, epsrel=1e-13, limit=200)[0]
    value = macdonald_k(nu, z).value
    assert abs(value - complex(re, im)) <= 1e-10*abs(value)


@pytest.mark.parametrize('nu,z', [(0.5, 0.0), (0.5, -1.0), (0.5, 1j), (-1.0, 1.0)])
def test_macdonald_rejects(nu, z):
    with pytest.raises(DomainError):
        macdonald_k(nu, z)


if __name__ == '__main__':
    from conftest import run_file
    sys.exit(run_file(__file__, "Testing fracwave special functions"))
