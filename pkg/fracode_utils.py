"""Scalar fractional ODE  D^alpha y + lambda y = phi(t),  y(0) = y'(0) = 0.

Three independent routes to the same solution: the Mittag-Leffler closed form,
the Duhamel convolution and an implicit product-integration stepper.
"""
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import integrate, special

from specfun_utils import (ConvergenceError, DomainError, mittag_leffler,
                           mittag_leffler_array)


SPACING_TOL = 1e-14


@dataclass
class TimeGrid:
    t: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        if self.t.ndim != 1 or len(self.t) < 2:
            raise DomainError('TimeGrid needs at least two points')
        if self.t[0] != 0:
            raise DomainError('TimeGrid must start at t=0, got '+repr(self.t[0]))
        steps = np.diff(self.t)
        if np.any(steps <= 0) or np.max(np.abs(steps - steps[0])) > SPACING_TOL*max(1.0, self.t[-1]):
            raise DomainError('TimeGrid must be ascending with a uniform step')

    @classmethod
    def uniform(cls, t_end, h):
        if not (h > 0 and t_end > 0):
            raise DomainError('TimeGrid.uniform: t_end and h must be > 0')
        num_steps = int(round(t_end/h))
        if num_steps < 1 or abs(num_steps*h - t_end) > 1e-9*t_end:
            raise DomainError('TimeGrid.uniform: t_end=%r is not a multiple of h=%r' % (t_end, h))
        return cls(h*np.arange(num_steps+1))

    @property
    def h(self):
        return self.t[1] - self.t[0]

    def __len__(self):
        return len(self.t)


@dataclass
class ScalarTrajectory:
    grid: TimeGrid
    y: np.ndarray
    dy0: complex = 0j

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=complex)
        if self.y.shape != self.grid.t.shape:
            raise DomainError('trajectory length %d does not match the grid (%d)' % (len(self.y), len(self.grid)))

    def to_frame(self):
        return pd.DataFrame({'t': self.grid.t, 're': self.y.real, 'im': self.y.imag})


def _check_alpha(alpha):
    alpha = float(alpha)
    if not (1 < alpha < 2):
        raise DomainError('alpha must lie in (1, 2), got '+repr(alpha))
    return alpha


def _history_weights(alpha, h, num):
    # int over cell m (counted back from t_k) of (t_k - tau)^{1-alpha}
    m = np.arange(num+1, dtype=float)
    return h**(2-alpha) * ((m+1)**(2-alpha) - m**(2-alpha)) / (2-alpha)


def _abel_sums(v, b, k):
    """I_k = sum_{j=1}^k v_j b_{k-j}."""
    return np.dot(v[1:k+1], b[k-1::-1][:k])


def caputo_derivative(traj, alpha, k):
    """Discrete Caputo derivative of order alpha at t_k."""
    alpha = _check_alpha(alpha)
    if int(k) != k or k < 2 or k >= len(traj.grid):
        raise DomainError('caputo_derivative: k must be an integer in [2, %d], got %r' % (len(traj.grid)-1, k))
    k = int(k)
    h = traj.grid.h
    b = _history_weights(alpha, h, k)
    v = np.zeros(k+1, dtype=complex)
    v[1:] = np.diff(traj.y[:k+1])/h - traj.dy0
    return (_abel_sums(v, b, k) - _abel_sums(v, b, k-1)) / (h*special.gamma(2-alpha))


def phi_omega_array(params, t):
    """phi_omega on an array of times."""
    t = np.asarray(t, dtype=float)
    return mittag_leffler_array(params.alpha, 1.0, params.i_pow_alpha*(params.omega*t)**params.alpha)


def caputo_stepper(lam, forcing, grid, alpha):
    """Implicit product-integration scheme for D^alpha y + lam*y = forcing, y(0) = y'(0) = 0.

    forcing is a callable on an array of times or an array sampled on the grid.
    """
    alpha = _check_alpha(alpha)
    lam = complex(lam)
    if lam.real < 0:
        raise DomainError('caputo_stepper: Re lambda must be >= 0, got '+repr(lam))
    phi = forcing(grid.t) if callable(forcing) else forcing
    phi = np.broadcast_to(np.asarray(phi, dtype=complex), grid.t.shape)
    h, num = grid.h, len(grid) - 1
    g = h*special.gamma(2-alpha)
    b = _history_weights(alpha, h, num)
    denom = b[0]/g + lam*h

    y = np.zeros(num+1, dtype=complex)
    v = np.zeros(num+1, dtype=complex)
    limit = 1e12*(1 + np.max(np.abs(phi)))
    abel_prev = 0j
    for k in range(1, num+1):
        hist = np.dot(v[1:k], b[k-1:0:-1])
        v[k] = (phi[k] - (hist - abel_prev)/g - lam*y[k-1]) / denom
        y[k] = y[k-1] + h*v[k]
        abel_prev = b[0]*v[k] + hist
        if not abs(y[k]) < limit:
            raise ConvergenceError('caputo_stepper: solution blew up at t=%g' % grid.t[k])
    return ScalarTrajectory(grid, y)


def _check_lambda_t(lam, t):
    lam, t = float(lam), float(t)
    if not lam >= 0:
        raise DomainError('lambda must be >= 0, got '+repr(lam))
    if not t >= 0:
        raise DomainError('t must be >= 0, got '+repr(t))
    return lam, t


def closed_form_forced(lam, params, t):
    """t^a [lam E_{a,a+1}(-lam t^a) + c E_{a,a+1}(c t^a)] / (lam + c),  c = i^a omega^a."""
    lam, t = _check_lambda_t(lam, t)
    if t == 0:
        return 0j
    a, c = params.alpha, params.forcing_eig
    ta = t**a
    decay = mittag_leffler(a, a+1, -lam*ta).value if lam else 0j
    growth = mittag_leffler(a, a+1, c*ta).value
    return ta*(lam*decay + c*growth)/(lam + c)


def closed_form_forced_array(lam, params, t):
    """closed_form_forced over an array of lambda >= 0 at a single time."""
    lam = np.asarray(lam, dtype=float)
    t = float(t)
    if np.any(lam < 0):
        raise DomainError('lambda must be >= 0')
    if t == 0:
        return np.zeros(lam.shape, dtype=complex)
    a, c = params.alpha, params.forcing_eig
    ta = t**a
    growth = mittag_leffler(a, a+1, c*ta).value
    decay = mittag_leffler_array(a, a+1, -lam*ta)
    return ta*(lam*decay + c*growth)/(lam + c)


def forced_response_symbol(lam, params, t):
    """lam t^a E_{a,a+1}(-lam t^a), bounded by 1 and close to 1 once lam t^a is large."""
    lam, t = _check_lambda_t(lam, t)
    if lam == 0 or t == 0:
        return 0.0
    a = params.alpha
    return (lam*t**a*mittag_leffler(a, a+1, -lam*t**a).value).real


def duhamel_solution(lam, params, t, tol=1e-12):
    """int_0^t (t-s)^{a-1} E_{a,a}(-lam (t-s)^a) phi_omega(s) ds.

    tol is the absolute and relative target of each quadrature; ConvergenceError is
    raised when the summed error estimates exceed what those targets allow.
    """
    lam, t = _check_lambda_t(lam, t)
    if t == 0:
        return 0j
    a = params.alpha
    phi = lambda s: mittag_leffler(a, 1.0, params.i_pow_alpha*(params.omega*s)**a).value
    kernel = lambda u: mittag_leffler(a, a, -lam*u**a).value
    err, allowed = 0.0, 0.0

    def part(f, lo, hi, **kwargs):
        nonlocal err, allowed
        value = 0j
        for unit, piece in ((1, lambda s: f(s).real), (1j, lambda s: f(s).imag)):
            v, e = integrate.quad(piece, lo, hi, epsabs=tol, epsrel=tol, limit=200, **kwargs)
            value += unit*v
            err += e
            allowed += tol*max(1.0, abs(v))
        return value

    # smooth half, then the weakly singular half with the (t-s)^{a-1} weight
    head = part(lambda s: (t-s)**(a-1)*kernel(t-s)*phi(s), 0.0, t/2)
    tail = part(lambda s: kernel(t-s)*phi(s), t/2, t, weight='alg', wvar=(0.0, a-1))
    if not err <= allowed:
        raise ConvergenceError('duhamel_solution: quadrature error %.3g exceeds %.3g at lam=%g, t=%g'
                               % (err, allowed, lam, t), best_abs_err=err)
    return head + tail

