"""Fundamental kernels of the fractional diffusion-wave equation.

Y = Gamma_{alpha,n} propagates the forcing, Z1 = H_alpha the initial value and
Z2 the initial slope (Z2 is only used through its Fourier symbol, see
spectral_utils.z2_symbol). With gamma = alpha/2 and y = r t^{-gamma} the n = 3
kernels reduce to Wright functions:

    Y  = t^{-1} Phi(-gamma, 0; -y) / (4 pi r)
    Z1 = t^{-alpha} Phi(-gamma, 1-alpha; -y) / (4 pi r)
"""
from dataclasses import dataclass, field

import mpmath
import numpy as np
import pandas as pd
from scipy import integrate, special
from tqdm.contrib.concurrent import thread_map

from specfun_utils import (ComplexSample, ConvergenceError, DomainError, EPS, FracParams,
                           get_num_threads, macdonald_k, mittag_leffler_array, principal_power,
                           wright_decay_rate, wright_phi, wright_phi_array)


KINDS = ('Z1', 'Z2', 'Y', 'dZ1')
MAX_HANKEL_DIM = 8


def _as_params(params):
    return params if isinstance(params, FracParams) else FracParams(params)


def _check_dim(n, n_max=None):
    if int(n) != n or n < 3:
        raise DomainError('dimension n must be an integer >= 3, got '+repr(n))
    if n_max is not None and n > n_max:
        raise DomainError('dimension n must be <= %d for this method, got %r' % (n_max, n))
    return int(n)


def _check_positive(name, value):
    value = float(value)
    if not (value > 0 and np.isfinite(value)):
        raise DomainError(name+' must be finite and > 0, got '+repr(value))
    return value


# ------------------------------------------------------------------
# containers
@dataclass
class RadialKernel:
    kind: str
    alpha: float
    n: int
    t: float
    radii: np.ndarray
    values: np.ndarray
    abs_err: np.ndarray

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError('kind must be one of '+str(KINDS)+', got '+repr(self.kind))
        self.radii = np.asarray(self.radii, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        self.abs_err = np.asarray(self.abs_err, dtype=float)
        if np.any(self.radii <= 0) or np.any(np.diff(self.radii) <= 0):
            raise DomainError('radii must be > 0 and strictly increasing')
        if not (self.radii.shape == self.values.shape == self.abs_err.shape):
            raise DomainError('radii, values and abs_err must have equal length')

    def to_frame(self):
        return pd.DataFrame({'kind': self.kind, 'alpha': self.alpha, 'n': self.n, 't': self.t,
                             'r': self.radii, 're': self.values.real, 'im': self.values.imag,
                             'abs_err': self.abs_err})


@dataclass(frozen=True)
class BoundParams:
    C: float
    sigma: float

    def __post_init__(self):
        if not (self.C > 0 and np.isfinite(self.C)):
            raise DomainError('BoundParams.C must be > 0, got '+repr(self.C))
        if not (self.sigma > 0 and np.isfinite(self.sigma)):
            raise DomainError('BoundParams.sigma must be > 0, got '+repr(self.sigma))


@dataclass(frozen=True)
class EnvelopeInputs:
    alpha: float
    n: int
    sigma: float

    def stretched_variable(self, t, r):
        return (np.asarray(r, dtype=float) * np.asarray(t, dtype=float)**(-self.alpha/2))**(2/(2-self.alpha))

    def rho_sigma(self, t, r):
        return np.exp(-self.sigma*self.stretched_variable(t, r))

    def mu_n(self, z):
        z = np.asarray(z, dtype=float)
        if self.n == 3:
            return np.ones_like(z)
        if self.n == 4:
            return 1 + np.abs(np.log(z))
        return z**(4-self.n)


@dataclass
class KernelBound:
    kind: str
    n: int
    alpha: float
    params: BoundParams
    inputs: EnvelopeInputs = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError('kind must be one of '+str(KINDS)+', got '+repr(self.kind))
        self.inputs = EnvelopeInputs(self.alpha, self.n, self.params.sigma)

    def shape(self, t, r):
        """Envelope without C and without the stretched exponential."""
        t, r = np.asarray(t, dtype=float), np.asarray(r, dtype=float)
        a, n = self.alpha, self.n
        if self.kind == 'Z1':
            return t**(-a) * r**(2-n)
        if self.kind == 'Z2':
            return t**(1-a) * r**(2-n)
        if self.kind == 'dZ1':
            return t**(-a) * r**(1-n)
        return t**(a - a*n/2 - 1) * self.inputs.mu_n(t**(-a/2)*r)

    def envelope(self, t, r):
        return self.params.C * self.shape(t, r) * self.inputs.rho_sigma(t, r)


# ------------------------------------------------------------------
# f_{alpha/2} and Y = Gamma_{alpha,n}
def _phi_neg(rho, delta, x):
    return float(wright_phi_array(rho, delta, np.array([x]))[0])


def f_alpha_half(alpha, z, mu, delta, method='auto', tol=1e-12):
    """f(z) = 2/Gamma(mu/2) int_1^inf Phi(-alpha/2, delta; -z s) (s^2-1)^{mu/2-1} ds."""
    alpha = float(alpha)
    if not (1 < alpha < 2):
        raise DomainError('f_alpha_half: alpha must lie in (1, 2), got '+repr(alpha))
    z = _check_positive('f_alpha_half: z', z)
    mu = _check_positive('f_alpha_half: mu', mu)
    if method not in ('auto', 'quadrature'):
        raise DomainError("f_alpha_half: method must be 'auto' or 'quadrature', got "+repr(method))
    gamma = alpha/2
    if method == 'auto' and mu == 2:
        sample = wright_phi(-gamma, delta+gamma, -z, tol=tol)
        return ComplexSample(2*sample.value.real/z, 2*sample.abs_err/z, sample.regime)

    # past x_star the integrand sits below exp(-90)
    sigma0 = wright_decay_rate(gamma)
    x_star = (90.0/sigma0)**(1-gamma)
    t_star = max(2.0, x_star/z)
    a = mu/2 - 1
    coef = 2*special.rgamma(mu/2)
    value, err = integrate.quad(lambda s: coef*_phi_neg(-gamma, delta, z*s)*(s+1)**a, 1.0, t_star,
                                weight='alg', wvar=(a, 0.0), epsabs=tol/10, epsrel=1e-12, limit=400)
    tail = coef*np.exp(-sigma0*(z*t_star)**(1/(1-gamma)))*(1 + z*t_star)**(abs(1-delta)+1)*t_star**(mu+1)
    return ComplexSample(value, err + tail + 4*EPS*abs(value), 'quadrature')


def gamma_kernel(params, n, r, t, method='auto'):
    """Y = Gamma_{alpha,n}(r, t), the kernel propagating the forcing."""
    params = _as_params(params)
    n = _check_dim(n)
    r = _check_positive('gamma_kernel: r', r)
    t = _check_positive('gamma_kernel: t', t)
    alpha, gamma = params.alpha, params.gamma
    y = r * t**(-gamma)
    if n == 3 and method == 'auto':
        sample = wright_phi(-gamma, 0.0, -y)
        scale = 1/(4*np.pi*r*t)
        return ComplexSample(scale*sample.value.real, scale*sample.abs_err, sample.regime)
    f = f_alpha_half(alpha, y, n-1, alpha - alpha*n/2, method='quadrature')
    scale = 2.0**(-n) * np.pi**((1-n)/2) * t**(alpha - alpha*n/2 - 1)
    return ComplexSample(scale*f.value.real, scale*f.abs_err, f.regime)


def gamma_kernel_array(alpha, r, t):
    """Vectorised n = 3 forcing kernel over broadcast r, t > 0."""
    r, t = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(t, dtype=float))
    gamma = alpha/2
    return wright_phi_array(-gamma, 0.0, r*t**(-gamma)) / (4*np.pi*r*t)


def z1_kernel_array(alpha, r, t):
    r, t = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(t, dtype=float))
    gamma = alpha/2
    return wright_phi_array(-gamma, 1-alpha, r*t**(-gamma)) * t**(-alpha) / (4*np.pi*r)


def laplace_gamma_transform(alpha, n, r, s, method='closed_form'):
    """int_0^inf e^{-st} Gamma_{alpha,n}(r,t) dt, either side of the Macdonald identity."""
    params = _as_params(alpha)
    n = _check_dim(n)
    r = _check_positive('laplace_gamma_transform: r', r)
    s = complex(s)
    if not s.real > 0:
        raise DomainError('laplace_gamma_transform: Re s must be > 0, got '+repr(s))
    alpha = params.alpha
    if method == 'closed_form':
        return _macdonald_side(alpha, n, r, s)
    if method != 'quadrature':
        raise DomainError("laplace_gamma_transform: method must be 'closed_form' or 'quadrature', got "+repr(method))

    if n == 3:
        kernel = lambda t: float(gamma_kernel_array(alpha, r, t))
    else:
        kernel = lambda t: gamma_kernel(params, n, r, t).value.real
    # the kernel peaks near t = r^{2/alpha}
    split = 4*r**(2/alpha)
    total, err = 0j, 0.0
    for a, b in ((0.0, split), (split, np.inf)):
        re, e_re = integrate.quad(lambda t: np.exp(-s.real*t)*np.cos(s.imag*t)*kernel(t), a, b,
                                  epsabs=1e-14, epsrel=1e-10, limit=400)
        im, e_im = integrate.quad(lambda t: -np.exp(-s.real*t)*np.sin(s.imag*t)*kernel(t), a, b,
                                  epsabs=1e-14, epsrel=1e-10, limit=400)
        total += re + 1j*im
        err += e_re + e_im
    return ComplexSample(total, err, 'quadrature')


def _macdonald_side(alpha, n, r, s):
    # (2 pi)^{-n/2} r^{1-n/2} s^{-alpha/2 + alpha n/4} K_{n/2-1}(s^{alpha/2} r)
    k = macdonald_k(n/2 - 1, principal_power(s, alpha/2)*r)
    scale = (2*np.pi)**(-n/2) * r**(1-n/2) * principal_power(s, -alpha/2 + alpha*n/4)
    return ComplexSample(scale*k.value, abs(scale)*k.abs_err, k.regime)


def fourier_gamma_transform(params, n, r, omega_lt, verify=False):
    """int_0^inf e^{-i omega t} Gamma_{alpha,n}(r,t) dt from the Macdonald closed form.

    verify=True also integrates the oscillatory left-hand side with Fourier-weight
    quadrature and reports the discrepancy as abs_err.
    """
    params = _as_params(params)
    n = _check_dim(n)
    r = _check_positive('fourier_gamma_transform: r', r)
    omega = float(omega_lt)
    if omega == 0 or not np.isfinite(omega):
        raise DomainError('fourier_gamma_transform: omega_lt must be finite and nonzero, got '+repr(omega))
    # (i omega)^{alpha/2} has Re > 0 for either sign of omega
    rhs = _macdonald_side(params.alpha, n, r, 1j*omega)
    if not verify:
        return rhs
    if n == 3:
        kernel = lambda t: float(gamma_kernel_array(params.alpha, r, t)) if t > 0 else 0.0
    else:
        kernel = lambda t: gamma_kernel(params, n, r, t).value.real if t > 0 else 0.0
    re, _ = integrate.quad(kernel, 0.0, np.inf, weight='cos', wvar=abs(omega), limlst=200)
    im, _ = integrate.quad(kernel, 0.0, np.inf, weight='sin', wvar=abs(omega), limlst=200)
    lhs = re - 1j*np.sign(omega)*im
    return ComplexSample(rhs.value, rhs.abs_err + abs(lhs - rhs.value), 'quadrature')


def y_mass(alpha, t, method='closed_form'):
    """int_{R^3} Y(t, x) dx = t^{alpha-1}/Gamma(alpha)."""
    params = _as_params(alpha)
    t = _check_positive('y_mass: t', t)
    if method == 'closed_form':
        return ComplexSample(t**(params.alpha-1)*special.rgamma(params.alpha), 0.0, 'series')
    return _radial_mass(params.alpha, 0.0, t**(params.alpha-1))


def z1_mass(alpha, t):
    """Radial quadrature of int_{R^3} Z1(t, x) dx (equal to 1)."""
    params = _as_params(alpha)
    t = _check_positive('z1_mass: t', t)
    return _radial_mass(params.alpha, 1-params.alpha, 1.0)


def _radial_mass(alpha, delta, scale):
    # int 4 pi r^2 K dr = scale * int_0^inf y Phi(-alpha/2, delta; -y) dy
    gamma = alpha/2
    y_max = (120.0/wright_decay_rate(gamma))**(1-gamma)
    f = lambda y: y*_phi_neg(-gamma, delta, y)
    total, err = 0.0, 0.0
    for a, b in ((0.0, 1.0), (1.0, y_max)):
        part, e = integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-12, limit=400)
        total += part
        err += e
    return ComplexSample(scale*total, scale*err, 'quadrature')


# ------------------------------------------------------------------
# Z1 = H_alpha
def _riesz_potential(n, j, r):
    # inverse Fourier transform of |xi|^{-2j} in R^n, 2j < n
    return special.gamma(n/2 - j) / (4.0**j * np.pi**(n/2) * special.gamma(j)) * r**(2*j - n)


def _z1_hankel(alpha, n, r, t, num_periods=60, order=20):
    """Radial inverse Fourier transform of E_alpha(-|xi|^2 t^alpha) in R^n.

    The leading algebraic terms of the symbol are removed above k0 and restored
    through their Riesz potentials; the remainder is summed over half periods
    of the Bessel function and accelerated with Shanks' transformation.
    """
    nu = n/2 - 1
    num_terms = (n - 1)//2
    coefs = [(-1)**(j+1) * t**(-alpha*j) * special.rgamma(1 - alpha*j) for j in range(1, num_terms+1)]
    k0 = np.sqrt(40.0/t**alpha)
    half_period = np.pi/r
    x, w = np.polynomial.legendre.leggauss(order)

    def nodes(a, b):
        return 0.5*(b-a)*x + 0.5*(b+a), 0.5*(b-a)*w

    num_low = max(8, int(np.ceil(2*k0/half_period)))
    edges = np.linspace(0.0, k0, num_low+1)
    k_low = np.concatenate([nodes(a, b)[0] for a, b in zip(edges[:-1], edges[1:])])
    w_low = np.concatenate([nodes(a, b)[1] for a, b in zip(edges[:-1], edges[1:])])
    bessel_low = special.jv(nu, k_low*r) * k_low**(n/2)
    low = np.sum(w_low * mittag_leffler_array(alpha, 1.0, -k_low**2*t**alpha).real * bessel_low)

    edges = k0 + half_period*np.arange(num_periods+1)
    k_tail = np.concatenate([nodes(a, b)[0] for a, b in zip(edges[:-1], edges[1:])])
    w_tail = np.concatenate([nodes(a, b)[1] for a, b in zip(edges[:-1], edges[1:])])
    symbol = mittag_leffler_array(alpha, 1.0, -k_tail**2*t**alpha).real
    for j, c in enumerate(coefs, start=1):
        symbol = symbol - c*k_tail**(-2*j)
    pieces = (w_tail * symbol * special.jv(nu, k_tail*r) * k_tail**(n/2)).reshape(num_periods, order).sum(axis=1)
    table = mpmath.shanks(np.cumsum(pieces).tolist())
    row = table[-1]
    tail = float(row[-1])
    tail_err = float(abs(row[-1] - row[-3])) if len(row) >= 3 else abs(pieces[-1])

    scale = (2*np.pi)**(-n/2) * r**(1-n/2)
    value = scale*(low + tail)
    for j, c in enumerate(coefs, start=1):
        head = np.sum(w_low * k_low**(-2*j) * bessel_low)
        value += c*(_riesz_potential(n, j, r) - scale*head)
    return value, scale*tail_err + 1e-13*(1 + abs(value))


def z1_kernel(params, n, r, t, method='auto'):
    """Z1 = H_alpha(t, r), the kernel propagating the initial value."""
    params = _as_params(params)
    n = _check_dim(n)
    r = _check_positive('z1_kernel: r', r)
    t = _check_positive('z1_kernel: t', t)
    if method == 'auto':
        method = 'wright' if n == 3 else 'hankel'
    if method == 'wright':
        if n != 3:
            raise DomainError("z1_kernel: method='wright' needs n = 3, got "+repr(n))
        gamma = params.gamma
        sample = wright_phi(-gamma, 1-params.alpha, -r*t**(-gamma))
        scale = t**(-params.alpha)/(4*np.pi*r)
        return ComplexSample(scale*sample.value.real, scale*sample.abs_err, sample.regime)
    if method != 'hankel':
        raise DomainError("z1_kernel: method must be 'auto', 'wright' or 'hankel', got "+repr(method))
    _check_dim(n, MAX_HANKEL_DIM)
    value, err = _z1_hankel(params.alpha, n, r, t)
    return ComplexSample(value, err, 'quadrature')


def z1_radial_derivative(params, n, r, t, h=None):
    """dH/dr: differentiated Wright form for n = 3, Richardson-extrapolated central differences otherwise."""
    params = _as_params(params)
    n = _check_dim(n)
    r = _check_positive('z1_radial_derivative: r', r)
    t = _check_positive('z1_radial_derivative: t', t)
    alpha, gamma = params.alpha, params.gamma
    if n == 3:
        y = r*t**(-gamma)
        phi0 = wright_phi(-gamma, 1-alpha, -y)
        phi1 = wright_phi(-gamma, 1-alpha-gamma, -y)
        a = t**(-alpha)/(4*np.pi*r*r)
        b = t**(-alpha-gamma)/(4*np.pi*r)
        value = -a*phi0.value.real - b*phi1.value.real
        return ComplexSample(value, a*phi0.abs_err + b*phi1.abs_err, 'quadrature')

    h = 1e-3*r if h is None else float(h)
    if h < 1e-8*r or r - h <= 0:
        raise ConvergenceError('z1_radial_derivative: step %g underflows at r=%g' % (h, r))
    H = lambda x: z1_kernel(params, n, x, t).value.real
    d1 = (H(r+h) - H(r-h))/(2*h)
    d2 = (H(r+h/2) - H(r-h/2))/h
    value = (4*d2 - d1)/3
    return ComplexSample(value, abs(d2 - d1), 'quadrature')


# ------------------------------------------------------------------
# tabulation and bounds
_EVALUATORS = {
    'Y': gamma_kernel,
    'Z1': z1_kernel,
    'dZ1': z1_radial_derivative,
}


def tabulate_kernel(kind, params, n, t, radii, disable_progress=True):
    if kind not in _EVALUATORS:
        raise DomainError('tabulate_kernel: kind must be one of '+str(sorted(_EVALUATORS))+', got '+repr(kind))
    params = _as_params(params)
    radii = np.asarray(radii, dtype=float)
    evaluate = _EVALUATORS[kind]
    samples = thread_map(lambda r: evaluate(params, n, r, t), radii, max_workers=get_num_threads(),
                         disable=disable_progress, desc='tabulate '+kind)
    return RadialKernel(kind, params.alpha, n, t, radii,
                        np.array([s.value for s in samples]), np.array([s.abs_err for s in samples]))


def fit_bound(kind, alpha, n, samples):
    """Fit (C, sigma) so that |K| <= C * shape * exp(-sigma w) on the calibration samples.

    samples: iterable of (t, r, value). sigma is half the least-squares decay rate of
    log|K| - log(shape) against w = (r t^{-alpha/2})^{2/(2-alpha)}; C doubles the largest ratio.
    """
    samples = list(samples)
    t = np.array([s[0] for s in samples], dtype=float)
    r = np.array([s[1] for s in samples], dtype=float)
    v = np.array([s[2] for s in samples], dtype=complex)
    unit = KernelBound(kind, n, alpha, BoundParams(1.0, 1.0))
    w = unit.inputs.stretched_variable(t, r)
    ratio = np.abs(v)/unit.shape(t, r)
    usable = ratio > 1e-250
    if np.count_nonzero(usable) < 2:
        raise DomainError('fit_bound: need at least two nonvanishing samples')
    slope = np.polyfit(w[usable], np.log(ratio[usable]), 1)[0]
    sigma = max(-0.5*slope, 1e-6)
    C = 2*np.max(ratio[usable]*np.exp(sigma*w[usable]))
    return KernelBound(kind, n, alpha, BoundParams(C, sigma))


def check_bound(bound, samples):
    """Samples (t, r, value) that violate the bound."""
    violations = []
    for t, r, v in samples:
        if abs(v) > bound.envelope(t, r)*(1 + 1e-12):
            violations.append((t, r, v))
    return violations
