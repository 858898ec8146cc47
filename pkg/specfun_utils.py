"""Special functions: Mittag-Leffler, Wright, Macdonald and principal powers.

Every scalar evaluator returns a ComplexSample carrying the value, an upper
estimate of its absolute error and the regime that produced it. The *_array
variants are the bulk paths used by lattices and quadrature nodes; they share
the same representations but return plain arrays.
"""
import cmath
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special


EPS = np.finfo(float).eps
REGIMES = ('series', 'asymptotic', 'quadrature')
ASYMPTOTIC_RHO = 36.0  # e^{-36} ~ 2e-16: exponentially small cut contributions are below round-off
CUT_R_MAX = 60.0  # e^{-r} r^2 < 1e-22 beyond this point
ON_CUT_ATOL = 1e-12


class FracwaveError(Exception):
    pass


class DomainError(FracwaveError, ValueError):
    pass


class DomainTooSmallError(DomainError):
    pass


class ConvergenceError(FracwaveError, ArithmeticError):
    def __init__(self, message, best_abs_err=None):
        super().__init__(message)
        self.best_abs_err = best_abs_err


def get_num_threads():
    # FRACWAVE_THREADS caps every worker pool and scipy.fft
    value = os.environ.get('FRACWAVE_THREADS')
    if value is None:
        return os.cpu_count() or 1
    try:
        n = int(value)
    except ValueError:
        raise DomainError('FRACWAVE_THREADS must be a positive integer, got '+repr(value))
    if n < 1:
        raise DomainError('FRACWAVE_THREADS must be a positive integer, got '+repr(value))
    return n


@dataclass(frozen=True)
class ComplexSample:
    value: complex
    abs_err: float
    regime: str

    def __post_init__(self):
        object.__setattr__(self, 'value', complex(self.value))
        object.__setattr__(self, 'abs_err', float(self.abs_err))
        if self.regime not in REGIMES:
            raise DomainError('regime must be one of '+str(REGIMES)+', got '+repr(self.regime))
        if not (np.isfinite(self.abs_err) and self.abs_err >= 0):
            raise DomainError('abs_err must be finite and >= 0, got '+repr(self.abs_err))
        if not cmath.isfinite(self.value):
            raise ConvergenceError('non-finite value '+repr(self.value)+' in the '+self.regime+' regime')

    @property
    def real(self):
        return self.value.real

    @property
    def imag(self):
        return self.value.imag

    def __complex__(self):
        return self.value

    def __abs__(self):
        return abs(self.value)


def principal_power(base, exponent):
    """base**exponent on the principal branch, arg(base) taken in (-pi, pi]."""
    base, exponent = complex(base), float(exponent)
    if base == 0:
        if exponent <= 0:
            raise DomainError('principal_power: base=0 requires exponent > 0, got '+repr(exponent))
        return 0j
    theta = cmath.phase(base)
    if theta == -np.pi: # -1-0j sits on the cut; map it to +pi
        theta = np.pi
    return abs(base)**exponent * cmath.exp(1j*exponent*theta)


@dataclass(frozen=True)
class FracParams:
    alpha: float
    omega: float = 1.0
    i_pow_alpha: complex = field(init=False, repr=False)
    forcing_eig: complex = field(init=False, repr=False)
    helmholtz_root: complex = field(init=False, repr=False)

    def __post_init__(self):
        alpha, omega = float(self.alpha), float(self.omega)
        if not (1 < alpha < 2):
            raise DomainError('alpha must lie in (1, 2), got '+repr(self.alpha))
        if not (omega > 0 and np.isfinite(omega)):
            raise DomainError('omega must be > 0, got '+repr(self.omega))
        object.__setattr__(self, 'alpha', alpha)
        object.__setattr__(self, 'omega', omega)
        i_pow_alpha = principal_power(1j, alpha)
        object.__setattr__(self, 'i_pow_alpha', i_pow_alpha)
        object.__setattr__(self, 'forcing_eig', i_pow_alpha * omega**alpha)
        object.__setattr__(self, 'helmholtz_root', principal_power(1j*omega, alpha/2))

    @property
    def gamma(self):
        # order of the one-sided stable law behind the kernels
        return self.alpha/2


def _check_finite(name, value):
    if not np.all(np.isfinite(value)):
        raise DomainError(name+' must be finite, got '+repr(value))


# ------------------------------------------------------------------
# Mittag-Leffler function
def crossover_radius(alpha):
    return 5.0 + 5.0*alpha


def _check_ml_params(alpha, beta):
    if not (0 < alpha <= 2):
        raise DomainError('mittag_leffler: alpha must lie in (0, 2], got '+repr(alpha))
    if not beta > 0:
        raise DomainError('mittag_leffler: beta must be > 0, got '+repr(beta))


def _series_length(alpha, beta, zmax):
    if zmax == 0:
        return 1
    k = np.arange(4000)
    log_terms = k*np.log(zmax) - special.gammaln(alpha*k+beta)
    peak = int(np.argmax(log_terms))
    below = np.nonzero(log_terms[peak:] < log_terms[peak] - 40.0)[0]
    if len(below) == 0:
        raise ConvergenceError('mittag_leffler: series does not settle for |z|='+str(zmax))
    return peak + int(below[0]) + 1


def _ml_series(alpha, beta, z):
    """Defining series for an array of z; returns (values, abs_errs)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    values = np.full(z.shape, special.rgamma(beta), dtype=complex)
    errs = np.zeros(z.shape)
    nonzero = z != 0
    if not np.any(nonzero):
        return values, errs
    zz = z[nonzero]
    num_terms = _series_length(alpha, beta, np.max(np.abs(zz)))
    k = np.arange(num_terms)
    log_rg = -special.gammaln(alpha*k+beta)
    log_terms = np.outer(np.log(zz), k) + log_rg
    terms = np.exp(log_terms)
    mags = np.exp(log_terms.real)
    values[nonzero] = terms.sum(axis=1)
    # round-off of the summation plus a geometric bound on the dropped tail
    errs[nonzero] = 4*EPS*mags.sum(axis=1)*np.sqrt(num_terms) + 2*mags[:, -1]
    return values, errs


def _exponential_terms(alpha, beta, z):
    """Residue terms (1/alpha) t^{1-beta} e^t of the Hankel representation.

    Poles with |arg z + 2 pi m| < alpha*pi count fully, poles on the cut count half.
    Returns (sum, list of on-cut t values).
    """
    rho = abs(z)**(1/alpha)
    theta0 = cmath.phase(z)
    if theta0 == -np.pi:
        theta0 = np.pi
    total, on_cut = 0j, []
    for m in (-1, 0, 1):
        theta = theta0 + 2*np.pi*m
        gap = alpha*np.pi - abs(theta)
        if gap < -ON_CUT_ATOL:
            continue
        t_m = rho*cmath.exp(1j*theta/alpha)
        term = rho**(1-beta)*cmath.exp(1j*theta*(1-beta)/alpha) * cmath.exp(t_m) / alpha
        if abs(gap) <= ON_CUT_ATOL:
            total += 0.5*term
            on_cut.append(rho)
        else:
            total += term
    return total, on_cut


def _reduce_beta(alpha, beta):
    steps = 0
    while beta > alpha:
        beta -= alpha
        steps += 1
    return beta, steps


def _lift_beta(alpha, beta_low, steps, z, value, err):
    # E_{a,b+a}(z) = (E_{a,b}(z) - 1/Gamma(b)) / z
    b = beta_low
    for _ in range(steps):
        value = (value - special.rgamma(b)) / z
        err = err / abs(z)
        b += alpha
    return value, err


def _cut_integrand(alpha, beta, z):
    s1 = np.sin(np.pi*(1-beta))
    s2 = np.sin(np.pi*(1-beta+alpha))
    c = np.cos(np.pi*alpha)

    def f(r):
        ra = r**alpha
        return np.exp(-r) * r**(alpha-beta) * (ra*s1 - z*s2) / (ra*ra - 2*ra*z*c + z*z) / np.pi
    return f


def _pole_distance(alpha, z):
    """Distance from the positive real r-axis to the poles of the cut integrand."""
    rho = abs(z)**(1/alpha)
    theta = cmath.phase(z)
    best = np.inf
    for sign in (1, -1):
        for k in range(-3, 4):
            phi = (theta + sign*np.pi*alpha + 2*np.pi*k)/alpha
            if -np.pi < phi <= np.pi:
                dist = rho*abs(np.sin(phi)) if abs(phi) <= np.pi/2 else rho
                best = min(best, dist)
    return best


def _quad_complex(f, a, b, tol, **kwargs):
    re, err_re = integrate.quad(lambda r: f(r).real, a, b, epsabs=tol, epsrel=1e-13, limit=400, **kwargs)
    im, err_im = integrate.quad(lambda r: f(r).imag, a, b, epsabs=tol, epsrel=1e-13, limit=400, **kwargs)
    return re + 1j*im, err_re + err_im


def _cut_integral_quad(alpha, beta, z, on_cut, tol):
    """Adaptive evaluation of the Hankel-cut integral (beta already reduced to (0, alpha])."""
    f = _cut_integrand(alpha, beta, z)
    value, err = _quad_complex(f, 0.0, 1.0, tol)
    if on_cut:
        # simple pole on the path: principal value with the vanishing factor divided out
        r_p = on_cut[0]
        w_cut, w_other = z*np.exp(1j*np.pi*alpha), z*np.exp(-1j*np.pi*alpha)
        if abs(cmath.phase(w_other)) < abs(cmath.phase(w_cut)):
            w_cut, w_other = w_other, w_cut
        s1 = np.sin(np.pi*(1-beta))
        s2 = np.sin(np.pi*(1-beta+alpha))

        def g(r):
            ra = r**alpha
            if abs(r - r_p) < 1e-9*r_p:
                ratio = 1/(alpha*r_p**(alpha-1))
            else:
                ratio = (r - r_p)/(ra - r_p**alpha)
            return np.exp(-r)*r**(alpha-beta)*(ra*s1 - z*s2)/(ra - w_other)*ratio/np.pi
        b = max(CUT_R_MAX, r_p + 10.0)
        part, part_err = _quad_complex(g, 1.0, b, tol, weight='cauchy', wvar=r_p)
    else:
        pole = _pole_real_part(alpha, z)
        points = [pole] if 1.0 < pole < CUT_R_MAX else None
        part, part_err = _quad_complex(f, 1.0, CUT_R_MAX, tol, points=points)
    return value + part, err + part_err


def _pole_real_part(alpha, z):
    rho = abs(z)**(1/alpha)
    theta = cmath.phase(z)
    best, best_dist = rho, np.inf
    for sign in (1, -1):
        for k in range(-3, 4):
            phi = (theta + sign*np.pi*alpha + 2*np.pi*k)/alpha
            if -np.pi/2 <= phi <= np.pi/2 and rho*abs(np.sin(phi)) < best_dist:
                best, best_dist = rho*np.cos(phi), rho*abs(np.sin(phi))
    return best


def _algebraic_series(alpha, beta, z):
    """-sum_k z^{-k}/Gamma(beta - alpha k) truncated at its smallest term."""
    k = np.arange(1, 400)
    x = beta - alpha*k
    log_mag = -k*np.log(abs(z)) - special.gammaln(x)
    mags = np.exp(log_mag)
    nonzero = np.nonzero(mags > 0)[0]
    if len(nonzero) == 0:
        return 0j, 0.0
    # first local minimum among the nonvanishing terms
    stop = len(k) - 1
    for j in range(1, len(nonzero)):
        if mags[nonzero[j]] > mags[nonzero[j-1]]:
            stop = nonzero[j-1]
            break
    # z^{-k}/Gamma(x) in log space; 1/Gamma vanishes at the poles x = 0, -1, ...
    x, k = x[:stop], k[:stop]
    poles = (x <= 0) & (x == np.round(x))
    log_terms = -k*np.log(complex(z)) - np.where(poles, 0.0, special.gammaln(x))
    terms = np.where(poles, 0.0, special.gammasgn(x)*np.exp(log_terms))
    return -terms.sum(), float(mags[stop]) + 4*EPS*float(np.sum(mags[:stop]))


def _ml_far(alpha, beta, z, tol):
    """Large-|z| representation: residue terms plus algebraic series or cut integral."""
    rho = abs(z)**(1/alpha)
    if rho >= ASYMPTOTIC_RHO:
        expo, _ = _exponential_terms(alpha, beta, z)
        alg, err = _algebraic_series(alpha, beta, z)
        err += 10*EPS*abs(expo) + 2*np.exp(-rho)*(1 + rho**abs(1-beta))
        return expo + alg, err, 'asymptotic'
    beta_low, steps = _reduce_beta(alpha, beta)
    expo, on_cut = _exponential_terms(alpha, beta_low, z)
    cut, err = _cut_integral_quad(alpha, beta_low, z, on_cut, tol/10)
    value, err = _lift_beta(alpha, beta_low, steps, z, expo + cut, err + 10*EPS*abs(expo))
    return value, err, 'quadrature'


def _series_only(alpha):
    # the Hankel representation below is used for alpha in (0,1) U (1,2)
    return alpha == 1 or alpha == 2


def _series_sample(alpha, beta, z):
    value, err = _ml_series(alpha, beta, z)
    return ComplexSample(value[0], err[0], 'series')


def mittag_leffler(alpha, beta, z, tol=1e-12, regime=None):
    """E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta).

    regime=None picks the series for |z| <= 5+5*alpha and the large-|z|
    representation beyond; 'series' or 'asymptotic' forces one of them.
    """
    alpha, beta = float(alpha), float(beta)
    _check_ml_params(alpha, beta)
    z = complex(z)
    _check_finite('mittag_leffler: z', z)
    if regime not in (None, 'series', 'asymptotic'):
        raise DomainError("mittag_leffler: regime must be None, 'series' or 'asymptotic', got "+repr(regime))
    if regime == 'asymptotic' and (_series_only(alpha) or z == 0):
        raise DomainError('mittag_leffler: the large-|z| representation needs alpha not in {1, 2} and z != 0')

    if regime == 'series':
        return _series_sample(alpha, beta, z)
    if regime == 'asymptotic':
        return ComplexSample(*_ml_far(alpha, beta, z, tol))

    far_ok = not _series_only(alpha) and z != 0
    if abs(z) <= crossover_radius(alpha) or not far_ok:
        sample = _series_sample(alpha, beta, z)
    else:
        sample = ComplexSample(*_ml_far(alpha, beta, z, tol))
    scale = max(1.0, abs(sample.value))
    if sample.abs_err > tol*scale and far_ok:
        if sample.regime == 'series':
            other = ComplexSample(*_ml_far(alpha, beta, z, tol))
        else:
            other = _series_sample(alpha, beta, z)
        if other.abs_err < sample.abs_err:
            sample = other
    if sample.abs_err > 1e3*tol*scale:
        raise ConvergenceError('mittag_leffler: tolerance %g unreachable at alpha=%g, beta=%g, z=%r'
                               % (tol, alpha, beta, z), best_abs_err=sample.abs_err)
    return sample


def _panel_rule(edges, order):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = (0.5*(b - a)*x + 0.5*(b + a)).ravel()
    weights = (0.5*(b - a)*w).ravel()
    return nodes, weights


def _cut_rule():
    # geometric panels resolve the r^alpha behaviour at 0, uniform panels the rest
    graded = 0.15**np.arange(20, -1, -1)
    uniform = np.arange(1.0, CUT_R_MAX + 0.25, 0.5)
    n0, w0 = _panel_rule(np.concatenate([[0.0], graded]), 8)
    n1, w1 = _panel_rule(uniform, 10)
    return np.concatenate([n0, n1]), np.concatenate([w0, w1])


_CUT_NODES, _CUT_WEIGHTS = _cut_rule()


def _cut_integral_fixed(alpha, beta, z):
    """Fixed-rule cut integral for an array of z whose poles stay away from the path."""
    values = np.empty(z.shape, dtype=complex)
    r = _CUT_NODES[None, :]
    for start in range(0, len(z), 256):
        block = z[start:start+256, None]
        values[start:start+256] = _cut_integrand(alpha, beta, block)(r) @ _CUT_WEIGHTS
    return values


def mittag_leffler_array(alpha, beta, z):
    """Vectorised E_{alpha,beta} over an array; distinct arguments are evaluated once."""
    alpha, beta = float(alpha), float(beta)
    _check_ml_params(alpha, beta)
    z = np.asarray(z)
    shape = z.shape
    flat = z.astype(complex).ravel()
    _check_finite('mittag_leffler_array: z', flat)
    uniq, inverse = np.unique(flat, return_inverse=True)
    out = np.empty(uniq.shape, dtype=complex)

    near = (np.abs(uniq) <= crossover_radius(alpha)) | _series_only(alpha) | (uniq == 0)
    if np.any(near):
        out[near] = _ml_series(alpha, beta, uniq[near])[0]
    far_idx = np.nonzero(~near)[0]
    if len(far_idx):
        beta_low, steps = _reduce_beta(alpha, beta)
        fixed = []
        for i in far_idx:
            zi = uniq[i]
            rho = abs(zi)**(1/alpha)
            if rho >= ASYMPTOTIC_RHO:
                expo, _ = _exponential_terms(alpha, beta, zi)
                out[i] = expo + _algebraic_series(alpha, beta, zi)[0]
            elif _pole_distance(alpha, zi) < 0.5:
                out[i] = _ml_far(alpha, beta, zi, 1e-13)[0]
            else:
                fixed.append(i)
        if fixed:
            fixed = np.array(fixed)
            zf = uniq[fixed]
            cut = _cut_integral_fixed(alpha, beta_low, zf)
            for j, i in enumerate(fixed):
                expo, _ = _exponential_terms(alpha, beta_low, uniq[i])
                out[i] = _lift_beta(alpha, beta_low, steps, uniq[i], expo + cut[j], 0.0)[0]
    bad = ~np.isfinite(out)
    if np.any(bad):
        raise ConvergenceError('mittag_leffler_array: non-finite value at z=%r' % (uniq[bad][0],))
    return out[inverse].reshape(shape)


def mittag_leffler_on_ray(params, t, tol=1e-12):
    """phi_omega(t) = E_alpha(i^alpha omega^alpha t^alpha), nonzero on the whole ray."""
    t = float(t)
    if not (t >= 0 and np.isfinite(t)):
        raise DomainError('mittag_leffler_on_ray: t must be finite and >= 0, got '+repr(t))
    z = params.i_pow_alpha * (params.omega*t)**params.alpha
    sample = mittag_leffler(params.alpha, 1.0, z, tol=tol)
    if abs(sample.value) <= sample.abs_err:
        raise ConvergenceError('mittag_leffler_on_ray: value not resolved above its error at t='+str(t),
                               best_abs_err=sample.abs_err)
    return sample


def ray_remainder(params, t, tol=1e-12):
    """r(t) = phi_omega(t) - e^{i omega t}/alpha."""
    sample = mittag_leffler_on_ray(params, t, tol=tol)
    leading = np.exp(1j*params.omega*float(t)) / params.alpha
    return ComplexSample(sample.value - leading, sample.abs_err + EPS, sample.regime)


# ------------------------------------------------------------------
# Wright function
def wright_decay_rate(gamma):
    """sigma_0 with Phi(-gamma, delta; -x) ~ exp(-sigma_0 x^{1/(1-gamma)})."""
    if not (0 < gamma < 1):
        raise DomainError('wright_decay_rate: gamma must lie in (0, 1), got '+repr(gamma))
    return (1-gamma) * gamma**(gamma/(1-gamma))


def _check_wright_params(rho, delta):
    if not (-1 < rho < 0):
        raise DomainError('wright_phi: rho must lie in (-1, 0), got '+repr(rho))
    _check_finite('wright_phi: delta', delta)


def _wright_series(rho, delta, z):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    values = np.full(z.shape, special.rgamma(delta), dtype=complex)
    errs = np.zeros(z.shape)
    nonzero = z != 0
    if not np.any(nonzero):
        return values, errs
    zz = z[nonzero]
    zmax = np.max(np.abs(zz))
    m = np.arange(600)
    x = delta + rho*m
    # |1/Gamma(x)| <= Gamma(1-x)/pi once x < 0: a monotone envelope for the tail
    log_env = m*np.log(zmax) - special.gammaln(m+1) + special.gammaln(np.maximum(1-x, 1.0)) - np.log(np.pi)
    peak = int(np.argmax(log_env))
    below = np.nonzero(log_env[peak:] < log_env[peak] - 40.0)[0]
    if len(below) == 0:
        raise ConvergenceError('wright_phi: series does not settle for |z|='+str(zmax))
    num_terms = peak + int(below[0]) + 1
    m, x = m[:num_terms], x[:num_terms]
    gl = special.gammaln(x)
    pole = ~np.isfinite(gl) | ((x <= 0) & (x == np.round(x)))
    sign = np.where(pole, 0.0, special.gammasgn(x))
    log_rg = np.where(pole, 0.0, -gl)
    log_terms = np.outer(np.log(zz), m) - special.gammaln(m+1) + log_rg
    terms = sign*np.exp(log_terms)
    mags = np.abs(sign)*np.exp(log_terms.real)
    values[nonzero] = terms.sum(axis=1)
    # envelope of the last kept term, rescaled from zmax to each |z|
    tail = np.exp(log_env[num_terms-1] + m[-1]*(np.log(np.abs(zz)) - np.log(zmax)))
    errs[nonzero] = 4*EPS*mags.sum(axis=1)*np.sqrt(num_terms) + 2*tail
    return values, errs


def _wright_contour_integrand(gamma, delta, x):
    """Steepest-descent integrand of Phi(-gamma, delta; -x) on phi in (0, pi), x > 0."""
    q = 1/(1-gamma)
    log_x = np.log(x)

    def f(phi):
        log_g = np.log(np.sin(gamma*phi)) - np.log(np.sin(phi))
        log_rho = q*(log_x + log_g)
        rho = np.exp(log_rho)
        exponent = -rho*np.sin((1-gamma)*phi)/np.sin(gamma*phi) + (1-delta)*log_rho
        bracket = np.cos((1-delta)*phi) \
            + q*(gamma/np.tan(gamma*phi) - 1/np.tan(phi))*np.sin((1-delta)*phi)
        return np.exp(exponent)*bracket/np.pi
    return f


def wright_phi(rho, delta, z, tol=1e-12):
    """Wright function Phi(rho, delta; z) = sum_m z^m / (m! Gamma(delta + rho m))."""
    rho, delta = float(rho), float(delta)
    _check_wright_params(rho, delta)
    z = complex(z)
    _check_finite('wright_phi: z', z)
    if z.imag == 0 and z.real < -1:
        f = _wright_contour_integrand(-rho, delta, -z.real)
        value, err = integrate.quad(f, 0.0, np.pi, epsabs=tol/10, epsrel=1e-13, limit=400)
        return ComplexSample(value, err + 4*EPS*abs(value), 'quadrature')
    value, err = _wright_series(rho, delta, z)
    return ComplexSample(value[0], err[0], 'series')


_CONTOUR_NODES, _CONTOUR_WEIGHTS = _panel_rule([0.0, 0.2, 1.0, np.pi], 32)


def wright_phi_array(rho, delta, x):
    """Phi(rho, delta; -x) for an array x >= 0 (real result)."""
    rho, delta = float(rho), float(delta)
    _check_wright_params(rho, delta)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DomainError('wright_phi_array: x must be finite and >= 0')
    flat = x.ravel()
    out = np.empty(flat.shape)
    small = flat <= 1.0
    if np.any(small):
        out[small] = _wright_series(rho, delta, -flat[small])[0].real
    big = np.nonzero(~small)[0]
    phi = _CONTOUR_NODES[None, :]
    for start in range(0, len(big), 8192):
        idx = big[start:start+8192]
        f = _wright_contour_integrand(-rho, delta, flat[idx, None])
        out[idx] = f(phi) @ _CONTOUR_WEIGHTS
    return out.reshape(x.shape)


def wright_density(alpha, z, tol=1e-12):
    """M-Wright density Phi_{1/alpha}(z) = Phi(-1/alpha, 1-1/alpha; -z) on z >= 0."""
    alpha = float(alpha)
    if not (1 < alpha < 2):
        raise DomainError('wright_density: alpha must lie in (1, 2), got '+repr(alpha))
    z = float(z)
    if not (z >= 0 and np.isfinite(z)):
        raise DomainError('wright_density: z must be finite and >= 0, got '+repr(z))
    sample = wright_phi(-1/alpha, 1-1/alpha, -z, tol=tol)
    return ComplexSample(sample.value.real, sample.abs_err, sample.regime)


# ------------------------------------------------------------------
# Macdonald function
def macdonald_k(nu, z):
    """K_nu(z) for real nu >= 0 and Re z > 0."""
    nu = float(nu)
    if not (nu >= 0 and np.isfinite(nu)):
        raise DomainError('macdonald_k: nu must be finite and >= 0, got '+repr(nu))
    z = complex(z)
    _check_finite('macdonald_k: z', z)
    if not z.real > 0:
        raise DomainError('macdonald_k: Re z must be > 0, got '+repr(z))
    value = complex(special.kv(nu, z))
    if not np.isfinite(value):
        raise ConvergenceError('macdonald_k: K_%g(%r) not representable' % (nu, z))
    return ComplexSample(value, 8*EPS*abs(value), 'series' if abs(z) <= 2 else 'asymptotic')
