"""Experiments in R^3: limiting amplitude, pointwise stabilization, subordination.

Spatial convolutions of radial kernels with radial bumps use the shell reduction

    int G(|x - xi|) F(|xi - c|) dxi = (2 pi / d) int_0^inf G(r) r S(d, r) dr,
    S(d, r) = int_{|d-r|}^{d+r} rho F(rho) drho,   d = |x - c|.
"""
from dataclasses import dataclass

import numpy as np
import scipy.fft

from fracode_utils import phi_omega_array
from kernels_utils import gamma_kernel_array
from spectral_utils import LatticeField, evolve_field
from specfun_utils import (ComplexSample, DomainError, DomainTooSmallError, macdonald_k,
                           mittag_leffler_on_ray, principal_power, wright_decay_rate, wright_phi_array)


SOURCE_KINDS = ('gaussian_bump', 'ball_indicator', 'multi_bump')
GAUSSIAN_CUTOFF = 8.0  # exp(-64) < 1e-14


def _gauss_legendre(order):
    return np.polynomial.legendre.leggauss(order)


def _panels(edges, order):
    x, w = _gauss_legendre(order)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    return (0.5*(b-a)*x + 0.5*(b+a)).ravel(), (0.5*(b-a)*w).ravel()


def _uniform_edges(a, b, width):
    num = max(1, int(np.ceil((b - a)/width)))
    return np.linspace(a, b, num+1)


def _graded_edges(a, b, a_min, ratio=0.25):
    """Geometric edges from a + a_min up to b, refined toward a."""
    edges = [b]
    while edges[-1] - a > a_min:
        edges.append(a + (edges[-1] - a)*ratio)
    return np.array(edges[::-1])


# ------------------------------------------------------------------
# sources
@dataclass
class CompactSource:
    kind: str
    centers: np.ndarray
    scale: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise DomainError('source kind must be one of '+str(SOURCE_KINDS)+', got '+repr(self.kind))
        self.centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        if self.centers.shape[1] != 3:
            raise DomainError('source centers must be points of R^3, got shape '+str(self.centers.shape))
        if self.kind != 'multi_bump' and len(self.centers) != 1:
            raise DomainError(self.kind+' takes exactly one center, got '+str(len(self.centers)))
        if not (self.scale > 0 and np.isfinite(self.scale)):
            raise DomainError('source scale must be > 0, got '+repr(self.scale))
        if not np.isfinite(self.amplitude):
            raise DomainError('source amplitude must be finite, got '+repr(self.amplitude))

    def profile(self, rho):
        """Radial profile around one center."""
        rho = np.asarray(rho, dtype=float)
        if self.kind == 'ball_indicator':
            return np.where(rho <= self.scale, self.amplitude, 0.0)
        return self.amplitude*np.exp(-(rho/self.scale)**2)

    def evaluate(self, points):
        points = np.asarray(points, dtype=float)
        total = np.zeros(points.shape[:-1])
        for c in self.centers:
            total += self.profile(np.linalg.norm(points - c, axis=-1))
        return total

    @property
    def support_radius(self):
        return self.scale if self.kind == 'ball_indicator' else GAUSSIAN_CUTOFF*self.scale

    def mass(self):
        if self.kind == 'ball_indicator':
            return self.amplitude*4*np.pi*self.scale**3/3
        return len(self.centers)*self.amplitude*np.pi**1.5*self.scale**3

    def shell_integral(self, rho1, rho2):
        """int_{rho1}^{rho2} rho F(rho) drho for the radial profile."""
        rho1, rho2 = np.asarray(rho1, dtype=float), np.asarray(rho2, dtype=float)
        if self.kind == 'ball_indicator':
            a, b = np.minimum(rho1, self.scale), np.minimum(rho2, self.scale)
            return self.amplitude*(b*b - a*a)/2
        s2 = self.scale**2
        return self.amplitude*s2/2*(np.exp(-rho1**2/s2) - np.exp(-rho2**2/s2))


def _radial_reduction(source, x, kernel_times_r, order=8):
    """sum over centers of (2 pi / d) int kernel(r) r S(d, r) dr; kernel_times_r maps r-array -> values."""
    x = np.asarray(x, dtype=float)
    R = source.support_radius
    total = 0j
    for c in source.centers:
        d = float(np.linalg.norm(x - c))
        lo, hi = max(0.0, d - R), d + R
        breaks = {lo, hi}
        if source.kind == 'ball_indicator' and lo < R - d < hi:
            breaks.add(R - d)
        if lo < d < hi and d > 1e-12:
            breaks.add(d)
        breaks = sorted(breaks)
        edges = []
        for a, b in zip(breaks[:-1], breaks[1:]):
            part = _uniform_edges(a, b, source.scale/2)
            if a == 0.0:
                part = np.concatenate([_graded_edges(0.0, part[1], 1e-9*source.scale), part[2:]])
            edges.append(part if not edges else part[1:])
        r, w = _panels(np.concatenate(edges), order)
        if d <= 1e-12:
            total += np.sum(w*kernel_times_r(r)*source.profile(r)*4*np.pi*r)
        else:
            total += 2*np.pi/d*np.sum(w*kernel_times_r(r)*source.shell_integral(np.abs(d - r), d + r))
    return total


# ------------------------------------------------------------------
# Helmholtz limit
def green_function(params, z_norm, n=3):
    """G(z) = (2 pi)^{-n/2} |z|^{1-n/2} (i w)^{-a/2 + a n/4} K_{n/2-1}((i w)^{a/2} |z|)."""
    r = float(z_norm)
    if not r > 0:
        raise DomainError('green_function: |z| must be > 0, got '+repr(z_norm))
    if int(n) != n or n < 3:
        raise DomainError('green_function: n must be an integer >= 3, got '+repr(n))
    a, iw = params.alpha, 1j*params.omega
    k = macdonald_k(n/2 - 1, params.helmholtz_root*r).value
    return (2*np.pi)**(-n/2) * r**(1-n/2) * principal_power(iw, -a/2 + a*n/4) * k


def _green_times_r(params):
    kappa = params.helmholtz_root
    return lambda r: np.exp(-kappa*r)/(4*np.pi)


def green_convolution(F, params, x, order=12):
    """v(x) = int G(x - xi) F(xi) dxi, the limit profile."""
    return complex(_radial_reduction(F, x, _green_times_r(params), order))


def helmholtz_residual(F, params, radii):
    """||Delta v - i^a w^a v + F|| / ||F|| at interior points of a uniform radial grid around F's center."""
    if len(F.centers) != 1:
        raise DomainError('helmholtz_residual needs a single-center source')
    radii = np.asarray(radii, dtype=float)
    h = np.diff(radii)
    if len(radii) < 3 or np.any(radii <= 0) or np.max(np.abs(h - h[0])) > 1e-12*radii[-1]:
        raise DomainError('helmholtz_residual needs at least three uniform radii > 0')
    h = h[0]
    center = F.centers[0]
    v = np.array([green_convolution(F, params, center + np.array([rho, 0.0, 0.0])) for rho in radii])
    inner = radii[1:-1]
    lap = (v[2:] - 2*v[1:-1] + v[:-2])/h**2 + (v[2:] - v[:-2])/(h*inner)
    residual = lap - params.forcing_eig*v[1:-1] + F.profile(inner)
    return float(np.linalg.norm(residual)/np.linalg.norm(F.profile(inner)))


# ------------------------------------------------------------------
# forced part u_3
def _time_rule(params, t, s_min, order):
    """Nodes s in (0, t) for int_0^t Gamma(r, s) phi(t - s) ds.

    Graded panels toward s = 0 (tau = t), uniform quarter-period panels elsewhere,
    with a break at s = t/2.
    """
    width = min(np.pi/(2*params.omega), t/2)
    near = _graded_edges(0.0, width, s_min) if width > s_min else np.array([0.0, width])
    upper = np.concatenate([_uniform_edges(width, t/2, width) if t/2 > width else [width],
                            _uniform_edges(t/2, t, width)[1:]])
    edges = np.concatenate([near, upper[1:]])
    return _panels(edges, order)


def _history_kernel(params, r, t, order):
    r = np.atleast_1d(np.asarray(r, dtype=float))
    s_min = 0.01*np.min(r)**(2/params.alpha)
    s, w = _time_rule(params, t, s_min, order)
    forcing = w*phi_omega_array(params, t - s)
    return gamma_kernel_array(params.alpha, r[:, None], s[None, :]) @ forcing


def history_kernel(params, r, t, order=8):
    """k(t, r) = int_0^t Gamma_{a,3}(r, t - tau) phi_omega(tau) dtau."""
    r, t = float(r), float(t)
    if not r > 0:
        raise DomainError('history_kernel: r must be > 0, got '+repr(r))
    if not t > 0:
        raise DomainError('history_kernel: t must be > 0, got '+repr(t))
    return complex(_history_kernel(params, r, t, order)[0])


def forced_solution_r3(F, params, x, t, order=8):
    """u_3(t, x) = int k(t, x - xi) F(xi) dxi; abs_err from two Gauss orders."""
    t = float(t)
    if not t > 0:
        raise DomainError('forced_solution_r3: t must be > 0, got '+repr(t))
    values = []
    for p in (order, order+4):
        kr = lambda r, p=p: _history_kernel(params, r, t, p)*r
        values.append(_radial_reduction(F, x, kr, p))
    return ComplexSample(values[1], abs(values[1] - values[0]), 'quadrature')


# ------------------------------------------------------------------
# homogeneous parts on a periodic lattice
@dataclass(frozen=True)
class LatticeSpec:
    shape: tuple = (64, 64, 64)
    spacing: float = 0.5

    @property
    def period(self):
        return min(self.shape)*self.spacing

    def sample(self, fn):
        return LatticeField.from_function(fn, self.shape, self.spacing)


def evaluate_at(field, points):
    """Trigonometric interpolation of a lattice field at arbitrary points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    freqs = [2*np.pi*scipy.fft.fftfreq(n, d=field.spacing) for n in field.shape]
    origin = np.array([-(n//2)*field.spacing for n in field.shape])
    out = np.empty(len(points), dtype=complex)
    for i, p in enumerate(points):
        phase = 1.0
        for axis, k in enumerate(freqs):
            shape = [1]*field.dim
            shape[axis] = -1
            phase = phase*np.exp(1j*k*(p[axis] - origin[axis])).reshape(shape)
        out[i] = np.sum(field.modes*phase)/field.values.size
    return out


@dataclass
class AmplitudeRow:
    t: float
    probe: int
    ratio: complex
    target: complex
    u1: complex
    u2: complex
    u3: complex


def limiting_amplitude_r3(F, u0, u1, params, x, t_schedule, lattice=None, order=8, progress=None,
                          tol=1e-8, safety=1.0, check_domain=True):
    """Rows (t, probe, ratio, target, u1, u2, u3) with ratio = (u1+u2+u3)/phi_omega(t).

    u0 and u1 are evolved on the periodic lattice, which must satisfy required_period up to
    the last time unless check_domain is False.
    """
    lattice = LatticeSpec() if lattice is None else lattice
    if check_domain and (u0 is not None or u1 is not None) and len(t_schedule):
        t_max = max(float(t) for t in t_schedule)
        needed = required_period(params.alpha, t_max, tol, safety)
        if lattice.period < needed:
            raise DomainTooSmallError('torus period %g is below the %g needed up to t=%g'
                                      % (lattice.period, needed, t_max))
    probes = np.atleast_2d(np.asarray(x, dtype=float))
    targets = [green_convolution(F, params, p) for p in probes] if F is not None else [0j]*len(probes)
    u0_field = lattice.sample(u0.evaluate) if u0 is not None else None
    u1_field = lattice.sample(u1.evaluate) if u1 is not None else None
    rows = []
    for t in t_schedule:
        t = float(t)
        phi = mittag_leffler_on_ray(params, t).value
        if u0_field is not None:
            hom1 = evaluate_at(evolve_field(u0_field, None, None, params, t, drop_zero_mode=True), probes)
        else:
            hom1 = np.zeros(len(probes), dtype=complex)
        if u1_field is not None:
            hom2 = evaluate_at(evolve_field(None, u1_field, None, params, t, drop_zero_mode=True), probes)
        else:
            hom2 = np.zeros(len(probes), dtype=complex)
        for i, p in enumerate(probes):
            u3 = forced_solution_r3(F, params, p, t, order).value if F is not None else 0j
            rows.append(AmplitudeRow(t, i, (hom1[i] + hom2[i] + u3)/phi, targets[i], hom1[i], hom2[i], u3))
        if progress is not None:
            progress(t)
    return rows


@dataclass
class AmplitudeReport:
    t: np.ndarray
    relative_residual: np.ndarray  # (num_t, num_probes)
    monotone_tail: bool
    u1_exponent: float = None
    u2_exponent: float = None


def _tail_slope(t, values, tail):
    values = np.abs(np.asarray(values))
    t = np.asarray(t)[-tail:]
    values = values[-tail:]
    if np.any(values <= 0):
        return None
    return float(np.polyfit(np.log(t), np.log(values), 1)[0])


def amplitude_report(rows, tail=4, fit_tail=3):
    t = np.array(sorted({row.t for row in rows}))
    num_probes = 1 + max(row.probe for row in rows)
    residual = np.zeros((len(t), num_probes))
    u1 = np.zeros((len(t), num_probes), dtype=complex)
    u2 = np.zeros((len(t), num_probes), dtype=complex)
    index = {value: i for i, value in enumerate(t)}
    for row in rows:
        i = index[row.t]
        scale = abs(row.target) if row.target != 0 else 1.0
        residual[i, row.probe] = abs(row.ratio - row.target)/scale
        u1[i, row.probe] = row.u1
        u2[i, row.probe] = row.u2
    monotone = bool(np.all(np.diff(residual[-tail:], axis=0) < 0))
    # average exponent over probes
    fit = lambda u: (np.mean([_tail_slope(t, u[:, j], fit_tail) for j in range(num_probes)])
                     if np.all(np.abs(u[-fit_tail:]) > 0) else None)
    return AmplitudeReport(t, residual, monotone, fit(u1), fit(u2))


# ------------------------------------------------------------------
# pointwise stabilization
@dataclass
class InitialData:
    """u0 = constant + source + sin(wavevector . x) [+ sign(sin(log(1 + |x|^2)))]."""
    constant: float = 0.0
    source: CompactSource = None
    wavevector: tuple = None
    log_periodic: bool = False

    def evaluate(self, points):
        points = np.asarray(points, dtype=float)
        values = np.full(points.shape[:-1], float(self.constant))
        if self.source is not None:
            values += self.source.evaluate(points)
        if self.wavevector is not None:
            values += np.sin(points @ np.asarray(self.wavevector, dtype=float))
        if self.log_periodic:
            values += np.sign(np.sin(np.log1p(np.sum(points**2, axis=-1))))
        return values

    @property
    def exactly_periodic(self):
        return self.source is None and not self.log_periodic

    def radial_center(self):
        """Center of radial symmetry, or None when the data is not radial."""
        if self.wavevector is not None:
            return None
        centers = []
        if self.source is not None:
            if len(self.source.centers) != 1:
                return None
            centers.append(self.source.centers[0])
        if self.log_periodic:
            centers.append(np.zeros(3))
        if not centers:
            return np.zeros(3)
        if any(np.linalg.norm(c - centers[0]) > 0 for c in centers[1:]):
            return None
        return centers[0]

    def varying_profile(self, rho):
        """Radial profile without the constant."""
        rho = np.asarray(rho, dtype=float)
        values = np.zeros(rho.shape)
        if self.source is not None:
            values += self.source.profile(rho)
        if self.log_periodic:
            values += np.sign(np.sin(np.log1p(rho**2)))
        return values

    def breakpoints(self, rho_max):
        points = []
        if self.source is not None and self.source.kind == 'ball_indicator':
            points.append(self.source.scale)
        if self.log_periodic:
            k = 1
            while True:
                rho = np.sqrt(np.expm1(k*np.pi))
                if rho >= rho_max:
                    break
                points.append(rho)
                k += 1
        return sorted(p for p in points if p < rho_max)


def required_period(alpha, t_max, tol=1e-8, safety=1.0):
    """Torus period that keeps the Z1 tail below tol at t_max."""
    sigma0 = wright_decay_rate(alpha/2)
    return 2*t_max**(alpha/2)*(np.log(1/tol)/sigma0)**((2-alpha)/2)*safety


def _radial_probe(u0, params, t, order=10):
    # u(t, c) = const + int_0^inf w Phi(-a/2, 1-a; -w) g(w t^{a/2}) dw
    gamma = params.gamma
    w_max = (120.0/wright_decay_rate(gamma))**(1-gamma)
    scale = t**gamma
    breaks = [b/scale for b in u0.breakpoints(w_max*scale)]
    resolve = u0.source.scale/scale if u0.source is not None else w_max
    head = min(resolve, 0.25, w_max)
    edges = list(_graded_edges(0.0, head, 1e-12*head))
    edges += list(_uniform_edges(head, w_max, min(0.25, max(head, 0.02)))[1:])
    edges = np.unique(np.concatenate([edges, breaks]))
    w_nodes, weights = _panels(edges, order)
    density = w_nodes*wright_phi_array(-gamma, 1-params.alpha, w_nodes)
    return u0.constant + np.sum(weights*density*u0.varying_profile(w_nodes*scale))


def stabilization_run(u0, params, x_probe, t_schedule, lattice=None, method='lattice',
                      tol=1e-8, safety=1.0, check_domain=True):
    """[(t, probe values)] of the homogeneous solution with initial value u0 and zero slope."""
    probes = np.atleast_2d(np.asarray(x_probe, dtype=float))
    t_schedule = [float(t) for t in t_schedule]
    if method == 'radial':
        center = u0.radial_center()
        if center is None or np.any(np.linalg.norm(probes - center, axis=1) > 1e-12):
            raise DomainError("stabilization_run: method='radial' needs radial data probed at its center")
        return [(t, np.array([_radial_probe(u0, params, t)]*len(probes), dtype=complex)) for t in t_schedule]
    if method != 'lattice':
        raise DomainError("stabilization_run: method must be 'lattice' or 'radial', got "+repr(method))

    lattice = LatticeSpec() if lattice is None else lattice
    if check_domain and not u0.exactly_periodic:
        needed = required_period(params.alpha, max(t_schedule), tol, safety)
        if lattice.period < needed:
            raise DomainTooSmallError('torus period %g is below the %g needed up to t=%g'
                                      % (lattice.period, needed, max(t_schedule)))
    field0 = lattice.sample(u0.evaluate)
    return [(t, evaluate_at(evolve_field(field0, None, None, params, t), probes)) for t in t_schedule]


@dataclass
class StabilizationReport:
    decay_exponent: float
    tail_oscillation: float
    converged: bool


def stabilization_report(values, t_schedule, c=None, tail=4, noise_floor=1e-6):
    """Decay exponent of |u - c|, oscillation amplitude over the tail, convergence flag.

    With c=None only the oscillation amplitude decides convergence.
    """
    values = np.asarray(values, dtype=complex)
    t = np.asarray(t_schedule, dtype=float)
    tail_values = values[-tail:]
    oscillation = float(np.max(tail_values.real) - np.min(tail_values.real))
    if c is None:
        return StabilizationReport(None, oscillation, oscillation <= noise_floor)
    deviation = np.abs(values - c)
    exponent = _tail_slope(t, deviation, tail)
    converged = bool(np.all(np.diff(deviation[-tail:]) < 0) or np.max(deviation[-tail:]) <= noise_floor)
    return StabilizationReport(exponent, oscillation, converged)


@dataclass
class BallAverageReport:
    x0: np.ndarray
    radii: np.ndarray
    averages: np.ndarray
    errors: np.ndarray
    limit_estimate: float
    converged: bool


def ball_average(u0, x0, radii, n_samples=20000, seed=2022, dim=3, tol=1e-3, tail=4):
    """Monte Carlo averages of u0 over balls B(x0, R) sharing one set of random points."""
    radii = np.asarray(radii, dtype=float)
    if len(radii) < 2 or np.any(np.diff(radii) <= 0) or np.any(radii <= 0):
        raise DomainError('ball_average: radii must be > 0 and strictly ascending')
    rng = np.random.default_rng(seed)
    directions = rng.normal(size=(n_samples, dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    unit = directions*rng.uniform(size=(n_samples, 1))**(1/dim)
    x0 = np.asarray(x0, dtype=float)
    averages, errors = [], []
    for R in radii:
        values = u0.evaluate(x0 + R*unit)
        averages.append(np.mean(values))
        errors.append(np.std(values)/np.sqrt(n_samples))
    averages, errors = np.array(averages), np.array(errors)
    tail = min(tail, len(radii))
    limit = float(np.mean(averages[-tail:]))
    spread = np.abs(averages[-tail:] - limit)
    converged = bool(np.all(spread <= np.maximum(tol, 4*errors[-tail:])))
    return BallAverageReport(x0, radii, averages, errors, limit, converged)


# ------------------------------------------------------------------
# subordination
def subordination_transform(u_alpha, alpha, t, span=np.inf, order=16):
    """Heat value u(t) = int_0^inf t^{-1/a} Phi_{1/a}(s t^{-1/a}) u_alpha(s) ds.

    u_alpha is a callable on arrays of s. The integral is cut at span, which must
    reach 30 t^{1/a}.
    """
    alpha, t = float(alpha), float(t)
    if not (1 < alpha < 2):
        raise DomainError('subordination_transform: alpha must lie in (1, 2), got '+repr(alpha))
    if not t > 0:
        raise DomainError('subordination_transform: t must be > 0, got '+repr(t))
    scale = t**(1/alpha)
    if span < 30*scale:
        raise DomainError('subordination_transform: span %g must reach 30 t^{1/alpha} = %g' % (span, 30*scale))
    nu = 1/alpha
    w_max = min(30.0, (120.0/wright_decay_rate(nu))**(1-nu))
    values = []
    for p in (order, order+8):
        w, weights = _panels(_uniform_edges(0.0, w_max, 0.25), p)
        density = wright_phi_array(-nu, 1-nu, w)
        values.append(np.sum(weights*density*np.asarray(u_alpha(w*scale), dtype=complex)))
    return ComplexSample(values[1], abs(values[1] - values[0]) + 1e-14, 'quadrature')
