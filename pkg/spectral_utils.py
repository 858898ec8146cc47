"""Spectral solutions: finite self-adjoint operators and periodic lattices.

Every mode of D^alpha u + A u = f0 phi_omega(t) (plus homogeneous data) is a
scalar fractional ODE, so the solutions below are assembled mode by mode from
the closed forms in fracode_utils.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import pandas as pd
import scipy.fft

from fracode_utils import closed_form_forced_array
from specfun_utils import DomainError, get_num_threads, mittag_leffler_array, mittag_leffler_on_ray


DEFAULT_SCHEDULE = tuple(2.0**j for j in range(12))


@dataclass
class FiniteSpectralOperator:
    eigenvalues: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float)
        self.weights = np.asarray(self.weights, dtype=complex)
        if self.eigenvalues.ndim != 1 or len(self.eigenvalues) < 1:
            raise DomainError('eigenvalues must be a non-empty vector')
        if self.eigenvalues.shape != self.weights.shape:
            raise DomainError('eigenvalues and weights must have equal length, got %d and %d'
                              % (len(self.eigenvalues), len(self.weights)))
        if np.any(self.eigenvalues < 0) or not np.all(np.isfinite(self.eigenvalues)):
            raise DomainError('eigenvalues must be finite and >= 0')

    def check_theorem_hypotheses(self):
        # the limiting amplitude needs a strictly positive operator
        if np.any(self.eigenvalues <= 0):
            raise DomainError('eigenvalues must be > 0 for the limiting amplitude principle')
        return True

    @property
    def f0_norm(self):
        return float(np.linalg.norm(self.weights))


def evolve_operator(op, params, t):
    """u_k(t) = closed_form_forced(lambda_k, t) * w_k."""
    return closed_form_forced_array(op.eigenvalues, params, t)*op.weights


def limiting_amplitude_target(op, params):
    """(A + i^a omega^a)^{-1} f0."""
    return op.weights/(op.eigenvalues + params.forcing_eig)


def limiting_amplitude_operator(op, params, t_schedule=None):
    """[(t, ||u(t)/phi_omega(t) - target||_2)] over the schedule."""
    op.check_theorem_hypotheses()
    t_schedule = DEFAULT_SCHEDULE if t_schedule is None else t_schedule
    target = limiting_amplitude_target(op, params)
    rows = []
    for t in t_schedule:
        ratio = evolve_operator(op, params, t)/mittag_leffler_on_ray(params, t).value
        rows.append((float(t), float(np.linalg.norm(ratio - target))))
    return rows


@dataclass
class ResidualTrend:
    t: np.ndarray
    normalized: np.ndarray
    monotone_tail: bool
    tail_slope: float


def residual_trend(rows, scale, tail=4):
    """Normalised residuals, whether the last `tail` decrease strictly, and the log-log slope over them."""
    t = np.array([row[0] for row in rows], dtype=float)
    residual = np.array([row[1] for row in rows], dtype=float)/scale
    last = residual[-tail:]
    monotone = bool(np.all(np.diff(last) < 0))
    slope = float(np.polyfit(np.log(t[-tail:]), np.log(last), 1)[0])
    return ResidualTrend(t, residual, monotone, slope)


# ------------------------------------------------------------------
# periodic lattices
@dataclass
class LatticeField:
    shape: tuple
    spacing: float
    values: np.ndarray
    t: float = 0.0
    _modes: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.shape = tuple(int(n) for n in self.shape)
        if len(self.shape) not in (1, 2, 3):
            raise DomainError('lattice dimension must be 1, 2 or 3, got '+str(len(self.shape)))
        if not self.spacing > 0:
            raise DomainError('lattice spacing must be > 0, got '+repr(self.spacing))
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.shape:
            raise DomainError('values shape %s does not match lattice shape %s' % (self.values.shape, self.shape))

    @property
    def dim(self):
        return len(self.shape)

    @property
    def period(self):
        return np.array(self.shape)*self.spacing

    @classmethod
    def coordinates(cls, shape, spacing):
        """Cell coordinates centred on the origin, indexed 'ij'."""
        axes = [(np.arange(n) - n//2)*spacing for n in shape]
        return np.meshgrid(*axes, indexing='ij')

    @classmethod
    def from_function(cls, fn, shape, spacing):
        points = np.stack(cls.coordinates(shape, spacing), axis=-1)
        return cls(shape, spacing, fn(points))

    @classmethod
    def from_modes(cls, modes, spacing, t=0.0):
        values = scipy.fft.ifftn(modes, workers=get_num_threads())
        lattice = cls(modes.shape, spacing, values, t)
        lattice._modes = np.asarray(modes, dtype=complex)
        return lattice

    @property
    def modes(self):
        if self._modes is None:
            self._modes = scipy.fft.fftn(self.values, workers=get_num_threads())
        return self._modes

    @cached_property
    def _lam(self):
        freqs = [2*np.pi*scipy.fft.fftfreq(n, d=self.spacing) for n in self.shape]
        grids = np.meshgrid(*freqs, indexing='ij')
        return sum(g**2 for g in grids)

    def lam(self):
        """|xi|^2, the continuum multiplier of -Laplace on each mode."""
        return self._lam

    def mean(self):
        return complex(np.mean(self.values))

    def to_frame(self):
        flat = self.values.ravel()
        return pd.DataFrame({'index': np.arange(flat.size), 're': flat.real, 'im': flat.imag})

    def metadata(self):
        return {'shape': list(self.shape), 'spacing': float(self.spacing), 't': float(self.t)}

    def compatible(self, other):
        return other.shape == self.shape and other.spacing == self.spacing


def z2_symbol(params, lam, t):
    """t E_{a,2}(-lam t^a): the initial-slope kernel in Fourier variables."""
    lam = np.asarray(lam, dtype=float)
    t = float(t)
    return t*mittag_leffler_array(params.alpha, 2.0, -lam*t**params.alpha)


def evolve_field(u0, u1, F, params, t, drop_zero_mode=False):
    """Exact Fourier solution on the torus at time t.

    u_hat = E_a(-|xi|^2 t^a) u0_hat + t E_{a,2}(-|xi|^2 t^a) u1_hat + closed_form_forced(|xi|^2, t) F_hat.
    Any of u1, F may be None.
    """
    fields = [f for f in (u0, u1, F) if f is not None]
    if not fields:
        raise DomainError('evolve_field needs at least one field')
    ref = fields[0]
    for other in fields[1:]:
        if not ref.compatible(other):
            raise DomainError('evolve_field: fields live on different lattices (%s vs %s)'
                              % (ref.metadata(), other.metadata()))
    t = float(t)
    if not t >= 0:
        raise DomainError('evolve_field: t must be >= 0, got '+repr(t))
    lam = ref.lam()
    modes = np.zeros(ref.shape, dtype=complex)
    if u0 is not None:
        modes += mittag_leffler_array(params.alpha, 1.0, -lam*t**params.alpha)*u0.modes
    if u1 is not None:
        modes += z2_symbol(params, lam, t)*u1.modes
    if F is not None:
        modes += closed_form_forced_array(lam, params, t)*F.modes
    if drop_zero_mode:
        modes[(0,)*ref.dim] = 0
    return LatticeField.from_modes(modes, ref.spacing, t)
