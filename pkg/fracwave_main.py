import json
import os
import sys

import numpy as np
import pandas as pd
from tqdm import tqdm

from experiments_utils import (CompactSource, InitialData, LatticeSpec, amplitude_report, ball_average,
                               limiting_amplitude_r3, stabilization_report, stabilization_run,
                               subordination_transform)
from fracwave_utils import *
from kernels_utils import (check_bound, fit_bound, laplace_gamma_transform, tabulate_kernel, y_mass,
                           z1_kernel_array, z1_mass)
from spectral_utils import FiniteSpectralOperator, limiting_amplitude_operator, residual_trend
from specfun_utils import (ComplexSample, EPS, FracParams, FracwaveError, macdonald_k, mittag_leffler,
                           mittag_leffler_array, mittag_leffler_on_ray, principal_power, wright_density,
                           wright_phi)


# ------------------------------------------------------------------
# specfun
def _principal_power(base, exponent):
    value = principal_power(base, exponent)
    return ComplexSample(value, 4*EPS*abs(value), 'series')


SPECFUN = {
    'mittag_leffler': (('alpha', 'beta', 'z'), lambda a, b, z: mittag_leffler(a.real, b.real, z)),
    'mittag_leffler_on_ray': (('alpha', 'omega', 't'),
                              lambda a, w, t: mittag_leffler_on_ray(FracParams(a.real, w.real), t.real)),
    'wright_phi': (('rho', 'delta', 'z'), lambda rho, delta, z: wright_phi(rho.real, delta.real, z)),
    'wright_density': (('alpha', 'z'), lambda a, z: wright_density(a.real, z.real)),
    'macdonald_k': (('nu', 'z'), lambda nu, z: macdonald_k(nu.real, z)),
    'principal_power': (('base', 'exponent'), lambda base, e: _principal_power(base, e.real)),
}


def specfun_eval(name, values):
    if name not in SPECFUN:
        raise ConfigError('name', 'unknown function '+repr(name)+'; expected one of '+str(sorted(SPECFUN)))
    arg_names, fn = SPECFUN[name]
    if len(values) != len(arg_names):
        raise ConfigError('values', name+' takes '+', '.join(arg_names)+' ('+str(len(values))+' given)')
    args = [v if isinstance(v, (int, float, complex)) else parse_complex(n, v) for n, v in zip(arg_names, values)]
    return fn(*[complex(a) for a in args])


# ------------------------------------------------------------------
# experiments; each returns (tables, fitted, checks)
def _source(spec):
    return CompactSource(spec['kind'], spec['centers'], spec['scale'], spec.get('amplitude', 1.0))


def _complex_columns(df, name, values):
    values = np.asarray(values, dtype=complex)
    df[name+'_re'] = values.real
    df[name+'_im'] = values.imag


def run_limiting_amplitude_operator(config, params, logger, quiet):
    op = FiniteSpectralOperator(config.eigenvalues, config.complex_weights)
    t_schedule = config.t_schedule
    rows = []
    bar = tqdm(t_schedule, disable=quiet)
    for t in bar:
        bar.set_description('operator t='+str(t))
        rows += limiting_amplitude_operator(op, params, [t])
    trend = residual_trend(rows, op.f0_norm, tail=min(4, len(rows)))
    df = pd.DataFrame({'t': trend.t, 'residual': [row[1] for row in rows], 'normalized': trend.normalized})
    fitted = {'tail_slope': trend.tail_slope, 'monotone_tail': trend.monotone_tail,
              'f0_norm': op.f0_norm}
    checks = {'residual_below_tol': bool(trend.normalized[-1] < config.tolerance('residual')),
              'residual_decreased': bool(trend.normalized[-1] < trend.normalized[0]),
              'tail_slope_negative': bool(trend.tail_slope < 0)}
    return {'residuals.csv': df}, fitted, checks


def run_limiting_amplitude_r3(config, params, logger, quiet):
    sources = {name: _source(spec) for name, spec in config.sources.items()}
    lattice = LatticeSpec(tuple(config.lattice['shape']), config.lattice['spacing'])
    t_schedule = config.t_schedule
    bar = tqdm(total=len(t_schedule), disable=quiet)

    def progress(t):
        bar.set_description('r3 t='+str(t))
        bar.update(1)

    rows = limiting_amplitude_r3(sources['F'], sources.get('u0'), sources.get('u1'), params, config.probes,
                                 t_schedule, lattice, order=int(config.options.get('order', 8)), progress=progress,
                                 check_domain=bool(config.options.get('check_domain', True)))
    bar.close()
    df = pd.DataFrame({'t': [row.t for row in rows], 'probe': [row.probe for row in rows]})
    for name in ('ratio', 'target', 'u1', 'u2', 'u3'):
        _complex_columns(df, name, [getattr(row, name) for row in rows])

    tail = min(4, len(t_schedule))
    report = amplitude_report(rows, tail=tail, fit_tail=min(3, len(t_schedule)))
    last = report.relative_residual[-1]
    fitted = {'relative_residual_last': last.tolist(), 'monotone_tail': report.monotone_tail,
              'u1_exponent': report.u1_exponent, 'u2_exponent': report.u2_exponent}
    checks = {'amplitude_residual': bool(np.max(last) < config.tolerance('amplitude'))}
    if len(t_schedule) >= 4:
        checks['amplitude_monotone'] = report.monotone_tail
    rel = config.tolerance('exponent')
    if 'u0' in sources and report.u1_exponent is not None:
        checks['u1_exponent'] = bool(abs(report.u1_exponent + params.alpha) <= rel*params.alpha)
    if 'u1' in sources and report.u2_exponent is not None:
        checks['u2_exponent'] = bool(abs(report.u2_exponent + params.alpha - 1) <= rel*(params.alpha - 1))
    return {'amplitude.csv': df}, fitted, checks


def _initial_data(config):
    initial = config.initial
    source = _source(config.sources['u0']) if 'u0' in config.sources else None
    wavevector = tuple(initial['wavevector']) if initial.get('wavevector') is not None else None
    return InitialData(initial.get('constant', 0.0), source, wavevector, initial.get('log_periodic', False))


def run_stabilization(config, params, logger, quiet):
    u0 = _initial_data(config)
    probes = np.asarray(config.probes, dtype=float)
    method = config.options.get('method')
    if method is None:
        center = u0.radial_center()
        at_center = center is not None and np.all(np.linalg.norm(probes - center, axis=1) <= 1e-12)
        method = 'radial' if at_center else 'lattice'
    lattice = LatticeSpec(tuple(config.lattice['shape']), config.lattice['spacing'])
    t_schedule = config.t_schedule
    logger.write('stabilization method: '+method)

    runs = []
    bar = tqdm(t_schedule, disable=quiet)
    for t in bar:
        bar.set_description('stabilization t='+str(t))
        runs += stabilization_run(u0, params, probes, [t], lattice, method=method,
                                  check_domain=bool(config.options.get('check_domain', True)))
    values = np.array([v for _, v in runs])
    df = pd.DataFrame({'t': np.repeat(t_schedule, len(probes)), 'probe': np.tile(np.arange(len(probes)), len(t_schedule)),
                       're': values.real.ravel(), 'im': values.imag.ravel()})
    tables = {'values.csv': df}

    c = None if u0.log_periodic else u0.constant
    tail = min(4, len(t_schedule))
    reports = [stabilization_report(values[:, j], t_schedule, c, tail=tail) for j in range(len(probes))]
    fitted = {'decay_exponent': [r.decay_exponent for r in reports],
              'tail_oscillation': [r.tail_oscillation for r in reports]}
    checks = {}
    if c is not None:
        checks['stabilizes'] = all(r.converged for r in reports)
        if u0.source is not None and all(r.decay_exponent is not None for r in reports):
            rel = config.tolerance('exponent')
            checks['decay_exponent'] = all(abs(r.decay_exponent + params.alpha) <= rel*params.alpha for r in reports)
        if u0.exactly_periodic:
            exact = np.full(values.shape, c, dtype=complex)
            if u0.wavevector is not None:
                k = np.asarray(u0.wavevector, dtype=float)
                decay = mittag_leffler_array(params.alpha, 1.0, -np.dot(k, k)*np.asarray(t_schedule)**params.alpha)
                exact += decay[:, None]*np.sin(probes @ k)[None, :]
            checks['exact_mode'] = bool(np.max(np.abs(values - exact)) <= 1e-10*max(1.0, abs(c)))
    else:
        radii = np.geomspace(1.0, float(config.options.get('ball_radius_max', 1e4)), 12)
        ball = ball_average(u0, probes[0], radii, seed=config.seed, tol=config.tolerance('ball'), tail=tail)
        tables['ball.csv'] = pd.DataFrame({'radius': ball.radii, 'average': ball.averages, 'error': ball.errors})
        fitted['ball_limit_estimate'] = ball.limit_estimate
        checks['ball_averages_diverge'] = not ball.converged
        checks['probe_values_diverge'] = not any(r.converged for r in reports)
    return tables, fitted, checks


def run_subordination_check(config, params, logger, quiet):
    lam = float(config.options.get('lam', 1.0))
    times = [float(t) for t in config.options.get('t', [0.5, 1.0, 2.0])]
    alpha = params.alpha
    mode = lambda s: mittag_leffler_array(alpha, 1.0, -lam*np.asarray(s)**alpha)
    constant = lambda s: np.ones(np.shape(s))
    rows = []
    for t in tqdm(times, disable=quiet, desc='subordination'):
        heat = subordination_transform(mode, alpha, t)
        one = subordination_transform(constant, alpha, t)
        rows.append((t, heat.value.real, np.exp(-lam*t), heat.abs_err, one.value.real))
    df = pd.DataFrame(rows, columns=['t', 'subordinated', 'heat', 'abs_err', 'constant'])
    err = np.abs(df['subordinated'] - df['heat'])
    tol = config.tolerance('subordination')
    fitted = {'max_abs_err': float(err.max())}
    checks = {'heat_symbol': bool(err.max() <= tol),
              'constant_preserved': bool(np.max(np.abs(df['constant'] - 1)) <= tol)}
    return {'subordination.csv': df}, fitted, checks


def run_kernel_validation(config, params, logger, quiet):
    n = 3
    t_schedule = config.t_schedule
    frames, bounds, fitted, checks = [], [], {}, {}
    for kind in ('Y', 'Z1', 'dZ1'):
        calibration, validation = [], []
        for t in tqdm(t_schedule, disable=quiet, desc='kernel '+kind):
            # even radii calibrate, odd radii validate; scaled with the spreading t^{alpha/2}
            radii = t**params.gamma*np.geomspace(0.05, 6.0, 49)
            table = tabulate_kernel(kind, params, n, t, radii)
            frames.append(table.to_frame())
            for j, (r, v) in enumerate(zip(table.radii, table.values)):
                (calibration if j % 2 == 0 else validation).append((t, r, v.real))
        bound = fit_bound(kind, params.alpha, n, calibration)
        violations = check_bound(bound, validation)
        bounds.append({'kind': kind, 'C': bound.params.C, 'sigma': bound.params.sigma,
                       'calibration': len(calibration), 'validation': len(validation),
                       'violations': len(violations)})
        fitted[kind] = {'C': bound.params.C, 'sigma': bound.params.sigma}
        checks['bound_'+kind] = not violations

    # negative core, positive shell
    t_mid = t_schedule[len(t_schedule)//2]
    core = z1_kernel_array(params.alpha, t_mid**params.gamma*np.geomspace(1e-3, 10.0, 200), t_mid)
    checks['z1_sign_structure'] = bool(core[0] < 0 and np.max(core) > 0)

    rows = []
    for r in (0.5, 1.0, 2.0):
        for s in (0.5, 1.0, 2.0):
            closed = laplace_gamma_transform(params, n, r, s).value
            quad = laplace_gamma_transform(params, n, r, s, method='quadrature').value
            rows.append(('laplace', r, s, closed, quad, abs(quad - closed)/abs(closed)))
    for t in (t_schedule[0], t_schedule[-1]):
        closed = y_mass(params, t).value
        quad = y_mass(params, t, method='quadrature').value
        rows.append(('y_mass', np.nan, t, closed, quad, abs(quad - closed)/abs(closed)))
        mass = z1_mass(params, t).value
        rows.append(('z1_mass', np.nan, t, 1.0, mass, abs(mass - 1)))
    identities = pd.DataFrame({'identity': [row[0] for row in rows], 'r': [row[1] for row in rows],
                               's_or_t': [row[2] for row in rows],
                               'rel_err': [row[5] for row in rows]})
    _complex_columns(identities, 'closed', [row[3] for row in rows])
    _complex_columns(identities, 'quad', [row[4] for row in rows])
    laplace = identities[identities['identity'] == 'laplace']['rel_err']
    masses = identities[identities['identity'] != 'laplace']['rel_err']
    checks['laplace_identity'] = bool(laplace.max() <= config.tolerance('laplace'))
    checks['masses'] = bool(masses.max() <= config.tolerance('mass'))
    fitted['laplace_max_rel_err'] = float(laplace.max())
    return {'kernels.csv': pd.concat(frames, ignore_index=True), 'bounds.csv': pd.DataFrame(bounds),
            'identities.csv': identities}, fitted, checks


def run_specfun_eval(config, params, logger, quiet):
    args = config.options.get('args', [])
    sample = specfun_eval(config.options['function'], [str(a) for a in args])
    df = pd.DataFrame({'function': [config.options['function']], 'args': [json.dumps(args)],
                       're': [sample.value.real], 'im': [sample.value.imag],
                       'abs_err': [sample.abs_err], 'regime': [sample.regime]})
    return {'specfun.csv': df}, {'value': [sample.value.real, sample.value.imag]}, {}


RUNNERS = {
    'limiting_amplitude_operator': run_limiting_amplitude_operator,
    'limiting_amplitude_r3': run_limiting_amplitude_r3,
    'stabilization': run_stabilization,
    'subordination_check': run_subordination_check,
    'kernel_validation': run_kernel_validation,
    'specfun_eval': run_specfun_eval,
}


# ------------------------------------------------------------------
# commands
def run(args):
    config = ExperimentConfig.load(args.config)
    if args.output_dir is not None:
        config.output_dir = args.output_dir
    if args.seed is not None:
        config.seed = args.seed
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError('threads', 'must be >= 1, got '+str(args.threads))
        os.environ['FRACWAVE_THREADS'] = str(args.threads)
    config.validate()
    set_seed(config.seed)
    set_output_dir(config)
    args.output_dir = config.output_dir
    logger = Logger(config.output_dir, filename='log.txt')
    logger.write(json.dumps(config.to_dict(), sort_keys=True))

    params = FracParams(config.alpha, config.omega)
    logger.write('\nRunning '+config.experiment)
    tables, fitted, checks = RUNNERS[config.experiment](config, params, logger, args.quiet)

    artifacts = []
    for filename, df in tables.items():
        artifacts.append(write_csv(df, os.path.join(config.output_dir, filename)))
    manifest = write_manifest(config, artifacts, fitted, checks)
    logger.write('\nArtifacts: '+', '.join(os.path.basename(p) for p in artifacts+[manifest]))
    for name, ok in sorted(checks.items()):
        logger.write(('✅ ' if ok else '❌ ')+name, show_time=False)
    failed = [name for name, ok in sorted(checks.items()) if not ok]
    if failed:
        raise InvariantError(failed[0], 'invariants violated: '+', '.join(failed))
    return 0


def validate(args):
    ExperimentConfig.load(args.config)
    print ('ok')
    return 0


def specfun(args):
    sample = specfun_eval(args.name, args.values)
    print ('value:', repr(sample.value))
    print ('abs_err:', repr(sample.abs_err))
    print ('regime:', sample.regime)
    return 0


EXIT_CODES = ((ConfigError, 2), (InvariantError, 3), (FracwaveError, 4))


def main(argv=None):
    args = parse_args(argv)
    args.output_dir = getattr(args, 'output_dir', None)
    command = {'run': run, 'validate': validate, 'specfun': specfun}[args.command]
    try:
        return command(args)
    except FracwaveError as e:
        report = write_error(args.output_dir, e)
        print (json.dumps(report, sort_keys=True), file=sys.stderr)
        for error_type, code in EXIT_CODES:
            if isinstance(e, error_type):
                return code


if __name__ == '__main__':
    sys.exit(main())
