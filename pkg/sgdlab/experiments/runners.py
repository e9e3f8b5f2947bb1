"""
Experiment pipelines.

Every experiment is a function of a validated :class:`ExperimentConfig`
returning (metrics, flags, tables); :func:`run` times its stages, wraps
module errors with the stage name, assembles the :class:`Report` and writes
it.
"""
import contextlib
import logging
import math

import numpy as np
from pyomo.common.timing import HierarchicalTimer

from sgdlab.experiments.config import (
    ExperimentConfigError,
    build_landscape,
    noise_model,
    validate_config,
    _check_sgd_threshold,
)
from sgdlab.experiments.report import Report, emit_report, provenance
from sgdlab.flatness import SphereQuadrature, flat_density_profile
from sgdlab.fokker_planck import (
    assemble,
    bump,
    decay_series,
    domain_tail_mass,
    evolve,
    fit_decay_rate,
    invariant_density,
    radial_grid,
    stationarity_residual,
)
from sgdlab.hardy import (
    HardyError,
    decay_rate_bound,
    hardy_family,
    liouville_exponent,
    liouville_residual,
    poincare_family,
    predicted_decay_rate,
    reference_constant,
    spectral_gap,
)
from sgdlab.invariant import (
    InvariantModel,
    NormalizationError,
    alpha_from_eta_sigma,
    classify_integrability,
    density_eval,
    lattice_verdict,
    normalize,
    richardson_marginal,
    tube_marginal,
)
from sgdlab.landscapes import LogCorrected, quadratic_window_bounds
from sgdlab.sde import (
    NoiseModel,
    SdeConfig,
    minimizer_fraction,
    occupancy_histogram,
    ks_distance,
    simulate_ensemble,
)
from sgdlab.utils.errors import SgdLabError
from sgdlab.utils.rng import stream
from sgdlab.utils.sgdlab_enums import (
    ExperimentId,
    FlatnessModel,
    Geometry,
    InitialDistribution,
    MinimizerSetKind,
    NoiseKind,
    Scheme,
)

logger = logging.getLogger(__name__)


class ExperimentError(SgdLabError):
    def __init__(self, msg, stage):
        super().__init__(msg)
        self.stage = stage


class _Context:
    def __init__(self, config, timer):
        self.config = config
        self.params = config.parameters.value()
        self.timer = timer
        self.stages = []
        self.landscape = build_landscape(config)

    @contextlib.contextmanager
    def stage(self, name):
        ident = 'run.' + name
        if (name, ident) not in self.stages:
            self.stages.append((name, ident))
        logger.info('{0}: {1}'.format(self.config.experiment.name, name))
        self.timer.start(name)
        try:
            yield
        except (ExperimentConfigError, ExperimentError):
            raise
        except SgdLabError as err:
            msg = 'stage {0!r} of {1} failed: {2}'.format(name, self.config.experiment.name, err)
            logger.error(msg)
            raise ExperimentError(msg, name) from err
        finally:
            self.timer.stop(name)

    def sde_config(self, n_paths, n_steps, step, checkpoint_every, initial, block_size):
        config = SdeConfig()
        config.step = step
        config.n_steps = n_steps
        config.n_paths = n_paths
        config.seed = self.config.seed
        config.checkpoint_every = checkpoint_every
        config.block_size = block_size
        config.n_threads = self.config.threads
        for key, val in initial.items():
            setattr(config.initial, key, val)
        return config


def _histogram_rows(hist):
    return ['coordinate', 'value'], hist.rows()


def _density_rows(grid):
    return ['coordinate', 'value'], list(zip(grid.centers.tolist(), grid.values.tolist()))


def _strictly_decreasing(values):
    return all(b < a for a, b in zip(values, values[1:]))


def _stationary_samples(ctx, noise, model):
    """Pooled post-burn-in states of paths started at 0, and the KS distance to ``model``."""
    p = ctx.params
    landscape = ctx.landscape
    n_steps = p['burn_in'] + p['sample_every'] * (p['samples_per_path'] - 1)
    config = ctx.sde_config(p['n_paths'], n_steps, p['step'], p['sample_every'],
                            {'kind': InitialDistribution.point, 'point': [0.0]}, p['block_size'])
    with ctx.stage('simulate'):
        ensemble = simulate_ensemble(landscape, noise, config, timer=ctx.timer)
        samples = ensemble.samples_after(p['burn_in'] * p['step'])[:, 0]
    with ctx.stage('density'):
        hw = p['grid_halfwidth']
        edges = np.linspace(-hw, hw, p['grid_cells'] + 1)
        grid = density_eval(landscape, model, Geometry.line, edges)
        result = normalize(grid)
        if not result.integrable:
            raise NormalizationError('the invariant density of {0} is not normalizable'.format(landscape.name))
        on_grid = grid.mass() / result.integral
        density = grid.normalize_cells()
    with ctx.stage('compare'):
        ks = ks_distance(samples, density)
        counts, hist_edges = np.histogram(samples, bins=min(p['grid_cells'], 400), range=(-hw, hw), density=True)
    metrics = {'ks_distance': ks, 'samples': int(samples.size), 'diverged': ensemble.diverged_count,
               'normalizer': result.integral, 'grid_tail_mass': 1.0 - on_grid,
               'max_noise_intensity': ensemble.max_noise_intensity}
    flags = {'ks_below_threshold': ks < p['ks_threshold']}
    centers = 0.5 * (hist_edges[:-1] + hist_edges[1:])
    tables = {'invariant': _density_rows(density),
              'empirical': (['coordinate', 'value'], list(zip(centers.tolist(), counts.tolist())))}
    return metrics, flags, tables


def _boltzmann_stationarity(ctx):
    noise, _ = noise_model(ctx.config)
    return _stationary_samples(ctx, noise, InvariantModel.boltzmann(noise.effective_eta))


def _ml_power_stationarity(ctx):
    noise, eta_sigma = noise_model(ctx.config)
    metrics, flags, tables = _stationary_samples(ctx, noise, InvariantModel.power(alpha_from_eta_sigma(eta_sigma)))
    metrics['alpha'] = alpha_from_eta_sigma(eta_sigma)
    return metrics, flags, tables


def _ml_global_min_selection(ctx):
    p = ctx.params
    landscape = ctx.landscape
    noise, eta_sigma = noise_model(ctx.config)
    hom = NoiseModel.for_generator(NoiseKind.homogeneous, eta_sigma)
    mean = [1.0] + [0.0] * (landscape.dim - 1)
    initial = {'kind': InitialDistribution.gaussian, 'mean': mean, 'scale': p['initial_scale']}
    config = ctx.sde_config(p['n_paths'], p['n_steps'], p['step'], max(p['n_steps'] // 10, 1), initial,
                            p['block_size'])
    with ctx.stage('simulate'):
        ml_run = simulate_ensemble(landscape, noise, config, timer=ctx.timer)
        hom_run = simulate_ensemble(landscape, hom, config, timer=ctx.timer)
    with ctx.stage('compare'):
        ml_fraction = minimizer_fraction(ml_run, landscape, p['tol'])
        hom_fraction = minimizer_fraction(hom_run, landscape, p['tol'])
        final = ml_run.final_states
        intensity = float(np.mean(noise.intensity(landscape.value(final)))) if len(final) else math.nan
        tables = {}
        if landscape.minimizer_set.kind != MinimizerSetKind.affine_subspace:
            tables['occupancy'] = _histogram_rows(occupancy_histogram(ml_run, landscape))
    logger.info('{0:>12} {1:>12} {2:>12}'.format('noise', 'near N', 'diverged'))
    logger.info('{0:>12} {1:>12.4f} {2:>12d}'.format('ml', ml_fraction, ml_run.diverged_count))
    logger.info('{0:>12} {1:>12.4f} {2:>12d}'.format('homogeneous', hom_fraction, hom_run.diverged_count))
    metrics = {'ml_fraction': ml_fraction, 'hom_fraction': hom_fraction, 'ml_final_intensity': intensity,
               'ml_max_noise_intensity': ml_run.max_noise_intensity, 'ml_diverged': ml_run.diverged_count,
               'hom_diverged': hom_run.diverged_count, 'eta_sigma': eta_sigma}
    flags = {'ml_concentrates': ml_fraction >= p['min_fraction'], 'ml_beats_homogeneous': ml_fraction > hom_fraction}
    return metrics, flags, tables


def _marginal_kwargs(p):
    return {'n_phi': p['n_phi'], 'n_r': p['n_r'], 'n_psi': p['n_psi']}


def _flat_selection_quadrature(ctx):
    p = ctx.params
    landscape = ctx.landscape
    bins = p['bins']
    tables = {}
    with ctx.stage('profiles'):
        g2_profile = flat_density_profile(landscape, FlatnessModel.ml, bins)
        g1_profile = flat_density_profile(landscape, FlatnessModel.hom, bins)
    tables['profile_g2'] = _histogram_rows(g2_profile)
    tables['profile_g1'] = _histogram_rows(g1_profile)
    separation = g2_profile.tv_distance(g1_profile)
    metrics = {'profile_separation': separation}
    power_tv = []
    power_tv_g1 = []
    with ctx.stage('power_marginals'):
        for i, alpha in enumerate(p['alphas']):
            marg = richardson_marginal(landscape, InvariantModel.power(alpha), p['tube_radius'], bins,
                                       **_marginal_kwargs(p))
            power_tv.append(marg.tv_distance(g2_profile))
            power_tv_g1.append(marg.tv_distance(g1_profile))
            metrics['tv_g2_alpha_{0}'.format(i)] = power_tv[-1]
            metrics['tv_g1_alpha_{0}'.format(i)] = power_tv_g1[-1]
            metrics['alpha_{0}'.format(i)] = alpha
            tables['marginal_power_{0}'.format(i)] = _histogram_rows(marg)
    boltzmann_tv = []
    with ctx.stage('boltzmann_marginals'):
        for i, eta in enumerate(p['etas']):
            marg = richardson_marginal(landscape, InvariantModel.boltzmann(eta), p['tube_radius'], bins,
                                       **_marginal_kwargs(p))
            boltzmann_tv.append(marg.tv_distance(g1_profile))
            metrics['tv_g1_eta_{0}'.format(i)] = boltzmann_tv[-1]
            metrics['eta_{0}'.format(i)] = eta
            tables['marginal_boltzmann_{0}'.format(i)] = _histogram_rows(marg)
    logger.info('{0:>10} {1:>12} {2:>12} {3:>12}'.format('model', 'parameter', 'TV g2', 'TV g1'))
    for alpha, tv, tv1 in zip(p['alphas'], power_tv, power_tv_g1):
        logger.info('{0:>10} {1:>12.4g} {2:>12.4e} {3:>12.4e}'.format('power', alpha, tv, tv1))
    for eta, tv in zip(p['etas'], boltzmann_tv):
        logger.info('{0:>10} {1:>12.4g} {2:>12} {3:>12.4e}'.format('boltzmann', eta, '-', tv))
    if separation <= p['tv_threshold']:
        logger.warning('g1 and g2 profiles are {0:.4g} apart in TV, inside tv_threshold = {1}; '
                       'only power_g2_beats_g1 separates the two models'.format(separation, p['tv_threshold']))
    flags = {'power_tv_decreasing': _strictly_decreasing(power_tv),
             'power_g2_beats_g1': power_tv[-1] < power_tv_g1[-1],
             'boltzmann_tv_decreasing': _strictly_decreasing(boltzmann_tv),
             'boltzmann_tv_below_threshold': boltzmann_tv[-1] < p['tv_threshold']}
    return metrics, flags, tables


def _flat_selection_sgd(ctx):
    p = ctx.params
    landscape = ctx.landscape
    exps = _check_sgd_threshold(ctx.config, landscape)
    noise, eta_sigma = noise_model(ctx.config)
    above = eta_sigma > exps.threshold_eta_sigma
    mean = [1.0] + [0.0] * (landscape.dim - 1)
    initial = {'kind': InitialDistribution.gaussian, 'mean': mean, 'scale': p['initial_scale']}
    config = ctx.sde_config(p['n_paths'], p['n_steps'], p['step'], p['checkpoint_every'], initial, p['block_size'])
    with ctx.stage('simulate'):
        ensemble = simulate_ensemble(landscape, noise, config, timer=ctx.timer)
    metrics = {'eta_sigma': eta_sigma, 'threshold_eta_sigma': exps.threshold_eta_sigma, 'alpha': exps.alpha,
               'alpha_critical': exps.alpha_critical, 'diverged': ensemble.diverged_count,
               'max_noise_intensity': ensemble.max_noise_intensity}
    flags = {}
    tables = {}
    with ctx.stage('occupancy'):
        occupancy = occupancy_histogram(ensemble, landscape, bins=p['bins'])
    if landscape.minimizer_set.kind == MinimizerSetKind.point_set:
        tables['well_occupancy'] = _histogram_rows(occupancy)
        metrics['wells'] = occupancy.bins
        metrics['max_well_fraction'] = float(occupancy.weights.max())
        metrics['exploratory'] = 1
        return metrics, flags, tables
    tables['occupancy'] = _histogram_rows(occupancy)
    with ctx.stage('profiles'):
        quad = SphereQuadrature()
        quad.nodes = p['quadrature_nodes']
        g2_profile = flat_density_profile(landscape, FlatnessModel.ml, p['bins'], quad)
        g1_profile = flat_density_profile(landscape, FlatnessModel.hom, p['bins'])
    tables['profile_g2'] = _histogram_rows(g2_profile)
    tables['profile_g1'] = _histogram_rows(g1_profile)
    metrics['tv_g2'] = occupancy.tv_distance(g2_profile)
    metrics['tv_g1'] = occupancy.tv_distance(g1_profile)
    metrics['profile_separation'] = g2_profile.tv_distance(g1_profile)
    if metrics['profile_separation'] <= p['tv_threshold']:
        logger.warning('g1 and g2 profiles are {0:.4g} apart in TV, inside tv_threshold = {1}; '
                       'only g2_beats_g1 separates the two models'.format(metrics['profile_separation'],
                                                                          p['tv_threshold']))
    if above:
        flags['tv_g2_below_threshold'] = metrics['tv_g2'] < p['tv_threshold']
        flags['g2_beats_g1'] = metrics['tv_g1'] > metrics['tv_g2']
    else:
        # below the threshold the limit depends on the initial condition
        logger.warning('eta_sigma = {0} is below the threshold {1:.6g}; occupancy is exploratory'.format(
            eta_sigma, exps.threshold_eta_sigma))
        metrics['exploratory'] = 1
    return metrics, flags, tables


def _fpe_convergence(ctx):
    p = ctx.params
    landscape = ctx.landscape
    _, eta_sigma = noise_model(ctx.config)
    m = landscape.dim
    metrics = {'eta_sigma': eta_sigma}
    with ctx.stage('window'):
        rng = stream(ctx.config.seed, 0)
        samples = rng.uniform(-p['window_radius'], p['window_radius'], size=(p['window_samples'], m))
        bounds = quadratic_window_bounds(landscape, samples, eta_sigma)
        if not bounds.admissible:
            msg = '{0} is outside the convergence window: lambda={1:.4g}, Lambda={2:.4g}, limit {3}'.format(
                landscape.name, bounds.lower, bounds.upper, bounds.eta_sigma_limit)
            logger.error(msg)
            raise ExperimentConfigError(msg)
        metrics.update({'lambda': bounds.lower, 'Lambda': bounds.upper})
        try:
            pexp = 1.0 / eta_sigma
            constant = reference_constant(-pexp, m)
            metrics['rate_lower_bound'] = decay_rate_bound(eta_sigma, m, bounds.lower, bounds.upper)
            metrics['proof_constant'] = bounds.upper ** pexp * bounds.lower ** (-1 - pexp) / constant
        except HardyError:
            logger.warning('no reference constant at alpha = {0}; no rate lower bound is reported'.format(
                -1.0 / eta_sigma))
    with ctx.stage('assemble'):
        grid = radial_grid(p['r_max'], p['cells'], m)
        op = assemble(landscape, eta_sigma, grid)
        rho_inf = invariant_density(op)
        metrics['domain_tail_mass'] = domain_tail_mass(landscape, op.invariant_model, grid)
        residuals = []
        for level in range(p['residual_levels']):
            fine = assemble(landscape, eta_sigma, radial_grid(p['r_max'], p['cells'] * 2 ** level, m))
            residuals.append(stationarity_residual(fine, invariant_density(fine)))
        ratios = [a / b for a, b in zip(residuals, residuals[1:])]
        for i, ratio in enumerate(ratios):
            metrics['residual_ratio_{0}'.format(i)] = ratio
    with ctx.stage('evolve'):
        rho0 = bump(grid, p['bump_location'], p['bump_width'])
        checkpoints = evolve(op, rho0, p['dt'], p['steps'], Scheme.implicit, p['checkpoint_every'], ctx.timer)
    with ctx.stage('decay'):
        times, dists, variances = decay_series(checkpoints, landscape, eta_sigma)
        fit = fit_decay_rate(times, dists, window=tuple(p['fit_window']))
        metrics['mass_drift'] = max(abs(ck.mass() - 1) for ck in checkpoints)
    with ctx.stage('spectral'):
        gap = spectral_gap(landscape, eta_sigma, grid)
        predicted = predicted_decay_rate(gap, eta_sigma)
    rel = abs(fit.fitted_nu - predicted) / predicted
    metrics.update({'fitted_nu': fit.fitted_nu, 'fit_r2': fit.fit_r2, 'spectral_gap': gap,
                    'predicted_nu': predicted, 'relative_rate_error': rel,
                    'final_distance': float(dists[-1]), 'final_u_variance': float(variances[-1])})
    logger.info('{0:>12} {1:>12} {2:>12} {3:>12}'.format('fitted nu', 'predicted', 'r2', 'bound'))
    logger.info('{0:>12.6g} {1:>12.6g} {2:>12.6f} {3:>12.6g}'.format(
        fit.fitted_nu, predicted, fit.fit_r2, metrics.get('rate_lower_bound', math.nan)))
    flags = {'log_linear': fit.fit_r2 > p['r2_threshold'], 'rate_matches_gap': rel <= p['rate_tolerance'],
             'second_order': all(3.5 <= r <= 4.5 for r in ratios),
             'mass_conserved': metrics['mass_drift'] <= 1e-12 * p['steps']}
    if 'rate_lower_bound' in metrics:
        flags['above_rate_lower_bound'] = fit.fitted_nu >= metrics['rate_lower_bound']
    tables = {'decay': (['time', 'distance'], list(zip(np.asarray(times).tolist(), np.asarray(dists).tolist()))),
              'invariant': _density_rows(rho_inf)}
    return metrics, flags, tables


def _hardy_suite(ctx):
    p = ctx.params
    landscape = ctx.landscape
    seed = ctx.config.seed
    metrics = {}
    flags = {}
    with ctx.stage('hardy'):
        rows = []
        worst = 0.0
        for i, (beta, m) in enumerate(p['hardy_cases']):
            rep = hardy_family(beta, int(m), draws=p['draws'], seed=seed + i, max_bumps=p['max_bumps'])
            rows.append([i, beta, int(m), rep.min_ratio, rep.max_ratio])
            metrics['hardy_max_ratio_{0}'.format(i)] = rep.max_ratio
            worst = max(worst, rep.max_ratio)
        flags['hardy_ratios_bounded'] = worst <= 1 + p['ratio_tolerance']
    with ctx.stage('spectral'):
        grid = radial_grid(p['gap_r_max'], p['gap_cells'], landscape.dim)
        gap_rows = []
        ok = True
        for i, alpha in enumerate(p['alphas']):
            constant = reference_constant(alpha, landscape.dim)
            gap = spectral_gap(landscape, -1.0 / alpha, grid)
            gap_rows.append([alpha, gap, constant])
            metrics['gap_alpha_{0}'.format(i)] = gap
            metrics['constant_alpha_{0}'.format(i)] = constant
            ok = ok and gap >= (1 - p['gap_slack']) * constant
        flags['gaps_above_constants'] = ok
    with ctx.stage('liouville'):
        small = 0.0
        large = math.inf
        for k, m, gt in p['liouville_cases']:
            small = max(small, liouville_residual(k, m, gt, p['liouville_samples']))
            beta = liouville_exponent(k, m, gt) + p['perturbation']
            large = min(large, liouville_residual(k, m, gt, p['liouville_samples'], beta=beta))
        metrics['liouville_max_residual'] = small
        metrics['liouville_min_perturbed_residual'] = large
        flags['liouville_solves'] = small < 1e-6
        flags['liouville_perturbed_fails'] = large >= 1e-2
    if p['log_corrected']:
        with ctx.stage('log_corrected'):
            dim = int(p['log_corrected_dim'])
            f = LogCorrected([[0.0] * dim])
            lc_grid = radial_grid(p['log_corrected_r_max'], p['log_corrected_cells'], dim, graded=True)
            rep = poincare_family(f, p['log_corrected_eta_sigma'], lc_grid, p['log_corrected_zones'],
                                  draws=p['draws'], seed=seed)
            metrics['log_corrected_min_quotient'] = rep.min_ratio
            metrics['log_corrected_tail_fraction'] = rep.constants['tail_fraction']
            flags['log_corrected_unit_constant'] = rep.min_ratio >= 1.0
    tables = {'hardy_ratios': (['case', 'beta', 'm', 'min_ratio', 'max_ratio'], rows),
              'spectral_gaps': (['alpha', 'gap', 'constant'], gap_rows)}
    return metrics, flags, tables


def lattice_cases(families):
    """Six exponents per (m, n, gamma): one below, three inside and two above the integrable interval."""
    cases = []
    for m, n, gamma in families:
        a_c = -0.5 * (m - n)
        a_t = -m / gamma
        w = a_t - a_c
        for alpha in (a_c - 0.5, a_c + 0.25 * w, a_c + 0.5 * w, a_c + 0.75 * w, a_t + 0.25, a_t + 0.75):
            cases.append((int(m), int(n), float(gamma), float(alpha)))
    return cases


def _integrability_lattice(ctx):
    p = ctx.params
    cases = [tuple(c) for c in p['cases']] if p['cases'] else lattice_cases(p['families'])
    rows = []
    agree = 0
    with ctx.stage('lattice'):
        logger.info('{0:>4} {1:>4} {2:>6} {3:>8} {4:>26} {5:>26}'.format('m', 'n', 'gamma', 'alpha',
                                                                        'classifier', 'quadrature'))
        for m, n, gamma, alpha in cases:
            claimed = classify_integrability(alpha, int(m), int(n), gamma)
            measured = lattice_verdict(alpha, int(m), int(n), gamma)
            agree += claimed == measured
            rows.append([int(m), int(n), gamma, alpha, claimed.name, measured.name])
            logger.info('{0:>4d} {1:>4d} {2:>6g} {3:>8.4g} {4:>26} {5:>26}'.format(
                int(m), int(n), gamma, alpha, claimed.name, measured.name))
    metrics = {'cases': len(cases), 'agreements': agree}
    flags = {'all_agree': agree == len(cases)}
    tables = {'lattice': (['m', 'n', 'gamma', 'alpha', 'classifier', 'quadrature'], rows)}
    return metrics, flags, tables


def _underparam_flat_limit(ctx):
    p = ctx.params
    landscape = ctx.landscape
    sigma = ctx.config.noise.sigma
    tables = {}
    metrics = {}
    with ctx.stage('profiles'):
        g1_profile = flat_density_profile(landscape, FlatnessModel.hom, p['bins'])
    tables['profile_g1'] = _histogram_rows(g1_profile)
    tvs = []
    with ctx.stage('marginals'):
        for i, eta in enumerate(p['etas']):
            alpha = alpha_from_eta_sigma(eta * sigma)
            marg = tube_marginal(landscape, InvariantModel.power(alpha), p['tube_radius'], p['bins'],
                                 **_marginal_kwargs(p))
            tvs.append(marg.tv_distance(g1_profile))
            metrics['tv_g1_eta_{0}'.format(i)] = tvs[-1]
            metrics['alpha_{0}'.format(i)] = alpha
            tables['marginal_eta_{0}'.format(i)] = _histogram_rows(marg)
            logger.info('eta={0:<10.4g} alpha={1:<12.6g} TV={2:.4e}'.format(eta, alpha, tvs[-1]))
    flags = {'tv_decreasing': _strictly_decreasing(tvs)}
    return metrics, flags, tables


_RUNNERS = {
    ExperimentId.boltzmann_stationarity: _boltzmann_stationarity,
    ExperimentId.ml_power_stationarity: _ml_power_stationarity,
    ExperimentId.ml_global_min_selection: _ml_global_min_selection,
    ExperimentId.flat_selection_quadrature: _flat_selection_quadrature,
    ExperimentId.flat_selection_sgd: _flat_selection_sgd,
    ExperimentId.fpe_convergence: _fpe_convergence,
    ExperimentId.hardy_suite: _hardy_suite,
    ExperimentId.integrability_lattice: _integrability_lattice,
    ExperimentId.underparam_flat_limit: _underparam_flat_limit,
}


def run(config, timer=None):
    """
    Run one experiment and write its report.

    Parameters
    ----------
    config: ExperimentConfig
    timer: HierarchicalTimer

    Returns
    -------
    Report
        with ``artifacts`` listing the written files
    """
    if timer is None:
        timer = HierarchicalTimer()
    validate_config(config)
    experiment = ExperimentId(config.experiment)
    ctx = _Context(config, timer)
    timer.start('run')
    try:
        metrics, flags, tables = _RUNNERS[experiment](ctx)
    finally:
        timer.stop('run')
    logger.debug('timings of {0}:\n{1}'.format(experiment.name, timer))
    report = Report(experiment=experiment, metrics=metrics, flags=flags, tables=tables,
                    provenance=provenance(config, timer, [('run', 'run')] + ctx.stages))
    emit_report(report, config.output_dir, config.report_format)
    logger.info('{0:>36} {1:>8}'.format('check', 'passed'))
    for name in sorted(report.flags):
        logger.info('{0:>36} {1:>8}'.format(name, str(bool(report.flags[name]))))
    return report
