import copy
import hashlib
import json
import logging
import math
import os

from pyomo.common.config import (
    ConfigDict,
    ConfigValue,
    NonNegativeInt,
    PositiveInt,
    InEnum,
)

from sgdlab.hardy.constants import reference_constant
from sgdlab.invariant.exponents import classify_integrability, noise_exponents
from sgdlab.landscapes import LandscapeError, construct_landscape, catalog_names
from sgdlab.sde.noise import NoiseModel, SimulationError
from sgdlab.utils.errors import SgdLabError
from sgdlab.utils.sgdlab_enums import (
    ExperimentId,
    IntegrabilityClass,
    MinimizerSetKind,
    NoiseKind,
    ReportFormat,
)

logger = logging.getLogger(__name__)


class ExperimentConfigError(SgdLabError, ValueError):
    pass


def _optional_positive(val):
    if val is None:
        return None
    val = float(val)
    if not (math.isfinite(val) and val > 0):
        raise ValueError('expected a positive number or null; got {0}'.format(val))
    return val


def _landscape_name(val):
    if val not in catalog_names():
        raise ValueError('unknown landscape {0!r}; known: {1}'.format(val, ', '.join(catalog_names())))
    return str(val)


class LandscapeConfig(ConfigDict):
    def __init__(
        self,
        description=None,
        doc=None,
        implicit=False,
        implicit_domain=None,
        visibility=0,
    ):
        super(LandscapeConfig, self).__init__(
            description=description,
            doc=doc,
            implicit=implicit,
            implicit_domain=implicit_domain,
            visibility=visibility,
        )

        self.declare('entry', ConfigValue(domain=_landscape_name, doc='catalog entry'))
        self.declare('params', ConfigValue(domain=dict, doc='keyword parameters of the catalog entry'))

        self.entry = 'quadratic_window'
        self.params = {}


class NoiseConfig(ConfigDict):
    def __init__(
        self,
        description=None,
        doc=None,
        implicit=False,
        implicit_domain=None,
        visibility=0,
    ):
        super(NoiseConfig, self).__init__(
            description=description,
            doc=doc,
            implicit=implicit,
            implicit_domain=implicit_domain,
            visibility=visibility,
        )

        self.declare('kind', ConfigValue(domain=InEnum(NoiseKind), doc='none, homogeneous or ml_isotropic'))
        self.declare('eta', ConfigValue(domain=_optional_positive, doc='learning rate of the forward equation'))
        self.declare('sigma', ConfigValue(domain=_optional_positive, doc='ML noise scale'))
        self.declare('eta_sigma', ConfigValue(domain=_optional_positive,
                                              doc='product eta*sigma of the forward equation'))

        self.kind = NoiseKind.ml_isotropic
        self.eta = None
        self.sigma = None
        self.eta_sigma = None


class ExperimentConfig(ConfigDict):
    """
    One experiment run: which experiment, on which landscape, with which
    noise, and the experiment's own ``parameters``. Enum fields are written
    by name in JSON.
    """
    def __init__(
        self,
        description=None,
        doc=None,
        implicit=False,
        implicit_domain=None,
        visibility=0,
    ):
        super(ExperimentConfig, self).__init__(
            description=description,
            doc=doc,
            implicit=implicit,
            implicit_domain=implicit_domain,
            visibility=visibility,
        )

        self.declare('experiment', ConfigValue(domain=InEnum(ExperimentId), doc='experiment to run'))
        self.declare('seed', ConfigValue(domain=NonNegativeInt, doc='seed of every random stream of the run'))
        self.declare('output_dir', ConfigValue(domain=str, doc='directory receiving the report and CSVs'))
        self.declare('threads', ConfigValue(domain=PositiveInt, doc='cap on worker threads'))
        self.declare('report_format', ConfigValue(domain=InEnum(ReportFormat),
                                                  doc='json (report only) or csv_bundle (report and CSVs)'))
        self.declare('landscape', LandscapeConfig(doc='landscape name and parameters'))
        self.declare('noise', NoiseConfig(doc='noise model'))
        self.declare('parameters', ConfigDict(implicit=True, doc='experiment-specific parameters'))

        self.experiment = ExperimentId.boltzmann_stationarity
        self.seed = 0
        self.output_dir = 'results'
        self.threads = 1
        self.report_format = ReportFormat.csv_bundle

    def to_dict(self):
        data = self.value()
        data['experiment'] = ExperimentId(data['experiment']).name
        data['report_format'] = ReportFormat(data['report_format']).name
        data['noise']['kind'] = NoiseKind(data['noise']['kind']).name
        return copy.deepcopy(data)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + '\n'

    def config_hash(self):
        """Digest of the normalized configuration, output location excluded."""
        data = self.to_dict()
        data.pop('output_dir')
        data.pop('threads')
        encoded = json.dumps(data, sort_keys=True, ensure_ascii=True)
        return hashlib.sha256(encoded.encode('utf-8')).hexdigest()[:16]


_ML = {'kind': 'ml_isotropic', 'eta': None, 'sigma': None, 'eta_sigma': None}
_HOM = {'kind': 'homogeneous', 'eta': None, 'sigma': None, 'eta_sigma': None}

# landscape, noise and parameter defaults of each experiment
DEFAULTS = {
    ExperimentId.boltzmann_stationarity: {
        'landscape': {'entry': 'radial_power', 'params': {'lam': 0.5, 'k': 2.0, 'dim': 1}},
        'noise': dict(_HOM, eta=0.5),
        'parameters': {'step': 1e-3, 'burn_in': 10000, 'n_paths': 10000, 'samples_per_path': 10,
                       'sample_every': 1000, 'grid_halfwidth': 8.0, 'grid_cells': 4000,
                       'ks_threshold': 0.02, 'block_size': 4096},
    },
    ExperimentId.ml_power_stationarity: {
        'landscape': {'entry': 'shifted_underparam', 'params': {'eps': 0.1, 'base': 'quadratic', 'dim': 1}},
        'noise': dict(_ML, eta_sigma=0.8),
        'parameters': {'step': 1e-3, 'burn_in': 10000, 'n_paths': 10000, 'samples_per_path': 10,
                       'sample_every': 1000, 'grid_halfwidth': 40.0, 'grid_cells': 16000,
                       'ks_threshold': 0.03, 'block_size': 4096},
    },
    ExperimentId.ml_global_min_selection: {
        'landscape': {'entry': 'circle_codim2', 'params': {}},
        'noise': dict(_ML, eta_sigma=0.5),
        'parameters': {'step': 2e-3, 'n_steps': 10000, 'n_paths': 2000, 'initial_scale': 0.3,
                       'tol': 0.05, 'min_fraction': 0.9, 'block_size': 4096},
    },
    ExperimentId.flat_selection_quadrature: {
        'landscape': {'entry': 'circle_codim2', 'params': {}},
        'noise': dict(_ML),
        'parameters': {'alphas': [-0.8, -0.9, -0.95], 'etas': [1e-1, 1e-2, 1e-3], 'bins': 64,
                       'tube_radius': 0.4, 'tv_threshold': 0.02, 'n_r': 64, 'n_psi': 64, 'n_phi': 4},
    },
    ExperimentId.flat_selection_sgd: {
        'landscape': {'entry': 'circle_codimK', 'params': {'dim': 6}},
        'noise': dict(_ML, eta_sigma=0.7),
        'parameters': {'step': 1e-3, 'n_steps': 200000, 'n_paths': 10000, 'checkpoint_every': 10000,
                       'initial_scale': 1.0, 'bins': 64, 'tv_threshold': 0.1, 'quadrature_nodes': 32,
                       'block_size': 2048},
    },
    ExperimentId.fpe_convergence: {
        'landscape': {'entry': 'quadratic_window', 'params': {'dim': 4}},
        'noise': dict(_ML, eta_sigma=0.8),
        'parameters': {'r_max': 20.0, 'cells': 400, 'dt': 0.05, 'steps': 1000, 'checkpoint_every': 10,
                       'bump_location': 2.0, 'bump_width': 0.5, 'fit_window': [20.0, 50.0],
                       'window_samples': 4096, 'window_radius': 20.0, 'rate_tolerance': 0.15,
                       'r2_threshold': 0.99, 'residual_levels': 3},
    },
    ExperimentId.hardy_suite: {
        'landscape': {'entry': 'quadratic_window', 'params': {'dim': 4}},
        'noise': dict(_ML),
        'parameters': {'hardy_cases': [[-2.0, 3], [-3.0, 4], [-1.5, 5]], 'draws': 100, 'max_bumps': 5,
                       'ratio_tolerance': 1e-6, 'alphas': [-2.0, -3.5, -5.0], 'gap_r_max': 40.0,
                       'gap_cells': 1600, 'gap_slack': 0.02,
                       'liouville_cases': [[2, 5, 2.0], [2, 3, 1.5], [1, 6, 2.5]],
                       'liouville_samples': [0.5, 1.0, 2.0, 4.0], 'perturbation': 0.1,
                       'log_corrected': True, 'log_corrected_dim': 5, 'log_corrected_eta_sigma': 2.0 / 3.0,
                       'log_corrected_cells': 2120, 'log_corrected_r_max': 1e40,
                       'log_corrected_zones': [[1e-3, 0.3], [2.0, 50.0]]},
    },
    ExperimentId.integrability_lattice: {
        'landscape': {'entry': 'quadratic_window', 'params': {}},
        'noise': dict(_ML),
        'parameters': {'families': [[2, 0, 4.0], [3, 1, 4.0], [4, 0, 4.0], [6, 1, 4.0]], 'cases': None},
    },
    ExperimentId.underparam_flat_limit: {
        'landscape': {'entry': 'shifted_underparam', 'params': {'eps': 0.1, 'base': 'ring', 'dim': 3,
                                                               'eigenvalues': [1.0, {'const': 2.0, 'cos': [1.0]}]}},
        'noise': dict(_ML, sigma=1.0),
        'parameters': {'etas': [0.1, 0.03, 0.01], 'bins': 64, 'tube_radius': 0.5,
                       'n_r': 64, 'n_psi': 64, 'n_phi': 4},
    },
}


def _raise(msg):
    logger.error(msg)
    raise ExperimentConfigError(msg)


def load_config(source):
    """
    Build an ExperimentConfig from a JSON file path, a JSON document or a
    dict. The experiment's defaults fill every omitted field, and the result
    is validated before it is returned.
    """
    if isinstance(source, dict):
        data = copy.deepcopy(source)
    else:
        text = source
        if os.path.exists(source):
            with open(source) as f:
                text = f.read()
        try:
            data = json.loads(text)
        except ValueError as err:
            _raise('experiment config is not valid JSON: {0}'.format(err))
    if not isinstance(data, dict) or 'experiment' not in data:
        _raise('experiment config needs an "experiment" field; known: {0}'.format(
            ', '.join(e.name for e in ExperimentId)))
    config = ExperimentConfig()
    try:
        config.experiment = data['experiment']
    except ValueError:
        _raise('unknown experiment {0!r}; known: {1}'.format(data['experiment'],
                                                             ', '.join(e.name for e in ExperimentId)))
    defaults = DEFAULTS[config.experiment]
    unknown = set(data.get('parameters') or {}) - set(defaults['parameters'])
    if unknown:
        _raise('unknown parameters for {0}: {1}; allowed: {2}'.format(
            config.experiment.name, sorted(unknown), sorted(defaults['parameters'])))
    merged = copy.deepcopy(defaults)
    if 'landscape' in data and data['landscape'].get('entry', merged['landscape']['entry']) != merged['landscape']['entry']:
        merged['landscape']['params'] = {}
    for key in ('landscape', 'noise', 'parameters'):
        merged[key].update(data.get(key) or {})
    for key, val in data.items():
        if key not in merged:
            merged[key] = val
    try:
        config.set_value(merged)
    except ValueError as err:
        _raise('invalid experiment config: {0}'.format(err))
    validate_config(config)
    return config


def write_config(config, path):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as f:
        f.write(config.to_json())
    return path


def build_landscape(config):
    try:
        return construct_landscape(config.landscape.entry, config.landscape.params)
    except (LandscapeError, TypeError) as err:
        _raise('landscape {0!r} rejected its parameters: {1}'.format(config.landscape.entry, err))


def noise_model(config):
    """
    The NoiseModel whose forward equation has diffusion eta (homogeneous)
    or eta*sigma*f (ml_isotropic), and that eta*sigma (None otherwise).
    """
    noise = config.noise
    kind = NoiseKind(noise.kind)
    if kind == NoiseKind.none:
        return NoiseModel.none(), None
    if kind == NoiseKind.homogeneous:
        if noise.eta is None:
            _raise('homogeneous noise needs eta')
        return NoiseModel.for_generator(kind, noise.eta), None
    eta, sigma, eta_sigma = noise.eta, noise.sigma, noise.eta_sigma
    if eta_sigma is None:
        if eta is None or sigma is None:
            _raise('ml_isotropic noise needs eta_sigma, or eta and sigma')
        eta_sigma = eta * sigma
    elif eta is None and sigma is None:
        eta, sigma = eta_sigma, 1.0
    elif sigma is None:
        sigma = eta_sigma / eta
    elif eta is None:
        eta = eta_sigma / sigma
    elif abs(eta * sigma - eta_sigma) > 1e-12 * eta_sigma:
        _raise('eta * sigma = {0} contradicts eta_sigma = {1}'.format(eta * sigma, eta_sigma))
    try:
        return NoiseModel.for_generator(kind, eta, sigma), eta_sigma
    except SimulationError as err:
        _raise(str(err))


def _require_noise(config, kind):
    if NoiseKind(config.noise.kind) != kind:
        _raise('{0} needs {1} noise; got {2}'.format(config.experiment.name, kind.name,
                                                     NoiseKind(config.noise.kind).name))


def _require_landscape(config, landscape, names):
    if landscape.name not in names:
        _raise('{0} runs on {1}; got {2}'.format(config.experiment.name, ' or '.join(names), landscape.name))


def _check_sgd_threshold(config, landscape):
    minimizers = landscape.minimizer_set
    if minimizers is None or minimizers.kind not in (MinimizerSetKind.circle_in_plane, MinimizerSetKind.point_set):
        _raise('flat_selection_sgd needs a circle or a finite set of minimizers; {0} has none'.format(landscape.name))
    noise, eta_sigma = noise_model(config)
    m, n = landscape.dim, minimizers.intrinsic_dim
    exps = noise_exponents(eta_sigma, 1.0, m, n, landscape.growth_exponent)
    if not exps.threshold_reachable:
        _raise('noise_exponents(m={0}, n={1}) reports no reachable threshold: alpha < -1 <= alpha_critical = {2} '
               'for every noise level in codimension {3}; flat_selection_sgd needs codimension >= 3'.format(
                   m, n, exps.alpha_critical, m - n))
    if not exps.interval_nonempty:
        _raise('noise_exponents(m={0}, n={1}, gamma={2}) reports an empty admissible interval; '
               'need gamma > 2m/(m - n) = {3}'.format(m, n, landscape.growth_exponent, 2.0 * m / (m - n)))
    return exps


def validate_config(config):
    """Reject parameter combinations that the experiment's modules would refuse, before any compute."""
    exp = ExperimentId(config.experiment)
    params = config.parameters.value()
    if not config.output_dir:
        _raise('output_dir must be a nonempty path')
    landscape = build_landscape(config)
    try:
        if exp in (ExperimentId.boltzmann_stationarity, ExperimentId.ml_power_stationarity):
            _require_noise(config, NoiseKind.homogeneous if exp == ExperimentId.boltzmann_stationarity
                           else NoiseKind.ml_isotropic)
            if landscape.dim != 1:
                _raise('{0} compares one-dimensional samples; {1} has dim {2}'.format(
                    exp.name, landscape.name, landscape.dim))
            if exp == ExperimentId.ml_power_stationarity and not landscape.infimum > 0:
                _raise('ml_power_stationarity needs inf f > 0 for a normalizable power law; {0} has inf f = 0'.format(
                    landscape.name))
            noise_model(config)
        elif exp == ExperimentId.ml_global_min_selection:
            _require_noise(config, NoiseKind.ml_isotropic)
            if landscape.minimizer_set is None or not landscape.overparametrized:
                _raise('ml_global_min_selection needs a landscape with global minimizers at f = 0')
            noise_model(config)
        elif exp == ExperimentId.flat_selection_quadrature:
            _require_landscape(config, landscape, ('circle_codim2',))
            for alpha in params['alphas']:
                verdict = classify_integrability(alpha, landscape.dim, 1, landscape.growth_exponent)
                if verdict != IntegrabilityClass.integrable:
                    _raise('alpha = {0} is {1} on {2}; use alpha in ({3}, {4})'.format(
                        alpha, verdict.name, landscape.name, -0.5 * (landscape.dim - 1),
                        -landscape.dim / landscape.growth_exponent))
            if any(not eta > 0 for eta in params['etas']):
                _raise('etas must be positive; got {0}'.format(params['etas']))
        elif exp == ExperimentId.flat_selection_sgd:
            _require_noise(config, NoiseKind.ml_isotropic)
            _check_sgd_threshold(config, landscape)
        elif exp == ExperimentId.fpe_convergence:
            _require_noise(config, NoiseKind.ml_isotropic)
            if not landscape.is_radial:
                _raise('fpe_convergence needs a radial landscape; got {0}'.format(landscape.name))
            _, eta_sigma = noise_model(config)
            m = landscape.dim
            if m > 2 and not eta_sigma < 2.0 / (m - 2):
                _raise('eta_sigma = {0} violates the convergence window eta_sigma < 2/(m - 2) = {1}'.format(
                    eta_sigma, 2.0 / (m - 2)))
            lo, hi = params['fit_window']
            if not 0 <= lo < hi <= params['dt'] * params['steps']:
                _raise('fit_window {0} must lie inside [0, dt * steps = {1}]'.format(
                    params['fit_window'], params['dt'] * params['steps']))
        elif exp == ExperimentId.hardy_suite:
            if any(not beta < -1 for beta, _ in params['hardy_cases']):
                _raise('Hardy cases need beta < -1; got {0}'.format(params['hardy_cases']))
            for alpha in params['alphas']:
                reference_constant(alpha, landscape.dim)
        elif exp == ExperimentId.integrability_lattice:
            for m, n, gamma in params['families']:
                classify_integrability(-1.0, int(m), int(n), float(gamma))
                if not gamma > 2.0 * m / (m - n):
                    _raise('family (m={0}, n={1}, gamma={2}) has an empty integrable interval'.format(m, n, gamma))
        elif exp == ExperimentId.underparam_flat_limit:
            _require_landscape(config, landscape, ('shifted_underparam',))
            if landscape.base is None or landscape.dim != 3:
                _raise('underparam_flat_limit needs the ring base in dimension 3')
            if config.noise.sigma is None:
                _raise('underparam_flat_limit needs noise.sigma')
            etas = params['etas']
            if any(not e > 0 for e in etas) or any(b >= a for a, b in zip(etas, etas[1:])):
                _raise('etas must be positive and decreasing; got {0}'.format(etas))
    except SgdLabError as err:
        if isinstance(err, ExperimentConfigError):
            raise
        _raise('{0}: {1}'.format(exp.name, err))
    logger.debug('validated {0} config (hash {1})'.format(exp.name, config.config_hash()))
    return config
