from enum import IntEnum


class NoiseKind(IntEnum):
    none = 0
    homogeneous = 1
    ml_isotropic = 2


class MinimizerSetKind(IntEnum):
    point_set = 1
    circle_in_plane = 2
    affine_subspace = 3


class IntegrabilityClass(IntEnum):
    not_locally_integrable = 1
    locally_not_globally = 2
    integrable = 3


class DivergenceMode(IntEnum):
    none = 0
    at_minimizers = 1
    at_infinity = 2
    both = 3


class DensityModel(IntEnum):
    power = 1
    boltzmann = 2


class Geometry(IntEnum):
    line = 1
    radial = 2
    product = 3


class InitialDistribution(IntEnum):
    point = 1
    box = 2
    gaussian = 3


class Scheme(IntEnum):
    explicit = 1
    implicit = 2


class FpeVariant(IntEnum):
    ml = 1
    homogeneous = 2


class FlatnessModel(IntEnum):
    hom = 1
    ml = 2


class SphereScheme(IntEnum):
    monte_carlo = 1
    tensor_grid = 2


class IntegrandForm(IntEnum):
    spectral_norm = 1
    quadratic_form = 2


class ExperimentId(IntEnum):
    boltzmann_stationarity = 1
    ml_power_stationarity = 2
    ml_global_min_selection = 3
    flat_selection_quadrature = 4
    flat_selection_sgd = 5
    fpe_convergence = 6
    hardy_suite = 7
    integrability_lattice = 8
    underparam_flat_limit = 9


class ReportFormat(IntEnum):
    json = 1
    csv_bundle = 2
