from .constants import HardyError, reference_constant, decay_rate_bound, predicted_decay_rate
from .trial_functions import TestFunction, smooth_step, random_bumps, random_zone
from .inequalities import (
    HardyRatio,
    hardy_1d_ratio,
    rayleigh_quotient,
    radial_nodes,
    measure_tail_fraction,
)
from .spectral import spectral_gap, weighted_operator
from .liouville import liouville_exponent, liouville_residual
from .suite import InequalityReport, hardy_family, poincare_family
