from .grids import (
    FokkerPlanckError,
    CflViolationError,
    FpeGrid,
    line_grid,
    radial_grid,
    domain_tail_mass,
)
from .operator import (
    FpeOperator,
    UForm,
    assemble,
    invariant_density,
    stationarity_residual,
    relative_density,
    u_form,
)
from .evolve import evolve, checkpoint_times
from .decay import (
    DecayReport,
    weighted_l2_distance,
    u_variance,
    fit_decay_rate,
    decay_series,
    bump,
)
