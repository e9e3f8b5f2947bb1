from .agm import FlatnessError, agm, agm_sequence, agm_log_limit
from .scores import (
    SphereQuadrature,
    FlatnessScore,
    g1,
    g2,
    sphere_average,
    flatness_score,
)
from .profiles import flat_density_profile, profile_scores
