from .density import (
    DensityError,
    NormalizationError,
    InvariantModel,
    DensityGrid,
    NormalizationResult,
    Refinement,
    default_refinement,
    grid_edges,
    sphere_area,
    density_eval,
    normalize,
    normalize_product,
    expanding_integral,
    lattice_verdict,
    write_density,
    read_density,
)
from .exponents import (
    NoiseExponents,
    noise_exponents,
    classify_integrability,
    alpha_from_eta_sigma,
    eta_sigma_from_alpha,
)
from .tube import tube_marginal, richardson_marginal
