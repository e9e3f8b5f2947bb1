from .base import (
    Landscape,
    LandscapeError,
    RankMismatchError,
    LandscapeFactor,
    MinimizerSet,
    PointSet,
    CircleInPlane,
    AffineSubspace,
    HessianSpectrum,
)
from .catalog import (
    TrigSeries,
    RadialPower,
    QuadraticWindow,
    ProductNoncompact,
    CircleLandscape,
    ShiftedLandscape,
    LogCorrected,
    ConstantLandscape,
    construct_landscape,
    catalog_names,
)
from .hessian import reduced_hessian_spectrum, reduced_hessian_spectra
from .diagnostics import (
    DerivativeReport,
    check_derivatives,
    growth_ratios,
    WindowBounds,
    quadratic_window_bounds,
)
