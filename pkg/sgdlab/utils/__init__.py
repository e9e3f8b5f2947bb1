from .sgdlab_enums import (
    NoiseKind,
    MinimizerSetKind,
    IntegrabilityClass,
    DivergenceMode,
    DensityModel,
    Geometry,
    InitialDistribution,
    Scheme,
    FpeVariant,
    FlatnessModel,
    SphereScheme,
    IntegrandForm,
    ExperimentId,
    ReportFormat,
)
from .errors import SgdLabError
from .histogram import ManifoldHistogram, circle_edges, index_edges, bin_index
from .rng import stream, path_streams
from .io_utils import write_csv, read_csv, write_json, read_json
