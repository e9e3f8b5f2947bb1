import sys
if sys.version_info.major != 3 or sys.version_info.minor < 7:
    raise EnvironmentError('sgdlab only supports Python 3.7 and newer.')

__version__ = '0.1.0'

from sgdlab import utils
from sgdlab import landscapes
from sgdlab import sde
from sgdlab import invariant
from sgdlab import flatness
from sgdlab import fokker_planck
from sgdlab import hardy
from sgdlab import experiments
from .utils import (
    NoiseKind,
    MinimizerSetKind,
    IntegrabilityClass,
    DensityModel,
    Geometry,
    Scheme,
    FpeVariant,
    FlatnessModel,
    SphereScheme,
    IntegrandForm,
    ExperimentId,
    ReportFormat,
    SgdLabError,
)
