from .config import (
    ExperimentConfig,
    ExperimentConfigError,
    LandscapeConfig,
    NoiseConfig,
    DEFAULTS,
    load_config,
    write_config,
    validate_config,
    build_landscape,
    noise_model,
)
from .report import Report, ReportError, emit_report, provenance
from .runners import ExperimentError, run, lattice_cases
