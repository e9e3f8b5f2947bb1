from .noise import NoiseModel, em_step, SimulationError, EnsembleDivergedError
from .integrate import (
    SdeConfig,
    InitialConfig,
    Checkpoint,
    TrajectoryEnsemble,
    simulate_ensemble,
    checkpoint_steps,
)
from .statistics import (
    occupancy_histogram,
    minimizer_fraction,
    ks_distance,
    dump_checkpoints,
    load_ensemble,
)
