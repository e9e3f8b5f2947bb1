import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from pyomo.common.config import (
    ConfigDict,
    ConfigValue,
    PositiveFloat,
    PositiveInt,
    NonNegativeInt,
    InEnum,
    Bool,
)
from pyomo.common.timing import HierarchicalTimer

from sgdlab.sde.noise import em_step, SimulationError, EnsembleDivergedError
from sgdlab.utils.rng import stream
from sgdlab.utils.sgdlab_enums import InitialDistribution, NoiseKind

try:
    import sgdlab.utils.mpi_utils as mpiu
    mpi_available = True
except ImportError:
    mpi_available = False

try:
    from tqdm import tqdm
except ImportError:
    tqdm = None

logger = logging.getLogger(__name__)


def _float_vector(val):
    if val is None:
        return None
    if isinstance(val, (int, float)):
        return (float(val),)
    return tuple(float(v) for v in val)


class InitialConfig(ConfigDict):
    def __init__(
        self,
        description=None,
        doc=None,
        implicit=False,
        implicit_domain=None,
        visibility=0,
    ):
        super(InitialConfig, self).__init__(
            description=description,
            doc=doc,
            implicit=implicit,
            implicit_domain=implicit_domain,
            visibility=visibility,
        )

        self.declare('kind', ConfigValue(domain=InEnum(InitialDistribution),
                                         doc='point, box (uniform) or gaussian'))
        self.declare('point', ConfigValue(domain=_float_vector, doc='starting point for kind=point'))
        self.declare('low', ConfigValue(domain=float, doc='lower box corner (all coordinates)'))
        self.declare('high', ConfigValue(domain=float, doc='upper box corner (all coordinates)'))
        self.declare('mean', ConfigValue(domain=_float_vector, doc='gaussian mean; the origin if omitted'))
        self.declare('scale', ConfigValue(domain=PositiveFloat, doc='gaussian standard deviation'))

        self.kind = InitialDistribution.point
        self.point = None
        self.low = -1.0
        self.high = 1.0
        self.mean = None
        self.scale = 1.0


class SdeConfig(ConfigDict):
    def __init__(
        self,
        description=None,
        doc=None,
        implicit=False,
        implicit_domain=None,
        visibility=0,
    ):
        super(SdeConfig, self).__init__(
            description=description,
            doc=doc,
            implicit=implicit,
            implicit_domain=implicit_domain,
            visibility=visibility,
        )

        self.declare('step', ConfigValue(domain=PositiveFloat, doc='Euler-Maruyama step h'))
        self.declare('n_steps', ConfigValue(domain=PositiveInt, doc='number of steps per path'))
        self.declare('n_paths', ConfigValue(domain=PositiveInt, doc='number of independent paths'))
        self.declare('seed', ConfigValue(domain=NonNegativeInt, doc='64-bit seed of the per-path streams'))
        self.declare('checkpoint_every', ConfigValue(domain=PositiveInt,
                                                     doc='record states every this many steps'))
        self.declare('initial', InitialConfig(doc='initial distribution'))
        self.declare('blowup_radius', ConfigValue(domain=PositiveFloat,
                                                  doc='paths leaving this ball are declared diverged'))
        self.declare('block_size', ConfigValue(domain=PositiveInt, doc='paths integrated together'))
        self.declare('chunk_steps', ConfigValue(domain=PositiveInt,
                                                doc='normal increments drawn per path and call'))
        self.declare('n_threads', ConfigValue(domain=PositiveInt, doc='worker threads over path blocks'))
        self.declare('parallel', ConfigValue(domain=Bool, doc='distribute path blocks over MPI ranks'))
        self.declare('progress_bar', ConfigValue(domain=Bool, doc='show a tqdm bar over path blocks'))

        self.step = 1e-3
        self.n_steps = 1000
        self.n_paths = 1000
        self.seed = 0
        self.checkpoint_every = 100
        self.blowup_radius = 1e6
        self.block_size = 4096
        self.chunk_steps = 256
        self.n_threads = 1
        self.parallel = False
        self.progress_bar = False


def validate_sde_config(config, dim):
    if config.checkpoint_every > config.n_steps:
        msg = 'checkpoint_every ({0}) exceeds n_steps ({1})'.format(config.checkpoint_every, config.n_steps)
        logger.error(msg)
        raise SimulationError(msg)
    init = config.initial
    if init.kind == InitialDistribution.point:
        if init.point is None or len(init.point) != dim:
            msg = 'initial point must have {0} coordinates; got {1}'.format(dim, init.point)
            logger.error(msg)
            raise SimulationError(msg)
    elif init.kind == InitialDistribution.box:
        if not init.low < init.high:
            msg = 'initial box needs low < high; got [{0}, {1}]'.format(init.low, init.high)
            logger.error(msg)
            raise SimulationError(msg)
    elif init.mean is not None and len(init.mean) != dim:
        msg = 'gaussian mean must have {0} coordinates; got {1}'.format(dim, init.mean)
        logger.error(msg)
        raise SimulationError(msg)


def checkpoint_steps(n_steps, checkpoint_every):
    steps = list(range(0, n_steps + 1, checkpoint_every))
    if steps[-1] != n_steps:
        steps.append(n_steps)
    return steps


@dataclass(frozen=True)
class Checkpoint:
    time: float
    path_index: np.ndarray
    states: np.ndarray

    @property
    def size(self):
        return len(self.path_index)


@dataclass
class TrajectoryEnsemble:
    """States of the surviving paths at each checkpoint, ordered by path index."""
    config: Optional[SdeConfig]
    checkpoints: List[Checkpoint]
    diverged_count: int
    n_paths: int
    max_noise_intensity: float = 0.0
    landscape: Optional[str] = None
    noise: Optional[dict] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for ck in self.checkpoints:
            if not np.all(np.isfinite(ck.states)):
                raise SimulationError('checkpoint at t={0} holds non-finite states'.format(ck.time))

    @property
    def times(self):
        return [ck.time for ck in self.checkpoints]

    def checkpoint(self, index=-1):
        try:
            return self.checkpoints[index]
        except IndexError:
            msg = 'no checkpoint {0}; the ensemble has {1}'.format(index, len(self.checkpoints))
            logger.error(msg)
            raise SimulationError(msg)

    @property
    def final_states(self):
        return self.checkpoints[-1].states

    def samples_after(self, time):
        """Pooled states of all checkpoints at or after ``time``."""
        chosen = [ck.states for ck in self.checkpoints if ck.time >= time]
        if not chosen:
            raise SimulationError('no checkpoint at or after t={0}'.format(time))
        return np.concatenate(chosen, axis=0)


def _initial_states(rngs, dim, init):
    if init.kind == InitialDistribution.point:
        return np.tile(np.array(init.point, dtype=float), (len(rngs), 1))
    if init.kind == InitialDistribution.box:
        return np.stack([rng.uniform(init.low, init.high, size=dim) for rng in rngs])
    mean = np.zeros(dim) if init.mean is None else np.array(init.mean, dtype=float)
    return np.stack([mean + init.scale * rng.standard_normal(dim) for rng in rngs])


def _run_block(landscape, noise, config, indices):
    """
    Integrate the paths with the given indices. Returns the states at the
    checkpoint steps (NaN once a path diverged), the step at which each path
    diverged (-1 if never) and the largest noise intensity met.
    """
    dim = landscape.dim
    rngs = [stream(config.seed, int(i)) for i in indices]
    theta = _initial_states(rngs, dim, config.initial)
    n = len(indices)
    steps = checkpoint_steps(config.n_steps, config.checkpoint_every)
    record = np.full((len(steps), n, dim), np.nan)
    diverged_at = np.full(n, -1, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    h = config.step
    radius2 = config.blowup_radius ** 2
    max_intensity = 0.0
    draw_noise = noise.kind != NoiseKind.none

    def _check(step):
        bad = alive & ~(np.all(np.isfinite(theta), axis=-1) & (np.sum(theta * theta, axis=-1) <= radius2))
        if np.any(bad):
            alive[bad] = False
            diverged_at[bad] = step

    _check(0)
    ck = 0
    if steps[0] == 0:
        record[0, alive] = theta[alive]
        ck = 1
    step = 0
    while step < config.n_steps:
        chunk = min(config.chunk_steps, config.n_steps - step)
        if draw_noise:
            xi = np.stack([rng.standard_normal((chunk, dim)) for rng in rngs], axis=1)
        for j in range(chunk):
            live = np.flatnonzero(alive)
            if len(live) == 0:
                break
            sub = theta[live]
            if draw_noise:
                max_intensity = max(max_intensity, float(np.max(noise.intensity(landscape.value(sub)))))
                with np.errstate(over='ignore', invalid='ignore'):
                    theta[live] = em_step(sub, landscape, noise, h, xi[j, live])
            else:
                with np.errstate(over='ignore', invalid='ignore'):
                    theta[live] = em_step(sub, landscape, noise, h, None)
            step += 1
            _check(step)
            if ck < len(steps) and steps[ck] == step:
                record[ck, alive] = theta[alive]
                ck += 1
        else:
            continue
        break
    return record, diverged_at, max_intensity


def _blocks(n_paths, block_size):
    return [np.arange(start, min(start + block_size, n_paths)) for start in range(0, n_paths, block_size)]


def simulate_ensemble(landscape, noise, config, timer=None):
    """
    Integrate config.n_paths independent Euler-Maruyama paths.

    Path i draws its initial state and then its normal increments from the
    stream keyed by (config.seed, i), in fixed-size chunks, so the ensemble
    does not depend on block size, thread count or MPI layout.

    Parameters
    ----------
    landscape: Landscape
    noise: NoiseModel
    config: SdeConfig
    timer: HierarchicalTimer

    Returns
    -------
    TrajectoryEnsemble
    """
    if timer is None:
        timer = HierarchicalTimer()
    validate_sde_config(config, landscape.dim)
    n_paths = config.n_paths
    steps = checkpoint_steps(config.n_steps, config.checkpoint_every)

    timer.start('simulate')
    try:
        if config.parallel and mpi_available:
            mpi_interface = mpiu.MPIInterface()
            alloc = mpiu.MPIAllocationMap(mpi_interface, n_paths)
            local = np.array(alloc.local_allocation_map(), dtype=np.int64)
        else:
            mpi_interface = None
            alloc = None
            local = np.arange(n_paths)

        blocks = _blocks(len(local), config.block_size)
        blocks = [local[b] for b in blocks]
        logger.info('simulating {0} paths of {1} steps (h={2:g}) on {3} in {4} blocks'.format(
            n_paths, config.n_steps, config.step, landscape.name, len(blocks)))

        def _work(idx):
            return _run_block(landscape, noise, config, idx)

        err = None
        results = []
        try:
            if config.n_threads > 1 and len(blocks) > 1:
                with ThreadPoolExecutor(max_workers=config.n_threads) as pool:
                    iterator = pool.map(_work, blocks)
                    if config.progress_bar and tqdm is not None:
                        iterator = tqdm(iterator, total=len(blocks), ncols=100, desc='paths', leave=False)
                    results = list(iterator)
            else:
                iterator = blocks
                if config.progress_bar and tqdm is not None:
                    iterator = tqdm(blocks, ncols=100, desc='paths', leave=False)
                results = [_work(b) for b in iterator]
        except Exception as e:
            if alloc is None:
                raise
            err = e
        if alloc is not None:
            mpiu.synchronize_errors(mpi_interface, err)

        if results:
            record = np.concatenate([r[0] for r in results], axis=1)
            diverged_at = np.concatenate([r[1] for r in results])
            max_intensity = max(r[2] for r in results)
        else:
            record = np.zeros((len(steps), 0, landscape.dim))
            diverged_at = np.zeros(0, dtype=np.int64)
            max_intensity = 0.0

        if alloc is not None:
            rows = np.concatenate([record.transpose(1, 0, 2).reshape(len(local), -1),
                                   diverged_at[:, None].astype(float),
                                   np.full((len(local), 1), max_intensity)], axis=1)
            rows = alloc.global_rows_float64(rows)
            width = len(steps) * landscape.dim
            record = rows[:, :width].reshape(n_paths, len(steps), landscape.dim).transpose(1, 0, 2)
            diverged_at = rows[:, width].astype(np.int64)
            max_intensity = float(np.max(rows[:, width + 1]))
    finally:
        timer.stop('simulate')

    diverged_count = int(np.sum(diverged_at >= 0))
    if diverged_count:
        logger.warning('{0} of {1} paths diverged (blowup radius {2:g})'.format(
            diverged_count, n_paths, config.blowup_radius))
    if diverged_count == n_paths:
        msg = 'all {0} paths diverged'.format(n_paths)
        logger.error(msg)
        raise EnsembleDivergedError(msg, diverged_count)

    path_ids = np.arange(n_paths)
    checkpoints = []
    for k, s in enumerate(steps):
        keep = (diverged_at < 0) | (diverged_at > s)
        checkpoints.append(Checkpoint(time=s * config.step, path_index=path_ids[keep], states=record[k, keep]))
    logger.debug('{0:>12} {1:>10}'.format('time', 'alive'))
    for ck in checkpoints:
        logger.debug('{0:>12.5g} {1:>10d}'.format(ck.time, ck.size))
    return TrajectoryEnsemble(config=config, checkpoints=checkpoints, diverged_count=diverged_count,
                              n_paths=n_paths, max_noise_intensity=max_intensity, landscape=landscape.name,
                              noise=noise.to_dict())
