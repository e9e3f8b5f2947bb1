import logging
import math

import numpy as np
from pyomo.common.timing import HierarchicalTimer
from scipy import linalg

from sgdlab.fokker_planck.grids import FokkerPlanckError, CflViolationError
from sgdlab.utils.sgdlab_enums import Scheme

logger = logging.getLogger(__name__)

_MASS_DRIFT = 1e-9
_NEGATIVE_TOL = 1e-12


def _step_explicit(op, values, dt):
    return values + dt * op.apply(values)


def _implicit_stepper(op, dt):
    ab = -dt * op.banded()
    ab[1] += 1.0

    def step(values):
        return linalg.solve_banded((1, 1), ab, values, check_finite=False)
    return step


def _clean(values, volumes, step):
    low = float(values.min())
    if low < -_NEGATIVE_TOL:
        msg = 'density became negative ({0:.3e}) at step {1}'.format(low, step)
        logger.error(msg)
        raise FokkerPlanckError(msg)
    values = np.maximum(values, 0.0)
    mass = float(np.sum(values * volumes))
    if abs(mass - 1) > _MASS_DRIFT:
        msg = 'mass drifted to {0:.15g} at step {1}'.format(mass, step)
        logger.error(msg)
        raise FokkerPlanckError(msg)
    return values / mass


def evolve(op, rho0, dt, steps, scheme=Scheme.implicit, checkpoint_every=None, timer=None):
    """
    Time-step the forward equation from rho0.

    Parameters
    ----------
    op: FpeOperator
    rho0: DensityGrid
        a probability density on the operator's grid
    dt: float
    steps: int
    scheme: Scheme
        ``explicit`` (forward Euler, dt <= op.dt_max) or ``implicit``
        (backward Euler with a tridiagonal solve)
    checkpoint_every: int
        steps between checkpoints; defaults to ``steps``
    timer: HierarchicalTimer

    Returns
    -------
    list of DensityGrid
        the initial state and every checkpoint, each with ``time`` and
        ``step`` in its metadata
    """
    scheme = Scheme(scheme)
    op.check_grid(rho0)
    steps = int(steps)
    if not (math.isfinite(dt) and dt > 0) or steps < 1:
        raise FokkerPlanckError('need dt > 0 and steps >= 1; got dt={0}, steps={1}'.format(dt, steps))
    if checkpoint_every is None:
        checkpoint_every = steps
    if checkpoint_every < 1:
        raise FokkerPlanckError('checkpoint_every must be positive; got {0}'.format(checkpoint_every))
    mass0 = rho0.mass()
    if abs(mass0 - 1) > _MASS_DRIFT:
        msg = 'rho0 must be a probability density; its mass is {0:.12g}'.format(mass0)
        logger.error(msg)
        raise FokkerPlanckError(msg)
    if scheme == Scheme.explicit and dt > op.dt_max:
        msg = 'explicit step {0:g} exceeds the stability bound {1:g}; reduce dt or use the implicit scheme'.format(
            dt, op.dt_max)
        logger.error(msg)
        raise CflViolationError(msg, dt, op.dt_max)
    if timer is None:
        timer = HierarchicalTimer()

    volumes = op.volumes
    if scheme == Scheme.implicit:
        stepper = _implicit_stepper(op, dt)
    else:
        def stepper(values):
            return _step_explicit(op, values, dt)

    def checkpoint(values, k):
        return op.grid.density(values, normalized=True,
                               metadata={'time': k * dt, 'step': k, 'scheme': scheme.name,
                                         'landscape': op.landscape.name, 'noise': op.eta_sigma,
                                         'variant': op.variant.name})

    values = rho0.values / mass0
    out = [checkpoint(values, 0)]
    logger.debug('{0:>10} {1:>12} {2:>14}'.format('step', 'time', 'min density'))
    timer.start('evolve')
    try:
        for k in range(1, steps + 1):
            values = _clean(stepper(values), volumes, k)
            if k % checkpoint_every == 0 or k == steps:
                out.append(checkpoint(values, k))
                logger.debug('{0:>10d} {1:>12.5g} {2:>14.4e}'.format(k, k * dt, float(values.min())))
    finally:
        timer.stop('evolve')
    return out


def checkpoint_times(checkpoints):
    return np.array([ck.metadata['time'] for ck in checkpoints])
