import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import stats

from sgdlab.fokker_planck.grids import FokkerPlanckError, FpeGrid
from sgdlab.invariant.density import InvariantModel, density_eval
from sgdlab.invariant.exponents import alpha_from_eta_sigma
from sgdlab.utils.io_utils import write_csv
from sgdlab.utils.sgdlab_enums import FpeVariant

logger = logging.getLogger(__name__)


def _reference(rho, landscape, eta_sigma, variant):
    variant = FpeVariant(variant)
    if not eta_sigma > 0:
        raise FokkerPlanckError('noise level must be positive; got {0}'.format(eta_sigma))
    mass = rho.mass()
    if abs(mass - 1) > 1e-9:
        msg = 'rho must be a probability density on its grid; its mass is {0:.12g}'.format(mass)
        logger.error(msg)
        raise FokkerPlanckError(msg)
    if variant == FpeVariant.ml:
        model = InvariantModel.power(alpha_from_eta_sigma(eta_sigma))
    else:
        model = InvariantModel.boltzmann(eta_sigma)
    ref = density_eval(landscape, model, rho.geometry, rho.edges)
    total = ref.mass()
    if not (math.isfinite(total) and total > 0):
        msg = 'invariant density of {0} has mass {1} on the grid'.format(landscape.name, total)
        logger.error(msg)
        raise FokkerPlanckError(msg)
    return ref.normalize_cells()


def weighted_l2_distance(rho, landscape, eta_sigma, variant=FpeVariant.ml):
    """
    sqrt(sum (rho - rho_inf)^2 / rho_inf * vol), with rho_inf the invariant
    density normalized on the grid. For the ``ml`` variant the weight
    1/rho_inf is proportional to f^(1 + 1/(eta sigma)).
    """
    ref = _reference(rho, landscape, eta_sigma, variant)
    diff = rho.values - ref.values
    return math.sqrt(float(np.sum(diff * diff / ref.values * ref.volumes)))


def u_variance(rho, landscape, eta_sigma, variant=FpeVariant.ml):
    """Variance of u = rho/rho_inf under rho_inf."""
    ref = _reference(rho, landscape, eta_sigma, variant)
    u = rho.values / ref.values
    w = ref.masses()
    mean = float(np.sum(w * u))
    return float(np.sum(w * (u - mean) ** 2))


@dataclass(frozen=True)
class DecayReport:
    times: List[float]
    weighted_l2: List[float]
    fitted_nu: float
    fit_r2: float
    window: Tuple[float, float]
    intercept: float = 0.0
    predicted_nu: Optional[float] = None

    def __post_init__(self):
        if any(d < 0 for d in self.weighted_l2):
            raise FokkerPlanckError('distances must be nonnegative')

    def rows(self):
        return list(zip(self.times, self.weighted_l2))

    def write(self, path):
        write_csv(path, ['time', 'distance'], self.rows())
        return path


def fit_decay_rate(times, distances, window=None):
    """
    Least-squares fit of log(distance) against time over ``window``.

    Returns
    -------
    DecayReport
        with fitted_nu = -slope and the coefficient of determination
    """
    times = np.asarray(times, dtype=float)
    distances = np.asarray(distances, dtype=float)
    if times.shape != distances.shape or times.ndim != 1:
        raise FokkerPlanckError('times and distances must be 1D arrays of equal length')
    if window is None:
        window = (float(times.min()), float(times.max())) if len(times) else (0.0, 0.0)
    t0, t1 = float(window[0]), float(window[1])
    mask = (times >= t0) & (times <= t1)
    if int(mask.sum()) < 4:
        msg = 'need at least 4 points in the window [{0:g}, {1:g}]; got {2}'.format(t0, t1, int(mask.sum()))
        logger.error(msg)
        raise FokkerPlanckError(msg)
    if np.any(~(distances[mask] > 0)):
        msg = 'distances must be positive on the fit window'
        logger.error(msg)
        raise FokkerPlanckError(msg)
    fit = stats.linregress(times[mask], np.log(distances[mask]))
    r2 = min(max(float(fit.rvalue) ** 2, 0.0), 1.0)
    logger.info('fitted decay rate {0:.6g} (r2 = {1:.6f}) on [{2:g}, {3:g}]'.format(-fit.slope, r2, t0, t1))
    return DecayReport(times=times.tolist(), weighted_l2=distances.tolist(), fitted_nu=float(-fit.slope),
                       fit_r2=r2, window=(t0, t1), intercept=float(fit.intercept))


def decay_series(checkpoints, landscape, eta_sigma, variant=FpeVariant.ml):
    """(times, weighted distances, u variances) along evolve output."""
    times = []
    dists = []
    variances = []
    for ck in checkpoints:
        times.append(float(ck.metadata['time']))
        dists.append(weighted_l2_distance(ck, landscape, eta_sigma, variant))
        variances.append(u_variance(ck, landscape, eta_sigma, variant))
    return np.array(times), np.array(dists), np.array(variances)


def bump(grid: FpeGrid, location, width):
    """A normalized Gaussian bump exp(-(x - location)^2 / (2 width^2)) sampled at the cell centers."""
    values = np.exp(-0.5 * ((grid.centers - location) / width) ** 2)
    total = float(np.sum(values * grid.volumes))
    if not total > 0:
        raise FokkerPlanckError('bump at {0:g} has no mass on the grid'.format(location))
    return grid.density(values / total, normalized=True)
