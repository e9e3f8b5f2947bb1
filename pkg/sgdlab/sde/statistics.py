import logging

import numpy as np
from scipy import stats

from sgdlab.invariant.density import DensityError
from sgdlab.sde.integrate import Checkpoint, TrajectoryEnsemble
from sgdlab.sde.noise import SimulationError
from sgdlab.utils.histogram import ManifoldHistogram, circle_edges, index_edges, bin_index
from sgdlab.utils.io_utils import write_csv, read_csv
from sgdlab.utils.sgdlab_enums import MinimizerSetKind

logger = logging.getLogger(__name__)

_MASS_TOL = 1e-10


def occupancy_histogram(ensemble, landscape, bins=64, checkpoint=-1, edges=None):
    """
    Normalized histogram of the minimizer-set coordinate of the projected
    states at one checkpoint.

    Circle coordinates use bins centered at 2*pi*b/bins; point sets use one
    bin per point (``bins`` is ignored); affine subspaces of dimension one
    need explicit ``edges``.
    """
    ck = ensemble.checkpoint(checkpoint)
    if ck.size == 0:
        msg = 'no surviving paths at t={0}'.format(ck.time)
        logger.error(msg)
        raise SimulationError(msg)
    minimizers = landscape.minimizer_set
    coords = minimizers.coordinate(minimizers.projection(ck.states))
    if minimizers.kind == MinimizerSetKind.circle_in_plane:
        edges = circle_edges(bins)
        periodic = True
    elif minimizers.kind == MinimizerSetKind.point_set:
        edges = index_edges(len(minimizers.points))
        periodic = False
    else:
        if edges is None or minimizers.intrinsic_dim != 1:
            msg = 'occupancy on {0} needs a one-dimensional set and explicit edges'.format(minimizers.kind.name)
            logger.error(msg)
            raise SimulationError(msg)
        edges = np.asarray(edges, dtype=float)
        periodic = False
    idx = bin_index(coords, edges, periodic=periodic)
    inside = (idx >= 0) & (idx < len(edges) - 1)
    counts = np.bincount(idx[inside], minlength=len(edges) - 1)
    if counts.sum() == 0:
        raise SimulationError('no projected state falls inside the histogram edges')
    return ManifoldHistogram.from_counts(edges, counts, periodic=periodic)


def minimizer_fraction(ensemble, landscape, tol, checkpoint=-1):
    """Fraction of all paths (diverged ones count as misses) within tol of the minimizer set."""
    ck = ensemble.checkpoint(checkpoint)
    near = landscape.minimizer_set.distance(ck.states) < tol
    return float(np.sum(near)) / ensemble.n_paths


def ks_distance(samples, density):
    """
    Kolmogorov-Smirnov distance between 1D samples and a normalized
    DensityGrid, whose CDF is piecewise linear between the cell edges.
    Radial grids are compared with the sample radii.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise SimulationError('ks_distance needs at least one sample')
    mass = density.mass()
    if not density.normalized or abs(mass - 1) > _MASS_TOL:
        msg = 'ks_distance needs a normalized density; got mass {0:.12g} (normalized={1})'.format(
            mass, density.normalized)
        logger.error(msg)
        raise DensityError(msg)
    edges, cdf = density.cdf_nodes()
    res = stats.kstest(samples, lambda x: np.interp(x, edges, cdf))
    return float(res.statistic)


def dump_checkpoints(ensemble, path):
    dim = ensemble.checkpoints[0].states.shape[1]
    header = ['time', 'path'] + ['coord_{0}'.format(i) for i in range(dim)]
    rows = []
    for ck in ensemble.checkpoints:
        for idx, state in zip(ck.path_index, ck.states):
            rows.append([ck.time, int(idx)] + list(state))
    return write_csv(path, header, rows)


def load_ensemble(path, n_paths=None):
    """
    Rebuild an ensemble from a checkpoint dump. Paths missing from the last
    checkpoint count as diverged.
    """
    header, rows = read_csv(path)
    if header[:2] != ['time', 'path']:
        raise SimulationError('{0} is not a checkpoint dump (header {1})'.format(path, header))
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    times = np.unique(data[:, 0])
    checkpoints = []
    for t in times:
        sel = data[data[:, 0] == t]
        checkpoints.append(Checkpoint(time=float(t), path_index=sel[:, 1].astype(np.int64), states=sel[:, 2:]))
    if n_paths is None:
        n_paths = int(data[:, 1].max()) + 1 if len(data) else 0
    diverged = n_paths - checkpoints[-1].size if checkpoints else n_paths
    return TrajectoryEnsemble(config=None, checkpoints=checkpoints, diverged_count=diverged, n_paths=n_paths)
