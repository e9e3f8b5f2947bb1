import logging
import math

import numpy as np
from scipy import linalg

from sgdlab.fokker_planck.grids import FpeGrid
from sgdlab.hardy.constants import HardyError
from sgdlab.utils.sgdlab_enums import Geometry

logger = logging.getLogger(__name__)


def weighted_operator(landscape, eta_sigma, grid):
    """
    Symmetric tridiagonal form (diagonal, off-diagonal) of the finite-volume
    discretization of u -> -f^(1 + 1/es) div(f^(-1/es) grad u) with Neumann
    boundaries, symmetrized by the mass matrix diag(f^(-1 - 1/es) vol).
    """
    if not isinstance(grid, FpeGrid):
        raise HardyError('spectral gaps are computed on line or radial grids')
    if not eta_sigma > 0:
        raise HardyError('eta_sigma must be positive; got {0}'.format(eta_sigma))
    if grid.geometry == Geometry.line and landscape.dim != 1:
        raise HardyError('line grids need a one-dimensional landscape; {0} has dim {1}'.format(
            landscape.name, landscape.dim))
    if grid.geometry == Geometry.radial and (not landscape.is_radial or landscape.dim != grid.dim):
        raise HardyError('{0} is not a radial landscape in dimension {1}'.format(landscape.name, grid.dim))
    p = 1.0 / eta_sigma
    centers = grid.centers
    faces = grid.edges[1:-1]
    f_faces, _ = landscape.profile(faces, grid.geometry)
    f_centers, _ = landscape.profile(centers, grid.geometry)
    with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
        stiff = grid.face_areas[1:-1] * np.asarray(f_faces, dtype=float) ** -p / np.diff(centers)
        mass = np.asarray(f_centers, dtype=float) ** (-1.0 - p) * grid.volumes
    if not (np.all(np.isfinite(stiff)) and np.all(stiff > 0) and np.all(np.isfinite(mass)) and np.all(mass > 0)):
        msg = 'weights f^(-1/eta_sigma) are not finite and positive on the grid for {0}'.format(landscape.name)
        logger.error(msg)
        raise HardyError(msg)
    diag = np.zeros(grid.cells)
    diag[:-1] += stiff
    diag[1:] += stiff
    diag /= mass
    off = -stiff / np.sqrt(mass[:-1] * mass[1:])
    return diag, off


def spectral_gap(landscape, eta_sigma, grid, count=2):
    """
    Smallest nonzero eigenvalue of the weighted operator on the grid.

    The operator is self-adjoint in L^2(f^(-1 - 1/es)); constants span its
    kernel and are deflated. With ``count`` > 2 the first ``count``
    eigenvalues are returned instead.
    """
    diag, off = weighted_operator(landscape, eta_sigma, grid)
    try:
        vals = linalg.eigh_tridiagonal(diag, off, eigvals_only=True, select='i',
                                       select_range=(0, max(count, 2) - 1))
    except (linalg.LinAlgError, ValueError) as err:
        msg = 'tridiagonal eigensolver failed: {0}'.format(err)
        logger.error(msg)
        raise HardyError(msg) from err
    scale = float(np.max(np.abs(diag)))
    if abs(vals[0]) > 1e-8 * scale:
        logger.warning('lowest eigenvalue {0:.3e} is not a numerical zero (scale {1:.3e})'.format(vals[0], scale))
    logger.debug('weighted operator on {0} cells: eigenvalues {1}'.format(grid.cells, vals.tolist()))
    if count > 2:
        return vals
    gap = float(vals[1])
    if not (math.isfinite(gap) and gap > 0):
        msg = 'no positive spectral gap found ({0})'.format(gap)
        logger.error(msg)
        raise HardyError(msg)
    return gap
