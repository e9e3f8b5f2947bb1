import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np

from sgdlab.fokker_planck.grids import FokkerPlanckError, FpeGrid
from sgdlab.invariant.density import InvariantModel, density_eval
from sgdlab.invariant.exponents import alpha_from_eta_sigma
from sgdlab.utils.sgdlab_enums import FpeVariant, Geometry

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FpeOperator:
    """
    Tridiagonal finite-volume generator L of the forward equation, so that
    d(rho)/dt = L rho cell-wise.

    Face fluxes are J = D (rho_R - rho_L)/h + V f' rho_face with D and f'
    evaluated analytically at the face: D = eta_sigma * f, V = 1 + eta_sigma
    for the ``ml`` variant and D = eta, V = 1 for the ``homogeneous`` one.
    Boundary fluxes are zero.
    """
    grid: FpeGrid
    variant: FpeVariant
    eta_sigma: float
    landscape: object
    diffusion: np.ndarray
    drift: np.ndarray
    face_areas: np.ndarray
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    max_peclet: float

    @property
    def cells(self):
        return self.grid.cells

    @property
    def volumes(self):
        return self.grid.volumes

    @property
    def invariant_model(self):
        if self.variant == FpeVariant.homogeneous:
            return InvariantModel.boltzmann(self.eta_sigma)
        return InvariantModel.power(alpha_from_eta_sigma(self.eta_sigma))

    @property
    def dt_max(self):
        """Largest explicit step keeping the update diagonal nonnegative."""
        return 1.0 / float(np.max(np.abs(self.diag)))

    def apply(self, values):
        values = np.asarray(values, dtype=float)
        out = self.diag * values
        out[:-1] += self.upper[:-1] * values[1:]
        out[1:] += self.lower[1:] * values[:-1]
        return out

    def banded(self):
        """L in the (1, 1) banded layout of scipy.linalg.solve_banded."""
        ab = np.zeros((3, self.cells))
        ab[0, 1:] = self.upper[:-1]
        ab[1] = self.diag
        ab[2, :-1] = self.lower[1:]
        return ab

    def to_dense(self):
        mat = np.diag(self.diag)
        mat += np.diag(self.upper[:-1], 1)
        mat += np.diag(self.lower[1:], -1)
        return mat

    def check_grid(self, density):
        if not self.grid.matches(density):
            msg = 'density lives on a different grid than the operator ({0} cells vs {1})'.format(
                len(density.edges) - 1, self.cells)
            logger.error(msg)
            raise FokkerPlanckError(msg)


def _check_landscape(landscape, grid):
    if grid.geometry == Geometry.line and landscape.dim != 1:
        msg = 'line grids need a one-dimensional landscape; {0} has dim {1}'.format(landscape.name, landscape.dim)
        logger.error(msg)
        raise FokkerPlanckError(msg)
    if grid.geometry == Geometry.radial:
        if not landscape.is_radial:
            msg = '{0} is not radially symmetric; use a line grid or another landscape'.format(landscape.name)
            logger.error(msg)
            raise FokkerPlanckError(msg)
        if landscape.dim != grid.dim:
            msg = 'radial grid dimension {0} does not match landscape dimension {1}'.format(grid.dim, landscape.dim)
            logger.error(msg)
            raise FokkerPlanckError(msg)


def assemble(landscape, eta_sigma, grid, variant=FpeVariant.ml):
    """
    Assemble the forward operator on a line or radial grid.

    Parameters
    ----------
    landscape: Landscape
        one-dimensional for line grids, radially symmetric for radial grids
    eta_sigma: float
        the noise level: eta * sigma for the ``ml`` variant, eta for the
        ``homogeneous`` variant
    grid: FpeGrid
    variant: FpeVariant

    Returns
    -------
    FpeOperator
    """
    variant = FpeVariant(variant)
    eta_sigma = float(eta_sigma)
    if not (math.isfinite(eta_sigma) and eta_sigma > 0):
        raise FokkerPlanckError('noise level must be positive; got {0}'.format(eta_sigma))
    _check_landscape(landscape, grid)

    centers = grid.centers
    faces = grid.edges[1:-1]
    f_faces, g_faces = landscape.profile(faces, grid.geometry)
    f_centers, _ = landscape.profile(centers, grid.geometry)
    if not (np.all(np.isfinite(f_faces)) and np.all(np.isfinite(g_faces)) and np.all(np.isfinite(f_centers))):
        raise FokkerPlanckError('{0} is not finite on the grid'.format(landscape.name))
    if variant == FpeVariant.ml:
        bad = np.flatnonzero(~(np.concatenate([f_faces, f_centers]) > 0))
        if len(bad):
            msg = ('f <= 0 inside the domain of {0}: the ML diffusion ησ·f degenerates there; '
                   'move the domain off the minimizers or grade it toward them').format(landscape.name)
            logger.error(msg)
            raise FokkerPlanckError(msg)
        diffusion = eta_sigma * f_faces
        drift = (1 + eta_sigma) * g_faces
    else:
        diffusion = np.full(len(faces), eta_sigma)
        drift = np.asarray(g_faces, dtype=float)

    h = np.diff(centers)
    w_left = (centers[1:] - faces) / h
    w_right = (faces - centers[:-1]) / h
    area = grid.face_areas[1:-1]
    vol = grid.volumes

    peclet = np.abs(drift) * h * np.maximum(w_left, w_right) / diffusion
    max_peclet = float(np.max(peclet))
    if max_peclet > 1:
        worst = int(np.argmax(peclet))
        msg = ('cell Péclet number {0:.3g} > 1 at coordinate {1:.6g}; the scheme may lose positivity, '
               'refine the grid').format(max_peclet, float(faces[worst]))
        logger.warning(msg)
        warnings.warn(msg)

    # area-weighted flux through face j in terms of its two neighbours
    a_left = area * (-diffusion / h + drift * w_left)
    a_right = area * (diffusion / h + drift * w_right)

    n = grid.cells
    lower = np.zeros(n)
    diag = np.zeros(n)
    upper = np.zeros(n)
    diag[:-1] += a_left / vol[:-1]
    upper[:-1] = a_right / vol[:-1]
    diag[1:] -= a_right / vol[1:]
    lower[1:] = -a_left / vol[1:]

    logger.debug('assembled {0} operator for {1} on {2} {3} cells, noise {4}, max Péclet {5:.3g}'.format(
        variant.name, landscape.name, n, grid.geometry.name, eta_sigma, max_peclet))
    return FpeOperator(grid=grid, variant=variant, eta_sigma=eta_sigma, landscape=landscape,
                       diffusion=diffusion, drift=drift, face_areas=area, lower=lower, diag=diag,
                       upper=upper, max_peclet=max_peclet)


def invariant_density(op):
    """The invariant density of ``op`` sampled at the cell centers and normalized on the grid."""
    ref = density_eval(op.landscape, op.invariant_model, op.grid.geometry, op.grid.edges)
    return ref.normalize_cells()


def stationarity_residual(op, rho):
    """sqrt(sum_i (L rho)_i^2 vol_i): the L2 norm of the discrete right-hand side."""
    op.check_grid(rho)
    rate = op.apply(rho.values)
    return math.sqrt(float(np.sum(rate * rate * op.volumes)))


@dataclass(frozen=True)
class UForm:
    """u = rho / rho_inf and its time derivative du/dt = (L rho) / rho_inf."""
    u: np.ndarray
    rate: np.ndarray


def relative_density(op, rho):
    op.check_grid(rho)
    ref = invariant_density(op)
    return rho.values / ref.values


def u_form(op, rho):
    """
    The evolution in the relative density u = rho / rho_inf, which obeys
    du/dt = eta_sigma f u'' - f' u' (plus the (m-1)/r transport of radial
    coordinates) for the ``ml`` variant.
    """
    op.check_grid(rho)
    ref = invariant_density(op)
    return UForm(u=rho.values / ref.values, rate=op.apply(rho.values) / ref.values)
