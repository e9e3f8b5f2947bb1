import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from sgdlab.invariant.density import DensityGrid, density_eval, normalize, sphere_area
from sgdlab.utils.errors import SgdLabError
from sgdlab.utils.sgdlab_enums import Geometry

logger = logging.getLogger(__name__)

MIN_CELLS = 16


class FokkerPlanckError(SgdLabError, ValueError):
    pass


class CflViolationError(FokkerPlanckError):
    def __init__(self, msg, dt, dt_max):
        super().__init__(msg)
        self.dt = dt
        self.dt_max = dt_max


@dataclass(frozen=True)
class FpeGrid:
    """Cells of a line segment or of a ball (radial shells in R^dim)."""
    geometry: Geometry
    edges: np.ndarray
    dim: int = 1

    def __post_init__(self):
        geometry = Geometry(self.geometry)
        edges = np.asarray(self.edges, dtype=float)
        if geometry not in (Geometry.line, Geometry.radial):
            raise FokkerPlanckError('the solver supports line and radial grids; got {0}'.format(geometry.name))
        if edges.ndim != 1 or np.any(np.diff(edges) <= 0):
            raise FokkerPlanckError('grid edges must be strictly increasing')
        if len(edges) - 1 < MIN_CELLS:
            msg = 'need at least {0} cells; got {1}'.format(MIN_CELLS, len(edges) - 1)
            logger.error(msg)
            raise FokkerPlanckError(msg)
        if geometry == Geometry.radial and edges[0] != 0:
            raise FokkerPlanckError('radial grids start at r = 0; got {0}'.format(edges[0]))
        object.__setattr__(self, 'geometry', geometry)
        object.__setattr__(self, 'edges', edges)

    @property
    def cells(self):
        return len(self.edges) - 1

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def volumes(self):
        if self.geometry == Geometry.line:
            return np.diff(self.edges)
        m = self.dim
        return sphere_area(m) * (self.edges[1:] ** m - self.edges[:-1] ** m) / m

    @property
    def face_areas(self):
        """Measure of every face (edges included); 1 on a line, |S^(m-1)| r^(m-1) for shells."""
        if self.geometry == Geometry.line:
            return np.ones(len(self.edges))
        return sphere_area(self.dim) * self.edges ** (self.dim - 1)

    def matches(self, density):
        return (density.geometry == self.geometry and len(density.edges) == len(self.edges)
                and np.allclose(density.edges, self.edges, rtol=0, atol=1e-14 * max(1.0, abs(self.edges).max())))

    def density(self, values, normalized=False, metadata=None):
        return DensityGrid(geometry=self.geometry, edges=self.edges, values=values,
                           dim=self.dim if self.geometry == Geometry.radial else 1,
                           normalized=normalized, metadata=metadata or {})


def line_grid(low, high, cells):
    if not high > low:
        raise FokkerPlanckError('line grid needs low < high; got [{0}, {1}]'.format(low, high))
    return FpeGrid(Geometry.line, np.linspace(low, high, int(cells) + 1), 1)


def radial_grid(r_max, cells, dim, graded=False, inner=1e-6):
    """
    Shells of the ball of radius r_max in R^dim. With ``graded`` the edges
    are 0 followed by a geometric sequence from ``inner`` to r_max, which
    resolves a singular density at the origin.
    """
    cells = int(cells)
    if not r_max > 0 or dim < 1:
        raise FokkerPlanckError('radial grid needs r_max > 0 and dim >= 1')
    if graded:
        if not 0 < inner < r_max:
            raise FokkerPlanckError('innermost edge must lie in (0, r_max); got {0}'.format(inner))
        edges = np.concatenate([[0.0], np.geomspace(inner, r_max, cells)])
    else:
        edges = np.linspace(0.0, r_max, cells + 1)
    return FpeGrid(Geometry.radial, edges, int(dim))


def domain_tail_mass(landscape, model, grid):
    """
    Fraction of the invariant mass of ``model`` lying outside the grid,
    from the expanding-ball normalization and an adaptive tail quadrature.
    """
    ref = density_eval(landscape, model, grid.geometry, grid.edges)
    total = normalize(ref)
    if not total.integrable:
        msg = 'the invariant density of {0} is not normalizable ({1})'.format(
            landscape.name, total.divergence_mode.name)
        logger.error(msg)
        raise FokkerPlanckError(msg)
    if grid.geometry == Geometry.radial:
        area = sphere_area(grid.dim)

        def fn(r):
            return float(area * ref.integrand(np.array([r]))[0] * r ** (grid.dim - 1))
        tail, _ = integrate.quad(fn, grid.edges[-1], math.inf, limit=200)
    else:
        def fn(x):
            return float(ref.integrand(np.array([x]))[0])
        left, _ = integrate.quad(fn, -math.inf, grid.edges[0], limit=200)
        right, _ = integrate.quad(fn, grid.edges[-1], math.inf, limit=200)
        tail = left + right
    return tail / total.integral
