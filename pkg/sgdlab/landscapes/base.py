import abc
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from sgdlab.utils.errors import SgdLabError
from sgdlab.utils.sgdlab_enums import MinimizerSetKind, Geometry

logger = logging.getLogger(__name__)


class LandscapeError(SgdLabError, ValueError):
    pass


class RankMismatchError(LandscapeError):
    pass


def as_points(theta, dim):
    theta = np.asarray(theta, dtype=float)
    if theta.ndim == 0 or theta.shape[-1] != dim:
        msg = 'expected points with trailing dimension {0}; got shape {1}'.format(dim, theta.shape)
        logger.error(msg)
        raise LandscapeError(msg)
    return theta


def _safe(values, fill=1.0):
    return np.where(values > 0, values, fill)


class MinimizerSet(abc.ABC):
    """
    Geometry of the set N of global minimizers of a landscape.

    All maps are vectorized over leading axes: points have shape (..., m).
    """
    kind = None

    def __init__(self, ambient_dim, intrinsic_dim):
        if not 0 <= intrinsic_dim < ambient_dim:
            raise LandscapeError('need 0 <= n < m; got n={0}, m={1}'.format(intrinsic_dim, ambient_dim))
        self.ambient_dim = ambient_dim
        self.intrinsic_dim = intrinsic_dim

    @property
    def codim(self):
        return self.ambient_dim - self.intrinsic_dim

    @abc.abstractmethod
    def distance(self, theta):
        pass

    @abc.abstractmethod
    def projection(self, theta):
        pass

    @abc.abstractmethod
    def coordinate(self, points):
        pass

    @property
    def coordinate_range(self) -> Optional[Tuple[float, float]]:
        return None

    @property
    def periodic(self):
        return False

    @abc.abstractmethod
    def sample(self, rng, count):
        """Points on N drawn from a fixed reference law (used by checks)."""
        pass


class PointSet(MinimizerSet):
    kind = MinimizerSetKind.point_set

    def __init__(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[0] == 0:
            raise LandscapeError('a point set needs at least one point')
        super().__init__(ambient_dim=points.shape[1], intrinsic_dim=0)
        self.points = points

    def _offsets(self, theta):
        theta = as_points(theta, self.ambient_dim)
        diff = theta[..., None, :] - self.points
        return np.sqrt(np.sum(diff * diff, axis=-1))

    def nearest(self, theta):
        return np.argmin(self._offsets(theta), axis=-1)

    def distance(self, theta):
        return np.min(self._offsets(theta), axis=-1)

    def projection(self, theta):
        return self.points[self.nearest(theta)]

    def coordinate(self, points):
        return self.nearest(points).astype(float)

    @property
    def coordinate_range(self):
        return -0.5, len(self.points) - 0.5

    def sample(self, rng, count):
        return self.points[np.arange(count) % len(self.points)]


class CircleInPlane(MinimizerSet):
    """Unit circle in the (theta_1, theta_2) plane of R^m."""
    kind = MinimizerSetKind.circle_in_plane

    def __init__(self, ambient_dim):
        if ambient_dim < 2:
            raise LandscapeError('the circle needs an ambient dimension of at least 2')
        super().__init__(ambient_dim=ambient_dim, intrinsic_dim=1)

    def distance(self, theta):
        theta = as_points(theta, self.ambient_dim)
        rho = np.hypot(theta[..., 0], theta[..., 1])
        rest = np.sum(theta[..., 2:] ** 2, axis=-1)
        return np.sqrt((rho - 1) ** 2 + rest)

    def projection(self, theta):
        theta = as_points(theta, self.ambient_dim)
        rho = np.hypot(theta[..., 0], theta[..., 1])
        safe = _safe(rho)
        out = np.zeros_like(theta)
        out[..., 0] = np.where(rho > 0, theta[..., 0] / safe, 1.0)
        out[..., 1] = np.where(rho > 0, theta[..., 1] / safe, 0.0)
        return out

    def coordinate(self, points):
        points = as_points(points, self.ambient_dim)
        return np.mod(np.arctan2(points[..., 1], points[..., 0]), 2 * math.pi)

    def point_at(self, phi):
        phi = np.asarray(phi, dtype=float)
        out = np.zeros(phi.shape + (self.ambient_dim,))
        out[..., 0] = np.cos(phi)
        out[..., 1] = np.sin(phi)
        return out

    @property
    def coordinate_range(self):
        return 0.0, 2 * math.pi

    @property
    def periodic(self):
        return True

    def sample(self, rng, count):
        return self.point_at(rng.uniform(0, 2 * math.pi, size=count))


class AffineSubspace(MinimizerSet):
    kind = MinimizerSetKind.affine_subspace

    def __init__(self, base, directions):
        base = np.asarray(base, dtype=float)
        directions = np.atleast_2d(np.asarray(directions, dtype=float))
        q, _ = np.linalg.qr(directions.T)
        super().__init__(ambient_dim=len(base), intrinsic_dim=directions.shape[0])
        self.base = base
        self.directions = q.T

    def coordinate(self, points):
        points = as_points(points, self.ambient_dim)
        coords = np.sum((points - self.base)[..., None, :] * self.directions, axis=-1)
        if self.intrinsic_dim == 1:
            return coords[..., 0]
        return coords

    def projection(self, theta):
        theta = as_points(theta, self.ambient_dim)
        coords = np.sum((theta - self.base)[..., None, :] * self.directions, axis=-1)
        return self.base + np.sum(coords[..., :, None] * self.directions, axis=-2)

    def distance(self, theta):
        theta = as_points(theta, self.ambient_dim)
        normal = theta - self.projection(theta)
        return np.sqrt(np.sum(normal * normal, axis=-1))

    def sample(self, rng, count):
        coords = rng.uniform(-2, 2, size=(count, self.intrinsic_dim))
        return self.base + coords @ self.directions


@dataclass(frozen=True)
class HessianSpectrum:
    """The m - n positive eigenvalues of D^2 f on the normal space at a point of N."""
    eigenvalues: Tuple[float, ...]
    base_point: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        values = tuple(float(v) for v in self.eigenvalues)
        if len(values) == 0:
            raise LandscapeError('a Hessian spectrum needs at least one eigenvalue')
        if not all(math.isfinite(v) and v > 0 for v in values):
            raise LandscapeError('Hessian spectrum must be strictly positive; got {0}'.format(values))
        object.__setattr__(self, 'eigenvalues', values)
        if self.base_point is not None:
            object.__setattr__(self, 'base_point', tuple(float(v) for v in self.base_point))

    @property
    def codim(self):
        return len(self.eigenvalues)

    def as_array(self):
        return np.array(self.eigenvalues)

    def scaled(self, mu):
        return HessianSpectrum(tuple(mu * v for v in self.eigenvalues), self.base_point)


@dataclass(frozen=True)
class LandscapeFactor:
    """One factor of a product landscape: f = prod_i g_i(x_i) over orthogonal blocks."""
    dim: int
    geometry: Geometry
    function: object

    def values(self, coords):
        return self.function(np.asarray(coords, dtype=float))


class Landscape(abc.ABC):
    """
    Analytic objective f on R^m with exact derivatives.

    ``value``, ``gradient`` and ``hessian`` are vectorized: theta of shape
    (..., m) gives values (...), gradients (..., m) and Hessians (..., m, m).
    Instances are immutable after construction and safe to share between
    workers.
    """
    name = None

    def __init__(self, dim, minimizer_set, growth_exponent, infimum,
                 growth_constant, growth_radius, params=None):
        self.dim = int(dim)
        self.minimizer_set = minimizer_set
        self.growth_exponent = growth_exponent
        self.infimum = float(infimum)
        self.growth_constant = growth_constant
        self.growth_radius = growth_radius
        self.params = dict(params or {})

    def __repr__(self):
        return '{0}(dim={1}, params={2})'.format(type(self).__name__, self.dim, self.params)

    @property
    def overparametrized(self):
        return self.infimum == 0

    @property
    def is_radial(self):
        return False

    @abc.abstractmethod
    def value(self, theta):
        pass

    @abc.abstractmethod
    def gradient(self, theta):
        pass

    @abc.abstractmethod
    def hessian(self, theta):
        pass

    def value_and_gradient(self, theta):
        return self.value(theta), self.gradient(theta)

    def evaluate(self, theta):
        return self.value(theta), self.gradient(theta), self.hessian(theta)

    def radial(self, r):
        """(f(r), f'(r)) along a ray; only for radially symmetric landscapes."""
        raise LandscapeError('{0} is not radially symmetric'.format(self.name))

    def profile(self, coords, geometry):
        """
        (f, f') on a 1D reduction: the real line for dim == 1 landscapes or
        the radius for radial ones.
        """
        coords = np.asarray(coords, dtype=float)
        if geometry == Geometry.line:
            if self.dim != 1:
                raise LandscapeError('line geometry needs a one-dimensional landscape; {0} has dim {1}'.format(
                    self.name, self.dim))
            f, g = self.value_and_gradient(coords[..., None])
            return f, g[..., 0]
        if geometry == Geometry.radial:
            return self.radial(coords)
        raise LandscapeError('no 1D profile for geometry {0}'.format(geometry))

    def factors(self):
        """Product factorization, or None when f does not factorize."""
        return None

    def growth_coordinate(self, theta):
        """The coordinate in which f >= c1 * coordinate**gamma is declared."""
        theta = as_points(theta, self.dim)
        return np.sqrt(np.sum(theta * theta, axis=-1))

    def singular_distance(self, theta):
        """Distance to the set where f fails to be twice differentiable."""
        theta = as_points(theta, self.dim)
        return np.full(theta.shape[:-1], np.inf)

    def to_dict(self):
        return {'name': self.name, 'params': dict(self.params)}
