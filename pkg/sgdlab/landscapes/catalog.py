"""
The catalog of analytic test landscapes.

Every entry is addressable by name and a JSON parameter object through
:func:`construct_landscape`, which is how experiment configs refer to them.
"""
import logging
import math

import numpy as np

from sgdlab.landscapes.base import (
    Landscape,
    LandscapeError,
    LandscapeFactor,
    PointSet,
    CircleInPlane,
    AffineSubspace,
    as_points,
)
from sgdlab.utils.sgdlab_enums import Geometry

logger = logging.getLogger(__name__)

_POSITIVITY_GRID = 4096


def _positive(name, value):
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        msg = '{0} must be strictly positive; got {1}'.format(name, value)
        logger.error(msg)
        raise LandscapeError(msg)
    return value


def _check_keys(name, params, allowed):
    unknown = set(params) - set(allowed)
    if unknown:
        msg = 'unknown parameters for {0}: {1}; allowed: {2}'.format(name, sorted(unknown), sorted(allowed))
        logger.error(msg)
        raise LandscapeError(msg)


def _sq_norm(theta):
    return np.sum(theta * theta, axis=-1)


def _outer(a, b):
    return a[..., :, None] * b[..., None, :]


class TrigSeries:
    """
    A positive function on the circle given by a finite Fourier series

        a0 + sum_k a_k cos(k phi) + b_k sin(k phi),

    together with its smooth extension to the (theta_1, theta_2) plane. The
    extension evaluates the harmonic continuation of the series at the radius
    2 rho / (1 + rho^2) <= 1, so it is smooth everywhere, agrees with the
    series on the unit circle and never drops below the series' minimum.
    """
    def __init__(self, const, cos=(), sin=()):
        self.const = float(const)
        self.cos = tuple(float(v) for v in cos)
        self.sin = tuple(float(v) for v in sin)
        order = max(len(self.cos), len(self.sin))
        a = np.zeros(order)
        b = np.zeros(order)
        a[:len(self.cos)] = self.cos
        b[:len(self.sin)] = self.sin
        self.coefficients = a - 1j * b

        grid = np.linspace(0, 2 * math.pi, _POSITIVITY_GRID, endpoint=False)
        self.minimum = float(np.min(self.on_circle(grid)))
        self.maximum = float(np.max(self.on_circle(grid)))
        if self.minimum <= 0:
            msg = 'prescribed eigenvalue function {0} is not strictly positive (min {1:.3e})'.format(
                self.to_spec(), self.minimum)
            logger.error(msg)
            raise LandscapeError(msg)

    @classmethod
    def from_spec(cls, spec):
        if isinstance(spec, TrigSeries):
            return spec
        if isinstance(spec, (int, float)):
            return cls(const=spec)
        if isinstance(spec, dict):
            _check_keys('eigenvalue function', spec, ('const', 'cos', 'sin'))
            return cls(const=spec.get('const', 0.0), cos=spec.get('cos', ()), sin=spec.get('sin', ()))
        msg = 'cannot build an eigenvalue function from {0!r}'.format(spec)
        logger.error(msg)
        raise LandscapeError(msg)

    def to_spec(self):
        if not self.cos and not self.sin:
            return self.const
        return {'const': self.const, 'cos': list(self.cos), 'sin': list(self.sin)}

    @property
    def is_constant(self):
        return not np.any(self.coefficients)

    def on_circle(self, phi):
        phi = np.asarray(phi, dtype=float)
        res = np.full(phi.shape, self.const)
        for k, c in enumerate(self.coefficients, start=1):
            res = res + np.real(c * np.exp(1j * k * phi))
        return res

    def extension(self, x, y, order=2):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        val = np.full(x.shape, self.const)
        grad = np.zeros(x.shape + (2,))
        hess = np.zeros(x.shape + (2, 2))
        if self.is_constant:
            return val, grad, hess

        t = 2.0 / (1.0 + x * x + y * y)
        z = x + 1j * y
        v = np.stack([x, y], axis=-1)
        vv = _outer(v, v)
        eye = np.eye(2)
        for k, c in enumerate(self.coefficients, start=1):
            if c == 0:
                continue
            tk = t ** k
            p = np.real(c * z ** k)
            val = val + tk * p
            if order < 1:
                continue
            d1 = c * k * (z ** (k - 1) if k > 1 else np.ones_like(z))
            dp = np.stack([d1.real, -d1.imag], axis=-1)
            dt = (-k * t ** (k + 1))[..., None] * v
            grad = grad + p[..., None] * dt + tk[..., None] * dp
            if order < 2:
                continue
            hp = np.zeros(x.shape + (2, 2))
            if k > 1:
                d2 = c * k * (k - 1) * (z ** (k - 2) if k > 2 else np.ones_like(z))
                hp[..., 0, 0] = d2.real
                hp[..., 1, 1] = -d2.real
                hp[..., 0, 1] = -d2.imag
                hp[..., 1, 0] = -d2.imag
            ht = (k * (k + 1) * t ** (k + 2))[..., None, None] * vv - (k * t ** (k + 1))[..., None, None] * eye
            hess = (hess + p[..., None, None] * ht + _outer(dt, dp) + _outer(dp, dt)
                    + tk[..., None, None] * hp)
        return val, grad, hess


class RadialPower(Landscape):
    """f = lam * |theta|^k with the single minimizer 0."""
    name = 'radial_power'

    def __init__(self, lam=1.0, k=2.0, dim=2):
        lam = _positive('lam', lam)
        k = _positive('k', k)
        dim = int(dim)
        if dim < 1:
            raise LandscapeError('dim must be a positive integer; got {0}'.format(dim))
        super().__init__(dim=dim, minimizer_set=PointSet(np.zeros((1, dim))), growth_exponent=k,
                         infimum=0.0, growth_constant=lam, growth_radius=1.0,
                         params={'lam': lam, 'k': k, 'dim': dim})
        self.lam = lam
        self.k = k

    @property
    def is_radial(self):
        return True

    def radial(self, r):
        r = np.asarray(r, dtype=float)
        return self.lam * r ** self.k, self.lam * self.k * r ** (self.k - 1)

    def value(self, theta):
        theta = as_points(theta, self.dim)
        return self.lam * _sq_norm(theta) ** (0.5 * self.k)

    def gradient(self, theta):
        theta = as_points(theta, self.dim)
        r2 = _sq_norm(theta)
        with np.errstate(divide='ignore', invalid='ignore'):
            coef = np.where(r2 > 0, self.lam * self.k * r2 ** (0.5 * self.k - 1), 0.0)
        return coef[..., None] * theta

    def hessian(self, theta):
        theta = as_points(theta, self.dim)
        r2 = _sq_norm(theta)
        eye = np.eye(self.dim)
        safe = np.where(r2 > 0, r2, 1.0)
        coef = self.lam * self.k * safe ** (0.5 * self.k - 1)
        hess = coef[..., None, None] * (eye + (self.k - 2) * _outer(theta, theta) / safe[..., None, None])
        if self.k == 2:
            at_zero = 2 * self.lam * eye
        elif self.k > 2:
            at_zero = np.zeros((self.dim, self.dim))
        else:
            at_zero = np.full((self.dim, self.dim), np.inf)
        return np.where((r2 > 0)[..., None, None], hess, at_zero)

    def singular_distance(self, theta):
        theta = as_points(theta, self.dim)
        if self.k >= 2:
            return np.full(theta.shape[:-1], np.inf)
        return np.sqrt(_sq_norm(theta))


class QuadraticWindow(Landscape):
    """f = lam * (1 + |theta|^2): the model case of the convergence window."""
    name = 'quadratic_window'

    def __init__(self, lam=1.0, dim=2):
        lam = _positive('lam', lam)
        dim = int(dim)
        if dim < 1:
            raise LandscapeError('dim must be a positive integer; got {0}'.format(dim))
        super().__init__(dim=dim, minimizer_set=PointSet(np.zeros((1, dim))), growth_exponent=2.0,
                         infimum=lam, growth_constant=lam, growth_radius=1.0,
                         params={'lam': lam, 'dim': dim})
        self.lam = lam

    @property
    def is_radial(self):
        return True

    def radial(self, r):
        r = np.asarray(r, dtype=float)
        return self.lam * (1 + r * r), 2 * self.lam * r

    def value(self, theta):
        theta = as_points(theta, self.dim)
        return self.lam * (1 + _sq_norm(theta))

    def gradient(self, theta):
        theta = as_points(theta, self.dim)
        return 2 * self.lam * theta

    def hessian(self, theta):
        theta = as_points(theta, self.dim)
        return np.broadcast_to(2 * self.lam * np.eye(self.dim), theta.shape[:-1] + (self.dim, self.dim)).copy()


class ProductNoncompact(Landscape):
    """
    f = s (1 + s) (1 + theta_4^2) with s = theta_1^2 + theta_2^2 + theta_3^2.

    The minimizers form the theta_4 axis, which is not compact. The growth
    bound f >= dist(theta, N)^4 holds in the distance to that axis.
    """
    name = 'product_noncompact'

    def __init__(self):
        axis = AffineSubspace(base=np.zeros(4), directions=[[0.0, 0.0, 0.0, 1.0]])
        super().__init__(dim=4, minimizer_set=axis, growth_exponent=4.0, infimum=0.0,
                         growth_constant=1.0, growth_radius=1.0, params={})

    def value(self, theta):
        theta = as_points(theta, 4)
        s = _sq_norm(theta[..., :3])
        return s * (1 + s) * (1 + theta[..., 3] ** 2)

    def gradient(self, theta):
        theta = as_points(theta, 4)
        s = _sq_norm(theta[..., :3])
        t2 = 1 + theta[..., 3] ** 2
        grad = np.empty_like(theta)
        grad[..., :3] = (2 * (1 + 2 * s) * t2)[..., None] * theta[..., :3]
        grad[..., 3] = 2 * theta[..., 3] * s * (1 + s)
        return grad

    def hessian(self, theta):
        theta = as_points(theta, 4)
        x = theta[..., :3]
        t = theta[..., 3]
        s = _sq_norm(x)
        t2 = 1 + t ** 2
        hess = np.zeros(theta.shape + (4,))
        hess[..., :3, :3] = ((2 * (1 + 2 * s))[..., None, None] * np.eye(3) + 8 * _outer(x, x)) * t2[..., None, None]
        cross = (4 * t * (1 + 2 * s))[..., None] * x
        hess[..., :3, 3] = cross
        hess[..., 3, :3] = cross
        hess[..., 3, 3] = 2 * s * (1 + s)
        return hess

    def growth_coordinate(self, theta):
        return self.minimizer_set.distance(theta)

    def factors(self):
        return (LandscapeFactor(dim=3, geometry=Geometry.radial, function=lambda r: r * r * (1 + r * r)),
                LandscapeFactor(dim=1, geometry=Geometry.line, function=lambda t: 1 + t * t))


class CircleLandscape(Landscape):
    """
    Minimizers on the unit circle of the (theta_1, theta_2) plane of R^m.

    With u = (|x|^2 - 1)/2 for x = (theta_1, theta_2), z = (theta_3, ...,
    theta_m) and w = (1 + |theta|^2)/2,

        f = 1/2 * w * (L_1 u^2 + sum_j L_{j+1} z_j^2)

    where the L_i are the smooth extensions of prescribed positive eigenvalue
    functions of the circle angle. On the circle w = 1 and the normal
    Hessian is diag(L_1(phi), ..., L_{m-1}(phi)); the factor w gives quartic
    growth.
    """

    def __init__(self, dim, eigenvalues):
        dim = int(dim)
        if dim < 3:
            raise LandscapeError('a circle landscape needs dim >= 3; got {0}'.format(dim))
        series = [TrigSeries.from_spec(spec) for spec in eigenvalues]
        if len(series) != dim - 1:
            msg = 'a circle landscape in R^{0} needs {1} eigenvalue functions; got {2}'.format(
                dim, dim - 1, len(series))
            logger.error(msg)
            raise LandscapeError(msg)
        lam_min = min(s.minimum for s in series)
        super().__init__(dim=dim, minimizer_set=CircleInPlane(dim), growth_exponent=4.0, infimum=0.0,
                         growth_constant=lam_min / 64, growth_radius=2.0,
                         params={'dim': dim, 'eigenvalues': [s.to_spec() for s in series]})
        self.series = series

    @property
    def name(self):
        return 'circle_codim2' if self.dim == 3 else 'circle_codimK'

    def normal_eigenvalues(self, phi):
        """Prescribed normal eigenvalues at angle phi, shape (..., m - 1), unsorted."""
        return np.stack([s.on_circle(phi) for s in self.series], axis=-1)

    def _parts(self, theta, order):
        theta = as_points(theta, self.dim)
        x = theta[..., 0]
        y = theta[..., 1]
        z = theta[..., 2:]
        lams = [s.extension(x, y, order=order) for s in self.series]
        u = 0.5 * (x * x + y * y - 1)
        w = 0.5 * (1 + _sq_norm(theta))
        z2 = z * z
        q = lams[0][0] * u * u
        for j, lam in enumerate(lams[1:]):
            q = q + lam[0] * z2[..., j]
        f = 0.5 * w * q
        if order == 0:
            return f, None, None

        v = theta[..., :2]
        gq = np.empty_like(theta)
        gxy = lams[0][1] * (u * u)[..., None] + (2 * lams[0][0] * u)[..., None] * v
        for j, lam in enumerate(lams[1:]):
            gxy = gxy + lam[1] * z2[..., j, None]
            gq[..., 2 + j] = 2 * lam[0] * z[..., j]
        gq[..., :2] = gxy
        grad = 0.5 * (q[..., None] * theta + w[..., None] * gq)
        if order == 1:
            return f, grad, None

        hq = np.zeros(theta.shape + (self.dim,))
        lam1, dlam1, hlam1 = lams[0]
        hxy = (hlam1 * (u * u)[..., None, None]
               + (2 * u)[..., None, None] * (_outer(dlam1, v) + _outer(v, dlam1))
               + (2 * lam1)[..., None, None] * (_outer(v, v) + u[..., None, None] * np.eye(2)))
        for j, lam in enumerate(lams[1:]):
            hxy = hxy + lam[2] * z2[..., j, None, None]
            cross = (2 * z[..., j])[..., None] * lam[1]
            hq[..., :2, 2 + j] = cross
            hq[..., 2 + j, :2] = cross
            hq[..., 2 + j, 2 + j] = 2 * lam[0]
        hq[..., :2, :2] = hxy
        hess = 0.5 * (q[..., None, None] * np.eye(self.dim) + _outer(theta, gq) + _outer(gq, theta)
                      + w[..., None, None] * hq)
        return f, grad, hess

    def value(self, theta):
        return self._parts(theta, 0)[0]

    def gradient(self, theta):
        return self._parts(theta, 1)[1]

    def value_and_gradient(self, theta):
        f, g, _ = self._parts(theta, 1)
        return f, g

    def hessian(self, theta):
        return self._parts(theta, 2)[2]

    def evaluate(self, theta):
        return self._parts(theta, 2)


class ShiftedLandscape(Landscape):
    """
    f = eps + q with inf q = 0: an underparametrized landscape.

    ``base`` is either ``"quadratic"`` (q = 1/2 sum a_i theta_i^2 + c/4 |theta|^4,
    a single minimizer) or ``"ring"`` (q a circle landscape, so the level set
    {f = eps} is the unit circle).
    """
    name = 'shifted_underparam'

    def __init__(self, eps=0.1, base='quadratic', a=None, c=1.0, dim=None, eigenvalues=None):
        eps = _positive('eps', eps)
        self.eps = eps
        self.base_kind = base
        if base == 'quadratic':
            if a is None:
                a = [1.0] * (1 if dim is None else int(dim))
            a = np.array([_positive('a_i', v) for v in a])
            c = float(c)
            if c < 0:
                raise LandscapeError('quartic coefficient c must be nonnegative; got {0}'.format(c))
            if dim is not None and int(dim) != len(a):
                raise LandscapeError('dim {0} does not match {1} quadratic coefficients'.format(dim, len(a)))
            self.a = a
            self.c = c
            self.base = None
            super().__init__(dim=len(a), minimizer_set=PointSet(np.zeros((1, len(a)))), growth_exponent=2.0,
                             infimum=eps, growth_constant=0.5 * float(a.min()), growth_radius=1.0,
                             params={'eps': eps, 'base': base, 'a': a.tolist(), 'c': c})
        elif base == 'ring':
            dim = 3 if dim is None else int(dim)
            if eigenvalues is None:
                eigenvalues = [1.0] * (dim - 1)
            ring = CircleLandscape(dim=dim, eigenvalues=eigenvalues)
            self.base = ring
            super().__init__(dim=dim, minimizer_set=ring.minimizer_set, growth_exponent=ring.growth_exponent,
                             infimum=eps, growth_constant=ring.growth_constant, growth_radius=ring.growth_radius,
                             params={'eps': eps, 'base': base, 'dim': dim,
                                     'eigenvalues': ring.params['eigenvalues']})
        else:
            msg = 'unknown base {0!r} for shifted_underparam; use "quadratic" or "ring"'.format(base)
            logger.error(msg)
            raise LandscapeError(msg)

    @property
    def is_radial(self):
        return self.base is None and bool(np.all(self.a == self.a[0]))

    def radial(self, r):
        if not self.is_radial:
            return super().radial(r)
        r = np.asarray(r, dtype=float)
        a = self.a[0]
        return self.eps + 0.5 * a * r ** 2 + 0.25 * self.c * r ** 4, a * r + self.c * r ** 3

    def value(self, theta):
        if self.base is not None:
            return self.eps + self.base.value(theta)
        theta = as_points(theta, self.dim)
        r2 = _sq_norm(theta)
        return self.eps + 0.5 * np.sum(self.a * theta * theta, axis=-1) + 0.25 * self.c * r2 * r2

    def gradient(self, theta):
        if self.base is not None:
            return self.base.gradient(theta)
        theta = as_points(theta, self.dim)
        r2 = _sq_norm(theta)
        return self.a * theta + (self.c * r2)[..., None] * theta

    def value_and_gradient(self, theta):
        if self.base is not None:
            f, g = self.base.value_and_gradient(theta)
            return self.eps + f, g
        return self.value(theta), self.gradient(theta)

    def hessian(self, theta):
        if self.base is not None:
            return self.base.hessian(theta)
        theta = as_points(theta, self.dim)
        r2 = _sq_norm(theta)
        return (np.diag(self.a) + (self.c * r2)[..., None, None] * np.eye(self.dim)
                + 2 * self.c * _outer(theta, theta))


class LogCorrected(Landscape):
    """
    f = d^2 (1 + |log d|)^2 with d the distance to a finite point set.

    f is C^1 but not C^2: the Hessian blows up at the points, jumps where
    d = 1 and is undefined on the bisectors between points.
    """
    name = 'log_corrected'

    def __init__(self, points=None):
        if points is None:
            points = [[0.0, 0.0]]
        pset = PointSet(points)
        radius = max(2 * float(np.max(np.sqrt(_sq_norm(pset.points)))), 1.0)
        super().__init__(dim=pset.ambient_dim, minimizer_set=pset, growth_exponent=2.0, infimum=0.0,
                         growth_constant=0.25, growth_radius=radius,
                         params={'points': pset.points.tolist()})

    @property
    def is_radial(self):
        pts = self.minimizer_set.points
        return len(pts) == 1 and not np.any(pts)

    @staticmethod
    def _profile(d, order):
        """g(d) and its first two derivatives, with g = d^2 (1 + |log d|)^2."""
        safe = np.where(d > 0, d, 1.0)
        log_d = np.log(safe)
        a = 1 + np.abs(log_d)
        s = np.sign(log_d)
        g = np.where(d > 0, (safe * a) ** 2, 0.0)
        if order == 0:
            return g, None, None
        g1 = np.where(d > 0, 2 * safe * a * (a + s), 0.0)
        if order == 1:
            return g, g1, None
        g2 = np.where(d > 0, 2 * a * a + 6 * a * s + 2 * s * s, np.inf)
        g1_over_d = np.where(d > 0, 2 * a * (a + s), np.inf)
        return g, g1, (g2, g1_over_d)

    def radial(self, r):
        if not self.is_radial:
            return super().radial(r)
        g, g1, _ = self._profile(np.asarray(r, dtype=float), 1)
        return g, g1

    def _geometry(self, theta):
        theta = as_points(theta, self.dim)
        nearest = self.minimizer_set.nearest(theta)
        offset = theta - self.minimizer_set.points[nearest]
        d = np.sqrt(_sq_norm(offset))
        safe = np.where(d > 0, d, 1.0)
        unit = np.where((d > 0)[..., None], offset / safe[..., None], 0.0)
        return d, unit

    def value(self, theta):
        theta = as_points(theta, self.dim)
        return self._profile(self.minimizer_set.distance(theta), 0)[0]

    def gradient(self, theta):
        d, unit = self._geometry(theta)
        g1 = self._profile(d, 1)[1]
        return g1[..., None] * unit

    def hessian(self, theta):
        d, unit = self._geometry(theta)
        _, _, (g2, g1_over_d) = self._profile(d, 2)
        nn = _outer(unit, unit)
        eye = np.eye(self.dim)
        with np.errstate(invalid='ignore'):
            hess = g2[..., None, None] * nn + g1_over_d[..., None, None] * (eye - nn)
        return np.where((d > 0)[..., None, None], hess, np.inf)

    def singular_distance(self, theta):
        """Distance to the points, to the unit spheres around them and to the bisectors."""
        theta = as_points(theta, self.dim)
        pts = self.minimizer_set.points
        diff = theta[..., None, :] - pts
        dists = np.sqrt(np.sum(diff * diff, axis=-1))
        order = np.argsort(dists, axis=-1)
        d1 = np.take_along_axis(dists, order[..., :1], axis=-1)[..., 0]
        res = np.minimum(d1, np.abs(d1 - 1))
        if len(pts) > 1:
            nearest = order[..., 0]
            p = pts[nearest]
            for q_idx in range(len(pts)):
                q = pts[q_idx]
                sep = np.sqrt(_sq_norm(q - p))
                dq = dists[..., q_idx]
                with np.errstate(divide='ignore', invalid='ignore'):
                    bisector = np.where(sep > 0, (dq * dq - d1 * d1) / (2 * np.where(sep > 0, sep, 1.0)), np.inf)
                res = np.minimum(res, bisector)
        return res


class ConstantLandscape(Landscape):
    """f == value. Not part of the catalog; used to check the operators on trivial inputs."""
    name = 'constant'

    def __init__(self, value=1.0, dim=1):
        value = _positive('value', value)
        super().__init__(dim=dim, minimizer_set=None, growth_exponent=0.0, infimum=value,
                         growth_constant=None, growth_radius=None, params={'value': value, 'dim': dim})
        self.constant = value

    @property
    def is_radial(self):
        return True

    def radial(self, r):
        r = np.asarray(r, dtype=float)
        return np.full(r.shape, self.constant), np.zeros(r.shape)

    def value(self, theta):
        theta = as_points(theta, self.dim)
        return np.full(theta.shape[:-1], self.constant)

    def gradient(self, theta):
        theta = as_points(theta, self.dim)
        return np.zeros_like(theta)

    def hessian(self, theta):
        theta = as_points(theta, self.dim)
        return np.zeros(theta.shape + (self.dim,))


def _circle_codim2(eigenvalues=None, dim=3):
    if int(dim) != 3:
        msg = 'circle_codim2 lives in R^3; got dim={0} (use circle_codimK)'.format(dim)
        logger.error(msg)
        raise LandscapeError(msg)
    if eigenvalues is None:
        eigenvalues = [1.0, {'const': 2.0, 'cos': [1.0]}]
    return CircleLandscape(dim=3, eigenvalues=eigenvalues)


def _circle_codimK(dim=6, eigenvalues=None):
    dim = int(dim)
    if dim < 4:
        msg = 'circle_codimK needs codimension m - 1 >= 3, so dim >= 4; got dim={0}'.format(dim)
        logger.error(msg)
        raise LandscapeError(msg)
    if eigenvalues is None:
        eigenvalues = [1.0, {'const': 2.0, 'cos': [1.0]}] + [1.0] * (dim - 3)
    return CircleLandscape(dim=dim, eigenvalues=eigenvalues)


_CATALOG = {
    'radial_power': (RadialPower, ('lam', 'k', 'dim')),
    'quadratic_window': (QuadraticWindow, ('lam', 'dim')),
    'product_noncompact': (ProductNoncompact, ()),
    'circle_codim2': (_circle_codim2, ('eigenvalues', 'dim')),
    'circle_codimK': (_circle_codimK, ('dim', 'eigenvalues')),
    'shifted_underparam': (ShiftedLandscape, ('eps', 'base', 'a', 'c', 'dim', 'eigenvalues')),
    'log_corrected': (LogCorrected, ('points',)),
}


def catalog_names():
    return tuple(_CATALOG)


def construct_landscape(name, params=None):
    """
    Build a catalog landscape.

    Parameters
    ----------
    name: str
        one of :func:`catalog_names`
    params: dict
        keyword parameters of the entry; omitted keys take the entry's defaults

    Returns
    -------
    Landscape
    """
    if name not in _CATALOG:
        msg = 'unknown landscape {0!r}; known: {1}'.format(name, ', '.join(_CATALOG))
        logger.error(msg)
        raise LandscapeError(msg)
    params = dict(params or {})
    factory, allowed = _CATALOG[name]
    _check_keys(name, params, allowed)
    landscape = factory(**params)
    logger.debug('constructed {0}'.format(landscape))
    return landscape
