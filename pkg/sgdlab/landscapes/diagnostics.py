import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from sgdlab.landscapes.base import LandscapeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DerivativeReport:
    """
    Per-point relative errors |fd - exact| / (1 + |exact|) (max norms) of the
    analytic gradient and Hessian against central differences.

    Points within ``singular_margin`` of the landscape's singular set are
    flagged as a near-singular region; for them the errors of a Richardson
    refinement (steps h and h/2) are reported as well.
    """
    h: float
    points: np.ndarray
    gradient_errors: np.ndarray
    hessian_errors: np.ndarray
    flagged: np.ndarray
    refined_gradient_errors: np.ndarray
    refined_hessian_errors: np.ndarray

    @property
    def flagged_count(self):
        return int(np.sum(self.flagged))

    def _max(self, errors, include_flagged):
        errors = errors if include_flagged else errors[~self.flagged]
        return float(np.max(errors)) if len(errors) else 0.0

    def max_gradient_error(self, include_flagged=False):
        return self._max(self.gradient_errors, include_flagged)

    def max_hessian_error(self, include_flagged=False):
        return self._max(self.hessian_errors, include_flagged)

    def labels(self):
        return ['near-singular region' if f else 'regular' for f in self.flagged]

    def rows(self):
        return [(i, float(g), float(hh), int(fl), float(rg), float(rh))
                for i, (g, hh, fl, rg, rh) in enumerate(zip(self.gradient_errors, self.hessian_errors, self.flagged,
                                                            self.refined_gradient_errors,
                                                            self.refined_hessian_errors))]


def _relative_error(approx, exact, axes):
    with np.errstate(invalid='ignore'):
        diff = np.max(np.abs(approx - exact), axis=axes)
        scale = 1 + np.max(np.abs(exact), axis=axes)
        res = diff / scale
    return np.where(np.isfinite(res), res, np.inf)


def _central_differences(landscape, points, h):
    m = points.shape[-1]
    shift = h * np.eye(m)
    plus = points[:, None, :] + shift
    minus = points[:, None, :] - shift
    fp, gp = landscape.value_and_gradient(plus)
    fm, gm = landscape.value_and_gradient(minus)
    fd_grad = (fp - fm) / (2 * h)
    fd_hess = (gp - gm) / (2 * h)
    fd_hess = 0.5 * (fd_hess + np.swapaxes(fd_hess, -1, -2))
    return fd_grad, fd_hess


def check_derivatives(landscape, samples, h=1e-4, singular_margin=1e-2):
    """
    Compare the analytic gradient and Hessian with central differences.

    The gradient is differenced from values and the Hessian from gradients,
    so both errors are O(h^2) on smooth regions.

    Parameters
    ----------
    landscape: Landscape
    samples: array_like
        points of shape (N, m)
    h: float
        difference step
    singular_margin: float
        points closer than this to the landscape's singular set are flagged

    Returns
    -------
    DerivativeReport
    """
    if h <= 0:
        raise LandscapeError('difference step must be positive; got {0}'.format(h))
    points = np.atleast_2d(np.asarray(samples, dtype=float))
    if not np.all(np.isfinite(points)):
        raise LandscapeError('derivative check samples must be finite')

    grad = landscape.gradient(points)
    hess = landscape.hessian(points)
    fd_grad, fd_hess = _central_differences(landscape, points, h)
    grad_err = _relative_error(fd_grad, grad, -1)
    hess_err = _relative_error(fd_hess, hess, (-2, -1))

    flagged = landscape.singular_distance(points) < singular_margin
    refined_grad = grad_err.copy()
    refined_hess = hess_err.copy()
    if np.any(flagged):
        sub = points[flagged]
        half_grad, half_hess = _central_differences(landscape, sub, 0.5 * h)
        rich_grad = (4 * half_grad - fd_grad[flagged]) / 3
        rich_hess = (4 * half_hess - fd_hess[flagged]) / 3
        refined_grad[flagged] = _relative_error(rich_grad, grad[flagged], -1)
        refined_hess[flagged] = _relative_error(rich_hess, hess[flagged], (-2, -1))
        logger.info('{0}: {1} of {2} derivative samples in a near-singular region'.format(
            landscape.name, int(flagged.sum()), len(points)))

    return DerivativeReport(h=h, points=points, gradient_errors=grad_err, hessian_errors=hess_err,
                            flagged=flagged, refined_gradient_errors=refined_grad,
                            refined_hessian_errors=refined_hess)


def growth_ratios(landscape, samples):
    """
    f / (c1 * coordinate^gamma) on the samples whose growth coordinate is at
    least R; the declared growth bound holds iff all ratios are >= 1.
    """
    points = np.atleast_2d(np.asarray(samples, dtype=float))
    coord = landscape.growth_coordinate(points)
    far = coord >= landscape.growth_radius
    f = landscape.value(points[far])
    return f / (landscape.growth_constant * coord[far] ** landscape.growth_exponent)


@dataclass(frozen=True)
class WindowBounds:
    """Sampled bounds lower * (1 + |theta|^2) <= f <= upper * (1 + |theta|^2)."""
    lower: float
    upper: float
    dim: int
    eta_sigma: Optional[float] = None

    @property
    def eta_sigma_limit(self):
        """Largest admissible eta*sigma for the convergence window (None when unbounded)."""
        if self.dim <= 2:
            return None
        return 2.0 / (self.dim - 2)

    @property
    def admissible(self):
        if self.lower <= 0 or not np.isfinite(self.upper):
            return False
        limit = self.eta_sigma_limit
        if self.eta_sigma is None or limit is None:
            return True
        return self.eta_sigma < limit


def quadratic_window_bounds(landscape, samples, eta_sigma=None):
    """
    Estimate the constants of the quadratic growth window of the
    convergence result from sampled points, and check ησ < 2/(m-2).
    """
    points = np.atleast_2d(np.asarray(samples, dtype=float))
    ratio = landscape.value(points) / (1 + np.sum(points * points, axis=-1))
    bounds = WindowBounds(lower=float(ratio.min()), upper=float(ratio.max()), dim=landscape.dim,
                          eta_sigma=eta_sigma)
    logger.debug('{0}: window bounds lambda={1:.6g}, Lambda={2:.6g}'.format(landscape.name, bounds.lower,
                                                                            bounds.upper))
    return bounds
