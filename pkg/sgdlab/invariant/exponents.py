import logging
import math
import numbers
from dataclasses import dataclass
from typing import Optional

from sgdlab.invariant.density import DensityError
from sgdlab.utils.sgdlab_enums import IntegrabilityClass

logger = logging.getLogger(__name__)


def _check_dims(m, n, gamma):
    if not (isinstance(m, numbers.Integral) and isinstance(n, numbers.Integral)) or n < 0 or n >= m:
        msg = 'need integers 0 <= n < m; got m={0}, n={1}'.format(m, n)
        logger.error(msg)
        raise DensityError(msg)
    if not gamma > 0:
        msg = 'growth exponent must be positive; got {0}'.format(gamma)
        logger.error(msg)
        raise DensityError(msg)


def alpha_from_eta_sigma(eta_sigma):
    """Exponent -(1 + ησ)/(ησ) of the stationary power law."""
    if not eta_sigma > 0:
        raise DensityError('eta*sigma must be positive; got {0}'.format(eta_sigma))
    return -(1.0 + eta_sigma) / eta_sigma


def eta_sigma_from_alpha(alpha):
    if not alpha < -1:
        raise DensityError('only alpha < -1 comes from a noise level; got {0}'.format(alpha))
    return -1.0 / (1.0 + alpha)


@dataclass(frozen=True)
class NoiseExponents:
    alpha: float
    alpha_critical: float
    alpha_tail: float
    threshold_eta_sigma: Optional[float]
    interval_nonempty: bool

    @property
    def threshold_reachable(self):
        return self.threshold_eta_sigma is not None

    @property
    def in_interval(self):
        return self.alpha_critical < self.alpha < self.alpha_tail


def noise_exponents(eta, sigma, m, n, gamma):
    """
    Exponents of the power-law candidate f^alpha for ML noise η·σ·f on an
    m-dimensional landscape whose minimizers form an n-dimensional set and
    which grows like |θ|^gamma.

    ``threshold_eta_sigma`` is the noise level at which alpha reaches the
    critical exponent -(m - n)/2, or None when alpha < -1 <= alpha_critical
    for every noise level (codimension at most two).
    """
    _check_dims(m, n, gamma)
    if not (eta > 0 and sigma > 0):
        msg = 'eta and sigma must be positive; got eta={0}, sigma={1}'.format(eta, sigma)
        logger.error(msg)
        raise DensityError(msg)
    codim = m - n
    threshold = 2.0 / (codim - 2) if codim > 2 else None
    return NoiseExponents(alpha=alpha_from_eta_sigma(eta * sigma),
                          alpha_critical=-0.5 * codim,
                          alpha_tail=-m / gamma,
                          threshold_eta_sigma=threshold,
                          interval_nonempty=gamma > 2.0 * m / codim)


def classify_integrability(alpha, m, n, gamma):
    """
    Integrability of f^alpha for f vanishing quadratically on an
    n-dimensional set in R^m and growing like |θ|^gamma. Boundary exponents
    carry a logarithmic divergence and count as divergent.
    """
    _check_dims(m, n, gamma)
    if not math.isfinite(alpha):
        raise DensityError('alpha must be finite; got {0}'.format(alpha))
    if alpha <= -0.5 * (m - n):
        return IntegrabilityClass.not_locally_integrable
    if alpha < -m / gamma:
        return IntegrabilityClass.integrable
    return IntegrabilityClass.locally_not_globally
