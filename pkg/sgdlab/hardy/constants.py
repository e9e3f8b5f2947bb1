import logging
import math

from sgdlab.utils.errors import SgdLabError

logger = logging.getLogger(__name__)


class HardyError(SgdLabError, ValueError):
    pass


def reference_constant(alpha, m):
    """
    The Poincaré-Hardy constant C(alpha, m) for the weights (1 + |x|^2)^alpha.

    The value is the spectral gap of u -> (1 + |x|^2)^(1 - alpha)
    div((1 + |x|^2)^alpha grad u) on R^m:

    * 2|alpha| for alpha < -m,
    * 2 (2|alpha| - m) for -m <= alpha < -(m + 2)/2,
    * (m - 2 + 2 alpha)^2 / 4 for -(m + 2)/2 < alpha < -(m - 2)/2.

    The first two branches meet at alpha = -m with the value 2m. The seam
    alpha = -(m + 2)/2 is excluded.
    """
    alpha = float(alpha)
    m = int(m)
    if m < 1 or not math.isfinite(alpha):
        raise HardyError('need a finite alpha and m >= 1; got alpha={0}, m={1}'.format(alpha, m))
    if alpha < -m:
        return 2 * abs(alpha)
    if alpha == -(m + 2) / 2:
        msg = 'C(alpha, m) is not defined at the seam alpha = -(m + 2)/2 = {0}'.format(alpha)
        logger.error(msg)
        raise HardyError(msg)
    if alpha < -(m + 2) / 2:
        return 2 * (2 * abs(alpha) - m)
    if alpha < -(m - 2) / 2:
        return 0.25 * (m - 2 + 2 * alpha) ** 2
    msg = 'C(alpha, m) needs alpha < -(m - 2)/2 = {0}; got {1}'.format(-(m - 2) / 2, alpha)
    logger.error(msg)
    raise HardyError(msg)


def decay_rate_bound(eta_sigma, m, lam, Lam):
    """
    Lower bound eta_sigma * C(-1/eta_sigma, m) * lam^(1 + 1/eta_sigma) / Lam^(1/eta_sigma)
    on the decay rate of the forward equation for lam (1 + |x|^2) <= f <= Lam (1 + |x|^2).
    """
    if not (eta_sigma > 0 and 0 < lam <= Lam):
        raise HardyError('need eta_sigma > 0 and 0 < lam <= Lam; got {0}, {1}, {2}'.format(eta_sigma, lam, Lam))
    p = 1.0 / eta_sigma
    return eta_sigma * reference_constant(-p, m) * lam ** (1 + p) / Lam ** p


def predicted_decay_rate(gap, eta_sigma):
    """Rate of ||u - <u>|| implied by a spectral gap of the weighted operator."""
    return eta_sigma * gap
