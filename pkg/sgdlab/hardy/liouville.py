import logging

import numpy as np

from sgdlab.hardy.constants import HardyError

logger = logging.getLogger(__name__)


def liouville_exponent(k, m, gamma_tilde):
    """beta = k * gamma_tilde + 2 - m: r^beta solves Delta u = gamma_tilde grad(log r^k) . grad u."""
    return k * gamma_tilde + 2 - m


def _fd_derivatives(fn, r, h):
    up = fn(r + h)
    mid = fn(r)
    down = fn(r - h)
    return (up - down) / (2 * h), (up - 2 * mid + down) / (h * h)


def liouville_residual(k, m, gamma_tilde, samples, beta=None, step=1e-3):
    """
    max over the sample radii of |Delta u - gamma_tilde grad(log f) . grad u|
    for u = r^beta and f = r^k, with radial derivatives from central
    differences (step ``step * r``) and one Richardson extrapolation.

    The residual vanishes for beta = 0 and for beta = :func:`liouville_exponent`.
    """
    if not (k > 0 and gamma_tilde > 0) or int(m) < 1:
        raise HardyError('need k > 0, gamma_tilde > 0 and m >= 1')
    r = np.asarray(samples, dtype=float)
    if r.size == 0 or np.any(~(r > 0)):
        msg = 'sample radii must be positive'
        logger.error(msg)
        raise HardyError(msg)
    if beta is None:
        beta = liouville_exponent(k, m, gamma_tilde)
    beta = float(beta)

    def u(x):
        return x ** beta

    def residual(h):
        du, d2u = _fd_derivatives(u, r, h)
        laplacian = d2u + (m - 1) / r * du
        drift = gamma_tilde * k / r * du
        return laplacian - drift

    h = step * r
    coarse = residual(h)
    fine = residual(0.5 * h)
    return float(np.max(np.abs((4 * fine - coarse) / 3)))
