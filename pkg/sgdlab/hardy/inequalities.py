import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from sgdlab.fokker_planck.grids import FpeGrid
from sgdlab.hardy.constants import HardyError
from sgdlab.hardy.trial_functions import RADIUS
from sgdlab.invariant.density import sphere_area
from sgdlab.utils.sgdlab_enums import Geometry

logger = logging.getLogger(__name__)

TAIL_TOL = 1e-8
_INNER_SPAN = 200.0
_TAIL_SPAN = 150.0
_MAX_LOG_RADIUS = 340.0


@dataclass(frozen=True)
class HardyRatio:
    lhs: float
    rhs: float
    ratio: float


def hardy_1d_ratio(u, beta, m):
    """
    Both sides of the logarithmic Hardy inequality

        int u^2 |x|^(-m) |log|x||^beta dx
            <= 4/(1 + beta)^2 int |grad u|^2 |x|^(2-m) |log|x||^(2+beta) dx

    for a radial test function supported on one side of the unit sphere,
    integrated in t = log r.

    Parameters
    ----------
    u: TestFunction
    beta: float
        beta < -1
    m: int

    Returns
    -------
    HardyRatio
        ratio = lhs / rhs (0 when both sides vanish); at most 1 up to quadrature error
    """
    beta = float(beta)
    if not beta < -1:
        raise HardyError('the Hardy inequality needs beta < -1; got {0}'.format(beta))
    lo, hi = u.log_support()
    if lo < 0 < hi:
        msg = 'support [{0:.6g}, {1:.6g}] of u straddles r = 1; the inequality needs one side'.format(*u.support)
        logger.error(msg)
        raise HardyError(msg)
    omega = sphere_area(int(m))

    if u.coordinate == RADIUS:
        def values(t):
            r = math.exp(t)
            val, der = u(np.array([r]))
            return float(val[0]), float(der[0]) * r
    else:
        def values(t):
            val, der = u(np.array([t]))
            return float(val[0]), float(der[0])

    def lhs_fn(t):
        val, _ = values(t)
        return val * val * abs(t) ** beta

    def rhs_fn(t):
        _, der = values(t)
        return der * der * abs(t) ** (2 + beta)

    if u.coordinate == RADIUS:
        lo = max(lo, math.log(max(u.support[0], 1e-300)))
    kw = dict(epsabs=0.0, epsrel=1e-10, limit=500)
    lhs = omega * integrate.quad(lhs_fn, lo, hi, **kw)[0]
    rhs = omega * 4.0 / (1 + beta) ** 2 * integrate.quad(rhs_fn, lo, hi, **kw)[0]
    if lhs == 0 and rhs == 0:
        return HardyRatio(0.0, 0.0, 0.0)
    if rhs == 0:
        raise HardyError('gradient side vanishes for a nonzero test function')
    return HardyRatio(lhs, rhs, lhs / rhs)


def _check_radial(grid):
    if not isinstance(grid, FpeGrid) or grid.geometry != Geometry.radial:
        raise HardyError('weighted Poincaré quotients need a radial grid')


def radial_nodes(grid, order=6, inner_span=_INNER_SPAN):
    """
    Quadrature in t = log r over the grid: ``order`` Gauss-Legendre nodes per
    cell, and panels at most 2 wide over [log r_1 - inner_span, log r_1] for the cell
    touching the origin. Returns (t, weights) for integrals in dt.
    """
    _check_radial(grid)
    x, w = np.polynomial.legendre.leggauss(order)
    log_edges = np.log(grid.edges[1:])
    first = np.linspace(log_edges[0] - inner_span, log_edges[0], int(math.ceil(inner_span / 2.0)) + 1)
    panels = np.concatenate([first, log_edges[1:]])
    a = panels[:-1, None]
    b = panels[1:, None]
    t = 0.5 * (a + b) + 0.5 * (b - a) * x
    wt = 0.5 * (b - a) * w
    return t.ravel(), wt.ravel()


def _log_weight(landscape, t, exponent, m):
    """log(f(e^t)^exponent * e^(m t)): the radial measure f^exponent r^(m-1) dr in dt."""
    f, _ = landscape.radial(np.exp(t))
    f = np.asarray(f, dtype=float)
    if np.any(~(f > 0)) or np.any(~np.isfinite(f)):
        msg = 'f must be positive and finite at the quadrature nodes of {0}'.format(landscape.name)
        logger.error(msg)
        raise HardyError(msg)
    return exponent * np.log(f) + m * t


def measure_tail_fraction(landscape, eta_sigma, grid, inner_span=_INNER_SPAN):
    """Fraction of mu = f^(-1 - 1/eta_sigma) r^(m-1) dr outside the quadrature range of the grid."""
    m = grid.dim
    expo = -1.0 - 1.0 / eta_sigma
    t, wt = radial_nodes(grid, inner_span=inner_span)
    logw = _log_weight(landscape, t, expo, m)
    shift = float(np.max(logw))
    inside = float(np.sum(wt * np.exp(logw - shift)))

    def fn(s):
        return float(np.exp(_log_weight(landscape, np.array([s]), expo, m)[0] - shift))

    lo = math.log(grid.edges[1]) - inner_span
    hi = math.log(grid.edges[-1])
    inner = integrate.quad(fn, max(lo - _TAIL_SPAN, -_MAX_LOG_RADIUS), lo, limit=200)[0]
    outer = integrate.quad(fn, hi, min(hi + _TAIL_SPAN, _MAX_LOG_RADIUS), limit=200)[0]
    return (inner + outer) / (inside + inner + outer)


def rayleigh_quotient(u, landscape, eta_sigma, grid, check_tail=True):
    """
    Weighted Poincaré quotient of a radial test function:

        int |u'|^2 f^(-1/es) r^(m-1) dr / int |u - <u>|^2 f^(-1-1/es) r^(m-1) dr

    with es = eta_sigma, m the grid dimension and <u> the mean under the
    second measure. Integrals use :func:`radial_nodes` on the grid, so
    graded grids resolve singular weights at the origin.
    """
    _check_radial(grid)
    if not eta_sigma > 0:
        raise HardyError('eta_sigma must be positive; got {0}'.format(eta_sigma))
    if not landscape.is_radial or landscape.dim != grid.dim:
        raise HardyError('{0} is not a radial landscape in dimension {1}'.format(landscape.name, grid.dim))
    if check_tail:
        tail = measure_tail_fraction(landscape, eta_sigma, grid)
        if tail > TAIL_TOL:
            msg = 'the grid misses a fraction {0:.3e} of the measure; enlarge r_max'.format(tail)
            logger.error(msg)
            raise HardyError(msg)
    m = grid.dim
    t, wt = radial_nodes(grid)
    p = 1.0 / eta_sigma
    log_num = _log_weight(landscape, t, -p, m)
    log_den = _log_weight(landscape, t, -1.0 - p, m)
    shift = float(np.max(log_den))
    w_num = wt * np.exp(log_num - shift)
    w_den = wt * np.exp(log_den - shift)
    val, der = u.radial(np.exp(t))
    mean = float(np.sum(w_den * val) / np.sum(w_den))
    num = float(np.sum(w_num * der * der))
    den = float(np.sum(w_den * (val - mean) ** 2))
    second = float(np.sum(w_den * val * val))
    if den <= 1e-14 * second:
        msg = 'denominator {0:.3e} vanishes: the test function is constant under the measure'.format(den)
        logger.error(msg)
        raise HardyError(msg)
    return num / den
