import logging
import math

import numpy as np

from sgdlab.invariant.density import DensityError
from sgdlab.invariant.exponents import classify_integrability
from sgdlab.utils.histogram import ManifoldHistogram, circle_edges
from sgdlab.utils.sgdlab_enums import DensityModel, IntegrabilityClass, MinimizerSetKind

logger = logging.getLogger(__name__)

_FLOOR = 1e-6


def _check_tube(landscape, model, tube_radius, bins):
    minimizers = landscape.minimizer_set
    if minimizers is None or minimizers.kind != MinimizerSetKind.circle_in_plane or landscape.dim != 3:
        msg = 'tube marginals need a circle of minimizers in R^3; got {0} in dim {1}'.format(
            landscape.name, landscape.dim)
        logger.error(msg)
        raise DensityError(msg)
    if not 0 < tube_radius < 1:
        msg = 'tube radius must lie in (0, 1), below the reach of the unit circle; got {0}'.format(tube_radius)
        logger.error(msg)
        raise DensityError(msg)
    if bins < 1:
        raise DensityError('bins must be a positive integer; got {0}'.format(bins))
    if model.model == DensityModel.power and landscape.overparametrized:
        verdict = classify_integrability(model.alpha, landscape.dim, 1, landscape.growth_exponent)
        if verdict != IntegrabilityClass.integrable:
            msg = 'alpha = {0} lies outside the admissible interval ({1}, {2})'.format(
                model.alpha, -0.5 * (landscape.dim - 1), -landscape.dim / landscape.growth_exponent)
            logger.error(msg)
            raise DensityError(msg)


def tube_marginal(landscape, model, tube_radius, bins, n_phi=4, n_r=64, n_psi=64):
    """
    Marginal of an invariant density along a circle of minimizers.

    The tube of radius ``tube_radius`` around the unit circle of the
    (theta_1, theta_2) plane is parametrized by the circle angle phi and
    polar coordinates (r, psi) in the normal disc,

        theta = (1 + a) (cos phi, sin phi, 0) + (0, 0, c),  (a, c) = r (cos psi, sin psi),

    with volume element (1 + a) r dr dpsi dphi. The mass of each angular
    bin is the integral of the density over its slice of the tube.

    Parameters
    ----------
    landscape: Landscape
        three-dimensional with a circle_in_plane minimizer set
    model: InvariantModel
        power models on overparametrized landscapes need alpha in the
        admissible interval
    tube_radius: float
    bins: int
        bin b is centered at 2*pi*b/bins
    n_phi: int
        Gauss-Legendre nodes in phi per bin
    n_r: int
        Gauss-Legendre nodes in the graded radial variable
    n_psi: int
        trapezoid nodes on the normal circle

    Returns
    -------
    ManifoldHistogram
    """
    _check_tube(landscape, model, tube_radius, bins)
    delta = float(tube_radius)
    singular = model.model == DensityModel.power and landscape.overparametrized
    if singular:
        # r = delta * t**p maps the r^(2 alpha + 1) singularity to a smooth integrand in t
        p = 1.0 / (2 * model.alpha + 2)
    else:
        p = 0.5

    t_nodes, t_weights = np.polynomial.legendre.leggauss(n_r)
    t = 0.5 * (t_nodes + 1)
    log_wt = np.log(0.5 * t_weights * delta * delta * p) + (2 * p - 1) * np.log(t)
    log_r = math.log(delta) + p * np.log(t)
    # below the floor f is extended by its quadratic vanishing; (1 + a)^2 - 1 loses precision there
    log_floor = math.log(_FLOOR * delta) if singular else -math.inf
    log_r_eval = np.maximum(log_r, log_floor)
    r = np.exp(log_r)
    r_eval = np.exp(log_r_eval)
    psi = 2 * math.pi * np.arange(n_psi) / n_psi
    a = r[:, None] * np.cos(psi)
    a_eval = r_eval[:, None] * np.cos(psi)
    c_eval = r_eval[:, None] * np.sin(psi)
    rho = 1 + a[None, :, :]
    rho_eval = 1 + a_eval[None, :, :]
    phi_nodes, phi_weights = np.polynomial.legendre.leggauss(n_phi)
    edges = circle_edges(bins)

    log_mass = np.empty(bins)
    for b in range(bins):
        half = 0.5 * (edges[b + 1] - edges[b])
        phi = 0.5 * (edges[b] + edges[b + 1]) + half * phi_nodes
        theta = np.stack([rho_eval * np.cos(phi)[:, None, None],
                          rho_eval * np.sin(phi)[:, None, None],
                          np.broadcast_to(c_eval, (n_phi,) + c_eval.shape)], axis=-1)
        f = landscape.value(theta)
        if singular:
            with np.errstate(divide='ignore'):
                log_dens = model.alpha * (np.log(f) + 2 * (log_r - log_r_eval)[None, :, None])
        else:
            log_dens = model.log_evaluate(f)
        log_terms = (log_dens + np.log(rho) + log_wt[None, :, None]
                     + np.log(half * phi_weights)[:, None, None])
        top = np.max(log_terms)
        if not np.isfinite(top):
            msg = 'density is not finite on the tube slice of bin {0}'.format(b)
            logger.error(msg)
            raise DensityError(msg)
        log_mass[b] = top + math.log(np.sum(np.exp(log_terms - top)))

    log_mass += math.log(2 * math.pi / n_psi)
    weights = np.exp(log_mass - np.max(log_mass))
    logger.debug('tube marginal of {0}: delta={1:.3g}, min/max bin ratio {2:.6g}'.format(
        landscape.name, delta, float(weights.min())))
    return ManifoldHistogram(edges=edges, weights=weights / weights.sum(), periodic=True)


def richardson_marginal(landscape, model, tube_radius, bins, **kwargs):
    """
    Tube marginal extrapolated to vanishing tube radius from the radii
    delta and delta/2 (first-order error in delta).
    """
    coarse = tube_marginal(landscape, model, tube_radius, bins, **kwargs)
    fine = tube_marginal(landscape, model, 0.5 * tube_radius, bins, **kwargs)
    weights = np.clip(2 * fine.weights - coarse.weights, 0.0, None)
    if weights.sum() <= 0:
        raise DensityError('Richardson extrapolation removed all mass; use a smaller tube radius')
    return ManifoldHistogram(edges=fine.edges, weights=weights / weights.sum(), periodic=True)
