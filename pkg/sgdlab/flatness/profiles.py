import logging

import numpy as np

from sgdlab.flatness.agm import FlatnessError
from sgdlab.flatness.scores import SphereQuadrature, flatness_score
from sgdlab.landscapes.hessian import reduced_hessian_spectra
from sgdlab.utils.histogram import ManifoldHistogram, circle_edges
from sgdlab.utils.sgdlab_enums import FlatnessModel, MinimizerSetKind

logger = logging.getLogger(__name__)


def profile_scores(landscape, model, bins, quad=None):
    """Flatness scores at the bin centers 2*pi*b/bins of a circle of minimizers."""
    minimizers = landscape.minimizer_set
    if minimizers is None or minimizers.kind != MinimizerSetKind.circle_in_plane:
        msg = 'flat density profiles need a circle of minimizers; {0} has {1}'.format(
            landscape.name, None if minimizers is None else minimizers.kind.name)
        logger.error(msg)
        raise FlatnessError(msg)
    if quad is None:
        quad = SphereQuadrature()
    edges = circle_edges(bins)
    centers = 0.5 * (edges[:-1] + edges[1:])
    spectra = reduced_hessian_spectra(landscape, minimizers.point_at(centers))
    scores = [flatness_score(spec, model, quad) for spec in spectra]
    return edges, scores


def flat_density_profile(landscape, model, bins, quad=None):
    """
    The flat-minimum selection density along a circle of minimizers.

    Bin mass is proportional to the score at the bin center times the arc
    length: g1 = det^(-1/2) for homogeneous noise (``hom``) and the sphere
    average g2 for ML noise (``ml``).

    Parameters
    ----------
    landscape: Landscape
        with a circle_in_plane minimizer set
    model: FlatnessModel
    bins: int
    quad: SphereQuadrature
        only used for ``ml``

    Returns
    -------
    ManifoldHistogram
    """
    model = FlatnessModel(model)
    edges, scores = profile_scores(landscape, model, bins, quad)
    values = np.array([s.value for s in scores])
    errors = np.array([s.error for s in scores])
    if np.any(errors > 1e-3 * values):
        logger.warning('sphere quadrature error up to {0:.2e} relative; consider more nodes'.format(
            float(np.max(errors / values))))
    logger.debug('{0} profile of {1}: max/min score {2:.6g}'.format(
        model.name, landscape.name, float(values.max() / values.min())))
    return ManifoldHistogram.from_scores(edges, values, periodic=True)
