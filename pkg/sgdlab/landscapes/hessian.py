import logging

import numpy as np

from sgdlab.landscapes.base import HessianSpectrum, LandscapeError, RankMismatchError

logger = logging.getLogger(__name__)


def _spectrum_from_hessian(hess, intrinsic_dim, rank_tol_rel, point):
    if not np.all(np.isfinite(hess)):
        msg = 'Hessian is not finite at {0}; the landscape is not twice differentiable there'.format(point.tolist())
        logger.error(msg)
        raise LandscapeError(msg)
    eig = np.linalg.eigvalsh(0.5 * (hess + hess.T))
    largest = float(np.max(np.abs(eig)))
    if largest == 0:
        msg = 'Hessian vanishes at {0}; expected {1} positive normal eigenvalues'.format(
            point.tolist(), len(eig) - intrinsic_dim)
        logger.error(msg)
        raise RankMismatchError(msg)
    rank_tol = rank_tol_rel * largest
    if np.any(eig < -rank_tol):
        msg = 'Hessian at {0} has negative eigenvalue {1:.3e}; the point is not a minimizer'.format(
            point.tolist(), float(eig.min()))
        logger.error(msg)
        raise LandscapeError(msg)
    near_zero = int(np.sum(eig <= rank_tol))
    if near_zero != intrinsic_dim:
        msg = ('rank mismatch at {0}: {1} near-zero Hessian eigenvalues but the minimizer set has '
               'dimension {2} (eigenvalues {3})').format(point.tolist(), near_zero, intrinsic_dim, eig.tolist())
        logger.error(msg)
        raise RankMismatchError(msg)
    return HessianSpectrum(eigenvalues=tuple(eig[eig > rank_tol]), base_point=tuple(point))


def reduced_hessian_spectrum(landscape, p, tol_on_manifold=1e-8, rank_tol_rel=1e-8):
    """
    The positive eigenvalues of D^2 f at a point of the minimizer set.

    Parameters
    ----------
    landscape: Landscape
    p: array_like
        a point of the minimizer set N
    tol_on_manifold: float
        largest admissible distance from p to N
    rank_tol_rel: float
        eigenvalues at most rank_tol_rel times the largest one count as zero;
        exactly dim(N) of them must

    Returns
    -------
    HessianSpectrum
        the m - n normal eigenvalues in ascending order
    """
    return reduced_hessian_spectra(landscape, np.asarray(p, dtype=float)[None, :],
                                   tol_on_manifold=tol_on_manifold, rank_tol_rel=rank_tol_rel)[0]


def reduced_hessian_spectra(landscape, points, tol_on_manifold=1e-8, rank_tol_rel=1e-8):
    """Batched :func:`reduced_hessian_spectrum` over points of shape (N, m)."""
    minimizers = landscape.minimizer_set
    if minimizers is None:
        raise LandscapeError('{0} has no minimizer set'.format(landscape.name))
    points = np.atleast_2d(np.asarray(points, dtype=float))
    dist = minimizers.distance(points)
    off = np.flatnonzero(dist > tol_on_manifold)
    if len(off):
        msg = 'point {0} is at distance {1:.3e} from the minimizer set (tolerance {2:.1e})'.format(
            points[off[0]].tolist(), float(dist[off[0]]), tol_on_manifold)
        logger.error(msg)
        raise LandscapeError(msg)
    hessians = landscape.hessian(points)
    return [_spectrum_from_hessian(h, minimizers.intrinsic_dim, rank_tol_rel, p)
            for h, p in zip(hessians, points)]
