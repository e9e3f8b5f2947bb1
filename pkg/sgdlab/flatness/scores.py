import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pyomo.common.config import (
    ConfigDict,
    ConfigValue,
    PositiveInt,
    NonNegativeInt,
    InEnum,
)
from scipy import integrate

from sgdlab.flatness.agm import FlatnessError
from sgdlab.landscapes.base import HessianSpectrum
from sgdlab.utils.rng import stream
from sgdlab.utils.sgdlab_enums import FlatnessModel, SphereScheme, IntegrandForm

logger = logging.getLogger(__name__)

_MC_CHUNK = 100000
_MAX_GRID_CODIM = 5


class SphereQuadrature(ConfigDict):
    def __init__(
        self,
        description=None,
        doc=None,
        implicit=False,
        implicit_domain=None,
        visibility=0,
    ):
        super(SphereQuadrature, self).__init__(
            description=description,
            doc=doc,
            implicit=implicit,
            implicit_domain=implicit_domain,
            visibility=visibility,
        )

        self.declare('scheme', ConfigValue(domain=InEnum(SphereScheme),
                                           doc='tensor_grid (deterministic) or monte_carlo'))
        self.declare('nodes', ConfigValue(domain=PositiveInt,
                                          doc='Gauss-Legendre nodes per angle of the tensor grid'))
        self.declare('samples', ConfigValue(domain=PositiveInt, doc='Monte Carlo sample count'))
        self.declare('seed', ConfigValue(domain=NonNegativeInt, doc='seed of the Monte Carlo stream'))
        self.declare('form', ConfigValue(domain=InEnum(IntegrandForm),
                                         doc='spectral_norm |H nu|^(-k/2) or quadratic_form (nu^T H nu)^(-k/2)'))

        self.scheme = SphereScheme.tensor_grid
        self.nodes = 32
        self.samples = 100000
        self.seed = 0
        self.form = IntegrandForm.spectral_norm


@dataclass(frozen=True)
class FlatnessScore:
    value: float
    model: FlatnessModel
    codim: int
    error: float = 0.0
    scheme: Optional[SphereScheme] = None
    form: Optional[IntegrandForm] = None

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value > 0):
            raise FlatnessError('flatness score must be positive and finite; got {0}'.format(self.value))


def _eigenvalues(spectrum):
    if isinstance(spectrum, HessianSpectrum):
        lam = spectrum.as_array()
    else:
        lam = np.atleast_1d(np.asarray(spectrum, dtype=float))
    if lam.ndim != 1 or len(lam) == 0:
        msg = 'a flatness score needs a nonempty spectrum; got shape {0}'.format(lam.shape)
        logger.error(msg)
        raise FlatnessError(msg)
    if not np.all(np.isfinite(lam) & (lam > 0)):
        msg = 'flatness scores need a strictly positive spectrum; got {0}'.format(lam.tolist())
        logger.error(msg)
        raise FlatnessError(msg)
    return lam


def g1(spectrum):
    """det(H)^(-1/2) over the normal eigenvalues."""
    lam = _eigenvalues(spectrum)
    value = math.exp(-0.5 * float(np.sum(np.log(lam))))
    return FlatnessScore(value=value, model=FlatnessModel.hom, codim=len(lam))


def _integrand(nu, lam, form):
    k = len(lam)
    if form == IntegrandForm.spectral_norm:
        return np.sum((nu * lam) ** 2, axis=-1) ** (-0.25 * k)
    return np.sum(nu * nu * lam, axis=-1) ** (-0.5 * k)


def _circle_average(lam, form):
    # the integrand depends on nu_i^2 only, so a quarter circle suffices
    def fn(psi):
        nu = np.array([math.cos(psi), math.sin(psi)])
        return float(_integrand(nu, lam, form))

    val, err = integrate.quad(fn, 0.0, 0.5 * math.pi, epsabs=0.0, epsrel=1e-12, limit=500)
    return val / (0.5 * math.pi), err / (0.5 * math.pi)


def _orthant_grid_average(lam, form, nodes):
    """Gauss-Legendre tensor grid over the hyperspherical angles of the positive orthant."""
    k = len(lam)
    x, w = np.polynomial.legendre.leggauss(nodes)
    ang = 0.25 * math.pi * (x + 1)
    wang = 0.25 * math.pi * w
    grids = np.meshgrid(*([ang] * (k - 2)), indexing='ij')
    wgrids = np.meshgrid(*([wang] * (k - 2)), indexing='ij')
    inner = [g.ravel() for g in grids]
    weight = np.prod([g.ravel() for g in wgrids], axis=0)
    # measure sin^(k-2)(phi_1) sin^(k-3)(phi_2) ... sin(phi_(k-2)); phi_1 is looped over below
    for j, g in enumerate(inner, start=1):
        weight = weight * np.sin(g) ** (k - 2 - j)

    total = 0.0
    norm = 0.0
    for a0, w0 in zip(ang, wang):
        nu = np.empty((len(weight), k))
        s = np.full(len(weight), 1.0)
        phis = [np.full(len(weight), a0)] + inner
        for i, phi in enumerate(phis):
            nu[:, i] = s * np.cos(phi)
            s = s * np.sin(phi)
        nu[:, k - 1] = s
        wt = w0 * math.sin(a0) ** (k - 2) * weight
        total += float(np.sum(wt * _integrand(nu, lam, form)))
        norm += float(np.sum(wt))
    return total / norm


def _monte_carlo_average(lam, form, samples, seed):
    rng = stream(seed, 0)
    k = len(lam)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        n = min(_MC_CHUNK, samples - done)
        nu = rng.standard_normal((n, k))
        nu /= np.linalg.norm(nu, axis=1)[:, None]
        vals = _integrand(nu, lam, form)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals * vals))
        done += n
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return mean, math.sqrt(var / max(samples - 1, 1))


def sphere_average(spectrum, quad=None):
    """
    Average over the unit sphere of the normal space of the g2 integrand,
    with an error estimate (standard error for Monte Carlo, refinement
    difference for the tensor grid).
    """
    if quad is None:
        quad = SphereQuadrature()
    lam = _eigenvalues(spectrum)
    k = len(lam)
    form = IntegrandForm(quad.form)
    if np.all(lam == lam[0]):
        return float(lam[0] ** (-0.5 * k)), 0.0
    if k == 1:
        return float(lam[0] ** -0.5), 0.0
    if quad.scheme == SphereScheme.monte_carlo:
        return _monte_carlo_average(lam, form, quad.samples, quad.seed)
    if k == 2:
        return _circle_average(lam, form)
    if k > _MAX_GRID_CODIM:
        msg = 'the tensor grid covers codimension up to {0}; got {1} (use monte_carlo)'.format(_MAX_GRID_CODIM, k)
        logger.error(msg)
        raise FlatnessError(msg)
    fine = _orthant_grid_average(lam, form, quad.nodes)
    coarse = _orthant_grid_average(lam, form, max(quad.nodes // 2, 2))
    return fine, abs(fine - coarse)


def g2(spectrum, quad=None):
    """
    Sphere-average flatness score.

    With the default spectral_norm form the integrand is |H nu|^(-k/2), so
    in codimension two g2 = 1/agm(lambda_1, lambda_2); the quadratic_form
    integrand (nu^T H nu)^(-k/2) averages to det(H)^(-1/2). Both are
    normalized to g2(1, ..., 1) = 1 and are homogeneous of degree -k/2.

    Parameters
    ----------
    spectrum: HessianSpectrum or array_like
        the k = m - n positive normal eigenvalues
    quad: SphereQuadrature

    Returns
    -------
    FlatnessScore
    """
    if quad is None:
        quad = SphereQuadrature()
    value, error = sphere_average(spectrum, quad)
    return FlatnessScore(value=value, model=FlatnessModel.ml, codim=len(_eigenvalues(spectrum)), error=error,
                         scheme=SphereScheme(quad.scheme), form=IntegrandForm(quad.form))


def flatness_score(spectrum, model, quad=None):
    model = FlatnessModel(model)
    if model == FlatnessModel.hom:
        return g1(spectrum)
    return g2(spectrum, quad)
