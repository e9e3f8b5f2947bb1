import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from sgdlab.utils.errors import SgdLabError
from sgdlab.utils.sgdlab_enums import NoiseKind

logger = logging.getLogger(__name__)


class SimulationError(SgdLabError, ValueError):
    pass


class EnsembleDivergedError(SimulationError):
    def __init__(self, msg, diverged_count):
        super().__init__(msg)
        self.diverged_count = diverged_count


def _noise_kind(kind):
    if isinstance(kind, str):
        try:
            return NoiseKind[kind]
        except KeyError:
            msg = 'unknown noise kind {0!r}; known: {1}'.format(kind, ', '.join(k.name for k in NoiseKind))
            logger.error(msg)
            raise SimulationError(msg)
    return NoiseKind(kind)


@dataclass(frozen=True)
class NoiseModel:
    """
    Diffusion of dθ = -∇f dt + s(θ) dB.

    The amplitude is s = 0 (none), sqrt(eta) (homogeneous) or
    sqrt(eta * sigma * max(f, 0)) (ml_isotropic). The forward equation of
    this SDE carries the diffusion coefficient s^2 / 2, so the stationary
    laws are exp(-2 f / eta) and f^(-(1 + eta*sigma/2) / (eta*sigma/2)).
    Use :meth:`for_generator` to build the model whose forward equation has
    diffusion eta (resp. eta * sigma * f).
    """
    kind: NoiseKind
    eta: float = 0.0
    sigma: Optional[float] = None

    def __post_init__(self):
        kind = _noise_kind(self.kind)
        object.__setattr__(self, 'kind', kind)
        if kind == NoiseKind.none:
            return
        if not (isinstance(self.eta, (int, float)) and math.isfinite(self.eta) and self.eta > 0):
            msg = 'eta must be positive for {0} noise; got {1}'.format(kind.name, self.eta)
            logger.error(msg)
            raise SimulationError(msg)
        if kind == NoiseKind.ml_isotropic:
            if self.sigma is None or not math.isfinite(self.sigma) or self.sigma <= 0:
                msg = 'sigma must be positive for ml_isotropic noise; got {0}'.format(self.sigma)
                logger.error(msg)
                raise SimulationError(msg)

    @classmethod
    def none(cls):
        return cls(NoiseKind.none)

    @classmethod
    def homogeneous(cls, eta):
        return cls(NoiseKind.homogeneous, eta=eta)

    @classmethod
    def ml_isotropic(cls, eta, sigma):
        return cls(NoiseKind.ml_isotropic, eta=eta, sigma=sigma)

    @classmethod
    def for_generator(cls, kind, eta=0.0, sigma=None):
        """
        The model whose forward equation is
        ∂ρ = Δ(η ρ) + div(ρ∇f) (homogeneous) or ∂ρ = Δ(ησ f ρ) + div(ρ∇f)
        (ml_isotropic), i.e. the literal amplitude uses 2 * eta.
        """
        kind = _noise_kind(kind)
        if kind == NoiseKind.none:
            return cls.none()
        return cls(kind, eta=2.0 * eta, sigma=sigma)

    @property
    def eta_sigma(self):
        if self.kind != NoiseKind.ml_isotropic:
            return None
        return self.eta * self.sigma

    @property
    def effective_eta(self):
        """eta of the forward equation; its Boltzmann law is exp(-f / effective_eta)."""
        if self.kind == NoiseKind.none:
            return 0.0
        return 0.5 * self.eta

    @property
    def effective_eta_sigma(self):
        """eta*sigma of the forward equation; the power-law exponent is -(1 + ν)/ν for this ν."""
        if self.kind != NoiseKind.ml_isotropic:
            return None
        return 0.5 * self.eta * self.sigma

    def amplitude(self, f):
        f = np.asarray(f, dtype=float)
        if self.kind == NoiseKind.none:
            return np.zeros(f.shape)
        if self.kind == NoiseKind.homogeneous:
            return np.full(f.shape, math.sqrt(self.eta))
        return np.sqrt(self.eta * self.sigma * np.maximum(f, 0.0))

    def intensity(self, f):
        """||η Σ(θ)||: η for homogeneous noise, ησ f for ML noise."""
        f = np.asarray(f, dtype=float)
        if self.kind == NoiseKind.none:
            return np.zeros(f.shape)
        if self.kind == NoiseKind.homogeneous:
            return np.full(f.shape, self.eta)
        return self.eta * self.sigma * np.maximum(f, 0.0)

    def to_dict(self):
        return {'kind': self.kind.name, 'eta': self.eta, 'sigma': self.sigma}


def em_step(theta, landscape, noise, h, xi):
    """
    One Euler-Maruyama step θ - h ∇f(θ) + sqrt(h) s(θ) ξ.

    Vectorized over leading axes of theta and xi. Non-finite results are
    returned as is; the ensemble driver treats them as divergence.
    """
    theta = np.asarray(theta, dtype=float)
    if noise.kind == NoiseKind.none:
        return theta - h * landscape.gradient(theta)
    f, grad = landscape.value_and_gradient(theta)
    amp = noise.amplitude(f)
    return theta - h * grad + (math.sqrt(h) * amp)[..., None] * np.asarray(xi, dtype=float)
