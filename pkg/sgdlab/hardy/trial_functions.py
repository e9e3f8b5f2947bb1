import logging
import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from sgdlab.hardy.constants import HardyError

logger = logging.getLogger(__name__)

RADIUS = 'radius'
LOG_RADIUS = 'log_radius'


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1. Returns (value, derivative)."""
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x < 1)
    xs = np.where(inside, x, 0.5)
    with np.errstate(over='ignore', under='ignore'):
        a = np.exp(-1.0 / xs)
        b = np.exp(-1.0 / (1.0 - xs))
    s = a + b
    val = np.where(inside, a / s, np.where(x >= 1, 1.0, 0.0))
    der = np.where(inside, a * b * (1.0 / xs ** 2 + 1.0 / (1.0 - xs) ** 2) / (s * s), 0.0)
    return val, der


def _unit_bump(x):
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1
    q = np.where(inside, 1.0 - x * x, 1.0)
    with np.errstate(under='ignore'):
        val = np.where(inside, np.exp(-1.0 / q), 0.0)
    der = np.where(inside, val * (-2.0 * x / (q * q)), 0.0)
    return val, der


@dataclass(frozen=True)
class TestFunction:
    """
    A compactly supported smooth function of the radius (``coordinate ==
    'radius'``) or of t = log(radius) (``'log_radius'``). ``fn`` maps an
    array of coordinates to (values, derivatives in that coordinate).
    """
    __test__ = False

    fn: Callable
    support: Tuple[float, float]
    coordinate: str = RADIUS

    def __post_init__(self):
        lo, hi = float(self.support[0]), float(self.support[1])
        if not lo < hi:
            raise HardyError('empty support [{0}, {1}]'.format(lo, hi))
        if self.coordinate not in (RADIUS, LOG_RADIUS):
            raise HardyError('coordinate must be {0!r} or {1!r}; got {2!r}'.format(RADIUS, LOG_RADIUS, self.coordinate))
        if self.coordinate == RADIUS and lo < 0:
            raise HardyError('radial support must be nonnegative; got [{0}, {1}]'.format(lo, hi))
        object.__setattr__(self, 'support', (lo, hi))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        val, der = self.fn(x)
        val = np.broadcast_to(np.asarray(val, dtype=float), x.shape)
        der = np.broadcast_to(np.asarray(der, dtype=float), x.shape)
        inside = (x >= self.support[0]) & (x <= self.support[1])
        return np.where(inside, val, 0.0), np.where(inside, der, 0.0)

    def radial(self, r):
        """(u, du/dr) at radii r; only for radius-coordinate functions."""
        if self.coordinate != RADIUS:
            raise HardyError('this test function is defined in log(radius)')
        return self(r)

    def log_support(self):
        if self.coordinate == LOG_RADIUS:
            return self.support
        lo, hi = self.support
        return (math.log(lo) if lo > 0 else -math.inf, math.log(hi))

    @classmethod
    def bump(cls, center, width, scale=1.0, coordinate=RADIUS):
        center, width, scale = float(center), float(width), float(scale)
        if not width > 0:
            raise HardyError('bump width must be positive; got {0}'.format(width))

        def fn(x):
            val, der = _unit_bump((x - center) / width)
            return scale * val, scale * der / width
        return cls(fn, (center - width, center + width), coordinate)

    @classmethod
    def superpose(cls, functions):
        functions = list(functions)
        if not functions:
            raise HardyError('nothing to superpose')
        coordinate = functions[0].coordinate
        if any(u.coordinate != coordinate for u in functions):
            raise HardyError('cannot superpose functions of different coordinates')
        lo = min(u.support[0] for u in functions)
        hi = max(u.support[1] for u in functions)

        def fn(x):
            val = np.zeros(np.shape(x))
            der = np.zeros(np.shape(x))
            for u in functions:
                v, d = u(x)
                val = val + v
                der = der + d
            return val, der
        return cls(fn, (lo, hi), coordinate)

    @classmethod
    def zero(cls, support=(2.0, 4.0), coordinate=RADIUS):
        def fn(x):
            return np.zeros(np.shape(x)), np.zeros(np.shape(x))
        return cls(fn, support, coordinate)

    @classmethod
    def log_power_cutoff(cls, beta, plateau):
        """
        |log r|^(-(1 + beta)/2) on r > 1, switched on and off smoothly in
        log(log r) over unit widths around the plateau [0, plateau]. As the
        plateau widens the 1D Hardy ratio of this family increases to 1.
        """
        beta = float(beta)
        plateau = float(plateau)
        if not beta < -1 or not plateau > 0:
            raise HardyError('need beta < -1 and plateau > 0; got {0}, {1}'.format(beta, plateau))
        p = -(1.0 + beta) / 2.0

        def fn(t):
            tau = np.log(t)
            up, dup = smooth_step(tau + 1.0)
            down, ddown = smooth_step(plateau + 1.0 - tau)
            phi = up * down
            dphi = dup * down - up * ddown
            val = t ** p * phi
            der = t ** (p - 1.0) * (p * phi + dphi)
            return val, der
        return cls(fn, (math.exp(-1.0), math.exp(plateau + 1.0)), LOG_RADIUS)


def random_bumps(rng, zone, max_bumps=5, coordinate=RADIUS):
    """
    Sum of 1 to ``max_bumps`` bumps with standard normal amplitudes, every
    bump supported inside ``zone``.
    """
    lo, hi = float(zone[0]), float(zone[1])
    if not lo < hi:
        raise HardyError('empty zone [{0}, {1}]'.format(lo, hi))
    count = int(rng.integers(1, max_bumps + 1))
    quarter = 0.25 * (hi - lo)
    bumps = []
    for _ in range(count):
        # centers in the middle half keep every bump at least (hi - lo)/8 wide
        center = rng.uniform(lo + quarter, hi - quarter)
        room = min(center - lo, hi - center)
        width = rng.uniform(0.5, 1.0) * room
        scale = rng.standard_normal()
        if scale == 0:
            scale = 1.0
        bumps.append(TestFunction.bump(center, width, scale, coordinate))
    return TestFunction.superpose(bumps)


def random_zone(rng, side, ratio=1.5):
    """
    An interval (a, ratio * a) inside (0, 1) (``side='inner'``) or inside
    (1, infinity) (``side='outer'``), with a log-uniform.
    """
    if side == 'inner':
        a = math.exp(rng.uniform(math.log(1e-3), math.log(0.9 / ratio)))
    elif side == 'outer':
        a = math.exp(rng.uniform(math.log(1.1), math.log(100.0)))
    else:
        raise HardyError("side must be 'inner' or 'outer'; got {0!r}".format(side))
    return a, ratio * a
