import logging
from dataclasses import dataclass, field, asdict
from typing import Dict, List

import numpy as np

from sgdlab.hardy.constants import HardyError
from sgdlab.hardy.inequalities import TAIL_TOL, hardy_1d_ratio, rayleigh_quotient, measure_tail_fraction
from sgdlab.hardy.trial_functions import random_bumps, random_zone
from sgdlab.utils.rng import stream

logger = logging.getLogger(__name__)


@dataclass
class InequalityReport:
    """Outcome of one inequality over a family of random test functions."""
    inequality: str
    trials: int
    min_ratio: float
    max_ratio: float
    constants: Dict[str, float] = field(default_factory=dict)
    ratios: List[float] = field(default_factory=list, repr=False)

    def to_dict(self, with_ratios=False):
        out = asdict(self)
        if not with_ratios:
            out.pop('ratios')
        return out


def hardy_family(beta, m, draws=100, seed=0, max_bumps=5):
    """
    1D logarithmic Hardy ratios of random bump superpositions, half of them
    inside the unit ball and half outside.
    """
    rng = stream(seed, 0)
    ratios = []
    for i in range(int(draws)):
        side = 'inner' if i % 2 == 0 else 'outer'
        u = random_bumps(rng, random_zone(rng, side), max_bumps)
        ratios.append(hardy_1d_ratio(u, beta, m).ratio)
    report = InequalityReport('hardy_log', len(ratios), float(np.min(ratios)), float(np.max(ratios)),
                              {'beta': float(beta), 'm': int(m), 'constant': 4.0 / (1 + beta) ** 2}, ratios)
    logger.info('{0:>10} {1:>6} {2:>4} {3:>12} {4:>12}'.format('inequality', 'beta', 'm', 'min ratio', 'max ratio'))
    logger.info('{0:>10} {1:>6g} {2:>4d} {3:>12.6g} {4:>12.6g}'.format(
        'hardy', float(beta), int(m), report.min_ratio, report.max_ratio))
    return report


def poincare_family(landscape, eta_sigma, grid, zones, draws=100, seed=0, max_bumps=5, constant=1.0):
    """
    Weighted Poincaré quotients of random bump superpositions, each draw
    supported in one of ``zones`` picked at random. ``constant`` is the
    claimed lower bound recorded in the report.
    """
    if not zones:
        raise HardyError('need at least one zone for the test functions')
    tail = measure_tail_fraction(landscape, eta_sigma, grid)
    if tail > TAIL_TOL:
        msg = 'the grid misses a fraction {0:.3e} of the measure; enlarge r_max'.format(tail)
        logger.error(msg)
        raise HardyError(msg)
    rng = stream(seed, 1)
    quotients = []
    for _ in range(int(draws)):
        lo, hi = zones[int(rng.integers(0, len(zones)))]
        a = float(np.exp(rng.uniform(np.log(lo), np.log(hi / 1.5))))
        u = random_bumps(rng, (a, 1.5 * a), max_bumps)
        quotients.append(rayleigh_quotient(u, landscape, eta_sigma, grid, check_tail=False))
    report = InequalityReport('poincare_weighted', len(quotients), float(np.min(quotients)),
                              float(np.max(quotients)),
                              {'eta_sigma': float(eta_sigma), 'm': int(grid.dim), 'claimed_bound': float(constant),
                               'tail_fraction': float(tail)},
                              quotients)
    logger.info('poincaré quotients on {0}: min {1:.6g}, max {2:.6g} over {3} draws'.format(
        landscape.name, report.min_ratio, report.max_ratio, report.trials))
    return report
