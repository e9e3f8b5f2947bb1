import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

logger = logging.getLogger(__name__)


def circle_edges(bins):
    """Bin edges on the circle with bin b centered at 2*pi*b/bins."""
    if bins < 1:
        raise ValueError('bins must be a positive integer; got {0}'.format(bins))
    width = 2 * math.pi / bins
    return (np.arange(bins + 1) - 0.5) * width


def index_edges(count):
    """Unit-width bins centered at 0, 1, ..., count - 1 (point-set minimizers)."""
    return np.arange(count + 1) - 0.5


def bin_index(coords, edges, periodic=False):
    coords = np.asarray(coords, dtype=float)
    bins = len(edges) - 1
    if periodic:
        period = edges[-1] - edges[0]
        coords = edges[0] + np.mod(coords - edges[0], period)
    idx = np.searchsorted(edges, coords, side='right') - 1
    if periodic:
        idx = np.clip(idx, 0, bins - 1)
    return idx


@dataclass(frozen=True)
class ManifoldHistogram:
    """
    Normalized histogram over a coordinate of the minimizer set.

    Occupancy histograms, tube marginals and flat-density profiles all use
    this type so they can be compared bin by bin.
    """
    edges: np.ndarray
    weights: np.ndarray
    periodic: bool = False
    samples: Optional[int] = None

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if edges.ndim != 1 or len(edges) != len(weights) + 1:
            raise ValueError('a histogram needs len(edges) == len(weights) + 1')
        if np.any(np.diff(edges) <= 0):
            raise ValueError('histogram edges must be strictly increasing')
        if np.any(weights < 0):
            raise ValueError('histogram weights must be nonnegative')
        object.__setattr__(self, 'edges', edges)
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def from_counts(cls, edges, counts, periodic=False):
        counts = np.asarray(counts, dtype=float)
        total = counts.sum()
        if total <= 0:
            raise ValueError('cannot normalize an empty histogram')
        return cls(edges=edges, weights=counts / total, periodic=periodic, samples=int(round(total)))

    @classmethod
    def from_scores(cls, edges, scores, periodic=False):
        """Bin mass proportional to score times bin width."""
        edges = np.asarray(edges, dtype=float)
        mass = np.asarray(scores, dtype=float) * np.diff(edges)
        total = mass.sum()
        if not np.isfinite(total) or total <= 0:
            raise ValueError('scores must have a finite positive total')
        return cls(edges=edges, weights=mass / total, periodic=periodic)

    @property
    def bins(self):
        return len(self.weights)

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def standard_errors(self):
        if self.samples is None:
            raise ValueError('standard errors need the sample count')
        return np.sqrt(self.weights * (1 - self.weights) / self.samples)

    def tv_distance(self, other):
        if self.bins != other.bins or not np.allclose(self.edges, other.edges):
            raise ValueError('total variation needs histograms on identical bins')
        return 0.5 * float(np.abs(self.weights - other.weights).sum())

    def rows(self):
        return [(float(c), float(w)) for c, w in zip(self.centers, self.weights)]
