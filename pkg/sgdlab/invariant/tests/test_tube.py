import math
import unittest

import numpy as np

from sgdlab.invariant import (
    InvariantModel,
    DensityError,
    tube_marginal,
    richardson_marginal,
)
from sgdlab.landscapes import construct_landscape
from sgdlab.utils.histogram import ManifoldHistogram


def _profile(edges, fn):
    centers = 0.5 * (edges[:-1] + edges[1:])
    return ManifoldHistogram.from_scores(edges, fn(centers), periodic=True)


class TestTubeMarginal(unittest.TestCase):
    def test_constant_hessian_is_uniform(self):
        f = construct_landscape('circle_codim2', {'eigenvalues': [2.0, 2.0]})
        hist = tube_marginal(f, InvariantModel.power(-0.9), 0.1, 16)
        np.testing.assert_allclose(hist.weights, np.full(16, 1 / 16), rtol=1e-10)
        self.assertTrue(hist.periodic)

    def test_near_critical_exponent_follows_determinant(self):
        f = construct_landscape('circle_codim2')
        hist = richardson_marginal(f, InvariantModel.power(-0.99), 0.05, 32)
        det = _profile(hist.edges, lambda phi: 1 / np.sqrt(2 + np.cos(phi)))
        self.assertLess(hist.tv_distance(det), 0.02)
        # flatter directions (smaller eigenvalue at phi = pi) carry more mass
        self.assertGreater(hist.weights[16], hist.weights[0])

    def test_admissible_interval(self):
        f = construct_landscape('circle_codim2')
        for alpha in (-1.05, -1.0, -0.75, -0.5):
            with self.assertRaises(DensityError):
                tube_marginal(f, InvariantModel.power(alpha), 0.1, 8)

    def test_boltzmann_concentrates_like_determinant(self):
        f = construct_landscape('circle_codim2')
        eta = 1e-4
        hist = tube_marginal(f, InvariantModel.boltzmann(eta), 6 * math.sqrt(eta), 32)
        det = _profile(hist.edges, lambda phi: 1 / np.sqrt(2 + np.cos(phi)))
        self.assertLess(hist.tv_distance(det), 0.02)

    def test_underparametrized_ring(self):
        f = construct_landscape('shifted_underparam', {'eps': 0.5, 'base': 'ring'})
        hist = tube_marginal(f, InvariantModel.power(-3.0), 0.2, 12)
        np.testing.assert_allclose(hist.weights, np.full(12, 1 / 12), rtol=1e-10)

    def test_geometry_checks(self):
        with self.assertRaises(DensityError):
            tube_marginal(construct_landscape('quadratic_window'), InvariantModel.boltzmann(1.0), 0.1, 8)
        f = construct_landscape('circle_codim2')
        with self.assertRaises(DensityError):
            tube_marginal(f, InvariantModel.power(-0.9), 1.5, 8)


if __name__ == '__main__':
    unittest.main()
