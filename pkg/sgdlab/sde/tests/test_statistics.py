import math
import unittest

import numpy as np

from sgdlab.invariant import DensityGrid, DensityError
from sgdlab.landscapes import construct_landscape
from sgdlab.sde import (
    Checkpoint,
    TrajectoryEnsemble,
    SimulationError,
    occupancy_histogram,
    minimizer_fraction,
    ks_distance,
)
from sgdlab.utils.sgdlab_enums import Geometry


def _ensemble(states, n_paths=None):
    states = np.asarray(states, dtype=float)
    n = len(states) if n_paths is None else n_paths
    ck = Checkpoint(time=1.0, path_index=np.arange(len(states)), states=states)
    return TrajectoryEnsemble(config=None, checkpoints=[ck], diverged_count=n - len(states), n_paths=n)


def _uniform_unit_interval():
    return DensityGrid(geometry=Geometry.line, edges=np.linspace(0, 1, 11), values=np.ones(10), normalized=True)


class TestOccupancy(unittest.TestCase):
    def test_delta_mass(self):
        f = construct_landscape('circle_codim2')
        states = np.tile([1.0, 0.0, 0.0], (40, 1)) + np.array([0.01, 0.0, 0.02])
        hist = occupancy_histogram(_ensemble(states), f, bins=8)
        np.testing.assert_allclose(hist.weights, [1, 0, 0, 0, 0, 0, 0, 0])
        self.assertEqual(hist.samples, 40)

    def test_uniform_on_circle(self):
        f = construct_landscape('circle_codim2')
        rng = np.random.default_rng(5)
        states = f.minimizer_set.point_at(rng.uniform(0, 2 * math.pi, 8000))
        hist = occupancy_histogram(_ensemble(states), f, bins=8)
        se = math.sqrt(0.125 * 0.875 / 8000)
        self.assertTrue(np.all(np.abs(hist.weights - 0.125) <= 4 * se))
        self.assertAlmostEqual(hist.weights.sum(), 1.0, places=12)

    def test_point_set_wells(self):
        f = construct_landscape('log_corrected', {'points': [[0.0, 0.0], [1.5, 0.5]]})
        states = np.array([[0.1, 0.0], [1.4, 0.6], [1.5, 0.4], [1.6, 0.5]])
        hist = occupancy_histogram(_ensemble(states), f)
        np.testing.assert_allclose(hist.weights, [0.25, 0.75])

    def test_affine_needs_edges(self):
        f = construct_landscape('product_noncompact')
        states = np.array([[0.0, 0.0, 0.0, -1.0], [0.1, 0.0, 0.0, 2.0]])
        with self.assertRaises(SimulationError):
            occupancy_histogram(_ensemble(states), f)
        hist = occupancy_histogram(_ensemble(states), f, edges=[-3.0, 0.0, 3.0])
        np.testing.assert_allclose(hist.weights, [0.5, 0.5])

    def test_no_survivors(self):
        f = construct_landscape('circle_codim2')
        with self.assertRaises(SimulationError):
            occupancy_histogram(_ensemble(np.zeros((0, 3)), n_paths=4), f, bins=8)

    def test_minimizer_fraction_counts_diverged(self):
        f = construct_landscape('circle_codim2')
        states = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 1e-4], [0.0, 0.0, 0.0]])
        self.assertAlmostEqual(minimizer_fraction(_ensemble(states, n_paths=4), f, 1e-3), 0.5)


class TestKsDistance(unittest.TestCase):
    def test_point_mass_against_uniform(self):
        self.assertAlmostEqual(ks_distance(np.full(100, 0.5), _uniform_unit_interval()), 0.5, places=12)

    def test_own_samples(self):
        rng = np.random.default_rng(9)
        samples = rng.uniform(0, 1, 10000)
        self.assertLess(ks_distance(samples, _uniform_unit_interval()), 1.5 * 1.63 / 100)

    def test_needs_normalized_density(self):
        grid = DensityGrid(geometry=Geometry.line, edges=[0.0, 1.0], values=[2.0])
        with self.assertRaises(DensityError):
            ks_distance([0.5], grid)

    def test_mass_checked_despite_flag(self):
        grid = _uniform_unit_interval()
        grid.values[0] += 1e-6
        self.assertTrue(grid.normalized)
        with self.assertRaisesRegex(DensityError, 'mass'):
            ks_distance([0.5], grid)

    def test_needs_samples(self):
        with self.assertRaises(SimulationError):
            ks_distance([], _uniform_unit_interval())


if __name__ == '__main__':
    unittest.main()
