import math
import os
import tempfile
import unittest

import numpy as np
from scipy import special

import sgdlab
from sgdlab.invariant import (
    InvariantModel,
    DensityGrid,
    DensityError,
    NormalizationError,
    density_eval,
    normalize,
    normalize_product,
    lattice_verdict,
    classify_integrability,
    grid_edges,
    write_density,
    read_density,
    default_refinement,
)
from sgdlab.landscapes import construct_landscape
from sgdlab.utils.sgdlab_enums import Geometry, DivergenceMode, IntegrabilityClass


class TestDensityEval(unittest.TestCase):
    def test_boltzmann_at_origin(self):
        f = construct_landscape('quadratic_window', {'lam': 1.0, 'dim': 2})
        grid = density_eval(f, InvariantModel.boltzmann(1.0), Geometry.radial, [0.0, 2e-6, 1.0])
        self.assertAlmostEqual(grid.values[0], math.exp(-1), places=10)

    def test_power_on_shifted(self):
        f = construct_landscape('shifted_underparam', {'eps': 0.5, 'a': [1.0]})
        grid = density_eval(f, InvariantModel.power(-2.0), Geometry.line, [-1e-6, 1e-6])
        self.assertAlmostEqual(grid.values[0], 4.0, places=8)

    def test_zero_with_negative_alpha_names_cell(self):
        f = construct_landscape('radial_power', {'lam': 0.5, 'k': 2.0, 'dim': 1})
        with self.assertRaisesRegex(DensityError, 'cell 1'):
            density_eval(f, InvariantModel.power(-1.5), Geometry.line, np.linspace(-1, 1, 4))

    def test_center_off_minimizers_accepted(self):
        f = construct_landscape('radial_power', {'lam': 0.5, 'k': 2.0, 'dim': 1})
        grid = density_eval(f, InvariantModel.power(-1.5), Geometry.line, [-2e-3, 0.0, 2e-3])
        np.testing.assert_allclose(grid.values, (0.5e-6) ** -1.5, rtol=1e-12)
        f2 = construct_landscape('radial_power', {'lam': 0.5, 'k': 2.0, 'dim': 2})
        with self.assertRaisesRegex(DensityError, 'cell 0'):
            density_eval(f2, InvariantModel.power(-1.5), Geometry.radial, [0.0, 1e-9, 1.0])

    def test_line_needs_dim_one(self):
        f = construct_landscape('radial_power', {'lam': 1.0, 'k': 2.0, 'dim': 2})
        with self.assertRaises(sgdlab.SgdLabError):
            density_eval(f, InvariantModel.boltzmann(1.0), Geometry.line, np.linspace(-1, 1, 5))

    def test_model_validation(self):
        with self.assertRaises(DensityError):
            InvariantModel.boltzmann(0.0)
        with self.assertRaises(DensityError):
            InvariantModel.power(math.nan)

    def test_radial_volumes(self):
        grid = DensityGrid(geometry=Geometry.radial, edges=[0.0, 1.0, 2.0], values=[1.0, 1.0], dim=3)
        self.assertAlmostEqual(grid.mass(), 4 * math.pi / 3 * 8, places=12)

    def test_normalized_flag_checked(self):
        with self.assertRaises(DensityError):
            DensityGrid(geometry=Geometry.line, edges=[0.0, 1.0], values=[2.0], normalized=True)
        grid = DensityGrid(geometry=Geometry.line, edges=[0.0, 0.5, 1.0], values=[1.0, 3.0]).normalize_cells()
        self.assertTrue(grid.normalized)
        np.testing.assert_allclose(grid.values, [0.5, 1.5])

    def test_csv_and_sidecar(self):
        f = construct_landscape('radial_power', {'lam': 0.5, 'k': 2.0, 'dim': 1})
        grid = density_eval(f, InvariantModel.boltzmann(1.0), Geometry.line, np.linspace(-3, 3, 13))
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'density.csv')
            written = write_density(grid.normalize_cells(), path)
            self.assertTrue(os.path.exists(written[1]))
            back = read_density(path)
        self.assertTrue(back.normalized)
        self.assertEqual(back.metadata['landscape'], 'radial_power')
        np.testing.assert_allclose(back.values, grid.normalize_cells().values, rtol=1e-12)


class TestNormalize(unittest.TestCase):
    def test_uniform_unit_interval(self):
        grid = DensityGrid(geometry=Geometry.line, edges=np.linspace(0, 1, 11), values=np.ones(10),
                           integrand=np.ones_like, domain=(0.0, 1.0))
        res = normalize(grid)
        self.assertTrue(res.integrable)
        self.assertAlmostEqual(res.constant, 1.0, places=9)

    def test_gaussian(self):
        f = construct_landscape('radial_power', {'lam': 0.5, 'k': 2.0, 'dim': 1})
        grid = density_eval(f, InvariantModel.boltzmann(1.0), Geometry.line, np.linspace(-5, 5, 101))
        res = normalize(grid)
        self.assertTrue(res.integrable)
        self.assertEqual(res.divergence_mode, DivergenceMode.none)
        self.assertAlmostEqual(res.constant, 1 / math.sqrt(2 * math.pi), delta=1e-6)

    def test_radial_gaussian(self):
        f = construct_landscape('radial_power', {'lam': 0.5, 'k': 2.0, 'dim': 3})
        grid = density_eval(f, InvariantModel.boltzmann(1.0), Geometry.radial, grid_edges(0, 5, 50))
        res = normalize(grid)
        self.assertAlmostEqual(res.integral, (2 * math.pi) ** 1.5, delta=1e-6)
        self.assertFalse(res.density.normalized)

    def test_divergence_at_minimizer(self):
        f = construct_landscape('radial_power', {'lam': 1.0, 'k': 4.0, 'dim': 4})
        grid = density_eval(f, InvariantModel.power(-2.4), Geometry.radial, grid_edges(0.01, 4.0, 50))
        res = normalize(grid)
        self.assertFalse(res.integrable)
        self.assertIsNone(res.constant)
        self.assertEqual(res.divergence_mode, DivergenceMode.at_minimizers)
        self.assertEqual(classify_integrability(-2.4, 4, 0, 4.0), IntegrabilityClass.not_locally_integrable)

    def test_divergence_at_infinity(self):
        f = construct_landscape('quadratic_window', {'lam': 1.0, 'dim': 4})
        grid = density_eval(f, InvariantModel.power(-1.5), Geometry.radial, grid_edges(0, 4.0, 40))
        res = normalize(grid)
        self.assertEqual(res.divergence_mode, DivergenceMode.at_infinity)
        self.assertEqual(res.classification, IntegrabilityClass.locally_not_globally)

    def test_partial_integrals_monotone(self):
        cases = [('radial_power', {'lam': 1.0, 'k': 4.0, 'dim': 4}, -0.8),
                 ('radial_power', {'lam': 1.0, 'k': 4.0, 'dim': 4}, -2.4),
                 ('quadratic_window', {'lam': 1.0, 'dim': 3}, -1.0),
                 ('quadratic_window', {'lam': 2.0, 'dim': 2}, -2.5)]
        for name, params, alpha in cases:
            f = construct_landscape(name, params)
            grid = density_eval(f, InvariantModel.power(alpha), Geometry.radial, grid_edges(0.05, 2.0, 20))
            res = normalize(grid)
            self.assertTrue(np.all(np.diff(res.partial_integrals) >= 0), msg=name)

    def test_boltzmann_shift_covariance(self):
        low = construct_landscape('shifted_underparam', {'eps': 0.1, 'a': [1.0], 'c': 0.0})
        high = construct_landscape('shifted_underparam', {'eps': 2.1, 'a': [1.0], 'c': 0.0})
        edges = np.linspace(-4, 4, 81)
        model = InvariantModel.boltzmann(0.7)
        a = normalize(density_eval(low, model, Geometry.line, edges)).density
        b = normalize(density_eval(high, model, Geometry.line, edges)).density
        np.testing.assert_allclose(a.values, b.values, rtol=1e-12)

    def test_contradictory_refinement(self):
        grid = DensityGrid(geometry=Geometry.line, edges=[0.0, 1.0], values=[1.0], integrand=np.ones_like,
                           domain=(0.0, 1.0))
        with self.assertRaises(NormalizationError):
            normalize(grid, [(4, 8.0), (5, 4.0), (6, 2.0)])
        with self.assertRaises(NormalizationError):
            normalize(grid, [(4, 2.0), (5, 4.0)])
        with self.assertRaises(NormalizationError):
            normalize(grid, [(4, 2.0), (5, 4.0), (6, 5.0)])

    def test_missing_integrand(self):
        grid = DensityGrid(geometry=Geometry.line, edges=[0.0, 1.0], values=[1.0])
        with self.assertRaises(NormalizationError):
            normalize(grid)


class TestProductNormalization(unittest.TestCase):
    def test_noncompact_example(self):
        f = construct_landscape('product_noncompact')
        res = normalize_product(f, InvariantModel.power(-1.2))
        self.assertTrue(res.integrable)
        self.assertEqual(len(res.factors), 2)
        radial = 4 * math.pi * 0.5 * special.beta(0.3, 0.9)
        line = math.sqrt(math.pi) * special.gamma(0.7) / special.gamma(1.2)
        self.assertAlmostEqual(res.integral / (radial * line), 1.0, delta=1e-6)

    def test_noncompact_outside_window(self):
        f = construct_landscape('product_noncompact')
        self.assertFalse(normalize_product(f, InvariantModel.power(-1.6)).integrable)
        res = normalize_product(f, InvariantModel.power(-0.7))
        self.assertEqual(res.divergence_mode, DivergenceMode.at_infinity)

    def test_boltzmann_rejected(self):
        f = construct_landscape('product_noncompact')
        with self.assertRaises(NormalizationError):
            normalize_product(f, InvariantModel.boltzmann(1.0))

    def test_not_a_product(self):
        f = construct_landscape('quadratic_window')
        with self.assertRaises(NormalizationError):
            normalize_product(f, InvariantModel.power(-2.0))


class TestIntegrabilityLattice(unittest.TestCase):
    def test_oracle_agrees(self):
        refinement = default_refinement()
        count = 0
        for m in (3, 4, 6):
            for n in (0, 1):
                for gamma in (2.0, 4.0):
                    crit = -0.5 * (m - n)
                    tail = -m / gamma
                    second = 0.5 * (crit + tail) if crit < tail else crit + 0.3
                    for alpha in (crit - 0.3, second):
                        expected = classify_integrability(alpha, m, n, gamma)
                        got = lattice_verdict(alpha, m, n, gamma, refinement)
                        self.assertEqual(got, expected, msg='m={0} n={1} gamma={2} alpha={3}'.format(
                            m, n, gamma, alpha))
                        count += 1
        self.assertEqual(count, 24)


if __name__ == '__main__':
    unittest.main()
