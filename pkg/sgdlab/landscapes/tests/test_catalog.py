import math
import unittest

import numpy as np

import sgdlab
from sgdlab.landscapes import construct_landscape, LandscapeError


def default_catalog():
    return [
        construct_landscape('radial_power', {'lam': 1.0, 'k': 2.0}),
        construct_landscape('radial_power', {'lam': 0.5, 'k': 3.0, 'dim': 3}),
        construct_landscape('quadratic_window', {'lam': 1.0, 'dim': 4}),
        construct_landscape('product_noncompact'),
        construct_landscape('circle_codim2'),
        construct_landscape('circle_codimK', {'dim': 5}),
        construct_landscape('shifted_underparam', {'eps': 0.1, 'a': [1.0, 2.0], 'c': 0.5}),
        construct_landscape('shifted_underparam', {'eps': 0.05, 'base': 'ring'}),
        construct_landscape('log_corrected', {'points': [[0.0, 0.0], [1.5, 0.5]]}),
    ]


class TestCatalogExamples(unittest.TestCase):
    def test_radial_power_value(self):
        f = construct_landscape('radial_power', {'lam': 1, 'k': 2})
        val, grad, hess = f.evaluate(np.array([3.0, 4.0]))
        self.assertAlmostEqual(float(val), 25.0, places=12)
        np.testing.assert_allclose(grad, [6.0, 8.0], atol=1e-12)
        np.testing.assert_allclose(hess, 2 * np.eye(2), atol=1e-12)

    def test_radial_power_radial_profile(self):
        f = construct_landscape('radial_power', {'lam': 2, 'k': 3, 'dim': 3})
        fr, dfr = f.radial(np.array([0.5, 2.0]))
        np.testing.assert_allclose(fr, [0.25, 16.0])
        np.testing.assert_allclose(dfr, [1.5, 24.0])

    def test_product_noncompact_on_axis(self):
        f = construct_landscape('product_noncompact')
        theta = np.array([0.0, 0.0, 0.0, 5.0])
        self.assertEqual(float(f.value(theta)), 0.0)
        self.assertEqual(float(f.minimizer_set.distance(theta)), 0.0)
        np.testing.assert_allclose(f.gradient(theta), np.zeros(4), atol=0)

    def test_product_factors(self):
        f = construct_landscape('product_noncompact')
        radial, line = f.factors()
        self.assertEqual(radial.dim, 3)
        self.assertEqual(line.dim, 1)
        theta = np.random.default_rng(0).normal(size=(20, 4))
        r = np.linalg.norm(theta[:, :3], axis=1)
        np.testing.assert_allclose(radial.values(r) * line.values(theta[:, 3]), f.value(theta), rtol=1e-12)

    def test_circle_on_manifold(self):
        f = construct_landscape('circle_codim2', {'eigenvalues': [2.0, 2.0]})
        phi = np.linspace(0, 2 * math.pi, 17)
        pts = f.minimizer_set.point_at(phi)
        np.testing.assert_allclose(f.value(pts), 0.0, atol=1e-14)
        np.testing.assert_allclose(f.gradient(pts), 0.0, atol=1e-12)

    def test_names(self):
        self.assertEqual(construct_landscape('circle_codim2').name, 'circle_codim2')
        self.assertEqual(construct_landscape('circle_codimK', {'dim': 6}).name, 'circle_codimK')
        self.assertEqual(set(sgdlab.landscapes.catalog_names()),
                         {'radial_power', 'quadratic_window', 'product_noncompact', 'circle_codim2',
                          'circle_codimK', 'shifted_underparam', 'log_corrected'})

    def test_to_dict_rebuilds(self):
        for f in default_catalog():
            d = f.to_dict()
            g = construct_landscape(d['name'], d['params'])
            pts = np.random.default_rng(3).uniform(-2, 2, size=(10, f.dim))
            np.testing.assert_allclose(g.value(pts), f.value(pts), rtol=1e-14)


class TestCatalogErrors(unittest.TestCase):
    def test_unknown_name(self):
        with self.assertRaises(LandscapeError):
            construct_landscape('rosenbrock')

    def test_unknown_parameter(self):
        with self.assertRaises(LandscapeError):
            construct_landscape('radial_power', {'lam': 1, 'power': 2})

    def test_nonpositive_parameters(self):
        with self.assertRaises(LandscapeError):
            construct_landscape('radial_power', {'lam': 0})
        with self.assertRaises(LandscapeError):
            construct_landscape('radial_power', {'lam': 1, 'k': -1})
        with self.assertRaises(LandscapeError):
            construct_landscape('quadratic_window', {'lam': -2})
        with self.assertRaises(LandscapeError):
            construct_landscape('shifted_underparam', {'eps': 0})

    def test_eigenvalue_function_not_positive(self):
        with self.assertRaises(LandscapeError):
            construct_landscape('circle_codim2', {'eigenvalues': [1.0, {'const': 1.0, 'cos': [1.5]}]})
        with self.assertRaises(LandscapeError):
            construct_landscape('circle_codim2', {'eigenvalues': [1.0, 0.0]})

    def test_wrong_eigenvalue_count(self):
        with self.assertRaises(LandscapeError):
            construct_landscape('circle_codimK', {'dim': 5, 'eigenvalues': [1.0, 1.0]})

    def test_codimK_needs_codim_three(self):
        with self.assertRaises(LandscapeError):
            construct_landscape('circle_codimK', {'dim': 3})

    def test_argument_errors_are_value_errors(self):
        with self.assertRaises(ValueError):
            construct_landscape('shifted_underparam', {'eps': 0.1, 'base': 'cubic'})


class TestCatalogInvariants(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.landscapes = default_catalog()

    def test_infimum_on_projection(self):
        rng = np.random.default_rng(11)
        for f in self.landscapes:
            theta = rng.uniform(-3, 3, size=(1000, f.dim))
            vals = f.value(f.minimizer_set.projection(theta))
            self.assertLessEqual(float(np.max(np.abs(vals - f.infimum))), 1e-12, msg=f.name)

    def test_strictly_above_infimum_off_manifold(self):
        rng = np.random.default_rng(12)
        for f in self.landscapes:
            theta = rng.uniform(-3, 3, size=(1000, f.dim))
            off = f.minimizer_set.distance(theta) > 1e-3
            self.assertTrue(np.all(f.value(theta[off]) > f.infimum), msg=f.name)

    def test_gradient_vanishes_on_manifold(self):
        rng = np.random.default_rng(13)
        for f in self.landscapes:
            pts = f.minimizer_set.sample(rng, 50)
            np.testing.assert_allclose(f.gradient(pts), 0.0, atol=1e-10, err_msg=f.name)

    def test_growth(self):
        rng = np.random.default_rng(14)
        for f in self.landscapes:
            theta = rng.uniform(-10, 10, size=(1000, f.dim))
            ratios = sgdlab.landscapes.growth_ratios(f, theta)
            self.assertGreater(len(ratios), 0, msg=f.name)
            self.assertGreaterEqual(float(ratios.min()), 1 - 1e-12, msg=f.name)

    def test_distance_is_lipschitz(self):
        rng = np.random.default_rng(15)
        for f in self.landscapes:
            a = rng.uniform(-3, 3, size=(500, f.dim))
            b = rng.uniform(-3, 3, size=(500, f.dim))
            da = f.minimizer_set.distance(a)
            db = f.minimizer_set.distance(b)
            self.assertTrue(np.all(np.abs(da - db) <= np.linalg.norm(a - b, axis=1) + 1e-12), msg=f.name)

    def test_projection_is_fixed_point(self):
        rng = np.random.default_rng(16)
        for f in self.landscapes:
            theta = rng.uniform(-3, 3, size=(200, f.dim))
            proj = f.minimizer_set.projection(theta)
            np.testing.assert_allclose(f.minimizer_set.distance(proj), 0.0, atol=1e-12, err_msg=f.name)
            np.testing.assert_allclose(f.minimizer_set.projection(proj), proj, atol=1e-12, err_msg=f.name)


class TestCircleLandscape(unittest.TestCase):
    def test_eigen_extension_is_positive(self):
        series = sgdlab.landscapes.TrigSeries(const=1.2, cos=[0.5, 0.3], sin=[0.2])
        rng = np.random.default_rng(2)
        xy = rng.uniform(-4, 4, size=(5000, 2))
        val, _, _ = series.extension(xy[:, 0], xy[:, 1])
        self.assertGreaterEqual(float(val.min()), series.minimum - 1e-12)

    def test_eigen_extension_matches_circle(self):
        series = sgdlab.landscapes.TrigSeries(const=2.0, cos=[0.5, 0.3], sin=[0.2, -0.1])
        phi = np.linspace(0, 2 * math.pi, 33)
        val, _, _ = series.extension(np.cos(phi), np.sin(phi))
        np.testing.assert_allclose(val, series.on_circle(phi), atol=1e-13)

    def test_quadratic_approximation_near_circle(self):
        f = construct_landscape('circle_codim2')
        rng = np.random.default_rng(5)
        phis = rng.uniform(0, 2 * math.pi, size=20)
        for delta, tol in [(1e-2, 0.05), (1e-3, 0.005), (1e-4, 0.0005)]:
            for phi in phis:
                p = f.minimizer_set.point_at(phi)
                radial = np.array([math.cos(phi), math.sin(phi), 0.0])
                normal = rng.normal(size=2)
                normal /= np.linalg.norm(normal)
                d = delta * (normal[0] * radial + normal[1] * np.array([0.0, 0.0, 1.0]))
                h = f.hessian(p)
                ratio = f.value(p + d) / (0.5 * d @ h @ d)
                self.assertLess(abs(ratio - 1), tol)

    def test_normal_hessian_is_prescribed(self):
        f = construct_landscape('circle_codimK', {'dim': 5, 'eigenvalues': [
            1.0, {'const': 2.0, 'cos': [1.0]}, {'const': 3.0, 'sin': [0.5]}, 4.0]})
        phi = 0.7
        p = f.minimizer_set.point_at(phi)
        h = f.hessian(p)
        radial = np.array([math.cos(phi), math.sin(phi), 0, 0, 0])
        self.assertAlmostEqual(float(radial @ h @ radial), 1.0, places=12)
        self.assertAlmostEqual(float(h[2, 2]), 2 + math.cos(phi), places=12)
        self.assertAlmostEqual(float(h[3, 3]), 3 + 0.5 * math.sin(phi), places=12)
        self.assertAlmostEqual(float(h[4, 4]), 4.0, places=12)


class TestLogCorrected(unittest.TestCase):
    def test_profile(self):
        f = construct_landscape('log_corrected')
        d = math.exp(-2)
        self.assertAlmostEqual(float(f.value(np.array([d, 0.0]))), d * d * 9, places=14)
        self.assertAlmostEqual(float(f.value(np.array([0.0, 1.0]))), 1.0, places=14)
        self.assertTrue(f.is_radial)

    def test_hessian_infinite_on_points(self):
        f = construct_landscape('log_corrected')
        self.assertFalse(np.all(np.isfinite(f.hessian(np.zeros(2)))))
        np.testing.assert_allclose(f.gradient(np.zeros(2)), 0.0)

    def test_singular_distance(self):
        f = construct_landscape('log_corrected', {'points': [[0.0, 0.0], [2.0, 0.0]]})
        self.assertAlmostEqual(float(f.singular_distance(np.array([1.0, 0.3]))), 0.0, places=12)
        self.assertAlmostEqual(float(f.singular_distance(np.array([0.5, 0.0]))), 0.5, places=12)
        self.assertAlmostEqual(float(f.singular_distance(np.array([0.1, 0.0]))), 0.1, places=12)
        self.assertAlmostEqual(float(f.singular_distance(np.array([-0.9, 0.0]))), 0.1, places=12)


class TestShifted(unittest.TestCase):
    def test_quadratic_radial(self):
        f = construct_landscape('shifted_underparam', {'eps': 0.2, 'a': [2.0], 'c': 1.0})
        self.assertTrue(f.is_radial)
        fr, dfr = f.profile(np.array([1.0]), sgdlab.Geometry.line)
        self.assertAlmostEqual(float(fr[0]), 0.2 + 1.0 + 0.25, places=14)
        self.assertAlmostEqual(float(dfr[0]), 2.0 + 1.0, places=14)

    def test_ring_infimum(self):
        f = construct_landscape('shifted_underparam', {'eps': 0.05, 'base': 'ring', 'eigenvalues': [1.0, 2.0]})
        self.assertFalse(f.overparametrized)
        self.assertEqual(f.minimizer_set.intrinsic_dim, 1)
        self.assertAlmostEqual(float(f.value(np.array([0.0, 1.0, 0.0]))), 0.05, places=14)


if __name__ == '__main__':
    unittest.main()
