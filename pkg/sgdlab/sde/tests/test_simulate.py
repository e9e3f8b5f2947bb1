import math
import os
import tempfile
import unittest

import numpy as np
import pytest

from sgdlab.landscapes import construct_landscape
from sgdlab.sde.integrate import mpi_available
from sgdlab.sde import (
    NoiseModel,
    em_step,
    SdeConfig,
    Checkpoint,
    TrajectoryEnsemble,
    simulate_ensemble,
    checkpoint_steps,
    SimulationError,
    EnsembleDivergedError,
    dump_checkpoints,
    load_ensemble,
)
from sgdlab.utils.sgdlab_enums import InitialDistribution, NoiseKind


def _config(n_paths=20, n_steps=50, step=1e-2, every=10, point=None, **kwargs):
    config = SdeConfig()
    config.n_paths = n_paths
    config.n_steps = n_steps
    config.step = step
    config.checkpoint_every = every
    if point is None:
        config.initial.kind = InitialDistribution.box
    else:
        config.initial.point = point
    for key, val in kwargs.items():
        setattr(config, key, val)
    return config


class TestEmStep(unittest.TestCase):
    def test_gradient_descent(self):
        f = construct_landscape('radial_power', {'lam': 1.0, 'k': 2.0})
        out = em_step(np.array([1.0, 0.0]), f, NoiseModel.none(), 0.1, None)
        np.testing.assert_allclose(out, [0.8, 0.0], atol=1e-15)

    def test_homogeneous_at_minimum(self):
        f = construct_landscape('radial_power', {'lam': 1.0, 'k': 2.0})
        out = em_step(np.zeros(2), f, NoiseModel.homogeneous(0.04), 0.01, np.array([1.0, 1.0]))
        np.testing.assert_allclose(out, [0.02, 0.02], atol=1e-15)

    def test_ml_noise_vanishes_on_minimizers(self):
        f = construct_landscape('circle_codim2')
        rng = np.random.default_rng(3)
        theta = f.minimizer_set.point_at(np.array([0.0, 0.5 * math.pi, 1.0, 4.0]))
        xi = rng.standard_normal(theta.shape)
        out = em_step(theta, f, NoiseModel.ml_isotropic(0.1, 1.0), 0.01, xi)
        np.testing.assert_allclose(out, theta, atol=1e-12)

    def test_batched(self):
        f = construct_landscape('quadratic_window', {'lam': 1.0, 'dim': 2})
        theta = np.array([[1.0, 0.0], [0.0, -1.0]])
        xi = np.ones((2, 2))
        out = em_step(theta, f, NoiseModel.homogeneous(1.0), 0.25, xi)
        np.testing.assert_allclose(out, [[1.0, 0.5], [0.5, 0.0]], atol=1e-15)


class TestNoiseModel(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(SimulationError):
            NoiseModel.homogeneous(0.0)
        with self.assertRaises(SimulationError):
            NoiseModel.ml_isotropic(0.1, None)
        with self.assertRaises(SimulationError):
            NoiseModel.ml_isotropic(0.1, -1.0)

    def test_generator_convention(self):
        noise = NoiseModel.for_generator(NoiseKind.ml_isotropic, 0.1, 2.0)
        self.assertAlmostEqual(noise.eta, 0.2)
        self.assertAlmostEqual(noise.effective_eta_sigma, 0.2)
        self.assertAlmostEqual(noise.eta_sigma, 0.4)
        self.assertEqual(NoiseModel.for_generator('none').kind, NoiseKind.none)

    def test_kind_by_name(self):
        self.assertEqual(NoiseModel(kind='none').kind, NoiseKind.none)
        noise = NoiseModel.for_generator('homogeneous', 0.25)
        self.assertEqual(noise.kind, NoiseKind.homogeneous)
        self.assertAlmostEqual(noise.effective_eta, 0.25)
        self.assertEqual(NoiseModel('ml_isotropic', eta=0.5, sigma=2.0).eta_sigma, 1.0)
        self.assertEqual(NoiseModel(NoiseKind.homogeneous.value, eta=1.0).kind, NoiseKind.homogeneous)
        with self.assertRaises(SimulationError):
            NoiseModel(kind='langevin', eta=1.0)

    def test_amplitude_clamps(self):
        noise = NoiseModel.ml_isotropic(1.0, 1.0)
        np.testing.assert_allclose(noise.amplitude([-1e-18, 4.0]), [0.0, 2.0])


class TestSimulateEnsemble(unittest.TestCase):
    def test_deterministic_across_layout(self):
        f = construct_landscape('radial_power', {'lam': 1.0, 'k': 2.0})
        noise = NoiseModel.homogeneous(0.5)
        a = simulate_ensemble(f, noise, _config(n_paths=50, n_steps=40, block_size=50))
        b = simulate_ensemble(f, noise, _config(n_paths=50, n_steps=40, block_size=7, n_threads=3))
        self.assertEqual(a.times, b.times)
        for ca, cb in zip(a.checkpoints, b.checkpoints):
            np.testing.assert_array_equal(ca.path_index, cb.path_index)
            np.testing.assert_array_equal(ca.states, cb.states)

    def test_seed_changes_paths(self):
        f = construct_landscape('radial_power', {'lam': 1.0, 'k': 2.0})
        noise = NoiseModel.homogeneous(0.5)
        a = simulate_ensemble(f, noise, _config(seed=1))
        b = simulate_ensemble(f, noise, _config(seed=2))
        self.assertFalse(np.array_equal(a.final_states, b.final_states))

    def test_zero_noise_is_gradient_descent(self):
        f = construct_landscape('quadratic_window', {'lam': 0.5, 'dim': 2})
        ens = simulate_ensemble(f, NoiseModel.none(), _config(n_paths=3, n_steps=25, every=5, point=[1.0, 0.5]))
        theta = np.array([1.0, 0.5])
        for _ in range(25):
            theta = em_step(theta, f, NoiseModel.none(), 1e-2, None)
        for state in ens.final_states:
            np.testing.assert_array_equal(state, theta)
        np.testing.assert_allclose(ens.times, [0.0, 0.05, 0.1, 0.15, 0.2, 0.25])
        self.assertEqual(ens.max_noise_intensity, 0.0)

    def test_ornstein_uhlenbeck_variance(self):
        f = construct_landscape('radial_power', {'lam': 0.5, 'k': 2.0, 'dim': 1})
        eta = 0.2
        n = 4000
        ens = simulate_ensemble(f, NoiseModel.homogeneous(eta),
                                _config(n_paths=n, n_steps=1000, every=1000, point=[0.0], seed=11))
        var = float(np.var(ens.final_states[:, 0], ddof=1))
        se = 0.5 * eta * math.sqrt(2.0 / (n - 1))
        self.assertAlmostEqual(var, 0.5 * eta, delta=3 * se + 1e-3)
        self.assertAlmostEqual(ens.max_noise_intensity, eta)

    def test_weak_order_mean(self):
        f = construct_landscape('radial_power', {'lam': 0.5, 'k': 2.0, 'dim': 1})
        noise = NoiseModel.homogeneous(0.2)
        n = 20000
        errors = []
        for h in (0.1, 0.01):
            steps = int(round(1.0 / h))
            ens = simulate_ensemble(f, noise, _config(n_paths=n, n_steps=steps, step=h, every=steps, point=[1.0]))
            x = ens.final_states[:, 0]
            se = float(np.std(x, ddof=1)) / math.sqrt(n)
            self.assertAlmostEqual(float(np.mean(x)), (1 - h) ** steps, delta=3 * se)
            errors.append(abs(float(np.mean(x)) - math.exp(-1.0)))
        self.assertLess(errors[1], errors[0])

    def test_trap_on_minimizers(self):
        f = construct_landscape('circle_codim2')
        ens = simulate_ensemble(f, NoiseModel.ml_isotropic(0.5, 1.0),
                                _config(n_paths=10, n_steps=100, point=[1.0, 0.0, 0.0]))
        for ck in ens.checkpoints:
            np.testing.assert_array_equal(ck.states, np.tile([1.0, 0.0, 0.0], (10, 1)))

    def test_all_diverged(self):
        f = construct_landscape('radial_power', {'lam': 1.0, 'k': 2.0})
        config = _config(n_paths=5, n_steps=20, step=2.0, every=5, point=[1.0, 1.0], blowup_radius=100.0)
        with self.assertRaises(EnsembleDivergedError) as ctx:
            simulate_ensemble(f, NoiseModel.none(), config)
        self.assertEqual(ctx.exception.diverged_count, 5)

    def test_config_validation(self):
        f = construct_landscape('radial_power', {'lam': 1.0, 'k': 2.0})
        with self.assertRaises(SimulationError):
            simulate_ensemble(f, NoiseModel.none(), _config(n_steps=5, every=10))
        with self.assertRaises(SimulationError):
            simulate_ensemble(f, NoiseModel.none(), _config(point=[1.0, 2.0, 3.0]))
        config = SdeConfig()
        with self.assertRaises(ValueError):
            config.step = -1.0

    def test_checkpoint_steps(self):
        self.assertEqual(checkpoint_steps(10, 4), [0, 4, 8, 10])
        self.assertEqual(checkpoint_steps(10, 5), [0, 5, 10])

    def test_dump_and_load(self):
        f = construct_landscape('radial_power', {'lam': 1.0, 'k': 2.0})
        ens = simulate_ensemble(f, NoiseModel.homogeneous(0.1), _config(n_paths=6, n_steps=20))
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'paths.csv')
            dump_checkpoints(ens, path)
            with open(path) as fh:
                self.assertEqual(fh.readline().strip(), 'time,path,coord_0,coord_1')
            back = load_ensemble(path)
        self.assertEqual(back.n_paths, 6)
        self.assertEqual(back.diverged_count, 0)
        np.testing.assert_array_equal(back.final_states, ens.final_states)

    def test_non_finite_states_rejected(self):
        with self.assertRaises(SimulationError):
            TrajectoryEnsemble(config=None, checkpoints=[
                Checkpoint(time=0.0, path_index=np.array([0]), states=np.array([[np.nan]]))],
                diverged_count=0, n_paths=1)


@unittest.skipIf(not mpi_available, 'mpi4py is not available')
class TestParallel(unittest.TestCase):
    @pytest.mark.parallel
    @pytest.mark.all_proc
    def test_matches_serial(self):
        f = construct_landscape('radial_power', {'lam': 1.0, 'k': 2.0})
        noise = NoiseModel.homogeneous(0.5)
        serial = simulate_ensemble(f, noise, _config(n_paths=30, n_steps=40, block_size=8))
        parallel = simulate_ensemble(f, noise, _config(n_paths=30, n_steps=40, block_size=8, parallel=True))
        self.assertEqual(serial.diverged_count, parallel.diverged_count)
        for ca, cb in zip(serial.checkpoints, parallel.checkpoints):
            np.testing.assert_array_equal(ca.path_index, cb.path_index)
            np.testing.assert_array_equal(ca.states, cb.states)


if __name__ == '__main__':
    unittest.main()
