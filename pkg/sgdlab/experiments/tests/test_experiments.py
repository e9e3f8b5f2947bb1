import glob
import json
import math
import os
import tempfile
import unittest

from sgdlab.experiments import (
    DEFAULTS,
    ExperimentConfigError,
    Report,
    ReportError,
    build_landscape,
    emit_report,
    lattice_cases,
    load_config,
    noise_model,
    run,
    write_config,
)
from sgdlab.experiments.cli import build_arg_parser, config_from_args, main
from sgdlab.utils.io_utils import read_csv, read_json
from sgdlab.utils.sgdlab_enums import ExperimentId, ReportFormat

CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'configs')


def _fpe_small(output_dir):
    return {
        'experiment': 'fpe_convergence',
        'seed': 7,
        'output_dir': output_dir,
        'parameters': {'cells': 100, 'steps': 100, 'checkpoint_every': 10, 'fit_window': [0.0, 5.0],
                       'residual_levels': 2, 'window_samples': 256},
    }


def _run_small(test, data):
    """Run a reduced config; returns the report, its artifact names and the written report.json."""
    with tempfile.TemporaryDirectory() as tmp:
        report = run(load_config(dict(data, output_dir=tmp)))
        names = sorted(os.path.basename(p) for p in report.artifacts)
        test.assertEqual(sorted(os.listdir(tmp)), names)
        written = read_json(os.path.join(tmp, 'report.json'))
    test.assertEqual(sorted(written['flags']), sorted(report.flags))
    return report, names, written


class TestConfig(unittest.TestCase):
    def test_shipped_configs_round_trip(self):
        paths = sorted(glob.glob(os.path.join(CONFIG_DIR, '*.json')))
        self.assertEqual(len(paths), len(ExperimentId))
        for path in paths:
            config = load_config(path)
            self.assertEqual(config.experiment.name, os.path.splitext(os.path.basename(path))[0])
            text = config.to_json()
            self.assertEqual(load_config(text).to_json(), text, msg=path)

    def test_shipped_landscapes_applied(self):
        for path in sorted(glob.glob(os.path.join(CONFIG_DIR, '*.json'))):
            with open(path) as f:
                data = json.load(f)
            config = load_config(path)
            entry = data.get('landscape', {}).get('entry', DEFAULTS[config.experiment]['landscape']['entry'])
            self.assertEqual(config.landscape.entry, entry, msg=path)
            self.assertEqual(build_landscape(config).name, entry, msg=path)

    def test_write_and_reload(self):
        config = load_config({'experiment': 'hardy_suite', 'seed': 11})
        with tempfile.TemporaryDirectory() as tmp:
            path = write_config(config, os.path.join(tmp, 'sub', 'hardy.json'))
            again = load_config(path)
        self.assertEqual(again.to_dict(), config.to_dict())
        self.assertEqual(again.config_hash(), config.config_hash())

    def test_hash_ignores_output_location(self):
        a = load_config({'experiment': 'integrability_lattice', 'output_dir': 'a'})
        b = load_config({'experiment': 'integrability_lattice', 'output_dir': 'b', 'threads': 3})
        c = load_config({'experiment': 'integrability_lattice', 'seed': 1})
        self.assertEqual(a.config_hash(), b.config_hash())
        self.assertNotEqual(a.config_hash(), c.config_hash())

    def test_defaults_fill_in(self):
        config = load_config({'experiment': 'fpe_convergence'})
        self.assertEqual(config.landscape.entry, 'quadratic_window')
        self.assertEqual(config.parameters.value()['cells'], 400)
        noise, eta_sigma = noise_model(config)
        self.assertEqual(eta_sigma, 0.8)
        self.assertEqual(noise.effective_eta_sigma, 0.8)

    def test_codim_two_sgd_rejected(self):
        with self.assertRaises(ExperimentConfigError) as ctx:
            load_config({'experiment': 'flat_selection_sgd', 'landscape': {'entry': 'circle_codim2'}})
        self.assertIn('noise_exponents', str(ctx.exception))

    def test_fpe_window_rejected(self):
        with self.assertRaises(ExperimentConfigError) as ctx:
            load_config({'experiment': 'fpe_convergence', 'noise': {'eta_sigma': 1.2}})
        self.assertIn('convergence window', str(ctx.exception))

    def test_fit_window_outside_run(self):
        with self.assertRaises(ExperimentConfigError):
            load_config({'experiment': 'fpe_convergence', 'parameters': {'fit_window': [20.0, 80.0]}})

    def test_unknown_fields(self):
        with self.assertRaises(ExperimentConfigError):
            load_config({'experiment': 'hardy_suite', 'parameters': {'bogus': 1}})
        with self.assertRaises(ExperimentConfigError):
            load_config({'experiment': 'no_such_experiment'})
        with self.assertRaises(ExperimentConfigError):
            load_config({'seed': 1})
        with self.assertRaises(ExperimentConfigError):
            load_config('{not json')

    def test_nonintegrable_alpha_rejected(self):
        with self.assertRaises(ExperimentConfigError):
            load_config({'experiment': 'flat_selection_quadrature', 'parameters': {'alphas': [-1.2, -1.1]}})

    def test_inconsistent_noise(self):
        with self.assertRaises(ExperimentConfigError):
            load_config({'experiment': 'ml_global_min_selection',
                         'noise': {'eta': 0.5, 'sigma': 2.0, 'eta_sigma': 0.5}})

    def test_empty_lattice_family(self):
        with self.assertRaises(ExperimentConfigError):
            load_config({'experiment': 'integrability_lattice', 'parameters': {'families': [[4, 0, 2.0]]}})


class TestReport(unittest.TestCase):
    def test_empty_metrics_rejected(self):
        with self.assertRaises(ReportError):
            Report(ExperimentId.hardy_suite, {})

    def test_passed(self):
        self.assertTrue(Report(ExperimentId.hardy_suite, {'x': 1.0}, {'a': True}).passed)
        self.assertFalse(Report(ExperimentId.hardy_suite, {'x': 1.0}, {'a': True, 'b': False}).passed)

    def test_json_only(self):
        report = Report(ExperimentId.integrability_lattice, {'cases': 1},
                        tables={'lattice': (['m'], [[2]])})
        with tempfile.TemporaryDirectory() as tmp:
            paths = emit_report(report, tmp, ReportFormat.json)
            self.assertEqual([os.path.basename(p) for p in paths], ['report.json'])
            data = read_json(paths[0])
        self.assertEqual(data['experiment'], 'integrability_lattice')
        self.assertEqual(data['metrics'], {'cases': 1})

    def test_unwritable_directory(self):
        report = Report(ExperimentId.hardy_suite, {'x': 1.0})
        with tempfile.TemporaryDirectory() as tmp:
            blocker = os.path.join(tmp, 'file')
            with open(blocker, 'w') as f:
                f.write('x')
            with self.assertRaises(ReportError) as ctx:
                emit_report(report, os.path.join(blocker, 'out'))
        self.assertIsNotNone(ctx.exception.path)


class TestRuns(unittest.TestCase):
    def test_lattice_cases(self):
        cases = lattice_cases([[2, 0, 4.0], [3, 1, 4.0], [4, 0, 4.0], [6, 1, 4.0]])
        self.assertEqual(len(cases), 24)
        self.assertEqual(cases[0], (2, 0, 4.0, -1.5))

    def test_integrability_lattice(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = load_config({'experiment': 'integrability_lattice', 'output_dir': tmp,
                                  'parameters': {'families': [[4, 0, 4.0]]}})
            report = run(config)
            header, rows = read_csv(os.path.join(tmp, 'lattice.csv'))
        self.assertEqual(report.metrics['cases'], 6)
        self.assertTrue(report.passed)
        self.assertEqual(header, ['m', 'n', 'gamma', 'alpha', 'classifier', 'quadrature'])
        self.assertEqual(len(rows), 6)
        self.assertEqual(rows[0][4], 'not_locally_integrable')
        self.assertEqual(rows[-1][4], 'locally_not_globally')

    def test_fpe_artifacts_and_determinism(self):
        with tempfile.TemporaryDirectory() as tmp:
            first = run(load_config(_fpe_small(os.path.join(tmp, 'a'))))
            second = run(load_config(_fpe_small(os.path.join(tmp, 'b'))))
            names = sorted(os.path.basename(p) for p in first.artifacts)
            self.assertEqual(names, ['decay.csv', 'invariant.csv', 'report.json'])
            for name in ('decay.csv', 'invariant.csv'):
                with open(os.path.join(tmp, 'a', name), 'rb') as f:
                    a = f.read()
                with open(os.path.join(tmp, 'b', name), 'rb') as f:
                    b = f.read()
                self.assertEqual(a, b, msg=name)
            data = read_json(os.path.join(tmp, 'a', 'report.json'))
        for key in ('fitted_nu', 'fit_r2', 'spectral_gap', 'predicted_nu', 'mass_drift', 'residual_ratio_0'):
            self.assertIn(key, first.metrics)
        self.assertEqual(first.metrics['fitted_nu'], second.metrics['fitted_nu'])
        self.assertEqual(data['provenance']['config_hash'], first.provenance['config_hash'])
        self.assertEqual(data['provenance']['seed'], 7)
        self.assertIn('evolve', data['provenance']['timings'])
        self.assertLess(first.metrics['mass_drift'], 1e-10)

    def test_hardy_suite(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = load_config({
                'experiment': 'hardy_suite', 'seed': 3, 'output_dir': tmp,
                'parameters': {'hardy_cases': [[-2.0, 3]], 'alphas': [-5.0], 'gap_r_max': 15.0, 'gap_cells': 600,
                               'log_corrected': False},
            })
            report = run(config)
            self.assertTrue(os.path.exists(os.path.join(tmp, 'spectral_gaps.csv')))
        self.assertTrue(report.flags['hardy_ratios_bounded'])
        self.assertTrue(report.flags['gaps_above_constants'])
        self.assertTrue(report.flags['liouville_solves'])
        self.assertTrue(report.flags['liouville_perturbed_fails'])
        self.assertEqual(report.metrics['constant_alpha_0'], 10)
        self.assertNotIn('log_corrected_min_quotient', report.metrics)

    def test_boltzmann_stationarity(self):
        report, names, _ = _run_small(self, {
            'experiment': 'boltzmann_stationarity', 'seed': 5,
            'parameters': {'step': 1e-2, 'burn_in': 500, 'n_paths': 500, 'samples_per_path': 4,
                           'sample_every': 100, 'grid_cells': 400, 'ks_threshold': 0.1, 'block_size': 250},
        })
        self.assertEqual(names, ['empirical.csv', 'invariant.csv', 'report.json'])
        self.assertEqual(report.metrics['samples'], 2000)
        self.assertEqual(report.metrics['diverged'], 0)
        self.assertLess(report.metrics['ks_distance'], 0.1)
        self.assertTrue(report.flags['ks_below_threshold'])
        self.assertAlmostEqual(report.metrics['normalizer'], math.sqrt(math.pi), delta=1e-5)

    def test_ml_power_stationarity(self):
        report, names, _ = _run_small(self, {
            'experiment': 'ml_power_stationarity', 'seed': 6,
            'parameters': {'step': 1e-2, 'burn_in': 500, 'n_paths': 200, 'samples_per_path': 3,
                           'sample_every': 100, 'grid_cells': 4000, 'block_size': 200},
        })
        self.assertEqual(names, ['empirical.csv', 'invariant.csv', 'report.json'])
        self.assertEqual(sorted(report.flags), ['ks_below_threshold'])
        self.assertAlmostEqual(report.metrics['alpha'], -2.25)
        self.assertTrue(0 <= report.metrics['ks_distance'] <= 1)

    def test_ml_global_min_selection(self):
        report, names, _ = _run_small(self, {
            'experiment': 'ml_global_min_selection', 'seed': 8,
            'parameters': {'n_steps': 500, 'n_paths': 200},
        })
        self.assertEqual(names, ['occupancy.csv', 'report.json'])
        self.assertEqual(sorted(report.flags), ['ml_beats_homogeneous', 'ml_concentrates'])
        for key in ('ml_fraction', 'hom_fraction'):
            self.assertTrue(0 <= report.metrics[key] <= 1)
        self.assertEqual(report.metrics['eta_sigma'], 0.5)

    def test_flat_selection_quadrature_discriminates(self):
        report, names, written = _run_small(self, {
            'experiment': 'flat_selection_quadrature',
            'parameters': {'alphas': [-0.9, -0.95], 'etas': [0.1, 0.01], 'tube_radius': 0.05},
        })
        self.assertEqual(names, ['marginal_boltzmann_0.csv', 'marginal_boltzmann_1.csv', 'marginal_power_0.csv',
                                 'marginal_power_1.csv', 'profile_g1.csv', 'profile_g2.csv', 'report.json'])
        self.assertEqual(sorted(report.flags), ['boltzmann_tv_below_threshold', 'boltzmann_tv_decreasing',
                                                'power_g2_beats_g1', 'power_tv_decreasing'])
        m = report.metrics
        # the profiles are closer to each other than the threshold
        self.assertLess(m['profile_separation'], 0.02)
        # f^alpha follows det^(-1/2), not the agm profile
        self.assertLess(m['tv_g1_alpha_1'], m['tv_g1_alpha_0'])
        self.assertLess(m['tv_g1_alpha_1'], m['tv_g2_alpha_1'])
        self.assertFalse(report.flags['power_g2_beats_g1'])
        self.assertFalse(written['passed'])

    def test_flat_selection_sgd(self):
        small = {'step': 1e-3, 'n_steps': 2000, 'n_paths': 200, 'checkpoint_every': 1000, 'bins': 16,
                 'quadrature_nodes': 8, 'block_size': 200}
        report, names, _ = _run_small(self, {'experiment': 'flat_selection_sgd', 'seed': 9, 'parameters': small})
        self.assertEqual(names, ['occupancy.csv', 'profile_g1.csv', 'profile_g2.csv', 'report.json'])
        self.assertEqual(sorted(report.flags), ['g2_beats_g1', 'tv_g2_below_threshold'])
        self.assertAlmostEqual(report.metrics['threshold_eta_sigma'], 2.0 / 3.0)
        self.assertGreater(report.metrics['profile_separation'], 0)
        self.assertNotIn('exploratory', report.metrics)

        report, _, _ = _run_small(self, {'experiment': 'flat_selection_sgd', 'seed': 9, 'parameters': small,
                                         'noise': {'eta_sigma': 0.5}})
        self.assertEqual(report.flags, {})
        self.assertEqual(report.metrics['exploratory'], 1)
        self.assertTrue(report.passed)

    def test_underparam_flat_limit(self):
        report, names, _ = _run_small(self, {
            'experiment': 'underparam_flat_limit',
            'parameters': {'bins': 16, 'n_r': 32, 'n_psi': 32, 'n_phi': 2},
        })
        self.assertEqual(names, ['marginal_eta_0.csv', 'marginal_eta_1.csv', 'marginal_eta_2.csv',
                                 'profile_g1.csv', 'report.json'])
        self.assertEqual(sorted(report.flags), ['tv_decreasing'])
        for i in range(3):
            self.assertTrue(0 <= report.metrics['tv_g1_eta_{0}'.format(i)] <= 1)
        self.assertLess(report.metrics['alpha_2'], report.metrics['alpha_0'])


class TestCli(unittest.TestCase):
    def test_parse_module_command(self):
        args = build_arg_parser().parse_args(['invariant', '--set', 'families=[[4, 0, 4.0]]', '--seed', '5'])
        data = config_from_args(args)
        self.assertEqual(data['experiment'], 'integrability_lattice')
        self.assertEqual(data['parameters'], {'families': [[4, 0, 4.0]]})
        self.assertEqual(data['seed'], 5)
        self.assertNotIn('noise', data)

    def test_parse_noise(self):
        args = build_arg_parser().parse_args(['fpe', '--eta-sigma', '0.5', '--threads', '2'])
        data = config_from_args(args)
        self.assertEqual(data['noise'], {'eta_sigma': 0.5})
        self.assertEqual(data['threads'], 2)

    def test_run_passes(self):
        with tempfile.TemporaryDirectory() as tmp:
            code = main(['invariant', 'integrability_lattice', '--set', 'families=[[4, 0, 4.0]]',
                         '--out', tmp, '--log-level', 'WARNING'])
            self.assertEqual(code, 0)
            self.assertTrue(os.path.exists(os.path.join(tmp, 'report.json')))

    def test_config_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'lattice.json')
            with open(path, 'w') as f:
                json.dump({'experiment': 'integrability_lattice', 'parameters': {'families': [[4, 0, 4.0]]}}, f)
            out = os.path.join(tmp, 'out')
            code = main(['experiment', 'run', path, '--out', out, '--log-level', 'WARNING'])
            self.assertEqual(code, 0)
            self.assertEqual(read_json(os.path.join(out, 'report.json'))['metrics']['cases'], 6)

    def test_rejected_config(self):
        with tempfile.TemporaryDirectory() as tmp:
            self.assertEqual(main(['fpe', '--eta-sigma', '1.5', '--out', tmp, '--log-level', 'ERROR']), 2)


if __name__ == '__main__':
    unittest.main()
