"""Tests for the command-line front end"""

import io
import json
import unittest
import tempfile
from pathlib import Path
from unittest import mock

from cli import RunConfig, build_parser, main, resolve_config
from domain.errors import UsageError
from domain.estimate import CumulativeForm
from infrastructure.config import AppConfiguration, ConfigManager


class TestResolveConfig(unittest.TestCase):
    """Test flag parsing and validation"""

    def resolve(self, argv, defaults=None) -> RunConfig:
        return resolve_config(build_parser().parse_args(argv), defaults or AppConfiguration())

    def test_simulate_defaults(self):
        config = self.resolve(['simulate'])

        self.assertEqual(config.models, [1, 2, 3, 4])
        self.assertEqual(config.reps, 1000)
        self.assertEqual([c.label for c in config.estimator_configs()], ['OSIR_5'])

    def test_config_file_values_fill_missing_flags(self):
        config = self.resolve(['simulate', '--seed', '9'], AppConfiguration(seed=1, reps=50, slices=6))

        self.assertEqual((config.seed, config.reps, config.slices), (9, 50, 6))

    def test_methods_are_repeatable(self):
        config = self.resolve(['simulate', '--method', 'sir', '--method', 'cume', '--slices', '5'])

        self.assertEqual([c.label for c in config.estimator_configs()], ['SIR', 'CUME'])

    def test_bench_reps(self):
        self.assertEqual(self.resolve(['bench']).reps, 200)
        self.assertEqual(self.resolve(['bench', '--full']).reps, 1000)

    def test_level_must_be_below_slices(self):
        with self.assertRaises(UsageError):
            self.resolve(['simulate', '--slices', '4', '--level', '4'])

    def test_negative_seed(self):
        with self.assertRaises(UsageError):
            self.resolve(['simulate', '--seed', '-1'])

    def test_bad_dimension(self):
        with self.assertRaises(UsageError):
            self.resolve(['fit', '--input', 'x.csv', '--dim', 'many'])

    def test_unknown_method(self):
        with self.assertRaises(UsageError):
            self.resolve(['simulate', '--method', 'pca'])

    def test_workers_default_to_all_cpus(self):
        self.assertEqual(self.resolve(['simulate']).workers, 0)

    def test_cume_form(self):
        """Should default CUME to cumulative sums and accept the mean form"""
        default = self.resolve(['simulate', '--method', 'cume']).estimator_configs()[0]
        mean = self.resolve(['simulate', '--method', 'cume', '--cume-form', 'mean']).estimator_configs()[0]

        self.assertIs(default.resolved_form, CumulativeForm.SUM)
        self.assertEqual(mean.label, 'CUME_mean')

    def test_report_config_lists_estimators(self):
        resolved = self.resolve(['simulate', '--method', 'osir', '--slices', '10']).to_dict()

        self.assertEqual(resolved['estimators'][0]['level'], 5)


class TestMain(unittest.TestCase):
    """Test end-to-end runs and exit codes"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.dir = Path(self.temp_dir)
        self.config = str(self.dir / 'config.yaml')

    def tearDown(self):
        import shutil
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def run_main(self, argv) -> int:
        with mock.patch('sys.stderr', io.StringIO()):
            return main(argv + ['--config', self.config])

    def test_generate_then_fit(self):
        """Should fit a generated dataset and report the BIC curve"""
        data_path = self.dir / 'model1.csv'
        report_path = self.dir / 'fit.json'

        self.assertEqual(self.run_main(['generate', '--model', '1', '--seed', '2', '--output', str(data_path)]), 0)
        code = self.run_main([
            'fit', '--input', str(data_path), '--response', 'y', '--method', 'osir',
            '--slices', '10', '--level', '5', '--dim', 'auto', '--output', str(report_path),
        ])

        self.assertEqual(code, 0)
        report = json.loads(report_path.read_text())
        self.assertEqual(report['command'], 'fit')
        self.assertIsNotNone(report['payload']['bic_curve'])
        self.assertEqual(report['payload']['method']['label'], 'OSIR_5')
        self.assertEqual(report['config']['level'], 5)

    def test_simulate_csv(self):
        report_path = self.dir / 'sim.csv'

        code = self.run_main([
            'simulate', '--model', '1', '--method', 'sir', '--slices', '10',
            '--reps', '3', '--seed', '7', '--format', 'csv', '--output', str(report_path),
        ])

        self.assertEqual(code, 0)
        lines = report_path.read_text().strip().splitlines()
        self.assertTrue(lines[0].startswith('model,method,H,L,mean_r'))
        self.assertEqual(len(lines), 2)

    def test_config_command_saves_defaults(self):
        """Should write the given settings and use them in later runs"""
        code = self.run_main(['config', '--slices', '6', '--seed', '3', '--format', 'csv'])

        self.assertEqual(code, 0)
        saved = ConfigManager(Path(self.config)).load()
        self.assertEqual((saved.slices, saved.seed, saved.output_format), (6, 3, 'csv'))

        self.assertEqual(self.run_main(['config', '--workers', '2']), 0)
        saved = ConfigManager(Path(self.config)).load()
        self.assertEqual((saved.slices, saved.workers), (6, 2))

    def test_config_command_rejects_invalid_settings(self):
        self.assertEqual(self.run_main(['config', '--slices', '4', '--level', '4']), 2)
        self.assertFalse(Path(self.config).exists())

    def test_usage_error_exits_two(self):
        self.assertEqual(self.run_main(['simulate', '--slices', '4', '--level', '7']), 2)

    def test_argparse_error_exits_two(self):
        with mock.patch('sys.stderr', io.StringIO()):
            self.assertEqual(main(['simulate', '--reps', 'many']), 2)

    def test_missing_input_exits_one(self):
        """Should report ingestion failures with exit code 1"""
        code = self.run_main(['fit', '--input', str(self.dir / 'absent.csv')])

        self.assertEqual(code, 1)


if __name__ == '__main__':
    unittest.main()
