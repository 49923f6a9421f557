# -*- coding: utf-8 -*-
"""
===============================================================================

   CoalescentFlow:
   Toolkit to run convergence experiments on the typed Kingman coalescent.

   Copyright (c) 2026, CoalescentFlow contributors. All rights reserved.

   Redistribution and use of this code in source and binary forms, with
   or without modification, are permitted provided that the following
   conditions are met:
   * Redistributions of source code must retain the above copyright notice,
     this list of conditions and the following disclaimer.
   * Redistributions in binary form must reproduce the above copyright notice,
     this list of conditions and the following disclaimer in the documentation
     and/or other materials provided with the distribution.

   THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS
   "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED
   TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR
   PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR
   CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL,
   EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO,
   PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS;
   OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY,
   WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR
   OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SAMPLE CODE, EVEN IF
   ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.

===============================================================================
"""
import contextlib
import io
import json
import logging
import math
import os
import shutil
import tempfile
import unittest

import pandas as pd

from coalescentflow.core.enumerations import RMode
from coalescentflow.core.exceptions import ConfigError
from coalescentflow.core.jsoncomments import JsonComments
from coalescentflow.core.processingargs import ProcessingArgs
from coalescentflow.core.settingsmanager import SettingsManager
from coalescentflow.experiments.experimentconfig import EXPERIMENT_NAMES, ExperimentConfig
from coalescentflow.experiments.experimentmanager import ERROR_FILE, SUMMARY_FILE, ExperimentManager
from coalescentflow.labapp import lab_app

DATA_FOLDER = os.path.join(os.path.dirname(__file__), 'data')

PIM_DOCUMENT = {
    'experiment': 'simulate-backward',
    'model': {'theta': 4.0, 'q': [0.5, 0.5]},
    'y0': [0.4, 0.6]
}


class TestExperiments(unittest.TestCase):
    """
    Tests for `experiments` package and the console application.
    """
    logger = logging.getLogger(__name__)
    logger.setLevel(logging.INFO)

    def setUp(self):
        """
        Set up test fixtures, if any.
        """
        self.temp_folder = tempfile.mkdtemp(prefix='coalescentflow-test_')
        pass

    def tearDown(self):
        """
        Tear down test fixtures, if any.
        """
        shutil.rmtree(self.temp_folder, ignore_errors=True)
        pass

    def config_error_field(self, document, experiment=None, **kwargs) -> str:
        """
        Returns the field named by the ConfigError raised loading the specified document.
        """
        manager = ExperimentManager(environ={})
        with self.assertRaises(ConfigError) as context:
            manager.load_from_dict(document, experiment, **kwargs)

        return context.exception.field

    def run_experiment(self, config_file: str, folder: str, threads: int = 1):
        """
        Loads and runs the specified config file writing the artifacts to 'folder'.
        """
        manager = ExperimentManager(environ={})
        config = manager.load_from_file(os.path.join(DATA_FOLDER, config_file), threads=threads, output_dir=folder)

        with ProcessingArgs(config.output_dir, config.seed, config.threads) as processing_args:
            result, summary = manager.run(processing_args)

        return result, summary

    def assert_all_passed(self, result, summary, names):
        """
        Asserts the result holds exactly the specified checks and all of them passed.
        """
        self.assertEqual(sorted(result.checks), sorted(names))
        for name in names:
            self.assertTrue(result.checks[name], 'Check "{}" failed: {}'.format(name, summary['statistics']))

        self.assertTrue(result.passed)
        self.assertTrue(summary['passed'])
        pass

    def read_text(self, folder: str, file_name: str) -> str:
        with open(os.path.join(folder, file_name), 'r', encoding='utf-8') as fp:
            return fp.read()

    def test_catalog(self):
        """
        Test every experiment is deployed under its subcommand name.
        """
        catalog = ExperimentManager.catalog()
        self.assertEqual(sorted(catalog.keys()), sorted(EXPERIMENT_NAMES))

        for info in catalog.values():
            self.assertEqual(info['type'], 'experiment')
            self.assertIsInstance(info['tolerances'], dict)
        pass

    def test_comments_are_removed(self):
        """
        Test comments and trailing commas of config files are removed keeping line numbers.
        """
        lines = ['{', '  # A comment.', '  // Another comment.', '  "a": 1,', '  /* Block', '  comment */', '  "b": [1, 2,],', '}']
        text = JsonComments.remove_comments(lines)
        self.assertEqual(json.loads(text), {'a': 1, 'b': [1, 2]})
        self.assertEqual(len(text.splitlines()), len(lines))
        pass

    def test_defaults(self):
        """
        Test global and experiment defaults are filled in.
        """
        manager = ExperimentManager(environ={})
        config = manager.load_from_dict(PIM_DOCUMENT)

        self.assertEqual(config.experiment, 'simulate-backward')
        self.assertEqual(config.seed, 0)
        self.assertEqual(config.paths, 1000)
        self.assertEqual(config.n_values, [100])
        self.assertEqual(config.r_mode, RMode.EXACT)
        self.assertEqual(config.tolerance('hand_table'), 1e-12)
        self.assertEqual(manager.experiment.name(), 'simulate-backward')
        pass

    def test_r_mode_default(self):
        """
        Test parent dependent targets default to the asymptotic r-mode.
        """
        document = {
            'experiment': 'gof',
            'model': {'theta': 2.0, 'matrix': [[0.7, 0.3], [0.4, 0.6]], 'proposal_q': [0.5, 0.5]},
            'y0': [0.4, 0.6]
        }
        config = ExperimentManager(environ={}).load_from_dict(document)
        self.assertEqual(config.r_mode, RMode.ASYMPTOTIC)
        self.assertFalse(config.model().is_pim)
        self.assertTrue(config.proposal_model().is_pim)
        pass

    def test_schema_errors(self):
        """
        Test schema violations name the offending key path.
        """
        self.assertEqual(self.config_error_field({'experiment': 'gof'}), 'model')
        self.assertEqual(self.config_error_field(dict(PIM_DOCUMENT, foo=1)), 'foo')
        self.assertEqual(self.config_error_field(dict(PIM_DOCUMENT, model={'theta': -1.0, 'q': [0.5, 0.5]})), 'model.theta')
        self.assertEqual(self.config_error_field(dict(PIM_DOCUMENT, paths=0)), 'paths')
        self.assertEqual(self.config_error_field(dict(PIM_DOCUMENT, n_values=[10, 'x'])), 'n_values.1')
        self.assertEqual(self.config_error_field(dict(PIM_DOCUMENT, r_mode='fast')), 'r_mode')
        pass

    def test_model_errors(self):
        """
        Test invalid mutation models are config errors.
        """
        both = {'theta': 4.0, 'q': [0.5, 0.5], 'matrix': [[0.5, 0.5], [0.5, 0.5]]}
        self.assertEqual(self.config_error_field(dict(PIM_DOCUMENT, model=both)), 'model')
        self.assertEqual(self.config_error_field(dict(PIM_DOCUMENT, model={'theta': 4.0, 'q': [0.5, 0.6]})), 'model.q')

        reducible = {'theta': 4.0, 'matrix': [[1.0, 0.0], [0.5, 0.5]]}
        self.assertEqual(self.config_error_field(dict(PIM_DOCUMENT, model=reducible)), 'model.matrix')

        jagged = {'theta': 4.0, 'matrix': [[1.0], [0.5, 0.5]]}
        self.assertEqual(self.config_error_field(dict(PIM_DOCUMENT, model=jagged)), 'model.matrix')
        pass

    def test_semantic_errors(self):
        """
        Test inconsistent dimensions and supports are config errors.
        """
        proposal = {'theta': 4.0, 'q': [0.5, 0.5], 'proposal_q': [0.2, 0.3, 0.5]}
        self.assertEqual(self.config_error_field(dict(PIM_DOCUMENT, model=proposal)), 'model.proposal_q')
        self.assertEqual(self.config_error_field(dict(PIM_DOCUMENT, y0=[0.4, 0.3, 0.3])), 'y0')

        narrow = {'delta': 0.5, 'radius': 1.0}
        self.assertEqual(self.config_error_field(dict(PIM_DOCUMENT, test_function=narrow)), 'test_function.radius')
        pass

    def test_experiment_errors(self):
        """
        Test missing, mismatched and unknown experiments or parameters.
        """
        document = dict(PIM_DOCUMENT)
        document.pop('experiment')
        self.assertEqual(self.config_error_field(document), 'experiment')
        self.assertEqual(self.config_error_field(PIM_DOCUMENT, 'gof'), 'experiment')
        self.assertEqual(self.config_error_field(dict(PIM_DOCUMENT, parameters={'foo': 1})), 'parameters.foo')
        self.assertEqual(self.config_error_field(dict(PIM_DOCUMENT, parameters={'kernelTrials': 'x'})),
                         'parameters.kernelTrials')
        pass

    def test_malformed_files(self):
        """
        Test unreadable and malformed config files.
        """
        with self.assertRaises(ConfigError) as context:
            ExperimentConfig.load_document(os.path.join(self.temp_folder, 'missing.json'))
        self.assertEqual(context.exception.field, 'config')

        with self.assertRaises(ConfigError):
            ExperimentConfig.parse_text('{"model": ')
        with self.assertRaises(ConfigError):
            ExperimentConfig.parse_text('[1, 2]')
        pass

    def test_parameters_are_cast(self):
        """
        Test config parameters are assigned with the type of their defaults.
        """
        manager = ExperimentManager(environ={})
        manager.load_from_dict(dict(PIM_DOCUMENT, parameters={'kernelTrials': '12', 'maxTheta': 3}))
        self.assertEqual(manager.experiment.kernelTrials, 12)
        self.assertEqual(manager.experiment.maxTheta, 3.0)
        self.assertIsInstance(manager.experiment.maxTheta, float)
        pass

    def test_environment_overrides(self):
        """
        Test environment variables override config keys, before command line values.
        """
        environ = {
            'COALESCENTFLOW__MODEL__THETA': '2.5',
            'COALESCENTFLOW__PATHS': '7',
            'COALESCENTFLOW__SEED': '99',
            'OTHER__PATHS': '3'
        }
        manager = ExperimentManager(environ=environ)
        config = manager.load_from_dict(PIM_DOCUMENT, seed=5)

        self.assertEqual(config.model().theta, 2.5)
        self.assertEqual(config.paths, 7)
        self.assertEqual(config.seed, 5)
        self.assertEqual(SettingsManager.environment_name('model.theta'), 'COALESCENTFLOW__MODEL__THETA')
        pass

    def test_settings_defaults(self):
        """
        Test application settings give defaults to threads, output folder and budgets.
        """
        settings = {
            'COALESCENTFLOW_APP__THREADS': '3',
            'COALESCENTFLOW_APP__OUTPUT__DIR': self.temp_folder,
            'COALESCENTFLOW_APP__STATE__BUDGET': '1000'
        }
        manager = ExperimentManager(settings=settings, environ={})
        document = dict(PIM_DOCUMENT, experiment='semigroup-gap')
        config = manager.load_from_dict(document)

        self.assertEqual(config.threads, 3)
        self.assertEqual(config.output_dir, self.temp_folder)
        self.assertEqual(manager.experiment.stateBudget, 1000)

        config = manager.load_from_dict(dict(document, threads=1))
        self.assertEqual(config.threads, 1)
        pass

    def test_canonical_echo(self):
        """
        Test the canonical text round-trips and the echo drops execution keys.
        """
        config = ExperimentManager(environ={}).load_from_dict(PIM_DOCUMENT, threads=4, output_dir=self.temp_folder)
        self.assertEqual(json.loads(config.canonical()), config.document)

        echo = config.echo()
        self.assertNotIn('threads', echo)
        self.assertNotIn('output', echo)
        self.assertEqual(echo['model'], {'theta': 4.0, 'q': [0.5, 0.5]})
        self.assertEqual(config.threads, 4)
        pass

    def test_simulate_backward(self):
        """
        Test the backward simulation experiment and its artifacts.
        """
        result, summary = self.run_experiment('test_simulate_backward.json', self.temp_folder)

        self.assertTrue(result.passed)
        for name in ('kernel_normalization', 'hand_table', 'absorbed', 'tau_bound'):
            self.assertTrue(result.checks[name])

        paths = pd.read_csv(os.path.join(self.temp_folder, 'paths.csv'))
        self.assertEqual(len(paths), 80)
        self.assertEqual(list(paths.columns[:5]), ['n', 'path', 'tau', 'coalescences', 'mutations'])
        self.assertTrue((paths['coalescences'] == paths['n'] - 1).all())
        self.assertTrue((paths['tau'] == paths['coalescences'] + paths['mutations']).all())

        stored = json.loads(self.read_text(self.temp_folder, SUMMARY_FILE))
        self.assertEqual(stored['seed'], 42)
        self.assertEqual(stored['experiment'], 'simulate-backward')
        self.assertTrue(stored['passed'])
        self.assertEqual(stored['checks'], summary['checks'])
        pass

    def test_thread_reproducibility(self):
        """
        Test artifacts are byte-identical whatever the number of threads.
        """
        for config_file, tables in (('test_simulate_backward.json', ['paths.csv']),
                                    ('test_gof.json', ['gof.csv', 'histogram.csv'])):
            single = os.path.join(self.temp_folder, 'single')
            double = os.path.join(self.temp_folder, 'double')
            self.run_experiment(config_file, single, threads=1)
            self.run_experiment(config_file, double, threads=2)

            for file_name in tables + [SUMMARY_FILE]:
                self.assertEqual(self.read_text(single, file_name), self.read_text(double, file_name))

            shutil.rmtree(single)
            shutil.rmtree(double)
        pass

    def test_gof(self):
        """
        Test the unweighted goodness-of-fit experiment writes one row per mutation type.
        """
        result, summary = self.run_experiment('test_gof.json', self.temp_folder)

        gof = pd.read_csv(os.path.join(self.temp_folder, 'gof.csv'))
        self.assertEqual(len(gof), 4)
        self.assertEqual(sorted(zip(gof['i'], gof['j'])), [(1, 1), (1, 2), (2, 1), (2, 2)])
        self.assertTrue((gof['weighted'] == 0).all())
        self.assertTrue((gof['tv'] <= 0.02).all())
        self.assertFalse(summary['statistics']['weighted'])
        self.assertLessEqual(summary['statistics']['max_abs_correlation']['400:0.5'], 3.0 / math.sqrt(20000))

        self.assert_all_passed(result, summary, ['chi_square', 'independence', 'total_variation'])
        pass

    def test_gof_weighted(self):
        """
        Test the weighted goodness-of-fit experiment with exact sampling ratios fits the target laws.
        """
        result, summary = self.run_experiment('test_gof_weighted.json', self.temp_folder)

        self.assertTrue(summary['statistics']['weighted'])
        self.assertEqual(summary['statistics']['r_mode'], 'exact')
        self.assertFalse(summary['warnings'])

        gof = pd.read_csv(os.path.join(self.temp_folder, 'gof.csv'))
        self.assertEqual(len(gof), 4)
        self.assertTrue((gof['weighted'] == 1).all())
        self.assertTrue((gof['tv'] <= 0.02).all())

        self.assertEqual(list(result.checks), ['total_variation'])
        self.assertTrue(result.checks['total_variation'])
        self.assertTrue(result.passed)
        pass

    def test_gof_asymptotic_ratios(self):
        """
        Test parent dependent targets are weighted with r_n = 1 and the run is flagged.
        """
        document = {
            'experiment': 'gof',
            'model': {'theta': 2.0, 'matrix': [[0.7, 0.3], [0.4, 0.6]], 'proposal_q': [0.5, 0.5]},
            'y0': [0.4, 0.6],
            'n_values': [40],
            't_values': [0.5],
            'paths': 1000,
            'seed': 5
        }
        manager = ExperimentManager(environ={})
        manager.load_from_dict(document, output_dir=self.temp_folder)
        result, summary = manager.run()

        self.assertTrue(summary['statistics']['weighted'])
        self.assertEqual(summary['statistics']['r_mode'], 'asymptotic')
        self.assertTrue(summary['warnings'])
        self.assertNotIn('chi_square', result.checks)
        self.assertIn('total_variation', result.checks)
        self.assertEqual(manager.config.tolerance('tv'), 0.02)
        pass

    def test_gof_needs_proposal(self):
        """
        Test parent dependent models can not be fitted without a proposal.
        """
        document = {
            'experiment': 'gof',
            'model': {'theta': 2.0, 'matrix': [[0.7, 0.3], [0.4, 0.6]]},
            'y0': [0.4, 0.6]
        }
        manager = ExperimentManager(environ={})
        manager.load_from_dict(document, output_dir=self.temp_folder)

        with self.assertRaises(ConfigError) as context:
            manager.run()
        self.assertEqual(context.exception.field, 'model.proposal_q')
        pass

    def test_backward_horizon(self):
        """
        Test horizons reaching the origin are config errors.
        """
        manager = ExperimentManager(environ={})
        manager.load_from_dict(dict(PIM_DOCUMENT, experiment='path-dev', t_values=[1.0]), output_dir=self.temp_folder)

        with self.assertRaises(ConfigError) as context:
            manager.run()
        self.assertEqual(context.exception.field, 't_values')
        pass

    def test_simulate_forward(self):
        """
        Test the forward simulation experiment and its artifacts.
        """
        result, summary = self.run_experiment('test_simulate_forward.json', self.temp_folder)
        self.assert_all_passed(result, summary, ['kernel_normalization', 'poisson_fit', 'deviation_decreasing'])

        paths = pd.read_csv(os.path.join(self.temp_folder, 'paths.csv'))
        self.assertEqual(len(paths), 2 * 2000)
        self.assertTrue((paths['size'] >= paths['n']).all())
        gof = pd.read_csv(os.path.join(self.temp_folder, 'gof.csv'))
        self.assertTrue((gof[gof['n'] == 160]['p_value'] > 1e-3).all())

        deviation = pd.read_csv(os.path.join(self.temp_folder, 'deviation.csv'))
        self.assertEqual(list(deviation.columns), ['n', 'paths', 'mean_deviation', 'median_deviation'])
        self.assertEqual(list(deviation['n']), [20, 160])
        self.assertLess(deviation['median_deviation'][1], deviation['median_deviation'][0])
        pass

    def test_path_deviation(self):
        """
        Test the median deviation from the limit path shrinks with n below the default threshold.
        """
        result, summary = self.run_experiment('test_path_dev.json', self.temp_folder)
        self.assert_all_passed(result, summary, ['median_decreasing', 'median_threshold'])

        deviation = pd.read_csv(os.path.join(self.temp_folder, 'deviation.csv'))
        self.assertEqual(list(deviation['n']), [20, 80, 320, 1280])
        self.assertLessEqual(deviation['median_deviation'].iloc[-1], 0.05)
        pass

    def test_generator_gap(self):
        """
        Test the generator gap decreases at a rate close to 1/n.
        """
        result, summary = self.run_experiment('test_generator_gap.json', self.temp_folder)
        self.assert_all_passed(result, summary, ['gap_decreasing', 'slope_range'])

        gaps = pd.read_csv(os.path.join(self.temp_folder, 'gaps.csv'))
        self.assertEqual(list(gaps['n']), [400, 800, 1600])
        self.assertTrue((gaps['grid_points'] > 0).all())
        self.assertAlmostEqual(summary['statistics']['slope'], -1.0, delta=0.3)
        self.assertEqual(summary['statistics']['direction'], 'backward')
        pass

    def test_semigroup_gap(self):
        """
        Test the semigroup gap decreases with n and the discrete semigroup is a contraction.
        """
        result, summary = self.run_experiment('test_semigroup_gap.json', self.temp_folder)
        self.assert_all_passed(result, summary, ['gap_decreasing', 'contraction'])

        gaps = pd.read_csv(os.path.join(self.temp_folder, 'gaps.csv'))
        self.assertEqual(list(gaps['steps']), [10, 20, 40])
        self.assertTrue((gaps['discrete_value'].abs() <= 1.0 + 1e-12).all())
        self.assertLess(summary['statistics']['truncation_tail'], 1e-10)
        pass

    def test_lr_check(self):
        """
        Test the change of measure identities hold.
        """
        result, summary = self.run_experiment('test_lr_check.json', self.temp_folder)
        self.assert_all_passed(result, summary, ['enumeration', 'analytic', 'reversal', 'history_ratio', 'monte_carlo'])
        self.assertLessEqual(
            abs(summary['statistics']['monte_carlo_mean'] - 1.0), 3.0 * summary['statistics']['monte_carlo_std_error']
        )

        enumeration = pd.read_csv(os.path.join(self.temp_folder, 'enumeration.csv'))
        self.assertEqual(len(enumeration), 2 * 3)
        self.assertEqual(json.loads(enumeration['counts'][0]), [1, 1])
        self.assertLess(summary['statistics']['enumeration_error'], 1e-10)
        pass

    def test_lr_check_needs_pim_target(self):
        """
        Test the likelihood ratio check refuses parent dependent targets.
        """
        document = {
            'experiment': 'lr-check',
            'model': {'theta': 2.0, 'matrix': [[0.7, 0.3], [0.4, 0.6]], 'proposal_q': [0.5, 0.5]},
            'y0': [0.4, 0.6]
        }
        manager = ExperimentManager(environ={})
        manager.load_from_dict(document, output_dir=self.temp_folder)

        with self.assertRaises(ConfigError) as context:
            manager.run()
        self.assertEqual(context.exception.field, 'model.matrix')
        pass

    def test_asymptotics(self):
        """
        Test the sampling probability asymptotics experiment.
        """
        result, summary = self.run_experiment('test_asymptotics.json', self.temp_folder)
        self.assert_all_passed(result, summary, [
            'sampling_gap_decreasing', 'sampling_gap', 'coalescence_rate_slope', 'mutation_rate_slope', 'level_normalization'
        ])

        sampling = pd.read_csv(os.path.join(self.temp_folder, 'sampling.csv'))
        self.assertAlmostEqual(float(sampling['approx'][0]), 1.44 / 100, places=12)
        pass

    def test_console_application(self):
        """
        Test the exit codes and error documents of the console application.
        """
        config_file = os.path.join(DATA_FOLDER, 'test_simulate_backward.json')
        output = io.StringIO()

        with contextlib.redirect_stdout(output):
            status = lab_app(['simulate-backward', '--config', config_file, '--out', self.temp_folder, '--seed', '8'])
        self.assertEqual(status, 0)
        self.assertEqual(json.loads(self.read_text(self.temp_folder, SUMMARY_FILE))['seed'], 8)

        with contextlib.redirect_stdout(output):
            status = lab_app(['gof', '--config', config_file, '--out', self.temp_folder])
        self.assertEqual(status, 2)
        error = json.loads(self.read_text(self.temp_folder, ERROR_FILE))
        self.assertEqual(error['field'], 'experiment')
        self.assertEqual(error['code'], 2)

        with contextlib.redirect_stdout(output):
            self.assertEqual(lab_app(['simulate-backward', '--out', self.temp_folder]), 2)
            self.assertEqual(lab_app(['--modules']), 0)
        pass

    def test_console_check_failure(self):
        """
        Test failed acceptance checks give exit code 1.
        """
        document = {
            'experiment': 'asymptotics',
            'model': {'theta': 4.0, 'q': [0.5, 0.5]},
            'y0': [0.4, 0.6],
            'n_values': [100, 200],
            'tolerances': {'sampling_gap': 1e-9}
        }
        config_file = os.path.join(self.temp_folder, 'failing.json')
        with open(config_file, 'w', encoding='utf-8') as fp:
            json.dump(document, fp)

        with contextlib.redirect_stdout(io.StringIO()):
            status = lab_app(['asymptotics', '--config', config_file, '--out', self.temp_folder])
        self.assertEqual(status, 1)
        self.assertFalse(json.loads(self.read_text(self.temp_folder, SUMMARY_FILE))['passed'])
        pass


if __name__ == '__main__':
    unittest.main()
