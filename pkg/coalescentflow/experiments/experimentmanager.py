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

import os
import copy
import logging
from typing import Any, Dict, List, Mapping, Optional, Tuple, Type

from coalescentflow.__meta__ import __version__
from coalescentflow.core.common import JsonUtils
from coalescentflow.core.exceptions import ConfigError, CoalescentFlowError
from coalescentflow.core.modulemanager import ModuleManager
from coalescentflow.core.processingargs import ProcessingArgs, ProcessingUtils
from coalescentflow.core.settingsmanager import ENVIRONMENT_PREFIX, SettingsManager
from coalescentflow.experiments.experimentconfig import ExperimentConfig, merge_defaults
from coalescentflow.experiments.modules import AbstractExperiment, ExperimentResult

# Settings of the application giving defaults to the experiment configs.
THREADS_SETTING = 'COALESCENTFLOW_APP__THREADS'
OUTPUT_DIR_SETTING = 'COALESCENTFLOW_APP__OUTPUT__DIR'
BUDGET_SETTINGS = {
    'gridBudget': 'COALESCENTFLOW_APP__GRID__BUDGET',
    'stateBudget': 'COALESCENTFLOW_APP__STATE__BUDGET',
    'nodeBudget': 'COALESCENTFLOW_APP__NODE__BUDGET'
}
ENVIRONMENT_PREFIX_SETTING = 'COALESCENTFLOW_APP__ENVIRONMENT__PREFIX'
SUMMARY_FILE = 'summary.json'
ERROR_FILE = 'error.json'


class ExperimentModuleManager(ModuleManager):
    """
    Module manager of the Experiments deployed in the 'runners' folder.
    """
    def __init__(self):
        ModuleManager.__init__(self, (AbstractExperiment,))


class ExperimentManager:
    """
    Loads an experiment config, runs the selected Experiment and writes its artifacts:
    one CSV file per table and a JSON summary.
    """
    def __init__(self, settings: Optional[Mapping[str, Any]] = None, environ: Optional[Mapping[str, str]] = None):
        self.settings = settings if settings is not None else dict()
        self.environ = environ
        self.config: Optional[ExperimentConfig] = None
        self.experiment: Optional[AbstractExperiment] = None

    @staticmethod
    def modules() -> List[Type]:
        """
        Returns the collection of Experiments deployed.
        """
        modules_root = os.path.dirname(os.path.abspath(__file__))

        manager = ExperimentModuleManager()
        modules = manager.load_modules([os.path.join(modules_root, 'runners')])
        return sorted(set(modules.values()), key=lambda type_def: type_def.__name__)

    @staticmethod
    def catalog() -> Dict[str, Dict[str, Any]]:
        """
        Returns the Catalog of metadata of Experiments deployed, keyed by subcommand.
        """
        experiments = {}

        for module_def in ExperimentManager.modules():
            module_obj = module_def()

            experiments[module_obj.name()] = {
                'name': module_obj.className,
                'type': module_obj.classType,
                'alias': module_obj.alias(),
                'category': module_obj.category(),
                'description': module_obj.description(),
                'params': module_obj.params(),
                'tolerances': module_obj.tolerances()
            }

        return experiments

    @staticmethod
    def find_experiment(name: str) -> AbstractExperiment:
        """
        Returns a new instance of the Experiment of the specified subcommand name.
        """
        for module_def in ExperimentManager.modules():
            module_obj = module_def()
            if module_obj.name() == name:
                return module_obj

        raise ConfigError('The experiment "{}" is not supported!'.format(name), field='experiment')

    @staticmethod
    def assign_parameters(module_obj: AbstractExperiment, parameters: Mapping[str, Any]) -> None:
        """
        Assigns the parameters of the config to the attributes of the Experiment, casting
        each value to the type of the attribute default.
        """
        declared = module_obj.params()

        for name, value in parameters.items():
            if name not in declared or not hasattr(module_obj, name):
                raise ConfigError('Unknown parameter "{}" of the experiment "{}".'.format(name, module_obj.name()),
                                  field='parameters.' + name)

            logging.debug('Assigning parameter of "{}" -> {}={}...'.format(module_obj.className, name, value))
            try:
                setattr(module_obj, name, ProcessingUtils.cast_value(value, type(getattr(module_obj, name))))
            except (TypeError, ValueError):
                raise ConfigError('Invalid value of the parameter "{}": {}'.format(name, value), field='parameters.' + name)

        pass

    def _setting_defaults(self, module_obj: AbstractExperiment) -> Tuple[Dict[str, Any], Dict[str, Any]]:
        """
        Returns the run defaults and the parameter defaults given by the application settings.
        """
        defaults: Dict[str, Any] = dict()
        if self.settings.get(THREADS_SETTING):
            defaults['threads'] = int(self.settings[THREADS_SETTING])
        if self.settings.get(OUTPUT_DIR_SETTING):
            defaults['output'] = {'dir': self.settings[OUTPUT_DIR_SETTING]}

        parameters = module_obj.default_parameters()
        for name, setting_name in BUDGET_SETTINGS.items():
            if name in parameters and self.settings.get(setting_name):
                parameters[name] = type(parameters[name])(float(self.settings[setting_name]))

        return defaults, parameters

    def load_from_dict(self,
                       document: Dict[str, Any],
                       experiment: Optional[str] = None,
                       seed: Optional[int] = None,
                       threads: Optional[int] = None,
                       output_dir: Optional[str] = None) -> ExperimentConfig:
        """
        Builds the config of a run: environment overrides first, then the command line
        values, then the defaults of the settings and of the Experiment.
        """
        prefix = self.settings.get(ENVIRONMENT_PREFIX_SETTING) or ENVIRONMENT_PREFIX
        document = SettingsManager.override_config(copy.deepcopy(document), self.environ, prefix)

        named = document.get('experiment')
        if experiment and named and named != experiment:
            raise ConfigError(
                'The config is written for the experiment "{}", not "{}".'.format(named, experiment), field='experiment'
            )
        experiment = experiment or named
        if not experiment:
            raise ConfigError('No experiment selected.', field='experiment')

        module_obj = ExperimentManager.find_experiment(experiment)
        document['experiment'] = experiment

        if seed is not None:
            document['seed'] = int(seed)
        if threads is not None:
            document['threads'] = int(threads)
        if output_dir:
            document.setdefault('output', dict())
            if isinstance(document['output'], dict):
                document['output']['dir'] = output_dir

        run_defaults, parameters = self._setting_defaults(module_obj)
        merge_defaults(document, run_defaults)

        config = ExperimentConfig.build(document, module_obj.tolerances(), parameters)
        ExperimentManager.assign_parameters(module_obj, config.parameters)

        for name in module_obj.tolerances():
            config.tolerance(name)

        self.config = config
        self.experiment = module_obj
        logging.info('Experiment "{}" loaded (seed={}, paths={}).'.format(experiment, config.seed, config.paths))
        return config

    def load_from_file(self, config_file: str, experiment: Optional[str] = None, **kwargs) -> ExperimentConfig:
        """
        Builds the config of a run from the specified JSON file.
        """
        logging.info('Loading config file "{}"...'.format(config_file))
        return self.load_from_dict(ExperimentConfig.load_document(config_file), experiment, **kwargs)

    @staticmethod
    def summary(config: ExperimentConfig, result: ExperimentResult) -> Dict[str, Any]:
        """
        Returns the JSON summary of a run.
        """
        return {
            'config': config.echo(),
            'seed': config.seed,
            'version': __version__,
            'experiment': config.experiment,
            'statistics': result.statistics,
            'tolerances': config.tolerances,
            'checks': result.checks,
            'passed': result.passed,
            'warnings': result.warnings
        }

    @staticmethod
    def write_json(folder: str, file_name: str, obj: Any) -> str:
        file_name = os.path.join(folder, file_name)
        with open(file_name, 'w', encoding='utf-8', newline='\n') as fp:
            fp.write(JsonUtils.canonical_dumps(obj))

        return file_name

    @staticmethod
    def write_error(folder: Optional[str], error: BaseException) -> Dict[str, Any]:
        """
        Returns the machine-readable description of an error, also written to the
        output folder when it is available.
        """
        if isinstance(error, CoalescentFlowError):
            info = error.as_dict()
        else:
            info = {'status': 'ERROR', 'code': 3, 'error': error.__class__.__name__, 'field': None, 'message': str(error)}

        if folder:
            try:
                os.makedirs(folder, exist_ok=True)
                ExperimentManager.write_json(folder, ERROR_FILE, info)
            except OSError as e:
                logging.warning('The error file can not be written in "{}": {}'.format(folder, e.strerror))

        return info

    def run(self, processing_args: Optional[ProcessingArgs] = None) -> Tuple[ExperimentResult, Dict[str, Any]]:
        """
        Runs the loaded Experiment and writes its artifacts, returns the result and the summary.
        """
        if self.config is None or self.experiment is None:
            raise ConfigError('No experiment config loaded.')

        config = self.config
        if processing_args is None:
            processing_args = ProcessingArgs(config.output_dir, config.seed, config.threads)

        self.experiment.starting_run(config, processing_args)
        logging.info('Running experiment "{}"...'.format(config.experiment))
        result = self.experiment.run(config, processing_args)

        folder = processing_args.output_path()
        for schema_def, rows in result.tables:
            file_name = schema_def.write_csv(folder, rows)
            logging.info('Table "{}" written ({} rows).'.format(file_name, len(rows)))

        summary = ExperimentManager.summary(config, result)
        ExperimentManager.write_json(folder, SUMMARY_FILE, summary)

        for name, value in result.checks.items():
            log_function = logging.info if value else logging.warning
            log_function('Check "{}": {}'.format(name, 'PASSED' if value else 'FAILED'))

        return result, summary
