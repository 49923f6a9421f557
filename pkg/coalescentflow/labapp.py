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
import sys
import time
import datetime
import logging
import traceback
import argparse
from typing import List, Optional

package_path = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if package_path not in sys.path:
    sys.path.insert(0, package_path)

try:
    from coalescentflow.core.common import JsonUtils
    from coalescentflow.core.exceptions import CoalescentFlowError, ConfigError
    from coalescentflow.core.processingargs import ProcessingArgs, ProcessingUtils
    from coalescentflow.experiments.experimentconfig import EXPERIMENT_NAMES
    from coalescentflow.experiments.experimentmanager import ExperimentManager
except Exception as e:
    raise e

# Exit codes of the application.
EXIT_SUCCESS = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3


def _elapsed_text(start_time: float) -> str:
    return str(datetime.timedelta(seconds=int(time.time() - start_time)))


def _modules_text() -> str:
    """
    Returns the description of the available Experiments and their parameters.
    """
    modules_txt = '\n+ Experiments:\n'

    for name, info in sorted(ExperimentManager.catalog().items()):
        params_info = ''.join(
            ['\n\t  {} ({}): {}'.format(k, v.get('dataType'), v.get('description')) for k, v in info['params'].items()]
        )
        if not params_info:
            params_info = '\n\t  NONE'

        tolerances_info = ', '.join('{}={}'.format(k, v) for k, v in sorted(info['tolerances'].items())) or 'NONE'
        modules_txt += '  > {} [{}]: {}\n\tParams: {}\n\tTolerances: {}\n'.format(
            name, info['name'], info['description'], params_info, tolerances_info)

    return modules_txt


def lab_app(command_args: Optional[List[str]] = None) -> int:
    """
    CoalescentFlow console application, returns the exit code of the run.
    """
    start_time = time.time()

    if command_args is None:
        command_args = sys.argv[1:]

    # Define the command parameters of the application.
    parser = argparse.ArgumentParser(prog='coalescentflow')
    parser.add_argument('experiment', nargs='?', choices=EXPERIMENT_NAMES,
                        help='Experiment to run.', default=None)
    parser.add_argument('--config', dest='config', required=False, action='store',
                        help='Experiment config file (JSON).', default='')
    parser.add_argument('--out', dest='out', required=False, action='store',
                        help='Output folder, overrides the config (Optional).', default='')
    parser.add_argument('--seed', dest='seed', required=False, action='store', type=int,
                        help='Global seed, overrides the config (Optional).', default=None)
    parser.add_argument('--threads', dest='threads', required=False, action='store', type=int,
                        help='Number of worker threads, overrides the config (Optional).', default=None)
    parser.add_argument('--settings_file', dest='settings_file', required=False, action='store',
                        help='Settings file to load (Optional).', default='')
    parser.add_argument('--modules', dest='modules', required=False, action='store_true',
                        help='Show metadata of available Experiments and exit without running any.')
    parser.add_argument('--ui_mode', dest='ui_mode', required=False, action='store_true',
                        help='UI mode, the experiment shows a progress bar.')
    #
    parser.add_argument('--log_level', action='store', required=False,
                        help='LOG level to notify application messages (Optional).', dest='log_level',
                        default='INFO')
    parser.add_argument('--log_file', action='store', required=False, help='LOG output file (Optional).',
                        dest='log_file', default='')
    #
    args = parser.parse_args(command_args)

    # Logging application initialization.
    logging.basicConfig(level=args.log_level, format="[%(levelname)s]: %(message)s")
    #
    if args.log_file:
        logging_root = logging.getLogger()
        logging_file_handler = logging.FileHandler(args.log_file, mode='w')
        logging_file_handler.setLevel(logging_root.level)
        logging_file_handler.setFormatter(logging_root.handlers[0].formatter)
        logging_root.addHandler(logging_file_handler)

    logging.info('========================================================================')
    logging.info('CoalescentFlow:')
    logging.info('Toolkit to run convergence experiments on the typed Kingman coalescent.')
    logging.info('========================================================================')
    logging.info('')

    # Show metadata of available experiments and exit?
    if args.modules:
        logging.info('Available Experiments...')
        logging.info(_modules_text())
        logging.warning('The "--modules" flag is present, so exiting...')
        return EXIT_SUCCESS

    # Initialize the default Settings Manager.
    if not args.settings_file:
        args.settings_file = os.path.splitext(os.path.abspath(__file__))[0] + '.default.settings'

    from coalescentflow.core.settingsmanager import Singleton
    app_settings = Singleton
    if os.path.exists(args.settings_file):
        app_settings.load_from_file(args.settings_file).load_from_environment()

    manager = ExperimentManager(settings=app_settings)
    output_dir = args.out or None
    status = EXIT_RUNTIME_ERROR

    try:
        if not args.experiment:
            raise ConfigError('No experiment specified!', field='experiment')
        if not args.config:
            raise ConfigError('Config file not specified!', field='config')

        logging.info('Processing file "{}"...'.format(args.config))

        config = manager.load_from_file(
            args.config, args.experiment, seed=args.seed, threads=args.threads, output_dir=args.out
        )
        output_dir = config.output_dir

        with ProcessingArgs(config.output_dir, config.seed, config.threads,
                            ProcessingUtils.strtobool(args.ui_mode)) as processing_args:
            result, _ = manager.run(processing_args)

        status = EXIT_SUCCESS if result.passed else EXIT_CHECK_FAILED
    except CoalescentFlowError as e:
        logging.error(e)
        logging.debug(traceback.format_exc())
        sys.stdout.write(JsonUtils.canonical_dumps(ExperimentManager.write_error(output_dir, e)))
        status = e.exit_code
    except Exception as e:
        logging.error(e)
        traceback.print_exc(file=sys.stdout)
        sys.stdout.write(JsonUtils.canonical_dumps(ExperimentManager.write_error(output_dir, e)))
        status = EXIT_RUNTIME_ERROR
    finally:
        elapsed_text = _elapsed_text(start_time)

        if status == EXIT_SUCCESS:
            logging.info('--- OK: Process successfully finalized! Elapsed=[{0}]'.format(elapsed_text))
        elif status == EXIT_CHECK_FAILED:
            logging.warning('--- FAILED: Some acceptance checks failed! Elapsed=[{0}]'.format(elapsed_text))
        else:
            logging.error('--- ERROR: Process finalized with exit code {}! Elapsed=[{}]'.format(status, elapsed_text))

        logging_root = logging.getLogger()
        logging_root.handlers.clear()

    return status


if __name__ == '__main__':
    sys.exit(lab_app(command_args=sys.argv[1:]))
