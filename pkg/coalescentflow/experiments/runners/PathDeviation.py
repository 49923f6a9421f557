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

import logging
from typing import Dict, List

import numpy as np

from coalescentflow.core.enumerations import Direction
from coalescentflow.core.montecarlo import draw_uniforms, map_chunks
from coalescentflow.core.schemadef import DataType, FieldDef, SchemaDef
from coalescentflow.coalescent.backwardchain import scaled_step_count, simulate_backward_batch
from coalescentflow.coalescent.statistics import is_strictly_decreasing, trajectory_sup_deviation
from coalescentflow.experiments.modules import (
    AbstractExperiment, ExperimentResult, check_backward_horizon, initial_configuration
)


class PathDeviation(AbstractExperiment):
    """
    Measures sup_{s <= t} ||Y~(s) - Y(s)||_1 between time-scaled backward paths and the
    deterministic limit trajectory along a sweep of sample sizes.
    """
    def __init__(self):
        AbstractExperiment.__init__(self)
        self.chunkSize = 2000

    def name(self) -> str:
        return 'path-dev'

    def alias(self) -> str:
        return 'Path deviation'

    def description(self) -> str:
        return 'Sup-norm deviation of scaled backward paths from the deterministic limit.'

    def category(self) -> str:
        return 'Convergence'

    def params(self) -> Dict:
        return {
            'chunkSize': {
                'description': 'Number of paths simulated side by side.',
                'dataType': 'int',
                'default': 2000
            }
        }

    def tolerances(self) -> Dict[str, float]:
        return {'median_deviation': 0.05}

    def starting_run(self, config, processing_args) -> None:
        check_backward_horizon(config.y0(), config.t_values[0])
        pass

    def run(self, config, processing_args) -> ExperimentResult:
        """
        Runs the Experiment and returns its artifacts.
        """
        model = config.model()
        y0 = config.y0()
        t = config.t_values[0]
        result = ExperimentResult()

        schema_def = SchemaDef('deviation', [
            FieldDef('n', DataType.Integer), FieldDef('paths', DataType.Integer),
            FieldDef('mean_deviation'), FieldDef('median_deviation')
        ])
        rows: List[List] = []
        medians: List[float] = []
        scales = sorted(config.n_values)

        for index, n in enumerate(scales):
            initial = initial_configuration(y0, n)
            steps = scaled_step_count(n, t)
            progress = self.progress(processing_args, config.paths, 'path-dev n={}'.format(n))

            def _chunk(start: int, stop: int) -> np.ndarray:
                uniforms = draw_uniforms(processing_args.streams, start, stop, steps, index)
                batch = simulate_backward_batch(initial, model, n, uniforms, record=True)
                return trajectory_sup_deviation(batch.trajectory, n, y0, t, Direction.BACKWARD)

            deviation = np.concatenate(
                map_chunks(config.paths, self.chunkSize, _chunk, processing_args.threads, progress.update)
            )
            progress.close()

            median = float(np.median(deviation))
            medians.append(median)
            rows.append([n, config.paths, float(np.mean(deviation)), median])
            logging.info('Backward paths at n={}: mean={}, median={} sup deviation.'.format(n, rows[-1][2], median))

        result.statistics['median_deviation'] = {str(n): m for n, m in zip(scales, medians)}
        result.check('median_decreasing', is_strictly_decreasing(medians))
        result.check('median_threshold', medians[-1] <= config.tolerance('median_deviation'))
        result.add_table(schema_def, rows)
        return result
