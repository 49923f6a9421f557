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
from coalescentflow.coalescent.backwardchain import scaled_step_count
from coalescentflow.coalescent.forwardchain import simulate_forward_batch
from coalescentflow.coalescent.limitprocess import cumulative_intensity
from coalescentflow.coalescent.samplingprobs import forward_event_distribution
from coalescentflow.coalescent.statistics import is_strictly_decreasing, poisson_gof, trajectory_sup_deviation
from coalescentflow.experiments.modules import (
    AUXILIARY_CHANNEL, GOF_SCHEMA, HISTOGRAM_SCHEMA, AbstractExperiment, ExperimentResult,
    gof_rows, initial_configuration, random_kernel_states
)

DEVIATION_SCHEMA = SchemaDef('deviation', [
    FieldDef('n', DataType.Integer), FieldDef('paths', DataType.Integer),
    FieldDef('mean_deviation'), FieldDef('median_deviation')
])


class SimulateForward(AbstractExperiment):
    """
    Simulates the forward (growing) chain for floor(nt) steps, fits its mutation counts
    to the Poisson laws of the forward limit and measures the distance of its paths to
    the forward limit trajectory.
    """
    def __init__(self):
        AbstractExperiment.__init__(self)
        self.epsilon = 0.0
        self.chunkSize = 2000
        self.kernelTrials = 200
        self.maxDimension = 5
        self.maxSize = 10000
        self.maxTheta = 10.0

    def name(self) -> str:
        return 'simulate-forward'

    def alias(self) -> str:
        return 'Forward simulation'

    def description(self) -> str:
        return 'Simulates the forward chain and compares it with its forward-in-time limit.'

    def category(self) -> str:
        return 'Simulation'

    def params(self) -> Dict:
        return {
            'epsilon': {
                'description': 'Lower bound of the scaled initial counts.',
                'dataType': 'float',
                'default': 0.0
            },
            'chunkSize': {
                'description': 'Number of paths simulated side by side.',
                'dataType': 'int',
                'default': 2000
            },
            'kernelTrials': {
                'description': 'Number of random states where the kernel normalization is checked.',
                'dataType': 'int',
                'default': 200
            },
            'maxDimension': {
                'description': 'Largest number of types of the random states.',
                'dataType': 'int',
                'default': 5
            },
            'maxSize': {
                'description': 'Largest sample size of the random states.',
                'dataType': 'int',
                'default': 10000
            },
            'maxTheta': {
                'description': 'Largest mutation rate of the random states.',
                'dataType': 'float',
                'default': 10.0
            }
        }

    def tolerances(self) -> Dict[str, float]:
        return {'normalization': 1e-12, 'p_value': 1e-3}

    def kernel_normalization_error(self, rng: np.random.Generator) -> float:
        error = 0.0
        states = random_kernel_states(rng, self.kernelTrials, self.maxDimension, self.maxSize, self.maxTheta, True)
        for config, model in states:
            total = sum(event.probability for event in forward_event_distribution(config, model))
            error = max(error, abs(total - 1.0))

        return error

    def run(self, config, processing_args) -> ExperimentResult:
        """
        Runs the Experiment and returns its artifacts.
        """
        model = config.model()
        y0 = config.y0()
        t = config.t_values[0]
        d = model.dimension
        result = ExperimentResult()

        normalization = self.kernel_normalization_error(processing_args.streams.stream(0, AUXILIARY_CHANNEL))
        result.statistics['kernel_normalization_error'] = normalization
        result.check('kernel_normalization', normalization <= config.tolerance('normalization'))

        paths_schema = SchemaDef('paths', [
            FieldDef('n', DataType.Integer), FieldDef('path', DataType.Integer),
            FieldDef('steps', DataType.Integer), FieldDef('size', DataType.Integer)
        ] + SchemaDef.matrix_fields('m', d))
        path_rows: List[List] = []
        gof_table: List[List] = []
        histogram_table: List[List] = []
        deviation_rows: List[List] = []
        medians: List[float] = []
        fits_passed = True

        intensity = cumulative_intensity(y0, t, model, Direction.FORWARD)
        scales = sorted(config.n_values)

        for index, n in enumerate(scales):
            initial = initial_configuration(y0, n)
            steps = scaled_step_count(n, t)
            progress = self.progress(processing_args, config.paths, 'simulate-forward n={}'.format(n))

            def _chunk(start: int, stop: int):
                uniforms = draw_uniforms(processing_args.streams, start, stop, steps, index)
                batch = simulate_forward_batch(initial, model, n, uniforms, self.epsilon, record=True)
                deviation = trajectory_sup_deviation(batch.trajectory, n, y0, t, Direction.FORWARD)
                return batch.counts, batch.mutations, batch.steps, deviation

            chunks = map_chunks(config.paths, self.chunkSize, _chunk, processing_args.threads, progress.update)
            progress.close()

            counts = np.vstack([chunk[0] for chunk in chunks])
            mutations = np.vstack([chunk[1] for chunk in chunks])
            taken = np.concatenate([chunk[2] for chunk in chunks])
            deviation = np.concatenate([chunk[3] for chunk in chunks])

            for k in range(config.paths):
                path_rows.append([n, k, int(taken[k]), int(counts[k].sum())] + mutations[k].ravel().tolist())

            for i in range(d):
                for j in range(d):
                    lam = float(intensity.matrix[i, j])
                    if lam <= 0:
                        continue
                    report = poisson_gof(mutations[:, i, j], lam)
                    row, histogram = gof_rows(n, t, i, j, report)
                    gof_table.append(row)
                    histogram_table.extend(histogram)
                    if n == scales[-1]:
                        fits_passed = fits_passed and report.passed(config.tolerance('p_value'))

            median = float(np.median(deviation))
            medians.append(median)
            deviation_rows.append([n, config.paths, float(np.mean(deviation)), median])
            logging.info('Forward paths at n={}: median sup deviation={}.'.format(n, median))

        result.statistics['forward_intensity'] = intensity.matrix
        result.statistics['median_deviation'] = {str(n): m for n, m in zip(scales, medians)}
        result.check('poisson_fit', fits_passed)
        result.check('deviation_decreasing', is_strictly_decreasing(medians))

        result.add_table(paths_schema, path_rows)
        result.add_table(GOF_SCHEMA, gof_table)
        result.add_table(HISTOGRAM_SCHEMA, histogram_table)
        result.add_table(DEVIATION_SCHEMA, deviation_rows)
        return result
