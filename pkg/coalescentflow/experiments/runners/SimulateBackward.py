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

from coalescentflow.core.enumerations import EventKind
from coalescentflow.core.montecarlo import map_paths
from coalescentflow.core.schemadef import DataType, FieldDef, SchemaDef
from coalescentflow.coalescent.backwardchain import backward_event_distribution, event_probability, simulate_backward
from coalescentflow.coalescent.mutationmodel import MutationModel, TypeConfiguration
from coalescentflow.experiments.modules import (
    AUXILIARY_CHANNEL, AbstractExperiment, ExperimentResult, initial_configuration, random_kernel_states
)

# Backward kernel at n = 10, counts (4, 6), theta = 4, Q = (0.5, 0.5), evaluated by hand:
# (kind, target, source, probability).
HAND_TABLE = [
    (EventKind.COALESCENCE, 0, None, 0.24),
    (EventKind.COALESCENCE, 1, None, 3.0 / 7.0),
    (EventKind.MUTATION, 0, 0, 0.8 / 13.0),
    (EventKind.MUTATION, 1, 0, 7.2 / 91.0),
    (EventKind.MUTATION, 0, 1, 6.4 / 65.0),
    (EventKind.MUTATION, 1, 1, 1.2 / 13.0)
]


def hand_table_error() -> float:
    """
    Returns the largest deviation of the backward kernel from the hand-evaluated table.
    """
    events = backward_event_distribution(TypeConfiguration((4, 6)), MutationModel.from_pim(4.0, [0.5, 0.5]), 10)
    return max(abs(event_probability(events, kind, target, source) - value) for kind, target, source, value in HAND_TABLE)


class SimulateBackward(AbstractExperiment):
    """
    Simulates complete backward histories (until the most recent common ancestor) of
    the PIM coalescent and checks the normalization of the backward kernel.
    """
    def __init__(self):
        AbstractExperiment.__init__(self)
        self.kernelTrials = 200
        self.maxDimension = 5
        self.maxSize = 10000
        self.maxTheta = 10.0

    def name(self) -> str:
        return 'simulate-backward'

    def alias(self) -> str:
        return 'Backward simulation'

    def description(self) -> str:
        return 'Simulates backward coalescent histories to absorption and checks the backward kernel.'

    def category(self) -> str:
        return 'Simulation'

    def params(self) -> Dict:
        return {
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
        return {'normalization': 1e-12, 'hand_table': 1e-12}

    def kernel_normalization_error(self, rng: np.random.Generator) -> float:
        """
        Returns max |sum of event probabilities - 1| over random states.
        """
        error = 0.0
        for config, model in random_kernel_states(rng, self.kernelTrials, self.maxDimension, self.maxSize, self.maxTheta):
            total = sum(event.probability for event in backward_event_distribution(config, model))
            error = max(error, abs(total - 1.0))

        return error

    def run(self, config, processing_args) -> ExperimentResult:
        """
        Runs the Experiment and returns its artifacts.
        """
        model = config.model()
        y0 = config.y0()
        d = model.dimension
        result = ExperimentResult()

        normalization = self.kernel_normalization_error(processing_args.streams.stream(0, AUXILIARY_CHANNEL))
        hand_error = hand_table_error()
        result.statistics['kernel_normalization_error'] = normalization
        result.statistics['hand_table_error'] = hand_error
        result.check('kernel_normalization', normalization <= config.tolerance('normalization'))
        result.check('hand_table', hand_error <= config.tolerance('hand_table'))

        schema_def = SchemaDef('paths', [
            FieldDef('n', DataType.Integer), FieldDef('path', DataType.Integer), FieldDef('tau', DataType.Integer),
            FieldDef('coalescences', DataType.Integer), FieldDef('mutations', DataType.Integer)
        ] + SchemaDef.matrix_fields('m', d))
        rows: List[List] = []
        mean_tau: Dict[str, float] = {}
        absorbed, bounded = True, True

        for index, n in enumerate(config.n_values):
            initial = initial_configuration(y0, n)
            progress = self.progress(processing_args, config.paths, 'simulate-backward n={}'.format(n))

            def _path_summary(path_index: int, rng: np.random.Generator) -> List[int]:
                path = simulate_backward(initial, model, n, rng)
                coalescences = sum(1 for event in path.events if event.kind == EventKind.COALESCENCE)
                final, _ = path.state_at_step(path.steps)
                return [path_index, path.tau, coalescences, path.steps - coalescences, final.size] + \
                    path.mutation_counts.ravel().tolist()

            summaries = map_paths(config.paths, _path_summary, processing_args.streams, processing_args.threads,
                                  channel=index, progress=progress.update)
            progress.close()

            for summary in summaries:
                path_index, tau, coalescences, mutations, final_size = summary[:5]
                absorbed = absorbed and final_size == 1 and tau is not None
                bounded = bounded and coalescences == initial.size - 1 and tau >= initial.size - 1
                rows.append([n, path_index, tau, coalescences, mutations] + summary[5:])

            mean_tau[str(n)] = float(np.mean([summary[1] for summary in summaries]))
            logging.info('Backward paths at n={}: mean tau={}.'.format(n, mean_tau[str(n)]))

        result.statistics['mean_tau'] = mean_tau
        result.check('absorbed', absorbed)
        result.check('tau_bound', bounded)
        result.add_table(schema_def, rows)
        return result
