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

from coalescentflow.core.schemadef import DataType, FieldDef, SchemaDef
from coalescentflow.coalescent.backwardchain import scaled_step_count
from coalescentflow.coalescent.generatorlab import DEFAULT_STATE_BUDGET, discrete_semigroup_apply
from coalescentflow.coalescent.limitprocess import limit_semigroup_apply
from coalescentflow.coalescent.mutationmodel import zero_counts
from coalescentflow.coalescent.statistics import fit_loglog_slope, is_strictly_decreasing
from coalescentflow.experiments.modules import (
    AbstractExperiment, ExperimentResult, check_backward_horizon, initial_configuration
)


class SemigroupGap(AbstractExperiment):
    """
    Compares the exact expectation (T^(n))^floor(nt) f, computed by propagating the law of
    the backward chain, with the truncated series of the limit semigroup T(t) f.
    """
    def __init__(self):
        AbstractExperiment.__init__(self)
        self.stateBudget = DEFAULT_STATE_BUDGET
        self.allowedInversions = 0

    def name(self) -> str:
        return 'semigroup-gap'

    def alias(self) -> str:
        return 'Semigroup gap'

    def description(self) -> str:
        return 'Distance between the discrete semigroup and the limit semigroup at a fixed point.'

    def category(self) -> str:
        return 'Convergence'

    def params(self) -> Dict:
        return {
            'stateBudget': {
                'description': 'Largest number of (configuration, m) states of the dynamic program.',
                'dataType': 'int',
                'default': DEFAULT_STATE_BUDGET
            },
            'allowedInversions': {
                'description': 'Number of increases of the gap tolerated along the sweep.',
                'dataType': 'int',
                'default': 0
            }
        }

    def tolerances(self) -> Dict[str, float]:
        return {'truncation': 1e-10}

    def starting_run(self, config, processing_args) -> None:
        check_backward_horizon(config.y0(), config.t_values[0])
        pass

    def run(self, config, processing_args) -> ExperimentResult:
        """
        Runs the Experiment and returns its artifacts.
        """
        model = config.model()
        f = config.test_function()
        y0 = config.y0()
        t = config.t_values[0]
        result = ExperimentResult()

        limit_value, order, tail = limit_semigroup_apply(
            f, y0, zero_counts(model.dimension), t, model, tolerance=config.tolerance('truncation')
        )
        logging.info('Limit semigroup at t={}: {} (order {}, tail {}).'.format(t, limit_value, order, tail))

        rows: List[List] = []
        gaps: List[float] = []
        contraction = True
        scales = sorted(config.n_values)
        progress = self.progress(processing_args, len(scales), 'semigroup-gap')

        for n in scales:
            value, states = discrete_semigroup_apply(f, initial_configuration(y0, n), n, t, model, self.stateBudget)
            gap = abs(value - limit_value)
            gaps.append(gap)
            contraction = contraction and abs(value) <= f.sup_norm + 1e-12
            rows.append([n, scaled_step_count(n, t), value, limit_value, gap, states])
            progress.update()
            logging.info('Discrete semigroup at n={}: {} ({} states), gap={}.'.format(n, value, states, gap))

        progress.close()

        schema_def = SchemaDef('gaps', [
            FieldDef('n', DataType.Integer), FieldDef('steps', DataType.Integer), FieldDef('discrete_value'),
            FieldDef('limit_value'), FieldDef('gap'), FieldDef('states', DataType.Integer)
        ])
        result.add_table(schema_def, rows)

        positive = [(n, g) for n, g in zip(scales, gaps) if g > 0]
        result.statistics['limit_value'] = limit_value
        result.statistics['truncation_order'] = order
        result.statistics['truncation_tail'] = tail
        result.statistics['slope'] = fit_loglog_slope(*zip(*positive)) if len(positive) >= 2 else float(np.nan)
        result.check('gap_decreasing', is_strictly_decreasing(gaps, self.allowedInversions))
        result.check('contraction', contraction)
        return result
