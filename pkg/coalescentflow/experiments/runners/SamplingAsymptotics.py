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

import math
import logging
from typing import Dict, List

import numpy as np

from coalescentflow.core.schemadef import DataType, FieldDef, SchemaDef
from coalescentflow.coalescent.backwardchain import backward_probability_table, backward_rate_limits
from coalescentflow.coalescent.samplingprobs import (
    level_configurations, pim_asymptotic_approx, pim_sampling_probability
)
from coalescentflow.coalescent.statistics import fit_loglog_slope, is_strictly_decreasing
from coalescentflow.experiments.modules import AbstractExperiment, ExperimentResult, initial_configuration


class SamplingAsymptotics(AbstractExperiment):
    """
    Checks the large-n behaviour of the PIM sampling probabilities, p_Q(round(ny)) n^(d-1)
    against the Dirichlet density, and of the backward kernel, whose coalescence
    probabilities and n-scaled mutation probabilities approach their limiting rates.
    """
    def __init__(self):
        AbstractExperiment.__init__(self)
        self.levelMaxSize = 12

    def name(self) -> str:
        return 'asymptotics'

    def alias(self) -> str:
        return 'Sampling asymptotics'

    def description(self) -> str:
        return 'Asymptotics of PIM sampling probabilities and scaling of the backward rates.'

    def category(self) -> str:
        return 'Sampling probabilities'

    def params(self) -> Dict:
        return {
            'levelMaxSize': {
                'description': 'Largest sample size whose sampling probabilities are checked to add up to 1.',
                'dataType': 'int',
                'default': 12
            }
        }

    def tolerances(self) -> Dict[str, float]:
        return {'sampling_gap': 0.02, 'slope_width': 0.2, 'normalization': 1e-10}

    def level_normalization_error(self, theta: float, q: np.ndarray) -> float:
        """
        Returns max_s |sum of p_Q over the configurations of size s - 1|.
        """
        error = 0.0
        for size in range(1, self.levelMaxSize + 1):
            total = math.fsum(pim_sampling_probability(config, theta, q) for config in level_configurations(size, len(q)))
            error = max(error, abs(total - 1.0))

        return error

    def run(self, config, processing_args) -> ExperimentResult:
        """
        Runs the Experiment and returns its artifacts.
        """
        model = config.model()
        q = model.pim_row
        theta = model.theta
        y0 = config.y0()
        d = model.dimension
        result = ExperimentResult()

        sampling_rows: List[List] = []
        rate_rows: List[List] = []
        scales = sorted(config.n_values)

        for n in scales:
            counts = initial_configuration(y0, n)
            exact = pim_sampling_probability(counts, theta, q)
            approx = pim_asymptotic_approx(y0, n, theta, q)
            ratio = exact / approx
            sampling_rows.append([n, exact, approx, ratio, abs(ratio - 1.0)])

            y = counts.scaled(n)
            table = backward_probability_table(counts.as_array()[None, :], model)[0]
            coalescence_limit, mutation_limit = backward_rate_limits(y, model)
            coalescence_gap = float(np.max(np.abs(table[:d] - coalescence_limit)))
            mutation_gap = float(np.max(np.abs(n * table[d:].reshape(d, d) - mutation_limit)))
            rate_rows.append([n, coalescence_gap, mutation_gap])

            logging.info('Scale n={}: sampling ratio={}, rate gaps={}, {}.'.format(n, ratio, coalescence_gap, mutation_gap))

        sampling_gaps = [row[4] for row in sampling_rows]
        coalescence_slope = fit_loglog_slope(scales, [row[1] for row in rate_rows]) if len(scales) >= 2 else math.nan
        mutation_slope = fit_loglog_slope(scales, [row[2] for row in rate_rows]) if len(scales) >= 2 else math.nan
        normalization = self.level_normalization_error(theta, q)
        width = config.tolerance('slope_width')

        result.add_table(SchemaDef('sampling', [
            FieldDef('n', DataType.Integer), FieldDef('exact'), FieldDef('approx'), FieldDef('ratio'), FieldDef('gap')
        ]), sampling_rows)
        result.add_table(SchemaDef('rates', [
            FieldDef('n', DataType.Integer), FieldDef('coalescence_gap'), FieldDef('mutation_gap')
        ]), rate_rows)

        result.statistics['coalescence_slope'] = coalescence_slope
        result.statistics['mutation_slope'] = mutation_slope
        result.statistics['level_normalization_error'] = normalization
        result.check('sampling_gap_decreasing', is_strictly_decreasing(sampling_gaps))
        result.check('sampling_gap', sampling_gaps[-1] <= config.tolerance('sampling_gap'))
        result.check('coalescence_rate_slope', abs(coalescence_slope + 1.0) <= width)
        result.check('mutation_rate_slope', abs(mutation_slope + 1.0) <= width)
        result.check('level_normalization', normalization <= config.tolerance('normalization'))
        return result
