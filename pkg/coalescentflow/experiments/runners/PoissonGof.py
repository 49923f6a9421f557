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

from coalescentflow.core.enumerations import Direction, RMode
from coalescentflow.core.exceptions import ConfigError
from coalescentflow.core.montecarlo import draw_uniforms, map_chunks
from coalescentflow.coalescent.backwardchain import scaled_step_count, simulate_backward_batch
from coalescentflow.coalescent.limitprocess import cumulative_intensity
from coalescentflow.coalescent.measurechange import (
    ASYMPTOTIC_WARNING, batch_mutation_weights, batch_sampling_ratios
)
from coalescentflow.coalescent.samplingprobs import oracle_for
from coalescentflow.coalescent.statistics import max_abs_correlation, poisson_gof, weighted_poisson_tv
from coalescentflow.experiments.modules import (
    GOF_SCHEMA, HISTOGRAM_SCHEMA, AbstractExperiment, ExperimentResult,
    check_backward_horizon, gof_rows, initial_configuration
)


class PoissonGof(AbstractExperiment):
    """
    Fits the mutation counts of the backward chain after floor(nt) steps to the Poisson
    laws of the limit process.

    PIM models are simulated directly. With a proposal row Q in the config the chain is
    simulated under Q and every path is weighted by the change of measure c(M) r_n
    towards the model, which may then be parent dependent.
    """
    def __init__(self):
        AbstractExperiment.__init__(self)
        self.chunkSize = 2000

    def name(self) -> str:
        return 'gof'

    def alias(self) -> str:
        return 'Poisson goodness of fit'

    def description(self) -> str:
        return 'Fits scaled mutation counts of the backward chain to Poisson(Lambda_ij).'

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
        return {'p_value': 1e-3, 'tv': 0.02, 'correlation_sigmas': 3.0}

    def starting_run(self, config, processing_args) -> None:
        """
        Checks the config before the Experiment starts.
        """
        if config.proposal_model() is None and not config.model().is_pim:
            raise ConfigError('A parent dependent model needs a proposal row to be simulated.', field='model.proposal_q')

        y0 = config.y0()
        for t in config.t_values:
            check_backward_horizon(y0, t)

        pass

    def run(self, config, processing_args) -> ExperimentResult:
        """
        Runs the Experiment and returns its artifacts.
        """
        model = config.model()
        proposal = config.proposal_model()
        weighted = proposal is not None
        simulated = proposal if weighted else model
        r_mode = config.r_mode
        y0 = config.y0()
        d = model.dimension
        result = ExperimentResult()

        oracle_q = oracle_for(proposal) if weighted else None
        oracle_p = oracle_for(model) if weighted and r_mode == RMode.EXACT else None
        if weighted and r_mode == RMode.ASYMPTOTIC:
            logging.warning('Weighted fits use the asymptotic r-mode (r_n = 1).')
            result.warn(ASYMPTOTIC_WARNING)

        gof_table: List[List] = []
        histogram_table: List[List] = []
        correlations: Dict[str, float] = {}
        max_weights: Dict[str, float] = {}
        p_passed, tv_passed, independent = True, True, True
        p_threshold = config.tolerance('p_value')
        tv_threshold = config.tolerance('tv')
        correlation_bound = config.tolerance('correlation_sigmas') / math.sqrt(config.paths)
        sweep = [(n, t) for n in config.n_values for t in config.t_values]

        for index, (n, t) in enumerate(sweep):
            initial = initial_configuration(y0, n)
            steps = scaled_step_count(n, t)
            key = '{}:{}'.format(n, t)
            progress = self.progress(processing_args, config.paths, 'gof n={} t={}'.format(n, t))

            def _chunk(start: int, stop: int):
                uniforms = draw_uniforms(processing_args.streams, start, stop, steps, index)
                batch = simulate_backward_batch(initial, simulated, n, uniforms)
                if not weighted:
                    return batch.mutations, np.ones(stop - start)

                weights = batch_mutation_weights(batch.mutations, model.matrix, proposal.pim_row)
                weights *= batch_sampling_ratios(batch.counts, initial, oracle_p, oracle_q, r_mode)
                return batch.mutations, weights

            chunks = map_chunks(config.paths, self.chunkSize, _chunk, processing_args.threads, progress.update)
            progress.close()

            mutations = np.vstack([chunk[0] for chunk in chunks])
            weights = np.concatenate([chunk[1] for chunk in chunks])
            intensity = cumulative_intensity(y0, t, model, Direction.BACKWARD)

            for i in range(d):
                for j in range(d):
                    lam = float(intensity.matrix[i, j])
                    if lam <= 0:
                        continue
                    if weighted:
                        report = weighted_poisson_tv(mutations[:, i, j], weights, lam)
                    else:
                        report = poisson_gof(mutations[:, i, j], lam)
                        p_passed = p_passed and report.p_value > p_threshold

                    tv_passed = tv_passed and report.tv <= tv_threshold
                    row, histogram = gof_rows(n, t, i, j, report)
                    gof_table.append(row)
                    histogram_table.extend(histogram)
                    logging.info('Fit of M_{}{} at n={}, t={}: lambda={}, p={}, tv={}.'.format(
                        i + 1, j + 1, n, t, lam, report.p_value, report.tv))

            if weighted:
                max_weights[key] = float(np.max(weights))
            else:
                correlations[key] = max_abs_correlation(mutations)
                independent = independent and correlations[key] <= correlation_bound

        result.statistics['weighted'] = weighted
        result.statistics['r_mode'] = r_mode.value
        if weighted:
            result.statistics['max_weight'] = max_weights
        else:
            result.statistics['max_abs_correlation'] = correlations
            result.statistics['correlation_bound'] = correlation_bound
            result.check('chi_square', p_passed)
            result.check('independence', independent)

        result.check('total_variation', tv_passed)
        result.add_table(GOF_SCHEMA, gof_table)
        result.add_table(HISTOGRAM_SCHEMA, histogram_table)
        return result
