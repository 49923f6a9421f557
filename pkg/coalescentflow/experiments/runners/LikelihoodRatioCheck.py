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

import json
import logging
from typing import Dict, List

import numpy as np

from coalescentflow.core.enumerations import Direction, EventKind
from coalescentflow.core.exceptions import ConfigError
from coalescentflow.core.schemadef import DataType, FieldDef, SchemaDef
from coalescentflow.coalescent.backwardchain import backward_event_distribution, event_probability, simulate_backward
from coalescentflow.coalescent.generatorlab import DEFAULT_STATE_BUDGET
from coalescentflow.coalescent.measurechange import (
    analytic_unit_expectation, coalescence_reversal_gap, enumerate_unit_expectation,
    history_likelihood_ratio, importance_expectation, mutation_reversal_gap, step_ratio_product
)
from coalescentflow.coalescent.mutationmodel import MutationModel, TypeConfiguration
from coalescentflow.coalescent.samplingprobs import pim_sampling_probability
from coalescentflow.experiments.modules import (
    AUXILIARY_CHANNEL, AbstractExperiment, ExperimentResult, check_backward_horizon,
    initial_configuration, random_kernel_states, random_probability_vector
)

# Reversal identities evaluated by hand at theta = 4, Q = (0.5, 0.5): the coalescence
# of type 1 at (2, 0) and the mutation 1 -> 2 at (1, 1), both sides of the identity.
HAND_REVERSALS = [
    ((2, 0), EventKind.COALESCENCE, 0, None, 0.3 / 3.0),
    ((1, 1), EventKind.MUTATION, 1, 0, 0.12)
]


def relative_gap(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


class LikelihoodRatioCheck(AbstractExperiment):
    """
    Checks the change of measure between a PIM target P (row Q') and a PIM proposal Q:
    exact enumeration of E_Q[C R] = 1, the analytic identity of the limit process, the
    Monte Carlo estimate of E_Q[C R], the per-step likelihood ratios and the reversal
    identities binding the sampling probabilities to the backward kernel.
    """
    def __init__(self):
        AbstractExperiment.__init__(self)
        self.enumerationCounts = [[1, 1], [2, 1]]
        self.maxSteps = 4
        self.nodeBudget = DEFAULT_STATE_BUDGET
        self.analyticTrials = 100
        self.reversalTrials = 500
        self.ratioPaths = 20
        self.chunkSize = 2000

    def name(self) -> str:
        return 'lr-check'

    def alias(self) -> str:
        return 'Likelihood ratio check'

    def description(self) -> str:
        return 'Unit-expectation and reversal identities of the change of measure.'

    def category(self) -> str:
        return 'Change of measure'

    def params(self) -> Dict:
        return {
            'enumerationCounts': {
                'description': 'Initial configurations of the exhaustive enumeration.',
                'dataType': 'list',
                'default': [[1, 1], [2, 1]]
            },
            'maxSteps': {
                'description': 'Largest number of steps of the enumerated histories.',
                'dataType': 'int',
                'default': 4
            },
            'nodeBudget': {
                'description': 'Largest number of nodes visited by the enumeration.',
                'dataType': 'int',
                'default': DEFAULT_STATE_BUDGET
            },
            'analyticTrials': {
                'description': 'Number of random (P, Q, t, y0) of the analytic identity.',
                'dataType': 'int',
                'default': 100
            },
            'reversalTrials': {
                'description': 'Number of random configurations of the reversal identities.',
                'dataType': 'int',
                'default': 500
            },
            'ratioPaths': {
                'description': 'Number of short paths where history and step ratios are compared.',
                'dataType': 'int',
                'default': 20
            },
            'chunkSize': {
                'description': 'Number of paths simulated side by side.',
                'dataType': 'int',
                'default': 2000
            }
        }

    def tolerances(self) -> Dict[str, float]:
        return {'enumeration': 1e-10, 'analytic': 1e-12, 'reversal': 1e-12, 'history_ratio': 1e-10, 'standard_errors': 3.0}

    def starting_run(self, config, processing_args) -> None:
        """
        Checks the config before the Experiment starts.
        """
        if config.proposal_model() is None:
            raise ConfigError('The likelihood ratio check needs a proposal row.', field='model.proposal_q')
        if not config.model().is_pim:
            raise ConfigError('The likelihood ratio check needs a parent independent target.', field='model.matrix')

        d = config.model().dimension
        for counts in self.enumerationCounts:
            if len(counts) != d or min(counts) < 0:
                raise ConfigError('Invalid enumeration configuration {}.'.format(counts), field='parameters.enumerationCounts')

        check_backward_horizon(config.y0(), config.t_values[0])
        pass

    def enumeration(self, model_p: MutationModel, model_q: MutationModel, result: ExperimentResult) -> float:
        schema_def = SchemaDef('enumeration', [
            FieldDef('counts', DataType.String), FieldDef('steps', DataType.Integer),
            FieldDef('value'), FieldDef('nodes', DataType.Integer)
        ])
        rows: List[List] = []
        error = 0.0

        for counts in self.enumerationCounts:
            initial = TypeConfiguration(tuple(counts))
            for steps in range(1, self.maxSteps + 1):
                value, nodes = enumerate_unit_expectation(initial, steps, model_p, model_q, self.nodeBudget)
                error = max(error, abs(value - 1.0))
                rows.append([json.dumps(list(initial.counts)), steps, value, nodes])

        result.add_table(schema_def, rows)
        return error

    def analytic(self, rng: np.random.Generator, result: ExperimentResult) -> float:
        schema_def = SchemaDef('analytic', [FieldDef('trial', DataType.Integer), FieldDef('value')])
        rows: List[List] = []
        error = 0.0

        for trial in range(self.analyticTrials):
            d = int(rng.integers(2, 5))
            theta = 10.0 * (1.0 - rng.random())
            model_p = MutationModel(theta, np.stack([random_probability_vector(rng, d) for _ in range(d)]))
            model_q = MutationModel.from_pim(theta, random_probability_vector(rng, d))
            y0 = rng.uniform(0.1, 1.0, size=d)
            t = float(rng.uniform(0.0, 0.9)) * float(y0.sum())

            value = analytic_unit_expectation(y0, t, model_p, model_q)
            error = max(error, abs(value - 1.0))
            rows.append([trial, value])

        result.add_table(schema_def, rows)
        return error

    def reversal(self, rng: np.random.Generator, result: ExperimentResult) -> float:
        coalescence, mutation = 0.0, 0.0
        for config, model in random_kernel_states(rng, self.reversalTrials, 4, 50, 10.0):
            coalescence = max(coalescence, coalescence_reversal_gap(config, model))
            mutation = max(mutation, mutation_reversal_gap(config, model))

        hand_model = MutationModel.from_pim(4.0, [0.5, 0.5])
        hand = 0.0
        for counts, kind, target, source, value in HAND_REVERSALS:
            config = TypeConfiguration(counts)
            events = backward_event_distribution(config, hand_model)
            lhs = event_probability(events, kind, target, source) * pim_sampling_probability(config, 4.0, [0.5, 0.5])
            hand = max(hand, abs(lhs - value))

        result.statistics['reversal_coalescence_gap'] = coalescence
        result.statistics['reversal_mutation_gap'] = mutation
        result.statistics['reversal_hand_gap'] = hand
        return max(coalescence, mutation, hand)

    def history_ratios(self, processing_args, model_p: MutationModel, model_q: MutationModel) -> float:
        """
        Returns the largest relative gap between the closed-form history likelihood ratio
        and the product of per-step kernel ratios, both directions.
        """
        error = 0.0
        index = 0
        for counts in self.enumerationCounts:
            initial = TypeConfiguration(tuple(counts))
            if initial.size < 2:
                continue
            for _ in range(self.ratioPaths):
                rng = processing_args.streams.stream(index, AUXILIARY_CHANNEL + 2)
                path = simulate_backward(initial, model_q, 1, rng, max_steps=self.maxSteps)
                index += 1
                for direction in Direction:
                    closed = history_likelihood_ratio(path, direction, model_p, model_q)
                    stepwise = step_ratio_product(path, model_p, model_q, direction)
                    error = max(error, relative_gap(closed, stepwise))

        return error

    def run(self, config, processing_args) -> ExperimentResult:
        """
        Runs the Experiment and returns its artifacts.
        """
        model_p = config.model()
        model_q = config.proposal_model()
        streams = processing_args.streams
        result = ExperimentResult()

        enumeration_error = self.enumeration(model_p, model_q, result)
        analytic_error = self.analytic(streams.stream(0, AUXILIARY_CHANNEL), result)
        reversal_error = self.reversal(streams.stream(0, AUXILIARY_CHANNEL + 1), result)
        ratio_error = self.history_ratios(processing_args, model_p, model_q)

        y0 = config.y0()
        n = config.n_values[0]
        t = config.t_values[0]
        progress = self.progress(processing_args, config.paths, 'lr-check n={}'.format(n))
        estimate = importance_expectation(
            lambda positions, mutations: np.ones(len(positions)), initial_configuration(y0, n), model_p, model_q,
            t, n, config.paths, streams, config.r_mode, processing_args.threads, self.chunkSize
        )
        progress.update(config.paths)
        progress.close()
        for warning in estimate.warnings:
            result.warn(warning)

        logging.info('Monte Carlo E_Q[C R] at n={}, t={}: {} +/- {}.'.format(n, t, estimate.mean, estimate.std_error))

        result.statistics['enumeration_error'] = enumeration_error
        result.statistics['analytic_error'] = analytic_error
        result.statistics['history_ratio_error'] = ratio_error
        result.statistics['monte_carlo_mean'] = estimate.mean
        result.statistics['monte_carlo_std_error'] = estimate.std_error
        result.statistics['monte_carlo_max_weight'] = estimate.max_weight

        result.check('enumeration', enumeration_error <= config.tolerance('enumeration'))
        result.check('analytic', analytic_error <= config.tolerance('analytic'))
        result.check('reversal', reversal_error <= config.tolerance('reversal'))
        result.check('history_ratio', ratio_error <= config.tolerance('history_ratio'))
        result.check('monte_carlo', abs(estimate.mean - 1.0) <= config.tolerance('standard_errors') * estimate.std_error)
        return result
