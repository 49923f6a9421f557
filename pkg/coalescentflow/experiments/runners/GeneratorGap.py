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
from typing import Dict

from coalescentflow.core.enumerations import Direction
from coalescentflow.core.exceptions import ConfigError
from coalescentflow.core.schemadef import DataType, FieldDef, SchemaDef
from coalescentflow.coalescent.generatorlab import (
    DEFAULT_GRID_BUDGET, DEFAULT_SLAB_POINTS, GapReport, generator_gap
)
from coalescentflow.experiments.modules import AbstractExperiment, ExperimentResult


class GeneratorGap(AbstractExperiment):
    """
    Evaluates sup |A^(n) f - A f| over the lattice for a fixed test function and fits
    the rate at which the discrete generators approach the limit generator.
    """
    def __init__(self):
        AbstractExperiment.__init__(self)
        self.direction = Direction.BACKWARD.value
        self.gridBudget = DEFAULT_GRID_BUDGET
        self.slabPoints = DEFAULT_SLAB_POINTS

    def name(self) -> str:
        return 'generator-gap'

    def alias(self) -> str:
        return 'Generator gap'

    def description(self) -> str:
        return 'Sup-grid distance between the discrete generators and the limit generator.'

    def category(self) -> str:
        return 'Convergence'

    def params(self) -> Dict:
        return {
            'direction': {
                'description': 'Chain whose generator is compared with its limit.',
                'dataType': 'string',
                'default': Direction.BACKWARD.value,
                'options': [d.value for d in Direction]
            },
            'gridBudget': {
                'description': 'Largest number of lattice points of one scale.',
                'dataType': 'int',
                'default': DEFAULT_GRID_BUDGET
            },
            'slabPoints': {
                'description': 'Lattice points evaluated at once.',
                'dataType': 'int',
                'default': DEFAULT_SLAB_POINTS
            }
        }

    def tolerances(self) -> Dict[str, float]:
        return {'slope_width': 0.3}

    def starting_run(self, config, processing_args) -> None:
        if self.direction not in [d.value for d in Direction]:
            raise ConfigError('Unknown direction "{}".'.format(self.direction), field='parameters.direction')

        pass

    def run(self, config, processing_args) -> ExperimentResult:
        """
        Runs the Experiment and returns its artifacts.
        """
        model = config.model()
        f = config.test_function()
        direction = Direction(self.direction)
        result = ExperimentResult()

        report = GapReport()
        scales = sorted(config.n_values)
        progress = self.progress(processing_args, len(scales), 'generator-gap')

        for n in scales:
            gap, points = generator_gap(f, n, model, direction, self.gridBudget, self.slabPoints)
            report.append(n, gap, points)
            progress.update()
            logging.info('Generator gap at n={}: {} over {} grid points.'.format(n, gap, points))

        progress.close()
        report.fit()

        schema_def = SchemaDef('gaps', [
            FieldDef('n', DataType.Integer), FieldDef('gap'), FieldDef('grid_points', DataType.Integer)
        ])
        result.add_table(schema_def, [list(row) for row in zip(report.n_values, report.gaps, report.grid_points)])

        result.statistics['slope'] = report.slope
        result.statistics['direction'] = direction.value
        result.check('gap_decreasing', report.decreasing)
        result.check('slope_range', not math.isnan(report.slope) and abs(report.slope + 1.0) <= config.tolerance('slope_width'))

        if not report.decreasing:
            logging.warning('The generator gaps are not strictly decreasing: {}'.format(report.gaps))

        return result
