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

from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Sequence, Tuple

import numpy as np

from coalescentflow.core.exceptions import ConfigError
from coalescentflow.core.schemadef import DataType, FieldDef, SchemaDef
from coalescentflow.coalescent.mutationmodel import MutationModel, TypeConfiguration
from coalescentflow.coalescent.statistics import GofReport
from coalescentflow.experiments.progress import ExperimentProgress

# First channel of the random streams used by auxiliary trials, far from path sweeps.
AUXILIARY_CHANNEL = 1000


@dataclass
class ExperimentResult:
    """
    Artifacts of an Experiment: CSV tables, summary statistics and named pass/fail checks.
    """
    tables: List[Tuple[SchemaDef, List[Sequence[Any]]]] = field(default_factory=list)
    statistics: Dict[str, Any] = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    def add_table(self, schema_def: SchemaDef, rows: List[Sequence[Any]]) -> None:
        self.tables.append((schema_def, rows))
        pass

    def check(self, name: str, value: bool) -> bool:
        self.checks[name] = bool(value)
        return bool(value)

    def warn(self, message: str) -> None:
        if message not in self.warnings:
            self.warnings.append(message)

        pass

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


class AbstractExperiment:
    """
    Generic Experiment run from a validated config, dynamically discovered in the
    'runners' folder. Parameters declared by params() are plain attributes assigned
    from the 'parameters' section of the config.
    """
    def __init__(self):
        self.className = str(self.__class__.__name__)
        self.classType = 'experiment'

    @staticmethod
    def is_available() -> bool:
        """
        Indicates that this Experiment is available for use.
        """
        return True

    def name(self) -> str:
        """
        Returns the subcommand name of this Experiment.
        """
        return self.className.lower()

    def alias(self) -> str:
        """
        Returns the Human alias-name of this Experiment.
        """
        return self.className

    def category(self) -> str:
        """
        Returns the category or group to which this Experiment belongs.
        """
        return 'Experiments'

    def description(self) -> str:
        """
        Returns the Description text of this Experiment.
        """
        return 'Generic experiment'

    def params(self) -> Dict:
        """
        Returns the declaration of parameters supported by this Experiment.
        """
        return {}

    def tolerances(self) -> Dict[str, float]:
        """
        Returns the default tolerances of the acceptance checks of this Experiment.
        """
        return {}

    def default_parameters(self) -> Dict[str, Any]:
        return {name: param['default'] for name, param in self.params().items() if 'default' in param}

    def progress(self, processing_args, item_count: int, description: str = '') -> ExperimentProgress:
        """
        Returns a started progress bar of the specified size.
        """
        progress = ExperimentProgress(processing_args, description or self.name())
        progress.initialize(item_count)
        return progress

    def starting_run(self, config, processing_args) -> None:
        """
        Checks the config before the Experiment starts.
        """
        pass

    def run(self, config, processing_args) -> ExperimentResult:
        """
        Runs the Experiment and returns its artifacts.
        """
        raise NotImplementedError('Interface Class has not to implement any method.')


# Tables shared by the experiments fitting mutation counts to Poisson laws.
GOF_SCHEMA = SchemaDef('gof', [
    FieldDef('n', DataType.Integer), FieldDef('t'), FieldDef('i', DataType.Integer), FieldDef('j', DataType.Integer),
    FieldDef('lambda'), FieldDef('chi2'), FieldDef('dof', DataType.Integer), FieldDef('p_value'), FieldDef('tv'),
    FieldDef('weighted', DataType.Integer)
])
HISTOGRAM_SCHEMA = SchemaDef('histogram', [
    FieldDef('n', DataType.Integer), FieldDef('t'), FieldDef('i', DataType.Integer), FieldDef('j', DataType.Integer),
    FieldDef('k', DataType.Integer), FieldDef('observed'), FieldDef('expected')
])


def gof_rows(n: int, t: float, i: int, j: int, report: GofReport) -> Tuple[List[Any], List[List[Any]]]:
    """
    Returns the gof row and the histogram rows (1-based types) of one marginal fit.
    """
    row = [n, t, i + 1, j + 1, report.lam, report.chi2, report.dof, report.p_value, report.tv, int(report.weighted)]
    histogram = [
        [n, t, i + 1, j + 1, k, float(observed), float(expected)]
        for k, (observed, expected) in enumerate(zip(report.observed, report.expected))
    ]
    return row, histogram


def initial_configuration(y0: np.ndarray, n: int) -> TypeConfiguration:
    """
    Returns the grid configuration round(n y0) a chain at scale n starts from.
    """
    initial = TypeConfiguration.from_scaled(y0, n)
    if initial.size < 1:
        raise ConfigError('The scale n={} leaves no individual at y0={}.'.format(n, y0.tolist()), field='n_values')

    return initial


def check_backward_horizon(y0: np.ndarray, t: float) -> None:
    """
    Raises a ConfigError when the backward limit reaches the origin before 't'.
    """
    if t >= float(np.sum(y0)):
        raise ConfigError('Backward times must stay below ||y0|| = {} (t={}).'.format(float(np.sum(y0)), t),
                          field='t_values')

    pass


def random_probability_vector(rng: np.random.Generator, dimension: int, floor: float = 1e-6) -> np.ndarray:
    """
    Returns a Dirichlet(1, .., 1) probability vector with entries kept above 'floor'.
    """
    q = np.maximum(rng.dirichlet(np.ones(dimension)), floor)
    return q / q.sum()


def random_kernel_states(rng: np.random.Generator,
                         count: int,
                         max_dimension: int,
                         max_size: int,
                         max_theta: float,
                         parent_dependent: bool = False) -> Iterator[Tuple[TypeConfiguration, MutationModel]]:
    """
    Yields 'count' random (configuration, model) pairs: d <= max_dimension types,
    2 <= size <= max_size individuals and theta in (0, max_theta].
    """
    for _ in range(count):
        d = int(rng.integers(1, max_dimension + 1))
        size = int(rng.integers(2, max_size + 1))
        theta = max_theta * (1.0 - rng.random())
        counts = rng.multinomial(size, np.ones(d) / d)

        if parent_dependent:
            model = MutationModel(theta, np.stack([random_probability_vector(rng, d) for _ in range(d)]))
        else:
            model = MutationModel.from_pim(theta, random_probability_vector(rng, d))

        yield TypeConfiguration(tuple(int(c) for c in counts)), model
