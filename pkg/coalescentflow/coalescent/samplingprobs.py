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

import itertools
import math
from typing import Iterator, List, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.special import gammaln

from coalescentflow.core.enumerations import EventKind
from coalescentflow.core.exceptions import DegenerateKernelError, DomainError, OracleMissingError
from coalescentflow.coalescent.backwardchain import BackwardEvent
from coalescentflow.coalescent.mutationmodel import MutationModel, TypeConfiguration


def pim_log_sampling_probability(config: TypeConfiguration, theta: float, q: Sequence[float]) -> float:
    """
    Returns log p_Q(config), the log of the Dirichlet-multinomial mass

        (s! / prod_j n_j!) * [Gamma(theta) / Gamma(theta + s)] * prod_j Gamma(theta Q_j + n_j) / Gamma(theta Q_j)

    and -inf when a type of zero mutation probability has a positive count.
    """
    q = np.asarray(q, dtype=float)
    counts = config.as_array()
    size = config.size

    if size < 1:
        raise DomainError('Sampling probabilities require a nonempty configuration.')
    if len(counts) != len(q):
        raise DomainError('Configuration and mutation row have different dimensions ({} != {}).'.format(len(counts), len(q)))
    if np.any((q <= 0) & (counts > 0)):
        return -math.inf

    used = counts > 0
    log_p = gammaln(size + 1) - np.sum(gammaln(counts + 1))
    log_p += gammaln(theta) - gammaln(theta + size)
    log_p += np.sum(gammaln(theta * q[used] + counts[used]) - gammaln(theta * q[used]))
    return float(log_p)


def pim_sampling_probability(config: TypeConfiguration, theta: float, q: Sequence[float]) -> float:
    """
    Returns the PIM sampling probability p_Q(config).
    """
    return math.exp(pim_log_sampling_probability(config, theta, q))


def pim_asymptotic_approx(y: Sequence[float], scale: int, theta: float, q: Sequence[float]) -> float:
    """
    Returns the large-n approximation of p_Q(round(n y)):

        p~_Q(y/||y||) ||y||^(1-d) n^(1-d),

    where p~_Q is the Dirichlet(theta Q) density, the stationary density of the PIM
    Wright-Fisher diffusion.
    """
    y = np.asarray(y, dtype=float)
    q = np.asarray(q, dtype=float)
    d = len(y)

    if d == 1:
        return 1.0
    if np.any(y <= 0):
        raise DomainError('The asymptotic approximation is undefined on the boundary of the simplex (y={}).'.format(y.tolist()))
    if np.any(q <= 0):
        raise DomainError('The Dirichlet density requires a strictly positive mutation row (Q={}).'.format(q.tolist()))

    norm = y.sum()
    density = stats.dirichlet.pdf(y / norm, theta * q)
    return float(density * norm ** (1 - d) * float(scale) ** (1 - d))


class SamplingProbabilityOracle:
    """
    Evaluator of the sampling probabilities p(config) of a mutation model.
    """
    def __init__(self, model_id: str):
        self.model_id = model_id

    def log_probability(self, config: TypeConfiguration) -> float:
        """
        Returns log p(config).
        """
        raise NotImplementedError('Interface Class has not to implement any method.')

    def probability(self, config: TypeConfiguration) -> float:
        """
        Returns p(config).
        """
        return math.exp(self.log_probability(config))


class PimSamplingOracle(SamplingProbabilityOracle):
    """
    Closed-form sampling probabilities of a parent independent model.
    """
    def __init__(self, theta: float, q: Sequence[float]):
        self.theta = float(theta)
        self.q = np.asarray(q, dtype=float)
        super().__init__('pim(theta={}, q={})'.format(self.theta, self.q.tolist()))

    def log_probability(self, config: TypeConfiguration) -> float:
        return pim_log_sampling_probability(config, self.theta, self.q)


def oracle_for(model: MutationModel) -> SamplingProbabilityOracle:
    """
    Returns the built-in sampling probability oracle of the model.
    """
    if model.is_pim:
        return PimSamplingOracle(model.theta, model.pim_row)

    raise OracleMissingError(
        'No sampling probability oracle is available for parent dependent mutations; '
        'plug one in or use the asymptotic r-mode.'
    )


def level_configurations(size: int, dimension: int) -> Iterator[TypeConfiguration]:
    """
    Yields every configuration of d nonnegative counts adding up to 'size'.
    """
    for bars in itertools.combinations(range(size + dimension - 1), dimension - 1):
        edges = (-1,) + bars + (size + dimension - 1,)
        yield TypeConfiguration(tuple(edges[k + 1] - edges[k] - 1 for k in range(dimension)))


def forward_event_distribution(config: TypeConfiguration, model: MutationModel) -> List[BackwardEvent]:
    """
    Returns the events of positive probability of the forward chain from 'config':

        growth j:       (n_j / s) (s - 1) / (s - 1 + theta)
        mutation i->j:  (n_i / s) theta P_ij / (s - 1 + theta)

    ordered by growth type j, then by mutation (i, j) lexicographically. A single
    individual cannot grow under this kernel, so size-1 configurations are rejected.
    """
    size = config.size
    if size < 2:
        raise DegenerateKernelError(
            'The forward kernel is degenerate at size {} (growth has probability zero).'.format(size)
        )

    theta = model.theta
    counts = config.counts
    d = len(counts)
    events = []

    for j in range(d):
        if counts[j] > 0:
            p = (counts[j] / size) * (size - 1) / (size - 1 + theta)
            events.append(BackwardEvent(EventKind.GROWTH, j, None, p))

    for i in range(d):
        for j in range(d):
            p = (counts[i] / size) * theta * model.matrix[i, j] / (size - 1 + theta)
            if p > 0:
                events.append(BackwardEvent(EventKind.MUTATION, j, i, p))

    return events


def reversal_factors(config: TypeConfiguration, theta: float, q: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns the forward-in-time factors binding p_Q to the backward kernel: per type j
    the growth factor (n_j - 1)/(s - 1 + theta) from config - e_j, and per pair (i, j)
    the mutation factor ((n_i + 1 - delta_ij)/s) theta Q_j/(s - 1 + theta) from
    config - e_j + e_i.
    """
    q = np.asarray(q, dtype=float)
    counts = config.as_array()
    size = config.size
    d = len(counts)

    growth = (counts - 1) / (size - 1 + theta)
    mutation = np.zeros((d, d))
    for i in range(d):
        for j in range(d):
            mutation[i, j] = ((counts[i] + 1 - (1 if i == j else 0)) / size) * theta * q[j] / (size - 1 + theta)

    return growth, mutation
