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
from typing import List

import numpy as np

from coalescentflow.core.enumerations import Direction, EventKind
from coalescentflow.core.exceptions import DegenerateKernelError, DomainError
from coalescentflow.coalescent.backwardchain import BackwardEvent, PathBatch, ScaledPath, run_batch, sample_event
from coalescentflow.coalescent.mutationmodel import MutationModel, TypeConfiguration, zero_counts
from coalescentflow.coalescent.samplingprobs import forward_event_distribution


def check_forward_initial(initial: TypeConfiguration, scale: int, epsilon: float = 0.0) -> None:
    """
    Raises when the initial configuration is outside the admissible forward domain: at
    least two individuals and every type present with scaled count >= epsilon.
    """
    if initial.size < 2:
        raise DegenerateKernelError('The forward chain cannot start from {} individual(s).'.format(initial.size))

    scaled = initial.scaled(scale)
    if np.any(initial.as_array() < 1) or np.any(scaled < epsilon):
        raise DomainError(
            'Forward initial configurations need every type present with y_j >= epsilon (y={}, epsilon={}).'
            .format(scaled.tolist(), epsilon)
        )


def simulate_forward(initial: TypeConfiguration,
                     model: MutationModel,
                     scale: int,
                     steps: int,
                     rng: np.random.Generator,
                     epsilon: float = 0.0) -> ScaledPath:
    """
    Simulates 'steps' events of the forward chain from 'initial'. Growth adds one
    individual of the parent type; mutations keep the size. The path only depends on
    the state of 'rng'.
    """
    check_forward_initial(initial, scale, epsilon)

    current = list(initial.counts)
    mutations = zero_counts(initial.dimension)
    events: List[BackwardEvent] = []

    for _ in range(steps):
        event = sample_event(forward_event_distribution(TypeConfiguration(tuple(current)), model), rng)
        event.apply(current, Direction.FORWARD)
        if event.kind == EventKind.MUTATION:
            mutations[event.source, event.target] += 1
        events.append(event)

    logging.debug('Forward path simulated: steps={}, size={}.'.format(steps, sum(current)))
    return ScaledPath(scale, initial, events, None, mutations, Direction.FORWARD)


def forward_probability_table(counts: np.ndarray, model: MutationModel) -> np.ndarray:
    """
    Vectorized forward kernel: returns the (paths, d + d^2) probabilities of the events
    of forward_event_distribution, in the same order, for a batch of count vectors.
    """
    counts = np.asarray(counts, dtype=np.int64)
    paths, d = counts.shape
    theta = model.theta
    size = counts.sum(axis=1)
    table = np.zeros((paths, d + d * d))

    for j in range(d):
        table[:, j] = (counts[:, j] / size) * (size - 1) / (size - 1 + theta)
    for i in range(d):
        for j in range(d):
            table[:, d + i * d + j] = (counts[:, i] / size) * theta * model.matrix[i, j] / (size - 1 + theta)

    return table


def simulate_forward_batch(initial: TypeConfiguration,
                           model: MutationModel,
                           scale: int,
                           uniforms: np.ndarray,
                           epsilon: float = 0.0,
                           record: bool = False) -> PathBatch:
    """
    Simulates one forward chain per row of 'uniforms' for as many steps as columns.
    Row k reproduces simulate_forward driven by a stream whose successive uniforms are
    uniforms[k].
    """
    check_forward_initial(initial, scale, epsilon)
    return run_batch(initial, scale, np.atleast_2d(uniforms),
                     lambda counts: forward_probability_table(counts, model), Direction.FORWARD, record)


def forward_limit_position(y0, t: float) -> np.ndarray:
    """
    Returns the forward limit trajectory y0 + (y0/||y0||) t.
    """
    y0 = np.asarray(y0, dtype=float)
    if np.any(y0 <= 0):
        raise DomainError('The forward limit requires a strictly positive initial point (y0={}).'.format(y0.tolist()))
    if t < 0:
        raise DomainError('Time must be nonnegative (t={}).'.format(t))

    return y0 + (y0 / y0.sum()) * t
