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
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from coalescentflow.core.enumerations import Direction, EventKind
from coalescentflow.core.exceptions import DomainError, NotPimError
from coalescentflow.coalescent.mutationmodel import MutationCountMatrix, MutationModel, TypeConfiguration, zero_counts


# Products n t closer than this to the integer above count as that integer, so decimal
# times such as t = 0.29 at n = 100 (n t = 28.999999999999996) give 29 steps.
STEP_TOLERANCE = 1e-9


def scaled_step_count(scale: int, t: float) -> int:
    """
    Returns floor(n t), the number of chain steps in the scaled time t.
    """
    return int(math.floor(scale * t + STEP_TOLERANCE))


@dataclass(frozen=True)
class BackwardEvent:
    """
    One transition of the jump chain. 'target' is the type j of the event, 'source'
    the type i of a mutation i -> j (None for coalescences and growths).
    """
    kind: EventKind
    target: int
    source: Optional[int] = None
    probability: float = 0.0

    def apply(self, counts: List[int], direction: Direction) -> None:
        """
        Applies this event in place to a list of type counts.
        """
        if direction == Direction.BACKWARD:
            if self.kind == EventKind.COALESCENCE:
                counts[self.target] -= 1
            else:
                counts[self.target] -= 1
                counts[self.source] += 1
        else:
            if self.kind == EventKind.GROWTH:
                counts[self.target] += 1
            else:
                counts[self.source] -= 1
                counts[self.target] += 1


@dataclass
class ScaledPath:
    """
    One realization of the chain (Y, M) at scale n, stored as its list of events.
    'tau' is the absorption step (size 1) of a complete backward path and None when
    the simulation was truncated or the path evolves forwards.
    """
    scale: int
    initial: TypeConfiguration
    events: List[BackwardEvent] = field(default_factory=list)
    tau: Optional[int] = None
    mutation_counts: Optional[MutationCountMatrix] = None
    direction: Direction = Direction.BACKWARD

    @property
    def steps(self) -> int:
        return len(self.events)

    def trajectory(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Returns the per-step type counts, shape (steps+1, d), and the per-step mutation
        count matrices, shape (steps+1, d, d).
        """
        d = self.initial.dimension
        counts = np.zeros((self.steps + 1, d), dtype=np.int64)
        matrices = np.zeros((self.steps + 1, d, d), dtype=np.int64)
        current = list(self.initial.counts)
        mutations = zero_counts(d)
        counts[0] = current

        for k, event in enumerate(self.events, start=1):
            event.apply(current, self.direction)
            if event.kind == EventKind.MUTATION:
                mutations[event.source, event.target] += 1
            counts[k] = current
            matrices[k] = mutations

        return counts, matrices

    def state_at_step(self, step: int) -> Tuple[TypeConfiguration, MutationCountMatrix]:
        """
        Returns the configuration and mutation counts after 'step' events.
        """
        if step > self.steps:
            raise DomainError('Step {} is beyond the {} recorded steps of the path.'.format(step, self.steps))

        d = self.initial.dimension
        current = list(self.initial.counts)
        mutations = zero_counts(d)

        for event in self.events[:step]:
            event.apply(current, self.direction)
            if event.kind == EventKind.MUTATION:
                mutations[event.source, event.target] += 1

        return TypeConfiguration(tuple(current)), mutations


def _require_pim(model: MutationModel) -> np.ndarray:
    """
    Returns the common row Q of a PIM model.
    """
    if not model.is_pim:
        raise NotPimError('Exact backward transition probabilities require parent independent mutations.')

    return model.pim_row


def backward_event_distribution(config: TypeConfiguration, model: MutationModel, scale: int = 1) -> List[BackwardEvent]:
    """
    Returns the events of positive probability from 'config' with their backward
    transition probabilities. Events are ordered by coalescence type j, then by
    mutation (i, j) lexicographically.

    With y = config/n the probabilities only depend on the counts n_j = n y_j and the
    size s = n ||y||:
        coalescence j:  n_j (n_j - 1) / (s (n_j - 1 + theta Q_j))
        mutation i->j:  theta Q_j n_j (n_i - delta_ij + theta Q_i) / (s (s - 1 + theta) (n_j - 1 + theta Q_j))
    """
    q = _require_pim(model)
    theta = model.theta
    counts = config.counts
    size = config.size

    if size < 2:
        raise DomainError('The chain is already absorbed (size={}).'.format(size))
    if scale < 1:
        raise DomainError('Scale must be >= 1 (n={}).'.format(scale))

    d = len(counts)
    events = []

    for j in range(d):
        n_j = counts[j]
        if n_j >= 2:
            p = n_j * (n_j - 1) / (size * (n_j - 1 + theta * q[j]))
            events.append(BackwardEvent(EventKind.COALESCENCE, j, None, p))

    denominator = size * (size - 1 + theta)
    for i in range(d):
        for j in range(d):
            n_j = counts[j]
            if n_j == 0 or q[j] <= 0:
                continue
            factor = counts[i] - (1 if i == j else 0) + theta * q[i]
            if factor <= 0:
                continue
            p = theta * q[j] * n_j * factor / (denominator * (n_j - 1 + theta * q[j]))
            events.append(BackwardEvent(EventKind.MUTATION, j, i, p))

    return events


def event_probability(events: List[BackwardEvent], kind: EventKind, target: int, source: Optional[int] = None) -> float:
    """
    Returns the probability of the specified event in an event list, 0 when absent.
    """
    for event in events:
        if event.kind == kind and event.target == target and event.source == source:
            return event.probability

    return 0.0


def backward_rate_limits(y: np.ndarray, model: MutationModel) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns the large-n limits of the backward kernel at y: coalescence probabilities
    y_j/||y|| and scaled mutation rates theta P_ij y_i/||y||^2.
    """
    y = np.asarray(y, dtype=float)
    norm = y.sum()
    if norm <= 0:
        raise DomainError('The origin is outside the domain of the limiting rates.')

    return y / norm, model.theta * model.matrix * y[:, None] / norm ** 2


def sample_event(events: List[BackwardEvent], rng: np.random.Generator) -> BackwardEvent:
    """
    Draws one event by inversion of the cumulative distribution in list order.
    """
    u = rng.random()
    cumulative = 0.0

    for event in events:
        cumulative += event.probability
        if u < cumulative:
            return event

    return events[-1]


def simulate_backward(initial: TypeConfiguration,
                      model: MutationModel,
                      scale: int,
                      rng: np.random.Generator,
                      max_steps: Optional[int] = None) -> ScaledPath:
    """
    Simulates the backward jump chain from 'initial' until a single lineage remains,
    or until 'max_steps' events when given. The path only depends on the state of 'rng'.
    """
    _require_pim(model)
    if initial.size < 1:
        raise DomainError('The initial configuration is empty.')

    d = initial.dimension
    current = list(initial.counts)
    mutations = zero_counts(d)
    events: List[BackwardEvent] = []
    size = initial.size

    while size > 1 and (max_steps is None or len(events) < max_steps):
        event = sample_event(backward_event_distribution(TypeConfiguration(tuple(current)), model, scale), rng)
        event.apply(current, Direction.BACKWARD)
        if event.kind == EventKind.MUTATION:
            mutations[event.source, event.target] += 1
        else:
            size -= 1
        events.append(event)

    tau = len(events) if size == 1 else None
    logging.debug('Backward path simulated: steps={}, tau={}.'.format(len(events), tau))

    return ScaledPath(scale, initial, events, tau, mutations, Direction.BACKWARD)


def scaled_state_at(path: ScaledPath, t: float) -> Tuple[np.ndarray, MutationCountMatrix]:
    """
    Returns (Y(t), M(t)) of the time-scaled path, the state after floor(n t) steps
    frozen at absorption. Piecewise constant and right-continuous in t.
    """
    if t < 0:
        raise DomainError('Time must be nonnegative (t={}).'.format(t))

    step = scaled_step_count(path.scale, t)
    if path.tau is not None:
        step = min(step, path.tau)

    config, mutations = path.state_at_step(step)
    return config.scaled(path.scale), mutations


@dataclass
class PathBatch:
    """
    Outcome of a batch of chains simulated side by side for a fixed number of steps.
    'steps' holds the number of events each path actually took (absorbed paths stop
    early) and 'trajectory' the per-step counts, shape (paths, steps+1, d), when recorded.
    """
    scale: int
    counts: np.ndarray
    mutations: np.ndarray
    steps: np.ndarray
    trajectory: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return len(self.counts)


def event_table(dimension: int, direction: Direction) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns the count increments, shape (d + d^2, d), of the events of the chain in
    kernel order, and the flattened mutation-matrix index of each event (-1 for
    coalescences and growths).
    """
    d = dimension
    deltas = np.zeros((d + d * d, d), dtype=np.int64)
    m_index = np.full(d + d * d, -1, dtype=np.int64)
    sign = -1 if direction == Direction.BACKWARD else 1

    for j in range(d):
        deltas[j, j] = sign
    for i in range(d):
        for j in range(d):
            k = d + i * d + j
            deltas[k, j] += sign
            deltas[k, i] -= sign
            m_index[k] = i * d + j

    return deltas, m_index


def backward_probability_table(counts: np.ndarray, model: MutationModel) -> np.ndarray:
    """
    Vectorized backward kernel: returns the (paths, d + d^2) probabilities of the events
    of backward_event_distribution, in the same order, for a batch of count vectors.
    Absorbed rows (size < 2) get no events.
    """
    q = _require_pim(model)
    theta = model.theta
    counts = np.asarray(counts, dtype=np.int64)
    paths, d = counts.shape
    size = counts.sum(axis=1)
    active = size >= 2
    safe_size = np.where(active, size, 2)
    table = np.zeros((paths, d + d * d))

    for j in range(d):
        n_j = counts[:, j]
        scale = n_j - 1 + theta * q[j]
        valid = active & (n_j >= 2)
        p = n_j * (n_j - 1) / (safe_size * np.where(valid, scale, 1.0))
        table[:, j] = np.where(valid, p, 0.0)

    denominator = safe_size * (safe_size - 1 + theta)
    for i in range(d):
        for j in range(d):
            n_j = counts[:, j]
            factor = counts[:, i] - (1 if i == j else 0) + theta * q[i]
            scale = n_j - 1 + theta * q[j]
            valid = active & (n_j > 0) & (factor > 0) & (q[j] > 0)
            p = theta * q[j] * n_j * factor / (denominator * np.where(valid, scale, 1.0))
            table[:, d + i * d + j] = np.where(valid, p, 0.0)

    return table


def choose_events(table: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """
    Returns, per row, the index of the event selected by inversion of the cumulative
    probabilities with the given uniform numbers (as sample_event does).
    """
    cumulative = np.cumsum(table, axis=1)
    hits = uniforms[:, None] < cumulative
    chosen = np.argmax(hits, axis=1)

    # Round-off fallback: the last event of positive probability.
    missing = ~hits.any(axis=1)
    if missing.any():
        positive = table[missing] > 0
        last = table.shape[1] - 1 - np.argmax(positive[:, ::-1], axis=1)
        chosen[missing] = last

    return chosen


def run_batch(initial: TypeConfiguration,
              scale: int,
              uniforms: np.ndarray,
              kernel,
              direction: Direction,
              record: bool = False) -> PathBatch:
    """
    Advances a batch of chains started at 'initial' one step per column of 'uniforms'
    with the vectorized 'kernel' (counts -> probability table). Rows whose kernel
    has no events are frozen.
    """
    d = initial.dimension
    paths, steps = uniforms.shape
    deltas, m_index = event_table(d, direction)
    counts = np.tile(initial.as_array(), (paths, 1))
    mutations = np.zeros((paths, d * d), dtype=np.int64)
    taken = np.zeros(paths, dtype=np.int64)
    trajectory = np.zeros((paths, steps + 1, d), dtype=np.int64) if record else None
    rows = np.arange(paths)

    if record:
        trajectory[:, 0] = counts

    for step in range(steps):
        table = kernel(counts)
        active = table.sum(axis=1) > 0
        if active.any():
            chosen = choose_events(table[active], uniforms[active, step])
            counts[active] += deltas[chosen]
            taken[active] += 1
            flat = m_index[chosen]
            mutation_rows = rows[active][flat >= 0]
            mutations[mutation_rows, flat[flat >= 0]] += 1
        if record:
            trajectory[:, step + 1] = counts

    return PathBatch(scale, counts, mutations.reshape(paths, d, d), taken, trajectory)


def simulate_backward_batch(initial: TypeConfiguration,
                            model: MutationModel,
                            scale: int,
                            uniforms: np.ndarray,
                            record: bool = False) -> PathBatch:
    """
    Simulates one backward chain per row of 'uniforms' for as many steps as columns,
    freezing absorbed chains. Row k reproduces simulate_backward driven by a stream
    whose successive uniforms are uniforms[k].
    """
    _require_pim(model)
    if initial.size < 1:
        raise DomainError('The initial configuration is empty.')

    return run_batch(initial, scale, np.atleast_2d(uniforms),
                     lambda counts: backward_probability_table(counts, model), Direction.BACKWARD, record)
