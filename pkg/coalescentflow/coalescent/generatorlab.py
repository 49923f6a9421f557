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
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from coalescentflow.core.enumerations import Direction
from coalescentflow.core.exceptions import BudgetError, DomainError
from coalescentflow.coalescent.backwardchain import (
    STEP_TOLERANCE, backward_event_distribution, backward_probability_table, event_table, scaled_step_count
)
from coalescentflow.coalescent.forwardchain import forward_probability_table
from coalescentflow.coalescent.limitprocess import INFINITY, jump_intensity
from coalescentflow.coalescent.mutationmodel import MutationCountMatrix, MutationModel, TypeConfiguration, zero_counts
from coalescentflow.coalescent.samplingprobs import forward_event_distribution
from coalescentflow.coalescent.statistics import fit_loglog_slope, is_strictly_decreasing
from coalescentflow.coalescent.testfunctions import ConstantTestFunction, TestFunction

# Default limits of the exact grid and dynamic-programming evaluations.
DEFAULT_GRID_BUDGET = 200000000
DEFAULT_STATE_BUDGET = 20000000
DEFAULT_SLAB_POINTS = 100000


@dataclass
class GapReport:
    """
    Sup-norm gaps between a discrete and a limit operator along a sweep of scales n.
    """
    n_values: List[int] = field(default_factory=list)
    gaps: List[float] = field(default_factory=list)
    grid_points: List[int] = field(default_factory=list)
    slope: float = math.nan

    def append(self, n: int, gap: float, points: int = 0) -> None:
        self.n_values.append(int(n))
        self.gaps.append(float(gap))
        self.grid_points.append(int(points))
        pass

    def fit(self) -> "GapReport":
        """
        Fits the log-log slope of gap against n.
        """
        positive = [(n, g) for n, g in zip(self.n_values, self.gaps) if g > 0]
        self.slope = fit_loglog_slope([n for n, _ in positive], [g for _, g in positive]) if len(positive) >= 2 else math.nan
        return self

    @property
    def decreasing(self) -> bool:
        return is_strictly_decreasing(self.gaps)


def _event_distribution(config: TypeConfiguration, model: MutationModel, scale: int, direction: Direction):
    if direction == Direction.BACKWARD:
        return backward_event_distribution(config, model, scale)

    return forward_event_distribution(config, model)


def discrete_generator_apply(f: TestFunction,
                             config: TypeConfiguration,
                             scale: int,
                             model: MutationModel,
                             m: Optional[MutationCountMatrix] = None,
                             direction: Direction = Direction.BACKWARD) -> float:
    """
    Returns A^(n) f(y, m) = n (T^(n) - I) f(y, m) at y = config/n, the sum over the events
    of the chain of n [f(next state) - f(y, m)] times the event probability.
    """
    d = config.dimension
    m = zero_counts(d) if m is None else np.asarray(m, dtype=np.int64)
    current = f(config.scaled(scale), m)
    value = 0.0

    for event in _event_distribution(config, model, scale, direction):
        counts = list(config.counts)
        event.apply(counts, direction)
        m_next = m.copy()
        if event.source is not None:
            m_next[event.source, event.target] += 1

        value += scale * (f(np.array(counts) / float(scale), m_next) - current) * event.probability

    return value


def limit_generator_apply(f: TestFunction,
                          y,
                          m: Optional[MutationCountMatrix] = None,
                          model: Optional[MutationModel] = None,
                          direction: Direction = Direction.BACKWARD) -> float:
    """
    Returns the generator of the limit process,

        Af(y, m) = -+<grad_y f, y/||y||> + sum_ij [f(y, m + e_ij) - f(y, m)] lambda_ij(y),

    with drift towards the origin backwards and away from it forwards; Af(INFINITY, m) = 0.
    """
    if y is INFINITY:
        return 0.0

    y = np.asarray(y, dtype=float)
    if y.sum() <= 0:
        raise DomainError('The limit generator is undefined at the origin.')

    d = model.dimension
    m = zero_counts(d) if m is None else np.asarray(m, dtype=np.int64)
    sign = -1.0 if direction == Direction.BACKWARD else 1.0
    current = f(y, m)
    value = sign * float(np.dot(f.gradient(y, m), y / y.sum()))
    intensity = jump_intensity(y, model)

    for i, j in itertools.product(range(d), range(d)):
        if intensity[i, j] > 0:
            m_next = m.copy()
            m_next[i, j] += 1
            value += (f(y, m_next) - current) * intensity[i, j]

    return value


def m_grid(f: TestFunction, dimension: int) -> np.ndarray:
    """
    Returns every count matrix inside the m-support of f, shape (H, d, d). Functions
    without an m-support do not depend on m and get the zero matrix only.
    """
    if f.m_limit is None:
        return np.zeros((1, dimension, dimension), dtype=np.int64)

    entries = np.array(list(itertools.product(range(f.m_limit), repeat=dimension * dimension)), dtype=np.int64)
    return entries.reshape(-1, dimension, dimension)


def generator_gap(f: TestFunction,
                  scale: int,
                  model: MutationModel,
                  direction: Direction = Direction.BACKWARD,
                  grid_budget: int = DEFAULT_GRID_BUDGET,
                  slab_points: int = DEFAULT_SLAB_POINTS) -> Tuple[float, int]:
    """
    Returns (sup |A^(n) f - Af|, grid points) over the lattice E^(n) restricted to the
    support of f enlarged by 2/n, where both generators vanish outside it.

    With f(y, m) = F(y) X(m) the gap at (y, m) is

        X(m) a(y) + sum_ij X(m + e_ij) c_ij(y),

    so F is evaluated once on a padded slab of the lattice and every neighbour of a
    lattice point is a shifted slice of it.
    Lattice points where F, its gradient and F at every neighbour all vanish add nothing
    and are skipped before the m-grid is evaluated; the grid points count the rest.
    """
    d = model.dimension
    if isinstance(f, ConstantTestFunction):
        return 0.0, 0

    n = int(scale)
    lower = max(0, int(math.ceil(n * f.delta - 2 - STEP_TOLERANCE)))
    upper = int(math.floor(n * f.radius + 2 + STEP_TOLERANCE))
    length = upper - lower + 1
    if length ** d > grid_budget:
        raise BudgetError('The generator grid at n={} has {} points, over the budget of {}.'.format(n, length ** d, grid_budget))

    matrices = m_grid(f, d)
    units = np.eye(d * d, dtype=np.int64).reshape(d * d, d, d)
    x_current = f.m_factor(matrices)
    x_moved = f.m_factor(matrices[:, None] + units[None])
    deltas, _ = event_table(d, direction)
    kernel = backward_probability_table if direction == Direction.BACKWARD else forward_probability_table
    sign = -1.0 if direction == Direction.BACKWARD else 1.0
    radius_limit = f.radius + 2.0 / n

    gap = 0.0
    points = 0
    rows = max(1, slab_points // max(1, length ** (d - 1)))

    for first in range(lower, upper + 1, rows):
        last = min(upper, first + rows - 1)
        axes = [np.arange(first - 1, last + 2)] + [np.arange(lower - 1, upper + 2)] * (d - 1)
        lattice = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1)
        padded = f.y_factor(lattice / float(n))
        inner = tuple(slice(1, s - 1) for s in padded.shape)

        counts = lattice[inner].reshape(-1, d)
        y = counts / float(n)
        keep = (counts.sum(axis=1) >= 2) & (np.sqrt(np.sum(y**2, axis=1)) <= radius_limit)
        if not keep.any():
            continue

        neighbours = np.stack([
            padded[tuple(slice(1 + o, s - 1 + o) for o, s in zip(delta, padded.shape))].reshape(-1)
            for delta in deltas
        ], axis=1)[keep]
        counts, y = counts[keep], y[keep]
        f_current = padded[inner].reshape(-1)[keep]
        gradient = f.y_gradient(y)

        # Both generators vanish where F, its gradient and F at every neighbour are zero.
        active = (f_current != 0) | np.any(neighbours != 0, axis=1) | np.any(gradient != 0, axis=1)
        if not active.any():
            continue

        counts, y, f_current = counts[active], y[active], f_current[active]
        neighbours, gradient = neighbours[active], gradient[active]

        table = kernel(counts, model)
        norm = y.sum(axis=1)
        drift = sign * np.sum(gradient * y, axis=1) / norm
        intensity = (model.theta * model.matrix[None] * y[:, :, None] / norm[:, None, None] ** 2).reshape(-1, d * d)

        a = n * np.sum((neighbours[:, :d] - f_current[:, None]) * table[:, :d], axis=1)
        a += -n * f_current * table[:, d:].sum(axis=1) - drift + f_current * intensity.sum(axis=1)
        c = n * neighbours[:, d:] * table[:, d:] - f_current[:, None] * intensity

        values = a[:, None] * x_current[None, :] + c @ x_moved.T
        gap = max(gap, float(np.max(np.abs(values))))
        points += len(f_current) * len(matrices)

    logging.debug('Generator gap at n={}: {} ({} grid points).'.format(n, gap, points))
    return gap, points


def generator_gap_report(f: TestFunction,
                         n_values: Sequence[int],
                         model: MutationModel,
                         direction: Direction = Direction.BACKWARD,
                         **kwargs) -> GapReport:
    """
    Returns the GapReport of generator_gap along the sweep of scales.
    """
    report = GapReport()
    for n in n_values:
        gap, points = generator_gap(f, n, model, direction, **kwargs)
        report.append(n, gap, points)

    return report.fit()


def _shift_slices(shape: Sequence[int], delta: Sequence[int]) -> Tuple[Tuple[slice, ...], Tuple[slice, ...]]:
    """
    Returns the (source, destination) slices moving every cell of a box by 'delta'
    while staying inside it.
    """
    source, target = [], []
    for length, step in zip(shape, delta):
        source.append(slice(max(0, -step), length - max(0, step)))
        target.append(slice(max(0, step), length - max(0, -step)))

    return tuple(source), tuple(target)


def discrete_semigroup_apply(f: TestFunction,
                             initial: TypeConfiguration,
                             scale: int,
                             t: float,
                             model: MutationModel,
                             state_budget: int = DEFAULT_STATE_BUDGET) -> Tuple[float, int]:
    """
    Returns ((T^(n))^floor(nt) f(initial/n, 0), states): the exact expectation of
    f(Z^(n)(floor(nt))) by propagating the law of the backward chain over the box of
    states reachable in floor(nt) steps. Mutations leaving the m-support of f are
    dropped (f vanishes there for good) and absorbed states are frozen.
    """
    d = initial.dimension
    steps = scaled_step_count(scale, t)
    origin = initial.as_array()

    if steps <= 0:
        return float(f(initial.scaled(scale), zero_counts(d))), 1

    lower = np.maximum(0, origin - steps)
    upper = np.minimum(origin + steps, initial.size)
    shape = tuple(int(s) for s in upper - lower + 1)
    digits = d * d
    m_limit = f.m_limit
    m_size = m_limit ** digits if m_limit is not None else 1
    states = int(np.prod(shape)) * m_size

    if states > state_budget:
        raise BudgetError('The semigroup state space has {} states, over the budget of {}.'.format(states, state_budget))

    axes = [np.arange(lo, hi + 1) for lo, hi in zip(lower, upper)]
    lattice = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1)
    table = backward_probability_table(lattice.reshape(-1, d), model).reshape(shape + (-1,))
    frozen = (table.sum(axis=-1) == 0).astype(float)[..., None]
    deltas, m_index = event_table(d, Direction.BACKWARD)

    # Mixed-radix index of m, entry k of the flattened matrix has weight m_limit^k.
    if m_limit is not None:
        digit_values = (np.arange(m_size)[:, None] // m_limit ** np.arange(digits)[None, :]) % m_limit
        matrices = digit_values.reshape(-1, d, d)
    else:
        matrices = np.zeros((1, d, d), dtype=np.int64)

    mass = np.zeros(shape + (m_size,))
    mass[tuple(origin - lower) + (0,)] = 1.0

    for _ in range(steps):
        following = mass * frozen
        for e, delta in enumerate(deltas):
            source, target = _shift_slices(shape, delta)
            moved = mass[source] * table[source + (e,)][..., None]

            if m_index[e] < 0 or m_limit is None:
                following[target] += moved
            else:
                inside = np.nonzero(digit_values[:, m_index[e]] < m_limit - 1)[0]
                following[target + (inside + m_limit ** int(m_index[e]),)] += moved[..., inside]

        mass = following

    y_values = f.y_factor(lattice / float(scale))
    m_values = f.m_factor(matrices)
    value = float(np.sum(mass * y_values[..., None] * m_values[None]))

    logging.debug('Discrete semigroup at n={}, steps={}: {} ({} states).'.format(scale, steps, value, states))
    return value, states
