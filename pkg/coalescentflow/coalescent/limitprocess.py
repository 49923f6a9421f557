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
from dataclasses import dataclass
from typing import Dict, List, Tuple, Union

import numpy as np
from scipy import stats

from coalescentflow.core.enumerations import Direction
from coalescentflow.core.exceptions import BudgetError, DomainError
from coalescentflow.coalescent.mutationmodel import MutationCountMatrix, MutationModel


class InfinityMarker:
    """
    The isolated point at infinity of the state space: the image of the origin under the
    norm-inverting metric. Intensities vanish there and dynamics are frozen.
    """
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = object.__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return 'INFINITY'


INFINITY = InfinityMarker()

# A point of the y-component of the state space.
Position = Union[np.ndarray, InfinityMarker]


@dataclass(frozen=True)
class CumulativeIntensity:
    """
    Integrated mutation intensities Lambda_ij along the deterministic path, and their sum.
    """
    matrix: np.ndarray
    total: float


def _as_position(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.sum() <= 0:
        raise DomainError('The origin is outside the domain (y={}).'.format(y.tolist()))
    return y


def deterministic_position(y0, t: float) -> np.ndarray:
    """
    Returns the backward limit trajectory y0 - (y0/||y0||)(t ^ ||y0||), which reaches the
    origin at time ||y0||.
    """
    y0 = _as_position(y0)
    if t < 0:
        raise DomainError('Time must be nonnegative (t={}).'.format(t))

    norm = y0.sum()
    position = y0 - (y0 / norm) * min(t, norm)
    return np.clip(position, 0.0, None)


def jump_intensity(y: Position, model: MutationModel) -> np.ndarray:
    """
    Returns the d x d matrix of limiting mutation intensities theta P_ij y_i / ||y||^2.
    """
    if y is INFINITY:
        return np.zeros((model.dimension, model.dimension))

    y = _as_position(y)
    return model.theta * model.matrix * y[:, None] / y.sum() ** 2


def total_intensity(y, t: float, theta: float, direction: Direction = Direction.BACKWARD) -> float:
    """
    Returns the closed form of the total cumulative intensity, theta log(||y||/(||y||-t))
    backwards and theta log((||y||+t)/||y||) forwards.
    """
    norm = _as_position(y).sum()
    if direction == Direction.BACKWARD:
        if t >= norm:
            raise DomainError('Backward horizon t={} reaches the origin at ||y||={}.'.format(t, norm))
        return float(theta * np.log(norm / (norm - t)))

    return float(theta * np.log((norm + t) / norm))


def cumulative_intensity(y, t: float, model: MutationModel, direction: Direction = Direction.BACKWARD) -> CumulativeIntensity:
    """
    Returns the intensities Lambda_ij(t, y) integrated along the deterministic limit path
    started at y, backwards (0 <= t < ||y||) or forwards (t >= 0).
    """
    y = _as_position(y)
    norm = y.sum()
    if t < 0:
        raise DomainError('Time must be nonnegative (t={}).'.format(t))

    if direction == Direction.BACKWARD:
        if t >= norm:
            raise DomainError('Backward horizon t={} reaches the origin at ||y||={}.'.format(t, norm))
        log_factor = np.log(norm / (norm - t))
    else:
        log_factor = np.log((norm + t) / norm)

    matrix = model.theta * model.matrix * (y[:, None] / norm) * log_factor
    return CumulativeIntensity(matrix, float(matrix.sum()))


def mutation_count_pmf(y, t: float, model: MutationModel, w: MutationCountMatrix,
                       direction: Direction = Direction.BACKWARD) -> float:
    """
    Returns gamma_w(t, y), the probability that the limit mutation counts accumulated
    over [0, t] equal w: a product of independent Poisson(Lambda_ij) masses.
    """
    intensity = cumulative_intensity(y, t, model, direction)
    w = np.asarray(w)
    if np.any(w < 0):
        return 0.0

    # Poisson(0) is the point mass at 0, which scipy handles through logpmf = 0 / -inf.
    log_mass = stats.poisson.logpmf(w, intensity.matrix).sum()
    return float(np.exp(log_mass))


def poisson_tail(total: float, order: int) -> float:
    """
    Returns P(N > order) for N ~ Poisson(total): the mass of all count matrices whose
    entries add up to more than 'order'.
    """
    if total <= 0:
        return 0.0

    return float(stats.poisson.sf(order, total))


def truncation_order(total: float, bound: float, tolerance: float) -> int:
    """
    Returns the smallest order K whose Poisson tail times 'bound' is below the tolerance.
    """
    if total <= 0 or bound <= 0:
        return 0

    order = int(stats.poisson.ppf(1.0 - min(0.5, tolerance / bound), total))
    while poisson_tail(total, order) * bound >= tolerance:
        order += 1

    return order


def sample_limit(y0, t: float, model: MutationModel, rng: np.random.Generator,
                 direction: Direction = Direction.BACKWARD) -> MutationCountMatrix:
    """
    Draws the limit mutation counts M(t) started at (y0, 0): independent Poisson draws.
    """
    intensity = cumulative_intensity(y0, t, model, direction)
    return rng.poisson(intensity.matrix).astype(np.int64)


def invert_cumulative_intensity(y0, unit_times: np.ndarray, rate: float,
                                direction: Direction = Direction.BACKWARD) -> np.ndarray:
    """
    Maps unit-rate arrival times u to event times of the Poisson process whose cumulative
    intensity is a log(||y0||/(||y0||-t)) (backwards) or a log((||y0||+t)/||y0||)
    (forwards), with a = rate / ||y0|| and rate = theta P_ij y0_i.
    """
    norm = _as_position(y0).sum()
    unit_times = np.asarray(unit_times, dtype=float)
    a = rate / norm

    if direction == Direction.BACKWARD:
        return norm * (1.0 - np.exp(-unit_times / a))

    return norm * np.expm1(unit_times / a)


def sample_limit_path(y0, horizon: float, model: MutationModel, rng: np.random.Generator,
                      direction: Direction = Direction.BACKWARD) -> Dict[Tuple[int, int], np.ndarray]:
    """
    Draws the event times in [0, horizon] of every limit counting process M_ij by exact
    inversion of its cumulative intensity.
    """
    y0 = _as_position(y0)
    intensity = cumulative_intensity(y0, horizon, model, direction)
    d = model.dimension
    times: Dict[Tuple[int, int], np.ndarray] = dict()

    for i, j in itertools.product(range(d), range(d)):
        rate = model.theta * model.matrix[i, j] * y0[i]
        unit_times: List[float] = []
        limit = intensity.matrix[i, j]

        if rate > 0:
            u = rng.exponential()
            while u <= limit:
                unit_times.append(u)
                u += rng.exponential()

        times[(i, j)] = invert_cumulative_intensity(y0, np.array(unit_times), rate, direction) \
            if unit_times else np.zeros(0)

    return times


def bounded_count_matrices(caps: np.ndarray, order: int, max_terms: int = 2000000) -> np.ndarray:
    """
    Returns every flattened count matrix w with 0 <= w_k <= caps[k] and sum(w) <= order,
    one per row.
    """
    matrices = np.zeros((1, 0), dtype=np.int64)

    for cap in np.asarray(caps, dtype=np.int64).ravel():
        remaining = order - matrices.sum(axis=1)
        blocks = []
        for k in range(int(max(cap, 0)) + 1):
            keep = remaining >= k
            if not keep.any():
                break
            block = matrices[keep]
            blocks.append(np.column_stack([block, np.full(len(block), k, dtype=np.int64)]))

        matrices = np.vstack(blocks)
        if len(matrices) > max_terms:
            raise BudgetError(
                'Enumeration of mutation-count matrices exceeds the budget of {} terms.'.format(max_terms)
            )

    return matrices


def limit_semigroup_apply(f, y: Position, m: MutationCountMatrix, t: float, model: MutationModel,
                          tolerance: float = 1e-10, max_terms: int = 2000000) -> Tuple[float, int, float]:
    """
    Returns (T(t)f(y, m), truncation order K, neglected Poisson tail mass) where

        T(t)f(y, m) = sum_w f(Y(t), m + w) gamma_w(t, y),

    truncated to count matrices with |w| <= K so that tail(K) * sup|f| < tolerance.
    T(t)f vanishes once the deterministic path hits the origin, and T(t)f(INFINITY, m) = f(INFINITY, m).
    """
    if y is INFINITY:
        return float(f(INFINITY, m)), 0, 0.0

    y = _as_position(y)
    if t < 0:
        raise DomainError('Time must be nonnegative (t={}).'.format(t))
    if t >= y.sum():
        return 0.0, 0, 0.0

    d = model.dimension
    m = np.asarray(m, dtype=np.int64).reshape(d, d)
    intensity = cumulative_intensity(y, t, model, Direction.BACKWARD)
    order = truncation_order(intensity.total, f.sup_norm, tolerance)

    caps = np.where(intensity.matrix > 0, order, 0)
    if f.m_limit is not None:
        caps = np.minimum(caps, f.m_limit - 1 - m)
        if np.any(caps < 0):
            return 0.0, order, poisson_tail(intensity.total, order)

    w = bounded_count_matrices(caps, order, max_terms)
    log_mass = stats.poisson.logpmf(w, intensity.matrix.ravel()).sum(axis=1)
    values = f.evaluate(deterministic_position(y, t), m + w.reshape(-1, d, d))

    value = float(np.sum(values * np.exp(log_mass)))
    return value, order, poisson_tail(intensity.total, order)
