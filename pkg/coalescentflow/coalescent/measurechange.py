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
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from coalescentflow.core.enumerations import Direction, EventKind, RMode
from coalescentflow.core.exceptions import BudgetError, DomainError, InvalidSupportError, NotPimError, OracleMissingError
from coalescentflow.core.montecarlo import RngStreams, draw_uniforms, map_chunks
from coalescentflow.coalescent.backwardchain import (
    ScaledPath, backward_event_distribution, event_probability, scaled_step_count, simulate_backward_batch
)
from coalescentflow.coalescent.limitprocess import cumulative_intensity
from coalescentflow.coalescent.mutationmodel import (
    MutationCountMatrix, MutationModel, TypeConfiguration, stationary_distribution
)
from coalescentflow.coalescent.samplingprobs import (
    SamplingProbabilityOracle, oracle_for, pim_sampling_probability, reversal_factors
)

# Warning attached to estimates computed with r_n = 1.
ASYMPTOTIC_WARNING = 'asymptotic r-mode: sampling-probability ratio r_n replaced by its limit 1'


@dataclass
class ImportanceEstimate:
    """
    Importance-sampling estimate of a P-expectation from proposal (Q) paths.
    """
    mean: float
    std_error: float
    paths: int
    r_mode: RMode
    max_weight: float = 0.0
    warnings: List[str] = field(default_factory=list)


def log_mutation_weight(m: MutationCountMatrix, P: np.ndarray, q: np.ndarray) -> float:
    """
    Returns log c(m) = sum_ij m_ij log(P_ij / Q_j), -inf when a counted mutation has P_ij = 0.
    """
    m = np.asarray(m)
    P = np.asarray(P, dtype=float)
    q = np.asarray(q, dtype=float)
    counted = m > 0

    if np.any(counted & (q[None, :] <= 0)):
        raise InvalidSupportError('Mutations counted towards a type with zero proposal probability (Q_j = 0).')
    if np.any(counted & (P <= 0)):
        return -math.inf

    ratios = np.log(P[counted]) - np.log(np.broadcast_to(q[None, :], P.shape)[counted])
    return float(np.sum(m[counted] * ratios))


def mutation_weight(m: MutationCountMatrix, P: np.ndarray, q: np.ndarray) -> float:
    """
    Returns c(m) = prod_ij (P_ij / Q_j)^m_ij.
    """
    return math.exp(log_mutation_weight(m, P, q))


def _log_endpoint_ratio(config: TypeConfiguration,
                        oracle_p: Optional[SamplingProbabilityOracle],
                        oracle_q: SamplingProbabilityOracle,
                        model_p: Optional[MutationModel] = None) -> float:
    """
    Returns log [p_P(config) / p_Q(config)]. A single individual of type j has
    probability pi_j, known for any irreducible P without an oracle.
    """
    if config.size == 1 and model_p is not None and oracle_p is None:
        j = config.counts.index(1)
        return math.log(stationary_distribution(model_p)[j]) - oracle_q.log_probability(config)

    if oracle_p is None:
        oracle_p = oracle_for(model_p)

    return oracle_p.log_probability(config) - oracle_q.log_probability(config)


def sampling_ratio(config: TypeConfiguration,
                   initial: TypeConfiguration,
                   oracle_p: Optional[SamplingProbabilityOracle],
                   oracle_q: SamplingProbabilityOracle,
                   r_mode: RMode = RMode.EXACT) -> float:
    """
    Returns r_n = [p_P(config) / p_Q(config)] [p_Q(initial) / p_P(initial)].
    """
    if r_mode == RMode.ASYMPTOTIC:
        return 1.0
    if config == initial:
        return 1.0
    if oracle_p is None:
        raise OracleMissingError(
            'No sampling probability oracle is available for P; plug one in or use the asymptotic r-mode.'
        )

    log_r = _log_endpoint_ratio(config, oracle_p, oracle_q) - _log_endpoint_ratio(initial, oracle_p, oracle_q)
    return math.exp(log_r)


def batch_mutation_weights(mutations: np.ndarray, P: np.ndarray, q: np.ndarray) -> np.ndarray:
    """
    Returns c(m) for a batch of count matrices, shape (paths, d, d).
    """
    mutations = np.asarray(mutations)
    P = np.asarray(P, dtype=float)
    q = np.asarray(q, dtype=float)
    counted = mutations > 0

    if np.any(counted & (q[None, None, :] <= 0)):
        raise InvalidSupportError('Mutations counted towards a type with zero proposal probability (Q_j = 0).')

    with np.errstate(divide='ignore', invalid='ignore'):
        log_ratio = np.log(P) - np.log(q)[None, :]
        log_c = np.sum(np.where(counted, mutations * log_ratio[None], 0.0), axis=(1, 2))

    impossible = np.any(counted & (P[None] <= 0), axis=(1, 2))
    return np.where(impossible, 0.0, np.exp(np.where(impossible, 0.0, log_c)))


def batch_sampling_ratios(counts: np.ndarray,
                          initial: TypeConfiguration,
                          oracle_p: Optional[SamplingProbabilityOracle],
                          oracle_q: SamplingProbabilityOracle,
                          r_mode: RMode = RMode.EXACT) -> np.ndarray:
    """
    Returns r_n of every final configuration of a batch, shape (paths, d). Each
    distinct configuration is evaluated once.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if r_mode == RMode.ASYMPTOTIC:
        return np.ones(len(counts))

    cache: Dict[Tuple[int, ...], float] = dict()
    ratios = np.empty(len(counts))

    for k, row in enumerate(counts):
        key = tuple(int(c) for c in row)
        if key not in cache:
            cache[key] = sampling_ratio(TypeConfiguration(key), initial, oracle_p, oracle_q, r_mode)
        ratios[k] = cache[key]

    return ratios


def _path_endpoint(path: ScaledPath) -> Tuple[TypeConfiguration, MutationCountMatrix]:
    config, mutations = path.state_at_step(path.steps)
    return config, mutations


def history_likelihood_ratio(path: ScaledPath,
                             direction: Direction,
                             model_p: MutationModel,
                             model_q: MutationModel,
                             oracle_p: Optional[SamplingProbabilityOracle] = None,
                             oracle_q: Optional[SamplingProbabilityOracle] = None,
                             r_mode: RMode = RMode.EXACT) -> float:
    """
    Returns the likelihood ratio of the history of a backward path under P against Q.

    Forwards (the probability of the whole history, ancestor first):
        [p_P(final) / p_Q(final)] c(m)
    Backwards (conditional on the sample):
        r_n(final, initial) c(m)

    Both only depend on the endpoint configuration and on the mutation counts.
    """
    q = model_q.pim_row
    oracle_q = oracle_q or oracle_for(model_q)
    final, mutations = _path_endpoint(path)
    log_c = log_mutation_weight(mutations, model_p.matrix, q)
    if log_c == -math.inf:
        return 0.0

    if direction == Direction.FORWARD:
        return math.exp(_log_endpoint_ratio(final, oracle_p, oracle_q, model_p) + log_c)

    if r_mode == RMode.ASYMPTOTIC:
        return math.exp(log_c)

    if oracle_p is None:
        oracle_p = oracle_for(model_p)

    log_r = _log_endpoint_ratio(final, oracle_p, oracle_q) - _log_endpoint_ratio(path.initial, oracle_p, oracle_q)
    return math.exp(log_r + log_c)


def forward_step_probability(config: TypeConfiguration, kind: EventKind, target: int, source: Optional[int],
                             model: MutationModel) -> float:
    """
    Returns the forward transition probability of one event from 'config' (any size >= 1).
    """
    size = config.size
    theta = model.theta
    if kind in (EventKind.GROWTH, EventKind.COALESCENCE):
        return (config.counts[target] / size) * (size - 1) / (size - 1 + theta)

    return (config.counts[source] / size) * theta * model.matrix[source, target] / (size - 1 + theta)


def step_ratio_product(path: ScaledPath,
                       model_p: MutationModel,
                       model_q: MutationModel,
                       direction: Direction = Direction.BACKWARD,
                       oracle_p: Optional[SamplingProbabilityOracle] = None,
                       oracle_q: Optional[SamplingProbabilityOracle] = None) -> float:
    """
    Returns the likelihood ratio of a backward path computed step by step.

    Backwards, both models must be PIM and the ratio is the product of backward kernel
    ratios. Forwards, it is the endpoint sampling-probability ratio times the product of
    forward kernel ratios of the reversed steps.
    """
    counts, _ = path.trajectory()
    ratio = 1.0

    if direction == Direction.BACKWARD:
        if not (model_p.is_pim and model_q.is_pim):
            raise NotPimError('Backward step ratios require parent independent mutations.')

        for k, event in enumerate(path.events):
            config = TypeConfiguration(tuple(counts[k]))
            p = event_probability(backward_event_distribution(config, model_p, path.scale), event.kind, event.target, event.source)
            q = event_probability(backward_event_distribution(config, model_q, path.scale), event.kind, event.target, event.source)
            ratio *= p / q

        return ratio

    oracle_q = oracle_q or oracle_for(model_q)
    final = TypeConfiguration(tuple(counts[-1]))
    ratio = math.exp(_log_endpoint_ratio(final, oracle_p, oracle_q, model_p))

    for k, event in enumerate(path.events):
        # Growth does not depend on the mutation matrix, and has probability 0 at size 1.
        if event.kind != EventKind.MUTATION:
            continue
        # The forward chain goes from the state after step k to the state before it.
        config = TypeConfiguration(tuple(counts[k + 1]))
        ratio *= forward_step_probability(config, event.kind, event.target, event.source, model_p) / \
            forward_step_probability(config, event.kind, event.target, event.source, model_q)

    return ratio


def importance_expectation(g: Callable[[np.ndarray, np.ndarray], np.ndarray],
                           initial: TypeConfiguration,
                           model_p: MutationModel,
                           model_q: MutationModel,
                           t: float,
                           scale: int,
                           num_paths: int,
                           streams: RngStreams,
                           r_mode: RMode = RMode.EXACT,
                           threads: int = 1,
                           chunk_size: int = 2000,
                           oracle_p: Optional[SamplingProbabilityOracle] = None,
                           channel: int = 0) -> ImportanceEstimate:
    """
    Estimates E_P[g(Y(t), M(t))] from 'num_paths' proposal paths of the PIM chain with
    row Q as the plain mean of g c(M) r_n, with its standard error.

    'g' is vectorized: it maps positions (paths, d) and count matrices (paths, d, d)
    to one value per path.
    """
    if not model_q.is_pim or np.any(model_q.pim_row <= 0):
        raise DomainError('The proposal must be a parent independent model with a strictly positive row Q.')
    if t <= 0:
        raise DomainError('Time must be positive (t={}).'.format(t))

    q = model_q.pim_row
    oracle_q = oracle_for(model_q)
    warnings = []

    if r_mode == RMode.EXACT and oracle_p is None:
        oracle_p = oracle_for(model_p)
    if r_mode == RMode.ASYMPTOTIC:
        logging.warning('Importance sampling uses the asymptotic r-mode (r_n = 1).')
        warnings.append(ASYMPTOTIC_WARNING)

    steps = scaled_step_count(scale, t)

    def _chunk(start: int, stop: int) -> np.ndarray:
        batch = simulate_backward_batch(initial, model_q, scale, draw_uniforms(streams, start, stop, steps, channel))
        weights = batch_mutation_weights(batch.mutations, model_p.matrix, q)
        weights *= batch_sampling_ratios(batch.counts, initial, oracle_p, oracle_q, r_mode)

        values = np.asarray(g(batch.counts / float(scale), batch.mutations), dtype=float)
        return np.column_stack([values * weights, weights])

    weighted = np.vstack(map_chunks(num_paths, chunk_size, _chunk, threads))
    mean = float(np.mean(weighted[:, 0]))
    std_error = float(np.std(weighted[:, 0], ddof=1) / math.sqrt(num_paths)) if num_paths > 1 else 0.0

    return ImportanceEstimate(mean, std_error, num_paths, r_mode, float(np.max(weighted[:, 1])), warnings)


def enumerate_unit_expectation(initial: TypeConfiguration,
                               steps: int,
                               model_p: MutationModel,
                               model_q: MutationModel,
                               node_budget: int = 1000000) -> Tuple[float, int]:
    """
    Returns (E_Q[C R], nodes): the exact sum over all 'steps'-step backward histories
    of their Q-probability times c(m) r_n, with both models PIM, and the number of
    (configuration, m) nodes visited. Absorbed histories are frozen.
    """
    if not (model_p.is_pim and model_q.is_pim):
        raise NotPimError('Exhaustive enumeration requires parent independent models.')

    oracle_p, oracle_q = oracle_for(model_p), oracle_for(model_q)
    d = initial.dimension
    level: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], float] = {(initial.counts, (0,) * (d * d)): 1.0}
    nodes = 1

    for _ in range(steps):
        following: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], float] = dict()
        for (counts, m), mass in level.items():
            config = TypeConfiguration(counts)
            if config.size < 2:
                following[(counts, m)] = following.get((counts, m), 0.0) + mass
                continue
            for event in backward_event_distribution(config, model_q):
                current = list(counts)
                event.apply(current, Direction.BACKWARD)
                m_next = list(m)
                if event.kind == EventKind.MUTATION:
                    m_next[event.source * d + event.target] += 1
                key = (tuple(current), tuple(m_next))
                following[key] = following.get(key, 0.0) + mass * event.probability

        level = following
        nodes += len(level)
        if nodes > node_budget:
            raise BudgetError('Enumeration visited more than {} nodes.'.format(node_budget))

    q = model_q.pim_row
    value = 0.0
    for (counts, m), mass in level.items():
        config = TypeConfiguration(counts)
        c_value = mutation_weight(np.array(m).reshape(d, d), model_p.matrix, q)
        value += mass * c_value * sampling_ratio(config, initial, oracle_p, oracle_q)

    return value, nodes


def analytic_unit_expectation(y0, t: float, model_p: MutationModel, model_q: MutationModel) -> float:
    """
    Returns E[c(M_Q(t))] for the limit process, prod_ij exp(Lambda_Q,ij (P_ij / Q_j - 1)),
    which equals 1 because P and Q share the total intensity.
    """
    q = model_q.pim_row
    intensity = cumulative_intensity(y0, t, model_q, Direction.BACKWARD)
    exponent = intensity.matrix * (np.asarray(model_p.matrix) / q[None, :] - 1.0)
    return float(np.exp(exponent.sum()))


def coalescence_reversal_gap(config: TypeConfiguration, model: MutationModel) -> float:
    """
    Returns max_j |rho(coalescence j) p_Q(config) - p_Q(config - e_j) (n_j - 1)/(s - 1 + theta)|.
    """
    q = model.pim_row
    theta = model.theta
    events = backward_event_distribution(config, model)
    p_config = pim_sampling_probability(config, theta, q)
    growth, _ = reversal_factors(config, theta, q)
    gap = 0.0

    for j in range(config.dimension):
        if config.counts[j] < 1:
            continue
        lhs = event_probability(events, EventKind.COALESCENCE, j) * p_config
        rhs = pim_sampling_probability(config.shifted(minus=j), theta, q) * growth[j]
        gap = max(gap, abs(lhs - rhs))

    return gap


def mutation_reversal_gap(config: TypeConfiguration, model: MutationModel) -> float:
    """
    Returns max_ij |rho(mutation i->j) p_Q(config) - p_Q(config - e_j + e_i) ((n_i + 1 - delta_ij)/s) theta Q_j/(s - 1 + theta)|.
    """
    q = model.pim_row
    theta = model.theta
    events = backward_event_distribution(config, model)
    p_config = pim_sampling_probability(config, theta, q)
    _, mutation = reversal_factors(config, theta, q)
    gap = 0.0

    for i in range(config.dimension):
        for j in range(config.dimension):
            if config.counts[j] < 1:
                continue
            lhs = event_probability(events, EventKind.MUTATION, j, i) * p_config
            rhs = pim_sampling_probability(config.shifted(minus=j, plus=i), theta, q) * mutation[i, j]
            gap = max(gap, abs(lhs - rhs))

    return gap
