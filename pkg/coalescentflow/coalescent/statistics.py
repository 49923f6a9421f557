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
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from coalescentflow.core.enumerations import Direction
from coalescentflow.core.exceptions import DomainError, InsufficientSampleError
from coalescentflow.coalescent.backwardchain import ScaledPath, scaled_step_count
from coalescentflow.coalescent.forwardchain import forward_limit_position
from coalescentflow.coalescent.limitprocess import deterministic_position

# Minimum number of samples of a goodness-of-fit test.
MIN_GOF_SAMPLES = 1000
# Minimum expected count of a chi-square cell after pooling.
MIN_EXPECTED_COUNT = 5.0


@dataclass
class GofReport:
    """
    Goodness of fit of integer samples against Poisson(lam).
    """
    lam: float
    samples: int
    observed: np.ndarray
    expected: np.ndarray
    chi2: float
    dof: int
    p_value: float
    tv: float
    weighted: bool = False
    cells: List[Tuple[int, int]] = field(default_factory=list)

    def passed(self, p_threshold: float = 1e-3, tv_threshold: Optional[float] = None) -> bool:
        """
        Returns whether the fit is accepted at the specified thresholds.
        """
        ok = True
        if not self.weighted:
            ok = self.p_value > p_threshold
        if tv_threshold is not None:
            ok = ok and self.tv <= tv_threshold

        return ok


def _check_gof_input(samples: np.ndarray, lam: float, min_samples: int) -> None:
    if lam <= 0:
        raise DomainError('The Poisson reference needs a positive mean (lambda={}).'.format(lam))
    if len(samples) < min_samples:
        raise InsufficientSampleError('Goodness of fit needs at least {} samples ({} given).'.format(min_samples, len(samples)))
    if np.any(samples < 0):
        raise DomainError('Count samples must be nonnegative.')


def pool_cells(expected: np.ndarray, threshold: float = MIN_EXPECTED_COUNT) -> List[Tuple[int, int]]:
    """
    Returns consecutive [first, last] index ranges of 'expected' with at least
    'threshold' expected count each; a short remainder joins the last range.
    """
    cells: List[Tuple[int, int]] = []
    first, total = 0, 0.0

    for k, value in enumerate(expected):
        total += value
        if total >= threshold:
            cells.append((first, k))
            first, total = k + 1, 0.0

    if first < len(expected):
        if cells:
            cells[-1] = (cells[-1][0], len(expected) - 1)
        else:
            cells.append((0, len(expected) - 1))

    return cells


def poisson_gof(samples: Sequence[int], lam: float,
                min_samples: int = MIN_GOF_SAMPLES,
                min_expected: float = MIN_EXPECTED_COUNT) -> GofReport:
    """
    Returns the chi-square and total-variation fit of the samples against Poisson(lam).
    Cells are pooled so every expected count is >= 'min_expected'; the last cell
    collects the upper tail.
    """
    samples = np.asarray(samples, dtype=np.int64)
    _check_gof_input(samples, lam, min_samples)
    count = len(samples)

    top = int(max(samples.max(), stats.poisson.ppf(1.0 - 1e-12, lam))) + 1
    observed = np.bincount(samples, minlength=top + 1)[:top + 1].astype(float)
    observed[top] = np.sum(samples >= top)
    pmf = stats.poisson.pmf(np.arange(top + 1), lam)
    pmf[top] = stats.poisson.sf(top - 1, lam)
    expected = count * pmf

    cells = pool_cells(expected, min_expected)
    pooled_observed = np.array([observed[a:b + 1].sum() for a, b in cells])
    pooled_expected = np.array([expected[a:b + 1].sum() for a, b in cells])

    if len(cells) >= 2:
        chi2, p_value = stats.chisquare(pooled_observed, pooled_expected * count / pooled_expected.sum())
        dof = len(cells) - 1
    else:
        chi2, p_value, dof = 0.0, 1.0, 0

    empirical = observed / count
    tv = 0.5 * float(np.sum(np.abs(empirical - pmf)))

    return GofReport(float(lam), count, observed, expected, float(chi2), dof, float(p_value), min(1.0, tv), False, cells)


def weighted_pmf(samples: Sequence[int], weights: Sequence[float], top: int) -> np.ndarray:
    """
    Returns the importance-weighted empirical pmf sum(w 1{X = k}) / N for k = 0..top,
    without self-normalization.
    """
    samples = np.asarray(samples, dtype=np.int64)
    weights = np.asarray(weights, dtype=float)
    inside = samples <= top
    return np.bincount(samples[inside], weights=weights[inside], minlength=top + 1)[:top + 1] / len(samples)


def weighted_poisson_tv(samples: Sequence[int], weights: Sequence[float], lam: float,
                        min_samples: int = MIN_GOF_SAMPLES) -> GofReport:
    """
    Returns the total-variation distance between the weighted empirical pmf and
    Poisson(lam). Chi-square statistics are not defined for weighted samples.
    """
    samples = np.asarray(samples, dtype=np.int64)
    _check_gof_input(samples, lam, min_samples)
    count = len(samples)

    top = int(max(samples.max(), stats.poisson.ppf(1.0 - 1e-12, lam)))
    empirical = weighted_pmf(samples, weights, top)
    pmf = stats.poisson.pmf(np.arange(top + 1), lam)
    tv = 0.5 * float(np.sum(np.abs(empirical - pmf)) + stats.poisson.sf(top, lam))

    return GofReport(float(lam), count, empirical * count, pmf * count, math.nan, 0, math.nan, tv, True)


def limit_position(y0, t: float, direction: Direction) -> np.ndarray:
    if direction == Direction.BACKWARD:
        return deterministic_position(y0, t)

    return forward_limit_position(y0, t)


def trajectory_sup_deviation(counts: np.ndarray, scale: int, y0, t: float,
                             direction: Direction = Direction.BACKWARD) -> np.ndarray:
    """
    Returns sup_{s <= t} ||Y~(s) - Y(s)||_1 for one trajectory of counts, shape
    (steps+1, d), or a batch of them, shape (paths, steps+1, d). Y~ is constant on
    [k/n, (k+1)/n) and Y is affine there, so each step is checked at both ends.
    Trajectories shorter than floor(nt) steps stay at their last state.
    """
    y0 = np.asarray(y0, dtype=float)
    if t < 0:
        raise DomainError('Time must be nonnegative (t={}).'.format(t))
    if direction == Direction.BACKWARD and t >= y0.sum():
        raise DomainError('Backward horizon t={} reaches the origin at ||y0||={}.'.format(t, y0.sum()))

    counts = np.asarray(counts)
    single = counts.ndim == 2
    if single:
        counts = counts[None]

    last_step = scaled_step_count(scale, t)
    indices = np.minimum(np.arange(last_step + 1), counts.shape[1] - 1)
    scaled = counts[:, indices, :] / float(scale)

    starts = np.array([limit_position(y0, k / scale, direction) for k in range(last_step + 1)])
    ends = np.array([limit_position(y0, min((k + 1) / scale, t), direction) for k in range(last_step + 1)])

    deviation = np.maximum(
        np.abs(scaled - starts[None]).sum(axis=-1),
        np.abs(scaled - ends[None]).sum(axis=-1)
    ).max(axis=1)

    return deviation[0] if single else deviation


def path_sup_deviation(path: ScaledPath, y0, t: float) -> float:
    """
    Returns the sum-norm sup deviation over [0, t] of the time-scaled path from the
    deterministic limit of its direction.
    """
    counts, _ = path.trajectory()
    return float(trajectory_sup_deviation(counts, path.scale, y0, t, path.direction))


def fit_loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """
    Returns the least-squares slope of log(y) against log(x).
    """
    result = stats.linregress(np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float)))
    return float(result.slope)


def is_strictly_decreasing(values: Sequence[float], allowed_inversions: int = 0) -> bool:
    """
    Returns whether the sequence decreases at every step but at most 'allowed_inversions'.
    """
    values = list(values)
    inversions = sum(1 for a, b in zip(values, values[1:]) if not b < a)
    return inversions <= allowed_inversions


def max_abs_correlation(samples: np.ndarray) -> float:
    """
    Returns the largest absolute empirical correlation between distinct entries of
    count-matrix samples, shape (N, d, d). Constant entries are uncorrelated.
    """
    flat = np.asarray(samples, dtype=float).reshape(len(samples), -1)
    varying = flat.std(axis=0) > 0
    if varying.sum() < 2:
        return 0.0

    matrix = np.corrcoef(flat[:, varying], rowvar=False)
    np.fill_diagonal(matrix, 0.0)
    return float(np.max(np.abs(matrix)))
