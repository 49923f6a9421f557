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

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse.csgraph import connected_components

from coalescentflow.core.exceptions import DomainError, ModelError, NotPimError, ReducibleMatrixError

# Tolerance of the stochasticity and PIM checks.
MODEL_TOLERANCE = 1e-12
# Largest residual of pi P = pi accepted from the least squares solution.
STATIONARY_RESIDUAL = 1e-9

# A matrix of mutation counts, entry (i,j) counts mutations from type i to type j.
MutationCountMatrix = np.ndarray


class MutationModel:
    """
    Mutation mechanism of the typed coalescent: total mutation rate 'theta' and the
    row-stochastic d x d mutation probability matrix P. The model is parent independent
    (PIM) when all rows of P are equal to a common distribution Q.

    Instances are immutable once built.
    """
    def __init__(self, theta: float, matrix: Union[Sequence[Sequence[float]], np.ndarray], is_pim: Optional[bool] = None):
        matrix = np.array(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
            raise ModelError('Mutation matrix must be a square d x d matrix with d >= 1 (shape={}).'.format(matrix.shape))

        matrix.setflags(write=False)
        self.theta = float(theta)
        self.matrix = matrix
        self.dimension = matrix.shape[0]
        self.is_pim = MutationModel.rows_are_identical(matrix) if is_pim is None else bool(is_pim)

    def __repr__(self) -> str:
        return 'MutationModel(theta={}, matrix={}, is_pim={})'.format(self.theta, self.matrix.tolist(), self.is_pim)

    @staticmethod
    def from_pim(theta: float, q: Sequence[float]) -> "MutationModel":
        """
        Returns the parent independent model whose rows all equal 'q'.
        """
        q = np.asarray(q, dtype=float)
        return MutationModel(theta, np.tile(q, (q.shape[0], 1)))

    @staticmethod
    def rows_are_identical(matrix: np.ndarray) -> bool:
        """
        Returns whether all rows of the matrix are identical within the model tolerance.
        """
        return bool(np.all(np.abs(matrix - matrix[0]) <= MODEL_TOLERANCE))

    @property
    def pim_row(self) -> np.ndarray:
        """
        Returns the common row Q of a parent independent model.
        """
        if not self.is_pim:
            raise NotPimError('The mutation model is not parent independent.')

        return self.matrix[0]

    def check(self) -> "MutationModel":
        """
        Raises a ModelError naming the first violated invariant, if any.
        """
        violations = validate_model(self)
        if violations:
            raise ModelError('Invalid mutation model: {}'.format(violations[0]))

        return self


@dataclass(frozen=True)
class TypeConfiguration:
    """
    Number of individuals (lineages) of each type.
    """
    counts: Tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise DomainError('Type counts must be nonnegative ({}).'.format(counts))
        object.__setattr__(self, 'counts', counts)

    @staticmethod
    def from_scaled(y: Sequence[float], scale: int) -> "TypeConfiguration":
        """
        Returns the grid configuration round(n * y).
        """
        return TypeConfiguration(tuple(int(c) for c in np.rint(np.asarray(y, dtype=float) * scale)))

    @property
    def size(self) -> int:
        """
        Total number of individuals.
        """
        return sum(self.counts)

    @property
    def dimension(self) -> int:
        return len(self.counts)

    def as_array(self) -> np.ndarray:
        return np.array(self.counts, dtype=np.int64)

    def scaled(self, scale: int) -> np.ndarray:
        """
        Returns the grid point counts / n.
        """
        return self.as_array() / float(scale)

    def shifted(self, minus: Optional[int] = None, plus: Optional[int] = None) -> "TypeConfiguration":
        """
        Returns the configuration with one individual removed from type 'minus' and
        one added to type 'plus' (either may be omitted).
        """
        counts = list(self.counts)
        if minus is not None:
            counts[minus] -= 1
        if plus is not None:
            counts[plus] += 1

        return TypeConfiguration(tuple(counts))


def zero_counts(dimension: int) -> MutationCountMatrix:
    """
    Returns an empty mutation count matrix.
    """
    return np.zeros((dimension, dimension), dtype=np.int64)


def validate_model(model: MutationModel) -> List[str]:
    """
    Returns the list of violated invariants of the specified model, empty when valid.
    """
    violations = []
    matrix = model.matrix

    if not np.isfinite(model.theta) or model.theta <= 0:
        violations.append('theta must be positive (theta={})'.format(model.theta))
    if model.dimension < 1:
        violations.append('dimension must be >= 1')
    if not np.all(np.isfinite(matrix)) or np.any(matrix < 0) or np.any(matrix > 1):
        violations.append('mutation probabilities must lie in [0,1]')

    row_sums = matrix.sum(axis=1)
    for i, row_sum in enumerate(row_sums):
        if abs(row_sum - 1.0) > MODEL_TOLERANCE:
            violations.append('non-stochastic row {} (sum={})'.format(i, row_sum))

    if model.is_pim != MutationModel.rows_are_identical(matrix):
        violations.append('PIM flag inconsistent with the mutation matrix (is_pim={})'.format(model.is_pim))

    return violations


def is_irreducible(model: MutationModel) -> bool:
    """
    Returns whether the directed graph of positive entries of P is strongly connected.
    """
    if model.dimension == 1:
        return True

    count, _ = connected_components(model.matrix > 0, directed=True, connection='strong')
    return count == 1


def stationary_distribution(model: MutationModel) -> np.ndarray:
    """
    Returns the invariant distribution pi_P of the mutation matrix (pi P = pi).
    """
    d = model.dimension
    if d == 1:
        return np.ones(1)
    if not is_irreducible(model):
        raise ReducibleMatrixError('The mutation matrix is reducible, its invariant distribution is not unique.')
    if model.is_pim:
        # Rank-one matrix, its unique invariant distribution is the common row.
        return np.array(model.pim_row, dtype=float)

    # (P^T - I) pi = 0 plus the normalization row.
    system = np.vstack([model.matrix.T - np.eye(d), np.ones((1, d))])
    rhs = np.zeros(d + 1)
    rhs[-1] = 1.0
    pi, _, rank, _ = np.linalg.lstsq(system, rhs, rcond=None)

    if rank < d or np.any(pi <= 0) or np.max(np.abs(pi @ model.matrix - pi)) > STATIONARY_RESIDUAL:
        raise ReducibleMatrixError('The stationarity system of the mutation matrix is singular.')

    return pi / pi.sum()
