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

from typing import Optional, Tuple, Union

import numpy as np

from coalescentflow.core.exceptions import DomainError
from coalescentflow.coalescent.limitprocess import INFINITY, InfinityMarker


def _bump_primitive(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns exp(-1/u) for u > 0 (zero elsewhere) and its derivative.
    """
    positive = u > 0
    safe_u = np.where(positive, u, 1.0)
    value = np.where(positive, np.exp(-1.0 / safe_u), 0.0)
    return value, np.where(positive, value / safe_u**2, 0.0)


def smooth_step(u) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns the C-infinity ramp g(u), equal to 0 for u <= 0 and to 1 for u >= 1, and g'(u).
    """
    u = np.asarray(u, dtype=float)
    a, da = _bump_primitive(u)
    b, db = _bump_primitive(1.0 - u)
    total = a + b
    return a / total, (da * b + a * db) / total**2


def smooth_cutoff(u) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns h(u) = 1 - g(2u - 1), equal to 1 for u <= 1/2 and to 0 for u >= 1, and h'(u).
    """
    g, dg = smooth_step(2.0 * np.asarray(u, dtype=float) - 1.0)
    return 1.0 - g, -2.0 * dg


class TestFunction:
    """
    Bounded function f(y, m) on the state space of the scaled chain, factored as
    f(y, m) = F(y) X(m). Evaluators are vectorized over leading axes: y-arrays have the
    type axis last, m-arrays the two matrix axes last.
    """
    __test__ = False

    def __init__(self, dimension: int):
        self.dimension = dimension
        self.sup_norm = 0.0
        # Mutation counts with any entry >= m_limit are outside the support (None = unbounded).
        self.m_limit: Optional[int] = None
        # Value at the point at infinity.
        self.at_infinity = 0.0

    def y_factor(self, y: np.ndarray) -> np.ndarray:
        """
        Returns F(y).
        """
        raise NotImplementedError('Interface Class has not to implement any method.')

    def y_gradient(self, y: np.ndarray) -> np.ndarray:
        """
        Returns the gradient of F(y), with the type axis last.
        """
        raise NotImplementedError('Interface Class has not to implement any method.')

    def m_factor(self, m: np.ndarray) -> np.ndarray:
        """
        Returns X(m).
        """
        raise NotImplementedError('Interface Class has not to implement any method.')

    def evaluate(self, y: np.ndarray, m: np.ndarray) -> np.ndarray:
        """
        Returns f(y, m) for broadcastable arrays of positions and count matrices.
        """
        return self.y_factor(np.asarray(y, dtype=float)) * self.m_factor(np.asarray(m))

    def gradient(self, y, m) -> np.ndarray:
        """
        Returns the y-gradient of f at (y, m).
        """
        if y is INFINITY:
            return np.zeros(self.dimension)

        m_value = self.m_factor(np.asarray(m))
        return self.y_gradient(np.asarray(y, dtype=float)) * np.expand_dims(m_value, -1)

    def __call__(self, y: Union[np.ndarray, InfinityMarker], m) -> float:
        if y is INFINITY:
            return self.at_infinity

        return float(self.evaluate(y, m))


class BumpTestFunction(TestFunction):
    """
    Smooth compactly supported test function

        f(y, m) = prod_j g((y_j - delta) / delta) * h(||y||_2 / radius) * prod_ij chi(m_ij),

    with chi(k) = max(0, 1 - k / m_cap). It vanishes when some y_j <= delta, when
    ||y||_2 >= radius or when some m_ij >= m_cap, and equals 1 on the plateau
    {y_j >= 2 delta, ||y||_2 <= radius / 2, m = 0}.
    """
    def __init__(self, delta: float, radius: float, m_cap: int, dimension: int):
        super().__init__(dimension)
        self.delta = float(delta)
        self.radius = float(radius)
        self.m_cap = int(m_cap)
        self.sup_norm = 1.0
        self.m_limit = self.m_cap
        self.at_infinity = 0.0

    def __repr__(self) -> str:
        return 'BumpTestFunction(delta={}, radius={}, m_cap={}, dimension={})'.format(
            self.delta, self.radius, self.m_cap, self.dimension
        )

    def _parts(self, y: np.ndarray):
        ramps, ramp_slopes = smooth_step((y - self.delta) / self.delta)
        norm = np.sqrt(np.sum(y**2, axis=-1))
        cutoff, cutoff_slope = smooth_cutoff(norm / self.radius)
        return ramps, ramp_slopes, norm, cutoff, cutoff_slope

    def y_factor(self, y: np.ndarray) -> np.ndarray:
        ramps, _, _, cutoff, _ = self._parts(y)
        return np.prod(ramps, axis=-1) * cutoff

    def y_gradient(self, y: np.ndarray) -> np.ndarray:
        ramps, ramp_slopes, norm, cutoff, cutoff_slope = self._parts(y)
        ramp_product = np.prod(ramps, axis=-1)
        gradient = np.zeros(np.shape(y))

        for k in range(self.dimension):
            others = np.prod(np.delete(ramps, k, axis=-1), axis=-1)
            gradient[..., k] = ramp_slopes[..., k] / self.delta * others * cutoff

        safe_norm = np.where(norm > 0, norm, 1.0)
        radial = ramp_product * cutoff_slope / (self.radius * safe_norm)
        gradient += np.expand_dims(radial, -1) * y
        return gradient

    def m_factor(self, m: np.ndarray) -> np.ndarray:
        ramps = np.clip(1.0 - np.asarray(m, dtype=float) / self.m_cap, 0.0, None)
        return np.prod(ramps, axis=(-2, -1))


class ConstantTestFunction(TestFunction):
    """
    f(y, m) = value everywhere, the point at infinity included.
    """
    def __init__(self, value: float, dimension: int):
        super().__init__(dimension)
        self.value = float(value)
        self.sup_norm = abs(self.value)
        self.at_infinity = self.value

    def __repr__(self) -> str:
        return 'ConstantTestFunction(value={}, dimension={})'.format(self.value, self.dimension)

    def y_factor(self, y: np.ndarray) -> np.ndarray:
        return np.full(np.shape(y)[:-1], self.value)

    def y_gradient(self, y: np.ndarray) -> np.ndarray:
        return np.zeros(np.shape(y))

    def m_factor(self, m: np.ndarray) -> np.ndarray:
        return np.ones(np.shape(m)[:-2])


def make_test_function(delta: float, radius: float, m_cap: int, dimension: int) -> BumpTestFunction:
    """
    Returns the bump test function with the specified support parameters.
    """
    if delta <= 0 or radius <= 2.0 * delta * dimension:
        raise DomainError(
            'Test function requires 0 < delta and 2*delta*d < radius (delta={}, radius={}, d={}).'
            .format(delta, radius, dimension)
        )
    if m_cap < 1:
        raise DomainError('Test function requires m_cap >= 1 (m_cap={}).'.format(m_cap))

    return BumpTestFunction(delta, radius, m_cap, dimension)


def constant_function(value: float, dimension: int) -> ConstantTestFunction:
    return ConstantTestFunction(value, dimension)


def zero_function(dimension: int) -> ConstantTestFunction:
    return ConstantTestFunction(0.0, dimension)


def psi1_distance(a, b) -> float:
    """
    Returns the norm-inverting distance || a/||a||_2^2 - b/||b||_2^2 ||_2, which maps the
    origin to the isolated point INFINITY (at distance 1/||y||_2 from y).
    """
    def _invert(y) -> Optional[np.ndarray]:
        if y is INFINITY:
            return None
        y = np.asarray(y, dtype=float)
        norm2 = float(np.dot(y, y))
        if norm2 <= 0:
            raise DomainError('The origin is outside the metric space (y={}).'.format(y.tolist()))
        return y / norm2

    u, v = _invert(a), _invert(b)
    if u is None and v is None:
        return 0.0
    if u is None:
        return float(np.linalg.norm(v))
    if v is None:
        return float(np.linalg.norm(u))

    return float(np.linalg.norm(u - v))


def psi_distance(a: Tuple, b: Tuple) -> float:
    """
    Returns the product distance between the states a = (y, m) and b = (y', m'): the
    norm-inverting distance of the positions plus the Euclidean distance of the counts.
    """
    (y_a, m_a), (y_b, m_b) = a, b
    m_gap = np.asarray(m_a, dtype=float) - np.asarray(m_b, dtype=float)
    return psi1_distance(y_a, y_b) + float(np.linalg.norm(m_gap))
