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
import unittest
from collections import Counter

import numpy as np
from scipy import stats
from scipy.integrate import trapezoid

from coalescentflow.core.enumerations import Direction
from coalescentflow.core.exceptions import BudgetError, DomainError
from coalescentflow.core.montecarlo import RngStreams
from coalescentflow.coalescent.limitprocess import (
    INFINITY, bounded_count_matrices, cumulative_intensity, deterministic_position, invert_cumulative_intensity,
    jump_intensity, limit_semigroup_apply, mutation_count_pmf, poisson_tail, sample_limit, sample_limit_path,
    total_intensity, truncation_order
)
from coalescentflow.coalescent.mutationmodel import MutationModel, zero_counts
from coalescentflow.coalescent.statistics import max_abs_correlation, poisson_gof
from coalescentflow.coalescent.testfunctions import constant_function, make_test_function


class TestLimitProcess(unittest.TestCase):
    """
    Tests for `limitprocess` module.
    """
    logger = logging.getLogger(__name__)
    logger.setLevel(logging.INFO)

    def setUp(self):
        """
        Set up test fixtures, if any.
        """
        self.model = MutationModel.from_pim(4.0, [0.5, 0.5])
        self.y0 = np.array([0.4, 0.6])
        pass

    def tearDown(self):
        """
        Tear down test fixtures, if any.
        """
        pass

    def test_deterministic_position(self):
        """
        Test the backward limit path moves towards the origin at unit speed.
        """
        np.testing.assert_allclose(deterministic_position(self.y0, 0.5), [0.2, 0.3])
        np.testing.assert_allclose(deterministic_position(self.y0, 0.0), self.y0)
        np.testing.assert_allclose(deterministic_position(self.y0, 5.0), [0.0, 0.0])

        with self.assertRaises(DomainError):
            deterministic_position([0.0, 0.0], 0.1)
        with self.assertRaises(DomainError):
            deterministic_position(self.y0, -1.0)
        pass

    def test_jump_intensity(self):
        """
        Test the limiting intensities at y and at the point at infinity.
        """
        intensity = jump_intensity(self.y0, self.model)
        np.testing.assert_allclose(intensity, [[0.8, 0.8], [1.2, 1.2]])
        np.testing.assert_array_equal(jump_intensity(INFINITY, self.model), np.zeros((2, 2)))
        pass

    def test_cumulative_intensity(self):
        """
        Test the integrated intensities against their closed forms.
        """
        intensity = cumulative_intensity(self.y0, 0.5, self.model)
        self.assertAlmostEqual(intensity.matrix[0, 0], 0.554518, places=6)
        self.assertAlmostEqual(intensity.total, 2.772589, places=6)
        self.assertAlmostEqual(intensity.total, total_intensity(self.y0, 0.5, 4.0), places=12)

        forward = cumulative_intensity(self.y0, 1.0, self.model, Direction.FORWARD)
        self.assertAlmostEqual(forward.total, 4.0 * math.log(2.0), places=12)
        self.assertAlmostEqual(forward.total, total_intensity(self.y0, 1.0, 4.0, Direction.FORWARD), places=12)

        with self.assertRaises(DomainError):
            cumulative_intensity(self.y0, 1.0, self.model)
        pass

    def test_cumulative_intensity_quadrature(self):
        """
        Test the closed form against a numerical integral of the intensity along the path.
        """
        model = MutationModel(2.0, [[0.7, 0.3], [0.4, 0.6]])
        times = np.linspace(0.0, 0.7, 20001)
        values = np.array([jump_intensity(deterministic_position(self.y0, s), model) for s in times])
        numeric = trapezoid(values, times, axis=0)
        np.testing.assert_allclose(cumulative_intensity(self.y0, 0.7, model).matrix, numeric, rtol=1e-6)
        pass

    def test_mutation_count_pmf(self):
        """
        Test the probabilities of no mutation and of a single 1->2 mutation.
        """
        self.assertAlmostEqual(mutation_count_pmf(self.y0, 0.5, self.model, zero_counts(2)), 0.0625, places=12)
        single = np.array([[0, 1], [0, 0]])
        self.assertAlmostEqual(mutation_count_pmf(self.y0, 0.5, self.model, single), 0.034657, places=6)
        self.assertEqual(mutation_count_pmf(self.y0, 0.5, self.model, -single), 0.0)
        pass

    def test_poisson_tail(self):
        """
        Test tail masses and truncation orders.
        """
        self.assertAlmostEqual(poisson_tail(2.0, 0), 1.0 - math.exp(-2.0), places=12)
        self.assertEqual(poisson_tail(0.0, 3), 0.0)

        order = truncation_order(2.772589, 1.0, 1e-10)
        self.assertLess(poisson_tail(2.772589, order), 1e-10)
        pass

    def test_bounded_count_matrices(self):
        """
        Test the enumeration of bounded count matrices.
        """
        matrices = bounded_count_matrices(np.array([2, 2, 0, 2]), 2)
        self.assertEqual(len(matrices), 10)
        self.assertTrue(np.all(matrices.sum(axis=1) <= 2))
        self.assertTrue(np.all(matrices[:, 2] == 0))

        with self.assertRaises(BudgetError):
            bounded_count_matrices(np.full(4, 10), 40, max_terms=100)
        pass

    def test_sampling_matches_intensity(self):
        """
        Test Poisson draws of the limit counts have the cumulative intensities as mean.
        """
        streams = RngStreams(4)
        samples = np.array([sample_limit(self.y0, 0.5, self.model, streams.stream(k)) for k in range(4000)])
        expected = cumulative_intensity(self.y0, 0.5, self.model).matrix
        np.testing.assert_allclose(samples.mean(axis=0), expected, atol=5 * np.sqrt(expected.max() / 4000))
        pass

    def test_sampling_law(self):
        """
        Test limit counts follow the product of Poisson laws given by mutation_count_pmf.
        """
        count = 100000
        rng = RngStreams(4).stream(0)
        samples = np.array([sample_limit(self.y0, 0.5, self.model, rng) for _ in range(count)])
        intensity = cumulative_intensity(self.y0, 0.5, self.model).matrix

        for i, j in itertools.product(range(2), range(2)):
            report = poisson_gof(samples[:, i, j], float(intensity[i, j]))
            self.assertGreater(report.p_value, 1e-3, 'Marginal fit of M_{}{}'.format(i + 1, j + 1))

        # Joint cells with at least 5 expected draws, the rest pooled in a single cell.
        observed = Counter(tuple(m.ravel()) for m in samples)
        cells = [w for w in itertools.product(range(5), repeat=4)
                 if count * mutation_count_pmf(self.y0, 0.5, self.model, np.reshape(w, (2, 2))) >= 5]
        expected = [count * mutation_count_pmf(self.y0, 0.5, self.model, np.reshape(w, (2, 2))) for w in cells]
        frequencies = [observed[w] for w in cells]
        expected.append(count - sum(expected))
        frequencies.append(count - sum(frequencies))

        _, p_value = stats.chisquare(frequencies, expected)
        self.assertGreater(p_value, 1e-3)
        self.assertLessEqual(max_abs_correlation(samples), 3.0 / math.sqrt(count))
        pass

    def test_invert_cumulative_intensity(self):
        """
        Test unit-rate arrival times map to event times of the counting process.
        """
        times = invert_cumulative_intensity(self.y0, np.array([0.8]), 4.0 * 0.5 * 0.4)
        self.assertAlmostEqual(float(times[0]), 1.0 - math.exp(-1.0), places=6)

        forward = invert_cumulative_intensity(self.y0, np.array([0.8 * math.log(2.0)]), 0.8, Direction.FORWARD)
        self.assertAlmostEqual(float(forward[0]), 1.0, places=12)
        pass

    def test_sample_limit_path(self):
        """
        Test the limit event times lie inside the horizon and are increasing.
        """
        times = sample_limit_path(self.y0, 0.9, self.model, RngStreams(8).stream(0))
        self.assertEqual(set(times.keys()), {(0, 0), (0, 1), (1, 0), (1, 1)})
        for values in times.values():
            self.assertTrue(np.all(values <= 0.9))
            self.assertTrue(np.all(np.diff(values) > 0))
        pass

    def test_sample_limit_path_counts(self):
        """
        Test the number of inverted event times in [0, s] is Poisson(Lambda_ij(s)).
        """
        count = 20000
        rng = RngStreams(9).stream(0)
        paths = [sample_limit_path(self.y0, 0.5, self.model, rng) for _ in range(count)]

        for s in (0.3, 0.5):
            intensity = cumulative_intensity(self.y0, s, self.model).matrix
            for i, j in itertools.product(range(2), range(2)):
                events = np.array([int(np.sum(times[(i, j)] <= s)) for times in paths])
                report = poisson_gof(events, float(intensity[i, j]))
                self.assertGreater(report.p_value, 1e-3, 'Event count of M_{}{} at s={}'.format(i + 1, j + 1, s))
        pass

    def test_limit_semigroup(self):
        """
        Test the limit semigroup on constants, beyond the horizon and at infinity.
        """
        constant = constant_function(2.0, 2)
        value, order, tail = limit_semigroup_apply(constant, self.y0, zero_counts(2), 0.5, self.model)
        self.assertAlmostEqual(value, 2.0, places=9)
        self.assertLess(tail * 2.0, 1e-10)
        self.assertGreater(order, 0)

        value, _, _ = limit_semigroup_apply(constant, self.y0, zero_counts(2), 1.0, self.model)
        self.assertEqual(value, 0.0)

        value, _, _ = limit_semigroup_apply(constant, INFINITY, zero_counts(2), 0.5, self.model)
        self.assertEqual(value, 2.0)
        pass

    def test_limit_semigroup_at_zero_time(self):
        """
        Test T(0) is the identity on a bump function.
        """
        f = make_test_function(0.05, 3.0, 3, 2)
        m = np.array([[1, 0], [0, 0]])
        value, _, _ = limit_semigroup_apply(f, self.y0, m, 0.0, self.model)
        self.assertAlmostEqual(value, f(self.y0, m), places=12)
        pass


if __name__ == '__main__':
    unittest.main()
