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
import math
import unittest

import numpy as np

from coalescentflow.core.enumerations import Direction
from coalescentflow.core.exceptions import DomainError, InsufficientSampleError
from coalescentflow.core.montecarlo import RngStreams
from coalescentflow.coalescent.backwardchain import simulate_backward
from coalescentflow.coalescent.mutationmodel import MutationModel, TypeConfiguration
from coalescentflow.coalescent.statistics import (
    fit_loglog_slope, is_strictly_decreasing, max_abs_correlation, path_sup_deviation, poisson_gof, pool_cells,
    trajectory_sup_deviation, weighted_poisson_tv
)


class TestStatistics(unittest.TestCase):
    """
    Tests for `statistics` module.
    """
    logger = logging.getLogger(__name__)
    logger.setLevel(logging.INFO)

    def setUp(self):
        """
        Set up test fixtures, if any.
        """
        self.rng = np.random.default_rng(17)
        pass

    def tearDown(self):
        """
        Tear down test fixtures, if any.
        """
        pass

    def test_poisson_samples_fit(self):
        """
        Test genuine Poisson samples pass the chi-square and TV checks.
        """
        samples = self.rng.poisson(2.5, size=5000)
        report = poisson_gof(samples, 2.5)
        self.assertGreater(report.p_value, 1e-3)
        self.assertLess(report.tv, 0.05)
        self.assertTrue(report.passed(1e-3, 0.05))
        self.assertEqual(report.samples, 5000)
        self.assertAlmostEqual(float(report.observed.sum()), 5000.0)
        pass

    def test_degenerate_samples(self):
        """
        Test all-zero samples are rejected against Poisson(5).
        """
        report = poisson_gof(np.zeros(1000, dtype=int), 5.0)
        self.assertLess(report.p_value, 1e-12)
        self.assertAlmostEqual(report.tv, 1.0 - math.exp(-5.0), places=9)
        self.assertFalse(report.passed())
        pass

    def test_wrong_mean(self):
        """
        Test samples of another mean are rejected.
        """
        report = poisson_gof(self.rng.poisson(3.5, size=5000), 2.5)
        self.assertLess(report.p_value, 1e-3)
        pass

    def test_gof_input(self):
        """
        Test small or invalid sample sets are refused.
        """
        with self.assertRaises(InsufficientSampleError):
            poisson_gof(np.zeros(999, dtype=int), 1.0)
        with self.assertRaises(DomainError):
            poisson_gof(np.zeros(1000, dtype=int), 0.0)
        pass

    def test_pooled_cells(self):
        """
        Test pooled cells cover every index and reach the expected-count threshold.
        """
        expected = np.array([1.0, 2.0, 3.0, 10.0, 4.0, 0.5, 0.2])
        cells = pool_cells(expected, 5.0)
        self.assertEqual(cells, [(0, 2), (3, 6)])
        self.assertEqual(pool_cells(np.array([1.0, 1.0]), 5.0), [(0, 1)])
        pass

    def test_weighted_tv(self):
        """
        Test unit weights reproduce the unweighted TV and statistics are left undefined.
        """
        samples = self.rng.poisson(1.5, size=3000)
        weighted = weighted_poisson_tv(samples, np.ones(3000), 1.5)
        plain = poisson_gof(samples, 1.5)
        self.assertAlmostEqual(weighted.tv, plain.tv, places=12)
        self.assertTrue(math.isnan(weighted.p_value))
        self.assertTrue(weighted.weighted)
        self.assertTrue(weighted.passed(1e-3, 0.05))
        pass

    def test_deterministic_deviation(self):
        """
        Test a trajectory on the limit lattice deviates by at most one step.
        """
        scale = 10
        counts = np.array([[4, 6], [4, 5], [3, 5], [3, 4], [2, 4], [2, 3]])
        deviation = trajectory_sup_deviation(counts, scale, [0.4, 0.6], 0.5)
        self.assertLessEqual(deviation, 0.2 + 1e-12)

        batch = trajectory_sup_deviation(np.stack([counts, counts]), scale, [0.4, 0.6], 0.5)
        np.testing.assert_allclose(batch, [deviation, deviation])

        with self.assertRaises(DomainError):
            trajectory_sup_deviation(counts, scale, [0.4, 0.6], 1.0)
        pass

    def test_forward_deviation(self):
        """
        Test a constant trajectory drifts away from the forward limit at unit speed.
        """
        counts = np.tile([4, 6], (11, 1))
        deviation = trajectory_sup_deviation(counts, 10, [0.4, 0.6], 1.0, Direction.FORWARD)
        self.assertAlmostEqual(float(deviation), 1.0, places=12)
        pass

    def test_path_deviation(self):
        """
        Test simulated paths stay close to the limit at large n.
        """
        model = MutationModel.from_pim(1.0, [0.5, 0.5])
        streams = RngStreams(3)
        small = [path_sup_deviation(simulate_backward(TypeConfiguration((40, 60)), model, 100, streams.stream(k)),
                                    [0.4, 0.6], 0.5) for k in range(20)]
        large = [path_sup_deviation(simulate_backward(TypeConfiguration((400, 600)), model, 1000, streams.stream(k)),
                                    [0.4, 0.6], 0.5) for k in range(20)]
        self.assertLess(np.median(large), np.median(small))
        self.assertLess(np.median(large), 0.1)
        pass

    def test_slopes_and_monotonicity(self):
        """
        Test the log-log fit and the strict decrease with inversions.
        """
        self.assertAlmostEqual(fit_loglog_slope([10, 100, 1000], [1.0, 0.1, 0.01]), -1.0, places=12)
        self.assertTrue(is_strictly_decreasing([3.0, 2.0, 1.0]))
        self.assertFalse(is_strictly_decreasing([3.0, 3.0, 1.0]))
        self.assertTrue(is_strictly_decreasing([3.0, 3.0, 1.0], allowed_inversions=1))
        pass

    def test_correlation(self):
        """
        Test the correlation of independent and of identical entries.
        """
        independent = self.rng.poisson(2.0, size=(5000, 2, 2))
        self.assertLess(max_abs_correlation(independent), 0.1)

        identical = independent.copy()
        identical[:, 1, 1] = identical[:, 0, 0]
        self.assertAlmostEqual(max_abs_correlation(identical), 1.0, places=12)
        self.assertEqual(max_abs_correlation(np.zeros((10, 2, 2))), 0.0)
        pass


if __name__ == '__main__':
    unittest.main()
