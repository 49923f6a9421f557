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

import numpy as np

from coalescentflow.core.enumerations import Direction
from coalescentflow.core.exceptions import BudgetError
from coalescentflow.coalescent.backwardchain import backward_event_distribution
from coalescentflow.coalescent.generatorlab import (
    GapReport, discrete_generator_apply, discrete_semigroup_apply, generator_gap, generator_gap_report,
    limit_generator_apply
)
from coalescentflow.coalescent.limitprocess import INFINITY, limit_semigroup_apply
from coalescentflow.coalescent.mutationmodel import MutationModel, TypeConfiguration, zero_counts
from coalescentflow.coalescent.testfunctions import constant_function, make_test_function, zero_function


class TestGeneratorLab(unittest.TestCase):
    """
    Tests for `generatorlab` module.
    """
    logger = logging.getLogger(__name__)
    logger.setLevel(logging.INFO)

    def setUp(self):
        """
        Set up test fixtures, if any.
        """
        self.model = MutationModel.from_pim(4.0, [0.5, 0.5])
        self.f = make_test_function(0.05, 3.0, 3, 2)
        pass

    def tearDown(self):
        """
        Tear down test fixtures, if any.
        """
        pass

    def brute_expectation(self, f, counts, m, steps, scale):
        """
        Returns E f(Z(steps)) by recursion over every backward history.
        """
        config = TypeConfiguration(counts)
        if steps == 0 or config.size < 2:
            return f(config.scaled(scale), m)

        value = 0.0
        for event in backward_event_distribution(config, self.model, scale):
            following = list(counts)
            event.apply(following, Direction.BACKWARD)
            m_next = m.copy()
            if event.source is not None:
                m_next[event.source, event.target] += 1
            value += event.probability * self.brute_expectation(f, tuple(following), m_next, steps - 1, scale)

        return value

    def test_zero_function(self):
        """
        Test both generators vanish on the zero function.
        """
        config = TypeConfiguration((40, 60))
        self.assertEqual(discrete_generator_apply(zero_function(2), config, 100, self.model), 0.0)
        self.assertEqual(limit_generator_apply(zero_function(2), np.array([0.4, 0.6]), None, self.model), 0.0)
        self.assertEqual(generator_gap(zero_function(2), 100, self.model), (0.0, 0))
        pass

    def test_constants_and_infinity(self):
        """
        Test the limit generator vanishes on constants and at the point at infinity.
        """
        self.assertAlmostEqual(limit_generator_apply(constant_function(3.0, 2), np.array([0.4, 0.6]), None, self.model), 0.0)
        self.assertEqual(limit_generator_apply(self.f, INFINITY, None, self.model), 0.0)
        pass

    def test_outside_support(self):
        """
        Test the discrete generator vanishes when every displaced state is outside the support.
        """
        config = TypeConfiguration((1, 60))
        self.assertEqual(discrete_generator_apply(self.f, config, 100, self.model), 0.0)
        pass

    def test_plateau(self):
        """
        Test both generators reduce to the mutation sum on the plateau of f.
        """
        scale = 1000
        config = TypeConfiguration((400, 600))
        c1 = 2.0 / 3.0
        events = backward_event_distribution(config, self.model, scale)
        mutation_sum = sum(scale * e.probability for e in events if e.source is not None)

        discrete = discrete_generator_apply(self.f, config, scale, self.model)
        limit = limit_generator_apply(self.f, np.array([0.4, 0.6]), None, self.model)

        self.assertAlmostEqual(discrete, (c1 - 1.0) * mutation_sum, places=9)
        self.assertAlmostEqual(limit, (c1 - 1.0) * 4.0, places=12)
        self.assertAlmostEqual(discrete, limit, delta=0.02)
        pass

    def test_gap_matches_pointwise_sup(self):
        """
        Test the vectorized sup over the lattice equals the pointwise evaluation.
        """
        scale = 10
        f = make_test_function(0.1, 0.6, 2, 2)
        matrices = [np.array(v, dtype=np.int64).reshape(2, 2) for v in itertools.product(range(2), repeat=4)]

        for direction in (Direction.BACKWARD, Direction.FORWARD):
            gap, points = generator_gap(f, scale, self.model, direction)
            expected = 0.0
            for counts in itertools.product(range(9), repeat=2):
                if sum(counts) < 2:
                    continue
                config = TypeConfiguration(counts)
                y = config.scaled(scale)
                for m in matrices:
                    discrete = discrete_generator_apply(f, config, scale, self.model, m, direction)
                    limit = limit_generator_apply(f, y, m, self.model, direction)
                    expected = max(expected, abs(discrete - limit))

            self.assertAlmostEqual(gap, expected, delta=1e-9)
            self.assertGreater(points, 0)
        pass

    def test_gap_skips_vanishing_points(self):
        """
        Test lattice points far from the support of F are skipped without changing the gap.
        """
        scale = 20
        f = make_test_function(0.2, 0.6, 2, 2)
        matrices = [np.array(v, dtype=np.int64).reshape(2, 2) for v in itertools.product(range(2), repeat=4)]
        lower, upper = int(math.ceil(scale * 0.2 - 2)), int(math.floor(scale * 0.6 + 2))
        radius_limit = 0.6 + 2.0 / scale

        gap, points = generator_gap(f, scale, self.model)
        candidates = 0
        expected = 0.0
        for counts in itertools.product(range(lower, upper + 1), repeat=2):
            y = np.array(counts) / float(scale)
            if sum(counts) < 2 or np.sqrt(np.sum(y**2)) > radius_limit:
                continue

            candidates += 1
            config = TypeConfiguration(counts)
            local = max(
                abs(discrete_generator_apply(f, config, scale, self.model, m) - limit_generator_apply(f, y, m, self.model))
                for m in matrices
            )
            expected = max(expected, local)

            box = np.array(list(itertools.product(range(-1, 2), repeat=2))) + np.array(counts)
            if not np.any(f.y_factor(box / float(scale)) != 0):
                self.assertAlmostEqual(local, 0.0, places=12)

        self.assertAlmostEqual(gap, expected, delta=1e-9)
        self.assertLess(points, candidates * len(matrices))
        self.assertEqual(points % len(matrices), 0)
        pass

    def test_gap_report(self):
        """
        Test the generator gap decreases with n at a rate close to 1/n.
        """
        f = make_test_function(0.25, 1.2, 2, 2)
        report = generator_gap_report(f, [200, 400, 800], self.model)
        self.assertTrue(report.decreasing)
        self.assertLess(report.slope, -0.6)
        self.assertEqual(report.n_values, [200, 400, 800])
        pass

    def test_gap_budget(self):
        """
        Test grids above the budget are refused.
        """
        with self.assertRaises(BudgetError):
            generator_gap(self.f, 1000, self.model, grid_budget=1000)
        pass

    def test_report_fit(self):
        """
        Test the log-log fit of a report with exact 1/n gaps.
        """
        report = GapReport()
        for n in (10, 20, 40):
            report.append(n, 3.0 / n)
        self.assertAlmostEqual(report.fit().slope, -1.0, places=12)
        self.assertTrue(report.decreasing)
        pass

    def test_semigroup_matches_recursion(self):
        """
        Test the dynamic program against a recursion over all histories.
        """
        initial = TypeConfiguration((3, 3))
        value, states = discrete_semigroup_apply(self.f, initial, 6, 0.5, self.model)
        expected = self.brute_expectation(self.f, initial.counts, zero_counts(2), 3, 6)
        self.assertAlmostEqual(value, expected, places=12)
        self.assertGreater(states, 1)
        pass

    def test_semigroup_trivial_cases(self):
        """
        Test zero steps and constant functions.
        """
        initial = TypeConfiguration((4, 6))
        value, _ = discrete_semigroup_apply(self.f, initial, 10, 0.0, self.model)
        self.assertEqual(value, self.f(np.array([0.4, 0.6]), zero_counts(2)))

        value, _ = discrete_semigroup_apply(constant_function(1.0, 2), initial, 10, 0.5, self.model)
        self.assertAlmostEqual(value, 1.0, places=12)

        with self.assertRaises(BudgetError):
            discrete_semigroup_apply(self.f, initial, 10, 0.5, self.model, state_budget=10)
        pass

    def test_semigroup_gap_decreases(self):
        """
        Test the discrete semigroup approaches the limit semigroup.
        """
        f = make_test_function(0.05, 3.0, 2, 2)
        y0 = np.array([0.4, 0.6])
        limit, _, _ = limit_semigroup_apply(f, y0, zero_counts(2), 0.5, self.model)
        gaps = []
        for n in (20, 80):
            value, _ = discrete_semigroup_apply(f, TypeConfiguration.from_scaled(y0, n), n, 0.5, self.model)
            gaps.append(abs(value - limit))

        self.assertLess(gaps[1], gaps[0])
        pass


if __name__ == '__main__':
    unittest.main()
