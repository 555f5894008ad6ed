#
# retropt - reactive trajectory optimization toolkit.
#
# Copyright (C) 2026 by retropt developers
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.
#

"""
Gaussian mixture forecaster tests.
"""

import numpy as np

from retropt.alt.gmm import fit_gmm, project, forecast_gmm
from retropt.belief import Observation, ballistic_prior
from retropt.error import EngineError

import unittest


def _observations(launch, dt, steps, noise, rng, g=9.81):
    launch = np.asarray(launch, dtype=float)
    obs = []
    for t in steps:
        tau = t * dt
        y = launch[:2] + tau * launch[2:]
        y[-1] -= 0.5 * g * tau ** 2
        obs.append(Observation(t, y + noise * rng.normal(size=2), noise))
    return obs



class FitTestCase(unittest.TestCase):
    """
    Mixture of ballistic regressions fitting tests.
    """
    def test_single(self):
        """
        Test single component fit recovers launch state
        """
        rng = np.random.default_rng(1)
        launch = [1.0, 0.5, -0.5, 4.0]
        obs = _observations(launch, 0.01, range(0, 60, 2), 0.001, rng)
        fit = fit_gmm(obs, 1, 0.01)
        self.assertTrue(np.allclose(launch, fit.theta[0], atol=0.02))
        self.assertEqual([1.0], fit.weights.tolist())
        self.assertFalse(fit.degenerate)


    def test_two_components(self):
        """
        Test two component fit separates two throws
        """
        rng = np.random.default_rng(2)
        dt = 0.025
        obs = _observations([0.0, 0.0, 1.0, 5.0], dt, range(1, 41), 0.01, rng) \
            + _observations([0.0, 0.0, -1.0, 5.0], dt, range(1, 41), 0.01, rng)
        fit = fit_gmm(obs, 2, dt, restarts=0)

        vx = np.sort(fit.theta[:, 2])
        self.assertTrue(np.allclose([-1.0, 1.0], vx, atol=0.05))
        self.assertTrue(np.allclose(0.5, fit.weights, atol=0.05))
        self.assertEqual((80, 2), fit.resp.shape)


    def test_loglik(self):
        """
        Test EM log-likelihood does not decrease
        """
        rng = np.random.default_rng(4)
        obs = _observations([0.0, 0.0, 1.0, 5.0], 0.02, range(30), 0.05, rng)
        fit = fit_gmm(obs, 2, 0.02, restarts=0)
        ll = np.array(fit.loglik_history)
        self.assertTrue(np.all(np.diff(ll) >= -1e-6 * (1 + abs(ll[-1]))))


    def test_seed(self):
        """
        Test fit is reproducible
        """
        rng = np.random.default_rng(4)
        obs = _observations([0.0, 0.0, 1.0, 5.0], 0.02, range(30), 0.05, rng)
        f1 = fit_gmm(obs, 2, 0.02, seed=5)
        f2 = fit_gmm(obs, 2, 0.02, seed=5)
        self.assertTrue(np.array_equal(f1.theta, f2.theta))


    def test_invalid(self):
        """
        Test fit with invalid number of components
        """
        rng = np.random.default_rng(4)
        obs = _observations([0.0, 0.0, 1.0, 5.0], 0.02, range(3), 0.05, rng)
        self.assertRaises(EngineError, fit_gmm, obs, 0, 0.02)
        self.assertRaises(EngineError, fit_gmm, obs, 4, 0.02)



class ForecastTestCase(unittest.TestCase):
    """
    Gaussian mixture forecast tests.
    """
    def setUp(self):
        rng = np.random.default_rng(6)
        self.launch = [1.0, 0.5, -0.5, 4.0]
        self.obs = _observations(self.launch, 0.01, range(0, 40, 4), 0.01, rng)


    def test_project(self):
        """
        Test projection of mixture on horizon
        """
        fit = fit_gmm(self.obs, 2, 0.01)
        mixture = project(fit, 50, 0.01)
        self.assertEqual(51, len(mixture))
        self.assertEqual((2, 2), mixture[10].means.shape)
        self.assertEqual((2, 2, 2), mixture[10].covs.shape)
        self.assertAlmostEqual(1.0, mixture[10].weights.sum())


    def test_forecast(self):
        """
        Test forecast belief trajectory
        """
        belief = forecast_gmm(self.obs, 1, 50, 0.01)
        self.assertEqual(50, belief.horizon)
        self.assertIsNone(belief.states)
        self.assertIsNotNone(belief.mixture)
        self.assertEqual(10, len(belief.history))
        self.assertAlmostEqual(1.0, belief.weights.sum())

        truth = ballistic_prior(self.launch, 0.0, 9.81, 0.01, 50).means
        self.assertTrue(np.allclose(truth[50], belief.means[50], atol=0.05))


    def test_forecast_prior(self):
        """
        Test forecast weights with prior belief trajectory
        """
        prior = ballistic_prior(self.launch, 0.01, 9.81, 0.01, 50)
        belief = forecast_gmm(self.obs, 1, 50, 0.01, prior=prior)
        self.assertEqual(51, len(belief.weights))
        self.assertTrue(np.all(belief.weights > 0))


# vim: sw=4:et:ai
