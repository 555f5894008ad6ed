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
Control sequence fine-tuning tests.
"""

import numpy as np

from retropt import adjust
from retropt.adjust import delta_running_cost, build_M, solve_desirability, \
    termination_gap, value_gradient, control_adjustment, retro_adjust, \
    BeliefTracker, belief_ticks, OnlineSession, RetroSession, \
    retro_online_step
from retropt.belief import Observation, ballistic_prior, observe_and_update
from retropt.ddp import solve
from retropt.error import EngineError, DimensionError, SingularError
from retropt.model import ScalarLTI, DoubleIntegrator2D

from .tools import _belief, _shifted, _ticks

import unittest
from unittest import mock


class CostShiftTestCase(unittest.TestCase):
    """
    Running cost change tests.
    """
    def test_mean_shift(self):
        """
        Test cost change of mean shift
        """
        model = ScalarLTI()
        traj = solve(model, np.zeros(1), np.zeros(4)).trajectory
        prior = _belief(0.0, 1.0, 3)
        posterior = _belief(1.0, 1.0, 3)
        cs = delta_running_cost(traj, prior, posterior, model)
        self.assertTrue(np.allclose(0.5, cs.dl))
        self.assertTrue(np.allclose(cs.posterior_cost - cs.prior_cost, cs.dl))

        cs = delta_running_cost(traj, prior, posterior, model, t0=2)
        self.assertEqual(2, len(cs.dl))


    def test_variance_shift(self):
        """
        Test cost change of variance shift with final weight
        """
        model = ScalarLTI(W_f=10.0)
        traj = solve(model, np.zeros(1), np.zeros(3)).trajectory
        cs = delta_running_cost(
            traj, _belief(0.0, 1.0, 2), _belief(0.0, 2.0, 2), model
        )
        self.assertTrue(np.allclose([0.5, 0.5, 5.0], cs.dl))


    def test_horizon_mismatch(self):
        """
        Test cost change with belief of different horizon
        """
        model = ScalarLTI()
        traj = solve(model, np.zeros(1), np.zeros(4)).trajectory
        self.assertRaises(
            DimensionError, delta_running_cost, traj, _belief(0, 1, 4),
            _belief(0, 1, 4), model
        )



class DesirabilityMatrixTestCase(unittest.TestCase):
    """
    Desirability system tests.
    """
    def test_build(self):
        """
        Test desirability matrix of two time steps
        """
        dm = build_M([0.0, 0.0], [0.5, 0.5])
        self.assertTrue(np.allclose([[0.5, 0.5], [0.0, 1.0]], dm.P))
        self.assertTrue(np.allclose(dm.P, dm.M))
        self.assertFalse(dm.clamped)


    def test_build_rows(self):
        """
        Test desirability matrix rows are normalized over remaining horizon
        """
        dm = build_M([0.1, -0.2, 0.3, 0.0], [1.0, 2.0, 3.0, 4.0])
        self.assertTrue(np.allclose(1.0, dm.P.sum(axis=1)))
        self.assertTrue(np.allclose(np.tril(dm.P, -1), 0))
        self.assertTrue(np.allclose(np.exp(0.2) * dm.P[1], dm.M[1]))
        self.assertAlmostEqual(1.0, dm.weights.sum())


    def test_clamp(self):
        """
        Test clamping of large cost change
        """
        dm = build_M([100.0, 0.0], [0.5, 0.5])
        self.assertTrue(dm.clamped)
        self.assertEqual(50.0, dm.dl[0])


    def test_invalid(self):
        """
        Test desirability system with invalid input
        """
        self.assertRaises(DimensionError, build_M, [0.0, 0.0], [1.0])
        self.assertRaises(DimensionError, build_M, [], [])
        self.assertRaises(EngineError, build_M, [np.nan, 0.0], [1.0, 1.0])
        self.assertRaises(EngineError, build_M, [0.0, 0.0], [1.0, 0.0])



class DesirabilitySolutionTestCase(unittest.TestCase):
    """
    Desirability system solution tests.
    """
    def test_neutral(self):
        """
        Test zero cost change keeps value function
        """
        sol = solve_desirability(build_M(np.zeros(5), np.ones(5)))
        self.assertTrue(np.allclose(1.0, sol.z))
        self.assertTrue(np.allclose(1.0, sol.g))
        self.assertTrue(np.allclose(0.0, sol.dv))
        self.assertFalse(sol.ridge)


    def test_fixed_point(self):
        """
        Test solution of random desirability system
        """
        rng = np.random.default_rng(5)
        dl = rng.uniform(0.0, 1.0, size=20)
        dm = build_M(dl, rng.uniform(0.1, 1.0, size=20))
        sol = solve_desirability(dm)

        self.assertAlmostEqual(np.exp(-dl[-1]), sol.z[-1])
        z = dm.M @ sol.z
        self.assertTrue(np.allclose(z[:-1], sol.z[:-1], rtol=1e-12))
        self.assertLess(sol.residual, 1e-10)
        self.assertTrue(np.allclose(sol.dv[:-1], dl[:-1] - np.log(sol.g[:-1])))
        self.assertLess(termination_gap(dm, sol), 1e-10)


    def test_single_step(self):
        """
        Test desirability system of terminal step only
        """
        sol = solve_desirability(build_M([0.4], [1.0]))
        self.assertAlmostEqual(np.exp(-0.4), sol.z[0])
        self.assertAlmostEqual(0.4, sol.dv[0])


    def test_ridge(self):
        """
        Test ridge for singular desirability system
        """
        # exp(dl) below diagonal of P at first step
        dm = build_M([np.log(0.25), 0.0], [0.5, 0.5])
        sol = solve_desirability(dm)
        self.assertTrue(sol.ridge)
        self.assertTrue(np.all(np.isfinite(sol.z)))
        self.assertTrue(np.all(sol.z > 0))


    def test_single_solve(self):
        """
        Test single linear solve per adjustment
        """
        k = adjust.stats['linear_solve']
        solve_desirability(build_M(np.zeros(3), np.ones(3)))
        self.assertEqual(k + 1, adjust.stats['linear_solve'])


    def test_large_cost_change(self):
        """
        Test desirability function of large cost change
        """
        dm = build_M(np.full(10, 30.0), np.ones(10))
        sol = solve_desirability(dm)
        self.assertFalse(sol.ridge)
        self.assertTrue(np.all(sol.z > 0))
        self.assertTrue(np.all(np.isfinite(sol.g)))
        self.assertLess(sol.residual, 1e-8)
        self.assertLess(sol.z[0], 1e-25)
        self.assertTrue(np.allclose(-np.log(sol.z[:-1]), sol.dv[:-1]))
        self.assertEqual(30.0, sol.dv[-1])


    def test_large_ridge(self):
        """
        Test desirability function of singular system with large values
        """
        # ridge multiplies z with about 1e9 at each step
        dm = build_M(np.full(20, -50.0), np.ones(20))
        sol = solve_desirability(dm)
        self.assertTrue(sol.ridge)
        self.assertTrue(np.all(np.isfinite(sol.z)))
        self.assertTrue(np.all(np.isfinite(sol.g)))
        self.assertTrue(np.all(np.isfinite(sol.dv)))
        self.assertGreater(sol.z[0], 1e150)


    def test_overflow(self):
        """
        Test desirability function out of floating point range
        """
        dm = build_M(np.full(40, -50.0), np.ones(40))
        self.assertRaises(SingularError, solve_desirability, dm)



class ValueGradientTestCase(unittest.TestCase):
    """
    Value change gradient tests.
    """
    def setUp(self):
        T = 10
        self.model = ScalarLTI()
        self.prior = _belief(0.0, 1.0, T)
        self.posterior = _shifted(self.prior, 0.1, 1.21)
        report = solve(self.model, np.array([0.5]), self.prior.means)
        self.traj = report.trajectory


    def _system(self, t0):
        cs = delta_running_cost(
            self.traj, self.prior, self.posterior, self.model, t0
        )
        dm = build_M(cs.dl[1:], self.posterior.weights[t0 + 1:])
        return dm, solve_desirability(dm)


    def test_finite_differences(self):
        """
        Test analytic value change gradient with finite differences
        """
        args = self.prior, self.posterior, self.traj, self.model
        for t0 in (0, 3, 9):
            dm, sol = self._system(t0)
            g1 = value_gradient(dm, sol, *args, t0=t0)
            g2 = value_gradient(dm, sol, *args, t0=t0, mode='fd')
            self.assertEqual((10 - t0, 1), g1.shape)
            self.assertTrue(np.allclose(g2, g1, rtol=1e-5, atol=1e-8))


    def test_zero_shift(self):
        """
        Test gradient vanishes without distribution shift
        """
        dm, sol = self._system(0)
        g = value_gradient(
            dm, sol, self.prior, self.prior, self.traj, self.model
        )
        self.assertTrue(np.array_equal(np.zeros((10, 1)), g))


    def test_unknown_mode(self):
        """
        Test gradient with unknown calculation mode
        """
        dm, sol = self._system(0)
        self.assertRaises(
            EngineError, value_gradient, dm, sol, self.prior, self.posterior,
            self.traj, self.model, mode='newton'
        )



class ControlAdjustmentTestCase(unittest.TestCase):
    """
    Control adjustment tests.
    """
    def test_scalar(self):
        """
        Test control adjustment of scalar system
        """
        model = ScalarLTI(R=2.0)
        traj = solve(model, np.array([1.0]), np.zeros(4)).trajectory
        grad = np.array([[1.0], [2.0], [3.0]])
        adj = control_adjustment(grad, traj, model)
        # du = -R^-1 B^T (-H^T grad)
        self.assertTrue(np.allclose(0.5 * grad, adj.du))
        self.assertTrue(np.allclose(-grad, adj.grad_x))
        self.assertTrue(np.allclose(traj.controls + adj.du, adj.controls))


    def test_remaining(self):
        """
        Test adjustment of remaining controls only
        """
        model = ScalarLTI()
        traj = solve(model, np.array([1.0]), np.zeros(4)).trajectory
        adj = control_adjustment(np.ones((2, 1)), traj, model, t0=1)
        self.assertEqual(traj.controls[0, 0], adj.controls[0, 0])
        self.assertTrue(np.allclose(traj.controls[1:] + 1, adj.controls[1:]))


    def test_shape(self):
        """
        Test control adjustment with invalid gradient shape
        """
        model = ScalarLTI()
        traj = solve(model, np.array([1.0]), np.zeros(4)).trajectory
        self.assertRaises(
            DimensionError, control_adjustment, np.ones((2, 1)), traj, model
        )


    def test_direction(self):
        """
        Test adjusted controls move towards shifted target
        """
        T = 10
        model = ScalarLTI()
        prior = _belief(0.0, 1.0, T)
        posterior = _shifted(prior, 1.0, 1.0)
        traj = solve(model, np.zeros(1), prior.means).trajectory
        adj, dm, sol = retro_adjust(model, traj, prior, posterior)
        self.assertTrue(np.all(adj.du > 0))



class RetroAdjustTestCase(unittest.TestCase):
    """
    Fine-tuning tests.
    """
    def test_no_shift(self):
        """
        Test fine-tuning without distribution shift
        """
        model = ScalarLTI()
        prior = _belief(0.0, 1.0, 5)
        traj = solve(model, np.array([1.0]), prior.means).trajectory
        adj, dm, sol = retro_adjust(model, traj, prior, prior)
        self.assertTrue(np.array_equal(np.zeros((5, 1)), adj.du))
        self.assertTrue(np.allclose(0.0, sol.dv))


    def test_last_step(self):
        """
        Test fine-tuning at last time step
        """
        model = ScalarLTI()
        prior = _belief(0.0, 1.0, 5)
        traj = solve(model, np.array([1.0]), prior.means).trajectory
        posterior = _shifted(prior, 0.5, 1.0)
        adj, dm, sol = retro_adjust(model, traj, prior, posterior, t0=4)
        self.assertEqual((1, 1), adj.du.shape)
        self.assertRaises(
            EngineError, retro_adjust, model, traj, prior, posterior, t0=5
        )


    def test_point_mass(self):
        """
        Test fine-tuning of point mass trajectory
        """
        T = 50
        model = DoubleIntegrator2D(dt=0.02, W_f=100.0, R=0.01)
        prior = ballistic_prior([1.0, 0.5, -0.5, 4.0], 0.01, 9.81, 0.02, T)
        posterior = ballistic_prior([1.0, 0.5, -0.2, 4.0], 0.005, 9.81, 0.02, T)
        traj = solve(model, np.zeros(4), prior.means).trajectory
        adj, dm, sol = retro_adjust(model, traj, prior, posterior, t0=10)
        self.assertEqual((40, 2), adj.du.shape)
        self.assertTrue(np.all(np.isfinite(adj.du)))
        self.assertTrue(np.array_equal(traj.controls[:10], adj.controls[:10]))



class BeliefTrackerTestCase(unittest.TestCase):
    """
    Belief tracker tests.
    """
    def setUp(self):
        self.prior = ballistic_prior(
            [0.0, 0.0, 1.0, 3.0], 0.01, 9.81, 0.01, 40
        )


    def test_no_observations(self):
        """
        Test tracker without observations
        """
        tracker = BeliefTracker(self.prior)
        tick = tracker.update(0, [])
        self.assertEqual(0.0, tick.kl)
        self.assertFalse(tick.triggered)


    def test_noisy_observation(self):
        """
        Test tracker with very noisy observation
        """
        tracker = BeliefTracker(self.prior)
        obs = Observation(0, self.prior.means[0], 10.0)
        tick = tracker.update(0, [obs])
        self.assertFalse(tick.triggered)
        self.assertLess(tick.kl, 1e-3)
        self.assertIs(self.prior, tracker.prior)


    def test_shift(self):
        """
        Test tracker rebase after distribution shift
        """
        tracker = BeliefTracker(self.prior, threshold=0.05)
        obs = Observation(5, self.prior.means[5] + 0.3, 0.01)
        tick = tracker.update(5, [obs])
        self.assertTrue(tick.triggered)
        self.assertGreater(tick.kl, 0.05)
        self.assertIs(self.prior, tick.prior)
        self.assertIs(tracker.posterior, tracker.prior)

        tick = tracker.update(6, [])
        self.assertEqual(0.0, tick.kl)


    def test_shift_remaining_horizon(self):
        """
        Test distribution shift is maximum over remaining horizon
        """
        tracker = BeliefTracker(self.prior)
        obs = Observation(5, self.prior.means[5] + 0.2, 0.01)
        tracker.posterior = observe_and_update(self.prior, obs)
        kl = tracker.shift(5)
        self.assertGreaterEqual(kl, tracker.shift(40))


    def test_forecaster(self):
        """
        Test tracker with unknown forecaster
        """
        self.assertRaises(EngineError, BeliefTracker, self.prior, forecaster='lstm')


    def test_ticks(self):
        """
        Test belief ticks for each time step
        """
        tracker = BeliefTracker(self.prior)
        obs = [
            Observation(t, self.prior.means[t] + 0.1, 0.01)
            for t in range(0, 40, 10)
        ]
        ticks = list(belief_ticks(tracker, obs, 40))
        self.assertEqual(list(range(40)), [k.t for k in ticks])
        self.assertEqual(4, len(tracker.posterior.history))
        self.assertTrue(ticks[0].triggered)


    def test_gmm(self):
        """
        Test tracker with Gaussian mixture forecaster
        """
        tracker = BeliefTracker(
            self.prior, forecaster='gmm', components=2, samples=500
        )
        rng = np.random.default_rng(2)
        for t in range(3):
            y = self.prior.means[t] + 0.01 * rng.normal(size=2)
            obs = Observation(t, y, 0.01)
            tracker.update(t, [obs])
        self.assertIsNone(tracker.posterior.mixture)

        obs = Observation(3, self.prior.means[3], 0.01)
        tick = tracker.update(3, [obs])
        self.assertIsNotNone(tracker.posterior.mixture)
        self.assertEqual(40, tracker.posterior.horizon)
        self.assertTrue(np.isfinite(tick.kl))



class OnlineSessionTestCase(unittest.TestCase):
    """
    Online session tests.
    """
    def setUp(self):
        self.T = 10
        self.model = ScalarLTI()
        self.prior = _belief(0.0, 1.0, self.T)
        self.posterior = _shifted(self.prior, 1.0, 1.0)
        self.report = solve(self.model, np.array([0.5]), self.prior.means)


    def test_nominal(self):
        """
        Test execution of nominal controls without shift events
        """
        session = OnlineSession(self.model, self.report)
        result = session.execute(np.array([0.5]), [])
        traj = self.report.trajectory
        self.assertTrue(np.allclose(traj.states, result.states))
        self.assertTrue(np.allclose(traj.controls, result.controls))
        self.assertEqual([], result.events)


    def test_feedback(self):
        """
        Test feedback of nominal trajectory
        """
        session = OnlineSession(self.model, self.report)
        traj = self.report.trajectory
        x = traj.states[3] + 0.1
        u, us, event = session.step(3, x)
        k_g = self.report.gains.k_g[3]
        self.assertTrue(np.allclose(traj.controls[3] + k_g @ [0.1], u))
        self.assertIsNone(event)


    def test_adjust_abstract(self):
        """
        Test online session without adjustment method
        """
        session = OnlineSession(self.model, self.report)
        ticks = _ticks(self.T, self.prior, self.posterior, (2,))
        self.assertRaises(
            NotImplementedError, session.execute, np.array([0.5]), ticks
        )


    def test_retro(self):
        """
        Test fine-tuning of remaining controls after shift event
        """
        session = RetroSession(self.model, self.report)
        ticks = _ticks(self.T, self.prior, self.posterior, (2,))
        result = session.execute(np.array([0.5]), ticks)

        self.assertEqual(1, len(result.events))
        event = result.events[0]
        self.assertEqual(2, event.t)
        self.assertFalse(event.failed)
        self.assertGreater(event.du_norm, 0)
        self.assertGreater(event.time_us, 0)
        self.assertEqual(1.0, event.posterior.mean[0])

        traj = self.report.trajectory
        nom = result.nominal
        self.assertTrue(np.array_equal(traj.controls[:2], nom.controls[:2]))
        self.assertTrue(np.all(nom.controls[2:] > traj.controls[2:]))
        self.assertTrue(np.array_equal(traj.states[:3], nom.states[:3]))
        self.assertTrue(np.allclose(1.0, nom.targets[2:]))


    def test_retro_failure(self):
        """
        Test shift event of failed adjustment
        """
        session = RetroSession(self.model, self.report)
        ticks = _ticks(self.T, self.prior, self.posterior, (2,))
        with mock.patch(
                'retropt.adjust.retro_adjust',
                side_effect=EngineError('failed')):
            result = session.execute(np.array([0.5]), ticks)
        self.assertTrue(result.events[0].failed)
        traj = self.report.trajectory
        self.assertTrue(np.allclose(traj.states, result.states))


    def test_retro_online_step(self):
        """
        Test single step of online fine-tuning
        """
        session = RetroSession(self.model, self.report)
        ticks = _ticks(self.T, self.prior, self.posterior, (0,))
        tracker = mock.Mock(threshold=0.05)
        tracker.update.return_value = ticks[0]
        obs = Observation(0, np.array([1.0]), 0.1)

        u, us, event = retro_online_step(
            session, tracker, 0, np.array([0.5]), [obs], threshold=0.5
        )
        tracker.update.assert_called_once_with(0, [obs])
        self.assertEqual(0.5, tracker.threshold)
        self.assertEqual(0, event.t)
        self.assertEqual((self.T, 1), us.shape)
        self.assertEqual(us[0, 0], u[0])


    def test_retro_online_step_no_shift(self):
        """
        Test single step of online fine-tuning without observations
        """
        session = RetroSession(self.model, self.report)
        tracker = adjust.BeliefTracker(self.prior)
        u, us, event = retro_online_step(session, tracker, 0, np.array([0.5]))
        self.assertIsNone(event)
        self.assertEqual(0.05, tracker.threshold)
        traj = self.report.trajectory
        self.assertTrue(np.allclose(traj.controls[0], u))


    def test_run_generator(self):
        """
        Test online session generates executed steps
        """
        session = RetroSession(self.model, self.report)
        ticks = _ticks(self.T, self.prior, self.posterior, (4,))
        steps = list(session.run(np.array([0.5]), ticks))
        self.assertEqual(self.T, len(steps))
        self.assertEqual([4], [s.t for s in steps if s.event is not None])
        self.assertEqual(self.T + 1, len(session.result.states))


# vim: sw=4:et:ai
