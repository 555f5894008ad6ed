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
Desirability system integration tests.
"""

import numpy as np

from retropt.adjust import build_M, solve_desirability, value_gradient, \
    delta_running_cost
from retropt.belief import predictive_weights
from retropt.ddp import solve
from retropt.model import ScalarLTI

from ..tools import _belief

import unittest


class DesirabilityOracleTestCase(unittest.TestCase):
    """
    Desirability system solution against dense solution.
    """
    def test_dense(self):
        """
        Test back substitution against dense solve of full system
        """
        rng = np.random.default_rng(1)
        for _ in range(200):
            T = int(rng.integers(1, 9))
            dl = rng.uniform(0.0, 1.0, size=T)
            dm = build_M(dl, rng.uniform(0.1, 1.0, size=T))
            sol = solve_desirability(dm)

            A = np.eye(T) - dm.M
            A[-1] = 0
            A[-1, -1] = 1
            b = np.zeros(T)
            b[-1] = np.exp(-dl[-1])
            z = np.linalg.solve(A, b)
            self.assertTrue(np.allclose(z, sol.z, rtol=0, atol=1e-10))


    def test_residual(self):
        """
        Test residual of long desirability system
        """
        rng = np.random.default_rng(2)
        T = 1024
        dm = build_M(rng.uniform(0.0, 1.0, size=T), rng.uniform(0.1, 1.0, size=T))
        sol = solve_desirability(dm)
        self.assertLess(sol.residual, 1e-8)



class GradientTestCase(unittest.TestCase):
    """
    Value change gradient on random scalar instances.
    """
    def test_random(self):
        """
        Test analytic gradient against finite differences
        """
        rng = np.random.default_rng(3)
        model = ScalarLTI()
        for _ in range(50):
            T = int(rng.integers(2, 15))
            prior = _belief(0.0, 1.0, T)
            mu = rng.uniform(-0.5, 0.5)
            var = rng.uniform(1.0, 1.5)
            posterior = _belief(mu, var, T)
            posterior = posterior._replace(
                weights=predictive_weights(prior, posterior)
            )
            x0 = rng.uniform(-0.2, 0.2, size=1)
            traj = solve(model, x0, prior.means).trajectory

            cs = delta_running_cost(traj, prior, posterior, model)
            dm = build_M(cs.dl[1:], posterior.weights[1:])
            sol = solve_desirability(dm)
            if sol.ridge:
                continue

            args = dm, sol, prior, posterior, traj, model
            g1 = value_gradient(*args)
            g2 = value_gradient(*args, mode='fd')
            self.assertTrue(np.allclose(g2, g1, rtol=1e-5, atol=1e-8))


# vim: sw=4:et:ai
