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
Moving target interception integration tests.
"""

import numpy as np

from retropt.config import default_config
from retropt.scenario import run_scenario

from ..tools import _normalization_checked

import unittest


def _config(**params):
    config = default_config()
    return config._replace(scenario=config.scenario._replace(**params))



class InterceptionTestCase(unittest.TestCase):
    """
    Interception quality of control methods on paired seeds.
    """
    def setUp(self):
        _normalization_checked(self)


    def test_error_ordering(self):
        """
        Test final error ordering of oracle, retro and stale plan
        """
        better = 0
        seeds = range(100)
        for seed in seeds:
            config = _config(horizon=100, dt=0.005, seed=seed)
            reports = run_scenario(
                config, methods=('oracle', 'no_adjust', 'retro')
            )
            oracle = reports['oracle']
            retro = reports['retro']
            stale = reports['no_adjust']
            self.assertIsNone(retro.error)
            self.assertLessEqual(oracle.final_error, retro.final_error + 1e-9)
            self.assertLessEqual(oracle.total_cost, retro.total_cost + 1e-9)
            self.assertLessEqual(oracle.total_cost, stale.total_cost + 1e-9)
            if retro.final_error <= stale.final_error + 1e-9:
                better += 1
        self.assertGreaterEqual(better, 95)
        self.assertGreater(self.solutions, 0)



    def test_stationary(self):
        """
        Test methods are equal for target without distribution shift
        """
        config = _config(
            horizon=100, velocity_shift=0.0, obs_noise=1.0, launch_var=1e-6
        )
        reports = run_scenario(config)
        errors = [r.final_error for r in reports.values()]
        self.assertTrue(np.allclose(errors[0], errors, rtol=0, atol=1e-9))
        self.assertEqual([], reports['retro'].events)


    def test_gmm(self):
        """
        Test scenario run with Gaussian mixture forecaster
        """
        config = _config(horizon=60)
        config = config._replace(
            belief=config.belief._replace(forecaster='gmm', samples=2000)
        )
        reports = run_scenario(config, methods=('no_adjust', 'retro'))
        self.assertIsNone(reports['no_adjust'].error)
        r = reports['retro']
        self.assertTrue(r.error is not None or np.isfinite(r.final_error))



# vim: sw=4:et:ai
