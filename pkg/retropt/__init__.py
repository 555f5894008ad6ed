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
Basic Usage
-----------

The retropt library exports its main API via ``retropt`` module.

A scenario of a system model intercepting a moving target is configured
with :func:`~retropt.create` function. The scenario is run with all
control methods, which observe the same target::

    >>> import retropt
    >>> config = retropt.create(horizon=50)
    >>> reports = retropt.run_scenario(config)
    >>> sorted(reports)
    ['multirun_ddp', 'no_adjust', 'oracle', 'retro']

The oracle knows true target trajectory in advance, so its cost of
tracking the true target is the smallest::

    >>> oracle = reports['oracle'].total_cost
    >>> oracle <= reports['no_adjust'].total_cost + 1e-9
    True

Optimizing Control Sequence
---------------------------
The initial control sequence is found with DDP solver for target points
:math:`o_0..o_T`::

    >>> import numpy as np
    >>> from retropt.model import ScalarLTI
    >>> report = retropt.solve(ScalarLTI(), np.array([1.0]), np.zeros(11))
    >>> report.converged
    True

When belief over target trajectory shifts, the control sequence is
fine-tuned with single linear solve instead of new DDP solution, see
:py:mod:`retropt.adjust`.
"""

from .adjust import RetroSession, retro_adjust
from .belief import ballistic_prior, observe_and_update, kl_shift
from .config import default_config, validate
from .ddp import solve
from .scenario import run_scenario

__version__ = '0.1.0'


def create(**params):
    """
    Create default scenario configuration.

    Usage

    >>> import retropt
    >>> config = retropt.create(horizon=100, seed=7)
    >>> config.scenario.horizon, config.scenario.seed
    (100, 7)

    :param params: Scenario parameters overriding the defaults.
    """
    config = default_config()
    scenario = config.scenario._replace(**params)
    return validate(config._replace(scenario=scenario))

# vim: sw=4:et:ai
