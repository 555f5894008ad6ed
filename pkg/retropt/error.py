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
retropt exception classes.
"""

class EngineError(Exception):
    pass


class ConfigError(EngineError):
    pass


class DimensionError(EngineError):
    pass


class SingularError(EngineError):
    pass


class DivergenceError(EngineError):
    """
    Non-finite state found during trajectory calculation.

    :var index: Index of first non-finite state.
    """
    def __init__(self, index, msg=None):
        if msg is None:
            msg = 'Non-finite state at step {}'.format(index)
        super().__init__(msg)
        self.index = index


class NotPositiveDefinite(EngineError):
    """
    Regularized control Hessian cannot be factorized.

    :var t: Time step of the failed factorization.
    """
    def __init__(self, t):
        super().__init__('Q_uu not positive definite at step {}'.format(t))
        self.t = t


class MaxIterations(EngineError):
    pass


# vim: sw=4:et:ai
