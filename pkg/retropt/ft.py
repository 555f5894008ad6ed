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
Functional and numerical helpers.
"""

import logging

import numpy as np

logger = logging.getLogger(__name__)


def central_diff(f, x, h):
    """
    Calculate Jacobian of function `f` at `x` with central differences.

    The result has shape ``f(x).shape + x.shape``, so for vector valued
    function and vector argument it is the usual Jacobian matrix.

    :param f: Function of single array argument.
    :param x: Point of differentiation.
    :param h: Differentiation step.
    """
    x = np.asarray(x, dtype=float)
    fx = np.asarray(f(x), dtype=float)
    jac = np.empty(fx.shape + x.shape)
    for i in np.ndindex(*x.shape):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        jac[(Ellipsis,) + i] = (np.asarray(f(xp)) - np.asarray(f(xm))) / (2 * h)
    return jac


def halving(n):
    """
    Generate backtracking schedule 1, 1/2, ..., 2^-n.

    :param n: Number of halvings.
    """
    return (2.0 ** -k for k in range(n + 1))


def backtrack(f, accept, schedule):
    """
    Find first step size from a schedule accepted by a predicate.

    Function `f` is evaluated for each step size until `accept` is true
    for its result. A pair of step size and result is returned, or
    ``(None, None)`` if no step size is accepted. The function `f` can
    return null to indicate a failed candidate.

    :param f: Function of step size.
    :param accept: Predicate accepting step size and result of `f`.
    :param schedule: Iterable of step sizes.
    """
    for eps in schedule:
        result = f(eps)
        if result is not None and accept(eps, result):
            return eps, result

        if __debug__:
            logger.debug('backtrack: step {} rejected'.format(eps))

    return None, None


def symmetrize(a):
    """
    Return symmetric part of a square matrix.
    """
    return 0.5 * (a + a.T)


def loglog_slope(x, y):
    """
    Fit slope of a line in log-log scale.

    :param x: Abscissa values (positive).
    :param y: Ordinate values (positive).
    """
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return slope


# vim: sw=4:et:ai
