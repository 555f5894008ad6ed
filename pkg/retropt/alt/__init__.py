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
Parts of the retropt calculations can be replaced with alternative,
independent implementations. The `retropt.alt` module provides

- Gaussian mixture forecaster - belief trajectory of a target fitted with
  mixture of ballistic regressions, used instead of Kalman filter when
  target motion is multimodal
"""

# vim: sw=4:et:ai
