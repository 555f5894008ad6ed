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
Numeric constants and default values of retropt calculations.
"""

# variance floor applied to every belief covariance [m^2]
VARIANCE_FLOOR = 1e-12
# smallest weight of a time step of belief trajectory
WEIGHT_FLOOR = 1e-200

# DDP solver
DDP_MAX_ITERS = 100
DDP_TOL = 1e-8
REG_INIT = 0.0
REG_MIN = 1e-10
REG_MAX = 1e8
REG_UP = 10.0
REG_DOWN = 0.5
# backtracking schedule is 1, 1/2, ..., 2^-LINE_SEARCH_STEPS
LINE_SEARCH_STEPS = 10
LINE_SEARCH_ACCEPT = 1e-4
# slack of monotone descent checks
DESCENT_SLACK = 1e-12

# finite differences
FD_STEP = 1e-6
FD_GRAD_STEP = 1e-4

# belief engine
MC_SAMPLES = 100000
GMM_ITERS = 200
GMM_TOL = 1e-10
GMM_RESTARTS = 4
GRAVITY = 9.81

# desirability system
KL_THRESHOLD = 0.05
DL_CLAMP = 50.0
RIDGE = 1e-9
COND_MAX = 1e12

# benchmark
BENCH_REPEATS = 20
# calls faster than this are repeated in a batch [s]
BENCH_MIN_TIME = 1e-3

# scenario harness
OUTPUT_DIR = 'retropt-out'
OUTPUT_DIR_ENV = 'RETROPT_OUT'
REPORT_VERSION = 1

# vim: sw=4:et:ai
