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
Differential dynamic programming solver.

The solver computes initial, locally optimal control sequence of a system
model for a series of target points. Each iteration of the solver consists
of

- backward pass - quadratic expansion of the value function is propagated
  backward in time and feedforward and feedback gains are calculated
- forward pass - new trajectory is calculated with the gains and step size
  of the feedforward term found with backtracking line search

By default Gauss-Newton Hessian is used (iLQR), second order dynamics terms
are added in full DDP mode if model provides them. Levenberg-Marquardt
regularization of :math:`Q_{uu}` is applied when the factorization fails
or line search is rejected.

For linear quadratic problems the solution is equivalent to the solution
of Riccati recursion, see :py:func:`riccati_lqr`.

    >>> from retropt.model import ScalarLTI
    >>> report = solve(ScalarLTI(), np.array([1.0]), np.zeros(2))
    >>> report.converged
    True
    >>> round(float(report.trajectory.controls[0, 0]), 6)
    -0.5
"""

from collections import namedtuple, Counter
import logging

import numpy as np
import scipy.linalg

from .error import NotPositiveDefinite, DivergenceError, SingularError, \
    MaxIterations
from .ft import backtrack, halving, symmetrize
from .model import Trajectory, linearize, rollout, step, trajectory_cost
from . import const

logger = logging.getLogger(__name__)

# instrumentation counters
stats = Counter()

QExpansion = namedtuple('QExpansion', 'q_x q_u q_xx q_uu q_ux')
QExpansion.__doc__ = """
Quadratic expansion of state-action value function.

:var q_x: Gradient with respect to state.
:var q_u: Gradient with respect to control.
:var q_xx: State Hessian.
:var q_uu: Control Hessian.
:var q_ux: Mixed Hessian (control by state).
"""

GainSchedule = namedtuple('GainSchedule', 'k_r k_g dv1 dv2')
GainSchedule.__doc__ = """
Feedforward and feedback gains.

:var k_r: Feedforward gains, array of shape (T, m).
:var k_g: Feedback gains, array of shape (T, m, n).
:var dv1: Linear terms of expected cost change, array of size T.
:var dv2: Quadratic terms of expected cost change, array of size T.
"""

ValueTrace = namedtuple('ValueTrace', 'v v_x v_xx')
ValueTrace.__doc__ = """
Value function expansion along a trajectory.

:var v: Value at each time step, array of size T + 1.
:var v_x: Value gradient, array of shape (T + 1, n).
:var v_xx: Value Hessian, array of shape (T + 1, n, n).
"""

SolveReport = namedtuple(
    'SolveReport',
    'trajectory gains value_trace iterations converged cost_history'
)
SolveReport.__doc__ = """
Result of DDP solver.

:var trajectory: Optimized trajectory.
:var gains: Gains calculated for the trajectory.
:var value_trace: Value function expansion along the trajectory.
:var iterations: Number of solver iterations (backward passes).
:var converged: True if solver converged.
:var cost_history: Costs of accepted trajectories.
"""

SolverOptions = namedtuple(
    'SolverOptions',
    'max_iters tol reg_init reg_min reg_max reg_up reg_down ls_steps'
    ' ls_accept full_ddp'
)
SolverOptions.__new__.__defaults__ = (
    const.DDP_MAX_ITERS, const.DDP_TOL, const.REG_INIT, const.REG_MIN,
    const.REG_MAX, const.REG_UP, const.REG_DOWN, const.LINE_SEARCH_STEPS,
    const.LINE_SEARCH_ACCEPT, False,
)
SolverOptions.__doc__ = """
DDP solver options.

:var max_iters: Maximum number of iterations.
:var tol: Convergence tolerance.
:var reg_init: Initial regularization.
:var reg_min: Smallest non-zero regularization.
:var reg_max: Largest regularization, solver stops above it.
:var reg_up: Regularization increase factor.
:var reg_down: Regularization decrease factor.
:var ls_steps: Number of line search halvings.
:var ls_accept: Ratio of actual to expected cost reduction to accept step.
:var full_ddp: Use second order dynamics terms.
"""


def q_expansion(model, x, u, t, o, v_x, v_xx, full=False):
    """
    Calculate quadratic expansion of state-action value function.

    :param model: System model.
    :param x: State.
    :param u: Control.
    :param t: Time step.
    :param o: Target point.
    :param v_x: Value gradient at next time step.
    :param v_xx: Value Hessian at next time step.
    :param full: Add second order dynamics terms.
    """
    A, B = linearize(model, x, u, t)
    c = model.stage_derivs(x, u, t, o)

    q_x = c.l_x + A.T @ v_x
    q_u = c.l_u + B.T @ v_x
    q_xx = c.l_xx + A.T @ v_xx @ A
    q_uu = c.l_uu + B.T @ v_xx @ B
    q_ux = c.l_ux + B.T @ v_xx @ A

    if full:
        hess = model.hessians(x, u, t)
        if hess is not None:
            f_xx, f_xu, f_uu = hess
            q_xx = q_xx + np.tensordot(v_x, f_xx, axes=1)
            q_ux = q_ux + np.tensordot(v_x, f_xu, axes=1).T
            q_uu = q_uu + np.tensordot(v_x, f_uu, axes=1)
        elif __debug__:
            logger.debug('q expansion: no second order terms of model')

    return QExpansion(q_x, q_u, symmetrize(q_xx), symmetrize(q_uu), q_ux)


def backward_pass(traj, model, reg, full=False):
    """
    Calculate gains and value function expansion backward in time.

    `NotPositiveDefinite` exception is raised if regularized :math:`Q_{uu}`
    cannot be factorized.

    :param traj: Nominal trajectory.
    :param model: System model.
    :param reg: Regularization of :math:`Q_{uu}`.
    :param full: Add second order dynamics terms.
    """
    assert reg >= 0
    stats['backward_pass'] += 1

    T = traj.horizon
    n, m = model.n, model.m
    xs, us, os = traj.states, traj.controls, traj.targets

    k_r = np.empty((T, m))
    k_g = np.empty((T, m, n))
    dv1 = np.empty(T)
    dv2 = np.empty(T)
    v = np.empty(T + 1)
    vx = np.empty((T + 1, n))
    vxx = np.empty((T + 1, n, n))

    v[T] = model.final_cost(xs[T], os[T])
    vx[T], vxx[T] = model.final_derivs(xs[T], os[T])
    vxx[T] = symmetrize(vxx[T])

    I = np.eye(m)
    for t in range(T - 1, -1, -1):
        q = q_expansion(model, xs[t], us[t], t, os[t], vx[t + 1], vxx[t + 1], full)
        try:
            cf = scipy.linalg.cho_factor(q.q_uu + reg * I)
        except (np.linalg.LinAlgError, ValueError):
            raise NotPositiveDefinite(t) from None

        k = -scipy.linalg.cho_solve(cf, q.q_u)
        K = -scipy.linalg.cho_solve(cf, q.q_ux)
        k_r[t] = k
        k_g[t] = K
        dv1[t] = k @ q.q_u
        dv2[t] = 0.5 * k @ q.q_uu @ k

        vx[t] = q.q_x + K.T @ q.q_uu @ k + K.T @ q.q_u + q.q_ux.T @ k
        vxx[t] = symmetrize(
            q.q_xx + K.T @ q.q_uu @ K + K.T @ q.q_ux + q.q_ux.T @ K
        )
        v[t] = model.stage_cost(xs[t], us[t], t, os[t]) + v[t + 1] \
            + dv1[t] + dv2[t]

    return GainSchedule(k_r, k_g, dv1, dv2), ValueTrace(v, vx, vxx)


def forward_pass(traj, gains, model, targets, eps):
    """
    Calculate new trajectory using gains of backward pass.

    The new controls are

        .. math::

            \\hat{u}_t = u_t + \\epsilon k_t + K_t (\\hat{x}_t - x_t)

    `DivergenceError` is raised if a state is not finite.

    :param traj: Nominal trajectory.
    :param gains: Gains calculated by backward pass.
    :param model: System model.
    :param targets: Target points.
    :param eps: Step size of the feedforward term, `0 < eps <= 1`.
    """
    assert 0 < eps <= 1, eps
    stats['forward_pass'] += 1

    T = traj.horizon
    xs, us = traj.states, traj.controls
    states = np.empty_like(xs)
    controls = np.empty_like(us)
    states[0] = xs[0]
    for t in range(T):
        u = us[t] + eps * gains.k_r[t] + gains.k_g[t] @ (states[t] - xs[t])
        controls[t] = model.clamp(u)
        states[t + 1] = step(model, states[t], controls[t], t)

    targets = np.asarray(targets, dtype=float).reshape(-1, model.d)
    cost = trajectory_cost(model, states, controls, targets)
    return Trajectory(states, controls, targets, cost)


def _reg_up(reg, opts):
    return max(opts.reg_min, reg * opts.reg_up)


def _reg_down(reg, opts):
    reg = reg * opts.reg_down
    return reg if reg >= opts.reg_min else 0.0


def solve(model, x0, targets, opts=None, controls=None, strict=False):
    """
    Find locally optimal control sequence with DDP.

    The solver converges when relative change of cost is below tolerance
    or expected improvement is below tolerance. If solver does not
    converge, then best trajectory found is returned with `converged`
    attribute set to false (or `MaxIterations` raised in strict mode).

    :param model: System model.
    :param x0: Initial state.
    :param targets: Target points :math:`o_0..o_T`.
    :param opts: Solver options.
    :param controls: Initial control sequence, zero by default.
    :param strict: Raise exception if solver does not converge.
    """
    if opts is None:
        opts = SolverOptions()

    targets = np.asarray(targets, dtype=float).reshape(-1, model.d)
    T = len(targets) - 1
    if controls is None:
        controls = np.zeros((T, model.m))

    traj = rollout(model, x0, controls, targets)
    history = [traj.cost]
    reg = opts.reg_init
    converged = False
    gains = values = None
    stale = True
    it = 0

    while it < opts.max_iters:
        it += 1
        try:
            gains, values = backward_pass(traj, model, reg, opts.full_ddp)
            stale = False
        except NotPositiveDefinite as ex:
            reg = _reg_up(reg, opts)
            logger.debug('ddp: {}, regularization {}'.format(ex, reg))
            if reg > opts.reg_max:
                logger.warning('ddp: regularization limit exceeded')
                break
            continue

        dv1 = gains.dv1.sum()
        dv2 = gains.dv2.sum()
        if -dv1 < opts.tol:
            converged = True
            break

        def candidate(eps):
            try:
                return forward_pass(traj, gains, model, targets, eps)
            except DivergenceError as ex:
                logger.debug('ddp: forward pass failed, {}'.format(ex))
                return None

        def accept(eps, new):
            expected = -(eps * dv1 + eps ** 2 * dv2)
            actual = traj.cost - new.cost
            if expected > 0:
                return actual >= opts.ls_accept * expected
            return actual > 0

        eps, new = backtrack(candidate, accept, halving(opts.ls_steps))
        if new is None:
            reg = _reg_up(reg, opts)
            logger.debug('ddp: line search failed, regularization {}'.format(reg))
            if reg > opts.reg_max:
                logger.warning('ddp: regularization limit exceeded')
                break
            continue

        dj = traj.cost - new.cost
        assert dj > -const.DESCENT_SLACK, dj
        traj = new
        stale = True
        history.append(traj.cost)
        reg = _reg_down(reg, opts)

        if __debug__:
            logger.debug(
                'ddp: iteration {}, cost {:.10g}, step {}, reg {}'
                .format(it, traj.cost, eps, reg)
            )

        if abs(dj) < opts.tol * (1 + abs(traj.cost)):
            converged = True
            break

    if stale:
        try:
            gains, values = backward_pass(traj, model, reg, opts.full_ddp)
        except NotPositiveDefinite:
            logger.warning('ddp: gains of final trajectory not available')

    if converged:
        logger.info(
            'ddp: converged after {} iterations, cost {:.10g}'
            .format(it, traj.cost)
        )
    else:
        logger.warning(
            'ddp: not converged after {} iterations, cost {:.10g}'
            .format(it, traj.cost)
        )
        if strict:
            raise MaxIterations(
                'DDP not converged after {} iterations'.format(it)
            )

    return SolveReport(traj, gains, values, it, converged, history)


def riccati_lqr(A, B, Q, R, Q_f, T):
    """
    Solve finite horizon, discrete time LQR problem with backward Riccati
    recursion.

    The cost is :math:`1/2 \\sum x^T Q x + u^T R u + 1/2 x_T^T Q_f x_T` and
    optimal control is :math:`u_t = -K_t x_t`.

    A tuple of gain sequence, array of shape (T, m, n), and value
    matrices, array of shape (T + 1, n, n), is returned.

    >>> K, P = riccati_lqr(1, 1, 1, 1, 1, 1)
    >>> float(K[0, 0, 0]), float(P[0, 0, 0])
    (0.5, 1.5)

    :param A: Transition matrix.
    :param B: Input matrix.
    :param Q: State weight.
    :param R: Control weight.
    :param Q_f: Final state weight.
    :param T: Horizon.
    """
    A, B, Q, R, Q_f = (np.atleast_2d(np.asarray(v, dtype=float))
        for v in (A, B, Q, R, Q_f))
    n, m = B.shape
    K = np.empty((T, m, n))
    P = np.empty((T + 1, n, n))
    P[T] = Q_f
    for t in range(T - 1, -1, -1):
        S = R + B.T @ P[t + 1] @ B
        if not np.linalg.cond(S) < 1 / np.finfo(float).eps:
            raise SingularError('Singular R + B^T P B at step {}'.format(t))
        K[t] = np.linalg.solve(S, B.T @ P[t + 1] @ A)
        P[t] = symmetrize(Q + A.T @ P[t + 1] @ A - A.T @ P[t + 1] @ B @ K[t])
    return K, P


# vim: sw=4:et:ai
