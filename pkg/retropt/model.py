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
Introduction
------------
A system model describes nonlinear discrete time control dynamical system

    .. math::

        x_{t+1} = f(x_t, u_t) + \\omega_t

where :math:`x_t` is system state, :math:`u_t` is control input and
:math:`\\omega_t` is Gaussian noise :math:`N(0, \\sigma^2 I)`. The noise is
applied only when a trajectory is executed, planning uses the mean
dynamics.

Cost
----
A system model tracks a target point :math:`o` in target space with output
map :math:`h(x)` (for linear models :math:`h(x) = C x`). The stage and
final costs are

    .. math::

        L(x, u, t; o) = 1/2 u^T R u + 1/2 (h(x) - o)^T W (h(x) - o)

        L_f(x; o) = 1/2 (h(x) - o)^T W_f (h(x) - o)

and total cost of a trajectory is sum of stage costs for
:math:`t = 0..T-1` and final cost at :math:`x_T`.

Models
------
The built-in models are

scalar_lti
    Scalar linear system :math:`x' = x + u`.
lti_n4m2
    Linear system with 4 states and 2 controls.
double_integrator_2d
    Point mass moving on a plane, state is position and velocity.
two_link_arm
    Planar two link arm with point masses, end-effector is tracked.

For example, a step of the scalar system

    >>> model = ScalarLTI()
    >>> step(model, np.array([1.0]), np.array([-0.5]), 0)
    array([0.5])

"""

from collections import namedtuple
import logging

import numpy as np

from .error import EngineError, DimensionError, DivergenceError
from .ft import central_diff
from . import const

logger = logging.getLogger(__name__)


class Trajectory(namedtuple('Trajectory', 'states controls targets cost')):
    """
    Nominal trajectory.

    :var states: States :math:`x_0..x_T`, array of shape (T + 1, n).
    :var controls: Controls :math:`u_0..u_{T-1}`, array of shape (T, m).
    :var targets: Target points :math:`o_0..o_T`, array of shape (T + 1, d).
    :var cost: Total cost of the trajectory.
    """
    __slots__ = ()

    @property
    def horizon(self):
        return len(self.controls)


CostDerivs = namedtuple('CostDerivs', 'l_x l_u l_xx l_uu l_ux')
CostDerivs.__doc__ = """
Derivatives of stage cost.

:var l_x: Gradient with respect to state.
:var l_u: Gradient with respect to control.
:var l_xx: State Hessian.
:var l_uu: Control Hessian.
:var l_ux: Mixed Hessian (control by state).
"""


def _matrix(v, k):
    """
    Create square matrix of size `k` from scalar, diagonal or matrix value.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        return v * np.eye(k)
    elif v.ndim == 1:
        if len(v) != k:
            raise DimensionError(
                'Expected diagonal of size {}, got {}'.format(k, len(v))
            )
        return np.diag(v)
    elif v.shape != (k, k):
        raise DimensionError(
            'Expected {0}x{0} matrix, got {1}'.format(k, v.shape)
        )
    return v



class SystemModel(object):
    """
    Base class of system models.

    Subclass has to implement :py:meth:`SystemModel.f` and should
    implement :py:meth:`SystemModel.jacobians`. Linear output map is
    assumed unless :py:meth:`SystemModel.output` and its derivatives are
    overriden.

    :var n: State dimension.
    :var m: Control dimension.
    :var d: Target space dimension.
    :var dt: Time step [s].
    :var C: Output matrix of linear output map.
    :var R: Control weight.
    :var W: Tracking weight.
    :var W_f: Final tracking weight.
    :var sigma: Process noise scale.
    :var u_max: Control limit or null.
    :var fd_jacobian: Use finite differences if no analytic Jacobians.
    """
    NAME = None

    def __init__(self, n, m, d, R=1.0, W=1.0, W_f=1.0, sigma=0.0, dt=1.0,
            u_max=None, fd_jacobian=True):
        super().__init__()
        self.n = n
        self.m = m
        self.d = d
        self.dt = dt
        self.C = np.eye(d, n)
        self.R = _matrix(R, m)
        self.W = _matrix(W, d)
        self.W_f = _matrix(W_f, d)
        self.sigma = sigma
        self.u_max = u_max
        self.fd_jacobian = fd_jacobian
        self.validate()


    def validate(self):
        """
        Check weights of the cost function.

        `EngineError` is raised if control weight is not symmetric
        positive definite or tracking weights are not symmetric positive
        semidefinite.
        """
        if not np.allclose(self.R, self.R.T):
            raise EngineError('Control weight R is not symmetric')
        if np.linalg.eigvalsh(self.R).min() <= 0:
            raise EngineError('Control weight R is not positive definite')
        for name, w in (('W', self.W), ('W_f', self.W_f)):
            if not np.allclose(w, w.T):
                raise EngineError('Tracking weight {} is not symmetric'.format(name))
            if np.linalg.eigvalsh(w).min() < -1e-12:
                raise EngineError(
                    'Tracking weight {} is not positive semidefinite'
                    .format(name)
                )


    def f(self, x, u, t):
        """
        Calculate next state of the system.

        :param x: Current state.
        :param u: Control input.
        :param t: Time step.
        """
        raise NotImplementedError()


    def jacobians(self, x, u, t):
        """
        Calculate Jacobians of transition function.

        Null is returned if a model provides no analytic Jacobians.

        :param x: Current state.
        :param u: Control input.
        :param t: Time step.
        """
        return None


    def hessians(self, x, u, t):
        """
        Calculate second derivatives of transition function.

        A tuple of tensors `(f_xx, f_xu, f_uu)` of shapes (n, n, n),
        (n, n, m) and (n, m, m) is returned or null if not supported.
        """
        return None


    def output(self, x):
        """
        Map state into target space, i.e. end-effector position.
        """
        return self.C @ x


    def output_jacobian(self, x):
        return self.C


    def output_hessian(self, x):
        """
        Second derivative of output map, tensor of shape (d, n, n) or null
        for linear output map.
        """
        return None


    def clamp(self, u):
        """
        Clamp control input to model limits.
        """
        if self.u_max is None:
            return u
        return np.clip(u, -self.u_max, self.u_max)


    def stage_cost(self, x, u, t, o):
        r = self.output(x) - o
        return 0.5 * u @ self.R @ u + 0.5 * r @ self.W @ r


    def final_cost(self, x, o):
        r = self.output(x) - o
        return 0.5 * r @ self.W_f @ r


    def _tracking_derivs(self, x, o, W):
        r = self.output(x) - o
        H = self.output_jacobian(x)
        wr = W @ r
        l_x = H.T @ wr
        l_xx = H.T @ W @ H
        hh = self.output_hessian(x)
        if hh is not None:
            l_xx = l_xx + np.tensordot(wr, hh, axes=1)
        return l_x, l_xx


    def stage_derivs(self, x, u, t, o):
        """
        Calculate derivatives of stage cost.

        :param x: State.
        :param u: Control.
        :param t: Time step.
        :param o: Target point.
        """
        l_x, l_xx = self._tracking_derivs(x, o, self.W)
        return CostDerivs(
            l_x, self.R @ u, l_xx, self.R, np.zeros((self.m, self.n))
        )


    def final_derivs(self, x, o):
        """
        Calculate gradient and Hessian of final cost.

        :param x: Final state.
        :param o: Target point.
        """
        return self._tracking_derivs(x, o, self.W_f)



class LTIModel(SystemModel):
    """
    Linear time invariant system :math:`x' = A x + B u`.
    """
    NAME = 'lti'

    def __init__(self, A, B, C=None, **kw):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.atleast_2d(np.asarray(B, dtype=float))
        n, m = B.shape
        if A.shape != (n, n):
            raise DimensionError(
                'Matrix A {} does not match matrix B {}'.format(A.shape, B.shape)
            )
        d = n if C is None else np.atleast_2d(C).shape[0]
        super().__init__(n, m, d, **kw)
        self.A = A
        self.B = B
        if C is not None:
            self.C = np.atleast_2d(np.asarray(C, dtype=float))


    def f(self, x, u, t):
        return self.A @ x + self.B @ u


    def jacobians(self, x, u, t):
        return self.A, self.B


    def hessians(self, x, u, t):
        n, m = self.n, self.m
        return np.zeros((n, n, n)), np.zeros((n, n, m)), np.zeros((n, m, m))



class ScalarLTI(LTIModel):
    """
    Scalar system :math:`x' = x + u` with unit cost weights.
    """
    NAME = 'scalar_lti'

    def __init__(self, **kw):
        super().__init__([[1.0]], [[1.0]], **kw)



class LTIN4M2(LTIModel):
    """
    Two lightly coupled oscillators with 4 states and 2 controls.

    The output is position of each oscillator.
    """
    NAME = 'lti_n4m2'

    def __init__(self, dt=0.1, **kw):
        A = np.array([
            [1.0, dt, 0.0, 0.0],
            [-dt, 1.0 - 0.2 * dt, 0.5 * dt, 0.0],
            [0.0, 0.0, 1.0, dt],
            [0.5 * dt, 0.0, -dt, 1.0 - 0.2 * dt],
        ])
        B = np.array([[0.0, 0.0], [dt, 0.0], [0.0, 0.0], [0.0, dt]])
        C = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])
        super().__init__(A, B, C, dt=dt, **kw)



class DoubleIntegrator2D(LTIModel):
    """
    Point mass on a plane driven by force.

    The state is `(px, py, vx, vy)` [m, m/s] and control is force
    `(fx, fy)` [N]. Exact zero-order hold discretization is used.

    :var mass: Mass of the point [kg].
    """
    NAME = 'double_integrator_2d'

    def __init__(self, dt=0.01, mass=1.0, **kw):
        I = np.eye(2)
        Z = np.zeros((2, 2))
        A = np.block([[I, dt * I], [Z, I]])
        B = np.vstack([0.5 * dt ** 2 * I, dt * I]) / mass
        C = np.hstack([I, Z])
        super().__init__(A, B, C, dt=dt, **kw)
        self.mass = mass



class TwoLinkArm(SystemModel):
    """
    Planar two link arm with point masses at the end of each link.

    The arm moves in horizontal plane (no gravity). The state is
    `(q1, q2, dq1, dq2)` [rad, rad/s], control is joint torque [N*m]. The
    equations of motion

        .. math::

            M(q) \\ddot{q} + c(q, \\dot{q}) + b \\dot{q} = u

    are discretized with semi-implicit Euler method.

    The output map is forward kinematics of the end-effector.

    :var l1: Length of first link [m].
    :var l2: Length of second link [m].
    :var m1: Mass at the end of first link [kg].
    :var m2: Mass at the end of second link [kg].
    :var damping: Joint viscous damping [N*m*s/rad].
    """
    NAME = 'two_link_arm'

    def __init__(self, dt=0.01, l1=0.5, l2=0.5, m1=1.0, m2=1.0, damping=0.1,
            W=1.0, W_f=100.0, R=0.01, **kw):
        self.l1 = l1
        self.l2 = l2
        self.m1 = m1
        self.m2 = m2
        self.damping = damping
        super().__init__(4, 2, 2, dt=dt, W=W, W_f=W_f, R=R, **kw)


    def mass_matrix(self, q):
        h = self.m2 * self.l1 * self.l2
        c2 = np.cos(q[1])
        m22 = self.m2 * self.l2 ** 2
        m11 = (self.m1 + self.m2) * self.l1 ** 2 + m22 + 2 * h * c2
        m12 = m22 + h * c2
        return np.array([[m11, m12], [m12, m22]])


    def coriolis(self, q, dq):
        h = self.m2 * self.l1 * self.l2
        s2 = np.sin(q[1])
        return np.array([
            -h * s2 * (2 * dq[0] * dq[1] + dq[1] ** 2),
            h * s2 * dq[0] ** 2,
        ])


    def acceleration(self, q, dq, u):
        """
        Calculate joint accelerations.

        :param q: Joint angles.
        :param dq: Joint velocities.
        :param u: Joint torques.
        """
        M = self.mass_matrix(q)
        return np.linalg.solve(M, u - self.coriolis(q, dq) - self.damping * dq)


    def f(self, x, u, t):
        q, dq = x[:2], x[2:]
        dq = dq + self.dt * self.acceleration(q, dq, u)
        q = q + self.dt * dq
        return np.concatenate([q, dq])


    def jacobians(self, x, u, t):
        q, dq = x[:2], x[2:]
        dt = self.dt
        h = self.m2 * self.l1 * self.l2
        s2, c2 = np.sin(q[1]), np.cos(q[1])

        M_inv = np.linalg.inv(self.mass_matrix(q))
        qdd = M_inv @ (u - self.coriolis(q, dq) - self.damping * dq)

        # derivatives with respect to q2, mass matrix and c(q, dq) do not
        # depend on q1
        dM = np.array([[-2 * h * s2, -h * s2], [-h * s2, 0.0]])
        dc_q2 = np.array([
            -h * c2 * (2 * dq[0] * dq[1] + dq[1] ** 2),
            h * c2 * dq[0] ** 2,
        ])
        J_q = np.zeros((2, 2))
        J_q[:, 1] = M_inv @ (-dM @ qdd - dc_q2)

        dc_dq = np.array([
            [-2 * h * s2 * dq[1], -2 * h * s2 * (dq[0] + dq[1])],
            [2 * h * s2 * dq[0], 0.0],
        ])
        J_v = -M_inv @ (dc_dq + self.damping * np.eye(2))

        I = np.eye(2)
        A = np.block([
            [I + dt ** 2 * J_q, dt * I + dt ** 2 * J_v],
            [dt * J_q, I + dt * J_v],
        ])
        B = np.vstack([dt ** 2 * M_inv, dt * M_inv])
        return A, B


    def hessians(self, x, u, t):
        # second derivatives of the transition by differentiating analytic
        # Jacobians
        n, m = self.n, self.m
        z = np.concatenate([x, u])
        def jac(z):
            A, B = self.jacobians(z[:n], z[n:], t)
            return np.hstack([A, B])
        # shape (n, n + m, n + m)
        H = central_diff(jac, z, 1e-5)
        return H[:, :n, :n], H[:, :n, n:], H[:, n:, n:]


    def output(self, x):
        q1, q12 = x[0], x[0] + x[1]
        return np.array([
            self.l1 * np.cos(q1) + self.l2 * np.cos(q12),
            self.l1 * np.sin(q1) + self.l2 * np.sin(q12),
        ])


    def output_jacobian(self, x):
        q1, q12 = x[0], x[0] + x[1]
        s1, c1 = np.sin(q1), np.cos(q1)
        s12, c12 = np.sin(q12), np.cos(q12)
        l1, l2 = self.l1, self.l2
        return np.array([
            [-l1 * s1 - l2 * s12, -l2 * s12, 0.0, 0.0],
            [l1 * c1 + l2 * c12, l2 * c12, 0.0, 0.0],
        ])


    def output_hessian(self, x):
        q1, q12 = x[0], x[0] + x[1]
        s1, c1 = np.sin(q1), np.cos(q1)
        s12, c12 = np.sin(q12), np.cos(q12)
        l1, l2 = self.l1, self.l2
        hh = np.zeros((2, 4, 4))
        hh[0, :2, :2] = [
            [-l1 * c1 - l2 * c12, -l2 * c12],
            [-l2 * c12, -l2 * c12],
        ]
        hh[1, :2, :2] = [
            [-l1 * s1 - l2 * s12, -l2 * s12],
            [-l2 * s12, -l2 * s12],
        ]
        return hh



MODELS = {
    cls.NAME: cls
    for cls in (ScalarLTI, LTIN4M2, DoubleIntegrator2D, TwoLinkArm)
}


def builtin_models():
    """
    Create catalog of built-in models with default parameters.
    """
    return {name: cls() for name, cls in MODELS.items()}


def create_model(name, **params):
    """
    Create built-in model by its name.

    :param name: Model name, see :py:data:`MODELS`.
    :param params: Model parameters, i.e. `dt`, `W`, `R`.
    """
    try:
        cls = MODELS[name]
    except KeyError:
        raise EngineError('Unknown model {}'.format(name)) from None
    return cls(**params)


def random_lti(n, m, d, seed, dt=0.05, **kw):
    """
    Create random, marginally stable linear system.

    The transition matrix is discretized rotation-like dynamics with small
    damping. The output selects first `d` state coordinates.

    :param n: State dimension.
    :param m: Control dimension.
    :param d: Target space dimension.
    :param seed: Random generator seed.
    :param dt: Time step.
    """
    rng = np.random.default_rng(seed)
    S = rng.normal(size=(n, n))
    G = (S - S.T) / np.sqrt(n) - 0.1 * np.eye(n)
    A = np.eye(n) + dt * G
    B = dt * rng.normal(size=(n, m))
    C = np.eye(d, n)
    kw.setdefault('W_f', 10.0)
    kw.setdefault('R', 0.1)
    return LTIModel(A, B, C, dt=dt, **kw)


def _check_dims(model, x, u):
    if x.shape != (model.n,):
        raise DimensionError(
            'State dimension {} does not match model ({})'
            .format(x.shape, model.n)
        )
    if u.shape != (model.m,):
        raise DimensionError(
            'Control dimension {} does not match model ({})'
            .format(u.shape, model.m)
        )


def step(model, x, u, t, noise=None):
    """
    Calculate next state of a system.

    The noise is not applied when omitted (planning mode).

    :param model: System model.
    :param x: Current state.
    :param u: Control input.
    :param t: Time step.
    :param noise: Optional process noise vector.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    _check_dims(model, x, u)

    xn = model.f(x, model.clamp(u), t)
    if noise is not None:
        xn = xn + noise
    if not np.all(np.isfinite(xn)):
        raise DivergenceError(t + 1)
    return xn


def linearize(model, x, u, t):
    """
    Calculate Jacobians :math:`A_t = \\partial f / \\partial x` and
    :math:`B_t = \\partial f / \\partial u` at `(x, u, t)`.

    If model provides no analytic Jacobians, then central finite
    differences are used if allowed by the model.

    :param model: System model.
    :param x: State.
    :param u: Control.
    :param t: Time step.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    jac = model.jacobians(x, u, t)
    if jac is not None:
        return jac

    if not model.fd_jacobian:
        raise EngineError(
            'Model {} provides no Jacobians and finite differences are'
            ' disabled'.format(model.NAME)
        )
    if __debug__:
        logger.debug('linearize: finite differences for {}'.format(model.NAME))
    A = central_diff(lambda v: model.f(v, u, t), x, const.FD_STEP)
    B = central_diff(lambda v: model.f(x, v, t), u, const.FD_STEP)
    return A, B


def trajectory_cost(model, states, controls, targets):
    """
    Calculate total cost of a trajectory.

    :param model: System model.
    :param states: States :math:`x_0..x_T`.
    :param controls: Controls :math:`u_0..u_{T-1}`.
    :param targets: Target points :math:`o_0..o_T`.
    """
    T = len(controls)
    cost = sum(
        model.stage_cost(states[t], controls[t], t, targets[t])
        for t in range(T)
    )
    return cost + model.final_cost(states[T], targets[T])


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def rollout(model, x0, controls, targets, noise=None):
    """
    Calculate trajectory of a system for a control sequence.

    :param model: System model.
    :param x0: Initial state.
    :param controls: Controls :math:`u_0..u_{T-1}`.
    :param targets: Target points :math:`o_0..o_T`.
    :param noise: Optional process noise, array of shape (T, n).
    """
    controls = np.asarray(controls, dtype=float).reshape(-1, model.m)
    T = len(controls)
    targets = np.asarray(targets, dtype=float).reshape(-1, model.d)
    if len(targets) != T + 1:
        raise DimensionError(
            'Expected {} target points, got {}'.format(T + 1, len(targets))
        )

    states = np.empty((T + 1, model.n))
    states[0] = x0
    for t in range(T):
        w = None if noise is None else noise[t]
        states[t + 1] = step(model, states[t], controls[t], t, w)

    if model.u_max is not None:
        controls = model.clamp(controls)
    cost = trajectory_cost(model, states, controls, targets)
    return Trajectory(_frozen(states), _frozen(controls), _frozen(targets), cost)


# vim: sw=4:et:ai
