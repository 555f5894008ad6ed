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
Fine-tuning of control sequence after distribution shift of target belief.

When belief over target trajectory shifts from prior to posterior, then the
running cost of nominal trajectory changes by :math:`\\delta L_t`. Instead
of solving the optimization problem again, the change of value function
:math:`\\delta V_t` is calculated by solving linear system for desirability
function :math:`z_t = e^{-\\delta V_t}`

    .. math::

        z_t = e^{-\\delta L_t} g_t

        g_t = \\sum_{j \\ge t} P_{tj} z_j

for time steps :math:`t = 1..T`, where :math:`P_{tj}` are weights of the
belief trajectory normalized over remaining horizon. The terminal step
:math:`T` is the boundary of the system with :math:`z_T = e^{-\\delta L_T}`.
The system is upper triangular and is solved with single back
substitution.

The value function change is converted into control adjustment

    .. math::

        \\delta u_t = -R^{-1} B_t^T \\frac{\\partial \\delta V}{\\partial x_{t+1}}

Online fine-tuning of a control sequence is implemented by
:py:class:`RetroSession`. At each time step the session

1. Gets observations of the time step.
2. Updates posterior belief.
3. Calculates distribution shift between posterior and prior belief.
4. If the shift is over threshold, solves desirability system and adjusts
   remaining controls. The prior belief is replaced with the posterior.
5. Executes current control with feedback of nominal trajectory.
"""

from collections import namedtuple, Counter
import logging
import time

import numpy as np
import scipy.linalg
from scipy.linalg import lapack
from scipy.special import logsumexp

from .belief import kl_shift, predictive_weights, observe_and_update
from .alt.gmm import forecast_gmm
from .error import EngineError, DimensionError, SingularError
from .model import linearize, rollout, step
from . import const

logger = logging.getLogger(__name__)

# instrumentation counters
stats = Counter()

RetroOptions = namedtuple(
    'RetroOptions', 'threshold gradient clamp ridge cond_max fd_step'
)
RetroOptions.__new__.__defaults__ = (
    const.KL_THRESHOLD, 'analytic', const.DL_CLAMP, const.RIDGE,
    const.COND_MAX, const.FD_GRAD_STEP,
)
RetroOptions.__doc__ = """
Fine-tuning options.

:var threshold: Distribution shift threshold [nats].
:var gradient: Value gradient mode, `analytic` or `fd`.
:var clamp: Limit of absolute value of cost change.
:var ridge: Ridge added to ill conditioned desirability system.
:var cond_max: Largest condition number of desirability system without
    ridge.
:var fd_step: Relative step of central differences of value gradient.
"""

CostShift = namedtuple('CostShift', 'dl posterior_cost prior_cost')
CostShift.__doc__ = """
Change of running cost of a trajectory after distribution shift.

:var dl: Cost change, array of size k + 1.
:var posterior_cost: Expected cost under posterior belief.
:var prior_cost: Expected cost under prior belief.
"""

DesirabilityMatrix = namedtuple(
    'DesirabilityMatrix', 'M P dl weights clamped'
)
DesirabilityMatrix.__doc__ = """
Linear system of desirability function.

The last index is terminal index, the other indices are non-terminal.

:var M: Desirability matrix :math:`diag(e^{-\\delta L}) P`.
:var P: Upper triangular weight matrix.
:var dl: Cost change (clamped).
:var weights: Normalized weights.
:var clamped: True if cost change was clamped.
"""

DesirabilitySolution = namedtuple(
    'DesirabilitySolution', 'z g dv diag condition ridge residual'
)
DesirabilitySolution.__doc__ = """
Solution of desirability system.

:var z: Desirability function values.
:var g: Normalization terms.
:var dv: Value function change.
:var diag: Diagonal of solved non-terminal block.
:var condition: Condition number estimate of solved block.
:var ridge: True if ridge was added to the solved block.
:var residual: Maximum residual of non-terminal equations.
"""

AdjustmentResult = namedtuple('AdjustmentResult', 'du grad_x controls')
AdjustmentResult.__doc__ = """
Control adjustment.

:var du: Control adjustments.
:var grad_x: Value change gradient lifted to state space.
:var controls: Fine-tuned controls.
"""

ShiftEvent = namedtuple(
    'ShiftEvent', 't kl prior posterior condition du_norm time_us failed'
)
ShiftEvent.__doc__ = """
Distribution shift event.

:var t: Time step.
:var kl: Distribution shift [nats].
:var prior: Prior belief at terminal step.
:var posterior: Posterior belief at terminal step.
:var condition: Condition number of desirability system.
:var du_norm: Norm of control adjustment.
:var time_us: Time of adjustment calculation [us].
:var failed: True if adjustment calculation failed.
"""

Tick = namedtuple('Tick', 't kl triggered prior posterior')
Tick.__doc__ = """
Belief state at a time step of online session.

:var t: Time step.
:var kl: Distribution shift at the time step.
:var triggered: True if distribution shift is over threshold.
:var prior: Prior belief trajectory before rebase.
:var posterior: Posterior belief trajectory.
"""

ExecutedStep = namedtuple('ExecutedStep', 't state control event')
ExecutedStep.__doc__ = """
Executed step of online session.

:var t: Time step.
:var state: State before execution of control.
:var control: Executed control.
:var event: Shift event of the time step or null.
"""

SessionResult = namedtuple('SessionResult', 'states controls events nominal')
SessionResult.__doc__ = """
Result of online session.

:var states: Executed states, array of shape (T + 1, n).
:var controls: Executed controls, array of shape (T, m).
:var events: List of shift events.
:var nominal: Final nominal trajectory.
"""


def delta_running_cost(traj, prior, posterior, model, t0=0):
    """
    Calculate change of running cost of a trajectory after distribution
    shift.

    The change is calculated for time steps `t0..T`. The control cost
    does not depend on target belief, so only expected tracking costs are
    compared. Final tracking weight is used at last time step.

    :param traj: Nominal trajectory.
    :param prior: Prior belief trajectory.
    :param posterior: Posterior belief trajectory.
    :param model: System model.
    :param t0: First time step.
    """
    T = traj.horizon
    if prior.horizon != T or posterior.horizon != T:
        raise DimensionError(
            'Horizon of belief trajectories does not match trajectory ({})'
            .format(T)
        )
    if prior.dim != model.d or posterior.dim != model.d:
        raise DimensionError('Belief dimension does not match model')

    k = T - t0 + 1
    pc = np.empty(k)
    qc = np.empty(k)
    for i, t in enumerate(range(t0, T + 1)):
        W = model.W if t < T else model.W_f
        h = model.output(traj.states[t])
        e1 = h - posterior.means[t]
        e2 = h - prior.means[t]
        pc[i] = 0.5 * e1 @ W @ e1 + 0.5 * np.trace(W @ posterior.covs[t])
        qc[i] = 0.5 * e2 @ W @ e2 + 0.5 * np.trace(W @ prior.covs[t])
    return CostShift(pc - qc, pc, qc)


def build_M(dl, weights, clamp=const.DL_CLAMP):
    """
    Create desirability system for cost change and weights of time steps
    `1..T`.

    The weights of a row are normalized over remaining horizon

        .. math::

            P_{tj} = p_j / \\sum_{k \\ge t} p_k, j \\ge t

    so zero cost change is fixed point of the system with :math:`z = 1`.

    The last row of the matrix is the terminal row. It is kept for
    completeness, but the partitioned solve uses only the non-terminal
    rows and the boundary :math:`z_T = e^{-\\delta L_T}`, so the value of
    the terminal row does not affect the solution.

    :param dl: Cost change of time steps.
    :param weights: Weights of time steps.
    :param clamp: Limit of absolute value of cost change.
    """
    dl = np.asarray(dl, dtype=float)
    p = np.asarray(weights, dtype=float)
    if dl.shape != p.shape or dl.ndim != 1 or len(dl) == 0:
        raise DimensionError(
            'Cost change {} and weights {} do not match'
            .format(dl.shape, p.shape)
        )
    if not np.all(np.isfinite(dl)):
        raise EngineError('Non-finite cost change')
    if np.any(p <= 0):
        raise EngineError('Weights have to be positive')

    p = p / p.sum()
    clamped = bool(np.any(np.abs(dl) > clamp))
    if clamped:
        logger.warning(
            'cost change clamped to +-{}, max {}'
            .format(clamp, np.abs(dl).max())
        )
        dl = np.clip(dl, -clamp, clamp)

    tail = np.cumsum(p[::-1])[::-1]
    P = np.triu(np.outer(1 / tail, p))
    M = np.exp(-dl)[:, None] * P
    return DesirabilityMatrix(M, P, dl, p, clamped)


def _condition(A):
    rcond, _ = lapack.dtrcon(A, norm='1', uplo='U', diag='N')
    return np.inf if rcond == 0 else 1 / rcond


def _solve_z(dm, ridge=const.RIDGE, cond_max=const.COND_MAX):
    P, dl = dm.P, dm.dl
    T = len(dl)
    with np.errstate(divide='ignore'):
        logP = np.log(P)
    logz = np.empty(T)
    logz[-1] = -dl[-1]

    diag = np.exp(dl[:-1]) - np.diag(P)[:-1]
    flagged = False
    condition = 1.0
    if T > 1:
        A = -P[:-1, :-1]
        np.fill_diagonal(A, diag)
        condition = _condition(A)
        if np.any(diag <= 0) or condition > cond_max:
            flagged = True
            diag = np.maximum(diag, 0) + ridge
            np.fill_diagonal(A, diag)
            condition = _condition(A)
            logger.warning(
                'desirability system ill conditioned, ridge added,'
                ' condition {:.3g}'.format(condition)
            )

        # back substitution of log z
        logdiag = np.log(diag)
        for t in range(T - 2, -1, -1):
            logz[t] = logsumexp(logP[t, t + 1:] + logz[t + 1:]) - logdiag[t]

    logg = logsumexp(logP + logz, axis=1)
    dv = dl - logg
    dv[-1] = dl[-1]

    with np.errstate(over='ignore', under='ignore'):
        z = np.exp(logz)
        g = np.exp(logg)
    valid = np.isfinite(z) & np.isfinite(g) & (z > 0) & (g > 0)
    if not np.all(valid):
        k = np.flatnonzero(~valid)
        raise SingularError(
            'Desirability function out of floating point range at {} step(s),'
            ' log z in [{:.6g}, {:.6g}]'
            .format(len(k), logz.min(), logz.max())
        )

    # relative residual of non-terminal rows of z = M z
    res = np.abs(np.expm1(logg[:-1] - dl[:-1] - logz[:-1]))
    residual = float(res.max()) if T > 1 else 0.0
    return DesirabilitySolution(z, g, dv, diag, condition, flagged, residual)


def solve_desirability(dm, ridge=const.RIDGE, cond_max=const.COND_MAX):
    """
    Solve desirability system.

    The non-terminal block is solved with back substitution

        .. math::

            z_N = (diag(e^{\\delta L_N}) - P_{NN})^{-1} P_{NT} z_T

    The back substitution is performed on logarithm of the desirability
    function, so large cost changes do not overflow intermediate values.
    If the block is ill conditioned, then small ridge is added to its
    diagonal and the solution is flagged. `SingularError` is raised if
    the desirability function cannot be represented with floating point
    numbers.

    The residual of the solution is maximum relative residual of the
    non-terminal rows of :math:`z = M z`.

    :param dm: Desirability system.
    :param ridge: Ridge added to diagonal of ill conditioned block.
    :param cond_max: Largest condition number of solved block without ridge.
    """
    stats['linear_solve'] += 1
    sol = _solve_z(dm, ridge, cond_max)
    assert np.all(sol.z > 0), sol.z
    if __debug__:
        logger.debug(
            'desirability: T={}, condition {:.3g}, residual {:.3g}'
            .format(len(sol.z), sol.condition, sol.residual)
        )
    return sol


def termination_gap(dm, sol):
    """
    Calculate maximum divergence between belief of remaining horizon
    implied by desirability function and by value change.

    For each non-terminal step the distributions :math:`P_{tj} z_j / g_t`
    and :math:`P_{tj} e^{-\\delta V_j}` (normalized) are compared. The
    divergence vanishes for exact solution.

    :param dm: Desirability system.
    :param sol: Solution of desirability system.
    """
    gap = 0.0
    T = len(sol.z)
    for t in range(T - 1):
        q1 = dm.P[t, t:] * sol.z[t:] / sol.g[t]
        q2 = dm.P[t, t:] * np.exp(-sol.dv[t:])
        q2 = q2 / q2.sum()
        kl = np.sum(q1 * (np.log(q1) - np.log(q2)))
        gap = max(gap, abs(kl))
    return gap


def _kappa(dm, sol):
    k = np.ones(len(sol.z))
    k[:-1] = np.exp(dm.dl[:-1]) / sol.diag
    return k


def value_gradient(dm, sol, prior, posterior, traj, model, t0=0,
        mode='analytic', fd_step=const.FD_GRAD_STEP):
    """
    Calculate gradient of value change with respect to target point.

    The gradient at time step `t` is sensitivity of :math:`\\delta V_t` to
    common translation of prior and posterior belief at the time step.
    Array of shape `(T - t0, d)` is returned for time steps `t0 + 1..T`.

    In analytic mode the gradient is

        .. math::

            \\kappa_t W_t (\\mu'_t - \\mu_t)

    where :math:`\\kappa_t = e^{\\delta L_t} / (e^{\\delta L_t} - P_{tt})`
    for non-terminal steps and :math:`\\kappa_T = 1`. In `fd` mode
    central differences are used, the desirability system is solved for
    each translation.

    :param dm: Desirability system.
    :param sol: Solution of desirability system.
    :param prior: Prior belief trajectory.
    :param posterior: Posterior belief trajectory.
    :param traj: Nominal trajectory.
    :param model: System model.
    :param t0: First time step.
    :param mode: Calculation mode, `analytic` or `fd`.
    :param fd_step: Relative step of central differences.
    """
    T = traj.horizon
    steps = range(t0 + 1, T + 1)
    shift = posterior.means[t0 + 1:] - prior.means[t0 + 1:]
    weights = [model.W if t < T else model.W_f for t in steps]

    if mode == 'analytic':
        kappa = _kappa(dm, sol)
        return np.array([
            k * W @ s for k, W, s in zip(kappa, weights, shift)
        ])
    elif mode != 'fd':
        raise EngineError('Unknown gradient mode {}'.format(mode))

    d = model.d
    grad = np.empty((len(steps), d))
    for i, t in enumerate(steps):
        for j in range(d):
            h = fd_step * (1 + abs(posterior.means[t, j]))
            if h < const.VARIANCE_FLOOR:
                raise EngineError('Gradient step underflow at {}'.format(t))
            dv = []
            for e in (h, -h):
                pr = _translate(prior, t, j, e)
                po = _translate(posterior, t, j, e)
                cs = delta_running_cost(traj, pr, po, model, t0)
                m = dm._replace(M=np.exp(-cs.dl[1:])[:, None] * dm.P)
                m = m._replace(dl=cs.dl[1:])
                dv.append(_solve_z(m).dv[i])
            grad[i, j] = (dv[0] - dv[1]) / (2 * h)
    return grad


def _translate(belief, t, j, e):
    means = belief.means.copy()
    means[t, j] += e
    return belief._replace(means=means)


def control_adjustment(grad, traj, model, t0=0):
    """
    Convert gradient of value change into control adjustment.

    The gradient is lifted to state space with output Jacobian,
    :math:`\\partial \\delta V / \\partial x = -H^T \\partial \\delta V /
    \\partial o`, and controls `t0..T-1` are adjusted.

    :param grad: Gradient of value change for time steps `t0 + 1..T`.
    :param traj: Nominal trajectory.
    :param model: System model.
    :param t0: First time step.
    """
    T = traj.horizon
    grad = np.asarray(grad, dtype=float)
    if grad.shape != (T - t0, model.d):
        raise DimensionError(
            'Gradient shape {} does not match horizon'.format(grad.shape)
        )

    cf = scipy.linalg.cho_factor(model.R)
    xs, us = traj.states, traj.controls
    du = np.empty((T - t0, model.m))
    grad_x = np.empty((T - t0, model.n))
    for i, t in enumerate(range(t0, T)):
        H = model.output_jacobian(xs[t + 1])
        grad_x[i] = -H.T @ grad[i]
        _, B = linearize(model, xs[t], us[t], t)
        du[i] = -scipy.linalg.cho_solve(cf, B.T @ grad_x[i])

    controls = np.array(us, dtype=float)
    controls[t0:] = controls[t0:] + du
    return AdjustmentResult(du, grad_x, controls)


def retro_adjust(model, traj, prior, posterior, t0=0, mode=None, opts=None):
    """
    Calculate control adjustment of remaining horizon for distribution
    shift between prior and posterior belief.

    A tuple of adjustment, desirability system and its solution is
    returned.

    :param model: System model.
    :param traj: Nominal trajectory.
    :param prior: Prior belief trajectory.
    :param posterior: Posterior belief trajectory.
    :param t0: Current time step.
    :param mode: Gradient calculation mode, `opts.gradient` by default.
    :param opts: Fine-tuning options.
    """
    if opts is None:
        opts = RetroOptions()
    if mode is None:
        mode = opts.gradient

    T = traj.horizon
    if t0 >= T:
        raise EngineError('No controls to adjust at step {}'.format(t0))

    cs = delta_running_cost(traj, prior, posterior, model, t0)
    weights = predictive_weights(prior, posterior)[t0 + 1:]
    dm = build_M(cs.dl[1:], weights, opts.clamp)
    sol = solve_desirability(dm, opts.ridge, opts.cond_max)
    grad = value_gradient(
        dm, sol, prior, posterior, traj, model, t0, mode, opts.fd_step
    )
    adj = control_adjustment(grad, traj, model, t0)
    return adj, dm, sol


class BeliefTracker(object):
    """
    Tracker of prior and posterior belief trajectories.

    Distribution shift of a time step is maximum of shift over remaining
    horizon for Gaussian beliefs. For mixture beliefs only terminal step
    is compared, as Monte-Carlo estimation is expensive.

    The prior is replaced with posterior when the shift is over threshold.

    :var prior: Prior belief trajectory.
    :var posterior: Posterior belief trajectory.
    :var threshold: Distribution shift threshold [nats].
    """
    def __init__(self, prior, threshold=const.KL_THRESHOLD, forecaster='ballistic',
            components=2, seed=0, samples=const.MC_SAMPLES):
        """
        Create belief tracker.

        :param prior: Initial prior belief trajectory.
        :param threshold: Distribution shift threshold [nats].
        :param forecaster: Forecaster name, `ballistic` or `gmm`.
        :param components: Number of mixture components of GMM forecaster.
        :param seed: Random generator seed.
        :param samples: Number of Monte-Carlo samples for mixtures.
        """
        super().__init__()
        if forecaster not in ('ballistic', 'gmm'):
            raise EngineError('Unknown forecaster {}'.format(forecaster))
        self.prior = prior
        self.posterior = prior
        self.threshold = threshold
        self.forecaster = forecaster
        self.components = components
        self.seed = seed
        self.samples = samples
        self.dt = prior.motion.dt if prior.motion else None
        self.gravity = prior.motion.gravity if prior.motion else const.GRAVITY
        self._observations = []


    def _update(self, obs):
        if self.forecaster == 'ballistic':
            self.posterior = observe_and_update(self.posterior, obs)
            return

        self._observations.append(obs)
        if len(self._observations) > max(3, self.components + 1):
            self.posterior = forecast_gmm(
                self._observations, self.components, self.prior.horizon,
                self.dt, self.gravity,
                seed=self.seed, prior=self.prior,
            )


    def shift(self, t):
        """
        Calculate distribution shift at time step `t`.
        """
        T = self.prior.horizon
        if self.forecaster == 'gmm':
            return kl_shift(
                self.posterior, self.prior, T, self.samples, self.seed + t
            )
        return max(
            kl_shift(self.posterior, self.prior, s) for s in range(t, T + 1)
        )


    def update(self, t, observations):
        """
        Update posterior with observations of time step `t`.

        :param t: Time step.
        :param observations: Observations of the time step.
        """
        for obs in observations:
            self._update(obs)

        if observations:
            kl = self.shift(t)
        else:
            kl = 0.0 if self.posterior is self.prior else self.shift(t)

        prior = self.prior
        triggered = kl > self.threshold
        if triggered:
            self.prior = self.posterior
        return Tick(t, kl, triggered, prior, self.posterior)


def belief_ticks(tracker, observations, T):
    """
    Generate belief ticks of time steps `0..T-1`.

    :param tracker: Belief tracker.
    :param observations: List of observations ordered by time.
    :param T: Horizon.
    """
    by_step = {}
    for obs in observations:
        by_step.setdefault(obs.t, []).append(obs)
    for t in range(T):
        yield tracker.update(t, by_step.get(t, []))



class OnlineSession(object):
    """
    Online execution of a control sequence with distribution shift
    handling.

    The executed control is nominal control with feedback of nominal
    trajectory. Subclasses implement :py:meth:`OnlineSession.adjust`
    called when distribution shift is over threshold.

    :var model: System model.
    :var nominal: Nominal trajectory.
    :var gains: Feedback gains of nominal trajectory.
    :var noise: Process noise, array of shape (T, n).
    """
    def __init__(self, model, report, noise=None):
        """
        Create online session.

        :param model: System model.
        :param report: DDP solver report of initial control sequence.
        :param noise: Optional process noise, array of shape (T, n).
        """
        super().__init__()
        self.model = model
        self.nominal = report.trajectory
        self.k_g = np.array(report.gains.k_g)
        self.noise = noise
        self.events = []
        self.result = None


    def adjust(self, t, x, tick):
        """
        Adjust remaining nominal controls after distribution shift.

        Norm of adjustment and condition number are returned.

        :param t: Time step.
        :param x: Current state.
        :param tick: Belief tick.
        """
        raise NotImplementedError()


    def step(self, t, x, tick=None):
        """
        Perform single step of online session.

        A tuple of executed control, nominal controls and optional shift
        event is returned.

        :param t: Time step.
        :param x: Current state.
        :param tick: Belief tick of the time step.
        """
        event = None
        if tick is not None and tick.triggered:
            event = self._adjust(t, x, tick)
            self.events.append(event)

        xs, us = self.nominal.states, self.nominal.controls
        u = us[t] + self.k_g[t] @ (x - xs[t])
        return u, us, event


    def _adjust(self, t, x, tick):
        T = self.nominal.horizon
        start = time.perf_counter()
        failed = False
        du_norm = 0.0
        condition = float('nan')
        try:
            du_norm, condition = self.adjust(t, x, tick)
        except EngineError as ex:
            failed = True
            logger.warning('adjustment at {} failed: {}'.format(t, ex))
        elapsed = (time.perf_counter() - start) * 1e6

        event = ShiftEvent(
            t, tick.kl, tick.prior.belief(T), tick.posterior.belief(T),
            condition, du_norm, elapsed, failed,
        )
        logger.info(
            'shift event at {}: kl {:.6g}, du {:.6g}, time {:.1f}us'
            .format(t, tick.kl, du_norm, elapsed)
        )
        return event


    def run(self, x0, ticks):
        """
        Execute control sequence.

        The session is a generator of executed steps, the executed
        trajectory is returned as result of the generator.

        :param x0: Initial state.
        :param ticks: Belief ticks of time steps `0..T-1`.
        """
        T = self.nominal.horizon
        model = self.model
        states = np.empty((T + 1, model.n))
        controls = np.empty((T, model.m))
        states[0] = x0
        ticks = iter(ticks)
        for t in range(T):
            tick = next(ticks, None)
            u, _, event = self.step(t, states[t], tick)
            controls[t] = model.clamp(u)
            w = None if self.noise is None else self.noise[t]
            states[t + 1] = step(model, states[t], controls[t], t, w)
            yield ExecutedStep(t, states[t], controls[t], event)
        self.result = SessionResult(states, controls, self.events, self.nominal)
        return self.result


    def execute(self, x0, ticks):
        """
        Execute control sequence and return session result.

        :param x0: Initial state.
        :param ticks: Belief ticks of time steps `0..T-1`.
        """
        gen = self.run(x0, ticks)
        while True:
            try:
                next(gen)
            except StopIteration as ex:
                return ex.value



class RetroSession(OnlineSession):
    """
    Online session fine-tuning remaining controls with desirability
    system solution.

    After adjustment the nominal states are refreshed with rollout of the
    adjusted controls, the feedback gains are kept.

    :var opts: Fine-tuning options.
    """
    def __init__(self, model, report, noise=None, opts=None):
        super().__init__(model, report, noise)
        self.opts = RetroOptions() if opts is None else opts


    def adjust(self, t, x, tick):
        nom = self.nominal
        adj, _, sol = retro_adjust(
            self.model, nom, tick.prior, tick.posterior, t, opts=self.opts
        )
        targets = np.array(nom.targets)
        targets[t:] = tick.posterior.means[t:]
        refreshed = rollout(
            self.model, nom.states[0], adj.controls, targets
        )
        states = np.array(refreshed.states)
        states[:t + 1] = nom.states[:t + 1]
        self.nominal = refreshed._replace(states=states)
        return float(np.linalg.norm(adj.du)), sol.condition


def retro_online_step(session, tracker, t, x, observations=(), threshold=None):
    """
    Perform single step of online fine-tuning.

    The observations of the time step update posterior belief of the
    tracker and the distribution shift between posterior and prior belief
    is calculated. If the shift is over threshold, then remaining controls
    of the session are fine-tuned and the prior belief is replaced with
    the posterior. The current control is executed with feedback of
    nominal trajectory.

    A tuple of executed control, nominal controls and optional shift event
    is returned.

    :param session: RETRO session.
    :param tracker: Belief tracker.
    :param t: Time step.
    :param x: Current state.
    :param observations: Observations of the time step.
    :param threshold: Distribution shift threshold, tracker threshold by
        default.
    """
    if threshold is not None:
        tracker.threshold = threshold
    tick = tracker.update(t, list(observations))
    return session.step(t, x, tick)


# vim: sw=4:et:ai
