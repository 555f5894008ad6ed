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
Regret analysis of fine-tuned control sequences.

The regret at time step `t` is deviation of the fine-tuned value function
from the value function of an oracle, which knows the true target
trajectory in advance

    .. math::

        R_t = |V_t + \\delta V_t - V^*_t|

where :math:`V_t` is value trace of initial DDP solution and
:math:`\\delta V_t` is value change calculated with desirability system.
For belief trajectories with distribution shift bounded with
:math:`\\alpha(T) = 1/T + 1/T^2` per time step, the regret is bounded with
:math:`\\alpha(T) + \\log T`.

The module also provides

- normalization term bound check of desirability solutions
- computation time benchmark of fine-tuning and DDP re-solve
- planning horizon sweep
"""

from collections import namedtuple
from statistics import median
import logging
import math
import time

import numpy as np

from . import adjust
from . import ddp
from .belief import BeliefTrajectory, alpha_bound, ballistic_prior, \
    predictive_weights, shrinking_shift
from .error import DimensionError, EngineError
from .ft import loglog_slope
from .model import LTIModel, ScalarLTI, random_lti, rollout
from . import const

logger = logging.getLogger(__name__)

RegretReport = namedtuple(
    'RegretReport', 'R bound total_regret violations dv_m m'
)
RegretReport.__doc__ = """
Regret of fine-tuned value function.

:var R: Regret of time steps `1..T`.
:var bound: Regret bound.
:var total_regret: Sum of regret values.
:var violations: Time steps with regret over bound.
:var dv_m: Value change with maximum desirability.
:var m: Time step of `dv_m`.
"""

RetroRun = namedtuple('RetroRun', 'report adjustment solution')
RetroRun.__doc__ = """
Hindsight fine-tuning of initial DDP solution.

:var report: DDP solver report of initial solution.
:var adjustment: Control adjustment.
:var solution: Desirability system solution.
"""

ComplexityRecord = namedtuple(
    'ComplexityRecord', 'method T n m event_time total_time iterations flags'
)
ComplexityRecord.__doc__ = """
Computation time measurement.

:var method: Method name, `oracle_ddp`, `retro` or `multirun_ddp`.
:var T: Horizon.
:var n: State dimension.
:var m: Control dimension.
:var event_time: Time to calculate new control sequence of an event [s].
:var total_time: Total time to calculate final control sequence [s].
:var iterations: Number of iterations of an event calculation.
:var flags: Measurement flags, `batched` or `failed`.
"""
ComplexityRecord.__new__.__defaults__ = ((),)

Scenario = namedtuple('Scenario', 'model x0 prior posterior truth')
Scenario.__doc__ = """
Regret analysis scenario.

:var model: System model.
:var x0: Initial state.
:var prior: Prior belief trajectory.
:var posterior: Posterior belief trajectory.
:var truth: True target trajectory.
"""

SweepRow = namedtuple('SweepRow', 'T cost_diff total_regret valid')


def oracle_solve(model, x0, truth, opts=None):
    """
    Solve DDP problem with true target trajectory.

    :param model: System model.
    :param x0: Initial state.
    :param truth: True target trajectory.
    :param opts: DDP solver options.
    """
    return ddp.solve(model, x0, truth, opts)


def retro_solve(model, x0, prior, posterior, opts=None, mode='analytic'):
    """
    Fine-tune DDP solution of prior belief with posterior belief in
    hindsight.

    :param model: System model.
    :param x0: Initial state.
    :param prior: Prior belief trajectory.
    :param posterior: Posterior belief trajectory.
    :param opts: DDP solver options.
    :param mode: Value gradient calculation mode.
    """
    report = ddp.solve(model, x0, prior.means, opts)
    adj, _, sol = adjust.retro_adjust(
        model, report.trajectory, prior, posterior, 0, mode
    )
    return RetroRun(report, adj, sol)


def regret_series(retro_run, oracle_run):
    """
    Calculate regret of fine-tuned value function.

    :param retro_run: Hindsight fine-tuning of initial DDP solution.
    :param oracle_run: Oracle DDP solver report.
    """
    v = retro_run.report.value_trace.v
    v_star = oracle_run.value_trace.v
    dv = retro_run.solution.dv
    if len(v) != len(v_star) or len(dv) != len(v) - 1:
        raise DimensionError('Horizons of fine-tuned and oracle runs differ')

    T = len(dv)
    R = np.abs(v[1:] + dv - v_star[1:])
    bound = alpha_bound(T) + math.log(T)
    violations = [int(i) + 1 for i in np.flatnonzero(R > bound)]
    m = int(np.argmin(dv))
    if violations:
        logger.warning('regret bound {:.6g} violated at {}'.format(bound, violations))
    return RegretReport(R, bound, float(R.sum()), violations, float(dv[m]), m + 1)


def check_normalization_bound(sol, T=None):
    """
    Check bound of normalization terms of desirability solution.

    The maximum normalization term is bounded with :math:`T e^{-\\delta V_m}`
    where :math:`\\delta V_m` is value change of maximum desirability.
    A tuple of check result and bound margin is returned.

    :param sol: Desirability solution.
    :param T: Horizon, length of solution by default.
    """
    if T is None:
        T = len(sol.z)
    m = np.argmin(sol.dv)
    bound = T * math.exp(-sol.dv[m])
    gmax = sol.g.max()
    margin = bound - gmax
    return bool(gmax <= bound * (1 + 1e-9)), float(margin)


def _belief(means, covs):
    belief = BeliefTrajectory(
        means, covs, None, None, None, None, None, ()
    )
    return belief._replace(weights=predictive_weights(belief, belief))


def conforming_scenario(T, seed):
    """
    Create scenario with distribution shift bounded with
    :math:`\\alpha(T)` at every time step.

    Scalar system tracks target with prior belief :math:`N(0, 1)` and
    posterior belief :math:`N(\\pm 1/T, (1 + 1/T)^2)`. The true target is
    the posterior mean.

    :param T: Horizon.
    :param seed: Random generator seed.
    """
    rng = np.random.default_rng(seed)
    q, p = shrinking_shift(T)
    sign = rng.choice((-1.0, 1.0))
    x0 = rng.normal(size=1)

    prior = _belief(
        np.tile(p.mean, (T + 1, 1)), np.tile(p.cov, (T + 1, 1, 1))
    )
    truth = np.tile(sign * q.mean, (T + 1, 1))
    posterior = BeliefTrajectory(
        truth, np.tile(q.cov, (T + 1, 1, 1)), None, None, None, None, None, ()
    )
    posterior = posterior._replace(weights=predictive_weights(prior, posterior))
    return Scenario(ScalarLTI(), x0, prior, posterior, truth)


def shrinking_template(T, seed):
    """
    Create scenario of position controlled point with distribution shift
    decreasing with horizon.

    The next position of the point is its control input, so adjustment of
    a control moves single time step of the trajectory. The beliefs and
    the true target are created with :py:func:`conforming_scenario`, the
    shift between posterior and prior belief decreases as the horizon
    grows and the fine-tuned controls approach the oracle controls.

    :param T: Horizon.
    :param seed: Random generator seed.
    """
    scenario = conforming_scenario(T, seed)
    return scenario._replace(model=LTIModel([[0.0]], [[1.0]]))


def scenario_regret(scenario, opts=None):
    """
    Calculate regret report and cost difference of fine-tuned controls.

    A tuple of regret report, cost difference of fine-tuned and oracle
    controls and convergence flag is returned.

    :param scenario: Regret analysis scenario.
    :param opts: DDP solver options.
    """
    model, x0 = scenario.model, scenario.x0
    run = retro_solve(model, x0, scenario.prior, scenario.posterior, opts)
    oracle = oracle_solve(model, x0, scenario.truth, opts)
    report = regret_series(run, oracle)
    traj = rollout(model, x0, run.adjustment.controls, scenario.truth)
    cost_diff = traj.cost - oracle.trajectory.cost
    converged = run.report.converged and oracle.converged
    return report, cost_diff, converged


def _timed(f, repeats, min_time=0.0):
    """
    Measure median execution time of a function.

    If single call of the function is faster than `min_time`, then the
    function is called in batches and time of a batch is divided by its
    size. A tuple of median time, result of last call and batch size is
    returned.
    """
    start = time.perf_counter()
    result = f()  # warm-up
    elapsed = time.perf_counter() - start
    batch = 1
    if elapsed < min_time:
        batch = max(1, math.ceil(min_time / max(elapsed, 1e-9)))
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        for _ in range(batch):
            result = f()
        times.append((time.perf_counter() - start) / batch)
    return median(times), result, batch


def benchmark_instance(n, T, seed, m=2, drift=0.1):
    """
    Create computation time benchmark instance.

    Random linear system tracks a slowly drifting target. The prior belief
    is a target at rest, the posterior belief drifts by `drift` meters over
    the horizon. Both beliefs have the same covariance, so the cost change
    of the nominal trajectory stays small and the desirability system is
    well conditioned.

    A tuple of system model, prior and posterior belief trajectories is
    returned.

    :param n: State dimension.
    :param T: Horizon.
    :param seed: Random generator seed.
    :param m: Control dimension.
    :param drift: Distance of target drift over the horizon [m].
    """
    model = random_lti(n, m, 2, seed + n, dt=0.02)
    velocity = drift / (T * model.dt)
    prior = ballistic_prior([0.5, 0.5, 0.0, 0.0], 0.01, 0.0, model.dt, T)
    posterior = ballistic_prior(
        [0.5, 0.5, velocity, -velocity], 0.01, 0.0, model.dt, T
    )
    posterior = posterior._replace(weights=predictive_weights(prior, posterior))
    return model, prior, posterior


def complexity_benchmark(ns, Ts, seed=0, m=2, repeats=const.BENCH_REPEATS,
        min_time=const.BENCH_MIN_TIME, shift_at=0.5, opts=None):
    """
    Measure computation time of new control sequence after distribution
    shift.

    For each state dimension and horizon a random linear system tracks a
    target (see :py:func:`benchmark_instance`). At time step
    `shift_at * T` the belief shifts and new control sequence is
    calculated

    oracle_ddp
        DDP solution with posterior belief (no shift event).
    retro
        Fine-tuning of initial DDP solution.
    multirun_ddp
        DDP solution of remaining horizon from scratch.

    Median of repeated measurements is reported. Calls faster than
    `min_time` are measured in batches and the record is flagged with
    `batched`. If fine-tuning fails, then its record is flagged with
    `failed` and its times are not a number.

    :param ns: State dimensions.
    :param Ts: Horizons.
    :param seed: Random generator seed.
    :param m: Control dimension.
    :param repeats: Number of repeated measurements.
    :param min_time: Shortest measured time [s].
    :param shift_at: Time of shift event as fraction of horizon.
    :param opts: Fine-tuning options.
    """
    if not 0 <= shift_at < 1:
        raise EngineError('Shift event time {} out of range [0, 1)'.format(shift_at))

    def flags(batch):
        return ('batched',) if batch > 1 else ()

    records = []
    for n in ns:
        for T in Ts:
            model, prior, posterior = benchmark_instance(n, T, seed, m)
            x0 = np.zeros(n)
            t0 = int(shift_at * T)

            t_init, report, b_init = _timed(
                lambda: ddp.solve(model, x0, prior.means), repeats, min_time
            )
            t_oracle, oracle, b_oracle = _timed(
                lambda: ddp.solve(model, x0, posterior.means), repeats, min_time
            )
            nom = report.trajectory

            def retro():
                adj, _, _ = adjust.retro_adjust(
                    model, nom, prior, posterior, t0, opts=opts
                )
                return rollout(model, x0, adj.controls, nom.targets)

            def multirun():
                return ddp.solve(model, nom.states[t0], posterior.means[t0:])

            k = adjust.stats['linear_solve']
            try:
                t_retro, _, b_retro = _timed(retro, repeats, min_time)
                solves = adjust.stats['linear_solve'] - k
                solves //= 1 + repeats * b_retro
                assert solves == 1, solves
                retro_flags = flags(max(b_retro, b_init))
            except EngineError as ex:
                logger.warning(
                    'benchmark n={}, T={}: fine-tuning failed: {}'
                    .format(n, T, ex)
                )
                t_retro = float('nan')
                solves = 0
                retro_flags = ('failed',)
            t_multi, resolve, b_multi = _timed(multirun, repeats, min_time)

            records.extend([
                ComplexityRecord(
                    'oracle_ddp', T, n, m, t_oracle, t_oracle,
                    oracle.iterations, flags(b_oracle),
                ),
                ComplexityRecord(
                    'retro', T, n, m, t_retro, t_init + t_retro, solves,
                    retro_flags,
                ),
                ComplexityRecord(
                    'multirun_ddp', T, n, m, t_multi, t_init + t_multi,
                    resolve.iterations, flags(max(b_multi, b_init)),
                ),
            ])
            logger.info(
                'benchmark n={}, T={}: retro {:.3g}s, multirun {:.3g}s'
                .format(n, T, t_retro, t_multi)
            )
    return records


def benchmark_slopes(records):
    """
    Fit log-log slopes of event time against state dimension and horizon.

    The slope against state dimension is fitted at the largest horizon
    and the slope against horizon at the largest state dimension. Slope
    is null if less than two values are available. Failed measurements
    are skipped.

    :param records: Computation time measurements.
    """
    slopes = {}
    for method in sorted({r.method for r in records}):
        items = [
            r for r in records if r.method == method and 'failed' not in r.flags
        ]
        if not items:
            slopes[method] = {'n': None, 'T': None}
            continue
        T = max(r.T for r in items)
        n = max(r.n for r in items)
        by_n = sorted((r.n, r.event_time) for r in items if r.T == T)
        by_T = sorted((r.T, r.event_time) for r in items if r.n == n)
        slopes[method] = {
            'n': loglog_slope(*zip(*by_n)) if len(by_n) > 1 else None,
            'T': loglog_slope(*zip(*by_T)) if len(by_T) > 1 else None,
        }
    return slopes


def horizon_sweep(template, Ts, seed=0, opts=None):
    """
    Calculate cost difference between fine-tuned and oracle controls and
    total regret for planning horizons.

    :param template: Function creating scenario for horizon and seed.
    :param Ts: Horizons.
    :param seed: Random generator seed.
    :param opts: DDP solver options.
    """
    rows = []
    for T in Ts:
        try:
            report, cost_diff, valid = scenario_regret(template(T, seed), opts)
        except EngineError as ex:
            logger.warning('horizon sweep failed for T={}: {}'.format(T, ex))
            rows.append(SweepRow(T, float('nan'), float('nan'), False))
            continue
        rows.append(SweepRow(T, float(cost_diff), report.total_regret, valid))
    return rows


def _normalized(values):
    values = np.asarray(values, dtype=float)
    span = values.max() - values.min()
    if span == 0:
        return np.zeros_like(values)
    return (values - values.min()) / span


def sweep_trends(rows):
    """
    Summarize trends of horizon sweep.

    The result contains

    cost_decreasing
        Cost difference is non-increasing after second horizon.
    cost_bounded
        Cost difference at largest horizon is not smaller than 1e-6.
    regret_increasing
        Total regret is increasing over last three horizons.
    joint_low
        Both normalized cost difference and total regret are below 0.3
        at some horizon.

    :param rows: Horizon sweep rows ordered by horizon.
    """
    rows = [r for r in rows if r.valid]
    cd = np.array([r.cost_diff for r in rows])
    tr = np.array([r.total_regret for r in rows])
    low = (_normalized(cd) < 0.3) & (_normalized(tr) < 0.3)
    return {
        'cost_decreasing': bool(np.all(np.diff(cd[1:]) <= 0)),
        'cost_bounded': bool(len(cd) > 0 and cd[-1] >= 1e-6),
        'regret_increasing': bool(len(tr) >= 3 and np.all(np.diff(tr[-3:]) > 0)),
        'joint_low': bool(np.any(low)),
    }


def random_desirability(T, rng):
    """
    Create and solve random desirability system.

    :param T: Horizon.
    :param rng: Random generator.
    """
    dl = rng.uniform(0, 2, size=T)
    weights = rng.uniform(0.1, 1, size=T)
    dm = adjust.build_M(dl, weights)
    return dm, adjust.solve_desirability(dm)


def bound_sweep(seed, count=1000, max_T=64, Ts=(10, 50, 100, 500), scenarios=10):
    """
    Check normalization term bound on random desirability systems and
    regret bound on conforming scenarios.

    A dictionary with violations of both bounds and minimum normalization
    bound margin is returned.

    :param seed: Random generator seed.
    :param count: Number of random desirability systems.
    :param max_T: Maximum horizon of random desirability systems.
    :param Ts: Horizons of conforming scenarios.
    :param scenarios: Number of conforming scenarios per horizon.
    """
    rng = np.random.default_rng(seed)
    failed = []
    margin = math.inf
    for i in range(count):
        T = int(rng.integers(1, max_T + 1))
        _, sol = random_desirability(T, rng)
        holds, mg = check_normalization_bound(sol)
        margin = min(margin, mg)
        if not holds:
            failed.append(i)

    regret = []
    for T in Ts:
        for k in range(scenarios):
            report, _, _ = scenario_regret(conforming_scenario(T, seed + k))
            if report.violations:
                regret.append({'T': T, 'seed': seed + k, 'steps': report.violations})

    return {
        'normalization_violations': failed,
        'normalization_margin': margin,
        'regret_violations': regret,
    }


# vim: sw=4:et:ai
