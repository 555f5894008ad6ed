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
Moving target interception scenarios.

A scenario simulates a thrown ball (the target) and a system model
tracking it. The true launch velocity of the ball differs from its prior
belief, the ball is observed with noise at regular time steps and the
control sequence is calculated with the methods

oracle
    DDP solution with true target trajectory known in advance.
no_adjust
    Initial DDP solution of prior belief executed without change.
retro
    Initial DDP solution fine-tuned when distribution shift of target
    belief is over threshold.
multirun_ddp
    Initial DDP solution replaced with new DDP solution of remaining
    horizon when distribution shift is over threshold.

All methods observe the same observation stream and process noise.
"""

from collections import namedtuple
from functools import partial
import csv
import logging
import time

import numpy as np

from . import ddp
from .adjust import BeliefTracker, OnlineSession, RetroSession, \
    belief_ticks, retro_adjust
from .belief import Observation, ballistic_prior, observe_and_update
from .error import ConfigError, EngineError
from .flow import sender
from .model import create_model, trajectory_cost
from .regret import RetroRun, regret_series
from . import const

logger = logging.getLogger(__name__)

METHODS = ('oracle', 'no_adjust', 'retro', 'multirun_ddp')

# initial states of models, zero state by default
X0 = {
    'two_link_arm': (0.3, 1.2, 0.0, 0.0),
}

RunReport = namedtuple(
    'RunReport',
    'config method seed version final_error total_cost events timings'
    ' regret converged error'
)
RunReport.__doc__ = """
Result of scenario run of a method.

:var config: Scenario configuration.
:var method: Method name.
:var seed: Random generator seed.
:var version: Report format version.
:var final_error: Final tracking error [m].
:var total_cost: Total cost of executed trajectory for true target.
:var events: List of shift events.
:var timings: Dictionary of computation times [s].
:var regret: Regret summary dictionary or null.
:var converged: True if DDP solutions converged.
:var error: Error message if the method failed or null.
"""


def create_scenario_model(config):
    """
    Create system model of scenario.

    :param config: Scenario configuration.
    """
    mc = config.model
    model = create_model(
        mc.name, dt=config.scenario.dt, W=mc.W, W_f=mc.W_f, R=mc.R,
        sigma=mc.sigma, u_max=mc.u_max,
    )
    d = len(config.scenario.launch_position)
    if model.d != d:
        raise ConfigError(
            '[scenario] launch_position: dimension {} does not match model'
            ' {} ({})'.format(d, mc.name, model.d)
        )
    return model


def launch_state(config):
    sc = config.scenario
    return np.r_[sc.launch_position, sc.launch_velocity]


def generate_target(config, seed=None):
    """
    Generate true target trajectory and its observations.

    The true launch velocity is launch velocity of the scenario perturbed
    with Gaussian noise of `velocity_shift` standard deviation. The
    observations are taken every `obs_every` time steps.

    A tuple of true target trajectory and list of observations is
    returned.

    :param config: Scenario configuration.
    :param seed: Random generator seed, scenario seed by default.
    """
    sc = config.scenario
    if seed is None:
        seed = sc.seed
    rng = np.random.default_rng(seed)
    d = len(sc.launch_position)
    T = sc.horizon

    launch = launch_state(config)
    launch[d:] += sc.velocity_shift * rng.normal(size=d)
    truth = ballistic_prior(
        launch, 0.0, config.belief.gravity, sc.dt, T
    ).means.copy()

    if sc.process_noise > 0:
        vel = launch[d:].copy()
        for t in range(T):
            acc = np.sqrt(sc.process_noise) * rng.normal(size=d)
            acc[-1] -= config.belief.gravity
            truth[t + 1] = truth[t] + sc.dt * vel + 0.5 * sc.dt ** 2 * acc
            vel = vel + sc.dt * acc

    observations = [
        Observation(t, truth[t] + sc.obs_noise * rng.normal(size=d), sc.obs_noise)
        for t in range(0, T, sc.obs_every)
    ]
    return truth, observations


def read_observations(path):
    """
    Read observations from CSV file with columns `t, y1..yd, noise`.

    :param path: Path to CSV file.
    """
    try:
        with open(path, newline='') as f:
            reader = csv.reader(f)
            header = next(reader)
            rows = list(reader)
    except OSError as ex:
        raise EngineError('cannot read {}: {}'.format(path, ex.strerror)) from None
    except StopIteration:
        raise EngineError('{}: empty observation file'.format(path)) from None

    d = len(header) - 2
    expected = ['t'] + ['y{}'.format(i) for i in range(1, d + 1)] + ['noise']
    if d < 1 or [h.strip() for h in header] != expected:
        raise EngineError('{}: invalid header {}'.format(path, header))

    observations = []
    for k, row in enumerate(rows, 2):
        try:
            t = int(row[0])
            y = np.array([float(v) for v in row[1:-1]])
            noise = float(row[-1])
        except (ValueError, IndexError):
            raise EngineError('{}:{}: invalid row'.format(path, k)) from None
        if len(y) != d:
            raise EngineError('{}:{}: invalid row'.format(path, k))
        observations.append(Observation(t, y, noise))
    return observations


def hindsight_truth(prior, observations):
    """
    Estimate target trajectory with all observations.

    :param prior: Prior belief trajectory.
    :param observations: List of observations.
    """
    belief = prior
    for obs in observations:
        belief = observe_and_update(belief, obs)
    return belief.means.copy()



class MultirunSession(OnlineSession):
    """
    Online session replacing remaining controls with new DDP solution
    when distribution shift is over threshold.
    """
    def __init__(self, model, report, noise=None, opts=None):
        super().__init__(model, report, noise)
        self.opts = opts
        self.converged = True


    def adjust(self, t, x, tick):
        nom = self.nominal
        report = ddp.solve(self.model, x, tick.posterior.means[t:], self.opts)
        self.converged = self.converged and report.converged
        if report.gains is None:
            raise EngineError('DDP re-solve at {} failed'.format(t))

        sub = report.trajectory
        states = np.array(nom.states)
        controls = np.array(nom.controls)
        targets = np.array(nom.targets)
        du = sub.controls - controls[t:]
        states[t:] = sub.states
        controls[t:] = sub.controls
        targets[t:] = sub.targets
        self.k_g[t:] = report.gains.k_g
        self.nominal = nom._replace(
            states=states, controls=controls, targets=targets, cost=float('nan')
        )
        return float(np.linalg.norm(du)), float('nan')



def _report(config, method, model, result, truth, timings, converged,
        regret=None, error=None):
    T = config.scenario.horizon
    if result is None:
        final_error = total_cost = float('nan')
        events = []
    else:
        final_error = float(np.linalg.norm(
            model.output(result.states[T]) - truth[T]
        ))
        total_cost = float(trajectory_cost(
            model, result.states, result.controls, truth
        ))
        events = result.events
    return RunReport(
        config, method, config.scenario.seed, const.REPORT_VERSION,
        final_error, total_cost, events, timings, regret, converged, error,
    )


def _execute(session, x0, ticks, sinks, method):
    run = session.run
    if sinks:
        run = sender(run, *[partial(s, method) for s in sinks])
    for _ in run(x0, ticks):
        pass
    return session.result


def regret_summary(model, report, oracle, prior, posterior, opts=None):
    """
    Calculate regret summary of hindsight fine-tuning.

    If the hindsight fine-tuning fails, then the summary contains the
    error message only.

    :param model: System model.
    :param report: DDP solver report of prior belief.
    :param oracle: Oracle DDP solver report.
    :param prior: Prior belief trajectory.
    :param posterior: Final posterior belief trajectory.
    :param opts: Fine-tuning options.
    """
    try:
        adj, _, sol = retro_adjust(
            model, report.trajectory, prior, posterior, opts=opts
        )
    except EngineError as ex:
        logger.warning('hindsight fine-tuning failed: {}'.format(ex))
        return {'error': str(ex)}

    r = regret_series(RetroRun(report, adj, sol), oracle)
    return {
        'bound': r.bound,
        'total_regret': r.total_regret,
        'max_regret': float(r.R.max()),
        'violations': r.violations,
        'dv_m': r.dv_m,
        'm': r.m,
    }


def run_scenario(config, observations=None, methods=METHODS, sinks=()):
    """
    Run scenario with each method.

    If observations are given, then true target trajectory is estimated
    from all observations. A dictionary of method name and run report is
    returned.

    :param config: Scenario configuration.
    :param observations: Optional list of observations.
    :param methods: Methods to run.
    :param sinks: Functions creating coroutines for executed steps of
        a method.
    """
    sc = config.scenario
    T = sc.horizon
    model = create_scenario_model(config)
    x0 = np.array(X0.get(model.NAME, np.zeros(model.n)), dtype=float)
    opts = config.solver

    prior = ballistic_prior(
        launch_state(config), sc.launch_var, config.belief.gravity, sc.dt, T,
        sc.process_noise, config.belief.variance_floor,
    )
    if observations is None:
        truth, observations = generate_target(config)
    else:
        truth = hindsight_truth(prior, observations)

    rng = np.random.default_rng([sc.seed, 1])
    noise = model.sigma * rng.normal(size=(T, model.n)) if model.sigma > 0 \
        else None

    start = time.perf_counter()
    report = ddp.solve(model, x0, prior.means, opts)
    t_init = time.perf_counter() - start

    tracker = BeliefTracker(
        prior, config.retro.threshold, config.belief.forecaster,
        config.belief.components, sc.seed, config.belief.samples,
    )
    ticks = list(belief_ticks(tracker, observations, T))
    triggers = [k.t for k in ticks if k.triggered]
    logger.info('scenario: {} shift events at {}'.format(len(triggers), triggers))

    reports = {}
    oracle = None
    if 'oracle' in methods or 'retro' in methods:
        start = time.perf_counter()
        oracle = ddp.solve(model, x0, truth, opts)
        t_oracle = time.perf_counter() - start

    for method in methods:
        timings = {'initial': t_init}
        regret = None
        converged = report.converged
        try:
            start = time.perf_counter()
            if method == 'oracle':
                timings = {'initial': t_oracle}
                session = OnlineSession(model, oracle, noise)
                result = _execute(session, x0, [], sinks, method)
                converged = oracle.converged
            elif method == 'no_adjust':
                session = OnlineSession(model, report, noise)
                result = _execute(session, x0, [], sinks, method)
            elif method == 'retro':
                session = RetroSession(model, report, noise, config.retro)
                result = _execute(session, x0, ticks, sinks, method)
                regret = regret_summary(
                    model, report, oracle, prior, tracker.posterior,
                    config.retro,
                )
            elif method == 'multirun_ddp':
                session = MultirunSession(model, report, noise, opts)
                result = _execute(session, x0, ticks, sinks, method)
                converged = converged and session.converged
            else:
                raise EngineError('Unknown method {}'.format(method))
            timings['execution'] = time.perf_counter() - start
            timings['events'] = sum(e.time_us for e in result.events) * 1e-6
            timings['total'] = timings['initial'] + timings['events']
        except EngineError as ex:
            logger.warning('method {} failed: {}'.format(method, ex))
            reports[method] = _report(
                config, method, model, None, truth, timings, False, error=str(ex)
            )
            continue

        reports[method] = _report(
            config, method, model, result, truth, timings, converged, regret
        )
        logger.info(
            '{}: final error {:.6g}, cost {:.6g}'.format(
                method, reports[method].final_error, reports[method].total_cost
            )
        )
    return reports


# vim: sw=4:et:ai
