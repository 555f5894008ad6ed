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
Scenario configuration.

The scenario configuration is read from INI file with sections

scenario
    Horizon, time step, seed, target launch distribution and observation
    schedule.
model
    System model name and cost weights.
solver
    DDP solver options.
belief
    Target forecaster options.
retro
    Distribution shift threshold, value gradient mode and numeric
    safeguards of desirability system.
benchmark
    Number of repetitions of computation time measurements.
output
    Output directory and format.

All keys are optional, unknown sections and keys are rejected. For
example::

    [scenario]
    horizon = 200
    seed = 3
    launch_velocity = -0.5, 4.0

    [retro]
    threshold = 0.05

The default output directory can be overriden with `RETROPT_OUT`
environment variable.
"""

from collections import namedtuple, OrderedDict
import configparser
import logging
import os

from .adjust import RetroOptions
from .ddp import SolverOptions
from .error import ConfigError
from . import const

logger = logging.getLogger(__name__)

ScenarioParams = namedtuple(
    'ScenarioParams',
    'horizon dt seed launch_position launch_velocity launch_var'
    ' velocity_shift obs_every obs_noise process_noise'
)
ScenarioParams.__doc__ = """
Scenario parameters.

:var horizon: Horizon.
:var dt: Time step [s].
:var seed: Random generator seed.
:var launch_position: Mean launch position of target [m].
:var launch_velocity: Mean launch velocity of target [m/s].
:var launch_var: Variance of launch state.
:var velocity_shift: Standard deviation of true launch velocity [m/s].
:var obs_every: Observation interval in time steps.
:var obs_noise: Observation noise standard deviation [m].
:var process_noise: Variance of target acceleration noise.
"""

ModelConfig = namedtuple('ModelConfig', 'name W W_f R sigma u_max')
ModelConfig.__doc__ = """
System model configuration.

:var name: Built-in model name.
:var W: Tracking weight.
:var W_f: Final tracking weight.
:var R: Control weight.
:var sigma: Process noise scale of execution.
:var u_max: Control limit or null.
"""

BeliefConfig = namedtuple(
    'BeliefConfig', 'forecaster components gravity samples variance_floor'
)
BeliefConfig.__doc__ = """
Target forecaster configuration.

:var forecaster: Forecaster name, `ballistic` or `gmm`.
:var components: Number of mixture components of GMM forecaster.
:var gravity: Gravitational acceleration [m/s^2].
:var samples: Number of Monte-Carlo samples of mixture divergence.
:var variance_floor: Variance floor of target position belief [m^2].
"""

BenchmarkConfig = namedtuple('BenchmarkConfig', 'repeats min_time')
BenchmarkConfig.__doc__ = """
Computation time benchmark configuration.

:var repeats: Number of measurements of each method.
:var min_time: Shortest measured time [s], faster calls are batched.
"""

OutputConfig = namedtuple('OutputConfig', 'dir format event_log')
OutputConfig.__doc__ = """
Output configuration.

:var dir: Output directory.
:var format: Report format, `json` or `csv`.
:var event_log: Write shift event log.
"""

ScenarioConfig = namedtuple(
    'ScenarioConfig', 'scenario model solver belief retro benchmark output'
)
ScenarioConfig.__doc__ = """
Scenario configuration.

:var scenario: Scenario parameters.
:var model: System model configuration.
:var solver: DDP solver options.
:var belief: Target forecaster configuration.
:var retro: Fine-tuning configuration.
:var benchmark: Computation time benchmark configuration.
:var output: Output configuration.
"""


def _floats(v):
    return tuple(float(s) for s in v.split(','))


def _bool(v):
    v = v.strip().lower()
    if v in ('1', 'yes', 'true', 'on'):
        return True
    if v in ('0', 'no', 'false', 'off'):
        return False
    raise ValueError('not a boolean: {}'.format(v))


def _optional_float(v):
    return None if v.strip().lower() in ('', 'none') else float(v)


def _choice(*values):
    def parse(v):
        v = v.strip()
        if v not in values:
            raise ValueError('expected one of {}'.format(', '.join(values)))
        return v
    return parse


# section name -> (type, {key: parser})
SCHEMA = OrderedDict([
    ('scenario', (ScenarioParams, {
        'horizon': int,
        'dt': float,
        'seed': int,
        'launch_position': _floats,
        'launch_velocity': _floats,
        'launch_var': float,
        'velocity_shift': float,
        'obs_every': int,
        'obs_noise': float,
        'process_noise': float,
    })),
    ('model', (ModelConfig, {
        'name': _choice(
            'double_integrator_2d', 'two_link_arm', 'lti_n4m2', 'scalar_lti'
        ),
        'W': float,
        'W_f': float,
        'R': float,
        'sigma': float,
        'u_max': _optional_float,
    })),
    ('solver', (SolverOptions, {
        'max_iters': int,
        'tol': float,
        'reg_init': float,
        'reg_min': float,
        'reg_max': float,
        'reg_up': float,
        'reg_down': float,
        'ls_steps': int,
        'ls_accept': float,
        'full_ddp': _bool,
    })),
    ('belief', (BeliefConfig, {
        'forecaster': _choice('ballistic', 'gmm'),
        'components': int,
        'gravity': float,
        'samples': int,
        'variance_floor': float,
    })),
    ('retro', (RetroOptions, {
        'threshold': float,
        'gradient': _choice('analytic', 'fd'),
        'clamp': float,
        'ridge': float,
        'cond_max': float,
        'fd_step': float,
    })),
    ('benchmark', (BenchmarkConfig, {
        'repeats': int,
        'min_time': float,
    })),
    ('output', (OutputConfig, {
        'dir': str,
        'format': _choice('json', 'csv'),
        'event_log': _bool,
    })),
])


def default_config():
    """
    Create default scenario configuration.

    Interception of a ball with planar point mass for 2 seconds.
    """
    return ScenarioConfig(
        ScenarioParams(
            horizon=200, dt=0.01, seed=0, launch_position=(1.5, 1.0),
            launch_velocity=(-0.5, 4.0), launch_var=0.01,
            velocity_shift=0.5, obs_every=10, obs_noise=0.02,
            process_noise=0.0,
        ),
        ModelConfig(
            name='double_integrator_2d', W=1.0, W_f=1000.0, R=0.001,
            sigma=0.0, u_max=None,
        ),
        SolverOptions(),
        BeliefConfig(
            forecaster='ballistic', components=2, gravity=const.GRAVITY,
            samples=const.MC_SAMPLES, variance_floor=const.VARIANCE_FLOOR,
        ),
        RetroOptions(),
        BenchmarkConfig(
            repeats=const.BENCH_REPEATS, min_time=const.BENCH_MIN_TIME
        ),
        OutputConfig(
            dir=os.environ.get(const.OUTPUT_DIR_ENV, const.OUTPUT_DIR),
            format='json', event_log=True,
        ),
    )


def validate(config):
    """
    Validate scenario configuration.

    :param config: Scenario configuration.
    """
    sc = config.scenario
    mc = config.model
    so = config.solver
    bc = config.belief
    rc = config.retro
    checks = (
        (sc.horizon >= 1, 'scenario', 'horizon', 'has to be positive'),
        (sc.dt > 0, 'scenario', 'dt', 'has to be positive'),
        (sc.seed >= 0, 'scenario', 'seed', 'has to be non-negative'),
        (len(sc.launch_position) == len(sc.launch_velocity), 'scenario',
            'launch_velocity', 'dimension does not match launch position'),
        (sc.launch_var >= 0, 'scenario', 'launch_var', 'has to be non-negative'),
        (sc.velocity_shift >= 0, 'scenario', 'velocity_shift',
            'has to be non-negative'),
        (sc.obs_every >= 1, 'scenario', 'obs_every', 'has to be positive'),
        (sc.obs_noise >= 0, 'scenario', 'obs_noise', 'has to be non-negative'),
        (sc.process_noise >= 0, 'scenario', 'process_noise',
            'has to be non-negative'),
        (mc.W >= 0, 'model', 'W', 'has to be non-negative'),
        (mc.W_f >= 0, 'model', 'W_f', 'has to be non-negative'),
        (mc.R > 0, 'model', 'R', 'has to be positive'),
        (mc.sigma >= 0, 'model', 'sigma', 'has to be non-negative'),
        (mc.u_max is None or mc.u_max > 0, 'model', 'u_max',
            'has to be positive or none'),
        (so.max_iters >= 1, 'solver', 'max_iters', 'has to be positive'),
        (so.tol > 0, 'solver', 'tol', 'has to be positive'),
        (0 <= so.reg_min <= so.reg_max, 'solver', 'reg_min',
            'has to be in range [0, reg_max]'),
        (so.reg_init >= 0, 'solver', 'reg_init', 'has to be non-negative'),
        (so.reg_up > 1, 'solver', 'reg_up', 'has to be greater than 1'),
        (0 < so.reg_down < 1, 'solver', 'reg_down', 'has to be in range (0, 1)'),
        (so.ls_steps >= 0, 'solver', 'ls_steps', 'has to be non-negative'),
        (0 < so.ls_accept < 1, 'solver', 'ls_accept', 'has to be in range (0, 1)'),
        (bc.components >= 1, 'belief', 'components', 'has to be positive'),
        (bc.gravity >= 0, 'belief', 'gravity', 'has to be non-negative'),
        (bc.samples >= 2, 'belief', 'samples', 'has to be at least 2'),
        (bc.variance_floor > 0, 'belief', 'variance_floor', 'has to be positive'),
        (rc.threshold >= 0, 'retro', 'threshold', 'has to be non-negative'),
        (rc.clamp > 0, 'retro', 'clamp', 'has to be positive'),
        (rc.ridge > 0, 'retro', 'ridge', 'has to be positive'),
        (rc.cond_max > 1, 'retro', 'cond_max', 'has to be greater than 1'),
        (rc.fd_step > 0, 'retro', 'fd_step', 'has to be positive'),
        (config.benchmark.repeats >= 1, 'benchmark', 'repeats',
            'has to be positive'),
        (config.benchmark.min_time >= 0, 'benchmark', 'min_time',
            'has to be non-negative'),
    )
    for ok, section, key, msg in checks:
        if not ok:
            raise ConfigError('[{}] {}: {}'.format(section, key, msg))
    return config


def _parse_section(parser, section, default):
    cls, fields = SCHEMA[section]
    values = default._asdict()
    for key, value in parser.items(section):
        if key not in fields:
            raise ConfigError('[{}] unknown key: {}'.format(section, key))
        try:
            values[key] = fields[key](value)
        except ValueError as ex:
            raise ConfigError(
                '[{}] {}: invalid value {!r} ({})'.format(section, key, value, ex)
            ) from None
    return cls(**values)


def parse_config(path):
    """
    Read scenario configuration from INI file.

    :param path: Path to configuration file.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path) as f:
            parser.read_file(f)
    except OSError as ex:
        raise ConfigError('cannot read {}: {}'.format(path, ex.strerror)) from None
    except configparser.Error as ex:
        raise ConfigError('{}: {}'.format(path, ex)) from None

    unknown = set(parser.sections()) - set(SCHEMA)
    if unknown:
        raise ConfigError(
            '{}: unknown section: {}'.format(path, ', '.join(sorted(unknown)))
        )

    default = default_config()
    sections = [
        _parse_section(parser, s, getattr(default, s))
        if parser.has_section(s) else getattr(default, s)
        for s in SCHEMA
    ]
    config = validate(ScenarioConfig(*sections))
    logger.info('configuration read from {}'.format(path))
    return config


def config_to_dict(config):
    """
    Convert scenario configuration into dictionary.
    """
    return OrderedDict(
        (s, OrderedDict(getattr(config, s)._asdict())) for s in SCHEMA
    )


def config_from_dict(data):
    """
    Create scenario configuration from dictionary.

    :param data: Dictionary created with :py:func:`config_to_dict`.
    """
    unknown = set(data) - set(SCHEMA)
    if unknown:
        raise ConfigError('unknown section: {}'.format(', '.join(sorted(unknown))))

    default = default_config()
    sections = []
    for s, (cls, fields) in SCHEMA.items():
        values = getattr(default, s)._asdict()
        for key, value in data.get(s, {}).items():
            if key not in fields:
                raise ConfigError('[{}] unknown key: {}'.format(s, key))
            values[key] = tuple(value) if isinstance(value, list) else value
        sections.append(cls(**values))
    return validate(ScenarioConfig(*sections))


# vim: sw=4:et:ai
