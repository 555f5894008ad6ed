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
Command line interface of retropt.

The `retropt` command provides subcommands

run
    Run scenario with all methods and save run reports.
benchmark
    Measure computation time of new control sequences.
sweep-horizon
    Calculate cost difference and total regret for planning horizons.
check-bounds
    Check normalization term and regret bounds.

The command exits with 0 on success, 1 on invalid arguments or
configuration error and 2 on runtime failure.
"""

import argparse
import logging
import math
import os.path
import sys

from .config import default_config, parse_config, validate
from .error import ConfigError, EngineError
from .belief import alpha_bound
from . import output
from . import regret
from . import scenario

logger = logging.getLogger(__name__)


def _ints(v):
    try:
        return tuple(int(s) for s in v.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError('list of integers expected: {}'.format(v))


class ArgumentParser(argparse.ArgumentParser):
    """
    Argument parser raising configuration error on invalid arguments.
    """
    def error(self, message):
        raise ConfigError(message)


def create_parser():
    """
    Create command line argument parser.
    """
    parser = ArgumentParser(
        prog='retropt',
        description='retropt - reactive trajectory optimization toolkit'
    )
    parser.add_argument(
        '-v', '--verbose', action='store_true', help='show progress messages'
    )
    parser.add_argument(
        '--debug', action='store_true', help='show debug messages'
    )
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    def common(p):
        p.add_argument('--config', help='scenario configuration file')
        p.add_argument('--seed', type=int, help='random generator seed')
        p.add_argument('--out', help='output directory')
        p.add_argument(
            '--format', choices=('csv', 'json'), help='output format'
        )
        return p

    p = common(sub.add_parser('run', help='run scenario'))
    p.add_argument('--replay', help='observation CSV file (t, y1..yd, noise)')

    p = common(sub.add_parser('benchmark', help='computation time benchmark'))
    p.add_argument(
        '--ns', type=_ints, default=(4, 13, 32), help='state dimensions'
    )
    p.add_argument(
        '--horizons', type=_ints, default=(50, 100, 200), help='horizons'
    )
    p.add_argument(
        '--repeats', type=int,
        help='number of measurements, 20 by default'
    )

    p = common(sub.add_parser('sweep-horizon', help='planning horizon sweep'))
    p.add_argument(
        '--horizons', type=_ints, default=(10, 20, 50, 100, 200, 500, 1000),
        help='horizons'
    )

    p = common(sub.add_parser('check-bounds', help='check bounds'))
    p.add_argument(
        '--count', type=int, default=1000,
        help='number of random desirability systems'
    )
    p.add_argument(
        '--scenarios', type=int, default=10,
        help='number of scenarios per horizon'
    )
    return parser


def load_config(args):
    """
    Create scenario configuration from command line arguments.
    """
    config = parse_config(args.config) if args.config else default_config()
    if args.seed is not None:
        config = config._replace(
            scenario=config.scenario._replace(seed=args.seed)
        )
    changes = {}
    if args.out:
        changes['dir'] = args.out
    if args.format:
        changes['format'] = args.format
    if changes:
        config = config._replace(output=config.output._replace(**changes))
    return validate(config)


def cmd_run(args, config):
    observations = None
    if args.replay:
        observations = scenario.read_observations(args.replay)

    out = config.output
    sinks = ()
    log = None
    try:
        if out.event_log:
            path = os.path.join(out.dir, 'events.jsonl')
            os.makedirs(out.dir, exist_ok=True)
            log = open(path, 'w')
            sinks = (lambda method: output.event_writer(log, method),)
        reports = scenario.run_scenario(config, observations, sinks=sinks)
    except OSError as ex:
        raise EngineError('cannot write event log: {}'.format(ex)) from None
    finally:
        if log is not None:
            log.close()

    path = os.path.join(out.dir, 'report.{}'.format(out.format))
    output.serialize_report(list(reports.values()), out.format, path)

    for r in reports.values():
        print('{:14s} error {:10.6f}  cost {:14.6f}  events {:3d}'.format(
            r.method, r.final_error, r.total_cost, len(r.events)
        ))


def _write_table(rows, config, name):
    out = config.output
    path = os.path.join(out.dir, '{}.{}'.format(name, out.format))
    rows = list(rows)
    f = output.open_output(path)
    with f:
        if out.format == 'json':
            output.dump_json(rows, f, indent=2)
        else:
            writer = output.csv_writer(f)
            for row in rows:
                writer.send(row)
    logger.info('table saved in {}'.format(path))
    return path


def cmd_benchmark(args, config):
    bench = config.benchmark
    repeats = bench.repeats if args.repeats is None else args.repeats
    if repeats < 1:
        raise ConfigError('--repeats: has to be positive')
    records = regret.complexity_benchmark(
        args.ns, args.horizons, config.scenario.seed, repeats=repeats,
        min_time=bench.min_time, opts=config.retro,
    )
    _write_table(output.complexity_rows(records), config, 'benchmark')
    for method, s in regret.benchmark_slopes(records).items():
        print('{:14s} slope n {}  slope T {}'.format(method, s['n'], s['T']))


def cmd_sweep(args, config):
    rows = regret.horizon_sweep(
        regret.shrinking_template, args.horizons, config.scenario.seed,
        config.solver,
    )
    bounds = {T: alpha_bound(T) + math.log(T) for T in args.horizons}
    _write_table(output.sweep_rows(rows, bounds), config, 'sweep')
    for k, v in regret.sweep_trends(rows).items():
        print('{:18s} {}'.format(k, v))


def cmd_check_bounds(args, config):
    result = regret.bound_sweep(
        config.scenario.seed, args.count, scenarios=args.scenarios
    )
    print(output.dump_json(result, indent=2))


COMMANDS = {
    'run': cmd_run,
    'benchmark': cmd_benchmark,
    'sweep-horizon': cmd_sweep,
    'check-bounds': cmd_check_bounds,
}


def main(argv=None):
    """
    Run retropt command.

    Exit code is returned.

    :param argv: Command line arguments, `sys.argv[1:]` by default.
    """
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as ex:
        parser.print_usage(sys.stderr)
        print('retropt: error: {}'.format(ex), file=sys.stderr)
        return 1

    level = logging.WARN
    if args.verbose:
        level = logging.INFO
    if args.debug:
        level = logging.DEBUG
    logging.basicConfig(level=level)

    try:
        config = load_config(args)
        COMMANDS[args.command](args, config)
    except ConfigError as ex:
        print('retropt: configuration error: {}'.format(ex), file=sys.stderr)
        return 1
    except EngineError as ex:
        print('retropt: {}'.format(ex), file=sys.stderr)
        return 2
    return 0


# vim: sw=4:et:ai
