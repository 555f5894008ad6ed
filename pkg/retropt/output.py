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
Report serialization functions and coroutines.

The run reports are saved in JSON or CSV format. The regret analysis
tables (computation time benchmark and horizon sweep) are saved in CSV
format with columns

T
    Horizon.
n
    State dimension.
method
    Method name.
event_time_us
    Time to calculate new control sequence of a shift event [us].
total_time_us
    Total time to calculate final control sequence [us].
cost_diff
    Cost difference of fine-tuned and oracle controls.
total_regret
    Sum of regret values.
bound
    Regret bound.
violations
    Number of time steps with regret over bound.
flags
    Measurement flags separated with semicolon, `batched` if a call was
    too fast to measure and `failed` if the calculation failed.

Empty value means the column does not apply to a row. Floating point
values are written with shortest representation, which is read back
without loss of precision.

The shift events are appended to JSON-lines event log while a scenario
runs.
"""

from collections import OrderedDict
import csv
import json
import logging
import math
import os.path

import numpy as np

from .config import config_to_dict, config_from_dict
from .error import EngineError
from .flow import coroutine
from .scenario import RunReport
from .adjust import ShiftEvent
from .belief import GaussianBelief

logger = logging.getLogger(__name__)

TABLE_COLUMNS = (
    'T', 'n', 'method', 'event_time_us', 'total_time_us', 'cost_diff',
    'total_regret', 'bound', 'violations', 'flags',
)

REPORT_COLUMNS = (
    'method', 'seed', 'version', 'final_error', 'total_cost', 'events',
    'initial_time', 'total_time', 'total_regret', 'bound', 'violations',
    'converged', 'error',
)


def _plain(v):
    """
    Convert value into JSON compatible value.

    Non-finite floating point numbers are converted to `None`.
    """
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return OrderedDict((k, _plain(x)) for k, x in v.items())
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def _float(v):
    return float('nan') if v is None else v


def dump_json(data, f=None, **kw):
    """
    Serialize data into strict JSON.

    Non-finite floating point numbers are written as `null`. String is
    returned if file object is not specified.

    :param data: Data to serialize.
    :param f: Optional file object.
    """
    data = _plain(data)
    if f is None:
        return json.dumps(data, allow_nan=False, **kw)
    json.dump(data, f, allow_nan=False, **kw)


def event_to_dict(event):
    """
    Convert shift event into dictionary.
    """
    return OrderedDict([
        ('t', event.t),
        ('kl', _plain(event.kl)),
        ('prior_mean', _plain(event.prior.mean)),
        ('prior_cov', _plain(event.prior.cov)),
        ('posterior_mean', _plain(event.posterior.mean)),
        ('posterior_cov', _plain(event.posterior.cov)),
        ('condition', _plain(event.condition)),
        ('du_norm', _plain(event.du_norm)),
        ('time_us', _plain(event.time_us)),
        ('failed', event.failed),
    ])


def event_from_dict(data):
    """
    Create shift event from dictionary.
    """
    return ShiftEvent(
        data['t'], _float(data['kl']),
        GaussianBelief(np.array(data['prior_mean']), np.array(data['prior_cov'])),
        GaussianBelief(
            np.array(data['posterior_mean']), np.array(data['posterior_cov'])
        ),
        _float(data['condition']), _float(data['du_norm']),
        _float(data['time_us']), data['failed'],
    )


def report_to_dict(report):
    """
    Convert run report into dictionary.
    """
    return OrderedDict([
        ('version', report.version),
        ('method', report.method),
        ('seed', report.seed),
        ('config', _plain(config_to_dict(report.config))),
        ('final_error', _plain(report.final_error)),
        ('total_cost', _plain(report.total_cost)),
        ('converged', report.converged),
        ('error', report.error),
        ('events', [event_to_dict(e) for e in report.events]),
        ('timings', _plain(report.timings)),
        ('regret', _plain(report.regret)),
    ])


def report_from_dict(data):
    """
    Create run report from dictionary.
    """
    try:
        return RunReport(
            config_from_dict(data['config']), data['method'], data['seed'],
            data['version'], _float(data['final_error']),
            _float(data['total_cost']),
            [event_from_dict(e) for e in data['events']], data['timings'],
            data['regret'], data['converged'], data['error'],
        )
    except KeyError as ex:
        raise EngineError('Missing report field {}'.format(ex)) from None


def dumps(reports):
    """
    Serialize run reports into JSON string.

    Not a number values are written as `null`.

    :param reports: List of run reports.
    """
    return dump_json([report_to_dict(r) for r in reports], indent=2)


def loads(data):
    """
    Parse run reports from JSON string.
    """
    return [report_from_dict(r) for r in json.loads(data)]


def _num(v):
    if v is None:
        return ''
    if isinstance(v, float) and math.isnan(v):
        return 'nan'
    return v


def report_row(report):
    """
    Create CSV row of run report.
    """
    regret = report.regret or {}
    timings = report.timings
    violations = regret.get('violations')
    return [
        report.method, report.seed, report.version, report.final_error,
        report.total_cost, len(report.events), _num(timings.get('initial')),
        _num(timings.get('total')), _num(regret.get('total_regret')),
        _num(regret.get('bound')),
        '' if violations is None else len(violations),
        int(report.converged), report.error or '',
    ]


def open_output(path):
    try:
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
        return open(path, 'w', newline='')
    except OSError as ex:
        raise EngineError('cannot write {}: {}'.format(path, ex.strerror)) from None


def serialize_report(reports, fmt, path):
    """
    Save run reports in a file.

    :param reports: List of run reports.
    :param fmt: File format, `json` or `csv`.
    :param path: Output file path.
    """
    if fmt not in ('json', 'csv'):
        raise EngineError('Unknown format {}'.format(fmt))
    with open_output(path) as f:
        if fmt == 'json':
            f.write(dumps(reports))
            f.write('\n')
        else:
            fcsv = csv.writer(f)
            fcsv.writerow(REPORT_COLUMNS)
            for r in reports:
                fcsv.writerow(report_row(r))
    logger.info('reports saved in {}'.format(path))
    return path


@coroutine
def csv_writer(f, target=None):
    """
    Write regret analysis table rows into a CSV file.

    A row is dictionary, missing columns are written as empty values.

    :param f: File object.
    :param target: Optional coroutine to forward rows to.
    """
    fcsv = csv.writer(f)
    fcsv.writerow(TABLE_COLUMNS)

    while True:
        row = yield
        fcsv.writerow([_num(row.get(c)) for c in TABLE_COLUMNS])

        if target:
            target.send(row)


def complexity_rows(records):
    """
    Convert computation time measurements into table rows.
    """
    for r in records:
        yield {
            'T': r.T, 'n': r.n, 'method': r.method,
            'event_time_us': r.event_time * 1e6,
            'total_time_us': r.total_time * 1e6,
            'flags': ';'.join(r.flags),
        }


def sweep_rows(rows, bounds):
    """
    Convert horizon sweep rows into table rows.

    :param rows: Horizon sweep rows.
    :param bounds: Dictionary of horizon and regret bound.
    """
    for r in rows:
        yield {
            'T': r.T, 'method': 'retro', 'cost_diff': r.cost_diff,
            'total_regret': r.total_regret, 'bound': bounds[r.T],
        }


@coroutine
def event_writer(f, method):
    """
    Append shift events of executed steps to JSON-lines event log.

    :param f: File object.
    :param method: Method name.
    """
    while True:
        step = yield
        if step.event is None:
            continue
        data = event_to_dict(step.event)
        data['method'] = method
        f.write(dump_json(data))
        f.write('\n')
        f.flush()


# vim: sw=4:et:ai
