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
Report serialization tests.
"""

import csv
import io
import json
import os.path
import tempfile

import numpy as np

from retropt.adjust import ShiftEvent, ExecutedStep
from retropt.belief import gaussian
from retropt.config import default_config
from retropt.error import EngineError
from retropt.output import TABLE_COLUMNS, REPORT_COLUMNS, dumps, loads, \
    serialize_report, csv_writer, event_writer, complexity_rows, \
    sweep_rows, report_row
from retropt.regret import ComplexityRecord, SweepRow
from retropt.scenario import RunReport

import unittest


def _event(t=5):
    return ShiftEvent(
        t, 0.2, gaussian([0.0, 1.0], 0.1), gaussian([0.1, 1.2], 0.05),
        12.5, 0.3, 150.0, False,
    )


def _report(method='retro', events=None, error=None):
    regret = {
        'bound': 5.3, 'total_regret': 1.5, 'max_regret': 0.4,
        'violations': [3], 'dv_m': -0.1, 'm': 4,
    }
    return RunReport(
        default_config(), method, 0, 1, 0.01, 2.5,
        [_event()] if events is None else events,
        {'initial': 0.1, 'events': 0.001, 'total': 0.101}, regret, True,
        error,
    )



class ReportTestCase(unittest.TestCase):
    """
    Run report serialization tests.
    """
    def test_json(self):
        """
        Test run report JSON serialization
        """
        report = _report()
        data = json.loads(dumps([report]))
        self.assertEqual('retro', data[0]['method'])
        self.assertEqual(1, data[0]['version'])
        self.assertEqual(200, data[0]['config']['scenario']['horizon'])
        self.assertEqual([0.1, 1.2], data[0]['events'][0]['posterior_mean'])

        result = loads(dumps([report]))[0]
        self.assertEqual(report.config, result.config)
        self.assertEqual(report.regret, result.regret)
        event = result.events[0]
        self.assertEqual(5, event.t)
        self.assertTrue(np.array_equal([0.1, 1.2], event.posterior.mean))
        self.assertTrue(np.allclose(0.05 * np.eye(2), event.posterior.cov))


    def test_json_not_a_number(self):
        """
        Test run report JSON serialization of not a number values
        """
        event = _event()._replace(condition=float('nan'))
        report = _report('multirun_ddp', events=[event])._replace(
            final_error=float('nan')
        )
        text = dumps([report])

        def reject(v):
            raise ValueError('non-finite value {}'.format(v))

        data = json.loads(text, parse_constant=reject)
        self.assertIsNone(data[0]['final_error'])
        self.assertIsNone(data[0]['events'][0]['condition'])

        result = loads(text)[0]
        self.assertTrue(np.isnan(result.final_error))
        self.assertTrue(np.isnan(result.events[0].condition))
        self.assertEqual(2.5, result.total_cost)


    def test_missing_field(self):

        """
        Test parsing report with missing field
        """
        data = json.loads(dumps([_report()]))
        del data[0]['method']
        self.assertRaises(EngineError, loads, json.dumps(data))


    def test_row(self):
        """
        Test CSV row of failed run report
        """
        report = _report('oracle', events=[], error='failed')._replace(
            regret=None, timings={}
        )
        row = report_row(report)
        self.assertEqual(len(REPORT_COLUMNS), len(row))
        self.assertEqual('oracle', row[0])
        self.assertEqual('', row[6])
        self.assertEqual('failed', row[-1])


    def test_serialize(self):
        """
        Test saving run reports in JSON and CSV files
        """
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'out', 'report.csv')
            serialize_report([_report(), _report('oracle')], 'csv', path)
            with open(path, newline='') as f:
                rows = list(csv.reader(f))
            self.assertEqual(list(REPORT_COLUMNS), rows[0])
            self.assertEqual(['retro', 'oracle'], [r[0] for r in rows[1:]])
            self.assertEqual('1', rows[1][REPORT_COLUMNS.index('violations')])

            path = os.path.join(tmp, 'report.json')
            serialize_report([_report()], 'json', path)
            with open(path) as f:
                self.assertEqual(1, len(loads(f.read())))

            self.assertRaises(
                EngineError, serialize_report, [], 'xml',
                os.path.join(tmp, 'report.xml')
            )



class TableTestCase(unittest.TestCase):
    """
    Regret analysis table tests.
    """
    def test_csv_writer(self):
        """
        Test writing table rows with missing columns
        """
        f = io.StringIO()
        writer = csv_writer(f)
        writer.send({'T': 10, 'method': 'retro', 'cost_diff': 0.5})
        lines = f.getvalue().splitlines()
        self.assertEqual(','.join(TABLE_COLUMNS), lines[0])
        self.assertEqual('10,,retro,,,0.5,,,,', lines[1])


    def test_complexity_rows(self):
        """
        Test computation time table rows
        """
        records = [ComplexityRecord('retro', 50, 4, 2, 1e-4, 2e-3, 1)]
        row = list(complexity_rows(records))[0]
        self.assertEqual('retro', row['method'])
        self.assertAlmostEqual(100.0, row['event_time_us'])
        self.assertAlmostEqual(2000.0, row['total_time_us'])


    def test_sweep_rows(self):
        """
        Test horizon sweep table rows
        """
        rows = [SweepRow(10, 0.5, 1.5, True)]
        row = list(sweep_rows(rows, {10: 2.4}))[0]
        self.assertEqual(2.4, row['bound'])
        self.assertEqual(0.5, row['cost_diff'])



class EventWriterTestCase(unittest.TestCase):
    """
    Shift event log tests.
    """
    def test_event_writer(self):
        """
        Test writing shift events of executed steps
        """
        f = io.StringIO()
        writer = event_writer(f, 'retro')
        writer.send(ExecutedStep(4, np.zeros(4), np.zeros(2), None))
        writer.send(ExecutedStep(5, np.zeros(4), np.zeros(2), _event()))

        lines = f.getvalue().splitlines()
        self.assertEqual(1, len(lines))
        data = json.loads(lines[0])
        self.assertEqual(5, data['t'])
        self.assertEqual('retro', data['method'])
        self.assertFalse(data['failed'])


    def test_event_writer_not_a_number(self):
        """
        Test writing shift event of multirun DDP into event log
        """
        f = io.StringIO()
        writer = event_writer(f, 'multirun_ddp')
        event = _event()._replace(condition=np.float64('nan'))
        writer.send(ExecutedStep(5, np.zeros(4), np.zeros(2), event))
        data = json.loads(f.getvalue())
        self.assertIsNone(data['condition'])
        self.assertEqual(0.2, data['kl'])


# vim: sw=4:et:ai

