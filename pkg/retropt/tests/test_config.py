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
Scenario configuration tests.
"""

import os
import os.path
import tempfile

from retropt.config import SCHEMA, default_config, validate, parse_config, \
    config_to_dict, config_from_dict
from retropt.error import ConfigError
from retropt import const

import unittest
from unittest import mock


class ConfigTestCase(unittest.TestCase):
    """
    Scenario configuration tests.
    """
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()


    def tearDown(self):
        self.tmp.cleanup()


    def _write(self, text):
        path = os.path.join(self.tmp.name, 'scenario.ini')
        with open(path, 'w') as f:
            f.write(text)
        return path


    def test_default(self):
        """
        Test default configuration
        """
        config = validate(default_config())
        self.assertEqual(200, config.scenario.horizon)
        self.assertEqual(0.01, config.scenario.dt)
        self.assertEqual('double_integrator_2d', config.model.name)
        self.assertEqual(const.KL_THRESHOLD, config.retro.threshold)
        self.assertEqual('ballistic', config.belief.forecaster)


    def test_output_env(self):
        """
        Test output directory from environment
        """
        with mock.patch.dict(os.environ, {const.OUTPUT_DIR_ENV: '/tmp/x'}):
            config = default_config()
        self.assertEqual('/tmp/x', config.output.dir)


    def test_parse(self):
        """
        Test reading configuration file
        """
        path = self._write(
            '[scenario]\nhorizon = 50\nlaunch_velocity = -1.0, 3.0\n'
            '[model]\nname = two_link_arm\nW_f = 200\nu_max = none\n'
            '[solver]\nfull_ddp = yes\n'
            '[retro]\ngradient = fd\n'
        )
        config = parse_config(path)
        self.assertEqual(50, config.scenario.horizon)
        self.assertEqual((-1.0, 3.0), config.scenario.launch_velocity)
        self.assertEqual('two_link_arm', config.model.name)
        self.assertEqual(200.0, config.model.W_f)
        self.assertIsNone(config.model.u_max)
        self.assertTrue(config.solver.full_ddp)
        self.assertEqual('fd', config.retro.gradient)
        # defaults are kept
        self.assertEqual(0.01, config.scenario.dt)


    def test_missing_file(self):
        """
        Test reading missing configuration file
        """
        path = os.path.join(self.tmp.name, 'missing.ini')
        self.assertRaises(ConfigError, parse_config, path)


    def test_syntax_error(self):
        """
        Test reading configuration file with syntax error
        """
        path = self._write('horizon = 50\n')
        self.assertRaises(ConfigError, parse_config, path)


    def test_unknown_section(self):
        """
        Test unknown section of configuration file
        """
        path = self._write('[plot]\ncolor = red\n')
        self.assertRaises(ConfigError, parse_config, path)


    def test_unknown_key(self):
        """
        Test unknown key of configuration file
        """
        path = self._write('[scenario]\nduration = 1\n')
        with self.assertRaises(ConfigError) as ctx:
            parse_config(path)
        self.assertIn('duration', str(ctx.exception))


    def test_invalid_value(self):
        """
        Test invalid values of configuration file
        """
        for text in ('[scenario]\nhorizon = many\n',
                '[model]\nname = pendulum\n',
                '[output]\nevent_log = maybe\n'):
            path = self._write(text)
            self.assertRaises(ConfigError, parse_config, path)


    def test_validation(self):
        """
        Test validation of configuration values
        """
        config = default_config()
        for section, key, value in (('scenario', 'horizon', 0),
                ('scenario', 'dt', -0.1),
                ('scenario', 'launch_velocity', (1.0,)),
                ('scenario', 'velocity_shift', -0.5),
                ('scenario', 'process_noise', -1.0),
                ('model', 'W', -1.0),
                ('model', 'W_f', -1.0),
                ('model', 'R', 0.0),
                ('model', 'sigma', -0.1),
                ('model', 'u_max', 0.0),
                ('solver', 'tol', 0.0),
                ('solver', 'reg_down', 1.5),
                ('belief', 'variance_floor', 0.0),
                ('retro', 'threshold', -1.0),
                ('retro', 'clamp', 0.0),
                ('retro', 'ridge', -1e-9),
                ('retro', 'cond_max', 1.0),
                ('retro', 'fd_step', 0.0),
                ('benchmark', 'repeats', 0)):
            values = getattr(config, section)._replace(**{key: value})
            invalid = config._replace(**{section: values})
            with self.assertRaises(ConfigError) as ctx:
                validate(invalid)
            self.assertIn('[{}] {}'.format(section, key), str(ctx.exception))


    def test_defaults(self):
        """
        Test default configuration values of numeric constants
        """
        config = default_config()
        expected = (
            ('solver', 'max_iters', const.DDP_MAX_ITERS),
            ('solver', 'tol', const.DDP_TOL),
            ('solver', 'reg_init', const.REG_INIT),
            ('solver', 'reg_min', const.REG_MIN),
            ('solver', 'reg_max', const.REG_MAX),
            ('solver', 'reg_up', const.REG_UP),
            ('solver', 'reg_down', const.REG_DOWN),
            ('solver', 'ls_steps', const.LINE_SEARCH_STEPS),
            ('solver', 'ls_accept', const.LINE_SEARCH_ACCEPT),
            ('belief', 'gravity', const.GRAVITY),
            ('belief', 'samples', const.MC_SAMPLES),
            ('belief', 'variance_floor', const.VARIANCE_FLOOR),
            ('retro', 'threshold', const.KL_THRESHOLD),
            ('retro', 'clamp', const.DL_CLAMP),
            ('retro', 'ridge', const.RIDGE),
            ('retro', 'cond_max', const.COND_MAX),
            ('retro', 'fd_step', const.FD_GRAD_STEP),
            ('benchmark', 'repeats', const.BENCH_REPEATS),
            ('benchmark', 'min_time', const.BENCH_MIN_TIME),
        )
        for section, key, value in expected:
            self.assertEqual(value, getattr(getattr(config, section), key))

        # every key of the schema is set
        data = config_to_dict(config)
        for section, (_, fields) in SCHEMA.items():
            self.assertEqual(set(fields), set(data[section]))


    def test_parse_numeric(self):
        """
        Test reading numeric safeguards from configuration file
        """
        path = self._write(
            '[belief]\nvariance_floor = 1e-10\n'
            '[retro]\nclamp = 20\nridge = 1e-6\ncond_max = 1e10\nfd_step = 1e-3\n'
            '[benchmark]\nrepeats = 3\nmin_time = 0\n'
        )
        config = parse_config(path)
        self.assertEqual(1e-10, config.belief.variance_floor)
        self.assertEqual(
            (20.0, 1e-6, 1e10, 1e-3),
            (config.retro.clamp, config.retro.ridge, config.retro.cond_max,
                config.retro.fd_step)
        )
        self.assertEqual(3, config.benchmark.repeats)
        self.assertEqual(0.0, config.benchmark.min_time)



    def test_dict(self):
        """
        Test configuration conversion into dictionary and back
        """
        config = default_config()
        data = config_to_dict(config)
        self.assertEqual(200, data['scenario']['horizon'])
        self.assertEqual(config, config_from_dict(data))


    def test_dict_unknown(self):
        """
        Test configuration from dictionary with unknown keys
        """
        self.assertRaises(ConfigError, config_from_dict, {'plot': {}})
        self.assertRaises(
            ConfigError, config_from_dict, {'scenario': {'duration': 1}}
        )


# vim: sw=4:et:ai
