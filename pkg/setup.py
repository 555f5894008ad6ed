#!/usr/bin/env python3
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

from setuptools import setup, find_packages

import retropt

setup(
    name='retropt',
    version=retropt.__version__,
    description='retropt - reactive trajectory optimization toolkit',
    author='retropt developers',
    packages=find_packages('.'),
    scripts=('bin/retropt',),
    include_package_data=True,
    long_description=\
"""\
retropt is Python library to experiment with fine-tuning of differential
dynamic programming solutions, when belief of a moving target shifts
during execution of a control sequence.
""",
    classifiers=[
        'License :: OSI Approved :: GNU General Public License v3 or later (GPLv3+)',
        'Programming Language :: Python :: 3',
        'Development Status :: 3 - Alpha',
    ],
    keywords='trajectory optimization ddp control interception',
    license='GPL',
    install_requires=['numpy', 'scipy'],
    test_suite='nose.collector',
)

# vim: sw=4:et:ai
