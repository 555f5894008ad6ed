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
retropt data flow processing functions and coroutines.

The online session produces a stream of executed steps. The stream can be
fanned to coroutine sinks, for example a shift event log writer.
"""

from functools import wraps


def coroutine(func):
    """
    Decorator for a coroutine function.

    Advances a coroutine to its first ``(yield)`` statement.
    """
    @wraps(func)
    def start(*args, **kwargs):
        cr = func(*args, **kwargs)
        next(cr)
        return cr
    return start


@coroutine
def split(*targets):
    """
    Coroutine to receive a value and send it to all target coroutines.

    :param targets: List of target coroutines.
    """
    while True:
        v = yield
        for c in targets:
            c.send(v)


@coroutine
def collect(items):
    """
    Coroutine appending all received values to a list.

    :param items: List to append values to.
    """
    while True:
        items.append((yield))


def sender(gen, *factories):
    """
    Decorate generator `gen` to send all its data to coroutines created by
    functions specified by `factories` list.

    The coroutines are created when the decorated generator is started.

    :param gen: Data generator.
    :param factories: List of functions creating coroutines.
    """
    @wraps(gen)
    def _send(*a, **kw):
        t = split(*[c() for c in factories])
        for v in gen(*a, **kw):
            t.send(v)
            yield v
    return _send


# vim: sw=4:et:ai
