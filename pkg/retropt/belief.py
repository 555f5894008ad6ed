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
Belief engine.

A belief trajectory is per-step probability distribution over position of
a moving target. The default forecaster is linear-Gaussian ballistic
model with state :math:`s = [p, v]` (position and velocity)

    .. math::

        s_{k+1} = F s_k + c + w_k

        F = [[I, dt I], [0, I]]

where offset :math:`c` applies gravity along last axis of target space and
:math:`w_k` is white acceleration noise. Observations of target position
condition the future belief trajectory with Kalman update.

Distribution shift between posterior and prior belief at a time step is
measured with Kullback-Leibler divergence. It has closed form for
Gaussian beliefs

    >>> p = gaussian(1.0, 4.0)
    >>> q = gaussian(0.0, 1.0)
    >>> round(kl_gaussian(p, q), 6)
    1.306853

and is estimated with seeded Monte-Carlo sampling if a Gaussian mixture is
involved (see :py:mod:`retropt.alt.gmm`).
"""

from collections import namedtuple
import logging

import numpy as np
import scipy.linalg
from scipy.special import logsumexp
from scipy.stats import multivariate_normal

from .error import EngineError, DimensionError, SingularError
from .ft import symmetrize
from . import const

logger = logging.getLogger(__name__)

GaussianBelief = namedtuple('GaussianBelief', 'mean cov')
GaussianBelief.__doc__ = """
Gaussian belief over target position.

:var mean: Mean, array of size d.
:var cov: Covariance, array of shape (d, d).
"""

GaussianMixture = namedtuple('GaussianMixture', 'weights means covs')
GaussianMixture.__doc__ = """
Gaussian mixture belief over target position.

:var weights: Component weights, array of size K.
:var means: Component means, array of shape (K, d).
:var covs: Component covariances, array of shape (K, d, d).
"""

Observation = namedtuple('Observation', 't y noise')
Observation.__doc__ = """
Observation of target position.

:var t: Time step.
:var y: Observed position, array of size d.
:var noise: Standard deviation of observation noise.
"""

Motion = namedtuple('Motion', 'F offset Q H dt gravity floor')
Motion.__doc__ = """
Linear-Gaussian ballistic motion model.

:var F: Transition matrix.
:var offset: Constant term of transition (gravity).
:var Q: Process noise covariance.
:var H: Observation matrix.
:var dt: Time step [s].
:var gravity: Gravitational acceleration [m/s^2].
:var floor: Variance floor of target position belief.
"""


class BeliefTrajectory(namedtuple('BeliefTrajectory',
        'means covs weights states state_covs motion mixture history')):
    """
    Belief trajectory over target position for time steps `0..T`.

    :var means: Belief means, array of shape (T + 1, d).
    :var covs: Belief covariances, array of shape (T + 1, d, d).
    :var weights: Normalized scalar weights :math:`p(o_t)`.
    :var states: Motion state means or null for mixture forecast.
    :var state_covs: Motion state covariances or null.
    :var motion: Motion model or null.
    :var mixture: Tuple of per-step Gaussian mixtures or null.
    :var history: Tuple of observations applied to the trajectory.
    """
    __slots__ = ()

    @property
    def horizon(self):
        return len(self.means) - 1


    @property
    def dim(self):
        return self.means.shape[1]


    def belief(self, t):
        """
        Get Gaussian belief (moment matched for mixtures) at step `t`.
        """
        return GaussianBelief(self.means[t], self.covs[t])


    def components(self, t):
        """
        Get belief at step `t` as Gaussian mixture.

        Gaussian belief is returned as single component mixture.
        """
        if self.mixture is None:
            return GaussianMixture(
                np.ones(1), self.means[t][None], self.covs[t][None]
            )
        return self.mixture[t]



def gaussian(mean, cov):
    """
    Create Gaussian belief from scalar or array values.

    :param mean: Scalar mean or mean vector.
    :param cov: Scalar variance or covariance matrix.
    """
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    cov = np.asarray(cov, dtype=float)
    if cov.ndim < 2:
        cov = np.diag(np.broadcast_to(cov, mean.shape))
    return GaussianBelief(mean, cov)


def floor_cov(cov, floor=const.VARIANCE_FLOOR):
    """
    Floor eigenvalues of covariance matrix.

    :param cov: Covariance matrix.
    :param floor: Smallest allowed eigenvalue.
    """
    cov = symmetrize(np.asarray(cov, dtype=float))
    w, v = np.linalg.eigh(cov)
    if w.min() >= floor:
        return cov
    if __debug__:
        logger.debug('variance floor applied, min eigenvalue {}'.format(w.min()))
    return symmetrize((v * np.maximum(w, floor)) @ v.T)


def ballistic_motion(d, dt, gravity=const.GRAVITY, process_noise=0.0,
        floor=const.VARIANCE_FLOOR):
    """
    Create ballistic motion model.

    :param d: Dimension of target space.
    :param dt: Time step [s].
    :param gravity: Gravitational acceleration along last axis.
    :param process_noise: Variance of white acceleration noise.
    :param floor: Variance floor of target position belief.
    """
    if dt <= 0:
        raise EngineError('Time step has to be positive, got {}'.format(dt))

    I = np.eye(d)
    Z = np.zeros((d, d))
    F = np.block([[I, dt * I], [Z, I]])
    offset = np.zeros(2 * d)
    offset[d - 1] = -0.5 * gravity * dt ** 2
    offset[2 * d - 1] = -gravity * dt
    Q = process_noise * np.block([
        [dt ** 4 / 4 * I, dt ** 3 / 2 * I],
        [dt ** 3 / 2 * I, dt ** 2 * I],
    ])
    H = np.hstack([I, Z])
    return Motion(F, offset, Q, H, dt, gravity, floor)


def _propagate(motion, states, covs, start):
    for k in range(start, len(states) - 1):
        states[k + 1] = motion.F @ states[k] + motion.offset
        covs[k + 1] = symmetrize(motion.F @ covs[k] @ motion.F.T + motion.Q)


def _from_states(states, covs, motion, history):
    d = motion.H.shape[0]
    means = states[:, :d].copy()
    pcovs = np.array([floor_cov(P[:d, :d], motion.floor) for P in covs])
    return BeliefTrajectory(
        means, pcovs, None, states, covs, motion, None, history
    )


def ballistic_prior(launch_mean, launch_cov, gravity, dt, T, process_noise=0.0,
        floor=const.VARIANCE_FLOOR):
    """
    Create prior belief trajectory of a thrown target.

    :param launch_mean: Mean of launch state (position and velocity).
    :param launch_cov: Covariance of launch state (scalar, diagonal or
        matrix).
    :param gravity: Gravitational acceleration along last axis.
    :param dt: Time step [s].
    :param T: Horizon.
    :param process_noise: Variance of white acceleration noise.
    :param floor: Variance floor of target position belief.
    """
    launch_mean = np.asarray(launch_mean, dtype=float)
    k = len(launch_mean)
    if k % 2:
        raise DimensionError(
            'Launch state has to contain position and velocity, got size {}'
            .format(k)
        )
    motion = ballistic_motion(k // 2, dt, gravity, process_noise, floor)

    P0 = np.asarray(launch_cov, dtype=float)
    if P0.ndim < 2:
        P0 = np.diag(np.broadcast_to(P0, (k,)))
    if P0.shape != (k, k):
        raise DimensionError('Launch covariance shape {}'.format(P0.shape))

    states = np.empty((T + 1, k))
    covs = np.empty((T + 1, k, k))
    states[0] = launch_mean
    covs[0] = symmetrize(P0)
    _propagate(motion, states, covs, 0)

    belief = _from_states(states, covs, motion, ())
    return belief._replace(weights=predictive_weights(belief, belief))


def observe_and_update(belief, obs):
    """
    Condition future belief trajectory on an observation.

    The state belief at observation time step is updated with Kalman
    update and propagated with motion model to the end of the horizon.
    Belief at earlier time steps is kept.

    The weights of the new trajectory are predictive weights of the input
    belief trajectory, see :py:func:`predictive_weights`.

    :param belief: Belief trajectory.
    :param obs: Observation.
    """
    if belief.states is None:
        raise EngineError('Kalman update requires ballistic belief trajectory')

    T = belief.horizon
    t = obs.t
    if not 0 <= t <= T:
        raise EngineError('Observation at {} outside of horizon {}'.format(t, T))
    if belief.history and t < belief.history[-1].t:
        raise EngineError(
            'Observation at {} after observation at {}'
            .format(t, belief.history[-1].t)
        )

    y = np.asarray(obs.y, dtype=float)
    H = belief.motion.H
    d = H.shape[0]
    if y.shape != (d,):
        raise DimensionError(
            'Observation dimension {} does not match belief ({})'
            .format(y.shape, d)
        )
    if obs.noise < 0:
        raise EngineError('Negative observation noise {}'.format(obs.noise))

    states = belief.states.copy()
    covs = belief.state_covs.copy()
    s, P = states[t], covs[t]

    S = H @ P @ H.T + obs.noise ** 2 * np.eye(d)
    try:
        cf = scipy.linalg.cho_factor(S)
    except np.linalg.LinAlgError:
        raise SingularError(
            'Singular innovation covariance at step {}'.format(t)
        ) from None

    K = scipy.linalg.cho_solve(cf, H @ P).T
    states[t] = s + K @ (y - H @ s)
    covs[t] = symmetrize(P - K @ H @ P)
    _propagate(belief.motion, states, covs, t)

    posterior = _from_states(states, covs, belief.motion, belief.history + (obs,))
    if __debug__:
        logger.debug(
            'belief update at {}: terminal variance {:.6g}'
            .format(t, np.trace(posterior.covs[T]))
        )
    return posterior._replace(weights=predictive_weights(belief, posterior))


def _mixture_logpdf(mix, x):
    """
    Calculate log density of Gaussian mixture at points `x`.
    """
    lp = [
        np.log(w) + multivariate_normal.logpdf(x, m, c)
        for w, m, c in zip(mix.weights, mix.means, mix.covs) if w > 0
    ]
    return logsumexp(lp, axis=0)


def _gaussian_logpdf(means, covs, x):
    """
    Calculate log densities of a series of Gaussian distributions at a
    series of points.
    """
    L = np.linalg.cholesky(covs)
    r = np.linalg.solve(L, (x - means)[..., None])[..., 0]
    logdet = np.log(np.diagonal(L, axis1=1, axis2=2)).sum(axis=1)
    d = means.shape[1]
    return -0.5 * (r ** 2).sum(axis=1) - logdet - 0.5 * d * np.log(2 * np.pi)


def predictive_weights(prior, posterior):
    """
    Calculate normalized weights :math:`p(o_t)` of a belief trajectory.

    The weight of a time step is prior predictive density evaluated at
    posterior mean, normalized over the horizon.

    :param prior: Prior belief trajectory.
    :param posterior: Posterior belief trajectory.
    """
    if prior.means.shape != posterior.means.shape:
        raise DimensionError('Belief trajectories do not match')

    if prior.mixture is None:
        lp = _gaussian_logpdf(prior.means, prior.covs, posterior.means)
    else:
        lp = np.array([
            _mixture_logpdf(prior.components(t), posterior.means[t])
            for t in range(prior.horizon + 1)
        ])
    w = np.exp(lp - logsumexp(lp))
    w = np.maximum(w, const.WEIGHT_FLOOR)
    w = w / w.sum()
    assert np.all(np.isfinite(w)), w
    return w


def _logdet(cf):
    return 2 * np.sum(np.log(np.diag(cf[0])))


def kl_gaussian(p, q):
    """
    Calculate Kullback-Leibler divergence :math:`KL(p || q)` of Gaussian
    beliefs.

    :param p: Gaussian belief.
    :param q: Gaussian belief.
    """
    mp, mq = np.atleast_1d(p.mean), np.atleast_1d(q.mean)
    if mp.shape != mq.shape:
        raise DimensionError(
            'Beliefs of dimensions {} and {}'.format(mp.shape, mq.shape)
        )
    cp, cq = np.atleast_2d(p.cov), np.atleast_2d(q.cov)
    try:
        fp = scipy.linalg.cho_factor(cp, lower=True)
        fq = scipy.linalg.cho_factor(cq, lower=True)
    except np.linalg.LinAlgError:
        raise SingularError('Non-positive variance of Gaussian belief') from None

    d = len(mp)
    dm = mq - mp
    tr = np.trace(scipy.linalg.cho_solve(fq, cp))
    quad = dm @ scipy.linalg.cho_solve(fq, dm)
    kl = 0.5 * (tr + quad - d + _logdet(fq) - _logdet(fp))
    return max(float(kl), 0.0)


def kl_mixture(p, q, samples=const.MC_SAMPLES, seed=0):
    """
    Estimate Kullback-Leibler divergence :math:`KL(p || q)` of Gaussian
    mixtures with Monte-Carlo sampling.

    A tuple of estimate and its standard error is returned.

    :param p: Gaussian mixture.
    :param q: Gaussian mixture.
    :param samples: Number of samples.
    :param seed: Random generator seed.
    """
    if p.means.shape[1] != q.means.shape[1]:
        raise DimensionError('Mixtures of different dimensions')

    rng = np.random.default_rng(seed)
    counts = rng.multinomial(samples, p.weights / p.weights.sum())
    x = np.concatenate([
        rng.multivariate_normal(m, c, size=k)
        for m, c, k in zip(p.means, p.covs, counts) if k > 0
    ])
    r = np.atleast_1d(_mixture_logpdf(p, x) - _mixture_logpdf(q, x))
    return r.mean(), r.std(ddof=1) / np.sqrt(len(r))


def kl_shift(posterior, prior, t, samples=const.MC_SAMPLES, seed=0):
    """
    Calculate distribution shift between posterior and prior belief at
    time step `t`.

    :param posterior: Posterior belief trajectory.
    :param prior: Prior belief trajectory.
    :param t: Time step.
    :param samples: Number of Monte-Carlo samples for mixture beliefs.
    :param seed: Random generator seed for mixture beliefs.
    """
    if posterior.dim != prior.dim:
        raise DimensionError(
            'Belief dimensions {} and {}'.format(posterior.dim, prior.dim)
        )
    if posterior.mixture is None and prior.mixture is None:
        return kl_gaussian(posterior.belief(t), prior.belief(t))

    kl, _ = kl_mixture(
        posterior.components(t), prior.components(t), samples, seed
    )
    return max(float(kl), 0.0)


def alpha_bound(T):
    """
    Calculate bound :math:`1/T + 1/T^2` of distribution shift per time step.

    >>> round(alpha_bound(10), 12)
    0.11

    :param T: Horizon, `T >= 1`.
    """
    if T < 1:
        raise EngineError('Horizon has to be positive, got {}'.format(T))
    return 1 / T + 1 / T ** 2


def shrinking_shift(T):
    """
    Create pair of posterior and prior Gaussian beliefs with distribution
    shift decreasing with horizon.

    The posterior is :math:`N(1/T, (1 + 1/T)^2)` and prior is
    :math:`N(0, 1)`.

    :param T: Horizon.
    """
    return gaussian(1 / T, (1 + 1 / T) ** 2), gaussian(0.0, 1.0)


# vim: sw=4:et:ai
