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
Gaussian mixture forecaster.

Target position observations are modeled with mixture of ballistic
regressions. Component `k` is

    .. math::

        y = \\Phi(\\tau) \\theta_k + g(\\tau) + \\epsilon

        \\Phi(\\tau) = [I, \\tau I]

where :math:`\\theta_k` is launch state of the component (position and
velocity), :math:`g(\\tau)` is gravity term and :math:`\\epsilon` is
Gaussian noise :math:`N(0, \\sigma_k^2 I)`.

The mixture is fitted with EM algorithm. Initial responsibilities are
found by splitting residuals of single ballistic fit along their principal
component, then seeded random restarts are performed and the fit with best
log-likelihood is kept.

The fitted mixture is projected on each time step of the horizon to
obtain belief trajectory with per-step Gaussian mixtures.
"""

from collections import namedtuple
import logging

import numpy as np
from scipy.special import logsumexp

from ..belief import BeliefTrajectory, GaussianMixture, floor_cov, \
    predictive_weights
from ..error import EngineError
from .. import const

logger = logging.getLogger(__name__)

GMMFit = namedtuple(
    'GMMFit',
    'weights theta theta_covs sigma2 resp loglik_history degenerate'
)
GMMFit.__doc__ = """
Mixture of ballistic regressions.

:var weights: Component weights, array of size K.
:var theta: Component launch states, array of shape (K, 2d).
:var theta_covs: Covariances of launch states, array of shape (K, 2d, 2d).
:var sigma2: Component residual variances, array of size K.
:var resp: Responsibilities of observations, array of shape (N, K).
:var loglik_history: Log-likelihood after each EM iteration.
:var degenerate: True if variance floor or empty component was hit.
"""


def _design(observations, dt, gravity):
    """
    Create design matrices, gravity terms and data of observations.
    """
    y = np.array([np.asarray(o.y, dtype=float) for o in observations])
    d = y.shape[1]
    tau = np.array([o.t * dt for o in observations])
    I = np.eye(d)
    phi = np.array([np.hstack([I, s * I]) for s in tau])
    g = np.zeros_like(y)
    g[:, -1] = -0.5 * gravity * tau ** 2
    return phi, g, y


def _m_step(phi, g, y, resp, prev):
    N, d, p = phi.shape
    K = resp.shape[1]
    weights, theta, covs, sigma2 = prev
    weights, theta, covs, sigma2 = weights.copy(), theta.copy(), \
        covs.copy(), sigma2.copy()
    degenerate = False

    nk = resp.sum(axis=0)
    for k in range(K):
        if nk[k] < const.VARIANCE_FLOOR * N:
            degenerate = True
            weights[k] = nk[k] / N
            continue

        sw = np.sqrt(resp[:, k])
        A = (sw[:, None, None] * phi).reshape(-1, p)
        b = (sw[:, None] * (y - g)).reshape(-1)
        theta[k] = np.linalg.lstsq(A, b, rcond=None)[0]

        res = y - g - phi @ theta[k]
        s2 = (resp[:, k] * (res ** 2).sum(axis=1)).sum() / (d * nk[k])
        if s2 < const.VARIANCE_FLOOR:
            degenerate = True
            s2 = const.VARIANCE_FLOOR
        sigma2[k] = s2
        covs[k] = s2 * np.linalg.pinv(A.T @ A)
        weights[k] = nk[k] / N

    weights = weights / weights.sum()
    return (weights, theta, covs, sigma2), degenerate


def _e_step(phi, g, y, params):
    weights, theta, _, sigma2 = params
    d = y.shape[1]
    lp = np.empty((len(y), len(weights)))
    for k in range(len(weights)):
        res = y - g - phi @ theta[k]
        with np.errstate(divide='ignore'):
            lw = np.log(weights[k])
        lp[:, k] = lw - 0.5 * (res ** 2).sum(axis=1) / sigma2[k] \
            - 0.5 * d * np.log(2 * np.pi * sigma2[k])
    norm = logsumexp(lp, axis=1)
    return np.exp(lp - norm[:, None]), norm.sum()


def _em(phi, g, y, resp, max_iters, tol):
    N, d, p = phi.shape
    K = resp.shape[1]
    params = (
        np.full(K, 1 / K), np.zeros((K, p)), np.zeros((K, p, p)), np.ones(K)
    )
    history = []
    degenerate = False
    for i in range(max_iters):
        params, dg = _m_step(phi, g, y, resp, params)
        degenerate = degenerate or dg
        resp, loglik = _e_step(phi, g, y, params)
        history.append(loglik)
        if i > 0 and abs(history[-1] - history[-2]) < tol * (1 + abs(loglik)):
            break
    return params, resp, history, degenerate


def _initial_resp(phi, g, y, K):
    """
    Split observations into `K` groups with quantiles of single fit
    residuals projected on their principal component.
    """
    N = len(y)
    A = phi.reshape(-1, phi.shape[2])
    theta = np.linalg.lstsq(A, (y - g).reshape(-1), rcond=None)[0]
    res = y - g - phi @ theta
    res = res - res.mean(axis=0)
    _, _, vt = np.linalg.svd(res, full_matrices=False)
    score = res @ vt[0]

    resp = np.zeros((N, K))
    labels = np.minimum(
        (np.argsort(np.argsort(score)) * K) // N, K - 1
    )
    resp[np.arange(N), labels] = 1
    return resp


def fit_gmm(observations, K, dt, gravity=const.GRAVITY, seed=0,
        restarts=const.GMM_RESTARTS, max_iters=const.GMM_ITERS,
        tol=const.GMM_TOL):
    """
    Fit mixture of ballistic regressions to target observations.

    :param observations: List of observations.
    :param K: Number of mixture components.
    :param dt: Time step [s].
    :param gravity: Gravitational acceleration along last axis.
    :param seed: Random generator seed of restarts.
    :param restarts: Number of random restarts.
    :param max_iters: Maximum number of EM iterations.
    :param tol: Relative log-likelihood convergence tolerance.
    """
    if K < 1:
        raise EngineError('Number of components has to be positive')
    if len(observations) < K:
        raise EngineError(
            'At least {} observations required, got {}'
            .format(K, len(observations))
        )

    phi, g, y = _design(observations, dt, gravity)
    starts = [_initial_resp(phi, g, y, K)]
    if K > 1:
        rng = np.random.default_rng(seed)
        starts.extend(
            rng.dirichlet(np.ones(K), size=len(y)) for _ in range(restarts)
        )

    best = None
    for resp in starts:
        fit = _em(phi, g, y, resp, max_iters, tol)
        if best is None or fit[2][-1] > best[2][-1]:
            best = fit

    params, resp, history, degenerate = best
    weights, theta, covs, sigma2 = params
    if degenerate:
        logger.warning('gmm: degenerate component, variance floor applied')
    if __debug__:
        logger.debug(
            'gmm: K={}, log-likelihood {:.6g}, iterations {}'
            .format(K, history[-1], len(history))
        )
    return GMMFit(weights, theta, covs, sigma2, resp, history, degenerate)


def project(fit, T, dt, gravity=const.GRAVITY):
    """
    Project mixture of ballistic regressions on time steps `0..T`.

    A tuple of per-step Gaussian mixtures is returned.

    :param fit: Mixture of ballistic regressions.
    :param T: Horizon.
    :param dt: Time step [s].
    :param gravity: Gravitational acceleration along last axis.
    """
    p = fit.theta.shape[1]
    d = p // 2
    I = np.eye(d)
    mixture = []
    for t in range(T + 1):
        s = t * dt
        phi = np.hstack([I, s * I])
        g = np.zeros(d)
        g[-1] = -0.5 * gravity * s ** 2
        means = fit.theta @ phi.T + g
        covs = np.array([
            floor_cov(phi @ C @ phi.T + s2 * I)
            for C, s2 in zip(fit.theta_covs, fit.sigma2)
        ])
        mixture.append(GaussianMixture(fit.weights, means, covs))
    return tuple(mixture)


def _moments(mix):
    mean = mix.weights @ mix.means
    dm = mix.means - mean
    cov = np.einsum('k,kij->ij', mix.weights, mix.covs) \
        + np.einsum('k,ki,kj->ij', mix.weights, dm, dm)
    return mean, floor_cov(cov)


def forecast_gmm(observations, K, T, dt, gravity=const.GRAVITY, seed=0,
        prior=None):
    """
    Forecast belief trajectory of a target with Gaussian mixture.

    The per-step means and covariances of the belief trajectory are moment
    matched to the mixtures. If prior belief trajectory is given, then
    weights of the trajectory are its predictive weights.

    :param observations: List of observations.
    :param K: Number of mixture components.
    :param T: Horizon.
    :param dt: Time step [s].
    :param gravity: Gravitational acceleration along last axis.
    :param seed: Random generator seed.
    :param prior: Optional prior belief trajectory.
    """
    fit = fit_gmm(observations, K, dt, gravity, seed)
    mixture = project(fit, T, dt, gravity)
    means, covs = zip(*(_moments(m) for m in mixture))
    belief = BeliefTrajectory(
        np.array(means), np.array(covs), None, None, None, None, mixture,
        tuple(observations)
    )
    weights = predictive_weights(belief if prior is None else prior, belief)
    return belief._replace(weights=weights)


# vim: sw=4:et:ai
