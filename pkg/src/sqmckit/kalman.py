"""Exact Kalman filter for the linear-Gaussian benchmark model.

Model: X_0 ~ N(0, I), X_t = F X_{t-1} + V_t, Y_t = X_t + W_t with unit
process and observation noise.  Covariance updates use the Joseph form
to keep the recursion symmetric over long horizons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class KalmanResult:
    means: np.ndarray      # (T+1, d) filtered means
    covs: np.ndarray       # (T+1, d, d) filtered covariances
    log_likelihood: np.ndarray  # (T+1,) cumulative log p(y_{0:t})


def _gauss_logpdf(y, mean, cov):
    d = y.shape[0]
    chol = np.linalg.cholesky(cov)
    z = np.linalg.solve(chol, y - mean)
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    return -0.5 * (d * np.log(2.0 * np.pi) + logdet + z @ z)


def kalman_filter(F, y_series):
    """Filtered moments and exact log-likelihood for observations y_series.

    Parameters
    ----------
    F : (d, d) transition matrix.
    y_series : (T+1, d) observations.
    """
    F = np.atleast_2d(np.asarray(F, dtype=np.float64))
    y_series = np.atleast_2d(np.asarray(y_series, dtype=np.float64))
    if not np.all(np.isfinite(y_series)):
        raise ValueError("non-finite observation")
    d = F.shape[0]
    eye = np.eye(d)

    mean = np.zeros(d)
    cov = eye.copy()
    means, covs, loglik = [], [], []
    total = 0.0
    for t, y in enumerate(y_series):
        if t > 0:
            mean = F @ mean
            cov = F @ cov @ F.T + eye
        s = cov + eye
        total += _gauss_logpdf(y, mean, s)
        k = np.linalg.solve(s.T, cov.T).T
        mean = mean + k @ (y - mean)
        a = eye - k
        cov = a @ cov @ a.T + k @ k.T
        cov = 0.5 * (cov + cov.T)
        means.append(mean.copy())
        covs.append(cov.copy())
        loglik.append(total)
    return KalmanResult(np.array(means), np.array(covs), np.array(loglik))
