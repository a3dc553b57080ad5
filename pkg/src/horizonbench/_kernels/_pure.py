"""Pure-Python kernels, interchangeable with the compiled extension.

These are the reference implementations of the two sequential loops the
ARMA fitter evaluates thousands of times per fit.  The compiled module
(`_native`) mirrors them exactly; either backend must produce the same
numbers to near machine precision.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "pure"


def arma_innovation_stats(x, T, Q, P0):
    """One Kalman-filter pass over a centered ARMA series.

    Runs the state-space innovation filter with unit innovation variance
    and returns ``(sum_log_F, sum_v2_over_F, ok)``, the two sufficient
    statistics of the variance-concentrated Gaussian likelihood.  ``ok``
    is False when a prediction variance degenerates.

    Parameters are the transition matrix ``T`` (companion form), the
    innovation covariance ``Q = R R'`` and the stationary initial state
    covariance ``P0``; the observation picks the first state element.
    """
    x = np.asarray(x, dtype=float)
    T = np.asarray(T, dtype=float)
    Q = np.asarray(Q, dtype=float)
    P = np.asarray(P0, dtype=float).copy()
    r = T.shape[0]
    a = np.zeros(r)

    sum_log_f = 0.0
    sum_v2f = 0.0
    for t in range(x.shape[0]):
        v = x[t] - a[0]
        f = P[0, 0]
        if not math.isfinite(f) or f < 1e-12:
            return 0.0, 0.0, False
        sum_log_f += math.log(f)
        sum_v2f += v * v / f
        k = T @ P[:, 0] / f
        a = T @ a + k * v
        P = T @ P @ T.T + Q - np.outer(k, k) * f
        P = 0.5 * (P + P.T)
    return sum_log_f, sum_v2f, True


def css_residuals(x, phi, theta):
    """Conditional one-step residuals of a centered ARMA recursion.

    e[t] = x[t] - sum_i phi[i] x[t-1-i] - sum_j theta[j] e[t-1-j], with
    the first ``p`` residuals fixed at zero (conditioning on the first
    ``p`` observations) and pre-sample residuals treated as zero.
    """
    x = np.asarray(x, dtype=float)
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    n = x.shape[0]
    p = phi.shape[0]
    q = theta.shape[0]
    e = np.zeros(n)
    for t in range(p, n):
        acc = x[t]
        for i in range(p):
            acc -= phi[i] * x[t - 1 - i]
        for j in range(q):
            if t - 1 - j >= 0:
                acc -= theta[j] * e[t - 1 - j]
        e[t] = acc
    return e
