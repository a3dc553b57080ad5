"""ARIMA(p,d,q) with automatic order selection and Gaussian quantiles.

Fitting maximizes the exact Gaussian likelihood of the differenced
series through a state-space innovation filter (the conditional
sum-of-squares recursion is used only to warm-start the optimizer).
Orders are chosen by a stepwise neighborhood search over (p, q) with
AICc as the criterion, after picking d from repeated KPSS
level-stationarity tests.  Predictive quantiles come from the Gaussian
forecast distribution, with per-step variances accumulated from the
MA(infinity) weights through the integration steps.

Stationarity and invertibility are enforced structurally: the optimizer
works on unconstrained numbers that map through tanh to partial
autocorrelations and then through the Levinson recursion to
coefficients, so every visited parameter vector has AR and MA roots
outside the unit circle.  A fit that pushes against that boundary is
flagged in its statistics rather than rejected.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import _kernels
from .data import DailySeries
from .errors import FitError, ForecastError, HorizonbenchError
from .forecast import QUANTILE_LEVELS, ForecasterSpec, QuantileForecast

#: 5% critical value of the KPSS level-stationarity statistic.
KPSS_CRITICAL_5PCT = 0.463

#: Standard-normal quantiles for the nine decimal levels, to 12 digits.
Z_SCORES = {
    0.1: -1.281551565545,
    0.2: -0.841621233573,
    0.3: -0.524400512708,
    0.4: -0.253347103136,
    0.5: 0.0,
    0.6: 0.253347103136,
    0.7: 0.524400512708,
    0.8: 0.841621233573,
    0.9: 1.281551565545,
}

DEFAULT_P_MAX = 5
DEFAULT_Q_MAX = 5
MAX_D = 2

#: Optimizer budget: simplex iteration cap and log-likelihood tolerance.
MAX_ITER = 500
LOGLIK_TOL = 1e-8

#: (p, q) pairs the stepwise search starts from.
STEPWISE_STARTS = ((0, 0), (1, 0), (0, 1), (2, 2))


@dataclass(frozen=True)
class ArimaOrder:
    p: int
    d: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0 or self.d < 0:
            raise FitError("orders must be non-negative")
        if self.d > MAX_D:
            raise FitError(f"differencing order capped at {MAX_D}")

    def label(self) -> str:
        return f"({self.p},{self.d},{self.q})"


@dataclass(frozen=True)
class ArimaParams:
    """Fitted coefficients of the differenced-scale ARMA equation.

    The model is w_t = intercept + sum_i phi[i] w_{t-i}
    + sum_j theta[j] e_{t-j} + e_t with e_t ~ N(0, sigma2), where w is
    the d-differenced series.
    """

    phi: tuple[float, ...]
    theta: tuple[float, ...]
    sigma2: float
    intercept: float

    @property
    def mean(self) -> float:
        """Stationary mean of the differenced series."""
        return self.intercept / (1.0 - sum(self.phi))


@dataclass(frozen=True)
class FitStats:
    log_likelihood: float
    aicc: float
    n_obs: int
    converged: bool
    near_boundary: bool

    def describe(self) -> str:
        flags = []
        if not self.converged:
            flags.append("no-conv")
        if self.near_boundary:
            flags.append("near-boundary")
        suffix = f" [{','.join(flags)}]" if flags else ""
        return f"loglik={self.log_likelihood:.3f} aicc={self.aicc:.3f}{suffix}"


def difference(values, d: int) -> np.ndarray:
    """Apply d rounds of first differencing."""
    arr = np.asarray(values, dtype=float)
    if d < 0:
        raise FitError("differencing order must be >= 0")
    if arr.size <= d:
        raise FitError("series shorter than differencing order")
    return np.diff(arr, n=d) if d else arr.copy()


def kpss_statistic(values, lags: int | None = None) -> float:
    """KPSS level-stationarity statistic with a Bartlett long-run variance.

    The lag truncation defaults to floor(4 * (n/100)^(1/4)).
    """
    x = np.asarray(values, dtype=float)
    n = x.size
    if n < 2:
        raise FitError("KPSS needs at least two observations")
    if lags is None:
        lags = int(4.0 * (n / 100.0) ** 0.25)
    e = x - x.mean()
    s = np.cumsum(e)
    lrv = float(np.mean(e * e))
    for h in range(1, min(lags, n - 1) + 1):
        gamma_h = float(np.sum(e[h:] * e[:-h])) / n
        lrv += 2.0 * (1.0 - h / (lags + 1.0)) * gamma_h
    lrv = max(lrv, 1e-300)
    return float(np.sum(s * s) / (n * n * lrv))


def select_d(values) -> int:
    """Smallest d in {0,1,2} whose differenced series tests stationary.

    A series that still rejects at d=2 is treated as d=2; further
    differencing is never helpful for these horizons.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size < 20:
        raise FitError("insufficient data for stationarity test")
    for d in range(MAX_D + 1):
        if kpss_statistic(difference(arr, d)) < KPSS_CRITICAL_5PCT:
            return d
    return MAX_D


def _pacs_to_coeffs(pacs: np.ndarray) -> np.ndarray:
    """Levinson recursion: partial autocorrelations to AR coefficients."""
    coeffs: list[float] = []
    for pk in pacs:
        coeffs = [c - pk * coeffs[len(coeffs) - 1 - j] for j, c in enumerate(coeffs)]
        coeffs.append(float(pk))
    return np.asarray(coeffs)


def _sample_pacf(x: np.ndarray, nlags: int) -> np.ndarray:
    """Sample partial autocorrelations via Durbin-Levinson on the ACF."""
    n = x.size
    xc = x - x.mean()
    denom = float(np.sum(xc * xc))
    if denom <= 0:
        return np.zeros(nlags)
    rho = np.array(
        [1.0] + [float(np.sum(xc[h:] * xc[:-h])) / denom for h in range(1, nlags + 1)]
    )
    pacf = np.zeros(nlags)
    a = np.zeros(nlags + 1)
    v = 1.0
    for k in range(1, nlags + 1):
        acc = rho[k] - sum(a[j] * rho[k - j] for j in range(1, k))
        pk = acc / v if v > 1e-12 else 0.0
        pk = float(np.clip(pk, -0.98, 0.98))
        new_a = a.copy()
        new_a[k] = pk
        for j in range(1, k):
            new_a[j] = a[j] - pk * a[k - j]
        a = new_a
        v *= 1.0 - pk * pk
        pacf[k - 1] = pk
    return pacf


def _decode(vector: np.ndarray, p: int, q: int, intercept: bool):
    """Unconstrained optimizer vector to (phi, theta, mu)."""
    pac_ar = np.tanh(vector[:p])
    pac_ma = np.tanh(vector[p : p + q])
    phi = _pacs_to_coeffs(pac_ar) if p else np.zeros(0)
    theta = -_pacs_to_coeffs(pac_ma) if q else np.zeros(0)
    mu = float(vector[p + q]) if intercept else 0.0
    return phi, theta, mu


def _state_space(phi: np.ndarray, theta: np.ndarray):
    """Companion-form transition and innovation covariance for ARMA."""
    p, q = phi.size, theta.size
    r = max(p, q + 1)
    T = np.zeros((r, r))
    T[:p, 0] = phi
    for i in range(r - 1):
        T[i, i + 1] = 1.0
    R = np.zeros(r)
    R[0] = 1.0
    R[1 : q + 1] = theta
    return T, np.outer(R, R)


def _stationary_cov(T: np.ndarray, Q: np.ndarray) -> np.ndarray:
    r = T.shape[0]
    eye = np.eye(r * r)
    P0 = np.linalg.solve(eye - np.kron(T, T), Q.ravel()).reshape(r, r)
    return 0.5 * (P0 + P0.T)


_BAD = 1e10


def _neg_loglik(z: np.ndarray, phi: np.ndarray, theta: np.ndarray, mu: float) -> float:
    """Negative concentrated Gaussian log-likelihood (constants dropped)."""
    x = z - mu
    T, Q = _state_space(phi, theta)
    try:
        P0 = _stationary_cov(T, Q)
    except np.linalg.LinAlgError:
        return _BAD
    sum_log_f, sum_v2f, ok = _kernels.arma_innovation_stats(x, T, Q, P0)
    n = x.size
    if not ok or sum_v2f <= 0 or not math.isfinite(sum_log_f + sum_v2f):
        return _BAD
    return 0.5 * n * math.log(sum_v2f / n) + 0.5 * sum_log_f


def _neg_css(z: np.ndarray, phi: np.ndarray, theta: np.ndarray, mu: float, p: int) -> float:
    e = _kernels.css_residuals(z - mu, phi, theta)
    tail = e[p:]
    if tail.size == 0:
        return _BAD
    sse = float(np.sum(tail * tail))
    if sse <= 0 or not math.isfinite(sse):
        return _BAD
    return 0.5 * tail.size * math.log(sse / tail.size)


def fit(
    values,
    order: ArimaOrder,
    include_intercept: bool | None = None,
) -> tuple[ArimaParams, FitStats]:
    """Maximum-likelihood fit of one (p,d,q) candidate.

    The intercept (a mean on the differenced scale, i.e. drift once
    d >= 1) is included by default for d <= 1 and dropped for d = 2.
    AICc counts it along with the ARMA coefficients and sigma2.
    """
    arr = np.asarray(values, dtype=float)
    p, d, q = order.p, order.d, order.q
    if p > DEFAULT_P_MAX or q > DEFAULT_Q_MAX:
        raise FitError(f"order {order.label()} exceeds search bounds")
    if arr.size < 10 + p + q + d:
        raise FitError(
            f"insufficient context: need >= {10 + p + q + d} values for "
            f"{order.label()}, have {arr.size}"
        )
    if include_intercept is None:
        include_intercept = d <= 1

    w = difference(arr, d)
    n = w.size
    sd = float(np.std(w))
    if sd <= 0.0:
        raise FitError("degenerate variance: differenced series is constant")
    offset = float(np.mean(w)) if include_intercept else 0.0
    z = (w - offset) / sd

    n_params = p + q + (1 if include_intercept else 0)
    converged = True
    if n_params == 0:
        best_vec = np.zeros(0)
    else:
        init = np.zeros(n_params)
        if p:
            pacs = np.clip(_sample_pacf(z, p), -0.9, 0.9)
            init[:p] = np.arctanh(pacs)

        def css_objective(vec):
            phi, theta, mu = _decode(vec, p, q, include_intercept)
            return _neg_css(z, phi, theta, mu, p)

        warm = optimize.minimize(
            css_objective,
            init,
            method="Nelder-Mead",
            options={"maxiter": 200, "xatol": 1e-4, "fatol": 1e-4},
        )
        start = warm.x if math.isfinite(warm.fun) and warm.fun < _BAD else init

        def objective(vec):
            phi, theta, mu = _decode(vec, p, q, include_intercept)
            return _neg_loglik(z, phi, theta, mu)

        result = optimize.minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={"maxiter": MAX_ITER, "xatol": 1e-6, "fatol": LOGLIK_TOL},
        )
        if not math.isfinite(result.fun) or result.fun >= _BAD:
            raise FitError(f"fit failed for {order.label()}: likelihood degenerate")
        best_vec = result.x
        converged = bool(result.success)

    phi, theta, mu_std = _decode(best_vec, p, q, include_intercept)
    x = z - mu_std
    T, Q = _state_space(phi, theta)
    sum_log_f, sum_v2f, ok = _kernels.arma_innovation_stats(x, T, Q, _stationary_cov(T, Q))
    if not ok:
        raise FitError(f"fit failed for {order.label()}: filter degenerate")
    sigma2_std = sum_v2f / n
    loglik = (
        -0.5 * n * math.log(2.0 * math.pi)
        - 0.5 * n
        - 0.5 * n * math.log(sigma2_std)
        - 0.5 * sum_log_f
        - n * math.log(sd)
    )
    sigma2 = sigma2_std * sd * sd
    if sigma2 <= 0 or not math.isfinite(sigma2):
        raise FitError("degenerate variance")
    mu_real = offset + mu_std * sd if include_intercept else 0.0
    intercept = mu_real * (1.0 - float(np.sum(phi)))

    k = p + q + 1 + (1 if include_intercept else 0)
    if n - k - 1 <= 0:
        aicc = math.inf
    else:
        aicc = -2.0 * loglik + 2.0 * k + 2.0 * k * (k + 1.0) / (n - k - 1.0)

    params = ArimaParams(
        tuple(float(v) for v in phi),
        tuple(float(v) for v in theta),
        float(sigma2),
        float(intercept),
    )
    _assert_roots_outside(params)
    stats = FitStats(
        log_likelihood=float(loglik),
        aicc=float(aicc),
        n_obs=n,
        converged=converged,
        near_boundary=bool(_min_root_modulus(params) < 1.005),
    )
    return params, stats


def _ar_roots(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if phi.size == 0:
        return np.array([])
    return np.roots(np.concatenate(([1.0], -phi))[::-1])


def _ma_roots(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        return np.array([])
    return np.roots(np.concatenate(([1.0], theta))[::-1])


def _min_root_modulus(params: ArimaParams) -> float:
    mods = [abs(r) for r in _ar_roots(params.phi)] + [abs(r) for r in _ma_roots(params.theta)]
    return min(mods) if mods else math.inf


def _assert_roots_outside(params: ArimaParams) -> None:
    if _min_root_modulus(params) <= 1.0:
        raise FitError("fit failed: roots inside the unit circle")


def _fallback_d(arr: np.ndarray) -> int:
    """Variance-comparison choice of d for series too short to test."""
    if arr.size < 3:
        return 0
    return 1 if np.var(np.diff(arr)) < np.var(arr) else 0


def auto_fit(
    values,
    p_max: int = DEFAULT_P_MAX,
    q_max: int = DEFAULT_Q_MAX,
) -> tuple[ArimaOrder, ArimaParams, FitStats]:
    """Stepwise order search: start set, then +-1 moves on p and q.

    d comes from :func:`select_d` (or a variance heuristic when the
    series is too short for the test).  Candidates are accepted only on
    strictly lower AICc and the search stops at a local minimum, so the
    result is never worse than the best start-set member.
    """
    arr = np.asarray(values, dtype=float)
    d = select_d(arr) if arr.size >= 20 else _fallback_d(arr)

    cache: dict[tuple[int, int], tuple[ArimaParams, FitStats] | None] = {}

    def try_fit(p: int, q: int):
        key = (p, q)
        if key not in cache:
            try:
                cache[key] = fit(arr, ArimaOrder(p, d, q))
            except HorizonbenchError:
                cache[key] = None
        return cache[key]

    best: tuple[int, int] | None = None
    best_aicc = math.inf
    for p, q in STEPWISE_STARTS:
        if p > p_max or q > q_max:
            continue
        fitted = try_fit(p, q)
        if fitted is not None and fitted[1].aicc < best_aicc:
            best, best_aicc = (p, q), fitted[1].aicc
    if best is None:
        raise FitError("auto fit failed: every start-set candidate failed")

    while True:
        p, q = best
        candidates = [(p + 1, q), (p - 1, q), (p, q + 1), (p, q - 1)]
        move = None
        move_aicc = best_aicc
        for cp, cq in candidates:
            if not (0 <= cp <= p_max and 0 <= cq <= q_max):
                continue
            fitted = try_fit(cp, cq)
            if fitted is not None and fitted[1].aicc < move_aicc:
                move, move_aicc = (cp, cq), fitted[1].aicc
        if move is None:
            break
        best, best_aicc = move, move_aicc

    params, stats = cache[best]  # type: ignore[misc]
    return ArimaOrder(best[0], d, best[1]), params, stats


def _psi_weights(params: ArimaParams, order: ArimaOrder, horizon: int) -> np.ndarray:
    """MA(infinity) weights of the ARIMA, integrated d times."""
    phi = np.asarray(params.phi)
    theta = np.asarray(params.theta)
    psi = np.zeros(horizon)
    psi[0] = 1.0
    for j in range(1, horizon):
        acc = theta[j - 1] if j - 1 < theta.size else 0.0
        for i in range(1, min(j, phi.size) + 1):
            acc += phi[i - 1] * psi[j - i]
        psi[j] = acc
    for _ in range(order.d):
        psi = np.cumsum(psi)
    return psi


def predict_quantiles(
    params: ArimaParams,
    order: ArimaOrder,
    context,
    horizon_days: int,
    start_date: dt.date,
) -> QuantileForecast:
    """Gaussian predictive quantiles from a fitted model and its context.

    The point path iterates the ARMA recursion on the differenced scale
    (future innovations zero, past ones from the conditional residual
    recursion) and is re-integrated; sigma_h accumulates the integrated
    MA(infinity) weights.  Rows are clamped at zero on emission.
    """
    if horizon_days < 1:
        raise ForecastError("insufficient horizon")
    arr = np.asarray(context, dtype=float)
    p, d, q = order.p, order.d, order.q
    if arr.size <= d or difference(arr, d).size < max(p, q, 1):
        raise ForecastError("insufficient context for prediction")

    levels = [arr]
    for _ in range(d):
        levels.append(np.diff(levels[-1]))
    w = levels[-1]
    mu = params.mean
    phi = np.asarray(params.phi)
    theta = np.asarray(params.theta)

    x = w - mu
    e = _kernels.css_residuals(x, phi, theta)
    n = x.size
    xf = np.concatenate([x, np.zeros(horizon_days)])
    ef = np.concatenate([e, np.zeros(horizon_days)])
    for h in range(horizon_days):
        t = n + h
        acc = 0.0
        for i in range(p):
            acc += phi[i] * xf[t - 1 - i]
        for j in range(q):
            if t - 1 - j >= 0:
                acc += theta[j] * ef[t - 1 - j]
        xf[t] = acc
    path = xf[n:] + mu
    # undo the differencing from the innermost level outward
    for level in reversed(levels[:-1]):
        path = level[-1] + np.cumsum(path)

    psi = _psi_weights(params, order, horizon_days)
    sigma_h = np.sqrt(params.sigma2 * np.cumsum(psi * psi))
    rows = np.empty((len(QUANTILE_LEVELS), horizon_days))
    for i, tau in enumerate(QUANTILE_LEVELS):
        rows[i] = path + Z_SCORES[tau] * sigma_h
    return QuantileForecast(start_date, np.clip(rows, 0.0, None))


def forecast_arima(
    spec: ForecasterSpec, context: DailySeries, horizon_days: int
) -> tuple[QuantileForecast, str]:
    """Auto-fit on the context, predict, and report fit diagnostics."""
    p_max = int(spec.parameters.get("p_max", DEFAULT_P_MAX))
    q_max = int(spec.parameters.get("q_max", DEFAULT_Q_MAX))
    order, params, stats = auto_fit(context.values, p_max=p_max, q_max=q_max)
    start = context.end_date + dt.timedelta(days=1)
    qf = predict_quantiles(params, order, context.values, horizon_days, start)
    diag = (
        f"order={order.label()} "
        f"phi={np.round(params.phi, 4).tolist()} "
        f"theta={np.round(params.theta, 4).tolist()} "
        f"intercept={params.intercept:.4f} sigma2={params.sigma2:.4f} "
        f"{stats.describe()}"
    )
    return qf, diag
