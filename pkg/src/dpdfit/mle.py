"""Maximum-likelihood initializers for every model family.

The descent runs start from the MLE of the (possibly contaminated)
sample: closed forms for the normal and inverse normal families, a
safeguarded Newton root for the Gompertz shape, and restarted EM for the
two-component mixture.  All return parameters in the unconstrained
coordinates of the corresponding model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import (
    VARIANCE_FLOOR,
    Gompertz,
    GompertzParams,
    InverseNormal,
    InverseNormalParams,
    MixtureParams,
    Normal1D,
    NormalMixture2,
    NormalParams,
)


@dataclass(frozen=True)
class NewtonConfig:
    max_iter: int = 100
    tol: float = 1e-10
    bracket: tuple = (1e-4, 20.0)


def mle_normal(data):
    """Sample mean and (1/n) variance, mapped to unconstrained coords."""
    x = np.asarray(getattr(data, "points", data), dtype=float)
    if x.shape[0] < 2:
        raise ValueError("need at least two observations")
    mu = float(x.mean())
    var = float(x.var())
    if var <= 0:
        raise ValueError("zero-variance sample")
    return Normal1D().from_natural(NormalParams(mu=mu, sigma=float(np.sqrt(var))))


def mle_isonormal(data):
    """Componentwise sample mean of a d-variate sample."""
    x = np.asarray(getattr(data, "points", data), dtype=float)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("need a nonempty (n, d) sample")
    return x.mean(axis=0)


def mle_inverse_normal(data):
    """Closed-form MLE: mu = mean, lam = 1 / mean(1/x - 1/mu)."""
    x = np.asarray(getattr(data, "points", data), dtype=float)
    if x.shape[0] < 2:
        raise ValueError("need at least two observations")
    if np.any(x <= 0):
        raise ValueError("inverse normal requires strictly positive data")
    mu = float(x.mean())
    denom = float((1.0 / x).mean() - 1.0 / mu)
    if denom <= 0:
        raise ValueError("degenerate sample: shape denominator is not positive")
    return InverseNormal().from_natural(InverseNormalParams(mu=mu, lam=1.0 / denom))


def newton_bisection(f_df, lo, hi, tol=1e-10, max_iter=100):
    """Root of a scalar function bracketed in [lo, hi].

    Takes Newton steps from ``f_df(x) -> (f, df)`` and falls back to
    bisection whenever the step leaves the bracket or stalls, so a root
    is found for any bracketed sign change.
    """
    flo, _ = f_df(lo)
    fhi, _ = f_df(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise ValueError("no sign change inside the bracket")
    x = 0.5 * (lo + hi)
    dx_old = abs(hi - lo)
    dx = dx_old
    f, df = f_df(x)
    for _ in range(max_iter):
        newton_ok = (
            df != 0.0
            and np.isfinite(df)
            and lo < x - f / df < hi
            and abs(2.0 * f) <= abs(dx_old * df)
        )
        dx_old = dx
        if newton_ok:
            dx = f / df
            x = x - dx
        else:
            dx = 0.5 * (hi - lo)
            x = lo + dx
        if abs(dx) < tol:
            return x
        f, df = f_df(x)
        if np.sign(f) == np.sign(flo):
            lo = x
        else:
            hi = x
    return x


def _gompertz_profile(x):
    """Profile score in omega (lam concentrated out) and its derivative."""
    n = x.shape[0]
    sum_x = x.sum()
    x_max = x.max()

    def f_df(omega):
        u = omega * x
        if u.max() > 700.0:  # exp overflow; the ratio tends to -x_max
            return sum_x - n * x_max, np.nan
        e = np.exp(u)
        em1 = np.expm1(u)
        s1 = -em1.sum()  # sum(1 - e^{omega x})
        s2 = (-em1 / omega + x * e).sum()
        f = sum_x + n * s2 / s1
        ds1 = -(x * e).sum()
        ds2 = (x * e / -omega + em1 / omega**2 + x**2 * e).sum()
        df = n * (ds2 * s1 - s2 * ds1) / s1**2
        return f, df

    return f_df


def mle_gompertz(data, cfg=NewtonConfig()):
    """Newton-bisection root for the shape, then the closed-form rate."""
    x = np.asarray(getattr(data, "points", data), dtype=float)
    if x.shape[0] < 2:
        raise ValueError("need at least two observations")
    if np.any(x < 0):
        raise ValueError("Gompertz requires nonnegative data")
    if not np.any(x > 0):
        raise ValueError("all-zero sample")
    lo, hi = cfg.bracket
    omega = newton_bisection(_gompertz_profile(x), lo, hi, cfg.tol, cfg.max_iter)
    lam = omega / np.expm1(omega * x).mean()
    return Gompertz().from_natural(GompertzParams(omega=float(omega), lam=float(lam)))


def em_mixture(x, init, max_iter=300, tol=1e-9):
    """EM for the two-component normal mixture.

    Returns the fitted :class:`MixtureParams` and the log-likelihood
    after every iteration.  Raises if a component collapses (weight
    below 1e-6).
    """
    x = np.asarray(x, dtype=float)
    mu = np.array([init.mu1, init.mu2])
    var = np.array([init.sigma1**2, init.sigma2**2])
    alpha = float(init.alpha)
    logliks = []
    prev = -np.inf
    for _ in range(max_iter):
        # E step on log densities, normalized per point
        lp = -0.5 * (np.log(2 * np.pi * var) + (x[:, None] - mu) ** 2 / var)
        lp = lp + np.log([alpha, 1.0 - alpha])
        m = lp.max(axis=1, keepdims=True)
        p = np.exp(lp - m)
        tot = p.sum(axis=1, keepdims=True)
        loglik = float((np.log(tot) + m).sum())
        resp = p / tot
        logliks.append(loglik)
        # M step with the variance floor
        weights = resp.sum(axis=0)
        if weights.min() < 1e-6 * x.shape[0]:
            raise ValueError("component collapsed during EM")
        mu = (resp * x[:, None]).sum(axis=0) / weights
        var = (resp * (x[:, None] - mu) ** 2).sum(axis=0) / weights
        var = np.maximum(var, VARIANCE_FLOOR)
        alpha = float(weights[0] / x.shape[0])
        if not 1e-6 < alpha < 1.0 - 1e-6:
            raise ValueError("component collapsed during EM")
        if loglik - prev < tol * max(1.0, abs(loglik)):
            break
        prev = loglik
    params = MixtureParams(
        mu1=float(mu[0]),
        sigma1=float(np.sqrt(var[0])),
        mu2=float(mu[1]),
        sigma2=float(np.sqrt(var[1])),
        alpha=alpha,
    )
    return params, logliks


def mle_mixture(data, k_restarts=5, rng=None):
    """Best-of-k restarted EM, initialized by quantile splits."""
    x = np.asarray(getattr(data, "points", data), dtype=float)
    if x.shape[0] < 10:
        raise ValueError("need at least ten observations")
    if rng is None:
        rng = np.random.default_rng(0)
    best = None
    best_ll = -np.inf
    for k in range(k_restarts):
        q = 0.5 if k == 0 else float(rng.uniform(0.25, 0.75))
        cut = np.quantile(x, q)
        lower, upper = x[x <= cut], x[x > cut]
        if lower.size < 2 or upper.size < 2:
            continue
        init = MixtureParams(
            mu1=float(lower.mean()),
            sigma1=float(max(lower.std(), 1e-2)),
            mu2=float(upper.mean()),
            sigma2=float(max(upper.std(), 1e-2)),
            alpha=float(np.clip(lower.size / x.size, 0.05, 0.95)),
        )
        try:
            params, logliks = em_mixture(x, init)
        except ValueError:
            continue
        if logliks[-1] > best_ll:
            best, best_ll = params, logliks[-1]
    if best is None:
        raise ValueError("every EM restart collapsed")
    return NormalMixture2().from_natural(best)
