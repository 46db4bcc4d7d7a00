"""Gradient estimators for the density-power objectives.

Three routes to the gradient of the empirical objective:

* ``stochastic_grad_dpd`` -- the unbiased Monte Carlo estimator: the
  data term is computed exactly, the integral-term gradient is estimated
  by importance sampling from a proposal distribution.
* ``lattice_grad_dpd`` -- deterministic, with the integral-term gradient
  from the same regular grid as :func:`dpdfit.divergence.lattice_r`.
* ``stochastic_grad_gamma`` -- the augmented estimator for gamma
  cross-entropy minimization with an unnormalized model ``c * p``; the
  scale coordinate is chain-ruled to ``log c`` so that plain additive
  updates keep the scale positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .divergence import lattice_points

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class CurrentModel:
    """Draw proposal samples from the model at the current parameters."""


@dataclass(frozen=True)
class FixedNormal:
    """Fixed (isotropic) normal proposal; real-support models only."""

    mean: float | np.ndarray
    sd: float


@dataclass
class GradEstimate:
    """A gradient estimate plus optional per-draw diagnostics.

    ``draw_terms`` holds the integrand ``w(y) p(y)**beta t(y)`` of every
    proposal draw (one row per draw) and ``draw_weights`` the scalar
    factors ``w(y) p(y)**beta``, so callers can study the Monte Carlo
    distribution without re-running the model.
    """

    g: np.ndarray
    m_used: int
    draws: np.ndarray | None = None
    draw_terms: np.ndarray | None = None
    draw_weights: np.ndarray | None = None


def data_term(model, theta, data, beta):
    """Exact data-side gradient term ``-(1/n) sum_i p(x_i)**beta t(x_i)``.

    Points where the density vanishes contribute zero and their score is
    never evaluated (it may be undefined outside the support).
    """
    x = np.asarray(getattr(data, "points", data), dtype=float)
    if x.shape[0] == 0:
        raise ValueError("empty dataset")
    lp = model.log_pdf(theta, x)
    ok = np.isfinite(lp)
    g = np.zeros(model.dim_param)
    if np.any(ok):
        xs = x[ok]
        w = np.exp(beta * lp[ok])
        g = (w[:, None] * model.score(theta, xs)).sum(axis=0)
    return -g / x.shape[0]


def _draw_proposal(model, theta, proposal, m, rng):
    """Sample the proposal; returns draws and their log-density, or None
    for the current-model proposal (whose importance weight is one)."""
    if isinstance(proposal, CurrentModel):
        return model.sample(theta, rng, m), None
    if isinstance(proposal, FixedNormal):
        if model.support != "real":
            raise ValueError(
                f"fixed normal proposal does not cover the support of {model.name}"
            )
        mean = np.asarray(proposal.mean, dtype=float)
        if model.dim_x == 1:
            y = float(mean) + proposal.sd * rng.standard_normal(m)
            resid = (y - float(mean)) ** 2
        else:
            y = mean + proposal.sd * rng.standard_normal((m, model.dim_x))
            resid = ((y - mean) ** 2).sum(axis=-1)
        log_q = -0.5 * model.dim_x * (_LOG_2PI + 2.0 * np.log(proposal.sd)) - resid / (
            2.0 * proposal.sd**2
        )
        return y, log_q
    raise ValueError(f"unknown proposal {proposal!r}")


def _proposal_terms(model, theta, y, log_q, power):
    """Per-draw integrand ``w(y) p(y)**power t(y)`` with 0/0 := 0."""
    lp = model.log_pdf(theta, y)
    if log_q is None:
        log_w = power * lp
    else:
        log_w = (1.0 + power) * lp - log_q
    weights = np.where(np.isfinite(lp), np.exp(log_w), 0.0)
    terms = np.zeros((y.shape[0], model.dim_param))
    ok = weights > 0
    if np.any(ok):
        terms[ok] = weights[ok, None] * model.score(theta, y[ok])
    return terms, weights


def stochastic_grad_dpd(model, theta, data, beta, m, proposal, rng, keep_draws=False):
    """Unbiased stochastic gradient of the empirical DPD objective.

    Draws ``m`` proposal samples; the expectation over the draws equals
    the exact gradient for any ``m >= 1``.
    """
    if m < 1:
        raise ValueError("minibatch size m must be >= 1")
    if beta <= 0:
        raise ValueError("beta must be positive")
    g = data_term(model, theta, data, beta)
    y, log_q = _draw_proposal(model, theta, proposal, m, rng)
    terms, weights = _proposal_terms(model, theta, y, log_q, beta)
    g = g + terms.mean(axis=0)
    return GradEstimate(
        g=g,
        m_used=m,
        draws=y if keep_draws else None,
        draw_terms=terms if keep_draws else None,
        draw_weights=weights if keep_draws else None,
    )


def lattice_grad_dpd(model, theta, data, beta, backend):
    """Deterministic gradient with the integral term on a regular grid."""
    g = data_term(model, theta, data, beta)
    pts, w = lattice_points(model, backend)
    lp = model.log_pdf(theta, pts)
    pw = np.where(np.isfinite(lp), np.exp((1.0 + beta) * lp), 0.0)
    ok = pw > 0
    if np.any(ok):
        g = g + w * (pw[ok, None] * model.score(theta, pts[ok])).sum(axis=0)
    return g


def stochastic_grad_gamma(
    model, theta, c, data, gamma, m, proposal, rng, keep_draws=False
):
    """Stochastic gradient for the scaled model ``c * p_theta``.

    Returns a vector of length ``dim_param + 1``; the last entry is the
    gradient with respect to ``log c`` (the raw scale gradient times
    ``c``), matching optimizers that update the scale additively in log
    space.
    """
    if c <= 0:
        raise ValueError("scale c must be positive")
    if m < 1:
        raise ValueError("minibatch size m must be >= 1")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    x = np.asarray(getattr(data, "points", data), dtype=float)
    if x.shape[0] == 0:
        raise ValueError("empty dataset")
    n = x.shape[0]

    lp = model.log_pdf(theta, x)
    ok = np.isfinite(lp)
    g_theta = np.zeros(model.dim_param)
    if np.any(ok):
        wq = np.exp(gamma * lp[ok])
        g_theta = -(c**gamma) * (wq[:, None] * model.score(theta, x[ok])).sum(axis=0) / n
    data_pow = float(np.exp(gamma * np.where(ok, lp, -np.inf)).sum()) / n
    g_c = -(c ** (gamma - 1.0)) * data_pow

    y, log_q = _draw_proposal(model, theta, proposal, m, rng)
    terms, weights = _proposal_terms(model, theta, y, log_q, gamma)
    g_theta = g_theta + c ** (1.0 + gamma) * terms.mean(axis=0)
    g_c = g_c + c**gamma * float(weights.mean())

    g = np.concatenate([g_theta, [g_c * c]])  # chain rule: d/d(log c) = c * d/dc
    return GradEstimate(
        g=g,
        m_used=m,
        draws=y if keep_draws else None,
        draw_terms=terms if keep_draws else None,
        draw_weights=weights if keep_draws else None,
    )
