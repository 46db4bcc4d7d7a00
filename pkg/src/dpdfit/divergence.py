"""Density-power and gamma cross-entropy objectives.

The robust objective splits into an empirical average over the data and
an integral of the (1+beta)-th power of the model density.  The integral
term is available in closed form for the normal families and through a
regular-grid quadrature for everything else.  All powering goes through
``exp(beta * log_pdf)`` so that points of zero density contribute zero
instead of underflowing to NaN.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import IsoNormal, Normal1D


@dataclass(frozen=True)
class ClosedForm:
    """Exact integral term; only normal families support it."""


@dataclass(frozen=True)
class Lattice:
    """Regular-grid quadrature over [-extent, extent] (or [0, extent]).

    ``nodes`` counts grid points per axis; the d-variate grid is the
    cartesian product, so a d-dimensional lattice holds ``nodes**d``
    points.  Node weight equals the grid spacing (to the d-th power).
    """

    extent: float
    nodes: int

    def __post_init__(self):
        if self.extent <= 0:
            raise ValueError("lattice extent must be positive")
        if self.nodes < 2:
            raise ValueError("lattice needs at least 2 nodes per axis")

    def total_points(self, model):
        return self.nodes ** model.dim_x


@dataclass(frozen=True)
class ObjectiveValue:
    """Decomposed objective: ``value = first_term + r_term``."""

    value: float
    first_term: float
    r_term: float


def has_closed_form(model):
    return isinstance(model, (Normal1D, IsoNormal))


def _data_array(data):
    return np.asarray(getattr(data, "points", data), dtype=float)


def empirical_power_term(model, theta, data, beta):
    """Data-side term ``-(beta * n)^{-1} sum_i p(x_i)**beta``."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    x = _data_array(data)
    if x.shape[0] == 0:
        raise ValueError("empty dataset")
    lp = model.log_pdf(theta, x)
    return -float(np.exp(beta * lp).mean()) / beta


def closed_form_r(model, theta, beta):
    """Exact integral term for the families that admit one.

    Normal: ``(2 pi sigma^2)^{-beta/2} (1+beta)^{-3/2}``.  The d-variate
    unit-covariance family multiplies d univariate factors, giving
    ``(2 pi)^{-d beta / 2} (1+beta)^{-(d+2)/2}``.
    """
    if isinstance(model, Normal1D):
        sigma = model.to_natural(theta).sigma
        return float(
            (2.0 * np.pi * sigma**2) ** (-beta / 2.0) * (1.0 + beta) ** (-1.5)
        )
    if isinstance(model, IsoNormal):
        d = model.d
        return float(
            (2.0 * np.pi) ** (-d * beta / 2.0) * (1.0 + beta) ** (-(d + 2) / 2.0)
        )
    raise ValueError(f"no closed-form integral term for {model.name}")


def lattice_points(model, backend):
    """Quadrature nodes and the (scalar) weight shared by all of them."""
    extent, m = backend.extent, backend.nodes
    if model.dim_x == 1:
        if model.support == "positive":
            pts = np.linspace(0.0, extent, m)
            return pts, extent / (m - 1)
        pts = np.linspace(-extent, extent, m)
        return pts, 2.0 * extent / (m - 1)
    axis = np.linspace(-extent, extent, m)
    grids = np.meshgrid(*([axis] * model.dim_x), indexing="ij")
    pts = np.stack(grids, axis=-1).reshape(-1, model.dim_x)
    return pts, (2.0 * extent / (m - 1)) ** model.dim_x


def lattice_r(model, theta, beta, backend):
    """Integral term by regular-grid quadrature (``beta >= 0``)."""
    pts, w = lattice_points(model, backend)
    lp = model.log_pdf(theta, pts)
    return float(w * np.exp((1.0 + beta) * lp).sum() / (1.0 + beta))


def integral_r(model, theta, beta, backend):
    """Integral term through whichever backend is configured."""
    if isinstance(backend, ClosedForm):
        return closed_form_r(model, theta, beta)
    if isinstance(backend, Lattice):
        return lattice_r(model, theta, beta, backend)
    raise ValueError(f"unsupported integral backend {backend!r}")


def empirical_dpce(model, theta, data, beta, backend):
    """Empirical density-power cross entropy of the model against data."""
    first = empirical_power_term(model, theta, data, beta)
    r = integral_r(model, theta, beta, backend)
    return ObjectiveValue(value=first + r, first_term=first, r_term=r)


def empirical_gce(model, theta, data, gamma, backend, scale=1.0):
    """Empirical gamma cross entropy, optionally of the scaled model.

    With ``scale=c`` this evaluates the objective for the unnormalized
    model ``c * p``; the value is scale-invariant, so any ``c > 0``
    returns the same number up to rounding.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if scale <= 0:
        raise ValueError("scale must be positive")
    x = _data_array(data)
    if x.shape[0] == 0:
        raise ValueError("empty dataset")
    log_c = np.log(scale)
    mean_pow = np.exp(gamma * (model.log_pdf(theta, x) + log_c)).mean()
    if mean_pow <= 0:
        raise ValueError("model density vanishes on the whole dataset")
    # integral of (c p)^(1+gamma) = c^(1+gamma) (1+gamma) r
    r = integral_r(model, theta, gamma, backend)
    log_int = (1.0 + gamma) * log_c + np.log1p(gamma) + np.log(r)
    return float(-np.log(mean_pow) / gamma + log_int / (1.0 + gamma))
