"""Parametric density families used by the robust estimators.

Every family exposes the same small surface: log-density, score (the
gradient of the log-density with respect to the *unconstrained*
optimization coordinates), sampling, and the maps between unconstrained
coordinates and the named natural parameters.  Families with positivity
constraints are parameterized so that every point of R^s maps to a valid
density: variances take the form ``c**2 + VARIANCE_FLOOR``, mixing
weights go through a sigmoid, and purely positive parameters (inverse
normal, Gompertz) live in log space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

# Lower bound on every normal variance; keeps the unconstrained space
# equal to all of R^s while being numerically negligible.
VARIANCE_FLOOR = 1e-6

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class NormalParams:
    mu: float
    sigma: float


@dataclass(frozen=True)
class IsoNormalParams:
    mean: np.ndarray


@dataclass(frozen=True)
class InverseNormalParams:
    mu: float
    lam: float


@dataclass(frozen=True)
class GompertzParams:
    omega: float
    lam: float


@dataclass(frozen=True)
class MixtureParams:
    mu1: float
    sigma1: float
    mu2: float
    sigma2: float
    alpha: float


class Model:
    """Common interface of all density families.

    ``theta`` is always a flat float array in the unconstrained space,
    ``x`` an array of observations: shape ``(n,)`` for scalar families,
    ``(n, d)`` for the d-variate one.
    """

    name: str = ""
    dim_param: int = 0
    dim_x: int = 1
    support: str = "real"  # "real" or "positive"
    natural_names: tuple = ()

    def log_pdf(self, theta, x):
        raise NotImplementedError

    def score(self, theta, x):
        raise NotImplementedError

    def sample(self, theta, rng, size):
        raise NotImplementedError

    def to_natural(self, theta):
        raise NotImplementedError

    def from_natural(self, params):
        raise NotImplementedError

    def natural_values(self, theta):
        """Natural parameters of ``theta`` as a flat float array."""
        p = self.to_natural(theta)
        out = []
        for f in p.__dataclass_fields__:
            v = getattr(p, f)
            if np.ndim(v) == 0:
                out.append(float(v))
            else:
                out.extend(float(u) for u in np.asarray(v))
        return np.array(out)

    # -- helpers -------------------------------------------------------

    def _check_theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dim_param,):
            raise ValueError(
                f"{self.name}: expected {self.dim_param} parameters, "
                f"got shape {theta.shape}"
            )
        if not np.all(np.isfinite(theta)):
            raise ValueError(f"{self.name}: non-finite parameter entries")
        return theta

    def _check_x(self, x):
        x = np.asarray(x, dtype=float)
        if self.dim_x == 1:
            return np.atleast_1d(x)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        if x.shape[-1] != self.dim_x:
            raise ValueError(f"{self.name}: expected points of dimension {self.dim_x}")
        return x

    def __repr__(self):
        return f"{type(self).__name__}()"


class Normal1D(Model):
    """Univariate normal with ``sigma**2 = theta[1]**2 + VARIANCE_FLOOR``."""

    name = "normal"
    dim_param = 2
    natural_names = ("mu", "sigma")

    def _moments(self, theta):
        theta = self._check_theta(theta)
        return theta[0], theta[1] ** 2 + VARIANCE_FLOOR

    def log_pdf(self, theta, x):
        mu, var = self._moments(theta)
        x = self._check_x(x)
        return -0.5 * (_LOG_2PI + np.log(var)) - (x - mu) ** 2 / (2.0 * var)

    def score(self, theta, x):
        mu, var = self._moments(theta)
        x = self._check_x(x)
        d_mu = (x - mu) / var
        d_var = -0.5 / var + (x - mu) ** 2 / (2.0 * var**2)
        return np.stack([d_mu, d_var * 2.0 * theta[1]], axis=-1)

    def sample(self, theta, rng, size):
        mu, var = self._moments(theta)
        return mu + np.sqrt(var) * rng.standard_normal(size)

    def to_natural(self, theta):
        mu, var = self._moments(theta)
        return NormalParams(mu=float(mu), sigma=float(np.sqrt(var)))

    def from_natural(self, params):
        var = params.sigma**2
        if var < VARIANCE_FLOOR:
            raise ValueError(f"variance {var} below floor {VARIANCE_FLOOR}")
        return np.array([params.mu, np.sqrt(var - VARIANCE_FLOOR)])


class IsoNormal(Model):
    """d-variate normal with unknown mean and identity covariance."""

    name = "isonormal"
    support = "real"

    def __init__(self, d):
        if d < 1:
            raise ValueError("dimension must be >= 1")
        self.d = int(d)
        self.dim_param = self.d
        self.dim_x = self.d
        self.name = f"isonormal{d}"
        self.natural_names = tuple(f"mu_{i + 1}" for i in range(self.d))

    def log_pdf(self, theta, x):
        theta = self._check_theta(theta)
        x = self._check_x(x)
        return -0.5 * self.d * _LOG_2PI - 0.5 * ((x - theta) ** 2).sum(axis=-1)

    def score(self, theta, x):
        theta = self._check_theta(theta)
        return self._check_x(x) - theta

    def sample(self, theta, rng, size):
        theta = self._check_theta(theta)
        return theta + rng.standard_normal((size, self.d))

    def to_natural(self, theta):
        return IsoNormalParams(mean=self._check_theta(theta).copy())

    def from_natural(self, params):
        mean = np.asarray(params.mean, dtype=float)
        if mean.shape != (self.d,):
            raise ValueError(f"mean must have shape ({self.d},)")
        return mean.copy()

    def natural_values(self, theta):
        return self._check_theta(theta).copy()

    def __repr__(self):
        return f"IsoNormal({self.d})"


class InverseNormal(Model):
    """Inverse normal (inverse Gaussian), optimized as (log mu, log lam)."""

    name = "inverse-normal"
    dim_param = 2
    support = "positive"
    natural_names = ("mu", "lam")

    def _params(self, theta):
        theta = self._check_theta(theta)
        return np.exp(theta[0]), np.exp(theta[1])

    def log_pdf(self, theta, x):
        mu, lam = self._params(theta)
        x = self._check_x(x)
        out = np.full(x.shape, -np.inf)
        ok = x > 0
        xo = x[ok]
        out[ok] = 0.5 * (np.log(lam) - _LOG_2PI - 3.0 * np.log(xo)) - lam * (
            xo - mu
        ) ** 2 / (2.0 * mu**2 * xo)
        return out

    def natural_score(self, theta, x):
        """Score with respect to the natural parameters (mu, lam)."""
        mu, lam = self._params(theta)
        x = self._check_x(x)
        if np.any(x <= 0):
            raise ValueError("inverse normal score requires x > 0")
        d_mu = lam * (x - mu) / mu**3
        d_lam = 0.5 / lam - (x - mu) ** 2 / (2.0 * mu**2 * x)
        return np.stack([d_mu, d_lam], axis=-1)

    def score(self, theta, x):
        mu, lam = self._params(theta)
        return self.natural_score(theta, x) * np.array([mu, lam])

    def sample(self, theta, rng, size):
        # Generator.wald draws via the Michael-Schucany-Haas transform.
        mu, lam = self._params(theta)
        return rng.wald(mu, lam, size)

    def to_natural(self, theta):
        mu, lam = self._params(theta)
        return InverseNormalParams(mu=float(mu), lam=float(lam))

    def from_natural(self, params):
        if params.mu <= 0 or params.lam <= 0:
            raise ValueError("inverse normal parameters must be positive")
        return np.log([params.mu, params.lam])


class Gompertz(Model):
    """Gompertz distribution on [0, inf), optimized as (log omega, log lam)."""

    name = "gompertz"
    dim_param = 2
    support = "positive"
    natural_names = ("omega", "lam")

    def _params(self, theta):
        theta = self._check_theta(theta)
        return np.exp(theta[0]), np.exp(theta[1])

    def log_pdf(self, theta, x):
        omega, lam = self._params(theta)
        x = self._check_x(x)
        out = np.full(x.shape, -np.inf)
        ok = x >= 0
        xo = x[ok]
        with np.errstate(over="ignore"):
            out[ok] = np.log(lam) + omega * xo - lam / omega * np.expm1(omega * xo)
        return out

    def natural_score(self, theta, x):
        """Score with respect to the natural parameters (omega, lam)."""
        omega, lam = self._params(theta)
        x = self._check_x(x)
        if np.any(x < 0):
            raise ValueError("Gompertz score requires x >= 0")
        e = np.exp(omega * x)
        d_omega = x - lam * (-np.expm1(omega * x) / omega**2 + x * e / omega)
        d_lam = 1.0 / lam - np.expm1(omega * x) / omega
        return np.stack([d_omega, d_lam], axis=-1)

    def score(self, theta, x):
        omega, lam = self._params(theta)
        return self.natural_score(theta, x) * np.array([omega, lam])

    def sample(self, theta, rng, size):
        # Inverse CDF: x = log(1 - (omega/lam) * log(1 - u)) / omega.
        omega, lam = self._params(theta)
        u = rng.random(size)
        return np.log1p(-omega / lam * np.log1p(-u)) / omega

    def to_natural(self, theta):
        omega, lam = self._params(theta)
        return GompertzParams(omega=float(omega), lam=float(lam))

    def from_natural(self, params):
        if params.omega <= 0 or params.lam <= 0:
            raise ValueError("Gompertz parameters must be positive")
        return np.log([params.omega, params.lam])

    def cdf(self, theta, x):
        omega, lam = self._params(theta)
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.0, -np.expm1(lam / omega * -np.expm1(omega * x)))


class NormalMixture2(Model):
    """Two-component normal mixture.

    Unconstrained coordinates ``theta = (a, mu1, c1, mu2, c2)`` with
    mixing weight ``alpha = sigmoid(a)`` and component variances
    ``c_i**2 + VARIANCE_FLOOR``.
    """

    name = "mixture"
    dim_param = 5
    natural_names = ("mu1", "sigma1", "mu2", "sigma2", "alpha")

    def _params(self, theta):
        theta = self._check_theta(theta)
        alpha = 1.0 / (1.0 + np.exp(-theta[0]))
        v1 = theta[2] ** 2 + VARIANCE_FLOOR
        v2 = theta[4] ** 2 + VARIANCE_FLOOR
        return alpha, theta[1], v1, theta[3], v2

    def _component_logpdfs(self, theta, x):
        alpha, mu1, v1, mu2, v2 = self._params(theta)
        x = self._check_x(x)
        l1 = -0.5 * (_LOG_2PI + np.log(v1)) - (x - mu1) ** 2 / (2.0 * v1)
        l2 = -0.5 * (_LOG_2PI + np.log(v2)) - (x - mu2) ** 2 / (2.0 * v2)
        return alpha, l1, l2

    def log_pdf(self, theta, x):
        alpha, l1, l2 = self._component_logpdfs(theta, x)
        stacked = np.stack([l1 + np.log(alpha), l2 + np.log1p(-alpha)])
        return logsumexp(stacked, axis=0)

    def score(self, theta, x):
        theta = self._check_theta(theta)
        alpha, mu1, v1, mu2, v2 = self._params(theta)
        x = self._check_x(x)
        _, l1, l2 = self._component_logpdfs(theta, x)
        lp = self.log_pdf(theta, x)
        r1 = np.exp(np.log(alpha) + l1 - lp)  # responsibility of component 1
        r2 = np.exp(np.log1p(-alpha) + l2 - lp)
        d_a = r1 - alpha  # = alpha*(1-alpha)*(phi1-phi2)/p
        d_mu1 = r1 * (x - mu1) / v1
        d_v1 = r1 * (-0.5 / v1 + (x - mu1) ** 2 / (2.0 * v1**2))
        d_mu2 = r2 * (x - mu2) / v2
        d_v2 = r2 * (-0.5 / v2 + (x - mu2) ** 2 / (2.0 * v2**2))
        return np.stack(
            [d_a, d_mu1, d_v1 * 2.0 * theta[2], d_mu2, d_v2 * 2.0 * theta[4]],
            axis=-1,
        )

    def sample(self, theta, rng, size):
        alpha, mu1, v1, mu2, v2 = self._params(theta)
        first = rng.random(size) < alpha
        z = rng.standard_normal(size)
        return np.where(first, mu1 + np.sqrt(v1) * z, mu2 + np.sqrt(v2) * z)

    def to_natural(self, theta):
        alpha, mu1, v1, mu2, v2 = self._params(theta)
        return MixtureParams(
            mu1=float(mu1),
            sigma1=float(np.sqrt(v1)),
            mu2=float(mu2),
            sigma2=float(np.sqrt(v2)),
            alpha=float(alpha),
        )

    def from_natural(self, params):
        if not 0.0 < params.alpha < 1.0:
            raise ValueError("mixing weight must lie strictly inside (0, 1)")
        for s in (params.sigma1, params.sigma2):
            if s**2 < VARIANCE_FLOOR:
                raise ValueError(f"variance {s**2} below floor {VARIANCE_FLOOR}")
        return np.array(
            [
                np.log(params.alpha) - np.log1p(-params.alpha),
                params.mu1,
                np.sqrt(params.sigma1**2 - VARIANCE_FLOOR),
                params.mu2,
                np.sqrt(params.sigma2**2 - VARIANCE_FLOOR),
            ]
        )

    def cdf(self, theta, x):
        from scipy.stats import norm

        alpha, mu1, v1, mu2, v2 = self._params(theta)
        x = np.asarray(x, dtype=float)
        return alpha * norm.cdf(x, mu1, np.sqrt(v1)) + (1 - alpha) * norm.cdf(
            x, mu2, np.sqrt(v2)
        )


def get_model(name):
    """Look up a model by its registry name.

    Accepts ``normal``, ``inverse-normal``, ``gompertz``, ``mixture``,
    and ``isonormal<d>`` (for example ``isonormal3``).
    """
    name = name.strip().lower()
    if name == "normal":
        return Normal1D()
    if name in ("inverse-normal", "invnormal"):
        return InverseNormal()
    if name == "gompertz":
        return Gompertz()
    if name == "mixture":
        return NormalMixture2()
    if name.startswith("isonormal"):
        suffix = name[len("isonormal") :]
        if suffix.isdigit():
            return IsoNormal(int(suffix))
    raise ValueError(f"unknown model {name!r}")
