"""Gaussian Ornstein-Uhlenbeck process with zero long-run mean.

The load deviation follows ``dX = -lambda X dt + sigma dW`` (any mean level
is absorbed by the seasonality function, so none is modelled here).  The
module provides the exact one-step transition law, bias-free path
simulation built on that law, and closed-form maximum likelihood for
``(lambda, sigma)`` from an equally spaced sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EstimationError

# below this, 1 - exp(-2 lam dt) loses accuracy and the sigma^2 dt limit applies
_SMALL_RATE_TIME = 1e-8


@dataclass(frozen=True)
class OuParams:
    """Mean-reversion speed per hour, volatility per sqrt-hour, initial value."""

    lam: float
    sigma: float
    x0: float = 0.0

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"mean-reversion speed must be positive, got {self.lam}")
        if self.sigma < 0:
            raise DomainError(f"volatility must be non-negative, got {self.sigma}")

    @property
    def stationary_variance(self) -> float:
        return self.sigma**2 / (2.0 * self.lam)


@dataclass(frozen=True)
class OuPath:
    """A realisation of the process on a strictly increasing time grid."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape:
            raise DomainError("times and values must have equal length")
        if np.any(np.diff(times) <= 0):
            raise DomainError("path times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


def transition(params: OuParams, x, dt):
    """Exact conditional law of ``X_{t+dt}`` given ``X_t = x``.

    Returns ``(mean, variance)`` with ``mean = x e^{-lam dt}`` and
    ``variance = sigma^2 (1 - e^{-2 lam dt}) / (2 lam)``; for
    ``lam * dt < 1e-8`` the limit ``sigma^2 dt`` is used.  Accepts scalars
    or arrays for ``x`` and ``dt``.
    """
    dt = np.asarray(dt, dtype=float)
    if np.any(dt < 0):
        raise DomainError("transition requires dt >= 0")
    mean = x * np.exp(-params.lam * dt)
    small = params.lam * dt < _SMALL_RATE_TIME
    var_exact = params.sigma**2 * -np.expm1(-2.0 * params.lam * dt) / (2.0 * params.lam)
    variance = np.where(small, params.sigma**2 * dt, var_exact)
    if np.isscalar(x) and variance.ndim == 0:
        return float(mean), float(variance)
    return mean, variance


def sample_transition(params: OuParams, x, dt, rng: np.random.Generator, drift: float = 0.0):
    """Draw ``X_{t+dt}`` given ``X_t = x`` from the exact transition.

    ``drift`` adds a constant drift term ``d`` to the SDE
    (``dX = (-lam X + d) dt + sigma dW``), used by the verification
    engine's mutation mode; its exact mean contribution is
    ``d (1 - e^{-lam dt}) / lam``.
    """
    mean, variance = transition(params, x, dt)
    if drift != 0.0:
        mean = mean + drift * -np.expm1(-params.lam * dt) / params.lam
    return mean + np.sqrt(variance) * rng.standard_normal(np.shape(x))


def simulate(params: OuParams, grid, seed: int) -> OuPath:
    """Simulate one path on ``grid`` by exact-transition sampling (no Euler bias).

    The grid must be strictly increasing and start at 0, where the path
    takes the value ``params.x0``.  Reproducible for a fixed seed.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1:
        raise DomainError("grid must be a non-empty 1-d array")
    if grid[0] != 0.0:
        raise DomainError(f"grid must start at 0, got {grid[0]}")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be strictly increasing")

    rng = np.random.default_rng(seed)
    steps = np.diff(grid)
    values = np.empty(grid.size)
    values[0] = params.x0
    if steps.size:
        decay = np.exp(-params.lam * steps)
        sd = np.sqrt(np.asarray(transition(params, 0.0, steps)[1], dtype=float))
        shocks = sd * rng.standard_normal(steps.size)
        x = params.x0
        for k in range(steps.size):
            x = decay[k] * x + shocks[k]
            values[k + 1] = x
    return OuPath(times=grid, values=values)


def fit_mle(series, dt: float) -> OuParams:
    """Maximum likelihood ``(lambda, sigma)`` from equally spaced observations.

    Maximises the exact Gaussian AR(1) likelihood with zero long-run mean,
    conditioning on the first observation:
    ``X_{k+1} | X_k ~ N(X_k a, sigma^2 (1 - a^2) / (2 lambda))`` with
    ``a = e^{-lambda dt}``.  The profile over ``a`` is closed form
    (least squares through the origin), then ``lambda = -ln(a)/dt`` and
    the variance estimate is inverted for ``sigma``.  ``x0`` is set to the
    first observation.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < 3:
        raise EstimationError(f"need at least 3 observations, got {x.size}")
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    if not np.all(np.isfinite(x)):
        raise EstimationError("sample contains non-finite values")

    prev, nxt = x[:-1], x[1:]
    denom = float(prev @ prev)
    if denom == 0.0:
        raise EstimationError("non-mean-reverting sample: degenerate (all-zero) series")
    a_hat = float(prev @ nxt) / denom
    if not np.isfinite(a_hat) or a_hat <= 0.0 or a_hat >= 1.0:
        raise EstimationError(f"non-mean-reverting sample: AR coefficient estimate {a_hat}")

    lam = -np.log(a_hat) / dt
    resid = nxt - a_hat * prev
    v_hat = float(resid @ resid) / resid.size
    sigma = np.sqrt(v_hat * 2.0 * lam / (1.0 - a_hat**2))
    return OuParams(lam=float(lam), sigma=float(sigma), x0=float(x[0]))
