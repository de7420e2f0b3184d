"""Change of measure between the pricing and real-world dynamics.

A constant Girsanov parameter ``theta`` (drift rate ``lam * theta``)
relates the two worlds.  Under the real-world measure the load splits as
``G = g~ + X~`` where ``X~`` is again a centred OU process and the
seasonality picks up the drift:

    g~(tau) = g(tau) + (1 - e^{-lam tau}) sigma theta            (exact)
            ~ g(tau) + lam sigma theta tau                        (first order)

Calibration works with the first-order form, which only moves the linear
trend coefficient of the seasonal shape; the exact form is kept for
sensitivity analysis and for the Monte Carlo verification engine.  The
risk premium for a delivery is the forward price minus the real-world
conditional expectation of the at-delivery quote; it is identically zero
when ``theta = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import ModelQ, _leg_expectation, _maybe_scalar
from .ou import OuParams
from .seasonality import SeasonalityModel, evaluate

_MODES = ("first_order", "exact")


@dataclass(frozen=True)
class GirsanovParam:
    """Constant measure-change parameter; the drift rate is ``lam * theta``."""

    theta: float

    def __post_init__(self):
        if not np.isfinite(self.theta):
            raise DomainError(f"theta must be finite, got {self.theta}")

    def drift_rate(self, ou: OuParams) -> float:
        return ou.lam * self.theta


def _check_mode(mode: str):
    if mode not in _MODES:
        raise DomainError(f"mode must be one of {_MODES}, got {mode!r}")


def real_world_seasonality(g_value, ou: OuParams, theta: float, tau, mode: str = "first_order"):
    """Real-world load seasonality value from the pricing-measure value at ``tau``."""
    _check_mode(mode)
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise DomainError("tau must be non-negative")
    if mode == "exact":
        shift = -np.expm1(-ou.lam * tau) * ou.sigma * theta
    else:
        shift = ou.lam * ou.sigma * theta * tau
    return _maybe_scalar(g_value + shift, g_value, tau)


def to_risk_neutral_state(x_tilde, ou: OuParams, theta: float, tau,
                          mode: str = "first_order"):
    """Map a real-world (deseasonalised) load deviation at time ``tau`` to the
    pricing-measure driver state.

    First order: ``x~ + lam sigma theta tau`` (the calibration convention);
    exact: ``x~ + (1 - e^{-lam tau}) sigma theta``.
    """
    _check_mode(mode)
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise DomainError("tau must be non-negative")
    if mode == "exact":
        shift = -np.expm1(-ou.lam * tau) * ou.sigma * theta
    else:
        shift = ou.lam * ou.sigma * theta * tau
    return _maybe_scalar(x_tilde + shift, x_tilde, tau)


def p_seasonality_from_q(g: SeasonalityModel, ou: OuParams, theta: float) -> SeasonalityModel:
    """First-order real-world seasonal shape: the trend gains ``lam sigma theta``."""
    return g.with_trend(g.trend + ou.lam * ou.sigma * theta)


def q_seasonality_from_p(g_tilde: SeasonalityModel, ou: OuParams, theta: float) -> SeasonalityModel:
    """Invert the first-order relation: the trend loses ``lam sigma theta``."""
    return g_tilde.with_trend(g_tilde.trend - ou.lam * ou.sigma * theta)


def radon_nikodym_path(drift: float, w_increments, grid) -> np.ndarray:
    """Density process of the measure change along a Brownian path.

    ``drift`` is the constant parameter value ``lam * theta``;
    ``w_increments`` holds the Brownian increments over consecutive grid
    intervals (last axis), ``grid`` the n+1 increasing times.  Returns the
    stochastic exponential ``exp(drift W - drift^2 t / 2)`` at every grid
    time (1 at the first).  For a constant parameter the Novikov condition
    holds automatically, so the result is a positive unit-mean martingale.
    """
    grid = np.asarray(grid, dtype=float)
    w_increments = np.asarray(w_increments, dtype=float)
    if grid.ndim != 1 or grid.size < 1:
        raise DomainError("grid must be a non-empty 1-d array")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be strictly increasing")
    if w_increments.shape[-1] != grid.size - 1:
        raise DomainError("need one Brownian increment per grid interval")
    w_cum = np.cumsum(w_increments, axis=-1)
    elapsed = grid[1:] - grid[0]
    log_density = drift * w_cum - 0.5 * drift**2 * elapsed
    ones = np.ones(w_increments.shape[:-1] + (1,))
    return np.concatenate([ones, np.exp(log_density)], axis=-1)


def _real_world_leg(model: ModelQ, theta: float, i: int, t, tau, x_tilde):
    conv = model.conv
    ou = model.ou
    tau_arr = np.asarray(tau, dtype=float)
    tau_e = tau_arr + conv.epsilon
    horizon = tau_e - np.asarray(t, dtype=float)
    if np.any(horizon < 0):
        raise DomainError("real-world leg expectation requires t <= tau + epsilon")
    alpha, beta = model.supply.leg(i)
    g_tau_e = evaluate(model.load_seasonality, tau_e)
    drift_shift = np.exp(-ou.lam * conv.epsilon) * -np.expm1(-ou.lam * tau_arr) * ou.sigma * theta
    return _leg_expectation(alpha, beta, ou, g_tau_e + drift_shift, horizon, x_tilde)


def supply_leg_real_world_expectation(model: ModelQ, theta: float, i: int, t, tau, x_tilde):
    """Real-world conditional moment of supply leg ``i`` given the
    deseasonalised deviation ``x_tilde`` at time ``t``.

    Identical to the pricing-measure leg expectation apart from a
    deterministic load shift ``e^{-lam eps}(1 - e^{-lam tau}) sigma theta``
    that carries the accumulated measure drift.  At ``theta = 0`` it
    coincides exactly with :func:`intrinsicprice.model.supply_leg_expectation`.
    """
    value = _real_world_leg(model, theta, i, t, tau, x_tilde)
    return _maybe_scalar(value, t, tau, x_tilde)


def risk_premium(model: ModelQ, theta: float, t, tau, x_tilde):
    """Forward price minus the real-world expectation of the at-delivery quote.

    Closed form: ``(L1 - L2) - (L1~ - L2~)`` with the pricing-measure legs
    evaluated at the first-order shifted state.  Zero exactly when
    ``theta = 0``.
    """
    x = to_risk_neutral_state(x_tilde, model.ou, theta, t)
    conv = model.conv
    tau_e = np.asarray(tau, dtype=float) + conv.epsilon
    horizon = tau_e - np.asarray(t, dtype=float)
    if np.any(horizon < 0):
        raise DomainError("risk premium requires t <= tau + epsilon")
    alpha1, beta1 = model.supply.leg(1)
    alpha2, beta2 = model.supply.leg(2)
    g_tau_e = evaluate(model.load_seasonality, tau_e)
    leg1 = _leg_expectation(alpha1, beta1, model.ou, g_tau_e, horizon, x)
    leg2 = _leg_expectation(alpha2, beta2, model.ou, g_tau_e, horizon, x)
    leg1_p = _real_world_leg(model, theta, 1, t, tau, x_tilde)
    leg2_p = _real_world_leg(model, theta, 2, t, tau, x_tilde)
    return _maybe_scalar((leg1 - leg2) - (leg1_p - leg2_p), t, tau, x_tilde)
