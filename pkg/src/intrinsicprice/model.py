"""Structural two-exponential supply-curve model under the pricing measure.

The single stochastic driver is the system load
``G_t = g(t) + X_t`` (seasonality plus OU deviation).  The settlement
price for delivery ``[tau, tau + eps)`` is the supply curve evaluated at
the realised load at the ex-post time ``tau_e = tau + eps``, plus a
deterministic price seasonality:

    p(tau) = exp(alpha1 (G_{tau_e} - beta1)) - exp(alpha2 (G_{tau_e} - beta2)) + g3(tau)

All tradable contracts are conditional expectations of ``p(tau)`` under
the pricing measure; because the load deviation is Gaussian they are
available in closed form through the conditional exponential moments of
the two supply legs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .conventions import DeliverySet, MarketConventions
from .errors import DomainError, NumericError
from .ou import OuParams
from .seasonality import SeasonalityModel, evaluate

# spec'd guard: fail loudly instead of returning inf on pathological calibrations
_MAX_EXPONENT = 700.0


@dataclass(frozen=True)
class SupplyParams:
    """Exponents and load shifts of the two supply-curve legs."""

    alpha1: float
    alpha2: float
    beta1: float
    beta2: float

    def __post_init__(self):
        if not self.alpha1 > 0:
            raise DomainError(f"alpha1 must be positive, got {self.alpha1}")
        if not self.alpha2 < 0:
            raise DomainError(f"alpha2 must be negative, got {self.alpha2}")

    def leg(self, i: int) -> tuple[float, float]:
        if i == 1:
            return self.alpha1, self.beta1
        if i == 2:
            return self.alpha2, self.beta2
        raise DomainError(f"supply leg must be 1 or 2, got {i}")


@dataclass(frozen=True)
class ModelQ:
    """Full pricing-measure model: OU driver, supply curve, seasonalities."""

    ou: OuParams
    supply: SupplyParams
    load_seasonality: SeasonalityModel
    price_seasonality: SeasonalityModel
    conv: MarketConventions


def _checked_exp(exponent, context: str):
    exponent = np.asarray(exponent, dtype=float)
    if np.any(np.abs(exponent) > _MAX_EXPONENT):
        worst = float(np.max(np.abs(exponent)))
        raise NumericError(f"{context}: exponent magnitude {worst:.3g} exceeds {_MAX_EXPONENT:g}")
    return np.exp(exponent)


def _maybe_scalar(value, *inputs):
    if all(np.isscalar(v) or np.ndim(v) == 0 for v in inputs):
        return float(value)
    return value


def intrinsic_price(model: ModelQ, load_at_tau_e, tau):
    """Settlement price for delivery ``tau`` given the realised ex-post load."""
    s = model.supply
    g3 = evaluate(model.price_seasonality, tau)
    leg1 = _checked_exp(s.alpha1 * (load_at_tau_e - s.beta1), "supply leg 1")
    leg2 = _checked_exp(s.alpha2 * (load_at_tau_e - s.beta2), "supply leg 2")
    return _maybe_scalar(leg1 - leg2 + g3, load_at_tau_e, tau)


def _leg_expectation(alpha: float, beta: float, ou: OuParams, g_tau_e, horizon, x):
    """Conditional moment E[exp(alpha (G_{tau_e} - beta)) | X_t = x] over ``horizon = tau_e - t``."""
    m = np.exp(-ou.lam * np.asarray(horizon, dtype=float))
    convexity = alpha * ou.sigma**2 / (4.0 * ou.lam) * (1.0 - m * m)
    exponent = alpha * ((g_tau_e + m * x + convexity) - beta)
    return _checked_exp(exponent, f"supply leg expectation (alpha={alpha})")


def supply_leg_expectation(model: ModelQ, i: int, t, tau, x):
    """Closed-form ``E[exp(alpha_i (G_{tau_e} - beta_i)) | X_t = x]`` for leg ``i``.

    Requires ``t <= tau_e``.  At ``t = tau_e`` the convexity term vanishes
    and the value is the realised supply leg.
    """
    conv = model.conv
    tau_e = np.asarray(tau, dtype=float) + conv.epsilon
    horizon = tau_e - np.asarray(t, dtype=float)
    if np.any(horizon < 0):
        raise DomainError("supply leg expectation requires t <= tau + epsilon")
    alpha, beta = model.supply.leg(i)
    g_tau_e = evaluate(model.load_seasonality, tau_e)
    value = _leg_expectation(alpha, beta, model.ou, g_tau_e, horizon, x)
    return _maybe_scalar(value, t, tau, x)


def forward_price(model: ModelQ, t, tau, x):
    """Undiscounted conditional expectation of the settlement price (a martingale in t)."""
    g3 = evaluate(model.price_seasonality, tau)
    leg1 = supply_leg_expectation(model, 1, t, tau, x)
    leg2 = supply_leg_expectation(model, 2, t, tau, x)
    return _maybe_scalar(leg1 - leg2 + g3, t, tau, x)


def tradable_price(model: ModelQ, t, tau, x):
    """Price at ``t`` of the (hypothetical) storable claim on delivery ``tau``:
    the forward discounted from the settlement date ``tau_e``."""
    conv = model.conv
    tau_e = np.asarray(tau, dtype=float) + conv.epsilon
    horizon = tau_e - np.asarray(t, dtype=float)
    if np.any(horizon < 0):
        raise DomainError("tradable price requires t <= tau + epsilon")
    df = np.exp(-conv.hourly_rate * horizon)
    return _maybe_scalar(df * forward_price(model, t, tau, x), t, tau, x)


def intraday_price(model: ModelQ, tau, x_at_tau):
    """Tradable price quoted at the start of delivery, ``t = tau``."""
    return tradable_price(model, tau, tau, x_at_tau)


def day_ahead_price(model: ModelQ, tau, x_at_tau_minus_delta):
    """Tradable price fixed one day ahead, ``t = tau - delta``; requires ``tau >= delta``."""
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < model.conv.delta):
        raise DomainError(f"day-ahead price needs tau >= delta ({model.conv.delta} h)")
    return tradable_price(model, tau_arr - model.conv.delta, tau, x_at_tau_minus_delta)


def price_generating(model: ModelQ, t, tau, x):
    """Integrand of the martingale representation of the forward price.

    ``sigma e^{-lam (tau_e - t)} [alpha1 L1(t) - alpha2 L2(t)]`` for
    ``t <= tau_e`` and 0 afterwards, with ``L_i`` the supply leg
    expectations.
    """
    conv = model.conv
    t_arr = np.asarray(t, dtype=float)
    tau_e = np.asarray(tau, dtype=float) + conv.epsilon
    live = t_arr <= tau_e
    if not np.any(live):
        return _maybe_scalar(np.zeros(np.broadcast(t_arr, tau_e, np.asarray(x)).shape), t, tau, x)
    t_safe = np.where(live, t_arr, tau_e)
    alpha1, beta1 = model.supply.leg(1)
    alpha2, beta2 = model.supply.leg(2)
    g_tau_e = evaluate(model.load_seasonality, tau_e)
    horizon = tau_e - t_safe
    leg1 = _leg_expectation(alpha1, beta1, model.ou, g_tau_e, horizon, x)
    leg2 = _leg_expectation(alpha2, beta2, model.ou, g_tau_e, horizon, x)
    value = model.ou.sigma * np.exp(-model.ou.lam * horizon) * (alpha1 * leg1 - alpha2 * leg2)
    value = np.where(live, value, 0.0)
    return _maybe_scalar(value, t, tau, x)


def required_state_times(t: float, deliveries: DeliverySet, conv: MarketConventions) -> list[float]:
    """Sorted unique times ``min(t, tau_i - delta)`` at which the driver state
    must be known to price the futures contract at time ``t``."""
    times = {min(t, d.tau - conv.delta) for d in deliveries.taus}
    return sorted(times)


def futures_price(model: ModelQ, t: float, deliveries: DeliverySet,
                  states: Mapping[float, float]) -> float:
    """Price of a futures contract settled against the day-ahead fixings.

    Each delivery contributes its forward frozen at the fixing time
    ``tau_i - delta``; forwards not yet fixed are taken at ``t``.
    ``states`` must map every required time ``min(t, tau_i - delta)``
    (see :func:`required_state_times`) to the driver value there.
    """
    conv = model.conv
    total = 0.0
    for d in deliveries.taus:
        if d.tau < conv.delta:
            raise DomainError(f"delivery at {d.tau} h fixes before the series epoch")
        u = min(t, d.tau - conv.delta)
        if u not in states:
            raise DomainError(f"missing driver state at stopped time {u} h")
        total += forward_price(model, u, d.tau, states[u])
    n = len(deliveries)
    return float(np.exp(-conv.hourly_rate * (conv.delta + conv.epsilon)) / n * total)
