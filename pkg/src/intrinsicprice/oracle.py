"""Brute-force Monte Carlo verification of every closed-form price.

Terminal quantities are sampled with exact OU transitions so that any
disagreement measures formula error, not discretisation error; fine Euler
grids appear only in the pathwise representation check.  Estimates are
produced in fixed-size batches, each drawing from an independent
substream of the master seed, with a fixed reduction order, so a given
seed is bitwise reproducible.

A mutation mode (``McConfig.mutation_drift``) adds a constant drift to
every simulated dynamic; agreement checks must demonstrably fail under
it, which proves they have statistical power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .conventions import DeliverySet
from .errors import DomainError
from .measure import radon_nikodym_path, risk_premium, to_risk_neutral_state
from .model import (ModelQ, forward_price, futures_price, intraday_price,
                    day_ahead_price, intrinsic_price, price_generating,
                    tradable_price)
from .options import (LognormalOptionInputs, NormalOptionInputs,
                      bachelier_call, bachelier_put, black76_call, black76_put)
from .ou import OuParams, transition
from .seasonality import evaluate

_BATCH = 1 << 18


@dataclass(frozen=True)
class McConfig:
    n_paths: int = 1_000_000
    seed: int = 0
    time_step: float = 1e-3        # pathwise representation checks only
    antithetic: bool = False
    mutation_drift: float = 0.0    # constant drift injected into simulated dynamics

    def __post_init__(self):
        if self.n_paths < 2:
            raise DomainError(f"need at least 2 paths, got {self.n_paths}")
        if not self.time_step > 0:
            raise DomainError(f"time step must be positive, got {self.time_step}")
        if self.antithetic and self.n_paths % 2:
            raise DomainError("antithetic sampling needs an even path count")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_paths: int

    def __post_init__(self):
        if self.std_error < 0:
            raise DomainError("standard error cannot be negative")


@dataclass(frozen=True)
class OracleCheck:
    """One closed-form-versus-Monte-Carlo comparison."""

    name: str
    closed_form: float
    estimate: McEstimate
    informational: bool = False   # reported but not counted as a failure

    @property
    def z(self) -> float:
        gap = self.estimate.mean - self.closed_form
        if self.estimate.std_error == 0.0:
            # deterministic case: equality up to accumulation rounding
            scale = max(abs(self.closed_form), abs(self.estimate.mean), 1e-300)
            return 0.0 if abs(gap) <= 1e-12 * scale else math.inf
        return gap / self.estimate.std_error

    @property
    def passed(self) -> bool:
        return abs(self.z) <= 3.0

    def report_line(self) -> str:
        verdict = "recorded" if self.informational else ("PASS" if self.passed else "FAIL")
        return (f"{self.name:<42s} closed={self.closed_form:+.6f} "
                f"mc={self.estimate.mean:+.6f} se={self.estimate.std_error:.2e} "
                f"z={self.z:+8.2f} {verdict}")


def format_report(checks) -> str:
    return "\n".join(c.report_line() for c in checks)


def all_passed(checks) -> bool:
    return all(c.passed for c in checks if not c.informational)


def _run_batches(cfg: McConfig, n_normals: int, values_fn) -> McEstimate:
    """Estimate the mean of ``values_fn(Z)`` over standard-normal draws
    ``Z`` of shape (paths, n_normals).  Antithetic pairing averages each
    mirrored pair before the reduction so the standard error stays honest."""
    seed_seq = np.random.SeedSequence(cfg.seed)
    n_batches = -(-cfg.n_paths // _BATCH)
    children = seed_seq.spawn(n_batches)

    count = 0
    total = 0.0
    total_sq = 0.0
    remaining = cfg.n_paths
    for child in children:
        m = min(_BATCH, remaining)
        remaining -= m
        rng = np.random.default_rng(child)
        if cfg.antithetic:
            half = rng.standard_normal((m // 2, n_normals))
            z = np.concatenate([half, -half], axis=0)
            values = np.asarray(values_fn(z), dtype=float)
            units = 0.5 * (values[: m // 2] + values[m // 2:])
        else:
            z = rng.standard_normal((m, n_normals))
            units = np.asarray(values_fn(z), dtype=float)
        count += units.size
        total += float(units.sum())
        total_sq += float(units @ units)

    mean = total / count
    if count > 1:
        var = max(total_sq - count * mean * mean, 0.0) / (count - 1)
        se = math.sqrt(var / count)
    else:
        se = 0.0
    return McEstimate(mean=mean, std_error=se, n_paths=cfg.n_paths)


def _scale(est: McEstimate, factor: float, offset: float = 0.0) -> McEstimate:
    return McEstimate(mean=offset + factor * est.mean,
                      std_error=abs(factor) * est.std_error, n_paths=est.n_paths)


def _step_moments(ou: OuParams, dt: float, mutation: float) -> tuple[float, float, float]:
    """Decay, deterministic mean shift, and standard deviation of one exact step."""
    decay = math.exp(-ou.lam * dt)
    shift = mutation * -math.expm1(-ou.lam * dt) / ou.lam if mutation else 0.0
    _, var = transition(ou, 0.0, dt)
    return decay, shift, math.sqrt(var)


# ---------------------------------------------------------------------------
# direct price estimators
# ---------------------------------------------------------------------------

def mc_forward(model: ModelQ, t: float, tau: float, x_t: float, cfg: McConfig) -> McEstimate:
    """Estimate the conditional expectation of the settlement price by
    drawing the ex-post driver state in a single exact transition."""
    horizon = tau + model.conv.epsilon - t
    if horizon < 0:
        raise DomainError("mc_forward requires t <= tau + epsilon")
    decay, shift, sd = _step_moments(model.ou, horizon, cfg.mutation_drift)
    g_tau_e = evaluate(model.load_seasonality, tau + model.conv.epsilon)
    mean_x = decay * x_t + shift

    def values(z):
        x_end = mean_x + sd * z[:, 0]
        return intrinsic_price(model, g_tau_e + x_end, tau)

    return _run_batches(cfg, 1, values)


def mc_tradable(model: ModelQ, t: float, tau: float, x_t: float, cfg: McConfig) -> McEstimate:
    df = math.exp(-model.conv.hourly_rate * (tau + model.conv.epsilon - t))
    return _scale(mc_forward(model, t, tau, x_t, cfg), df)


def mc_day_ahead_tower(model: ModelQ, tau: float, x_at_fix: float, cfg: McConfig) -> OracleCheck:
    """Average at-delivery quote from the fixing state against
    ``e^{r delta} S(tau)``."""
    conv = model.conv
    decay, shift, sd = _step_moments(model.ou, conv.delta, cfg.mutation_drift)
    mean_x = decay * x_at_fix + shift

    def values(z):
        return intraday_price(model, tau, mean_x + sd * z[:, 0])

    estimate = _run_batches(cfg, 1, values)
    closed = math.exp(conv.hourly_rate * conv.delta) * day_ahead_price(model, tau, x_at_fix)
    return OracleCheck("day-ahead tower identity", closed, estimate)


def mc_futures(model: ModelQ, t: float, deliveries: DeliverySet, x_t: float,
               cfg: McConfig) -> McEstimate:
    """Average the discounted settlement payoff of the delivery strip;
    only valid before the first fixing, where the closed form needs a
    single state."""
    conv = model.conv
    taus = deliveries.hours()
    if t > taus[0] - conv.delta:
        raise DomainError("mc_futures requires t at or before the first fixing")
    sample_times = [tau + conv.epsilon for tau in taus]
    steps = np.diff([t] + sample_times)
    moments = [_step_moments(model.ou, float(dt), cfg.mutation_drift) for dt in steps]
    g_vals = [evaluate(model.load_seasonality, tau + conv.epsilon) for tau in taus]
    weight = math.exp(-conv.hourly_rate * (conv.delta + conv.epsilon)) / len(taus)

    def values(z):
        x = np.full(z.shape[0], x_t)
        payoff = np.zeros(z.shape[0])
        for k, (decay, shift, sd) in enumerate(moments):
            x = decay * x + shift + sd * z[:, k]
            payoff += intrinsic_price(model, g_vals[k] + x, taus[k])
        return weight * payoff

    return _run_batches(cfg, len(taus), values)


# ---------------------------------------------------------------------------
# risk premium estimators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RiskPremiumMc:
    """Two independent premium estimators plus the closed form.

    ``direct`` simulates the deseasonalised deviation under the
    real-world dynamics and maps it to the driver with the exact shift;
    ``weighted`` samples under the pricing measure and reweights by the
    density process.  The two must agree within their joint error."""

    closed_form: float
    direct: McEstimate
    weighted: McEstimate

    @property
    def cross_z(self) -> float:
        se = math.hypot(self.direct.std_error, self.weighted.std_error)
        gap = self.direct.mean - self.weighted.mean
        if se == 0.0:
            return 0.0 if gap == 0.0 else math.inf
        return gap / se

    def checks(self) -> list[OracleCheck]:
        return [
            OracleCheck("risk premium (direct real-world MC)", self.closed_form, self.direct),
            OracleCheck("risk premium (density-weighted MC)", self.closed_form, self.weighted),
        ]


def mc_risk_premium(model: ModelQ, theta: float, t: float, tau: float,
                    x_tilde_t: float, cfg: McConfig) -> RiskPremiumMc:
    if t > tau:
        raise DomainError("mc_risk_premium requires t <= tau")
    ou = model.ou
    span = tau - t
    f_t = forward_price(model, t, tau, to_risk_neutral_state(x_tilde_t, ou, theta, t))

    # (a) direct: real-world transition of the centred deviation, exact shift at tau
    decay, shift, sd = _step_moments(ou, span, cfg.mutation_drift)
    mean_xt = decay * x_tilde_t + shift
    tau_shift = to_risk_neutral_state(0.0, ou, theta, tau, mode="exact")

    def values_direct(z):
        x_tau = (mean_xt + sd * z[:, 0]) + tau_shift
        return intraday_price(model, tau, x_tau)

    est_a = _run_batches(cfg, 1, values_direct)

    # (b) density-weighted: pricing-measure sampling of (W increment, OU integral)
    drift_rate = ou.lam * theta
    x_q = to_risk_neutral_state(x_tilde_t, ou, theta, t, mode="exact")
    if span > 0:
        var_w = span
        var_i = -math.expm1(-2.0 * ou.lam * span) / (2.0 * ou.lam)
        cov = -math.expm1(-ou.lam * span) / ou.lam
        slope = cov / var_w
        resid_sd = math.sqrt(max(var_i - cov**2 / var_w, 0.0))
    else:
        var_w = slope = resid_sd = 0.0

    def values_weighted(z):
        dw = math.sqrt(var_w) * z[:, 0]
        integral = slope * dw + resid_sd * z[:, 1]
        x_tau = decay * x_q + shift + ou.sigma * integral
        density = np.exp(drift_rate * dw - 0.5 * drift_rate**2 * span)
        return density * intraday_price(model, tau, x_tau)

    weighted_cfg = replace(cfg, seed=cfg.seed + 1)
    est_b = _run_batches(weighted_cfg, 2, values_weighted)

    closed = risk_premium(model, theta, t, tau, x_tilde_t)
    return RiskPremiumMc(closed_form=closed,
                         direct=_scale(est_a, -1.0, offset=f_t),
                         weighted=_scale(est_b, -1.0, offset=f_t))


# ---------------------------------------------------------------------------
# option estimators
# ---------------------------------------------------------------------------

def mc_option(inputs, payoff: str, cfg: McConfig) -> McEstimate:
    """Average discounted payoff for the normal or lognormal futures law.

    Mutation shifts the location by ``mutation_drift * span`` (additively
    for the normal family, in the log for the lognormal one).
    """
    if payoff not in ("call", "put"):
        raise DomainError(f"payoff must be 'call' or 'put', got {payoff!r}")
    sign = 1.0 if payoff == "call" else -1.0
    df = math.exp(-inputs.rate * inputs.span)
    bump = cfg.mutation_drift * inputs.span

    if isinstance(inputs, NormalOptionInputs):
        def values(z):
            f_end = inputs.forward + bump + inputs.sigma_ut * z[:, 0]
            return df * np.maximum(sign * (f_end - inputs.strike), 0.0)
    elif isinstance(inputs, LognormalOptionInputs):
        root_v = math.sqrt(inputs.var_integral)

        def values(z):
            f_end = inputs.forward * np.exp(-0.5 * inputs.var_integral + root_v * z[:, 0] + bump)
            return df * np.maximum(sign * (f_end - inputs.strike), 0.0)
    else:
        raise DomainError(f"unsupported option inputs type {type(inputs).__name__}")

    return _run_batches(cfg, 1, values)


def mc_lognormal_forward(f0: float, var_integral: float, cfg: McConfig) -> McEstimate:
    """Mean of the lognormal forward representation (must reproduce ``f0``)."""
    root_v = math.sqrt(var_integral)

    def values(z):
        return f0 * np.exp(-0.5 * var_integral + root_v * z[:, 0])

    return _run_batches(cfg, 1, values)


# ---------------------------------------------------------------------------
# density / measure-change checks
# ---------------------------------------------------------------------------

def mc_density_unit_mean(ou: OuParams, theta: float, horizon: float, cfg: McConfig,
                         n_steps: int = 8) -> OracleCheck:
    """The density process has unit expectation at the horizon."""
    grid = np.linspace(0.0, horizon, n_steps + 1)
    sqrt_h = math.sqrt(horizon / n_steps)
    drift_rate = ou.lam * theta

    def values(z):
        nu = radon_nikodym_path(drift_rate, sqrt_h * z, grid)
        return nu[:, -1]

    return OracleCheck("density process unit mean", 1.0, _run_batches(cfg, n_steps, values))


def mc_girsanov_moments(ou: OuParams, theta: float, horizon: float, cfg: McConfig,
                        n_steps: int = 8) -> list[OracleCheck]:
    """Weighting pricing-measure samples by the density must reproduce the
    real-world mean and variance of the centred deviation."""
    grid = np.linspace(0.0, horizon, n_steps + 1)
    h = horizon / n_steps
    drift_rate = ou.lam * theta
    decay = math.exp(-ou.lam * h)
    var_w = h
    var_i = -math.expm1(-2.0 * ou.lam * h) / (2.0 * ou.lam)
    cov = -math.expm1(-ou.lam * h) / ou.lam
    slope = cov / var_w
    resid_sd = math.sqrt(max(var_i - cov**2 / var_w, 0.0))
    # centred deviation under P built from the sampled Brownian path
    theta_pull = ou.sigma * theta * -math.expm1(-ou.lam * h)

    mean_p, var_p = transition(ou, ou.x0, horizon)

    def terminal(z):
        n = z.shape[0]
        x = np.full(n, ou.x0)
        dw = math.sqrt(var_w) * z[:, :n_steps]
        integral = slope * dw + resid_sd * z[:, n_steps:]
        for k in range(n_steps):
            x = decay * x - theta_pull + ou.sigma * integral[:, k]
        nu = radon_nikodym_path(drift_rate, dw, grid)[:, -1]
        return x, nu

    def values_mean(z):
        x, nu = terminal(z)
        return nu * x

    def values_second(z):
        x, nu = terminal(z)
        return nu * x * x

    first = _run_batches(cfg, 2 * n_steps, values_mean)
    second = _run_batches(replace(cfg, seed=cfg.seed + 1), 2 * n_steps, values_second)
    return [
        OracleCheck("density-weighted mean of real-world deviation", mean_p, first),
        OracleCheck("density-weighted second moment of real-world deviation",
                    var_p + mean_p**2, second),
    ]


# ---------------------------------------------------------------------------
# martingale checks (nested simulation)
# ---------------------------------------------------------------------------

def mc_martingale_check(model: ModelQ, t_list, tau: float, cfg: McConfig,
                        x_start: float | None = None,
                        discounted: bool = False) -> list[OracleCheck]:
    """For consecutive times the conditional average of the later forward
    (or discounted tradable) price must equal the earlier one.

    States along the checkpoints follow the conditional mean, so every
    comparison is a genuine conditional expectation test from a fixed
    state.
    """
    t_list = [float(t) for t in t_list]
    if any(b <= a for a, b in zip(t_list, t_list[1:])):
        raise DomainError("t_list must be strictly increasing")
    if t_list[-1] > tau + model.conv.epsilon:
        raise DomainError("martingale checkpoints must not pass tau + epsilon")
    x = model.ou.x0 if x_start is None else float(x_start)
    r_h = model.conv.hourly_rate

    def quote(t, state):
        if discounted:
            return np.exp(-r_h * np.asarray(t)) * tradable_price(model, t, tau, state)
        return forward_price(model, t, tau, state)

    checks = []
    label = "discounted tradable" if discounted else "forward"
    for t, u in zip(t_list, t_list[1:]):
        decay, shift, sd = _step_moments(model.ou, u - t, cfg.mutation_drift)
        mean_x = decay * x + shift

        def values(z, _u=u, _mean=mean_x, _sd=sd):
            return quote(_u, _mean + _sd * z[:, 0])

        estimate = _run_batches(cfg, 1, values)
        closed = float(quote(t, x))
        checks.append(OracleCheck(f"{label} martingale {t:g}h -> {u:g}h", closed, estimate))
        x = mean_x
    return checks


def mc_futures_martingale(model: ModelQ, t_list, deliveries: DeliverySet, cfg: McConfig,
                          x_start: float | None = None) -> list[OracleCheck]:
    """Same tower test for the futures price, crossing fixing times.

    The backbone state history (conditional means) supplies the frozen
    forwards for fixings that lie in the past of a checkpoint.
    """
    conv = model.conv
    t_list = [float(t) for t in t_list]
    if any(b <= a for a, b in zip(t_list, t_list[1:])):
        raise DomainError("t_list must be strictly increasing")
    taus = deliveries.hours()
    fixings = [tau - conv.delta for tau in taus]
    if fixings[0] < t_list[0]:
        raise DomainError("first checkpoint must not lie beyond the first fixing")
    weight = math.exp(-conv.hourly_rate * (conv.delta + conv.epsilon)) / len(taus)

    # deterministic backbone through checkpoints and fixings
    backbone_times = sorted(set(t_list) | {f for f in fixings if f >= t_list[0]})
    x = model.ou.x0 if x_start is None else float(x_start)
    backbone = {backbone_times[0]: x}
    for a, b in zip(backbone_times, backbone_times[1:]):
        decay, shift, _ = _step_moments(model.ou, b - a, cfg.mutation_drift)
        x = decay * x + shift
        backbone[b] = x

    def closed_futures(t):
        states = {min(t, f): backbone[min(t, f)] for f in fixings}
        return futures_price(model, t, deliveries, states)

    checks = []
    for t, u in zip(t_list, t_list[1:]):
        frozen = sum(weight * forward_price(model, f, tau, backbone[f])
                     for f, tau in zip(fixings, taus) if f <= t)
        live = [(f, tau) for f, tau in zip(fixings, taus) if f > t]
        sim_times = sorted({min(u, f) for f, _ in live})
        steps = np.diff([t] + sim_times)
        moments = [_step_moments(model.ou, float(dt), cfg.mutation_drift) for dt in steps]

        def values(z, _frozen=frozen, _live=live, _sim=sim_times, _mom=moments, _u=u, _t=t):
            state = {}
            xx = np.full(z.shape[0], backbone[_t])
            for k, (decay, shift, sd) in enumerate(_mom):
                xx = decay * xx + shift + sd * z[:, k]
                state[_sim[k]] = xx
            total = np.full(z.shape[0], _frozen)
            for f, tau in _live:
                total = total + weight * forward_price(model, min(_u, f), tau, state[min(_u, f)])
            return total

        estimate = _run_batches(cfg, max(len(sim_times), 1), values)
        checks.append(OracleCheck(f"futures martingale {t:g}h -> {u:g}h",
                                  closed_futures(t), estimate))
    return checks


# ---------------------------------------------------------------------------
# pathwise representation check
# ---------------------------------------------------------------------------

def euler_representation_error(model: ModelQ, tau: float, t0: float, span: float,
                               cfg: McConfig, x_t0: float,
                               h_list=None) -> dict[float, float]:
    """Mean absolute gap between exact forward increments and the Euler sum
    of the representation integrand, per step size.

    By default the step sizes are ``(4, 2, 1) * cfg.time_step``; an
    explicit list must consist of integer multiples of its smallest
    entry, so the comparison runs on one shared Brownian path per draw.
    """
    if h_list is None:
        h_list = [4.0 * cfg.time_step, 2.0 * cfg.time_step, cfg.time_step]
    n_paths, seed = cfg.n_paths, cfg.seed
    h_list = sorted(float(h) for h in h_list)
    h_fine = h_list[0]
    n_fine = int(round(span / h_fine))
    if abs(n_fine * h_fine - span) > 1e-12 * span:
        raise DomainError("span must be an integer number of fine steps")
    factors = []
    for h in h_list:
        m = int(round(h / h_fine))
        if abs(m * h_fine - h) > 1e-12 * h or n_fine % m:
            raise DomainError("step sizes must be integer multiples of the smallest, "
                              "dividing the span")
        factors.append(m)

    ou = model.ou
    decay = math.exp(-ou.lam * h_fine)
    var_w = h_fine
    var_i = -math.expm1(-2.0 * ou.lam * h_fine) / (2.0 * ou.lam)
    cov = -math.expm1(-ou.lam * h_fine) / ou.lam
    slope = cov / var_w
    resid_sd = math.sqrt(max(var_i - cov**2 / var_w, 0.0))

    rng = np.random.default_rng(seed)
    batch = 65536
    sums = {h: 0.0 for h in h_list}
    done = 0
    while done < n_paths:
        m = min(batch, n_paths - done)
        dw = math.sqrt(var_w) * rng.standard_normal((m, n_fine))
        resid = resid_sd * rng.standard_normal((m, n_fine))
        x = np.empty((m, n_fine + 1))
        x[:, 0] = x_t0
        for k in range(n_fine):
            integral = slope * dw[:, k] + resid[:, k]
            x[:, k + 1] = decay * x[:, k] + ou.sigma * integral
        df = forward_price(model, t0 + span, tau, x[:, -1]) - forward_price(model, t0, tau, x[:, 0])
        for h, fac in zip(h_list, factors):
            idx = np.arange(0, n_fine, fac)
            dw_coarse = dw.reshape(m, n_fine // fac, fac).sum(axis=2)
            total = np.zeros(m)
            for j, k in enumerate(idx):
                t_k = t0 + k * h_fine
                total += price_generating(model, t_k, tau, x[:, k]) * dw_coarse[:, j]
            sums[h] += float(np.abs(df - total).sum())
        done += m
    return {h: sums[h] / n_paths for h in h_list}


# ---------------------------------------------------------------------------
# standard verification suite
# ---------------------------------------------------------------------------

def run_verification_suite(model: ModelQ, theta: float, cfg: McConfig,
                           nested_paths: int = 100_000) -> list[OracleCheck]:
    """Closed-form/oracle agreement for every priced quantity, the
    martingale suite, the measure-change identities, and the lognormal
    ``d_pm`` adjudication.  Nested (martingale) checks run at
    ``nested_paths`` paths; everything else at ``cfg.n_paths``."""
    conv = model.conv
    ou = model.ou
    tau = 90.0 * conv.delta             # delivery ~3 months into the series
    x_ref = math.sqrt(ou.stationary_variance)
    nested_cfg = replace(cfg, n_paths=min(cfg.n_paths, nested_paths))

    checks: list[OracleCheck] = []

    t = tau - 168.0
    checks.append(OracleCheck("forward price", forward_price(model, t, tau, x_ref),
                              mc_forward(model, t, tau, x_ref, cfg)))
    checks.append(OracleCheck("tradable price", tradable_price(model, t, tau, x_ref),
                              mc_tradable(model, t, tau, x_ref, cfg)))
    checks.append(OracleCheck("intraday price (one-period expectation)",
                              intraday_price(model, tau, x_ref),
                              mc_tradable(model, tau, tau, x_ref, cfg)))
    checks.append(OracleCheck("day-ahead price (one-day expectation)",
                              day_ahead_price(model, tau, x_ref),
                              mc_tradable(model, tau - conv.delta, tau, x_ref, cfg)))
    checks.append(mc_day_ahead_tower(model, tau, x_ref, cfg))

    strip = DeliverySet.from_hours([tau + k for k in range(24)])
    t_fut = tau - conv.delta - 48.0
    checks.append(OracleCheck(
        "futures price (24h strip)",
        futures_price(model, t_fut, strip, {t_fut: x_ref}),
        mc_futures(model, t_fut, strip, x_ref, cfg)))

    premium = mc_risk_premium(model, theta, tau - 168.0, tau, x_ref, cfg)
    checks.extend(premium.checks())
    joint = McEstimate(mean=premium.weighted.mean,
                       std_error=math.hypot(premium.direct.std_error,
                                            premium.weighted.std_error),
                       n_paths=premium.weighted.n_paths)
    checks.append(OracleCheck("risk premium estimator cross-check",
                              premium.direct.mean, joint))

    checks.append(mc_density_unit_mean(ou, theta, 168.0, cfg))
    checks.extend(mc_girsanov_moments(ou, theta, 96.0, cfg))

    f_ref = forward_price(model, t, tau, x_ref)
    normal_inp = NormalOptionInputs(forward=f_ref, strike=0.95 * f_ref, sigma_ut=0.1 * f_ref,
                                    span=24.0, rate=conv.hourly_rate)
    checks.append(OracleCheck("normal option call", bachelier_call(normal_inp),
                              mc_option(normal_inp, "call", cfg)))
    checks.append(OracleCheck("normal option put", bachelier_put(normal_inp),
                              mc_option(normal_inp, "put", cfg)))
    logn_inp = LognormalOptionInputs(forward=f_ref, strike=0.95 * f_ref, var_integral=0.04,
                                     span=24.0, rate=conv.hourly_rate)
    lover = mc_option(logn_inp, "call", cfg)
    checks.append(OracleCheck("lognormal option call (conventional d_pm)",
                              black76_call(logn_inp, conventional=True), lover))
    checks.append(OracleCheck("lognormal option call (verbatim d_pm)",
                              black76_call(logn_inp, conventional=False), lover,
                              informational=True))
    checks.append(OracleCheck("lognormal option put (conventional d_pm)",
                              black76_put(logn_inp, conventional=True),
                              mc_option(logn_inp, "put", cfg)))
    checks.append(OracleCheck("lognormal forward unit drift",
                              f_ref, mc_lognormal_forward(f_ref, 0.04, cfg)))

    checks.extend(mc_martingale_check(model, [tau - 336.0, tau - 168.0, tau - 24.0],
                                      tau, nested_cfg, x_start=x_ref))
    checks.extend(mc_martingale_check(model, [tau - 336.0, tau - 168.0], tau, nested_cfg,
                                      x_start=x_ref, discounted=True))
    checks.extend(mc_futures_martingale(
        model, [t_fut - 96.0, t_fut, strip.hours()[6] - conv.delta + 0.5], strip,
        nested_cfg, x_start=x_ref))
    return checks
