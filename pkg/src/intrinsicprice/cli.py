"""Command-line surface tying the pipeline together.

Subcommands: ``simulate``, ``fit-seasonality``, ``fit-ou``, ``calibrate``,
``price``, ``risk-premium``, ``implied-theta``, ``verify``.  Figure-style
outputs are CSV files for external plotting; reports are key/value text.
Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from pathlib import Path

import numpy as np

from . import calibration, data, oracle
from .conventions import DeliverySet, MarketConventions, load_conventions
from .errors import DomainError, EstimationError, NumericError, ParseError
from .measure import p_seasonality_from_q, q_seasonality_from_p, risk_premium
from .model import ModelQ, SupplyParams, forward_price, futures_price
from .options import (LognormalOptionInputs, NormalOptionInputs, bachelier_call,
                      bachelier_put, black76_call, black76_put)
from .oracle import McConfig
from .ou import OuParams
from .seasonality import Calendar, SeasonalityModel, load_calendar

_SEASONALITY_KEYS = ("level", "trend", "sin_annual", "cos_annual")


def _seasonality_to_dict(model: SeasonalityModel) -> dict:
    return {
        **{k: getattr(model, k) for k in _SEASONALITY_KEYS},
        "dow_weights": [float(w) for w in model.dow_weights],
        "hod_weights": [float(w) for w in model.hod_weights],
    }


def _seasonality_from_dict(d: dict, cal: Calendar, epoch: _dt.date) -> SeasonalityModel:
    return SeasonalityModel(
        **{k: float(d[k]) for k in _SEASONALITY_KEYS},
        dow_weights=np.asarray(d["dow_weights"], dtype=float),
        hod_weights=np.asarray(d["hod_weights"], dtype=float),
        calendar=cal, epoch=epoch)


def model_to_params(model: ModelQ, theta: float) -> dict:
    cal = model.load_seasonality.calendar
    return {
        "epoch": model.load_seasonality.epoch.isoformat(),
        "conventions": {
            "epsilon": model.conv.epsilon, "delta": model.conv.delta,
            "annual_rate": model.conv.annual_rate, "hours_per_year": model.conv.hours_per_year,
        },
        "ou": {"lambda": model.ou.lam, "sigma": model.ou.sigma, "x0": model.ou.x0},
        "supply": {"alpha1": model.supply.alpha1, "alpha2": model.supply.alpha2,
                   "beta1": model.supply.beta1, "beta2": model.supply.beta2},
        "theta": theta,
        "load_seasonality": _seasonality_to_dict(model.load_seasonality),
        "price_seasonality": _seasonality_to_dict(model.price_seasonality),
        "calendar": {
            "holiday": sorted(d.isoformat() for d in cal.holidays),
            "partial": sorted(d.isoformat() for d in cal.partial_holidays),
            "bridge": sorted(d.isoformat() for d in cal.bridge_days),
        },
    }


def model_from_params(params: dict) -> tuple[ModelQ, float]:
    try:
        epoch = _dt.date.fromisoformat(params["epoch"])
        cal_dict = params.get("calendar", {})
        cal = Calendar(
            holidays=frozenset(_dt.date.fromisoformat(d) for d in cal_dict.get("holiday", [])),
            partial_holidays=frozenset(
                _dt.date.fromisoformat(d) for d in cal_dict.get("partial", [])),
            bridge_days=frozenset(_dt.date.fromisoformat(d) for d in cal_dict.get("bridge", [])))
        conv = MarketConventions(**params.get("conventions", {}))
        ou_d = params["ou"]
        ou = OuParams(lam=float(ou_d["lambda"]), sigma=float(ou_d["sigma"]),
                      x0=float(ou_d.get("x0", 0.0)))
        supply = SupplyParams(**{k: float(v) for k, v in params["supply"].items()})
        g = _seasonality_from_dict(params["load_seasonality"], cal, epoch)
        gamma3 = _seasonality_from_dict(params["price_seasonality"], cal, epoch)
        theta = float(params["theta"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed params file: {exc!r}") from exc
    return ModelQ(ou=ou, supply=supply, load_seasonality=g,
                  price_seasonality=gamma3, conv=conv), theta


def load_model_file(path) -> tuple[ModelQ, float]:
    path = Path(path)
    if not path.exists():
        raise ParseError(f"no such file: {path}")
    return model_from_params(json.loads(path.read_text()))


def _write_report(path, pairs):
    lines = [f"{key} {float(value)!r}" if isinstance(value, float) else f"{key} {value}"
             for key, value in pairs]
    Path(path).write_text("\n".join(lines) + "\n")


def _seasonality_report_pairs(model: SeasonalityModel):
    pairs = [("epoch", model.epoch.isoformat())]
    pairs += [(k, float(getattr(model, k))) for k in _SEASONALITY_KEYS]
    pairs += [("dow_mon_fri", float(model.dow_weights[0])),
              ("dow_sat_bridge_partial", float(model.dow_weights[2])),
              ("dow_sun_holiday", float(model.dow_weights[3]))]
    pairs += [(f"hod_{h:02d}", float(model.hod_weights[h])) for h in range(1, 24)]
    return pairs


def read_seasonality_report(path, cal: Calendar) -> SeasonalityModel:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition(" ")
        if not value:
            raise ParseError(f"{path}:{lineno}: expected 'key value'")
        values[key] = value
    try:
        epoch = _dt.date.fromisoformat(values.pop("epoch"))
        dow = np.zeros(4)
        dow[0] = float(values.pop("dow_mon_fri"))
        dow[2] = float(values.pop("dow_sat_bridge_partial"))
        dow[3] = float(values.pop("dow_sun_holiday"))
        hod = np.zeros(24)
        for h in range(1, 24):
            hod[h] = float(values.pop(f"hod_{h:02d}"))
        base = {k: float(values.pop(k)) for k in _SEASONALITY_KEYS}
    except (KeyError, ValueError) as exc:
        raise ParseError(f"{path}: malformed seasonality report: {exc!r}") from exc
    return SeasonalityModel(**base, dow_weights=dow, hod_weights=hod, calendar=cal, epoch=epoch)


def _load_calendar_arg(args) -> Calendar:
    return load_calendar(args.calendar) if getattr(args, "calendar", None) else Calendar()


def _load_conventions_arg(args) -> MarketConventions:
    if getattr(args, "conventions", None):
        return load_conventions(args.conventions)
    return MarketConventions()


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    model, theta = load_model_file(args.params)
    noise = (args.noise, args.noise if args.noise_day_ahead is None else args.noise_day_ahead)
    series = data.generate_synthetic(model, theta, args.span, noise, args.seed)
    data.write_series(series, args.out)
    print(f"wrote {len(series)} hourly rows to {args.out}")
    return 0


def _cmd_fit_seasonality(args) -> int:
    series = data.load_series(args.data)
    cal = _load_calendar_arg(args)
    g_tilde = calibration.fit_load_seasonality(series, cal)
    _write_report(args.out, _seasonality_report_pairs(g_tilde))
    print(f"wrote load seasonality report to {args.out}")
    return 0


def _cmd_fit_ou(args) -> int:
    series = data.load_series(args.data)
    cal = _load_calendar_arg(args)
    g_tilde = calibration.fit_load_seasonality(series, cal)
    ou = calibration.fit_ou(series, g_tilde)
    _write_report(args.out, [("lambda", ou.lam), ("sigma", ou.sigma), ("x0", ou.x0),
                             ("observations", len(series))])
    print(f"wrote OU report to {args.out}")
    return 0


def _cmd_calibrate(args) -> int:
    series = data.load_series(args.data)
    cal = _load_calendar_arg(args)
    conv = _load_conventions_arg(args)
    coverage = data.price_coverage(series)
    for name, info in coverage.items():
        print(f"{name}: {info['present']} quoted hours "
              f"({info['first']} .. {info['last']}), {info['missing']} missing")
    gamma3 = read_seasonality_report(args.gamma3, cal) if args.gamma3 else None
    result = calibration.calibrate(series, cal, conv, gamma3=gamma3,
                                   init_theta=args.init_theta)
    pairs = [("lambda", result.ou.lam), ("sigma", result.ou.sigma), ("x0", result.ou.x0),
             ("alpha1", result.supply.alpha1), ("alpha2", result.supply.alpha2),
             ("beta1", result.supply.beta1), ("beta2", result.supply.beta2),
             ("theta", result.theta.theta), ("objective_value", result.objective_value),
             ("iterations", result.diagnostics.iterations),
             ("converged", result.diagnostics.converged),
             ("overflow_evaluations", result.diagnostics.overflow_evaluations)]
    _write_report(args.out, pairs)
    print(f"wrote calibration report to {args.out}")
    if args.params_out:
        model = ModelQ(ou=result.ou, supply=result.supply,
                       load_seasonality=q_seasonality_from_p(
                           result.g_tilde, result.ou, result.theta.theta),
                       price_seasonality=result.gamma3, conv=conv)
        Path(args.params_out).write_text(
            json.dumps(model_to_params(model, result.theta.theta), indent=2) + "\n")
        print(f"wrote fitted model params to {args.params_out}")
    if not result.diagnostics.converged:
        print("warning: optimiser did not reach the gradient tolerance", file=sys.stderr)
    return 0


def _cmd_price(args) -> int:
    if args.contract == "forward":
        model, _ = load_model_file(args.params)
        value = forward_price(model, args.t, args.tau, args.x)
    elif args.contract == "futures":
        model, _ = load_model_file(args.params)
        deliveries = DeliverySet.from_hours(
            [float(h) for h in args.deliveries.split(",") if h.strip()])
        first_fix = deliveries.hours()[0] - model.conv.delta
        if args.t > first_fix:
            raise DomainError("price futures supports t at or before the first fixing; "
                              f"got t={args.t} > {first_fix}")
        value = futures_price(model, args.t, deliveries, {args.t: args.x})
    else:  # option
        if args.family == "normal":
            inp = NormalOptionInputs(forward=args.forward, strike=args.strike,
                                     sigma_ut=args.sigma_ut, span=args.span, rate=args.rate)
            value = bachelier_put(inp) if args.put else bachelier_call(inp)
        else:
            inp = LognormalOptionInputs(forward=args.forward, strike=args.strike,
                                        var_integral=args.var_integral, span=args.span,
                                        rate=args.rate)
            price = black76_put if args.put else black76_call
            value = price(inp, conventional=args.conventional)
    print(repr(float(value)))
    return 0


def _cmd_risk_premium(args) -> int:
    model, theta = load_model_file(args.params)
    if args.t_step <= 0 or args.t_end < args.t_start:
        raise DomainError("need t_step > 0 and t_end >= t_start")
    n_points = int(np.floor((args.t_end - args.t_start) / args.t_step + 1e-9)) + 1
    t_grid = args.t_start + args.t_step * np.arange(n_points)
    lines = ["t,premium"]
    for t in t_grid:
        pi = risk_premium(model, theta, float(t), args.tau, args.x_tilde)
        lines.append(f"{float(t)!r},{float(pi)!r}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"wrote {t_grid.size} premium points to {args.out}")
    return 0


def _cmd_implied_theta(args) -> int:
    model, theta = load_model_file(args.params)
    series = data.load_series(args.data)
    # params files store the pricing-measure shape; the objective wants the real-world fit
    g_tilde = p_seasonality_from_q(model.load_seasonality, model.ou, theta)
    monthly = calibration.implied_theta_monthly(
        series, g_tilde=g_tilde, ou=model.ou, gamma3=model.price_seasonality,
        supply=model.supply, conv=model.conv)
    lines = ["month,theta"] + [f"{d.strftime('%Y-%m')},{value!r}" for d, value in monthly]
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"wrote {len(monthly)} monthly theta values to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    if args.params:
        model, theta = load_model_file(args.params)
    else:
        model, theta = data.reference_model()
    cfg = McConfig(n_paths=args.paths, seed=args.seed, mutation_drift=args.mutation)
    checks = oracle.run_verification_suite(model, theta, cfg, nested_paths=args.nested_paths)
    print(oracle.format_report(checks))
    counted = [c for c in checks if not c.informational]
    failures = [c for c in counted if not c.passed]
    print(f"{len(counted) - len(failures)}/{len(counted)} checks passed "
          f"(paths={args.paths}, seed={args.seed}, mutation={args.mutation})")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intrinsicprice",
        description="Structural electricity pricing: simulation, calibration, "
                    "contract valuation, and Monte Carlo verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic market data CSV")
    p.add_argument("--params", required=True, help="model params JSON")
    p.add_argument("--span", type=int, required=True, help="hours to simulate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.5, help="intraday noise sd")
    p.add_argument("--noise-day-ahead", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit-seasonality", help="stage 1: load seasonality report")
    p.add_argument("--data", required=True)
    p.add_argument("--calendar", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fit_seasonality)

    p = sub.add_parser("fit-ou", help="stage 2: OU parameter report")
    p.add_argument("--data", required=True)
    p.add_argument("--calendar", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fit_ou)

    p = sub.add_parser("calibrate", help="full pipeline; writes a parameter report")
    p.add_argument("--data", required=True)
    p.add_argument("--calendar", default=None)
    p.add_argument("--conventions", default=None)
    p.add_argument("--gamma3", default=None,
                   help="seasonality report file fixing the price seasonality")
    p.add_argument("--init-theta", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.add_argument("--params-out", default=None,
                   help="also write the fitted model as a params JSON")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("price", help="value a single contract")
    psub = p.add_subparsers(dest="contract", required=True)
    pf = psub.add_parser("forward")
    pf.add_argument("--params", required=True)
    pf.add_argument("--t", type=float, required=True)
    pf.add_argument("--tau", type=float, required=True)
    pf.add_argument("--x", type=float, default=0.0, help="driver state at t")
    pf.set_defaults(func=_cmd_price)
    pu = psub.add_parser("futures")
    pu.add_argument("--params", required=True)
    pu.add_argument("--t", type=float, required=True)
    pu.add_argument("--deliveries", required=True, help="comma list of delivery hours")
    pu.add_argument("--x", type=float, default=0.0)
    pu.set_defaults(func=_cmd_price)
    po = psub.add_parser("option")
    po.add_argument("--family", choices=("normal", "lognormal"), required=True)
    po.add_argument("--forward", type=float, required=True)
    po.add_argument("--strike", type=float, required=True)
    po.add_argument("--sigma-ut", type=float, default=0.0,
                    help="integrated std dev (normal family)")
    po.add_argument("--var-integral", type=float, default=0.0,
                    help="integrated variance (lognormal family)")
    po.add_argument("--span", type=float, default=0.0, help="discount span in hours")
    po.add_argument("--rate", type=float, default=0.0, help="hourly rate")
    po.add_argument("--put", action="store_true")
    po.add_argument("--conventional", action="store_true",
                    help="use the half-variance d_pm convention")
    po.set_defaults(func=_cmd_price)

    p = sub.add_parser("risk-premium", help="premium path over a grid of trading times")
    p.add_argument("--params", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--t-start", type=float, required=True)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--t-step", type=float, default=24.0)
    p.add_argument("--x-tilde", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_risk_premium)

    p = sub.add_parser("implied-theta", help="monthly implied measure-change parameter")
    p.add_argument("--params", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_implied_theta)

    p = sub.add_parser("verify", help="run the Monte Carlo verification suite")
    p.add_argument("--params", default=None)
    p.add_argument("--paths", type=int, default=1_000_000)
    p.add_argument("--nested-paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mutation", type=float, default=0.0)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, DomainError, EstimationError, NumericError,
            FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
