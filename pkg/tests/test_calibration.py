import datetime as dt

import numpy as np
import pytest

import intrinsicprice as ip
from intrinsicprice import DomainError, EstimationError
from intrinsicprice.calibration import PricingObjective


@pytest.fixture(scope="module")
def synthetic(ref_model, ref_theta):
    """Noise-free synthetic quarter plus the true stage outputs."""
    series = ip.generate_synthetic(ref_model, ref_theta, 24 * 100, 0.0, seed=2)
    g_tilde = ip.p_seasonality_from_q(ref_model.load_seasonality, ref_model.ou, ref_theta)
    return series, g_tilde


def tiny_series(n=60, epoch=dt.date(2015, 1, 1)):
    taus = np.arange(n, dtype=float)
    load = 47.0 + np.sin(taus / 5.0)
    prices = 30.0 + np.cos(taus / 7.0)
    return ip.MarketSeries(epoch=epoch, taus=taus, load=load,
                           day_ahead=prices.copy(), intraday=prices.copy())


class TestMarketSeries:
    def test_hourly_grid_enforced(self):
        with pytest.raises(DomainError, match="hourly"):
            ip.MarketSeries(epoch=dt.date(2015, 1, 1), taus=np.array([0.0, 2.0]),
                            load=np.zeros(2), day_ahead=np.zeros(2), intraday=np.zeros(2))

    def test_load_gaps_rejected(self):
        with pytest.raises(DomainError, match="load"):
            ip.MarketSeries(epoch=dt.date(2015, 1, 1), taus=np.arange(3.0),
                            load=np.array([1.0, np.nan, 2.0]),
                            day_ahead=np.zeros(3), intraday=np.zeros(3))

    def test_price_gaps_allowed(self):
        s = ip.MarketSeries(epoch=dt.date(2015, 1, 1), taus=np.arange(3.0),
                            load=np.ones(3), day_ahead=np.array([np.nan, 1.0, 1.0]),
                            intraday=np.full(3, np.nan))
        assert len(s) == 3
        assert s.timestamp(2) == dt.datetime(2015, 1, 1, 2)


class TestPricingObjective:
    def test_zero_at_true_parameters(self, ref_model, ref_theta, synthetic):
        series, g_tilde = synthetic
        value = ip.pricing_objective(ref_model.supply, ref_theta, series, g_tilde,
                                     ref_model.ou, ref_model.price_seasonality, ref_model.conv)
        assert value < 1e-8

    def test_single_observation_arithmetic(self, ref_model, ref_theta, synthetic):
        # one aligned hour, intraday quote off by 2: objective is sqrt(4)/2 = 1
        series, g_tilde = synthetic
        row = 30
        intraday = np.full(len(series), np.nan)
        day_ahead = np.full(len(series), np.nan)
        intraday[row] = series.intraday[row] + 2.0
        day_ahead[row] = series.day_ahead[row]
        bumped = ip.MarketSeries(epoch=series.epoch, taus=series.taus, load=series.load,
                                 day_ahead=day_ahead, intraday=intraday)
        value = ip.pricing_objective(ref_model.supply, ref_theta, bumped, g_tilde,
                                     ref_model.ou, ref_model.price_seasonality, ref_model.conv)
        assert value == pytest.approx(1.0, abs=1e-7)

    def test_overflow_hits_penalty_not_exception(self, ref_model, ref_theta, synthetic):
        series, g_tilde = synthetic
        objective = PricingObjective(series, g_tilde, ref_model.ou,
                                     ref_model.price_seasonality, ref_model.conv)
        absurd = ip.SupplyParams(alpha1=80.0, alpha2=-0.1, beta1=0.0, beta2=0.0)
        assert objective(absurd, 0.0) == 1e12
        assert objective.overflow_evaluations == 1

    def test_invariant_under_observation_order(self, ref_model, ref_theta, synthetic):
        # the objective is a sum over hours; masking to a shuffled subset of
        # rows must give the same value as the sorted subset
        series, g_tilde = synthetic
        rows = np.arange(24, len(series))
        shuffled = rows.copy()
        np.random.default_rng(0).shuffle(shuffled)
        a = PricingObjective(series, g_tilde, ref_model.ou, ref_model.price_seasonality,
                             ref_model.conv, rows=rows)
        b = PricingObjective(series, g_tilde, ref_model.ou, ref_model.price_seasonality,
                             ref_model.conv, rows=shuffled)
        sup = ref_model.supply
        assert a(sup, ref_theta) == b(sup, ref_theta)

    def test_needs_aligned_observations(self, ref_model, synthetic):
        series, g_tilde = synthetic
        empty = ip.MarketSeries(epoch=series.epoch, taus=series.taus, load=series.load,
                                day_ahead=np.full(len(series), np.nan),
                                intraday=np.full(len(series), np.nan))
        with pytest.raises(EstimationError):
            PricingObjective(empty, g_tilde, ref_model.ou,
                             ref_model.price_seasonality, ref_model.conv)


class TestNumericalGradient:
    def test_matches_analytic_on_quadratic(self):
        H = np.array([[2.0, 0.3], [0.3, 1.0]])

        def f(x):
            return 0.5 * x @ H @ x

        x0 = np.array([1.0, -2.0])
        grad = ip.numerical_gradient(f, x0)
        assert np.allclose(grad, H @ x0, rtol=1e-8)

    def test_coarse_step_matches_fine_step(self, ref_model, ref_theta, synthetic):
        series, g_tilde = synthetic
        objective = PricingObjective(series, g_tilde, ref_model.ou,
                                     ref_model.price_seasonality, ref_model.conv)

        def f(u):
            supply = ip.SupplyParams(np.exp(u[0]), -np.exp(u[1]), u[2], u[3])
            return objective(supply, u[4])

        u = np.array([np.log(0.21), np.log(0.17), 44.5, 37.0, 0.001])
        coarse = ip.numerical_gradient(f, u, rel_step=1e-6)
        fine = ip.numerical_gradient(f, u, rel_step=1e-8)
        rel = np.abs(coarse - fine) / np.maximum(np.abs(fine), 1e-12)
        assert np.all(rel < 1e-4)


class TestStageFits:
    def test_load_seasonality_needs_a_year(self):
        with pytest.raises(EstimationError, match="year"):
            ip.fit_load_seasonality(tiny_series(100), ip.Calendar())

    def test_stage_one_two_round_trip(self, ref_model, ref_theta):
        series = ip.generate_synthetic(ref_model, ref_theta, 3 * 8760, 0.5, seed=5)
        g_tilde = ip.fit_load_seasonality(series, ip.Calendar())
        ou_hat = ip.fit_ou(series, g_tilde)
        assert abs(ou_hat.lam / ref_model.ou.lam - 1.0) < 0.10
        assert abs(ou_hat.sigma / ref_model.ou.sigma - 1.0) < 0.05

    def test_noise_free_load_is_degenerate_for_the_ou_fit(self, ref_model):
        # load exactly equal to a seasonal shape leaves only numerical dust
        # as residuals: either the fit refuses or the volatility collapses
        g_tilde = ip.p_seasonality_from_q(ref_model.load_seasonality, ref_model.ou, 0.0)
        taus = np.arange(0.0, 9000.0)
        series = ip.MarketSeries(epoch=g_tilde.epoch, taus=taus,
                                 load=ip.evaluate(g_tilde, taus),
                                 day_ahead=np.full(taus.size, np.nan),
                                 intraday=np.full(taus.size, np.nan))
        fitted_g = ip.fit_load_seasonality(series, ip.Calendar())
        try:
            ou_hat = ip.fit_ou(series, fitted_g)
        except EstimationError:
            return
        assert ou_hat.sigma < 1e-6

    def test_shuffled_residuals_change_the_fit(self, ref_model, ref_theta):
        # the AR structure carries the information; destroying the order
        # must move the estimate materially
        series = ip.generate_synthetic(ref_model, ref_theta, 8760, 0.0, seed=6)
        g_tilde = ip.p_seasonality_from_q(ref_model.load_seasonality, ref_model.ou, ref_theta)
        residuals = series.load - ip.evaluate(g_tilde, series.taus)
        ordered = ip.fit_mle(residuals, dt=1.0)
        shuffled = residuals.copy()
        np.random.default_rng(1).shuffle(shuffled)
        try:
            scrambled = ip.fit_mle(shuffled, dt=1.0)
            assert abs(scrambled.lam - ordered.lam) > 10 * ordered.lam
        except EstimationError:
            pass  # a shuffled sample may legitimately look non-mean-reverting

    def test_price_seasonality_fit_recovers_shape(self, ref_model, ref_theta):
        # with the load deviation almost switched off the mixture target is
        # a deterministic seasonal curve the fit must track closely
        quiet = ip.ModelQ(ou=ip.OuParams(lam=ref_model.ou.lam, sigma=0.01, x0=0.0),
                          supply=ref_model.supply,
                          load_seasonality=ref_model.load_seasonality,
                          price_seasonality=ref_model.price_seasonality,
                          conv=ref_model.conv)
        series = ip.generate_synthetic(quiet, ref_theta, 8760 + 24, 0.0, seed=7)
        fitted = ip.fit_price_seasonality(series, ip.Calendar(), ref_model.conv)
        target = ip.price_seasonality_target(series.day_ahead, series.intraday, ref_model.conv)
        ok = np.isfinite(target)
        predicted = ip.evaluate(fitted, series.taus[ok])
        assert np.corrcoef(predicted, target[ok])[0, 1] > 0.95
        assert np.mean(predicted - target[ok]) == pytest.approx(0.0, abs=1e-9)


class TestInitialGuess:
    def test_noiseless_settlement_prices_recover_exactly(self, ref_model, conv):
        # quotes built directly from the settlement formula at realised load
        rng = np.random.default_rng(3)
        n = 2000
        taus = np.arange(n, dtype=float)
        load = 47.0 + 6.0 * rng.standard_normal(n)
        gamma3 = ip.SeasonalityModel.constant(30.0)
        intraday = np.full(n, np.nan)
        intraday[:-1] = (np.exp(0.1949 * (load[1:] - 43.8799))
                         - np.exp(-0.1796 * (load[1:] - 37.4548)) + 30.0)
        series = ip.MarketSeries(epoch=dt.date(2015, 1, 1), taus=taus, load=load,
                                 day_ahead=np.full(n, np.nan), intraday=intraday)
        guess = ip.initial_supply_guess(series, gamma3, conv)
        assert guess.alpha1 == pytest.approx(0.1949, abs=1e-6)
        assert guess.alpha2 == pytest.approx(-0.1796, abs=1e-6)
        assert guess.beta1 == pytest.approx(43.8799, abs=1e-4)
        assert guess.beta2 == pytest.approx(37.4548, abs=1e-4)

    def test_noisy_quotes_land_near_truth(self, ref_model, ref_theta, conv):
        series = ip.generate_synthetic(ref_model, ref_theta, 24 * 200, 0.5, seed=8)
        guess = ip.initial_supply_guess(series, ref_model.price_seasonality, conv)
        assert abs(guess.alpha1 / 0.1949 - 1.0) < 0.30
        assert abs(guess.alpha2 / -0.1796 - 1.0) < 0.30

    def test_constant_quotes_fall_back_with_diagnostic(self, conv):
        series = tiny_series(400)
        flat = ip.MarketSeries(epoch=series.epoch, taus=series.taus, load=series.load,
                               day_ahead=series.day_ahead,
                               intraday=np.full(len(series), 42.0))
        with pytest.warns(UserWarning, match="defaults"):
            guess = ip.initial_supply_guess(flat, ip.SeasonalityModel.constant(30.0), conv)
        assert guess.alpha1 == 0.2
        assert guess.alpha2 == -0.2
        assert guess.beta1 == pytest.approx(np.mean(series.load))


class TestCalibrateSupplyTheta:
    def test_truth_start_on_clean_data_converges_immediately(self, ref_model, ref_theta,
                                                             synthetic):
        series, g_tilde = synthetic
        result = ip.calibrate_supply_theta(series, g_tilde, ref_model.ou,
                                           ref_model.price_seasonality, ref_model.conv,
                                           init_supply=ref_model.supply,
                                           init_theta=ref_theta)
        assert result.objective_value < 1e-8
        assert result.diagnostics.converged
        assert result.diagnostics.iterations <= 2
        assert result.supply.alpha1 == pytest.approx(0.1949, rel=1e-3)
        # stage 3 hands back the stage-1/2 inputs untouched
        assert result.g_tilde is g_tilde
        assert result.ou is ref_model.ou
        assert result.gamma3 is ref_model.price_seasonality

    def test_never_worse_than_truth_start(self, ref_model, ref_theta, synthetic):
        series, g_tilde = synthetic
        objective = PricingObjective(series, g_tilde, ref_model.ou,
                                     ref_model.price_seasonality, ref_model.conv)
        start = objective(ref_model.supply, ref_theta)
        result = ip.calibrate_supply_theta(series, g_tilde, ref_model.ou,
                                           ref_model.price_seasonality, ref_model.conv,
                                           init_supply=ref_model.supply, init_theta=ref_theta)
        assert result.objective_value <= start + 1e-15

    def test_argmin_matches_sum_of_squares_variant(self, ref_model, ref_theta):
        # the printed normalisation is a monotone transform of the plain
        # sum of squares, so both objectives share their minimiser
        series = ip.generate_synthetic(ref_model, ref_theta, 24 * 40, 0.3, seed=9)
        g_tilde = ip.p_seasonality_from_q(ref_model.load_seasonality, ref_model.ou, ref_theta)
        objective = PricingObjective(series, g_tilde, ref_model.ou,
                                     ref_model.price_seasonality, ref_model.conv)
        import scipy.optimize

        def pack(fn):
            return lambda u: fn(ip.SupplyParams(np.exp(u[0]), -np.exp(u[1]), u[2], u[3]), u[4])

        u0 = np.array([np.log(0.19), np.log(0.18), 43.9, 37.5, 0.0])
        a = scipy.optimize.minimize(pack(objective), u0, method="BFGS",
                                    options={"gtol": 1e-10}).x
        b = scipy.optimize.minimize(pack(objective.sum_of_squares), u0, method="BFGS",
                                    options={"gtol": 1e-10}).x
        assert np.allclose(a, b, atol=1e-4)

    def test_rejects_wrong_sign_start(self):
        with pytest.raises(DomainError):
            ip.SupplyParams(alpha1=0.2, alpha2=0.2, beta1=40.0, beta2=40.0)


class TestFullPipelineAndMonthlyTheta:
    def test_calibrate_runs_end_to_end(self, ref_model, ref_theta):
        series = ip.generate_synthetic(ref_model, ref_theta, 8760 + 30 * 24, 0.5, seed=10)
        result = ip.calibrate(series, ip.Calendar(), ref_model.conv,
                              gamma3=ref_model.price_seasonality)
        assert result.diagnostics.converged
        assert abs(result.supply.alpha1 / 0.1949 - 1.0) < 0.15
        assert abs(result.theta.theta - ref_theta) < 0.002

    def test_monthly_theta_piecewise_recovery(self, ref_model):
        monthly = {"2015-01": -0.03, "2015-02": 0.0, "2015-03": 0.01}
        series = ip.generate_synthetic(ref_model, 0.0, 24 * 90, 0.1, seed=11,
                                       monthly_theta=monthly)
        g_tilde = ip.p_seasonality_from_q(ref_model.load_seasonality, ref_model.ou, 0.0)
        out = ip.implied_theta_monthly(series, g_tilde, ref_model.ou,
                                       ref_model.price_seasonality, ref_model.supply,
                                       ref_model.conv)
        assert len(out) == 3
        for month_start, value in out:
            assert value == pytest.approx(monthly[month_start.strftime("%Y-%m")], abs=0.003)

    def test_single_month_series_gives_single_entry(self, ref_model, ref_theta):
        series = ip.generate_synthetic(ref_model, ref_theta, 744, 0.1, seed=12)
        g_tilde = ip.p_seasonality_from_q(ref_model.load_seasonality, ref_model.ou, ref_theta)
        out = ip.implied_theta_monthly(series, g_tilde, ref_model.ou,
                                       ref_model.price_seasonality, ref_model.supply,
                                       ref_model.conv)
        assert len(out) == 1
        assert out[0][0] == dt.date(2015, 1, 1)

    def test_sparse_month_skipped_with_warning(self, ref_model, ref_theta):
        series = ip.generate_synthetic(ref_model, ref_theta, 24 * 62, 0.1, seed=13)
        # blank out all but 30 aligned hours in the second month
        intraday = series.intraday.copy()
        feb = np.flatnonzero(series.taus >= 31 * 24)
        intraday[feb[30:]] = np.nan
        sparse = ip.MarketSeries(epoch=series.epoch, taus=series.taus, load=series.load,
                                 day_ahead=series.day_ahead, intraday=intraday)
        g_tilde = ip.p_seasonality_from_q(ref_model.load_seasonality, ref_model.ou, ref_theta)
        with pytest.warns(UserWarning, match="skipped"):
            out = ip.implied_theta_monthly(sparse, g_tilde, ref_model.ou,
                                           ref_model.price_seasonality, ref_model.supply,
                                           ref_model.conv)
        assert len(out) == 1
