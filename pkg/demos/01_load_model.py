"""Simulate the hourly load model and estimate it back.

The system load is a deterministic seasonal shape (trend, annual
harmonic, weekday classes, hour-of-day profile) plus a mean-reverting
Gaussian deviation.  This script simulates two years of hourly load,
then runs the first two calibration stages: a least-squares seasonal fit
and exact maximum likelihood for the deviation dynamics.
"""

import numpy as np

import intrinsicprice as ip

model, theta = ip.reference_model()
print("true dynamics:   lam=%.4f  sigma=%.4f  x0=%.4f"
      % (model.ou.lam, model.ou.sigma, model.ou.x0))

# one path of the deviation, assembled into a load series
series = ip.generate_synthetic(model, theta, span_hours=2 * 8760, noise_sd=0.0, seed=1)
print("simulated load:  %d hours, range %.1f .. %.1f"
      % (len(series), series.load.min(), series.load.max()))

# stage 1: seasonal least squares
g_tilde = ip.fit_load_seasonality(series, ip.Calendar())
print("seasonal fit:    level=%.2f  trend/h=%.2e  harmonics=(%.2f, %.2f)"
      % (g_tilde.level, g_tilde.trend, g_tilde.sin_annual, g_tilde.cos_annual))

residuals = series.load - ip.evaluate(g_tilde, series.taus)
print("deseasonalised:  sd=%.2f (stationary sd of the true driver: %.2f)"
      % (residuals.std(), np.sqrt(model.ou.stationary_variance)))

# stage 2: exact AR(1) maximum likelihood on the residuals
ou_hat = ip.fit_ou(series, g_tilde)
print("OU estimate:     lam=%.4f  sigma=%.4f" % (ou_hat.lam, ou_hat.sigma))
print("relative errors: lam %.1f%%  sigma %.1f%%"
      % (100 * abs(ou_hat.lam / model.ou.lam - 1),
         100 * abs(ou_hat.sigma / model.ou.sigma - 1)))

# the transition law behind both simulation and likelihood
mean, var = ip.transition(model.ou, 10.0, 24.0)
print("one-day transition from x=10: mean=%.3f  variance=%.3f" % (mean, var))
