"""Price every standard contract off one state of the load driver.

All quotes are conditional expectations of the same unobservable
settlement price: the forward is its plain expectation, the tradable
price discounts from the settlement date, the intraday and day-ahead
quotes are the tradable price at the last two canonical trading times,
and a futures contract averages forwards frozen at their fixing times.
"""


import intrinsicprice as ip

model, _ = ip.reference_model()
conv = model.conv
tau = 90.0 * 24.0 + 12.0          # delivery hour: noon, ninety days in
x = 3.0                           # current load deviation

print("delivery hour tau = %.0f, driver state x = %.1f" % (tau, x))
print("realised-settlement preview at that state: %.2f"
      % ip.intrinsic_price(model, ip.evaluate(model.load_seasonality, tau + 1) + x, tau))
print()

print("forward term structure (same delivery, earlier trading times):")
for back in (1.0, 24.0, 168.0, 720.0, 2000.0):
    t = tau - back
    f = ip.forward_price(model, t, tau, x)
    p = ip.tradable_price(model, t, tau, x)
    print("  t = tau-%5.0fh   forward %8.3f   tradable %8.3f" % (back, f, p))
print()

print("spot-style quotes:")
print("  intraday  I(tau)  = %8.3f" % ip.intraday_price(model, tau, x))
print("  day-ahead S(tau)  = %8.3f (fixed at tau - %.0fh)"
      % (ip.day_ahead_price(model, tau, x), conv.delta))
print()

# a one-day futures strip, priced before its first fixing
strip = ip.DeliverySet.from_hours([tau + k for k in range(24)])
t = tau - conv.delta - 48.0
value = ip.futures_price(model, t, strip, {t: x})
print("24-hour futures strip at t = first fixing - 48h: %.3f" % value)
print("needed driver states:", ip.required_state_times(t, strip, conv))

# the martingale property, checked by brute force
cfg = ip.McConfig(n_paths=200_000, seed=2)
checks = ip.mc_martingale_check(model, [tau - 336.0, tau - 168.0, tau - 24.0], tau,
                                cfg, x_start=x)
print()
print("nested Monte Carlo martingale check of the forward:")
print(ip.format_report(checks))
