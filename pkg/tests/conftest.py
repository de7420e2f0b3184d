import datetime as dt
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import intrinsicprice as ip

settings.register_profile(
    "package", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.register_profile(
    "stress", max_examples=1000, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "package"))

# parameter set of the calibrated market model used throughout the tests
REF_LAMBDA = 0.0298
REF_SIGMA = 1.4988
REF_X0 = -12.5776
REF_ALPHA1 = 0.1949
REF_ALPHA2 = -0.1796
REF_BETA1 = 43.8799
REF_BETA2 = 37.4548
REF_THETA = -0.0036


@pytest.fixture(scope="session")
def ref_ou():
    return ip.OuParams(lam=REF_LAMBDA, sigma=REF_SIGMA, x0=REF_X0)


@pytest.fixture(scope="session")
def ref_supply():
    return ip.SupplyParams(alpha1=REF_ALPHA1, alpha2=REF_ALPHA2,
                           beta1=REF_BETA1, beta2=REF_BETA2)


@pytest.fixture(scope="session")
def conv():
    return ip.MarketConventions()


@pytest.fixture(scope="session")
def ref_model():
    """Full reference model (seasonalities included); session-wide constant."""
    model, _ = ip.reference_model()
    return model


@pytest.fixture(scope="session")
def ref_theta():
    return REF_THETA


@pytest.fixture(scope="session")
def flat_model(ref_ou, ref_supply, conv):
    """Reference dynamics under constant seasonalities: load level 47,
    price seasonality 30.  Handy when a test wants hand-checkable numbers."""
    epoch = dt.date(2015, 1, 1)
    g = ip.SeasonalityModel.constant(47.0, epoch=epoch)
    gamma3 = ip.SeasonalityModel.constant(30.0, epoch=epoch)
    return ip.ModelQ(ou=ref_ou, supply=ref_supply, load_seasonality=g,
                     price_seasonality=gamma3, conv=conv)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
