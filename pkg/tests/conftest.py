"""Shared fixtures: the families and precomputed objects reused across files.

Everything here is deterministic (seed 0), so session scope is safe and
amortizes the expensive cloud constructions.
"""
import math

import pytest

import rotorbit as rb

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@pytest.fixture(scope="session")
def fixture_family():
    return rb.FibreFamily(kind="arnold", tau=0.2, alpha=1.5, beta=1.5)


@pytest.fixture(scope="session")
def steep_family():
    return rb.FibreFamily(kind="arnold", tau=0.1, alpha=5.0 * math.pi / 2.0, beta=0.7)


@pytest.fixture(scope="session")
def mono_family():
    return rb.FibreFamily(kind="arnold", tau=0.3, alpha=0.8, beta=0.5)


@pytest.fixture(scope="session")
def identity_family():
    return rb.FibreFamily(kind="arnold", tau=0.0, alpha=0.0, beta=0.0)


@pytest.fixture(scope="session")
def mono_fmap(mono_family):
    return rb.forced_map(mono_family, 0.0)


@pytest.fixture(scope="session")
def fixture_interval(fixture_family):
    return rb.rotation_interval(fixture_family, n=100000, seed=0)


@pytest.fixture(scope="session")
def fixture_tsearch(fixture_family, fixture_interval):
    return rb.find_t_for_rho(
        fixture_family, fixture_interval.midpoint(), interval=fixture_interval, seed=0
    )


@pytest.fixture(scope="session")
def fixture_fmap(fixture_family, fixture_tsearch):
    return rb.forced_map(fixture_family, fixture_tsearch.t, 16384)


@pytest.fixture(scope="session")
def fixture_cloud_bundle(fixture_family, fixture_interval):
    cloud, fmap, tres = rb.cloud_for_rotation(
        fixture_family, fixture_interval.midpoint(), seed=0, interval=fixture_interval
    )
    return cloud, fmap, tres


@pytest.fixture(scope="session")
def fixture_cloud(fixture_cloud_bundle):
    return fixture_cloud_bundle[0]
