"""Fibred rotation numbers, rotation intervals, t-search, length bound."""
import math

import numpy as np
import pytest

import rotorbit as rb
from rotorbit.errors import InvalidArgumentError, OutOfRangeError

# frozen reference values, all at seed 0
MONO_RHO = 0.342878338426229
FIX_LO = 0.17162541017352706
FIX_HI = 0.20422139705270603
FIX_TSTAR = 0.19921875
FIX_ACHIEVED = 0.18787377026927823
STEEP_LO = -0.7000028224357594
STEEP_HI = 0.9654979708684885


class TestRotationNumber:
    def test_monotone_family_reference_value(self, mono_fmap):
        est = rb.rotation_number_monotone(mono_fmap, 100000, K=50, seed=0)
        assert est.value == pytest.approx(MONO_RHO, abs=1e-9)
        assert est.spread <= 1e-3
        assert est.richardson_gap <= 1e-4

    def test_spread_shrinks_with_horizon(self, mono_fmap):
        short = rb.rotation_number_monotone(mono_fmap, 10000, K=50, seed=0)
        long = rb.rotation_number_monotone(mono_fmap, 200000, K=50, seed=0)
        assert long.spread <= 1.1 * short.spread
        assert abs(long.value - MONO_RHO) <= abs(short.value - MONO_RHO) + 1e-6

    def test_rigid_translation_rotates_by_tau(self):
        tau = math.sqrt(2.0) - 1.0
        fam = rb.FibreFamily(kind="arnold", tau=tau, alpha=0.0, beta=0.0)
        est = rb.rotation_number_monotone(rb.forced_map(fam, 0.0, 64), 20000, seed=0)
        assert est.value == pytest.approx(tau, abs=1e-9)
        assert est.spread <= 1e-12

    def test_identity_family_rotates_zero(self, identity_family):
        est = rb.rotation_number_monotone(rb.forced_map(identity_family, 0.0, 64), 5000, seed=0)
        assert est.value == 0.0

    def test_deterministic_in_seed(self, mono_fmap):
        a = rb.rotation_number_monotone(mono_fmap, 20000, seed=3)
        b = rb.rotation_number_monotone(mono_fmap, 20000, seed=3)
        c = rb.rotation_number_monotone(mono_fmap, 20000, seed=4)
        assert a.value == b.value
        assert a.value != c.value

    def test_rejects_bad_budget(self, mono_fmap):
        with pytest.raises(InvalidArgumentError):
            rb.rotation_number_monotone(mono_fmap, 0)
        with pytest.raises(InvalidArgumentError):
            rb.rotation_number_monotone(mono_fmap, 10**5, K=0)


class TestRotationInterval:
    def test_fixture_interval_frozen(self, fixture_interval):
        assert fixture_interval.lo == pytest.approx(FIX_LO, abs=1e-9)
        assert fixture_interval.hi == pytest.approx(FIX_HI, abs=1e-9)
        assert fixture_interval.midpoint() == pytest.approx(
            0.5 * (FIX_LO + FIX_HI), abs=1e-12
        )
        assert fixture_interval.length == pytest.approx(FIX_HI - FIX_LO, abs=1e-12)

    def test_monotone_family_interval_degenerates(self, mono_family):
        iv = rb.rotation_interval(mono_family, n=20000, seed=0)
        assert iv.length <= 1e-4

    def test_steep_interval_frozen_and_long(self, steep_family):
        iv = rb.rotation_interval(steep_family, n=100000, seed=0)
        assert iv.lo == pytest.approx(STEEP_LO, abs=1e-6)
        assert iv.hi == pytest.approx(STEEP_HI, abs=1e-6)
        assert iv.length >= 1.0 - 1e-3


class TestEndpointMonotonicity:
    def test_rho_is_monotone_in_t(self, fixture_family):
        vals = []
        for t in np.linspace(0.0, 1.0, 9):
            fm = rb.forced_map(fixture_family, float(t), 4096)
            vals.append(rb.rotation_number_monotone(fm, 20000, K=20, seed=0).value)
        diffs = np.diff(vals)
        assert np.all(diffs >= -1e-9)
        # endpoints one full turn apart: G_1 = G_0 + plateau jump structure
        assert vals[-1] - vals[0] >= 0.0


class TestTSearch:
    def test_fixture_midpoint(self, fixture_tsearch, fixture_interval):
        ts = fixture_tsearch
        assert ts.t == pytest.approx(FIX_TSTAR, abs=1e-9)
        assert ts.achieved_rho == pytest.approx(FIX_ACHIEVED, abs=1e-9)
        assert abs(ts.achieved_rho - fixture_interval.midpoint()) <= 1e-4
        assert ts.status == "ok"
        assert ts.iterations <= 60

    def test_endpoint_targets(self, fixture_family, fixture_interval):
        ts = rb.find_t_for_rho(
            fixture_family, fixture_interval.lo, interval=fixture_interval, seed=0
        )
        assert abs(ts.achieved_rho - fixture_interval.lo) <= 1e-4

    def test_out_of_range_target(self, fixture_family, fixture_interval):
        with pytest.raises(OutOfRangeError):
            rb.find_t_for_rho(
                fixture_family, 0.9, interval=fixture_interval, seed=0
            )


class TestLengthBound:
    def test_steep_family_passes(self, steep_family):
        rep = rb.verify_length_bound(steep_family, samples=10**5)
        assert rep.passed
        assert rep.identity_max_err <= 1e-9
        assert rep.envelope_min_margin == pytest.approx(0.02029174679397494, abs=1e-6)

    def test_lattice_neighbors_identity(self, steep_family):
        for x in (0.0, 0.26, 0.74, 1.4, -2.3):
            nb = rb.lattice_neighbors(x)
            assert nb.x_plus % 1.0 == pytest.approx(0.25)
            assert nb.x_minus % 1.0 == pytest.approx(0.75)
            lhs = steep_family.fibre_lift(0.37, nb.x_plus) - steep_family.fibre_lift(
                0.37, nb.x_minus
            )
            rhs = nb.x_plus - nb.x_minus + steep_family.alpha / math.pi
            assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_needs_expansion(self, mono_family):
        # the bound is vacuous below the critical slope; must refuse
        with pytest.raises(InvalidArgumentError):
            rb.verify_length_bound(mono_family, samples=1000)
