import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from published import REF_POWER
from replisure.assessment import controlled_threshold, sceptical_z, sceptical_z_array
from replisure.errors import DomainError, PlanningError
from replisure.numerics import norm_cdf, norm_quantile
from replisure.power import (
    PowerKind,
    conditional_type1,
    power,
    replication_power,
    required_relative_sample_size,
    required_z_r,
    sceptical_conditional_power,
    sceptical_predictive_power,
    ttr_conditional_power,
    ttr_predictive_power,
)
from replisure.studies import normalize_pair

Z975 = 1.959963984540054


def nz(dataset, label):
    return normalize_pair(dataset[label])


class TestRequiredZr:
    def test_large_original(self):
        assert required_z_r(1e6, 1.0, 1.5) == pytest.approx(1.5, rel=1e-9)

    def test_inverts_d5896(self):
        assert required_z_r(2.878, 1.0, 1.454) == pytest.approx(1.685, abs=0.003)

    def test_inverts_transcend(self):
        assert required_z_r(1.2816, 2.3, 1.0892) == pytest.approx(2.878, abs=0.005)

    def test_unreachable(self):
        assert required_z_r(1.0, 1.0, 1.5) == math.inf

    @given(st.floats(0.2, 3), st.floats(1.01, 5), st.floats(0.05, 20))
    def test_round_trip(self, t, ratio, c):
        z_o = t * ratio
        assert sceptical_z(z_o, required_z_r(z_o, c, t), c).zeta == pytest.approx(t, abs=1e-8)


class TestTTRPower:
    def test_triton(self, dataset):
        n = nz(dataset, "TRITON-TIMI")
        assert ttr_conditional_power(n.z_o, 1.0) == pytest.approx(0.981, abs=0.01)
        assert ttr_predictive_power(n.z_o, 1.0) == pytest.approx(0.926, abs=0.01)

    def test_transcend_not_significant(self, dataset):
        n = nz(dataset, "TRANSCEND")
        assert ttr_conditional_power(n.z_o, n.c) == 0.0
        assert ttr_predictive_power(n.z_o, n.c) == 0.0

    def test_dapa(self, dataset):
        n = nz(dataset, "DAPA-CKD")
        assert ttr_conditional_power(n.z_o, n.c) == pytest.approx(0.591, abs=0.015)

    def test_on_target_predictive(self, dataset):
        n = nz(dataset, "ON-TARGET")
        assert ttr_predictive_power(n.z_o, n.c) == pytest.approx(0.734, abs=0.015)

    def test_predictive_small_c_limit(self):
        z_o = 3.0
        for c in (1e-4, 1e-6):
            assert ttr_predictive_power(z_o, c) == pytest.approx(ttr_conditional_power(z_o, c), abs=2 * c)
        assert ttr_conditional_power(z_o, 1e-12) == pytest.approx(norm_cdf(-Z975), abs=1e-6)


class TestScepticalPower:
    def test_triton(self, dataset):
        n = nz(dataset, "TRITON-TIMI")
        assert sceptical_conditional_power(n.z_o, n.c) == pytest.approx(0.992, abs=0.01)

    def test_dapa(self, dataset):
        n = nz(dataset, "DAPA-CKD")
        assert sceptical_conditional_power(n.z_o, n.c) == pytest.approx(0.656, abs=0.02)

    def test_transcend_zero(self, dataset):
        n = nz(dataset, "TRANSCEND")
        assert n.z_o < controlled_threshold(0.025, n.c)
        assert sceptical_conditional_power(n.z_o, n.c) == 0.0

    def test_plato_predictive(self, dataset):
        n = nz(dataset, "PLATO")
        assert sceptical_predictive_power(n.z_o, n.c) == pytest.approx(0.893, abs=0.015)

    def test_d5896_predictive(self, dataset):
        n = nz(dataset, "D5896")
        assert sceptical_predictive_power(n.z_o, n.c) == pytest.approx(0.775, abs=0.015)

    def test_pronounce_zero(self, dataset):
        r = replication_power(dataset["PRONOUNCE"])
        assert (r.cp_ttr, r.pp_ttr, r.cp_sceptical, r.pp_sceptical) == (0, 0, 0, 0)


class TestPowerProperties:
    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.5, 6), st.floats(0.1, 10), st.floats(1.01, 2))
    def test_monotone(self, z_o, c, k):
        for fn in (ttr_conditional_power, sceptical_conditional_power):
            assert fn(z_o * k, c) >= fn(z_o, c) - 1e-12
            assert fn(z_o, c * k) >= fn(z_o, c) - 1e-12

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.5, 6), st.floats(0.05, 10))
    def test_predictive_shrinks_towards_half(self, z_o, c):
        for cp_fn, pp_fn in ((ttr_conditional_power, ttr_predictive_power),
                             (sceptical_conditional_power, sceptical_predictive_power)):
            cp, pp = cp_fn(z_o, c), pp_fn(z_o, c)
            if cp > 0.5:
                assert pp <= cp + 1e-12
            elif 0 < cp < 0.5:
                assert pp >= cp - 1e-12

    def test_sceptical_at_least_ttr_on_dataset(self, dataset):
        for pair in dataset:
            r = replication_power(pair)
            assert r.cp_sceptical >= r.cp_ttr - 1e-12, pair.label
            assert r.pp_sceptical >= r.pp_ttr - 1e-12, pair.label

    @pytest.mark.parametrize("label", ["TRITON-TIMI", "PLATO", "DAPA-CKD", "D5896", "ON-TARGET"])
    def test_monte_carlo(self, dataset, label):
        n = nz(dataset, label)
        t = controlled_threshold(0.025, n.c)
        rng = np.random.default_rng(11)
        draws = 1_000_000
        r = replication_power(n)
        mean = math.sqrt(n.c) * n.z_o
        for sd, (ttr, scep) in ((1.0, (r.cp_ttr, r.cp_sceptical)),
                                (math.sqrt(1 + n.c), (r.pp_ttr, r.pp_sceptical))):
            z_r = rng.normal(mean, sd, draws)
            ttr_mc = np.mean(z_r >= Z975) if n.p_o <= 0.025 else 0.0
            scep_mc = np.mean(sceptical_z_array(n.z_o, z_r, n.c) >= t)
            for exact, mc in ((ttr, ttr_mc), (scep, scep_mc)):
                se = math.sqrt(max(exact * (1 - exact), 1e-12) / draws)
                assert abs(mc - exact) <= 3 * se + 1e-9


class TestConditionalType1:
    def test_ttr(self):
        assert conditional_type1(3.0, 1.0, 0.025, "ttr") == 0.025
        assert conditional_type1(1.0, 1.0, 0.025, "ttr") == 0.0

    def test_below_threshold(self):
        assert conditional_type1(1.0, 1.0, 0.025) == 0.0

    def test_bounded_by_twice_alpha(self):
        for z_o in np.linspace(0.5, 8, 60):
            for c in (0.1, 0.5, 1, 2, 5, 10, 20):
                if sceptical_conditional_power(z_o, c) < 0.95:
                    assert conditional_type1(z_o, c) <= 0.05


class TestSampleSize:
    def test_closed_form(self):
        c = required_relative_sample_size(2.8016, 0.025, 0.8)
        assert c == pytest.approx(1.0, abs=1e-3)
        assert c == pytest.approx(((Z975 + norm_quantile(0.8)) / 2.8016) ** 2, rel=1e-12)

    def test_scaling(self):
        a = required_relative_sample_size(3.0, 0.025, 0.9)
        b = required_relative_sample_size(6.0, 0.025, 0.9)
        assert b == pytest.approx(a / 4, rel=1e-12)

    @pytest.mark.parametrize("method, kind", [
        ("sceptical", "conditional"), ("sceptical", "predictive"), ("ttr", "predictive"),
    ])
    def test_round_trip(self, method, kind):
        z_o = 3.2
        c = required_relative_sample_size(z_o, 0.025, 0.8, method, kind)
        assert power(z_o, c, 0.025, method, kind) == pytest.approx(0.8, abs=1e-6)

    def test_sceptical_needs_less(self):
        assert required_relative_sample_size(3.0, 0.025, 0.8, "sceptical") < \
            required_relative_sample_size(3.0, 0.025, 0.8, "ttr")

    def test_not_significant(self):
        with pytest.raises(PlanningError):
            required_relative_sample_size(1.0, 0.025, 0.8, "ttr")

    def test_unreachable_predictive(self):
        # predictive TTR power tends to Phi(z_o) < 0.95 as c grows
        with pytest.raises(PlanningError):
            required_relative_sample_size(2.0, 0.025, 0.99, "ttr", PowerKind.PREDICTIVE)

    def test_bad_target(self):
        with pytest.raises(DomainError):
            required_relative_sample_size(3.0, 0.025, 1.0)


def test_reference_rows_cover_dataset(dataset):
    assert set(REF_POWER) == set(dataset.labels)
