import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spikegap.model import (
    AdiabaticPoint,
    CubicCost,
    CustomCost,
    SpikeCost,
    SpikeParams,
    SpikelessCost,
    build_hamiltonian,
    cost,
    critical_point,
)

from oracles import dense_from_paulis

S_STAR = critical_point()


class TestSpikeParams:
    def test_rejects_bad_n(self):
        for n in (0, -4, 6, 103):
            with pytest.raises(ValueError):
                SpikeParams(n, 1.0)

    def test_rejects_region_outside(self):
        # n = 8, beta = 1: window (2 - 4, 2 + 4) leaves [0, 8]? lower edge < 0
        with pytest.raises(ValueError):
            SpikeParams(8, 1.0, 1.0)

    def test_width_one_region(self):
        p = SpikeParams.width_one(64, 1.0)
        assert list(p.spike_indices()) == [16]
        assert p.in_spike(16) and not p.in_spike(17)

    def test_beta_zero_equals_width_one(self):
        p = SpikeParams(64, 1.0, 0.0)
        assert list(p.spike_indices()) == [16]

    def test_strict_window_at_integer_boundary(self):
        # n = 1024, beta = 0.5: boundaries 256 -+ 16 are integers and excluded
        p = SpikeParams(1024, 1.0, 0.5)
        idx = p.spike_indices()
        assert idx[0] == 241 and idx[-1] == 271

    def test_surplus(self):
        assert SpikeParams(256, 0.5).surplus == pytest.approx(0.75 * 16.0)


class TestCost:
    def test_spike_value_at_center(self):
        # width-one at alpha = 1: h(n/4) = n/4 + 3n/4 = n
        assert cost(SpikeParams.width_one(100, 1.0), 25) == 100.0

    def test_outside_spike(self):
        assert cost(SpikeParams.width_one(100, 1.0), 26) == 26.0

    def test_wide_spike_surplus(self):
        # 0.75 * 256**0.5 = 12 independently of the window bookkeeping
        expected = 64.0 + 0.75 * math.sqrt(256.0)
        assert cost(SpikeParams(256, 0.5, 0.25), 64) == pytest.approx(expected)
        assert expected == 76.0

    def test_domain_error(self):
        with pytest.raises(ValueError):
            cost(SpikeParams.width_one(100, 1.0), 101)


class TestAdiabaticPoint:
    def test_endpoints(self):
        p0 = AdiabaticPoint.from_s(0.0)
        assert p0.theta == pytest.approx(math.pi / 2.0)
        p1 = AdiabaticPoint.from_s(1.0)
        assert p1.theta == pytest.approx(0.0)

    def test_critical_point_values(self):
        assert S_STAR == pytest.approx(0.36602540378, abs=1e-11)
        pt = AdiabaticPoint.from_s(S_STAR)
        assert pt.cos_theta == pytest.approx(0.5, abs=1e-14)
        assert pt.sin_theta == pytest.approx(math.sqrt(3.0) / 2.0, abs=1e-14)
        assert pt.norm_factor == pytest.approx(math.sqrt(3.0) - 1.0, abs=1e-14)

    @given(st.floats(0.0, 1.0))
    def test_angle_normalized(self, s):
        pt = AdiabaticPoint.from_s(s)
        assert math.isclose(pt.sin_theta**2 + pt.cos_theta**2, 1.0, rel_tol=1e-12)


class TestBuildHamiltonian:
    def test_driver_limit(self):
        op = build_hamiltonian(SpikeCost(SpikeParams.width_one(4, 1.0)),
                               AdiabaticPoint.from_s(0.0))
        assert np.allclose(op.diag, 0.0)
        assert op.offdiag[0] == pytest.approx(-1.0)
        k = np.arange(1, 5, dtype=float)
        assert np.allclose(op.offdiag, -0.5 * np.sqrt(k * (5.0 - k)))

    def test_classical_limit(self):
        params = SpikeParams.width_one(4, 1.0)
        op = build_hamiltonian(SpikeCost(params), AdiabaticPoint.from_s(1.0))
        assert np.allclose(op.offdiag, 0.0)
        expected = -(2.0 - np.arange(5.0))
        expected[1] += params.surplus
        assert np.allclose(op.diag, expected)

    @pytest.mark.parametrize("n", [4, 8, 12])
    @pytest.mark.parametrize("s", [0.2, S_STAR, 0.8])
    def test_matches_pauli_oracle(self, n, s):
        params = SpikeParams.width_one(n, 1.0)
        op = build_hamiltonian(SpikeCost(params), AdiabaticPoint.from_s(s))
        oracle = dense_from_paulis(n, s, lambda w: cost(params, w))
        assert np.max(np.abs(op.to_dense() - oracle)) < 1e-12

    @pytest.mark.parametrize("beta", [0.25, 0.5])
    def test_matches_pauli_oracle_wide(self, beta):
        params = SpikeParams(12, 0.8, beta)
        op = build_hamiltonian(SpikeCost(params), AdiabaticPoint.from_s(0.4))
        oracle = dense_from_paulis(12, 0.4, lambda w: cost(params, w))
        assert np.max(np.abs(op.to_dense() - oracle)) < 1e-12

    @given(st.floats(1e-6, 1.0 - 1e-6))
    @settings(max_examples=25, deadline=None)
    def test_offdiag_strictly_negative(self, s):
        op = build_hamiltonian(SpikeCost(SpikeParams.width_one(16, 1.0)),
                               AdiabaticPoint.from_s(s))
        assert np.all(op.offdiag < 0.0)

    @pytest.mark.parametrize("s", [0.1, S_STAR, 0.9])
    def test_spikeless_spectrum_is_ladder(self, s):
        n = 48
        op = build_hamiltonian(SpikelessCost(n), AdiabaticPoint.from_s(s))
        vals = np.linalg.eigvalsh(op.to_dense())
        assert np.max(np.abs(vals - (np.arange(n + 1) - n / 2.0))) < 1e-10 * n

    def test_physical_normalization_factor(self):
        op = build_hamiltonian(SpikelessCost(8), AdiabaticPoint.from_s(0.37))
        assert op.norm_factor == pytest.approx(math.hypot(0.37, 0.63))


class TestOtherCosts:
    def test_cubic_table(self):
        cm = CubicCost(8, 3.0)
        u = np.arange(9) / 8.0
        assert np.allclose(cm.h(np.arange(9)), 64.0 * cm.g(u))
        assert cm.driver_coeff == pytest.approx(32.0)

    def test_custom_cost_round_trip(self):
        values = np.arange(9.0) ** 2
        cm = CustomCost(8, values)
        assert cm.h(3) == 9.0
        assert np.allclose(cm.surplus_at(np.arange(9)), values - np.arange(9.0))

    def test_custom_cost_validation(self):
        with pytest.raises(ValueError):
            CustomCost(8, np.zeros(5))
        with pytest.raises(ValueError):
            CustomCost(8, np.full(9, np.inf))

    def test_coherent_cost_agreement(self):
        # spike coherent cost == generic table evaluation of the same h
        params = SpikeParams(32, 1.0, 0.4)
        spike = SpikeCost(params)
        table = CustomCost(32, np.asarray(cost(params, np.arange(33))))
        thetas = np.linspace(0.05, math.pi - 0.05, 9)
        assert np.allclose(spike.coherent_cost(thetas, 0.4),
                           table.coherent_cost(thetas, 0.4), rtol=1e-10)

    def test_gershgorin_bound_contains_spectrum(self):
        op = build_hamiltonian(SpikeCost(SpikeParams.width_one(16, 1.5)),
                               AdiabaticPoint.from_s(0.3))
        vals = np.linalg.eigvalsh(op.to_dense())
        assert np.max(np.abs(vals)) <= op.gershgorin_radius() + 1e-12
