import math

import numpy as np
import pytest
from mpmath import mp

from spikegap.errors import ConfigurationError, NearDegenerateError
from spikegap.model import (
    AdiabaticPoint,
    CustomCost,
    SpikeCost,
    SpikeParams,
    SpikelessCost,
    TridiagonalOperator,
    build_hamiltonian,
    critical_point,
)
from spikegap.spectrum import (
    eigenvector,
    gap,
    golden_section_min,
    lowest_eigenvalues,
    min_gap_scan,
    sturm_count,
)

from oracles import (
    dense_eigh,
    lapack_tridiagonal_eigenpair,
    spikeless_ground_logamps,
    two_by_two_eigenvalues,
)

S_STAR = critical_point()


def spike_op(n, alpha, s, beta=None):
    return build_hamiltonian(SpikeCost(SpikeParams(n, alpha, beta)),
                             AdiabaticPoint.from_s(s))


class TestSturmCount:
    @pytest.mark.parametrize("n", [4, 8, 12])
    def test_matches_dense_count(self, n):
        rng = np.random.default_rng(7 + n)
        op = spike_op(n, 1.0, 0.37)
        vals, _ = dense_eigh(op)
        radius = op.gershgorin_radius()
        for lam in rng.uniform(-radius, radius, size=20):
            assert sturm_count(op, lam) == int(np.sum(vals < lam))


class TestLowestEigenvalues:
    def test_spikeless_ladder(self):
        op = build_hamiltonian(SpikelessCost(8), AdiabaticPoint.from_s(0.61))
        vals = lowest_eigenvalues(op, 3)
        assert np.allclose(vals, [-4.0, -3.0, -2.0], atol=1e-12)

    def test_two_by_two_closed_form(self):
        a, b, c = 0.7, -1.3, 0.45
        op = TridiagonalOperator(diag=np.array([a, b]), offdiag=np.array([c]))
        vals = lowest_eigenvalues(op, 2)
        lo, hi = two_by_two_eigenvalues(a, b, c)
        assert vals[0] == pytest.approx(lo, abs=1e-14)
        assert vals[1] == pytest.approx(hi, abs=1e-14)

    def test_spike_matches_dense(self):
        op = spike_op(12, 1.0, S_STAR)
        vals = lowest_eigenvalues(op, 2)
        dense_vals, _ = dense_eigh(op)
        assert np.max(np.abs(vals - dense_vals[:2])) < 1e-10

    def test_full_spectrum_matches_dense(self):
        op = spike_op(8, 1.5, 0.42, beta=0.25)
        vals = lowest_eigenvalues(op, 9)
        dense_vals, _ = dense_eigh(op)
        assert np.max(np.abs(vals - dense_vals)) < 1e-10

    def test_courant_fischer_spike_raises_levels(self):
        for n in (4, 8, 12):
            spiked, _ = dense_eigh(spike_op(n, 1.0, S_STAR))
            op0 = build_hamiltonian(SpikelessCost(n), AdiabaticPoint.from_s(S_STAR))
            spikeless, _ = dense_eigh(op0)
            assert np.all(spiked - spikeless >= -1e-12)

    def test_extended_precision_against_mp_oracle(self):
        op = spike_op(12, 1.0, S_STAR)
        vals = lowest_eigenvalues(op, 2, precision_bits=160)
        with mp.workprec(200):
            dense = mp.matrix(op.to_dense().tolist())
            mp_vals = mp.eigsy(dense, eigvals_only=True)
            for i in range(2):
                assert abs(vals[i] - mp_vals[i]) < mp.mpf(2) ** -150

    def test_precision_validation(self):
        op = spike_op(4, 1.0, 0.5)
        with pytest.raises(ConfigurationError):
            lowest_eigenvalues(op, 1, precision_bits=10**6)
        with pytest.raises(ValueError):
            lowest_eigenvalues(op, 9)


class TestEigenvector:
    def test_driver_ground_state_is_binomial(self):
        n = 300
        op = build_hamiltonian(SpikelessCost(n), AdiabaticPoint.from_s(0.0))
        pair = eigenvector(op, -n / 2.0)
        assert np.all(pair.signs == 1)
        expected = np.array([0.5 * math.log(math.comb(n, k)) for k in range(n + 1)])
        expected -= n / 2.0 * math.log(2.0)
        assert np.max(np.abs(pair.logmags - expected)) < 1e-8

    def test_spikeless_ground_at_critical_point(self):
        n = 500
        op = build_hamiltonian(SpikelessCost(n), AdiabaticPoint.from_s(S_STAR))
        pair = eigenvector(op, -n / 2.0)
        expected = spikeless_ground_logamps(n)
        rel = np.abs(pair.logmags - expected) / np.maximum(1.0, np.abs(expected))
        assert np.max(rel) < 1e-8

    def test_matches_dense_oracle_up_to_sign(self):
        op = spike_op(12, 1.0, S_STAR)
        vals, vecs = dense_eigh(op)
        pair = eigenvector(op, vals[0])
        dense_vec = vecs[:, 0]
        dense_vec *= np.sign(dense_vec[np.argmax(np.abs(dense_vec))])
        ours = pair.amplitudes()
        ours *= np.sign(ours[np.argmax(np.abs(ours))])
        assert np.max(np.abs(ours - dense_vec)) < 1e-8

    def test_matches_lapack_inverse_iteration(self):
        op = spike_op(400, 1.0, S_STAR)
        lam, vec = lapack_tridiagonal_eigenpair(op, 0)
        pair = eigenvector(op, lam)
        ours = pair.amplitudes()
        vec = vec * np.sign(vec[np.argmax(np.abs(vec))])
        ours = ours * np.sign(ours[np.argmax(np.abs(ours))])
        assert np.max(np.abs(ours - vec)) < 1e-8

    @pytest.mark.parametrize("n", [100, 1000, 10000])
    def test_residual_and_normalization(self, n):
        op = spike_op(n, 1.0, S_STAR)
        lam = lowest_eigenvalues(op, 1)[0]
        pair = eigenvector(op, lam)
        assert pair.residual(op) < 1e-10
        finite = np.isfinite(pair.logmags)
        assert math.isclose(np.exp(2 * pair.logmags[finite]).sum(), 1.0, abs_tol=1e-10)

    def test_tail_logmags_survive_underflow(self):
        n = 10000
        op = build_hamiltonian(SpikelessCost(n), AdiabaticPoint.from_s(S_STAR))
        pair = eigenvector(op, -n / 2.0)
        expected = spikeless_ground_logamps(n)
        # the tail sits ~1400 log-units down, far below the float64 range
        assert expected[0] < -1400.0
        rel = abs(pair.logmags[0] - expected[0]) / abs(expected[0])
        assert rel < 1e-8

    def test_refuses_near_degenerate(self):
        op = TridiagonalOperator(diag=np.array([1.0, 1.0 + 1e-14, 5.0]),
                                 offdiag=np.array([1e-16, 1e-16]))
        with pytest.raises(NearDegenerateError):
            eigenvector(op, 1.0)


class TestGap:
    @pytest.mark.parametrize("s", [0.1, 0.37, 0.8])
    def test_spikeless_gap_is_one(self, s):
        est = gap(SpikelessCost(64), s)
        assert est.value == pytest.approx(1.0, abs=1e-11)

    def test_spike_dies_at_s_zero(self):
        est = gap(SpikeCost(SpikeParams.width_one(64, 1.0)), 0.0)
        assert est.value == pytest.approx(1.0, abs=1e-12)

    def test_physical_rescaling(self):
        cm = SpikeCost(SpikeParams.width_one(32, 1.0))
        s = 0.4
        plain = gap(cm, s)
        physical = gap(cm, s, physical=True)
        assert physical.value == pytest.approx(plain.value * math.hypot(s, 1 - s),
                                               rel=1e-14)
        assert "physical" in physical.flags

    def test_unresolved_then_escalates(self):
        # two symmetric wells behind a huge barrier: gap far below float64 ulp
        n = 2
        cm = CustomCost(n, np.array([0.0, 1e7, 0.0]))
        s = 1.0 - 1e-5
        est53 = gap(cm, s, max_precision_bits=53)
        assert est53.value is None
        assert "unresolved" in est53.flags
        est = gap(cm, s, max_precision_bits=424)
        assert est.value is not None and est.value > 0.0
        assert est.precision_bits > 53
        # oracle: E1 - E0 of the 3x3 in high precision
        op = build_hamiltonian(cm, AdiabaticPoint.from_s(s))
        with mp.workprec(400):
            dense = mp.matrix(op.to_dense().tolist())
            mp_vals = mp.eigsy(dense, eigvals_only=True)
            oracle = float(mp_vals[1] - mp_vals[0])
        assert est.value == pytest.approx(oracle, rel=1e-6)


class TestMinGapScan:
    def test_locates_critical_point(self):
        s_min, est = min_gap_scan(SpikeCost(SpikeParams.width_one(500, 1.0)),
                                  s_grid=(0.05, 0.95, 61), refine_tol=1e-5)
        assert abs(s_min - S_STAR) < 0.005
        assert est.value is not None and not est.flags

    def test_flat_curve_flagged(self):
        s_min, est = min_gap_scan(SpikelessCost(32), s_grid=(0.1, 0.9, 17))
        assert "flat" in est.flags

    def test_golden_section(self):
        x, fx = golden_section_min(lambda x: (x - 1.3) ** 2 + 2.0, 0.0, 3.0, 1e-10)
        assert x == pytest.approx(1.3, abs=1e-9)
        assert fx == pytest.approx(2.0, abs=1e-12)
