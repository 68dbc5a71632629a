import math

import numpy as np
import pytest
from scipy import stats

from oscseg.model import (
    Hyperparams,
    InvalidStateError,
    ModelState,
    SegmentParams,
    TimeSeries,
    basis_vector,
    phase,
    power,
    segment_index,
    segment_loglik,
    segment_slices,
    signal_at,
    total_loglik,
)

from conftest import random_segment, segment_data


def brute_signal(t, omega, beta):
    """Term-by-term evaluation, independent of the kernel lanes."""
    val = beta[0] + beta[1] * t
    for l, w in enumerate(omega):
        val += beta[2 + 2 * l] * math.cos(2 * math.pi * w * t)
        val += beta[3 + 2 * l] * math.sin(2 * math.pi * w * t)
    return val


class TestBasisVector:
    def test_empty_frequency_set(self):
        assert np.allclose(basis_vector(7.0, np.empty(0)), [1.0, 7.0])

    def test_quarter_cycle(self):
        x = basis_vector(1.0, np.array([0.25]))
        assert np.allclose(x, [1.0, 1.0, 0.0, 1.0], atol=1e-12)

    def test_twelfth_at_three(self):
        # cos(pi/2) = 0, sin(pi/2) = 1 evaluated independently
        x = basis_vector(3.0, np.array([1.0 / 12.0]))
        expected = [1.0, 3.0, math.cos(math.pi / 2), math.sin(math.pi / 2)]
        assert np.allclose(x, expected, atol=1e-12)

    def test_matches_brute_evaluation(self, rng):
        for _ in range(20):
            m = int(rng.integers(1, 5))
            omega = np.sort(rng.uniform(0.01, 0.49, m))
            t = float(rng.integers(1, 1000))
            x = basis_vector(t, omega)
            assert x.shape == (2 * m + 2,)
            expected = [1.0, t]
            for w in omega:
                expected += [math.cos(2 * math.pi * w * t), math.sin(2 * math.pi * w * t)]
            assert np.allclose(x, expected, rtol=1e-12)


class TestSignalAt:
    def test_pure_intercept(self):
        seg = SegmentParams(np.array([0.3]), np.array([5.0, 0.0, 0.0, 0.0]), 1.0)
        assert signal_at(100.0, seg) == pytest.approx(5.0)

    def test_single_pair(self):
        seg = SegmentParams(np.array([0.25]), np.array([0.0, 0.0, 2.0, 3.0]), 1.0)
        assert signal_at(1.0, seg) == pytest.approx(3.0, abs=1e-12)

    def test_demo_segment_one_against_oracle(self):
        from oscseg.simulate import demo_truth

        seg = demo_truth().segments[0]
        for t in (1.0, 17.0, 299.0):
            assert signal_at(t, seg) == pytest.approx(
                brute_signal(t, seg.omega, seg.beta), rel=1e-12
            )


class TestSegmentLoglik:
    def test_zero_when_terms_vanish(self):
        # residuals zero and sigma2 = 1/(2 pi) kills both terms for any n
        seg = SegmentParams(np.array([0.1]), np.array([1.0, 0.5, 2.0, 1.0]), 1.0 / (2 * math.pi))
        t = np.arange(1.0, 5.0)
        y = np.array([brute_signal(v, seg.omega, seg.beta) for v in t])
        assert segment_loglik(y, seg, t) == pytest.approx(0.0, abs=1e-10)

    def test_doubling_sigma2_with_zero_residuals(self):
        seg = SegmentParams(np.array([0.1]), np.array([1.0, 0.5, 2.0, 1.0]), 2.0)
        seg2 = SegmentParams(seg.omega, seg.beta, 4.0)
        t = np.arange(1.0, 7.0)
        y = np.array([brute_signal(v, seg.omega, seg.beta) for v in t])
        diff = segment_loglik(y, seg2, t) - segment_loglik(y, seg, t)
        assert diff == pytest.approx(-0.5 * 6 * math.log(2.0))

    def test_matches_pointwise_gaussian_oracle(self, rng):
        for _ in range(100):
            seg = random_segment(rng, 10)
            y, t = segment_data(rng, seg, 10, t0=int(rng.integers(1, 500)))
            mean = np.array([brute_signal(v, seg.omega, seg.beta) for v in t])
            oracle = stats.norm.logpdf(y, mean, math.sqrt(seg.sigma2)).sum()
            assert segment_loglik(y, seg, t) == pytest.approx(oracle, rel=1e-9)


def _demo_state():
    from oscseg.simulate import demo_truth

    truth = demo_truth()
    return ModelState(np.array(truth.s), [s.copy() for s in truth.segments])


class TestTotalLoglik:
    def test_k0_equals_whole_segment(self, rng):
        seg = random_segment(rng, 50)
        y, t = segment_data(rng, seg, 50)
        ts = TimeSeries(y)
        state = ModelState(np.empty(0), [seg])
        assert total_loglik(state, ts) == segment_loglik(y, seg, t)

    def test_additivity_is_exact(self, rng):
        from oscseg.simulate import demo_truth, gen_piecewise_sinusoid

        truth = demo_truth()
        ts = gen_piecewise_sinusoid(truth, rng)
        state = _demo_state()
        total = 0.0
        for seg, (a, b) in zip(state.segments, segment_slices(state.s, ts.n)):
            total += segment_loglik(ts.values[a:b], seg, ts.t[a:b])
        assert total_loglik(state, ts) == total  # same summation order, exact

    def test_truth_state_matches_sum_oracle(self, rng):
        from oscseg.simulate import demo_truth, gen_piecewise_sinusoid

        truth = demo_truth()
        ts = gen_piecewise_sinusoid(truth, rng)
        state = _demo_state()
        oracle = 0.0
        for seg, (a, b) in zip(state.segments, segment_slices(state.s, ts.n)):
            mean = np.array([brute_signal(v, seg.omega, seg.beta) for v in ts.t[a:b]])
            oracle += stats.norm.logpdf(ts.values[a:b], mean, math.sqrt(seg.sigma2)).sum()
        assert total_loglik(state, ts) == pytest.approx(oracle, rel=1e-9)


class TestPartition:
    def test_membership_total_function(self, rng):
        n = 200
        for _ in range(25):
            k = int(rng.integers(0, 4))
            s = np.sort(rng.uniform(5, n - 5, k))
            while k > 1 and np.min(np.diff(s)) < 8:
                s = np.sort(rng.uniform(5, n - 5, k))
            slices = segment_slices(s, n)
            counts = np.zeros(n, dtype=int)
            for a, b in slices:
                counts[a:b] += 1
            assert np.all(counts == 1)
            assert sum(b - a for a, b in slices) == n
            for t in range(1, n + 1):
                j = segment_index(s, t)
                a, b = slices[j]
                assert a <= t - 1 < b

    def test_integer_boundary_goes_right(self):
        # t equal to a change-point belongs to the segment starting there
        slices = segment_slices(np.array([300.0, 650.0]), 900)
        assert slices == [(0, 299), (299, 649), (649, 900)]

    def test_fractional_boundary(self):
        slices = segment_slices(np.array([10.5]), 20)
        assert slices == [(0, 10), (10, 20)]  # t=10 left, t=11 right


class TestPowerPhase:
    def test_power_values(self):
        assert power((3.0, 4.0)) == 25.0
        assert power((0.0, 0.0)) == 0.0
        assert power((2.0, 3.0)) == 13.0

    def test_phase_axis_cases(self):
        assert phase((1.0, 0.0)) == 0.0
        assert phase((0.0, 1.0)) == pytest.approx(-math.pi / 2)
        assert phase((-1.0, 0.0)) == pytest.approx(math.pi)

    def test_phase_undefined_at_origin(self):
        with pytest.raises(ValueError):
            phase((0.0, 0.0))

    def test_reconstruction_identity(self, rng):
        # b1 cos + b2 sin == sqrt(power) cos(. + tau) on a time grid
        for _ in range(50):
            b1, b2 = rng.normal(0.0, 3.0, 2)
            if b1 == 0.0 and b2 == 0.0:
                continue
            w = rng.uniform(0.01, 0.49)
            amp = math.sqrt(power((b1, b2)))
            tau = phase((b1, b2))
            for t in range(1, 51):
                lhs = b1 * math.cos(2 * math.pi * w * t) + b2 * math.sin(2 * math.pi * w * t)
                rhs = amp * math.cos(2 * math.pi * w * t + tau)
                assert abs(lhs - rhs) < 1e-10


class TestValidation:
    def test_series_needs_two_points(self):
        with pytest.raises(ValueError):
            TimeSeries(np.array([1.0]))
        with pytest.raises(ValueError):
            TimeSeries(np.array([1.0, np.nan]))

    def test_segment_invariants(self):
        with pytest.raises(InvalidStateError):
            SegmentParams(np.array([0.2, 0.1]), np.zeros(6), 1.0).validate()
        with pytest.raises(InvalidStateError):
            SegmentParams(np.array([0.6]), np.zeros(4), 1.0).validate()
        with pytest.raises(InvalidStateError):
            SegmentParams(np.array([0.1]), np.zeros(5), 1.0).validate()
        with pytest.raises(InvalidStateError):
            SegmentParams(np.array([0.1]), np.zeros(4), -1.0).validate()
        with pytest.raises(InvalidStateError):
            SegmentParams(np.array([0.1, 0.1004]), np.zeros(6), 1.0).validate(psi_omega=0.001)

    def test_state_spacing(self):
        hyper = Hyperparams(psi_s=20.0).resolved(100)
        seg = SegmentParams(np.array([0.1]), np.zeros(4), 1.0)
        state = ModelState(np.array([30.0, 40.0]), [seg.copy(), seg.copy(), seg.copy()])
        with pytest.raises(InvalidStateError):
            state.validate(100, hyper)

    def test_hyper_validation(self):
        with pytest.raises(ValueError):
            Hyperparams(c=0.6).validate()
        with pytest.raises(ValueError):
            Hyperparams(phi_omega=0.7).validate()
        with pytest.raises(ValueError):
            Hyperparams(psi_omega=0.0005).resolved(1000)  # below 1/n
        h = Hyperparams().resolved(900)
        assert h.psi_omega == pytest.approx(2.0 / 900)
        assert h.sigma2_s == pytest.approx(25.0)  # max(5, 4.5)^2
