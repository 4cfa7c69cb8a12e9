import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from muxsource import DetectorModel
from muxsource.errors import DomainError, StructuralError
from muxsource.multiplex import (
    MultiplexConfig,
    cascade_heralding,
    combine_two,
    multiplexed_metrics,
    waiting_time,
)
from muxsource.source import single_source_metrics, source_ensemble


@st.composite
def herald_vectors(draw):
    n = draw(st.integers(2, 6))
    w = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n)))
    if w.sum() == 0:
        w[0] = 1
    return w / w.sum()


class TestCombineTwo:
    def test_no_success(self):
        assert combine_two([1, 0], [1, 0], 1).p_success_any == 0

    def test_quarter_each(self):
        c = combine_two([0.75, 0.25], [0.75, 0.25], 1)
        assert c.p_success_any == pytest.approx(0.4375, abs=1e-15)
        assert c.p_none == pytest.approx(0.5625, abs=1e-15)

    @given(herald_vectors(), herald_vectors())
    def test_joint_normalized(self, a, b):
        c = combine_two(a, b, 1)
        assert abs(c.joint.sum() - 1) <= 1e-12
        assert abs(c.p_success_any - (1 - (1 - a[1]) * (1 - b[1]))) <= 1e-12

    def test_rejects_unnormalized(self):
        with pytest.raises(StructuralError):
            combine_two([0.5, 0.4], [0.5, 0.5], 1)

    def test_rejects_bad_index(self):
        with pytest.raises(StructuralError):
            combine_two([0.5, 0.5], [0.5, 0.5], 3)


@pytest.mark.parametrize("det", [DetectorModel.pnr(0.7), DetectorModel.binary(0.3), DetectorModel.pseudo_pnr(0.7, 8)], ids=lambda d: d.label)
@pytest.mark.parametrize("n", [2, 3, 4, 16])
def test_kronecker_cascade_matches_closed_form(det, n):
    ens = source_ensemble(0.4, det)
    p = ens.outcome_probs / ens.outcome_probs.sum()
    m = multiplexed_metrics(MultiplexConfig(det, n, nbar=0.4))
    assert abs(cascade_heralding(p, n, 1) - m.p_heralding) <= 1e-12


class TestMultiplexedMetrics:
    def test_seventeen_ideal_sources(self):
        m = multiplexed_metrics(MultiplexConfig(DetectorModel.pnr(1), 17, 1, 1, 1.0))
        assert abs(m.p_success - (1 - 0.75**17)) <= 1e-9
        assert m.p_success > 0.99

    @pytest.mark.parametrize("nbar", [0.0, 0.01, 0.5])
    def test_single_source_reduces(self, detector, nbar):
        a = multiplexed_metrics(MultiplexConfig(detector, 1, 0.5, 0.5, nbar))
        b = single_source_metrics(nbar, detector)
        assert (a.p_heralding, a.fidelity, a.snr, a.p_success) == (b.p_heralding, b.fidelity, b.snr, b.p_success)

    def test_fidelity_clamps_at_transmission(self):
        m = multiplexed_metrics(MultiplexConfig(DetectorModel.pnr(1), 16, 0.8, 0.99, 1e-6))
        assert abs(m.fidelity - 0.405504) <= 1e-12

    @pytest.mark.parametrize("eta_d", [0.3, 0.7])
    def test_fidelity_clamp_imperfect_detector(self, eta_d):
        m = multiplexed_metrics(MultiplexConfig(DetectorModel.pnr(eta_d), 16, 0.8, 0.99, 1e-6))
        assert abs(m.fidelity - 0.405504) <= 1e-4

    def test_heralding_monotone_in_sources(self, detector):
        p = [multiplexed_metrics(MultiplexConfig(detector, n, nbar=0.05)).p_heralding for n in range(1, 40)]
        assert np.all(np.diff(p) >= 0)

    @pytest.mark.parametrize("k", [1, 2, 4, 8, 16])
    def test_more_switches_lower_fidelity(self, detector, k):
        lo = multiplexed_metrics(MultiplexConfig(detector, 2 * k, 0.8, 0.99, 0.05)).fidelity
        hi = multiplexed_metrics(MultiplexConfig(detector, k, 0.8, 0.99, 0.05)).fidelity
        assert lo < hi

    @pytest.mark.parametrize("nbar", [0.001, 0.01, 0.1, 1])
    def test_loss_raises_delivered_snr(self, detector, nbar):
        single = multiplexed_metrics(MultiplexConfig(detector, 1, nbar=nbar))
        mux = multiplexed_metrics(MultiplexConfig(detector, 16, 0.8, 0.99, nbar))
        assert mux.snr > single.snr
        assert mux.heralded_snr == pytest.approx(single.snr, rel=1e-12)

    def test_local_fidelity_increase_under_heavy_loss(self):
        grid = np.linspace(1e-3, 2, 400)
        f = [multiplexed_metrics(MultiplexConfig(DetectorModel.pnr(0.3), 32, 0.6, 0.99, x)).fidelity for x in grid]
        assert np.any(np.diff(f) > 0)

    def test_success_is_product(self, detector):
        m = multiplexed_metrics(MultiplexConfig(detector, 8, 0.8, 0.99, 0.2))
        assert abs(m.p_success - m.p_heralding * m.fidelity) <= 1e-12


class TestConfig:
    def test_default_rep_rates(self):
        assert MultiplexConfig(DetectorModel.pnr(0.7), 1).rep_rate == 80e6
        assert MultiplexConfig(DetectorModel.pnr(0.7), 4).rep_rate == 1e6
        assert MultiplexConfig(DetectorModel.pnr(0.7), 4, rep_rate=5e5).rep_rate == 5e5

    @pytest.mark.parametrize("kw", [{"n_sources": 0}, {"eta_s": 1.2}, {"eta_tau": -0.1}, {"nbar": -1}, {"rep_rate": 0}])
    def test_rejects(self, kw):
        with pytest.raises(DomainError):
            MultiplexConfig(DetectorModel.pnr(0.7), **kw)


class TestWaitingTime:
    def test_every_pulse_succeeds(self):
        assert waiting_time(1.0, 1.0, 1) == 1.0

    def test_two_photons(self):
        assert waiting_time(0.5, 1e6, 2) == pytest.approx(4e-6, rel=1e-14)

    def test_zero_success_is_infinite(self):
        assert waiting_time(0.0, 1e6, 3) == math.inf

    def test_monotone_in_photons(self):
        t = [waiting_time(0.3, 1e6, n) for n in range(1, 12)]
        assert np.all(np.diff(t) > 0)

    @pytest.mark.parametrize("args", [(1.5, 1e6, 1), (0.5, 0, 1), (0.5, 1e6, 0)])
    def test_rejects(self, args):
        with pytest.raises(DomainError):
            waiting_time(*args)
