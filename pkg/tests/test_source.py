import math

import numpy as np
import pytest

from conftest import ALL_DETECTORS
from muxsource import DetectorModel, PhotonNumberDistribution
from muxsource.channel import apply_loss
from muxsource.detectors import binary_povm, pnr_povm
from muxsource.errors import StructuralError
from muxsource.fock import choose_cutoff, thermal_distribution
from muxsource.source import (
    DegenerateStateWarning,
    fidelity_of,
    herald_ensemble,
    single_source_metrics,
    snr_of,
    success_outcome,
)


class TestHeraldEnsemble:
    def test_perfect_pnr_heralds_fock_state(self):
        n = choose_cutoff(1)
        ens = herald_ensemble(thermal_distribution(1, n), pnr_povm(1.0, n))
        assert ens.outcome_probs[1] == pytest.approx(0.25, abs=1e-15)
        assert ens.conditionals[1].probs[1] == 1
        assert ens.conditionals[1].total() == 1

    def test_binary_on_one_photon_mixture(self):
        ens = herald_ensemble(PhotonNumberDistribution([0.5, 0.5]), binary_povm(0.7, 1))
        assert ens.outcome_probs[1] == pytest.approx(0.35, abs=1e-15)
        np.testing.assert_array_equal(ens.conditionals[1].probs, [0, 1])

    def test_vacuum_input(self):
        ens = herald_ensemble(PhotonNumberDistribution([1, 0, 0]), pnr_povm(0.7, 2))
        assert ens.outcome_probs.tolist() == [1, 0, 0]
        assert ens.conditionals[1] is None and ens.conditionals[2] is None

    def test_dimension_mismatch(self):
        with pytest.raises(StructuralError):
            herald_ensemble(thermal_distribution(1, 10), pnr_povm(0.7, 5))

    @pytest.mark.parametrize("det", ALL_DETECTORS + [DetectorModel.pnr(0.3), DetectorModel.binary(1.0)], ids=lambda d: d.label)
    @pytest.mark.parametrize("nbar", [0.01, 0.1, 1])
    def test_invariants(self, det, nbar):
        n = choose_cutoff(nbar)
        pair = thermal_distribution(nbar, n)
        ens = herald_ensemble(pair, det.povm(n))
        assert abs(ens.outcome_probs.sum() - 1) <= 1e-10
        for c in ens.conditionals:
            if c is not None:
                assert abs(c.total() - 1) <= 1e-10
        np.testing.assert_allclose(ens.joint().sum(axis=0), pair.probs, atol=1e-10)

    def test_perfect_pnr_conditionals_are_point_masses(self):
        n = choose_cutoff(0.5)
        ens = herald_ensemble(thermal_distribution(0.5, n), pnr_povm(1.0, n))
        for m, c in enumerate(ens.conditionals):
            if ens.outcome_probs[m] > 0:
                assert c.probs[m] == 1

    def test_binary_click_never_from_vacuum(self):
        n = choose_cutoff(0.3)
        ens = herald_ensemble(thermal_distribution(0.3, n), binary_povm(0.7, n))
        assert ens.conditionals[1].probs[0] <= 1e-12


def test_success_outcome():
    assert success_outcome(DetectorModel.pnr(0.5)) == 1
    assert success_outcome(DetectorModel.binary(0.5)) == 1
    assert success_outcome(DetectorModel.pseudo_pnr(0.5, 8)) == 1


class TestSnrFidelity:
    def test_pure_single_photon(self):
        assert snr_of(PhotonNumberDistribution([0, 1, 0, 0])) == math.inf

    def test_hand_value(self):
        assert snr_of(PhotonNumberDistribution([0.1, 0.6, 0.2, 0.1])) == pytest.approx(2.0, rel=1e-14)

    def test_vacuum_is_flagged(self):
        with pytest.warns(DegenerateStateWarning):
            assert snr_of(PhotonNumberDistribution([1, 0, 0])) == math.inf

    def test_fidelity(self):
        assert fidelity_of(PhotonNumberDistribution([0, 1, 0])) == 1
        assert fidelity_of(PhotonNumberDistribution([1, 0, 0])) == 0
        lossy = apply_loss(PhotonNumberDistribution([0, 1, 0]), 0.405504)
        assert fidelity_of(lossy) == pytest.approx(0.405504, abs=1e-15)


class TestSingleSource:
    def test_ideal_limit(self):
        m = single_source_metrics(1.0, DetectorModel.pnr(1.0))
        assert m.p_heralding == pytest.approx(0.25, abs=1e-12)
        assert m.fidelity == 1 and m.p_success == pytest.approx(0.25, abs=1e-12)

    @pytest.mark.parametrize("nbar", [1e-4, 0.1, 1, 3])
    def test_perfect_pnr_snr_infinite(self, nbar):
        assert single_source_metrics(nbar, DetectorModel.pnr(1.0)).snr == math.inf

    def test_success_is_product(self, detector):
        m = single_source_metrics(0.2, detector)
        assert abs(m.p_success - m.p_heralding * m.fidelity) <= 1e-12

    def test_no_herald_possible(self):
        m = single_source_metrics(0.5, DetectorModel.pnr(0.0))
        assert m.p_heralding == 0 and m.p_success == 0 and m.fidelity == 0

    def test_binary_at_snr_100(self):
        # fine-grid scan for the SNR = 100 crossing, independent of the solver
        grid = np.arange(0.0070, 0.0085, 1e-5)
        det = DetectorModel.binary(0.7)
        snr = np.array([single_source_metrics(x, det).snr for x in grid])
        i = int(np.argmax(snr < 100))
        m = single_source_metrics(grid[i], det)
        assert 5e-3 <= m.p_success <= 6e-3
        # closed form of the single-pair term: p(1) * eta_d
        assert m.p_success == pytest.approx(0.7 * grid[i] / (1 + grid[i]) ** 2, rel=1e-10)

    @pytest.mark.parametrize("det", [DetectorModel.binary(0.7), DetectorModel.pnr(0.7), DetectorModel.binary(0.3)], ids=lambda d: d.label)
    def test_snr_decreasing(self, det):
        grid = np.geomspace(1e-4, 2, 300)
        snr = [single_source_metrics(x, det).snr for x in grid]
        assert np.all(np.diff(snr) < 0)
