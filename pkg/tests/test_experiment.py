"""Experimental-data ingestion: normalization, background subtraction,
calibration, and file loading."""

import numpy as np
import pytest
from scipy.constants import Boltzmann as K_B
from scipy.constants import Planck as H_PLANCK

from gausscomb.core import ModeSet
from gausscomb.experiment import (
    CalibrationCurve,
    QuadratureRecord,
    UnphysicalCovarianceWarning,
    background_subtract,
    calibrate_pump_amplitude,
    covariance_from_samples,
    load_metadata,
    load_quadrature_csv,
)

MODES = ModeSet((-1, 1))
FREQS = np.array([4.9e9, 5.1e9])
GAINS = np.array([2.1e6, 1.8e6])
BANDWIDTH = 1.0e6
Z0 = 50.0


def synth_record(rng, sigma_target, n_samples=200_000):
    """Samples whose normalized covariance is sigma_target.

    Quadratures q ~ N(0, sigma/2) (vacuum units store 2<dq dq>) are
    scaled per channel by sqrt(G f Z0 h B) into digitizer units.
    """
    q = rng.multivariate_normal(np.zeros(4), 0.5 * sigma_target, n_samples).T
    scale = np.sqrt(np.repeat(GAINS * FREQS, 2) * Z0 * H_PLANCK * BANDWIDTH)
    return QuadratureRecord(
        mode_set=MODES,
        samples=q * scale[:, None],
        frequencies=FREQS,
        gains=GAINS,
        bandwidth=BANDWIDTH,
    )


class TestQuadratureRecord:
    def test_shape_validation(self):
        with pytest.raises(ValueError, match="samples"):
            QuadratureRecord(MODES, np.zeros((3, 10)), FREQS, GAINS, BANDWIDTH)

    def test_per_mode_calibration_required(self):
        with pytest.raises(ValueError):
            QuadratureRecord(MODES, np.zeros((4, 10)), FREQS[:1], GAINS, BANDWIDTH)

    def test_positive_constants(self):
        with pytest.raises(ValueError):
            QuadratureRecord(MODES, np.zeros((4, 10)), FREQS, -GAINS, BANDWIDTH)
        with pytest.raises(ValueError):
            QuadratureRecord(MODES, np.zeros((4, 10)), FREQS, GAINS, 0.0)


class TestCovarianceFromSamples:
    def test_recovers_known_covariance(self, rng):
        target = np.array(
            [
                [1.4, 0.0, 0.5, 0.1],
                [0.0, 1.4, 0.1, -0.5],
                [0.5, 0.1, 1.4, 0.0],
                [0.1, -0.5, 0.0, 1.4],
            ]
        )
        rec = synth_record(rng, target)
        sigma = covariance_from_samples(rec)
        assert np.allclose(sigma, target, atol=0.02)

    def test_symmetric_output(self, rng):
        rec = synth_record(rng, np.eye(4), n_samples=1000)
        sigma = covariance_from_samples(rec)
        assert np.array_equal(sigma, sigma.T)

    def test_too_few_samples(self):
        rec = QuadratureRecord(MODES, np.zeros((4, 1)), FREQS, GAINS, BANDWIDTH)
        with pytest.raises(ValueError, match="two samples"):
            covariance_from_samples(rec)

    def test_zero_variance_channel(self):
        samples = np.random.default_rng(0).normal(size=(4, 100))
        samples[2] = 0.0
        rec = QuadratureRecord(MODES, samples, FREQS, GAINS, BANDWIDTH)
        with pytest.raises(ValueError, match="zero-variance"):
            covariance_from_samples(rec)


class TestBackgroundSubtract:
    def test_vacuum_restored(self):
        # identical on/off leaves exactly the thermal vacuum diagonal
        sigma = np.full((4, 4), 0.3) + np.eye(4)
        cov = background_subtract(sigma, sigma, MODES, FREQS, 0.01)
        arg = H_PLANCK * FREQS / (2 * K_B * 0.01)
        expected = np.repeat(1 / np.tanh(arg), 2)
        assert np.allclose(cov.sigma, np.diag(expected))

    def test_low_temperature_is_vacuum(self):
        sigma = np.eye(4)
        cov = background_subtract(sigma, sigma, MODES, FREQS, 0.01)
        assert np.allclose(cov.sigma, np.eye(4), atol=1e-8)

    def test_unphysical_warns_not_raises(self):
        on = 0.2 * np.eye(4)
        off = np.eye(4)
        with pytest.warns(UnphysicalCovarianceWarning):
            cov = background_subtract(on, off, MODES, FREQS, 0.01)
        assert cov.sigma.shape == (4, 4)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            background_subtract(np.eye(4), np.eye(6), MODES, FREQS, 0.01)

    def test_bad_temperature(self):
        with pytest.raises(ValueError):
            background_subtract(np.eye(4), np.eye(4), MODES, FREQS, 0.0)


class TestCalibration:
    def test_threshold_maps_to_half(self):
        cal = CalibrationCurve(critical_amplitude=3.2)
        assert calibrate_pump_amplitude(3.2, cal) == pytest.approx(0.5)
        assert calibrate_pump_amplitude(1.6, cal) == pytest.approx(0.25)

    def test_negative_rejected(self):
        cal = CalibrationCurve(critical_amplitude=1.0)
        with pytest.raises(ValueError):
            calibrate_pump_amplitude(-0.1, cal)

    def test_bad_critical(self):
        with pytest.raises(ValueError):
            CalibrationCurve(critical_amplitude=0.0)


class TestFileLoading:
    def test_metadata_parse(self, tmp_path):
        path = tmp_path / "meta.txt"
        path.write_text(
            "# run 42\nB = 1e6\nZ0 = 50 # ohm\nlabel = probe\n\n"
        )
        meta = load_metadata(path)
        assert meta == {"B": 1e6, "Z0": 50.0, "label": "probe"}

    def test_metadata_bad_line(self, tmp_path):
        path = tmp_path / "meta.txt"
        path.write_text("not a key value pair\n")
        with pytest.raises(ValueError):
            load_metadata(path)

    def test_quadrature_csv_round_trip(self, tmp_path, rng):
        samples = rng.normal(size=(4, 50))
        csv_path = tmp_path / "iq.csv"
        lines = ["I_-1,Q_-1,I_1,Q_1"]
        for col in samples.T:
            lines.append(",".join(repr(float(v)) for v in col))
        csv_path.write_text("\n".join(lines) + "\n")
        meta_path = tmp_path / "meta.txt"
        meta_path.write_text(
            "G_-1 = 2.1e6\nG_1 = 1.8e6\nf_-1 = 4.9e9\nf_1 = 5.1e9\n"
            "B = 1e6\nZ0 = 50\nT = 0.01\n"
        )
        rec = load_quadrature_csv(csv_path, meta_path)
        assert rec.mode_set.labels == (-1, 1)
        assert np.allclose(rec.samples, samples)
        assert np.array_equal(rec.frequencies, FREQS)
        assert rec.bandwidth == 1e6

    def test_bad_header(self, tmp_path):
        csv_path = tmp_path / "iq.csv"
        csv_path.write_text("I_-1,Q_1\n0,0\n")
        meta_path = tmp_path / "meta.txt"
        meta_path.write_text("B = 1\n")
        with pytest.raises(ValueError, match="I/Q"):
            load_quadrature_csv(csv_path, meta_path)
