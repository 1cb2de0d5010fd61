"""Ingestion of measured quadrature data.

Raw I/Q samples in digitizer units are normalized by per-mode gain,
frequency, impedance and bandwidth into a vacuum-referenced covariance
matrix; a pump-off background measurement is subtracted with the vacuum
contribution restored.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import Boltzmann as K_B
from scipy.constants import Planck as H_PLANCK

from .core import CovarianceMatrix, ModeSet

__all__ = [
    "QuadratureRecord",
    "CalibrationCurve",
    "UnphysicalCovarianceWarning",
    "covariance_from_samples",
    "background_subtract",
    "calibrate_pump_amplitude",
    "load_quadrature_csv",
    "load_metadata",
]


class UnphysicalCovarianceWarning(UserWarning):
    """Background-subtracted matrix dips below the vacuum bound."""


@dataclass(frozen=True)
class QuadratureRecord:
    """Sampled I/Q quadratures plus the calibration constants.

    ``samples`` has shape (2n, N): interleaved rows (I_m, Q_m) per mode
    in the mode-set order, N samples per channel.
    """

    mode_set: ModeSet
    samples: np.ndarray
    frequencies: np.ndarray  # Hz, one per mode
    gains: np.ndarray        # linear power gain, one per mode
    bandwidth: float         # Hz
    impedance: float = 50.0  # ohm
    temperature: float = 0.01  # K

    def __post_init__(self):
        n = len(self.mode_set)
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 2 or samples.shape[0] != 2 * n:
            raise ValueError("samples must be a (2 n_modes, N) array")
        freqs = np.asarray(self.frequencies, dtype=float)
        gains = np.asarray(self.gains, dtype=float)
        if freqs.shape != (n,) or gains.shape != (n,):
            raise ValueError("need one frequency and one gain per mode")
        if np.any(gains <= 0) or np.any(freqs <= 0):
            raise ValueError("gains and frequencies must be positive")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        for name, arr in (
            ("samples", samples),
            ("frequencies", freqs),
            ("gains", gains),
        ):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class CalibrationCurve:
    """Linear pump-amplitude calibration anchored at the oscillation
    threshold, which corresponds to alpha = 0.5 kappa."""

    critical_amplitude: float

    def __post_init__(self):
        if self.critical_amplitude <= 0:
            raise ValueError("critical amplitude must be positive")


def covariance_from_samples(rec: QuadratureRecord) -> np.ndarray:
    """Raw measured covariance in vacuum units.

    (sigma_on)_mn = 2 <dr_m dr_n> / (sqrt(G_m G_n f_m f_n) Z0 h B),
    symmetrized.  The per-channel gain/frequency factors are expanded to
    both quadrature rows of each mode.
    """
    if rec.samples.shape[1] < 2:
        raise ValueError("need at least two samples per channel")
    raw = 2.0 * np.cov(rec.samples, bias=False)
    if np.any(np.diag(raw) == 0):
        raise ValueError("zero-variance channel in quadrature record")
    gf = np.sqrt(rec.gains * rec.frequencies)
    norm = np.repeat(gf, 2)
    scale = np.outer(norm, norm) * rec.impedance * H_PLANCK * rec.bandwidth
    sigma = raw / scale
    return 0.5 * (sigma + sigma.T)


def background_subtract(
    sigma_on: np.ndarray,
    sigma_off: np.ndarray,
    mode_set: ModeSet,
    frequencies,
    temperature: float,
    tol: float = 1e-6,
) -> CovarianceMatrix:
    """Pump-off subtraction with the vacuum contribution restored:
    sigma = (sigma_on - sigma_off) + I coth(h f_n / 2 k_B T).

    An unphysical result (symplectic eigenvalue below 1 beyond ``tol``)
    is returned with a warning rather than rejected: measurement noise
    routinely leaves small violations.
    """
    sigma_on = np.asarray(sigma_on, dtype=float)
    sigma_off = np.asarray(sigma_off, dtype=float)
    if sigma_on.shape != sigma_off.shape:
        raise ValueError("on/off covariance shapes differ")
    freqs = np.asarray(frequencies, dtype=float)
    if temperature <= 0 or not np.all(np.isfinite(freqs)):
        raise ValueError("need T > 0 and finite mode frequencies")
    arg = H_PLANCK * freqs / (2.0 * K_B * temperature)
    if np.any(arg < 1e-12):
        raise ValueError("coth argument underflows: T too high for f_n")
    vacuum = np.repeat(1.0 / np.tanh(arg), 2)
    sigma = (sigma_on - sigma_off) + np.diag(vacuum)
    sigma = 0.5 * (sigma + sigma.T)
    cov = CovarianceMatrix(sigma, mode_set)
    from .core import check_physical

    ok, nu_min = check_physical(sigma, tol=tol)
    if not ok:
        warnings.warn(
            f"background-subtracted covariance is unphysical "
            f"(min symplectic eigenvalue {nu_min:.6g})",
            UnphysicalCovarianceWarning,
            stacklevel=2,
        )
    return cov


def calibrate_pump_amplitude(a: float, cal: CalibrationCurve) -> float:
    """Instrument units -> alpha in kappa units, linear through the
    oscillation threshold at 0.5 kappa."""
    if a < 0:
        raise ValueError("pump amplitude must be >= 0")
    return 0.5 * a / cal.critical_amplitude


def load_metadata(path) -> dict:
    """Parse a key = value sidecar file; values become floats where
    possible."""
    meta = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad metadata line: {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            try:
                meta[key] = float(value)
            except ValueError:
                meta[key] = value
    return meta


def load_quadrature_csv(csv_path, meta_path) -> QuadratureRecord:
    """Read interleaved I/Q sample columns plus the sidecar metadata.

    The CSV header names mode labels as ``I_<label>, Q_<label>`` pairs;
    the metadata file supplies ``G_<label>``, ``f_<label>``, ``B``,
    ``Z0`` and ``T``.
    """
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(tok) for tok in row] for row in reader if row]
    labels = []
    for i in range(0, len(header), 2):
        iname, qname = header[i].strip(), header[i + 1].strip()
        if not iname.startswith("I_") or not qname.startswith("Q_"):
            raise ValueError(f"bad I/Q column pair: {iname}, {qname}")
        label = int(iname[2:])
        if int(qname[2:]) != label:
            raise ValueError(f"mismatched I/Q labels: {iname}, {qname}")
        labels.append(label)
    samples = np.asarray(rows, dtype=float).T
    meta = load_metadata(meta_path)
    mode_set = ModeSet(tuple(labels))
    freqs = np.array([meta[f"f_{l}"] for l in labels])
    gains = np.array([meta[f"G_{l}"] for l in labels])
    return QuadratureRecord(
        mode_set=mode_set,
        samples=samples,
        frequencies=freqs,
        gains=gains,
        bandwidth=float(meta["B"]),
        impedance=float(meta.get("Z0", 50.0)),
        temperature=float(meta.get("T", 0.01)),
    )
