"""Symplectic linear algebra on Gaussian covariance matrices.

Conventions: quadratures are interleaved as (x, p) per mode, modes are
ordered by ascending distance from the band center with the negative
label first at equal distance, and the vacuum covariance matrix is the
identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ModeSet",
    "CovarianceMatrix",
    "TwoModeMetrics",
    "symplectic_form",
    "symplectic_eigenvalues",
    "check_physical",
    "partial_trace",
    "purity",
    "log_negativity",
    "save_covariance",
    "load_covariance",
]

#: Default tolerance below which a physical state may dip under nu = 1.
PHYSICALITY_TOL = 1e-9

#: E_N smaller than this is clamped to exactly zero.
LOG_NEG_CLAMP = 1e-12


def _mode_sort_key(label):
    # ascending distance from center, negative before positive at a tie
    if isinstance(label, tuple):
        layer, base = label
        return (1, layer, abs(base), base)
    return (0, 0, abs(label), label)


@dataclass(frozen=True)
class ModeSet:
    """Ordered collection of mode labels.

    Labels are signed odd integers for the physical frequency grid
    (-1, 1, -3, 3, ...).  Extended configurations may additionally carry
    ``(layer, base_label)`` tuples for idler layers that sit outside the
    main grid; those are appended after the integer labels.
    """

    labels: tuple = field(default_factory=tuple)

    def __post_init__(self):
        labels = tuple(self.labels)
        ints = [l for l in labels if isinstance(l, int)]
        if any(l % 2 == 0 for l in ints):
            raise ValueError("mode labels must be odd integers")
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate mode labels")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(
            self, "_index", {l: i for i, l in enumerate(labels)}
        )

    @classmethod
    def ordered(cls, labels) -> "ModeSet":
        """Build a ModeSet with the canonical ordering applied."""
        return cls(tuple(sorted(labels, key=_mode_sort_key)))

    @classmethod
    def standard(cls, max_label: int = 43) -> "ModeSet":
        """The fixed universe +-1 ... +-max_label (odd)."""
        labels = []
        for m in range(1, max_label + 1, 2):
            labels.extend([-m, m])
        return cls(tuple(labels))

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label) -> bool:
        return label in self._index

    def index(self, label) -> int:
        """Position of a mode in the basis."""
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown mode label {label!r}") from None

    def slots(self, label):
        """Quadrature slots (2i, 2i+1) of a mode."""
        i = self.index(label)
        return 2 * i, 2 * i + 1


@dataclass(frozen=True)
class CovarianceMatrix:
    """Real symmetric 2n x 2n second-moment matrix, vacuum = identity."""

    sigma: np.ndarray
    mode_set: ModeSet

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=float)
        n = len(self.mode_set)
        if sigma.shape != (2 * n, 2 * n):
            raise ValueError(
                f"covariance shape {sigma.shape} does not match "
                f"{n} modes"
            )
        nrm = np.linalg.norm(sigma)
        if nrm > 0 and np.linalg.norm(sigma - sigma.T) > 1e-10 * nrm:
            raise ValueError("covariance matrix is not symmetric")
        sigma = 0.5 * (sigma + sigma.T)
        sigma.flags.writeable = False
        object.__setattr__(self, "sigma", sigma)

    @property
    def n_modes(self) -> int:
        return len(self.mode_set)

    @classmethod
    def vacuum(cls, mode_set: ModeSet) -> "CovarianceMatrix":
        return cls(np.eye(2 * len(mode_set)), mode_set)


@dataclass(frozen=True)
class TwoModeMetrics:
    """Entanglement and purity figures for a two-mode state."""

    log_negativity: float
    purity: float
    nu_tilde_minus: float


def symplectic_form(n: int) -> np.ndarray:
    """The 2n x 2n symplectic form, a direct sum of [[0, 1], [-1, 0]]."""
    if n < 1:
        raise ValueError("need at least one mode")
    omega = np.zeros((2 * n, 2 * n))
    for i in range(n):
        omega[2 * i, 2 * i + 1] = 1.0
        omega[2 * i + 1, 2 * i] = -1.0
    return omega


def _as_array(sigma) -> np.ndarray:
    if isinstance(sigma, CovarianceMatrix):
        return sigma.sigma
    return np.asarray(sigma, dtype=float)


def symplectic_eigenvalues(sigma) -> np.ndarray:
    """Symplectic spectrum: |eig(i Omega sigma)|, sorted ascending.

    Each value appears twice (once per conjugate pair); the returned
    array keeps all 2n entries so degeneracies are explicit.
    """
    s = _as_array(sigma)
    n = s.shape[0] // 2
    omega = symplectic_form(n)
    ev = np.linalg.eigvals(1j * omega @ s)
    return np.sort(np.abs(ev))


def check_physical(sigma, tol: float = PHYSICALITY_TOL):
    """Check sigma + i Omega >= 0 via the symplectic spectrum.

    Returns ``(ok, nu_min)`` where ``nu_min`` is the smallest symplectic
    eigenvalue; ``ok`` requires symmetry within ``tol`` and
    ``nu_min >= 1 - tol``.  Reports rather than raises so noisy
    experimental matrices can still be inspected.
    """
    s = _as_array(sigma)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("covariance must be square")
    if s.shape[0] % 2:
        raise ValueError("covariance dimension must be even")
    nrm = max(np.linalg.norm(s), 1.0)
    symmetric = np.linalg.norm(s - s.T) <= max(tol, 1e-10) * nrm
    nu_min = float(symplectic_eigenvalues(0.5 * (s + s.T))[0])
    return (symmetric and nu_min >= 1.0 - tol), nu_min


def partial_trace(cov: CovarianceMatrix, keep) -> CovarianceMatrix:
    """Reduce to the modes in ``keep`` (row/column block extraction)."""
    keep = list(keep)
    for label in keep:
        if label not in cov.mode_set:
            raise KeyError(f"unknown mode label {label!r}")
    idx = []
    for label in keep:
        idx.extend(cov.mode_set.slots(label))
    idx = np.asarray(idx)
    sub = cov.sigma[np.ix_(idx, idx)]
    return CovarianceMatrix(sub, ModeSet(tuple(keep)))


def purity(sigma) -> float:
    """Purity 1/sqrt(det sigma); equals 1 for pure states."""
    s = _as_array(sigma)
    sign, logdet = np.linalg.slogdet(s)
    if sign <= 0:
        raise ValueError("covariance determinant is not positive")
    return float(np.exp(-0.5 * logdet))


def log_negativity(sigma, tol: float = 1e-8) -> TwoModeMetrics:
    """Two-mode logarithmic negativity (base 2) and purity.

    The smallest partial-transpose symplectic eigenvalue is computed
    both from the spectrum of the partially transposed matrix and from
    the closed form nu^2 = (Dtilde - sqrt(Dtilde^2 - 4 det sigma)) / 2;
    the two must agree within ``tol``.
    """
    s = _as_array(sigma)
    if s.shape != (4, 4):
        raise ValueError("log_negativity expects a 4x4 two-mode matrix")
    ok, nu_min = check_physical(s, tol=1e-7)
    if not ok:
        raise ValueError(
            f"unphysical two-mode covariance (nu_min = {nu_min:.6g})"
        )

    # (a) spectrum of the partially transposed matrix
    pt = np.diag([1.0, 1.0, 1.0, -1.0])
    nu_spec = float(symplectic_eigenvalues(pt @ s @ pt)[0])

    # (b) closed form from the 2x2 block determinants
    det_a = np.linalg.det(s[:2, :2])
    det_b = np.linalg.det(s[2:, 2:])
    det_c = np.linalg.det(s[:2, 2:])
    det_s = np.linalg.det(s)
    delta = det_a + det_b - 2.0 * det_c
    disc = delta * delta - 4.0 * det_s
    if disc < -tol * max(1.0, abs(delta) ** 2):
        raise ValueError("closed-form discriminant negative beyond tolerance")
    nu_sq = 0.5 * (delta - np.sqrt(max(disc, 0.0)))
    nu_closed = float(np.sqrt(max(nu_sq, 0.0)))
    if abs(nu_spec - nu_closed) > tol * max(1.0, nu_spec):
        raise ValueError(
            "partial-transpose spectrum and closed form disagree: "
            f"{nu_spec:.12g} vs {nu_closed:.12g}"
        )

    en = max(0.0, -np.log2(nu_spec))
    if en < LOG_NEG_CLAMP:
        en = 0.0
    return TwoModeMetrics(
        log_negativity=float(en),
        purity=purity(s),
        nu_tilde_minus=nu_spec,
    )


def save_covariance(cov: CovarianceMatrix, path) -> None:
    """Write the plain-text covariance format (round-trip stable)."""
    labels = cov.mode_set.labels
    if not all(isinstance(l, int) for l in labels):
        raise ValueError("only integer-labelled mode sets serialize")
    with open(path, "w") as fh:
        fh.write(
            f"n_modes={cov.n_modes} "
            f"labels={','.join(str(l) for l in labels)}\n"
        )
        for row in cov.sigma:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_covariance(path) -> CovarianceMatrix:
    """Read the plain-text covariance format written by save_covariance."""
    with open(path) as fh:
        header = fh.readline().split()
        fields = dict(part.split("=", 1) for part in header)
        n = int(fields["n_modes"])
        labels = tuple(int(tok) for tok in fields["labels"].split(","))
        if len(labels) != n:
            raise ValueError("label count does not match n_modes")
        rows = [
            [float(tok) for tok in fh.readline().split()]
            for _ in range(2 * n)
        ]
    sigma = np.asarray(rows)
    if sigma.shape != (2 * n, 2 * n):
        raise ValueError("matrix block has wrong shape")
    return CovarianceMatrix(sigma, ModeSet(labels))
