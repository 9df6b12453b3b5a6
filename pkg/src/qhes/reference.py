"""Classical ground truth: exact spectra and closed-form filter amplitudes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .dirac import CoinConfig
from .errors import DomainError, ValidationError
from .hamiltonian import PauliHamiltonian, _eigh
from .heaviside import FilterConfig
from .qpe import retention
from .state import StateVector


@dataclass(frozen=True)
class SpectrumReference:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def ground(self) -> float:
        return float(self.eigenvalues[0])

    def gap_at(self, E: float, tol: float = 1e-9) -> float:
        """Distance from ``E`` to the nearest eigenvalue not equal to it (within ``tol``)."""
        d = np.abs(self.eigenvalues - E)
        d = d[d > tol]
        if d.size == 0:
            raise DomainError("the spectrum has no eigenvalue apart from E")
        return float(d.min())

    def qualified(self, E: float, tol: float = 1e-9) -> np.ndarray:
        """Indices of eigenvalues equal to ``E`` within ``tol``."""
        return np.flatnonzero(np.abs(self.eigenvalues - E) <= tol)

    def boundary_index(self, theta: float, eps: float) -> int:
        """Number of eigenvalues at or below ``theta - eps``.

        Requires the open band ``(theta - eps, theta)`` to be empty, so the
        remaining eigenvalues all sit at or above ``theta``.
        """
        ev = self.eigenvalues
        if np.any((ev > theta - eps) & (ev < theta)):
            raise DomainError(f"eigenvalues inside the indeterminate band ({theta - eps}, {theta})")
        return int(np.count_nonzero(ev <= theta - eps))

    def overlaps(self, state: StateVector | np.ndarray) -> np.ndarray:
        """``|<E_j|psi>|**2`` for a physical-register state."""
        v = state.amplitudes if isinstance(state, StateVector) else np.asarray(state)
        return np.abs(self.eigenvectors.conj().T @ v) ** 2

    def subspace_weight(self, state, indices) -> float:
        return float(self.overlaps(state)[np.asarray(indices, dtype=int)].sum())


def brute_force_eigs(h: PauliHamiltonian) -> SpectrumReference:
    w, v = _eigh(h)
    return SpectrumReference(np.array(w), np.array(v))


@dataclass
class PredictedAmplitudes:
    """Per-eigenvalue marked amplitudes: ``alpha`` (Heaviside) or ``gamma`` (Dirac) and complements."""

    eigenvalues: np.ndarray
    marked: np.ndarray
    unmarked: np.ndarray
    p: float | None = None
    by_shift: np.ndarray | None = None  # (W, n_eigs) marked amplitudes per shifted Hamiltonian

    @property
    def alpha(self):
        return self.marked

    @property
    def beta(self):
        return self.unmarked

    gamma = alpha
    eta = beta


def _weighted_p(marked: np.ndarray, weights) -> float | None:
    if weights is None:
        return None
    return float(np.sum(np.asarray(weights) * np.abs(marked) ** 2))


def predict_dirac(reference: SpectrumReference, coin: CoinConfig | int, weights=None) -> PredictedAmplitudes:
    """``gamma_j = cos(E_j)**M``; ``p = sum_j w_j gamma_j**2`` when seed weights are given."""
    M = coin.M if isinstance(coin, CoinConfig) else int(coin)
    gamma = np.cos(reference.eigenvalues) ** M
    eta = np.sqrt(np.clip(1 - gamma**2, 0, None))
    return PredictedAmplitudes(reference.eigenvalues, gamma, eta, _weighted_p(gamma, weights))


def predict_heaviside(
    reference: SpectrumReference,
    config: FilterConfig,
    strategy: str = "frozen",
    weights=None,
) -> PredictedAmplitudes:
    """Mark-0 amplitude per eigenvalue, for the unshifted Hamiltonian and for every shift.

    With ``p = sum_{x_min <= x < 2**(R-1)} |kappa(E, x)|**2`` the primary
    circuit gives ``alpha = p**(Q/2)`` and the frozen one ``alpha = p**Q``.
    """
    if strategy not in ("primary", "frozen"):
        raise ValidationError(f"unknown strategy {strategy!r}")
    power = config.Q / 2 if strategy == "primary" else config.Q
    step = math.pi / 2 ** (config.R - 1)
    table = np.array(
        [
            [retention(E + w / config.W * step, config.R, config.x_min) ** power for E in reference.eigenvalues]
            for w in range(config.W)
        ]
    )
    alpha = table[0]
    beta = np.sqrt(np.clip(1 - alpha**2, 0, None))
    return PredictedAmplitudes(reference.eigenvalues, alpha, beta, _weighted_p(alpha, weights), table)


@dataclass
class Check:
    name: str
    max_deviation: float
    tolerance: float
    passed: bool


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, deviation: float, tolerance: float) -> Check:
        c = Check(name, float(deviation), float(tolerance), bool(deviation <= tolerance))
        self.checks.append(c)
        return c

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.checks.extend(other.checks)
        return self

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "max_deviation": c.max_deviation, "tolerance": c.tolerance, "passed": c.passed}
                for c in self.checks
            ],
        }

    def lines(self) -> list[str]:
        return [
            f"{'PASS' if c.passed else 'FAIL'}  {c.name:<48} max dev {c.max_deviation:.3e} (tol {c.tolerance:.0e})"
            for c in self.checks
        ]


def verify_run(simulated: Mapping[str, np.ndarray], predicted: Mapping[str, np.ndarray], tolerance: float) -> VerificationReport:
    """Compare each named array elementwise; a missing or mis-shaped entry is an error."""
    if set(simulated) != set(predicted):
        raise ValidationError(f"check names differ: {sorted(simulated)} vs {sorted(predicted)}")
    report = VerificationReport()
    for name in simulated:
        a = np.asarray(simulated[name])
        b = np.asarray(predicted[name])
        if a.shape != b.shape:
            raise ValidationError(f"{name}: shape {a.shape} vs {b.shape}")
        dev = float(np.max(np.abs(a - b))) if a.size else 0.0
        report.add(name, dev, tolerance)
    return report
