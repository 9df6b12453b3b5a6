"""Quantum phase estimation with exact controlled powers, and the amplitude function kappa.

For an eigenstate ``|E>`` and an all-zero representation register of ``R``
qubits, the circuit leaves ``sum_x kappa(E, x) |E>|x>`` with

    kappa(E, x) = 2**-R * sum_{k<2**R} exp(i k E - 2 pi i k x / 2**R).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, FourierOp, RegisterPowerOp, h_gate
from .errors import DomainError, LayoutError, ValidationError
from .hamiltonian import PauliHamiltonian, power_stack
from .state import RegisterLayout, StateVector

#: Representation registers above this size are refused.
MAX_R = 12


@dataclass(frozen=True)
class QpeConfig:
    R: int
    direction: str = "forward"
    group: str = "representation"
    physical: str = "physical"

    def __post_init__(self):
        if not 1 <= self.R <= MAX_R:
            raise ValidationError(f"R must lie in [1, {MAX_R}], got {self.R}")
        if self.direction not in ("forward", "inverse"):
            raise ValidationError(f"direction must be 'forward' or 'inverse', got {self.direction!r}")


def qft_circuit(layout: RegisterLayout, group: str, direction: str = "inverse") -> Circuit:
    """Fourier transform on ``group``; ``"inverse"`` is the one used by phase estimation."""
    if direction not in ("forward", "inverse"):
        raise ValidationError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    sign = -1 if direction == "inverse" else 1
    return Circuit(layout, [FourierOp(layout.qubits(group), sign)], name=f"qft-{direction}")


def qft(state: StateVector, layout: RegisterLayout, group: str, direction: str = "inverse") -> StateVector:
    return qft_circuit(layout, group, direction).apply(state)


def qpe_circuit(
    layout: RegisterLayout,
    h: PauliHamiltonian,
    group: str = "representation",
    physical: str = "physical",
) -> Circuit:
    """Hadamards on ``group``, controlled ``e^{ixH}`` ladder, inverse Fourier transform."""
    R = layout.size(group)
    if layout.size(physical) != h.n_qubits:
        raise LayoutError(f"register {physical!r} has {layout.size(physical)} qubits, Hamiltonian has {h.n_qubits}")
    if R > MAX_R:
        raise ValidationError(f"R={R} exceeds the cap {MAX_R}")
    rep = layout.qubits(group)
    ops = [h_gate(q) for q in rep]
    ops.append(RegisterPowerOp(layout.qubits(physical), rep, power_stack(h, 1, 2**R), evolutions=2**R - 1))
    ops.append(FourierOp(rep, -1))
    return Circuit(layout, ops, name="qpe")


def _circuit_for(layout, h, config: QpeConfig) -> Circuit:
    c = qpe_circuit(layout, h, config.group, config.physical)
    if layout.size(config.group) != config.R:
        raise LayoutError(f"group {config.group!r} has {layout.size(config.group)} qubits, config says R={config.R}")
    return c if config.direction == "forward" else c.inverse()


def qpe_apply(state: StateVector, layout: RegisterLayout, h: PauliHamiltonian, config: QpeConfig) -> StateVector:
    return _circuit_for(layout, h, config).apply(state)


def qpe_inverse_apply(state: StateVector, layout: RegisterLayout, h: PauliHamiltonian, config: QpeConfig) -> StateVector:
    fwd = QpeConfig(config.R, "forward", config.group, config.physical)
    return _circuit_for(layout, h, fwd).inverse().apply(state)


def controlled_qpe(state, layout, h, config: QpeConfig, controls) -> StateVector:
    """Phase estimation (or its inverse, per ``config.direction``) where every control matches."""
    return _circuit_for(layout, h, config).controlled(controls).apply(state)


def kappa_analytic(E: float, x: int, R: int) -> complex:
    """Closed-form geometric sum; returns exactly 1 at the removable singularity."""
    D = 2**R
    if not 0 <= x < D:
        raise DomainError(f"x={x} outside [0, {D})")
    phi = E - 2 * math.pi * x / D
    turns = phi / (2 * math.pi)
    if abs(turns - round(turns)) <= 1e-12:
        return 1.0 + 0.0j
    return complex((1 - np.exp(1j * D * phi)) / (D * (1 - np.exp(1j * phi))))


def kappa_vector(E: float, R: int) -> np.ndarray:
    """``[kappa(E, x) for x in range(2**R)]`` via one FFT."""
    D = 2**R
    return np.fft.fft(np.exp(1j * E * np.arange(D))) / D


def nearest_binary(y: float, R: int) -> int:
    """Integer ``n`` minimising ``|n / 2**R - y|``; ties round half up."""
    D = 2**R
    if not 0 <= y <= 1 - 1 / D + 1e-15:
        raise DomainError(f"y={y} outside [0, 1 - 2**-{R}]")
    return min(int(math.floor(y * D + 0.5)), D - 1)


def retention(E: float, R: int, x_min: int = 0) -> float:
    """Probability that phase estimation of ``E`` lands in ``[x_min, 2**(R-1))``."""
    k = kappa_vector(E, R)
    half = 2 ** (R - 1)
    return float(np.sum(np.abs(k[x_min:half]) ** 2))
