"""Heaviside filter: mark eigenstates whose normalized eigenvalue lies below pi.

Phase estimation writes ``E / 2pi`` in binary on ``R`` representation qubits;
the top bit is 0 exactly when the estimate is below pi.  Repeating ``Q``
independent estimates and requiring the top bit to be 0 every time suppresses
the heavy tail of the estimate.

Two circuits are provided:

* primary: ``Q`` representation registers side by side, one mark flip
  conditioned on all of them.  Mark-0 probability ``p**Q`` with
  ``p = sum_{x < 2**(R-1)} |kappa(E, x)|**2``.
* frozen: one representation register reused ``Q`` times.  Each round runs
  a counter-controlled estimate, bumps the counter if the outcome is out of
  range, undoes the estimate and bumps the counter again if the register did
  not return to zero.  The surviving branch keeps amplitude ``p`` per round,
  so its mark-0 probability is ``p**(2Q)``, the square of the primary one.

A band filter is obtained with ``x_min > 0``: the accepted outcomes become
``x_min <= x < 2**(R-1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from .circuit import Circuit, PermutationOp, x_gate
from .dirac import group_nonzero, increment_op
from .errors import CapacityError, ConfigError, LayoutError
from .hamiltonian import PauliHamiltonian, hamiltonian_set
from .qpe import MAX_R, qpe_circuit
from .state import RegisterLayout, StateVector, pattern_probability


def default_Q(n_qubits: int) -> int:
    """``ceil(2.8 N)``, enough for ``(1 - 4/pi**2)**Q <= 2**(-2N)``."""
    return math.ceil(2.8 * n_qubits)


def default_W(Q: int) -> int:
    return math.ceil(math.sqrt(Q))


def default_C(Q: int) -> int:
    """Smallest counter holding ``2Q`` increments below its top bit."""
    return 2 + math.ceil(math.log2(Q)) if Q > 1 else 2


def resolution(R: int) -> float:
    """Smallest admissible judge error ``2pi / 2**(R-1)``."""
    return 2 * math.pi / 2 ** (R - 1)


@dataclass(frozen=True)
class FilterConfig:
    R: int
    Q: int
    W: int = 1
    C: int | None = None
    eps: float | None = None
    theta: float = math.pi
    x_min: int = 0

    def __post_init__(self):
        if not 1 <= self.R <= MAX_R:
            raise ConfigError(f"R must lie in [1, {MAX_R}], got {self.R}")
        if self.Q < 1:
            raise ConfigError(f"Q must be at least 1, got {self.Q}")
        if self.W < 1:
            raise ConfigError(f"W must be at least 1, got {self.W}")
        if self.C is None:
            object.__setattr__(self, "C", default_C(self.Q))
        if self.C < 2:
            raise ConfigError(f"C must be at least 2, got {self.C}")
        if 2 * self.Q > 2 ** (self.C - 1):
            raise CapacityError(
                f"Q={self.Q} rounds can bump the counter {2 * self.Q} times; "
                f"C={self.C} holds at most {2 ** (self.C - 1)} (need C >= {default_C(self.Q)})"
            )
        if self.eps is None:
            object.__setattr__(self, "eps", resolution(self.R))
        if self.eps < resolution(self.R) * (1 - 1e-12):
            raise ConfigError(f"eps={self.eps} is below the resolution 2pi/2**(R-1) = {resolution(self.R)}")
        if self.theta != math.pi:
            raise ConfigError("the threshold is fixed at pi in normalized units; shift the Hamiltonian instead")
        if not 0 <= self.x_min < 2 ** (self.R - 1):
            raise ConfigError(f"x_min must lie in [0, {2 ** (self.R - 1)}), got {self.x_min}")

    @classmethod
    def default(cls, n_qubits: int, R: int, **overrides) -> "FilterConfig":
        Q = overrides.pop("Q", None) or default_Q(n_qubits)
        W = overrides.pop("W", None) or default_W(Q)
        return cls(R=R, Q=Q, W=W, **overrides)

    @property
    def half(self) -> int:
        return 2 ** (self.R - 1)

    @property
    def bin_width(self) -> float:
        return 2 * math.pi / 2**self.R

    def with_(self, **changes) -> "FilterConfig":
        return replace(self, **changes)


def rep_name(q: int) -> str:
    return f"representation_{q}"


def primary_layout(n: int, config: FilterConfig) -> RegisterLayout:
    groups = [("physical", n)] + [(rep_name(q), config.R) for q in range(config.Q)] + [("mark", 1)]
    return RegisterLayout(tuple(groups))


def frozen_layout(n: int, config: FilterConfig) -> RegisterLayout:
    return RegisterLayout.standard(physical=n, representation=config.R, counting=config.C, mark=1)


def _accepted(layout: RegisterLayout, group: str, config: FilterConfig) -> Callable[[np.ndarray], np.ndarray]:
    def fn(idx):
        v = layout.group_values(idx, group)
        return (v >= config.x_min) & (v < config.half)

    return fn


def multi_qpe_circuit(layout: RegisterLayout, h: PauliHamiltonian, Q: int) -> Circuit:
    c = Circuit(layout, name="multi-qpe")
    for q in range(Q):
        c.extend(qpe_circuit(layout, h, rep_name(q)))
    return c


def multi_qpe(state: StateVector, layout: RegisterLayout, h: PauliHamiltonian, Q: int) -> StateVector:
    return multi_qpe_circuit(layout, h, Q).apply(state)


@lru_cache(maxsize=16)
def _primary_mark(layout: RegisterLayout, config: FilterConfig):
    mark = layout.qubit("mark")
    if config.x_min == 0:
        controls = [(layout.qubit(rep_name(q), 0), 0) for q in range(config.Q)]
        return x_gate(mark, controls)
    tests = [_accepted(layout, rep_name(q), config) for q in range(config.Q)]
    bit = 1 << (layout.total - 1 - mark)

    def fn(idx):
        ok = np.ones(idx.shape, dtype=bool)
        for t in tests:
            ok &= t(idx)
        return np.where(ok, idx ^ bit, idx)

    return PermutationOp.from_map(layout, fn, label="mcx")


def heaviside_primary_circuit(layout: RegisterLayout, h: PauliHamiltonian, config: FilterConfig) -> Circuit:
    """X on the mark, ``Q`` estimates, flip the mark back if every estimate was accepted."""
    for q in range(config.Q):
        if layout.size(rep_name(q)) != config.R:
            raise LayoutError(f"group {rep_name(q)!r} must hold R={config.R} qubits")
    c = Circuit(layout, [x_gate(layout.qubit("mark"))], name="heaviside")
    c.extend(multi_qpe_circuit(layout, h, config.Q))
    c.append(_primary_mark(layout, config))
    return c


def heaviside_primary(state: StateVector, layout: RegisterLayout, h: PauliHamiltonian, config: FilterConfig) -> StateVector:
    return heaviside_primary_circuit(layout, h, config).apply(state)


@lru_cache(maxsize=16)
def _freezers(layout: RegisterLayout, config: FilterConfig) -> tuple[PermutationOp, PermutationOp]:
    accepted = _accepted(layout, "representation", config)
    f1 = increment_op(layout, "counting", lambda idx: ~accepted(idx), label="freeze")
    f2 = increment_op(layout, "counting", group_nonzero(layout, "representation"), label="freeze")
    return f1, f2


def _check_frozen(layout: RegisterLayout, config: FilterConfig):
    if layout.size("representation") != config.R:
        raise LayoutError(f"representation register must hold R={config.R} qubits")
    if layout.size("counting") != config.C:
        raise LayoutError(f"counting register must hold C={config.C} qubits")
    if 2 * config.Q > 2 ** (config.C - 1):
        raise CapacityError(f"Q={config.Q} overflows a {config.C}-qubit counter")


def qpe_filter_unit_circuit(layout: RegisterLayout, h: PauliHamiltonian, config: FilterConfig) -> Circuit:
    """Controlled estimate, freeze if rejected, controlled un-estimate, freeze if not back at zero."""
    _check_frozen(layout, config)
    top = [(layout.qubit("counting", 0), 1)]
    est = qpe_circuit(layout, h, "representation").controlled(top)
    f1, f2 = _freezers(layout, config)
    return Circuit(layout, est.ops + [f1] + est.inverse().ops + [f2], name="qpe-filter")


def qpe_filter_unit(state: StateVector, layout: RegisterLayout, h: PauliHamiltonian, config: FilterConfig) -> StateVector:
    return qpe_filter_unit_circuit(layout, h, config).apply(state)


def heaviside_frozen_circuit(layout: RegisterLayout, h: PauliHamiltonian, config: FilterConfig) -> Circuit:
    """Counter and mark to all-ones, ``Q`` filter units, un-flip the mark where the counter never moved."""
    unit = qpe_filter_unit_circuit(layout, h, config)
    c = Circuit(layout, [x_gate(q) for q in layout.qubits("counting") + layout.qubits("mark")], name="heaviside-frozen")
    for _ in range(config.Q):
        c.extend(unit)
    c.append(x_gate(layout.qubit("mark"), [(layout.qubit("counting", 0), 1)]))
    return c


def heaviside_frozen(state: StateVector, layout: RegisterLayout, h: PauliHamiltonian, config: FilterConfig) -> StateVector:
    return heaviside_frozen_circuit(layout, h, config).apply(state)


def filter_circuit(layout: RegisterLayout, h: PauliHamiltonian, config: FilterConfig, strategy: str) -> Circuit:
    if strategy == "frozen":
        return heaviside_frozen_circuit(layout, h, config)
    if strategy == "primary":
        return heaviside_primary_circuit(layout, h, config)
    raise ConfigError(f"unknown filter strategy {strategy!r}")


def filter_layout(n: int, config: FilterConfig, strategy: str) -> RegisterLayout:
    if strategy == "frozen":
        return frozen_layout(n, config)
    if strategy == "primary":
        return primary_layout(n, config)
    raise ConfigError(f"unknown filter strategy {strategy!r}")


@dataclass(frozen=True)
class ShiftResult:
    w: int
    shift: float
    mark0_probability: float


def shift_sweep_filter(
    state_builder: Callable[[RegisterLayout], StateVector],
    h0: PauliHamiltonian,
    config: FilterConfig,
    strategy: str = "frozen",
) -> list[ShiftResult]:
    """Run the filter once per shifted Hamiltonian ``H_w`` and report mark-0 probabilities."""
    layout = filter_layout(h0.n_qubits, config, strategy)
    step = math.pi / 2 ** (config.R - 1)
    out = []
    for w, hw in enumerate(hamiltonian_set(h0, config.W, config.R)):
        psi = filter_circuit(layout, hw, config, strategy).apply(state_builder(layout))
        out.append(ShiftResult(w, w / config.W * step, pattern_probability(psi, layout, "mark", "0")))
    return out
