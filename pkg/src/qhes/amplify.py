"""Amplitude amplification around a marking oracle.

The marked subspace is defined in the oracle's input frame: ``P = O^dag M O``
where ``M`` projects the mark qubit onto ``|0>``.  Reflections about ``P``
are realized as ``O^dag (phase on mark 0) O``, so ancillas are uncomputed on
every branch and only the physical register carries amplified amplitude.

Fixed-point search uses the phase schedule of Yoder, Low and Chuang
(PRL 113, 210501): for odd ``L = 2l + 1`` queries and target residual
``delta``,

    gamma**-1 = T_{1/L}(1/delta)
    alpha_j = 2 arccot(tan(2 pi j / L) sqrt(1 - gamma**2)),   j = 1..l
    beta_{l-j+1} = -alpha_j

and the success probability ``1 - delta**2 T_L(T_{1/L}(1/delta) sqrt(1-p))**2``
is at least ``1 - delta**2`` for every initial success probability
``p >= 1 - gamma**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, GateOp, PhaseOp
from .errors import ConfigError, LayoutError
from .state import RegisterLayout, StateVector, pattern_probability, product_state, random_init_unitary


def chebyshev(L: float, x: float) -> float:
    """``T_L(x)`` for real ``L`` and ``x`` (cosh branch outside [-1, 1])."""
    if abs(x) <= 1:
        return math.cos(L * math.acos(x))
    return math.cosh(L * math.acosh(x)) if x > 0 else (-1) ** int(L) * math.cosh(L * math.acosh(-x))


def fixed_point_width(L: int, delta: float) -> float:
    """Smallest initial probability ``w = 1 - gamma**2`` guaranteed by ``L`` queries."""
    gamma = 1 / chebyshev(1 / L, 1 / delta)
    return 1 - gamma * gamma


def fixed_point_length(delta: float, p_min: float) -> int:
    """Smallest odd ``L >= ln(2/delta)/sqrt(p_min)`` whose guarantee covers ``p_min``."""
    L = max(1, math.ceil(math.log(2 / delta) / math.sqrt(p_min)))
    L += 1 - L % 2
    while fixed_point_width(L, delta) > p_min:
        L += 2
    return L


def fixed_point_phases(L: int, delta: float) -> tuple[np.ndarray, np.ndarray]:
    if L < 1 or L % 2 == 0:
        raise ConfigError(f"L must be a positive odd integer, got {L}")
    l = (L - 1) // 2
    s = math.sqrt(fixed_point_width(L, delta))
    alphas = np.array([2 * math.atan2(1, math.tan(2 * math.pi * j / L) * s) for j in range(1, l + 1)])
    return alphas, -alphas[::-1]


def fixed_point_success(p: float, L: int, delta: float) -> float:
    """Closed-form success probability after ``L`` queries from initial probability ``p``."""
    return 1 - delta**2 * chebyshev(L, chebyshev(1 / L, 1 / delta) * math.sqrt(1 - p)) ** 2


def grover_iterations(p: float) -> int:
    """``floor(pi / (4 arcsin sqrt p))``, the textbook optimum for known ``p``."""
    if not 0 < p <= 1:
        raise ConfigError(f"initial probability must lie in (0, 1], got {p}")
    return int(math.floor(math.pi / (4 * math.asin(math.sqrt(p)))))


def grover_success(p: float, k: int) -> float:
    return math.sin((2 * k + 1) * math.asin(math.sqrt(p))) ** 2


@dataclass(frozen=True)
class FixedPointConfig:
    delta: float = 0.1
    p_min: float = 0.25
    mode: str = "fixed-point"
    L: int | None = None

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0 < self.p_min <= 1:
            raise ConfigError(f"p_min must lie in (0, 1], got {self.p_min}")
        if self.mode not in ("fixed-point", "known-p"):
            raise ConfigError(f"mode must be 'fixed-point' or 'known-p', got {self.mode!r}")
        if self.mode == "fixed-point":
            floor = math.ceil(math.log(2 / self.delta) / math.sqrt(self.p_min))
            if self.L is None:
                object.__setattr__(self, "L", fixed_point_length(self.delta, self.p_min))
            elif self.L < floor or self.L % 2 == 0:
                raise ConfigError(f"L={self.L} must be odd and at least {floor}")


class MarkingOracle:
    """A circuit whose output marks good inputs with ``bits`` on ``group`` (default mark = 0)."""

    def __init__(self, circuit: Circuit, group: str = "mark", bits: str = "0"):
        self.circuit = circuit
        self.inverse_circuit = circuit.inverse()
        self.layout = circuit.layout
        self.group = group
        self.bits = bits
        self._controls = self.layout.pattern_controls(group, bits)

    def apply(self, state: StateVector) -> StateVector:
        return self.circuit.apply(state)

    def marked_probability(self, state: StateVector) -> float:
        """Probability that ``state`` lies in the marked subspace ``O^dag M O``."""
        return marked_probability(self.apply(state), self.layout, self.group, self.bits)

    def phase_op(self, phase: float) -> PhaseOp:
        return PhaseOp(self._controls, phase, label="mark-phase")


class Initializer:
    """``U_I`` on the physical register, every other register left at ``|0...0>``."""

    def __init__(self, layout: RegisterLayout, unitary: np.ndarray, group: str = "physical"):
        self.layout = layout
        self.group = group
        self.unitary = np.asarray(unitary, dtype=np.complex128)
        self.op = GateOp(layout.qubits(group), self.unitary, label="init")
        self.op_inverse = self.op.inverse()

    @classmethod
    def random(cls, layout: RegisterLayout, seed: int, kind: str = "phase", group: str = "physical") -> "Initializer":
        return cls(layout, random_init_unitary(layout.size(group), seed, kind), group)

    def state(self) -> StateVector:
        return product_state(self.layout, {self.group: self.unitary[:, 0]})

    def phase_circuit(self, phase: float) -> Circuit:
        """``U_I (phase on the all-zero basis state) U_I^dag``."""
        zeros = [(q, 0) for q in range(self.layout.total)]
        return Circuit(self.layout, [self.op_inverse, PhaseOp(zeros, phase, label="zero-phase"), self.op])


def marked_probability(state: StateVector, layout: RegisterLayout, group: str = "mark", bits: str = "0") -> float:
    return pattern_probability(state, layout, group, bits)


def _run(circuit: Circuit, psi: np.ndarray):
    for op in circuit.ops:
        op.apply_inplace(psi)


def _marked_phase(psi: np.ndarray, oracle: MarkingOracle, phase: float):
    _run(oracle.circuit, psi)
    oracle.phase_op(phase).apply_inplace(psi)
    _run(oracle.inverse_circuit, psi)


def reflect_initial(state: StateVector, init: Initializer, phase: float = math.pi) -> StateVector:
    """``I - (1 - e^{i phase}) |s><s|``; ``phase = pi`` gives ``I - 2|s><s|``."""
    if state.n_total != init.layout.total:
        raise LayoutError("state and initializer layouts differ")
    return init.phase_circuit(phase).apply(state)


def reflect_marked(state: StateVector, oracle: MarkingOracle, phase: float = math.pi) -> StateVector:
    """``I - (1 - e^{i phase}) P``; ``phase = pi`` gives ``I - 2P``."""
    if state.n_total != oracle.layout.total:
        raise LayoutError("state and oracle layouts differ")
    out = state.copy()
    _marked_phase(out.tensor(), oracle, phase)
    return out


@dataclass
class AmplifiedState:
    state: StateVector          # amplified input-frame state
    output: StateVector         # after one more oracle application
    probability: float          # marked probability of ``output``
    oracle_calls: int
    iterations: int


def fixed_point_amplify(
    init: Initializer,
    oracle: MarkingOracle,
    config: FixedPointConfig,
    p: float | None = None,
) -> AmplifiedState:
    """Amplify the marked part of ``U_I|0>``.

    In ``known-p`` mode the iteration count is ``grover_iterations(p)``, with
    ``p`` taken from the argument or measured exactly on the initial state.
    """
    if init.layout != oracle.layout:
        raise LayoutError("initializer and oracle act on different layouts")
    psi_state = init.state()
    psi = psi_state.tensor()
    calls = 0
    if config.mode == "known-p":
        if p is None:
            p = oracle.marked_probability(psi_state)
            calls += 1
        steps = [(math.pi, math.pi)] * (grover_iterations(p) if p > 0 else 0)
    else:
        alphas, betas = fixed_point_phases(config.L, config.delta)
        steps = list(zip(alphas, betas))
    for alpha, beta in steps:
        # S_t(beta) then S_s(alpha); the global sign of the iterate is dropped
        _marked_phase(psi, oracle, beta)
        _run(init.phase_circuit(-alpha), psi)
        calls += 2
    out = oracle.apply(psi_state)
    calls += 1
    prob = marked_probability(out, oracle.layout, oracle.group, oracle.bits)
    return AmplifiedState(psi_state, out, prob, calls, len(steps))
