"""Quantum coin tossing: the flip operator, multi-coin Dirac filter and its frozen form.

A coin prepared in ``|0>`` next to an eigenstate ``|E>`` is flipped to
``cos(E)|0> + i sin(E)|1>``.  Tossing ``M`` coins leaves amplitude
``cos(E)**M`` on all-zero coins, a spike around ``E = 0``.

The frozen variant reuses a single coin: a ``K``-qubit counter starts at
all-ones and is incremented whenever the coin reads ``|1>``.  The first
increment wraps it to zero, which clears its top bit and disables every later
flip, so the coin stays ``|1>``.  Counter values reachable after ``M`` rounds
are ``2**K - 1`` (never flipped) and ``0 .. M-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .circuit import Circuit, GateOp, PermutationOp, h_gate, x_gate
from .errors import CapacityError, ConfigError, LayoutError
from .hamiltonian import PauliHamiltonian, unit_evolution
from .state import RegisterLayout, StateVector

Condition = Callable[[np.ndarray], np.ndarray]


def min_counting_qubits(rounds: int, per_round: int = 1) -> int:
    """Smallest ``K`` with ``per_round * rounds <= 2**(K-1)``."""
    need = max(per_round * rounds, 1)
    return max(1, math.ceil(math.log2(need)) + 1)


@dataclass(frozen=True)
class CoinConfig:
    """Coin count ``M``, counter size ``K`` and the gap data that justify ``M``.

    ``delta``, ``eps0`` and ``eps`` are optional so fixed-``M`` sweeps can be
    expressed; when all three are present (with ``n_qubits``) the constraints
    ``cos(eps0)**M >= 1/2`` and ``|cos(delta - eps0)|**M < eps / sqrt(2**N)``
    are checked.
    """

    M: int
    K: int
    delta: float | None = None
    eps0: float | None = None
    eps: float | None = None
    n_qubits: int | None = None

    def __post_init__(self):
        if self.M < 1:
            raise ConfigError(f"M must be at least 1, got {self.M}")
        if self.K < 1:
            raise ConfigError(f"K must be at least 1, got {self.K}")
        if self.M > 2 ** (self.K - 1):
            raise CapacityError(
                f"M={self.M} coin rounds need a counter of at least "
                f"{min_counting_qubits(self.M)} qubits, got K={self.K}"
            )
        if self.delta is not None and not self.delta > 0:
            raise ConfigError(f"gap delta must be positive, got {self.delta}")
        if self.eps0 is not None:
            if self.delta is None:
                raise ConfigError("eps0 needs a gap delta")
            if not 0 < self.eps0 <= self.delta / 2:
                raise ConfigError(f"eps0 must lie in (0, delta/2], got {self.eps0}")
            if math.cos(self.eps0) ** self.M < 0.5 - 1e-12:
                raise ConfigError(f"cos(eps0)**M = {math.cos(self.eps0) ** self.M:.3g} < 1/2")
        if self.eps is not None:
            if not 0 < self.eps < 1:
                raise ConfigError(f"eps must lie in (0, 1), got {self.eps}")
            if self.eps0 is None or self.n_qubits is None:
                raise ConfigError("eps needs delta, eps0 and n_qubits to be checked")
            leak = abs(math.cos(self.delta - self.eps0)) ** self.M
            bound = self.eps / math.sqrt(2**self.n_qubits)
            if not leak < bound:
                raise ConfigError(f"|cos(delta - eps0)|**M = {leak:.3g} is not below eps/sqrt(chi) = {bound:.3g}")

    @staticmethod
    def required_M(delta: float, eps: float, n_qubits: int) -> int:
        """Coins needed so the flip at distance ``delta/2`` is below ``eps/sqrt(2**N)``."""
        if not delta > 0:
            raise ConfigError(f"gap delta must be positive, got {delta}")
        if not 0 < eps < 1:
            raise ConfigError(f"eps must lie in (0, 1), got {eps}")
        c = math.cos(min(delta / 2, math.pi / 2))
        if c <= 0:
            return 1
        return max(1, math.ceil(math.log(math.sqrt(2**n_qubits) / eps) / -math.log(c)))

    @classmethod
    def design(cls, delta: float, eps: float, n_qubits: int, K: int | None = None) -> "CoinConfig":
        """Pick ``M`` from the gap, then the largest ``eps0`` with ``cos(eps0)**M >= 1/2``.

        ``K`` defaults to the smallest counter that holds ``M`` rounds; a
        smaller explicit ``K`` raises CapacityError.
        """
        M = cls.required_M(delta, eps, n_qubits)
        eps0 = min(math.acos(2 ** (-1 / M)), delta / 2)
        return cls(M, K if K is not None else min_counting_qubits(M), delta, eps0, eps, n_qubits)


# layouts -----------------------------------------------------------------


def primary_layout(n: int, M: int) -> RegisterLayout:
    return RegisterLayout.standard(physical=n, coins=M, mark=1)


def frozen_layout(n: int, K: int) -> RegisterLayout:
    return RegisterLayout.standard(physical=n, counting=K, mark=1)


# arithmetic on basis indices ----------------------------------------------


def qubit_is_one(layout: RegisterLayout, group: str, position: int = 0) -> Condition:
    shift = layout.total - 1 - layout.qubit(group, position)
    return lambda idx: ((idx >> shift) & 1) == 1


def group_nonzero(layout: RegisterLayout, group: str) -> Condition:
    return lambda idx: layout.group_values(idx, group) != 0


def increment_op(layout: RegisterLayout, counter: str, where: Condition | None = None, label: str = "add") -> PermutationOp:
    """``|x> -> |x+1 mod 2**K>`` on ``counter``, restricted to basis states satisfying ``where``."""
    size = layout.size(counter)
    shift = layout.total - layout.offset(counter) - size
    mask = ((1 << size) - 1) << shift

    def fn(idx):
        value = (idx & mask) >> shift
        bumped = (idx & ~mask) | (((value + 1) & ((1 << size) - 1)) << shift)
        return bumped if where is None else np.where(where(idx), bumped, idx)

    # the condition must not read the counter itself, so the map stays bijective
    return PermutationOp.from_map(layout, fn, label=label, check=where is not None)


def increment(state: StateVector, layout: RegisterLayout, counter: str = "counting") -> StateVector:
    return Circuit(layout, [increment_op(layout, counter)]).apply(state)


def freezing_operator(state: StateVector, layout: RegisterLayout, condition: Condition, counter: str = "counting") -> StateVector:
    """Increment ``counter`` exactly where ``condition`` holds."""
    return Circuit(layout, [increment_op(layout, counter, condition, label="freeze")]).apply(state)


# circuits ----------------------------------------------------------------


def evolution_ops(layout: RegisterLayout, h: PauliHamiltonian, coin: int, physical: str = "physical") -> list[GateOp]:
    """``e^{+iH}`` where the coin is ``|0>`` and ``e^{-iH}`` where it is ``|1>``."""
    if layout.size(physical) != h.n_qubits:
        raise LayoutError(f"register {physical!r} has {layout.size(physical)} qubits, Hamiltonian has {h.n_qubits}")
    phys = layout.qubits(physical)
    return [
        GateOp(phys, unit_evolution(h, 1), [(coin, 0)], label="evolve", evolutions=1, check=False),
        GateOp(phys, unit_evolution(h, -1), [(coin, 1)], label="evolve", evolutions=1, check=False),
    ]


def flip_circuit(layout: RegisterLayout, h: PauliHamiltonian, coin: int, physical: str = "physical") -> Circuit:
    """``B U_e B`` on one coin qubit."""
    ops = [h_gate(coin), *evolution_ops(layout, h, coin, physical), h_gate(coin)]
    return Circuit(layout, ops, name="flip")


def coin_controlled_evolution(state: StateVector, layout: RegisterLayout, h: PauliHamiltonian, coin: int) -> StateVector:
    return Circuit(layout, evolution_ops(layout, h, coin)).apply(state)


def flip_operator(state: StateVector, layout: RegisterLayout, h: PauliHamiltonian, coin: int) -> StateVector:
    return flip_circuit(layout, h, coin).apply(state)


def multi_coin_circuit(layout: RegisterLayout, h: PauliHamiltonian) -> Circuit:
    c = Circuit(layout, name="coins")
    for q in layout.qubits("coins"):
        c.extend(flip_circuit(layout, h, q))
    return c


def multi_coin_toss(state: StateVector, layout: RegisterLayout, h: PauliHamiltonian) -> StateVector:
    return multi_coin_circuit(layout, h).apply(state)


def dirac_primary_circuit(layout: RegisterLayout, h: PauliHamiltonian) -> Circuit:
    """X on the mark, toss every coin, flip the mark back where all coins read 0."""
    mark = layout.qubit("mark")
    c = Circuit(layout, [x_gate(mark)], name="dirac")
    c.extend(multi_coin_circuit(layout, h))
    c.append(x_gate(mark, layout.pattern_controls("coins", "0" * layout.size("coins"))))
    return c


def dirac_primary(state: StateVector, layout: RegisterLayout, h: PauliHamiltonian) -> StateVector:
    return dirac_primary_circuit(layout, h).apply(state)


@lru_cache(maxsize=32)
def _coin_freezer(layout: RegisterLayout) -> PermutationOp:
    return increment_op(layout, "counting", qubit_is_one(layout, "mark"), label="freeze")


def dirac_frozen_circuit(layout: RegisterLayout, h: PauliHamiltonian, M: int) -> Circuit:
    """Counter to all-ones, then ``M`` rounds of [flip if counter top bit is 1, freeze on coin 1].

    The single coin is the ``mark`` qubit; its ``|0>`` branch is the marked one.
    """
    K = layout.size("counting")
    if M > 2 ** (K - 1):
        raise CapacityError(f"M={M} rounds overflow a {K}-qubit counter (need M <= {2 ** (K - 1)})")
    coin = layout.qubit("mark")
    top = layout.qubit("counting", 0)
    round_ops = flip_circuit(layout, h, coin).controlled([(top, 1)]).ops + [_coin_freezer(layout)]
    c = Circuit(layout, [x_gate(q) for q in layout.qubits("counting")], name="dirac-frozen")
    for _ in range(M):
        c.extend(round_ops)
    return c


def dirac_frozen(state: StateVector, layout: RegisterLayout, h: PauliHamiltonian, config: CoinConfig) -> StateVector:
    if layout.size("counting") != config.K:
        raise LayoutError(f"counting register has {layout.size('counting')} qubits, config says K={config.K}")
    return dirac_frozen_circuit(layout, h, config.M).apply(state)
