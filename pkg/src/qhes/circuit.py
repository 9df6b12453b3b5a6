"""Gate operations and circuits acting in place on dense statevectors.

Every operation carries an optional list of ``(qubit, value)`` controls and
acts as the identity outside the subspace where all controls match.  A
control value of 0 conditions on ``|0>`` directly, without X sandwiches.
"""

from __future__ import annotations

from bisect import bisect_left
from collections import Counter
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import LayoutError, ValidationError
from .state import RegisterLayout, StateVector

Controls = tuple[tuple[int, int], ...]

UNITARY_TOL = 1e-10

HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)


def _norm_controls(controls) -> Controls:
    out = tuple((int(q), int(v)) for q, v in controls)
    for q, v in out:
        if v not in (0, 1):
            raise ValidationError(f"control value on qubit {q} must be 0 or 1, got {v}")
    if len({q for q, _ in out}) != len(out):
        raise ValidationError(f"repeated control qubit in {out}")
    return out


def _control_index(n: int, controls: Controls) -> tuple:
    idx = [slice(None)] * n
    for q, v in controls:
        idx[q] = v
    # a trailing Ellipsis keeps the result a view even when every axis is fixed
    return tuple(idx) + (Ellipsis,)


def _sub_axes(qubits: Sequence[int], controls: Controls) -> list[int]:
    fixed = sorted(q for q, _ in controls)
    return [q - bisect_left(fixed, q) for q in qubits]


def _check_range(n: int, qubits: Iterable[int]):
    for q in qubits:
        if not 0 <= q < n:
            raise LayoutError(f"qubit index {q} out of range for a {n}-qubit state")


class Op:
    """Base class: subclasses implement ``apply_inplace``, ``inverse`` and ``controlled``."""

    controls: Controls = ()
    label: str = "op"
    #: number of unit-time evolutions e^{+-iH} this op stands for
    evolutions: int = 0

    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.controls)

    def apply_inplace(self, psi: np.ndarray) -> None:
        raise NotImplementedError

    def inverse(self) -> "Op":
        raise NotImplementedError

    def controlled(self, controls) -> "Op":
        raise NotImplementedError


class GateOp(Op):
    """Unitary block on ``targets`` (first target = most significant row bit)."""

    def __init__(self, targets, matrix, controls=(), label: str = "gate", evolutions: int = 0, check: bool = True):
        self.targets = tuple(int(q) for q in targets)
        self.matrix = np.asarray(matrix, dtype=np.complex128)
        self.controls = _norm_controls(controls)
        self.label = label
        self.evolutions = evolutions
        k = len(self.targets)
        if len(set(self.targets)) != k:
            raise ValidationError(f"repeated target qubit in {self.targets}")
        if set(self.targets) & {q for q, _ in self.controls}:
            raise ValidationError("controls and targets overlap")
        if self.matrix.shape != (2**k, 2**k):
            raise ValidationError(f"block of shape {self.matrix.shape} for {k} target qubits")
        if check:
            err = np.abs(self.matrix.conj().T @ self.matrix - np.eye(2**k)).max()
            if err > UNITARY_TOL:
                raise ValidationError(f"block is not unitary (deviation {err:.3g})")

    def qubits(self):
        return self.targets + super().qubits()

    def apply_inplace(self, psi):
        n = psi.ndim
        _check_range(n, self.qubits())
        sub = psi[_control_index(n, self.controls)]
        axes = _sub_axes(self.targets, self.controls)
        k = len(axes)
        block = self.matrix.reshape((2,) * (2 * k))
        out = np.tensordot(block, sub, axes=(list(range(k, 2 * k)), axes))
        sub[...] = np.moveaxis(out, list(range(k)), axes)

    def inverse(self):
        return GateOp(self.targets, self.matrix.conj().T, self.controls, self.label + "^-1", self.evolutions, check=False)

    def controlled(self, controls):
        return GateOp(self.targets, self.matrix, self.controls + _norm_controls(controls), self.label, self.evolutions, check=False)


class PhaseOp(Op):
    """Multiply the amplitudes where every control matches by ``exp(i*phase)``."""

    def __init__(self, controls, phase: float, label: str = "phase"):
        self.controls = _norm_controls(controls)
        self.phase = float(phase)
        self.label = label

    def apply_inplace(self, psi):
        _check_range(psi.ndim, self.qubits())
        sub = psi[_control_index(psi.ndim, self.controls)]
        sub *= np.exp(1j * self.phase)

    def inverse(self):
        return PhaseOp(self.controls, -self.phase, self.label)

    def controlled(self, controls):
        return PhaseOp(self.controls + _norm_controls(controls), self.phase, self.label)


class FourierOp(Op):
    """Discrete Fourier transform on a contiguous run of qubits.

    ``sign=-1`` maps ``|k> -> 2**(-R/2) sum_x exp(-2 pi i k x / 2**R) |x>``,
    the inverse transform used at the end of phase estimation; ``sign=+1``
    is its adjoint.
    """

    def __init__(self, targets, sign: int, controls=(), label: str = "qft"):
        self.targets = tuple(int(q) for q in targets)
        if list(self.targets) != list(range(self.targets[0], self.targets[0] + len(self.targets))):
            raise ValidationError("Fourier targets must be contiguous and ascending")
        if sign not in (-1, 1):
            raise ValidationError("sign must be +1 or -1")
        self.sign = sign
        self.controls = _norm_controls(controls)
        if set(self.targets) & {q for q, _ in self.controls}:
            raise ValidationError("controls and targets overlap")
        self.label = label if sign > 0 else label + "^-1"

    def qubits(self):
        return self.targets + super().qubits()

    def apply_inplace(self, psi):
        _check_range(psi.ndim, self.qubits())
        sub = psi[_control_index(psi.ndim, self.controls)]
        first = _sub_axes(self.targets[:1], self.controls)[0]
        k = len(self.targets)
        shape = sub.shape
        flat = sub.reshape(shape[:first] + (2**k,) + shape[first + k:])
        if self.sign < 0:
            out = np.fft.fft(flat, axis=first, norm="ortho")
        else:
            out = np.fft.ifft(flat, axis=first, norm="ortho")
        sub[...] = out.reshape(shape)

    def inverse(self):
        return FourierOp(self.targets, -self.sign, self.controls, self.label.removesuffix("^-1"))

    def controlled(self, controls):
        op = FourierOp(self.targets, self.sign, self.controls + _norm_controls(controls))
        op.label = self.label
        return op


class PermutationOp(Op):
    """Basis permutation ``|i> -> |dest[i]>`` on an ``n``-qubit register.

    Used for reversible classical logic: multi-controlled NOTs with
    arbitrary conditions, counters and freezing operators.
    """

    def __init__(self, n: int, dest: np.ndarray, label: str = "perm", controls=()):
        dest = np.asarray(dest, dtype=np.int64)
        if dest.shape != (2**n,):
            raise ValidationError(f"permutation of length {dest.size} for {n} qubits")
        self.n = n
        self.dest = dest
        self.label = label
        self.controls = _norm_controls(controls)

    @classmethod
    def from_map(cls, layout: RegisterLayout, fn: Callable[[np.ndarray], np.ndarray], label: str = "perm", check: bool = True):
        """Build from a vectorised map of basis indices; ``check`` verifies bijectivity."""
        idx = np.arange(2**layout.total, dtype=np.int64)
        dest = np.asarray(fn(idx), dtype=np.int64)
        if check:
            seen = np.zeros(dest.size, dtype=bool)
            seen[dest] = True
            if not seen.all():
                raise ValidationError(f"map for {label!r} is not a permutation")
        return cls(layout.total, dest, label)

    def apply_inplace(self, psi):
        if psi.ndim != self.n:
            raise LayoutError(f"permutation built for {self.n} qubits applied to {psi.ndim}")
        flat = psi.reshape(-1)
        out = np.empty_like(flat)
        out[self.dest] = flat
        flat[...] = out

    def inverse(self):
        inv = np.empty_like(self.dest)
        inv[self.dest] = np.arange(self.dest.size)
        return PermutationOp(self.n, inv, self.label + "^-1", self.controls)

    def controlled(self, controls):
        controls = _norm_controls(controls)
        idx = np.arange(self.dest.size, dtype=np.int64)
        active = np.ones(idx.size, dtype=bool)
        for q, v in controls:
            active &= ((idx >> (self.n - 1 - q)) & 1) == v
        # the permutation must not move a state out of the control subspace
        dest = np.where(active, self.dest, idx)
        return PermutationOp(self.n, dest, self.label, self.controls + controls)


class RegisterPowerOp(Op):
    """Apply ``stack[x]`` to ``targets`` wherever ``register`` holds the value ``x``.

    With ``stack[x] = U**x`` this is the whole controlled-power ladder of
    phase estimation: register qubit ``p`` (of ``R``) switches on
    ``2**(R-1-p)`` applications of ``U``.  Both qubit runs must be
    contiguous and ascending.
    """

    def __init__(self, targets, register, stack, controls=(), label: str = "c-power", evolutions: int = 0):
        self.targets = tuple(int(q) for q in targets)
        self.register = tuple(int(q) for q in register)
        for run in (self.targets, self.register):
            if list(run) != list(range(run[0], run[0] + len(run))):
                raise ValidationError("power-ladder qubits must be contiguous and ascending")
        self.stack = np.asarray(stack, dtype=np.complex128)
        dt, dr = 2 ** len(self.targets), 2 ** len(self.register)
        if self.stack.shape != (dr, dt, dt):
            raise ValidationError(f"stack of shape {self.stack.shape}, expected {(dr, dt, dt)}")
        self.controls = _norm_controls(controls)
        if len(set(self.targets) | set(self.register) | {q for q, _ in self.controls}) != (
            len(self.targets) + len(self.register) + len(self.controls)
        ):
            raise ValidationError("targets, register and controls overlap")
        self.label = label
        self.evolutions = evolutions

    def qubits(self):
        return self.targets + self.register + super().qubits()

    def apply_inplace(self, psi):
        _check_range(psi.ndim, self.qubits())
        sub = psi[_control_index(psi.ndim, self.controls)]
        axes = _sub_axes(self.targets + self.register, self.controls)
        front = list(range(len(axes)))
        moved = np.moveaxis(sub, axes, front)
        shape = moved.shape
        dt, dr = self.stack.shape[1], self.stack.shape[0]
        arr = moved.reshape(dt, dr, -1)
        out = np.einsum("xab,bxr->axr", self.stack, arr)
        sub[...] = np.moveaxis(out.reshape(shape), front, axes)

    def inverse(self):
        return RegisterPowerOp(
            self.targets, self.register, np.conj(np.swapaxes(self.stack, 1, 2)), self.controls,
            self.label + "^-1", self.evolutions,
        )

    def controlled(self, controls):
        return RegisterPowerOp(
            self.targets, self.register, self.stack, self.controls + _norm_controls(controls),
            self.label, self.evolutions,
        )


def x_gate(qubit: int, controls=()) -> GateOp:
    return GateOp((qubit,), PAULI_X, controls, label="x" if not controls else "mcx", check=False)


def h_gate(qubit: int, controls=()) -> GateOp:
    return GateOp((qubit,), HADAMARD, controls, label="h", check=False)


class Circuit:
    """An ordered list of operations on a fixed register layout."""

    def __init__(self, layout: RegisterLayout, ops: Iterable[Op] = (), name: str = "circuit"):
        self.layout = layout
        self.ops: list[Op] = list(ops)
        self.name = name

    def append(self, op: Op) -> "Circuit":
        self.ops.append(op)
        return self

    def extend(self, other) -> "Circuit":
        ops = other.ops if isinstance(other, Circuit) else other
        self.ops.extend(ops)
        return self

    def __add__(self, other: "Circuit") -> "Circuit":
        """``a + b`` applies ``a`` first, then ``b``."""
        if other.layout != self.layout:
            raise LayoutError("cannot concatenate circuits on different layouts")
        return Circuit(self.layout, self.ops + other.ops, self.name)

    def __len__(self):
        return len(self.ops)

    def inverse(self) -> "Circuit":
        return Circuit(self.layout, [op.inverse() for op in reversed(self.ops)], self.name + "^-1")

    def controlled(self, controls) -> "Circuit":
        return Circuit(self.layout, [op.controlled(controls) for op in self.ops], "c-" + self.name)

    def repeated(self, times: int) -> "Circuit":
        return Circuit(self.layout, self.ops * times, f"{self.name}^{times}")

    def apply(self, state: StateVector) -> StateVector:
        if state.n_total != self.layout.total:
            raise LayoutError(f"circuit on {self.layout.total} qubits applied to a {state.n_total}-qubit state")
        out = state.copy()
        psi = out.tensor()
        for op in self.ops:
            op.apply_inplace(psi)
        return out

    __call__ = apply

    def gate_counts(self) -> dict[str, int]:
        counts = Counter(op.label for op in self.ops)
        counts["unit_evolutions"] = sum(op.evolutions for op in self.ops)
        return dict(counts)

    def unitary(self) -> np.ndarray:
        """Dense matrix of the circuit, column by column (small layouts only)."""
        dim = 2**self.layout.total
        cols = np.empty((dim, dim), dtype=np.complex128)
        for j in range(dim):
            e = np.zeros(dim, dtype=np.complex128)
            e[j] = 1.0
            cols[:, j] = self.apply(StateVector(e, check=False)).amplitudes
        return cols


def apply_gate(state: StateVector, op: Op) -> StateVector:
    """Return ``op`` applied to a copy of ``state``."""
    out = state.copy()
    op.apply_inplace(out.tensor())
    return out


def apply_controlled_block(state: StateVector, controls, targets, block) -> StateVector:
    """Apply ``block`` to ``targets`` on the subspace where every control matches."""
    return apply_gate(state, GateOp(targets, block, controls, label="block"))
