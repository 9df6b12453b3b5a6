"""Dense statevectors over named qubit registers.

Bit order: inside a group, qubit 0 is the most significant bit, and the
global basis index is the big-endian concatenation of the groups in layout
order.  ``RegisterLayout.standard`` fixes that order to
physical, representation, counting, coins, mark.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import LayoutError, ResourceError, ValidationError

STANDARD_ORDER = ("physical", "representation", "counting", "coins", "mark")

#: Largest register the simulator will allocate (2**24 amplitudes = 256 MiB).
MAX_QUBITS = 24
# dense matrices on the physical register (initializers, evolutions)
DENSE_CAP = 12

Bits = Union[str, Sequence[int]]


def _parse_bits(bits: Bits) -> tuple[int, ...]:
    if isinstance(bits, str):
        if any(c not in "01" for c in bits):
            raise LayoutError(f"bit pattern {bits!r} may contain only '0' and '1'")
        return tuple(int(c) for c in bits)
    out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise LayoutError(f"bit pattern {bits!r} may contain only 0 and 1")
    return out


def bits_of(value: int, width: int) -> str:
    """Big-endian bit string of ``value`` on ``width`` bits."""
    if not 0 <= value < 2**width:
        raise LayoutError(f"value {value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered, disjoint qubit groups covering qubits ``0 .. total-1``."""

    groups: tuple[tuple[str, int], ...]

    def __post_init__(self):
        groups = tuple((str(name), int(size)) for name, size in self.groups)
        object.__setattr__(self, "groups", groups)
        names = [name for name, _ in groups]
        if len(set(names)) != len(names):
            raise LayoutError(f"duplicate group names in {names}")
        for name, size in groups:
            if size < 1:
                raise LayoutError(f"group {name!r} must hold at least one qubit")

    @classmethod
    def standard(cls, **sizes: int) -> "RegisterLayout":
        """Layout in the canonical group order; zero-sized groups are dropped.

        >>> RegisterLayout.standard(mark=1, physical=2).groups
        (('physical', 2), ('mark', 1))
        """
        unknown = set(sizes) - set(STANDARD_ORDER)
        if unknown:
            raise LayoutError(f"unknown standard groups {sorted(unknown)}")
        return cls(tuple((n, sizes[n]) for n in STANDARD_ORDER if sizes.get(n, 0) > 0))

    @property
    def total(self) -> int:
        return sum(size for _, size in self.groups)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.groups)

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def size(self, name: str) -> int:
        for n, s in self.groups:
            if n == name:
                return s
        raise LayoutError(f"layout has no group {name!r}; groups are {list(self.names)}")

    def offset(self, name: str) -> int:
        start = 0
        for n, s in self.groups:
            if n == name:
                return start
            start += s
        raise LayoutError(f"layout has no group {name!r}; groups are {list(self.names)}")

    def qubits(self, name: str) -> tuple[int, ...]:
        """Global qubit indices of a group, most significant first."""
        start = self.offset(name)
        return tuple(range(start, start + self.size(name)))

    def qubit(self, name: str, position: int = 0) -> int:
        qs = self.qubits(name)
        if not 0 <= position < len(qs):
            raise LayoutError(f"group {name!r} has no qubit {position}")
        return qs[position]

    def group_values(self, indices: np.ndarray, name: str) -> np.ndarray:
        """Value held by ``name`` in each basis index of ``indices``."""
        size = self.size(name)
        shift = self.total - self.offset(name) - size
        return (indices >> shift) & ((1 << size) - 1)

    def pattern_controls(self, name: str, bits: Bits) -> tuple[tuple[int, int], ...]:
        """(qubit, value) pairs requiring ``name`` to hold ``bits``."""
        pattern = _parse_bits(bits)
        if len(pattern) != self.size(name):
            raise LayoutError(
                f"pattern {bits!r} has length {len(pattern)}, group {name!r} has {self.size(name)} qubits"
            )
        return tuple(zip(self.qubits(name), pattern))


class StateVector:
    """Complex amplitudes of a ``2**n_total`` dimensional register.

    ``normalized`` is False after a projection; such states keep their
    squared norm as the probability of the projected outcome.
    """

    __slots__ = ("amplitudes", "normalized")

    def __init__(self, amplitudes, normalized: bool = True, check: bool = True):
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        if check:
            n = amps.size
            if n == 0 or n & (n - 1):
                raise ValidationError(f"statevector length {n} is not a power of two")
            norm2 = float(np.vdot(amps, amps).real)
            if normalized and abs(norm2 - 1.0) > 1e-10:
                raise ValidationError(f"normalized state has squared norm {norm2!r}")
            if not normalized and norm2 > 1.0 + 1e-10:
                raise ValidationError(f"sub-normalized state has squared norm {norm2!r}")
        self.amplitudes = amps
        self.normalized = normalized

    @property
    def n_total(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.normalized, check=False)

    def tensor(self) -> np.ndarray:
        """View of the amplitudes with one axis of length 2 per qubit."""
        return self.amplitudes.reshape((2,) * self.n_total)

    def renormalized(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValidationError("cannot renormalize the zero vector")
        return StateVector(self.amplitudes / nrm, True, check=False)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.amplitudes)

    def __repr__(self):
        flag = "normalized" if self.normalized else "sub-normalized"
        return f"StateVector(n_total={self.n_total}, {flag}, norm={self.norm():.6g})"


def _check_cap(n: int):
    if n > MAX_QUBITS:
        raise ResourceError(f"{n} qubits exceed the simulator cap of {MAX_QUBITS}")


def zero_state(layout: RegisterLayout) -> StateVector:
    _check_cap(layout.total)
    amps = np.zeros(2**layout.total, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(amps, check=False)


def basis_state(layout: RegisterLayout, bits: Bits) -> StateVector:
    """Computational basis state ``|bits>`` over the whole layout.

    >>> basis_state(RegisterLayout((("q", 3),)), "110").amplitudes.argmax()
    6
    """
    pattern = _parse_bits(bits)
    if len(pattern) != layout.total:
        raise LayoutError(f"pattern of length {len(pattern)} for a {layout.total}-qubit layout")
    _check_cap(layout.total)
    amps = np.zeros(2**layout.total, dtype=np.complex128)
    amps[int("".join(map(str, pattern)) or "0", 2)] = 1.0
    return StateVector(amps, check=False)


def product_state(layout: RegisterLayout, parts: dict) -> StateVector:
    """Tensor product of per-group states given as amplitude vectors or bit strings.

    Groups not mentioned start in ``|0...0>``.
    """
    _check_cap(layout.total)
    vec = np.ones(1, dtype=np.complex128)
    for name, size in layout.groups:
        part = parts.get(name)
        if part is None:
            sub = np.zeros(2**size, dtype=np.complex128)
            sub[0] = 1.0
        elif isinstance(part, str):
            sub = np.zeros(2**size, dtype=np.complex128)
            pattern = _parse_bits(part)
            if len(pattern) != size:
                raise LayoutError(f"pattern {part!r} does not match group {name!r} of size {size}")
            sub[int(part, 2)] = 1.0
        else:
            sub = np.asarray(part, dtype=np.complex128).reshape(-1)
            if sub.size != 2**size:
                raise LayoutError(f"group {name!r} needs {2**size} amplitudes, got {sub.size}")
        vec = np.kron(vec, sub)
    unknown = set(parts) - set(layout.names)
    if unknown:
        raise LayoutError(f"layout has no groups {sorted(unknown)}")
    return StateVector(vec, normalized=abs(np.linalg.norm(vec) - 1) < 1e-10)


def _group_mask(state: StateVector, layout: RegisterLayout, group: str, bits: Bits) -> np.ndarray:
    if state.n_total != layout.total:
        raise LayoutError(f"state has {state.n_total} qubits, layout has {layout.total}")
    pattern = _parse_bits(bits)
    size = layout.size(group)
    if len(pattern) != size:
        raise LayoutError(f"pattern {bits!r} has length {len(pattern)}, group {group!r} has {size} qubits")
    value = int("".join(map(str, pattern)), 2)
    idx = np.arange(state.dim)
    return layout.group_values(idx, group) == value


def pattern_probability(state: StateVector, layout: RegisterLayout, group: str, bits: Bits) -> float:
    """Probability that measuring ``group`` yields ``bits``."""
    mask = _group_mask(state, layout, group, bits)
    a = state.amplitudes[mask]
    return float(np.vdot(a, a).real)


def project_pattern(state: StateVector, layout: RegisterLayout, group: str, bits: Bits) -> StateVector:
    """Zero every amplitude whose ``group`` value differs from ``bits``.

    The result is flagged sub-normalized even when nothing was removed; a
    zero-probability pattern yields the zero vector rather than an error.
    """
    mask = _group_mask(state, layout, group, bits)
    amps = np.where(mask, state.amplitudes, 0.0)
    return StateVector(amps, normalized=False, check=False)


def fidelity(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|**2`` for two states of equal dimension."""
    if a.dim != b.dim:
        raise ValidationError(f"dimension mismatch {a.dim} vs {b.dim}")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def reduced_physical_state(state: StateVector, layout: RegisterLayout, group: str = "physical") -> StateVector:
    """Amplitudes of ``group`` when every other group is in a single basis state.

    Raises ValidationError if the other registers are not in a product basis
    state (within 1e-9), since the group then has no pure state of its own.
    """
    n = layout.total
    if state.n_total != n:
        raise LayoutError(f"state has {state.n_total} qubits, layout has {n}")
    qs = layout.qubits(group)
    t = np.moveaxis(state.tensor(), qs, range(len(qs))).reshape(2 ** len(qs), -1)
    weights = np.einsum("ij,ij->j", t.conj(), t).real
    col = int(np.argmax(weights))
    total = weights.sum()
    if total == 0:
        raise ValidationError("cannot reduce the zero vector")
    if total - weights[col] > 1e-9 * total:
        raise ValidationError(f"group {group!r} is entangled with the other registers")
    return StateVector(t[:, col] / np.sqrt(weights[col]), check=False)


def random_init_unitary(n_qubits: int, seed: int, kind: str = "phase") -> np.ndarray:
    """Matrix of the seeded initializer acting on ``n_qubits`` physical qubits.

    ``kind="phase"`` is a Hadamard layer followed by a random diagonal phase
    gate, so ``U|0>`` has equal-modulus amplitudes with independent uniform
    phases.  ``kind="haar"`` draws a Haar-random unitary instead.
    """
    if n_qubits > DENSE_CAP:
        raise ResourceError(f"{n_qubits} qubits exceed the dense cap of {DENSE_CAP}")
    rng = np.random.default_rng(seed)
    dim = 2**n_qubits
    if kind == "phase":
        phases = np.exp(2j * np.pi * rng.random(dim))
        had = np.ones((1, 1))
        h1 = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        for _ in range(n_qubits):
            had = np.kron(had, h1)
        return phases[:, None] * had
    if kind == "haar":
        z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
        q, r = np.linalg.qr(z)
        d = np.diag(r)
        return q * (d / np.abs(d))
    raise ValidationError(f"unknown initializer kind {kind!r}")


def random_init_state(layout: RegisterLayout, seed: int, kind: str = "phase", group: str = "physical") -> StateVector:
    """``U_I |0...0>`` on ``group`` with every other group left at ``|0...0>``."""
    u = random_init_unitary(layout.size(group), seed, kind)
    return product_state(layout, {group: u[:, 0]})


def sample_probability(p: float, shots: int, rng: np.random.Generator) -> float:
    """Frequency estimate of ``p`` from ``shots`` Bernoulli trials; exact when shots == 0."""
    if shots <= 0:
        return float(p)
    p = min(max(float(p), 0.0), 1.0)
    return rng.binomial(shots, p) / shots


def qubit_count_for(dim: int) -> int:
    n = int(round(math.log2(dim)))
    if 2**n != dim:
        raise ValidationError(f"dimension {dim} is not a power of two")
    return n
