"""Pauli-string Hamiltonians, spectrum normalization and exact time evolution.

Text format (one item per line, ``#`` starts a comment)::

    n_qubits 3
    -0.5 ZZI
    -0.5 IZZ
    offset 0.25

Terms are ``<coefficient> <pauli-string>`` with letters from ``IXYZ``; the
first letter acts on physical qubit 0, the most significant bit.  The
``n_qubits`` line must precede the terms and ``offset`` may appear at most
once.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ParseError, ResourceError, ValidationError
from .state import DENSE_CAP

#: Largest Hamiltonian converted to a dense matrix.

_PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

# Active fault injections, used by the verification suite to prove that its
# checks can fail.  Only "sign-flip" is recognised.
_FAULTS: set[str] = set()


@contextlib.contextmanager
def inject_fault(name: str):
    """Temporarily corrupt the evolution kernel (``"sign-flip"`` swaps e^{+iH} and e^{-iH})."""
    if name != "sign-flip":
        raise ValidationError(f"unknown fault {name!r}")
    _FAULTS.add(name)
    _clear_caches()
    try:
        yield
    finally:
        _FAULTS.discard(name)
        _clear_caches()


@dataclass(frozen=True)
class PauliHamiltonian:
    """``H = sum_l c_l P_l + offset * I`` with real coefficients."""

    n_qubits: int
    terms: tuple[tuple[str, float], ...] = ()
    offset: float = 0.0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValidationError("a Hamiltonian needs at least one qubit")
        terms = []
        for pauli, coef in self.terms:
            pauli = str(pauli).upper()
            if len(pauli) != self.n_qubits or any(c not in _PAULI for c in pauli):
                raise ValidationError(f"Pauli string {pauli!r} is not a word over IXYZ of length {self.n_qubits}")
            c = complex(coef)
            if c.imag != 0:
                raise ValidationError(f"coefficient of {pauli} must be real, got {coef!r}")
            terms.append((pauli, float(c.real)))
        object.__setattr__(self, "terms", tuple(terms))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def crude_bounds(self) -> tuple[float, float]:
        """``offset -/+ sum |c_l|``: always contains the spectrum."""
        r = sum(abs(c) for _, c in self.terms)
        return self.offset - r, self.offset + r

    def is_zero(self) -> bool:
        return self.offset == 0 and all(c == 0 for _, c in self.terms)

    def scaled(self, scale: float, shift: float = 0.0) -> "PauliHamiltonian":
        """``scale * H + shift * I``."""
        terms = tuple((p, scale * c) for p, c in self.terms)
        return PauliHamiltonian(self.n_qubits, terms, scale * self.offset + shift)

    def shifted(self, shift: float) -> "PauliHamiltonian":
        return PauliHamiltonian(self.n_qubits, self.terms, self.offset + shift)

    # text format ---------------------------------------------------------

    @classmethod
    def parse(cls, text: str) -> "PauliHamiltonian":
        n = None
        terms: list[tuple[str, float]] = []
        offset = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0]
            tokens = _tokens(line)
            if not tokens:
                continue
            (col0, head), rest = tokens[0], tokens[1:]
            key = head.lower()
            if key == "n_qubits":
                if n is not None:
                    raise ParseError("n_qubits given twice", lineno, col0, head)
                if len(rest) != 1:
                    raise ParseError("expected 'n_qubits <count>'", lineno, col0, head)
                col, tok = rest[0]
                try:
                    n = int(tok)
                except ValueError:
                    raise ParseError(f"qubit count {tok!r} is not an integer", lineno, col, tok) from None
                if n < 1:
                    raise ParseError("qubit count must be positive", lineno, col, tok)
                continue
            if key == "offset":
                if offset is not None:
                    raise ParseError("offset given twice", lineno, col0, head)
                if len(rest) != 1:
                    raise ParseError("expected 'offset <value>'", lineno, col0, head)
                offset = _number(rest[0], lineno)
                continue
            coef = _number(tokens[0], lineno)
            if n is None:
                raise ParseError("term before the n_qubits line", lineno, col0, head)
            if len(rest) != 1:
                raise ParseError("expected '<coefficient> <pauli-string>'", lineno, col0, head)
            col, word = rest[0]
            for k, ch in enumerate(word):
                if ch.upper() not in _PAULI:
                    raise ParseError(f"invalid Pauli letter {ch!r} in {word!r}", lineno, col + k, word)
            if len(word) != n:
                raise ParseError(f"Pauli string {word!r} has length {len(word)}, expected {n}", lineno, col, word)
            terms.append((word.upper(), coef))
        if n is None:
            raise ParseError("missing n_qubits line")
        return cls(n, tuple(terms), offset or 0.0)

    def format(self) -> str:
        lines = [f"n_qubits {self.n_qubits}"]
        lines += [f"{c!r} {p}" for p, c in self.terms]
        if self.offset:
            lines.append(f"offset {self.offset!r}")
        return "\n".join(lines) + "\n"

    # constructors --------------------------------------------------------

    @classmethod
    def from_diagonal(cls, values: Sequence[float]) -> "PauliHamiltonian":
        """Diagonal Hamiltonian with the given computational-basis energies."""
        return cls.from_matrix(np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def from_matrix(cls, matrix, tol: float = 1e-14) -> "PauliHamiltonian":
        """Pauli decomposition ``c_P = tr(P M) / 2**n`` of a Hermitian matrix."""
        m = np.asarray(matrix, dtype=np.complex128)
        dim = m.shape[0]
        n = int(round(math.log2(dim))) if dim else 0
        if m.shape != (dim, dim) or 2**n != dim or n < 1:
            raise ValidationError(f"matrix of shape {m.shape} is not a square power-of-two matrix")
        if np.abs(m - m.conj().T).max() > 1e-12:
            raise ValidationError("matrix is not Hermitian")
        if n > DENSE_CAP:
            raise ResourceError(f"{n} qubits exceed the dense cap of {DENSE_CAP}")
        # c[k_0..k_{n-1}] = sum prod_q P_{k_q}[r_q, c_q] * M[c, r] / 2**n
        letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
        ks, rs, cs = letters[:n], letters[n:2 * n], letters[2 * n:3 * n]
        basis = np.stack([_PAULI[c] for c in "IXYZ"])
        subscripts = ",".join(f"{ks[q]}{rs[q]}{cs[q]}" for q in range(n)) + f",{cs}{rs}->{ks}"
        coeffs = np.einsum(subscripts, *([basis] * n), m.reshape((2,) * (2 * n)), optimize=True) / dim
        terms = []
        offset = 0.0
        nq = n
        for idx in np.ndindex(*coeffs.shape):
            c = coeffs[idx]
            if abs(c) <= tol:
                continue
            word = "".join("IXYZ"[k] for k in idx)
            if word == "I" * nq:
                offset = float(c.real)
            else:
                terms.append((word, float(c.real)))
        return cls(nq, tuple(terms), offset)


def _tokens(line: str) -> list[tuple[int, str]]:
    out = []
    col = 0
    for part in line.split():
        col = line.index(part, col)
        out.append((col + 1, part))
        col += len(part)
    return out


def _number(token: tuple[int, str], lineno: int) -> float:
    col, tok = token
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"expected a number, found {tok!r}", lineno, col, tok) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite number {tok!r}", lineno, col, tok)
    return v


def ising_chain(n: int) -> PauliHamiltonian:
    """Open Ising chain ``-(1/(n-1)) sum_k Z_k Z_{k+1}`` with ground energy -1."""
    if n < 2:
        raise ValidationError("the Ising chain needs at least two qubits")
    terms = []
    for k in range(n - 1):
        word = ["I"] * n
        word[k] = word[k + 1] = "Z"
        terms.append(("".join(word), -1.0 / (n - 1)))
    return PauliHamiltonian(n, tuple(terms))


@lru_cache(maxsize=64)
def dense_matrix(h: PauliHamiltonian) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix (read-only, cached)."""
    check_dense(h)
    m = h.offset * np.eye(h.dim, dtype=np.complex128)
    for word, c in h.terms:
        op = np.ones((1, 1), dtype=np.complex128)
        for ch in word:
            op = np.kron(op, _PAULI[ch])
        m += c * op
    m.setflags(write=False)
    return m


@lru_cache(maxsize=64)
def check_dense(h: PauliHamiltonian):
    """Fail fast when ``h`` is too large for dense evolution matrices."""
    if h.n_qubits > DENSE_CAP:
        raise ResourceError(f"{h.n_qubits} qubits exceed the dense cap of {DENSE_CAP}")


def _eigh(h: PauliHamiltonian):
    w, v = np.linalg.eigh(dense_matrix(h))
    return w, v


@dataclass(frozen=True)
class AffineSpectrumMap:
    """Order-preserving map ``E -> scale * E + shift``."""

    scale: float
    shift: float

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale) and math.isfinite(self.shift)):
            raise ValidationError(f"affine map needs a finite positive scale, got {self.scale!r}")

    def apply(self, e):
        return self.scale * np.asarray(e) + self.shift if not np.isscalar(e) else self.scale * e + self.shift

    def inverse(self, y):
        return (np.asarray(y) - self.shift) / self.scale if not np.isscalar(y) else (y - self.shift) / self.scale

    def apply_width(self, width: float) -> float:
        return self.scale * width

    def inverse_width(self, width: float) -> float:
        return width / self.scale

    def compose(self, inner: "AffineSpectrumMap") -> "AffineSpectrumMap":
        """``self`` after ``inner``."""
        return AffineSpectrumMap(self.scale * inner.scale, self.scale * inner.shift + self.shift)

    def transform(self, h: PauliHamiltonian) -> PauliHamiltonian:
        return h.scaled(self.scale, self.shift)


IDENTITY_MAP = AffineSpectrumMap(1.0, 0.0)


def spectrum_map(
    bounds: tuple[float, float],
    target: tuple[float, float],
    margin: float = 0.95,
    pin: tuple[float, float] | None = None,
) -> AffineSpectrumMap:
    """Affine map sending ``[lo, hi]`` inside ``target``.

    Without ``pin`` the bounds are centred in the target and stretched to a
    ``margin`` fraction of it.  With ``pin = (E, y)`` the raw value ``E`` is
    sent exactly to ``y`` and the scale is the largest keeping the bounds at
    most a ``margin`` fraction of the way from ``y`` to each target edge.
    """
    lo, hi = map(float, bounds)
    tlo, thi = map(float, target)
    if not thi > tlo:
        raise ValidationError(f"empty target interval {target}")
    if hi < lo:
        raise ValidationError(f"inverted bounds {bounds}")
    if not 0 < margin <= 1:
        raise ValidationError("margin must lie in (0, 1]")
    if pin is None:
        centre = 0.5 * (tlo + thi)
        if hi == lo:
            return AffineSpectrumMap(1.0, centre - lo)
        a = margin * (thi - tlo) / (hi - lo)
        return AffineSpectrumMap(a, centre - a * 0.5 * (lo + hi))
    e0, y = map(float, pin)
    if not tlo <= y <= thi:
        raise ValidationError(f"pinned image {y} lies outside the target {target}")
    limits = []
    if e0 > lo:
        limits.append((y - tlo) / (e0 - lo))
    if hi > e0:
        limits.append((thi - y) / (hi - e0))
    if not limits:
        return AffineSpectrumMap(1.0, y - e0)
    a = margin * min(limits)
    if not a > 0:
        raise ValidationError(f"pin {pin} leaves no room inside {target}")
    return AffineSpectrumMap(a, y - a * e0)


def normalize_spectrum(
    h: PauliHamiltonian,
    target: tuple[float, float],
    bounds: tuple[float, float] | None = None,
    margin: float = 0.95,
    pin: tuple[float, float] | None = None,
) -> tuple[PauliHamiltonian, AffineSpectrumMap]:
    """Rescale ``h`` so that its spectrum lies inside ``target``.

    ``bounds`` defaults to the crude bound ``offset -/+ sum |c|``; pass exact
    eigenvalue bounds to tighten it.  Returns ``(a*h + b, map)``.
    """
    if h.is_zero():
        raise ValidationError("cannot normalize the zero operator")
    m = spectrum_map(bounds or h.crude_bounds(), target, margin, pin)
    return m.transform(h), m


def unit_evolution(h: PauliHamiltonian, sign: int = 1) -> np.ndarray:
    """``exp(sign * i * H)`` computed from the Hermitian eigendecomposition."""
    if sign not in (1, -1):
        raise ValidationError("sign must be +1 or -1")
    return _unit_evolution(h, sign if "sign-flip" not in _FAULTS else -sign)


@lru_cache(maxsize=64)
def _unit_evolution(h: PauliHamiltonian, sign: int) -> np.ndarray:
    w, v = _eigh(h)
    u = (v * np.exp(sign * 1j * w)) @ v.conj().T
    u.setflags(write=False)
    return u


@lru_cache(maxsize=64)
def _power_stack(h: PauliHamiltonian, sign: int, count: int) -> np.ndarray:
    # U^0 .. U^{count-1} by repeated multiplication of the unit evolution
    u = _unit_evolution(h, sign)
    out = np.empty((count, h.dim, h.dim), dtype=np.complex128)
    out[0] = np.eye(h.dim)
    for k in range(1, count):
        out[k] = u @ out[k - 1]
    out.setflags(write=False)
    return out


def power_stack(h: PauliHamiltonian, sign: int, count: int) -> np.ndarray:
    """Array ``[U^0, U^1, ..., U^{count-1}]`` for ``U = exp(sign*i*H)``.

    Each power is the product of unit evolutions, never ``exp(i k H)``.
    """
    if count < 1:
        raise ValidationError("count must be positive")
    return _power_stack(h, sign if "sign-flip" not in _FAULTS else -sign, count)


def evolution_power(h: PauliHamiltonian, k: int, sign: int = 1) -> np.ndarray:
    """``U^k`` by binary powering of the unit evolution."""
    if k < 0:
        raise ValidationError("power must be non-negative")
    result = np.eye(h.dim, dtype=np.complex128)
    base = unit_evolution(h, sign)
    while k:
        if k & 1:
            result = base @ result
        base = base @ base
        k >>= 1
    return result


def _clear_caches():
    _unit_evolution.cache_clear()
    _power_stack.cache_clear()


def power_evolution(state, layout, h: PauliHamiltonian, k: int, sign: int = 1):
    """Apply ``exp(sign*i*H)`` ``k`` times to the physical register of ``state``."""
    from .circuit import apply_gate, GateOp

    return apply_gate(state, GateOp(layout.qubits("physical"), evolution_power(h, k, sign), label="U^k"))


def hamiltonian_set(h0: PauliHamiltonian, W: int, R: int) -> list[PauliHamiltonian]:
    """``H_w = H_0 + (w/W) * (pi / 2**(R-1)) * I`` for ``w = 0 .. W-1``."""
    if W < 1 or R < 1:
        raise ValidationError("W and R must be positive")
    step = math.pi / 2 ** (R - 1)
    return [h0.shifted(w / W * step) if w else h0 for w in range(W)]


def random_hamiltonian(n: int, rng: np.random.Generator, scale: float = 1.0) -> PauliHamiltonian:
    """Dense random Hermitian matrix converted to Pauli form (test helper)."""
    dim = 2**n
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = (a + a.conj().T) / 2
    return PauliHamiltonian.from_matrix(scale * m / np.abs(np.linalg.eigvalsh(m)).max())
