import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhes.amplify import (
    FixedPointConfig,
    Initializer,
    MarkingOracle,
    chebyshev,
    fixed_point_amplify,
    fixed_point_length,
    fixed_point_phases,
    fixed_point_success,
    fixed_point_width,
    grover_iterations,
    grover_success,
    marked_probability,
    reflect_initial,
    reflect_marked,
)
from qhes.circuit import Circuit, x_gate
from qhes.errors import ConfigError, LayoutError
from qhes.hamiltonian import PauliHamiltonian
from qhes.heaviside import FilterConfig, filter_circuit, frozen_layout
from qhes.qpe import retention
from qhes.state import RegisterLayout, StateVector, basis_state, zero_state


def _search(n, target):
    """Oracle with mark 0 exactly on the physical basis state ``target``."""
    lay = RegisterLayout.standard(physical=n, mark=1)
    m = lay.qubit("mark")
    return lay, MarkingOracle(Circuit(lay, [x_gate(m), x_gate(m, lay.pattern_controls("physical", target))]))


def _init_with_overlap(lay, target_index, p):
    """Initializer whose state has probability ``p`` on one physical basis state."""
    dim = 2 ** lay.size("physical")
    col = np.full(dim, math.sqrt((1 - p) / (dim - 1)), complex)
    col[target_index] = math.sqrt(p)
    a = np.random.default_rng(0).standard_normal((dim, dim)).astype(complex)
    a[:, 0] = col
    q, r = np.linalg.qr(a)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return Initializer(lay, q)


def _rand(lay, rng):
    v = rng.standard_normal(2**lay.total) + 1j * rng.standard_normal(2**lay.total)
    return StateVector(v / np.linalg.norm(v))


class TestSchedule:
    def test_chebyshev(self):
        assert chebyshev(3, 0.5) == pytest.approx(4 * 0.125 - 3 * 0.5)
        assert chebyshev(3, 2.0) == pytest.approx(math.cosh(3 * math.acosh(2.0)))

    def test_length_covers_p_min(self):
        for p_min in (0.01, 0.05, 0.25, 1.0):
            L = fixed_point_length(0.1, p_min)
            assert L % 2 == 1
            assert L >= math.ceil(math.log(2 / 0.1) / math.sqrt(p_min))
            assert fixed_point_width(L, 0.1) <= p_min

    def test_phase_pairs(self):
        a, b = fixed_point_phases(7, 0.1)
        assert len(a) == len(b) == 3
        np.testing.assert_allclose(b, -a[::-1])

    def test_grover(self):
        assert grover_iterations(0.25) == 1
        assert grover_success(0.25, 1) == pytest.approx(1.0)

    @pytest.mark.parametrize("kw", [dict(delta=0.0), dict(delta=1.0), dict(p_min=0.0), dict(mode="other"), dict(L=4), dict(L=1, p_min=0.01)])
    def test_config_errors(self, kw):
        with pytest.raises(ConfigError):
            FixedPointConfig(**kw)


class TestReflections:
    def setup_method(self):
        self.lay, self.oracle = _search(2, "10")
        self.init = Initializer.random(self.lay, 3)

    def test_initial_on_itself(self):
        s = self.init.state()
        np.testing.assert_allclose(reflect_initial(s, self.init).amplitudes, -s.amplitudes, atol=1e-12)

    def test_initial_on_orthogonal(self):
        s = self.init.state().amplitudes
        v = _rand(self.lay, np.random.default_rng(1)).amplitudes
        v = v - (s.conj() @ v) * s
        psi = StateVector(v / np.linalg.norm(v))
        np.testing.assert_allclose(reflect_initial(psi, self.init).amplitudes, psi.amplitudes, atol=1e-12)

    def test_involutions(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            psi = _rand(self.lay, rng)
            np.testing.assert_allclose(reflect_initial(reflect_initial(psi, self.init), self.init).amplitudes, psi.amplitudes, atol=1e-10)
            np.testing.assert_allclose(reflect_marked(reflect_marked(psi, self.oracle), self.oracle).amplitudes, psi.amplitudes, atol=1e-10)

    def test_layout_mismatch(self):
        with pytest.raises(LayoutError):
            reflect_marked(basis_state(RegisterLayout.standard(physical=1), "0"), self.oracle)


class TestHeavisideOracle:
    cfg = FilterConfig(R=3, Q=1)

    def _oracle(self, E):
        lay = frozen_layout(1, self.cfg)
        return lay, MarkingOracle(filter_circuit(lay, PauliHamiltonian(1, (), E), self.cfg, "frozen"))

    def test_fully_marked(self):
        lay, oracle = self._oracle(2 * math.pi * 2 / 8)
        psi = zero_state(lay)
        np.testing.assert_allclose(reflect_marked(psi, oracle).amplitudes, -psi.amplitudes, atol=1e-12)

    def test_unmarked(self):
        lay, oracle = self._oracle(2 * math.pi * 5 / 8)
        psi = zero_state(lay)
        np.testing.assert_allclose(reflect_marked(psi, oracle).amplitudes, psi.amplitudes, atol=1e-12)

    def test_generic_matches_dense_projector(self):
        lay, oracle = self._oracle(1.9)
        o = oracle.circuit.unitary()
        mark0 = np.array([(i & 1) == 0 for i in range(2**lay.total)], float)
        proj = o.conj().T @ np.diag(mark0) @ o
        psi = _rand(lay, np.random.default_rng(3))
        expected = psi.amplitudes - 2 * proj @ psi.amplitudes
        np.testing.assert_allclose(reflect_marked(psi, oracle).amplitudes, expected, atol=1e-9)

    def test_marked_probability_is_alpha_squared(self):
        E = 1.2
        lay, oracle = self._oracle(E)
        out = oracle.apply(zero_state(lay))
        assert marked_probability(out, lay) == pytest.approx(retention(E, 3) ** 2, abs=1e-10)

    def test_ancillas_clean_for_exact_eigenvalues(self):
        for x in range(8):
            lay, oracle = self._oracle(2 * math.pi * x / 8)
            out = reflect_marked(zero_state(lay), oracle).amplitudes.reshape(2, -1)
            # everything stays on the all-zero ancilla pattern
            assert np.sum(np.abs(out[:, 1:]) ** 2) <= 1e-9


def test_marked_probability_of_zero_vector():
    lay = RegisterLayout.standard(physical=1, mark=1)
    assert marked_probability(StateVector(np.zeros(4), normalized=False), lay) == 0.0


class TestFixedPoint:
    def test_already_marked_no_overcooking(self):
        lay, oracle = _search(2, "01")
        init = _init_with_overlap(lay, 1, 1.0)
        for L in (3, 5, 11):
            res = fixed_point_amplify(init, oracle, FixedPointConfig(0.1, 1.0, L=L))
            assert res.probability == pytest.approx(1.0, abs=1e-12)

    def test_known_p_quarter(self):
        lay, oracle = _search(2, "11")
        init = Initializer.random(lay, 0)
        res = fixed_point_amplify(init, oracle, FixedPointConfig(mode="known-p"))
        assert res.iterations == 1
        assert res.probability >= 0.99

    def test_small_p(self):
        lay, oracle = _search(3, "110")
        init = _init_with_overlap(lay, 6, 0.05)
        cfg = FixedPointConfig(0.1, 0.05)
        res = fixed_point_amplify(init, oracle, cfg)
        assert res.probability >= 0.99
        assert res.probability == pytest.approx(fixed_point_success(0.05, cfg.L, 0.1), abs=1e-9)
        assert res.oracle_calls == 2 * res.iterations + 1

    def test_layout_mismatch(self):
        lay, oracle = _search(2, "11")
        init = Initializer.random(RegisterLayout.standard(physical=2), 0)
        with pytest.raises(LayoutError):
            fixed_point_amplify(init, oracle, FixedPointConfig())


@settings(max_examples=25, deadline=None)
@given(st.floats(0.02, 1.0), st.floats(0.05, 0.5))
def test_fixed_point_floor_over_p(p_min, delta):
    L = fixed_point_length(delta, p_min)
    for p in np.linspace(p_min, 1, 12):
        assert fixed_point_success(p, L, delta) >= 1 - delta**2 - 1e-12


@settings(max_examples=15, deadline=None)
@given(st.floats(0.03, 1.0), st.integers(0, 7))
def test_known_p_matches_grover_recurrence(p, target):
    lay, oracle = _search(3, format(target, "03b"))
    init = _init_with_overlap(lay, target, p)
    res = fixed_point_amplify(init, oracle, FixedPointConfig(mode="known-p"), p=p)
    k = grover_iterations(p)
    assert res.probability == pytest.approx(math.sin((2 * k + 1) * math.asin(math.sqrt(p))) ** 2, abs=1e-9)
