import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhes.circuit import HADAMARD
from qhes.dirac import (
    CoinConfig,
    dirac_frozen,
    dirac_frozen_circuit,
    dirac_primary,
    flip_operator,
    freezing_operator,
    frozen_layout,
    group_nonzero,
    increment,
    min_counting_qubits,
    multi_coin_toss,
    primary_layout,
    qubit_is_one,
)
from qhes.errors import CapacityError, ConfigError
from qhes.hamiltonian import PauliHamiltonian, random_hamiltonian, unit_evolution
from qhes.reference import brute_force_eigs
from qhes.state import RegisterLayout, StateVector, basis_state, pattern_probability, product_state


def _scalar(E):
    """One-qubit Hamiltonian with both eigenvalues equal to ``E``."""
    return PauliHamiltonian(1, (), E)


def _coin_amps(E, layout=None):
    lay = layout or RegisterLayout.standard(physical=1, mark=1)
    out = flip_operator(basis_state(lay, "00"), lay, _scalar(E), lay.qubit("mark"))
    return out.amplitudes[:2]


class TestFlip:
    def test_zero(self):
        np.testing.assert_allclose(_coin_amps(0.0), [1, 0], atol=1e-15)

    def test_half_pi(self):
        np.testing.assert_allclose(_coin_amps(math.pi / 2), [0, 1j], atol=1e-15)

    def test_quarter_pi_against_dense_product(self):
        amps = _coin_amps(math.pi / 4)
        np.testing.assert_allclose(amps, [math.sqrt(2) / 2, 1j * math.sqrt(2) / 2], atol=1e-15)
        ue = np.diag([np.exp(1j * math.pi / 4), np.exp(-1j * math.pi / 4)])
        np.testing.assert_allclose(amps, (HADAMARD @ ue @ HADAMARD)[:, 0], atol=1e-15)

    def test_random_eigenstates(self):
        h = random_hamiltonian(2, np.random.default_rng(0))
        ref = brute_force_eigs(h)
        lay = RegisterLayout.standard(physical=2, mark=1)
        for j in range(4):
            v, E = ref.eigenvectors[:, j], ref.eigenvalues[j]
            out = flip_operator(product_state(lay, {"physical": v}), lay, h, lay.qubit("mark"))
            np.testing.assert_allclose(out.amplitudes, np.kron(v, [math.cos(E), 1j * math.sin(E)]), atol=1e-12)


class TestMultiCoin:
    def _all_zero(self, E, M):
        lay = RegisterLayout.standard(physical=1, coins=M)
        return multi_coin_toss(basis_state(lay, "0" * (M + 1)), lay, _scalar(E)).amplitudes[0]

    def test_two_coins_quarter_pi(self):
        assert abs(self._all_zero(math.pi / 4, 2)) ** 2 == pytest.approx(0.25)

    @pytest.mark.parametrize("M", [1, 3, 5])
    def test_zero_energy(self, M):
        assert self._all_zero(0.0, M) == pytest.approx(1.0)

    def test_three_coins(self):
        assert self._all_zero(0.7, 3) == pytest.approx(math.cos(0.7) ** 3, abs=1e-12)


class TestPrimary:
    def _mark0(self, E, M):
        lay = primary_layout(1, M)
        return pattern_probability(dirac_primary(basis_state(lay, "0" * (M + 2)), lay, _scalar(E)), lay, "mark", "0")

    def test_zero_energy(self):
        assert self._mark0(0.0, 3) == pytest.approx(1.0)

    def test_half_pi_single_coin(self):
        assert self._mark0(math.pi / 2, 1) == pytest.approx(0.0, abs=1e-30)

    def test_superposition(self):
        h = random_hamiltonian(2, np.random.default_rng(1))
        ref = brute_force_eigs(h)
        lam = np.array([0.5, 0.5j, -0.5, 0.5])
        M = 3
        lay = primary_layout(2, M)
        psi = product_state(lay, {"physical": ref.eigenvectors @ lam})
        out = dirac_primary(psi, lay, h).amplitudes.reshape(4, 2**M, 2)
        branch = ref.eigenvectors.conj().T @ out[:, 0, 0]
        np.testing.assert_allclose(branch, lam * np.cos(ref.eigenvalues) ** M, atol=1e-12)


class TestIncrement:
    def test_six_to_seven(self):
        lay = RegisterLayout.standard(counting=4)
        assert increment(basis_state(lay, "0110"), lay).amplitudes[7] == 1

    def test_wraparound(self):
        lay = RegisterLayout.standard(counting=3)
        assert increment(basis_state(lay, "111"), lay).amplitudes[0] == 1

    def test_cycle(self):
        lay = RegisterLayout.standard(physical=1, counting=3)
        rng = np.random.default_rng(2)
        v = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        psi = StateVector(v / np.linalg.norm(v))
        out = psi
        for _ in range(8):
            out = increment(out, lay)
        np.testing.assert_allclose(out.amplitudes, psi.amplitudes)


class TestFreezing:
    lay = RegisterLayout.standard(counting=4, mark=1)

    def test_coin_zero_unchanged(self):
        for x in range(16):
            bits = format(x, "04b") + "0"
            out = freezing_operator(basis_state(self.lay, bits), self.lay, qubit_is_one(self.lay, "mark"))
            assert out.amplitudes[int(bits, 2)] == 1

    def test_coin_one_increments(self):
        out = freezing_operator(basis_state(self.lay, "01101"), self.lay, qubit_is_one(self.lay, "mark"))
        assert out.amplitudes[int("01111", 2)] == 1

    def test_group_nonzero_condition(self):
        lay = RegisterLayout.standard(physical=2, counting=2)
        cond = group_nonzero(lay, "physical")
        assert freezing_operator(basis_state(lay, "0000"), lay, cond).amplitudes[0] == 1
        assert freezing_operator(basis_state(lay, "0100"), lay, cond).amplitudes[int("0101", 2)] == 1


class TestFrozen:
    def test_zero_energy(self):
        lay = frozen_layout(1, 3)
        out = dirac_frozen(basis_state(lay, "00000"), lay, _scalar(0.0), CoinConfig(4, 3))
        assert pattern_probability(out, lay, "mark", "0") == pytest.approx(1.0)

    def test_four_rounds(self):
        lay = frozen_layout(1, 3)
        out = dirac_frozen(basis_state(lay, "00000"), lay, _scalar(0.7), CoinConfig(4, 3))
        amps = out.amplitudes.reshape(2, 8, 2)[0]
        assert amps[7, 0] == pytest.approx(math.cos(0.7) ** 4, abs=1e-12)

    def test_branch_bookkeeping(self):
        E, M, K = 0.7, 4, 3
        lay = frozen_layout(1, K)
        amps = dirac_frozen(basis_state(lay, "00000"), lay, _scalar(E), CoinConfig(M, K)).amplitudes.reshape(2, 8, 2)[0]
        # a coin that first flips in round m leaves the counter at M - m
        for m in range(1, M + 1):
            expected = math.cos(E) ** (m - 1) * 1j * math.sin(E)
            assert abs(amps[M - m, 1]) == pytest.approx(abs(expected), abs=1e-12)
        assert np.sum(np.abs(amps) ** 2) == pytest.approx(1.0, abs=1e-12)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            CoinConfig(5, 3)
        assert min_counting_qubits(5) == 4


class TestCoinConfig:
    def test_design_constraints(self):
        cfg = CoinConfig.design(1.0, 1e-3, 2)
        assert math.cos(cfg.eps0) ** cfg.M >= 0.5 - 1e-12
        assert abs(math.cos(cfg.delta - cfg.eps0)) ** cfg.M < 1e-3 / 2
        assert cfg.M <= 2 ** (cfg.K - 1)

    def test_small_counter_rejected(self):
        with pytest.raises(CapacityError):
            CoinConfig.design(1.0, 1e-3, 2, K=2)

    @pytest.mark.parametrize("kw", [dict(M=0, K=2), dict(M=2, K=2, delta=-1.0), dict(M=2, K=2, delta=1.0, eps0=0.9)])
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            CoinConfig(**kw)

    def test_primary_regime(self):
        # a designed config keeps the ground spike high and the gap leak low
        h = PauliHamiltonian.from_diagonal([0.0, 1.4, 1.45, 1.5])
        ref = brute_force_eigs(h)
        shifted = h
        cfg = CoinConfig.design(1.4, 0.1, 2)
        lay = primary_layout(2, cfg.M)
        g = []
        for j in range(4):
            out = dirac_primary(product_state(lay, {"physical": ref.eigenvectors[:, j]}), lay, shifted)
            g.append(math.sqrt(pattern_probability(out, lay, "mark", "0")))
        assert g[0] >= 0.5
        assert max(g[1:]) <= 0.1 / 2


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 2), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_frozen_equals_multi_coin(n, K, seed):
    rng = np.random.default_rng(seed)
    h = random_hamiltonian(n, rng, 1.4)
    ref = brute_force_eigs(h)
    M = int(rng.integers(1, 2 ** (K - 1) + 1))
    lf = frozen_layout(n, K)
    lp = RegisterLayout.standard(physical=n, coins=M)
    cf = dirac_frozen_circuit(lf, h, M)
    for j in range(2**n):
        v = ref.eigenvectors[:, j]
        multi = v.conj() @ multi_coin_toss(product_state(lp, {"physical": v}), lp, h).amplitudes.reshape(2**n, 2**M)[:, 0]
        out = cf.apply(product_state(lf, {"physical": v})).amplitudes.reshape(2**n, 2**K, 2)
        assert abs(v.conj() @ out[:, -1, 0] - multi) < 1e-12
        reachable = np.flatnonzero(np.abs(out).sum(axis=(0, 2)) > 1e-14)
        assert len(reachable) <= M + 1
        assert abs(np.linalg.norm(out) - 1) < 1e-11


def test_evolution_sign_convention():
    h = _scalar(0.3)
    np.testing.assert_allclose(unit_evolution(h, 1), np.exp(0.3j) * np.eye(2))
