import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhes.circuit import apply_controlled_block
from qhes.dirac import coin_controlled_evolution
from qhes.errors import ParseError, ResourceError, ValidationError
from qhes.hamiltonian import (
    AffineSpectrumMap,
    PauliHamiltonian,
    dense_matrix,
    evolution_power,
    ising_chain,
    hamiltonian_set,
    inject_fault,
    normalize_spectrum,
    power_evolution,
    random_hamiltonian,
    spectrum_map,
    unit_evolution,
)
from qhes.reference import brute_force_eigs
from qhes.state import RegisterLayout, StateVector, basis_state, product_state


def _eigs(h):
    return np.linalg.eigvalsh(dense_matrix(h))


class TestDenseMatrix:
    def test_pauli_z(self):
        np.testing.assert_array_equal(dense_matrix(PauliHamiltonian(1, (("Z", 1.0),))), np.diag([1, -1]))

    def test_zz(self):
        np.testing.assert_array_equal(dense_matrix(PauliHamiltonian(2, (("ZZ", -1.0),))), np.diag([-1, 1, 1, -1]))

    def test_ising_chain_n3_spectrum(self):
        values, counts = np.unique(np.round(_eigs(ising_chain(3)), 12), return_counts=True)
        np.testing.assert_allclose(values, [-1, 0, 1], atol=1e-12)
        np.testing.assert_array_equal(counts, [2, 4, 2])

    def test_cap(self):
        with pytest.raises(ResourceError):
            dense_matrix(PauliHamiltonian(13, (("Z" * 13, 1.0),)))

    def test_hermitian(self):
        m = dense_matrix(random_hamiltonian(3, np.random.default_rng(0)))
        np.testing.assert_allclose(m, m.conj().T, atol=1e-12)

    def test_from_matrix_round_trip(self):
        h = random_hamiltonian(2, np.random.default_rng(1))
        np.testing.assert_allclose(dense_matrix(PauliHamiltonian.from_matrix(dense_matrix(h))), dense_matrix(h), atol=1e-12)


class TestTextFormat:
    def test_round_trip(self):
        h = PauliHamiltonian(3, (("ZZI", -0.5), ("IXY", 0.25)), 0.125)
        assert PauliHamiltonian.parse(h.format()) == h

    def test_comments_and_offset(self):
        h = PauliHamiltonian.parse("# chain\nn_qubits 2\n-1 ZZ  # coupling\noffset 0.5\n")
        assert h.terms == (("ZZ", -1.0),) and h.offset == 0.5

    @pytest.mark.parametrize(
        "text, line, token",
        [
            ("n_qubits 2\n0.5 ZQ", 2, "ZQ"),
            ("n_qubits 2\nabc ZZ", 2, "abc"),
            ("n_qubits two", 1, "two"),
            ("0.5 Z", 1, "0.5"),
            ("n_qubits 2\n0.5 ZZZ", 2, "ZZZ"),
            ("n_qubits 1\noffset 1\noffset 2", 3, "offset"),
        ],
    )
    def test_errors_name_line_and_token(self, text, line, token):
        with pytest.raises(ParseError) as info:
            PauliHamiltonian.parse(text)
        assert info.value.line == line
        assert token in str(info.value)

    def test_invalid_letter_reports_column(self):
        with pytest.raises(ParseError) as info:
            PauliHamiltonian.parse("n_qubits 2\n  0.5 ZQ")
        assert info.value.column == 8

    def test_complex_coefficient_rejected(self):
        with pytest.raises(ValidationError):
            PauliHamiltonian(1, (("Z", 1j),))


class TestNormalize:
    def test_z_into_judge_interval(self):
        h, amap = normalize_spectrum(PauliHamiltonian(1, (("Z", 1.0),)), (0, 3 * math.pi / 2))
        e = _eigs(h)
        assert e.min() >= 0 and e.max() <= 3 * math.pi / 2
        assert amap.scale > 0

    def test_identity_map_when_contained(self):
        amap = AffineSpectrumMap(1.0, 0.0)
        h = ising_chain(2)
        assert amap.transform(h) == h

    def test_ising_n2_pinned_ground(self):
        h = ising_chain(2)
        hn, amap = normalize_spectrum(h, (-math.pi / 2, math.pi / 2), pin=(-1.0, 0.0))
        assert amap.apply(-1.0) == pytest.approx(0.0, abs=1e-15)
        e = _eigs(hn)
        assert e.min() == pytest.approx(0.0, abs=1e-12)
        assert e.max() < math.pi / 2

    def test_zero_operator(self):
        with pytest.raises(ValidationError):
            normalize_spectrum(PauliHamiltonian(1), (0, 1))

    def test_scale_must_be_positive(self):
        with pytest.raises(ValidationError):
            AffineSpectrumMap(-1.0, 0.0)

    def test_margin(self):
        amap = spectrum_map((-1, 1), (0, 2), margin=0.95)
        assert amap.apply(-1) == pytest.approx(0.05) and amap.apply(1) == pytest.approx(1.95)


class TestEvolution:
    def test_zero_hamiltonian(self):
        np.testing.assert_array_equal(unit_evolution(PauliHamiltonian(2)), np.eye(4))

    def test_diagonal_phase(self):
        u = unit_evolution(PauliHamiltonian(1, (("Z", math.pi / 2),)))
        assert u[0, 0] == pytest.approx(1j)

    def test_random_columns_orthonormal(self):
        u = unit_evolution(random_hamiltonian(2, np.random.default_rng(2)))
        np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-11)

    def test_bad_sign(self):
        with pytest.raises(ValidationError):
            unit_evolution(ising_chain(2), 2)

    def test_power_zero_is_identity(self):
        np.testing.assert_array_equal(evolution_power(ising_chain(2), 0), np.eye(4))

    def test_power_two_quarter_z(self):
        lay = RegisterLayout.standard(physical=1)
        h = PauliHamiltonian(1, (("Z", math.pi / 4),))
        out = power_evolution(basis_state(lay, "1"), lay, h, 2)
        assert out.amplitudes[1] == pytest.approx(-1j)

    def test_power_eight_matches_dense(self):
        h = random_hamiltonian(2, np.random.default_rng(3))
        w, v = np.linalg.eigh(dense_matrix(h))
        exact = (v * np.exp(8j * w)) @ v.conj().T
        np.testing.assert_allclose(evolution_power(h, 8), exact, atol=1e-9)

    def test_sign_flip_fault_is_scoped(self):
        h = ising_chain(2)
        with inject_fault("sign-flip"):
            flipped = unit_evolution(h, 1)
        np.testing.assert_allclose(flipped, unit_evolution(h, -1))
        assert not np.allclose(unit_evolution(h, 1), flipped)


class TestCoinControlledEvolution:
    def setup_method(self):
        self.h = random_hamiltonian(2, np.random.default_rng(4))
        self.ref = brute_force_eigs(self.h)
        self.lay = RegisterLayout.standard(physical=2, mark=1)
        self.coin = self.lay.qubit("mark")

    def test_coin_zero_eigen_action(self):
        v, E = self.ref.eigenvectors[:, 0], self.ref.eigenvalues[0]
        out = coin_controlled_evolution(product_state(self.lay, {"physical": v}), self.lay, self.h, self.coin)
        np.testing.assert_allclose(out.amplitudes, np.kron(np.exp(1j * E) * v, [1, 0]), atol=1e-12)

    def test_superposed_coin(self):
        v, E = self.ref.eigenvectors[:, 1], self.ref.eigenvalues[1]
        psi = StateVector(np.kron(v, [1, 1]) / math.sqrt(2))
        out = coin_controlled_evolution(psi, self.lay, self.h, self.coin)
        expected = (np.kron(np.exp(1j * E) * v, [1, 0]) + np.kron(np.exp(-1j * E) * v, [0, 1])) / math.sqrt(2)
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-12)

    def test_matches_controlled_blocks(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        psi = StateVector(x / np.linalg.norm(x))
        phys = self.lay.qubits("physical")
        ref = apply_controlled_block(psi, [(self.coin, 0)], phys, unit_evolution(self.h, 1))
        ref = apply_controlled_block(ref, [(self.coin, 1)], phys, unit_evolution(self.h, -1))
        np.testing.assert_allclose(coin_controlled_evolution(psi, self.lay, self.h, self.coin).amplitudes, ref.amplitudes, atol=1e-11)


class TestHamiltonianSet:
    def test_single(self):
        h = ising_chain(2)
        assert hamiltonian_set(h, 1, 3) == [h]

    def test_offsets(self):
        hs = hamiltonian_set(ising_chain(2), 2, 3)
        assert [x.offset for x in hs] == pytest.approx([0, math.pi / 8])

    def test_eigenvalue_shift(self):
        h0 = random_hamiltonian(2, np.random.default_rng(6))
        W, R = 3, 4
        for w, hw in enumerate(hamiltonian_set(h0, W, R)):
            np.testing.assert_allclose(_eigs(hw) - _eigs(h0), w / W * math.pi / 2 ** (R - 1), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1), st.floats(0.1, 5.0))
def test_normalized_spectrum_inside_target(n, seed, scale):
    h = random_hamiltonian(n, np.random.default_rng(seed), scale)
    target = (0.0, 2 * math.pi - 2 * math.pi / 8)
    hn, amap = normalize_spectrum(h, target)
    e = _eigs(hn)
    assert e.min() >= target[0] - 1e-12 and e.max() <= target[1] + 1e-12
    raw = _eigs(h)
    np.testing.assert_allclose(amap.inverse(amap.apply(raw)), raw, atol=1e-10)
    assert np.argmin(e) == np.argmin(raw)
    u = unit_evolution(h, 1) @ unit_evolution(h, -1)
    np.testing.assert_allclose(u, np.eye(2**n), atol=1e-10)
