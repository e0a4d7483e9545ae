import numpy as np
import pytest

from qudiv.exceptions import InvalidDimensionError, NumericalInconsistencyError
from qudiv.hilbert import (
    DensityMatrix,
    Povm,
    PureState,
    antisym_projector,
    expectation,
    swap_operator,
    sym_projector,
    tensor,
)


def random_hermitian(d, rng):
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (m + m.conj().T) / 2.0


class TestTensor:
    def test_identity(self):
        assert np.array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_basis_bookkeeping(self):
        p0 = np.diag([1.0, 0.0]).astype(complex)
        p1 = np.diag([0.0, 1.0]).astype(complex)
        joint = tensor(p0, p1)
        expected = np.zeros((4, 4), dtype=complex)
        expected[1, 1] = 1.0  # joint index 0*2 + 1
        assert np.array_equal(joint, expected)

    def test_dimension_arithmetic(self):
        out = tensor(np.eye(2), np.eye(3))
        assert out.shape == (6, 6)

    def test_associativity(self):
        rng = np.random.default_rng(7)
        a, b, c = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for d in (2, 3, 2))
        left = tensor(tensor(a, b), c)
        right = tensor(a, tensor(b, c))
        # same index layout; entries differ only by scalar-product rounding
        assert np.max(np.abs(left - right)) <= 1e-14 * np.max(np.abs(left))


class TestSwapAndProjectors:
    def test_swap_d2_permutation(self):
        swap = swap_operator(2)
        expected = np.eye(4)[[0, 2, 1, 3]]
        assert np.array_equal(swap.real, expected)

    def test_swap_involution_and_trace(self):
        for d in range(2, 7):
            swap = swap_operator(d)
            assert np.array_equal(swap @ swap, np.eye(d * d, dtype=complex))
            assert np.trace(swap).real == d
            assert np.array_equal(swap, swap.conj().T)

    def test_invalid_dimension(self):
        with pytest.raises(InvalidDimensionError):
            swap_operator(1)
        with pytest.raises(InvalidDimensionError):
            sym_projector(0)

    def test_projector_algebra(self):
        for d in range(2, 7):
            p_sym = sym_projector(d)
            p_anti = antisym_projector(d)
            assert np.max(np.abs(p_sym + p_anti - np.eye(d * d))) <= 1e-14
            assert np.max(np.abs(p_sym @ p_sym - p_sym)) <= 1e-12
            assert np.max(np.abs(p_anti @ p_anti - p_anti)) <= 1e-12
            assert np.max(np.abs(p_sym @ p_anti)) <= 1e-12
            assert np.trace(p_sym).real == pytest.approx(d * (d + 1) / 2, abs=1e-12)
            assert np.trace(p_anti).real == pytest.approx(d * (d - 1) / 2, abs=1e-12)

    def test_d2_subspace_counts(self):
        assert np.trace(sym_projector(2)).real == pytest.approx(3.0, abs=1e-14)
        assert np.trace(antisym_projector(2)).real == pytest.approx(1.0, abs=1e-14)
        assert np.trace(antisym_projector(3)).real == pytest.approx(3.0, abs=1e-14)


class TestPureState:
    def test_canonical_phase(self):
        state = PureState(np.array([1j, 0.0]))
        assert state.amplitudes[0] == 1.0 + 0.0j

    def test_canonical_skips_negligible_leading_amplitude(self):
        state = PureState(np.array([0.0, -1.0]))
        assert state.amplitudes[1] == 1.0 + 0.0j

    def test_norm_enforced(self):
        with pytest.raises(NumericalInconsistencyError):
            PureState(np.array([1.0, 1.0]))

    def test_normalized_factory(self):
        state = PureState.normalized(np.array([3.0, 4.0j]))
        assert np.linalg.norm(state.amplitudes) == pytest.approx(1.0, abs=1e-15)
        assert state.amplitudes[0].real == pytest.approx(0.6)

    def test_ray_equality(self):
        a = PureState.normalized(np.array([1.0, 1.0]))
        b = PureState.normalized(np.exp(0.7j) * np.array([1.0, 1.0]))
        assert a.isclose(b)


class TestDensityMatrix:
    def test_rejects_non_hermitian(self):
        m = np.array([[0.5, 0.1], [0.0, 0.5]], dtype=complex)
        with pytest.raises(NumericalInconsistencyError):
            DensityMatrix(m)

    def test_rejects_wrong_trace(self):
        with pytest.raises(NumericalInconsistencyError):
            DensityMatrix(np.eye(2, dtype=complex))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(NumericalInconsistencyError):
            DensityMatrix(np.diag([1.5, -0.5]).astype(complex))

    def test_mixture(self):
        rho = DensityMatrix.from_mixture(
            [1.0, 3.0], [PureState.basis(2, 0), PureState.basis(2, 1)]
        )
        assert rho.matrix[0, 0].real == pytest.approx(0.25)
        assert rho.matrix[1, 1].real == pytest.approx(0.75)


class TestPovm:
    def test_completeness_enforced(self):
        half = np.eye(2, dtype=complex) / 2.0
        Povm(2, (half, half))  # fine
        with pytest.raises(NumericalInconsistencyError):
            Povm(2, (half, half / 2.0))

    def test_positivity_enforced(self):
        bad = np.diag([1.5, -0.5]).astype(complex)
        good = np.eye(2) - bad
        with pytest.raises(NumericalInconsistencyError):
            Povm(2, (bad, good))

    def test_computational(self):
        povm = Povm.computational(3)
        assert povm.n_outcomes == 3
        assert np.array_equal(sum(povm.effects), np.eye(3, dtype=complex))


class TestExpectation:
    def test_unit_trace(self):
        rng = np.random.default_rng(3)
        rho = DensityMatrix.from_mixture(
            rng.random(3), [PureState.normalized(rng.standard_normal(4) + 1j * rng.standard_normal(4)) for _ in range(3)]
        )
        assert expectation(rho, np.eye(4)) == pytest.approx(1.0, abs=1e-12)

    def test_symmetric_state_has_no_antisymmetric_part(self):
        zero = PureState.basis(2, 0)
        rho = DensityMatrix(np.kron(zero.projector(), zero.projector()))
        assert expectation(rho, antisym_projector(2)) == pytest.approx(0.0, abs=1e-14)

    def test_linearity(self):
        rng = np.random.default_rng(11)
        rho = DensityMatrix.from_mixture(
            rng.random(2), [PureState.normalized(rng.standard_normal(3) + 1j * rng.standard_normal(3)) for _ in range(2)]
        )
        for _ in range(20):
            a = random_hermitian(3, rng)
            b = random_hermitian(3, rng)
            x, y = rng.standard_normal(2)
            lhs = expectation(rho, x * a + y * b)
            rhs = x * expectation(rho, a) + y * expectation(rho, b)
            assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_dimension_mismatch(self):
        rho = DensityMatrix.maximally_mixed(2)
        with pytest.raises(InvalidDimensionError):
            expectation(rho, np.eye(3))

    def test_non_hermitian_rejected(self):
        rho = DensityMatrix.maximally_mixed(2)
        with pytest.raises(NumericalInconsistencyError):
            expectation(rho, np.array([[0.0, 1.0], [0.0, 0.0]]))
