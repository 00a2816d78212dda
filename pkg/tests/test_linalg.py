import numpy as np
import pytest

from covchan.linalg import (
    as_cmatrix,
    dagger,
    frobenius_distance,
    matmul,
    random_density,
    random_unitary,
    spawn_rng,
    unitarity_defect,
)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _random_complex(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


class TestAsCMatrix:
    def test_copies_and_freezes(self):
        src = np.ones((2, 2))
        out = as_cmatrix(src)
        assert out.dtype == np.complex128
        with pytest.raises(ValueError):
            out[0, 0] = 5.0
        src[0, 0] = 7.0
        assert out[0, 0] == 1.0

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf, 1j * np.nan])
    def test_rejects_nonfinite(self, bad):
        with pytest.raises(ValueError, match="finite"):
            as_cmatrix([[bad, 0], [0, 1]])

    def test_rejects_wrong_ndim(self):
        with pytest.raises(ValueError, match="2-D"):
            as_cmatrix([1, 2, 3])


class TestMatmul:
    def test_identity(self):
        rng = np.random.default_rng(0)
        m = _random_complex(rng, 2, 2)
        assert np.allclose(matmul(I2, m), m)

    def test_pauli_involution(self):
        assert np.allclose(matmul(X, X), I2)

    def test_matches_scalar_loop(self):
        rng = np.random.default_rng(1)
        a = _random_complex(rng, 3, 3)
        b = _random_complex(rng, 3, 3)
        got = matmul(a, b)
        for i in range(3):
            for j in range(3):
                want = sum(a[i, k] * b[k, j] for k in range(3))
                assert abs(got[i, j] - want) < 1e-12

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="multiply"):
            matmul(np.ones((2, 3)), np.ones((2, 3)))

    @pytest.mark.parametrize("d", [2, 4, 8])
    def test_associative(self, d):
        rng = np.random.default_rng(d)
        for _ in range(20):
            a, b, c = (_random_complex(rng, d, d) for _ in range(3))
            lhs = matmul(matmul(a, b), c)
            rhs = matmul(a, matmul(b, c))
            assert frobenius_distance(lhs, rhs) <= 1e-10


class TestDagger:
    def test_identity(self):
        assert np.array_equal(dagger(I2), I2)

    def test_hand_example(self):
        m = np.array([[0, 1j], [0, 0]])
        want = np.array([[0, 0], [-1j, 0]])
        assert np.array_equal(dagger(m), want)

    def test_involution_exact(self):
        rng = np.random.default_rng(2)
        m = _random_complex(rng, 5, 3)
        assert np.array_equal(dagger(dagger(m)), m)

    def test_reverses_products(self):
        rng = np.random.default_rng(3)
        a = _random_complex(rng, 4, 4)
        b = _random_complex(rng, 4, 4)
        lhs = dagger(matmul(a, b))
        rhs = matmul(dagger(b), dagger(a))
        assert np.max(np.abs(lhs - rhs)) <= 1e-12


class TestFrobeniusDistance:
    def test_zero_on_equal(self):
        rng = np.random.default_rng(4)
        m = _random_complex(rng, 3, 3)
        assert frobenius_distance(m, m) == 0.0

    def test_identity_vs_zero(self):
        assert frobenius_distance(I2, np.zeros((2, 2))) == pytest.approx(np.sqrt(2))

    def test_pauli_pair(self):
        assert frobenius_distance(X, Z) == pytest.approx(2.0)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            frobenius_distance(np.ones((2, 2)), np.ones((3, 3)))


class TestRandomUnitary:
    @pytest.mark.parametrize("d", list(range(1, 17)))
    def test_unitary_across_dims_and_seeds(self, d):
        for seed in range(60):
            u = random_unitary(d, seed)
            assert u.shape == (d, d)
            assert unitarity_defect(u) <= 1e-10

    def test_unit_determinant_modulus(self):
        for seed in range(50):
            u = random_unitary(5, seed)
            assert abs(abs(np.linalg.det(u)) - 1.0) <= 1e-10

    def test_scalar_case(self):
        u = random_unitary(1, 9)
        assert u.shape == (1, 1)
        assert abs(abs(u[0, 0]) - 1.0) <= 1e-12

    def test_deterministic(self):
        assert np.array_equal(random_unitary(4, 123), random_unitary(4, 123))

    def test_seeds_differ(self):
        assert not np.allclose(random_unitary(4, 0), random_unitary(4, 1))

    def test_rejects_zero_dim(self):
        with pytest.raises(ValueError):
            random_unitary(0, 0)

    def test_output_frozen(self):
        u = random_unitary(3, 0)
        with pytest.raises(ValueError):
            u[0, 0] = 0.0


class TestRandomDensity:
    @pytest.mark.parametrize("d", list(range(1, 17)))
    def test_valid_state_across_dims_and_seeds(self, d):
        for seed in range(60):
            rho = random_density(d, seed)
            assert np.array_equal(rho, dagger(rho))
            assert abs(np.trace(rho) - 1.0) <= 1e-12
            assert np.linalg.eigvalsh(rho).min() >= -1e-12

    def test_eigenvalues_sum_to_one(self):
        for seed in range(30):
            rho = random_density(6, seed)
            assert abs(np.linalg.eigvalsh(rho).sum() - 1.0) <= 1e-10

    def test_scalar_case(self):
        assert np.allclose(random_density(1, 5), [[1.0]])

    def test_deterministic(self):
        assert np.array_equal(random_density(3, 77), random_density(3, 77))

    def test_rejects_zero_dim(self):
        with pytest.raises(ValueError):
            random_density(0, 0)


class TestSpawnRng:
    def test_same_path_same_stream(self):
        a = spawn_rng(5, 1, 2).standard_normal(8)
        b = spawn_rng(5, 1, 2).standard_normal(8)
        assert np.array_equal(a, b)

    def test_paths_independent_of_order(self):
        # drawing stream (0, 3) must not depend on other streams existing
        first = spawn_rng(0, 3).standard_normal(4)
        spawn_rng(0, 1).standard_normal(100)
        spawn_rng(0, 2).standard_normal(100)
        again = spawn_rng(0, 3).standard_normal(4)
        assert np.array_equal(first, again)

    def test_distinct_paths_distinct_streams(self):
        a = spawn_rng(0, 0).standard_normal(16)
        b = spawn_rng(0, 1).standard_normal(16)
        assert not np.allclose(a, b)


def test_unitarity_defect_flags_nonunitary():
    assert unitarity_defect(I2) == 0.0
    assert unitarity_defect(2 * I2) == pytest.approx(np.sqrt(2) * 3)
    with pytest.raises(ValueError, match="square"):
        unitarity_defect(np.ones((2, 3)))
