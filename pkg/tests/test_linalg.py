import numpy as np
import pytest

from aladmm.linalg import (
    LinalgError,
    NotSpdError,
    as_matrix,
    as_vector,
    matrix_from_csv,
    matrix_to_csv,
    solve_spd,
    spectral_norm_sq,
    vector_from_csv,
    vector_to_csv,
)


def test_as_vector_rejects_nonfinite():
    with pytest.raises(LinalgError):
        as_vector([1.0, np.nan])
    with pytest.raises(LinalgError):
        as_matrix([[np.inf, 0.0]])


def test_spectral_norm_diag():
    assert spectral_norm_sq(np.diag([3.0, 1.0])) == pytest.approx(9.0, rel=1e-10)


def test_spectral_norm_zero_matrix():
    assert spectral_norm_sq(np.zeros((2, 2))) == 0.0


def test_spectral_norm_empty_matrix_rejected():
    with pytest.raises(LinalgError):
        spectral_norm_sq(np.zeros((0, 3)))
    with pytest.raises(LinalgError):
        spectral_norm_sq(np.zeros((2, 2)), tol=0.0)


@pytest.mark.parametrize("seed", [0, 1, 2, 7])
def test_spectral_norm_matches_dense_eig(seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((3, 3))
    expected = np.linalg.eigvalsh(M.T @ M).max()  # oracle: dense eigendecomposition
    assert spectral_norm_sq(M, tol=1e-14) == pytest.approx(expected, rel=1e-8)


def test_spectral_norm_ones_orthogonal_start():
    # dominant eigenvector orthogonal to the all-ones seed: restart must save it
    M = np.diag([2.0, 2.0]) @ np.array([[1.0, -1.0], [1.0, 1.0]]) / np.sqrt(2.0)
    M = np.array([[3.0, -3.0], [1.0, 1.0]]) / np.sqrt(2.0)
    expected = np.linalg.eigvalsh(M.T @ M).max()
    assert spectral_norm_sq(M, tol=1e-14) == pytest.approx(expected, rel=1e-8)


def test_spectral_norm_never_overestimates_probe():
    rng = np.random.default_rng(3)
    M = rng.standard_normal((5, 4))
    est = spectral_norm_sq(M, tol=1e-12)
    for _ in range(20):
        v = rng.standard_normal(4)
        rayleigh = np.linalg.norm(M @ v) ** 2 / np.linalg.norm(v) ** 2
        assert est >= rayleigh - 1e-12 * est - 1e-12


def test_solve_spd_identity():
    z = solve_spd(np.eye(2), [3.0, 4.0])
    assert np.allclose(z, [3.0, 4.0])


def test_solve_spd_diag():
    z = solve_spd(np.diag([2.0, 4.0]), [2.0, 4.0])
    assert np.allclose(z, [1.0, 1.0])


def test_solve_spd_seeded_residual():
    rng = np.random.default_rng(11)
    F = rng.standard_normal((4, 4))
    M = F @ F.T + 4.0 * np.eye(4)
    rhs = rng.standard_normal(4)
    z = solve_spd(M, rhs)
    assert np.linalg.norm(M @ z - rhs) <= 1e-10 * (1.0 + np.linalg.norm(rhs))


def test_solve_spd_rejects_indefinite_with_pivot():
    M = np.array([[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(NotSpdError) as exc:
        solve_spd(M, [1.0, 1.0])
    assert exc.value.pivot == 2


def test_solve_spd_rejects_nonsymmetric_and_mismatch():
    with pytest.raises(LinalgError):
        solve_spd([[1.0, 2.0], [0.0, 1.0]], [1.0, 1.0])
    with pytest.raises(LinalgError):
        solve_spd(np.eye(2), [1.0, 2.0, 3.0])


def test_csv_round_trip():
    rng = np.random.default_rng(5)
    M = rng.standard_normal((3, 2))
    v = rng.standard_normal(4)
    assert np.array_equal(matrix_from_csv(matrix_to_csv(M)), M)
    assert np.array_equal(vector_from_csv(vector_to_csv(v)), v)


def test_csv_format_shape():
    text = matrix_to_csv(np.array([[1.0, 2.5], [3.0, 4.0]]))
    lines = text.splitlines()
    assert len(lines) == 2 and "." in lines[0] and not lines[0][0].isalpha()
    with pytest.raises(LinalgError):
        matrix_from_csv("1.0,2.0\n3.0\n")
