"""Dense linear-algebra helpers: validated arrays, spectral norms, SPD solves, CSV i/o.

Everything is dense float64; problem sizes are desk scale (dimensions up to a
few thousand), so no sparse formats or iterative solvers are provided.
"""

import numpy as np
from scipy.linalg import lapack

__all__ = [
    "LinalgError",
    "NotSpdError",
    "as_vector",
    "as_matrix",
    "spectral_norm_sq",
    "solve_spd",
    "vector_to_csv",
    "vector_from_csv",
    "matrix_to_csv",
    "matrix_from_csv",
]


class LinalgError(ValueError):
    """Invalid input to a linear-algebra routine."""


class NotSpdError(LinalgError):
    """Matrix failed the Cholesky factorization; carries the failing pivot."""

    def __init__(self, pivot):
        self.pivot = int(pivot)
        super().__init__(
            f"matrix is not symmetric positive definite: pivot {self.pivot} "
            "is not positive during Cholesky factorization"
        )


def as_vector(data, name="vector"):
    """Return ``data`` as a finite 1-d float64 array (copied)."""
    v = np.array(data, dtype=float).reshape(-1)
    if v.size and not np.all(np.isfinite(v)):
        raise LinalgError(f"{name} contains non-finite entries")
    return v


def as_matrix(data, name="matrix"):
    """Return ``data`` as a finite 2-d float64 array (copied)."""
    m = np.array(data, dtype=float)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise LinalgError(f"{name} must be 2-dimensional, got shape {m.shape}")
    if m.size and not np.all(np.isfinite(m)):
        raise LinalgError(f"{name} contains non-finite entries")
    return m


def spectral_norm_sq(M, tol=1e-12, max_iters=10_000):
    """Largest eigenvalue of ``M.T @ M`` (squared spectral norm of ``M``).

    Power iteration on the Gram matrix, deterministically seeded with the
    all-ones direction.  If the iteration stagnates (the all-ones vector can
    be orthogonal to the dominant eigenvector), the iterate is perturbed once
    by 1e-6 in an alternating-sign pattern and iteration resumes, so the
    result is reproducible run to run.

    Parameters
    ----------
    M : array_like
        Nonempty dense matrix.
    tol : float
        Relative tolerance on the eigenvalue estimate.
    max_iters : int
        Iteration cap for each power-iteration phase.
    """
    A = as_matrix(M, "M")
    if A.shape[0] == 0 or A.shape[1] == 0:
        raise LinalgError("spectral_norm_sq requires a matrix with nonzero dimensions")
    if tol <= 0:
        raise LinalgError("tol must be positive")
    n = A.shape[1]

    def gram(v):
        return A.T @ (A @ v)

    def iterate(v):
        lam = 0.0
        for _ in range(max_iters):
            w = gram(v)
            norm_w = float(np.linalg.norm(w))
            if norm_w == 0.0:
                return 0.0, v, True
            v_new = w / norm_w
            lam_new = float(v_new @ gram(v_new))
            resid = float(np.linalg.norm(gram(v_new) - lam_new * v_new))
            stalled = abs(lam_new - lam) <= tol * max(lam_new, 1e-300)
            v, lam = v_new, lam_new
            if stalled and resid <= tol * max(lam, 1e-300):
                return lam, v, True
        return lam, v, False

    v0 = np.ones(n) / np.sqrt(n)
    lam, v, _ = iterate(v0)
    # One deterministic restart guards against a start orthogonal to the
    # dominant eigenvector (e.g. M with a null all-ones direction).
    perturb = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    v_retry = v + 1e-6 * perturb
    nrm = np.linalg.norm(v_retry)
    if nrm > 0:
        lam_retry, _, _ = iterate(v_retry / nrm)
        lam = max(lam, lam_retry)
    return lam


def solve_spd(M, rhs, residual_tol=1e-10):
    """Solve ``M z = rhs`` for symmetric positive definite ``M`` (Cholesky).

    The returned solution satisfies ``||M z - rhs|| <= residual_tol * (1 + ||rhs||)``;
    a violation (severe ill-conditioning) raises :class:`LinalgError`.
    """
    A = as_matrix(M, "M")
    b = as_vector(rhs, "rhs")
    if A.shape[0] != A.shape[1]:
        raise LinalgError(f"M must be square, got shape {A.shape}")
    if A.shape[0] != b.size:
        raise LinalgError(f"rhs length {b.size} does not match M of order {A.shape[0]}")
    if b.size == 0:
        return b.copy()
    if not np.allclose(A, A.T, rtol=1e-10, atol=1e-12):
        raise LinalgError("M is not symmetric")

    c, info = lapack.dpotrf(A, lower=1)
    if info > 0:
        raise NotSpdError(info)
    if info < 0:
        raise LinalgError(f"illegal value in argument {-info} of Cholesky factorization")
    z, info = lapack.dpotrs(c, b, lower=1)
    if info != 0:
        raise LinalgError(f"Cholesky back-substitution failed (info={info})")

    resid = float(np.linalg.norm(A @ z - b))
    if resid > residual_tol * (1.0 + float(np.linalg.norm(b))):
        raise LinalgError(
            f"SPD solve residual {resid:.3e} exceeds {residual_tol:.1e}*(1+||rhs||); "
            "matrix is too ill-conditioned"
        )
    return z


def _fmt(x):
    return repr(float(x))


def vector_to_csv(v):
    """One CSV line, '.'-decimal, no header, newline-terminated."""
    v = as_vector(v)
    return ",".join(_fmt(x) for x in v) + "\n"


def vector_from_csv(text):
    line = text.strip()
    if not line:
        return np.zeros(0)
    return as_vector([float(tok) for tok in line.split(",")])


def matrix_to_csv(M):
    """One row per line, '.'-decimal, no header."""
    M = as_matrix(M)
    return "".join(",".join(_fmt(x) for x in row) + "\n" for row in M)


def matrix_from_csv(text, cols=None):
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        return np.zeros((0, 0 if cols is None else cols))
    data = [[float(tok) for tok in line.split(",")] for line in rows]
    width = len(data[0])
    if any(len(r) != width for r in data):
        raise LinalgError("ragged rows in matrix CSV")
    return as_matrix(data)
