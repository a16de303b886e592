"""Per-iteration block subproblems.

Every block update the solvers perform is an instance of

    min_u  psi(u) + <c, u> + (sigma/2) ||M u - r||^2 + (rho/2) ||u - center||^2

with psi a prox-friendly term and rho > 0, so the subproblem is always
strongly convex.  Exact closed forms cover the zero/quadratic psi and the
diagonal-quadratic cases; everything else goes through an accelerated
proximal-gradient inner loop that certifies an upper bound on
dist(0, dF(u)) at the returned point.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, as_vector, solve_spd, spectral_norm_sq

__all__ = [
    "SubproblemError",
    "UnsupportedStructureError",
    "InnerSolveError",
    "QuadraticProxSubproblem",
    "StationarityReport",
    "solve_exact",
    "solve_inner",
    "solve_v_prox_first",
    "eta_second",
    "solve_y_prox_second",
    "solve_v_q_linearized",
]


class SubproblemError(ValueError):
    """Invalid subproblem data."""


class UnsupportedStructureError(SubproblemError):
    """solve_exact cannot handle this structure; use solve_inner."""


class InnerSolveError(RuntimeError):
    """Inner loop exhausted max_iters; carries the best point found."""

    def __init__(self, best_point, best_bound, inner_iters):
        self.best_point = best_point
        self.best_bound = float(best_bound)
        self.inner_iters = int(inner_iters)
        super().__init__(
            f"inner solver exhausted {inner_iters} iterations; "
            f"best certified bound {best_bound:.3e}"
        )


@dataclass(frozen=True)
class QuadraticProxSubproblem:
    """Strongly convex prox-plus-quadratic subproblem data.

    ``MtM`` and ``M_norm_sq`` are optional caches (the Gram matrix M^T M and
    its largest eigenvalue); the engine precomputes them once per run so the
    per-iteration cost stays at a factorization and a few mat-vecs.
    """

    prox_term: object
    linear: np.ndarray
    sigma: float
    M: np.ndarray
    r: np.ndarray
    rho: float
    center: np.ndarray
    MtM: np.ndarray = None
    M_norm_sq: float = None

    def __post_init__(self):
        object.__setattr__(self, "linear", as_vector(self.linear, "linear"))
        object.__setattr__(self, "M", as_matrix(self.M, "M"))
        object.__setattr__(self, "r", as_vector(self.r, "r"))
        object.__setattr__(self, "center", as_vector(self.center, "center"))
        if self.rho <= 0:
            raise SubproblemError("rho must be positive (strong convexity of the subproblem)")
        if self.sigma < 0:
            raise SubproblemError("sigma must be >= 0")
        n = self.center.size
        if self.linear.size != n or self.M.shape[1] != n or self.M.shape[0] != self.r.size:
            raise SubproblemError(
                f"inconsistent dims: center {n}, linear {self.linear.size}, "
                f"M {self.M.shape}, r {self.r.size}"
            )

    @property
    def dim(self):
        return self.center.size

    def gram(self):
        if self.MtM is not None:
            return self.MtM
        return self.M.T @ self.M

    def smooth_lipschitz(self):
        if self.sigma == 0.0 or self.M.size == 0:
            return self.rho
        mns = self.M_norm_sq
        if mns is None:
            mns = spectral_norm_sq(self.M)
        return self.sigma * mns + self.rho

    def smooth_gradient(self, u):
        g = self.linear + self.rho * (u - self.center)
        if self.sigma != 0.0 and self.M.size:
            g = g + self.sigma * (self.M.T @ (self.M @ u - self.r))
        return g

    def smooth_value(self, u):
        val = float(self.linear @ u) + 0.5 * self.rho * float(np.sum((u - self.center) ** 2))
        if self.sigma != 0.0 and self.M.size:
            res = self.M @ u - self.r
            val += 0.5 * self.sigma * float(res @ res)
        return val

    def objective(self, u):
        return float(self.prox_term.value(u)) + self.smooth_value(u)

    def _rhs(self):
        rhs = self.rho * self.center - self.linear
        if self.sigma != 0.0 and self.M.size:
            rhs = rhs + self.sigma * (self.M.T @ self.r)
        return rhs


@dataclass(frozen=True)
class StationarityReport:
    """Inner-solver output: the point, a certified bound on dist(0, dF(point)),
    and how many accelerated iterations it took."""

    point: np.ndarray
    epsilon_bound: float
    inner_iters: int


def solve_exact(sub):
    """Exact minimizer for supported structures.

    Supported: zero prox term (pure quadratic, direct SPD solve), quadratic
    prox term (folded into the SPD system), and separable prox terms whenever
    ``sigma M^T M + rho I`` is diagonal (complete the square, one prox call,
    per-coordinate steps if the diagonal is not constant).  Anything else
    raises :class:`UnsupportedStructureError`, directing the caller to
    :func:`solve_inner`.
    """
    if sub.dim == 0:
        return np.zeros(0)
    kind = getattr(sub.prox_term, "kind", "custom")
    use_gram = sub.sigma != 0.0 and sub.M.size > 0

    if kind == "zero" or kind == "squared":
        mu = sub.prox_term.strong_convexity if kind == "squared" else 0.0
        H = sub.sigma * sub.gram() if use_gram else np.zeros((sub.dim, sub.dim))
        H = H + (sub.rho + mu) * np.eye(sub.dim)
        return solve_spd(H, sub._rhs())

    if use_gram:
        G = sub.gram()
        off = G - np.diag(np.diag(G))
        scale = max(np.abs(np.diag(G)).max(), 1.0)
        if np.abs(off).max() > 1e-13 * scale:
            raise UnsupportedStructureError(
                "sigma*M^T M + rho*I is not diagonal and the prox term has no "
                "quadratic closed form; use solve_inner"
            )
        d = sub.sigma * np.diag(G) + sub.rho
    else:
        d = np.full(sub.dim, sub.rho)

    w = sub._rhs() / d
    steps = 1.0 / d
    if np.ptp(steps) <= 1e-14 * steps[0]:
        return sub.prox_term.prox(float(steps[0]), w)
    if not getattr(sub.prox_term, "separable", False):
        raise UnsupportedStructureError(
            "diagonal quadratic with non-constant diagonal needs a separable "
            "prox term; use solve_inner"
        )
    return sub.prox_term.prox(steps, w)


def solve_inner(sub, eps, max_iters=50_000, start=None):
    """Accelerated proximal-gradient inner loop with a certified stopping test.

    Runs momentum prox-gradient on the smooth quadratic part plus the prox
    term, stopping once the prox-gradient residual
    ``r_s(u) = (u - prox_s(u - s grad(u)))/s`` at step ``s = 1/(sigma ||M||^2 + rho)``
    certifies ``dist(0, dF(point)) <= ||r_s(u)|| * (2 + s L) <= eps``.  The
    returned point is the prox output itself (always in the domain of the
    prox term), so the stored bound is a sound certificate at that point.
    """
    if eps < 0:
        raise SubproblemError("eps must be >= 0")
    if sub.dim == 0:
        return StationarityReport(point=np.zeros(0), epsilon_bound=0.0, inner_iters=0)
    L = sub.smooth_lipschitz()
    s = 1.0 / L
    q = sub.rho / L
    theta = (1.0 - np.sqrt(q)) / (1.0 + np.sqrt(q))
    prox = sub.prox_term.prox

    u = as_vector(start, "start").copy() if start is not None else sub.center.copy()
    z = u.copy()
    best_point, best_bound = None, np.inf
    for it in range(max_iters + 1):
        u_plus = prox(s, u - s * sub.smooth_gradient(u))
        bound = float(np.linalg.norm((u - u_plus) / s)) * (2.0 + s * L)
        if bound < best_bound:
            best_point, best_bound = u_plus, bound
        if bound <= eps:
            return StationarityReport(point=u_plus, epsilon_bound=bound, inner_iters=it)
        if it == max_iters:
            break
        u_new = prox(s, z - s * sub.smooth_gradient(z))
        z = u_new + theta * (u_new - u)
        u = u_new
    raise InnerSolveError(best_point, best_bound, max_iters)


def solve_v_prox_first(g1, beta, t_next, v_k, drift):
    """Single-prox block update at step beta/t_next around the previous iterate.

    ``drift`` is the precomputed sum of the constraint pull-back at the
    anticipated multiplier and the smooth gradient at the extrapolated point.
    """
    if beta <= 0:
        raise SubproblemError("beta must be positive")
    if t_next < 1.0 - 1e-12:
        raise SubproblemError("t_next must be >= 1")
    v_k = as_vector(v_k, "v_k")
    drift = as_vector(drift, "drift")
    if v_k.size != drift.size:
        raise SubproblemError("v_k and drift dims differ")
    step = beta / t_next
    return g1.prox(step, v_k - step * drift)


def eta_second(beta, mu_g, t_next):
    """Prox step beta / (t_next^2 + beta mu_g (t_next - 1)) of the second-scheme y update."""
    if beta <= 0:
        raise SubproblemError("beta must be positive")
    return beta / (t_next * t_next + beta * mu_g * (t_next - 1.0))


def solve_y_prox_second(g1, eta, y_bar, correction):
    """Single-prox y update of the second scheme.

    ``correction`` bundles the strong-convexity momentum term, the constraint
    pull-back, and the smooth gradient, all precomputed by the engine.
    """
    if eta <= 0:
        raise SubproblemError("eta must be positive")
    y_bar = as_vector(y_bar, "y_bar")
    correction = as_vector(correction, "correction")
    if y_bar.size != correction.size:
        raise SubproblemError("y_bar and correction dims differ")
    return g1.prox(eta, y_bar - eta * correction)


def solve_v_q_linearized(g1, beta, t_next, eta_q, gamma_BtB, v_k, drift, aug_pull):
    """Quadratic-metric linearization of the augmented term in the v update.

    Implements the prox form of the update measured in the metric
    beta*(eta_q I - gamma B^T B), which is valid whenever
    eta_q >= lambda_max(gamma B^T B):

        v+ = prox_{1/(eta_q t_next)}( (1/eta_q) ( eta_q v_k - gamma B^T B v_k
             - aug_pull - drift / t_next ) )

    with ``aug_pull`` the constraint forcing term gamma B^T (A u+ - b) and
    ``drift`` the multiplier pull-back plus smooth gradient.
    """
    if beta <= 0 or t_next < 1.0 - 1e-12:
        raise SubproblemError("beta must be positive and t_next >= 1")
    S = as_matrix(gamma_BtB, "gamma_BtB")
    v_k = as_vector(v_k, "v_k")
    drift = as_vector(drift, "drift")
    aug_pull = as_vector(aug_pull, "aug_pull")
    n = v_k.size
    if S.shape != (n, n) or drift.size != n or aug_pull.size != n:
        raise SubproblemError("inconsistent dims in Q-linearized update")
    top = np.sqrt(spectral_norm_sq(S)) if S.size and np.any(S) else 0.0
    if eta_q < top - 1e-9 * max(top, 1.0):
        raise SubproblemError(
            f"eta_q = {eta_q:.6g} is below the certified bound lambda_max(gamma B^T B) "
            f"= {top:.6g}"
        )
    if eta_q <= 0:
        raise SubproblemError("eta_q must be positive")
    center = (eta_q * v_k - (S @ v_k if S.size else 0.0) - aug_pull - drift / t_next) / eta_q
    return g1.prox(1.0 / (eta_q * t_next), center)
