"""Test-problem generators with ground-truth saddle points.

Fully quadratic instances get their references from a direct KKT solve; the
l1-composite kinds get theirs from a long run of one of our own solvers whose
active set is then polished by a reduced KKT solve and re-verified against
the saddle inequalities, so no external solver is involved anywhere.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import engine
from .linalg import as_matrix, as_vector
from .model import (
    CompositeBlock,
    ModelError,
    ProblemInstance,
    SaddleReference,
    check_saddle,
    elastic_net_prox,
    feasibility,
    l1_prox,
    least_squares_smooth,
    squared_prox,
    zero_prox,
    zero_smooth,
)

__all__ = [
    "ProblemsError",
    "ReferenceNotReachedError",
    "GeneratorSpec",
    "scalar_p0",
    "gen",
    "kkt_solve",
    "reference_solve",
]

KINDS = ("quadratic", "lasso_constrained", "elastic_net_sharing", "scalar_p0")


class ProblemsError(ValueError):
    """Invalid generator specification or degenerate instance."""


class ReferenceNotReachedError(RuntimeError):
    """reference_solve hit its iteration budget; carries the best point."""

    def __init__(self, best, metrics):
        self.best = best
        self.metrics = metrics
        super().__init__(
            "reference tolerance not reached; best point has "
            + ", ".join(f"{k}={v:.3e}" for k, v in metrics.items())
        )


@dataclass(frozen=True)
class GeneratorSpec:
    """What to generate: problem kind, sizes, seed, curvature targets."""

    kind: str
    dims: tuple = (10, 10, 4)
    seed: int = 0
    mu_g: float = 1.0
    smooth_lipschitz: tuple = (1.0, 1.0)
    conditioning: float = 1.0
    l1_weight: float = 0.1
    ref_tol: float = 1e-9

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ProblemsError(f"unknown kind {self.kind!r}; known: {KINDS}")
        m, n, p = self.dims
        if self.kind != "scalar_p0":
            if p > m + n:
                raise ProblemsError(f"p = {p} exceeds m + n = {m + n}; constraint infeasible")
            if self.kind in ("quadratic", "lasso_constrained", "elastic_net_sharing"):
                if self.mu_g <= 0:
                    raise ProblemsError(f"{self.kind} requires mu_g > 0")
        if self.conditioning < 1.0:
            raise ProblemsError("conditioning must be >= 1")


def scalar_p0():
    """The fixed scalar golden instance: min x^2/2 + y^2/2 s.t. x + y = 2."""
    inst = ProblemInstance(
        x_block=CompositeBlock(
            prox_term=zero_prox(),
            smooth_term=least_squares_smooth(np.array([[1.0]]), np.array([0.0])),
        ),
        y_block=CompositeBlock(prox_term=squared_prox(1.0), smooth_term=zero_smooth()),
        A=np.array([[1.0]]),
        B=np.array([[1.0]]),
        b=np.array([2.0]),
    )
    ref = SaddleReference(np.array([1.0]), np.array([1.0]), np.array([-1.0]))
    return inst, ref


def _factor_with_spectrum(rng, dim, top_sq, conditioning):
    """Square factor C with ||C^T C|| = top_sq and geometric singular spread."""
    if top_sq <= 0:
        raise ProblemsError("smooth Lipschitz target must be positive here")
    top = math.sqrt(top_sq)
    svals = np.geomspace(top / conditioning, top, dim) if conditioning > 1 else np.full(dim, top)
    U, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    V, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    return U @ np.diag(svals) @ V.T


def _constraint_pair(rng, m, n, p):
    """Random (A, B) with rank([A B]) = p, each scaled to unit spectral norm."""
    for _ in range(10):
        A = rng.standard_normal((p, m)) if m else np.zeros((p, 0))
        B = rng.standard_normal((p, n)) if n else np.zeros((p, 0))
        stacked = np.hstack([A, B])
        if np.linalg.matrix_rank(stacked) == p:
            if A.size:
                A = A / np.linalg.norm(A, 2)
            if B.size:
                B = B / np.linalg.norm(B, 2)
            return A, B
    raise ProblemsError("could not draw a full-row-rank constraint pair in 10 attempts")


def gen(spec):
    """Generate (instance, saddle reference) for the given spec."""
    if spec.kind == "scalar_p0":
        return scalar_p0()
    m, n, p = spec.dims
    rng = np.random.default_rng(spec.seed)
    L_f2, L_g2 = spec.smooth_lipschitz

    if spec.kind == "quadratic":
        if L_f2 <= 0:
            raise ProblemsError("quadratic kind needs L_f2 > 0 for a nonsingular KKT system")
        A, B = _constraint_pair(rng, m, n, p)
        C = _factor_with_spectrum(rng, m, L_f2, spec.conditioning)
        d = rng.standard_normal(m)
        x_block = CompositeBlock(prox_term=zero_prox(), smooth_term=least_squares_smooth(C, d))
        if L_g2 > 0:
            D = _factor_with_spectrum(rng, n, L_g2, spec.conditioning)
            e = rng.standard_normal(n)
            g2 = least_squares_smooth(D, e)
        else:
            g2 = zero_smooth()
        y_block = CompositeBlock(prox_term=squared_prox(spec.mu_g), smooth_term=g2)
        b = rng.standard_normal(p)
        inst = ProblemInstance(x_block=x_block, y_block=y_block, A=A, B=B, b=b)
        return inst, kkt_solve(inst)

    if spec.kind == "lasso_constrained":
        A, B = _constraint_pair(rng, m, n, p)
        C = _factor_with_spectrum(rng, m, L_f2 if L_f2 > 0 else 1.0, spec.conditioning)
        d = C @ (rng.standard_normal(m) * (rng.random(m) < 0.4))  # sparse-ish target
        x_block = CompositeBlock(
            prox_term=l1_prox(spec.l1_weight), smooth_term=least_squares_smooth(C, d)
        )
        if L_g2 > 0:
            D = _factor_with_spectrum(rng, n, L_g2, spec.conditioning)
            g2 = least_squares_smooth(D, rng.standard_normal(n))
        else:
            g2 = zero_smooth()
        y_block = CompositeBlock(prox_term=squared_prox(spec.mu_g), smooth_term=g2)
        b = rng.standard_normal(p) * 0.5
        inst = ProblemInstance(x_block=x_block, y_block=y_block, A=A, B=B, b=b)
        return inst, reference_solve(inst, tol=spec.ref_tol)

    # elastic_net_sharing: A x - y = b with an elastic-net x block
    if n != p:
        raise ProblemsError("elastic_net_sharing requires n == p (B = -identity)")
    A = rng.standard_normal((p, m))
    A = A / np.linalg.norm(A, 2)
    B = -np.eye(p)
    x_block = CompositeBlock(
        prox_term=elastic_net_prox(spec.l1_weight, spec.l1_weight), smooth_term=zero_smooth()
    )
    if L_g2 > 0:
        D = math.sqrt(L_g2) * np.eye(n)
        g2 = least_squares_smooth(D, rng.standard_normal(n))
    else:
        g2 = zero_smooth()
    y_block = CompositeBlock(prox_term=squared_prox(spec.mu_g), smooth_term=g2)
    b = rng.standard_normal(p) * 0.2
    inst = ProblemInstance(x_block=x_block, y_block=y_block, A=A, B=B, b=b)
    return inst, reference_solve(inst, tol=spec.ref_tol)


# --- KKT oracle -------------------------------------------------------------


def _quadratic_data(block, dim, what):
    """Hessian and linear term of a block that must be quadratic end to end."""
    H = np.zeros((dim, dim))
    lin = np.zeros(dim)
    sm = block.smooth_term
    if sm.kind == "least_squares":
        C, d = sm.params["C"], sm.params["d"]
        H += C.T @ C
        lin += C.T @ d
    elif sm.kind != "zero":
        raise ModelError(f"kkt_solve needs quadratic terms; {what} smooth part is {sm.kind!r}")
    pr = block.prox_term
    if pr.kind == "squared":
        H += pr.params["mu"] * np.eye(dim)
    elif pr.kind != "zero":
        raise ModelError(f"kkt_solve needs quadratic terms; {what} prox part is {pr.kind!r}")
    return H, lin


def kkt_solve(inst, residual_tol=1e-10):
    """Direct solve of the symmetric KKT system of a fully quadratic instance."""
    m, n, p = inst.m, inst.n, inst.p
    Hx, lx = _quadratic_data(inst.x_block, m, "x")
    Hy, ly = _quadratic_data(inst.y_block, n, "y")
    K = np.zeros((m + n + p, m + n + p))
    K[:m, :m] = Hx
    K[m:m + n, m:m + n] = Hy
    K[:m, m + n:] = inst.A.T
    K[m + n:, :m] = inst.A
    K[m:m + n, m + n:] = inst.B.T
    K[m + n:, m:m + n] = inst.B
    rhs = np.concatenate([lx, ly, inst.b])
    try:
        sol = scipy.linalg.solve(K, rhs, assume_a="sym")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as exc:
        raise ProblemsError(f"singular KKT system (degenerate instance): {exc}") from None
    if not np.all(np.isfinite(sol)):
        raise ProblemsError("singular KKT system (non-finite solution)")
    x, y, lam = sol[:m], sol[m:m + n], sol[m + n:]
    scale = 1.0 + float(np.linalg.norm(rhs))
    stat_x = np.linalg.norm(Hx @ x - lx + inst.A.T @ lam)
    stat_y = np.linalg.norm(Hy @ y - ly + inst.B.T @ lam)
    feas = np.linalg.norm(inst.A @ x + inst.B @ y - inst.b)
    if max(stat_x, stat_y, feas) > residual_tol * scale:
        raise ProblemsError(
            f"KKT residuals too large (stat_x={stat_x:.2e}, stat_y={stat_y:.2e}, "
            f"feas={feas:.2e}); degenerate instance"
        )
    return SaddleReference(x, y, lam)


# --- iterative reference oracle ---------------------------------------------


def _prox_stationarity(block, point, pull, dim):
    """Norm of the prox-gradient fixed-point residual of one block at (point, lambda)."""
    if dim == 0:
        return 0.0
    L = block.smooth_term.lipschitz + block.prox_term.strong_convexity + 1.0
    s = 1.0 / L
    grad = block.smooth_term.gradient(point) + pull
    moved = block.prox_term.prox(s, point - s * grad)
    return float(np.linalg.norm(point - moved)) / s


def _stationarity(inst, x, y, lam):
    sx = _prox_stationarity(inst.x_block, x, inst.A.T @ lam if inst.m else np.zeros(0), inst.m)
    sy = _prox_stationarity(inst.y_block, y, inst.B.T @ lam if inst.n else np.zeros(0), inst.n)
    return sx, sy


def _active_structure(block, point, dim, support_tol):
    """(keep mask, sign vector, ridge mu) of a block, or None when not polishable."""
    pr = block.prox_term
    if block.smooth_term.kind not in ("zero", "least_squares"):
        return None
    if pr.kind == "zero":
        return np.ones(dim, dtype=bool), np.zeros(dim), 0.0
    if pr.kind == "squared":
        return np.ones(dim, dtype=bool), np.zeros(dim), pr.params["mu"]
    if pr.kind in ("l1", "elastic_net"):
        keep = np.abs(point) > support_tol
        sign = np.sign(point) * keep
        mu = pr.params.get("mu", 0.0)
        return keep, sign, mu
    return None


def _polish(inst, x, y, lam, support_tol):
    """Reduced KKT solve on the current active structure; None when unsupported."""
    sx = _active_structure(inst.x_block, x, inst.m, support_tol)
    sy = _active_structure(inst.y_block, y, inst.n, support_tol)
    if sx is None or sy is None:
        return None
    keep_x, sign_x, mu_x = sx
    keep_y, sign_y, mu_y = sy
    tau_x = inst.x_block.prox_term.params.get("tau", 0.0)
    tau_y = inst.y_block.prox_term.params.get("tau", 0.0)

    def reduced(block, keep, mu, dim):
        H = np.zeros((dim, dim))
        lin = np.zeros(dim)
        if block.smooth_term.kind == "least_squares":
            C, d = block.smooth_term.params["C"], block.smooth_term.params["d"]
            H = C.T @ C
            lin = C.T @ d
        H = H + mu * np.eye(dim)
        return H[np.ix_(keep, keep)], lin[keep]

    Hx, lx = reduced(inst.x_block, keep_x, mu_x, inst.m)
    Hy, ly = reduced(inst.y_block, keep_y, mu_y, inst.n)
    As = inst.A[:, keep_x]
    Bs = inst.B[:, keep_y]
    ms, ns, p = Hx.shape[0], Hy.shape[0], inst.p
    K = np.zeros((ms + ns + p, ms + ns + p))
    K[:ms, :ms] = Hx
    K[ms:ms + ns, ms:ms + ns] = Hy
    K[:ms, ms + ns:] = As.T
    K[ms + ns:, :ms] = As
    K[ms:ms + ns, ms + ns:] = Bs.T
    K[ms + ns:, ms:ms + ns] = Bs
    rhs = np.concatenate([lx - tau_x * sign_x[keep_x], ly - tau_y * sign_y[keep_y], inst.b])
    try:
        sol = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(sol)):
        return None
    x_new = np.zeros(inst.m)
    y_new = np.zeros(inst.n)
    x_new[keep_x] = sol[:ms]
    y_new[keep_y] = sol[ms:ms + ns]
    lam_new = sol[ms + ns:]
    # sign pattern must be self-consistent, otherwise the support guess was wrong
    if np.any(np.sign(x_new[keep_x & (sign_x != 0)]) != sign_x[keep_x & (sign_x != 0)]):
        return None
    if np.any(np.sign(y_new[keep_y & (sign_y != 0)]) != sign_y[keep_y & (sign_y != 0)]):
        return None
    return x_new, y_new, lam_new


def reference_solve(inst, tol=1e-11, max_outer=1_000_000, saddle_samples=1000, seed=0):
    """High-accuracy saddle reference from a long certified run of our own solver.

    Runs the prox-form first-scheme solver with certified parameters, and at
    checkpoints (a) tries an active-set polish through a reduced KKT solve and
    (b) tests the raw iterate, accepting the first candidate whose feasibility
    and block prox-gradient stationarities all drop below ``tol`` and whose
    saddle check at ``saddle_samples`` points is clean.  Exhausting the budget
    raises :class:`ReferenceNotReachedError` with the best point seen.
    """
    if tol <= 0:
        raise ProblemsError("reference_solve needs tol > 0 (it stops on strict inequalities)")
    cfg = engine.certified_config(inst, "admm_first_ii", max_outer=max_outer)
    ctx = engine.prepare(inst, cfg)
    state = engine.init_state(inst, cfg, np.zeros(inst.m), np.zeros(inst.n))
    support_tol = 1e-6

    def accept(x, y, lam):
        feas = feasibility(inst, x, y)
        sx, sy = _stationarity(inst, x, y, lam)
        if max(feas, sx, sy) > tol:
            return None
        ref = SaddleReference(x, y, lam)
        if check_saddle(inst, ref, samples=saddle_samples, seed=seed, tol=1e-8).violations:
            return None
        return ref

    best = None
    best_score = math.inf
    check_every = 50
    it = 0
    while it < max_outer:
        state, _ = engine.step_once(inst, cfg, state, ctx)
        it += 1
        if it % check_every == 0 or it == max_outer:
            polished = _polish(inst, state.x, state.y, state.lam, support_tol)
            if polished is not None:
                ref = accept(*polished)
                if ref is not None:
                    return ref
            ref = accept(state.x, state.y, state.lam)
            if ref is not None:
                return ref
            feas = feasibility(inst, state.x, state.y)
            sx, sy = _stationarity(inst, state.x, state.y, state.lam)
            score = max(feas, sx, sy)
            if score < best_score:
                best_score = score
                best = (state.x.copy(), state.y.copy(), state.lam.copy())
            check_every = min(check_every * 2, 2000)
    feas = feasibility(inst, best[0], best[1])
    sx, sy = _stationarity(inst, *best)
    raise ReferenceNotReachedError(best, {"feasibility": feas, "stat_x": sx, "stat_y": sy})
