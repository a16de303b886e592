"""Iteration engines for the accelerated linearized ADMM family.

All variants share one skeleton: extrapolate, update the x block, update the
y block, average, push the multiplier.  They differ only in which block
update they use (implicit-subgradient "first scheme" forms vs extrapolated
"second scheme" forms), and in whether the y update anticipates the next
multiplier exactly or through the intermediate one (which decides the prox
form and which Lyapunov function is monotone).  The one-block ALM methods and
the unconstrained momentum methods are the same engine run with an empty
block, not separate code.
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import schedule as sched
from .linalg import as_vector, spectral_norm_sq
from .model import feasibility, lagrangian
from .subprob import (
    InnerSolveError,
    QuadraticProxSubproblem,
    UnsupportedStructureError,
    eta_second,
    solve_exact,
    solve_inner,
    solve_v_prox_first,
    solve_y_prox_second,
)

__all__ = [
    "EngineError",
    "VariantInfo",
    "VARIANTS",
    "SolverConfig",
    "SolverState",
    "IterationRecord",
    "RunReport",
    "validate_config",
    "certified_config",
    "init_state",
    "prepare",
    "step_once",
    "run",
    "reduce_alm",
    "nesterov_reference",
]


class EngineError(ValueError):
    """Invalid solver configuration or state."""


@dataclass(frozen=True)
class VariantInfo:
    """Dispatch data for one algorithm variant.

    ``x_scheme``/``y_scheme`` pick the block updates; ``anticipates_full_dual``
    is True when the y update targets the end-of-step multiplier (argmin
    forms), which is the family whose Lyapunov function needs the augmented
    ``||B(v-y*)||^2`` term.  ``requires`` pins degenerate-block variants.
    """

    name: str
    x_scheme: str  # "first" | "second" | "none"
    y_scheme: str  # "first_argmin" | "first_prox" | "second_argmin" | "second_prox" | "none"
    anticipates_full_dual: bool
    requires: str = ""  # "", "n0" (empty y block), "m0" (empty x block)
    inexact: bool = False


VARIANTS = {
    v.name: v
    for v in [
        VariantInfo("admm_first_i", "first", "first_argmin", True),
        VariantInfo("admm_first_ii", "first", "first_prox", False),
        VariantInfo("admm_second_i", "second", "second_argmin", True),
        VariantInfo("admm_second_ii", "second", "second_prox", False),
        VariantInfo("hybrid_i_1", "first", "second_argmin", True),
        VariantInfo("hybrid_i_2", "first", "second_prox", False),
        VariantInfo("hybrid_ii_1", "second", "first_argmin", True),
        VariantInfo("hybrid_ii_2", "second", "first_prox", False),
        VariantInfo("alm_first_i", "first", "none", True, requires="n0"),
        VariantInfo("alm_first_ii", "none", "first_prox", False, requires="m0"),
        VariantInfo("alm_second_i", "second", "none", True, requires="n0"),
        VariantInfo("alm_second_ii", "none", "second_prox", False, requires="m0"),
        VariantInfo("nesterov_first", "first", "none", True, requires="n0"),
        VariantInfo("nesterov_second", "second", "none", True, requires="n0"),
        VariantInfo("inexact_first", "first", "first_argmin", True, inexact=True),
    ]
}


@dataclass
class SolverConfig:
    """Parameters of one run.

    ``eps_policy`` (inexact variant only) maps the iteration index k to the
    pair of stationarity targets for the two block subproblems.  When a block
    has no closed-form exact solve, the engine falls back to the inner solver
    at ``exact_fallback_eps``.
    """

    variant: str
    alpha: float
    beta: float
    gamma: float
    schedule: sched.ScheduleRule
    max_outer: int = 1000
    record_every: int = 1
    store_iterates: bool = False
    eps_policy: callable = None
    inner_max_iters: int = 200_000
    exact_fallback_eps: float = 1e-12
    penalty_consistent_lambda1: bool = False

    def info(self):
        if self.variant not in VARIANTS:
            raise EngineError(f"unknown variant {self.variant!r}; known: {sorted(VARIANTS)}")
        return VARIANTS[self.variant]


@dataclass
class SolverState:
    """All per-iteration quantities at index k."""

    k: int
    x: np.ndarray
    x_prev: np.ndarray
    y: np.ndarray
    y_prev: np.ndarray
    u: np.ndarray
    v: np.ndarray
    lam: np.ndarray
    sched_state: sched.ScheduleState


@dataclass
class IterationRecord:
    k: int
    t_k: float
    t_next: float
    feasibility: float
    objective_gap: float = float("nan")
    lagrangian_gap: float = float("nan")
    inner_iters: int = 0
    eps_used: tuple = (0.0, 0.0)


@dataclass
class RunReport:
    """Trajectory and bookkeeping of one solver run."""

    variant: str
    config: SolverConfig
    records: list
    binding: bool
    warnings: list
    iterates: dict = None
    aborted: bool = False
    diagnostic: str = ""
    wall_time: float = 0.0

    def metric(self, name):
        return np.array([getattr(r, name) for r in self.records])


# --- configuration validation ----------------------------------------------


def beta_bound(inst, cfg, B_norm_sq=None):
    """The theorem bound on beta for this variant (inf when unconstrained)."""
    info = cfg.info()
    if info.y_scheme == "none":
        return float("inf")
    L_g2 = inst.y_block.smooth_term.lipschitz
    t1 = cfg.schedule.t1 if cfg.schedule.kind in ("recurrence", "sqrt_cap", "min_cap") else sched.t_value(cfg.schedule, 1)
    if info.anticipates_full_dual:
        return t1 * t1 / L_g2 if L_g2 > 0 else float("inf")
    if B_norm_sq is None:
        B_norm_sq = spectral_norm_sq(inst.B) if inst.B.size else 0.0
    denom = L_g2 + t1 * t1 * cfg.gamma * B_norm_sq
    return t1 * t1 / denom if denom > 0 else float("inf")


def strong_cap(inst, cfg, B_norm_sq=None):
    """The coefficient a in the required growth condition t_{k+1}^2 <= t_k^2 + a t_k."""
    info = cfg.info()
    if info.y_scheme == "none":
        return float("inf")  # one-block convex theorems need only the basic condition
    mu_g = inst.mu_g
    if info.anticipates_full_dual:
        if B_norm_sq is None:
            B_norm_sq = spectral_norm_sq(inst.B) if inst.B.size else 0.0
        return cfg.beta * mu_g / (1.0 + cfg.beta * cfg.gamma * B_norm_sq)
    return cfg.beta * mu_g


def validate_config(inst, cfg, horizon=None):
    """Check the theorem hypotheses; returns (binding, warnings).

    Violations do not reject the run (the conditions are sufficient, not
    necessary); they disable the certificates and are reported as warnings.
    """
    info = cfg.info()
    warnings = []
    if info.requires == "n0" and inst.n != 0:
        raise EngineError(f"variant {cfg.variant} requires an empty y block (B with 0 columns)")
    if info.requires == "m0" and inst.m != 0:
        raise EngineError(f"variant {cfg.variant} requires an empty x block (A with 0 columns)")
    if cfg.alpha <= 0 or cfg.beta <= 0 or cfg.gamma <= 0:
        raise EngineError("alpha, beta, gamma must be positive")
    if cfg.max_outer < 0:
        raise EngineError("max_outer must be >= 0")

    binding = True
    horizon = max(2, (horizon if horizon is not None else cfg.max_outer) + 2)
    t1 = sched.t_value(cfg.schedule, 1)
    if t1 < 1.0 - 1e-12:
        raise EngineError(
            f"schedule {cfg.schedule.label()} starts at t1 = {t1:.6g} < 1; "
            "the constrained engines require t_k >= 1"
        )

    L_f2 = inst.x_block.smooth_term.lipschitz
    if inst.m > 0 and L_f2 > 0 and cfg.alpha > 1.0 / L_f2 + 1e-12:
        warnings.append(
            f"alpha = {cfg.alpha:.6g} exceeds 1/L_f2 = {1.0 / L_f2:.6g}; certificates disabled"
        )
        binding = False

    B2 = spectral_norm_sq(inst.B) if inst.B.size and np.any(inst.B) else 0.0
    if inst.n > 0:
        bb = beta_bound(inst, cfg, B_norm_sq=B2)
        if cfg.beta > bb * (1.0 + 1e-12):
            warnings.append(
                f"beta = {cfg.beta:.6g} exceeds the variant bound {bb:.6g}; certificates disabled"
            )
            binding = False
        if inst.mu_g <= 0 and info.y_scheme != "none":
            warnings.append("y block has no strong convexity (mu_g = 0); no rate certificate")
            binding = False

    ok_basic, k_basic = sched.admissible_basic(cfg.schedule, horizon)
    if not ok_basic:
        warnings.append(f"schedule violates t_(k+1)^2 <= t_k^2 + t_(k+1) at k = {k_basic}")
        binding = False
    if inst.n > 0 and inst.mu_g > 0 and info.y_scheme != "none":
        cap = strong_cap(inst, cfg, B_norm_sq=B2)
        ok_strong, k_strong = sched.admissible_strong(cfg.schedule, cap, horizon)
        if not ok_strong:
            warnings.append(
                f"schedule violates t_(k+1)^2 <= t_k^2 + {cap:.6g} t_k at k = {k_strong}"
            )
            binding = False
    if info.inexact:
        if cfg.eps_policy is None:
            raise EngineError("inexact variant requires an eps_policy")
    return binding, warnings


def certified_config(inst, variant, schedule_kind="min_cap", max_outer=1000, **overrides):
    """Build a SolverConfig whose parameters satisfy the variant's theorem.

    For the argmin-form family this is the optimal-rate parameter corollary;
    for the prox-form family beta is re-picked inside its tighter bound and
    gamma re-derived so the bound holds with margin.  ``schedule_kind`` may be
    "min_cap" or "recurrence" (both admissible under these parameters).
    """
    info = VARIANTS[variant]
    L_f2 = inst.x_block.smooth_term.lipschitz if inst.m else 0.0
    L_g2 = inst.y_block.smooth_term.lipschitz if inst.n else 0.0
    alpha = 1.0 / L_f2 if L_f2 > 0 else 1.0

    if info.y_scheme == "none" or inst.n == 0:
        rule = sched.ScheduleRule("recurrence", t1=1.0)
        cfg = SolverConfig(variant=variant, alpha=alpha, beta=1.0, gamma=1.0,
                           schedule=rule, max_outer=max_outer)
        return replace(cfg, **overrides)

    mu_g = inst.mu_g
    if mu_g <= 0:
        raise EngineError("certified parameters require a strongly convex y block (mu_g > 0)")
    # Safe upper bound on ||B||^2: power iteration converges from below.
    B2 = spectral_norm_sq(inst.B) * (1.0 + 1e-9) if inst.B.size and np.any(inst.B) else 0.0
    cp = sched.corollary_params(L_f2, L_g2, mu_g, B2)
    t1, beta, gamma = cp.t1, cp.beta, cp.gamma

    if not info.anticipates_full_dual:
        lo = (1.0 + 1.0 / t1) / mu_g
        hi = t1 * t1 / L_g2 if L_g2 > 0 else t1 * t1 * 1e6
        beta = min(2.0 * lo, 0.5 * (lo + hi))
        if B2 > 0:
            gamma = 0.9 * (t1 * t1 - beta * L_g2) / (beta * t1 * t1 * B2)
        cap = beta * mu_g
    else:
        cap = beta * mu_g / (1.0 + beta * gamma * B2)

    if schedule_kind == "min_cap":
        rule = sched.ScheduleRule("min_cap", t1=t1, a=cap)
    elif schedule_kind == "recurrence":
        rule = sched.ScheduleRule("recurrence", t1=t1)
    else:
        raise EngineError(f"certified_config supports min_cap/recurrence, not {schedule_kind!r}")
    cfg = SolverConfig(variant=variant, alpha=cp.alpha, beta=beta, gamma=gamma,
                       schedule=rule, max_outer=max_outer)
    return replace(cfg, **overrides)


# --- state ------------------------------------------------------------------


def init_state(inst, cfg, x0, y0, lambda0=None):
    """State at k = 1: duplicated previous iterates, u1 = x1, v1 = y1.

    With ``cfg.penalty_consistent_lambda1`` the multiplier starts at
    gamma * t1^2 * (A x1 + B y1 - b), which activates the penalty-method
    identity lambda_k = gamma t_k^2 (A x_k + B y_k - b) under the saturated
    recurrence schedule.
    """
    x0 = as_vector(x0, "x0")
    y0 = as_vector(y0, "y0")
    inst.check_dims(x0, y0)
    st = sched.init_state(cfg.schedule)
    if cfg.penalty_consistent_lambda1:
        lam = cfg.gamma * st.t_k ** 2 * inst.residual(x0, y0)
    else:
        lam = as_vector(lambda0, "lambda0") if lambda0 is not None else np.zeros(inst.p)
        if lam.size != inst.p:
            raise EngineError(f"lambda0 has length {lam.size}, expected {inst.p}")
    return SolverState(
        k=1, x=x0.copy(), x_prev=x0.copy(), y=y0.copy(), y_prev=y0.copy(),
        u=x0.copy(), v=y0.copy(), lam=lam.copy(), sched_state=st,
    )


class _RunContext:
    """Per-run caches: Gram matrices, spectral norms, block solver plans."""

    def __init__(self, inst, cfg):
        self.inst = inst
        self.cfg = cfg
        self.info = cfg.info()
        A, B = inst.A, inst.B
        self.AtA = A.T @ A if inst.m else np.zeros((0, 0))
        self.BtB = B.T @ B if inst.n else np.zeros((0, 0))
        self.A_ns = spectral_norm_sq(A) if A.size and np.any(A) else 0.0
        self.B_ns = spectral_norm_sq(B) if B.size and np.any(B) else 0.0
        self.x_exact = self._plan(inst.x_block.prox_term, self.AtA)
        self.y_exact = self._plan(inst.y_block.prox_term, self.BtB)

    @staticmethod
    def _plan(prox_term, gram):
        kind = getattr(prox_term, "kind", "custom")
        if kind in ("zero", "squared"):
            return True
        if gram.size == 0:
            return True
        off = gram - np.diag(np.diag(gram))
        scale = max(np.abs(np.diag(gram)).max(), 1.0)
        if np.abs(off).max() > 1e-13 * scale:
            return False
        if getattr(prox_term, "separable", False):
            return True
        return bool(np.ptp(np.diag(gram)) <= 1e-14 * max(np.abs(np.diag(gram)).max(), 1e-300))

    def solve_block(self, sub, exact_ok, eps, warm):
        """Solve one block subproblem; returns (point, inner_iters).

        ``eps = 0`` asks for the exact minimizer: the closed form when the
        structure allows it, otherwise the inner loop at the configured
        fallback target.
        """
        if eps <= 0.0:
            if exact_ok:
                return solve_exact(sub), 0
            rep = solve_inner(sub, self.cfg.exact_fallback_eps,
                              max_iters=self.cfg.inner_max_iters, start=warm)
            return rep.point, rep.inner_iters
        rep = solve_inner(sub, eps, max_iters=self.cfg.inner_max_iters, start=warm)
        return rep.point, rep.inner_iters


def prepare(inst, cfg):
    return _RunContext(inst, cfg)


def step_once(inst, cfg, state, ctx=None, eps_pair=(0.0, 0.0)):
    """Advance one iteration; returns the new state plus (inner_x, inner_y) counts."""
    if ctx is None:
        ctx = prepare(inst, cfg)
    info = ctx.info
    A, B, b = inst.A, inst.B, inst.b
    t_k, t_next = state.sched_state.t_k, state.sched_state.t_next
    if t_k < 1.0 - 1e-12 or t_next < t_k - 1e-12:
        raise EngineError(f"schedule produced t_k = {t_k:.6g}, t_next = {t_next:.6g} at k = {state.k}")
    w = (t_k - 1.0) / t_next
    gamma, alpha, beta = cfg.gamma, cfg.alpha, cfg.beta
    mu_g = inst.mu_g
    eps_a, eps_b = eps_pair
    inner_x = inner_y = 0

    x_bar = state.x + w * (state.x - state.x_prev)
    y_bar = state.y + w * (state.y - state.y_prev)

    # x block
    if inst.m == 0 or info.x_scheme == "none":
        x_next, u_next = state.x, state.u
        Au_next = np.zeros(inst.p)
    else:
        lin_x = inst.x_block.smooth_term.gradient(x_bar)
        if inst.p:
            lin_x = lin_x + A.T @ state.lam
        if info.x_scheme == "first":
            sub = QuadraticProxSubproblem(
                prox_term=inst.x_block.prox_term, linear=lin_x,
                sigma=gamma * t_next, M=A, r=b - B @ state.v,
                rho=1.0 / (alpha * t_next), center=state.u,
                MtM=ctx.AtA, M_norm_sq=ctx.A_ns,
            )
            u_next, inner_x = ctx.solve_block(sub, ctx.x_exact, eps_a, state.u)
            x_next = (u_next + (t_next - 1.0) * state.x) / t_next
        elif info.x_scheme == "second":
            Ax = A @ state.x
            sub = QuadraticProxSubproblem(
                prox_term=inst.x_block.prox_term, linear=lin_x,
                sigma=gamma * t_next * t_next, M=A,
                r=Ax - (Ax + B @ state.v - b) / t_next,
                rho=1.0 / alpha, center=x_bar,
                MtM=ctx.AtA, M_norm_sq=ctx.A_ns,
            )
            x_next, inner_x = ctx.solve_block(sub, ctx.x_exact, eps_a, state.x)
            u_next = x_next + (t_next - 1.0) * (x_next - state.x)
        else:
            raise EngineError(f"unknown x scheme {info.x_scheme!r}")
        Au_next = A @ u_next

    # y block
    if inst.n == 0 or info.y_scheme == "none":
        y_next, v_next = state.y, state.v
    else:
        g2_grad = inst.y_block.smooth_term.gradient(y_bar)
        g1 = inst.y_block.prox_term
        if info.y_scheme == "first_argmin":
            lin_y = g2_grad + B.T @ state.lam
            sub = QuadraticProxSubproblem(
                prox_term=g1, linear=lin_y,
                sigma=gamma * t_next, M=B, r=b - Au_next,
                rho=t_next / beta, center=state.v,
                MtM=ctx.BtB, M_norm_sq=ctx.B_ns,
            )
            v_next, inner_y = ctx.solve_block(sub, ctx.y_exact, eps_b, state.v)
            y_next = (v_next + (t_next - 1.0) * state.y) / t_next
        elif info.y_scheme == "first_prox":
            lam_bar = state.lam + gamma * t_next * (Au_next + B @ state.v - b)
            drift = B.T @ lam_bar + g2_grad
            v_next = solve_v_prox_first(g1, beta, t_next, state.v, drift)
            y_next = (v_next + (t_next - 1.0) * state.y) / t_next
        elif info.y_scheme == "second_argmin":
            eta = eta_second(beta, mu_g, t_next)
            lin_y = g2_grad + B.T @ state.lam
            By = B @ state.y
            sub = QuadraticProxSubproblem(
                prox_term=g1, linear=lin_y,
                sigma=gamma * t_next * t_next, M=B,
                r=By - (Au_next + By - b) / t_next,
                rho=1.0 / eta,
                center=y_bar - eta * mu_g * (t_next - 1.0) * (y_bar - state.y),
                MtM=ctx.BtB, M_norm_sq=ctx.B_ns,
            )
            y_next, inner_y = ctx.solve_block(sub, ctx.y_exact, eps_b, state.y)
            v_next = y_next + (t_next - 1.0) * (y_next - state.y)
        elif info.y_scheme == "second_prox":
            eta = eta_second(beta, mu_g, t_next)
            lam_bar = state.lam + gamma * t_next * (Au_next + B @ state.v - b)
            corr = mu_g * (t_next - 1.0) * (y_bar - state.y) + B.T @ lam_bar + g2_grad
            y_next = solve_y_prox_second(g1, eta, y_bar, corr)
            v_next = y_next + (t_next - 1.0) * (y_next - state.y)
        else:
            raise EngineError(f"unknown y scheme {info.y_scheme!r}")

    lam_next = state.lam + gamma * t_next * (Au_next + (B @ v_next if inst.n else 0.0) - b)

    new_state = SolverState(
        k=state.k + 1,
        x=x_next, x_prev=state.x,
        y=y_next, y_prev=state.y,
        u=u_next, v=v_next, lam=lam_next,
        sched_state=sched.next_t(cfg.schedule, state.sched_state),
    )
    return new_state, (inner_x, inner_y)


def _record(inst, state, ref, inner_iters=0, eps_used=(0.0, 0.0)):
    rec = IterationRecord(
        k=state.k,
        t_k=state.sched_state.t_k,
        t_next=state.sched_state.t_next,
        feasibility=feasibility(inst, state.x, state.y),
        inner_iters=inner_iters,
        eps_used=eps_used,
    )
    if ref is not None:
        obj = inst.objective(state.x, state.y)
        obj_star = inst.objective(ref.x_star, ref.y_star)
        rec.objective_gap = abs(obj - obj_star)
        rec.lagrangian_gap = lagrangian(inst, state.x, state.y, ref.lambda_star) - lagrangian(
            inst, ref.x_star, ref.y_star, ref.lambda_star
        )
    return rec


def _snapshot(store, state, inst):
    store["x"].append(state.x.copy())
    store["y"].append(state.y.copy())
    store["u"].append(state.u.copy())
    store["v"].append(state.v.copy())
    store["lam"].append(state.lam.copy())
    store["residual"].append(inst.residual(state.x, state.y))
    store["t_k"].append(state.sched_state.t_k)
    store["t_next"].append(state.sched_state.t_next)


def run(inst, cfg, x0, y0, lambda0=None, ref=None, stopping=None):
    """Run the configured variant from (x0, y0, lambda0); returns a RunReport.

    ``stopping`` may carry ``max_outer``, ``feasibility_tol``, ``gap_tol``;
    the run stops early once every requested tolerance is met.  Records are
    written every ``cfg.record_every`` iterations (plus the initial state and
    the final one); gap metrics require ``ref``.  A non-finite iterate aborts
    the run and flags the report instead of raising.
    """
    stopping = dict(stopping or {})
    max_outer = int(stopping.get("max_outer", cfg.max_outer))
    feas_tol = stopping.get("feasibility_tol")
    gap_tol = stopping.get("gap_tol")
    if gap_tol is not None and ref is None:
        raise EngineError("gap_tol stopping requires a saddle reference")

    binding, warnings = validate_config(inst, cfg, horizon=max_outer)
    ctx = prepare(inst, cfg)
    state = init_state(inst, cfg, x0, y0, lambda0)
    records = [_record(inst, state, ref)]
    iterates = None
    if cfg.store_iterates:
        iterates = {"x": [], "y": [], "u": [], "v": [], "lam": [], "residual": [],
                    "t_k": [], "t_next": []}
        _snapshot(iterates, state, inst)

    started = time.perf_counter()
    report = RunReport(variant=cfg.variant, config=cfg, records=records,
                       binding=binding, warnings=warnings, iterates=iterates)
    for it in range(max_outer):
        eps_pair = (0.0, 0.0)
        if ctx.info.inexact:
            eps_pair = tuple(float(e) for e in cfg.eps_policy(state.k))
        try:
            state, (ix, iy) = step_once(inst, cfg, state, ctx, eps_pair)
        except InnerSolveError as exc:
            report.aborted = True
            report.diagnostic = f"inner solver failed at outer iteration {state.k}: {exc}"
            break
        if not (np.all(np.isfinite(state.x)) and np.all(np.isfinite(state.y))
                and np.all(np.isfinite(state.lam))):
            report.aborted = True
            report.diagnostic = f"non-finite iterate at k = {state.k}"
            records.append(IterationRecord(
                k=state.k, t_k=state.sched_state.t_k, t_next=state.sched_state.t_next,
                feasibility=float("nan"),
            ))
            break
        last = it == max_outer - 1
        if cfg.store_iterates:
            _snapshot(iterates, state, inst)
        if state.k % cfg.record_every == 0 or last:
            rec = _record(inst, state, ref, inner_iters=ix + iy, eps_used=eps_pair)
            if records and records[-1].k == rec.k:
                records[-1] = rec
            else:
                records.append(rec)
            feas_ok = feas_tol is None or rec.feasibility <= feas_tol
            gap_ok = gap_tol is None or rec.objective_gap <= gap_tol
            if (feas_tol is not None or gap_tol is not None) and feas_ok and gap_ok:
                break
    report.wall_time = time.perf_counter() - started
    return report


# --- reductions and the momentum-scheme oracle ------------------------------

_ALM_MAP = {
    "admm_first_i": ("n0", "alm_first_i"),
    "admm_first_ii": ("m0", "alm_first_ii"),
    "admm_second_i": ("n0", "alm_second_i"),
    "admm_second_ii": ("m0", "alm_second_ii"),
}


def reduce_alm(inst, cfg):
    """Map a two-block config to its one-block ALM counterpart.

    Requires the matching degenerate block: the argmin-x variants reduce on
    instances with an empty y block, the prox-y variants on instances with an
    empty x block.  The engine then skips the absent block entirely.
    """
    if cfg.variant not in _ALM_MAP:
        raise EngineError(f"variant {cfg.variant!r} has no ALM reduction")
    need, target = _ALM_MAP[cfg.variant]
    if need == "n0" and inst.n != 0:
        raise EngineError(f"{cfg.variant} reduces only when the y block is empty (n = 0)")
    if need == "m0" and inst.m != 0:
        raise EngineError(f"{cfg.variant} reduces only when the x block is empty (m = 0)")
    return replace(cfg, variant=target)


def nesterov_reference(block, scheme, rule, x0, iters, step):
    """Standalone momentum prox-gradient reference (not built on the engine).

    scheme 1 keeps the auxiliary sequence and takes its prox at step
    ``step * t_{k+1}``; scheme 2 is the classical extrapolated prox-gradient
    step (with the saturated recurrence it is FISTA).  Used as the oracle the
    unconstrained engine reductions are tested against.
    """
    if scheme not in (1, 2):
        raise EngineError("scheme must be 1 or 2")
    grad = block.smooth_term.gradient
    prox = block.prox_term.prox
    x = as_vector(x0, "x0").copy()
    x_prev = x.copy()
    u = x.copy()
    st = sched.init_state(rule)
    traj = [x.copy()]
    for _ in range(iters):
        w = (st.t_k - 1.0) / st.t_next
        y = x + w * (x - x_prev)
        if scheme == 1:
            s_eff = step * st.t_next
            u = prox(s_eff, u - s_eff * grad(y))
            x_new = (u + (st.t_next - 1.0) * x) / st.t_next
        else:
            x_new = prox(step, y - step * grad(y))
        x_prev, x = x, x_new
        traj.append(x.copy())
        st = sched.next_t(rule, st)
    return traj
