"""Energy sequence, certificate constants, Lyapunov monotonicity checks, the
multiplier-recovery identity, and empirical rate fitting.

Every certified quantity here is computed from initial data plus the saddle
reference only, so a run can be checked against bounds that were fixed before
it started.  All tolerances are relative (1e-8 * (1 + bound)) so badly scaled
instances do not produce spurious violations.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import schedule as sched
from .engine import VARIANTS, validate_config
from .model import lagrangian

__all__ = [
    "MetricsError",
    "EnergyBreakdown",
    "CertificateBounds",
    "energy",
    "energy_trajectory",
    "error_series_sum",
    "certificates",
    "check_rate_bounds",
    "lyapunov_monotone",
    "lambda_recovery",
    "fit_rate",
    "lemma_bounded_accumulation",
    "lemma_sum_inequality",
]

REL_TOL = 1e-8


class MetricsError(ValueError):
    """Metric computation asked for data the run did not record."""


@dataclass(frozen=True)
class EnergyBreakdown:
    """The four energy components at one iterate plus the augmented term.

    I1 scales the Lagrangian gap by t_k^2; I2/I3/I4 are the weighted squared
    distances of u, v, lambda to the saddle point (I3 carries t_{k+1}^2, one
    index ahead, matching the telescoping in the analysis).  ``augmented`` is
    the extra (gamma t_{k+1}^2 / 2)||B(v - y*)||^2 the argmin-family Lyapunov
    function needs.
    """

    I1: float
    I2: float
    I3: float
    I4: float
    augmented: float

    @property
    def total(self):
        return self.I1 + self.I2 + self.I3 + self.I4


def energy(inst, state, ref, cfg):
    """Exact energy components at the current solver state."""
    if ref is None:
        raise MetricsError("energy needs a saddle reference")
    t_k = state.sched_state.t_k
    t_next = state.sched_state.t_next
    gap = lagrangian(inst, state.x, state.y, ref.lambda_star) - lagrangian(
        inst, ref.x_star, ref.y_star, ref.lambda_star
    )
    dv = state.v - ref.y_star
    Bdv = inst.B @ dv if inst.n else np.zeros(inst.p)
    return EnergyBreakdown(
        I1=t_k * t_k * gap,
        I2=float(np.sum((state.u - ref.x_star) ** 2)) / (2.0 * cfg.alpha),
        I3=t_next * t_next * float(np.sum(dv ** 2)) / (2.0 * cfg.beta),
        I4=float(np.sum((state.lam - ref.lambda_star) ** 2)) / (2.0 * cfg.gamma),
        augmented=0.5 * cfg.gamma * t_next * t_next * float(np.sum(Bdv ** 2)),
    )


def energy_trajectory(inst, report, ref, cfg=None):
    """EnergyBreakdown at every stored iterate of a run (store_iterates=True)."""
    cfg = cfg if cfg is not None else report.config
    it = report.iterates
    if it is None:
        raise MetricsError("energy_trajectory needs store_iterates=True on the run")
    L_star = lagrangian(inst, ref.x_star, ref.y_star, ref.lambda_star)
    out = []
    for x, y, u, v, lam, t_k, t_next in zip(
        it["x"], it["y"], it["u"], it["v"], it["lam"], it["t_k"], it["t_next"]
    ):
        gap = lagrangian(inst, x, y, ref.lambda_star) - L_star
        dv = v - ref.y_star
        Bdv = inst.B @ dv if inst.n else np.zeros(inst.p)
        out.append(EnergyBreakdown(
            I1=t_k * t_k * gap,
            I2=float(np.sum((u - ref.x_star) ** 2)) / (2.0 * cfg.alpha),
            I3=t_next * t_next * float(np.sum(dv ** 2)) / (2.0 * cfg.beta),
            I4=float(np.sum((lam - ref.lambda_star) ** 2)) / (2.0 * cfg.gamma),
            augmented=0.5 * cfg.gamma * t_next * t_next * float(np.sum(Bdv ** 2)),
        ))
    return out


def error_series_sum(rule, eps_policy, increment_tol=1e-14, max_terms=30_000_000):
    """Sum of max(t_{k+1} eps_a_k, eps_b_k), or None when non-summable.

    Partial sums accumulate until the increment drops below ``increment_tol``.
    Positive increments that stop decreasing are provably a divergent tail,
    so the series is flagged non-summable without exhausting ``max_terms``.
    """
    st = sched.init_state(rule)
    total = 0.0
    checkpoint_inc = math.inf
    k = 1
    while k <= max_terms:
        eps_a, eps_b = eps_policy(k)
        if eps_a < 0 or eps_b < 0:
            raise MetricsError("error sequences must be nonnegative")
        inc = max(st.t_next * eps_a, eps_b)
        total += inc
        if inc < increment_tol:
            return total
        if k % 4096 == 0:
            if inc >= checkpoint_inc and inc > 1e3 * increment_tol:
                return None
            checkpoint_inc = inc
        st = sched.next_t(rule, st)
        k += 1
    return None


@dataclass
class CertificateBounds:
    """Constants from initial data that bound the whole certified trajectory.

    ``C1`` serves the argmin-family feasibility bound, ``C2`` the prox-family
    one, and the pair (``C3``, ``C4``) the inexact run (energy-level and
    feasibility-level constants, feasibility keyed to the two-block residual).
    The applicable bound triple for a variant comes from :meth:`bounds_for`.
    """

    E1: float
    aug1: float
    C1: float
    C2: float
    lambda_star_norm: float
    C3: float = None
    C4: float = None
    error_sum: float = None
    binding: bool = True
    notes: tuple = ()

    def bounds_for(self, variant):
        """(lagrangian, feasibility, objective) bound constants for a variant."""
        info = VARIANTS[variant]
        if info.inexact:
            if self.C3 is None:
                raise MetricsError("inexact certificates unavailable (non-summable errors)")
            lag, feas = self.C3, self.C4
        elif info.anticipates_full_dual:
            lag, feas = self.E1 + self.aug1, self.C1
        else:
            lag, feas = self.E1, self.C2
        return lag, feas, lag + feas * self.lambda_star_norm


def certificates(inst, cfg, state1, ref, eps_policy=None):
    """Certificate constants for a run starting at ``state1``.

    All constants are evaluated from the initial state only; the inexact
    constants additionally need the summed error series and become
    unavailable (None, with a note) when that series does not converge.
    """
    if ref is None:
        raise MetricsError("certificates need a saddle reference")
    e1 = energy(inst, state1, ref, cfg)
    t1 = state1.sched_state.t_k
    gamma = cfg.gamma
    r1 = float(np.linalg.norm(inst.residual(state1.x, state1.y)))
    dlam = float(np.linalg.norm(state1.lam - ref.lambda_star))
    E1, aug1 = e1.total, e1.augmented
    root = math.sqrt(max(2.0 * gamma * E1 + 2.0 * gamma * aug1, 0.0))
    C1 = 3.0 * t1 * t1 * r1 + (2.0 * dlam + 2.0 * root) / gamma
    C2 = 3.0 * t1 * t1 * r1 + (2.0 * dlam + 2.0 * math.sqrt(max(2.0 * gamma * E1, 0.0))) / gamma

    binding, warnings = validate_config(inst, cfg)
    bounds = CertificateBounds(
        E1=E1, aug1=aug1, C1=C1, C2=C2,
        lambda_star_norm=float(np.linalg.norm(ref.lambda_star)),
        binding=binding, notes=tuple(warnings),
    )
    policy = eps_policy if eps_policy is not None else cfg.eps_policy
    if policy is not None:
        S = error_series_sum(cfg.schedule, policy)
        if S is None:
            bounds.notes = bounds.notes + ("error series not summable; C3/C4 unavailable",)
            bounds.binding = False
        else:
            slack = math.sqrt(4.0 * max(cfg.alpha, cfg.beta) * (E1 + aug1))
            C3 = (E1 + aug1) + S * (slack + 4.0 * max(cfg.alpha, cfg.beta) * S)
            bounds.C3 = C3
            bounds.C4 = 3.0 * t1 * t1 * r1 + (
                2.0 * dlam + 2.0 * math.sqrt(2.0 * gamma * C3)
            ) / gamma
            bounds.error_sum = S
    return bounds


def check_rate_bounds(report, certs, variant=None):
    """Verify the three certified inequalities at every record.

    Returns the list of violations as dicts (k, metric, value, bound); empty
    when the run respects its certificates or when the certificates are
    non-binding (nothing to check then).
    """
    if not certs.binding:
        return []
    variant = variant if variant is not None else report.variant
    lag_c, feas_c, obj_c = certs.bounds_for(variant)
    out = []
    for rec in report.records:
        t2 = rec.t_k * rec.t_k
        for name, value, const in (
            ("lagrangian_gap", rec.lagrangian_gap, lag_c),
            ("feasibility", rec.feasibility, feas_c),
            ("objective_gap", rec.objective_gap, obj_c),
        ):
            if not np.isfinite(value):
                continue
            bound = const / t2
            if value > bound + REL_TOL * (1.0 + bound):
                out.append({"k": rec.k, "metric": name, "value": value, "bound": bound})
    return out


def lyapunov_monotone(energies, variant, tol=None):
    """First index k whose Lyapunov value rose above its predecessor, or None.

    The argmin family is checked on total + augmented, the prox family on the
    total alone; tolerance defaults to 1e-8 * (1 + first value).
    """
    if len(energies) <= 1:
        return None
    with_aug = VARIANTS[variant].anticipates_full_dual
    seq = [e.total + e.augmented if with_aug else e.total for e in energies]
    if tol is None:
        tol = REL_TOL * (1.0 + abs(seq[0]))
    for i in range(1, len(seq)):
        if seq[i] > seq[i - 1] + tol:
            return i + 1  # 1-based iteration index of the increase
    return None


def lambda_recovery(report, gamma=None):
    """Max deviation of the multiplier from its primal-residual reconstruction.

    Rebuilds lambda_{k+1} - lambda_1 from the scaled residual history
    h_k = t_k^2 (A x_k + B y_k - b) and the weights
    a_k = (t_k^2 - t_{k+1}(t_{k+1} - 1))/t_k^2, and returns the largest norm
    mismatch over the recorded trajectory.  Needs full per-step iterates.
    """
    it = report.iterates
    if it is None or report.config.record_every != 1:
        raise MetricsError("lambda_recovery needs store_iterates=True and record_every=1")
    gamma = gamma if gamma is not None else report.config.gamma
    lam = it["lam"]
    if len(lam) < 2:
        return 0.0
    t_k = it["t_k"]
    t_next = it["t_next"]
    res = it["residual"]
    h = [t_k[i] ** 2 * res[i] for i in range(len(res))]
    a = [
        (t_k[i] ** 2 - t_next[i] * (t_next[i] - 1.0)) / t_k[i] ** 2
        for i in range(len(res))
    ]
    acc = np.zeros_like(h[0])
    worst = 0.0
    for k in range(1, len(h)):
        acc = acc + a[k - 1] * h[k - 1]
        rhs = gamma * (h[k] - h[0]) + gamma * acc
        dev = float(np.linalg.norm(lam[k] - lam[0] - rhs))
        worst = max(worst, dev)
    return worst


def fit_rate(report, metric, window):
    """Least-squares slope of log(metric) against log(k) over a window of k."""
    lo, hi = window
    ks, vals = [], []
    for rec in report.records:
        if lo <= rec.k <= hi and np.isfinite(getattr(rec, metric)):
            ks.append(rec.k)
            vals.append(getattr(rec, metric))
    if len(ks) < 2:
        raise MetricsError(f"window [{lo}, {hi}] holds fewer than two records")
    vals = np.array(vals)
    if np.any(vals <= 0.0):
        raise MetricsError(f"metric {metric} is nonpositive inside the fit window")
    slope = np.polyfit(np.log(np.array(ks, dtype=float)), np.log(vals), 1)[0]
    return float(slope)


def lemma_bounded_accumulation(h_list, a_list, tol=1e-9):
    """Bounded-accumulation property of the residual history.

    Given vectors h_k and weights a_k in [0, 1), with
    C = max_k ||h_{k+1} + sum_{i<=k} a_i h_i||, the whole history must stay
    inside ||h_1|| + 2C.  Returns (ok, sup||h_k||, bound).
    """
    if not h_list:
        raise MetricsError("empty history")
    acc = np.zeros_like(h_list[0])
    C = 0.0
    for k in range(len(h_list) - 1):
        acc = acc + a_list[k] * h_list[k]
        C = max(C, float(np.linalg.norm(h_list[k + 1] + acc)))
    sup_h = max(float(np.linalg.norm(h)) for h in h_list)
    bound = float(np.linalg.norm(h_list[0])) + 2.0 * C
    return sup_h <= bound + tol * (1.0 + bound), sup_h, bound


def lemma_sum_inequality(a_seq, b_seq, c, tol=1e-9):
    """Scalar-sequence bound: a_k^2 <= c^2 + sum b_j a_j forces a_k <= c + sum b_j.

    Returns (premise_ok, conclusion_ok) checked over the full sequences.
    """
    a = np.asarray(a_seq, dtype=float)
    b = np.asarray(b_seq, dtype=float)
    if a.size != b.size:
        raise MetricsError("sequences must have equal length")
    run = np.cumsum(b * a)
    premise = bool(np.all(a * a <= c * c + run + tol * (1.0 + c * c + run)))
    bound = c + float(np.sum(b))
    conclusion = bool(np.all(a <= bound + tol * (1.0 + bound)))
    return premise, conclusion
