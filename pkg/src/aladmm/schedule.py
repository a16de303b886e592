"""Extrapolation sequences t_k: the square-root recurrence, capped variants that
keep the strong-convexity condition, and the classical linear families, plus
admissibility checks and growth lower bounds used by the rate certificates.
"""

import math
from dataclasses import dataclass

__all__ = [
    "ScheduleError",
    "ScheduleRule",
    "ScheduleState",
    "KINDS",
    "init_state",
    "next_t",
    "t_values",
    "admissible_basic",
    "admissible_strong",
    "growth_lower_bound",
    "CorollaryParams",
    "corollary_params",
]


class ScheduleError(ValueError):
    """Invalid schedule rule or parameterization."""


KINDS = (
    "recurrence",        # t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2
    "sqrt_cap",          # t_{k+1} = sqrt(t_k^2 + a t_k)
    "min_cap",           # min of the two above
    "linear_shift",      # t_k = 1 + (k-2)/(alpha-1)
    "half_k",            # t_k = k/2
    "tseng",             # t_k = (k+1)/2
    "chambolle_dossal",  # t_k = 1 + (k-1)/(alpha-1)
    "attouch_cabot",     # t_k = (k-1)/(alpha-1)
)
_RECURRENT = ("recurrence", "sqrt_cap", "min_cap")
_ALPHA_FAMILIES = ("linear_shift", "chambolle_dossal", "attouch_cabot")


@dataclass(frozen=True)
class ScheduleRule:
    """One admissible t_k update rule.

    ``t1`` seeds the recurrent rules and must be >= 1 there; the closed-form
    families pin their own starting value and ignore it.  ``a`` is the growth
    constant of the capped rules, ``alpha`` the inertia parameter of the
    linear families (>= 3).
    """

    kind: str
    t1: float = 1.0
    a: float = None
    alpha: float = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ScheduleError(f"unknown schedule kind {self.kind!r}; known: {KINDS}")
        if self.kind in _RECURRENT and self.t1 < 1.0:
            raise ScheduleError(f"{self.kind} requires t1 >= 1, got {self.t1}")
        if self.kind in ("sqrt_cap", "min_cap"):
            if self.a is None or self.a <= 0:
                raise ScheduleError(f"{self.kind} requires a > 0, got {self.a}")
        if self.kind in _ALPHA_FAMILIES:
            if self.alpha is None or self.alpha < 3.0:
                raise ScheduleError(f"{self.kind} requires alpha >= 3, got {self.alpha}")

    def label(self):
        if self.kind in ("sqrt_cap", "min_cap"):
            return f"{self.kind}(a={self.a:g}, t1={self.t1:g})"
        if self.kind in _ALPHA_FAMILIES:
            return f"{self.kind}(alpha={self.alpha:g})"
        if self.kind == "recurrence":
            return f"recurrence(t1={self.t1:g})"
        return self.kind


@dataclass(frozen=True)
class ScheduleState:
    """Index k plus the pair (t_k, t_{k+1}) one iteration consumes."""

    k: int
    t_k: float
    t_next: float


def _closed_form(rule, k):
    if rule.kind == "linear_shift":
        return 1.0 + (k - 2) / (rule.alpha - 1.0)
    if rule.kind == "half_k":
        return k / 2.0
    if rule.kind == "tseng":
        return (k + 1) / 2.0
    if rule.kind == "chambolle_dossal":
        return 1.0 + (k - 1) / (rule.alpha - 1.0)
    if rule.kind == "attouch_cabot":
        return (k - 1) / (rule.alpha - 1.0)
    raise ScheduleError(f"{rule.kind} has no closed form")


def _advance(rule, t):
    rec = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0
    if rule.kind == "recurrence":
        return rec
    cap = math.sqrt(t * t + rule.a * t)
    if rule.kind == "sqrt_cap":
        return cap
    return min(rec, cap)


def t_value(rule, k):
    """t_k for index k >= 1 (recurrent rules iterate from t1)."""
    if k < 1:
        raise ScheduleError("index k must be >= 1")
    if rule.kind in _RECURRENT:
        t = rule.t1
        for _ in range(k - 1):
            t = _advance(rule, t)
        return t
    return _closed_form(rule, k)


def t_values(rule, count):
    """The list [t_1, ..., t_count]."""
    if count < 1:
        raise ScheduleError("count must be >= 1")
    if rule.kind in _RECURRENT:
        out = [rule.t1]
        t = rule.t1
        for _ in range(count - 1):
            t = _advance(rule, t)
            out.append(t)
        return out
    return [_closed_form(rule, k) for k in range(1, count + 1)]


def init_state(rule):
    return ScheduleState(k=1, t_k=t_value(rule, 1), t_next=t_value(rule, 2))


def next_t(rule, state, require_t_ge_1=False):
    """Advance the schedule one index.

    With ``require_t_ge_1`` the new t_{k+1} must stay >= 1 (the ADMM engines'
    requirement); the linear families with early indices below 1 fail here.
    """
    k = state.k + 1
    t_k = state.t_next
    if rule.kind in _RECURRENT:
        t_next = _advance(rule, t_k)
    else:
        t_next = _closed_form(rule, k + 1)
    if require_t_ge_1 and t_next < 1.0 - 1e-12:
        raise ScheduleError(
            f"{rule.kind} yields t_{k + 1} = {t_next:.6g} < 1, not admissible here"
        )
    return ScheduleState(k=k, t_k=t_k, t_next=t_next)


def _first_violation(rule, horizon, slack_fn):
    # 1e-12 tolerance scaled by t^2: the exact rules saturate their condition
    # with equality, and float64 rounding of t_k^2 grows with the magnitude.
    ts = t_values(rule, horizon)
    for k in range(horizon - 1):
        if slack_fn(ts[k], ts[k + 1]) > 1e-12 * max(1.0, ts[k + 1] * ts[k + 1]):
            return k + 1  # paper-style 1-based index of t_k
    return None


def admissible_basic(rule, horizon):
    """Check t_{k+1}^2 <= t_k^2 + t_{k+1} (+1e-12) for all k < horizon.

    Returns ``(ok, first_violating_index)``.
    """
    if horizon < 2:
        raise ScheduleError("horizon must be >= 2")
    idx = _first_violation(rule, horizon, lambda t, tn: tn * tn - t * t - tn)
    return idx is None, idx


def admissible_strong(rule, a_cap, horizon):
    """Check t_{k+1}^2 <= t_k^2 + a_cap * t_k (+1e-12) for all k < horizon."""
    if a_cap <= 0:
        raise ScheduleError("a_cap must be positive")
    if horizon < 2:
        raise ScheduleError("horizon must be >= 2")
    idx = _first_violation(rule, horizon, lambda t, tn: tn * tn - t * t - a_cap * t)
    return idx is None, idx


def growth_lower_bound(rule, k):
    """Certified lower bound on t_k for the recurrent rules.

    recurrence: t1 + (k-1)/2;  sqrt_cap: t1 + b (k-1) with b = 2 a t1/(a + 4 t1);
    min_cap: t1 + min(1, 2 b) (k-1)/2.
    """
    if k < 1:
        raise ScheduleError("index k must be >= 1")
    if rule.kind == "recurrence":
        return rule.t1 + (k - 1) / 2.0
    if rule.kind in ("sqrt_cap", "min_cap"):
        b = 2.0 * rule.a * rule.t1 / (rule.a + 4.0 * rule.t1)
        if rule.kind == "sqrt_cap":
            return rule.t1 + b * (k - 1)
        return rule.t1 + min(1.0, 2.0 * b) * (k - 1) / 2.0
    raise ScheduleError(f"no growth bound available for rule kind {rule.kind!r}")


@dataclass(frozen=True)
class CorollaryParams:
    """Parameter tuple (t1, alpha, beta, gamma) satisfying the optimal-rate conditions."""

    t1: float
    alpha: float
    beta: float
    gamma: float


def corollary_params(L_f2, L_g2, mu_g, B_norm_sq):
    """Pick (t1, alpha, beta, gamma) meeting all four optimal-rate conditions.

    Requires mu_g > 0.  t1 = max(1, sqrt(2 L_g2/mu_g)) + 1; alpha = 1/L_f2
    (1.0 when L_f2 = 0); beta = midpoint of the admissible interval
    ((1/mu_g)(1 + 1/t1), t1^2/L_g2], with the upper end capped at t1^2 * 1e6
    when L_g2 = 0; gamma takes 90% of its admissible bound
    (t1(beta mu_g - 1) - 1)/((t1+1) beta ||B||^2), with ||B||^2 = 0 guarded by
    substituting 1 (any gamma > 0 is then admissible).
    """
    if mu_g <= 0:
        raise ScheduleError("corollary parameters require mu_g > 0")
    if L_f2 < 0 or L_g2 < 0 or B_norm_sq < 0:
        raise ScheduleError("Lipschitz constants and ||B||^2 must be >= 0")
    t1 = max(1.0, math.sqrt(2.0 * L_g2 / mu_g)) + 1.0
    alpha = 1.0 / L_f2 if L_f2 > 0 else 1.0
    lo = (1.0 + 1.0 / t1) / mu_g
    hi = t1 * t1 / L_g2 if L_g2 > 0 else t1 * t1 * 1e6
    if hi <= lo:
        raise ScheduleError(f"empty admissible beta interval ({lo:.6g}, {hi:.6g}]")
    beta = 0.5 * (lo + hi)
    denom = (t1 + 1.0) * beta * (B_norm_sq if B_norm_sq > 0 else 1.0)
    gamma = 0.9 * (t1 * (beta * mu_g - 1.0) - 1.0) / denom
    return CorollaryParams(t1=t1, alpha=alpha, beta=beta, gamma=gamma)
