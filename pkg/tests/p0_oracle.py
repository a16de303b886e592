"""Independent scalar oracle for the golden instance min x^2/2 + y^2/2 s.t. x + y = 2.

Every update is the hand-solved stationarity equation of the corresponding
scalar subproblem, written in plain float arithmetic.  Nothing here imports
the package; this file is the cross-check the engine is tested against.
Runnable directly: python tests/p0_oracle.py
"""

import math

B_RHS = 2.0  # the constraint x + y = 2


def schedule_next(t, a=None):
    """min-capped square-root recurrence; plain recurrence when a is None."""
    rec = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0
    if a is None:
        return rec
    return min(rec, math.sqrt(t * t + a * t))


def start_state(t1=1.0):
    return {
        "x": 0.0, "x_prev": 0.0, "y": 0.0, "y_prev": 0.0,
        "u": 0.0, "v": 0.0, "lam": 0.0, "t": t1,
    }


def _bars(st, t2):
    w = (st["t"] - 1.0) / t2
    xbar = st["x"] + w * (st["x"] - st["x_prev"])
    ybar = st["y"] + w * (st["y"] - st["y_prev"])
    return xbar, ybar


def _u_first(st, t2, alpha, gamma, xbar):
    # gamma*t2*(u + v - 2) + (u - u_k)/(alpha*t2) + (lam + xbar) = 0
    lin = st["lam"] + xbar
    num = gamma * t2 * (B_RHS - st["v"]) + st["u"] / (alpha * t2) - lin
    den = gamma * t2 + 1.0 / (alpha * t2)
    u2 = num / den
    x2 = (u2 + (t2 - 1.0) * st["x"]) / t2
    return u2, x2


def _x_second(st, t2, alpha, gamma, xbar):
    # gamma*t2^2*(x - x_k + (x_k + v_k - 2)/t2) + (x - xbar)/alpha + (lam + xbar) = 0
    lin = st["lam"] + xbar
    num = (gamma * t2 * t2 * st["x"] - gamma * t2 * (st["x"] + st["v"] - B_RHS)
           + xbar / alpha - lin)
    den = gamma * t2 * t2 + 1.0 / alpha
    x2 = num / den
    u2 = x2 + (t2 - 1.0) * (x2 - st["x"])
    return u2, x2


def _v_first_argmin(st, t2, beta, gamma, u2):
    # v + lam + gamma*t2*(u2 + v - 2) + (t2/beta)*(v - v_k) = 0
    num = gamma * t2 * (B_RHS - u2) + (t2 / beta) * st["v"] - st["lam"]
    den = 1.0 + gamma * t2 + t2 / beta
    v2 = num / den
    y2 = (v2 + (t2 - 1.0) * st["y"]) / t2
    return v2, y2


def _v_first_prox(st, t2, beta, gamma, u2):
    lam_bar = st["lam"] + gamma * t2 * (u2 + st["v"] - B_RHS)
    s = beta / t2
    v2 = (st["v"] - s * lam_bar) / (1.0 + s)  # prox of y^2/2 at step s
    y2 = (v2 + (t2 - 1.0) * st["y"]) / t2
    return v2, y2


def _y_second_argmin(st, t2, beta, gamma, u2, ybar):
    eta = beta / (t2 * t2 + beta * (t2 - 1.0))  # mu_g = 1
    center = ybar - eta * (t2 - 1.0) * (ybar - st["y"])
    # y + lam + (y - center)/eta + gamma*t2^2*(y - y_k + (u2 + y_k - 2)/t2) = 0
    num = (center / eta + gamma * t2 * t2 * st["y"]
           - gamma * t2 * (u2 + st["y"] - B_RHS) - st["lam"])
    den = 1.0 + 1.0 / eta + gamma * t2 * t2
    y2 = num / den
    v2 = y2 + (t2 - 1.0) * (y2 - st["y"])
    return v2, y2


def _y_second_prox(st, t2, beta, gamma, u2, ybar):
    eta = beta / (t2 * t2 + beta * (t2 - 1.0))
    lam_bar = st["lam"] + gamma * t2 * (u2 + st["v"] - B_RHS)
    corr = (t2 - 1.0) * (ybar - st["y"]) + lam_bar
    y2 = (ybar - eta * corr) / (1.0 + eta)
    v2 = y2 + (t2 - 1.0) * (y2 - st["y"])
    return v2, y2


def step(st, variant, alpha, beta, gamma, cap_a=None):
    """One full iteration of the named variant; returns the new state dict."""
    t2 = schedule_next(st["t"], cap_a)
    xbar, ybar = _bars(st, t2)
    if variant in ("first_i", "first_ii", "hybrid_i_1", "hybrid_i_2"):
        u2, x2 = _u_first(st, t2, alpha, gamma, xbar)
    else:
        u2, x2 = _x_second(st, t2, alpha, gamma, xbar)
    if variant in ("first_i", "hybrid_ii_1"):
        v2, y2 = _v_first_argmin(st, t2, beta, gamma, u2)
    elif variant in ("first_ii", "hybrid_ii_2"):
        v2, y2 = _v_first_prox(st, t2, beta, gamma, u2)
    elif variant in ("second_i", "hybrid_i_1"):
        v2, y2 = _y_second_argmin(st, t2, beta, gamma, u2, ybar)
    else:  # second_ii, hybrid_i_2
        v2, y2 = _y_second_prox(st, t2, beta, gamma, u2, ybar)
    lam2 = st["lam"] + gamma * t2 * (u2 + v2 - B_RHS)
    return {
        "x": x2, "x_prev": st["x"], "y": y2, "y_prev": st["y"],
        "u": u2, "v": v2, "lam": lam2, "t": t2,
    }


def trajectory(variant, steps, alpha=1.0, beta=2.0, gamma=0.5, t1=1.0, cap_a=1.0):
    st = start_state(t1)
    out = [dict(st)]
    for _ in range(steps):
        st = step(st, variant, alpha, beta, gamma, cap_a)
        out.append(dict(st))
    return out


GOLDEN_FIRST_STEP = {
    "u": 1.0,
    "v": 0.2928932,
    "x": 0.7071068,
    "y": 0.2071068,
    "lam": -0.5,
}


if __name__ == "__main__":
    st = trajectory("first_i", 1)[-1]
    print("one step of the implicit-subgradient scheme with argmin v-update:")
    for key in ("u", "v", "x", "y", "lam"):
        print(f"  {key}2 = {st[key]:.10f}   (golden {GOLDEN_FIRST_STEP[key]})")
