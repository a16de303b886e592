import math

import numpy as np
import pytest

from aladmm.schedule import (
    ScheduleError,
    ScheduleRule,
    admissible_basic,
    admissible_strong,
    corollary_params,
    growth_lower_bound,
    init_state,
    next_t,
    t_values,
)

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def test_recurrence_first_step():
    st = init_state(ScheduleRule("recurrence", t1=1.0))
    assert st.t_k == 1.0
    assert st.t_next == pytest.approx(GOLDEN, abs=1e-10)


def test_sqrt_cap_first_step():
    st = init_state(ScheduleRule("sqrt_cap", t1=1.0, a=1.0))
    assert st.t_next == pytest.approx(math.sqrt(2.0), abs=1e-10)


def test_min_cap_takes_minimum():
    st = init_state(ScheduleRule("min_cap", t1=1.0, a=1.0))
    assert st.t_next == pytest.approx(math.sqrt(2.0), abs=1e-10)


def test_next_t_advances_index():
    rule = ScheduleRule("recurrence", t1=1.0)
    st = next_t(rule, init_state(rule))
    assert st.k == 2 and st.t_k == pytest.approx(GOLDEN)


def test_closed_form_families_pin_t1():
    assert t_values(ScheduleRule("linear_shift", alpha=3.0), 3) == pytest.approx([0.5, 1.0, 1.5])
    assert t_values(ScheduleRule("half_k"), 3) == pytest.approx([0.5, 1.0, 1.5])
    assert t_values(ScheduleRule("tseng"), 3) == pytest.approx([1.0, 1.5, 2.0])
    assert t_values(ScheduleRule("chambolle_dossal", alpha=3.0), 3) == pytest.approx([1.0, 1.5, 2.0])
    assert t_values(ScheduleRule("attouch_cabot", alpha=3.0), 3) == pytest.approx([0.0, 0.5, 1.0])


def test_next_t_can_require_t_ge_1():
    rule = ScheduleRule("attouch_cabot", alpha=5.0)  # t_2 = 0.25 < 1
    with pytest.raises(ScheduleError):
        next_t(rule, init_state(rule), require_t_ge_1=True)


def test_rule_parameter_validation():
    with pytest.raises(ScheduleError):
        ScheduleRule("recurrence", t1=0.5)
    with pytest.raises(ScheduleError):
        ScheduleRule("sqrt_cap", t1=1.0, a=0.0)
    with pytest.raises(ScheduleError):
        ScheduleRule("linear_shift", alpha=2.0)  # t_k = k - 1 would break admissibility
    with pytest.raises(ScheduleError):
        ScheduleRule("no_such_rule")


@pytest.mark.parametrize("rule", [
    ScheduleRule("recurrence", t1=1.0),
    ScheduleRule("min_cap", t1=1.0, a=1.0),
    ScheduleRule("sqrt_cap", t1=2.0, a=0.5),
    ScheduleRule("linear_shift", alpha=3.0),
    ScheduleRule("half_k"),
    ScheduleRule("tseng"),
    ScheduleRule("chambolle_dossal", alpha=4.0),
    ScheduleRule("attouch_cabot", alpha=3.0),
])
def test_all_families_basic_admissible(rule):
    ok, idx = admissible_basic(rule, 2000)
    assert ok, f"{rule.label()} violated at {idx}"


def test_half_k_margin_is_quarter():
    ts = t_values(ScheduleRule("half_k"), 50)
    slacks = [ts[k + 1] ** 2 - ts[k] ** 2 - ts[k + 1] for k in range(49)]
    assert np.allclose(slacks, -0.25)


def test_strong_admissibility_cases():
    ok, _ = admissible_strong(ScheduleRule("sqrt_cap", t1=1.0, a=0.7), 0.7, 2000)
    assert ok
    ok, _ = admissible_strong(ScheduleRule("min_cap", t1=1.0, a=0.7), 0.7, 2000)
    assert ok
    ok, idx = admissible_strong(ScheduleRule("recurrence", t1=1.0), 1.0, 100)
    assert not ok and idx == 1  # t2^2 - t1^2 = t2 > 1 * t1


def test_monotone_and_step_bound():
    for rule in (ScheduleRule("recurrence", t1=1.0), ScheduleRule("min_cap", t1=1.5, a=2.0)):
        ts = t_values(rule, 10_000)
        diffs = np.diff(ts)
        assert np.all(diffs >= -1e-14)
        assert np.all(diffs <= 1.0 + 1e-12)  # admissible rules step by at most one


def test_recurrence_saturates_equality():
    ts = t_values(ScheduleRule("recurrence", t1=1.0), 10_000)
    worst = max(
        abs(ts[k + 1] ** 2 - ts[k] ** 2 - ts[k + 1]) / max(1.0, ts[k + 1] ** 2)
        for k in range(len(ts) - 1)
    )
    assert worst <= 1e-10


def test_growth_lower_bounds_hand_values():
    assert growth_lower_bound(ScheduleRule("recurrence", t1=1.0), 5) == pytest.approx(3.0)
    # b = 2*1*1/(1+4) = 0.4, bound = 1 + 0.4*10 = 5
    assert growth_lower_bound(ScheduleRule("sqrt_cap", t1=1.0, a=1.0), 11) == pytest.approx(5.0)
    for rule in (ScheduleRule("recurrence", t1=1.3),
                 ScheduleRule("sqrt_cap", t1=1.3, a=0.5),
                 ScheduleRule("min_cap", t1=1.3, a=0.5)):
        assert growth_lower_bound(rule, 1) == pytest.approx(1.3)
    with pytest.raises(ScheduleError):
        growth_lower_bound(ScheduleRule("tseng"), 5)


@pytest.mark.parametrize("rule", [
    ScheduleRule("recurrence", t1=1.0),
    ScheduleRule("sqrt_cap", t1=1.0, a=1.0),
    ScheduleRule("min_cap", t1=2.0, a=1.7),
])
def test_growth_bounds_hold_over_horizon(rule):
    ts = t_values(rule, 10_000)
    for k in (1, 2, 10, 100, 1000, 9999):
        assert ts[k - 1] >= growth_lower_bound(rule, k) - 1e-9


def test_corollary_params_example():
    cp = corollary_params(L_f2=1.0, L_g2=0.0, mu_g=1.0, B_norm_sq=1.0)
    assert cp.t1 == pytest.approx(2.0)
    assert cp.alpha == pytest.approx(1.0)
    lo, hi = 1.5, 4e6
    assert lo < cp.beta <= hi
    assert cp.gamma > 0
    # re-verify all four optimal-rate conditions
    assert cp.t1 > max(1.0, math.sqrt(0.0 / 1.0))
    assert cp.alpha <= 1.0
    assert cp.beta > (1.0 + 1.0 / cp.t1) / 1.0
    assert cp.gamma < (cp.t1 * (cp.beta * 1.0 - 1.0) - 1.0) / ((cp.t1 + 1.0) * cp.beta * 1.0)


def test_corollary_params_t1_formula():
    cp = corollary_params(L_f2=1.0, L_g2=2.0, mu_g=1.0, B_norm_sq=1.0)
    assert cp.t1 == pytest.approx(3.0)  # sqrt(4) + 1
    assert cp.beta <= cp.t1 ** 2 / 2.0


def test_corollary_params_requires_strong_convexity():
    with pytest.raises(ScheduleError):
        corollary_params(1.0, 1.0, 0.0, 1.0)


def test_corollary_params_guards_zero_b():
    cp = corollary_params(L_f2=0.0, L_g2=1.0, mu_g=2.0, B_norm_sq=0.0)
    assert cp.alpha == 1.0 and cp.gamma > 0
