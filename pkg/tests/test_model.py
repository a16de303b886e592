import numpy as np
import pytest

from aladmm.model import (
    ModelError,
    SaddleReference,
    box_prox,
    check_saddle,
    elastic_net_prox,
    feasibility,
    instance_from_json,
    instance_to_json,
    l1_prox,
    lagrangian,
    squared_prox,
    validate_prox_term,
    validate_smooth_term,
    zero_prox,
    zero_smooth,
    least_squares_smooth,
)
from aladmm.problems import scalar_p0


@pytest.fixture
def p0():
    return scalar_p0()


def test_lagrangian_hand_values(p0):
    inst, _ = p0
    assert lagrangian(inst, [0.0], [0.0], [-1.0]) == pytest.approx(2.0)
    assert lagrangian(inst, [1.0], [1.0], [-1.0]) == pytest.approx(1.0)
    # lam = 0 reduces to f + g
    assert lagrangian(inst, [3.0], [2.0], [0.0]) == pytest.approx(4.5 + 2.0)


def test_lagrangian_dimension_mismatch(p0):
    inst, _ = p0
    with pytest.raises(ModelError):
        lagrangian(inst, [0.0, 0.0], [0.0], [0.0])


def test_feasibility_values(p0):
    inst, _ = p0
    assert feasibility(inst, [0.0], [0.0]) == pytest.approx(2.0)
    assert feasibility(inst, [1.0], [1.0]) == pytest.approx(0.0)
    assert feasibility(inst, [0.70711], [0.20711]) == pytest.approx(1.08578, abs=1e-5)


def test_check_saddle_accepts_true_reference(p0):
    inst, ref = p0
    report = check_saddle(inst, ref, samples=100, seed=0)
    assert report.violations == [] and report.ok


def test_check_saddle_flags_wrong_reference(p0):
    inst, _ = p0
    bad = SaddleReference([0.0], [0.0], [0.0])
    report = check_saddle(inst, bad, samples=100, seed=0)
    assert len(report.violations) >= 1
    assert report.feasibility_residual == pytest.approx(2.0)


def test_check_saddle_zero_samples(p0):
    inst, ref = p0
    assert check_saddle(inst, ref, samples=0).violations == []


def test_soft_threshold_values():
    term = l1_prox(1.0)
    assert term.prox(1.0, np.array([2.0]))[0] == pytest.approx(1.0)
    y = np.array([2.0, -0.5, 0.2])
    expected = np.sign(y) * np.maximum(np.abs(y) - 0.75, 0.0)
    assert np.allclose(term.prox(0.75, y), expected)


def test_quadratic_prox_value():
    term = squared_prox(1.0)
    assert term.prox(1.0, np.array([2.0]))[0] == pytest.approx(1.0)
    assert term.strong_convexity == 1.0


def test_elastic_net_prox_closed_form():
    term = elastic_net_prox(0.5, 2.0)
    y = np.array([3.0, -0.1])
    s = 0.4
    expected = np.sign(y) * np.maximum(np.abs(y) - s * 0.5, 0.0) / (1.0 + s * 2.0)
    assert np.allclose(term.prox(s, y), expected)


def test_box_prox_clips():
    term = box_prox(-1.0, 1.0)
    assert np.allclose(term.prox(0.3, np.array([2.0, -3.0, 0.5])), [1.0, -1.0, 0.5])
    assert term.value(np.array([0.5])) == 0.0
    assert term.value(np.array([2.0])) == np.inf


@pytest.mark.parametrize("term,dim", [
    (l1_prox(0.7), 4),
    (squared_prox(1.3), 4),
    (elastic_net_prox(0.5, 0.8), 4),
    (zero_prox(), 3),
])
def test_prox_catalog_subgradient_and_nonexpansive(term, dim):
    assert validate_prox_term(term, dim, samples=300, seed=1) == []


def test_box_prox_sampled_properties():
    assert validate_prox_term(box_prox(-2.0, 2.0), 3, samples=300, seed=2) == []


def test_smooth_term_inequalities_hold():
    rng = np.random.default_rng(0)
    C = rng.standard_normal((5, 4))
    term = least_squares_smooth(C, rng.standard_normal(5))
    assert validate_smooth_term(term, 4, samples=1000, seed=3) == []
    assert validate_smooth_term(zero_smooth(), 4, samples=100, seed=3) == []


def test_smooth_term_understated_lipschitz_detected():
    rng = np.random.default_rng(1)
    C = rng.standard_normal((4, 4))
    good = least_squares_smooth(C, np.zeros(4))
    lying = type(good)(value=good.value, gradient=good.gradient,
                       lipschitz=good.lipschitz / 10.0, kind="custom")
    assert validate_smooth_term(lying, 4, samples=500, seed=4) != []


def test_instance_json_round_trip(p0):
    inst, ref = p0
    text = instance_to_json(inst, ref)
    inst2, ref2 = instance_from_json(text)
    assert inst2.m == 1 and inst2.n == 1 and inst2.p == 1
    assert np.array_equal(inst2.A, inst.A) and np.array_equal(inst2.b, inst.b)
    assert np.array_equal(ref2.lambda_star, ref.lambda_star)
    x = np.array([0.3])
    assert inst2.f(x) == pytest.approx(inst.f(x))
    assert inst2.g(x) == pytest.approx(inst.g(x))
    assert inst2.y_block.prox_term.strong_convexity == 1.0


def test_instance_json_rejects_custom_oracles(p0):
    inst, _ = p0
    from aladmm.model import CompositeBlock, ProblemInstance, ProxTerm

    custom = ProxTerm(value=lambda x: 0.0, prox=lambda s, y: y, kind="custom")
    weird = ProblemInstance(
        x_block=CompositeBlock(prox_term=custom, smooth_term=zero_smooth()),
        y_block=inst.y_block, A=inst.A, B=inst.B, b=inst.b,
    )
    with pytest.raises(ModelError):
        instance_to_json(weird)


def test_dimension_validation():
    from aladmm.model import CompositeBlock, ProblemInstance

    with pytest.raises(ModelError):
        ProblemInstance(
            x_block=CompositeBlock(zero_prox(), zero_smooth()),
            y_block=CompositeBlock(zero_prox(), zero_smooth()),
            A=np.ones((2, 1)), B=np.ones((1, 1)), b=np.ones(1),
        )
