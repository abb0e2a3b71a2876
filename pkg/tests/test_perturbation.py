import math

import numpy as np
import pytest

from coreep import ensembles
from coreep.errors import NotARankJump, PremiseViolated, ShapeMismatch
from coreep.fixtures import comparison_pair, load_pair
from coreep.geninv import core_ep_inverse
from coreep.linalg import spectral_norm
from coreep.perturbation import (
    PerturbationPair,
    bound_case1,
    bound_case2,
    bound_case3,
    classify,
    epsilon_poly,
    exact_relative_error,
    lower_bound_rank_jump,
    perturbation_report,
)

from conftest import cnormal


@pytest.mark.parametrize(
    "name, flags",
    [
        ("range_inclusion_pair", (True, False, False)),
        ("projector_pair", (False, True, True)),
        ("rank_pair", (False, False, True)),
    ],
)
def test_classify_examples(name, flags):
    p = classify(*load_pair(name))
    assert (p.case1, p.case2, p.case3) == flags


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        classify(np.eye(2), np.eye(3))


@pytest.mark.parametrize("h", [1, 2, 3, 5])
def test_epsilon_poly_closed_form(rng, h):
    a, e = cnormal(rng, 4, 4), 0.1 * cnormal(rng, 4, 4)
    na, ne = spectral_norm(a), spectral_norm(e)
    assert epsilon_poly(a, e, h) == pytest.approx((na + ne) ** h - na**h, rel=1e-12)
    diff = np.linalg.matrix_power(a + e, h) - np.linalg.matrix_power(a, h)
    assert spectral_norm(diff) <= epsilon_poly(a, e, h) * (1 + 1e-12)


def test_epsilon_poly_examples():
    a = np.diag([1.0, 0.0])
    assert epsilon_poly(a, np.diag([0.1, 0.0]), 1) == pytest.approx(0.1)
    assert epsilon_poly(a, np.diag([0.1, 0.0]), 2) == pytest.approx(0.21)
    assert all(epsilon_poly(a, np.zeros((2, 2)), h) == 0 for h in range(1, 5))


def test_case1_example_premise_violated():
    a, e = load_pair("range_inclusion_pair")
    with pytest.raises(PremiseViolated) as info:
        bound_case1(a, e)
    assert info.value.report.premises["||A^c E||"] == pytest.approx(1.0)


def test_case1_half_perturbation():
    a, e = load_pair("range_inclusion_pair")
    b32, b33 = bound_case1(a, e / 2)
    assert b32.premises["||A^c E||"] == pytest.approx(0.5)
    assert b32.value == pytest.approx(1.0)
    assert b32.extras["closed_form_defect"] <= 1e-10
    assert b32.exact <= b32.value + 1e-12
    assert b33.name == "bound_3_3"


@pytest.mark.parametrize("fn", [bound_case1, bound_case2])
def test_zero_perturbation_bounds(fn):
    a = np.diag([2.0, 1.0, 0.0])
    rep = fn(a, np.zeros((3, 3)))[0]
    assert rep.value == 0.0 and rep.exact == 0.0


def test_zero_perturbation_exact():
    assert exact_relative_error(np.diag([2.0, 0.0]), np.zeros((2, 2))) == 0.0


def test_case2_projector_pair():
    a, e = load_pair("projector_pair")
    b35, b36 = bound_case2(a, e)
    assert b35.applicable
    assert b35.exact <= b35.value + 1e-12
    assert b35.extras["||(A+E)^c||"] <= b35.extras["norm_bound"] + 1e-12


def test_case2_rejects_rank_pair():
    with pytest.raises(PremiseViolated):
        bound_case2(*comparison_pair(0.1))


@pytest.mark.parametrize(
    "eps, value",
    [(0.1, math.sqrt(2) * 0.1 / (1 - math.sqrt(2) * 0.1)), (1e-4, 1.41441e-4)],
)
def test_case2_formula_on_comparison_pair(eps, value):
    rep = bound_case2(*comparison_pair(eps), check_premise=False)[0]
    assert rep.value == pytest.approx(value, rel=1e-5)
    assert any("evaluated without" in n for n in rep.notes)


@pytest.mark.parametrize("eps", [0.1, 0.01, 0.001, 1e-4])
def test_case3_leading_term(eps):
    b37, b312 = bound_case3(*comparison_pair(eps))
    assert b312.premises["C(A)"] == pytest.approx(5.0, rel=1e-14)
    assert b312.value == pytest.approx(5 * math.sqrt(2) * eps, rel=1e-12)
    assert b37.applicable and b37.exact <= b37.value


def test_case3_premise_fails_on_rank_change():
    a, e = load_pair("range_inclusion_pair")
    with pytest.raises(PremiseViolated):
        bound_case3(a, e)


@pytest.mark.parametrize("eps, exact", [(0.1, 1 / 11), (0.01, 1 / 101), (1e-3, 1 / 1001)])
def test_exact_relative_error_comparison_pair(eps, exact):
    assert exact_relative_error(*comparison_pair(eps)) == pytest.approx(exact, rel=1e-10)


@pytest.mark.parametrize("eps", [0.5, 1e-3, 1e-8])
def test_lower_bound_scalar(eps):
    rep = lower_bound_rank_jump(np.zeros((1, 1)), np.array([[eps]]))
    assert rep.value == pytest.approx(1 / eps)
    assert rep.exact == pytest.approx(1 / eps)


def test_lower_bound_index_one():
    d = 1e-3
    rep = lower_bound_rank_jump(np.diag([1.0, 0.0]), np.diag([0.0, d]))
    assert rep.value == pytest.approx(1 / d)
    assert rep.exact >= rep.value - 1e-10


def test_lower_bound_projector_pair_reversed_is_not_a_jump():
    # Reversing the roles raises the index of A + E to 2, where the ranks agree.
    a, e = load_pair("projector_pair")
    with pytest.raises(NotARankJump):
        lower_bound_rank_jump(a + e, -e)


def test_lower_bound_equal_rank():
    with pytest.raises(NotARankJump):
        lower_bound_rank_jump(*comparison_pair(0.1))


@pytest.mark.parametrize("seed", range(5))
def test_case1_random_closed_form(seed):
    r = np.random.default_rng(seed)
    c, e = ensembles.case1_pair(r, 7, 2, strength=0.4)
    b32, _ = bound_case1(c.A, e)
    assert b32.extras["closed_form_defect"] <= 1e-9 * spectral_norm(c.core_ep)
    assert b32.exact <= b32.value + 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_case2_implies_case3(seed):
    r = np.random.default_rng(seed)
    c, e = ensembles.case2_pair(r, 8, 3)
    p = classify(c.A, e)
    assert p.case2 and p.case3


def test_pair_object_accepted():
    pp = PerturbationPair(*comparison_pair(0.1))
    assert bound_case3(pp)[1].value == pytest.approx(0.5 * math.sqrt(2))


def test_report_contains_every_bound():
    rep = perturbation_report(*load_pair("rank_pair"))
    names = [b["name"] for b in rep["bounds"]]
    assert names == ["bound_3_2", "bound_3_3", "bound_3_5", "bound_3_6", "bound_3_7", "bound_3_12", "lower_3_8"]
    applicable = {b["name"]: b["applicable"] for b in rep["bounds"]}
    assert applicable["bound_3_12"] and not applicable["bound_3_2"]
    assert rep["profile"]["case3"]


def test_report_zero_perturbation():
    rep = perturbation_report(np.diag([1.0, 2.0, 0.0]), np.zeros((3, 3)))
    assert rep["exact_relative_error"] == 0.0
    for b in rep["bounds"]:
        if b["applicable"] and b["name"] != "bound_3_7":
            assert b["value"] == 0.0


def test_bound_3_7_is_a_norm_bound():
    a, e = load_pair("rank_pair")
    b37, _ = bound_case3(a, e)
    assert b37.exact == pytest.approx(spectral_norm(core_ep_inverse(a + e).X))
