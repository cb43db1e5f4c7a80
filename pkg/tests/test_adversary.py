import math

import numpy as np
import pytest
import scipy.sparse as sps
from hypothesis import given, settings, strategies as st

from spanwork import adversary as adv, boolfn as bf, spanprog as sp
from spanwork.errors import (BadDistribution, EmptyFalseSet, InfeasibleGram, InvalidAdversaryMatrix,
                             NotSymmetric)

TOL = 1e-4


def random_fn(n):
    return st.text("01", min_size=2 ** n, max_size=2 ** n).map(lambda b: bf.from_truth_string(n, b))


def test_generic_sdp_finds_min_eigenvalue():
    C = np.array([[2.0, 1.0], [1.0, 3.0]])
    prob = adv.SDPProblem(sizes=[2], C=[C], A_eq=sps.csr_matrix(np.eye(2).reshape(1, 4, order="F")),
                          b_eq=np.array([1.0]))
    res = adv.solve_sdp(prob)
    assert res.value == pytest.approx(np.linalg.eigvalsh(C)[0], abs=1e-6)
    assert abs(res.gap) < 1e-5
    assert res.psd_violation < 1e-7


@pytest.mark.parametrize("f,value", [
    (bf.threshold(1, 2), math.sqrt(2)),
    (bf.threshold(2, 2), math.sqrt(2)),
    (bf.threshold(1, 4), 2.0),
    (bf.parity(2), 2.0),
    (bf.parity(3), 3.0),
    (bf.threshold(2, 3), 2.0),
    (bf.identity(), 1.0),
])
def test_known_adversary_values(f, value):
    assert adv.solve_adv_dual(f)[0] == pytest.approx(value, abs=TOL)
    v, g = adv.solve_advpm_dual(f)
    assert v == pytest.approx(value, abs=TOL)
    assert g.objective == pytest.approx(value, abs=TOL)
    assert g.feasibility_residual < TOL


def test_costs_scale_values():
    f = bf.threshold(1, 2)
    assert adv.solve_advpm_dual(f, [3, 3])[0] == pytest.approx(3 * math.sqrt(2), abs=TOL)
    # one free-ish bit: OR with costs (1, 4) gives sqrt(1 + 16)
    assert adv.solve_adv_dual(f, [1, 4])[0] == pytest.approx(math.sqrt(17), abs=1e-3)


def test_constant_functions_are_zero():
    f = bf.constant(3, 1)
    assert adv.solve_adv_dual(f)[0] == 0.0
    v, g = adv.solve_advpm_dual(f)
    assert v == 0.0 and g.m == 0
    with pytest.raises(EmptyFalseSet):
        adv.span_program_from_gram(f, g)


@settings(max_examples=12)
@given(random_fn(3))
def test_adv_below_advpm_and_program_attains_it(f):
    a = adv.solve_adv_dual(f)[0]
    v, g = adv.solve_advpm_dual(f)
    assert a <= v + TOL
    if f.is_constant:
        return
    P = adv.span_program_from_gram(f, g)
    assert sp.is_canonical(P)
    for x in bf.all_strings(3):
        assert sp.evaluate(P, x) == f(x)
    assert sp.witness_size(P) == pytest.approx(v, abs=1e-3)


def test_gram_from_program_round_trip():
    f = bf.threshold(2, 3)
    v, g = adv.solve_advpm_dual(f)
    P = adv.span_program_from_gram(f, g)
    h = adv.gram_from_span_program(P)
    assert h.feasibility_residual < 1e-6
    assert h.objective == pytest.approx(sp.witness_size(P), rel=1e-6)


def test_infeasible_gram_rejected():
    f = bf.threshold(1, 2)
    vecs = {(x, j): np.ones(1) for x in f.domain for j in range(2)}
    g = adv.GramSolution(f, 1, vecs, (1.0, 1.0))
    with pytest.raises(InfeasibleGram):
        adv.span_program_from_gram(f, g)


def test_compose_gram_solutions_multiplies_objectives():
    and2 = bf.threshold(2, 2)
    v, g = adv.solve_advpm_dual(and2)
    vo, go = adv.solve_advpm_dual(and2, [v, v])
    h = adv.compose_gram_solutions(go, [g, g])
    assert h.f == bf.compose(and2, [and2, and2])
    assert h.feasibility_residual < TOL
    assert h.objective == pytest.approx(2.0, abs=TOL)


def test_adversary_matrix_validation():
    f = bf.threshold(1, 2)
    with pytest.raises(InvalidAdversaryMatrix):
        adv.AdversaryMatrix(f, np.ones((4, 4)))
    with pytest.raises(InvalidAdversaryMatrix):
        adv.AdversaryMatrix(f, np.zeros((3, 3)))
    G = np.zeros((4, 4))
    G[0, 1:] = G[1:, 0] = 1
    out = adv.adv_primal_value(adv.AdversaryMatrix(f, G))
    assert out["norm"] == pytest.approx(math.sqrt(3))
    assert out["feasible"] is False
    assert out["lower_bound"] == pytest.approx(math.sqrt(3) / math.sqrt(2))


@pytest.mark.parametrize("l,m,n", [(1, 2, 3), (1, 2, 4), (2, 3, 5), (0, 1, 3), (1, 3, 5)])
def test_interval_matrix_and_closed_form(l, m, n):
    G = adv.interval_adversary_matrix(l, m, n)
    pv = adv.adv_primal_value(G)
    assert pv["nonnegative"]
    closed = adv.interval_adv_closed_form(l, m, n)
    assert pv["lower_bound"] == pytest.approx(closed, rel=1e-6)
    f = bf.interval(l, m, n)
    assert adv.solve_adv_dual(f)[0] == pytest.approx(closed, abs=1e-3)
    up = adv.symmetric_adv_upper(f, adv.interval_dual_distribution(l, m, n))
    assert up == pytest.approx(closed, rel=1e-6)


def test_closed_form_mirror():
    assert adv.interval_adv_closed_form(1, 3, 4) == pytest.approx(adv.interval_adv_closed_form(1, 3, 4))
    assert adv.interval_adv_closed_form(2, 4, 5) == pytest.approx(adv.interval_adv_closed_form(1, 3, 5))


def test_symmetric_upper_errors():
    with pytest.raises(NotSymmetric):
        adv.symmetric_adv_upper(bf.projection(2, 0), [0, 0.5, 0.5])
    with pytest.raises(BadDistribution):
        adv.symmetric_adv_upper(bf.threshold(1, 2), [0.1, 0.5, 0.5])
    with pytest.raises(BadDistribution):
        adv.symmetric_adv_upper(bf.threshold(1, 2), [0, 0.5])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_sign_degree(n):
    par = adv.sign_degree(bf.parity(n))
    assert par.degree == n
    assert par.margin(bf.parity(n)) >= 1 - 1e-7
    a = adv.sign_degree(bf.threshold(n, n))
    assert a.degree == 1
    assert a.margin(bf.threshold(n, n)) >= 1 - 1e-7
