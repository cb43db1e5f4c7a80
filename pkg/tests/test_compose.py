import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spanwork import compose as cp, spanprog as sp
from spanwork.boolfn import all_strings, interval, threshold
from spanwork.errors import ArityMismatch, BadParams

METHODS = ["direct_sum", "tensor", "reduced_tensor"]


def case(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(1, 3)), int(rng.integers(1, 3))
    P = sp.random_program(rng, n=n, dim=int(rng.integers(1, 4)), num_inputs=int(rng.integers(1, 5)))
    inner = [sp.random_program(rng, n=m, dim=int(rng.integers(1, 4)), num_inputs=int(rng.integers(1, 5)))
             for _ in range(n)]
    return rng, P, inner, m


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(METHODS))
def test_composed_program_computes_composed_function(seed, method):
    _, P, inner, m = case(seed)
    Q = cp.compose_programs(P, inner, method)
    for x in all_strings(m):
        y = "".join(str(sp.evaluate(R, x)) for R in inner)
        assert sp.evaluate(Q, x) == sp.evaluate(P, y)


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(METHODS))
def test_witness_size_bounded_by_weighted_outer(seed, method):
    rng, P, inner, m = case(seed)
    s = rng.uniform(0.5, 2.0, m)
    r = np.array([max(sp.witness_size(R, None, s), sp.witness_size(sp.dualize(R), None, s)) for R in inner])
    bound = sp.witness_size(P, None, r)
    assert sp.witness_size(cp.compose_programs(P, inner, method), None, s) <= bound * (1 + 1e-7) + 1e-8


@given(st.integers(0, 2 ** 32 - 1))
def test_reduced_tensor_matches_tensor_sizes(seed):
    _, P, inner, m = case(seed)
    T = cp.compose_programs(P, inner, "tensor")
    R = cp.compose_programs(P, inner, "reduced_tensor")
    assert R.dim <= T.dim
    for x in all_strings(m):
        assert sp.wsize_x(R, x) == pytest.approx(sp.wsize_x(T, x), rel=1e-5, abs=1e-7)


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["direct_sum", "tensor"]))
def test_proof_witnesses_are_valid(seed, method):
    _, P, inner, m = case(seed)
    comp = cp.compose_programs(P, inner, method, with_index=True)
    Q = comp.program
    for x in all_strings(m):
        if sp.evaluate(Q, x):
            w = cp.proof_true_witness(comp, x)
            assert np.allclose(Q.A @ w, Q.target, atol=1e-7)
            assert np.all(w[~Q.available(x)] == 0)
            assert cp.weighted_norm2(Q, w) >= sp.wsize_x(Q, x) * (1 - 1e-7) - 1e-9
        else:
            u = cp.proof_false_witness(comp, x)
            assert np.vdot(Q.target, u) == pytest.approx(1, abs=1e-7)
            assert np.allclose((Q.A.conj().T @ u)[Q.available(x)], 0, atol=1e-7)


def test_mapping_inner_and_arity_errors():
    P = cp.and_gate([1, 1], [1, 1])
    leaf = cp.leaf_program(1, 0)
    with pytest.raises(ArityMismatch):
        cp.compose_programs(P, [leaf])
    with pytest.raises(ArityMismatch):
        cp.compose_programs(P, [leaf, cp.leaf_program(2, 0)])
    with pytest.raises(BadParams):
        cp.compose_programs(P, [leaf, leaf], "bogus")


def test_gates():
    A = cp.and_gate([1, 2, 3], [1, 1, 1])
    O = cp.or_gate(1.0, [1, 1, 1])
    for x in all_strings(3):
        assert sp.evaluate(A, x) == int(x == "111")
        assert sp.evaluate(O, x) == int("1" in x)
    with pytest.raises(BadParams):
        cp.and_gate([1, -1], [1, 1])


@pytest.mark.parametrize("tree", [
    ["and", 1, 2],
    ["or", ["and", 1, 2], ["and", 3, 4]],
    ["and", ["or", 1, 2], ["not", 3], 4],
    ["or", 1, ["and", 2, ["or", 3, 4]]],
])
def test_read_once_formulas_have_wsize_root_of_leaves(tree):
    P = cp.formula_span_program(tree)
    n = cp.formula_arity(tree)
    for x in all_strings(n):
        assert sp.evaluate(P, x) == cp.evaluate_formula(tree, x)
    assert sp.witness_size(P) == pytest.approx(math.sqrt(len(cp.formula_leaves(tree))), rel=1e-6)


@pytest.mark.parametrize("bad", [[], ["xor", 1, 2], ["not", 1, 2], ["and", 1], [0], ["and", 1, True]])
def test_check_formula_rejects(bad):
    with pytest.raises(BadParams):
        cp.check_formula(bad)


@pytest.mark.parametrize("l,n", [(1, 1), (1, 4), (2, 3), (2, 4), (3, 5), (4, 4)])
def test_threshold_program(l, n):
    P = cp.threshold_span_program(l, n)
    f = threshold(l, n)
    mt, mf = sp.side_maxima(P)
    for x in all_strings(n):
        assert sp.evaluate(P, x) == f(x)
    assert mt <= 1 + 1e-9
    assert mf <= l * (n - l + 1) + 1e-9
    B = cp.threshold_span_program(l, n, balanced=True)
    assert sp.witness_size(B) <= math.sqrt(l * (n - l + 1)) + 1e-9


@pytest.mark.parametrize("l,m,n", [(1, 2, 3), (1, 2, 4), (2, 3, 5), (0, 1, 3), (0, 2, 4), (1, 3, 5)])
def test_interval_program(l, m, n):
    P = cp.interval_span_program(l, m, n)
    f = interval(l, m, n)
    for x in all_strings(n):
        assert sp.evaluate(P, x) == f(x)
    assert sp.witness_size(P) <= cp.interval_bound(l, m, n) + 1e-9


def test_interval_orientation_is_enforced():
    with pytest.raises(BadParams):
        cp.interval_span_program(2, 4, 4)
