import json
import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st

from spanwork import graphs as gr, spanprog as sp
from spanwork.acceptance import acceptance_programs, or2_program, random_normalized_graph
from spanwork.boolfn import all_strings
from spanwork.compose import threshold_span_program
from spanwork.errors import BadKernelVector, Disconnected, NotNormalized

seeds = st.integers(0, 2 ** 32 - 1)


def kernel_mass(A, v, tol=1e-9):
    """Independent oracle: squared norm of the projection of v onto ker A."""
    K = sla.null_space(A, rcond=tol)
    return float(np.linalg.norm(K.conj().T @ v) ** 2) if K.size else 0.0


def test_or2_graph_shape_and_labels():
    G = gr.build_graph(or2_program())
    assert G.biadj.shape == (3, 3)
    assert G.t_labels == ("v0", "i0", "i1") and G.u_labels == ("out", "u0", "u1")
    assert G.output_vertex == 3
    assert G.input_vertices == {(0, 0): [], (0, 1): [1], (1, 0): [], (1, 1): [2]}
    A = G.adjacency
    assert np.allclose(A, A.conj().T)
    lines = G.export_edge_list().splitlines()
    head = json.loads(lines[0])
    assert head["output_vertex"] == "out" and head["inputs"]["1,1"] == ["i0"]
    assert len(lines) - 1 == np.count_nonzero(G.biadj)


def test_free_columns_have_no_identity_edge():
    P = sp.make_program(1, [1, 0], free=[[0, 1]], inputs={(1, 1): [[1, 1]]})
    G = gr.build_graph(P)
    assert G.biadj[2, 1] == 0 and G.biadj[3, 2] == 1


@given(seeds)
def test_zero_modes_match_kernel_oracle(seed):
    P = sp.random_program(np.random.default_rng(seed))
    for x in all_strings(P.n):
        G = gr.build_graph_x(P, x)
        A = G.adjacency
        e = np.zeros(A.shape[0])
        e[G.output_vertex] = 1
        mass = kernel_mass(A, e)
        rep = gr.spectral_report(G)
        assert rep.symmetric_defect < 1e-9
        if sp.evaluate(P, x):
            z = gr.zero_witness_true(P, x)
            assert z.residual < 1e-8 * max(1.0, np.linalg.norm(z.psi))
            assert mass >= z.plain_ratio * (1 - 1e-6)
            assert rep.cumulative(0) == pytest.approx(mass, abs=1e-6)
        else:
            z = gr.zero_witness_false(P, x)
            assert z.residual < 1e-8 * max(1.0, np.linalg.norm(z.psi))
            assert mass < 1e-8
            assert rep.cumulative(0) < 1e-8


def test_true_zero_mode_ratio_on_or2():
    z = gr.zero_witness_true(or2_program(), "11")
    assert z.ratio == pytest.approx(1 / 1.5)


@given(seeds, st.floats(1e-3, 0.5))
def test_witnessed_gap_bound(seed, upsilon):
    P = sp.random_program(np.random.default_rng(seed))
    for x in all_strings(P.n):
        if not sp.evaluate(P, x):
            chk = gr.effective_gap_check(P, x, upsilon=upsilon, mode="witnessed")
            assert chk.passed, chk


@pytest.mark.parametrize("name", sorted(acceptance_programs()))
@pytest.mark.parametrize("c", [0.05, 0.125, 0.25])
def test_blackbox_gap_bound(name, c):
    P = acceptance_programs()[name]
    for x in all_strings(P.n):
        if not sp.evaluate(P, x):
            chk = gr.effective_gap_check(P, x, c=c)
            assert chk.passed and chk.W > 0, chk


def test_witnessed_parameters_on_or2():
    W1, W2 = gr.witnessed_parameters(or2_program())
    assert W1 == pytest.approx(1.0)
    # w' = 1 gives ‖w'‖² + ‖A†w'‖² = 1 + 2
    assert W2 == pytest.approx(3.0)


@given(seeds, st.floats(1e-3, 1.0))
def test_psd_support_bound(seed, lam):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 8))
    phi = rng.normal(size=d) + 1j * rng.normal(size=d)
    B = rng.normal(size=(d, d - 1)) + 1j * rng.normal(size=(d, d - 1))
    B -= np.outer(phi, phi.conj() @ B) / np.vdot(phi, phi)
    X = B @ B.conj().T
    t = rng.normal(size=d) + 1j * rng.normal(size=d)
    out = gr.psd_squared_support_check(X, t, phi, lam)
    assert out["passed"], out
    xi = rng.normal(size=d) + 1j * rng.normal(size=d)
    assert gr.psd_lemma_gap(X, t, out["delta"], xi) >= -1e-8 * np.linalg.norm(xi) ** 2 * (1 + np.linalg.norm(X, 2))


def test_psd_rejects_non_kernel_vector():
    with pytest.raises(BadKernelVector):
        gr.psd_squared_support_check(np.eye(2), [1, 0], [1, 0], 0.1)


@given(seeds, st.sampled_from(["full", "edge"]))
def test_szegedy_operators(seed, space):
    A = random_normalized_graph(np.random.default_rng(seed))
    ops = gr.szegedy_from_adjacency(A, space)
    U = ops.U_op
    assert np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=1e-10)
    assert np.allclose(ops.M_op, A, atol=1e-10)
    assert np.allclose(ops.T_op.conj().T @ ops.T_op, np.eye(A.shape[0]), atol=1e-10)
    for rho, lam, vec in gr.szegedy_eigenpairs(ops):
        if abs(abs(rho) - 1) > 1e-9:
            assert np.linalg.norm(U @ vec - lam * vec) < 1e-9
            assert np.linalg.norm(vec) == pytest.approx(math.sqrt(2 * (1 - rho * rho)), abs=1e-9)


def test_szegedy_hypothesis_errors():
    A = np.array([[0, 2], [2, 0]], dtype=complex)
    with pytest.raises(NotNormalized):
        gr.szegedy_from_adjacency(A)
    A = np.zeros((3, 3), dtype=complex)
    A[0, 1] = A[1, 0] = 1
    with pytest.raises(Disconnected):
        gr.szegedy_from_adjacency(A)


@pytest.mark.parametrize("x", all_strings(3))
def test_switched_walk_has_x_dependent_discriminant(x):
    P = threshold_span_program(2, 3)
    G = gr.build_graph(P)
    ops = gr.szegedy_operators(G, x, normalize=True)
    Gx = gr.build_graph_x(P, x)
    keep = ops.vertices
    Ax = Gx.adjacency[np.ix_(keep, keep)] / ops.scale
    sw = set(gr.switched_vertices(G, x))
    D = np.diag([1.0 if v in sw else 0.0 for v in keep])
    assert np.allclose(ops.M_op, Ax + D, atol=1e-10)
    U = ops.U_op
    assert np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=1e-10)


@given(seeds)
def test_bipartite_spectrum_pairs_probe_mass(seed):
    P = sp.random_program(np.random.default_rng(seed))
    G = gr.build_graph(P)
    rep = gr.spectral_report(G)
    ev, ov = rep.eigenvalues, rep.overlaps
    for rho in ev[ev > 1e-6]:
        plus = ov[np.abs(ev - rho) < 1e-7].sum()
        minus = ov[np.abs(ev + rho) < 1e-7].sum()
        assert plus == pytest.approx(minus, abs=1e-8)


@given(seeds)
def test_szegedy_invariant_subspaces(seed):
    rng = np.random.default_rng(seed)
    A = random_normalized_graph(rng)
    ops = gr.szegedy_from_adjacency(A, "edge")
    T, S = ops.T_op, ops.S_op
    ev, V = np.linalg.eigh(ops.M_op)
    blocks = [np.column_stack([T @ a, S @ T @ a]) for a in V.T]
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            assert np.abs(blocks[i].conj().T @ blocks[j]).max() < 1e-10
    psi = rng.normal(size=A.shape[0]) + 1j * rng.normal(size=A.shape[0])
    alpha = dict(zip(range(len(ev)), V.T))
    for rho, lam, vec in gr.szegedy_eigenpairs(ops):
        if abs(abs(rho) - 1) < 1e-9:
            continue
        k = int(np.argmin(np.abs(ev - rho)))
        if np.sum(np.abs(ev - rho) < 1e-9) > 1:
            continue  # degenerate: α is not unique
        lhs = abs(np.vdot(T @ psi, vec)) ** 2 / np.vdot(vec, vec).real
        assert lhs == pytest.approx(abs(np.vdot(psi, alpha[k])) ** 2 / 2, rel=1e-8, abs=1e-10)
