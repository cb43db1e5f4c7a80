import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import binom

from spanwork import graphs as gr, spanprog as sp, walksim as ws
from spanwork.acceptance import acceptance_programs, or2_program
from spanwork.boolfn import all_strings, threshold
from spanwork.errors import BadParams, HypothesisViolation

PROGRAMS = acceptance_programs()


def exact_time_average(rho, ov, M, tau):
    """Closed-form mean of the continuous-walk kernel over t in [0, tau]."""
    k = np.arange(1, M)
    return sum(o * (M + 2 * np.sum((M - k) * np.sinc(tau * r * k / M / np.pi))) / M ** 2
               for r, o in zip(rho, ov))


def prepared(name):
    P = PROGRAMS[name]
    Pp, W = gr.blackbox_program(P)
    return P, gr.build_graph(Pp), W


@pytest.mark.parametrize("kw", [dict(epsilon=0), dict(epsilon=1.5), dict(lam=-1.0), dict(mode="x"),
                                dict(quadrature="simpson"), dict(samples=0)])
def test_config_validation(kw):
    with pytest.raises(BadParams):
        ws.WalkConfig(**kw).validate()


def test_hypothesis_check_rejects_non_unit_input_edge():
    G = gr.build_graph(or2_program())
    B = np.array(G.biadj)
    B[1, 1] = 2.0
    bad = gr.BipartiteGraph(G.t_labels, G.u_labels, B, G.output_index, G.input_vertex_map)
    with pytest.raises(HypothesisViolation):
        ws.check_hypotheses(bad)
    with pytest.raises(HypothesisViolation):
        ws.check_hypotheses(gr.BipartiteGraph(G.t_labels, G.u_labels, G.biadj, None, {}))


def test_oracle_unitaries_are_signed_diagonals():
    G = gr.build_graph(or2_program())
    O, Ot = ws.oracle_unitaries(G, "10")
    assert np.allclose(np.diag(O), [1, -1, 1, 1])  # index 2j + b
    m = G.num_vertices
    d = np.diag(Ot).reshape(m, m)
    assert np.all(d[1] == -1) and np.all(d[np.arange(m) != 1] == 1)


@pytest.mark.parametrize("name", sorted(PROGRAMS))
def test_spectral_mode_matches_graph_prediction(name):
    P, G, W = prepared(name)
    cfg = ws.WalkConfig(epsilon=0.5, lam=1 / (8 * W))
    for x in all_strings(P.n):
        r = ws.run_discrete(G, x, cfg)
        assert r.accept_probability == pytest.approx(r.predicted, abs=1e-8)
        assert r.details["schur_offdiag"] < 1e-8
        thr = 3 * cfg.epsilon / 4
        assert (r.accept_probability >= thr) == bool(sp.evaluate(P, x))


@pytest.mark.parametrize("name", ["or2", "interval(1,2,3)"])
def test_circuit_mode_within_precision_of_spectral(name):
    P, G, W = prepared(name)
    for x in all_strings(P.n):
        spec = ws.run_discrete(G, x, ws.WalkConfig(epsilon=0.5, lam=1 / (8 * W)))
        circ = ws.run_discrete(G, x, ws.WalkConfig(mode="circuit", epsilon=0.5, lam=1 / (8 * W)))
        assert circ.details["register_norm"] == pytest.approx(1.0, abs=1e-9)
        assert abs(circ.accept_probability - spec.accept_probability) <= 2 * spec.details["delta_e"]
        assert circ.queries == 2 ** circ.details["ancillas"] - 1


def test_circuit_cap():
    P, G, W = prepared("or2")
    with pytest.raises(BadParams):
        ws.run_discrete(G, "00", ws.WalkConfig(mode="circuit", epsilon=0.5, lam=1 / (8 * W), circuit_cap=10))


@given(st.floats(-50, 50), st.floats(-3, 3), st.integers(1, 30))
def test_kernel_closed_form(t, rho, M):
    m = np.arange(1, M + 1)
    ref = abs(np.exp(1j * t * m * rho / M).sum()) ** 2 / M ** 2
    assert ws.continuous_kernel(t, rho, M)[0, 0] == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("name", ["or2", "maj3"])
def test_continuous_walk_quadratures(name):
    P, G, W = prepared(name)
    lam = 1 / (8 * W)
    for x in all_strings(P.n):
        g = ws.run_continuous(G, x, ws.WalkConfig(epsilon=0.5, lam=lam, quadrature="gauss"))
        mc = ws.run_continuous(G, x, ws.WalkConfig(epsilon=0.5, lam=lam, samples=4000, seed=3))
        mc2 = ws.run_continuous(G, x, ws.WalkConfig(epsilon=0.5, lam=lam, samples=4000, seed=3))
        assert mc.accept_probability == mc2.accept_probability
        keep = gr.restrict_component(G.adjacency, G.output_vertex)
        A = ws._restricted_x(G, x, keep)
        mu = np.zeros(len(keep))
        mu[keep.index(G.output_vertex)] = 1
        ev, V = np.linalg.eigh(A)
        ov = np.abs(V.conj().T @ mu) ** 2
        ex = exact_time_average(ev, ov, g.details["M"], g.details["tau"])
        assert g.accept_probability == pytest.approx(ex, abs=1e-9)
        assert abs(mc.accept_probability - ex) <= 5 * mc.details["std"] / math.sqrt(4000) + 1e-12
        # zero modes always count in full; the rest add at most 3/M beyond the low band
        assert g.accept_probability >= g.predicted - 1e-12
        assert g.accept_probability <= g.details["false_bound"] + 1e-12


def test_repetitions_and_vote():
    assert ws.repetitions(0.1) == math.ceil(math.log(3) / (2 * 0.05 ** 2))
    R = 25
    val, err = ws._vote(0.7, 0.375, R)
    k = math.ceil(0.375 * R)
    assert val == 1
    assert err == pytest.approx(sum(binom.pmf(i, R, 0.7) for i in range(k)), rel=1e-9)
    val, err = ws._vote(0.1, 0.375, R)
    assert val == 0 and err == pytest.approx(binom.sf(k - 1, R, 0.1), rel=1e-9)


@pytest.mark.parametrize("strategy", ["blackbox", "witnessed"])
@pytest.mark.parametrize("name", sorted(PROGRAMS))
def test_decisions_are_correct(name, strategy):
    P = PROGRAMS[name]
    for x in all_strings(P.n):
        d = ws.decide(P, x, strategy)
        assert d.value == sp.evaluate(P, x)
        assert d.vote_error <= 1 / 3
        assert d.total_queries == d.repetitions * d.queries_per_run


def test_decide_trivial_programs():
    d = ws.decide(sp.trivial_program(2), "01")
    assert d.value == 1 and d.total_queries == 0
    always = sp.make_program(1, [1], free=[[1]])
    assert ws.decide(always, "0").value == 1
    with pytest.raises(BadParams):
        ws.decide(or2_program(), "00", "bogus")


def test_projected_queries_monotone():
    vals = [ws.projected_queries(W) for W in (1, 2, 5, 10, 100)]
    assert vals == sorted(vals)


def test_pipeline_majority():
    out = ws.tightness_pipeline(threshold(2, 3))
    assert out["adv_pm"] == pytest.approx(2.0, abs=1e-4)
    assert out["relative_gap"] < 1e-3
    assert out["all_correct"] and not out["trivial"]


@pytest.mark.parametrize("name", ["or2", "maj3", "interval(1,2,3)"])
def test_edge_space_walk_is_oracle_faithful(name):
    """The full two-register walk U_x and the edge-space Õ_x·U accept with the same probability.

    A phase θ lies within δ of 0 or π exactly when |sin θ| <= sin δ, so the
    accepting subspace is a spectral projector of the Hermitian (W - W†)/2i.
    """
    P, G, W = prepared(name)
    cfg = ws.WalkConfig(epsilon=0.5, lam=1 / (8 * W))
    for x in all_strings(P.n):
        rep = ws.run_discrete(G, x, cfg)
        ops = gr.szegedy_operators(G, x, normalize=True)
        start = ops.T_op[:, ops.vertices.index(G.output_vertex)]
        Wx = 1j * ops.U_op
        s, V = np.linalg.eigh((Wx - Wx.conj().T) / 2j)
        amp = np.abs(V.conj().T @ start) ** 2
        full = amp[np.abs(s) <= math.sin(rep.details["delta_p"]) + 1e-12].sum()
        assert full == pytest.approx(rep.accept_probability, abs=1e-10)


@pytest.mark.parametrize("name", sorted(PROGRAMS))
def test_blackbox_acceptance_floors(name):
    P = PROGRAMS[name]
    for x in all_strings(P.n):
        d = ws.decide(P, x, "blackbox")
        if sp.evaluate(P, x):
            assert d.accept_probability >= 5 / 12 - 1e-9
        else:
            assert d.accept_probability <= 1 / 3 + 1e-9


@pytest.mark.parametrize("name", ["or2", "interval(1,2,3)"])
def test_continuous_true_inputs_accept_every_sample(name):
    P, G, W = prepared(name)
    cfg = ws.WalkConfig(epsilon=0.5, lam=1 / (8 * W), samples=500, seed=11)
    for x in all_strings(P.n):
        r = ws.run_continuous(G, x, cfg)
        if sp.evaluate(P, x):
            assert r.details["min_sample"] >= cfg.epsilon - 1e-9
        else:
            assert r.accept_probability <= 3 * cfg.epsilon / 4


def test_continuous_walk_without_evolution_accepts():
    P, G, W = prepared("maj3")
    for x in ("000", "111"):
        r = ws.run_continuous(G, x, ws.WalkConfig(epsilon=0.5, lam=1e15, quadrature="gauss"))
        assert r.accept_probability == pytest.approx(1.0, abs=1e-6)


@given(st.integers(0, 2 ** 32 - 1))
def test_continuous_walk_is_gauge_invariant(seed):
    """Rephasing vertices keeps the spectrum and probe overlaps, hence the probability."""
    rng = np.random.default_rng(seed)
    P, G, W = prepared("interval(1,2,3)")
    dT = np.exp(1j * rng.uniform(0, 2 * np.pi, len(G.t_labels)))
    dU = np.exp(1j * rng.uniform(0, 2 * np.pi, len(G.u_labels)))
    H = gr.BipartiteGraph(G.t_labels, G.u_labels, dT[:, None] * G.biadj * dU[None, :],
                          G.output_index, G.input_vertex_map)
    cfg = ws.WalkConfig(epsilon=0.5, lam=1 / (8 * W), samples=300, seed=seed % 1000)
    for x in ("000", "010", "111"):
        a, b = ws.run_continuous(G, x, cfg), ws.run_continuous(H, x, cfg)
        assert a.accept_probability == pytest.approx(b.accept_probability, abs=1e-9)
