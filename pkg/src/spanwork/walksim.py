"""Quantum-walk evaluation of span programs, simulated exactly.

Two algorithms are available.  The discrete one runs phase estimation on
W_x = i·Õ_x·U over the edge space of the normalized graph.  The continuous
one evolves under A_{G(x)} for a random time and needs no normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import schur
from scipy.stats import binom

from .boolfn import BooleanFunction, all_strings
from .errors import BadParams, EmptyFalseSet, HypothesisViolation
from .graphs import (BipartiteGraph, blackbox_program, build_graph, restrict_component, spectral_report,
                     switched_vertices, szegedy_operators, witnessed_parameters)
from .spanprog import SpanProgram, evaluate, scale_target


@dataclass
class WalkConfig:
    mode: str = "spectral"          # spectral | circuit
    epsilon: float = 0.5
    lam: float | None = None        # threshold Λ on the unnormalized graph
    samples: int = 1000
    seed: int = 0
    quadrature: str = "montecarlo"  # montecarlo | gauss
    gauss_points: int = 24     # nodes per panel
    circuit_cap: int = 1 << 22

    def validate(self):
        if not 0 < self.epsilon <= 1:
            raise BadParams("epsilon must lie in (0, 1]")
        if self.lam is not None and self.lam <= 0:
            raise BadParams("lambda must be positive")
        if self.mode not in ("spectral", "circuit"):
            raise BadParams(f"unknown mode {self.mode!r}")
        if self.quadrature not in ("montecarlo", "gauss"):
            raise BadParams(f"unknown quadrature {self.quadrature!r}")
        if self.samples < 1 or self.gauss_points < 1:
            raise BadParams("samples and gauss_points must be positive")


@dataclass
class SimulationReport:
    algorithm: str
    mode: str
    accept_probability: float
    predicted: float | None
    queries: int
    lam: float
    epsilon: float
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in
             ("algorithm", "mode", "accept_probability", "predicted", "queries", "lam", "epsilon")}
        d["details"] = self.details
        return d


def oracle_unitaries(G: BipartiteGraph, x: str, pairs=None, vertices=None):
    """(O_x, Õ_x).

    O_x is diagonal on |b, j⟩ (index 2j + b) with sign (-1)^{b·x_j}.  Õ_x is
    diagonal on the two-register space: full C^V ⊗ C^V by default, or the
    listed ``pairs`` (indices into ``vertices``, which default to all of V).
    """
    n = len(x)
    O = np.diag([(-1.0) ** (b * int(x[j])) for j in range(n) for b in (0, 1)])
    verts = list(range(G.num_vertices)) if vertices is None else list(vertices)
    pos = {v: i for i, v in enumerate(verts)}
    flip = {pos[v] for v in switched_vertices(G, x) if v in pos}
    if pairs is None:
        m = len(verts)
        d = np.ones(m * m)
        for v in flip:
            d[v * m:(v + 1) * m] = -1
    else:
        d = np.array([-1.0 if v in flip else 1.0 for v, _ in pairs])
    return O, np.diag(d)


def check_hypotheses(G: BipartiteGraph, tol: float = 1e-12) -> None:
    """Input vertices must be degree one with unit-modulus edges, and μ_0 not among them."""
    if G.output_vertex is None:
        raise HypothesisViolation("graph has no output vertex")
    A = G.adjacency
    for key, vs in G.input_vertex_map.items():
        for v in vs:
            if v == G.output_vertex:
                raise HypothesisViolation(f"output vertex is an input vertex of {key}")
            nz = np.flatnonzero(A[v])
            if len(nz) != 1 or abs(abs(A[v, nz[0]]) - 1) > tol:
                raise HypothesisViolation(f"input vertex {v} of {key} is not attached by one unit edge")


def _components(G: BipartiteGraph):
    A = G.adjacency
    keep = restrict_component(A, G.output_vertex)
    return keep


def run_discrete(G: BipartiteGraph, x: str, cfg: WalkConfig) -> SimulationReport:
    """Phase estimation on W_x, starting from T|μ_0⟩.

    Λ (``cfg.lam``) refers to the graph as given; it is divided by the
    normalization ‖abs(A_G)‖ together with the graph.
    """
    cfg.validate()
    if cfg.lam is None:
        raise BadParams("the discrete walk needs lambda")
    check_hypotheses(G)
    ops = szegedy_operators(G, space="edge", normalize=True)
    keep, pairs = ops.vertices, ops.pairs
    lam = cfg.lam / ops.scale
    dp = min((2 / math.pi) * lam, math.pi / 2)
    de = cfg.epsilon / 6
    _, Ot = oracle_unitaries(G, x, pairs=pairs, vertices=keep)
    W = 1j * Ot @ ops.U_op
    start = ops.T_op[:, keep.index(G.output_vertex)]

    # exact prediction from the spectrum of A_{G(x)} on the same component
    Ax = _restricted_x(G, x, keep) / ops.scale
    ev, V = np.linalg.eigh(Ax)
    mu = np.zeros(len(keep))
    mu[keep.index(G.output_vertex)] = 1
    ov = np.abs(V.conj().T @ mu) ** 2
    predicted = float(ov[np.abs(np.arcsin(np.clip(ev, -1, 1))) <= dp + 1e-12].sum())

    # W_x is unitary, hence normal; its complex Schur vectors are eigenvectors
    Tm, Z = schur(W, output="complex")
    phases = np.angle(np.diag(Tm))
    amp = np.abs(Z.conj().T @ start) ** 2
    dist = np.minimum(np.abs(phases), np.pi - np.abs(phases))
    spectral = float(amp[dist <= dp + 1e-12].sum())
    details = {"delta_p": dp, "delta_e": de, "norm_scale": ops.scale, "edge_space": len(pairs),
               "vertices": len(keep), "spectral_probability": spectral,
               "schur_offdiag": float(np.abs(np.triu(Tm, 1)).max(initial=0.0))}
    if cfg.mode == "spectral":
        return SimulationReport("discrete", "spectral", spectral, predicted,
                                math.ceil(1 / (dp * de)), cfg.lam, cfg.epsilon, details)

    nb = math.ceil(math.log2(2 * math.pi / dp))
    extra = math.ceil(math.log2(2 + 1 / (2 * de)))
    b = nb + extra
    N = 1 << b
    if N * len(pairs) > cfg.circuit_cap:
        raise BadParams(f"phase register of {b} qubits is too large to simulate")
    reg = np.empty((N, len(pairs)), dtype=complex)
    reg[0] = start
    for y in range(1, N):
        reg[y] = W @ reg[y - 1]
    out = np.fft.fft(reg, axis=0) / N  # inverse QFT after the controlled powers
    probs = np.sum(np.abs(out) ** 2, axis=1)
    width = (1 << extra) - 1
    ks = np.arange(N)
    near0 = np.minimum(ks, N - ks) <= width
    nearpi = np.abs(ks - N // 2) <= width
    acc = float(probs[near0 | nearpi].sum())
    details.update({"ancillas": b, "precision_bits": nb, "accept_window": width,
                    "register_norm": float(probs.sum())})
    return SimulationReport("discrete", "circuit", acc, predicted, N - 1, cfg.lam, cfg.epsilon, details)


def _restricted_x(G: BipartiteGraph, x: str, keep) -> np.ndarray:
    """A_{G(x)} on the vertex subset ``keep``."""
    A = G.adjacency.copy()
    for v in switched_vertices(G, x):
        A[v, :] = 0
        A[:, v] = 0
    return A[np.ix_(keep, keep)]


def continuous_kernel(t, rho, M: int) -> np.ndarray:
    """(1/M²)|Σ_{m=1..M} e^{i t (m/M) ρ}|² for every pair in the broadcast of t and ρ.

    Summed in closed form, (sin(Mθ/2) / (M sin(θ/2)))² with θ = tρ/M.
    """
    th = np.multiply.outer(np.atleast_1d(t), np.atleast_1d(rho)) / M
    den = M * np.sin(th / 2)
    small = np.abs(den) < 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        k = (np.sin(M * th / 2) / np.where(small, 1.0, den)) ** 2
    # near θ ∈ 2πZ the ratio tends to 1
    return np.where(small, 1.0, k)


def run_continuous(G: BipartiteGraph, x: str, cfg: WalkConfig) -> SimulationReport:
    cfg.validate()
    if cfg.lam is None:
        raise BadParams("the continuous walk needs lambda")
    check_hypotheses(G)
    M = math.ceil(12 / cfg.epsilon)
    tau = M * M / cfg.lam
    keep = _components(G)
    Ax = _restricted_x(G, x, keep)
    mu = np.zeros(len(keep))
    mu[keep.index(G.output_vertex)] = 1
    rep = spectral_report(Ax, probe=mu, cap=10 ** 9)
    rho, ov = rep.eigenvalues, rep.overlaps
    if cfg.quadrature == "montecarlo":
        rng = np.random.default_rng(cfg.seed)
        ts = rng.uniform(0, tau, cfg.samples)
        wts = np.full(cfg.samples, 1 / cfg.samples)
    else:
        # composite rule: each panel spans about two periods of the fastest term
        fmax = tau * float(np.abs(rho).max(initial=0.0)) / (2 * math.pi)
        panels = max(1, math.ceil(fmax / 2))
        g, gw = np.polynomial.legendre.leggauss(cfg.gauss_points)
        edges = np.linspace(0, tau, panels + 1)
        h = np.diff(edges)[:, None]
        ts = (edges[:-1, None] + (g[None, :] + 1) * h / 2).ravel()
        wts = (gw[None, :] * h / (2 * tau)).ravel()
    per = continuous_kernel(ts, rho, M) @ ov
    mean = float(wts @ per)
    zero_mass = rep.cumulative(0.0)
    low_mass = rep.cumulative(cfg.lam)
    L = max(tau, 3.0)
    queries = math.ceil(M * tau * math.log(L) / max(math.log(math.log(L)), 1e-12))
    details = {"M": M, "tau": tau, "samples": len(ts), "quadrature": cfg.quadrature,
               "std": float(np.sqrt(max(wts @ (per - mean) ** 2, 0.0))),
               "min_sample": float(per.min()), "max_sample": float(per.max()),
               "zero_mass": zero_mass, "mass_below_lambda": low_mass,
               "false_bound": low_mass + 3 / M}
    return SimulationReport("continuous", cfg.quadrature, mean, zero_mass, queries,
                            cfg.lam, cfg.epsilon, details)


# ------------------------------------------------------------------ decisions


@dataclass
class Decision:
    value: int
    accept_probability: float
    threshold: float
    repetitions: int
    vote_error: float
    queries_per_run: int
    total_queries: int
    strategy: str
    lam: float | None
    W: float | None
    report: SimulationReport | None = None

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("value", "accept_probability", "threshold", "repetitions",
                                            "vote_error", "queries_per_run", "total_queries",
                                            "strategy", "lam", "W")}
        d["report"] = None if self.report is None else self.report.to_dict()
        return d


def repetitions(gap: float, error: float = 1 / 3) -> int:
    """Hoeffding: R votes with threshold at mid-gap err with probability <= error."""
    return max(1, math.ceil(math.log(1 / error) / (2 * (gap / 2) ** 2)))


def _vote(p: float, thr: float, R: int) -> tuple[int, float]:
    """Outcome the thresholded vote concentrates on, with its exact error."""
    k = math.ceil(thr * R)  # accept iff at least k of R runs accept
    p_acc = float(binom.sf(k - 1, R, min(max(p, 0.0), 1.0)))
    val = int(p >= thr)
    return val, (1 - p_acc) if val else p_acc


def decide(P: SpanProgram, x: str, strategy: str = "blackbox", cfg: WalkConfig | None = None,
           domain=None, c: float = 1 / 8) -> Decision:
    cfg = cfg or WalkConfig()
    eps = cfg.epsilon
    thr = 3 * eps / 4
    if np.allclose(P.target, 0):
        return Decision(1, 1.0, thr, 0, 0.0, 0, 0, strategy, None, None)
    if strategy == "blackbox":
        try:
            Pp, W = blackbox_program(P, domain)
        except EmptyFalseSet:
            return Decision(1, 1.0, thr, 0, 0.0, 0, 0, strategy, None, None)
        if W <= 0:
            raise BadParams("zero witness size; the walk threshold is undefined")
        lam = c / W
    elif strategy == "witnessed":
        W1, W2 = witnessed_parameters(P, domain)
        Pp = scale_target(P, 1 / math.sqrt(W1))
        lam = 1 / (4 * math.sqrt(2) * math.sqrt(W1 * W2))
        W = W1 * W2
    else:
        raise BadParams(f"unknown strategy {strategy!r}")
    run_cfg = WalkConfig(**{**cfg.__dict__, "lam": lam})
    rep = run_discrete(build_graph(Pp), x, run_cfg)
    R = repetitions(eps / 6)
    val, err = _vote(rep.accept_probability, thr, R)
    return Decision(val, rep.accept_probability, thr, R, err, rep.queries, R * rep.queries,
                    strategy, lam, W, rep)


def projected_queries(W: float) -> float:
    """W log W / log log W, the claimed scaling (defined for W > e)."""
    if W <= math.e:
        return W
    return W * math.log(W) / math.log(math.log(W))


def tightness_pipeline(f: BooleanFunction, cfg=None, walk: WalkConfig | None = None) -> dict:
    """Dual SDP at unit costs, span program from its Gram vectors, walk decisions on D."""
    from .adversary import SDPConfig, solve_advpm_dual, span_program_from_gram
    from .spanprog import witness_size

    cfg = cfg or SDPConfig()
    value, gram = solve_advpm_dual(f, None, cfg)
    out = {"n": f.n, "adv_pm": value, "gap": getattr(getattr(gram, "sdp", None), "gap", None)}
    try:
        P = span_program_from_gram(f, gram)
    except EmptyFalseSet as exc:
        out.update({"trivial": True, "rows": [{"x": x, "f": f(x), "decision": 1, "queries": 0}
                                              for x in f.domain], "all_correct": all(f(x) for x in f.domain)})
        return out
    ws = witness_size(P, f.domain)
    rows = []
    for x in f.domain:
        d = decide(P, x, "blackbox", walk, domain=f.domain)
        rows.append({"x": x, "f": f(x), "decision": d.value, "accept_probability": d.accept_probability,
                     "vote_error": d.vote_error, "queries": d.total_queries,
                     "queries_per_run": d.queries_per_run})
    out.update({"wsize": ws, "relative_gap": abs(ws - value) / max(value, 1e-12),
                "rows": rows, "all_correct": all(r["decision"] == r["f"] for r in rows),
                "projected": projected_queries(ws), "trivial": False})
    return out
