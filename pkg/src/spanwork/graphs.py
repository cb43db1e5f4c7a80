"""Bipartite graphs attached to span programs, their zero-eigenvalue
witnesses, effective-gap checks, and the Szegedy walk operators.

Vertex order for the full adjacency matrix is T first, then U.  For a span
program, T = [dim] ⊔ I and U = {0} ⊔ I, with I in canonical column order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .boolfn import all_strings
from .errors import BadKernelVector, Disconnected, NotFalse, NotNormalized, TooLarge
from .spanprog import (SpanProgram, amplify, canonicalize, complement_basis, cost_vector, evaluate,
                       pinv, witness_false, witness_size, witness_true)

SPECTRAL_CAP = 2000
ZERO_REL = 1e-10
PRUNE_REL = 1e-12


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    t_labels: tuple
    u_labels: tuple
    biadj: np.ndarray
    output_index: int | None = None
    input_vertex_map: dict = field(default_factory=dict)

    def __post_init__(self):
        B = np.asarray(self.biadj, dtype=complex)
        if B.shape != (len(self.t_labels), len(self.u_labels)):
            raise ValueError("biadjacency shape does not match the label lists")
        if not np.all(np.isfinite(B)):
            raise ValueError("non-finite biadjacency entry")
        B.setflags(write=False)
        object.__setattr__(self, "biadj", B)
        object.__setattr__(self, "t_labels", tuple(self.t_labels))
        object.__setattr__(self, "u_labels", tuple(self.u_labels))

    @property
    def num_vertices(self) -> int:
        return len(self.t_labels) + len(self.u_labels)

    @property
    def adjacency(self) -> np.ndarray:
        nT, nU = self.biadj.shape
        A = np.zeros((nT + nU, nT + nU), dtype=complex)
        A[:nT, nT:] = self.biadj
        A[nT:, :nT] = self.biadj.conj().T
        return A

    @property
    def output_vertex(self) -> int | None:
        """Index of μ_0 in the full vertex order."""
        return None if self.output_index is None else len(self.t_labels) + self.output_index

    @property
    def input_vertices(self) -> dict:
        """(j, b) -> full-order vertex indices (input vertices sit on the T side)."""
        return {k: list(v) for k, v in self.input_vertex_map.items()}

    def vertex_labels(self) -> list:
        return list(self.t_labels) + list(self.u_labels)

    def export_edge_list(self) -> str:
        """JSON header line, then one ``t u re im`` line per edge."""
        head = {
            "output_vertex": None if self.output_index is None else self.u_labels[self.output_index],
            "inputs": {f"{j + 1},{b}": [self.t_labels[i] for i in v]
                       for (j, b), v in sorted(self.input_vertex_map.items())},
        }
        lines = [json.dumps(head, sort_keys=True)]
        for r, c in zip(*np.nonzero(self.biadj)):
            z = self.biadj[r, c]
            lines.append(f"{self.t_labels[r]} {self.u_labels[c]} {z.real!r} {z.imag!r}")
        return "\n".join(lines) + "\n"


def _graph(P: SpanProgram, diag: np.ndarray) -> BipartiteGraph:
    d, k = P.dim, P.num_inputs
    B = np.zeros((d + k, 1 + k), dtype=complex)
    B[:d, 0] = P.target
    B[:d, 1:] = P.A
    B[d:, 1:] = np.diag(diag)
    # round-off from factorizations would otherwise show up as edges
    B[np.abs(B) <= PRUNE_REL * np.abs(B).max(initial=0.0)] = 0
    t_labels = [f"v{i}" for i in range(d)] + [f"i{i}" for i in range(k)]
    u_labels = ["out"] + [f"u{i}" for i in range(k)]
    sl = P.block_slices()
    vmap = {(j, b): [d + i for i in range(sl[(j, b)].start, sl[(j, b)].stop)]
            for j in range(P.n) for b in (0, 1)}
    return BipartiteGraph(t_labels, u_labels, B, 0, vmap)


def build_graph(P: SpanProgram) -> BipartiteGraph:
    """G_P; the unit edges of free columns are left out (they vanish for every x)."""
    return _graph(P, np.array([0.0 if lab is None else 1.0 for lab in P.labels]))


def build_graph_x(P: SpanProgram, x: str) -> BipartiteGraph:
    return _graph(P, (~P.available(x)).astype(float))


# ------------------------------------------------------------------ zero modes


@dataclass
class ZeroWitness:
    psi: np.ndarray
    ratio: float
    residual: float
    plain_ratio: float


def zero_witness_true(P: SpanProgram, x: str, s=None) -> ZeroWitness:
    """ψ = (0, -1, Π(x) w) from an optimal positive witness w."""
    rep = witness_true(P, x, s)
    d, k = P.dim, P.num_inputs
    w = np.where(P.available(x), rep.witness, 0)
    psi = np.zeros(2 * (d + k) + 1 - d, dtype=complex)  # |T| + |U| = (d+k) + (1+k)
    psi[d + k] = -1.0
    psi[d + k + 1:] = w
    A = build_graph_x(P, x).adjacency
    res = float(np.linalg.norm(A @ psi))
    sw = np.sqrt(P.weights(s)) * w
    ratio = 1.0 / (1.0 + float(np.vdot(sw, sw).real))
    return ZeroWitness(psi, ratio, res, 1.0 / float(np.vdot(psi, psi).real))


def zero_witness_false(P: SpanProgram, x: str, s=None) -> ZeroWitness:
    """ψ = (w', -A†w', 0); satisfies every zero-mode row except the one at μ_0."""
    rep = witness_false(P, x, s)
    d, k = P.dim, P.num_inputs
    wp = rep.witness
    psi = np.zeros(2 * (d + k) + 1 - d, dtype=complex)
    psi[:d] = wp
    psi[d:d + k] = -(P.A.conj().T @ wp)
    A = build_graph_x(P, x).adjacency
    r = A @ psi
    r[d + k] = 0  # the μ_0 row is exempt
    tI = np.sqrt(P.weights(s)) * psi[d:d + k]
    ratio = abs(np.vdot(P.target, wp)) ** 2 / (float(np.vdot(wp, wp).real) + float(np.vdot(tI, tI).real))
    plain = abs(np.vdot(P.target, wp)) ** 2 / float(np.vdot(psi, psi).real)
    return ZeroWitness(psi, float(ratio), float(np.linalg.norm(r)), float(plain))


# ------------------------------------------------------------------ spectra


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray
    overlaps: np.ndarray
    vectors: np.ndarray
    zero_tol: float
    symmetric_defect: float

    def cumulative(self, lam: float) -> float:
        """Probe mass on eigenvectors with |ρ| <= lam (zero-classified ones always count)."""
        mask = np.abs(self.eigenvalues) <= max(lam, 0.0) + self.zero_tol
        return float(self.overlaps[mask].sum())

    def to_dict(self) -> dict:
        return {"eigenvalues": self.eigenvalues.tolist(), "overlaps": self.overlaps.tolist(),
                "zero_tol": self.zero_tol, "symmetric_defect": self.symmetric_defect}


def spectral_report(G, probe=None, cap: int = SPECTRAL_CAP) -> SpectralReport:
    """Full Hermitian eigensystem of A_G with the probe's overlaps.

    ``G`` may be a BipartiteGraph or a Hermitian matrix.  The probe defaults
    to the output vertex.
    """
    A = G.adjacency if isinstance(G, BipartiteGraph) else np.asarray(G, dtype=complex)
    N = A.shape[0]
    if N > cap:
        raise TooLarge(f"{N} vertices exceeds the spectral cap {cap}")
    if probe is None:
        probe = np.zeros(N)
        probe[G.output_vertex if isinstance(G, BipartiteGraph) else 0] = 1.0
    probe = np.asarray(probe, dtype=complex)
    probe = probe / np.linalg.norm(probe)
    ev, V = np.linalg.eigh(A)
    ov = np.abs(V.conj().T @ probe) ** 2
    scale = max(float(np.abs(ev).max(initial=0.0)), 1.0)
    defect = float(np.max(np.abs(np.sort(ev) + np.sort(ev)[::-1]), initial=0.0)) \
        if isinstance(G, BipartiteGraph) else 0.0
    return SpectralReport(ev, ov, V, ZERO_REL * scale, defect)


def false_witness_min_norm(P: SpanProgram, x: str) -> tuple[float, np.ndarray]:
    """min ‖w'‖² + ‖A†w'‖² over negative witnesses, with the minimizer."""
    if evaluate(P, x):
        raise NotFalse(f"f_P({x}) = 1")
    A, t = P.A, P.target
    N = complement_basis(A[:, P.available(x)], P.dim, P.scale)
    c = N.conj().T @ t
    Q = N.conj().T @ (np.eye(P.dim) + A @ A.conj().T) @ N
    y = np.linalg.solve(Q, c)
    val = float(np.vdot(c, y).real)
    return 1.0 / val, N @ (y / val)


def true_witness_min_norm(P: SpanProgram, x: str) -> tuple[float, np.ndarray]:
    """min ‖w‖² over all positive witnesses, free entries included."""
    avail = P.available(x)
    w = np.zeros(P.num_inputs, dtype=complex)
    w[avail] = pinv(P.A[:, avail], P.scale) @ P.target
    return float(np.vdot(w, w).real), w


def witnessed_parameters(P: SpanProgram, domain=None) -> tuple[float, float]:
    """(W_1, W_2), each floored at 1."""
    dom = list(domain) if domain is not None else all_strings(P.n)
    W1 = W2 = 1.0
    for x in dom:
        if evaluate(P, x):
            W1 = max(W1, true_witness_min_norm(P, x)[0])
        else:
            W2 = max(W2, false_witness_min_norm(P, x)[0])
    return W1, W2


def blackbox_program(P: SpanProgram, domain=None) -> tuple[SpanProgram, float]:
    """Canonicalize at unit costs, then amplify by the canonical witness size."""
    Pc = canonicalize(P)
    W = witness_size(Pc, domain)
    return (amplify(Pc, W) if W > 0 else Pc), W


@dataclass
class GapCheck:
    passed: bool
    measured: float
    bound: float
    threshold: float
    margin: float
    mode: str
    W: float | None = None


def effective_gap_check(P: SpanProgram, x: str, c: float | None = None, upsilon: float | None = None,
                        mode: str = "blackbox", domain=None, slack: float = 1e-9) -> GapCheck:
    """Measure the output-vertex mass below the threshold and compare to the bound."""
    if evaluate(P, x):
        raise NotFalse(f"f_P({x}) = 1")
    if mode == "blackbox":
        if c is None:
            raise ValueError("blackbox mode needs c")
        Pp, W = blackbox_program(P, domain)
        thr = c / W if W > 0 else math.inf
        bound = 8 * c * c * (1 + 1 / W) if W > 0 else math.inf
        G = build_graph_x(Pp, x)
    elif mode == "witnessed":
        if upsilon is None:
            raise ValueError("witnessed mode needs upsilon")
        aux = witness_false(P, x).aux_norms
        thr = upsilon
        bound = 8 * upsilon ** 2 * (aux[0] + aux[1])
        G = build_graph_x(P, x)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    rep = spectral_report(G)
    meas = rep.cumulative(thr) if math.isfinite(thr) else 1.0
    return GapCheck(meas <= bound + slack, meas, bound, thr, bound - meas, mode,
                    W if mode == "blackbox" else None)


def psd_squared_support_check(X, t, phi, lam: float, delta: float | None = None,
                              kernel_tol: float = 1e-8, slack: float = 1e-9) -> dict:
    """δ Σ_{λ(β) <= Λ, ⟨t|β⟩ != 0} |⟨t|β⟩|²/λ(β) <= 4Λ on X' = X + |t⟩⟨t|."""
    X = np.asarray(X, dtype=complex)
    t = np.asarray(t, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    nphi = np.linalg.norm(phi)
    if nphi == 0 or np.linalg.norm(X @ phi) > kernel_tol * max(1.0, np.linalg.norm(X, 2)) * nphi:
        raise BadKernelVector("phi is not in the kernel of X")
    if delta is None:
        delta = abs(np.vdot(t, phi)) ** 2 / nphi ** 2
    if abs(np.vdot(t, phi)) ** 2 < delta * nphi ** 2 * (1 - 1e-12):
        raise BadKernelVector("|<t|phi>|^2 < delta ||phi||^2")
    ev, B = np.linalg.eigh(X + np.outer(t, t.conj()))
    tb = np.abs(B.conj().T @ t) ** 2
    floor = 1e-14 * (1 + float(np.vdot(t, t).real))
    keep = (ev <= lam) & (tb > floor) & (ev > 0)
    lhs = float(delta * np.sum(tb[keep] / ev[keep]))
    return {"passed": lhs <= 4 * lam + slack, "lhs": lhs, "bound": 4 * lam, "delta": float(delta)}


def psd_lemma_gap(X, t, delta: float, xi) -> float:
    """‖X'ξ‖² - δ|⟨t|ξ⟩|²; nonnegative under the kernel hypothesis."""
    X = np.asarray(X, dtype=complex)
    t = np.asarray(t, dtype=complex)
    Xp = X + np.outer(t, t.conj())
    v = Xp @ xi
    return float(np.vdot(v, v).real - delta * abs(np.vdot(t, xi)) ** 2)


# ------------------------------------------------------------------ Szegedy


@dataclass
class SzegedyOperators:
    """Walk operators over a vertex set (already restricted and normalized).

    In ``full`` mode the two-register space is C^V ⊗ C^V with |v,w⟩ at
    v*|V| + w; in ``edge`` mode it is spanned by the ordered pairs in
    ``pairs`` (the edges of G, both orientations, plus loops where A_vv != 0).
    """

    A: np.ndarray
    vertices: list
    T_op: np.ndarray
    S_op: np.ndarray
    U_op: np.ndarray
    M_op: np.ndarray
    perron: np.ndarray
    phis: np.ndarray
    space: str
    pairs: list | None
    scale: float

    def pair_index(self) -> dict:
        return {p: i for i, p in enumerate(self.pairs)} if self.pairs is not None else None


def restrict_component(A: np.ndarray, root: int) -> list:
    mask = np.abs(A) > 0
    _, lab = connected_components(mask, directed=False)
    return [i for i in range(A.shape[0]) if lab[i] == lab[root]]


def perron_vector(absA: np.ndarray) -> np.ndarray:
    ev, V = np.linalg.eigh(absA)
    v = V[:, -1].real
    v = v * np.sign(v.sum())
    return v


def phi_vectors(A: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """Rows φ_v; the vertex order is the index order."""
    n = A.shape[0]
    Phi = np.zeros((n, n), dtype=complex)
    for v in range(n):
        row = np.zeros(n, dtype=complex)
        for w in range(n):
            a = A[v, w]
            if w == v:
                row[w] = math.sqrt(max(a.real, 0.0) * delta[v])
            elif a != 0:
                if w < v:
                    row[w] = math.sqrt(abs(a) * delta[w])
                else:
                    row[w] = A[w, v] / math.sqrt(abs(a)) * math.sqrt(delta[w])
        Phi[v] = row / math.sqrt(delta[v])
    return Phi


def _pairs(A: np.ndarray) -> list:
    n = A.shape[0]
    return [(v, w) for v in range(n) for w in range(n) if A[v, w] != 0]


def szegedy_from_adjacency(A: np.ndarray, space: str = "full", norm_tol: float = 1e-6,
                           phis: np.ndarray | None = None, pairs: list | None = None) -> SzegedyOperators:
    """Operators for a connected Hermitian A with ‖abs(A)‖ = 1."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    absA = np.abs(A)
    nrm = float(np.linalg.norm(absA, 2))
    if abs(nrm - 1) > norm_tol:
        raise NotNormalized(f"‖abs(A)‖ = {nrm:.8g}, expected 1")
    delta = perron_vector(absA)
    if np.any(delta <= 0):
        raise Disconnected("Perron vector is not strictly positive")
    Phi = phi_vectors(A, delta) if phis is None else phis
    if space == "full":
        T = np.zeros((n * n, n), dtype=complex)
        for v in range(n):
            T[v * n:(v + 1) * n, v] = Phi[v]
        perm = np.array([w * n + v for v in range(n) for w in range(n)])
        S = np.eye(n * n)[perm]
        pairs_out = None
    elif space == "edge":
        pairs_out = _pairs(A) if pairs is None else list(pairs)
        idx = {p: i for i, p in enumerate(pairs_out)}
        T = np.zeros((len(pairs_out), n), dtype=complex)
        for (v, w), i in idx.items():
            T[i, v] = Phi[v, w]
        S = np.zeros((len(pairs_out),) * 2)
        for (v, w), i in idx.items():
            S[idx[(w, v)], i] = 1.0
    else:
        raise ValueError(f"unknown space {space!r}")
    R = 2 * T @ T.conj().T - np.eye(T.shape[0])
    U = R @ S
    M = T.conj().T @ S @ T
    return SzegedyOperators(A, list(range(n)), T, S, U, M, delta, Phi, space, pairs_out, 1.0)


def szegedy_operators(G: BipartiteGraph, x: str | None = None, space: str = "full",
                      root: int | None = None, normalize: bool = False,
                      norm_tol: float = 1e-6) -> SzegedyOperators:
    """Operators for G restricted to the component of μ_0 (or ``root``).

    With ``x`` given, the φ vectors of the switched input vertices are
    replaced by |v⟩ (the U_x construction); everything else is as for G.
    """
    A = G.adjacency
    root = G.output_vertex if root is None else root
    keep = restrict_component(A, root)
    if len(keep) < 2:
        raise Disconnected("the root vertex is isolated")
    Ar = A[np.ix_(keep, keep)]
    scale = float(np.linalg.norm(np.abs(Ar), 2))
    if normalize:
        Ar = Ar / scale
    ops = szegedy_from_adjacency(Ar, "full" if x is not None else space, norm_tol)
    ops.vertices = keep
    ops.scale = scale if normalize else 1.0
    if x is None:
        return ops
    pos = {v: i for i, v in enumerate(keep)}
    Phi = ops.phis.copy()
    for j, b in G.input_vertex_map:
        if int(x[j]) == b:
            for v in G.input_vertex_map[(j, b)]:
                if v in pos:
                    Phi[pos[v]] = np.eye(len(keep))[pos[v]]
    n = len(keep)
    T = np.zeros((n * n, n), dtype=complex)
    for v in range(n):
        T[v * n:(v + 1) * n, v] = Phi[v]
    U = (2 * T @ T.conj().T - np.eye(n * n)) @ ops.S_op
    M = T.conj().T @ ops.S_op @ T
    return SzegedyOperators(Ar, keep, T, ops.S_op, U, M, ops.perron, Phi, "full", None, ops.scale)


def switched_vertices(G: BipartiteGraph, x: str) -> list:
    """Full-order indices of the input vertices whose edges G(x) deletes."""
    return sorted(v for (j, b), vs in G.input_vertex_map.items() if int(x[j]) == b for v in vs)


def szegedy_eigenpairs(ops: SzegedyOperators, tol: float = 1e-12):
    """(ρ, λ, |α,±⟩) for every eigenvector of M with |ρ| < 1, plus (ρ, ρ, T|α⟩) at |ρ| = 1."""
    ev, V = np.linalg.eigh(ops.M_op)
    out = []
    for rho, a in zip(ev, V.T):
        Ta = ops.T_op @ a
        if abs(abs(rho) - 1) <= tol:
            out.append((float(rho), complex(np.sign(rho)), Ta))
            continue
        r = float(np.clip(rho, -1, 1))
        root = math.sqrt(max(0.0, 1 - r * r))
        for sgn in (1, -1):
            lam = r + sgn * 1j * root
            vec = Ta - (r - sgn * 1j * root) * (ops.S_op @ Ta)
            out.append((r, lam, vec))
    return out
