"""Adversary bounds: primal evaluation, dual SDPs, and the Gram-vector bridge
to span programs.

The dual variable for an n-bit function over domain D is a single PSD matrix
of side n·|D| indexed by ``xi*n + j`` (``xi`` the position of x in the
domain).  For ADV the diagonal blocks X_j are the per-bit matrices; the
off-diagonal blocks carry no constraint, so a PSD big matrix and a family of
PSD blocks are interchangeable.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from . import boolfn
from .boolfn import BooleanFunction, all_strings, weight
from .errors import (BadDistribution, BadParams, CostMismatch, DomainTooLarge, EmptyFalseSet,
                     InfeasibleGram, InvalidAdversaryMatrix, NoConvergence, NotCanonical, NotFound,
                     NotSymmetric)
from .spanprog import SpanProgram, cost_vector, is_canonical, trivial_program, witness_true


# ------------------------------------------------------------------ primal


@dataclass(frozen=True, eq=False)
class AdversaryMatrix:
    f: BooleanFunction
    gamma: np.ndarray

    def __post_init__(self):
        G = np.array(self.gamma, dtype=float)
        N = len(self.f.domain)
        if G.shape != (N, N):
            raise InvalidAdversaryMatrix(f"gamma must be {N}×{N}, got {G.shape}")
        if not np.all(np.isfinite(G)):
            raise InvalidAdversaryMatrix("non-finite entries")
        if np.max(np.abs(G - G.T), initial=0) > 1e-12:
            raise InvalidAdversaryMatrix("gamma is not symmetric")
        vals = np.array([self.f.table[x] for x in self.f.domain])
        if np.any(G[vals[:, None] == vals[None, :]] != 0):
            raise InvalidAdversaryMatrix("nonzero entry on a pair with equal function values")
        if not np.any(G):
            raise InvalidAdversaryMatrix("gamma is zero")
        G.setflags(write=False)
        object.__setattr__(self, "gamma", G)

    def delta(self, j: int) -> np.ndarray:
        """Mask of pairs that differ in bit j."""
        bits = np.array([int(x[j]) for x in self.f.domain])
        return bits[:, None] != bits[None, :]

    def restricted(self, j: int) -> np.ndarray:
        return self.gamma * self.delta(j)


def adv_primal_value(G: AdversaryMatrix, s=None, tol: float = 1e-9) -> dict:
    n = G.f.n
    s = cost_vector(n, s)
    norm = float(np.linalg.norm(G.gamma, 2))
    per = [float(np.linalg.norm(G.restricted(j), 2)) for j in range(n)]
    ratios = [s[j] / p for j, p in enumerate(per) if p > 0]
    return {
        "norm": norm,
        "per_bit_norms": per,
        "feasible": all(p <= s[j] + tol for j, p in enumerate(per)),
        "nonnegative": bool(np.all(G.gamma >= 0)),
        "lower_bound": norm * min(ratios) if ratios else math.inf,
    }


def interval_adversary_matrix(l: int, m: int, n: int) -> AdversaryMatrix:
    """Explicit nonnegative adversary matrix for interval(l, m, n).

    Rows of weight m connect to their weight-(m+1) neighbours with weight 1
    and to their weight-(l-1) subsets at distance m-l+1 with weight c.
    """
    if not (0 <= l <= m <= n):
        raise BadParams(f"interval needs 0 <= l <= m <= n, got {(l, m, n)}")
    if abs(n / 2 - m) > abs(n / 2 - l):
        raise BadParams("needs |n/2 - m| <= |n/2 - l| (swap roles via negated inputs)")
    f = boolfn.interval(l, m, n)
    if f.is_constant:
        raise BadParams("constant interval function has no adversary matrix")
    idx = {x: i for i, x in enumerate(f.domain)}
    c = 0.0 if l == 0 else (math.comb(n - l, m - l) * math.comb(m - 1, l - 1)) ** -0.5
    G = np.zeros((2 ** n, 2 ** n))
    for x in f.domain:
        if weight(x) != m:
            continue
        r = idx[x]
        for i in range(n):
            if x[i] == "0":
                G[r, idx[x[:i] + "1" + x[i + 1:]]] = 1.0
        if c:
            ones = [i for i in range(n) if x[i] == "1"]
            for keep in itertools.combinations(ones, l - 1):
                y = "".join("1" if i in keep else "0" for i in range(n))
                G[r, idx[y]] = c
    return AdversaryMatrix(f, G + G.T)


def interval_adv_closed_form(l: int, m: int, n: int) -> float:
    """ADV(interval(l, m, n)); mirrored through bit complement when needed."""
    if abs(n / 2 - m) > abs(n / 2 - l):
        return interval_adv_closed_form(n - m, n - l, n)
    base = (m + 1) * (n - m)
    return math.sqrt(base + (m * (n - l + 1) / (m - l + 1) ** 2 if l > 0 else 0.0))


# ------------------------------------------------------------------ SDP engine


@dataclass
class SDPConfig:
    tolerance: float = 1e-7
    max_iterations: int = 10000
    method: str = "clarabel"
    seed: int = 0

    def __post_init__(self):
        if not self.tolerance > 0:
            raise BadParams("tolerance must be positive")


@dataclass
class SDPProblem:
    """minimize Σ_b <C_b, X_b> + c·y subject to

    A_eq vec(X) + F_eq y == b_eq,  A_in vec(X) + F_in y <= b_in,  X_b ⪰ 0,

    where vec(X) stacks the column-major vectorizations of the PSD blocks
    X_b (sides ``sizes``) and y has ``free`` unconstrained entries.
    """

    sizes: Sequence[int]
    C: Sequence[np.ndarray] | None = None
    c: np.ndarray | None = None
    free: int = 0
    A_eq: sp.spmatrix | None = None
    F_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_in: sp.spmatrix | None = None
    F_in: np.ndarray | None = None
    b_in: np.ndarray | None = None

    def offsets(self) -> list[int]:
        return list(itertools.accumulate([0] + [k * k for k in self.sizes]))


@dataclass
class SDPResult:
    X: list
    y: np.ndarray
    value: float
    dual_value: float
    duals: tuple
    gap: float
    psd_violation: float
    status: str
    solver: str
    iterations: int | None


_SOLVER_ORDER = {"clarabel": ["CLARABEL", "SCS"], "scs": ["SCS", "CLARABEL"]}


def solve_sdp(problem: SDPProblem, cfg: SDPConfig | None = None) -> SDPResult:
    """Solve a block SDP through cvxpy (Clarabel, SCS as fallback).

    The dual value is recomputed from the constraint multipliers, so ``gap``
    is an independent optimality check.
    """
    import cvxpy as cp

    cfg = cfg or SDPConfig()
    k = problem.free
    Xs = [cp.Variable((d, d), PSD=True) for d in problem.sizes]
    y = cp.Variable(k) if k else None
    vx = cp.hstack([cp.vec(X, order="F") for X in Xs]) if Xs else None

    def lin(A, F):
        e = 0
        if A is not None and vx is not None:
            e = sp.csr_matrix(A) @ vx
        if F is not None and k:
            e = e + np.asarray(F, dtype=float) @ y
        return e

    obj = 0
    if problem.C is not None:
        for C, X in zip(problem.C, Xs):
            if C is not None:
                obj = obj + cp.sum(cp.multiply(np.asarray(C, dtype=float), X))
    if problem.c is not None and k:
        obj = obj + np.asarray(problem.c, dtype=float) @ y
    cons = []
    eq = in_ = None
    if problem.b_eq is not None and len(problem.b_eq):
        eq = lin(problem.A_eq, problem.F_eq) == np.asarray(problem.b_eq, dtype=float)
        cons.append(eq)
    if problem.b_in is not None and len(problem.b_in):
        in_ = lin(problem.A_in, problem.F_in) <= np.asarray(problem.b_in, dtype=float)
        cons.append(in_)
    prob = cp.Problem(cp.Minimize(obj), cons)

    names = _SOLVER_ORDER.get(cfg.method.lower(), [cfg.method.upper()])
    last_err, best = None, None
    for name in names:
        if name not in cp.installed_solvers():
            continue
        if name == "SCS":
            opts = {"max_iters": cfg.max_iterations, "eps_abs": cfg.tolerance, "eps_rel": cfg.tolerance}
        else:
            opts = {"max_iter": cfg.max_iterations}
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", UserWarning)
                prob.solve(solver=name, **opts)
        except (cp.error.SolverError, ValueError) as e:  # pragma: no cover - solver specific
            last_err = e
            continue
        if prob.value is None or not np.isfinite(prob.value):
            last_err = f"{name}: status {prob.status}"
            continue
        best = name
        if prob.status == "optimal":
            break
    if best is None:
        raise NoConvergence(f"no solver converged ({last_err})")

    Xv = [(X.value + X.value.T) / 2 for X in Xs]
    yv = np.asarray(y.value, dtype=float) if k else np.zeros(0)
    value = float(prob.value)
    ye = np.asarray(eq.dual_value, dtype=float).reshape(-1) if eq is not None else np.zeros(0)
    yi = np.asarray(in_.dual_value, dtype=float).reshape(-1) if in_ is not None else np.zeros(0)
    dual_value = 0.0
    if ye.size:
        dual_value -= float(ye @ np.asarray(problem.b_eq, dtype=float))
    if yi.size:
        dual_value -= float(yi @ np.asarray(problem.b_in, dtype=float))
    gap = abs(value - dual_value)
    viol = [max(0.0, -np.linalg.eigvalsh(X).min()) for X in Xv if X.size]
    iters = prob.solver_stats.num_iters if prob.solver_stats is not None else None
    res = SDPResult(Xv, yv, value, dual_value, (ye, yi), gap, max(viol, default=0.0),
                    prob.status, best, iters)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise NoConvergence(f"solver status {prob.status}", best=res)
    return res


# ------------------------------------------------------------------ Gram solutions


@dataclass(eq=False)
class GramSolution:
    f: BooleanFunction
    m: int
    vectors: Mapping[tuple, np.ndarray]
    costs: tuple
    objective: float = field(default=None)
    feasibility_residual: float = field(default=None)

    def __post_init__(self):
        self.vectors = {k: np.asarray(v, dtype=float).reshape(self.m) for k, v in self.vectors.items()}
        self.costs = tuple(float(c) for c in self.costs)
        if self.objective is None:
            self.objective = gram_objective(self.f, self.vectors, self.costs)
        if self.feasibility_residual is None:
            self.feasibility_residual = gram_residual(self.f, self.vectors)

    def block(self, j: int) -> np.ndarray:
        """X_j, the Gram matrix of the bit-j vectors over the domain."""
        V = np.array([self.vectors[(x, j)] for x in self.f.domain]).reshape(len(self.f.domain), self.m)
        return V @ V.T

    def gram(self) -> np.ndarray:
        """Full Gram matrix indexed by xi*n + j; only same-j entries are constrained."""
        n = self.f.n
        V = np.array([self.vectors[(x, j)] for x in self.f.domain for j in range(n)])
        return V @ V.T if V.size else np.zeros((len(self.f.domain) * n,) * 2)

    def to_dict(self, include_vectors: bool = False) -> dict:
        d = {"kind": "gram_solution", "rank": self.m, "objective": self.objective,
             "feasibility_residual": self.feasibility_residual, "costs": list(self.costs)}
        if include_vectors:
            d["vectors"] = {f"{x},{j + 1}": v.tolist() for (x, j), v in self.vectors.items()}
        return d


def gram_objective(f: BooleanFunction, vectors, costs) -> float:
    return max((sum(costs[j] * float(vectors[(x, j)] @ vectors[(x, j)]) for j in range(f.n))
                for x in f.domain), default=0.0)


def gram_residual(f: BooleanFunction, vectors) -> float:
    worst = 0.0
    for x in f.F0:
        for y in f.F1:
            tot = sum(float(vectors[(x, j)] @ vectors[(y, j)]) for j in range(f.n) if x[j] != y[j])
            worst = max(worst, abs(tot - 1))
    return worst


def _dual_problem(f: BooleanFunction, s: np.ndarray, equality: bool) -> SDPProblem:
    """Block j holds X_j over the domain; variable y = (t,) is the epigraph."""
    n, D = f.n, list(f.domain)
    N = len(D)
    pos = {x: i for i, x in enumerate(D)}
    off = [j * N * N for j in range(n)]
    rows, cols, vals = [], [], []
    r = 0
    for x in f.F0:
        for y in f.F1:
            a, b = pos[x], pos[y]
            for j in range(n):
                if x[j] != y[j]:
                    rows += [r, r]
                    cols += [off[j] + a + b * N, off[j] + b + a * N]
                    vals += [0.5, 0.5]
            r += 1
    width = n * N * N
    pair = sp.csr_matrix((vals, (rows, cols)), shape=(r, width))
    # epigraph rows: Σ_j s_j X_j[x,x] - t <= 0
    er = [i for i in range(N) for _ in range(n)]
    ec = [off[j] + i + i * N for i in range(N) for j in range(n)]
    ev = [s[j] for _ in range(N) for j in range(n)]
    epi = sp.csr_matrix((ev, (er, ec)), shape=(N, width))
    F_epi = -np.ones((N, 1))
    sizes = [N] * n
    if equality:
        return SDPProblem(sizes, c=np.array([1.0]), free=1, A_eq=pair, F_eq=np.zeros((r, 1)), b_eq=np.ones(r),
                          A_in=epi, F_in=F_epi, b_in=np.zeros(N))
    A_in = sp.vstack([epi, -pair]).tocsr()
    F_in = np.vstack([F_epi, np.zeros((r, 1))])
    b_in = np.concatenate([np.zeros(N), -np.ones(r)])
    return SDPProblem(sizes, c=np.array([1.0]), free=1, A_in=A_in, F_in=F_in, b_in=b_in)


def factor_gram(X: np.ndarray, tol: float) -> np.ndarray:
    """Rows V with V V^T ≈ X, dropping eigenvalues below tol·λ_max."""
    ev, U = np.linalg.eigh((X + X.T) / 2)
    lam_max = ev.max(initial=0.0)
    keep = ev > tol * lam_max if lam_max > 0 else np.zeros_like(ev, dtype=bool)
    order = np.argsort(-ev[keep])
    return (U[:, keep] * np.sqrt(ev[keep]))[:, order]


def _zero_solution(f, s):
    vecs = {(x, j): np.zeros(0) for x in f.domain for j in range(f.n)}
    return GramSolution(f, 0, vecs, tuple(s), 0.0, 0.0)


def solve_advpm_dual(f: BooleanFunction, s=None, cfg: SDPConfig | None = None):
    """ADV±_s(f) and a Gram solution realizing it.

    Vectors for different bits never meet in a constraint, so each X_j is
    factored on its own and the factors are zero-padded to a common length
    m = max_j rank(X_j).  Constant functions give 0.
    """
    cfg = cfg or SDPConfig()
    s = cost_vector(f.n, s)
    if not f.F0 or not f.F1:
        return 0.0, _zero_solution(f, s)
    res = solve_sdp(_dual_problem(f, s, equality=True), cfg)
    Vs = [factor_gram(X, cfg.tolerance) for X in res.X]
    m = max(V.shape[1] for V in Vs)
    vecs = {}
    for j, V in enumerate(Vs):
        V = np.pad(V, ((0, 0), (0, m - V.shape[1])))
        for i, x in enumerate(f.domain):
            vecs[(x, j)] = V[i]
    g = GramSolution(f, m, vecs, tuple(s))
    g.sdp = res
    return float(res.value), g


@dataclass
class AdvDualResult:
    value: float
    blocks: list
    sdp: SDPResult | None


def solve_adv_dual(f: BooleanFunction, s=None, cfg: SDPConfig | None = None):
    """ADV_s(f) with its per-bit PSD blocks X_j (|D|×|D| each)."""
    cfg = cfg or SDPConfig()
    s = cost_vector(f.n, s)
    n, D = f.n, len(f.domain)
    if not f.F0 or not f.F1:
        return 0.0, AdvDualResult(0.0, [np.zeros((D, D)) for _ in range(n)], None)
    res = solve_sdp(_dual_problem(f, s, equality=False), cfg)
    return float(res.value), AdvDualResult(float(res.value), res.X, res)


# ------------------------------------------------------------------ span program bridge


def span_program_from_gram(f: BooleanFunction, g: GramSolution, tol: float = 1e-5) -> SpanProgram:
    """Canonical program over C^{F_0}: column (j, b, k) has entry v_{xj}[k] at
    each false x with x_j != b."""
    F0 = f.F0
    if not F0:
        raise EmptyFalseSet("f has no false inputs", trivial=trivial_program(f.n))
    if g.feasibility_residual > tol:
        raise InfeasibleGram(f"feasibility residual {g.feasibility_residual:.3g} exceeds {tol:g}")
    inputs = {}
    for j in range(f.n):
        for b in (0, 1):
            B = np.zeros((len(F0), g.m))
            for r, x in enumerate(F0):
                if int(x[j]) != b:
                    B[r] = g.vectors[(x, j)]
            inputs[(j, b)] = B
    return SpanProgram(f.n, np.ones(len(F0)), None, inputs, basis_labels=tuple(F0))


def gram_from_span_program(P: SpanProgram, s=None, domain=None) -> GramSolution:
    """Read Gram vectors off a canonical real program.

    False x uses the rows of the blocks (j, 1-x_j); true y uses its optimal
    witness restricted to the blocks (j, y_j).  Both live in the coordinates
    of the pair of blocks for bit j, padded to a common length.
    """
    if not P.is_real:
        raise NotCanonical("program has complex entries")
    if not is_canonical(P):
        raise NotCanonical("program is not canonical (needs basis_labels, unit target, no free vectors)")
    s = cost_vector(P.n, s)
    F0 = list(P.basis_labels)
    f = P.truth_table(domain)
    if set(f.F0) - set(F0):
        raise NotCanonical("false inputs missing from the basis labels")
    sl = P.block_slices()
    widths = [P.inputs[(j, 0)].shape[1] + P.inputs[(j, 1)].shape[1] for j in range(P.n)]
    m = max(widths, default=0)
    vecs = {}
    row = {x: r for r, x in enumerate(F0)}
    for x in f.F0:
        for j in range(P.n):
            b = 1 - int(x[j])
            v = np.zeros(m)
            off = 0 if b == 0 else P.inputs[(j, 0)].shape[1]
            B = P.inputs[(j, b)].real
            v[off:off + B.shape[1]] = B[row[x]]
            vecs[(x, j)] = v
    for y in f.F1:
        w = witness_true(P, y, s).witness.real
        for j in range(P.n):
            b = int(y[j])
            v = np.zeros(m)
            off = 0 if b == 0 else P.inputs[(j, 0)].shape[1]
            seg = w[sl[(j, b)]]
            v[off:off + seg.size] = seg
            vecs[(y, j)] = v
    return GramSolution(f, m, vecs, tuple(s))


def compose_gram_solutions(outer: GramSolution, inner: Sequence[GramSolution],
                           tol: float = 1e-4) -> GramSolution:
    """Gram solution for g(x) = f(f_1(x_1), ..., f_n(x_n)) on disjoint blocks.

    w_{x,(j,k)} = v_{y(x) j} ⊗ v^j_{x_j k} ⊗ e_{[g(x) = f_j(x_j)]}, the middle
    factor placed in block j of the direct sum of inner spaces.
    """
    f = outer.f
    if len(inner) != f.n:
        raise BadParams(f"outer arity {f.n} but {len(inner)} inner solutions")
    for j, h in enumerate(inner):
        if abs(outer.costs[j] - h.objective) > tol * (1 + h.objective):
            raise CostMismatch(f"outer cost {outer.costs[j]:.6g} for bit {j + 1} but inner objective "
                               f"{h.objective:.6g}")
    g = boolfn.compose(f, [h.f for h in inner], "disjoint")
    offsets = list(itertools.accumulate([0] + [h.f.n for h in inner]))
    moff = list(itertools.accumulate([0] + [h.m for h in inner]))
    M = moff[-1]
    dim = outer.m * M * 2
    vecs = {}
    for x in g.domain:
        parts = [x[offsets[j]:offsets[j + 1]] for j in range(f.n)]
        yv = "".join(str(h.f.table[p]) for h, p in zip(inner, parts))
        gx = g.table[x]
        for j, h in enumerate(inner):
            delta = np.array([0.0, 1.0]) if gx == int(yv[j]) else np.array([1.0, 0.0])
            left = outer.vectors[(yv, j)]
            for k in range(h.f.n):
                mid = np.zeros(M)
                mid[moff[j]:moff[j + 1]] = h.vectors[(parts[j], k)]
                vecs[(x, offsets[j] + k)] = np.kron(np.kron(left, mid), delta)
    costs = tuple(c for h in inner for c in h.costs)
    return GramSolution(g, dim, vecs, costs)


# ------------------------------------------------------------------ symmetric functions


def symmetric_adv_upper(f: BooleanFunction, p: Sequence[float], tol: float = 1e-12) -> float:
    """Upper bound on ADV(f) from weight-dependent dual distributions.

    ``p[i]`` is the probability on each 1-bit at weight i; 0-bits get
    (1 - i p[i]) / (n - i).
    """
    if not boolfn.is_symmetric(f):
        raise NotSymmetric("f is not a symmetric total function")
    n = f.n
    if len(p) != n + 1:
        raise BadDistribution(f"need {n + 1} per-weight probabilities, got {len(p)}")
    p = [float(v) for v in p]
    if abs(p[0]) > tol:
        raise BadDistribution("p_0 must be 0")
    for i in range(1, n + 1):
        if p[i] < -tol or i * p[i] > 1 + tol:
            raise BadDistribution(f"p_{i} = {p[i]} outside [0, 1/{i}]")
    q = [(1 - i * p[i]) / (n - i) if i < n else 0.0 for i in range(n + 1)]
    prof = boolfn.weight_profile(f)
    best = 0.0
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            if prof[i] != prof[j]:
                denom = (j - i) * math.sqrt(max(q[i], 0.0) * max(p[j], 0.0))
                best = max(best, math.inf if denom == 0 else 1 / denom)
    return best


def interval_dual_distribution(l: int, m: int, n: int) -> list[float]:
    """Per-weight 1-bit probabilities that balance the (l-1, i) and (i, m+1) pairs.

    When m sits farther from n/2 than l does, the rule is applied to the
    bit-complemented function interval(n-m, n-l, n) and mapped back.
    """
    if not (0 <= l <= m <= n):
        raise BadParams(f"interval needs 0 <= l <= m <= n, got {(l, m, n)}")
    if abs(n / 2 - m) > abs(n / 2 - l):
        q = interval_dual_distribution(n - m, n - l, n)
        # complementing bits sends weight k to n-k and swaps the roles of p and p'
        q0 = [(1 - k * q[k]) / (n - k) if k < n else 0.0 for k in range(n + 1)]
        return [0.0] + [q0[n - i] for i in range(1, n + 1)]
    p = [0.0] * (n + 1)
    for i in range(1, n + 1):
        if i >= m + 1:
            p[i] = 1 / i
        elif i < l or l == 0:
            p[i] = 0.0
        else:
            p[i] = 1 / (i + (m + 1) * (n - i) / (n - l + 1) * ((i - l + 1) / (m - i + 1)) ** 2)
    return p


# ------------------------------------------------------------------ sign degree


@dataclass
class SignDegreeCertificate:
    degree: int
    coefficients: dict  # tuple of 0-based bit indices -> coefficient

    def __call__(self, x: str) -> float:
        return sum(c for S, c in self.coefficients.items() if all(x[i] == "1" for i in S))

    def margin(self, f: BooleanFunction) -> float:
        return min(((-1) ** f.table[x]) * self(x) for x in f.domain)


SIGN_DEGREE_CAP = 12


def sign_degree(f: BooleanFunction, max_degree: int | None = None) -> SignDegreeCertificate:
    """Least d with a multilinear p of degree <= d and (-1)^{f(x)} p(x) >= 1 on the domain."""
    n = f.n
    if n > SIGN_DEGREE_CAP:
        raise DomainTooLarge(f"sign_degree supports n <= {SIGN_DEGREE_CAP}")
    max_degree = n if max_degree is None else max_degree
    dom = list(f.domain)
    sgn = np.array([(-1) ** f.table[x] for x in dom], dtype=float)
    Xb = np.array([[int(c) for c in x] for x in dom], dtype=float).reshape(len(dom), n)
    mons: list[tuple] = []
    for d in range(0, max_degree + 1):
        mons += list(itertools.combinations(range(n), d))
        M = np.column_stack([np.prod(Xb[:, list(S)], axis=1) if S else np.ones(len(dom)) for S in mons])
        # -(sgn * M) c <= -1
        r = linprog(np.zeros(len(mons)), A_ub=-(sgn[:, None] * M), b_ub=-np.ones(len(dom)),
                    bounds=[(None, None)] * len(mons), method="highs")
        if r.status == 0:
            cert = SignDegreeCertificate(d, {S: float(c) for S, c in zip(mons, r.x) if c != 0})
            return cert
    raise NotFound(f"no sign-representing polynomial of degree <= {max_degree}")
