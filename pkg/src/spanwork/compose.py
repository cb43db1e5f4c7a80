"""Span program composition, AND/OR gate programs and Hamming-weight constructions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ArityMismatch, BadParams, DimensionTooLarge, SizeCap
from .spanprog import SpanProgram, dualize, relabel, witness_false, witness_true

DIM_CAP = 4096
THRESHOLD_L_CAP = 4


# ---------------------------------------------------------------- helpers


def normalize_inner(P: SpanProgram, inner) -> dict:
    """Return the full ``(j, c) -> program`` map, filling (j, 0) by duality."""
    if isinstance(inner, Mapping):
        inner = dict(inner)
    else:
        inner = {(j, 1): Q for j, Q in enumerate(inner)}
    for j in range(P.n):
        if (j, 1) not in inner:
            raise ArityMismatch(f"no inner program for outer bit {j}")
        if (j, 0) not in inner:
            inner[(j, 0)] = dualize(inner[(j, 1)])
    if len(inner) != 2 * P.n:
        raise ArityMismatch("inner programs keyed outside the outer arity")
    arities = {Q.n for Q in inner.values()}
    if len(arities) != 1:
        raise ArityMismatch(f"inner programs disagree on arity: {sorted(arities)}")
    return inner


def embed_disjoint(programs: Sequence[SpanProgram]) -> list[SpanProgram]:
    """Place each program on its own block of a concatenated input."""
    total = sum(P.n for P in programs)
    out, off = [], 0
    for P in programs:
        out.append(relabel(P, total, [off + k for k in range(P.n)]))
        off += P.n
    return out


def _columns(P: SpanProgram):
    """(label, column index within A, vector) for every input vector."""
    A = P.A
    return [(lab, i, A[:, i]) for i, lab in enumerate(P.labels)]


class _Builder:
    """Accumulates tagged columns and emits a SpanProgram in canonical order."""

    def __init__(self, n):
        self.n = n
        self.free, self.free_tags = [], []
        self.blocks = {}
        self.tags = {}

    def add(self, label, vec, tag):
        if label is None:
            self.free.append(vec)
            self.free_tags.append(tag)
        else:
            self.blocks.setdefault(label, []).append(vec)
            self.tags.setdefault(label, []).append(tag)

    def build(self, target):
        P = SpanProgram(self.n, target, self.free, self.blocks)
        order = list(self.free_tags)
        for j in range(self.n):
            for b in (0, 1):
                order += self.tags.get((j, b), [])
        return P, {tag: k for k, tag in enumerate(order)}


@dataclass
class Composition:
    """A composed program plus the bookkeeping needed to build explicit witnesses."""

    program: SpanProgram
    outer: SpanProgram
    inner: dict
    method: str
    index: dict  # tag -> column of program.A


# ---------------------------------------------------------------- the three constructions


def direct_sum_compose(P: SpanProgram, inner, with_index: bool = False):
    inner = normalize_inner(P, inner)
    m = next(iter(inner.values())).n
    cols = _columns(P)
    offs, pos = {}, P.dim
    for lab, i, _ in cols:
        if lab is not None:
            offs[i] = pos
            pos += inner[lab].dim
    D = pos

    def lift(i, v):
        out = np.zeros(D, dtype=complex)
        out[offs[i]:offs[i] + v.shape[0]] = v
        return out

    bld = _Builder(m)
    for lab, i, v in cols:
        base = np.zeros(D, dtype=complex)
        base[:P.dim] = v
        if lab is None:
            bld.add(None, base, ("o", i))
        else:
            bld.add(None, base - lift(i, inner[lab].target), ("o", i))
    for lab, i, _ in cols:
        if lab is None:
            continue
        for lab2, i2, v2 in _columns(inner[lab]):
            bld.add(lab2, lift(i, v2), ("p", i, i2))
    t = np.zeros(D, dtype=complex)
    t[:P.dim] = P.target
    Q, index = bld.build(t)
    return Composition(Q, P, inner, "direct_sum", index) if with_index else Q


def _factor_order(n):
    return [(j, c) for j in range(n) for c in (0, 1)]


def _kron_all(vs):
    out = np.ones(1, dtype=complex)
    for v in vs:
        out = np.kron(out, v)
    return out


def tensor_compose(P: SpanProgram, inner, with_index: bool = False, dim_cap: int = DIM_CAP):
    inner = normalize_inner(P, inner)
    m = next(iter(inner.values())).n
    order = _factor_order(P.n)
    D = P.dim * math.prod(inner[k].dim for k in order)
    if D > dim_cap:
        raise DimensionTooLarge(f"tensor dimension {D} exceeds cap {dim_cap}")
    ts = {k: inner[k].target for k in order}

    def vec(u, override=None):
        fs = [override[1] if override and k == override[0] else ts[k] for k in order]
        return np.kron(u, _kron_all(fs))

    return _tensor_like(P, inner, m, vec, vec(P.target), "tensor", with_index)


def _tensor_like(P, inner, m, vec, target, method, with_index):
    bld = _Builder(m)
    cols = _columns(P)
    for lab, i, v in cols:
        if lab is None:
            bld.add(None, vec(v), ("o", i))
    for lab, i, v in cols:
        if lab is None:
            continue
        for lab2, i2, v2 in _columns(inner[lab]):
            bld.add(lab2, vec(v, (lab, v2)), ("p", i, i2))
    Q, index = bld.build(target)
    return Composition(Q, P, inner, method, index) if with_index else Q


def reduced_tensor_compose(P: SpanProgram, inner, with_index: bool = False, zero_tol: float = 0.0):
    """Tensor composition with the outer space split along its standard basis.

    Coordinate l keeps only the inner factors (j, c) for which some vector in
    I_{jc} has a nonzero l-th entry; the dropped factors contribute the
    scalar ‖t^{jc}‖.
    """
    inner = normalize_inner(P, inner)
    m = next(iter(inner.values())).n
    order = _factor_order(P.n)
    sl = P.block_slices()
    A = P.A
    thr = zero_tol * (np.abs(A).max() if A.size else 0.0)
    kept, pis, offs = [], [], []
    pos = 0
    for l in range(P.dim):
        keep = [k for k in order if np.any(np.abs(A[l, sl[k]]) > thr)]
        Z = [k for k in order if k not in keep]
        kept.append(keep)
        pis.append(math.prod(float(np.linalg.norm(inner[k].target)) for k in Z))
        offs.append(pos)
        pos += math.prod(inner[k].dim for k in keep)
    D = pos
    ts = {k: inner[k].target for k in order}

    def vec(u, override=None):
        out = np.zeros(D, dtype=complex)
        for l in range(P.dim):
            if u[l] == 0:
                continue
            fs = [override[1] if override and k == override[0] else ts[k] for k in kept[l]]
            blk = u[l] * pis[l] * _kron_all(fs)
            out[offs[l]:offs[l] + blk.shape[0]] = blk
        return out

    return _tensor_like(P, inner, m, vec, vec(P.target), "reduced_tensor", with_index)


METHODS = {
    "direct_sum": direct_sum_compose,
    "tensor": tensor_compose,
    "reduced_tensor": reduced_tensor_compose,
}


def compose_programs(P, inner, method="direct_sum", **kw):
    try:
        fn = METHODS[method]
    except KeyError:
        raise BadParams(f"unknown composition method {method!r}") from None
    return fn(P, inner, **kw)


# ---------------------------------------------------------------- witnesses from the composition proof


def inner_values(comp: Composition, x: str) -> str:
    from .spanprog import evaluate

    return "".join(str(evaluate(comp.inner[(j, 1)], x)) for j in range(comp.outer.n))


def proof_true_witness(comp: Composition, x: str, s=None) -> np.ndarray:
    """Product witness w_{(i,i')} = w_i · w^{jc(i)}_{i'} built from optimal pieces."""
    P, inner = comp.outer, comp.inner
    y = inner_values(comp, x)
    r = np.array([_inner_wsize_bound(comp, j, s) for j in range(P.n)])
    wo = witness_true(P, y, r).witness
    w = np.zeros(comp.program.num_inputs, dtype=complex)
    labs = P.labels
    for i, lab in enumerate(labs):
        if lab is None:
            w[comp.index[("o", i)]] = wo[i]
            continue
        if comp.method == "direct_sum" and int(y[lab[0]]) == lab[1]:
            w[comp.index[("o", i)]] = wo[i]
        if int(y[lab[0]]) != lab[1] or wo[i] == 0:
            continue
        wi = witness_true(inner[lab], x, s).witness
        for i2, c in enumerate(wi):
            w[comp.index[("p", i, i2)]] = wo[i] * c
    return w


def _inner_wsize_bound(comp, j, s):
    from .spanprog import witness_size

    return max(witness_size(comp.inner[(j, c)], None, s) for c in (0, 1))


def weighted_norm2(Q: SpanProgram, w: np.ndarray, s=None) -> float:
    return float(np.sum(Q.weights(s) * np.abs(w) ** 2))


def proof_false_witness(comp: Composition, x: str, s=None) -> np.ndarray:
    """Negative witness built from the optimal outer and inner negative witnesses."""
    P, inner, Q = comp.outer, comp.inner, comp.program
    y = inner_values(comp, x)
    r = np.array([_inner_wsize_bound(comp, j, s) for j in range(P.n)])
    u = witness_false(P, y, r).witness
    if comp.method == "direct_sum":
        out = np.zeros(Q.dim, dtype=complex)
        out[:P.dim] = u
        pos = P.dim
        A = P.A
        for i, lab in enumerate(P.labels):
            if lab is None:
                continue
            d = inner[lab].dim
            if int(y[lab[0]]) != lab[1]:
                ui = witness_false(inner[lab], x, s).witness
                out[pos:pos + d] = np.vdot(A[:, i], u) * ui
            pos += d
        return out
    factors = {}
    for j in range(P.n):
        yj = int(y[j])
        factors[(j, 1 - yj)] = witness_false(inner[(j, 1 - yj)], x, s).witness
        t = inner[(j, yj)].target
        factors[(j, yj)] = t / np.vdot(t, t).real
    if comp.method == "tensor":
        return np.kron(u, _kron_all([factors[k] for k in _factor_order(P.n)]))
    raise BadParams("explicit negative witnesses are provided for direct_sum and tensor only")


# ---------------------------------------------------------------- gates and formulas


def and_gate(alpha, beta) -> SpanProgram:
    """P_AND of fan-in k: t = (α_1..α_k), v_j = β_j e_j labeled (j, 1)."""
    alpha, beta = np.asarray(alpha, float), np.asarray(beta, float)
    if alpha.shape != beta.shape or np.any(alpha <= 0) or np.any(beta <= 0):
        raise BadParams("gate parameters must be positive and of equal length")
    k = alpha.shape[0]
    return SpanProgram(k, alpha, None, {(j, 1): [beta[j] * np.eye(k)[j]] for j in range(k)})


def or_gate(delta, eps) -> SpanProgram:
    """P_OR of fan-in k: t = δ, v_j = ε_j labeled (j, 1)."""
    eps = np.asarray(eps, float)
    if delta <= 0 or np.any(eps <= 0):
        raise BadParams("gate parameters must be positive")
    return SpanProgram(eps.shape[0], [delta], None, {(j, 1): [[eps[j]]] for j in range(eps.shape[0])})


def balanced(sizes) -> dict:
    """Gate parameters tuned for subformula sizes (costs are their square roots)."""
    sizes = np.asarray(sizes, float)
    if np.any(sizes <= 0):
        raise BadParams("sizes must be positive")
    w = (sizes / sizes.sum()) ** 0.25
    return {"alpha": w, "beta": np.ones_like(w), "delta": 1.0, "eps": w}


def balanced_and(*sizes) -> SpanProgram:
    p = balanced(sizes)
    return and_gate(p["alpha"], p["beta"])


def balanced_or(*sizes) -> SpanProgram:
    p = balanced(sizes)
    return or_gate(p["delta"], p["eps"])


def leaf_program(n: int, j: int) -> SpanProgram:
    """x ↦ x_j (0-based j) on n bits."""
    return SpanProgram(n, [1.0], None, {(j, 1): [[1.0]]})


def formula_leaves(tree) -> list[int]:
    if isinstance(tree, int):
        return [tree]
    return [k for sub in tree[1:] for k in formula_leaves(sub)]


def formula_arity(tree) -> int:
    return max(formula_leaves(tree))


def evaluate_formula(tree, x: str) -> int:
    if isinstance(tree, int):
        return int(x[tree - 1])
    op, args = tree[0], tree[1:]
    vals = [evaluate_formula(a, x) for a in args]
    if op == "and":
        return int(all(vals))
    if op == "or":
        return int(any(vals))
    if op == "not":
        return 1 - vals[0]
    raise BadParams(f"unknown gate {op!r}")


def check_formula(tree, _root=True):
    if isinstance(tree, bool) or not isinstance(tree, (int, list, tuple)):
        raise BadParams(f"bad formula node {tree!r}")
    if isinstance(tree, int):
        if tree < 1:
            raise BadParams("leaves are 1-based bit indices")
        return
    if not tree or tree[0] not in ("and", "or", "not"):
        raise BadParams(f"bad gate in {tree!r}")
    if tree[0] == "not" and len(tree) != 2:
        raise BadParams("not takes one argument")
    if tree[0] != "not" and len(tree) < 3:
        raise BadParams("and/or need at least two arguments")
    for sub in tree[1:]:
        check_formula(sub, False)


def formula_span_program(tree, method: str = "direct_sum", weighting: str = "balanced",
                         n: int | None = None) -> SpanProgram:
    """Compose gate programs along a formula tree given as nested lists."""
    check_formula(tree)
    n = n or formula_arity(tree)

    def build(node):
        if isinstance(node, int):
            return leaf_program(n, node - 1), 1
        op, args = node[0], node[1:]
        if op == "not":
            Q, size = build(args[0])
            return dualize(Q), size
        subs = [build(a) for a in args]
        sizes = [sz for _, sz in subs]
        if weighting == "balanced":
            gate = balanced_and(*sizes) if op == "and" else balanced_or(*sizes)
        elif weighting == "uniform":
            k = len(args)
            gate = and_gate(np.ones(k), np.ones(k)) if op == "and" else or_gate(1.0, np.ones(k))
        else:
            raise BadParams(f"unknown weighting {weighting!r}")
        Q = compose_programs(gate, [q for q, _ in subs], method)
        return Q, sum(sizes)

    return build(tree)[0]


# ---------------------------------------------------------------- Hamming-weight constructions


def threshold_span_program(l: int, n: int, balanced: bool = False, l_cap: int = THRESHOLD_L_CAP) -> SpanProgram:
    """Recursive program for T_l^n.

    The unbalanced form has true sizes at most 1 and false sizes at most
    l(n-l+1). ``balanced=True`` multiplies the target by (l(n-l+1))^{1/4} so
    both sides are bounded by sqrt(l(n-l+1)).
    """
    if not (1 <= l <= n):
        raise BadParams(f"threshold program needs 1 <= l <= n, got l={l}, n={n}")
    if l > l_cap:
        raise SizeCap(f"l={l} exceeds cap {l_cap}")
    P = _threshold_rec(l, n)
    if balanced:
        P = P.replace(target=P.target * (l * (n - l + 1)) ** 0.25)
    return P


def _threshold_rec(l, n):
    if l == 1:
        return SpanProgram(n, [1.0], None, {(i, 1): [[1.0]] for i in range(n)})
    sub = _threshold_rec(l - 1, n - 1)
    d = sub.dim
    D = 1 + n * d
    tp = np.zeros(d)
    tp[0] = 1.0
    assert np.allclose(sub.target, tp)
    inputs = {}
    for i in range(n):
        v = np.zeros(D, dtype=complex)
        v[0] = 1.0
        v[1 + i * d:1 + (i + 1) * d] = math.sqrt(l - 1) * tp
        inputs.setdefault((i, 1), []).append(v)
        for (k, b), M in sub.inputs.items():
            kk = k if k < i else k + 1
            for col in M.T:
                u = np.zeros(D, dtype=complex)
                u[1 + i * d:1 + (i + 1) * d] = col
                inputs.setdefault((kk, b), []).append(u)
    t = np.zeros(D)
    t[0] = 1.0
    return SpanProgram(n, t, None, inputs)


def interval_bound(l: int, m: int, n: int) -> float:
    if l == 0:
        return math.sqrt((m + 1) * (n - m))
    return math.sqrt((m + 1) * (n - m) + l * (n - l + 1) / (m - l + 1))


def interval_span_program(l: int, m: int, n: int, balanced: bool = True) -> SpanProgram:
    """Conjunction of T_l^n on x and T_{n-m}^n on x̄ over V' ⊕ V''.

    Unbalanced, true sizes are at most B² and false sizes at most 1, with B
    the closed-form bound; ``balanced`` scales the target by B^{-1/2}.
    """
    if not (0 <= l <= m <= n):
        raise BadParams(f"interval needs 0 <= l <= m <= n, got {(l, m, n)}")
    if abs(n / 2 - m) > abs(n / 2 - l):
        raise BadParams("construction assumes |n/2 - m| <= |n/2 - l|; use the complement symmetry")
    parts = []
    if l > 0:
        parts.append((_threshold_rec(l, n), math.sqrt(l * (n - l + 1)), False))
    if m < n:
        if n - m > THRESHOLD_L_CAP:
            raise SizeCap(f"n-m={n - m} exceeds cap {THRESHOLD_L_CAP}")
        parts.append((_threshold_rec(n - m, n), math.sqrt((n - m) * (m + 1)), True))
    if not parts:
        return SpanProgram(n, [0.0])
    if l > THRESHOLD_L_CAP:
        raise SizeCap(f"l={l} exceeds cap {THRESHOLD_L_CAP}")
    D = sum(p.dim for p, _, _ in parts)
    t = np.zeros(D, dtype=complex)
    inputs = {}
    pos = 0
    for p, scale, flip in parts:
        t[pos:pos + p.dim] = scale * p.target
        for (k, b), M in p.inputs.items():
            for col in M.T:
                u = np.zeros(D, dtype=complex)
                u[pos:pos + p.dim] = col
                inputs.setdefault((k, 1 - b if flip else b), []).append(u)
        pos += p.dim
    P = SpanProgram(n, t, None, inputs)
    if balanced:
        P = P.replace(target=t / math.sqrt(interval_bound(l, m, n)))
    return P
