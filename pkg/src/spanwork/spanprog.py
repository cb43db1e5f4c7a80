"""Span programs: data model, evaluation, witness sizes and single-program transforms.

Indexing conventions
--------------------
Input bits are 0-based internally (``j`` in ``range(n)``); the JSON form
uses 1-based ``"j,b"`` keys. The column order of ``A`` is the canonical
index order: free vectors first, then the ``(j, b)`` blocks in
lexicographic order.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import boolfn
from .boolfn import BooleanFunction, all_strings
from .errors import (
    BadParams,
    EmptyFalseSet,
    NotClean,
    NotFalse,
    NotOneSided,
    NotTrue,
    SchemaError,
    Singular,
)

RANGE_TOL = 1e-8
COND_CAP = 1e12


# ---------------------------------------------------------------- linear algebra


RANK_RCOND = 1e-12


def _rcond(shape) -> float:
    # generous on purpose: inputs are often products of several factorizations
    return RANK_RCOND if max(shape) else 0.0


def complement_basis(K: np.ndarray, d: int | None = None, scale: float = 0.0) -> np.ndarray:
    """Orthonormal basis (as columns) of the orthogonal complement of range(K).

    Singular values at or below ``max(dims)·eps·max(σ_max, scale)`` count as
    zero. ``scale`` lets a caller measure rank against a whole program rather
    than a sub-block that may consist of rounding noise.
    """
    if d is None:
        d = K.shape[0]
    if K.size == 0 or K.shape[1] == 0:
        return np.eye(d, dtype=complex)
    U, sv, _ = np.linalg.svd(K, full_matrices=True)
    ref = max(sv[0] if sv.size else 0.0, scale)
    if ref == 0:
        return np.eye(d, dtype=complex)
    rank = int(np.sum(sv > _rcond(K.shape) * ref))
    return U[:, rank:]


def range_basis(K: np.ndarray, d: int | None = None, scale: float = 0.0) -> np.ndarray:
    """Orthonormal basis (as columns) of range(K), same cutoff as complement_basis."""
    if d is None:
        d = K.shape[0]
    if K.size == 0 or K.shape[1] == 0:
        return np.zeros((d, 0), dtype=complex)
    U, sv, _ = np.linalg.svd(K, full_matrices=False)
    ref = max(sv[0], scale)
    if ref == 0:
        return np.zeros((d, 0), dtype=complex)
    return U[:, : int(np.sum(sv > _rcond(K.shape) * ref))]


def pinv(K: np.ndarray, scale: float = 0.0) -> np.ndarray:
    if K.size == 0:
        return np.zeros((K.shape[1], K.shape[0]), dtype=complex)
    U, sv, Vh = np.linalg.svd(K, full_matrices=False)
    ref = max(sv[0], scale)
    keep = sv > _rcond(K.shape) * ref
    return (Vh[keep].conj().T / sv[keep]) @ U[:, keep].conj().T


def range_residual(K: np.ndarray, b: np.ndarray, scale: float = 0.0) -> float:
    """‖K K⁺ b − b‖, computed through the complement basis."""
    N = complement_basis(K, b.shape[0], scale)
    return float(np.linalg.norm(N.conj().T @ b))


def in_range(K: np.ndarray, b: np.ndarray, tol: float = RANGE_TOL, scale: float = 0.0) -> bool:
    return range_residual(K, b, scale) <= tol * (1 + np.linalg.norm(b))


# ---------------------------------------------------------------- data model

Label = tuple  # (j, b) or None for free


def _as_block(vecs, dim) -> np.ndarray:
    if isinstance(vecs, np.ndarray) and vecs.ndim == 2:
        M = np.asarray(vecs, dtype=complex)
        if M.shape[0] != dim:
            raise BadParams(f"block has {M.shape[0]} rows, expected {dim}")
        return M.copy()
    vecs = list(vecs)
    if not vecs:
        return np.zeros((dim, 0), dtype=complex)
    cols = [np.asarray(v, dtype=complex).reshape(-1) for v in vecs]
    for v in cols:
        if v.shape[0] != dim:
            raise BadParams(f"vector of length {v.shape[0]}, expected {dim}")
    return np.column_stack(cols)


@dataclass(frozen=True, eq=False)
class SpanProgram:
    """Target plus labeled input vectors.

    ``free`` is a ``dim × k`` matrix; ``inputs[(j, b)]`` likewise. Blocks are
    stored as matrices whose columns are the input vectors.
    """

    n: int
    target: np.ndarray
    free: np.ndarray = None
    inputs: Mapping[tuple, np.ndarray] = field(default_factory=dict)
    basis_labels: tuple | None = None

    def __post_init__(self):
        t = np.asarray(self.target, dtype=complex).reshape(-1)
        d = t.shape[0]
        object.__setattr__(self, "target", t)
        object.__setattr__(self, "free", _as_block([] if self.free is None else self.free, d))
        blocks = {}
        for j in range(self.n):
            for b in (0, 1):
                blocks[(j, b)] = _as_block(self.inputs.get((j, b), []), d)
        extra = set(self.inputs) - set(blocks)
        if extra:
            raise BadParams(f"labels out of range: {sorted(extra)}")
        object.__setattr__(self, "inputs", blocks)
        if self.basis_labels is not None:
            object.__setattr__(self, "basis_labels", tuple(self.basis_labels))
        for M in [t, self.free, *blocks.values()]:
            M.setflags(write=False)

    # -- derived structure
    @property
    def dim(self) -> int:
        return self.target.shape[0]

    @property
    def labels(self) -> list:
        """Label of every column of A, in canonical order (None marks free)."""
        out = [None] * self.free.shape[1]
        for j in range(self.n):
            for b in (0, 1):
                out += [(j, b)] * self.inputs[(j, b)].shape[1]
        return out

    @property
    def num_inputs(self) -> int:
        return len(self.labels)

    @property
    def A(self) -> np.ndarray:
        blocks = [self.free] + [self.inputs[(j, b)] for j in range(self.n) for b in (0, 1)]
        return np.hstack(blocks) if blocks else np.zeros((self.dim, 0), dtype=complex)

    def block_slices(self) -> dict:
        """Column range of each block: key None for free, (j,b) otherwise."""
        out = {None: slice(0, self.free.shape[1])}
        pos = self.free.shape[1]
        for j in range(self.n):
            for b in (0, 1):
                k = self.inputs[(j, b)].shape[1]
                out[(j, b)] = slice(pos, pos + k)
                pos += k
        return out

    def available(self, x: str) -> np.ndarray:
        """Boolean mask of I(x)."""
        _check_x(self, x)
        return np.array([lab is None or int(x[lab[0]]) == lab[1] for lab in self.labels], dtype=bool)

    def weights(self, s=None) -> np.ndarray:
        """Per-column cost s_j (0 on free columns)."""
        s = cost_vector(self.n, s)
        return np.array([0.0 if lab is None else s[lab[0]] for lab in self.labels])

    @property
    def scale(self) -> float:
        """Spectral norm of A; the reference magnitude for rank decisions."""
        A = self.A
        return float(np.linalg.norm(A, 2)) if A.size else 0.0

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.target.imag == 0) and np.all(self.A.imag == 0))

    @property
    def is_strict(self) -> bool:
        return self.free.shape[1] == 0

    def truth_table(self, domain: Iterable[str] | None = None) -> BooleanFunction:
        dom = list(domain) if domain is not None else all_strings(self.n)
        return BooleanFunction(self.n, tuple(dom), {x: evaluate(self, x) for x in dom})

    def replace(self, **kw) -> "SpanProgram":
        d = dict(n=self.n, target=self.target, free=self.free, inputs=self.inputs,
                 basis_labels=self.basis_labels)
        d.update(kw)
        return SpanProgram(**d)

    # -- serialization
    def to_dict(self) -> dict:
        def enc(v):
            return [[float(z.real), float(z.imag)] for z in v]

        d = {
            "kind": "span_program",
            "n": self.n,
            "dim": self.dim,
            "target": enc(self.target),
            "free": [enc(c) for c in self.free.T],
            "inputs": {f"{j + 1},{b}": [enc(c) for c in self.inputs[(j, b)].T]
                       for j in range(self.n) for b in (0, 1)},
        }
        if self.basis_labels is not None:
            d["basis_labels"] = list(self.basis_labels)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "SpanProgram":
        def dec(v, where):
            if not isinstance(v, list):
                raise SchemaError(f"{where}: expected a list of [re, im] pairs")
            out = []
            for k, z in enumerate(v):
                if isinstance(z, (int, float)):
                    out.append(complex(z))
                elif (isinstance(z, list) and len(z) == 2
                      and all(isinstance(u, (int, float)) for u in z)):
                    out.append(complex(z[0], z[1]))
                else:
                    raise SchemaError(f"{where}[{k}]: malformed complex entry {z!r}")
            return out

        try:
            n = int(d["n"])
            t = dec(d["target"], "target")
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"span_program: missing or malformed field ({e})") from e
        dim = int(d.get("dim", len(t)))
        if dim != len(t):
            raise SchemaError(f"dim: {dim} does not match target length {len(t)}")
        free = [dec(v, f"free[{k}]") for k, v in enumerate(d.get("free", []))]
        inputs = {}
        for key, vecs in d.get("inputs", {}).items():
            try:
                j, b = (int(u) for u in key.split(","))
            except ValueError:
                raise SchemaError(f"inputs: bad label {key!r}") from None
            if not (1 <= j <= n and b in (0, 1)):
                raise SchemaError(f"inputs: label {key!r} out of range")
            inputs[(j - 1, b)] = [dec(v, f"inputs[{key}][{k}]") for k, v in enumerate(vecs)]
        try:
            return cls(n, np.array(t, dtype=complex), free, inputs, d.get("basis_labels"))
        except BadParams as e:
            raise SchemaError(f"span_program: {e}") from e

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_x(P: SpanProgram, x: str):
    if len(x) != P.n or set(x) - {"0", "1"}:
        raise BadParams(f"{x!r} is not a {P.n}-bit string")


def cost_vector(n: int, s=None) -> np.ndarray:
    if s is None:
        return np.ones(n)
    s = np.asarray(s, dtype=float).reshape(-1)
    if s.shape[0] != n:
        raise BadParams(f"cost vector of length {s.shape[0]}, expected {n}")
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise BadParams("costs must be finite and nonnegative")
    return s


def make_program(n: int, target, free=(), inputs=None) -> SpanProgram:
    """Convenience constructor taking 1-based ``(j, b)`` labels."""
    inputs = inputs or {}
    return SpanProgram(n, np.asarray(target, dtype=complex), list(free),
                       {(j - 1, b): v for (j, b), v in inputs.items()})


def validate(P: SpanProgram) -> list[str]:
    """Report-only structural check. Returns diagnostic strings (empty = ok)."""
    out = []
    if not np.all(np.isfinite(P.target)) or not np.all(np.isfinite(P.A)):
        out.append("NonFinite: non-finite entries present")
    if np.linalg.norm(P.target) == 0:
        out.append("Warning: zero target; f_P is identically 1 with zero witness")
    return out


def validate_raw(d: Mapping) -> list[str]:
    """Like :func:`validate` but on the JSON form, catching length mismatches."""
    out = []
    dim = d.get("dim", len(d.get("target", [])))
    if len(d.get("target", [])) != dim:
        out.append(f"DimensionMismatch: target has length {len(d.get('target', []))}, dim is {dim}")
    for k, v in enumerate(d.get("free", [])):
        if len(v) != dim:
            out.append(f"DimensionMismatch: free[{k}] has length {len(v)}")
    for key, vecs in d.get("inputs", {}).items():
        for k, v in enumerate(vecs):
            if len(v) != dim:
                out.append(f"DimensionMismatch: inputs[{key}][{k}] has length {len(v)}")
    if not out:
        try:
            out += validate(SpanProgram.from_dict(d))
        except SchemaError as e:
            out.append(f"SchemaError: {e}")
    return out


# ---------------------------------------------------------------- evaluation and witnesses


@dataclass
class WitnessReport:
    value: int
    witness: np.ndarray
    size: float
    residual: float
    aux_norms: tuple


def evaluate(P: SpanProgram, x: str, tol: float = RANGE_TOL) -> int:
    K = P.A[:, P.available(x)]
    return int(in_range(K, P.target, tol, P.scale))


def witness_true(P: SpanProgram, x: str, s=None, tol: float = RANGE_TOL) -> WitnessReport:
    """Optimal positive witness; lexicographic (‖Sw‖², then ‖w‖) minimizer."""
    if not evaluate(P, x, tol):
        raise NotTrue(f"f_P({x}) = 0")
    A, t = P.A, P.target
    avail = P.available(x)
    wt = P.weights(s)
    Z = np.where(avail & (wt == 0))[0]
    C = np.where(avail & (wt > 0))[0]
    KZ = A[:, Z]
    sc = P.scale
    NZ = complement_basis(KZ, P.dim, sc)
    w = np.zeros(A.shape[1], dtype=complex)
    if C.size:
        sq = np.sqrt(wt[C])
        B = NZ.conj().T @ (A[:, C] / sq)
        u = pinv(B, sc / np.sqrt(wt[C].min())) @ (NZ.conj().T @ t)
        w[C] = u / sq
        size = float(np.vdot(u, u).real)
    else:
        size = 0.0
    if Z.size:
        w[Z] = pinv(KZ, sc) @ (t - A[:, C] @ w[C])
    res = float(np.linalg.norm(A @ w - t))
    return WitnessReport(1, w, size, res, (float(np.vdot(w, w).real),))


def witness_false(P: SpanProgram, x: str, s=None, tol: float = RANGE_TOL) -> WitnessReport:
    """Optimal negative witness w' with ⟨t|w'⟩ = 1, minimum-norm among optima."""
    if evaluate(P, x, tol):
        raise NotFalse(f"f_P({x}) = 1")
    A, t = P.A, P.target
    avail = P.available(x)
    wt = P.weights(s)
    sc = P.scale
    # directions orthogonal to every vector carry no information; numerically
    # their overlap with t is rounding noise, so they are excluded up front
    R = range_basis(np.column_stack([t, A]), P.dim, sc)
    N = R @ complement_basis(R.conj().T @ A[:, avail], R.shape[1], sc)
    c = N.conj().T @ t
    pos = np.where(~avail & (wt > 0))[0]
    B = (N.conj().T @ A[:, pos]) * np.sqrt(wt[pos])
    scB = sc * np.sqrt(wt[pos].max()) if pos.size else 0.0
    if pos.size == 0 or not in_range(B, c, tol, scB):
        # some w' kills every weighted unavailable column too: size 0
        r = complement_basis(B, c.shape[0], scB) if pos.size else np.eye(c.shape[0])
        r = r @ (r.conj().T @ c)
        z = r / np.vdot(r, r).real
        size = 0.0
    else:
        a = pinv(B, scB) @ c
        a2 = float(np.vdot(a, a).real)
        z = pinv(B.conj().T, scB) @ (a / a2)
        size = 1.0 / a2
    wp = N @ z
    Aw = A.conj().T @ wp
    res = max(abs(np.vdot(t, wp) - 1), float(np.linalg.norm(Aw[avail])) if avail.any() else 0.0)
    return WitnessReport(0, wp, size, float(res), (float(np.vdot(wp, wp).real), float(np.vdot(Aw, Aw).real)))


def witness(P: SpanProgram, x: str, s=None) -> WitnessReport:
    return witness_true(P, x, s) if evaluate(P, x) else witness_false(P, x, s)


def wsize_x(P: SpanProgram, x: str, s=None) -> float:
    return witness(P, x, s).size


def witness_size(P: SpanProgram, domain: Iterable[str] | None = None, s=None) -> float:
    dom = list(domain) if domain is not None else all_strings(P.n)
    return max((wsize_x(P, x, s) for x in dom), default=0.0)


def side_maxima(P: SpanProgram, domain: Iterable[str] | None = None, s=None) -> tuple[float, float]:
    """(max true-side size, max false-side size); 0 for an empty side."""
    dom = list(domain) if domain is not None else all_strings(P.n)
    mt = mf = 0.0
    for x in dom:
        r = witness(P, x, s)
        if r.value:
            mt = max(mt, r.size)
        else:
            mf = max(mf, r.size)
    return mt, mf


# ---------------------------------------------------------------- transforms


def scale_target(P: SpanProgram, c: complex) -> SpanProgram:
    """Replace t by c·t. True sizes scale by |c|², false sizes by 1/|c|²."""
    if c == 0:
        raise BadParams("scale must be nonzero")
    return P.replace(target=c * P.target)


def amplify(P: SpanProgram, W: float) -> SpanProgram:
    if not W > 0:
        raise BadParams("W must be positive")
    if W == 1:
        return P
    return scale_target(P, 1 / np.sqrt(W))


def rebalance(P: SpanProgram, domain=None, s=None) -> tuple[SpanProgram, float]:
    """Rescale the target so max true size equals max false size.

    Returns the new program and the common value sqrt(maxT·maxF). A program
    that is constant on the domain is returned unchanged.
    """
    mt, mf = side_maxima(P, domain, s)
    if mt <= 0 or mf <= 0:
        return P, max(mt, mf)
    c2 = np.sqrt(mf / mt)
    return scale_target(P, np.sqrt(c2)), float(np.sqrt(mt * mf))


def dualize(P: SpanProgram) -> SpanProgram:
    d, A, t = P.dim, P.A, P.target
    nI = A.shape[1]
    free = np.vstack([t.conj()[None, :], A.conj().T])  # (1+|I|) × d
    tgt = np.zeros(1 + nI, dtype=complex)
    tgt[0] = 1
    sl = P.block_slices()
    inputs = {}
    for j in range(P.n):
        for b in (0, 1):
            cols = range(sl[(j, 1 - b)].start, sl[(j, 1 - b)].stop)
            M = np.zeros((1 + nI, len(cols)), dtype=complex)
            for k, i in enumerate(cols):
                M[1 + i, k] = 1
            inputs[(j, b)] = M
    return SpanProgram(P.n, tgt, free, inputs)


def strictify(P: SpanProgram) -> SpanProgram:
    """Project onto the orthogonal complement of the free vectors' span."""
    if P.is_strict:
        return P
    N = complement_basis(P.free, P.dim)
    H = N.conj().T
    return SpanProgram(P.n, H @ P.target, None, {k: H @ M for k, M in P.inputs.items()})


def _R(v: np.ndarray) -> np.ndarray:
    out = np.zeros((2 * v.shape[0],) + v.shape[1:])
    out[0::2] = v.real
    out[1::2] = v.imag
    return out


def realify(P: SpanProgram) -> SpanProgram:
    def dbl(M):
        out = np.zeros((2 * P.dim, 2 * M.shape[1]))
        out[:, 0::2] = _R(M)
        out[:, 1::2] = _R(1j * M)
        return out

    return SpanProgram(P.n, _R(P.target).astype(complex), dbl(P.free),
                       {k: dbl(M) for k, M in P.inputs.items()})


def trivial_program(n: int) -> SpanProgram:
    """Zero-target program: computes the constant 1."""
    return SpanProgram(n, np.zeros(1, dtype=complex))


def canonicalize(P: SpanProgram, s=None) -> SpanProgram:
    """Map onto C^{F_0} via M = Σ_x |x⟩⟨w'(x)| using tie-broken optimal w'."""
    F0 = [x for x in all_strings(P.n) if not evaluate(P, x)]
    if not F0:
        raise EmptyFalseSet("f_P is identically 1", trivial=trivial_program(P.n))
    M = np.array([witness_false(P, x, s).witness.conj() for x in F0])
    noise = _rcond(M.shape) * np.linalg.norm(M, 2) * P.scale
    inputs = {}
    for (j, b), B in P.inputs.items():
        B = M @ B
        B[np.abs(B) <= noise] = 0
        # ⟨x|v̂_i⟩ vanishes exactly for available i; drop the rounding residue
        B[[r for r, x in enumerate(F0) if int(x[j]) == b], :] = 0
        inputs[(j, b)] = B
    return SpanProgram(P.n, np.ones(len(F0), dtype=complex), None, inputs, basis_labels=tuple(F0))


def is_canonical(P: SpanProgram, tol: float = 1e-9) -> bool:
    if not P.is_strict or P.basis_labels is None:
        return False
    if np.max(np.abs(P.target - 1), initial=0) > tol:
        return False
    for r, x in enumerate(P.basis_labels):
        for j in range(P.n):
            if np.max(np.abs(P.inputs[(j, int(x[j]))][r]), initial=0) > tol:
                return False
    return True


def apply_transform(P: SpanProgram, M) -> SpanProgram:
    M = np.asarray(M, dtype=complex)
    if M.shape != (P.dim, P.dim):
        raise BadParams(f"transform must be {P.dim}×{P.dim}")
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size and (sv[-1] <= _rcond(M.shape) * sv[0] or sv[0] / sv[-1] > COND_CAP):
        raise Singular("transform is singular or badly conditioned")
    return SpanProgram(P.n, M @ P.target, M @ P.free, {k: M @ B for k, B in P.inputs.items()},
                       basis_labels=P.basis_labels)


def relabel(P: SpanProgram, n_new: int, bit_map: Sequence[int], flip: bool = False) -> SpanProgram:
    """Move bit j of P to bit ``bit_map[j]`` of an ``n_new``-bit program.

    With ``flip`` the labels (j, b) become (bit_map[j], 1-b), i.e. P reads x̄.
    """
    inputs = {}
    for (j, b), M in P.inputs.items():
        inputs[(bit_map[j], 1 - b if flip else b)] = M
    return SpanProgram(n_new, P.target, P.free, inputs, P.basis_labels)


def random_program(rng: np.random.Generator, n: int | None = None, dim: int | None = None,
                   num_inputs: int | None = None, complex_entries: bool = True,
                   free_prob: float = 0.2, sparsity: float = 0.0) -> SpanProgram:
    """Random test program; rank-deficient patterns occur with fair probability."""
    n = n if n is not None else int(rng.integers(1, 4))
    dim = dim if dim is not None else int(rng.integers(1, 6))
    k = num_inputs if num_inputs is not None else int(rng.integers(1, 9))

    def vec(size):
        v = rng.normal(size=size)
        if complex_entries:
            v = v + 1j * rng.normal(size=size)
        if sparsity:
            v = v * (rng.random(size) > sparsity)
        return v

    free, inputs = [], {}
    for _ in range(k):
        v = vec(dim)
        if rng.random() < free_prob:
            free.append(v)
        else:
            lab = (int(rng.integers(n)), int(rng.integers(2)))
            inputs.setdefault(lab, []).append(v)
    return SpanProgram(n, vec(dim), free, inputs)


# ---------------------------------------------------------------- programs from query algorithms


@dataclass
class QueryAlgorithmDescription:
    """Alternating unitaries and phase queries.

    ``unitaries`` holds V_1, V_3, ..., V_{2q+1}, each of size ``2**m * n``,
    acting on basis states indexed ``y * n + j``. When ``constant_slot`` is
    set, query slot 0 reads a bit that is always 0 and slot ``j + 1`` reads
    bit ``j`` of the input, so ``n`` equals the function arity plus one.
    The start state is ``|0^m⟩|slot 0⟩``.
    """

    q: int
    m: int
    n: int
    unitaries: list
    epsilon: float = 0.0
    constant_slot: bool = True

    def __post_init__(self):
        D = 2 ** self.m * self.n
        if len(self.unitaries) != self.q + 1:
            raise BadParams(f"need {self.q + 1} unitaries, got {len(self.unitaries)}")
        us = []
        for k, V in enumerate(self.unitaries):
            V = np.asarray(V, dtype=complex)
            if V.shape != (D, D):
                raise BadParams(f"unitary {k} has shape {V.shape}, expected {(D, D)}")
            if np.linalg.norm(V.conj().T @ V - np.eye(D)) > 1e-10:
                raise BadParams(f"matrix {k} is not unitary")
            us.append(V)
        self.unitaries = us

    def slot_bit(self, slot: int, x: str) -> int:
        if self.constant_slot:
            return 0 if slot == 0 else int(x[slot - 1])
        return int(x[slot])

    def oracle(self, x: str) -> np.ndarray:
        signs = [(-1) ** self.slot_bit(j, x) for y in range(2 ** self.m) for j in range(self.n)]
        return np.diag(np.array(signs, dtype=complex))

    def states(self, x: str) -> list[np.ndarray]:
        """φ_0, φ_1, ..., φ_{2q+1}."""
        D = 2 ** self.m * self.n
        phi = np.zeros(D, dtype=complex)
        phi[0] = 1
        out = [phi]
        O = self.oracle(x)
        for r, V in enumerate(self.unitaries):
            phi = V @ phi
            out.append(phi)
            if r < self.q:
                phi = O @ phi
                out.append(phi)
        return out


def from_query_algorithm(alg: QueryAlgorithmDescription, f: BooleanFunction,
                         clean_tol: float = 1e-8, rescale: bool = True) -> SpanProgram:
    arity = alg.n - 1 if alg.constant_slot else alg.n
    if f.n != arity or not f.is_total:
        raise BadParams("function must be total with arity matching the query register")
    R = 2 ** alg.m * alg.n
    q = alg.q
    dim = (2 * q + 2) * R
    start = np.zeros(R, dtype=complex)
    start[0] = 1
    eps = 0.0
    for x in f.domain:
        final = alg.states(x)[-1]
        if f.table[x]:
            if np.linalg.norm(final - start) > clean_tol:
                raise NotClean(f"workspace not returned to the start state on true input {x}")
        else:
            eps = max(eps, abs(final[0]))
    if eps >= 1 - 1e-6:
        raise NotOneSided(f"error on false inputs is {eps:.6g}")

    def e(s, k):
        v = np.zeros(dim, dtype=complex)
        v[s * R + k] = 1
        return v

    t = -e(0, 0) + e(2 * q + 1, 0)
    free, inputs = [], {}
    for r, V in enumerate(alg.unitaries):
        s = 2 * r  # step s → s+1 applies V_{s+1}
        for k in range(R):
            v = -e(s, k)
            v[(s + 1) * R:(s + 2) * R] += V[:, k]
            free.append(v)
    for r in range(q):
        s = 2 * r + 1  # step s → s+1 is a query
        for y in range(2 ** alg.m):
            for slot in range(alg.n):
                k = y * alg.n + slot
                for b in (0, 1):
                    v = -e(s, k) + (-1) ** b * e(s + 1, k)
                    if alg.constant_slot and slot == 0:
                        if b == 0:
                            free.append(v)
                        continue
                    j = slot - 1 if alg.constant_slot else slot
                    inputs.setdefault((j, b), []).append(v)
    P = SpanProgram(f.n, t, free, inputs)
    if rescale:
        P, _ = rebalance(P)
    return P
