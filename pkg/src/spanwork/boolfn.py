"""Total and partial boolean functions over n-bit strings.

Bit strings are Python ``str`` objects of ``'0'``/``'1'`` characters; the
leftmost character is bit 1. Internally the bit at 0-based position ``j``
is ``x[j]``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import ArityMismatch, BadParams, DomainTooLarge, OutOfDomain, SchemaError

ARITY_CAP = 20


def all_strings(n: int) -> list[str]:
    """All n-bit strings in lexicographic order."""
    return ["".join(p) for p in itertools.product("01", repeat=n)]


def weight(x: str) -> int:
    return x.count("1")


def flip(x: str) -> str:
    return "".join("1" if c == "0" else "0" for c in x)


def _check_cap(n: int, cap: int | None) -> None:
    cap = ARITY_CAP if cap is None else cap
    if n > cap:
        raise DomainTooLarge(f"arity {n} exceeds cap {cap}")


@dataclass(frozen=True)
class BooleanFunction:
    n: int
    domain: tuple[str, ...]
    table: Mapping[str, int] = field(compare=False, hash=False)

    def __post_init__(self):
        if self.n < 0:
            raise BadParams("negative arity")
        dom = tuple(self.domain)
        if len(set(dom)) != len(dom):
            raise BadParams("duplicate domain strings")
        tab = {}
        for x in dom:
            if len(x) != self.n or set(x) - {"0", "1"}:
                raise BadParams(f"bad bit string {x!r} for arity {self.n}")
            if x not in self.table:
                raise BadParams(f"no table entry for {x}")
            v = int(self.table[x])
            if v not in (0, 1):
                raise BadParams(f"table value {v} is not a bit")
            tab[x] = v
        object.__setattr__(self, "domain", dom)
        object.__setattr__(self, "table", tab)

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.n == other.n and self.table == other.table

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.table.items()))))

    def __call__(self, x: str) -> int:
        return evaluate(self, x)

    @classmethod
    def from_callable(cls, n: int, fn, domain: Iterable[str] | None = None, cap: int | None = None):
        _check_cap(n, cap)
        dom = list(domain) if domain is not None else all_strings(n)
        return cls(n, tuple(dom), {x: int(fn(x)) for x in dom})

    @property
    def is_total(self) -> bool:
        return len(self.domain) == 2 ** self.n

    @property
    def F0(self) -> list[str]:
        return [x for x in self.domain if self.table[x] == 0]

    @property
    def F1(self) -> list[str]:
        return [x for x in self.domain if self.table[x] == 1]

    @property
    def is_constant(self) -> bool:
        return len(set(self.table.values())) <= 1

    def restrict(self, j: int, b: int) -> "BooleanFunction":
        """Fix 0-based bit ``j`` to ``b``; the result has arity n-1."""
        dom, tab = [], {}
        for x in self.domain:
            if x[j] == str(b):
                y = x[:j] + x[j + 1:]
                dom.append(y)
                tab[y] = self.table[x]
        return BooleanFunction(self.n - 1, tuple(dom), tab)

    def to_dict(self) -> dict:
        return {
            "kind": "function",
            "n": self.n,
            "domain": "total" if self.is_total else list(self.domain),
            "table": dict(self.table),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "BooleanFunction":
        try:
            n = int(d["n"])
            dom = d.get("domain", "total")
            table = d["table"]
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"function: missing or malformed field ({e})") from e
        if dom == "total":
            dom = all_strings(n)
        elif not isinstance(dom, list):
            raise SchemaError("function: field 'domain' must be a list or \"total\"")
        if not isinstance(table, Mapping):
            raise SchemaError("function: field 'table' must be an object")
        try:
            return cls(n, tuple(dom), {k: int(v) for k, v in table.items()})
        except BadParams as e:
            raise SchemaError(f"function: {e}") from e

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def evaluate(f: BooleanFunction, x: str) -> int:
    try:
        return f.table[x]
    except KeyError:
        raise OutOfDomain(f"{x!r} not in domain") from None


def threshold(l: int, n: int) -> BooleanFunction:
    if n < 0 or l < 0 or l > n:
        raise BadParams(f"threshold needs 0 <= l <= n, got l={l}, n={n}")
    return BooleanFunction.from_callable(n, lambda x: weight(x) >= l)


def interval(l: int, m: int, n: int) -> BooleanFunction:
    if not (0 <= l <= m <= n):
        raise BadParams(f"interval needs 0 <= l <= m <= n, got {(l, m, n)}")
    return BooleanFunction.from_callable(n, lambda x: l <= weight(x) <= m)


def parity(n: int) -> BooleanFunction:
    return BooleanFunction.from_callable(n, lambda x: weight(x) % 2)


def constant(n: int, b: int) -> BooleanFunction:
    return BooleanFunction.from_callable(n, lambda x: b)


def identity() -> BooleanFunction:
    return BooleanFunction(1, ("0", "1"), {"0": 0, "1": 1})


def projection(n: int, j: int) -> BooleanFunction:
    """x -> x_j (0-based j)."""
    return BooleanFunction.from_callable(n, lambda x: int(x[j]))


def from_truth_string(n: int, bits: str) -> BooleanFunction:
    """Build from the 2^n output bits listed in lexicographic input order."""
    if len(bits) != 2 ** n:
        raise BadParams("truth string length must be 2^n")
    return BooleanFunction.from_callable(n, lambda x: int(bits[int(x, 2)]) if n else int(bits[0]))


AND2 = threshold(2, 2)
OR2 = threshold(1, 2)
MAJ3 = threshold(2, 3)


def negate(f: BooleanFunction) -> BooleanFunction:
    return BooleanFunction(f.n, f.domain, {x: 1 - v for x, v in f.table.items()})


def compose(outer: BooleanFunction, inner: Sequence[BooleanFunction], wiring: str = "disjoint",
            cap: int | None = None) -> BooleanFunction:
    """g = outer(inner_1(.), ..., inner_n(.)), either on disjoint blocks or a shared input."""
    if len(inner) != outer.n:
        raise ArityMismatch(f"outer arity {outer.n} but {len(inner)} inner functions")
    for h in inner:
        if not h.is_total:
            raise BadParams("inner functions must be total")
    if wiring == "shared":
        arities = {h.n for h in inner}
        if len(arities) > 1:
            raise ArityMismatch("shared wiring needs equal inner arities")
        m = arities.pop() if arities else 0
        _check_cap(m, cap)

        def g(x):
            return evaluate(outer, "".join(str(h.table[x]) for h in inner))

        return BooleanFunction.from_callable(m, g, domain=_outer_preimage(outer, inner, m, shared=True))
    if wiring != "disjoint":
        raise BadParams(f"unknown wiring {wiring!r}")
    m = sum(h.n for h in inner)
    _check_cap(m, cap)
    offsets = list(itertools.accumulate([0] + [h.n for h in inner]))

    def g(x):
        y = "".join(str(h.table[x[offsets[k]:offsets[k + 1]]]) for k, h in enumerate(inner))
        return evaluate(outer, y)

    return BooleanFunction.from_callable(m, g, domain=_outer_preimage(outer, inner, m, shared=False))


def _outer_preimage(outer, inner, m, shared):
    """Inputs whose inner outputs land in the outer domain (all of them if outer is total)."""
    if outer.is_total:
        return None
    dom = set(outer.domain)
    offsets = list(itertools.accumulate([0] + [h.n for h in inner]))
    out = []
    for x in all_strings(m):
        if shared:
            y = "".join(str(h.table[x]) for h in inner)
        else:
            y = "".join(str(h.table[x[offsets[k]:offsets[k + 1]]]) for k, h in enumerate(inner))
        if y in dom:
            out.append(x)
    return out


def iterate(f: BooleanFunction, k: int, cap: int | None = None) -> BooleanFunction:
    if k < 1:
        raise BadParams("iteration depth must be >= 1")
    if not f.is_total:
        raise BadParams("iterate needs a total function")
    _check_cap(f.n ** k, cap)
    g = f
    for _ in range(k - 1):
        g = compose(f, [g] * f.n, "disjoint", cap=cap)
    return g


def is_symmetric(f: BooleanFunction) -> bool:
    """True when f is total and depends on Hamming weight only."""
    if not f.is_total:
        return False
    seen: dict[int, int] = {}
    for x, v in f.table.items():
        if seen.setdefault(weight(x), v) != v:
            return False
    return True


def weight_profile(f: BooleanFunction) -> list[int]:
    """Output value per Hamming weight for a symmetric function."""
    prof = [0] * (f.n + 1)
    for x, v in f.table.items():
        prof[weight(x)] = v
    return prof
