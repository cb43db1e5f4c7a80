"""File formats, built-in objects and report writing for the command line."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import re
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import boolfn
from .boolfn import BooleanFunction, all_strings
from .compose import check_formula, formula_arity
from .errors import BadParams, SchemaError
from .spanprog import SpanProgram

OUT_ENV = "SPANWORK_OUT"


@dataclass(frozen=True)
class Formula:
    tree: object
    n: int

    def to_dict(self) -> dict:
        return {"kind": "formula", "n": self.n, "tree": self.tree}


def _formula(tree, n=None) -> Formula:
    try:
        check_formula(tree)
    except BadParams as e:
        raise SchemaError(f"formula: {e}") from e
    tree = _listify(tree)
    return Formula(tree, int(n) if n is not None else formula_arity(tree))


def _listify(t):
    return t if isinstance(t, int) else [t[0]] + [_listify(a) for a in t[1:]]


def from_obj(obj):
    """Typed object from decoded JSON."""
    if isinstance(obj, list):
        return _formula(obj)
    if not isinstance(obj, Mapping):
        raise SchemaError("top level must be an object or a formula list")
    kind = obj.get("kind")
    if kind == "function":
        return BooleanFunction.from_dict(obj)
    if kind == "span_program":
        return SpanProgram.from_dict(obj)
    if kind == "formula":
        if "tree" not in obj:
            raise SchemaError("formula: missing field 'tree'")
        return _formula(obj["tree"], obj.get("n"))
    raise SchemaError(f"kind: unknown value {kind!r}")


def parse_text(text: str, where: str = "<string>"):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{where}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    return from_obj(obj)


def parse(path) -> BooleanFunction | SpanProgram | Formula:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise SchemaError(f"{p}: {e.strerror}") from e
    return parse_text(text, str(p))


def dumps(obj) -> str:
    return json.dumps(obj.to_dict(), sort_keys=True, indent=1) + "\n"


def write(obj, path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dumps(obj))
    return p


# ------------------------------------------------------------------ built-ins

_BUILTIN = {
    "and2": lambda: boolfn.from_truth_string(2, "0001"),
    "or2": lambda: boolfn.from_truth_string(2, "0111"),
    "xor2": lambda: boolfn.parity(2),
    "maj3": lambda: boolfn.threshold(2, 3),
}


def builtin_function(spec: str) -> BooleanFunction:
    """Names like ``maj3``, ``and3``, ``parity4``, ``threshold:2,4``, ``interval:1,2,3``."""
    s = spec.strip().lower()
    if s in _BUILTIN:
        return _BUILTIN[s]()
    m = re.fullmatch(r"(and|or|parity)(\d+)", s)
    if m:
        n = int(m.group(2))
        return {"and": lambda: boolfn.threshold(n, n), "or": lambda: boolfn.threshold(1, n),
                "parity": lambda: boolfn.parity(n)}[m.group(1)]()
    m = re.fullmatch(r"(threshold|interval|truth):(.*)", s)
    if m:
        args = m.group(2).split(",")
        try:
            if m.group(1) == "truth":
                return boolfn.from_truth_string(int(args[0]), args[1])
            nums = [int(a) for a in args]
            return boolfn.threshold(*nums) if m.group(1) == "threshold" else boolfn.interval(*nums)
        except (TypeError, ValueError, IndexError) as e:
            raise SchemaError(f"function spec {spec!r}: {e}") from e
    raise SchemaError(f"unknown function {spec!r}")


def load_function(spec: str | None) -> BooleanFunction:
    if not spec:
        raise SchemaError("--function is required")
    obj = parse(spec) if Path(spec).is_file() else builtin_function(spec)
    if not isinstance(obj, BooleanFunction):
        raise SchemaError(f"{spec}: expected kind 'function'")
    return obj


def load_program(spec: str | None) -> SpanProgram:
    if not spec:
        raise SchemaError("--program is required")
    obj = parse(spec)
    if not isinstance(obj, SpanProgram):
        raise SchemaError(f"{spec}: expected kind 'span_program'")
    return obj


def load_formula(spec: str) -> Formula:
    obj = parse(spec) if Path(spec).is_file() else parse_text(spec, "--formula")
    if not isinstance(obj, Formula):
        raise SchemaError(f"{spec}: expected a formula")
    return obj


def parse_costs(spec: str | None, n: int):
    if spec is None:
        return None
    text = Path(spec).read_text() if Path(spec).is_file() else spec
    try:
        vals = json.loads(text) if text.strip().startswith("[") else [float(u) for u in text.split(",")]
        vals = [float(v) for v in vals]
    except (ValueError, TypeError) as e:
        raise SchemaError(f"costs: {e}") from e
    if len(vals) != n:
        raise SchemaError(f"costs: expected {n} entries, got {len(vals)}")
    if any(not math.isfinite(v) or v <= 0 for v in vals):
        raise SchemaError("costs: entries must be positive and finite")
    return np.array(vals)


def parse_domain(spec: str | None, n: int) -> list[str]:
    if spec is None or spec == "total":
        return all_strings(n)
    text = Path(spec).read_text() if Path(spec).is_file() else spec
    try:
        vals = json.loads(text) if text.strip().startswith("[") else [u.strip() for u in text.split(",")]
    except json.JSONDecodeError as e:
        raise SchemaError(f"domain: {e}") from e
    for x in vals:
        if not isinstance(x, str) or len(x) != n or set(x) - {"0", "1"}:
            raise SchemaError(f"domain: bad bit string {x!r} for arity {n}")
    return list(vals)


# ------------------------------------------------------------------ reports


def jsonable(obj):
    """Plain JSON types; complex numbers become [re, im]."""
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def out_root(explicit: str | None = None) -> Path:
    return Path(explicit or os.environ.get(OUT_ENV) or "out")


def report_dir(command: str, label: str, root: str | None = None) -> Path:
    d = out_root(root) / command / label
    d.mkdir(parents=True, exist_ok=True)
    return d


def write_report(command: str, label: str, payload: dict, root: str | None = None,
                 table: list[dict] | None = None, extra: dict | None = None) -> Path:
    """report.json (+ table.csv, + extra named files); returns the directory."""
    d = report_dir(command, label, root)
    body = {"kind": "report", "command": command, **jsonable(payload)}
    (d / "report.json").write_text(json.dumps(body, sort_keys=True, indent=1) + "\n")
    if table:
        (d / "table.csv").write_text(to_csv(table))
    for name, content in (extra or {}).items():
        (d / name).write_text(content)
    return d


def to_csv(rows: list[dict]) -> str:
    cols = list(rows[0])
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: jsonable(r.get(k)) for k in cols})
    return buf.getvalue()
