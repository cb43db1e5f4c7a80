"""Command line front end.

Exit codes: 0 ok, 2 schema error, 3 numerical failure, 4 verification failure.
Reports land in <root>/<command>/<label>/report.json; the root is --out, or
$SPANWORK_OUT, or ./out.
"""

from __future__ import annotations

import functools
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import acceptance, adversary as adv, compose as cp, graphs as gr, spanprog as sp, walksim as ws
from . import workbench as wb
from .boolfn import is_symmetric, weight_profile
from .errors import SchemaError, SpanworkError, VerificationFailed


def _label(*parts) -> str:
    out = []
    for p in parts:
        if p is None:
            continue
        s = Path(str(p)).stem if Path(str(p)).suffix == ".json" else str(p)
        out.append("".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in s))
    return "-".join(out) or "run"


TOLERANCES = {"range_tol": sp.RANGE_TOL, "rank_rcond": sp.RANK_RCOND, "graph_prune_rel": gr.PRUNE_REL,
              "zero_eigenvalue_rel": gr.ZERO_REL}


def _finish(command: str, label: str, payload: dict, out: str | None, table=None, extra=None):
    payload = {**payload, "tolerances": TOLERANCES}
    d = wb.write_report(command, label, payload, out, table, extra)
    click.echo(str(d / "report.json"))
    return d


def handled(fn):
    @functools.wraps(fn)
    def wrapper(*a, **kw):
        try:
            return fn(*a, **kw)
        except SpanworkError as e:
            click.echo(f"error: {type(e).__name__}: {e}", err=True)
            sys.exit(e.exit_code)
        except np.linalg.LinAlgError as e:
            click.echo(f"error: numerical failure: {e}", err=True)
            sys.exit(3)
    return wrapper


def _program_or_formula(program, formula, method="direct_sum"):
    if program and formula:
        raise SchemaError("give either --program or --formula, not both")
    if program:
        return wb.load_program(program), {"program": program}
    if formula:
        F = wb.load_formula(formula)
        return cp.formula_span_program(F.tree, method=method, n=F.n), {"formula": F.tree}
    raise SchemaError("one of --program or --formula is required")


def _sdp_cfg(tolerance, method="clarabel"):
    kw = {"method": method}
    if tolerance:
        kw["tolerance"] = tolerance
    return adv.SDPConfig(**kw)


opt_out = click.option("--out", default=None, help="Output root (default $SPANWORK_OUT or ./out).")
opt_program = click.option("--program", default=None, help="Span program JSON file.")
opt_formula = click.option("--formula", default=None, help="Formula file or inline JSON list.")
opt_function = click.option("--function", "function", default=None,
                            help="Function JSON file or a name such as maj3, threshold:2,4.")
opt_costs = click.option("--costs", default=None, help="Cost vector: JSON list, comma list or file.")
opt_domain = click.option("--domain", default=None, help="'total', comma list of bit strings, or file.")
opt_tol = click.option("--tolerance", type=float, default=None, help="Solver tolerance.")
opt_solver = click.option("--method", "solver", default="clarabel", show_default=True,
                          type=click.Choice(["clarabel", "scs"]), help="First SDP solver to try.")
opt_seed = click.option("--seed", type=int, default=0, show_default=True)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Span programs, adversary bounds and quantum-walk evaluation."""


@main.command("eval")
@opt_program
@opt_formula
@opt_domain
@opt_out
@handled
def eval_cmd(program, formula, domain, out):
    """Truth table of a span program."""
    P, src = _program_or_formula(program, formula)
    rows = [{"x": x, "f": sp.evaluate(P, x)} for x in wb.parse_domain(domain, P.n)]
    _finish("eval", _label(program or "formula"), {"source": src, "rows": rows}, out, rows)


@main.command("wsize")
@opt_program
@opt_formula
@opt_costs
@opt_domain
@opt_out
@handled
def wsize_cmd(program, formula, costs, domain, out):
    """Witness sizes per input and over the domain."""
    P, src = _program_or_formula(program, formula)
    s = wb.parse_costs(costs, P.n)
    dom = wb.parse_domain(domain, P.n)
    rows = []
    for x in dom:
        r = sp.witness(P, x, s)
        rows.append({"x": x, "f": sp.evaluate(P, x), "wsize": r.size, "residual": r.residual})
    hi_t, hi_f = sp.side_maxima(P, dom, s)
    payload = {"source": src, "costs": s, "wsize": max(r["wsize"] for r in rows),
               "max_true": hi_t, "max_false": hi_f, "rows": rows}
    _finish("wsize", _label(program or "formula"), payload, out, rows)


@main.command("adv")
@opt_function
@opt_costs
@opt_tol
@opt_solver
@opt_out
@handled
def adv_cmd(function, costs, tolerance, solver, out):
    """Nonnegative-weight adversary bound ADV (dual SDP)."""
    f = wb.load_function(function)
    s = wb.parse_costs(costs, f.n)
    cfg = _sdp_cfg(tolerance, solver)
    val, res = adv.solve_adv_dual(f, s, cfg)
    payload = {"function": function, "costs": s, "config": cfg.__dict__, "adv": val,
               "gap": None if res.sdp is None else res.sdp.gap,
               "solver": None if res.sdp is None else res.sdp.solver}
    if is_symmetric(f) and s is None:
        payload["weight_profile"] = weight_profile(f)
    _finish("adv", _label(function), payload, out)


@main.command("advpm")
@opt_function
@opt_costs
@opt_tol
@opt_solver
@opt_out
@handled
def advpm_cmd(function, costs, tolerance, solver, out):
    """General adversary bound ADV± with its Gram vectors."""
    f = wb.load_function(function)
    s = wb.parse_costs(costs, f.n)
    cfg = _sdp_cfg(tolerance, solver)
    val, g = adv.solve_advpm_dual(f, s, cfg)
    res = getattr(g, "sdp", None)
    payload = {"function": function, "costs": s, "config": cfg.__dict__, "advpm": val,
               "gap": None if res is None else res.gap, "solver": None if res is None else res.solver,
               "gram": g.to_dict(include_vectors=True)}
    _finish("advpm", _label(function), payload, out)


@main.command("synth")
@opt_function
@opt_costs
@opt_tol
@opt_solver
@opt_out
@handled
def synth_cmd(function, costs, tolerance, solver, out):
    """Optimal span program from the ADV± dual solution."""
    f = wb.load_function(function)
    s = wb.parse_costs(costs, f.n)
    val, g = adv.solve_advpm_dual(f, s, _sdp_cfg(tolerance, solver))
    P = adv.span_program_from_gram(f, g)
    w = sp.witness_size(P, f.domain, s)
    payload = {"function": function, "costs": s, "advpm": val, "wsize": w, "dim": P.dim,
               "num_inputs": P.num_inputs, "computes_f": P.truth_table(f.domain) == f}
    _finish("synth", _label(function), payload, out, extra={"program.json": wb.dumps(P)})


def _transform_cmd(name, fn, program, costs, domain, out):
    P = wb.load_program(program)
    s = wb.parse_costs(costs, P.n)
    Q = fn(P, s)
    dom = wb.parse_domain(domain, P.n)
    rows = [{"x": x, "f_before": sp.evaluate(P, x), "f_after": sp.evaluate(Q, x),
             "wsize_before": sp.wsize_x(P, x, s), "wsize_after": sp.wsize_x(Q, x, s)} for x in dom]
    _finish(name, _label(program), {"program": program, "costs": s, "dim": Q.dim, "rows": rows},
            out, rows, extra={"program.json": wb.dumps(Q)})


@main.command("canon")
@opt_program
@opt_costs
@opt_domain
@opt_out
@handled
def canon_cmd(program, costs, domain, out):
    """Canonical form over the false inputs."""
    _transform_cmd("canon", lambda P, s: sp.canonicalize(P, s), program, costs, domain, out)


@main.command("dual")
@opt_program
@opt_domain
@opt_out
@handled
def dual_cmd(program, domain, out):
    """Dual program computing the negated function."""
    _transform_cmd("dual", lambda P, s: sp.dualize(P), program, None, domain, out)


@main.command("compose")
@click.option("--program", "programs", multiple=True,
              help="Outer program first, then one inner program per outer bit (repeatable).")
@opt_formula
@click.option("--method", default="direct_sum", show_default=True,
              type=click.Choice(["direct_sum", "tensor", "reduced_tensor"]))
@opt_costs
@opt_out
@handled
def compose_cmd(programs, formula, method, costs, out):
    """Compose programs, or build one from a read-once formula."""
    if formula:
        if programs:
            raise SchemaError("give either --program or --formula, not both")
        Q, src = _program_or_formula(None, formula, method)
        label = _label("formula", method)
    else:
        if len(programs) < 2:
            raise SchemaError("compose needs an outer program and inner programs")
        outer = wb.load_program(programs[0])
        inner = [wb.load_program(p) for p in programs[1:]]
        if len(inner) == 1 and outer.n > 1:
            inner = inner * outer.n
        Q = cp.compose_programs(outer, inner, method)
        src = {"programs": list(programs)}
        label = _label(*programs, method)
    s = wb.parse_costs(costs, Q.n)
    payload = {"source": src, "method": method, "costs": s, "n": Q.n, "dim": Q.dim,
               "num_inputs": Q.num_inputs, "wsize": sp.witness_size(Q, None, s)}
    _finish("compose", label, payload, out, extra={"program.json": wb.dumps(Q)})


@main.command("graph")
@opt_program
@opt_formula
@opt_domain
@opt_out
@handled
def graph_cmd(program, formula, domain, out):
    """Bipartite graph G_P as an edge list, with zero-mode overlaps per input."""
    P, src = _program_or_formula(program, formula)
    G = gr.build_graph(P)
    rows = []
    for x in wb.parse_domain(domain, P.n):
        z = gr.zero_witness_true(P, x) if sp.evaluate(P, x) else gr.zero_witness_false(P, x)
        rows.append({"x": x, "f": sp.evaluate(P, x), "overlap_ratio": z.ratio, "residual": z.residual})
    payload = {"source": src, "T": len(G.t_labels), "U": len(G.u_labels),
               "edges": int(np.count_nonzero(G.biadj)), "rows": rows}
    _finish("graph", _label(program or "formula"), payload, out, rows, extra={"graph.txt": G.export_edge_list()})


@main.command("spectra")
@opt_program
@opt_formula
@opt_domain
@click.option("--mode", default="raw", show_default=True, type=click.Choice(["raw", "blackbox", "witnessed"]))
@click.option("--lambda", "lam", type=float, default=None,
              help="Threshold (raw), c (blackbox) or Υ (witnessed).")
@opt_out
@handled
def spectra_cmd(program, formula, domain, mode, lam, out):
    """Spectra of A_{G_P(x)} and effective-gap checks."""
    P, src = _program_or_formula(program, formula)
    rows = []
    for x in wb.parse_domain(domain, P.n):
        f = sp.evaluate(P, x)
        rep = gr.spectral_report(gr.build_graph_x(P, x))
        row = {"x": x, "f": f, "zero_mass": rep.cumulative(0.0), "symmetric_defect": rep.symmetric_defect}
        if lam is not None and mode == "raw":
            row["mass_below_lambda"] = rep.cumulative(lam)
        elif lam is not None and not f:
            r = gr.effective_gap_check(P, x, c=lam if mode == "blackbox" else None,
                                       upsilon=lam if mode == "witnessed" else None, mode=mode)
            row.update({"measured": r.measured, "bound": r.bound, "passed": r.passed})
        rows.append(row)
    _finish("spectra", _label(program or "formula", mode), {"source": src, "mode": mode, "lambda": lam,
                                                           "rows": rows}, out, rows)


@main.command("simulate")
@opt_program
@opt_formula
@opt_domain
@click.option("--method", default="discrete", show_default=True, type=click.Choice(["discrete", "continuous"]))
@click.option("--mode", default="spectral", show_default=True, type=click.Choice(["spectral", "circuit"]))
@click.option("--epsilon", type=float, default=0.5, show_default=True)
@click.option("--lambda", "lam", type=float, default=None,
              help="Threshold on G_P as given; omitted means canonicalize, amplify and use 1/(8W).")
@click.option("--samples", type=int, default=1000, show_default=True)
@opt_seed
@opt_out
@handled
def simulate_cmd(program, formula, domain, method, mode, epsilon, lam, samples, seed, out):
    """Run the discrete or continuous walk on each input."""
    P, src = _program_or_formula(program, formula)
    prep = "as_given"
    if lam is None:
        P, W = gr.blackbox_program(P)
        lam = (1 / 8) / W
        prep = "blackbox"
    cfg = ws.WalkConfig(mode=mode, epsilon=epsilon, lam=lam, samples=samples, seed=seed)
    G = gr.build_graph(P)
    rows = []
    for x in wb.parse_domain(domain, P.n):
        r = ws.run_discrete(G, x, cfg) if method == "discrete" else ws.run_continuous(G, x, cfg)
        rows.append({"x": x, "f": sp.evaluate(P, x), "decision": int(r.accept_probability >= 3 * epsilon / 4),
                     "accept_probability": r.accept_probability, "predicted": r.predicted,
                     "queries": r.queries})
    payload = {"source": src, "method": method, "preparation": prep, "config": cfg.__dict__, "rows": rows}
    _finish("simulate", _label(program or "formula", method, mode, f"seed{seed}"), payload, out, rows)


@main.command("pipeline")
@opt_function
@click.option("--epsilon", type=float, default=0.5, show_default=True)
@click.option("--mode", default="spectral", show_default=True, type=click.Choice(["spectral", "circuit"]))
@opt_seed
@opt_tol
@opt_solver
@opt_out
@handled
def pipeline_cmd(function, epsilon, mode, seed, tolerance, solver, out):
    """ADV± dual, extracted span program, and walk decisions on every input."""
    f = wb.load_function(function)
    walk = ws.WalkConfig(mode=mode, epsilon=epsilon, seed=seed)
    cfg = _sdp_cfg(tolerance, solver)
    rep = ws.tightness_pipeline(f, cfg, walk)
    payload = {"function": function, "config": {"sdp": cfg.__dict__, "walk": walk.__dict__}, **rep}
    _finish("pipeline", _label(function, f"seed{seed}"), payload, out, rep["rows"])
    if not rep["all_correct"]:
        raise VerificationFailed("some decisions disagree with the truth table")


@main.command("verify")
@click.option("--suite", default="acceptance", show_default=True,
              type=click.Choice(["acceptance", "paper"]), help="'paper' is an alias of 'acceptance'.")
@click.option("--only", default=None, help="Comma list of criterion numbers.")
@opt_out
@handled
def verify_cmd(suite, only, out):
    """Run the acceptance criteria; exit 4 if any fails."""
    nums = None if only is None else {int(k) for k in only.split(",")}
    results = acceptance.run_all(nums)
    for r in results:
        click.echo(r.line())
    payload = {"suite": "acceptance", "results": [r.to_dict() for r in results],
               "passed": all(r.passed for r in results)}
    _finish("verify", "acceptance", payload, out,
            [{"criterion": r.number, "passed": r.passed, "seconds": round(r.seconds, 3)} for r in results])
    if not payload["passed"]:
        raise VerificationFailed(f"{sum(not r.passed for r in results)} criterion(s) failed")


if __name__ == "__main__":
    main()
