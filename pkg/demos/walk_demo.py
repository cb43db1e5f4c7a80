"""Acceptance probabilities of the discrete and continuous walks on MAJ3."""

import json

from spanwork import graphs as gr, spanprog as sp, walksim as ws
from spanwork.boolfn import all_strings
from spanwork.compose import threshold_span_program


def main():
    P = threshold_span_program(2, 3)
    Pp, W = gr.blackbox_program(P)
    G = gr.build_graph(Pp)
    lam = 1 / (8 * W)
    eps = 0.5
    print(f"canonical witness size W = {W:.4f}, threshold 3ε/4 = {3 * eps / 4}")
    print(f"{'x':<5}{'f':>3}{'spectral':>10}{'circuit':>10}{'continuous':>12}")
    for x in all_strings(P.n):
        spec = ws.run_discrete(G, x, ws.WalkConfig(epsilon=eps, lam=lam))
        circ = ws.run_discrete(G, x, ws.WalkConfig(mode="circuit", epsilon=eps, lam=lam))
        cont = ws.run_continuous(G, x, ws.WalkConfig(epsilon=eps, lam=lam, quadrature="gauss"))
        print(f"{x:<5}{sp.evaluate(P, x):>3}{spec.accept_probability:>10.4f}"
              f"{circ.accept_probability:>10.4f}{cont.accept_probability:>12.4f}")
    print(json.dumps({"circuit_ancillas": circ.details["ancillas"], "circuit_queries": circ.queries,
                      "spectral_queries": spec.queries, "continuous_queries": cont.queries}))


if __name__ == "__main__":
    main()
