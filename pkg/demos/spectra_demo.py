"""Spectrum of A_{G_P(x)} near zero for the OR2 program, and the effective-gap check."""

from pathlib import Path

import numpy as np

from spanwork import graphs as gr, spanprog as sp
from spanwork.boolfn import all_strings
from spanwork.workbench import load_program

P = load_program(str(Path(__file__).resolve().parent / "data" / "or2_program.json"))


def main():
    for x in all_strings(P.n):
        rep = gr.spectral_report(gr.build_graph_x(P, x))
        small = np.sort(np.abs(rep.eigenvalues))[:3]
        line = f"x={x} f={sp.evaluate(P, x)} zero-mass={rep.cumulative(0):.4f} smallest |ρ|={np.round(small, 4)}"
        if not sp.evaluate(P, x):
            chk = gr.effective_gap_check(P, x, c=1 / 8)
            line += f"  mass below c/W: {chk.measured:.2e} <= {chk.bound:.3f}: {chk.passed}"
        print(line)


if __name__ == "__main__":
    main()
