"""Read-once formulas built by composing balanced gates.

The witness size of each composed program is printed next to the square
root of the number of leaves, which it should match.
"""

import math

from spanwork import compose as cp, spanprog as sp
from spanwork.boolfn import all_strings
from spanwork.errors import DimensionTooLarge

FORMULAS = [
    ["and", 1, 2],
    ["or", ["and", 1, 2], ["and", 3, 4]],
    ["and", ["or", 1, 2, 3], ["not", 4], ["or", 5, ["and", 6, 7]]],
]


def main():
    for tree in FORMULAS:
        n = cp.formula_arity(tree)
        for method in ("direct_sum", "tensor", "reduced_tensor"):
            try:
                P = cp.formula_span_program(tree, method=method)
            except DimensionTooLarge as e:
                print(f"{method:<15}skipped: {e}")
                continue
            ok = all(sp.evaluate(P, x) == cp.evaluate_formula(tree, x) for x in all_strings(n))
            leaves = len(cp.formula_leaves(tree))
            print(f"{method:<15}dim={P.dim:<5} wsize={sp.witness_size(P):.4f} "
                  f"sqrt(leaves)={math.sqrt(leaves):.4f} correct={ok}  {tree}")


if __name__ == "__main__":
    main()
