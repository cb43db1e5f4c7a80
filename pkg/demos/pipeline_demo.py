"""Adversary SDP -> optimal span program -> walk decisions, for a few small functions."""

from spanwork.boolfn import interval, parity, threshold
from spanwork.walksim import WalkConfig, tightness_pipeline

CASES = {
    "AND2": threshold(2, 2),
    "MAJ3": threshold(2, 3),
    "PARITY3": parity(3),
    "interval(1,2,3)": interval(1, 2, 3),
    "threshold(2,4)": threshold(2, 4),
}


def main():
    print(f"{'function':<16}{'ADV±':>9}{'wsize':>9}{'correct':>9}{'queries/input':>15}")
    for name, f in CASES.items():
        out = tightness_pipeline(f, walk=WalkConfig(epsilon=0.5))
        worst = max(r["queries"] for r in out["rows"])
        print(f"{name:<16}{out['adv_pm']:>9.4f}{out['wsize']:>9.4f}{str(out['all_correct']):>9}{worst:>15}")


if __name__ == "__main__":
    main()
