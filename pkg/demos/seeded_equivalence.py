"""Three ways to find the slit tips of a seeded generator.

For each probe angle we ask the generator (is it a regular pole?), the flow
maps phi_t (is it a beta-point?) and the Koenigs function (is it a
beta-point?).  The three answers coincide on every angle.
"""
import argparse

import numpy as np

from diskgen.flow import phi_beta_scan
from diskgen.generator import classify_boundary
from diskgen.koenigs import h_beta_scan, koenigs
from diskgen.scenarios import probe_angles, seeded_generator


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--angles", type=int, default=720)
    args = ap.parse_args(argv)

    case = seeded_generator(args.seed)
    G = case.generator
    th = probe_angles(args.angles)
    print(f"seed {args.seed}: tau={G.tau_value:.6f}, p stored as {case.representation}")
    cls = [classify_boundary(G, a) for a in th]
    pole = np.array([c.is_pole for c in cls])
    A = np.array([-c.a if c.is_pole else np.nan for c in cls])
    flows = phi_beta_scan(G, th, [0.5, 1.0, 2.0], A=A)
    hs = h_beta_scan(koenigs(G), th, A=A)

    print(f"{'angle':>10} {'mass':>12} {'phi_0.5':>8} {'phi_1':>8} {'phi_2':>8} {'h':>8}")
    for i in np.nonzero(pole)[0]:
        marks = ["yes" if flows[i][j].is_beta_point else "no" for j in range(3)]
        print(f"{th[i]:10.6f} {cls[i].mass:12.8f} {marks[0]:>8} {marks[1]:>8} {marks[2]:>8} "
              f"{'yes' if hs[i].is_beta_point else 'no':>8}")
    others = sum(1 for i in np.nonzero(~pole)[0]
                 if any(flows[i][j].is_beta_point for j in range(3)) or hs[i].is_beta_point)
    print(f"{int(pole.sum())} poles; non-pole angles flagged by phi_t or h: {others}")


if __name__ == "__main__":
    main()
