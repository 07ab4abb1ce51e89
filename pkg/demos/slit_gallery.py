"""Radial multi-slit generators and a slit domain without tips.

Pole atoms (a_j, mu_j) fix p; the zeros b_j of p interlace with the poles
and carry weights sigma_j.  Poles have mass 2 mu_j, and the zeros repel with
dilation 1/(2 sigma_j).  The last part follows truncations of an infinite
slit family whose slits accumulate at angle 0.
"""
import math

from diskgen.multislit import example_no_tip, from_pole_atoms, from_tips, verify_slit_classification


def show(atoms):
    S, G = from_pole_atoms(atoms)
    chk = verify_slit_classification(S, G)
    print(f"poles {', '.join(f'{a:.4f}' for a in S.a)}")
    for b, s, d, r, f in zip(S.b, S.sigma, chk.dilation_direct, chk.dilation_residue, chk.dilation_flow):
        print(f"  zero {b:.6f}  sigma={s:.6f}  dilation {d:.8f} / {r:.8f} / {f:.8f}  (1/(2 sigma)={1 / (2 * s):.8f})")
    print(f"  masses {', '.join(f'{m:.8f}' for m in chk.masses)}  passed={chk.passed}")


def main():
    show([(math.pi, 1.0)])
    show([(0.0, 0.5), (math.pi, 0.5)])
    show([(0.0, 0.3), (2.0, 0.2), (4.0, 0.5)])

    tg = from_tips([0.0, math.pi / 2, math.pi])
    print(f"\ntips {tg.tips} -> gap weights {tg.sigma}")

    print("\nslits accumulating at 0")
    study = example_no_tip()
    for row in study.rows:
        print(f"  m={row.m:3d}  Fatou sum {row.fatou_sum:9.5f}  mass at 0 {row.mass:.6f}")


if __name__ == "__main__":
    main()
