"""Walk through the Koebe semigroup G(z) = -z(1 - z)/(1 + z).

Its Koenigs function is the Koebe map z/(1 - z)^2, whose image is the plane
minus the slit (-inf, -1/4].  The slit tip comes from the pole at -1 and the
null point at 1 repels orbits with dilation 1/2.
"""
import math

from diskgen import koebe_generator, koenigs
from diskgen.flow import FlowMap, dilatation_coefficient, flow, phi_beta_point
from diskgen.generator import classify_boundary
from diskgen.koenigs import h_beta_point, null_point_asymptotics


def main():
    G = koebe_generator()
    print("boundary classification")
    for name, x in (("-1", math.pi), ("1", 0.0), ("i", math.pi / 2)):
        c = classify_boundary(G, x)
        extra = f" mass={c.mass:.10f}" if c.is_pole else f" dilation={c.dilation:.10f}" if c.is_null_point else ""
        print(f"  x={name:>3}: {c.tag}{extra}")

    print("\norbit of 0.5 (attracted to the Denjoy-Wolff point 0)")
    traj = flow(G, 0.5, 3.0)
    for t, z in zip(traj.t[::max(1, len(traj.t) // 6)], traj.z[::max(1, len(traj.t) // 6)]):
        print(f"  t={t:5.2f}  z={z.real:+.10f}{z.imag:+.10f}i")

    K = koenigs(G)
    print(f"\nh(1/2) = {K(0.5).real:.12f}  (Koebe map gives 2)")
    rep = h_beta_point(K, math.pi)
    print(f"h at -1 -> {rep.h_at_x.real:.12f}, h'' limit {rep.second_derivative.value.real:.8f}, "
          f"beta-number {rep.beta_number:.8f}")

    pb = phi_beta_point(G, math.pi, 1.0)
    print(f"phi_1 maps -1 to {pb.sigma_t.real:.10f}; second-derivative mismatch {pb.mismatch:.1e}")
    d = dilatation_coefficient(FlowMap(G, 1.0), 0.0)
    print(f"dilatation of phi_1 at 1: {d.value.real:.8f}  (e^(1/2) = {math.exp(0.5):.8f})")

    res = null_point_asymptotics(K, 0.0)
    print(f"near the null point: rho * ell = {res.rho.value.real * 0.5:.6f}, "
          f"a-limit {res.a_limit.value.real:.8f} vs {res.expected_a.real:.8f}")


if __name__ == "__main__":
    main()
