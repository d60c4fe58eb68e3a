"""
RSOS heights, loops and the two critical points
===============================================

Heights 1..p on the hexagonal faces, neighbours differing by at most one.
The domain walls form loops; summing heights inside each loop turns the
height model into a loop gas with fugacity 2cos(pi/(p+1)).
"""

from cftlattice.lattice import (LatticeSpec, loop_equivalence_check, loop_statistics, phase_points,
                                winding_parity_violations)

torus = LatticeSpec(3, 3)

# all (length, contractible, winding) classes of loop configurations on the 3x3 torus
stats = loop_statistics(3, 3)
print(len(stats), "loop classes,", sum(stats.values()), "configurations")

for p in (3, 4):
    for x in (0.3, 0.6, 0.9):
        check = loop_equivalence_check(p, 0.4, torus, x=x)
        print(f"p={p} x={x}: heights {check.z_rsos:.6e}  loops {check.z_loop:.6e}  residual {check.residual:.1e}")
    print(f"p={p}: odd-winding height configurations: {winding_parity_violations(p, torus)}")

print(f"{'p':>3} {'x_c':>8} {'x_0':>8} {'x_max':>8} {'c_c':>6} {'c_0':>6} {'R_C/d':>7}")
for p in range(3, 9):
    pt = phase_points(p)
    print(f"{p:3d} {pt.x_c:8.5f} {pt.x_0:8.5f} {pt.x_max:8.5f} {str(pt.c_c):>6} {str(pt.c_0):>6} {pt.R_C_over_d:7.4f}")
