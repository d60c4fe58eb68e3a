"""
Cloaking Ising lattice as an Ising model
========================================

With the two-label boundary and the lowest cutoff every vertex weight is
either F or F x.  Summing the lattice exactly on small tori shows the
partition function is a triangular-lattice Ising model at beta = -log(x)/2.
"""

from cftlattice.blocks import cloaking_triangle_table
from cftlattice.channels import symmetry_set
from cftlattice.lattice import LatticeSpec, ising_map, ising_Z, lattice_Z_exact, vertex_scale
from cftlattice.minimal_model import MinimalModel
from cftlattice.uniformization import TriangleGeometry, t_of_ratio

ising = MinimalModel(3, 4)
delta0 = ising.s_matrix(ising.identity, ising.identity) ** 1.5
torus = LatticeSpec(2, 3)

for ratio in (0.1, 0.25, 0.4):
    geom = TriangleGeometry(t_of_ratio(ratio))
    table = cloaking_triangle_table(ising, symmetry_set(ising, "Z"), delta0, 0, geom, with_anomaly=False)
    info = ising_map(ising, ratio)
    lattice = lattice_Z_exact(torus, table)
    rewritten = (info.x ** 0.75 * vertex_scale(ising, delta0)) ** torus.n_vertices * ising_Z(torus, info.beta)
    print(f"R/d={ratio:.2f}  x={info.x:.5f}  beta={info.beta:.4f}  Z={lattice:.6e}  ratio={lattice / rewritten:.12f}")

# small holes cannot push beta below beta_min
info = ising_map(ising, 0.25)
print(f"beta_min={info.beta_min:.4f}  beta_star={info.beta_star:.4f}  critical point reachable: {info.covered}")

tri = ising_map(MinimalModel(4, 5), 0.25)
print(f"tricritical pair: beta_min={tri.beta_min:.4f}  reachable: {tri.covered}")
