import math

import numpy as np
import pytest

from cftlattice.blocks import cloaking_triangle_table
from cftlattice.channels import symmetry_set
from cftlattice.lattice import (LatticeError, LatticeSizeError, LatticeSpec, RSOSWeights, _cycle_basis,
                                face_model_Z, height_weights, hopping_weight, ising_map, ising_Z,
                                lattice_Z_exact, loop_components, loop_equivalence_check, loop_parameters,
                                loop_statistics, loop_Z, phase_points, rsos_loop_Z, rsos_weights, rsos_Z,
                                truncated_basis, vertex_scale, winding_parity_violations)
from cftlattice.minimal_model import MinimalModel
from cftlattice.uniformization import TriangleGeometry, t_of_ratio

ISING = MinimalModel(3, 4)
TRICRITICAL = MinimalModel(4, 5)


def _position(lattice, s):
    i, j = s % lattice.M, s // lattice.M
    return i + 0.5 * j, math.sqrt(3) / 2 * j


# ---- geometry -------------------------------------------------------------------------------


@pytest.mark.parametrize("M,N", [(2, 2), (2, 3), (3, 3), (4, 5)])
def test_lattice_counts(M, N):
    lat = LatticeSpec(M, N)
    assert lat.n_vertices == 2 * M * N
    assert lat.n_edges == 3 * M * N
    assert lat.sites == M * N
    assert all(len(set(pair)) == 2 for pair in lat.edge_triangles)
    uses = np.zeros(lat.n_edges, int)
    for trio in lat.triangle_edges:
        uses[list(trio)] += 1
    assert np.all(uses == 2)


def test_triangles_counter_clockwise():
    lat = LatticeSpec(5, 5)
    for t, (a, b, c) in enumerate(lat.triangles):
        # unwrap the corners next to the first one before taking the signed area
        pts = [np.array(_position(lat, s)) for s in (a, b, c)]
        ref = pts[0]
        for k in (1, 2):
            best = None
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    cand = pts[k] + di * np.array([5, 0]) + dj * np.array([2.5, 5 * math.sqrt(3) / 2])
                    if best is None or np.linalg.norm(cand - ref) < np.linalg.norm(best - ref):
                        best = cand
            pts[k] = best
        u, v = pts[1] - pts[0], pts[2] - pts[0]
        assert u[0] * v[1] - u[1] * v[0] > 0
        for ed, pair in zip(lat.triangle_edges[t], lat.corner_pairs(t)):
            assert set(lat.edges[ed]) == set(pair)


def test_lattice_too_small():
    with pytest.raises(LatticeError):
        LatticeSpec(1, 3)


# ---- truncated state spaces ---------------------------------------------------------------------


@pytest.mark.parametrize("p", range(3, 13))
def test_basis_size_lowest_cutoff(p):
    model = MinimalModel(p, p + 1)
    sym = symmetry_set(model, "R")
    assert len(truncated_basis(model, sym, model.weight(model.canonical(1, 2)))) == 3 * p - 2
    tft = truncated_basis(model, sym, 0)
    assert len(tft) == p
    assert all(s.a == s.b and s.i == model.identity for s in tft)


def test_ising_pair_basis():
    eps = ISING.canonical(1, 3)
    one = ISING.identity
    states = truncated_basis(ISING, symmetry_set(ISING, "Z"), 0.5)
    assert {(s.a, s.b, s.i) for s in states} == {(one, one, one), (one, eps, eps), (eps, one, eps), (eps, eps, one)}


def test_basis_descendants():
    states = truncated_basis(ISING, symmetry_set(ISING, "Z"), 2)
    vacuum = [s for s in states if s.i == ISING.identity and s.a == ISING.identity]
    # vacuum module: primary and L_{-2}
    assert [s.level for s in vacuum] == [0, 2]
    assert all(s.weight <= 2 for s in states)


# ---- exact contraction and the Ising form -------------------------------------------------------------


@pytest.fixture(scope="module")
def ising_tables():
    out = {}
    for ratio in (0.05, 0.15, 0.25, 0.35, 0.45):
        geom = TriangleGeometry(t_of_ratio(ratio))
        out[ratio] = cloaking_triangle_table(ISING, symmetry_set(ISING, "Z"), 0.37, 0, geom, with_anomaly=False)
    return out


@pytest.mark.parametrize("shape", [(2, 2), (2, 3)])
def test_ising_identity_by_enumeration(ising_tables, shape):
    lat = LatticeSpec(*shape)
    F = vertex_scale(ISING, 0.37)
    for ratio, table in ising_tables.items():
        info = ising_map(ISING, ratio)
        expected = (info.x ** 0.75 * F) ** lat.n_vertices * ising_Z(lat, info.beta)
        assert lattice_Z_exact(lat, table) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("shape", [(2, 3), (3, 3)])
def test_contraction_routes_agree(ising_tables, shape):
    lat = LatticeSpec(*shape)
    table = ising_tables[0.25]
    values = [lattice_Z_exact(lat, table, method=m) for m in ("contract", "heights", "transfer")]
    assert values[1] == pytest.approx(values[0], rel=1e-12)
    assert values[2] == pytest.approx(values[0], rel=1e-12)


def test_ising_identity_with_anomaly():
    geom = TriangleGeometry(t_of_ratio(0.2))
    table = cloaking_triangle_table(ISING, symmetry_set(ISING, "Z"), 0.5, 0, geom)
    lat = LatticeSpec(2, 2)
    info = ising_map(ISING, 0.2)
    F = vertex_scale(ISING, 0.5, table.anomaly)
    expected = (info.x ** 0.75 * F) ** lat.n_vertices * ising_Z(lat, info.beta)
    assert lattice_Z_exact(lat, table) == pytest.approx(expected, rel=1e-12)


def test_tricritical_pair_identity():
    geom = TriangleGeometry(t_of_ratio(0.3))
    table = cloaking_triangle_table(TRICRITICAL, symmetry_set(TRICRITICAL, "Z"), 0.37, 0, geom, with_anomaly=False)
    lat = LatticeSpec(2, 2)
    info = ising_map(TRICRITICAL, 0.3)
    F = vertex_scale(TRICRITICAL, 0.37)
    expected = (info.x ** 0.75 * F) ** lat.n_vertices * ising_Z(lat, info.beta)
    assert lattice_Z_exact(lat, table) == pytest.approx(expected, rel=1e-12)


def test_single_vertex_entries(ising_tables):
    table = ising_tables[0.25]
    states = truncated_basis(ISING, table.symmetry, 0.5)
    labels, W = height_weights(table, states)
    one, eps = ISING.identity, ISING.canonical(1, 3)
    assert W[0, 0, 0] == pytest.approx(table.get(one, one, one, one, one, one)[0, 0, 0].real)
    assert W[0, 1, 1] == pytest.approx(table.get(one, eps, eps, eps, one, eps)[0, 0, 0].real)
    info = ising_map(ISING, 0.25)
    assert W[0, 0, 1] / W[0, 0, 0] == pytest.approx(info.x, rel=1e-12)
    assert W[1, 1, 1] == pytest.approx(vertex_scale(ISING, 0.37), rel=1e-12)


def test_transfer_needs_face_form():
    geom = TriangleGeometry(t_of_ratio(0.25))
    table = cloaking_triangle_table(ISING, symmetry_set(ISING, "I"), 0.37, 0, geom, with_anomaly=False)
    with pytest.raises(LatticeError):
        lattice_Z_exact(LatticeSpec(2, 2), table, h_max=0.5, method="transfer")


def test_contraction_size_limit():
    geom = TriangleGeometry(t_of_ratio(0.25))
    table = cloaking_triangle_table(TRICRITICAL, symmetry_set(TRICRITICAL, "R"), 0.37, 0, geom, with_anomaly=False)
    with pytest.raises(LatticeSizeError):
        lattice_Z_exact(LatticeSpec(3, 3), table, h_max=0.1)


def test_ising_map_values():
    info = ising_map(ISING, 0.2)
    assert info.x_max == pytest.approx(4 / (3 * math.sqrt(3)))
    assert info.beta_min == pytest.approx(0.25 * math.log(27 / 16))
    assert round(info.beta_min, 2) == 0.13
    assert round(info.beta_star, 2) == 0.27
    assert info.covered
    assert info.beta == pytest.approx(-0.5 * math.log(info.x))
    tri = ising_map(TRICRITICAL, 0.2)
    assert tri.beta_min == pytest.approx(0.75 * math.log(27 / 16))
    assert round(tri.beta_min, 2) == 0.39
    assert not tri.covered


def test_ising_map_limits():
    # X(t) tends to 1 only like 1/t, so the approach to x_max is slow in R/d
    xs = [ising_map(ISING, r).x for r in (1e-2, 1e-4, 1e-8)]
    assert xs[0] < xs[1] < xs[2] < ising_map(ISING, 1e-8).x_max
    assert hopping_weight(1e4, 0.5) == pytest.approx(4 / (3 * math.sqrt(3)), rel=1e-3)
    touching = ising_map(ISING, 0.4999)
    assert touching.x < 1e-10
    assert touching.beta > 10
    with pytest.raises(LatticeError):
        ising_map(MinimalModel(5, 6), 0.2)


# ---- RSOS weights ------------------------------------------------------------------------------------


@pytest.mark.parametrize("p", [3, 4, 5])
def test_rsos_weights_match_table(p):
    model = MinimalModel(p, p + 1)
    geom = TriangleGeometry(t_of_ratio(0.2))
    table = cloaking_triangle_table(model, symmetry_set(model, "R"), 0.37, 0, geom, with_anomaly=False)
    states = truncated_basis(model, table.symmetry, model.weight(model.canonical(1, 2)))
    labels, W = height_weights(table, states)
    assert labels == [model.canonical(1, a) for a in range(1, p + 1)]
    weights = rsos_weights(model, geom.t, delta0=0.37)
    assert np.max(np.abs(W - weights.array())) < 1e-12 * np.max(np.abs(W))


def test_rsos_rules():
    model = MinimalModel(5, 6)
    w = rsos_weights(model, 0.4)
    d = w.dims
    assert w(2, 2, 2) == w.F
    assert w(2, 2, 3) == pytest.approx(w.F * w.x * (d[2] / d[1]) ** (1 / 6))
    assert w(3, 3, 2) == pytest.approx(w.F * w.x * (d[2] / d[1]) ** (-1 / 6))
    assert w(1, 1, 3) == 0.0
    assert w(1, 2, 3) == 0.0
    arr = w.array()
    assert np.allclose(arr, np.transpose(arr, (1, 2, 0)))
    assert set(w.table()) == {abc for abc in np.ndindex(5, 5, 5) if arr[abc] != 0 for abc in [tuple(x + 1 for x in abc)]}


def test_rsos_turn_factor_full_power():
    # one site of height b in a sea of a: the six surrounding vertices give one full power of d_b/d_a
    lat = LatticeSpec(3, 3)
    w = rsos_weights(MinimalModel(4, 5), 0.5)
    heights = [2] * lat.sites
    heights[4] = 3
    prod = np.prod([w(*(heights[c] for c in tri)) for tri in lat.triangles])
    expected = w.F ** lat.n_vertices * w.x ** 6 * w.dims[2] / w.dims[1]
    assert prod == pytest.approx(expected, rel=1e-12)


def test_rsos_needs_unitary():
    with pytest.raises(LatticeError):
        rsos_weights(MinimalModel(3, 5), 0.3)


def test_rsos_transfer_wide_torus():
    w = rsos_weights(MinimalModel(3, 4), 0.3)
    lat = LatticeSpec(6, 2)
    assert rsos_Z(lat, w, "transfer") == pytest.approx(rsos_Z(lat, w, "heights"), rel=1e-12)
    with pytest.raises(LatticeError):
        face_model_Z(lat, w.array(), "sweep")


# ---- loop gas ---------------------------------------------------------------------------------------


@pytest.mark.parametrize("M,N", [(2, 2), (2, 3), (3, 3)])
def test_loop_space_size(M, N):
    assert len(_cycle_basis(LatticeSpec(M, N))) == M * N + 1
    assert sum(loop_statistics(M, N).values()) == 2 ** (M * N + 1)


def test_winding_loops_share_class():
    lat = LatticeSpec(3, 3)
    basis = _cycle_basis(lat)
    mask = 0
    for step in range(1, 1 << len(basis)):
        mask ^= basis[(step & -step).bit_length() - 1]
        classes = {w if w >= (0, 0) else (-w[0], -w[1]) for _, w in loop_components(lat, mask) if w != (0, 0)}
        assert len(classes) <= 1


def test_loop_components_rejects_branching():
    lat = LatticeSpec(2, 2)
    with pytest.raises(LatticeError):
        # all three edges at one vertex
        loop_components(lat, sum(1 << ed for ed in lat.triangle_edges[0]))


def test_loop_small_x():
    lat = LatticeSpec(2, 2)
    assert loop_Z(3, 0.0, 1.7, 0.3, lat) == 1.0
    w = rsos_weights(MinimalModel(3, 4), 0.3)
    zero = RSOSWeights(w.p, w.F, 0.0, w.dims)
    assert rsos_loop_Z(zero, lat) == pytest.approx(3 * w.F ** lat.n_vertices)
    assert rsos_Z(lat, zero) == pytest.approx(3 * w.F ** lat.n_vertices)


def test_loop_parameters():
    n, xi = loop_parameters(3)
    assert n == pytest.approx(math.sqrt(2))
    assert xi == pytest.approx([1.0, 0.0, -1.0], abs=1e-15)
    for p in (3, 4, 7):
        n, xi = loop_parameters(p)
        for w in (1, 3, 5):
            assert abs(sum((n * x) ** w for x in xi)) < 1e-12


@pytest.mark.parametrize("p", [3, 4])
@pytest.mark.parametrize("shape", [(2, 2), (3, 3)])
def test_loop_equivalence(p, shape):
    lat = LatticeSpec(*shape)
    for x in (0.2, 0.55, 0.9):
        assert loop_equivalence_check(p, 0.4, lat, x=x).residual < 1e-10
    assert loop_equivalence_check(p, 0.4, lat).residual < 1e-10


def test_loop_equivalence_p5():
    check = loop_equivalence_check(5, 0.4, LatticeSpec(2, 2))
    assert check.residual < 1e-10
    assert check.to_dict()["height_configs"] == 5 ** 4


@pytest.mark.parametrize("p", [3, 4])
@pytest.mark.parametrize("shape", [(2, 2), (2, 3), (3, 3)])
def test_winding_parity(p, shape):
    assert winding_parity_violations(p, LatticeSpec(*shape)) == 0


# ---- phase diagram ------------------------------------------------------------------------------------


@pytest.mark.parametrize("p", range(3, 13))
def test_phase_points(p):
    pts = phase_points(p)
    assert pts.x_c < pts.x_0 < pts.x_max
    assert pts.c_0 == pytest.approx(float(MinimalModel(p, p + 1).central_charge))
    assert pts.c_c == pytest.approx(float(MinimalModel(p + 1, p + 2).central_charge))
    h = (p - 2) / (4 * (p + 1))
    assert abs(hopping_weight(t_of_ratio(pts.R_C_over_d), h) - pts.x_c) < 1e-10
    assert abs(hopping_weight(t_of_ratio(pts.R_0_over_d), h) - pts.x_0) < 1e-10
    assert 0 < pts.R_0_over_d < pts.R_C_over_d < 0.5
    assert pts.x_max == pytest.approx((16 / 27) ** h)


def test_phase_points_large_p():
    pts = phase_points(400)
    assert pts.x_c == pytest.approx(2 ** -0.5, abs=5e-3)
    assert pts.x_0 == pytest.approx(2 ** -0.5, abs=5e-3)
    with pytest.raises(LatticeError):
        phase_points(2)
