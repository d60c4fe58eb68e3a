import math
import warnings

import numpy as np
import pytest

from cftlattice.blocks import (FusionClosureError, admissible_triangle, block_B, check_fusion_closed,
                               cloaking_triangle_table, disc_2pt, disc_3pt_primary, disc_amplitude,
                               pairing_constant, three_point_block, triangle_amplitude, triangle_block_tensor,
                               triangle_constant)
from cftlattice.channels import ising_open_formula, one_hole_open
from cftlattice.minimal_model import MinimalModel
from cftlattice.uniformization import TriangleGeometry
from cftlattice.virasoro import build_module

SQ3 = math.sqrt(3)


@pytest.fixture(scope="module")
def ising():
    return MinimalModel(3, 4)


@pytest.fixture(scope="module")
def tri():
    return MinimalModel(4, 5)


@pytest.fixture(scope="module")
def geom():
    return TriangleGeometry(0.4, series_order=12)


def admissible_tuples(model):
    labs = model.labels
    return [(a, b, c, i, j, k) for a in labs for b in labs for c in labs for i in labs for j in labs for k in labs
            if admissible_triangle(model, a, b, c, i, j, k)]


# ---- disc amplitudes -------------------------------------------------------------


def test_disc_2pt_at_pi_is_pairing(ising):
    one, sig, eps = ising.labels
    assert disc_2pt(ising, sig, sig, eps, math.pi) == pairing_constant(ising, sig, sig, eps)


def test_disc_2pt_rotation_identity(tri):
    rng = np.random.default_rng(0)
    for a in tri.labels:
        for b in tri.labels:
            for i in tri.labels:
                angle = rng.uniform(0.1, 2 * math.pi - 0.1)
                assert disc_2pt(tri, a, b, i, angle) == pytest.approx(disc_2pt(tri, b, a, i, 2 * math.pi - angle),
                                                                     rel=1e-12, abs=1e-14)


def test_disc_2pt_vacuum_is_empty_disc(ising):
    one = ising.identity
    assert disc_2pt(ising, one, one, one, 1.0) == pytest.approx(math.sqrt(ising.s_matrix(one, one)))


def test_disc_2pt_bad_angle(ising):
    with pytest.raises(ValueError):
        disc_2pt(ising, ising.identity, ising.identity, ising.identity, 0.0)


def test_disc_3pt_cyclic(tri):
    for a, b, c, i, j, k in admissible_tuples(tri):
        assert disc_3pt_primary(tri, a, b, c, i, j, k) == pytest.approx(
            disc_3pt_primary(tri, b, c, a, j, k, i), rel=1e-11)


def test_disc_3pt_identity_insertions(tri):
    one = tri.identity
    for a in tri.labels:
        assert disc_3pt_primary(tri, a, a, a, one, one, one) == pytest.approx(disc_amplitude(tri, a), rel=1e-13)


def test_disc_3pt_ising_sigma_boundary(ising):
    one, sig, eps = ising.labels
    # F = 1/2, the empty sigma-disc is 1, sum of weights 1
    assert disc_3pt_primary(ising, sig, sig, sig, eps, eps, one) == pytest.approx(1 / SQ3, rel=1e-13)
    assert disc_3pt_primary(ising, sig, sig, sig, sig, eps, one) == 0.0


# ---- block recursion -----------------------------------------------------------------


def test_block_primaries_normalised(ising):
    mods = [build_module(ising, lab, 2) for lab in ising.labels]
    block = three_point_block(*mods)
    assert block.tensor[0, 0, 0] == 1


def test_block_level_one_oracle(tri):
    labs = [(1, 2), (1, 3), (2, 2)]
    mods = [build_module(tri, lab, 1) for lab in labs]
    block = three_point_block(*mods).tensor
    h = [float(m.h) for m in mods]
    # L_{-1} on each leg, reduced by hand
    assert block[1, 0, 0] == pytest.approx(-1j * h[0] + (h[1] - h[2]) / SQ3, abs=1e-13)
    assert block[0, 1, 0] == pytest.approx(-1j * h[1] + (h[2] - h[0]) / SQ3, abs=1e-13)
    assert block[0, 0, 1] == pytest.approx(-1j * h[2] + (h[0] - h[1]) / SQ3, abs=1e-13)


def test_block_cyclic_on_random_states(tri):
    labs = [(1, 2), (2, 2), (2, 1)]
    mods = [build_module(tri, lab, 3) for lab in labs]
    forward = three_point_block(*mods)
    turned = three_point_block(mods[1], mods[2], mods[0])
    rng = np.random.default_rng(5)
    for _ in range(5):
        u, v, w = (rng.normal(size=m.total_dim) + 1j * rng.normal(size=m.total_dim) for m in mods)
        assert forward(u, v, w) == pytest.approx(turned(v, w, u), rel=1e-10)


def test_block_reduction_order_independent(tri):
    mods = [build_module(tri, lab, 4) for lab in [(1, 2), (1, 2), (1, 3)]]
    block = three_point_block(*mods)
    lev = [m.level_diagonal() for m in mods]
    first, second, third = block.rotated
    worst = 0.0
    for x, y, z in np.ndindex(first.shape):
        if lev[0][x] and lev[1][y] and lev[2][z]:
            ref = first[x, y, z]
            worst = max(worst, abs(second[y, z, x] - ref), abs(third[z, x, y] - ref))
    assert worst < 1e-9


def test_block_inconsistent_off_fusion(tri):
    # (1,3) is not in (1,2) x (2,2): its level-3 null vector does not decouple
    mods = [build_module(tri, lab, 4) for lab in [(1, 2), (2, 2), (1, 3)]]
    first, second, _ = three_point_block(*mods).rotated
    assert np.abs(np.transpose(first, (1, 2, 0)) - second).max() > 1e-3


def test_block_B_primaries_scale(ising, geom):
    one, sig, eps = ising.labels
    vec = np.zeros(build_module(ising, sig, 2).total_dim)
    vec[0] = 1
    value = block_B(ising, geom, [(sig, vec), (sig, vec), (one, np.eye(build_module(ising, one, 2).total_dim)[0])])
    assert value == pytest.approx((4 / (3 * geom.X)) ** (2 / 16), rel=1e-12)


# ---- triangle amplitudes ----------------------------------------------------------------


def test_triangle_constant_cyclic(tri):
    for a, b, c, i, j, k in admissible_tuples(tri):
        assert triangle_constant(tri, a, b, c, i, j, k) == pytest.approx(
            triangle_constant(tri, b, c, a, j, k, i), rel=1e-11)


def test_triangle_constant_ising_vacuum(ising):
    one = ising.identity
    assert triangle_constant(ising, one, one, one, one, one, one) == pytest.approx(0.5 ** -0.25, rel=1e-14)


def test_primary_amplitude_factorises(tri, geom):
    rng = np.random.default_rng(11)
    tuples = admissible_tuples(tri)
    one = tri.identity
    s11 = tri.s_matrix(one, one)
    for idx in rng.choice(len(tuples), 10, replace=False):
        a, b, c, i, j, k = tuples[idx]
        hsum = float(tri.weight(i) + tri.weight(j) + tri.weight(k))
        value = triangle_amplitude(tri, a, b, c, i, j, k, geom, max_level=0, with_anomaly=False, states=(0, 0, 0))
        legs = (tri.f_symbol(a, one, b, b, i, i) * tri.f_symbol(b, one, c, c, j, j)
                * tri.f_symbol(c, one, a, a, k, k))
        dims = tri.quantum_dim(a) * tri.quantum_dim(b) * tri.quantum_dim(c)
        expected = (disc_3pt_primary(tri, a, b, c, i, j, k) * (4 / (3 * SQ3 * geom.X)) ** hsum
                    * (SQ3 / 2) ** hsum / (s11 ** 0.75 * math.sqrt(legs * dims)))
        assert value.imag == 0
        assert value.real == pytest.approx(expected, rel=1e-11)


def test_non_admissible_amplitude(ising, geom):
    one, sig, eps = ising.labels
    assert triangle_amplitude(ising, one, one, one, sig, one, one, geom, 1, with_anomaly=False) is None
    assert triangle_amplitude(ising, one, one, one, sig, one, one, geom, 1, False, states=(0, 0, 0)) == 0.0


def test_anomaly_is_multiplicative(ising, geom):
    one, sig, eps = ising.labels
    bare = triangle_amplitude(ising, sig, sig, sig, eps, eps, one, geom, 2, with_anomaly=False)
    full = triangle_amplitude(ising, sig, sig, sig, eps, eps, one, geom, 2, anomaly=0.3)
    assert np.allclose(full, math.exp(0.3) * bare, rtol=1e-14)


def test_amplitudes_real_up_to_basis_phase(tri, geom):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        vals = triangle_amplitude(tri, (1, 2), (1, 2), (1, 1), (1, 3), (1, 2), (1, 2), geom, 3, with_anomaly=False)
    mods = [build_module(tri, lab, 3) for lab in [(1, 3), (1, 2), (1, 2)]]
    odd = [m.level_diagonal().astype(int) % 2 for m in mods]
    count = odd[0][:, None, None] + odd[1][None, :, None] + odd[2][None, None, :]
    assert np.all(np.abs((vals / 1j ** count).imag) < 1e-10)


def test_high_weight_states_suppressed_near_touching():
    model = MinimalModel(3, 4)
    one, sig, eps = model.labels
    geom = TriangleGeometry(0.05, series_order=12)
    vac = abs(triangle_amplitude(model, one, one, one, one, one, one, geom, 0, False, states=(0, 0, 0)))
    mixed = abs(triangle_amplitude(model, sig, sig, sig, eps, eps, one, geom, 0, False, states=(0, 0, 0)))
    heavy = abs(triangle_amplitude(model, sig, sig, sig, eps, eps, eps, geom, 0, False, states=(0, 0, 0))) \
        if admissible_triangle(model, sig, sig, sig, eps, eps, eps) else 0.0
    norm = [vac, mixed / disc_3pt_primary(model, sig, sig, sig, eps, eps, one), heavy]
    assert norm[0] > norm[1] > norm[2]


# ---- cloaking table and the open channel ----------------------------------------------------


def test_fusion_closure_error(tri):
    with pytest.raises(FusionClosureError, match="outside"):
        check_fusion_closed(tri, [(1, 1), (1, 2)])
    assert check_fusion_closed(tri, [(1, 1), (1, 4)]) == [(1, 1), (1, 4)]


def test_cloaking_table_cyclic(ising, geom):
    delta0 = ising.s_matrix(ising.identity, ising.identity) ** 1.5
    table = cloaking_triangle_table(ising, ising.labels, delta0, 3, geom, anomaly=0.1)
    assert table.cyclic_residual() < 1e-9
    assert table.get((1, 1), (1, 1), (1, 1), (1, 2), (1, 1), (1, 1)) is None


def test_cloaking_table_dimension_exponent(ising, geom):
    one, sig, eps = ising.labels
    delta0 = 0.7
    table = cloaking_triangle_table(ising, ising.labels, delta0, 1, geom, with_anomaly=False)
    plain = triangle_amplitude(ising, sig, sig, sig, eps, eps, one, geom, 1, with_anomaly=False)
    # delta^{1/6} per corner turns dims^{-1/2} into delta0^{1/2} dims^{-1/3}
    ratio = math.sqrt(delta0) * math.sqrt(2) ** (3 / 2 - 1)
    assert np.allclose(table.get(sig, sig, sig, eps, eps, one), ratio * plain, rtol=1e-13)


def test_cloaking_table_csv(ising, geom, tmp_path):
    table = cloaking_triangle_table(ising, [(1, 1), (1, 3)], 1.0, 1, geom, with_anomaly=False)
    path = tmp_path / "table.csv"
    table.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("p,q,symmetry")
    assert len(lines) == 3 + sum(v.size for v in table.entries.values())


def test_open_channel_touching_limit(ising):
    geom = TriangleGeometry(0.05, series_order=12)
    assert abs(one_hole_open(ising, geom.ratio, 7, with_anomaly=False, geom=geom) - 1.5) < 1e-8


def test_open_channel_ising_reduction(ising):
    geom = TriangleGeometry(0.6, series_order=12)
    general = one_hole_open(ising, geom.ratio, 5, with_anomaly=False, geom=geom)
    assert general == pytest.approx(ising_open_formula(geom, 5), rel=1e-12)


def test_open_channel_from_cloaking_table(ising):
    geom = TriangleGeometry(0.6, series_order=12)
    full = one_hole_open(ising, geom.ratio, 3, with_anomaly=False, geom=geom)
    delta0 = ising.s_matrix(ising.identity, ising.identity) ** 1.5
    table = cloaking_triangle_table(ising, ising.labels, delta0, 3, geom, with_anomaly=False)
    # the hole boundary is connected, so only corners with one common label contribute
    total = sum(np.sum(v * v) for (a, b, c, *_), v in table.entries.items() if a == b == c)
    assert full == pytest.approx(total.real, rel=1e-12)
    assert abs(total.imag) < 1e-12
