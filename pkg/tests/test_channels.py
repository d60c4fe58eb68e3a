import cmath
import json
import math

import numpy as np
import pytest

from cftlattice.blocks import FusionClosureError
from cftlattice.channels import (ALT_TAU, FIXTURE_CASES, HEX_TAU, ChannelError, state_sum_fixture,
                                 category_dimension, channel_compare, closed_channel_series,
                                 cloaking_boundary_state, lemma_sums, one_hole_closed, stability_check,
                                 symmetry_set, tilde_set, torus_one_point, torus_partition_function, torus_traces)
from cftlattice.minimal_model import MinimalModel

UNITARY = [MinimalModel(p, p + 1) for p in (3, 4, 5, 6)]


@pytest.fixture(scope="module")
def ising():
    return MinimalModel(3, 4)


@pytest.fixture(scope="module")
def series(ising):
    return closed_channel_series(ising)


# ---- cloaking sets -------------------------------------------------------------------------


@pytest.mark.parametrize("model", UNITARY, ids=str)
def test_tilde_sets(model):
    p, q = model.p, model.q
    assert tilde_set(model, symmetry_set(model, "I")) == [model.identity]
    first_row = {model.canonical(x, 1) for x in range(1, p, 2)}
    assert set(tilde_set(model, symmetry_set(model, "R"))) == first_row
    z2 = {model.canonical(x, y) for x in range(1, p) for y in range(1, q) if (q * (x - 1) + p * (y - 1)) % 2 == 0}
    assert set(tilde_set(model, symmetry_set(model, "Z"))) == z2


@pytest.mark.parametrize("model", UNITARY, ids=str)
@pytest.mark.parametrize("name", ["I", "R", "Z"])
def test_tilde_lemma(model, name):
    sym = symmetry_set(model, name)
    members = set(tilde_set(model, sym))
    dim = category_dimension(model, sym)
    for x, value in lemma_sums(model, sym).items():
        assert abs(value - (dim if x in members else 0.0)) < 1e-10


def test_tilde_set_rejects_open_set():
    with pytest.raises(FusionClosureError):
        tilde_set(MinimalModel(4, 5), [(1, 1), (1, 2)])


@pytest.mark.parametrize("model", UNITARY, ids=str)
def test_stability_verdicts(model):
    assert stability_check(model, symmetry_set(model, "I")).satisfied
    assert stability_check(model, symmetry_set(model, "R")).satisfied
    verdict = stability_check(model, symmetry_set(model, "Z"))
    assert not verdict.satisfied
    offenders = dict(verdict.offenders)
    t = model.p / model.q
    assert offenders[model.canonical(1, 3)] == pytest.approx(2 * t - 1)


def test_stability_needs_unitary():
    with pytest.raises(ChannelError):
        stability_check(MinimalModel(3, 5), [(1, 1)])


@pytest.mark.parametrize("name", ["I", "R", "Z"])
def test_cloaking_projection_idempotent(name):
    model = MinimalModel(5, 6)
    sym = symmetry_set(model, name)
    state = cloaking_boundary_state(model, sym, delta0=0.37)
    factor = 0.37 * category_dimension(model, sym)
    for x in model.labels:
        eig = state.projector_eigenvalue(x)
        # P^2 = delta0 Dim P on every Ishibashi component
        assert eig * eig == pytest.approx(factor * eig, abs=1e-10)
        assert (abs(eig) > 1e-9) == (x in state.sectors)


def test_cloaking_state_default_delta(ising):
    state = cloaking_boundary_state(ising, ising.labels)
    s11 = ising.s_matrix(ising.identity, ising.identity)
    assert state.delta0 == pytest.approx(s11 ** 1.5)
    assert state.coefficients == {ising.identity: pytest.approx(s11 ** 1.5 * 4 * math.sqrt(s11))}
    assert state.coefficients[ising.identity] == pytest.approx(1.0)


# ---- torus one-point functions -----------------------------------------------------------


def test_torus_identity_is_partition_function(ising):
    value = torus_one_point(ising, ())
    assert value.real == pytest.approx(torus_partition_function(ising), rel=1e-12)
    assert abs(value - 1.88) < 0.01 * 1.88
    assert abs(value.imag) < 1e-14


def test_torus_holomorphic_factorisation(ising):
    traces = torus_traces(ising)
    vec = traces.word_vector((2,))
    value = torus_one_point(ising, (2,))
    chiral = [traces.chiral_one_point(lab, vec, HEX_TAU) for lab in ising.labels]
    assert value == pytest.approx(sum(abs(x) ** 2 for x in chiral), rel=1e-13)


def test_torus_stress_tensor_ward_identity(ising):
    # L_{-2} L-bar_{-2} insertion against tau-derivatives of the characters
    traces = torus_traces(ising)
    eps = 1e-5
    expected = 0.0
    for lab in ising.labels:
        plus = traces.plane_trace(lab, traces.word_vector(()), HEX_TAU + eps)
        minus = traces.plane_trace(lab, traces.word_vector(()), HEX_TAU - eps)
        expected += abs(2j * math.pi * (plus - minus) / (2 * eps)) ** 2
    assert abs(torus_one_point(ising, (2,)) - expected) < 1e-6 * expected


def test_torus_derivative_fields_vanish(ising):
    for word in [(3,), (4,), (5,)]:
        assert abs(torus_one_point(ising, word)) < 1e-20


def test_torus_modulus_check(ising):
    traces = torus_traces(ising)
    with pytest.raises(ChannelError):
        traces.chiral_one_point(ising.identity, traces.word_vector(()), -0.5j)
    with pytest.raises(ChannelError):
        torus_one_point(ising, (8, 8))


# ---- closed channel -----------------------------------------------------------------------


def test_closed_small_hole_limit(ising, series):
    for radius in (1e-3, 1e-2):
        scaled = radius ** (1 / 12) * series.with_anomaly(radius)
        assert abs(scaled - 1.88) < 0.01 * 1.88
    assert series.raw(0.0) == pytest.approx(torus_partition_function(ising), rel=1e-12)


def test_closed_leading_power(series):
    small = [series.with_anomaly(r) for r in (1e-4, 2e-4)]
    assert math.log(small[1] / small[0]) / math.log(2) == pytest.approx(-1 / 12, abs=1e-6)


def test_closed_odd_levels_vanish(series):
    coeffs = series.coefficients
    for level in range(1, len(coeffs) - 1, 2):
        assert abs(coeffs[level]) < 1e-12 * abs(coeffs[level + 1])
    assert np.all(series.coefficients[0::2].real > 0)


def test_closed_truncation_convergence(ising, series):
    lower = closed_channel_series(ising, weight_cutoff=12)
    assert abs(lower.with_anomaly(0.25) - series.with_anomaly(0.25)) < 0.005 * series.with_anomaly(0.25)


def test_closed_errors(ising):
    with pytest.raises(ChannelError):
        one_hole_closed(ising, 0.6)
    with pytest.raises(ChannelError):
        one_hole_closed(ising, -0.1)
    with pytest.raises(ChannelError):
        closed_channel_series(MinimalModel(4, 5), symmetry=[(1, 1), (1, 4)])


def test_alternative_modulus_accepted(ising):
    value = one_hole_closed(ising, 0.05, tau=ALT_TAU, weight_cutoff=6)
    nome = cmath.exp(2j * math.pi * ALT_TAU)
    assert abs(nome) < 1
    assert value > 0


# ---- channel comparison --------------------------------------------------------------------


@pytest.fixture(scope="module")
def comparison(ising):
    return channel_compare(ising, [0.2, 0.3, 0.4])


def test_channels_agree_with_anomaly(comparison):
    assert np.all(comparison.relative(True) < 0.02)


def test_channels_disagree_without_anomaly(comparison):
    assert np.max(comparison.relative(False)) > 0.2


def test_comparison_outputs(comparison, tmp_path):
    csv_path, json_path = tmp_path / "c.csv", tmp_path / "c.json"
    comparison.write_csv(csv_path)
    comparison.write_json(json_path)
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "R_over_d,open_raw,open_anomaly,closed_raw,closed_anomaly,diff"
    assert len(rows) == 4
    summary = json.loads(json_path.read_text())
    assert summary["cutoffs"] == {"open_level": 7, "closed_weight": 14}
    assert {r.channel for r in comparison.results()} == {"open", "closed"}


# ---- intermediate-state fixtures -------------------------------------------------------------


@pytest.mark.parametrize("case", FIXTURE_CASES)
def test_state_sum_fixtures(case):
    report = state_sum_fixture(case)
    assert report.passed, str(report)


def test_fixture_other_model():
    report = state_sum_fixture("cylinder_open", MinimalModel(4, 5), boundary=((1, 2), (2, 2)))
    assert report.passed, str(report)


def test_unknown_fixture():
    with pytest.raises(ChannelError):
        state_sum_fixture("sphere")
