import numpy as np
import pytest

from gluewalk.experiment import (
    DEFAULT_ETAS,
    ExperimentConfig,
    classical_baseline,
    eta_scan,
    first_arrival,
    layer_scan,
    optimize_initial_coin,
    peak_filter,
    run_walk,
    target_curve,
)
from gluewalk.graph import GluedTreesSpec, build_glued_trees
from gluewalk.walk import InitialCondition, default_initial_condition, grover_coin, initial_pure

from oracles import dense_walk_probabilities


def test_config_validation():
    spec = GluedTreesSpec(2)
    with pytest.raises(ValueError):
        ExperimentConfig(spec, 0)
    with pytest.raises(ValueError):
        ExperimentConfig(spec, 3, ())
    with pytest.raises(ValueError):
        ExperimentConfig(spec, 3, (1.2,))
    with pytest.raises(ValueError):
        ExperimentConfig(spec, 3, threshold=1.0)


def test_trace_starts_localized_and_rows_normalize():
    trace = run_walk(ExperimentConfig(GluedTreesSpec(3), 12, (1.0, 0.7, 0.0)))
    p = trace.probabilities
    assert p.shape == (3, 13, GluedTreesSpec(3).num_vertices)
    assert np.all(p[:, 0, 0] == 1.0)
    np.testing.assert_allclose(p.sum(axis=2), 1.0, atol=1e-9)
    assert p.min() >= 0


@pytest.mark.parametrize("eta", [1.0, 0.9])
def test_g1_pipeline_against_dense_oracle(eta):
    spec = GluedTreesSpec(1)
    init = default_initial_condition()
    trace = run_walk(ExperimentConfig(spec, 5, (eta,), init), pure_fast_path=False)
    g = build_glued_trees(spec)
    ref, _ = dense_walk_probabilities(g, grover_coin(3).matrix, initial_pure(g, init), 5, eta)
    np.testing.assert_allclose(trace.for_eta(eta), ref, atol=1e-10, rtol=0)


def test_pure_fast_path_matches_density_on_g6():
    config = ExperimentConfig(GluedTreesSpec(6), 25, (1.0,))
    fast = run_walk(config)
    slow = run_walk(config, pure_fast_path=False)
    np.testing.assert_allclose(fast.probabilities, slow.probabilities, atol=1e-10, rtol=0)


def test_ideal_g6_curve(g6_trace):
    curve = target_curve(g6_trace)[1.0]
    assert int(np.argmax(curve)) == 16
    assert curve[16] == pytest.approx(0.655, abs=2e-3)
    assert curve[13] == pytest.approx(0.122, abs=2e-3)
    assert first_arrival(curve, 0.05) == 13


def test_lingering_gap_at_step_22(g6_trace):
    curves = target_curve(g6_trace)
    assert curves[0.9][22] - curves[1.0][22] == pytest.approx(0.0294, abs=1e-3)


def test_single_step_trace_has_two_columns():
    trace = run_walk(ExperimentConfig(GluedTreesSpec(2), 1, (1.0,)))
    assert target_curve(trace)[1.0].shape == (2,)


def test_first_arrival_none():
    assert first_arrival(np.zeros(4)) is None


def test_eta_scan_single_point_matches_ideal(g6_trace):
    scan = eta_scan(GluedTreesSpec(6), [16], (1.0,), default_initial_condition())
    assert scan[16].shape == (1,)
    assert scan[16][0] == pytest.approx(target_curve(g6_trace)[1.0][16], abs=1e-12)


def test_peak_filter(g6_trace):
    peaks = peak_filter(g6_trace, 1.0, 16)
    assert peaks[0][0] == 253
    assert all(p < peaks[0][1] for _, p in peaks[1:])
    assert all(p > 0.25 * peaks[0][1] for _, p in peaks)
    assert peak_filter(g6_trace, 0.8, 16)[0][0] == 253
    assert peak_filter(g6_trace, 0.9, 0) == [(0, 1.0)]


def test_peak_filter_fraction_zero_keeps_all_positive(g6_trace):
    p = g6_trace.for_eta(0.8)[16]
    assert len(peak_filter(g6_trace, 0.8, 16, fraction=0.0)) == np.count_nonzero(p)


def test_trough_boost(g6_trace):
    ideal = g6_trace.for_eta(1.0)[16]
    noisy = g6_trace.for_eta(0.8)[16]
    low = ideal < 1e-4
    assert low.any()
    assert noisy[low].mean() > ideal[low].mean()


def test_target_dominance_steps_13_to_16(g6_trace):
    for eta in DEFAULT_ETAS:
        for t in (13, 14, 15, 16):
            assert peak_filter(g6_trace, eta, t)[0][0] == 253, (eta, t)


def test_optimize_coin_g6(g6_coin):
    assert g6_coin.beta == pytest.approx(0.638, abs=0.01)
    assert g6_coin.alpha == pytest.approx(np.sqrt(1 - 2 * g6_coin.beta**2))
    assert g6_coin.peak_step == 16


def test_optimize_coin_beats_beta_zero(g6_coin):
    forced = optimize_initial_coin(GluedTreesSpec(6), 25, betas=[0.0])
    assert forced.beta == 0.0
    assert forced.peak_probability < g6_coin.peak_probability


def test_optimize_coin_agrees_with_direct_walk():
    spec = GluedTreesSpec(4)
    best = optimize_initial_coin(spec, 20, betas=[0.3, 0.5])
    trace = run_walk(ExperimentConfig(spec, 20, (1.0,), default_initial_condition(best.beta)))
    curve = target_curve(trace)[1.0]
    assert curve.max() == pytest.approx(best.peak_probability, abs=1e-12)
    assert int(curve.argmax()) == best.peak_step


def test_optimize_coin_tie_goes_to_smaller_beta():
    assert optimize_initial_coin(GluedTreesSpec(2), 8, betas=[0.4, 0.4]).beta == 0.4


def test_layer_scan_small():
    rows = layer_scan(range(1, 4), (1.0, 0.9), optimize_coin=False)
    assert [(r.eta, r.n) for r in rows] == [(e, n) for e in (1.0, 0.9) for n in (1, 2, 3)]
    for r in rows:
        assert 0 <= r.peak_step <= 3 * r.n + 10
        assert 0 < r.peak_probability <= 1


def test_layer_scan_rejects_empty_and_oversize():
    with pytest.raises(ValueError):
        layer_scan([4], ())
    with pytest.raises(MemoryError, match="GiB"):
        layer_scan([12], (1.0,))


def test_classical_baseline():
    spec = GluedTreesSpec(6)
    hist = classical_baseline(spec, 25)
    assert hist[0, 0] == 1.0 and hist[0].sum() == 1.0
    np.testing.assert_allclose(hist.sum(axis=1), 1.0, atol=1e-12)
    assert hist[16, spec.target] < 1e-3 * 0.655


def test_classical_baseline_matches_matrix_power():
    g = build_glued_trees(2)
    P = np.zeros((g.num_vertices, g.num_vertices))
    for v in range(g.num_vertices):
        for w in g.neighbors(v):
            P[v, w] += 1 / 3
    x = np.zeros(g.num_vertices)
    x[0] = 1
    hist = classical_baseline(g, 7)
    for t in range(8):
        np.testing.assert_allclose(hist[t], x, atol=1e-15)
        x = x @ P


def test_custom_initial_condition_respected():
    trace = run_walk(ExperimentConfig(GluedTreesSpec(2), 1, (1.0,), InitialCondition(0, [1, 0, 0])))
    p = trace.for_eta(1.0)[1]
    # Grover on |0>: (-1/3, 2/3, 2/3)
    assert p[0] == pytest.approx(1 / 9)
    assert p[1] == pytest.approx(4 / 9)
