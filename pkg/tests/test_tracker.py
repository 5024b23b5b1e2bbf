import time

import numpy as np
import pytest

from ladcf import solver
from ladcf import tracker as tk
from ladcf.errors import InvalidInputError
from ladcf.solver import SolverConfig, SpectralFilter
from ladcf.synthetic import make_synthetic
from ladcf.tracker import BoundingBox, TrackerConfig


@pytest.fixture(scope="module")
def static_seq():
    return make_synthetic("static", 12, noise=6.0, seed=5)


@pytest.fixture(scope="module")
def init_state(static_seq):
    return tk.init(static_seq.frame(0), BoundingBox(*static_seq.groundtruth[0]))


def test_paper_defaults():
    cfg = TrackerConfig()
    assert (cfg.padding, cfg.scale_factor, cfg.scales, cfg.cell) == (4, 1.01, 5, 4)


def test_scale_exponents():
    assert TrackerConfig().exponents().tolist() == [-2, -1, 0, 1, 2]
    assert TrackerConfig(scales=1).exponents().tolist() == [0]


@pytest.mark.parametrize("kw", [dict(scales=4), dict(scales=0), dict(scale_factor=1.0),
                                dict(padding=0), dict(window="blackman")])
def test_config_invariants(kw):
    with pytest.raises(InvalidInputError):
        TrackerConfig(**kw)


def test_degenerate_bbox():
    with pytest.raises(InvalidInputError):
        BoundingBox(10, 10, 0, 5)


def test_init_geometry(init_state, static_seq):
    s = init_state
    assert s.n == pytest.approx(200)
    assert s.D == 50
    np.testing.assert_allclose(s.center, static_seq.groundtruth[0, :2] + 20)
    mask = tk.target_mask(s.size, s.n, s.D)
    rows, cols = np.nonzero(mask)
    assert mask.sum() == 100
    assert (rows.min(), rows.max(), cols.min(), cols.max()) == (20, 29, 20, 29)
    assert mask.sum() / s.D**2 == pytest.approx(1 / 25)


def test_init_filter_supported_on_target(init_state):
    norms = solver.group_norms(init_state.theta_model.spatial())
    mask = tk.target_mask(init_state.size, init_state.n, init_state.D)
    assert np.all(norms[~mask] < 1e-12)


def test_detect_on_init_frame_is_identity(init_state, static_seq):
    dp, s, score = tk.detect(init_state, static_seq.frame(0))
    assert dp == (0, 0)
    assert s == 3
    assert score > 0


def test_bbox_at_frame_edge():
    seq = make_synthetic("static", 2, seed=1)
    state = tk.init(seq.frame(0), BoundingBox(0, 0, 30, 30))
    box = tk.step(state, seq.frame(1))
    assert np.all(np.isfinite(box.as_tuple()))


def test_detect_synthetic_shift():
    seq = make_synthetic("linear", 2, noise=4.0, seed=3, velocity=(8.0, 0.0))
    state = tk.init(seq.frame(0), BoundingBox(*seq.groundtruth[0]))
    dp, s, _ = tk.detect(state, seq.frame(1))
    assert dp == (2, 0)
    assert s == 3


def test_detect_vertical_shift():
    seq = make_synthetic("linear", 2, noise=4.0, seed=4, velocity=(0.0, -12.0))
    state = tk.init(seq.frame(0), BoundingBox(*seq.groundtruth[0]))
    dp, s, _ = tk.detect(state, seq.frame(1))
    assert dp == (0, -3)


def test_zero_filter_response(init_state, static_seq):
    zero = SpectralFilter(np.zeros_like(init_state.theta_model.hat))
    state = tk.TrackerState(init_state.center, init_state.size, init_state.n, init_state.D, zero,
                            window=init_state.window, label=init_state.label)
    f = tk.responses(state, static_seq.frame(1), TrackerConfig())
    assert np.all(f == 0)
    assert tk.peak(f, state.D) == ((0, 0), 1, 0.0)


def test_argmax_invariant_to_feature_scaling(rng, init_state):
    Xs = rng.uniform(0, 1, size=(3, 41, 50, 50))
    base = np.stack([tk.response(X, init_state.theta_model) for X in Xs])
    for c in (0.01, 3.0, 250.0):
        scaled = np.stack([tk.response(c * X, init_state.theta_model) for X in Xs])
        np.testing.assert_allclose(scaled, c * base, rtol=1e-9, atol=1e-12)
        assert tk.peak(scaled, 50)[:2] == tk.peak(base, 50)[:2]


def test_apply_motion_identity(init_state):
    moved = tk.apply_motion(init_state, (0, 0), 3)
    np.testing.assert_array_equal(moved.center, init_state.center)
    np.testing.assert_array_equal(moved.size, init_state.size)
    assert moved.n == init_state.n


def test_apply_motion_shift(init_state):
    moved = tk.apply_motion(init_state, (2, 0), 3)
    np.testing.assert_allclose(moved.center - init_state.center, [8.0, 0.0])


def test_apply_motion_largest_scale(init_state):
    moved = tk.apply_motion(init_state, (0, 0), 5)
    np.testing.assert_allclose(moved.size, init_state.size * 1.0201)
    assert moved.n == pytest.approx(5 * np.sqrt(moved.size.prod()))
    assert moved.D == init_state.D


def test_apply_motion_clamps_tiny_targets(init_state):
    tiny = tk.TrackerState(init_state.center, np.array([4.0, 4.0]), 20.0, 5, init_state.theta_model)
    moved = tk.apply_motion(tiny, (0, 0), 1)
    assert moved.clamped
    assert moved.size.min() == pytest.approx(4.0)


def test_apply_motion_rejects_bad_scale(init_state):
    with pytest.raises(InvalidInputError):
        tk.apply_motion(init_state, (0, 0), 6)


def test_fixed_point_after_step(static_seq):
    state = tk.init(static_seq.frame(0), BoundingBox(*static_seq.groundtruth[0]))
    tk.step(state, static_seq.frame(0))
    assert tk.detect(state, static_seq.frame(0))[:2] == ((0, 0), 3)


def test_static_target_box_stable(static_seq):
    state = tk.init(static_seq.frame(0), BoundingBox(*static_seq.groundtruth[0]))
    first = np.array(state.box.as_tuple())
    for i in range(1, 11):
        box = np.array(tk.step(state, static_seq.frame(i)).as_tuple())
        assert np.max(np.abs(box[:2] - first[:2])) <= 4
        assert state.last_detection[0] == (0, 0)


def test_frozen_model_with_zero_learning_rate(static_seq):
    cfg = TrackerConfig(solver=SolverConfig(alpha=0.0))
    state = tk.init(static_seq.frame(0), BoundingBox(*static_seq.groundtruth[0]), cfg)
    before = state.theta_model.hat.tobytes()
    for i in range(1, 4):
        tk.step(state, static_seq.frame(i), cfg)
        assert state.theta_model.hat.tobytes() == before


def test_tracker_wrapper(static_seq):
    t = tk.Tracker()
    box = t.init(static_seq.frame(0), tuple(static_seq.groundtruth[0]))
    assert box.as_tuple() == pytest.approx(tuple(static_seq.groundtruth[0]))
    assert t.update(static_seq.frame(1)).w == pytest.approx(40, rel=0.03)


def _best_time(fn, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_cost_scales_roughly_quadratically():
    times = {}
    cfg = SolverConfig()
    for D in (32, 64, 128):
        rng = np.random.default_rng(D)
        X = rng.uniform(size=(41, D, D))
        model = SpectralFilter.from_spatial(rng.standard_normal((41, D, D)))
        y = np.zeros((D, D))
        y[0, 0] = 1

        def work():
            solver.learn(X, y, model, cfg)
            for _ in range(5):
                tk.response(X, model)
        times[D] = _best_time(work)
    # D^2 log D predicts ~22x from 32 to 128; allow headroom for timer noise
    assert times[128] / times[32] <= 40
    assert times[128] / times[64] <= 10
