import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fastids import bench, engine
from oracles import fvu_ref


def test_target_values():
    assert bench.f1(1.0, 1.0) == 9.0
    assert bench.f2(math.pi / 2, math.pi / 2) == pytest.approx(1.4235, abs=1e-4)


@pytest.mark.parametrize("gen", [bench.gen_f1, bench.gen_f2, bench.gen_sine])
def test_regression_generators(gen):
    a, b = gen(200, seed=11), gen(200, seed=11)
    assert np.array_equal(a.X, b.X) and np.array_equal(a.y, b.y)
    assert a.X.min() >= 1.0 and a.X.max() <= 10.0
    assert not np.array_equal(a.X, gen(200, seed=12).X)


def test_generators_match_targets():
    d = bench.gen_f1(50, seed=0)
    assert np.array_equal(d.y, bench.f1(d.X[:, 0], d.X[:, 1]))
    d = bench.gen_f2(50, seed=0)
    assert np.array_equal(d.y, bench.f2(d.X[:, 0], d.X[:, 1]))


def test_sine_target_midpoint_scaled():
    assert bench.sine_target(1.0) == pytest.approx(5.5)
    assert bench.sine_target(3.25) == pytest.approx(10.0)
    assert bench.sine_target(7.75) == pytest.approx(1.0)


def test_spiral_geometry():
    p = bench.SpiralParams()
    start = bench.spiral_point(-2 * math.pi * p.n_turns, p)
    assert np.hypot(*start) == pytest.approx(p.r0)
    d = bench.gen_two_spiral(97, seed=4)
    assert len(d) == 194 and d.labels == (0.0, 1.0)
    assert np.sum(d.y == 0) == np.sum(d.y == 1) == 97
    zero, one = d.X[d.y == 0], d.X[d.y == 1]
    # every class-1 point is the reflection of a class-0 point
    for q in one:
        assert np.min(np.hypot(*(zero + q).T)) < 1e-12
    r = np.hypot(zero[:, 0], zero[:, 1])
    assert r.min() >= p.r0 - 1e-12 and r.max() <= p.r0 + p.p * 2 * math.pi * p.n_turns + 1e-12


def test_ring_labels_and_generator():
    assert bench.ring_label(0, 0) == 0
    assert bench.ring_label(0, 1.5) == 1
    assert bench.ring_label(2.5, 0) == 2
    d = bench.gen_three_ring(50, seed=1)
    assert len(d) == 150 and [np.sum(d.y == c) for c in (0, 1, 2)] == [50, 50, 50]
    assert np.array_equal(bench.ring_label(d.X[:, 0], d.X[:, 1]), d.y)
    assert np.all(np.abs(d.X) <= 3)
    with pytest.raises(bench.GenerationError):
        bench.gen_three_ring(5, r1=2, r2=1)
    with pytest.raises(bench.GenerationError):
        bench.gen_three_ring(5, box=(-1.0, 1.0))


def test_fvu_examples():
    y = np.array([1.0, 2.0, 4.0, 7.0])
    assert bench.fvu(y, y) == 0.0
    assert bench.fvu(np.full(4, y.mean()), y) == pytest.approx(1.0)
    c = 0.3
    assert bench.fvu(y + c, y) == pytest.approx(4 * c * c / np.sum((y - y.mean()) ** 2))
    with pytest.raises(bench.MetricError):
        bench.fvu([1.0, 1.0], [2.0, 2.0])
    with pytest.raises(bench.MetricError):
        bench.fvu([1.0], [2.0])


vals = st.lists(st.floats(-100, 100), min_size=2, max_size=30)


@given(vals, st.floats(-50, 50), st.floats(0.1, 10), st.randoms())
def test_fvu_properties(truth, shift, scale, rnd):
    truth = np.array(truth)
    if np.ptp(truth) < 1e-3:
        return
    pred = truth + np.array([rnd.uniform(-1, 1) for _ in truth])
    base = bench.fvu(pred, truth)
    assert base >= 0
    assert base == pytest.approx(fvu_ref(pred, truth), rel=1e-9)
    assert bench.fvu(pred + shift, truth + shift) == pytest.approx(base, rel=1e-6, abs=1e-12)
    assert bench.fvu(pred * scale, truth * scale) == pytest.approx(base, rel=1e-6, abs=1e-12)


def test_accuracy_examples():
    assert bench.accuracy([0, 1, 1], [0, 1, 1]) == 1.0
    assert bench.accuracy([1, 0], [0, 1]) == 0.0
    assert bench.accuracy([0, 1, 2, 2], [0, 1, 2, 0]) == 0.75
    with pytest.raises(bench.MetricError):
        bench.accuracy([], [])


def test_make_dataset_names():
    for name in bench.DATASETS:
        assert len(bench.make_dataset(name, 10, 0)) in (10, 20, 30)
    with pytest.raises(bench.GenerationError):
        bench.make_dataset("mnist", 10, 0)


def test_run_seed_independent_streams():
    seeds = {bench.run_seed(7, r) for r in range(100)}
    assert len(seeds) == 100
    assert bench.run_seed(7, 3) == bench.run_seed(7, 3)


def small_request(**kw):
    cfg = engine.AlmConfig(rsn_x=64, rsn_y=64, sigma=4.0, alpha1=0.05, alpha2=0.8)
    base = dict(dataset="f2", backends=("classic", "fast"), partitions=((2, 2),), sizes=(150,),
                test_size=100, runs=3, seed=5, serial=True, config=cfg)
    base.update(kw)
    return bench.BenchRequest(**base)


def test_benchmark_records_and_summary():
    recs = bench.run_benchmark(small_request())
    assert len(recs) == 6
    for r in recs:
        assert r.metric == "fvu" and math.isfinite(r.value) and r.value >= 0
        assert r.train_seconds > 0 and r.predict_seconds > 0 and r.n_planes == 4
        assert r.plane_cells == (64 * 64 if r.backend == "classic" else 3 * 64)
        assert r.stored_cells == 4 * r.plane_cells
    summary = bench.summarize(recs)
    fast_row = next(s for s in summary if s["backend"] == "fast")
    classic_row = next(s for s in summary if s["backend"] == "classic")
    vals = [r.value for r in recs if r.backend == "fast"]
    assert fast_row["mean"] == pytest.approx(np.mean(vals))
    assert fast_row["std"] == pytest.approx(np.std(vals))
    assert fast_row["speedup_vs_classic"] == pytest.approx(
        classic_row["train_seconds_mean"] / fast_row["train_seconds_mean"])
    assert "speedup_vs_classic" not in classic_row


def test_benchmark_reproducible():
    a = bench.run_benchmark(small_request(runs=1))
    b = bench.run_benchmark(small_request(runs=1))
    assert [r.value for r in a] == [r.value for r in b]


def test_parallel_matches_serial(monkeypatch):
    monkeypatch.setenv("FASTIDS_THREADS", "2")
    a = bench.run_benchmark(small_request(serial=False, backends=("fast",)))
    b = bench.run_benchmark(small_request(backends=("fast",)))
    assert [r.value for r in a] == [r.value for r in b]


def test_classification_benchmark():
    cfg = engine.AlmConfig(sigma=4.0, alpha1=0.027, alpha2=0.23)
    recs = bench.run_benchmark(bench.BenchRequest(
        "two_spiral", ("fast",), ((6, 6),), (50,), 50, 2, 1, True, cfg))
    assert all(r.metric == "accuracy" and 0 <= r.value <= 1 for r in recs)
    assert all(r.n_train == 100 for r in recs)


def test_report_formats():
    recs = bench.run_benchmark(small_request(runs=2, backends=("fast",)))
    lines = bench.records_csv(recs).strip().splitlines()
    assert lines[0].split(",") == bench.RECORD_FIELDS
    assert len(lines) == 3
    value = lines[1].split(",")[bench.RECORD_FIELDS.index("value")]
    assert len(value.replace(".", "").replace("e-", "").lstrip("0")) <= 6 + 2
    parsed = json.loads(bench.summary_json(recs))
    assert parsed[0]["runs"] == 2


def test_dataset_csv_round_trip():
    d = bench.gen_f1(20, seed=3)
    back = bench.read_dataset_csv(bench.dataset_csv(d))
    assert np.array_equal(back.X, d.X) and np.array_equal(back.y, d.y)
    with pytest.raises(bench.GenerationError):
        bench.read_dataset_csv("a,b\n1,2\n")


def test_memory_table():
    rows = {(r["rsn"], r["backend"]): r["cells"] for r in bench.memory_table()}
    assert rows[(64, "classic")] == 4096 and rows[(256, "classic")] == 65536
    assert rows[(64, "fast")] == rows[(64, "crossbar")] == 192
    assert rows[(256, "fast")] == rows[(256, "crossbar")] == 768
