import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qabba.bench import (
    ParseError, ProfileMatrix, bitwidth_sweep, compare_methods, load_tsv, mini_corpus, performance_profile,
    performance_ratios, profile_rows, synth_gaussian, to_csv, write_tsv,
)
from qabba.core import CompressionParams, DigitizationParams, PipelineConfig, QabbaError, Series


def test_ratios_examples():
    np.testing.assert_array_equal(performance_ratios(ProfileMatrix([[3.0, 7.0]], ["a"], ["p", "q"])), [[1, 1]])
    np.testing.assert_array_equal(performance_ratios(np.array([[1.0, 2.0], [2.0, 1.0]])), [[1, 2], [2, 1]])


def test_profile_examples():
    r = np.array([[1.0, 2.0], [2.0, 1.0]])
    np.testing.assert_array_equal(performance_profile(r, [1.5]).rho[:, 0], [0.5, 0.5])
    np.testing.assert_array_equal(performance_profile(r, [3.0]).rho[:, 0], [1.0, 1.0])
    assert performance_profile(np.ones((1, 4)), [1.5]).rho[0, 0] == 1.0
    assert performance_profile(np.ones((1, 4)), [1.0]).rho[0, 0] == 0.0  # strict inequality
    with pytest.raises(QabbaError):
        performance_profile(r, [0.5])


def test_failures_and_zero_columns():
    v = np.array([[0.0, np.inf, 2.0], [0.0, 3.0, np.nan], [1.0, 6.0, 4.0]])
    r = performance_ratios(v)
    np.testing.assert_array_equal(r[:, 0], [1.0, 1.0, np.inf])
    np.testing.assert_array_equal(r[:, 1], [np.inf, 1.0, 2.0])
    np.testing.assert_array_equal(r[:, 2], [1.0, np.inf, 2.0])
    rho = performance_profile(r, [1e9]).rho[:, 0]
    np.testing.assert_allclose(rho, [2 / 3, 2 / 3, 2 / 3])
    allfail = performance_ratios(np.array([[np.inf], [np.inf]]))
    assert np.all(np.isinf(allfail))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_profile_monotone_and_bounded(na, npb, seed):
    rng = np.random.default_rng(seed)
    v = rng.exponential(size=(na, npb))
    v[rng.random((na, npb)) < 0.1] = np.inf
    r = performance_ratios(v)
    th = np.sort(rng.uniform(1, 20, 30))
    rho = performance_profile(r, th).rho
    assert np.all((rho >= 0) & (rho <= 1))
    assert np.all(np.diff(rho, axis=1) >= 0)
    finite = r[np.isfinite(r)]
    big = performance_profile(r, [finite.max() * 2 if finite.size else 2.0]).rho[:, 0]
    np.testing.assert_allclose(big, np.isfinite(v).mean(axis=1))


def test_load_tsv(tmp_path):
    p = tmp_path / "d.tsv"
    p.write_text("1\t0.0\t1.0\t2.0\n2\t0.0\t1.0\tNaN\n\n")
    out = load_tsv(p)
    assert [s.samples.tolist() for s in out] == [[0.0, 1.0, 2.0], [0.0, 1.0]]
    (tmp_path / "e.tsv").write_text("")
    assert load_tsv(tmp_path / "e.tsv") == []
    (tmp_path / "bad.tsv").write_text("1\t0.0\n1\t2.0\tx\n")
    with pytest.raises(ParseError) as exc:
        load_tsv(tmp_path / "bad.tsv")
    assert (exc.value.row, exc.value.column) == (2, 3)


def test_write_then_load_tsv(tmp_path):
    series = [Series(np.random.default_rng(1).standard_normal(20)) for _ in range(3)]
    write_tsv(tmp_path / "x.tsv", series)
    assert load_tsv(tmp_path / "x.tsv") == series


def test_synth_gaussian():
    a = synth_gaussian(50, 3, seed=7)
    b = synth_gaussian(50, 3, seed=7)
    assert all(x == y for x, y in zip(a, b))
    assert len(a) == 3 and len(a[0]) == 50
    big = synth_gaussian(5000, 1, seed=11)[0].samples
    # 5 standard errors on mean (1/sqrt(n)) and variance (sqrt(2/n))
    assert abs(big.mean()) < 5 / math.sqrt(5000)
    assert abs(big.var() - 1) < 5 * math.sqrt(2 / 5000)
    with pytest.raises(QabbaError):
        synth_gaussian(1, 1)


def test_bitwidth_sweep_small():
    series = synth_gaussian(400, 4, seed=3)
    cfg = PipelineConfig()
    rows = bitwidth_sweep(series, cfg, [4, 16, 32], "inc")
    assert [r["bits"] for r in rows] == [4, 16, 32]
    assert rows[0]["mse"] >= rows[1]["mse"]
    assert rows[2]["mse"] == pytest.approx(rows[2]["unquantized_mse"], abs=1e-6)
    with pytest.raises(QabbaError):
        bitwidth_sweep(series, cfg, [8], "both")


def test_bitwidth_sweep_parallel_matches(monkeypatch):
    series = synth_gaussian(300, 4, seed=5)
    seq = bitwidth_sweep(series, PipelineConfig(), [6, 12], "len", threads=1)
    par = bitwidth_sweep(series, PipelineConfig(), [6, 12], "len", threads=3)
    assert seq == par


def test_compare_methods_and_rows():
    corpus = mini_corpus(seed=2, per_dataset=2, length=120)
    series = [s for v in corpus.values() for s in v][:3]
    mats = compare_methods(series, ["fabba", "qabba-ga"], alpha=0.3, measures=("euclidean", "dtw"))
    assert set(mats) == {"euclidean", "dtw"}
    assert mats["dtw"].values.shape == (2, 3)
    rows = profile_rows(mats)
    assert {r["rho"] for r in rows} <= {0.0, 1 / 3, 2 / 3, 1.0}
    text = to_csv(rows)
    assert text.splitlines()[0] == "measure,algorithm,theta,rho"


def test_mini_corpus_shapes():
    c = mini_corpus(seed=0)
    assert len(c) == 5
    assert all(len(v) == 8 and len(v[0]) == 300 for v in c.values())


def test_kernel_benchmark_script_runs(capsys):
    import runpy
    from pathlib import Path

    from qabba import _backend
    if _backend.compiled is None:
        pytest.skip("compiled backend not built")
    mod = runpy.run_path(str(Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"))
    assert mod["main"](["--repeat", "1", "--length", "400"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert {r["kernel"] for r in rows} == {"compress_breakpoints", "dtw_sq", "ga_sweep"}
