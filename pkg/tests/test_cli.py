import json

import numpy as np
import pytest

from qabba import storage
from qabba.bench import load_csv_series, synth_gaussian, write_tsv
from qabba.cli import main
from qabba.metrics import mse
from qabba.pipeline import reconstruct


@pytest.fixture
def series_csv(tmp_path):
    t = np.cumsum(np.random.default_rng(4).standard_normal(600))
    p = tmp_path / "in.csv"
    p.write_text("value\n" + "".join(f"{float(v)!r}\n" for v in t))
    return p, t


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compress_reconstruct_evaluate(tmp_path, capsys, series_csv):
    src, t = series_csv
    art_path = tmp_path / "out.qabba"
    code, out, _ = run(capsys, "compress", src, art_path, "--tol", 0.1, "--method", "ga", "--alpha", 0.4,
                       "--bits-len", 8, "--bits-inc", 12)
    assert code == 0
    summary = json.loads(out)
    art = storage.load(art_path)
    assert summary["actual_bytes"] == art_path.stat().st_size
    assert summary["theoretical_ratio"] == storage.ratio_qabba(storage.storage_model(art))
    assert (summary["n"], summary["N"], summary["k"]) == (600, art.N, art.k)

    rec_path = tmp_path / "rec.csv"
    code, out, _ = run(capsys, "reconstruct", art_path, rec_path, "--original", src)
    assert code == 0
    rec = load_csv_series(rec_path)
    assert json.loads(out)["mse"] == mse(t, rec, strict=False)

    code, out, _ = run(capsys, "evaluate", src, art_path)
    rep = json.loads(out)
    assert code == 0
    assert rep["rmse"] ** 2 == pytest.approx(rep["mse"], rel=1e-12)
    assert rep["compression_ratio"] == storage.theoretical_ratio(art)


def test_no_quant_persists_float_codebook(tmp_path, capsys, series_csv):
    src, _ = series_csv
    code, out, _ = run(capsys, "compress", src, tmp_path / "a.qabba", "--no-quant", "--method", "vq", "--k", 6)
    assert code == 0
    art = storage.load(tmp_path / "a.qabba")
    assert art.quant is None and art.k == 6
    assert json.loads(out)["theoretical_ratio"] == storage.ratio_abba(storage.storage_model(art))


def test_constant_series_round_trip(tmp_path, capsys):
    src = tmp_path / "c.csv"
    src.write_text("2.5\n" * 40)
    assert run(capsys, "compress", src, tmp_path / "c.qabba")[0] == 0
    assert run(capsys, "reconstruct", tmp_path / "c.qabba", tmp_path / "r.csv")[0] == 0
    assert load_csv_series(tmp_path / "r.csv").samples.tolist() == [2.5] * 40
    code, out, _ = run(capsys, "evaluate", src, tmp_path / "c.qabba", "--strict-lengths")
    rep = json.loads(out)
    assert rep["mse"] == rep["dtw"] == rep["euclidean"] == 0.0


def test_corrupted_file(tmp_path, capsys):
    bad = tmp_path / "bad.qabba"
    bad.write_bytes(b"XXXXXXXXXXXXXXXXXXXXXXXXXXXX")
    code, _, err = run(capsys, "reconstruct", bad, tmp_path / "r.csv")
    assert code == 1 and "not a .qabba container" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["compress", "x.csv", "y.qabba", "--bits-len", "40"])
    assert exc.value.code == 2


def test_tsv_corpus_compress(tmp_path, capsys):
    corpus = tmp_path / "corp.tsv"
    write_tsv(corpus, synth_gaussian(100, 3, seed=1))
    code, out, _ = run(capsys, "compress", corpus, tmp_path / "arts")
    assert code == 0
    assert len(json.loads(out)) == 3
    assert len(list((tmp_path / "arts").glob("*.qabba"))) == 3


def test_sweep_rows_and_determinism(tmp_path, capsys):
    args = ["sweep", "--length", 300, "--count", 3, "--bits", "4,6,8,12,16,32", "--row", "inc", "--seed", 5]
    assert run(capsys, *args, "--output", tmp_path / "a.csv")[0] == 0
    assert run(capsys, *args, "--output", tmp_path / "b.csv")[0] == 0
    a = (tmp_path / "a.csv").read_text()
    assert a == (tmp_path / "b.csv").read_text()
    assert len(a.strip().splitlines()) == 1 + 6
    code, out, _ = run(capsys, "sweep", "--length", 200, "--count", 2, "--bits", "8,16", "--row", "both",
                       "--format", "json")
    assert [(r["row"], r["bits"]) for r in json.loads(out)] == [("len", 8), ("len", 16), ("inc", 8), ("inc", 16)]


def test_profile_two_methods_three_problems(tmp_path, capsys):
    corpus = tmp_path / "p.tsv"
    t = np.linspace(0, 1, 150)
    write_tsv(corpus, [synth_gaussian(150, 1, seed=s)[0] for s in range(3)])
    code, out, _ = run(capsys, "profile", corpus, "--methods", "fabba,qabba-ga", "--measures", "euclidean",
                       "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert {r["algorithm"] for r in rows} == {"fabba", "qabba-ga"}
    assert {round(r["rho"] * 3) / 3 for r in rows} <= {0.0, 1 / 3, 2 / 3, 1.0}
    assert all(abs(r["rho"] * 3 - round(r["rho"] * 3)) < 1e-12 for r in rows)
