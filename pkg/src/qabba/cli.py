"""``qabba`` command line: compress, reconstruct, evaluate, sweep, profile.

Exit status is 0 on success, 1 on a domain or I/O error and 2 on bad usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, metrics, storage
from ._io import atomic_write_text
from .core import CompressionParams, DigitizationParams, PipelineConfig, QabbaError, QuantMode, QuantSpec, Series
from .pipeline import reconstruct, symbolize


def _bits(text: str) -> int:
    v = int(text)
    if not 2 <= v <= 32:
        raise argparse.ArgumentTypeError("bit-width must be in [2, 32]")
    return v


def _bits_list(text: str) -> list[int]:
    return [_bits(t) for t in text.split(",") if t.strip()]


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=0.1)
    p.add_argument("--max-len", type=int, default=None)
    p.add_argument("--method", choices=["vq", "ga"], default="ga")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--alpha", type=float, default=0.4)
    p.add_argument("--scl", type=float, default=1.0)
    p.add_argument("--norm", choices=["minmax", "std"], default="minmax")
    p.add_argument("--bits-len", type=_bits, default=8)
    p.add_argument("--bits-inc", type=_bits, default=12)
    p.add_argument("--symmetric", action="store_true", help="symmetric quantization (zero-point 0)")
    p.add_argument("--no-quant", action="store_true", help="keep the codebook at full precision")
    p.add_argument("--seed", type=int, default=0)


def _config(a) -> PipelineConfig:
    quant = None if a.no_quant else QuantSpec(
        a.bits_len, a.bits_inc, QuantMode.SYMMETRIC if a.symmetric else QuantMode.ASYMMETRIC)
    return PipelineConfig(
        CompressionParams(a.tol, a.max_len),
        DigitizationParams(method=a.method, k=a.k, alpha=a.alpha, scl=a.scl, norm=a.norm, seed=a.seed),
        quant,
    )


def _read_input(path: Path) -> list[Series]:
    if path.suffix.lower() in (".tsv", ".txt"):
        return bench.load_tsv(path)
    return [bench.load_csv_series(path)]


def _write_series_csv(path, s: Series) -> None:
    atomic_write_text(path, "".join(f"{v!r}\n" for v in s.samples.tolist()))


def _emit(rows, fmt: str, out) -> None:
    text = bench.to_csv(rows) if fmt == "csv" else bench.to_json(rows)
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def cmd_compress(a) -> int:
    series = _read_input(Path(a.input))
    cfg = _config(a)
    out = Path(a.output)
    summaries = []
    targets = [out] if len(series) == 1 else [out / f"{Path(a.input).stem}_{i:05d}.qabba" for i in range(len(series))]
    for s, target in zip(series, targets):
        art = symbolize(s, cfg)
        nbytes = storage.save(art, target)
        summaries.append({"file": str(target), "n": len(s), "N": art.N, "k": art.k,
                          "theoretical_ratio": storage.theoretical_ratio(art), "actual_bytes": nbytes})
    print(json.dumps(summaries[0] if len(summaries) == 1 else summaries, indent=2))
    return 0


def cmd_reconstruct(a) -> int:
    art = storage.load(a.input)
    rec = reconstruct(art)
    _write_series_csv(a.output, rec)
    info = {"n": len(rec), "N": art.N, "k": art.k}
    if a.original:
        orig = bench.load_csv_series(a.original)
        info["mse"] = metrics.mse(orig, rec, strict=a.strict_lengths)
    print(json.dumps(info, indent=2))
    return 0


def cmd_evaluate(a) -> int:
    orig = bench.load_csv_series(a.original)
    art = storage.load(a.artifact)
    rep = metrics.report(orig, reconstruct(art), strict=a.strict_lengths).to_dict()
    rep["compression_ratio"] = storage.theoretical_ratio(art)
    rep["quantized"] = art.quant is not None
    print(json.dumps(rep, indent=2))
    return 0


def cmd_sweep(a) -> int:
    series = bench.load_tsv(a.corpus) if a.corpus else bench.synth_gaussian(a.length, a.count, a.seed)
    cfg = _config(a)
    rows = []
    for row in (["len", "inc"] if a.row == "both" else [a.row]):
        rows += bench.bitwidth_sweep(series, cfg, a.bits, row)
    _emit(rows, a.format, a.output)
    return 0


def cmd_profile(a) -> int:
    series = bench.load_tsv(a.corpus)
    if not series:
        raise QabbaError("corpus is empty")
    quant = QuantSpec(a.bits_len, a.bits_inc, QuantMode.SYMMETRIC if a.symmetric else QuantMode.ASYMMETRIC)
    mats = bench.compare_methods(series, a.methods.split(","), tol=a.tol, alpha=a.alpha, scl=a.scl,
                                 quant=quant, seed=a.seed, measures=a.measures.split(","))
    thetas = np.array(a.thetas, dtype=float) if a.thetas else None
    _emit(bench.profile_rows(mats, thetas), a.format, a.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qabba", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="symbolize a CSV series (or TSV corpus) into .qabba files")
    p.add_argument("input")
    p.add_argument("output", help=".qabba file, or a directory for a multi-series TSV")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("reconstruct", help="rebuild a series from a .qabba file as CSV")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--original", help="CSV of the source series; prints the round-trip MSE")
    p.add_argument("--strict-lengths", action="store_true")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("evaluate", help="distances between a series and its reconstruction")
    p.add_argument("original")
    p.add_argument("artifact")
    p.add_argument("--strict-lengths", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="mean MSE against the bit-width of one codebook row")
    p.add_argument("--corpus", help="UCR-style TSV; default is synthetic Gaussian noise")
    p.add_argument("--length", type=int, default=5000)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--bits", type=_bits_list, default=[4, 6, 8, 12, 16, 32])
    p.add_argument("--row", choices=["len", "inc", "both"], default="inc")
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("--output")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("profile", help="performance profiles of ABBA variants over a corpus")
    p.add_argument("corpus")
    p.add_argument("--methods", default=",".join(bench.METHODS))
    p.add_argument("--measures", default="euclidean,dtw,euclidean_diff,dtw_diff")
    p.add_argument("--thetas", type=float, nargs="*")
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("--output")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_profile, alpha=0.1)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (QabbaError, OSError) as exc:
        print(f"qabba: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
