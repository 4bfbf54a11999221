"""Datasets, experiment drivers and Dolan-More style performance profiles."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import metrics
from .core import DigitizationParams, Method, PipelineConfig, QabbaError, QuantSpec, Series
from .pipeline import apply_quantization, reconstruct, symbolize


class ParseError(QabbaError):
    def __init__(self, row: int, column: int, text: str):
        super().__init__(f"row {row}, column {column}: cannot parse {text!r}")
        self.row = row
        self.column = column


class AllZeroColumn(QabbaError):
    pass


# --------------------------------------------------------------------------
# performance profiles

@dataclass(frozen=True, eq=False)
class ProfileMatrix:
    """``values[i, j]``: cost of algorithm ``i`` on problem ``j`` (smaller is
    better). ``inf`` or ``nan`` records a failure."""

    values: np.ndarray
    algorithm_names: tuple
    problem_names: tuple

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise QabbaError("need at least one algorithm and one problem")
        if np.any(v < 0):
            raise QabbaError("performance values must be nonnegative")
        algs = tuple(self.algorithm_names) or tuple(f"alg{i}" for i in range(v.shape[0]))
        probs = tuple(self.problem_names) or tuple(f"prob{j}" for j in range(v.shape[1]))
        if len(algs) != v.shape[0] or len(probs) != v.shape[1]:
            raise QabbaError("name lists do not match the matrix shape")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "algorithm_names", algs)
        object.__setattr__(self, "problem_names", probs)


@dataclass(frozen=True, eq=False)
class ProfileCurve:
    thetas: np.ndarray
    rho: np.ndarray  # (algorithms, thetas)
    algorithm_names: tuple = ()


def performance_ratios(m: ProfileMatrix | np.ndarray) -> np.ndarray:
    """Each cost divided by the best cost on its problem.

    Failures become ``inf``. A problem whose best cost is 0 gives ratio 1 to
    every algorithm that reached 0 and ``inf`` to the rest.
    """
    v = m.values if isinstance(m, ProfileMatrix) else np.asarray(m, dtype=np.float64)
    v = np.where(np.isfinite(v), v, np.inf)
    best = v.min(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = v / best[None, :]
    zero = best == 0
    if np.any(zero):
        r[:, zero] = np.where(v[:, zero] == 0, 1.0, np.inf)
    r[:, ~np.isfinite(best)] = np.inf
    return r


def performance_profile(ratios, thetas) -> ProfileCurve:
    """Fraction of problems on which each algorithm's ratio is strictly below theta."""
    r = np.asarray(ratios, dtype=np.float64)
    th = np.asarray(thetas, dtype=np.float64).reshape(-1)
    if np.any(th < 1):
        raise QabbaError("thetas must be >= 1")
    rho = (r[:, :, None] < th[None, None, :]).sum(axis=1) / r.shape[1]
    return ProfileCurve(th, rho)


def default_thetas(ratios, count: int = 101) -> np.ndarray:
    """Even grid from 1 to just past the largest finite ratio."""
    r = np.asarray(ratios)
    finite = r[np.isfinite(r)]
    top = float(finite.max()) if finite.size else 1.0
    return np.linspace(1.0, max(top * 1.01, 1.01) + 1e-9, count)


# --------------------------------------------------------------------------
# data

def load_tsv(path) -> list[Series]:
    """UCR-style file: one series per line, the leading class label is dropped
    and trailing NaN padding is trimmed."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for r, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split("\t") if "\t" in line else line.replace(",", " ").split()
            vals = []
            for c, text in enumerate(fields[1:], start=2):
                try:
                    vals.append(float(text))
                except ValueError:
                    raise ParseError(r, c, text) from None
            arr = np.array(vals, dtype=np.float64)
            keep = len(arr)
            while keep and np.isnan(arr[keep - 1]):
                keep -= 1
            out.append(Series(arr[:keep], name=f"row{r}"))
    return out


def load_csv_series(path) -> Series:
    """A single column (one value per line); an optional non-numeric header is skipped."""
    vals = []
    with open(path, "r", encoding="utf-8") as fh:
        for r, line in enumerate(fh, start=1):
            text = line.strip().split(",")[0].strip()
            if not text:
                continue
            try:
                vals.append(float(text))
            except ValueError:
                if r == 1 and not vals:
                    continue
                raise ParseError(r, 1, text) from None
    return Series(vals, name=os.path.basename(str(path)))


def synth_gaussian(n: int, count: int, seed: int = 0) -> list[Series]:
    """``count`` i.i.d. standard-normal series from ``numpy``'s PCG64 generator."""
    if n < 2:
        raise QabbaError("series length must be >= 2")
    rng = np.random.default_rng(seed)
    block = rng.standard_normal((count, n))
    return [Series(row, name=f"gauss{i}") for i, row in enumerate(block)]


def mini_corpus(seed: int = 0, per_dataset: int = 8, length: int = 300) -> dict[str, list[Series]]:
    """Five small synthetic datasets with distinct shapes (periodic, trend +
    noise, pulses, steps, random walk), used for desk-scale comparisons."""
    rng = np.random.default_rng(seed)
    x = np.linspace(0.0, 1.0, length)
    sets: dict[str, list[Series]] = {k: [] for k in ("sines", "trend", "pulses", "steps", "walks")}
    for i in range(per_dataset):
        f = rng.uniform(2, 6)
        sets["sines"].append(np.sin(2 * np.pi * f * x + rng.uniform(0, 2 * np.pi)) + 0.05 * rng.standard_normal(length))
        sets["trend"].append(rng.uniform(-3, 3) * x + 0.5 * np.sin(9 * x) + 0.1 * rng.standard_normal(length))
        beats = np.zeros(length)
        for c in np.arange(rng.integers(10, 30), length, rng.integers(35, 60)):
            beats += 2.0 * np.exp(-0.5 * ((np.arange(length) - c) / 2.5) ** 2)
        sets["pulses"].append(beats + 0.03 * rng.standard_normal(length))
        levels = np.repeat(rng.normal(0, 2, 10), -(-length // 10))[:length]
        sets["steps"].append(levels + 0.05 * rng.standard_normal(length))
        sets["walks"].append(np.cumsum(rng.standard_normal(length)) * 0.3)
    return {name: [Series(v, name=f"{name}{i}") for i, v in enumerate(rows)] for name, rows in sets.items()}


def write_tsv(path, series: Iterable[Series], label: int = 0) -> None:
    from ._io import atomic_write_text

    lines = ["\t".join([str(label)] + [repr(float(v)) for v in s.samples]) for s in series]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


# --------------------------------------------------------------------------
# experiment drivers

def _pmap(fn: Callable, items: Sequence, threads: Optional[int] = None) -> list:
    workers = threads or max(1, int(os.environ.get("QABBA_THREADS", "1") or 1))
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def bitwidth_sweep(series_set: Sequence, cfg: PipelineConfig, bits_list: Sequence[int], row: str,
                   threads: Optional[int] = None) -> list[dict]:
    """Mean reconstruction MSE when only one codebook row is quantized.

    The other row is held at 32-bit codes. Each series is symbolized once;
    quantization is overlaid per bit-width, so every row of the table shares
    the same symbols. Length drift from quantized lengths is handled by
    truncating to the shorter series.
    """
    if row not in ("len", "inc"):
        raise QabbaError("row must be 'len' or 'inc'")
    plain_cfg = replace(cfg, quant=None)
    mode = cfg.quant.mode if cfg.quant is not None else QuantSpec().mode

    def run(s):
        base = symbolize(s, plain_cfg)
        errs = []
        for b in bits_list:
            spec = QuantSpec(bits_len=b if row == "len" else 32, bits_inc=b if row == "inc" else 32, mode=mode)
            errs.append(metrics.mse(s, reconstruct(apply_quantization(base, spec)), strict=False))
        return errs, metrics.mse(s, reconstruct(base), strict=False)

    results = _pmap(run, list(series_set), threads)
    table = np.array([r[0] for r in results], dtype=np.float64).reshape(len(results), len(bits_list))
    base_mse = float(np.mean([r[1] for r in results]))
    return [{"row": row, "bits": int(b), "mse": float(table[:, i].mean()), "unquantized_mse": base_mse}
            for i, b in enumerate(bits_list)]


MEASURES = {
    "euclidean": lambda a, b: metrics.euclidean(a, b, strict=False),
    "dtw": metrics.dtw,
    "euclidean_diff": lambda a, b: metrics.differenced(metrics.euclidean, a, b, strict=False),
    "dtw_diff": lambda a, b: metrics.differenced(metrics.dtw, a, b),
    "mse": lambda a, b: metrics.mse(a, b, strict=False),
}

METHODS = ("abba", "fabba", "qabba-vq", "qabba-ga")


def method_config(method: str, tol: float, alpha: float, k: int, scl: float, quant: QuantSpec, seed: int) -> PipelineConfig:
    from .core import CompressionParams

    vq = method in ("abba", "qabba-vq")
    dig = DigitizationParams(method=Method.VQ if vq else Method.GA, k=k, alpha=alpha, scl=scl, seed=seed)
    return PipelineConfig(CompressionParams(tol), dig, quant if method.startswith("qabba") else None)


def compare_methods(series_set: Sequence[Series], methods: Sequence[str] = METHODS, tol: float = 0.1,
                    alpha: float = 0.1, scl: float = 1.0, quant: Optional[QuantSpec] = None,
                    seed: int = 0, measures: Sequence[str] = ("euclidean", "dtw", "euclidean_diff", "dtw_diff"),
                    threads: Optional[int] = None) -> dict[str, ProfileMatrix]:
    """Run every method on every series and collect one cost matrix per measure.

    Greedy aggregation with ``alpha`` runs first; its symbol count becomes
    ``k`` for the k-means methods so all methods use the same alphabet size.
    A method that raises is recorded as a failure.
    """
    quant = quant or QuantSpec()
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise QabbaError(f"unknown methods: {sorted(unknown)}")

    def run(s):
        ga_cfg = method_config("fabba", tol, alpha, 1, scl, quant, seed)
        k = symbolize(s, ga_cfg).k
        row = {}
        for meth in methods:
            try:
                rec = reconstruct(symbolize(s, method_config(meth, tol, alpha, k, scl, quant, seed)))
                row[meth] = [MEASURES[m](s, rec) for m in measures]
            except QabbaError:
                row[meth] = [math.inf] * len(measures)
        return row

    rows = _pmap(run, list(series_set), threads)
    names = tuple(s.name or f"series{j}" for j, s in enumerate(series_set))
    out = {}
    for mi, meas in enumerate(measures):
        vals = np.array([[rows[j][meth][mi] for j in range(len(rows))] for meth in methods])
        out[meas] = ProfileMatrix(vals, tuple(methods), names)
    return out


def profile_rows(matrices: dict[str, ProfileMatrix], thetas=None) -> list[dict]:
    """Flatten profiles into ``{measure, algorithm, theta, rho}`` records."""
    rows = []
    for meas, m in matrices.items():
        r = performance_ratios(m)
        th = default_thetas(r) if thetas is None else thetas
        curve = performance_profile(r, th)
        for i, alg in enumerate(m.algorithm_names):
            for t, rho in zip(curve.thetas.tolist(), curve.rho[i].tolist()):
                rows.append({"measure": meas, "algorithm": alg, "theta": t, "rho": rho})
    return rows


def to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def to_json(rows) -> str:
    return json.dumps(rows, indent=2, sort_keys=False) + "\n"
