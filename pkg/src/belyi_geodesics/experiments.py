"""Seeded Monte Carlo experiments over random oriented cubic graphs.

Trial ``t`` of an experiment with seed ``s`` draws its graph from
``make_rng(s, t)``, so every record depends only on ``(params, seed, t)`` and
not on the worker count or scheduling. Reports persist as JSON under
``results/<experiment>/<seed>-<params hash>.json`` with a CSV of the samples.
"""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np
from scipy import stats

from . import __version__
from .bounds import length_window
from .cycles import (
    Cycle,
    alpha_cap,
    check_cap,
    count_cycles,
    enumerate_cycles,
    intersection_profile,
    is_disconnecting,
)
from .exhaustive import iter_traces
from .rotation_graph import DEFAULT_SEED, RotationGraph, make_rng, sample_graph
from .stern import trace_mean, trace_variance
from .turns import cycle_to_word, length_from_trace, word_to_matrix

P_THRESHOLD = 0.01
SIGMA_THRESHOLD = 3.0
RESULTS_ENV = "BELYI_RESULTS_DIR"


@dataclass
class ExperimentReport:
    experiment: str
    params: dict[str, Any]
    seed: int
    summary: dict[str, Any]
    samples: list[dict[str, Any]]
    assertions: dict[str, bool] = field(default_factory=dict)
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.assertions.values())

    def to_dict(self, *, with_meta: bool = True) -> dict[str, Any]:
        d = {
            "experiment": self.experiment,
            "params": self.params,
            "seed": self.seed,
            "summary": self.summary,
            "samples": self.samples,
            "assertions": self.assertions,
        }
        if with_meta:
            d["meta"] = self.meta
        return d

    def params_hash(self) -> str:
        blob = json.dumps({"experiment": self.experiment, "params": self.params}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def save(self, root: str | Path | None = None) -> Path:
        root = Path(root or os.environ.get(RESULTS_ENV, "results"))
        out = root / self.experiment
        out.mkdir(parents=True, exist_ok=True)
        stem = f"{self.seed}-{self.params_hash()}"
        path = out / f"{stem}.json"
        path.write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n")
        if self.samples:
            write_samples_csv(out / f"{stem}.csv", self.samples)
        return path


def write_samples_csv(path: str | Path, samples: Sequence[dict[str, Any]]) -> None:
    keys = list(samples[0])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(keys)
        for s in samples:
            w.writerow(["" if s[k] is None else _csv_cell(s[k]) for k in keys])


def _csv_cell(v: Any) -> Any:
    if isinstance(v, (list, tuple)):
        return ";".join(map(str, v))
    return v


def _now() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")


def _meta(started: str) -> dict[str, Any]:
    return {"started": started, "finished": _now(), "version": __version__}


def run_trials(fn: Callable[[int], Any], trials: Iterable[int], threads: int | None = None) -> list[Any]:
    """``[fn(t) for t in trials]``, optionally across worker processes, in order."""
    trials = list(trials)
    threads = threads or os.cpu_count() or 1
    if threads <= 1 or len(trials) < 2:
        return [fn(t) for t in trials]
    chunk = max(1, len(trials) // (4 * threads))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, trials, chunksize=chunk))


def _mean_sem(xs: Sequence[float]) -> tuple[float | None, float | None]:
    if not xs:
        return None, None
    arr = np.asarray(xs, dtype=float)
    mean = math.fsum(arr) / len(arr)
    if len(arr) < 2:
        return mean, None
    var = math.fsum((arr - mean) ** 2) / (len(arr) - 1)
    return mean, math.sqrt(var / len(arr))


# --- systole -------------------------------------------------------------


def _ranked_nontrivial(g: RotationGraph, cycles: Iterable[Cycle], min_length: int) -> list[tuple[float, int, Cycle, str]]:
    """Non-uniform cycles as ``(length, trace, cycle, word)`` sorted by length."""
    out = []
    for c in cycles:
        if c.length < min_length:
            continue
        w = cycle_to_word(g, c)
        if w.trivial:
            continue
        tr = word_to_matrix(w).trace
        out.append((length_from_trace(tr), tr, c, str(w)))
    out.sort(key=lambda x: (x[1], x[2]))
    return out


def shortest_geodesic(g: RotationGraph, max_len: int, min_length: int = 1, start_len: int = 4) -> dict[str, Any]:
    """Shortest nontrivial geodesic over cycles of length <= ``max_len``.

    Searches short cycles first. A k-cycle with a non-uniform word has trace at
    least k + 1, so the search stops widening once no longer cycle can win.
    """
    K = min(max_len, start_len)
    while True:
        best = None
        for length, tr, c, w in _ranked_nontrivial(g, enumerate_cycles(g, K, unsafe=True), min_length):
            if not is_disconnecting(g, c):
                best = (length, tr, c, w)
                break
        if best is not None:
            need = best[1] - 2  # longest cycle length that could still beat it
            if need <= K or K == max_len:
                length, tr, c, w = best
                return {"systole": length, "trace": tr, "cycle_length": c.length, "word": w,
                        "censored": False, "exact": need <= K}
            K = min(need, max_len)
        elif K == max_len:
            return {"systole": None, "trace": None, "cycle_length": None, "word": None,
                    "censored": True, "exact": False}
        else:
            K = max_len


def _systole_trial(t: int, *, n: int, seed: int, max_len: int, min_length: int) -> dict[str, Any]:
    g = sample_graph(n, rng=make_rng(seed, t))
    rec = {"trial": t}
    rec.update(shortest_geodesic(g, max_len, min_length))
    rec["genus"] = g.genus()
    return rec


def empirical_systole(
    n: int,
    samples: int,
    seed: int = DEFAULT_SEED,
    max_len: int | None = None,
    *,
    min_length: int = 1,
    unsafe: bool = False,
    threads: int | None = 1,
) -> ExperimentReport:
    """Shortest nontrivial geodesic of ``samples`` random surfaces on ``2n`` vertices.

    ``min_length`` drops shorter cycles from consideration (``3`` skips loops and
    double edges). Samples with no nontrivial cycle within ``max_len`` are
    reported as censored.
    """
    started = _now()
    V = 2 * n
    max_len = alpha_cap(V) if max_len is None else max_len
    check_cap(V, max_len, unsafe=unsafe)
    fn = partial(_systole_trial, n=n, seed=seed, max_len=max_len, min_length=min_length)
    recs = run_trials(fn, range(samples), threads)
    vals = [r["systole"] for r in recs if not r["censored"]]
    mean, sem = _mean_sem(vals)
    censored = sum(r["censored"] for r in recs)
    summary = {
        "mean": mean,
        "sem": sem,
        "ci95": None if sem is None else [mean - 1.96 * sem, mean + 1.96 * sem],
        "variance": None if len(vals) < 2 else float(np.var(vals, ddof=1)),
        "censored": censored,
        "censored_fraction": censored / samples if samples else None,
        "inexact": sum(not r["exact"] and not r["censored"] for r in recs),
        "cycle_length_histogram": _histogram(r["cycle_length"] for r in recs if not r["censored"]),
        "mean_genus": _mean_sem([r["genus"] for r in recs])[0],
    }
    params = {"n": n, "vertex_count": V, "samples": samples, "max_len": max_len,
              "min_length": min_length, "unsafe": unsafe}
    return ExperimentReport("systole", params, seed, summary, recs,
                            {"censoring_reported": True}, _meta(started))


def _histogram(values: Iterable[Any]) -> dict[str, int]:
    h: dict[str, int] = {}
    for v in values:
        h[str(v)] = h.get(str(v), 0) + 1
    return dict(sorted(h.items(), key=lambda kv: int(kv[0])))


# --- ordered compatible geodesics ----------------------------------------


def ordered_compatible(g: RotationGraph, k: int, max_len: int, start_len: int = 5) -> dict[str, Any]:
    """The ``k`` shortest pairwise-compatible nontrivial geodesics, chosen greedily.

    A candidate is skipped if it meets a chosen cycle in two or more
    components, or if the two cycles together disconnect the graph (their
    geodesics would coincide after compactification).
    """
    K = min(max_len, start_len)
    while True:
        chosen: list[tuple[float, int, Cycle, str]] = []
        for cand in _ranked_nontrivial(g, enumerate_cycles(g, K, unsafe=True), 1):
            c = cand[2]
            if is_disconnecting(g, c):
                continue
            if any(
                intersection_profile(c, s[2]).components > 1 or is_disconnecting(g, [c, s[2]])
                for s in chosen
            ):
                continue
            chosen.append(cand)
            if len(chosen) == k:
                break
        if len(chosen) == k:
            need = chosen[-1][1] - 2
            if need <= K or K == max_len:
                return _ordered_record(chosen, k, exact=need <= K)
            K = min(need, max_len)
        elif K == max_len:
            return _ordered_record(chosen, k, exact=False)
        else:
            K = max_len


def _ordered_record(chosen: list, k: int, exact: bool) -> dict[str, Any]:
    lengths = [c[0] for c in chosen] + [None] * (k - len(chosen))
    cycles = [c[2] for c in chosen]
    worst = max((intersection_profile(a, b).components for a, b in itertools.combinations(cycles, 2)), default=0)
    return {"lengths": lengths, "cycle_lengths": [c.length for c in cycles],
            "censored": len(chosen) < k, "exact": exact, "max_pair_components": worst}


def _ordered_trial(t: int, *, n: int, seed: int, max_len: int, k: int) -> dict[str, Any]:
    g = sample_graph(n, rng=make_rng(seed, t))
    rec = {"trial": t}
    rec.update(ordered_compatible(g, k, max_len))
    return rec


def ordered_geodesics(
    n: int,
    samples: int,
    seed: int = DEFAULT_SEED,
    max_len: int | None = None,
    k: int = 3,
    *,
    unsafe: bool = False,
    threads: int | None = 1,
) -> ExperimentReport:
    started = _now()
    if not 1 <= k <= 10:
        raise ValueError("k must be in [1, 10]")
    V = 2 * n
    max_len = alpha_cap(V) if max_len is None else max_len
    check_cap(V, max_len, unsafe=unsafe)
    fn = partial(_ordered_trial, n=n, seed=seed, max_len=max_len, k=k)
    recs = run_trials(fn, range(samples), threads)
    per_index = []
    for i in range(k):
        vals = [r["lengths"][i] for r in recs if r["lengths"][i] is not None]
        mean, sem = _mean_sem(vals)
        per_index.append({"i": i + 1, "mean": mean, "sem": sem, "count": len(vals)})
    summary = {
        "per_index": per_index,
        "censored": sum(r["censored"] for r in recs),
        "inexact": sum(not r["exact"] for r in recs),
    }
    params = {"n": n, "vertex_count": V, "samples": samples, "max_len": max_len, "k": k, "unsafe": unsafe}
    checks = {"pairwise_components_le_1": all(r["max_pair_components"] <= 1 for r in recs)}
    return ExperimentReport("ordered", params, seed, summary, recs, checks, _meta(started))


def genus_independence(
    ns: Sequence[int],
    samples: int,
    seed: int = DEFAULT_SEED,
    k: int = 3,
    *,
    threads: int | None = 1,
) -> ExperimentReport:
    """Mean of the i-th ordered length across graph sizes, with a trend test.

    Per index: weighted least-squares slope of mean length against ``log n``
    and the two-sample z between the smallest and largest size.
    """
    started = _now()
    reports = [ordered_geodesics(n, samples, seed, None, k, threads=threads) for n in ns]
    trend = []
    for i in range(k):
        rows = [(n, r.summary["per_index"][i]) for n, r in zip(ns, reports)]
        x = np.log([n for n, _ in rows])
        y = np.array([row["mean"] for _, row in rows], dtype=float)
        se = np.array([row["sem"] for _, row in rows], dtype=float)
        w = 1 / se**2
        xm = np.sum(w * x) / np.sum(w)
        slope = float(np.sum(w * (x - xm) * y) / np.sum(w * (x - xm) ** 2))
        slope_se = float(math.sqrt(1 / np.sum(w * (x - xm) ** 2)))
        z = float(abs(y[-1] - y[0]) / math.hypot(se[-1], se[0]))
        trend.append({"i": i + 1, "means": y.tolist(), "sems": se.tolist(), "slope_per_log_n": slope,
                      "slope_se": slope_se, "z_first_last": z})
    summary = {"ns": list(ns), "trend": trend}
    samples_out = [{"n": n, "i": row["i"], "mean": row["mean"], "sem": row["sem"], "count": row["count"]}
                   for n, r in zip(ns, reports) for row in r.summary["per_index"]]
    checks = {f"gamma_{t['i']}_z_lt_2": t["z_first_last"] < 2 for t in trend}
    checks["pairwise_components_le_1"] = all(r.passed for r in reports)
    params = {"ns": list(ns), "samples": samples, "k": k}
    return ExperimentReport("genus_independence", params, seed, summary, samples_out, checks, _meta(started))


# --- Poisson cycle counts -------------------------------------------------


def _count_trial(t: int, *, n: int, seed: int, i_max: int) -> list[int]:
    return count_cycles(sample_graph(n, rng=make_rng(seed, t)), i_max)[1:]


def poisson_chi_square(counts: Sequence[int], lam: float, min_expected: float = 5.0) -> tuple[float, int, float]:
    """Chi-square of counts against Poisson(lam), tail cells merged to expected >= 5.

    Returns ``(statistic, degrees of freedom, p-value)``.
    """
    counts = np.asarray(counts)
    m = len(counts)
    # grow bins 0..K-1 while the tail mass beyond K stays large enough
    K = 1
    while m * stats.poisson.sf(K, lam) >= min_expected and m * stats.poisson.pmf(K, lam) >= min_expected:
        K += 1
    expected = [m * stats.poisson.pmf(j, lam) for j in range(K)] + [m * stats.poisson.sf(K - 1, lam)]
    observed = [int(np.sum(counts == j)) for j in range(K)] + [int(np.sum(counts >= K))]
    stat = float(sum((o - e) ** 2 / e for o, e in zip(observed, expected)))
    dof = len(observed) - 1
    return stat, dof, float(stats.chi2.sf(stat, dof))


def poisson_fit(
    n: int,
    samples: int,
    seed: int = DEFAULT_SEED,
    i_max: int = 5,
    *,
    threads: int | None = 1,
    unsafe: bool = False,
) -> ExperimentReport:
    started = _now()
    V = 2 * n
    check_cap(V, i_max, unsafe=unsafe)
    fn = partial(_count_trial, n=n, seed=seed, i_max=i_max)
    rows = run_trials(fn, range(samples), threads)
    X = np.array(rows, dtype=np.int64).reshape(samples, i_max)
    per_length = []
    checks: dict[str, bool] = {}
    for i in range(1, i_max + 1):
        col = X[:, i - 1]
        lam = 2**i / (2 * i)
        mean = float(col.mean())
        z = (mean - lam) / math.sqrt(lam / samples)
        stat, dof, p = poisson_chi_square(col, lam)
        per_length.append({"i": i, "lambda": lam, "mean": mean, "variance": float(col.var(ddof=1)),
                           "z_mean": z, "chi2": stat, "dof": dof, "p_value": p})
        if i >= 3:
            checks[f"X{i}_chi2_p_gt_{P_THRESHOLD}"] = p > P_THRESHOLD
            checks[f"X{i}_mean_within_{SIGMA_THRESHOLD:g}sigma"] = abs(z) < SIGMA_THRESHOLD
    pairs = []
    for i, j in itertools.combinations(range(3, i_max + 1), 2):
        xi, xj = X[:, i - 1].astype(float), X[:, j - 1].astype(float)
        cov = float(np.cov(xi, xj)[0, 1])
        se = math.sqrt(xi.var(ddof=1) * xj.var(ddof=1) / samples)
        pairs.append({"i": i, "j": j, "cov": cov, "z": cov / se if se else 0.0})
        checks[f"cov_X{i}_X{j}_within_{SIGMA_THRESHOLD:g}sigma"] = abs(cov) < SIGMA_THRESHOLD * se
    summary = {"per_length": per_length, "covariances": pairs}
    samples_out = [{"trial": t, **{f"X{i}": int(X[t, i - 1]) for i in range(1, i_max + 1)}} for t in range(samples)]
    params = {"n": n, "vertex_count": V, "samples": samples, "i_max": i_max, "unsafe": unsafe}
    return ExperimentReport("poisson", params, seed, summary, samples_out, checks, _meta(started))


# --- traces over words ------------------------------------------------------


def trace_stats(
    N: int, mode: str = "exhaustive", samples: int = 10_000, seed: int = DEFAULT_SEED
) -> ExperimentReport:
    """Trace and length statistics over words of length ``N``.

    ``exhaustive`` walks all ``2^N`` words and must reproduce the exact moments;
    ``sampled`` draws ``samples`` uniform words.
    """
    started = _now()
    checks: dict[str, bool] = {}
    if mode == "exhaustive":
        if not 1 <= N <= 22:
            raise ValueError("exhaustive mode needs 1 <= N <= 22")
        count = 2**N
        s1 = s2 = 0
        len_parts, log_parts = [], []
        for tr in iter_traces(N):
            s1 += int(tr.sum())
            s2 += int((tr * tr).sum())
            trf = tr.astype(float)
            len_parts.append(float(np.sum(2.0 * np.arccosh(trf / 2.0))))
            log_parts.append(float(np.sum(np.log(trf))))
        mean = Fraction(s1, count)
        var = Fraction(s2, count) - mean**2
        mean_len = math.fsum(len_parts) / count
        mean_log = math.fsum(log_parts) / count
        checks["trace_mean_exact"] = mean == trace_mean(N)
        checks["trace_variance_exact"] = var == trace_variance(N)
        jensen_ref = float(trace_mean(N))
        out_samples: list[dict[str, Any]] = []
    elif mode == "sampled":
        if N < 1 or samples < 2:
            raise ValueError("sampled mode needs N >= 1 and samples >= 2")
        rng = make_rng(seed)
        bits = rng.integers(0, 2, size=(samples, N), dtype=np.int8)
        traces = [word_to_matrix("".join("LR"[b] for b in row)).trace for row in bits.tolist()]
        count = samples
        mean = Fraction(sum(traces), count)
        var = Fraction(sum(t * t for t in traces), count) - mean**2
        lengths = [length_from_trace(t) for t in traces]
        mean_len = math.fsum(lengths) / count
        mean_log = math.fsum(math.log(t) for t in traces) / count
        exact_mean, exact_var = trace_mean(N), trace_variance(N)
        se = math.sqrt(float(exact_var) / count)
        checks[f"trace_mean_within_{SIGMA_THRESHOLD:g}sigma"] = abs(float(mean - exact_mean)) <= SIGMA_THRESHOLD * se
        # on the empirical measure itself Jensen is exact
        jensen_ref = float(mean)
        out_samples = [{"trial": t, "trace": str(tr), "length": ln} for t, (tr, ln) in enumerate(zip(traces, lengths))]
    else:
        raise ValueError(f"mode must be 'exhaustive' or 'sampled', got {mode!r}")
    jensen_bound = length_from_trace(jensen_ref)
    checks["jensen_mean_length"] = mean_len <= jensen_bound * (1 + 1e-12)
    low, high = length_window(N)
    summary = {
        "words": count,
        "trace_mean": float(mean),
        "trace_mean_exact": f"{mean.numerator}/{mean.denominator}",
        "trace_variance": float(var),
        "trace_variance_exact": f"{var.numerator}/{var.denominator}",
        "mean_length": mean_len,
        "jensen_bound": jensen_bound,
        "mean_length_per_step": mean_len / N,
        "mean_log_trace_per_step": mean_log / N,
        "window_per_step": [low / N, high / N],
    }
    params = {"N": N, "mode": mode, "samples": samples if mode == "sampled" else None}
    return ExperimentReport("trace_stats", params, seed, summary, out_samples, checks, _meta(started))


# --- graph-size sweeps ------------------------------------------------------


def _trend_checks(rows: list[dict[str, Any]]) -> dict[str, bool]:
    """Fractions fall with size: no step up beyond 2 standard errors, and last < first."""
    return {
        "non_increasing_within_2se": all(
            b["fraction"] <= a["fraction"] + 2 * math.hypot(a["se"], b["se"]) for a, b in zip(rows, rows[1:])
        ),
        "decreasing_overall": rows[-1]["fraction"] < rows[0]["fraction"],
    }


def _disconnect_trial(t: int, *, vertex_count: int, seed: int) -> tuple[int, int]:
    g = sample_graph(vertex_count // 2, rng=make_rng(seed, t))
    L = int(math.log2(vertex_count))
    cycles = enumerate_cycles(g, L, unsafe=True)
    return len(cycles), sum(is_disconnecting(g, c) for c in cycles)


def disconnection_sweep(
    vertex_counts: Sequence[int] = (64, 256, 1024),
    samples: int = 200,
    seed: int = DEFAULT_SEED,
    *,
    threads: int | None = 1,
) -> ExperimentReport:
    """Fraction of cycles of length <= log2(V) whose removal splits the graph."""
    started = _now()
    rows = []
    for V in vertex_counts:
        fn = partial(_disconnect_trial, vertex_count=V, seed=seed)
        res = run_trials(fn, range(samples), threads)
        total = sum(r[0] for r in res)
        disc = sum(r[1] for r in res)
        f = disc / total if total else 0.0
        rows.append({"vertex_count": V, "max_len": int(math.log2(V)), "cycles": total,
                     "disconnecting": disc, "fraction": f,
                     "se": math.sqrt(f * (1 - f) / total) if total else 0.0})
    checks = _trend_checks(rows)
    checks["largest_below_1pct"] = rows[-1]["fraction"] < 0.01
    params = {"vertex_counts": list(vertex_counts), "samples": samples}
    return ExperimentReport("disconnection", params, seed, {"rows": rows}, rows, checks, _meta(started))


def _intersection_trial(t: int, *, vertex_count: int, seed: int) -> tuple[int, int, int]:
    g = sample_graph(vertex_count // 2, rng=make_rng(seed, t))
    cycles = sorted(enumerate_cycles(g, alpha_cap(vertex_count)))
    vsets = [set(c.vertices) for c in cycles]
    pairs = meeting = multi = 0
    for a, b in itertools.combinations(range(len(cycles)), 2):
        pairs += 1
        if vsets[a] & vsets[b]:
            meeting += 1
            if intersection_profile(cycles[a], cycles[b]).components >= 2:
                multi += 1
    return pairs, meeting, multi


def intersection_sweep(
    vertex_counts: Sequence[int] = (64, 256, 1024),
    samples: int = 200,
    seed: int = DEFAULT_SEED,
    *,
    threads: int | None = 1,
) -> ExperimentReport:
    """Fraction of pairs of cycles (length <= alpha) meeting in >= 2 components."""
    started = _now()
    rows = []
    for V in vertex_counts:
        fn = partial(_intersection_trial, vertex_count=V, seed=seed)
        res = run_trials(fn, range(samples), threads)
        pairs = sum(r[0] for r in res)
        meeting = sum(r[1] for r in res)
        multi = sum(r[2] for r in res)
        alpha = alpha_cap(V)
        f = multi / pairs if pairs else 0.0
        rows.append({"vertex_count": V, "alpha": alpha, "pairs": pairs, "meeting_pairs": meeting,
                     "multi_component_pairs": multi, "fraction": f,
                     "se": math.sqrt(f * (1 - f) / pairs) if pairs else 0.0,
                     "per_graph": multi / samples, "bound_scale": 2 ** (2 * alpha - 1) / V**2})
    checks = _trend_checks(rows)
    params = {"vertex_counts": list(vertex_counts), "samples": samples}
    return ExperimentReport("intersection", params, seed, {"rows": rows}, rows, checks, _meta(started))
