"""Monte Carlo frame error rate estimation, curve storage, threshold crossing.

A trial samples a depolarizing error, computes both syndromes, decodes,
and counts a failure unless the decoder reported success and the estimate
equals the true error exactly — estimates that merely satisfy the
syndromes (degenerate or otherwise) count as failures, with the
syndrome-satisfied-but-wrong cases also tallied separately as undetected
failures.

Each trial draws its randomness from an independent stream keyed by
(seed, trial index), so results are reproducible bit-for-bit and
independent of the worker count; trials are scheduled in fixed-size
chunks in index order, and optional early stopping on a failure budget
cuts off at a chunk boundary.
"""

from __future__ import annotations

import math
import multiprocessing as mp
import os
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .channel import sample_error
from .csscode import CssCode
from .decoder import JointDecoder, build_graphs, symbols_from_bits

RNG_ID = "numpy-pcg64-seedseq(seed.trial)"

CSV_COLUMNS = ("code_id", "e", "P", "L", "R", "p_d", "f_m", "trials", "failures",
               "undetected_failures", "fer", "fer_ci_lo", "fer_ci_hi",
               "mean_iters", "max_iter", "seed", "rng_id")


class NoCrossingError(Exception):
    """The FER curves do not intersect within the sampled range."""


def wilson_interval(failures: int, trials: int, z: float = 1.959963984540054):
    """Wilson 95% score interval for a binomial proportion."""
    if trials == 0:
        return (0.0, 1.0)
    phat = failures / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if failures == 0 else max(0.0, center - half)
    hi = 1.0 if failures == trials else min(1.0, center + half)
    return (lo, hi)


@dataclass
class FerRecord:
    code_id: str
    e: int
    P: int
    L: int
    rate: float
    p_d: float
    f_m: float
    trials: int
    failures: int
    undetected_failures: int
    fer: float
    fer_ci_lo: float
    fer_ci_hi: float
    mean_iters: float
    max_iter: int
    seed: int
    rng_id: str = RNG_ID
    wall_time: float = 0.0      # not serialized
    false_successes: int = 0    # success-status with mismatched syndromes; must stay 0

    def csv_row(self) -> str:
        vals = [self.code_id, self.e, self.P, self.L, repr(self.rate),
                repr(self.p_d), repr(self.f_m), self.trials, self.failures,
                self.undetected_failures, repr(self.fer), repr(self.fer_ci_lo),
                repr(self.fer_ci_hi), repr(self.mean_iters), self.max_iter,
                self.seed, self.rng_id]
        return ",".join(str(v) for v in vals)


@dataclass
class FerCurve:
    """Records for one code over an increasing f_m grid."""

    records: list = dc_field(default_factory=list)

    def append(self, rec: FerRecord):
        if self.records and rec.p_d <= self.records[-1].p_d:
            raise ValueError("curve grid must be strictly increasing in p_d")
        self.records.append(rec)

    @property
    def P(self) -> int:
        return self.records[0].P

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


# ----------------------------------------------------------------------
# Trial execution (worker pool)
# ----------------------------------------------------------------------

_WORKER = {}


def _init_worker(code: CssCode, p_d: float, max_iter: int, seed: int):
    graphs = build_graphs(code)
    _WORKER.update(code=code, graphs=graphs,
                   decoder=JointDecoder(*graphs), p_d=p_d,
                   max_iter=max_iter, seed=seed)


def _run_chunk(span) -> tuple:
    start, count = span
    code: CssCode = _WORKER["code"]
    gx, gz = _WORKER["graphs"]
    decoder: JointDecoder = _WORKER["decoder"]
    p_d, max_iter, seed = _WORKER["p_d"], _WORKER["max_iter"], _WORKER["seed"]

    failures = undetected = false_successes = 0
    iters_sum = 0
    for t in range(start, start + count):
        rng = np.random.default_rng((seed, t))
        x, z = sample_error(code.num_segments, code.e, p_d, rng)
        xi, zeta = symbols_from_bits(code, x, z)
        sigma, tau = gx.syndrome_of(xi), gz.syndrome_of(zeta)
        res = decoder.decode(sigma, tau, p_d, max_iter=max_iter)
        iters_sum += res.iterations
        wrong = not (np.array_equal(res.x_symbols, xi)
                     and np.array_equal(res.z_symbols, zeta))
        if res.success:
            if not (np.array_equal(gx.syndrome_of(res.x_symbols), sigma)
                    and np.array_equal(gz.syndrome_of(res.z_symbols), tau)):
                false_successes += 1
            if wrong:
                undetected += 1
                failures += 1
        else:
            failures += 1
    return failures, undetected, false_successes, iters_sum, count


def run_trials(code: CssCode, p_d: float, trials: int, base_seed: int,
               max_iter: int = 90, workers: int = 1,
               max_failures: int | None = None, chunk_size: int = 100,
               start_trial: int = 0) -> FerRecord:
    """Monte Carlo FER at one operating point.

    Runs trials start_trial..start_trial+trials-1 (in index-order chunks
    of chunk_size) until done or until the cumulative failure count
    reaches max_failures at a chunk boundary.  Each trial's stream is
    keyed by its global index, so a later call with a shifted start
    continues the same experiment; combine_records merges the pieces.
    The result is independent of the worker count.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    t0 = time.time()
    end = start_trial + trials
    spans = [(s, min(chunk_size, end - s)) for s in range(start_trial, end, chunk_size)]

    failures = undetected = false_successes = 0
    iters_sum = 0
    done = 0

    def consume(results):
        nonlocal failures, undetected, false_successes, iters_sum, done
        for (f, u, fs, isum, cnt) in results:
            failures += f
            undetected += u
            false_successes += fs
            iters_sum += isum
            done += cnt
            if max_failures is not None and failures >= max_failures:
                return True
        return False

    if workers <= 1:
        _init_worker(code, p_d, max_iter, base_seed)
        for span in spans:
            if consume([_run_chunk(span)]):
                break
    else:
        with mp.Pool(processes=workers, initializer=_init_worker,
                     initargs=(code, p_d, max_iter, base_seed)) as pool:
            it = pool.imap(_run_chunk, spans)
            for res in it:
                if consume([res]):
                    break

    fer = failures / done
    lo, hi = wilson_interval(failures, done)
    return FerRecord(
        code_id=code.code_id, e=code.e, P=code.P, L=code.L, rate=code.rate,
        p_d=p_d, f_m=2.0 * p_d / 3.0, trials=done, failures=failures,
        undetected_failures=undetected, fer=fer, fer_ci_lo=lo, fer_ci_hi=hi,
        mean_iters=iters_sum / done, max_iter=max_iter, seed=base_seed,
        wall_time=time.time() - t0, false_successes=false_successes,
    )


def combine_records(records) -> FerRecord:
    """Merge records of consecutive trial ranges at one operating point."""
    records = list(records)
    first = records[0]
    for r in records[1:]:
        if (r.code_id, r.p_d, r.max_iter, r.seed) != (
                first.code_id, first.p_d, first.max_iter, first.seed):
            raise ValueError("records must share code, operating point, and seed")
    trials = sum(r.trials for r in records)
    failures = sum(r.failures for r in records)
    lo, hi = wilson_interval(failures, trials)
    return FerRecord(
        code_id=first.code_id, e=first.e, P=first.P, L=first.L, rate=first.rate,
        p_d=first.p_d, f_m=first.f_m, trials=trials, failures=failures,
        undetected_failures=sum(r.undetected_failures for r in records),
        fer=failures / trials, fer_ci_lo=lo, fer_ci_hi=hi,
        mean_iters=sum(r.mean_iters * r.trials for r in records) / trials,
        max_iter=first.max_iter, seed=first.seed,
        wall_time=sum(r.wall_time for r in records),
        false_successes=sum(r.false_successes for r in records),
    )


def sweep(code: CssCode, fm_grid, trials: int, base_seed: int,
          max_iter: int = 90, workers: int = 1, max_failures: int | None = None,
          out_path=None, header_comments=()) -> FerCurve:
    """One record per grid point, optionally streamed to CSV as it goes."""
    fm_grid = list(fm_grid)
    if not fm_grid:
        raise ValueError("empty f_m grid")
    curve = FerCurve()
    fh = None
    try:
        if out_path is not None:
            fh = open(out_path, "w", encoding="utf-8")
            for c in header_comments:
                fh.write(f"# {c}\n")
            fh.write(",".join(CSV_COLUMNS) + "\n")
            fh.flush()
        for k, f_m in enumerate(fm_grid):
            rec = run_trials(code, 1.5 * f_m, trials, base_seed + k,
                             max_iter=max_iter, workers=workers,
                             max_failures=max_failures)
            curve.append(rec)
            if fh is not None:
                fh.write(rec.csv_row() + "\n")
                fh.flush()
    except OSError as exc:
        raise OSError(f"{exc} (writing {out_path})") from exc
    finally:
        if fh is not None:
            fh.close()
    return curve


# ----------------------------------------------------------------------
# CSV round-trip
# ----------------------------------------------------------------------

def write_csv(path, curve: FerCurve, header_comments=()):
    with open(path, "w", encoding="utf-8") as fh:
        for c in header_comments:
            fh.write(f"# {c}\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for rec in curve:
            fh.write(rec.csv_row() + "\n")


def read_csv(path) -> FerCurve:
    curve = FerCurve()
    with open(path, "r", encoding="utf-8") as fh:
        header = None
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                if tuple(header) != CSV_COLUMNS:
                    raise ValueError(f"unexpected CSV header in {path}: {header}")
                continue
            vals = dict(zip(header, line.split(",")))
            curve.append(FerRecord(
                code_id=vals["code_id"], e=int(vals["e"]), P=int(vals["P"]),
                L=int(vals["L"]), rate=float(vals["R"]), p_d=float(vals["p_d"]),
                f_m=float(vals["f_m"]), trials=int(vals["trials"]),
                failures=int(vals["failures"]),
                undetected_failures=int(vals["undetected_failures"]),
                fer=float(vals["fer"]), fer_ci_lo=float(vals["fer_ci_lo"]),
                fer_ci_hi=float(vals["fer_ci_hi"]),
                mean_iters=float(vals["mean_iters"]), max_iter=int(vals["max_iter"]),
                seed=int(vals["seed"]), rng_id=vals["rng_id"],
            ))
    return curve


# ----------------------------------------------------------------------
# Threshold estimation
# ----------------------------------------------------------------------

@dataclass
class ThresholdEstimate:
    f_star: float
    bracket: tuple
    P_pair: tuple


def estimate_threshold(curves) -> ThresholdEstimate:
    """Crossing abscissa of the two largest-P curves in log-FER.

    Points with zero observed failures are dropped (their log FER is
    undefined); the curves are interpolated piecewise-linearly in
    log10(FER) against f_m, and the first sign change of their difference
    gives the crossing, reported with its bracketing grid interval.
    """
    curves = sorted(curves, key=lambda c: c.P)
    if len(curves) < 2:
        raise ValueError("need at least two curves")
    small, big = curves[-2], curves[-1]
    if small.P == big.P:
        raise ValueError("the two largest-P curves must have distinct P")

    def points(curve):
        f = np.array([r.f_m for r in curve if r.failures > 0])
        y = np.array([math.log10(r.fer) for r in curve if r.failures > 0])
        return f, y

    f1, y1 = points(small)
    f2, y2 = points(big)
    if len(f1) < 2 or len(f2) < 2:
        raise NoCrossingError("need two nonzero-FER points per curve")
    lo = max(f1.min(), f2.min())
    hi = min(f1.max(), f2.max())
    if lo >= hi:
        raise NoCrossingError("curves have no overlapping f_m range")
    grid = np.unique(np.concatenate([f1, f2]))
    grid = grid[(grid >= lo) & (grid <= hi)]
    d = np.interp(grid, f2, y2) - np.interp(grid, f1, y1)
    for i in range(len(grid) - 1):
        if d[i] * d[i + 1] < 0:
            froot = grid[i] - d[i] * (grid[i + 1] - grid[i]) / (d[i + 1] - d[i])
            return ThresholdEstimate(float(froot), (float(grid[i]), float(grid[i + 1])),
                                     (small.P, big.P))
        if d[i] == 0.0 and i > 0 and d[i - 1] * d[i + 1] < 0:
            # the difference touches zero exactly at a grid point
            return ThresholdEstimate(float(grid[i]), (float(grid[i - 1]), float(grid[i + 1])),
                                     (small.P, big.P))
    raise NoCrossingError("log-FER difference has no sign change on the sampled grid")


def default_workers() -> int:
    return max(1, min(8, os.cpu_count() or 1))
