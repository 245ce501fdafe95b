"""Monte Carlo BER/AMI harness.

Trials are organized in fixed-size batches. Each batch draws its data from
its own counter-based Philox stream keyed by (master seed, SNR in milli-dB,
batch index), so results are reproducible bit-for-bit regardless of worker
count or scheduling, and every detector sees the same channel/noise
realizations at a given (seed, SNR) - useful for paired comparisons.

Detection inside a batch is vectorized across trials (the per-trial
detectors.detect() is the reference; the batched kernels here are pinned to
it by equivalence tests). Early stopping is evaluated at batch boundaries
in batch order, which keeps the stopping point deterministic too.
"""
from __future__ import annotations

import csv
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import SystemDims, modulate, demodulate, snr_to_noise_variance
from .detectors import (
    LLR_CLAMP,
    DetectorSpec,
    _config_table,
    _hypothesis_table,
    bit_gains,
)
from .errors import IoFailure
from .metrics import AMI_EXP_CLAMP, BerAccumulator

# Trials per batch; fixed so batch boundaries (and therefore stopping points
# and RNG streams) do not depend on worker count.
BATCH_TRIALS = 512

CSV_FIELDS = (
    "detector", "rd1", "rd2", "iterations", "snr_db", "bits", "errors",
    "ber", "ber_ci_low", "ber_ci_high", "ami", "wall_seconds",
)


@dataclass(frozen=True)
class SweepConfig:
    """One experiment: dimensions, SNR grid, detectors, stopping budgets."""

    dims: SystemDims
    snr_points_db: tuple
    detectors: tuple
    errors_target: int = 500
    bits_max: int = 100_000_000
    trials_min: int = 1
    master_seed: int = 12345
    record_ami: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "snr_points_db", tuple(float(v) for v in self.snr_points_db))
        object.__setattr__(self, "detectors", tuple(self.detectors))
        if not self.snr_points_db:
            raise ValueError("need at least one SNR point")
        if not self.detectors:
            raise ValueError("need at least one detector")
        if self.errors_target < 1 or self.bits_max < 1 or self.trials_min < 1:
            raise ValueError("stopping budgets must be >= 1")


@dataclass
class SweepRecord:
    """One (detector, SNR) measurement; maps 1:1 onto a CSV row."""

    detector: str
    rd1: int | None
    rd2: int | None
    iterations: int
    snr_db: float
    bits: int
    errors: int
    ber: float
    ber_ci_low: float
    ber_ci_high: float
    ami: float | None
    wall_seconds: float
    budget_exhausted: bool = False  # metadata only, not a CSV column


# ---------------- deterministic trial generation ----------------


def _snr_key(snr_db: float) -> int:
    return int(round(snr_db * 1000.0)) & 0xFFFFFFFF


def _batch_rng(master_seed: int, snr_db: float, batch_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(
        [int(master_seed) & 0xFFFFFFFFFFFFFFFF, _snr_key(snr_db), int(batch_index)]
    )
    return np.random.Generator(np.random.Philox(seq))


def _draw_batch(dims: SystemDims, sigma2: float, rng: np.random.Generator,
                count: int):
    """(bits, H, y) for `count` trials; draw order is part of the contract."""
    m = dims.bits_per_symbol
    bits = rng.integers(0, 2, size=(count, dims.n_bits)) * 2 - 1
    shape = (count, dims.n_rx, dims.n_tx)
    h = np.sqrt(0.5) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    noise = np.sqrt(sigma2 / 2.0) * (
        rng.standard_normal((count, dims.n_rx)) + 1j * rng.standard_normal((count, dims.n_rx))
    )
    s = modulate(bits, m)
    y = np.einsum("bjk,bk->bj", h, s) + noise
    return bits, h, y


# ---------------- batched detection kernels ----------------


def _engine_ml(h, y, m):
    tbl = _config_table(m, h.shape[2])
    hs = np.einsum("bjk,ck->bjc", h, tbl.symbols)
    metric = (np.abs(y[:, :, None] - hs) ** 2).sum(axis=1)
    best = np.argmin(metric, axis=1)
    hard = tbl.bits[best].astype(np.float64)
    return hard * LLR_CLAMP


def _engine_mmse_prior(h, y, sigma2, m):
    """Per-bit MMSE pseudo-LLRs for a batch, shape (B, Nbits). Unclamped."""
    n_tx = h.shape[2]
    a = np.einsum("bja,bjc->bac", h.conj(), h) + sigma2 * np.eye(n_tx)
    hty = np.einsum("bjk,bj->bk", h.conj(), y)
    s_hat = np.linalg.solve(a, hty[:, :, None])[:, :, 0]
    mse = np.diagonal(np.linalg.inv(a), axis1=1, axis2=2).real
    if m == 1:
        return 2.0 * s_hat.real / mse
    out = np.empty((h.shape[0], m * n_tx))
    out[:, 0::2] = 2.0 * np.sqrt(2.0) * s_hat.real / mse
    out[:, 1::2] = 2.0 * np.sqrt(2.0) * s_hat.imag / mse
    return out


def _engine_mmse_sic(h, y, sigma2, m):
    b, n_rx, n_tx = h.shape
    n_bits = m * n_tx
    rows = np.arange(b)
    active = np.tile(np.arange(n_tx), (b, 1))
    y_res = y.copy()
    soft = np.empty((b, n_bits))
    for stage in range(n_tx):
        n_rem = n_tx - stage
        h_act = np.take_along_axis(h, active[:, None, :], axis=2)
        a = np.einsum("bja,bjc->bac", h_act.conj(), h_act) + sigma2 * np.eye(n_rem)
        mse = np.diagonal(np.linalg.inv(a), axis1=1, axis2=2).real
        hty = np.einsum("bjk,bj->bk", h_act.conj(), y_res)
        s_hat = np.linalg.solve(a, hty[:, :, None])[:, :, 0]
        p = np.argmin(mse, axis=1)
        sym = active[rows, p]
        est = s_hat[rows, p]
        mse_p = mse[rows, p]
        scale = 2.0 * np.sqrt(m) / mse_p
        soft[rows, sym * m] = scale * est.real
        if m == 2:
            soft[rows, sym * m + 1] = scale * est.imag
        sliced = modulate(demodulate(est[:, None], m), m)[:, 0]
        h_sym = np.take_along_axis(h, sym[:, None, None], axis=2)[:, :, 0]
        y_res = y_res - h_sym * sliced[:, None]
        keep = np.ones((b, n_rem), dtype=bool)
        keep[rows, p] = False
        active = active[keep].reshape(b, n_rem - 1)
    return soft


def _engine_edge_sets(h, spec: DetectorSpec, m: int) -> np.ndarray:
    """build_edge_sets for a batch, shape (B, Nr, Nbits, R_D)."""
    b, n_rx, n_tx = h.shape
    if not 0 <= spec.rd1 <= n_tx - 1:
        raise ValueError(f"rd1 must be in 0..{n_tx - 1}")
    n_bits = m * n_tx
    rd = spec.relax_degree(m)
    order = np.argsort(-np.abs(h), axis=-1, kind="stable")
    sets = np.empty((b, n_rx, n_bits, rd), dtype=np.intp)
    offs = np.arange(m, dtype=np.intp)
    for i in range(n_bits):
        k0 = i // m
        others = order[order != k0].reshape(b, n_rx, n_tx - 1)
        chosen = others[:, :, : spec.rd1]
        bits = (chosen[:, :, :, None] * m + offs).reshape(b, n_rx, spec.rd1 * m)
        if spec.rd2 == 1 and m > 1:
            own = [k0 * m + c for c in range(m) if k0 * m + c != i]
            pad = np.broadcast_to(np.asarray(own, dtype=np.intp), (b, n_rx, len(own)))
            bits = np.concatenate([bits, pad], axis=-1)
        sets[:, :, i, :] = bits
    return sets


def _engine_bp(spec: DetectorSpec, h, y, sigma2, m, want_iters=False):
    """Soft outputs for the BP family over a batch.

    Returns the final (B, Nbits) soft matrix, or the per-iteration list when
    want_iters is set (entry l-1 matches a run with iterations=l).
    """
    b, n_rx, n_tx = h.shape
    n_bits = m * n_tx
    iters: list[np.ndarray] = []

    if spec.kind == "SBP":
        tbl = _config_table(m, n_tx)
        hs = np.einsum("bjk,ck->bjc", h, tbl.symbols)
        d = -np.abs(y[:, :, None] - hs) ** 2 / (2.0 * sigma2)
        alpha = np.zeros((b, n_bits, n_rx))
        beta = np.zeros((b, n_rx, n_bits))
        for _ in range(spec.iterations):
            p = np.einsum("ct,btj->bcj", tbl.xpos, alpha)
            t = d + p.transpose(0, 2, 1)
            for i in range(n_bits):
                mask = tbl.pos_mask[i]
                beta[:, :, i] = (
                    t[:, :, mask].max(axis=2) - alpha[:, i, :] - t[:, :, ~mask].max(axis=2)
                )
            total = beta.sum(axis=1)
            alpha = np.clip(total[:, :, None] - beta.transpose(0, 2, 1),
                            -LLR_CLAMP, LLR_CLAMP)
            if want_iters:
                iters.append(beta.sum(axis=1))
        return iters if want_iters else beta.sum(axis=1)

    # RBP / MMSE_RBP
    gains = bit_gains(h, m)
    sets = _engine_edge_sets(h, spec, m)
    rd = sets.shape[-1]
    lump = np.ones((b, n_rx, n_bits, n_bits))
    idx = np.arange(n_bits)
    lump[:, :, idx, idx] = 0.0
    if rd:
        bb = np.arange(b)[:, None, None, None]
        jj = np.arange(n_rx)[None, :, None, None]
        ii = idx[None, None, :, None]
        lump[bb, jj, ii, sets] = 0.0
    power = np.abs(gains) ** 2

    cascaded = spec.kind == "MMSE_RBP"
    if cascaded:
        prior = np.clip(_engine_mmse_prior(h, y, sigma2, m), -LLR_CLAMP, LLR_CLAMP)
        power = power * (1.0 - np.tanh(prior / 2.0) ** 2)[:, None, :]
    else:
        prior = np.zeros((b, n_bits))
    sigma2_z = np.einsum("bjit,bjt->bji", lump, power) + sigma2
    alpha = np.repeat(prior[:, :, None], n_rx, axis=2)

    if rd:
        xh, xh_pos = _hypothesis_table(rd)
        bb = np.arange(b)[:, None, None, None]
        jj = np.arange(n_rx)[None, :, None, None]
        g_sel = gains[bb, jj, sets]
        interf = np.einsum("bjir,hr->bjih", g_sel, xh)
        own = gains[:, :, :, None]
        half = 2.0 * sigma2_z[:, :, :, None]

    beta = np.zeros((b, n_rx, n_bits))
    for _ in range(spec.iterations):
        expect = np.tanh(alpha / 2.0)
        ge = gains * expect.transpose(0, 2, 1)
        u = np.einsum("bjit,bjt->bji", lump, ge)
        if rd == 0:
            beta = (2.0 / sigma2_z) * (gains.conj() * (y[:, :, None] - u)).real
        else:
            a_sel = alpha.transpose(0, 2, 1)[bb, jj, sets]
            priors = np.einsum("bjir,hr->bjih", a_sel, xh_pos)
            base = y[:, :, None, None] - u[:, :, :, None] - interf
            score_pos = -np.abs(base - own) ** 2 / half + priors
            score_neg = -np.abs(base + own) ** 2 / half + priors
            beta = score_pos.max(axis=3) - score_neg.max(axis=3)
        total = beta.sum(axis=1)
        ext = total[:, :, None] - beta.transpose(0, 2, 1)
        if cascaded:
            ext = prior[:, :, None] + ext
        alpha = np.clip(ext, -LLR_CLAMP, LLR_CLAMP)
        if want_iters:
            iters.append(beta.sum(axis=1))
    if want_iters:
        return iters
    if spec.iterations == 0:
        return prior
    return beta.sum(axis=1)


def _engine_soft(spec: DetectorSpec, h, y, sigma2, m, want_iters=False):
    if spec.kind == "ML":
        return _engine_ml(h, y, m)
    if spec.kind == "MMSE":
        return _engine_mmse_prior(h, y, sigma2, m)
    if spec.kind == "MMSE_SIC":
        return _engine_mmse_sic(h, y, sigma2, m)
    return _engine_bp(spec, h, y, sigma2, m, want_iters=want_iters)


# ---------------- batch workers ----------------


def _ami_sum(soft: np.ndarray, bits: np.ndarray) -> float:
    arg = np.clip(-bits * soft, -AMI_EXP_CLAMP, AMI_EXP_CLAMP)
    return float((1.0 - np.log2(1.0 + np.exp(arg))).sum())


def _run_batch(dims: SystemDims, spec: DetectorSpec, snr_db: float, sigma2: float,
               master_seed: int, batch_index: int, count: int, want_ami: bool):
    """(bits, errors, ami_sum) over one batch of trials."""
    rng = _batch_rng(master_seed, snr_db, batch_index)
    bits, h, y = _draw_batch(dims, sigma2, rng, count)
    soft = _engine_soft(spec, h, y, sigma2, dims.bits_per_symbol)
    hard = np.where(soft >= 0.0, 1, -1)
    errors = int(np.count_nonzero(hard != bits))
    total = bits.size
    return total, errors, _ami_sum(soft, bits) if want_ami else 0.0


def _run_batch_multi_l(dims: SystemDims, spec: DetectorSpec, snr_db: float,
                       sigma2: float, master_seed: int, batch_index: int,
                       count: int, want_ami: bool, l_values: tuple):
    """Per-iteration tallies over one batch (for convergence studies)."""
    rng = _batch_rng(master_seed, snr_db, batch_index)
    bits, h, y = _draw_batch(dims, sigma2, rng, count)
    iters = _engine_soft(spec, h, y, sigma2, dims.bits_per_symbol, want_iters=True)
    errors = []
    amis = []
    for l in l_values:
        soft = iters[l - 1]
        hard = np.where(soft >= 0.0, 1, -1)
        errors.append(int(np.count_nonzero(hard != bits)))
        amis.append(_ami_sum(soft, bits) if want_ami else 0.0)
    return bits.size, errors, amis


# ---------------- points, sweeps, convergence ----------------


def _point_loop(task_args, stop_check, merge, workers: int):
    """Run batches 0, 1, 2, ... merging results strictly in batch order.

    task_args(batch_index) builds the worker arguments; merge(result) folds
    one batch in; stop_check() decides at each batch boundary. With workers
    > 1, batches run speculatively in a process pool but are still merged in
    order, so the outcome is identical to the serial schedule.
    """
    if workers <= 1:
        index = 0
        while True:
            args = task_args(index)
            fn = _run_batch if len(args) == 8 else _run_batch_multi_l
            merge(fn(*args))
            index += 1
            if stop_check():
                return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        pending = {}
        next_submit = 0
        next_merge = 0
        while True:
            while len(pending) < 2 * workers:
                args = task_args(next_submit)
                fn = _run_batch if len(args) == 8 else _run_batch_multi_l
                pending[next_submit] = pool.submit(fn, *args)
                next_submit += 1
            result = pending.pop(next_merge).result()
            next_merge += 1
            merge(result)
            if stop_check():
                for fut in pending.values():
                    fut.cancel()
                return


def _record_fields(spec: DetectorSpec):
    if spec.relaxed:
        return spec.rd1, spec.rd2
    return None, None


def run_point(cfg: SweepConfig, detector: DetectorSpec, snr_db: float,
              workers: int = 1) -> SweepRecord:
    """Monte Carlo BER (and optional AMI) for one detector at one SNR.

    Runs whole batches until at least errors_target bit errors have been
    seen (and trials_min trials run), or the bits_max budget is exhausted.
    Deterministic given (master_seed, detector, snr_db) for any worker
    count.
    """
    dims = cfg.dims
    sigma2 = snr_to_noise_variance(snr_db, dims).variance
    state = {"bits": 0, "errors": 0, "ami": 0.0, "trials": 0}

    def task_args(index: int):
        return (dims, detector, snr_db, sigma2, cfg.master_seed, index,
                BATCH_TRIALS, cfg.record_ami)

    def merge(result):
        total, errors, ami_sum = result
        state["bits"] += total
        state["errors"] += errors
        state["ami"] += ami_sum
        state["trials"] += total // dims.n_bits

    def stop_check():
        hit_target = (state["errors"] >= cfg.errors_target
                      and state["trials"] >= cfg.trials_min)
        return hit_target or state["bits"] >= cfg.bits_max

    start = time.perf_counter()
    _point_loop(task_args, stop_check, merge, workers)
    wall = time.perf_counter() - start

    acc = BerAccumulator(state["bits"], state["errors"])
    lo, hi = acc.wilson_interval()
    rd1, rd2 = _record_fields(detector)
    return SweepRecord(
        detector=detector.label, rd1=rd1, rd2=rd2,
        iterations=detector.iterations, snr_db=float(snr_db),
        bits=state["bits"], errors=state["errors"], ber=acc.ber,
        ber_ci_low=lo, ber_ci_high=hi,
        ami=(state["ami"] / state["bits"]) if cfg.record_ami else None,
        wall_seconds=wall,
        budget_exhausted=state["errors"] < cfg.errors_target,
    )


def run_convergence(cfg: SweepConfig, detector: DetectorSpec, snr_db: float,
                    l_values: Sequence[int], workers: int = 1) -> list[SweepRecord]:
    """BER after each iteration count in l_values, on shared trials.

    One message-passing run per trial (at max(l_values) iterations) scores
    every requested depth, so the estimates are paired. Runs until every
    depth has errors_target errors or the bit budget is out.
    """
    if detector.kind not in ("SBP", "RBP", "MMSE_RBP"):
        raise ValueError("convergence sweeps need an iterative detector")
    l_values = tuple(sorted(set(int(v) for v in l_values)))
    if not l_values or l_values[0] < 1:
        raise ValueError("iteration counts must be >= 1")
    deep = DetectorSpec(detector.kind, iterations=max(l_values),
                        rd1=detector.rd1, rd2=detector.rd2)
    dims = cfg.dims
    sigma2 = snr_to_noise_variance(snr_db, dims).variance
    state = {"bits": 0, "trials": 0,
             "errors": [0] * len(l_values), "ami": [0.0] * len(l_values)}

    def task_args(index: int):
        return (dims, deep, snr_db, sigma2, cfg.master_seed, index,
                BATCH_TRIALS, cfg.record_ami, l_values)

    def merge(result):
        total, errors, amis = result
        state["bits"] += total
        state["trials"] += total // dims.n_bits
        for pos, err in enumerate(errors):
            state["errors"][pos] += err
            state["ami"][pos] += amis[pos]

    def stop_check():
        hit_target = (min(state["errors"]) >= cfg.errors_target
                      and state["trials"] >= cfg.trials_min)
        return hit_target or state["bits"] >= cfg.bits_max

    start = time.perf_counter()
    _point_loop(task_args, stop_check, merge, workers)
    wall = time.perf_counter() - start

    rd1, rd2 = _record_fields(deep)
    records = []
    for pos, l in enumerate(l_values):
        acc = BerAccumulator(state["bits"], state["errors"][pos])
        lo, hi = acc.wilson_interval()
        records.append(SweepRecord(
            detector=deep.label, rd1=rd1, rd2=rd2, iterations=l,
            snr_db=float(snr_db), bits=state["bits"],
            errors=state["errors"][pos], ber=acc.ber,
            ber_ci_low=lo, ber_ci_high=hi,
            ami=(state["ami"][pos] / state["bits"]) if cfg.record_ami else None,
            wall_seconds=wall,
            budget_exhausted=state["errors"][pos] < cfg.errors_target,
        ))
    return records


def run_sweep(cfg: SweepConfig, workers: int = 1, progress: bool = False) -> list[SweepRecord]:
    """Every detector at every SNR point; records sorted by (detector, snr).

    A failing point is reported on stderr and skipped; the rest of the sweep
    still runs.
    """
    records: list[SweepRecord] = []
    for detector in cfg.detectors:
        for snr_db in sorted(cfg.snr_points_db):
            try:
                rec = run_point(cfg, detector, snr_db, workers=workers)
            except Exception as exc:  # keep going; a sweep is many points
                print(f"[mimobp] point failed: {detector.label} @ {snr_db} dB: {exc}",
                      file=sys.stderr)
                continue
            records.append(rec)
            if progress:
                print(f"[mimobp] {rec.detector}({rec.rd1},{rec.rd2}) "
                      f"L={rec.iterations} snr={rec.snr_db:g} dB  "
                      f"ber={rec.ber:.3e}  errors={rec.errors}  bits={rec.bits}",
                      file=sys.stderr)
    return records


# ---------------- CSV ----------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def write_csv(records: Sequence[SweepRecord], path) -> None:
    """Write records with the fixed header; floats carry 6 significant digits."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_FIELDS)
            for rec in records:
                writer.writerow([_fmt(getattr(rec, name)) for name in CSV_FIELDS])
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_csv(path) -> list[SweepRecord]:
    """Parse a results file back into records (floats at file precision)."""
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != list(CSV_FIELDS):
                raise IoFailure(f"unexpected header in {path}: {reader.fieldnames}")
            records = []
            for row in reader:
                records.append(SweepRecord(
                    detector=row["detector"],
                    rd1=int(row["rd1"]) if row["rd1"] else None,
                    rd2=int(row["rd2"]) if row["rd2"] else None,
                    iterations=int(row["iterations"]),
                    snr_db=float(row["snr_db"]),
                    bits=int(row["bits"]),
                    errors=int(row["errors"]),
                    ber=float(row["ber"]),
                    ber_ci_low=float(row["ber_ci_low"]),
                    ber_ci_high=float(row["ber_ci_high"]),
                    ami=float(row["ami"]) if row["ami"] else None,
                    wall_seconds=float(row["wall_seconds"]),
                ))
            return records
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
