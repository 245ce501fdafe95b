"""MIMO detectors on the fully-connected bit/observation factor graph.

Graph and message conventions:
  * one variable node per transmitted bit x_t (t = 0..M*Nt-1), one factor
    node per receive antenna y_j (j = 0..Nr-1)
  * alpha[t, j] is the bit-to-factor LLR of x_t heading to factor j
  * beta[j, i] is the factor-to-bit LLR from factor j about bit x_i
  * a flooding iteration updates every beta from the previous alpha, then
    every alpha from the fresh beta; alpha entries are clamped to +-30
  * factor metrics use the complex-distance log likelihood
    D_j(s) = -|y_j - h_j s|^2 / (2 sigma^2) under the max-log approximation

Relaxed BP keeps, per message (j, i), only a small set Psi of interferer
bits explicit (the rd1 strongest-gain symbols plus, optionally, the bit's
own-symbol partners); everything else is lumped into a Gaussian whose mean
is rebuilt each iteration from the previous alphas (soft interference
cancellation) and whose variance is fixed at the priors. With rd1 = Nt-1,
rd2 = 1 the lump is empty and the scheme coincides with standard BP; with
rd1 = rd2 = 0 the beta update collapses to a matched filter against the
cancelled observation. The MMSE-cascaded variant turns per-stream MMSE
pseudo-LLRs into a fixed per-bit prior: it seeds the alphas, stays as an
additive intrinsic term in every alpha update, and shrinks the lump
variances (informative priors mean less residual interference power),
which is what lets the cascade track the MMSE-SIC baseline instead of
relaxing back to the uninformed fixed point. The soft output remains the
plain column sum of beta; re-adding the prior there would double-count
information already fed back through the cancellation.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DimensionTooLargeError, LengthMismatchError
from .numerics import gram, hermitian_solve

# Hard clamp applied to bit-to-factor LLRs (and to exponent arguments wherever
# an LLR is converted to a probability-domain quantity).
LLR_CLAMP = 30.0

# Exhaustive enumeration guards.
MAX_ENUM_BITS = 24      # joint configurations for ML / standard BP
MAX_RELAX_EDGES = 20    # explicit edges per message for relaxed BP

_KINDS = ("ML", "MMSE", "MMSE_SIC", "SBP", "RBP", "MMSE_RBP")


@dataclass(frozen=True)
class DetectorSpec:
    """What to run: algorithm kind, iteration count, relaxation coefficients.

    rd1 counts interferer symbols kept explicit per message; rd2 (0 or 1)
    keeps the other bits of the message's own symbol explicit (only
    meaningful for M = 2). Both are ignored by the non-relaxed kinds.
    """

    kind: str
    iterations: int = 0
    rd1: int = 0
    rd2: int = 0

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown detector kind {self.kind!r}")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.rd1 < 0:
            raise ValueError("rd1 must be >= 0")
        if self.rd2 not in (0, 1):
            raise ValueError("rd2 must be 0 or 1")

    @property
    def relaxed(self) -> bool:
        return self.kind in ("RBP", "MMSE_RBP")

    @property
    def label(self) -> str:
        return self.kind.replace("_", "-")

    def relax_degree(self, m: int) -> int:
        """Explicit edges per message: rd1*M + rd2*(M-1)."""
        return self.rd1 * m + self.rd2 * (m - 1)

    @classmethod
    def ml(cls) -> "DetectorSpec":
        return cls("ML")

    @classmethod
    def mmse(cls) -> "DetectorSpec":
        return cls("MMSE")

    @classmethod
    def mmse_sic(cls) -> "DetectorSpec":
        return cls("MMSE_SIC")

    @classmethod
    def sbp(cls, iterations: int = 5) -> "DetectorSpec":
        return cls("SBP", iterations=iterations)

    @classmethod
    def rbp(cls, rd1: int = 0, rd2: int = 0, iterations: int = 5) -> "DetectorSpec":
        return cls("RBP", iterations=iterations, rd1=rd1, rd2=rd2)

    @classmethod
    def mmse_rbp(cls, rd1: int = 0, rd2: int = 0, iterations: int = 5) -> "DetectorSpec":
        return cls("MMSE_RBP", iterations=iterations, rd1=rd1, rd2=rd2)


@dataclass
class MessageState:
    """Messages after one flooding iteration: alpha (Nbits, Nr), beta (Nr, Nbits)."""

    alpha: np.ndarray
    beta: np.ndarray


@dataclass
class DetectionResult:
    hard_bits: np.ndarray
    soft_llrs: np.ndarray
    iterations_run: int
    per_iteration_soft: list | None = None


class _ConfigTable(NamedTuple):
    bits: np.ndarray       # (C, n_bits) int8, +1/-1
    xpos: np.ndarray       # (C, n_bits) float64, 1 where bit is +1
    symbols: np.ndarray    # (C, n_tx) complex128
    pos_mask: np.ndarray   # (n_bits, C) bool, configs with bit i = +1


@lru_cache(maxsize=8)
def _config_table(m: int, n_tx: int) -> _ConfigTable:
    from .channel import modulate

    n_bits = m * n_tx
    if n_bits > MAX_ENUM_BITS:
        raise DimensionTooLargeError(
            f"{n_bits} bits means 2^{n_bits} joint configurations; "
            f"the exhaustive path supports at most {MAX_ENUM_BITS}"
        )
    count = 1 << n_bits
    cc = np.arange(count, dtype=np.int64)[:, None]
    tt = np.arange(n_bits, dtype=np.int64)[None, :]
    bits = (1 - 2 * ((cc >> tt) & 1)).astype(np.int8)
    xpos = (bits > 0).astype(np.float64)
    symbols = modulate(bits.astype(np.float64), m)
    pos_mask = (bits.T > 0)
    return _ConfigTable(bits, xpos, symbols, pos_mask)


@lru_cache(maxsize=32)
def _hypothesis_table(r: int) -> tuple[np.ndarray, np.ndarray]:
    """All +-1 patterns over r explicit edges: (2^r, r) values and 0/1 copy."""
    count = 1 << r
    cc = np.arange(count, dtype=np.int64)[:, None]
    rr = np.arange(r, dtype=np.int64)[None, :]
    xh = (1 - 2 * ((cc >> rr) & 1)).astype(np.float64)
    return xh, (xh > 0).astype(np.float64)


def bit_gains(h: np.ndarray, m: int = 1) -> np.ndarray:
    """Per-bit complex gain g[j, t] with y_j = sum_t g[j, t] x_t + n_j.

    For M = 1 this is H itself; for M = 2 each column of H contributes a
    real-axis and an imaginary-axis gain scaled by 1/sqrt(2) (unit-energy
    mapping). Works on the last two axes, so batched H is fine.
    """
    h = np.asarray(h, dtype=np.complex128)
    if m == 1:
        return h
    n_tx = h.shape[-1]
    axis = np.tile(np.array([1.0, 1.0j]), n_tx) / np.sqrt(m)
    return np.repeat(h, m, axis=-1) * axis


def log_likelihood_D(s: np.ndarray, j: int, h: np.ndarray, y: np.ndarray,
                     sigma2: float) -> float:
    """D_j(s) = -|y_j - h_j s|^2 / (2 sigma^2)."""
    if sigma2 <= 0.0:
        raise ValueError("sigma2 must be > 0")
    resid = y[j] - h[j, :] @ np.asarray(s, dtype=np.complex128)
    return float(-(abs(resid) ** 2) / (2.0 * sigma2))


def sbp_beta_update(alpha: np.ndarray, h: np.ndarray, y: np.ndarray,
                    sigma2: float, m: int = 1) -> np.ndarray:
    """One standard-BP factor-to-bit update by exhaustive enumeration.

    beta[j, i] = max over configs with x_i = +1 of {D_j(s) + sum of alpha[t, j]
    over t != i with x_t = +1} minus the analogous max with x_i = -1.
    """
    if sigma2 <= 0.0:
        raise ValueError("sigma2 must be > 0")
    h = np.asarray(h, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    n_rx, n_tx = h.shape
    tbl = _config_table(m, n_tx)
    n_bits = m * n_tx

    hs = h @ tbl.symbols.T                                    # (Nr, C)
    d = -np.abs(y[:, None] - hs) ** 2 / (2.0 * sigma2)
    priors = tbl.xpos @ alpha                                 # (C, Nr)
    t = d + priors.T                                          # (Nr, C)

    beta = np.empty((n_rx, n_bits))
    for i in range(n_bits):
        mask = tbl.pos_mask[i]
        # the x_i = +1 branch double-counts alpha[i, :]; subtract it back out
        beta[:, i] = t[:, mask].max(axis=1) - alpha[i, :] - t[:, ~mask].max(axis=1)
    return beta


def alpha_update(beta: np.ndarray, prior: np.ndarray | None = None) -> np.ndarray:
    """alpha[i, j] = sum of beta[t, i] over factors t != j, clamped to +-30.

    A per-bit prior, when given, stays as an additive intrinsic term in
    every outgoing alpha (the bit node's own degree-one factor).
    """
    total = beta.sum(axis=0)
    alpha = total[:, None] - beta.T
    if prior is not None:
        alpha = prior[:, None] + alpha
    return np.clip(alpha, -LLR_CLAMP, LLR_CLAMP)


def soft_output(beta: np.ndarray, iterations_run: int = 0,
                per_iteration_soft: list | None = None) -> DetectionResult:
    """Final per-bit LLRs (column sums of beta) and hard signs (sign(0) = +1)."""
    soft = beta.sum(axis=0)
    hard = np.where(soft >= 0.0, 1, -1)
    return DetectionResult(hard, soft, iterations_run, per_iteration_soft)


# ---------------- relaxation: edge selection and the Gaussian lump ----------------


def select_edges(h_row: np.ndarray, i: int, spec: DetectorSpec, m: int = 1) -> np.ndarray:
    """Explicit-edge set Psi for message (j, i), as 0-based bit indices.

    Takes the rd1 interferer symbols with the largest |h_{j,k}|, k != k(i)
    (ties toward the smaller symbol index), expands them to bits, and, when
    rd2 = 1, appends the other M-1 bits of bit i's own symbol. The set is
    fixed per channel realization.
    """
    h_row = np.asarray(h_row)
    n_tx = h_row.shape[0]
    if not 0 <= spec.rd1 <= n_tx - 1:
        raise ValueError(f"rd1 must be in 0..{n_tx - 1}")
    k0 = i // m
    order = np.argsort(-np.abs(h_row), kind="stable")
    chosen = [k for k in order if k != k0][: spec.rd1]
    bits = [k * m + b for k in chosen for b in range(m)]
    if spec.rd2 == 1:
        bits.extend(k0 * m + b for b in range(m) if k0 * m + b != i)
    return np.asarray(bits, dtype=np.intp)


def build_edge_sets(h: np.ndarray, spec: DetectorSpec, m: int = 1) -> np.ndarray:
    """select_edges for every (j, i), shape (Nr, Nbits, R_D)."""
    h = np.asarray(h)
    n_rx, n_tx = h.shape
    n_bits = m * n_tx
    if not 0 <= spec.rd1 <= n_tx - 1:
        raise ValueError(f"rd1 must be in 0..{n_tx - 1}")
    rd = spec.relax_degree(m)
    sets = np.empty((n_rx, n_bits, rd), dtype=np.intp)
    for j in range(n_rx):
        order = np.argsort(-np.abs(h[j]), kind="stable")
        for i in range(n_bits):
            k0 = i // m
            chosen = [k for k in order if k != k0][: spec.rd1]
            bits = [k * m + b for k in chosen for b in range(m)]
            if spec.rd2 == 1:
                bits.extend(k0 * m + b for b in range(m) if k0 * m + b != i)
            sets[j, i, :] = bits
    return sets


def _exclusion_mask(edge_sets: np.ndarray, n_bits: int) -> np.ndarray:
    """Float mask over (j, i, t): 1 where bit t is lumped into the Gaussian.

    Lumped means t != i and t not in Psi_{j,i}. Summing through this mask
    gives exact zeros (empty sums) when nothing is lumped, which keeps the
    full-selection configuration identical to standard BP.
    """
    n_rx, nb, rd = edge_sets.shape
    mask = np.ones((n_rx, n_bits, n_bits), dtype=np.float64)
    idx = np.arange(n_bits)
    mask[:, idx, idx] = 0.0
    if rd:
        jj = np.arange(n_rx)[:, None, None]
        ii = idx[None, :, None]
        mask[jj, ii, edge_sets] = 0.0
    return mask


def interference_mean(alpha_col: np.ndarray, psi: np.ndarray, h_row: np.ndarray,
                      i: int, m: int = 1) -> complex:
    """Soft-cancellation mean of the lumped interferers for one message.

    u = sum over t not in Psi, t != i of g[t] * tanh(alpha[t]/2), where
    alpha_col holds the bit-to-factor LLRs heading to this factor.
    """
    gains = bit_gains(np.asarray(h_row)[None, :], m)[0]
    n_bits = gains.shape[0]
    keep = np.ones(n_bits, dtype=bool)
    keep[np.asarray(psi, dtype=np.intp)] = False
    keep[i] = False
    e = np.tanh(np.asarray(alpha_col, dtype=np.float64) / 2.0)
    return complex((gains[keep] * e[keep]).sum())


def interference_variance(psi: np.ndarray, h_row: np.ndarray, i: int,
                          sigma2: float, m: int = 1) -> float:
    """Variance of the Gaussian lump: prior unit bit variance plus noise.

    sigma2_z = sum over t not in Psi, t != i of |g[t]|^2 + sigma^2. Computed
    once per channel realization; never updated from the feedback.
    """
    gains = bit_gains(np.asarray(h_row)[None, :], m)[0]
    n_bits = gains.shape[0]
    keep = np.ones(n_bits, dtype=bool)
    keep[np.asarray(psi, dtype=np.intp)] = False
    keep[i] = False
    return float((np.abs(gains[keep]) ** 2).sum() + sigma2)


def _interference_means(alpha: np.ndarray, gains: np.ndarray,
                        lump_mask: np.ndarray) -> np.ndarray:
    """interference_mean for every (j, i) at once, shape (Nr, Nbits)."""
    expect = np.tanh(alpha / 2.0)                 # (Nbits, Nr)
    ge = gains * expect.T                         # (Nr, Nbits)
    return np.einsum("jit,jt->ji", lump_mask, ge)


def _interference_variances(gains: np.ndarray, lump_mask: np.ndarray,
                            sigma2: float,
                            bit_var: np.ndarray | None = None) -> np.ndarray:
    """interference_variance for every (j, i) at once, shape (Nr, Nbits).

    bit_var replaces the unit per-bit prior variance when the run starts
    from informative priors (the MMSE cascade); entries are 1 - tanh^2 of
    half the prior LLR.
    """
    power = np.abs(gains) ** 2
    if bit_var is not None:
        power = power * bit_var[None, :]
    return np.einsum("jit,jt->ji", lump_mask, power) + sigma2


def rbp_D(h_row: np.ndarray, i: int, psi: np.ndarray, x_i: int,
          x_psi: np.ndarray, y_j: complex, u: complex, sigma2_z: float,
          m: int = 1) -> float:
    """Relaxed factor metric for one hypothesis over bit i and its Psi bits.

    D = -|y_j - g[i] x_i - sum_{t in Psi} g[t] x_t - u|^2 / (2 sigma2_z).
    """
    if sigma2_z <= 0.0:
        raise ValueError("sigma2_z must be > 0")
    gains = bit_gains(np.asarray(h_row)[None, :], m)[0]
    resid = y_j - gains[i] * x_i - u
    for t, x in zip(np.asarray(psi, dtype=np.intp), np.asarray(x_psi)):
        resid -= gains[t] * x
    return float(-(abs(resid) ** 2) / (2.0 * sigma2_z))


def rbp_beta_update(alpha: np.ndarray, gains: np.ndarray, edge_sets: np.ndarray,
                    u: np.ndarray, sigma2_z: np.ndarray, y: np.ndarray,
                    use_closed_form: bool = True) -> np.ndarray:
    """One relaxed factor-to-bit update for every message.

    Enumerates bit i jointly with its explicit edges; lumped interferers
    enter only through the mean u (from the previous alphas) and the fixed
    variance sigma2_z. With no explicit edges the update has the closed
    matched-filter form beta = (2/sigma2_z) Re(g* (y - u)), used by default;
    use_closed_form=False forces the general enumeration (the two must
    agree, which the tests pin).
    """
    n_rx, n_bits, rd = edge_sets.shape
    if rd > MAX_RELAX_EDGES:
        raise DimensionTooLargeError(
            f"{rd} explicit edges means 2^{rd + 1} hypotheses per message; "
            f"at most {MAX_RELAX_EDGES} supported"
        )
    if rd == 0 and use_closed_form:
        return (2.0 / sigma2_z) * (np.conj(gains) * (y[:, None] - u)).real

    xh, xh_pos = _hypothesis_table(rd)
    jj = np.arange(n_rx)[:, None, None]
    g_sel = gains[jj, edge_sets]                              # (Nr, Nbits, R)
    a_sel = alpha.T[jj, edge_sets]                            # (Nr, Nbits, R)
    interf = np.einsum("jir,hr->jih", g_sel, xh)
    priors = np.einsum("jir,hr->jih", a_sel, xh_pos)
    base = y[:, None, None] - u[:, :, None] - interf
    half = 2.0 * sigma2_z[:, :, None]
    own = gains[:, :, None]
    score_pos = -np.abs(base - own) ** 2 / half + priors
    score_neg = -np.abs(base + own) ** 2 / half + priors
    return score_pos.max(axis=2) - score_neg.max(axis=2)


# ---------------- linear front ends ----------------


def mmse_filter(h: np.ndarray, y: np.ndarray, sigma2: float) -> tuple[np.ndarray, np.ndarray]:
    """MMSE estimate s_hat = (H^H H + sigma^2 I)^-1 H^H y and that inverse K."""
    h = np.asarray(h, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    n_tx = h.shape[1]
    a = gram(h) + sigma2 * np.eye(n_tx)
    s_hat = hermitian_solve(a, h.conj().T @ y)
    k = hermitian_solve(a, np.eye(n_tx, dtype=np.complex128))
    k = 0.5 * (k + k.conj().T)
    return s_hat, k


def _component_llr(value: complex, mse: float, component: int, m: int) -> float:
    if mse <= 0.0:
        raise ValueError("MMSE error variance must be > 0")
    part = value.real if component == 0 else value.imag
    return 2.0 * np.sqrt(m) * part / mse


def mmse_prior_llr(s_hat: np.ndarray, k: np.ndarray, i: int, m: int = 1) -> float:
    """Pseudo-LLR of bit i from the MMSE output: 2 Re(s_hat_k)/K_kk at M = 1.

    At M = 2 the first bit of a symbol reads the real part and the second
    the imaginary part, both scaled by sqrt(2) for the unit-energy mapping.
    """
    k0 = i // m
    return _component_llr(complex(s_hat[k0]), float(k[k0, k0].real), i % m, m)


# ---------------- whole-vector detection ----------------


def _detect_ml(h: np.ndarray, y: np.ndarray, m: int) -> DetectionResult:
    n_tx = h.shape[1]
    tbl = _config_table(m, n_tx)
    hs = h @ tbl.symbols.T
    metric = (np.abs(y[:, None] - hs) ** 2).sum(axis=0)
    best = int(np.argmin(metric))
    hard = tbl.bits[best].astype(int)
    # synthetic saturated LLRs; AMI is not defined for the hard-decision ML
    return DetectionResult(hard, hard * LLR_CLAMP, 0)


def _detect_mmse(h: np.ndarray, y: np.ndarray, sigma2: float, m: int) -> DetectionResult:
    s_hat, k = mmse_filter(h, y, sigma2)
    n_bits = m * h.shape[1]
    soft = np.array([mmse_prior_llr(s_hat, k, i, m) for i in range(n_bits)])
    hard = np.where(soft >= 0.0, 1, -1)
    return DetectionResult(hard, soft, 0)


def _detect_mmse_sic(h: np.ndarray, y: np.ndarray, sigma2: float, m: int) -> DetectionResult:
    """Ordered successive cancellation: best post-MMSE stream first,
    hard-decision re-encode, subtract, re-filter the remainder."""
    from .channel import demodulate, modulate

    h = np.asarray(h, dtype=np.complex128)
    n_tx = h.shape[1]
    n_bits = m * n_tx
    active = list(range(n_tx))
    y_res = np.asarray(y, dtype=np.complex128).copy()
    soft = np.empty(n_bits)
    eye = np.eye(n_tx, dtype=np.complex128)
    for _ in range(n_tx):
        hs = h[:, active]
        a = gram(hs) + sigma2 * eye[: len(active), : len(active)]
        k = hermitian_solve(a, eye[: len(active), : len(active)])
        k = 0.5 * (k + k.conj().T)
        s_hat = hermitian_solve(a, hs.conj().T @ y_res)
        p = int(np.argmin(k.diagonal().real))
        sym = active[p]
        est = complex(s_hat[p])
        mse = float(k[p, p].real)
        for b in range(m):
            soft[sym * m + b] = _component_llr(est, mse, b, m)
        sliced = modulate(demodulate(np.array([est]), m), m)[0]
        y_res = y_res - h[:, sym] * sliced
        active.pop(p)
    hard = np.where(soft >= 0.0, 1, -1)
    return DetectionResult(hard, soft, 0)


def _bp_run(spec: DetectorSpec, h: np.ndarray, y: np.ndarray, sigma2: float,
            m: int, want_messages: bool = False, want_soft: bool = False):
    """Shared flooding loop for SBP, RBP and MMSE-RBP.

    Returns (prior, beta, messages, softs): prior is the initial per-bit
    belief (zeros except for the MMSE cascade), beta the final
    factor-to-bit matrix. The cascade's pseudo-LLRs act as a fixed per-bit
    prior factor: they seed the alphas, remain an additive intrinsic term
    in every alpha update, and shrink the lump variances once up front.
    The soft output stays the plain column sum of beta.
    """
    if sigma2 <= 0.0:
        raise ValueError("sigma2 must be > 0 for message passing")
    h = np.asarray(h, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    n_rx, n_tx = h.shape
    n_bits = m * n_tx

    if spec.kind == "MMSE_RBP":
        s_hat, k = mmse_filter(h, y, sigma2)
        prior = np.array([mmse_prior_llr(s_hat, k, i, m) for i in range(n_bits)])
        prior = np.clip(prior, -LLR_CLAMP, LLR_CLAMP)
    else:
        prior = None

    relaxed = spec.relaxed
    if relaxed:
        gains = bit_gains(h, m)
        edge_sets = build_edge_sets(h, spec, m)
        lump = _exclusion_mask(edge_sets, n_bits)
        bit_var = None if prior is None else 1.0 - np.tanh(prior / 2.0) ** 2
        sigma2_z = _interference_variances(gains, lump, sigma2, bit_var)

    alpha0 = np.zeros(n_bits) if prior is None else prior
    alpha = np.tile(alpha0[:, None], (1, n_rx))

    beta = np.zeros((n_rx, n_bits))
    messages: list[MessageState] = []
    softs: list[np.ndarray] = []
    for _ in range(spec.iterations):
        if relaxed:
            u = _interference_means(alpha, gains, lump)
            beta = rbp_beta_update(alpha, gains, edge_sets, u, sigma2_z, y)
        else:
            beta = sbp_beta_update(alpha, h, y, sigma2, m)
        alpha = alpha_update(beta, prior)
        if want_messages:
            messages.append(MessageState(alpha.copy(), beta.copy()))
        if want_soft:
            softs.append(beta.sum(axis=0))
    return alpha0, beta, messages, softs


def message_history(spec: DetectorSpec, h: np.ndarray, y: np.ndarray,
                    sigma2: float, m: int = 1) -> list[MessageState]:
    """Alpha/beta after each flooding iteration (for analysis and tests)."""
    _, _, messages, _ = _bp_run(spec, h, y, sigma2, m, want_messages=True)
    return messages


def detect(spec: DetectorSpec, h: np.ndarray, y: np.ndarray, sigma2: float,
           m: int = 1, record_iterations: bool = False) -> DetectionResult:
    """Run one detector on one received vector.

    h is (Nr, Nt) complex, y is (Nr,), sigma2 the complex noise variance, m
    the bits per symbol. With record_iterations=True the BP kinds also
    report the soft output after every iteration (entry l equals what a run
    with iterations=l+1 would return). BP kinds at iterations=0 fall back to
    their initial beliefs: zero LLRs for SBP/RBP, the MMSE pseudo-LLRs for
    MMSE-RBP.
    """
    h = np.asarray(h, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if y.shape != (h.shape[0],):
        raise LengthMismatchError(
            f"y has shape {y.shape}, expected ({h.shape[0]},)")

    if spec.kind == "ML":
        return _detect_ml(h, y, m)
    if spec.kind == "MMSE":
        return _detect_mmse(h, y, sigma2, m)
    if spec.kind == "MMSE_SIC":
        return _detect_mmse_sic(h, y, sigma2, m)

    prior, beta, _, softs = _bp_run(spec, h, y, sigma2, m, want_soft=record_iterations)
    if spec.iterations == 0:
        soft = prior.copy()
        hard = np.where(soft >= 0.0, 1, -1)
        return DetectionResult(hard, soft, 0, [] if record_iterations else None)
    return soft_output(beta, spec.iterations, softs if record_iterations else None)
