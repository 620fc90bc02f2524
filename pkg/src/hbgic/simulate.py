"""Monte Carlo simulation of two-step SIC decoding on the channel.

Codebooks are i.i.d. Gaussian with a maximal power constraint; a
codeword breaching its power cap is transmitted anyway and the breach
is tallied separately. Decoders use threshold tests on the information
density, scanning message indices smallest-first; no index crossing
the threshold yields the sentinel -1.

Reproducibility: all randomness derives from numpy's PCG64 via
SeedSequence(entropy=seed, spawn_key=...). Stream (0,) serves the
fixed-codebook mode; trial chunk c draws from stream (1, c). Chunk
boundaries depend only on the experiment shape, and per-chunk draw
order is fixed (m1, m2, codebook 1, codebook 2, z1, z2), so results
are identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .channel import BlocklengthConfig, ChannelParams, require_valid, transmit
from .fbl import LOG2_E, gaussian_capacity, q_inv

# Scalar budget per chunk for the staged arrays; keeps peak memory in
# the tens of megabytes while amortizing numpy call overhead.
_CHUNK_SCALAR_BUDGET = 1 << 21
_MAX_CHUNK_TRIALS = 512


@dataclass(frozen=True)
class Codebook:
    """Gaussian codebook with per-codeword power-cap flags.

    entries has shape (m, n); violation_flags marks rows whose squared
    norm exceeds power_limit = n * p.
    """

    entries: np.ndarray
    power_limit: float
    violation_flags: np.ndarray


def generate_codebook(m: int, n: int, p: float, seed) -> Codebook:
    """Draw m codewords of length n, i.i.d. N(0, p) per symbol.

    seed may be an int, a SeedSequence, or an existing Generator;
    identical seeds give identical codebooks.
    """
    m = int(m)
    n = int(n)
    if m < 1 or n < 1:
        raise ValueError(f"codebook needs m >= 1 and n >= 1, got m={m} n={n}")
    p = float(p)
    if not (p > 0.0 and math.isfinite(p)):
        raise ValueError(f"symbol power must be positive and finite, got {p!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    entries = rng.standard_normal((m, n)) * math.sqrt(p)
    limit = n * p
    flags = np.einsum("mn,mn->m", entries, entries, optimize=False) > limit
    return Codebook(entries=entries, power_limit=limit, violation_flags=flags)


def information_density(x: np.ndarray, y: np.ndarray, omega: float, p: float) -> float:
    """Information density i(x; y) in bits for the gain-sqrt(omega) channel.

    The channel is y = sqrt(omega) x + z with unit noise and Gaussian
    inputs of power p. Per symbol, with zt = y - sqrt(omega) x:

        u = C(omega p)
            + log2(e) * omega * (x^2 - p zt^2) / (2 (1 + omega p))
            + log2(e) * sqrt(omega) * x zt / (1 + omega p)

    and the density is the sum over symbols.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    omega = float(omega)
    p = float(p)
    if omega <= 0.0 or p <= 0.0:
        raise ValueError("omega and p must be positive")
    wp = omega * p
    zt = y - math.sqrt(omega) * x
    u = (
        gaussian_capacity(wp)
        + LOG2_E * omega * (x * x - p * zt * zt) / (2.0 * (1.0 + wp))
        + LOG2_E * math.sqrt(omega) * (x * zt) / (1.0 + wp)
    )
    return float(np.sum(u))


def _density_matrix(
    cb: np.ndarray, y: np.ndarray, omega: float, p: float
) -> np.ndarray:
    """Densities of every codeword against a batch of observations.

    cb has shape (B, M, L) or (M, L); y has shape (B, L). Returns
    (B, M). Evaluates the same per-symbol expression as
    information_density through the sufficient statistics sum(x^2),
    sum(x y), sum(y^2).
    """
    y = np.asarray(y, dtype=np.float64)
    cb = np.asarray(cb, dtype=np.float64)
    if cb.ndim == 2:
        sx2 = np.einsum("ml,ml->m", cb, cb, optimize=False)[None, :]
        sxy = np.einsum("ml,bl->bm", cb, y, optimize=False)
    else:
        sx2 = np.einsum("bml,bml->bm", cb, cb, optimize=False)
        sxy = np.einsum("bml,bl->bm", cb, y, optimize=False)
    sy2 = np.einsum("bl,bl->b", y, y, optimize=False)[:, None]
    sw = math.sqrt(omega)
    wp = omega * p
    sz2 = sy2 - 2.0 * sw * sxy + omega * sx2
    sxz = sxy - sw * sx2
    length = cb.shape[-1]
    return (
        length * gaussian_capacity(wp)
        + LOG2_E * omega * (sx2 - p * sz2) / (2.0 * (1.0 + wp))
        + LOG2_E * sw * sxz / (1.0 + wp)
    )


def _first_crossing(density: np.ndarray, threshold: float) -> np.ndarray:
    """Smallest index with density strictly above threshold, else -1."""
    crossed = density > threshold
    hit = crossed.any(axis=1)
    return np.where(hit, crossed.argmax(axis=1), -1)


def _decode_user2_batch(
    y2: np.ndarray,
    cb1: np.ndarray,
    cb2: np.ndarray,
    params: ChannelParams,
    n1_tilde: int,
    log_m1: float,
    log_m2: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Two-step SIC at receiver 2 for a batch of trials.

    Step 1 decodes user 1's message from the first n1_tilde symbols
    using the equivalent unit-noise channel (observation scaled by
    1/sqrt(1+p2), gain a21/(1+p2), input power p1). On a successful
    crossing the corresponding codeword is subtracted at full gain
    sqrt(a21) from all n2 symbols; with the sentinel nothing is
    subtracted. Step 2 decodes user 2's own message at gain 1.

    Returns (m1_hat, m2_hat, step1_density_row) where the density row
    is the step-1 density matrix for diagnostics.
    """
    n2 = cb2.shape[-1]
    scale = math.sqrt(1.0 + params.p2)
    w2 = params.a21 / (1.0 + params.p2)
    d1 = _density_matrix(cb1[..., :n1_tilde], y2[:, :n1_tilde] / scale, w2, params.p1)
    m1_hat = _first_crossing(d1, log_m1)

    batch = np.arange(y2.shape[0])
    if cb1.ndim == 2:
        chosen = cb1[np.maximum(m1_hat, 0), :n2]
    else:
        chosen = cb1[batch, np.maximum(m1_hat, 0), :n2]
    cancel = np.where((m1_hat >= 0)[:, None], math.sqrt(params.a21) * chosen, 0.0)
    y2_clean = y2[:, :n2] - cancel

    d2 = _density_matrix(cb2, y2_clean, 1.0, params.p2)
    m2_hat = _first_crossing(d2, log_m2)
    return m1_hat, m2_hat, d1


def _decode_user1_batch(
    y1: np.ndarray,
    cb1: np.ndarray,
    cb2: np.ndarray,
    params: ChannelParams,
    log_m1: float,
    log_m2: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Two-step SIC at receiver 1 for a batch of trials.

    Step 1 decodes user 2's message from the first n2 symbols (user 2
    is silent afterwards) on the equivalent channel with gain
    a12/(1+p1) and observation scaled by 1/sqrt(1+p1). Step 2 decodes
    user 1's own message over all n1 symbols at gain 1.

    Returns (m1_hat, m2_hat).
    """
    n2 = cb2.shape[-1]
    scale = math.sqrt(1.0 + params.p1)
    w1 = params.a12 / (1.0 + params.p1)
    d1 = _density_matrix(cb2, y1[:, :n2] / scale, w1, params.p2)
    m2_hat = _first_crossing(d1, log_m2)

    batch = np.arange(y1.shape[0])
    if cb2.ndim == 2:
        chosen = cb2[np.maximum(m2_hat, 0)]
    else:
        chosen = cb2[batch, np.maximum(m2_hat, 0)]
    cancel = np.where((m2_hat >= 0)[:, None], math.sqrt(params.a12) * chosen, 0.0)
    y1_clean = y1.copy()
    y1_clean[:, :n2] -= cancel

    d2 = _density_matrix(cb1, y1_clean, 1.0, params.p1)
    m1_hat = _first_crossing(d2, log_m1)
    return m1_hat, m2_hat


def sic_decode_user2(
    y2: np.ndarray,
    codebook1: Codebook,
    codebook2: Codebook,
    params: ChannelParams,
    n1_tilde: int,
    log_m1: float,
    log_m2: float,
) -> tuple[int, int]:
    """Single-trial SIC decode at receiver 2.

    y2 must carry at least n2 symbols; only the first n2 are read.
    Returns 0-based message estimates (m1_hat, m2_hat); -1 marks a
    threshold test that no codeword passed.
    """
    n2 = codebook2.entries.shape[1]
    n1_tilde = int(n1_tilde)
    if not (1 <= n1_tilde <= n2):
        raise ValueError(f"n1_tilde must satisfy 1 <= n1_tilde <= n2={n2}")
    y2 = np.asarray(y2, dtype=np.float64)
    if y2.ndim != 1 or y2.shape[0] < n2:
        raise ValueError(f"y2 must be a vector of at least n2={n2} symbols")
    m1_hat, m2_hat, _ = _decode_user2_batch(
        y2[None, :n2],
        codebook1.entries,
        codebook2.entries,
        params,
        n1_tilde,
        float(log_m1),
        float(log_m2),
    )
    return int(m1_hat[0]), int(m2_hat[0])


def sic_decode_user1(
    y1: np.ndarray,
    codebook1: Codebook,
    codebook2: Codebook,
    params: ChannelParams,
    log_m1: float,
    log_m2: float,
) -> tuple[int, int]:
    """Single-trial SIC decode at receiver 1; mirrors sic_decode_user2."""
    n1 = codebook1.entries.shape[1]
    y1 = np.asarray(y1, dtype=np.float64)
    if y1.ndim != 1 or y1.shape[0] != n1:
        raise ValueError(f"y1 must be a vector of n1={n1} symbols")
    m1_hat, m2_hat = _decode_user1_batch(
        y1[None, :],
        codebook1.entries,
        codebook2.entries,
        params,
        float(log_m1),
        float(log_m2),
    )
    return int(m1_hat[0]), int(m2_hat[0])


@dataclass(frozen=True)
class SimExperiment:
    """A reproducible batch of SIC decoding trials.

    log_m1 and log_m2 are integer message sizes in bits (codebooks of
    2**log_m codewords). With ed_enabled, receiver 2's first step uses
    blocklengths.n1_tilde symbols, which must be set; otherwise it
    uses the full window n2. fresh_codebooks draws new codebooks every
    trial (ensemble average); False freezes one pair for the run.
    """

    params: ChannelParams
    blocklengths: BlocklengthConfig
    log_m1: int
    log_m2: int
    trials: int
    seed: int
    ed_enabled: bool = True
    fresh_codebooks: bool = True

    def __post_init__(self) -> None:
        require_valid(self.params)
        for name in ("log_m1", "log_m2"):
            v = getattr(self, name)
            if int(v) != v or int(v) < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {v!r}")
            object.__setattr__(self, name, int(v))
        if int(self.trials) < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials!r}")
        object.__setattr__(self, "trials", int(self.trials))
        if int(self.seed) != self.seed or int(self.seed) < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))
        if self.ed_enabled and self.blocklengths.n1_tilde is None:
            raise ValueError("ed_enabled requires blocklengths.n1_tilde to be set")

    @property
    def step1_window(self) -> int:
        """Symbols receiver 2 uses for its first decoding step."""
        if self.ed_enabled:
            return int(self.blocklengths.n1_tilde)
        return self.blocklengths.n2


_COUNT_FIELDS = (
    "err_total",
    "err_user1",
    "err_user2",
    "err_sic11",
    "err_sic12",
    "err_sic21",
    "err_sic22",
    "err_sic21_outage",
    "err_sic21_confusion",
    "power_violations",
)


@dataclass(frozen=True)
class SimResult:
    """Error counts over a run; frequencies and intervals derive from them.

    err_sicKJ counts errors of receiver K's SIC step J (step 1 decodes
    the interfering message, step 2 the receiver's own). err_userK is
    the count of trials where receiver K erred in either step.
    err_total counts trials where any user's own message came out
    wrong (receiver 1's m1_hat or receiver 2's m2_hat). The step-1
    errors at receiver 2 split exactly into outage (true codeword
    under the threshold) and confusion (a smaller wrong index over
    it). power_violations counts trials where a transmitted codeword
    exceeded its power cap; breaches are transmitted, not suppressed.
    """

    experiment: SimExperiment
    trials: int
    err_total: int
    err_user1: int
    err_user2: int
    err_sic11: int
    err_sic12: int
    err_sic21: int
    err_sic22: int
    err_sic21_outage: int
    err_sic21_confusion: int
    power_violations: int

    def rate(self, field_name: str) -> float:
        return getattr(self, field_name) / self.trials

    def wilson(self, field_name: str, confidence: float = 0.95) -> tuple[float, float]:
        return wilson_interval(getattr(self, field_name), self.trials, confidence)

    def to_dict(self) -> dict:
        """Counts plus derived frequencies and 95% intervals, JSON-ready."""
        out: dict = {"trials": self.trials, "counts": {}, "rates": {}}
        for name in _COUNT_FIELDS:
            k = getattr(self, name)
            lo, hi = self.wilson(name)
            out["counts"][name] = k
            out["rates"][name] = {
                "estimate": k / self.trials,
                "wilson_lower": lo,
                "wilson_upper": hi,
            }
        return out


def wilson_interval(
    successes: int, trials: int, confidence: float = 0.95
) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    k = int(successes)
    n = int(trials)
    if n < 1 or not (0 <= k <= n):
        raise ValueError(f"need 0 <= successes <= trials, got {k}/{n}")
    if not (0.0 < confidence < 1.0):
        raise ValueError(f"confidence must lie in (0, 1), got {confidence!r}")
    z = q_inv((1.0 - confidence) / 2.0)
    phat = k / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2.0 * n)) / denom
    half = (z / denom) * math.sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n))
    return max(0.0, center - half), min(1.0, center + half)


def _chunk_trials(exp: SimExperiment) -> int:
    per_trial = (
        (1 << exp.log_m1) * exp.blocklengths.n1
        + (1 << exp.log_m2) * exp.blocklengths.n2
        + 4 * exp.blocklengths.n1
    )
    return max(1, min(_MAX_CHUNK_TRIALS, _CHUNK_SCALAR_BUDGET // per_trial))


def _fixed_codebooks(exp: SimExperiment) -> tuple[Codebook, Codebook]:
    """Codebooks for the frozen-codebook mode, from derived stream (0,)."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=exp.seed, spawn_key=(0,)))
    cb1 = generate_codebook(1 << exp.log_m1, exp.blocklengths.n1, exp.params.p1, rng)
    cb2 = generate_codebook(1 << exp.log_m2, exp.blocklengths.n2, exp.params.p2, rng)
    return cb1, cb2


def _run_chunk(
    exp: SimExperiment, chunk_index: int, count: int, fixed: tuple[Codebook, Codebook] | None
) -> dict[str, int]:
    n1 = exp.blocklengths.n1
    n2 = exp.blocklengths.n2
    m1_size = 1 << exp.log_m1
    m2_size = 1 << exp.log_m2
    p = exp.params
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=exp.seed, spawn_key=(1, chunk_index))
    )

    m1 = rng.integers(0, m1_size, size=count)
    m2 = rng.integers(0, m2_size, size=count)
    if fixed is None:
        cb1 = rng.standard_normal((count, m1_size, n1)) * math.sqrt(p.p1)
        cb2 = rng.standard_normal((count, m2_size, n2)) * math.sqrt(p.p2)
        batch = np.arange(count)
        x1 = cb1[batch, m1]
        x2 = cb2[batch, m2]
    else:
        cb1 = fixed[0].entries
        cb2 = fixed[1].entries
        x1 = cb1[m1]
        x2 = cb2[m2]
    z1 = rng.standard_normal((count, n1))
    z2 = rng.standard_normal((count, n1))

    y1, y2 = transmit(x1, x2, p, (z1, z2))
    y2 = y2[:, :n2]

    viol1 = np.einsum("bl,bl->b", x1, x1, optimize=False) > n1 * p.p1
    viol2 = np.einsum("bl,bl->b", x2, x2, optimize=False) > n2 * p.p2

    m1_hat_u2, m2_hat_u2, d1 = _decode_user2_batch(
        y2, cb1, cb2, p, exp.step1_window, float(exp.log_m1), float(exp.log_m2)
    )
    m1_hat_u1, m2_hat_u1 = _decode_user1_batch(
        y1, cb1, cb2, p, float(exp.log_m1), float(exp.log_m2)
    )

    batch = np.arange(count)
    crossed_true = d1[batch, m1] > float(exp.log_m1)
    e21 = m1_hat_u2 != m1
    outage = ~crossed_true
    confusion = crossed_true & e21
    e22 = m2_hat_u2 != m2
    e11 = m2_hat_u1 != m2
    e12 = m1_hat_u1 != m1

    return {
        "err_total": int(np.sum(e12 | e22)),
        "err_user1": int(np.sum(e11 | e12)),
        "err_user2": int(np.sum(e21 | e22)),
        "err_sic11": int(np.sum(e11)),
        "err_sic12": int(np.sum(e12)),
        "err_sic21": int(np.sum(e21)),
        "err_sic22": int(np.sum(e22)),
        "err_sic21_outage": int(np.sum(outage)),
        "err_sic21_confusion": int(np.sum(confusion)),
        "power_violations": int(np.sum(viol1 | viol2)),
    }


def run_experiment(exp: SimExperiment, *, threads: int = 1) -> SimResult:
    """Run all trials and tally error counts.

    Trials are processed in fixed-size chunks whose boundaries depend
    only on the experiment, each chunk with its own derived RNG
    stream; merging is pure addition. Results are therefore identical
    for any thread count, and threads only spread chunks over workers.
    """
    threads = max(1, int(threads))
    fixed = None if exp.fresh_codebooks else _fixed_codebooks(exp)
    chunk = _chunk_trials(exp)
    plan = [
        (idx, min(chunk, exp.trials - start))
        for idx, start in enumerate(range(0, exp.trials, chunk))
    ]

    totals = dict.fromkeys(_COUNT_FIELDS, 0)

    def accumulate(results: Iterable[dict[str, int]]) -> None:
        for counts in results:
            for name, value in counts.items():
                totals[name] += value

    if threads == 1:
        accumulate(_run_chunk(exp, idx, cnt, fixed) for idx, cnt in plan)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            accumulate(
                pool.map(lambda item: _run_chunk(exp, item[0], item[1], fixed), plan)
            )

    return SimResult(experiment=exp, trials=exp.trials, **totals)
