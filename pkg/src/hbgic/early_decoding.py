"""Early decoding of the long codeword at the short-blocklength receiver.

Receiver 2 observes only n2 < n1 symbols of user 1's codeword. Under
very strong interference it can decode that codeword from a prefix of
length n1_tilde <= n2, cancel it, and then decode its own message.
This module computes the minimum prefix length guaranteeing a step-1
error probability target, the largest message size that still fits,
and the constituent terms of the underlying achievability bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import ChannelParams, effective_sic_snr
from .fbl import LOG2_E, gaussian_capacity, q_func, q_inv

# Real-valued bounds within this distance of an integer are treated as
# hitting it exactly, so the ceiling is immune to last-ulp noise from
# the closed-form inversion in max_log_m1.
_INT_SNAP = 1e-9


@dataclass(frozen=True)
class EdQuery:
    """One early-decoding question: channel, blocklength, payload, budget."""

    params: ChannelParams
    n1: int
    log_m1: float
    eps_21: float

    def __post_init__(self) -> None:
        if int(self.n1) != self.n1 or self.n1 < 1:
            raise ValueError(f"n1 must be a positive integer, got {self.n1!r}")
        object.__setattr__(self, "n1", int(self.n1))
        lm = float(self.log_m1)
        if not math.isfinite(lm) or lm < 0.0:
            raise ValueError(f"log_m1 must be finite and >= 0, got {lm!r}")
        object.__setattr__(self, "log_m1", lm)
        e = float(self.eps_21)
        if not (0.0 < e < 1.0):
            raise ValueError(f"eps_21 must lie strictly in (0, 1), got {e!r}")
        object.__setattr__(self, "eps_21", e)


@dataclass(frozen=True)
class EdBound:
    """Minimum early-decoding length with its real-valued decomposition.

    n1_tilde = max(1, ceil(raw)) where raw = tail_term + payload_term.
    tail_term carries the dispersion penalty and scales with sqrt(n1);
    payload_term is log_m1 divided by the per-symbol rate margin.
    tail_nonpositive flags budgets of 1/2 or more, where the Gaussian
    quantile stops penalizing and the tail term loses meaning.
    """

    n1_tilde: int
    raw: float
    tail_term: float
    payload_term: float
    tail_nonpositive: bool


def _snap_ceil(x: float) -> int:
    nearest = round(x)
    if abs(x - nearest) <= _INT_SNAP:
        return int(nearest)
    return int(math.ceil(x))


def _tail_coefficient(snr: float, eps: float) -> float:
    """Multiplier of sqrt(n1) in the minimum-length bound."""
    c = gaussian_capacity(snr)
    num = LOG2_E * math.sqrt(4.0 * snr + 2.0 * snr * snr) * q_inv(eps)
    den = 2.0 * (1.0 + snr) * c - LOG2_E * snr
    return num / den


def _payload_denominator(snr: float) -> float:
    """Per-symbol margin C(snr) - snr*log2(e)/(2(1+snr)); positive for snr > 0."""
    return gaussian_capacity(snr) - snr * LOG2_E / (2.0 * (1.0 + snr))


def ed_bound(query: EdQuery, *, residual: float = 0.0) -> EdBound:
    """Evaluate the minimum early-decoding length bound.

    Args:
        query: channel, user-1 blocklength, payload size, error budget.
        residual: amount subtracted from eps_21 before inverting the
            Gaussian tail. Zero evaluates the bound as stated; passing
            the achievability residual (see dt_bound_terms) gives the
            strict variant.

    Returns:
        EdBound with the integer length (clamped to at least 1).

    Raises:
        ValueError: when residual consumes the whole step budget.
        ArithmeticError: when intermediates overflow to non-finite.
    """
    eps = query.eps_21 - float(residual)
    if not (0.0 < eps < 1.0):
        raise ValueError(
            f"residual {residual!r} leaves no usable budget from eps_21={query.eps_21!r}"
        )
    snr = effective_sic_snr(query.params)
    if snr <= 0.0:
        raise ValueError("effective SIC snr must be positive")
    tail = _tail_coefficient(snr, eps) * math.sqrt(query.n1)
    payload = query.log_m1 / _payload_denominator(snr)
    raw = tail + payload
    if not math.isfinite(raw):
        raise ArithmeticError(
            f"non-finite early-decoding bound for snr={snr!r}, n1={query.n1}"
        )
    return EdBound(
        n1_tilde=max(1, _snap_ceil(raw)),
        raw=raw,
        tail_term=tail,
        payload_term=payload,
        tail_nonpositive=eps >= 0.5,
    )


def min_ed_length(query: EdQuery, *, residual: float = 0.0) -> int:
    """Minimum number of symbols receiver 2 needs to decode user 1 early."""
    return ed_bound(query, residual=residual).n1_tilde


@dataclass(frozen=True)
class EdFeasibility:
    """Whether the early-decoding length fits inside receiver 2's window."""

    feasible: bool
    margin: int | None
    n1_tilde: int | None


def ed_feasible(query: EdQuery, n2: int, *, strict: bool = False) -> EdFeasibility:
    """Check n1_tilde <= n2, reporting the slack margin n2 - n1_tilde.

    With strict=True the step budget is first reduced by the
    achievability residual lambda evaluated at window n2; a residual
    at or above eps_21 makes the strict check unconditionally fail.
    """
    n2 = int(n2)
    if not (1 <= n2 < query.n1):
        raise ValueError(f"n2 must satisfy 1 <= n2 < n1={query.n1}, got {n2}")
    residual = 0.0
    if strict:
        terms = dt_bound_terms(query.params, query.n1, n2, query.log_m1)
        residual = terms.lam
        if residual >= query.eps_21:
            return EdFeasibility(feasible=False, margin=None, n1_tilde=None)
    nt = min_ed_length(query, residual=residual)
    return EdFeasibility(feasible=nt <= n2, margin=n2 - nt, n1_tilde=nt)


@dataclass(frozen=True)
class MaxPayload:
    """Largest early-decodable payload; log_m1 = 0 when even that fails."""

    log_m1: float
    feasible: bool


def max_log_m1(
    params: ChannelParams, n1: int, n2: int, eps_21: float
) -> MaxPayload:
    """Invert the minimum-length bound at n1_tilde = n2.

    Returns the largest log_m1 >= 0 (bits) for which early decoding is
    feasible within n2 symbols. The inverse is exact up to rounding:
    plugging the result back into min_ed_length lands at or below n2,
    and one more bit pushes past it whenever the payload term moves by
    at least one symbol.
    """
    query0 = EdQuery(params=params, n1=n1, log_m1=0.0, eps_21=eps_21)
    n2 = int(n2)
    if not (1 <= n2 < query0.n1):
        raise ValueError(f"n2 must satisfy 1 <= n2 < n1={n1}, got {n2}")
    bound0 = ed_bound(query0)
    headroom = n2 - bound0.tail_term
    if headroom < 0.0:
        return MaxPayload(log_m1=0.0, feasible=False)
    snr = effective_sic_snr(params)
    lm = headroom * _payload_denominator(snr)
    return MaxPayload(log_m1=max(0.0, lm), feasible=True)


@dataclass(frozen=True)
class DtBoundTerms:
    """Pieces of the step-1 achievability bound at window length n2.

    q_term + 6*b0 bounds the outage contribution (true codeword below
    threshold); b1 bounds confusion with lower-indexed codewords. The
    residual lam = 6*b0 + b1 is what a strict budget must absorb on
    top of the Gaussian tail. b0 is the raw third-moment sum, linear
    in n2, so the bound is informative only where b0 is small.
    """

    b0: float
    b1: float
    d1: float
    gamma: float
    q_term: float
    lam: float


def dt_bound_terms(
    params: ChannelParams,
    n1: int,
    n2: int,
    log_m1: float,
    *,
    extra_residual: float = 0.0,
) -> DtBoundTerms:
    """Evaluate the early-decoding bound terms for a window of n2 symbols.

    Args:
        params: channel description (only the receiver-2 side enters).
        n1: user-1 blocklength; must exceed n2. It does not appear in
            the terms themselves but pins the configuration the bound
            belongs to.
        n2: window length receiver 2 decodes from.
        log_m1: user-1 payload in bits.
        extra_residual: optional additional residual folded into lam
            for callers that track further correction terms.
    """
    n1 = int(n1)
    n2 = int(n2)
    if not (1 <= n2 < n1):
        raise ValueError(f"window must satisfy 1 <= n2 < n1, got n1={n1} n2={n2}")
    log_m1 = float(log_m1)
    if not math.isfinite(log_m1) or log_m1 < 0.0:
        raise ValueError(f"log_m1 must be finite and >= 0, got {log_m1!r}")

    p1 = params.p1
    omega2 = params.a21 / (1.0 + params.p2)
    snr = effective_sic_snr(params)
    c = gaussian_capacity(snr)

    # third absolute moment of a centered Gaussian codeword symbol
    third_moment = 2.0 * math.sqrt(2.0 / math.pi) * p1**1.5
    per_symbol = (LOG2_E * math.sqrt(omega2) / (1.0 + snr)) ** 3 * (
        2.0 * third_moment + 8.0 * (math.sqrt(omega2) * p1) ** 3
    )
    b0 = 4.0 * n2 * per_symbol

    d1 = math.sqrt(omega2) / (1.0 + snr)
    b1 = 2.0 * (
        math.log(2.0) / math.sqrt(math.pi * d1 * d1 * p1 * p1 * omega2 * n2)
        + 12.0 * b0
    )

    gamma = (
        2.0 * (1.0 + snr) * (n2 * c - log_m1) - LOG2_E * snr * n2
    ) / (LOG2_E * math.sqrt(n2) * math.sqrt(4.0 * snr + 2.0 * snr * snr))

    lam = 6.0 * b0 + b1 + float(extra_residual)
    return DtBoundTerms(
        b0=b0, b1=b1, d1=d1, gamma=gamma, q_term=q_func(gamma), lam=lam
    )
