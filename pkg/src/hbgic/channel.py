"""Two-user Gaussian interference channel in standard form.

User 1 transmits for n1 channel uses, user 2 only for the first
n2 < n1 uses. Cross gains a12 (user 2 seen at receiver 1) and a21
(user 1 seen at receiver 2) are linear power gains. The very strong
interference regime requires a21 >= 1 + P2 and a12 >= 1 + P1, with
a21 > a12 fixing which cross link is the stronger one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelParams:
    """Static channel description: cross gains and transmit power limits."""

    a12: float
    a21: float
    p1: float
    p2: float

    def __post_init__(self) -> None:
        for name in ("a12", "a21", "p1", "p2"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.a12 < 0.0 or self.a21 < 0.0:
            raise ValueError("cross gains a12, a21 must be nonnegative")
        if self.p1 <= 0.0 or self.p2 <= 0.0:
            raise ValueError("power limits p1, p2 must be positive")


@dataclass(frozen=True)
class BlocklengthConfig:
    """Blocklengths of the two users, plus an optional early-decoding point.

    n1 is the longer blocklength (user 1), n2 the shorter (user 2).
    n1_tilde, when set, is the number of symbols receiver 2 uses to
    decode user 1's codeword ahead of time; it must not exceed n2.
    """

    n1: int
    n2: int
    n1_tilde: int | None = None

    def __post_init__(self) -> None:
        if int(self.n1) != self.n1 or int(self.n2) != self.n2:
            raise ValueError("blocklengths must be integers")
        object.__setattr__(self, "n1", int(self.n1))
        object.__setattr__(self, "n2", int(self.n2))
        if self.n2 < 1:
            raise ValueError(f"n2 must be >= 1, got {self.n2}")
        if self.n1 <= self.n2:
            raise ValueError(
                f"heterogeneous blocklengths require n1 > n2, got n1={self.n1} n2={self.n2}"
            )
        if self.n1_tilde is not None:
            nt = int(self.n1_tilde)
            object.__setattr__(self, "n1_tilde", nt)
            if not (1 <= nt <= self.n2):
                raise ValueError(
                    f"n1_tilde must satisfy 1 <= n1_tilde <= n2, got {nt} with n2={self.n2}"
                )


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking the interference-regime inequalities."""

    ok: bool
    violations: tuple[str, ...]


# Constraint labels double as report entries; they name the inequality
# that failed rather than raising, so callers can present all problems
# at once.
_CONSTRAINTS = (
    ("a21 >= 1 + p2", lambda p: p.a21 >= 1.0 + p.p2),
    ("a12 >= 1 + p1", lambda p: p.a12 >= 1.0 + p.p1),
    ("a21 > a12", lambda p: p.a21 > p.a12),
)


def validate(params: ChannelParams) -> ValidationReport:
    """Check the very-strong-interference inequalities, reporting all failures."""
    bad = tuple(label for label, pred in _CONSTRAINTS if not pred(params))
    return ValidationReport(ok=not bad, violations=bad)


def require_valid(params: ChannelParams) -> None:
    """Raise ValueError when params violate the interference regime."""
    report = validate(params)
    if not report.ok:
        raise ValueError(
            "channel parameters outside the very strong interference regime: "
            + "; ".join(report.violations)
        )


def effective_sic_snr(params: ChannelParams) -> float:
    """Equivalent SNR seen by receiver 2 when decoding user 1 first.

    Treating user 2's own signal as part of the noise floor and
    rescaling to unit noise power turns the cross link into a clean
    AWGN channel with SNR a21 * p1 / (1 + p2).

    Only the receiver-2 side condition a21 >= 1 + p2 is required here;
    the a12-side inequalities do not enter this quantity.
    """
    if params.a21 < 1.0 + params.p2:
        raise ValueError(
            f"early decoding at receiver 2 requires a21 >= 1 + p2, "
            f"got a21={params.a21} with p2={params.p2}"
        )
    return params.a21 / (1.0 + params.p2) * params.p1


def transmit(
    x1: np.ndarray,
    x2: np.ndarray,
    params: ChannelParams,
    noise: tuple[np.ndarray, np.ndarray],
) -> tuple[np.ndarray, np.ndarray]:
    """Push codewords through the standard-form channel.

    Args:
        x1: user 1 codeword, shape (..., n1).
        x2: user 2 codeword, shape (..., n2) with n2 < n1. User 2 is
            silent for symbols beyond n2.
        params: channel gains and powers (gains used here, powers not).
        noise: pair (z1, z2) of standard-normal arrays, each (..., n1).

    Returns:
        (y1, y2): receiver observations, each of shape (..., n1).
        For j <= n2:  y1 = x1 + sqrt(a12) x2 + z1,
                      y2 = x2 + sqrt(a21) x1 + z2.
        For j > n2:   y1 = x1 + z1,  y2 = sqrt(a21) x1 + z2.

    Leading batch dimensions broadcast; the Monte Carlo path feeds
    whole blocks of trials through in one call.
    """
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    z1, z2 = (np.asarray(z, dtype=np.float64) for z in noise)
    n1 = x1.shape[-1]
    n2 = x2.shape[-1]
    if not n2 < n1:
        raise ValueError(f"x2 must be shorter than x1, got n1={n1} n2={n2}")
    if z1.shape[-1] != n1 or z2.shape[-1] != n1:
        raise ValueError("noise vectors must have length n1")

    y1 = x1 + z1
    y2 = math.sqrt(params.a21) * x1 + z2
    y1[..., :n2] += math.sqrt(params.a12) * x2
    y2[..., :n2] += x2
    return y1, y2
