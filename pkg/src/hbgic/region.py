"""Second-order rate region and latency sweeps.

After successful interference cancellation each user sees a clean
point-to-point Gaussian channel, so the corner of the region is a pair
of normal-approximation rates. The Pareto frontier is traced with a
rate profile: maximize a scale R subject to R1 >= omega*R and
R2 >= (1-omega)*R, the early-decoding length fitting inside n2, and a
valid split of the total error budget.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .budget import ErrorBudget, split_grid, symmetric_split, validate_budget
from .channel import BlocklengthConfig, ChannelParams, require_valid
from .early_decoding import EdQuery, min_ed_length
from .fbl import gaussian_capacity, normal_approx_rate


@dataclass(frozen=True)
class RatePoint:
    """A pair of per-user rates in bits per channel use, both >= 0."""

    r1: float
    r2: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "r1", max(0.0, float(self.r1)))
        object.__setattr__(self, "r2", max(0.0, float(self.r2)))


def first_order_corner(params: ChannelParams) -> RatePoint:
    """Asymptotic corner (C(P1), C(P2)): interference-free capacities."""
    require_valid(params)
    return RatePoint(gaussian_capacity(params.p1), gaussian_capacity(params.p2))


def second_order_point(
    params: ChannelParams,
    blocklengths: BlocklengthConfig,
    budget: ErrorBudget,
) -> RatePoint:
    """Corner of the finite-blocklength region for one budget split.

    Each user backs off its own-link capacity by the dispersion term at
    its own blocklength and step-2 budget. Negative values clamp to 0.
    """
    require_valid(params)
    report = validate_budget(budget)
    if not report.ok:
        raise ValueError("invalid error budget: " + "; ".join(report.violations))
    r1 = normal_approx_rate(blocklengths.n1, params.p1, budget.eps_12)
    r2 = normal_approx_rate(blocklengths.n2, params.p2, budget.eps_22)
    return RatePoint(r1, r2)


def _default_omega_grid(count: int = 101) -> tuple[float, ...]:
    return tuple(i / (count - 1) for i in range(count))


@dataclass(frozen=True)
class SweepConfig:
    """Inputs of a region sweep over the rate-profile parameter."""

    params: ChannelParams
    blocklengths: BlocklengthConfig
    eps_total: float
    omega_grid: tuple[float, ...] = field(default_factory=_default_omega_grid)
    split_resolution: int = 1
    rate_tolerance: float = 1e-4

    def __post_init__(self) -> None:
        e = float(self.eps_total)
        if not (0.0 < e < 1.0):
            raise ValueError(f"eps_total must lie strictly in (0, 1), got {e!r}")
        object.__setattr__(self, "eps_total", e)
        grid = tuple(float(w) for w in self.omega_grid)
        if not grid:
            raise ValueError("omega_grid must be nonempty")
        if any(not (0.0 <= w <= 1.0) for w in grid):
            raise ValueError("omega_grid values must lie in [0, 1]")
        if any(b < a for a, b in zip(grid, grid[1:])):
            raise ValueError("omega_grid must be sorted ascending")
        object.__setattr__(self, "omega_grid", grid)
        if int(self.split_resolution) < 1:
            raise ValueError("split_resolution must be >= 1")
        object.__setattr__(self, "split_resolution", int(self.split_resolution))
        if not (float(self.rate_tolerance) > 0.0):
            raise ValueError("rate_tolerance must be positive")
        object.__setattr__(self, "rate_tolerance", float(self.rate_tolerance))


@dataclass(frozen=True)
class ProfileResult:
    """Outcome of maximizing the rate scale at one profile point omega."""

    omega: float
    rate_scale: float
    point: RatePoint
    budget: ErrorBudget
    n1_tilde: int | None
    feasible: bool


@dataclass(frozen=True)
class RegionSweep:
    config: SweepConfig
    corner: RatePoint
    points: tuple[ProfileResult, ...]


def _budget_candidates(cfg: SweepConfig) -> list[ErrorBudget]:
    """Budgets searched per profile point: symmetric step splits on top
    of a log-spaced grid over the user-level split."""
    if cfg.split_resolution == 1:
        return [ErrorBudget.symmetric(cfg.eps_total)]
    pairs = split_grid(cfg.eps_total, cfg.split_resolution)
    return [
        ErrorBudget.from_user_split(cfg.eps_total, e1, e2) for e1, e2 in pairs
    ]


def _profile_feasible(
    omega: float,
    rate_scale: float,
    cfg: SweepConfig,
    budget: ErrorBudget,
) -> tuple[bool, int | None]:
    """Check one (omega, R, budget) candidate; returns (ok, n1_tilde)."""
    share1 = omega * rate_scale
    share2 = (1.0 - omega) * rate_scale
    point = second_order_point(cfg.params, cfg.blocklengths, budget)
    if share1 > 0.0 and point.r1 < share1:
        return False, None
    if share2 > 0.0 and point.r2 < share2:
        return False, None
    query = EdQuery(
        params=cfg.params,
        n1=cfg.blocklengths.n1,
        log_m1=cfg.blocklengths.n1 * share1,
        eps_21=budget.eps_21,
    )
    nt = min_ed_length(query)
    if nt > cfg.blocklengths.n2:
        return False, None
    return True, nt


def rate_profile_max(omega: float, cfg: SweepConfig) -> ProfileResult:
    """Maximize R subject to R1 >= omega*R, R2 >= (1-omega)*R.

    Feasibility of a candidate R is checked against every budget in the
    split grid; the early-decoding payload is tied to the profile via
    log_m1 = n1 * omega * R. Feasibility is monotone decreasing in R,
    so a bisection down to rate_tolerance finds the boundary. When not
    even R = 0 passes (early decoding fails at zero payload for every
    budget) the result carries feasible=False.
    """
    omega = float(omega)
    if not (0.0 <= omega <= 1.0):
        raise ValueError(f"omega must lie in [0, 1], got {omega!r}")
    require_valid(cfg.params)
    corner = first_order_corner(cfg.params)
    budgets = _budget_candidates(cfg)

    def best_over_budgets(rate_scale: float) -> tuple[bool, ErrorBudget, int | None]:
        for b in budgets:
            ok, nt = _profile_feasible(omega, rate_scale, cfg, b)
            if ok:
                return True, b, nt
        return False, budgets[0], None

    ok0, budget0, nt0 = best_over_budgets(0.0)
    if not ok0:
        return ProfileResult(
            omega=omega,
            rate_scale=0.0,
            point=RatePoint(0.0, 0.0),
            budget=budget0,
            n1_tilde=None,
            feasible=False,
        )

    lo, lo_budget, lo_nt = 0.0, budget0, nt0
    hi = 2.0 * max(corner.r1, corner.r2) + 1.0
    while hi - lo > cfg.rate_tolerance:
        mid = 0.5 * (lo + hi)
        ok, b, nt = best_over_budgets(mid)
        if ok:
            lo, lo_budget, lo_nt = mid, b, nt
        else:
            hi = mid
    return ProfileResult(
        omega=omega,
        rate_scale=lo,
        point=RatePoint(omega * lo, (1.0 - omega) * lo),
        budget=lo_budget,
        n1_tilde=lo_nt,
        feasible=True,
    )


def region_sweep(cfg: SweepConfig, *, threads: int = 1) -> RegionSweep:
    """Trace the frontier over cfg.omega_grid.

    Profile points are independent, so they fan out across a thread
    pool; results come back in grid order regardless of thread count.
    """
    require_valid(cfg.params)
    corner = first_order_corner(cfg.params)
    threads = max(1, int(threads))
    if threads == 1:
        points = tuple(rate_profile_max(w, cfg) for w in cfg.omega_grid)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = tuple(pool.map(lambda w: rate_profile_max(w, cfg), cfg.omega_grid))
    return RegionSweep(config=cfg, corner=corner, points=points)


@dataclass(frozen=True)
class LatencyRow:
    """One early-decoding latency entry: how much sooner than n1."""

    n1: int
    a21: float
    n1_tilde: int
    reduction: int
    feasible: bool


def latency_sweep(
    a21_values: list[float] | tuple[float, ...],
    p1: float,
    p2: float,
    n1_values: list[int] | tuple[int, ...],
    eps_21: float,
    log_m1: float = 0.0,
) -> list[LatencyRow]:
    """Minimum early-decoding length across a grid of cross gains.

    Only the receiver-2 side of the channel enters, so the grid needs
    just a21 with the two powers; a21 >= 1 + p2 must hold at every grid
    point. Rows are sorted by (n1, a21). A row is feasible when the
    early-decoding length does not exceed n1 itself (the reduction is
    nonnegative); infeasible rows are kept and flagged.
    """
    rows: list[LatencyRow] = []
    for n1 in sorted(int(n) for n in n1_values):
        for a21 in sorted(float(a) for a in a21_values):
            # a12 plays no role in the early-decoding length; any value
            # satisfying the dataclass basics works as a placeholder.
            params = ChannelParams(a12=0.0, a21=a21, p1=p1, p2=p2)
            query = EdQuery(params=params, n1=n1, log_m1=log_m1, eps_21=eps_21)
            nt = min_ed_length(query)
            rows.append(
                LatencyRow(
                    n1=n1,
                    a21=a21,
                    n1_tilde=nt,
                    reduction=n1 - nt,
                    feasible=nt <= n1,
                )
            )
    return rows
