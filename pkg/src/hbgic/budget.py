"""Error-budget algebra for two-user successive interference cancellation.

Each receiver decodes in two steps; step errors a and b compose as
1 - (1-a)(1-b) = a + b - a*b. A system budget eps_total is split into
per-user budgets (eps_1, eps_2), each of which is split again across
the user's two SIC steps. All probabilities live strictly inside (0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def _check_open_unit(x: float, name: str) -> float:
    x = float(x)
    if not (0.0 < x < 1.0):
        raise ValueError(f"{name} must lie strictly in (0, 1), got {x!r}")
    return x


def combine(a: float, b: float) -> float:
    """Error probability of two independent stages: a + b - a*b."""
    a = _check_open_unit(a, "a")
    b = _check_open_unit(b, "b")
    return a + b - a * b


def symmetric_split(eps: float) -> float:
    """The x with combine(x, x) = eps, i.e. x = 1 - sqrt(1 - eps).

    Computed as eps / (1 + sqrt(1 - eps)) to avoid cancellation for
    small eps.
    """
    eps = _check_open_unit(eps, "eps")
    return eps / (1.0 + math.sqrt(1.0 - eps))


def split_grid(eps: float, k: int) -> list[tuple[float, float]]:
    """k splits (a, b) of eps with combine(a, b) = eps exactly.

    The ratio a/b runs over a log-spaced grid from 1e-3 to 1e3, so the
    grid covers budget allocations heavily favoring either stage. For
    k = 1 the grid degenerates to the symmetric split. Pairs come back
    ordered by strictly increasing a.
    """
    eps = _check_open_unit(eps, "eps")
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k == 1:
        exponents = [0.0]
    else:
        exponents = [-3.0 + 6.0 * i / (k - 1) for i in range(k)]
    out = []
    for e in exponents:
        r = 10.0**e
        # a = r*b and a + b - a*b = eps give r*b^2 - (1+r)*b + eps = 0;
        # the stable small root keeps combine exact to roundoff.
        disc = math.sqrt((1.0 + r) ** 2 - 4.0 * r * eps)
        b = 2.0 * eps / ((1.0 + r) + disc)
        a = r * b
        out.append((a, b))
    return out


@dataclass(frozen=True)
class ErrorBudget:
    """Target error probabilities for the full SIC chain.

    eps_kj is the budget for receiver k at SIC step j: step 1 decodes
    the interfering user's message, step 2 the receiver's own message.
    """

    eps_total: float
    eps_1: float
    eps_2: float
    eps_11: float
    eps_12: float
    eps_21: float
    eps_22: float

    def __post_init__(self) -> None:
        for name in (
            "eps_total",
            "eps_1",
            "eps_2",
            "eps_11",
            "eps_12",
            "eps_21",
            "eps_22",
        ):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)

    @classmethod
    def symmetric(cls, eps_total: float) -> "ErrorBudget":
        """Symmetric splits at every level."""
        e_user = symmetric_split(eps_total)
        e_step = symmetric_split(e_user)
        return cls(
            eps_total=eps_total,
            eps_1=e_user,
            eps_2=e_user,
            eps_11=e_step,
            eps_12=e_step,
            eps_21=e_step,
            eps_22=e_step,
        )

    @classmethod
    def from_user_split(
        cls, eps_total: float, eps_1: float, eps_2: float
    ) -> "ErrorBudget":
        """Given per-user budgets, split each user symmetrically across steps."""
        return cls(
            eps_total=eps_total,
            eps_1=eps_1,
            eps_2=eps_2,
            eps_11=symmetric_split(eps_1),
            eps_12=symmetric_split(eps_1),
            eps_21=symmetric_split(eps_2),
            eps_22=symmetric_split(eps_2),
        )


@dataclass(frozen=True)
class BudgetReport:
    ok: bool
    violations: tuple[str, ...]


# The slack tolerance absorbs roundoff from the closed-form splits; the
# composition inequalities are meant to hold up to floating error, not
# to reject budgets built by symmetric_split itself.
_TOL = 1e-12


def validate_budget(budget: ErrorBudget) -> BudgetReport:
    """Check range and composition constraints, reporting every failure.

    Composition requires each user's two step budgets to fit inside the
    user budget and the two user budgets to fit inside the total:
    combine(eps_k1, eps_k2) <= eps_k and combine(eps_1, eps_2) <= eps_total.
    """
    bad: list[str] = []
    fields = {
        "eps_total": budget.eps_total,
        "eps_1": budget.eps_1,
        "eps_2": budget.eps_2,
        "eps_11": budget.eps_11,
        "eps_12": budget.eps_12,
        "eps_21": budget.eps_21,
        "eps_22": budget.eps_22,
    }
    in_range = True
    for name, v in fields.items():
        if not (0.0 < v < 1.0):
            bad.append(f"open interval: {name} outside (0, 1)")
            in_range = False
    if in_range:
        if combine(budget.eps_11, budget.eps_12) > budget.eps_1 + _TOL:
            bad.append("user 1 step budgets: combine(eps_11, eps_12) > eps_1")
        if combine(budget.eps_21, budget.eps_22) > budget.eps_2 + _TOL:
            bad.append("user 2 step budgets: combine(eps_21, eps_22) > eps_2")
        if combine(budget.eps_1, budget.eps_2) > budget.eps_total + _TOL:
            bad.append("total budget: combine(eps_1, eps_2) > eps_total")
    return BudgetReport(ok=not bad, violations=tuple(bad))
