"""Delimited output, JSON documents, and figure rendering.

CSV files start with a single comment line carrying the resolved run
configuration as JSON, then a mandatory header row. Floats are printed
with 17 significant digits so re-parsing reproduces the original
values bit for bit. JSON documents are serialized with sorted keys and
fixed indentation, making byte-identical output a function of the
values alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .region import LatencyRow, RegionSweep

SCHEMA_VERSION = 1

REGION_COLUMNS = (
    "omega",
    "r1",
    "r2",
    "eps_11",
    "eps_12",
    "eps_21",
    "eps_22",
    "n1_tilde",
    "feasible",
)

LATENCY_COLUMNS = ("n1", "a21", "n1_tilde", "reduction", "feasible")


def format_value(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _parse_value(s: str) -> Any:
    if s == "":
        return None
    if s == "true":
        return True
    if s == "false":
        return False
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def render_csv(
    columns: Sequence[str], rows: Iterable[dict[str, Any]], config: dict | None
) -> str:
    lines = []
    if config is not None:
        lines.append("# config: " + json.dumps(config, sort_keys=True))
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CsvDocument:
    config: dict | None
    columns: tuple[str, ...]
    rows: tuple[dict[str, Any], ...]


def parse_csv(text: str) -> CsvDocument:
    """Parse CSV produced by render_csv, recovering config and typed rows."""
    config = None
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if lines and lines[0].startswith("# config: "):
        config = json.loads(lines[0][len("# config: ") :])
        lines = lines[1:]
    if not lines:
        raise ValueError("CSV document has no header row")
    columns = tuple(lines[0].split(","))
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(columns):
            raise ValueError(f"row has {len(cells)} cells, expected {len(columns)}")
        rows.append({c: _parse_value(s) for c, s in zip(columns, cells)})
    return CsvDocument(config=config, columns=columns, rows=tuple(rows))


def render_json(document: dict) -> str:
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def region_rows(sweep: RegionSweep) -> list[dict[str, Any]]:
    rows = []
    for pt in sweep.points:
        rows.append(
            {
                "omega": pt.omega,
                "r1": pt.point.r1,
                "r2": pt.point.r2,
                "eps_11": pt.budget.eps_11,
                "eps_12": pt.budget.eps_12,
                "eps_21": pt.budget.eps_21,
                "eps_22": pt.budget.eps_22,
                "n1_tilde": pt.n1_tilde,
                "feasible": pt.feasible,
            }
        )
    return rows


def region_document(sweep: RegionSweep, config: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "corner": {"r1": sweep.corner.r1, "r2": sweep.corner.r2},
        "points": region_rows(sweep),
    }


def latency_rows(rows: Iterable[LatencyRow]) -> list[dict[str, Any]]:
    return [
        {
            "n1": r.n1,
            "a21": r.a21,
            "n1_tilde": r.n1_tilde,
            "reduction": r.reduction,
            "feasible": r.feasible,
        }
        for r in rows
    ]


def latency_document(rows: Iterable[LatencyRow], config: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "rows": latency_rows(rows),
    }


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------


def plot_region(sweep: RegionSweep, path: str) -> None:
    """Frontier of feasible profile points with the asymptotic corner."""
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    feas = [p for p in sweep.points if p.feasible]
    ax.plot(
        [p.point.r1 for p in feas],
        [p.point.r2 for p in feas],
        "-",
        lw=1.5,
        label="second-order frontier",
    )
    c = sweep.corner
    ax.plot(
        [0.0, c.r1, c.r1], [c.r2, c.r2, 0.0], "k--", lw=1.0, label="first-order corner"
    )
    ax.set_xlabel("R1 (bits/use)")
    ax.set_ylabel("R2 (bits/use)")
    ax.set_xlim(left=0.0)
    ax.set_ylim(bottom=0.0)
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_latency(rows: Sequence[LatencyRow], path: str) -> None:
    """Latency reduction n1 - n1_tilde against the cross gain, per n1."""
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    for n1 in sorted({r.n1 for r in rows}):
        sub = [r for r in rows if r.n1 == n1]
        ax.semilogx(
            [r.a21 for r in sub],
            [r.reduction for r in sub],
            "-",
            lw=1.5,
            label=f"n1 = {n1}",
        )
    ax.set_xlabel("cross gain a21 (linear)")
    ax.set_ylabel("latency reduction (symbols)")
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
