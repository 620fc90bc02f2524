"""Command-line interface.

Subcommands: p2p-rate, ed-min, latency, region, simulate. Each accepts
a JSON config file via --config and/or inline flags; flags override
file values. Gains, powers, and SNRs are linear unless the value
carries a db suffix ("15db"). Every output embeds the fully resolved
configuration.

Exit codes: 0 on success (including infeasible results), 2 on
validation or parse errors, 3 on internal numeric failures.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any

from . import reporting
from .budget import ErrorBudget
from .channel import BlocklengthConfig, ChannelParams
from .early_decoding import EdQuery, ed_bound
from .fbl import normal_approx_rate
from .region import SweepConfig, latency_sweep, region_sweep
from .simulate import SimExperiment, run_experiment

SCHEMA_VERSION = 1


def _linear_value(s: str | float | int) -> float:
    """Parse a linear quantity, converting a trailing 'db' suffix."""
    if isinstance(s, (int, float)) and not isinstance(s, bool):
        return float(s)
    t = str(s).strip().lower()
    if t.endswith("db"):
        return 10.0 ** (float(t[:-2]) / 10.0)
    return float(t)


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as e:
        raise ValueError(
            f"malformed JSON in {path}: line {e.lineno} column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(cfg, dict):
        raise ValueError(f"config root in {path} must be a JSON object")
    version = cfg.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(
            f"config {path} must declare schema_version {SCHEMA_VERSION}, got {version!r}"
        )
    return cfg


def _reject_unknown(cfg: dict, allowed: dict, context: str = "config") -> None:
    """Reject keys outside the schema; nested dicts check recursively."""
    for key, value in cfg.items():
        if key not in allowed:
            raise ValueError(f"unknown field {key!r} in {context}")
        sub = allowed[key]
        if isinstance(sub, dict):
            if not isinstance(value, dict):
                raise ValueError(f"field {key!r} in {context} must be an object")
            _reject_unknown(value, sub, f"{context}.{key}")


def _merge_flag(cfg: dict, path: tuple[str, ...], value: Any) -> None:
    if value is None:
        return
    node = cfg
    for key in path[:-1]:
        node = node.setdefault(key, {})
    node[path[-1]] = value


def _require(cfg: dict, path: tuple[str, ...]) -> Any:
    node: Any = cfg
    for key in path:
        if not isinstance(node, dict) or key not in node:
            raise ValueError(f"missing required field {'.'.join(path)!r}")
        node = node[key]
    return node


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _check_finite(label: str, *values: float) -> None:
    for v in values:
        if isinstance(v, float) and not math.isfinite(v):
            raise ArithmeticError(f"{label} produced a non-finite value")


def _channel_from(cfg: dict, require_a12: bool) -> ChannelParams:
    ch = cfg.get("channel", {})
    a21 = _linear_value(_require(cfg, ("channel", "a21")))
    p1 = _linear_value(_require(cfg, ("channel", "p1")))
    p2 = _linear_value(_require(cfg, ("channel", "p2")))
    if require_a12 or "a12" in ch:
        a12 = _linear_value(_require(cfg, ("channel", "a12")))
    else:
        a12 = 0.0
    return ChannelParams(a12=a12, a21=a21, p1=p1, p2=p2)


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_p2p_rate(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config) if args.config else {"schema_version": SCHEMA_VERSION}
    _reject_unknown(cfg, {"schema_version": None, "n": None, "snr": None, "eps": None})
    _merge_flag(cfg, ("n",), args.n)
    _merge_flag(cfg, ("snr",), args.snr)
    _merge_flag(cfg, ("eps",), args.eps)
    n = int(_require(cfg, ("n",)))
    snr = _linear_value(_require(cfg, ("snr",)))
    eps = float(_require(cfg, ("eps",)))

    rate = normal_approx_rate(n, snr, eps)
    _check_finite("p2p-rate", rate)
    config_echo = {"schema_version": SCHEMA_VERSION, "n": n, "snr": snr, "eps": eps}
    if args.format == "csv":
        text = reporting.render_csv(
            ("n", "snr", "eps", "rate"),
            [{"n": n, "snr": snr, "eps": eps, "rate": rate}],
            config_echo,
        )
    else:
        text = reporting.render_json(
            {"schema_version": SCHEMA_VERSION, "config": config_echo, "rate": rate}
        )
    _emit(args, text)
    return 0


def _cmd_ed_min(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config) if args.config else {"schema_version": SCHEMA_VERSION}
    schema = {
        "schema_version": None,
        "channel": {"a12": None, "a21": None, "p1": None, "p2": None},
        "n1": None,
        "n2": None,
        "log_m1": None,
        "eps_21": None,
    }
    _reject_unknown(cfg, schema)
    _merge_flag(cfg, ("channel", "a12"), args.a12)
    _merge_flag(cfg, ("channel", "a21"), args.a21)
    _merge_flag(cfg, ("channel", "p1"), args.p1)
    _merge_flag(cfg, ("channel", "p2"), args.p2)
    _merge_flag(cfg, ("n1",), args.n1)
    _merge_flag(cfg, ("n2",), args.n2)
    _merge_flag(cfg, ("log_m1",), args.log_m1)
    _merge_flag(cfg, ("eps_21",), args.eps)

    params = _channel_from(cfg, require_a12=False)
    n1 = int(_require(cfg, ("n1",)))
    log_m1 = float(_require(cfg, ("log_m1",)))
    eps_21 = float(_require(cfg, ("eps_21",)))
    n2 = cfg.get("n2")

    query = EdQuery(params=params, n1=n1, log_m1=log_m1, eps_21=eps_21)
    bound = ed_bound(query)
    _check_finite("ed-min", bound.raw)

    config_echo = {
        "schema_version": SCHEMA_VERSION,
        "channel": {"a12": params.a12, "a21": params.a21, "p1": params.p1, "p2": params.p2},
        "n1": n1,
        "n2": n2,
        "log_m1": log_m1,
        "eps_21": eps_21,
    }
    result: dict[str, Any] = {
        "n1_tilde": bound.n1_tilde,
        "raw_bound": bound.raw,
        "tail_term": bound.tail_term,
        "payload_term": bound.payload_term,
        "tail_nonpositive": bound.tail_nonpositive,
    }
    if n2 is not None:
        n2 = int(n2)
        result["feasible"] = bound.n1_tilde <= n2
        result["margin"] = n2 - bound.n1_tilde
    if args.format == "csv":
        columns = tuple(result.keys())
        text = reporting.render_csv(columns, [result], config_echo)
    else:
        text = reporting.render_json(
            {"schema_version": SCHEMA_VERSION, "config": config_echo, "result": result}
        )
    _emit(args, text)
    return 0


def _parse_int_list(s: str) -> list[int]:
    return [int(tok) for tok in s.split(",") if tok.strip()]


def _cmd_latency(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config) if args.config else {"schema_version": SCHEMA_VERSION}
    schema = {
        "schema_version": None,
        "a21_grid": {"min": None, "max": None, "count": None},
        "a21_values": None,
        "p1": None,
        "p2": None,
        "n1_values": None,
        "eps_21": None,
        "log_m1": None,
    }
    _reject_unknown(cfg, schema)
    _merge_flag(cfg, ("a21_grid", "min"), args.a21_min)
    _merge_flag(cfg, ("a21_grid", "max"), args.a21_max)
    _merge_flag(cfg, ("a21_grid", "count"), args.a21_count)
    _merge_flag(cfg, ("p1",), args.p1)
    _merge_flag(cfg, ("p2",), args.p2)
    if args.n1_list is not None:
        cfg["n1_values"] = _parse_int_list(args.n1_list)
    _merge_flag(cfg, ("eps_21",), args.eps)
    _merge_flag(cfg, ("log_m1",), args.log_m1)

    p1 = _linear_value(_require(cfg, ("p1",)))
    p2 = _linear_value(_require(cfg, ("p2",)))
    eps_21 = float(_require(cfg, ("eps_21",)))
    log_m1 = float(cfg.get("log_m1", 0.0))
    n1_values = [int(n) for n in _require(cfg, ("n1_values",))]

    if "a21_values" in cfg:
        a21_values = [_linear_value(a) for a in cfg["a21_values"]]
    else:
        lo = _linear_value(_require(cfg, ("a21_grid", "min")))
        hi = _linear_value(_require(cfg, ("a21_grid", "max")))
        count = int(_require(cfg, ("a21_grid", "count")))
        if count < 2 or not (0.0 < lo < hi):
            raise ValueError("a21_grid needs 0 < min < max and count >= 2")
        step = (math.log10(hi) - math.log10(lo)) / (count - 1)
        a21_values = [10.0 ** (math.log10(lo) + i * step) for i in range(count)]

    rows = latency_sweep(a21_values, p1, p2, n1_values, eps_21, log_m1)

    config_echo = {
        "schema_version": SCHEMA_VERSION,
        "a21_values": a21_values,
        "p1": p1,
        "p2": p2,
        "n1_values": sorted(n1_values),
        "eps_21": eps_21,
        "log_m1": log_m1,
    }
    if args.format == "json":
        text = reporting.render_json(reporting.latency_document(rows, config_echo))
    else:
        text = reporting.render_csv(
            reporting.LATENCY_COLUMNS, reporting.latency_rows(rows), config_echo
        )
    _emit(args, text)
    if args.plot:
        reporting.plot_latency(rows, args.plot)
    return 0


def _cmd_region(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config) if args.config else {"schema_version": SCHEMA_VERSION}
    schema = {
        "schema_version": None,
        "channel": {"a12": None, "a21": None, "p1": None, "p2": None},
        "blocklengths": {"n1": None, "n2": None},
        "eps_total": None,
        "omega_count": None,
        "split_resolution": None,
        "rate_tolerance": None,
    }
    _reject_unknown(cfg, schema)
    for flag, path in (
        (args.a12, ("channel", "a12")),
        (args.a21, ("channel", "a21")),
        (args.p1, ("channel", "p1")),
        (args.p2, ("channel", "p2")),
        (args.n1, ("blocklengths", "n1")),
        (args.n2, ("blocklengths", "n2")),
        (args.eps, ("eps_total",)),
        (args.omega_count, ("omega_count",)),
        (args.split_resolution, ("split_resolution",)),
        (args.rate_tolerance, ("rate_tolerance",)),
    ):
        _merge_flag(cfg, path, flag)

    params = _channel_from(cfg, require_a12=True)
    blocklengths = BlocklengthConfig(
        n1=int(_require(cfg, ("blocklengths", "n1"))),
        n2=int(_require(cfg, ("blocklengths", "n2"))),
    )
    eps_total = float(_require(cfg, ("eps_total",)))
    omega_count = int(cfg.get("omega_count", 101))
    split_resolution = int(cfg.get("split_resolution", 1))
    rate_tolerance = float(cfg.get("rate_tolerance", 1e-4))
    if omega_count < 2:
        raise ValueError("omega_count must be >= 2")

    sweep_cfg = SweepConfig(
        params=params,
        blocklengths=blocklengths,
        eps_total=eps_total,
        omega_grid=tuple(i / (omega_count - 1) for i in range(omega_count)),
        split_resolution=split_resolution,
        rate_tolerance=rate_tolerance,
    )
    sweep = region_sweep(sweep_cfg, threads=args.threads)

    config_echo = {
        "schema_version": SCHEMA_VERSION,
        "channel": {"a12": params.a12, "a21": params.a21, "p1": params.p1, "p2": params.p2},
        "blocklengths": {"n1": blocklengths.n1, "n2": blocklengths.n2},
        "eps_total": eps_total,
        "omega_count": omega_count,
        "split_resolution": split_resolution,
        "rate_tolerance": rate_tolerance,
    }
    if args.format == "json":
        text = reporting.render_json(reporting.region_document(sweep, config_echo))
    else:
        text = reporting.render_csv(
            reporting.REGION_COLUMNS, reporting.region_rows(sweep), config_echo
        )
    _emit(args, text)
    if args.plot:
        reporting.plot_region(sweep, args.plot)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config) if args.config else {"schema_version": SCHEMA_VERSION}
    schema = {
        "schema_version": None,
        "channel": {"a12": None, "a21": None, "p1": None, "p2": None},
        "blocklengths": {"n1": None, "n2": None, "n1_tilde": None},
        "log_m1": None,
        "log_m2": None,
        "trials": None,
        "seed": None,
        "ed_enabled": None,
        "fresh_codebooks": None,
    }
    _reject_unknown(cfg, schema)
    for flag, path in (
        (args.a12, ("channel", "a12")),
        (args.a21, ("channel", "a21")),
        (args.p1, ("channel", "p1")),
        (args.p2, ("channel", "p2")),
        (args.n1, ("blocklengths", "n1")),
        (args.n2, ("blocklengths", "n2")),
        (args.n1_tilde, ("blocklengths", "n1_tilde")),
        (args.log_m1, ("log_m1",)),
        (args.log_m2, ("log_m2",)),
        (args.trials, ("trials",)),
        (args.seed, ("seed",)),
    ):
        _merge_flag(cfg, path, flag)
    if args.no_ed:
        cfg["ed_enabled"] = False
    if args.fixed_codebooks:
        cfg["fresh_codebooks"] = False

    params = _channel_from(cfg, require_a12=True)
    bl = cfg.get("blocklengths", {})
    blocklengths = BlocklengthConfig(
        n1=int(_require(cfg, ("blocklengths", "n1"))),
        n2=int(_require(cfg, ("blocklengths", "n2"))),
        n1_tilde=(int(bl["n1_tilde"]) if bl.get("n1_tilde") is not None else None),
    )
    exp = SimExperiment(
        params=params,
        blocklengths=blocklengths,
        log_m1=int(_require(cfg, ("log_m1",))),
        log_m2=int(_require(cfg, ("log_m2",))),
        trials=int(_require(cfg, ("trials",))),
        seed=int(_require(cfg, ("seed",))),
        ed_enabled=bool(cfg.get("ed_enabled", True)),
        fresh_codebooks=bool(cfg.get("fresh_codebooks", True)),
    )
    result = run_experiment(exp, threads=args.threads)

    config_echo = {
        "schema_version": SCHEMA_VERSION,
        "channel": {"a12": params.a12, "a21": params.a21, "p1": params.p1, "p2": params.p2},
        "blocklengths": {
            "n1": blocklengths.n1,
            "n2": blocklengths.n2,
            "n1_tilde": blocklengths.n1_tilde,
        },
        "log_m1": exp.log_m1,
        "log_m2": exp.log_m2,
        "trials": exp.trials,
        "seed": exp.seed,
        "ed_enabled": exp.ed_enabled,
        "fresh_codebooks": exp.fresh_codebooks,
    }
    if args.format == "csv":
        row: dict[str, Any] = {"trials": result.trials}
        for name in (
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
        ):
            row[name] = getattr(result, name)
        text = reporting.render_csv(tuple(row.keys()), [row], config_echo)
    else:
        text = reporting.render_json(
            {
                "schema_version": SCHEMA_VERSION,
                "config": config_echo,
                "result": result.to_dict(),
            }
        )
    _emit(args, text)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser, *, plot: bool = False) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--threads", type=int, default=1, help="worker threads")
    if plot:
        parser.add_argument("--plot", help="also render a figure to this path")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hbgic",
        description="Finite-blocklength analysis of the heterogeneous-blocklength "
        "Gaussian interference channel",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("p2p-rate", help="point-to-point normal-approximation rate")
    _add_common(p)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--n", type=int, help="blocklength")
    p.add_argument("--snr", type=_linear_value, help="SNR, linear or '<x>db'")
    p.add_argument("--eps", type=float, help="target error probability")
    p.set_defaults(handler=_cmd_p2p_rate)

    p = sub.add_parser("ed-min", help="minimum early-decoding length")
    _add_common(p)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--a12", type=_linear_value)
    p.add_argument("--a21", type=_linear_value)
    p.add_argument("--p1", type=_linear_value)
    p.add_argument("--p2", type=_linear_value)
    p.add_argument("--n1", type=int)
    p.add_argument("--n2", type=int, help="receiver-2 window for the feasibility check")
    p.add_argument("--log-m1", dest="log_m1", type=float, help="payload in bits")
    p.add_argument("--eps", type=float, help="step-1 error budget eps_21")
    p.set_defaults(handler=_cmd_ed_min)

    p = sub.add_parser("latency", help="early-decoding latency sweep over a21")
    _add_common(p, plot=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--a21-min", dest="a21_min", type=_linear_value)
    p.add_argument("--a21-max", dest="a21_max", type=_linear_value)
    p.add_argument("--a21-count", dest="a21_count", type=int)
    p.add_argument("--p1", type=_linear_value)
    p.add_argument("--p2", type=_linear_value)
    p.add_argument("--n1-list", dest="n1_list", help="comma-separated n1 values")
    p.add_argument("--eps", type=float, help="step-1 error budget eps_21")
    p.add_argument("--log-m1", dest="log_m1", type=float)
    p.set_defaults(handler=_cmd_latency)

    p = sub.add_parser("region", help="second-order rate-region sweep")
    _add_common(p, plot=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--a12", type=_linear_value)
    p.add_argument("--a21", type=_linear_value)
    p.add_argument("--p1", type=_linear_value)
    p.add_argument("--p2", type=_linear_value)
    p.add_argument("--n1", type=int)
    p.add_argument("--n2", type=int)
    p.add_argument("--eps", type=float, help="total error budget")
    p.add_argument("--omega-count", dest="omega_count", type=int)
    p.add_argument("--split-resolution", dest="split_resolution", type=int)
    p.add_argument("--rate-tolerance", dest="rate_tolerance", type=float)
    p.set_defaults(handler=_cmd_region)

    p = sub.add_parser("simulate", help="Monte Carlo SIC decoding")
    _add_common(p)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--a12", type=_linear_value)
    p.add_argument("--a21", type=_linear_value)
    p.add_argument("--p1", type=_linear_value)
    p.add_argument("--p2", type=_linear_value)
    p.add_argument("--n1", type=int)
    p.add_argument("--n2", type=int)
    p.add_argument("--n1-tilde", dest="n1_tilde", type=int)
    p.add_argument("--log-m1", dest="log_m1", type=int)
    p.add_argument("--log-m2", dest="log_m2", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--no-ed", dest="no_ed", action="store_true", help="first step uses the full n2 window")
    p.add_argument(
        "--fixed-codebooks",
        dest="fixed_codebooks",
        action="store_true",
        help="freeze one codebook pair for the whole run",
    )
    p.set_defaults(handler=_cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ArithmeticError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
