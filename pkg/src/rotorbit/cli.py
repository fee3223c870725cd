"""Batch front-end: flat key-value configs, one command per analysis, and
deterministic JSON/CSV artifacts suitable for plotting.

Commands: rotnum, rotint, tsearch, minset, sdsm, entropy-cert, sep-count,
bowen-check, plus sweep (1- or 2-axis parameter scans re-running one of the
above per cell). Every command draws its sample points from seeded
low-discrepancy ensembles, so a seed must be given explicitly (config key or
--seed) when running a command; identical inputs give byte-identical output
files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circlecore import (
    DEFAULT_GRID_M,
    GOLDEN_MEAN,
    FibreFamily,
    is_rational_surrogate,
)
from .entropy import (
    SCOPES,
    cover_lift,
    entropy_certificate,
    monotone_entropy_check,
    separation_counts,
)
from .errors import ConfigError, RotorbitError
from .minimalset import (
    cloud_for_rotation,
    combine_sdsm_reports,
    gamma_crossing_certificate,
    sdsm_diagnostics,
    uniform_rotation_check,
)
from .plateau import forced_map
from .rotation import find_t_for_rho, rotation_interval, rotation_number_monotone

COMMANDS = (
    "rotnum",
    "rotint",
    "tsearch",
    "minset",
    "sdsm",
    "entropy-cert",
    "sep-count",
    "bowen-check",
)
SWEEP_AXES = ("tau", "alpha", "beta")
MAX_SWEEP_CELLS = 10**5

# scalar artifact columns per command, used for sweep rows
SWEEP_COLUMNS = {
    "rotnum": ("value", "spread", "richardson_gap"),
    "rotint": ("lo", "hi", "length", "midpoint"),
    "tsearch": ("t", "achieved_rho", "iterations", "status"),
    "minset": ("t", "achieved_rho", "cloud_size", "uniform_max_deviation"),
    "sdsm": ("gamma_gap", "crossing_ok", "interval_property_ok"),
    "entropy-cert": ("N", "epsilon", "lower_bound", "rho1", "rho2"),
    "sep-count": ("S_lower", "R_upper"),
    "bowen-check": ("rate", "sse_linear", "sse_exponential", "linear_wins", "passed"),
}


@dataclass(frozen=True)
class RunConfig:
    kind: str = "arnold"
    tau: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    omega: float = GOLDEN_MEAN
    m: int = DEFAULT_GRID_M
    n: int = 10**5
    K: int = 50
    seed: int = 0
    t: float = 0.0
    rho: float | None = None
    rho1: float | None = None
    rho2: float | None = None
    tol_rho: float = 1e-4
    depth: int = 40
    burn_in: int = 2000
    cloud_points: int = 20000
    grid_theta: int = 1024
    grid_x: int = 1024
    eps: float = 0.05
    horizons: tuple[int, ...] = (10, 20, 40, 80)
    scope: str = "fibre"
    k: int = 4
    sample: int = 2000
    n_theta: int = 4096
    theta0: float = 0.0
    sweep_axis1: str | None = None
    sweep_axis2: str | None = None
    sweep_command: str | None = None
    explicit: frozenset = frozenset()

    def family(self) -> FibreFamily:
        return FibreFamily(
            kind=self.kind, tau=self.tau, alpha=self.alpha, beta=self.beta,
            omega=self.omega,
        )


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple[tuple[str, float, float, int], ...]
    command: str


_FLOAT_KEYS = {
    "tau": (-1000.0, 1000.0),
    "alpha": (-1000.0, 1000.0),
    "beta": (-1000.0, 1000.0),
    "omega": (0.0, 1.0),
    "t": (0.0, 1.0),
    "rho": (-100.0, 100.0),
    "rho1": (-100.0, 100.0),
    "rho2": (-100.0, 100.0),
    "tol_rho": (1e-12, 0.5),
    "eps": (1e-12, 2.0),
    "theta0": (0.0, 1.0),
}
_INT_KEYS = {
    "m": (16, 1 << 22),
    "n": (1, 10**8),
    "K": (1, 10**5),
    "seed": (0, 2**63 - 1),
    "depth": (0, 60),
    "burn_in": (0, 10**7),
    "cloud_points": (1, 10**7),
    "grid_theta": (1, 4096),
    "grid_x": (1, 4096),
    "k": (1, 64),
    "sample": (1, 10**6),
    "n_theta": (4, 1 << 20),
}
_STR_KEYS = ("kind", "scope", "sweep_axis1", "sweep_axis2", "sweep_command", "horizons")
_ALL_KEYS = (*_FLOAT_KEYS, *_INT_KEYS, *_STR_KEYS)
# case-insensitive fallback, minus keys that collide when lowercased (K vs k)
_CASE_MAP = {
    low: keys[0]
    for low, keys in {
        low: [k for k in _ALL_KEYS if k.lower() == low]
        for low in {k.lower() for k in _ALL_KEYS}
    }.items()
    if len(keys) == 1
}


def _parse_int(key: str, s: str) -> int:
    s = s.replace("_", "")
    try:
        return int(s)
    except ValueError:
        pass
    try:
        v = float(s)
    except ValueError:
        raise ConfigError(f"{key}: could not parse {s!r} as an integer") from None
    if not v.is_integer():
        raise ConfigError(f"{key}: {s!r} is not an integer")
    return int(v)


def _parse_float(key: str, s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise ConfigError(f"{key}: could not parse {s!r} as a number") from None
    if not np.isfinite(v):
        raise ConfigError(f"{key}: value must be finite")
    return v


def _tokenize(text: str) -> dict[str, str]:
    body = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        body.append(line)
    doc = "\n".join(body).strip()
    if doc.startswith("{") and doc.endswith("}"):
        doc = doc[1:-1]
    entries: dict[str, str] = {}
    for chunk in doc.replace(";", "\n").replace(",", "\n").splitlines():
        chunk = chunk.strip()
        if not chunk:
            continue
        for sep in (":", "="):
            if sep in chunk:
                key, _, value = chunk.partition(sep)
                break
        else:
            raise ConfigError(f"malformed entry {chunk!r} (expected key: value)")
        key = key.strip()
        value = value.strip().strip("'\"")
        if not key:
            raise ConfigError(f"malformed entry {chunk!r} (empty key)")
        canon = key if key in _ALL_KEYS else _CASE_MAP.get(key.lower())
        if canon is None:
            raise ConfigError(f"unknown key {key!r}")
        if canon in entries:
            raise ConfigError(f"duplicate key {key!r}")
        entries[canon] = value
    return entries


def _parse_horizons(s: str) -> tuple[int, ...]:
    parts = s.split()
    if not parts:
        raise ConfigError("horizons: empty list")
    vals = tuple(_parse_int("horizons", p) for p in parts)
    if any(v < 0 or v > 10**5 for v in vals):
        raise ConfigError("horizons: entries must lie in [0, 1e5]")
    if list(vals) != sorted(set(vals)):
        raise ConfigError("horizons: entries must be strictly increasing")
    return vals


def _parse_axis(key: str, s: str) -> tuple[str, float, float, int]:
    parts = s.split()
    if len(parts) != 4:
        raise ConfigError(f"{key}: expected 'name min max steps', got {s!r}")
    name = parts[0]
    if name not in SWEEP_AXES:
        raise ConfigError(f"{key}: axis must be one of {SWEEP_AXES}")
    lo = _parse_float(key, parts[1])
    hi = _parse_float(key, parts[2])
    steps = _parse_int(key, parts[3])
    if steps < 1 or steps > MAX_SWEEP_CELLS:
        raise ConfigError(f"{key}: steps must lie in [1, {MAX_SWEEP_CELLS}]")
    if hi < lo:
        raise ConfigError(f"{key}: max must be >= min")
    return name, lo, hi, steps


def parse_config(
    text: str, command: str | None = None, seed_override: int | None = None
) -> RunConfig:
    """Parse a flat key-value document (lines or comma-separated entries,
    key: value or key = value, '#' comments, optional surrounding braces)
    into a validated RunConfig with defaults filled in."""
    entries = _tokenize(text)
    if seed_override is not None:
        entries["seed"] = str(seed_override)

    fields: dict = {}
    for key, raw in entries.items():
        if key in _FLOAT_KEYS:
            v = _parse_float(key, raw)
            lo, hi = _FLOAT_KEYS[key]
            closed_left = key not in ("tol_rho", "eps")
            ok = (lo <= v if closed_left else lo < v) and v <= hi
            if key in ("omega", "theta0"):
                ok = lo <= v < hi if key == "theta0" else lo < v < hi
            if not ok:
                raise ConfigError(f"{key}: value {v!r} out of range [{lo}, {hi}]")
            fields[key] = v
        elif key in _INT_KEYS:
            v = _parse_int(key, raw)
            lo, hi = _INT_KEYS[key]
            if not (lo <= v <= hi):
                raise ConfigError(f"{key}: value {v} out of range [{lo}, {hi}]")
            fields[key] = v
        elif key == "horizons":
            fields[key] = _parse_horizons(raw)
        elif key == "kind":
            if raw != "arnold":
                raise ConfigError(
                    f"kind: only 'arnold' is supported in configs (got {raw!r})"
                )
            fields[key] = raw
        elif key == "scope":
            if raw not in SCOPES:
                raise ConfigError(f"scope: must be one of {SCOPES} (got {raw!r})")
            fields[key] = raw
        elif key in ("sweep_axis1", "sweep_axis2"):
            fields[key] = " ".join(raw.split())
            _parse_axis(key, raw)
        elif key == "sweep_command":
            if raw not in COMMANDS:
                raise ConfigError(f"sweep_command: must be one of {COMMANDS}")
            fields[key] = raw

    if "n_theta" in fields and fields["n_theta"] % 4 != 0:
        raise ConfigError("n_theta: must be divisible by 4")
    cfg = RunConfig(**fields, explicit=frozenset(entries))
    if is_rational_surrogate(cfg.omega):
        raise ConfigError(
            "omega: must not be exactly rational with denominator <= 1e6"
        )
    if command is not None:
        _validate_for(cfg, command)
    return cfg


def _require(cfg: RunConfig, key: str, command: str):
    if getattr(cfg, key) is None:
        raise ConfigError(f"{key}: required for command '{command}'")


def _validate_for(cfg: RunConfig, command: str):
    if command != "sweep" and command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    if "seed" not in cfg.explicit:
        raise ConfigError(
            f"seed: required for stochastic command '{command}' "
            "(set it in the config or pass --seed)"
        )
    if command in ("tsearch", "minset", "sdsm"):
        _require(cfg, "rho", command)
    if command == "entropy-cert":
        _require(cfg, "rho1", command)
        _require(cfg, "rho2", command)
        if cfg.rho2 <= cfg.rho1:
            raise ConfigError("rho2: must exceed rho1")
    if command in ("sep-count", "bowen-check") and cfg.scope == "cloud":
        _require(cfg, "rho", command)
    if command == "bowen-check" and cfg.scope not in ("fibre", "cloud"):
        raise ConfigError("scope: bowen-check supports 'fibre' or 'cloud'")
    if command == "sweep":
        if cfg.sweep_command is None:
            raise ConfigError("sweep_command: required for command 'sweep'")
        if cfg.sweep_axis1 is None:
            raise ConfigError("sweep_axis1: required for command 'sweep'")
        axes = [_parse_axis("sweep_axis1", cfg.sweep_axis1)]
        if cfg.sweep_axis2 is not None:
            axes.append(_parse_axis("sweep_axis2", cfg.sweep_axis2))
            if axes[0][0] == axes[1][0]:
                raise ConfigError("sweep_axis2: axes must differ")
        cells = axes[0][3] * (axes[1][3] if len(axes) > 1 else 1)
        if cells > MAX_SWEEP_CELLS:
            raise ConfigError(f"sweep: total cells {cells} exceed {MAX_SWEEP_CELLS}")
        _validate_for(cfg, cfg.sweep_command)


# ---------------------------------------------------------------------------
# command execution
# ---------------------------------------------------------------------------


@dataclass
class CommandResult:
    payload: dict
    table: np.ndarray | None = None
    table_columns: tuple[str, ...] | None = None


def _execute(cfg: RunConfig, command: str) -> CommandResult:
    family = cfg.family()
    if command == "rotnum":
        fmap = forced_map(family, cfg.t, cfg.m)
        est = rotation_number_monotone(fmap, n=cfg.n, K=cfg.K, seed=cfg.seed)
        return CommandResult(
            payload={
                "value": est.value, "spread": est.spread,
                "richardson_gap": est.richardson_gap, "n": est.n,
                "K": cfg.K, "seed": cfg.seed,
            }
        )
    if command == "rotint":
        ri = rotation_interval(family, n=cfg.n, K=cfg.K, seed=cfg.seed, m=cfg.m)
        return CommandResult(
            payload={
                "lo": ri.lo, "hi": ri.hi, "length": ri.length,
                "midpoint": ri.midpoint(), "lo_spread": ri.lo_est.spread,
                "hi_spread": ri.hi_est.spread, "n": cfg.n, "K": cfg.K,
                "seed": cfg.seed,
            }
        )
    if command == "tsearch":
        res = find_t_for_rho(
            family, cfg.rho, tol_rho=cfg.tol_rho, n=cfg.n, K=cfg.K,
            seed=cfg.seed, m=cfg.m,
        )
        return CommandResult(
            payload={
                "t": res.t, "achieved_rho": res.achieved_rho,
                "target_rho": res.target_rho, "iterations": res.iterations,
                "status": res.status, "seed": cfg.seed,
            }
        )
    if command == "minset":
        cloud, fmap, tres = cloud_for_rotation(
            family, cfg.rho, depth=cfg.depth, burn_in=cfg.burn_in,
            M=cfg.cloud_points, n=cfg.n, K=cfg.K, seed=cfg.seed, m=cfg.m,
            tol_rho=cfg.tol_rho, theta0=cfg.theta0,
        )
        ur = uniform_rotation_check(cloud, fmap)
        return CommandResult(
            payload={
                "t": tres.t, "achieved_rho": tres.achieved_rho,
                "target_rho": cfg.rho, "cloud_size": len(cloud),
                "depth": cfg.depth, "uniform_max_deviation": ur.max_deviation,
                "uniform_n": ur.n, "uniform_passed": ur.passed, "seed": cfg.seed,
            },
            table=cloud.points,
            table_columns=("theta", "x"),
        )
    if command == "sdsm":
        cloud, fmap, tres = cloud_for_rotation(
            family, cfg.rho, depth=cfg.depth, burn_in=cfg.burn_in,
            M=cfg.cloud_points, n=cfg.n, K=cfg.K, seed=cfg.seed, m=cfg.m,
            tol_rho=cfg.tol_rho, theta0=cfg.theta0,
        )
        cross = gamma_crossing_certificate(
            family, tres.t, n_theta=cfg.n_theta, m=fmap.m, fmap=fmap
        )
        comp = sdsm_diagnostics(cloud, grid=(cfg.grid_theta, cfg.grid_x))
        rep = combine_sdsm_reports(cross, comp)
        return CommandResult(
            payload={
                "gamma_gap": rep.gamma_gap,
                "crossing_ok": rep.crossing_ok,
                "band_arcs": [list(arc) for arc in rep.band.arcs],
                "component_histogram": [list(kv) for kv in rep.component_stats],
                "interval_property_ok": rep.interval_property_ok,
            }
        )
    if command == "entropy-cert":
        cert = entropy_certificate(
            family, cfg.rho1, cfg.rho2, tol=cfg.tol_rho, n=cfg.n, K=cfg.K,
            seed=cfg.seed, m=cfg.m, depth=cfg.depth, burn_in=cfg.burn_in,
            M=cfg.cloud_points,
        )
        return CommandResult(
            payload={
                "rho1": cert.rho1, "rho2": cert.rho2, "epsilon": cert.epsilon,
                "N": cert.N, "lower_bound": cert.lower_bound,
                "itinerary_counts": list(cert.itinerary_counts),
                "theta_bin": cert.theta_bin,
            }
        )
    if command == "sep-count":
        # here the n key is the separation horizon, not an orbit length
        horizon = cfg.n if "n" in cfg.explicit else 20
        cloud = None
        if cfg.scope == "cover":
            obj = cover_lift(family, cfg.k)
        else:
            obj = family
            if cfg.scope == "cloud":
                cloud, _, _ = cloud_for_rotation(
                    family, cfg.rho, depth=cfg.depth, burn_in=cfg.burn_in,
                    M=cfg.cloud_points, n=10**5, K=cfg.K, seed=cfg.seed,
                    m=cfg.m, tol_rho=cfg.tol_rho, theta0=cfg.theta0,
                )
        sc = separation_counts(
            obj, cfg.scope, horizon, cfg.eps, sample=cfg.sample, seed=cfg.seed,
            theta0=cfg.theta0, cloud=cloud,
        )
        return CommandResult(
            payload={
                "scope": sc.scope, "n": sc.n, "eps": sc.eps,
                "S_lower": sc.S_lower, "R_upper": sc.R_upper,
                "sample": sc.sample, "seed": sc.seed,
            }
        )
    if command == "bowen-check":
        if cfg.scope == "cloud":
            cloud, cfmap, _ = cloud_for_rotation(
                family, cfg.rho, depth=cfg.depth, burn_in=cfg.burn_in,
                M=cfg.cloud_points, n=cfg.n, K=cfg.K, seed=cfg.seed, m=cfg.m,
                tol_rho=cfg.tol_rho, theta0=cfg.theta0,
            )
            rep = monotone_entropy_check(
                cloud, eps=cfg.eps, horizons=cfg.horizons, sample=cfg.sample,
                seed=cfg.seed, fmap=cfmap,
            )
        else:
            fmap = forced_map(family, cfg.t, cfg.m)
            rep = monotone_entropy_check(
                fmap, eps=cfg.eps, horizons=cfg.horizons, sample=cfg.sample,
                seed=cfg.seed, theta0=cfg.theta0,
            )
        return CommandResult(
            payload={
                "scope": rep.scope, "eps": rep.eps,
                "horizons": list(rep.horizons), "counts": list(rep.counts),
                "sse_linear": rep.sse_linear,
                "sse_exponential": rep.sse_exponential, "rate": rep.rate,
                "linear_wins": rep.linear_wins, "passed": rep.passed,
                "seed": cfg.seed,
            }
        )
    raise ConfigError(f"unknown command {command!r}")


# ---------------------------------------------------------------------------
# artifact writers
# ---------------------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def _echo_lines(cfg: RunConfig) -> list[str]:
    d = dataclasses.asdict(cfg)
    d.pop("explicit", None)
    lines = []
    for key in sorted(d):
        v = d[key]
        if v is None:
            continue
        if isinstance(v, tuple):
            v = " ".join(str(x) for x in v)
        lines.append(f"# {key} = {v}")
    return lines


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, cfg: RunConfig, columns, rows, payload: dict | None = None):
    lines = _echo_lines(cfg)
    if payload:
        for key in sorted(payload):
            lines.append(f"# {key} = {_cell(payload[key])}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def run_command(cfg: RunConfig, command: str, out: str | None = None) -> int:
    """Execute one command and write its artifact; returns the exit status
    (0 ok, 2 property violation, 3 numeric degeneracy, 4 usage error)."""
    try:
        _validate_for(cfg, command)
        result = _execute(cfg, command)
    except RotorbitError as e:
        print(f"rotorbit {command}: error: {e}", file=sys.stderr)
        return e.exit_code
    ext = "csv" if result.table is not None else "json"
    path = Path(out) if out else Path(f"rotorbit-{command}.{ext}")
    if result.table is not None:
        _write_csv(path, cfg, result.table_columns, result.table, result.payload)
    else:
        _write_json(path, result.payload)
    print(f"rotorbit {command}: wrote {path}")
    return 0


def run_sweep(cfg: RunConfig, out: str | None = None) -> int:
    """Run the configured per-cell command over a 1- or 2-axis grid; one CSV
    row per cell in lexicographic cell order. Cell failures fill the status
    columns and never abort the sweep."""
    try:
        _validate_for(cfg, "sweep")
    except RotorbitError as e:
        print(f"rotorbit sweep: error: {e}", file=sys.stderr)
        return e.exit_code
    axes = [_parse_axis("sweep_axis1", cfg.sweep_axis1)]
    if cfg.sweep_axis2 is not None:
        axes.append(_parse_axis("sweep_axis2", cfg.sweep_axis2))
    command = cfg.sweep_command
    value_cols = SWEEP_COLUMNS[command]
    axis_names = [a[0] for a in axes]
    columns = (*axis_names, *value_cols, "cell_status", "cell_error")

    grids = [np.linspace(lo, hi, steps) for _, lo, hi, steps in axes]
    rows = []
    for v1 in grids[0]:
        for v2 in grids[1] if len(grids) > 1 else [None]:
            overrides = {axis_names[0]: float(v1)}
            if v2 is not None:
                overrides[axis_names[1]] = float(v2)
            cell_cfg = dataclasses.replace(cfg, **overrides)
            axis_vals = [float(v1)] + ([float(v2)] if v2 is not None else [])
            try:
                payload = _execute(cell_cfg, command).payload
                rows.append(
                    (*axis_vals, *(payload.get(c) for c in value_cols), "ok", "")
                )
            except RotorbitError as e:
                msg = " ".join(str(e).replace(",", ";").split())
                rows.append(
                    (*axis_vals, *("" for _ in value_cols), "error", msg)
                )
    path = Path(out) if out else Path("rotorbit-sweep.csv")
    _write_csv(path, cfg, columns, rows)
    print(f"rotorbit sweep: wrote {path} ({len(rows)} cells)")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def main(argv=None) -> int:
    parser = _ArgParser(prog="rotorbit", description=__doc__)
    parser.add_argument("command", help=f"one of {', '.join(COMMANDS)}, or sweep")
    parser.add_argument("--config", required=True, help="path to a key-value config file")
    parser.add_argument("--out", default=None, help="artifact output path")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    try:
        args = parser.parse_args(argv)
        if args.command not in (*COMMANDS, "sweep"):
            raise ConfigError(
                f"unknown command {args.command!r}; expected one of "
                f"{', '.join((*COMMANDS, 'sweep'))}"
            )
        try:
            text = Path(args.config).read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config file: {e}") from None
        cfg = parse_config(text, command=args.command, seed_override=args.seed)
    except RotorbitError as e:
        print(f"rotorbit: error: {e}", file=sys.stderr)
        return e.exit_code
    if args.command == "sweep":
        return run_sweep(cfg, args.out)
    return run_command(cfg, args.command, args.out)


if __name__ == "__main__":
    sys.exit(main())
